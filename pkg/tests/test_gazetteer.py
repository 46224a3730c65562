import random

import pytest

from lusa.doc_model import Document
from lusa.gazetteer import (
    CompiledGazetteer,
    GazetteerIndexError,
    GazetteerIndex,
    ListEntry,
    annotate_lookups,
    compile_gazetteer,
    load_index,
    tokenize_term,
)
from lusa.linguistic import run_linguistic_cascade

from generators import random_gazetteer_fixture, random_gazetteer_text
from oracles import brute_force_lookups, lookups_as_set


def write_fixture(tmp_path, lists):
    """lists: {filename: (def_suffix, [terms])}"""
    def_lines = []
    for name, (suffix, terms) in lists.items():
        (tmp_path / name).write_text("\n".join(terms) + "\n", encoding="utf-8")
        def_lines.append(f"{name}{suffix}")
    index_path = tmp_path / "lists.def"
    index_path.write_text("\n".join(def_lines) + "\n", encoding="utf-8")
    return index_path


def annotated(text, gaz):
    doc = Document("d", text)
    run_linguistic_cascade(doc)
    annotate_lookups(doc, gaz)
    return doc


def lookup_spans(doc):
    return [(doc.text[a.start:a.end], a.features["majorType"])
            for a in doc.get_set("") if a.type == "Lookup"]


class TestIndex:
    def test_full_feature_columns(self, tmp_path):
        index_path = write_fixture(tmp_path, {
            "a.lst": (":major:minor:en:Flag", ["alpha"]),
            "b.lst": (":just_major", ["beta"]),
        })
        index = load_index(index_path)
        by_file = {e.list_file: e for e, _ in index.entries}
        assert by_file["a.lst"] == ListEntry("a.lst", "major", "minor", "en", "Flag")
        assert by_file["b.lst"] == ListEntry("b.lst", "just_major")

    def test_missing_major_type_rejected(self, tmp_path):
        index_path = write_fixture(tmp_path, {"a.lst": ("", ["alpha"])})
        with pytest.raises(GazetteerIndexError):
            load_index(index_path)

    def test_missing_list_file_rejected(self, tmp_path):
        (tmp_path / "lists.def").write_text("ghost.lst:major\n", encoding="utf-8")
        with pytest.raises(GazetteerIndexError):
            load_index(tmp_path / "lists.def")

    def test_missing_index_rejected(self, tmp_path):
        with pytest.raises(GazetteerIndexError):
            load_index(tmp_path / "nope.def")

    def test_duplicate_terms_warn_and_dedupe(self, tmp_path):
        index_path = write_fixture(tmp_path, {
            "a.lst": (":major", ["alpha", "alpha", "beta"]),
        })
        with pytest.warns(UserWarning):
            index = load_index(index_path)
        assert index.entries[0][1] == ["alpha", "beta"]

    def test_comments_and_blanks_skipped(self, tmp_path):
        index_path = write_fixture(tmp_path, {
            "a.lst": (":major", ["# comment", "", "alpha"]),
        })
        index = load_index(index_path)
        assert index.entries[0][1] == ["alpha"]


class TestMatching:
    def compiled(self, *terms, major="obj"):
        index = GazetteerIndex([(ListEntry("x.lst", major), list(terms))])
        return compile_gazetteer(index)

    def test_tokenize_term_matches_document_tokenizer(self):
        assert tokenize_term("water body") == ["water", "body"]
        assert tokenize_term("main-road") == ["main", "-", "road"]

    def test_longest_match_per_start(self):
        gaz = self.compiled("water", "water body")
        doc = annotated("near the water body here", gaz)
        assert lookup_spans(doc) == [("water body", "obj")]

    def test_all_start_positions_kept(self):
        gaz = self.compiled("water body", "body")
        doc = annotated("the water body", gaz)
        assert lookup_spans(doc) == [("water body", "obj"), ("body", "obj")]

    def test_case_insensitive_by_default(self):
        gaz = self.compiled("landfill")
        doc = annotated("A LANDFILL site", gaz)
        assert lookup_spans(doc) == [("LANDFILL", "obj")]

    def test_case_sensitive_mode(self):
        index = GazetteerIndex([(ListEntry("x.lst", "obj"), ["Landfill"])])
        gaz = compile_gazetteer(index, case_sensitive=True)
        doc = annotated("Landfill and landfill", gaz)
        assert lookup_spans(doc) == [("Landfill", "obj")]

    def test_match_on_root(self):
        gaz = self.compiled("meter")
        doc = annotated("500 meters away", gaz)
        assert lookup_spans(doc) == [("meters", "obj")]

    def test_match_on_root_disabled(self):
        index = GazetteerIndex([(ListEntry("x.lst", "obj"), ["meter"])])
        gaz = compile_gazetteer(index, match_on_root=False)
        doc = annotated("500 meters away", gaz)
        assert lookup_spans(doc) == []

    def test_mixed_surface_and_root_tokens(self):
        # "water bodies" only matches "water body" through the root layer
        gaz = self.compiled("water body")
        doc = annotated("two water bodies nearby", gaz)
        assert lookup_spans(doc) == [("water bodies", "obj")]

    def test_no_match_across_sentence_split(self):
        gaz = self.compiled("water body")
        doc = annotated("near the water. Body of text", gaz)
        assert lookup_spans(doc) == []

    def test_minor_type_feature(self):
        index = GazetteerIndex([(ListEntry("x.lst", "obj", "river"), ["stream"])])
        doc = annotated("a stream here", compile_gazetteer(index))
        ann = [a for a in doc.get_set("") if a.type == "Lookup"][0]
        assert ann.features == {"majorType": "obj", "list": "x.lst",
                                "minorType": "river"}

    def test_relookup_replaces_previous(self):
        gaz = self.compiled("water")
        doc = annotated("water water", gaz)
        annotate_lookups(doc, gaz)
        assert len(lookup_spans(doc)) == 2

    def test_entry_token_sequences_inventory(self):
        gaz = self.compiled("water body", "road")
        seqs = {seq for seq, _ in gaz.entry_token_sequences()}
        assert seqs == {("water", "body"), ("road",)}


def test_oracle_equivalence_sample(tmp_path):
    rng = random.Random(7)
    for case in range(25):
        gaz = random_gazetteer_fixture(rng, tmp_path / f"g{case}")
        doc = Document(f"d{case}", random_gazetteer_text(rng))
        run_linguistic_cascade(doc)
        annotate_lookups(doc, gaz)
        assert lookups_as_set(doc) == brute_force_lookups(doc, gaz)
