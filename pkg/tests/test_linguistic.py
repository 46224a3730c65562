import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lusa.doc_model import Document
from lusa.linguistic import (
    Lexicon,
    default_lemma_exceptions,
    default_lexicon,
    morph_analyze,
    pos_tag,
    run_linguistic_cascade,
    split_sentences,
    tokenize,
)


def tok_doc(text):
    return tokenize(Document("t", text))


def tokens(doc, ann_type="Token"):
    return [a for a in doc.get_set("") if a.type == ann_type]


class TestTokenizer:
    def test_words_numbers_punct(self):
        doc = tok_doc("within 457.5 meters, ok?")
        got = [(a.features["string"], a.features["kind"]) for a in tokens(doc)]
        assert got == [("within", "word"), ("457.5", "number"),
                       ("meters", "word"), (",", "punctuation"),
                       ("ok", "word"), ("?", "punctuation")]

    def test_orth_classes(self):
        doc = tok_doc("NASA Landfill swampy iPhone x")
        got = [a.features["orth"] for a in tokens(doc)]
        assert got == ["allCaps", "upperInitial", "lowercase", "mixedCaps",
                       "lowercase"]

    def test_number_does_not_swallow_word(self):
        doc = tok_doc("500m")
        got = [(a.features["string"], a.features["kind"]) for a in tokens(doc)]
        assert got == [("500", "number"), ("m", "word")]

    def test_symbols(self):
        doc = tok_doc("a § b")
        kinds = [a.features["kind"] for a in tokens(doc)]
        assert kinds == ["word", "symbol", "word"]

    def test_retokenize_is_idempotent(self):
        doc = tok_doc("some text, twice.")
        first = [(a.type, a.start, a.end) for a in doc.get_set("")]
        tokenize(doc)
        second = [(a.type, a.start, a.end) for a in doc.get_set("")]
        assert first == second


@settings(max_examples=80, deadline=None)
@given(st.text(max_size=80))
def test_tokens_partition_text(text):
    doc = tok_doc(text)
    spans = sorted((a.start, a.end) for a in doc.get_set("")
                   if a.type in ("Token", "SpaceToken"))
    pos = 0
    for start, end in spans:
        assert start == pos and end > start
        pos = end
    assert pos == len(text)


class TestSentenceSplitter:
    def test_terminator_split(self):
        doc = tok_doc("One here. Two there!")
        split_sentences(doc, abbreviations=[])
        sents = [(a.start, a.end) for a in tokens(doc, "Sentence")]
        assert len(sents) == 2
        assert doc.text[sents[0][0]:sents[0][1]] == "One here."
        assert doc.text[sents[1][0]:sents[1][1]] == "Two there!"

    def test_abbreviation_protected(self):
        doc = tok_doc("See Dr. Smith today. Then rest.")
        split_sentences(doc, abbreviations=["Dr."])
        assert len(tokens(doc, "Sentence")) == 2

    def test_blank_line_split(self):
        doc = tok_doc("heading without period\n\nbody text")
        split_sentences(doc, abbreviations=[])
        assert len(tokens(doc, "Sentence")) == 2

    def test_every_token_in_some_sentence(self):
        doc = tok_doc("a b. c d! e")
        split_sentences(doc, abbreviations=[])
        sents = [(a.start, a.end) for a in tokens(doc, "Sentence")]
        for tok in tokens(doc):
            assert any(s <= tok.start and tok.end <= e for s, e in sents)


class TestPosTagger:
    def tag(self, text, lexicon=None):
        doc = tok_doc(text)
        split_sentences(doc, abbreviations=[])
        pos_tag(doc, lexicon=lexicon)
        return {a.features["string"]: a.features.get("category")
                for a in tokens(doc)}

    def test_lexicon_and_defaults(self):
        got = self.tag("the soil within 500")
        assert got["the"] == "DT"
        assert got["soil"] == "NN"
        assert got["within"] == "IN"
        assert got["500"] == "CD"

    def test_suffix_rules(self):
        got = self.tag("sloping facilities developed")
        assert got["sloping"] == "VBG"
        assert got["facilities"] == "NNS"
        assert got["developed"] == "VBD"

    def test_upper_initial_mid_sentence_is_nnp(self):
        got = self.tag("the Kranzview board")
        assert got["Kranzview"] == "NNP"

    def test_sentence_initial_capital_is_not_nnp(self):
        got = self.tag("Zutternquap is unknown")
        assert got["Zutternquap"] == "NN"

    def test_custom_lexicon_wins_over_suffix(self):
        lex = Lexicon(entries={"housing": "NN"}, suffix_rules=[("ing", "VBG")])
        got = self.tag("housing sloping", lexicon=lex)
        assert got["housing"] == "NN"
        assert got["sloping"] == "VBG"


class TestLemmatizer:
    def lemma(self, text):
        doc = tok_doc(text)
        split_sentences(doc, abbreviations=[])
        pos_tag(doc)
        morph_analyze(doc)
        return {a.features["string"]: a.features.get("root")
                for a in tokens(doc)}

    def test_plural_nouns(self):
        got = self.lemma("meters facilities boxes ditches sites conditions")
        assert got["meters"] == "meter"
        assert got["facilities"] == "facility"
        assert got["boxes"] == "box"
        assert got["ditches"] == "ditch"
        assert got["sites"] == "site"
        assert got["conditions"] == "condition"

    def test_ing_forms(self):
        got = self.lemma("sloping shifting cracking planning")
        assert got["sloping"] == "slope"
        assert got["shifting"] == "shift"
        assert got["cracking"] == "crack"
        assert got["planning"] == "plan"

    def test_ed_forms(self):
        got = self.lemma("planned classified")
        assert got["planned"] == "plan"
        assert got["classified"] == "classify"

    def test_exception_table(self):
        got = self.lemma("feet developing housing")
        assert got["feet"] == "foot"
        assert got["developing"] == "develop"
        assert got["housing"] == "house"

    def test_lemma_is_lowercase(self):
        got = self.lemma("the Facilities")
        assert got["Facilities"] == "facility"


class TestResources:
    def test_default_lexicon_loads(self):
        lex = default_lexicon()
        assert lex.entries["the"] == "DT"
        assert any(suffix == "ing" for suffix, _ in lex.suffix_rules)

    def test_default_exceptions_load(self):
        exc = default_lemma_exceptions()
        assert exc["feet"] == "foot"


def test_full_cascade_layers():
    doc = Document("d", "Soils shifting near 457 meters. More text.")
    run_linguistic_cascade(doc)
    types = {a.type for a in doc.get_set("")}
    assert {"Token", "SpaceToken", "Sentence", "Split"} <= types
    words = [a for a in doc.get_set("")
             if a.type == "Token" and a.features.get("kind") == "word"]
    assert all("category" in a.features and "root" in a.features for a in words)
    with pytest.raises(Exception):
        doc.add_annotation("", "Token", 0, 99)
