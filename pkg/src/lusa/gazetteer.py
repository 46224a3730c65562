"""Term-list compilation and Lookup annotation of documents.

Lists are plain text, one term per line, referenced from an index file
(`lists.def`) whose lines carry the list features:

    soil_condition.lst:soil_condition[:minorType[:language[:AnnotationType]]]

Matching is token-based: multi-word entries must align with token
boundaries, the longest entry wins at each start position, and matches
from different start positions are all kept.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .doc_model import DEFAULT_SET, Annotation, Document
from .linguistic import tokenize


class GazetteerIndexError(Exception):
    """Raised for unreadable index files or missing list files."""


@dataclass(frozen=True)
class ListEntry:
    list_file: str
    major_type: str
    minor_type: Optional[str] = None
    language: Optional[str] = None
    annotation_type: str = "Lookup"


@dataclass
class GazetteerIndex:
    entries: list[tuple[ListEntry, list[str]]] = field(default_factory=list)


def load_index(path: Path) -> GazetteerIndex:
    path = Path(path)
    if not path.is_file():
        raise GazetteerIndexError(f"index file not found: {path}")
    index = GazetteerIndex()
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(":")
        list_name = parts[0].strip()
        if len(parts) < 2 or not parts[1].strip():
            raise GazetteerIndexError(f"index line missing majorType: {line!r}")
        entry = ListEntry(
            list_file=list_name,
            major_type=parts[1].strip(),
            minor_type=parts[2].strip() if len(parts) > 2 and parts[2].strip() else None,
            language=parts[3].strip() if len(parts) > 3 and parts[3].strip() else None,
            annotation_type=parts[4].strip() if len(parts) > 4 and parts[4].strip() else "Lookup",
        )
        list_path = path.parent / list_name
        if not list_path.is_file():
            raise GazetteerIndexError(f"list file not found: {list_path}")
        seen = set()
        terms = []
        for term_line in list_path.read_text(encoding="utf-8").splitlines():
            term = term_line.strip()
            if not term or term.startswith("#"):
                continue
            if term in seen:
                warnings.warn(f"duplicate entry {term!r} in {list_name}")
                continue
            seen.add(term)
            terms.append(term)
        index.entries.append((entry, terms))
    return index


def tokenize_term(term: str) -> list[str]:
    """Token surfaces of a list entry, using the document tokenizer."""
    doc = tokenize(Document("term", term))
    return [str(a.features["string"]) for a in doc.get_set(DEFAULT_SET)
            if a.type == "Token"]


class CompiledGazetteer:
    """Token-sequence trie over all list entries."""

    TERMINAL = object()

    def __init__(self, case_sensitive: bool = False, match_on_root: bool = True):
        self.case_sensitive = case_sensitive
        self.match_on_root = match_on_root
        self.root: dict = {}
        self.max_len = 0

    def _norm(self, token: str) -> str:
        return token if self.case_sensitive else token.casefold()

    def add(self, term: str, entry: ListEntry) -> None:
        tokens = [self._norm(t) for t in tokenize_term(term)]
        if not tokens:
            return
        node = self.root
        for t in tokens:
            node = node.setdefault(t, {})
        node.setdefault(self.TERMINAL, []).append(entry)
        self.max_len = max(self.max_len, len(tokens))

    def entry_token_sequences(self) -> list[tuple[tuple[str, ...], ListEntry]]:
        """All (token sequence, source entry) pairs, for oracle checks."""
        out = []

        def walk(node, prefix):
            for key, child in node.items():
                if key is self.TERMINAL:
                    for entry in child:
                        out.append((tuple(prefix), entry))
                else:
                    walk(child, prefix + [key])

        walk(self.root, [])
        return out


def compile_gazetteer(index: GazetteerIndex, case_sensitive: bool = False,
                      match_on_root: bool = True) -> CompiledGazetteer:
    gaz = CompiledGazetteer(case_sensitive=case_sensitive, match_on_root=match_on_root)
    for entry, terms in index.entries:
        for term in terms:
            gaz.add(term, entry)
    return gaz


def _token_keys(gaz: CompiledGazetteer, ann: Annotation) -> list[str]:
    keys = [gaz._norm(str(ann.features.get("string", "")))]
    if gaz.match_on_root:
        root = ann.features.get("root")
        if root is not None:
            rk = gaz._norm(str(root))
            if rk not in keys:
                keys.append(rk)
    return keys


def annotate_lookups(doc: Document, gaz: CompiledGazetteer,
                     set_name: str = DEFAULT_SET) -> Document:
    """Add a Lookup annotation for every gazetteer match.

    Matches never cross sentence Split annotations.
    """
    ann_set = doc.get_set(set_name)
    ann_set.remove_type("Lookup")
    tokens = [a for a in ann_set if a.type == "Token"]
    split_points = sorted(a.start for a in ann_set if a.type == "Split")

    def segment_id(offset: int) -> int:
        n = 0
        for sp in split_points:
            if sp < offset:
                n += 1
            else:
                break
        return n

    matches = []
    for i, tok in enumerate(tokens):
        seg = segment_id(tok.start)
        best: Optional[tuple[int, list[ListEntry]]] = None
        # surface and root keys may diverge, so walk all live trie branches
        frontier = [gaz.root]
        j = i
        while j < len(tokens) and segment_id(tokens[j].start) == seg and frontier:
            keys = _token_keys(gaz, tokens[j])
            frontier = [node[key] for node in frontier for key in keys
                        if key in node]
            hits: list[ListEntry] = []
            for node in frontier:
                for entry in node.get(CompiledGazetteer.TERMINAL, []):
                    if entry not in hits:
                        hits.append(entry)
            if hits:
                best = (j, hits)
            j += 1
        if best is not None:
            end_idx, entries = best
            matches.append((tok.start, tokens[end_idx].end, entries))

    for start, end, entries in matches:
        for entry in entries:
            features = {"majorType": entry.major_type, "list": entry.list_file}
            if entry.minor_type:
                features["minorType"] = entry.minor_type
            doc.add_annotation(set_name, entry.annotation_type, start, end, features)
    return doc
