"""Preprocessing cascade: tokenizer, sentence splitter, POS tagger, lemmatizer.

Each stage adds annotations or features consumed downstream by the
gazetteer and the rule engine.  All lexical resources (lexicon, suffix
rules, abbreviations, irregular lemmas) load from plain-text files so
they can be edited without touching code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from pathlib import Path
from typing import Optional

from .doc_model import DEFAULT_SET, Annotation, Document

TAGSET = {
    "NN", "NNS", "NNP", "VB", "VBD", "VBG", "VBN",
    "JJ", "RB", "IN", "DT", "CD", "CC", "PRP", "other",
}

_PUNCTUATION = set(".,;:!?'\"()[]{}<>-–—/\\&%$#@*_~`|^+")

_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)
_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")
_SPACE_RE = re.compile(r"\s+")


def _orth(s: str) -> str:
    if not s or not s[0].isalpha():
        return "other"
    if s.isupper() and len(s) > 1:
        return "allCaps"
    if s.islower():
        return "lowercase"
    if s[0].isupper() and (len(s) == 1 or s[1:].islower()):
        return "upperInitial"
    if any(c.isupper() for c in s):
        return "mixedCaps"
    return "other"


def tokenize(doc: Document, set_name: str = DEFAULT_SET) -> Document:
    """Cover the text with Token and SpaceToken annotations.

    Maximal letter runs are word tokens, digit runs with at most one
    internal decimal point are number tokens, whitespace runs are
    SpaceTokens, and every other character is punctuation or symbol.
    """
    ann_set = doc.get_set(set_name)
    ann_set.remove_type("Token")
    ann_set.remove_type("SpaceToken")
    text = doc.text
    pos = 0
    while pos < len(text):
        m = _SPACE_RE.match(text, pos)
        if m:
            doc.add_annotation(set_name, "SpaceToken", pos, m.end(),
                               {"string": m.group(), "length": len(m.group())})
            pos = m.end()
            continue
        m = _WORD_RE.match(text, pos)
        if m:
            s = m.group()
            doc.add_annotation(set_name, "Token", pos, m.end(),
                               {"string": s, "kind": "word",
                                "length": len(s), "orth": _orth(s)})
            pos = m.end()
            continue
        m = _NUMBER_RE.match(text, pos)
        if m:
            s = m.group()
            doc.add_annotation(set_name, "Token", pos, m.end(),
                               {"string": s, "kind": "number",
                                "length": len(s), "orth": "other"})
            pos = m.end()
            continue
        c = text[pos]
        kind = "punctuation" if c in _PUNCTUATION else "symbol"
        doc.add_annotation(set_name, "Token", pos, pos + 1,
                           {"string": c, "kind": kind, "length": 1, "orth": "other"})
        pos += 1
    return doc


def load_word_list(path: Path) -> list[str]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]


_SENTENCE_TERMINATORS = {".", "!", "?"}


def split_sentences(doc: Document, abbreviations: Optional[list[str]] = None,
                    set_name: str = DEFAULT_SET) -> Document:
    """Add Sentence and Split annotations on top of the token layer."""
    if abbreviations is None:
        abbreviations = default_abbreviations()
    ann_set = doc.get_set(set_name)
    ann_set.remove_type("Sentence")
    ann_set.remove_type("Split")
    text = doc.text

    protected: set[int] = set()
    for abbr in abbreviations:
        start = 0
        while True:
            idx = text.find(abbr, start)
            if idx < 0:
                break
            before_ok = idx == 0 or not text[idx - 1].isalnum()
            for off, ch in enumerate(abbr):
                if ch == "." and before_ok:
                    protected.add(idx + off)
            start = idx + 1

    tokens = [a for a in ann_set if a.type == "Token"]
    split_spans: list[tuple[int, int]] = []
    for tok in tokens:
        if tok.features.get("kind") == "punctuation" and \
                tok.features.get("string") in _SENTENCE_TERMINATORS and \
                tok.start not in protected:
            split_spans.append((tok.start, tok.end))
    for m in re.finditer(r"\n[ \t]*\n", text):
        split_spans.append((m.start(), m.end()))
    split_spans.sort()

    for s, e in split_spans:
        doc.add_annotation(set_name, "Split", s, e, {"string": text[s:e]})

    bounds = [0] + [e for _, e in split_spans] + [len(text)]
    seen = set()
    for seg_start, seg_end in zip(bounds, bounds[1:]):
        if (seg_start, seg_end) in seen or seg_start >= seg_end:
            continue
        seen.add((seg_start, seg_end))
        seg_tokens = [t for t in tokens if t.start >= seg_start and t.end <= seg_end]
        if not seg_tokens:
            continue
        doc.add_annotation(set_name, "Sentence",
                           seg_tokens[0].start, seg_tokens[-1].end, {})
    return doc


@dataclass
class Lexicon:
    """POS lookup table with ordered suffix fallbacks."""
    entries: dict[str, str] = field(default_factory=dict)
    suffix_rules: list[tuple[str, str]] = field(default_factory=list)
    default_word_tag: str = "NN"
    number_tag: str = "CD"

    @classmethod
    def load(cls, lexicon_path: Path, suffix_path: Path) -> "Lexicon":
        entries = {}
        for line in load_word_list(lexicon_path):
            word, _, tag = line.partition("\t")
            tag = tag.strip()
            if tag in TAGSET:
                entries[word.strip().lower()] = tag
        suffixes = []
        for line in load_word_list(suffix_path):
            suffix, _, tag = line.partition("\t")
            suffix = suffix.strip().lstrip("-")
            tag = tag.strip()
            if suffix and tag in TAGSET:
                suffixes.append((suffix, tag))
        return cls(entries=entries, suffix_rules=suffixes)


def pos_tag(doc: Document, lexicon: Optional[Lexicon] = None,
            set_name: str = DEFAULT_SET) -> Document:
    """Assign a category feature to every word and number Token.

    Resolution order: lexicon, suffix rules, upper-initial-mid-sentence
    heuristic (NNP), then the NN default.
    """
    if lexicon is None:
        lexicon = default_lexicon()
    ann_set = doc.get_set(set_name)
    sentence_starts = {a.start for a in ann_set if a.type == "Sentence"}
    for tok in ann_set:
        if tok.type != "Token":
            continue
        kind = tok.features.get("kind")
        if kind == "number":
            tok.features["category"] = lexicon.number_tag
            continue
        if kind != "word":
            continue
        word = str(tok.features.get("string", ""))
        lower = word.lower()
        tag = lexicon.entries.get(lower)
        if tag is None:
            for suffix, stag in lexicon.suffix_rules:
                if lower.endswith(suffix) and len(lower) > len(suffix):
                    tag = stag
                    break
        if tag is None and tok.features.get("orth") == "upperInitial" \
                and tok.start not in sentence_starts:
            tag = "NNP"
        tok.features["category"] = tag or lexicon.default_word_tag
    return doc


_VOWELS = set("aeiou")
_DOUBLABLE = set("bdgmnprt")


def _undouble(stem: str) -> str:
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] in _DOUBLABLE:
        return stem[:-1]
    return stem


def _restore_e(stem: str) -> str:
    # CVC ending with a plain consonant usually lost a silent e (slop -> slope)
    if len(stem) >= 3 and stem[-1] not in _VOWELS and stem[-1] not in "wxy" \
            and stem[-2] in _VOWELS and stem[-3] not in _VOWELS:
        return stem + "e"
    return stem


def _lemma(word: str, tag: str, exceptions: dict[str, str]) -> str:
    w = word.lower()
    if w in exceptions:
        return exceptions[w]
    if tag == "NNS":
        if w.endswith("ies") and len(w) > 4:
            return w[:-3] + "y"
        if w.endswith(("ses", "xes", "zes", "ches", "shes")):
            return w[:-2]
        if w.endswith("s") and not w.endswith("ss"):
            return w[:-1]
        return w
    if tag == "VBG" and w.endswith("ing") and len(w) > 5:
        stem = w[:-3]
        undoubled = _undouble(stem)
        if undoubled != stem:
            return undoubled
        return _restore_e(stem)
    if tag in ("VBD", "VBN") and w.endswith("ed") and len(w) > 4:
        if w.endswith("ied"):
            return w[:-3] + "y"
        stem = w[:-2]
        undoubled = _undouble(stem)
        if undoubled != stem:
            return undoubled
        return _restore_e(stem)
    return w


def morph_analyze(doc: Document, exceptions: Optional[dict[str, str]] = None,
                  set_name: str = DEFAULT_SET) -> Document:
    """Add a lowercase root (lemma) feature to every word Token."""
    if exceptions is None:
        exceptions = default_lemma_exceptions()
    for tok in doc.get_set(set_name):
        if tok.type == "Token" and tok.features.get("kind") == "word":
            word = str(tok.features.get("string", ""))
            tag = str(tok.features.get("category", "NN"))
            tok.features["root"] = _lemma(word, tag, exceptions)
    return doc


def resource_path(name: str) -> Path:
    return Path(str(importlib_resources.files("lusa") / "resources" / name))


def default_abbreviations() -> list[str]:
    return load_word_list(resource_path("lexicon/abbreviations.lst"))


def default_lexicon() -> Lexicon:
    return Lexicon.load(resource_path("lexicon/lexicon.tsv"),
                        resource_path("lexicon/suffixes.tsv"))


def default_lemma_exceptions() -> dict[str, str]:
    table = {}
    for line in load_word_list(resource_path("lexicon/lemma_exceptions.tsv")):
        word, _, root = line.partition("\t")
        if root.strip():
            table[word.strip().lower()] = root.strip().lower()
    return table


def run_linguistic_cascade(doc: Document, set_name: str = DEFAULT_SET) -> Document:
    """Tokenize, split, tag, and lemmatize in order with bundled resources."""
    tokenize(doc, set_name)
    split_sentences(doc, set_name=set_name)
    pos_tag(doc, set_name=set_name)
    morph_analyze(doc, set_name=set_name)
    return doc
