"""Documents, feature-bearing annotations, and their serialization.

Every pipeline stage reads and writes typed spans (annotations) over the
document text.  Offsets are character positions into the decoded text;
annotations live in named sets kept in canonical order (ascending start,
then descending end, then ascending id).
"""

from __future__ import annotations

import html
import html.parser
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union
from xml.sax.saxutils import escape, quoteattr

FeatureValue = Union[str, int, float, bool]

DEFAULT_SET = ""


class IngestError(Exception):
    """Raised when raw input cannot be decoded."""


class SpanError(Exception):
    """Raised for annotation spans outside the document or inverted."""


class ExportError(Exception):
    """Raised when inline XML export would produce crossing elements."""


class StandoffParseError(Exception):
    """Raised for malformed standoff files."""


@dataclass
class Annotation:
    id: int
    type: str
    start: int
    end: int
    features: dict[str, FeatureValue] = field(default_factory=dict)

    def sort_key(self) -> tuple[int, int, int]:
        # canonical order: ascending start, longest first, then id
        return (self.start, -self.end, self.id)

    def __len__(self) -> int:
        return self.end - self.start


class AnnotationSet:
    """Ordered collection of annotations for one pipeline stage."""

    def __init__(self, name: str = DEFAULT_SET):
        self.name = name
        self._anns: list[Annotation] = []
        self._sorted = True

    def add(self, ann: Annotation) -> None:
        self._anns.append(ann)
        self._sorted = False

    def remove_type(self, ann_type: str) -> int:
        before = len(self._anns)
        self._anns = [a for a in self._anns if a.type != ann_type]
        return before - len(self._anns)

    def _ensure_sorted(self) -> None:
        if not self._sorted:
            self._anns.sort(key=Annotation.sort_key)
            self._sorted = True

    def __iter__(self) -> Iterator[Annotation]:
        self._ensure_sorted()
        return iter(list(self._anns))

    def __len__(self) -> int:
        return len(self._anns)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnnotationSet):
            return NotImplemented
        return self.name == other.name and list(self) == list(other)


class Document:
    def __init__(self, doc_id: str, text: str):
        self.id = doc_id
        self.text = text
        self.annotation_sets: dict[str, AnnotationSet] = {}
        self._next_id = 0

    def get_set(self, name: str = DEFAULT_SET) -> AnnotationSet:
        if name not in self.annotation_sets:
            self.annotation_sets[name] = AnnotationSet(name)
        return self.annotation_sets[name]

    def add_annotation(
        self,
        set_name: str,
        ann_type: str,
        start: int,
        end: int,
        features: Optional[dict[str, FeatureValue]] = None,
    ) -> int:
        if not ann_type:
            raise SpanError("annotation type must be non-empty")
        if not (0 <= start <= end <= len(self.text)):
            raise SpanError(
                f"span [{start},{end}) outside document {self.id!r} "
                f"of length {len(self.text)}"
            )
        ann = Annotation(self._next_id, ann_type, start, end, dict(features or {}))
        self._next_id += 1
        self.get_set(set_name).add(ann)
        return ann.id

    def query(
        self,
        set_name: str = DEFAULT_SET,
        type: Optional[str] = None,
        overlapping_span: Optional[tuple[int, int]] = None,
        contained_in_span: Optional[tuple[int, int]] = None,
        feature_equals: Optional[dict[str, FeatureValue]] = None,
    ) -> list[Annotation]:
        out = []
        for ann in self.get_set(set_name):
            if type is not None and ann.type != type:
                continue
            if overlapping_span is not None:
                s, e = overlapping_span
                if ann.end <= s or ann.start >= e:
                    continue
            if contained_in_span is not None:
                s, e = contained_in_span
                if ann.start < s or ann.end > e:
                    continue
            if feature_equals is not None:
                if any(ann.features.get(k) != v for k, v in feature_equals.items()):
                    continue
            out.append(ann)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Document):
            return NotImplemented
        if self.id != other.id or self.text != other.text:
            return False
        mine = {k: v for k, v in self.annotation_sets.items() if len(v)}
        theirs = {k: v for k, v in other.annotation_sets.items() if len(v)}
        return mine == theirs


_BLOCK_TAGS = {
    "p", "div", "br", "li", "ul", "ol", "table", "tr", "td", "th",
    "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "pre", "hr",
    "section", "article", "header", "footer", "title",
}

_SKIP_CONTENT_TAGS = {"script", "style"}


class _TextExtractor(html.parser.HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_CONTENT_TAGS:
            self._skip_depth += 1
        if tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_endtag(self, tag):
        if tag in _SKIP_CONTENT_TAGS and self._skip_depth:
            self._skip_depth -= 1
        if tag in _BLOCK_TAGS:
            self.parts.append("\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self.parts.append(data)


def _normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def ingest_text(raw: Union[bytes, str], format: str = "plain", doc_id: str = "doc") -> Document:
    """Decode raw input into a Document, stripping markup for HTML."""
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(f"input is not valid UTF-8: {exc}") from exc
    else:
        text = raw
    text = _normalize_newlines(text)
    if format == "html":
        extractor = _TextExtractor()
        extractor.feed(text)
        extractor.close()
        text = "".join(extractor.parts)
        # collapse runs of blank lines introduced by adjacent block tags
        text = re.sub(r"\n{2,}", "\n", text).lstrip("\n")
    elif format != "plain":
        raise ValueError(f"unknown format {format!r}")
    return Document(doc_id, text)


def export_inline_xml(doc: Document, set_name: str, types: Iterable[str]) -> str:
    """Wrap each selected annotation span in an XML element.

    Selected annotations must nest cleanly; crossing spans are an error.
    """
    wanted = set(types)
    anns = [a for a in doc.get_set(set_name) if a.type in wanted]
    for i, a in enumerate(anns):
        for b in anns[i + 1:]:
            if b.start >= a.end:
                break
            if b.end > a.end and b.start > a.start:
                raise ExportError(
                    f"crossing spans: {a.type}[{a.start},{a.end}) and "
                    f"{b.type}[{b.start},{b.end})"
                )
    # open tags at start offsets, close at end offsets; longest-first order
    # of `anns` guarantees correct nesting
    opens: dict[int, list[Annotation]] = {}
    closes: dict[int, list[Annotation]] = {}
    for a in anns:
        opens.setdefault(a.start, []).append(a)
        closes.setdefault(a.end, []).append(a)
    out: list[str] = []
    text = doc.text
    for pos in range(len(text) + 1):
        for a in reversed(closes.get(pos, [])):
            out.append(f"</{a.type}>")
        for a in opens.get(pos, []):
            attrs = "".join(
                f" {k}={quoteattr(_feature_to_str(v))}"
                for k, v in sorted(a.features.items())
            )
            out.append(f"<{a.type}{attrs}>")
        if pos < len(text):
            out.append(escape(text[pos]))
    return "".join(out)


def _feature_to_str(v: FeatureValue) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


_BOOL_WORDS = {"true": True, "false": False}
_NUMERIC_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def _encode_value(v: FeatureValue) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    s = v
    escaped = (
        s.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\n", "\\n")
        .replace(";", "\\;")
        .replace("=", "\\=")
    )
    # force string interpretation when the text would lex as a number/bool;
    # "\0" decodes to nothing and cannot arise from the escapes above
    if s in _BOOL_WORDS or _NUMERIC_RE.match(s):
        escaped = "\\0" + escaped
    return escaped


def _decode_value(s: str) -> FeatureValue:
    had_escape = "\\" in s
    out = []
    i = 0
    while i < len(s):
        c = s[i]
        if c == "\\" and i + 1 < len(s):
            nxt = s[i + 1]
            out.append({"t": "\t", "n": "\n", "0": ""}.get(nxt, nxt))
            i += 2
        else:
            out.append(c)
            i += 1
    text = "".join(out)
    if had_escape:
        return text
    if text in _BOOL_WORDS:
        return _BOOL_WORDS[text]
    if _NUMERIC_RE.match(text):
        if re.fullmatch(r"[+-]?\d+", text):
            return int(text)
        return float(text)
    return text


def _escape_line(s: str) -> str:
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape_line(s: str) -> str:
    out = []
    i = 0
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s):
            out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(s[i + 1], s[i + 1]))
            i += 2
        else:
            out.append(s[i])
            i += 1
    return "".join(out)


def export_standoff(doc: Document, set_name: str = DEFAULT_SET) -> str:
    """Serialize one annotation set as line-oriented standoff records.

    The header embeds the source text so the file round-trips to an
    equal document via import_standoff.
    """
    lines = [f"# doc {_escape_line(doc.id)}"]
    lines.append(f"# set {_escape_line(set_name)}")
    lines.append(f"# text {_escape_line(doc.text)}")
    for ann in doc.get_set(set_name):
        feats = ";".join(
            f"{_encode_value(k)}={_encode_value(v)}"
            for k, v in sorted(ann.features.items())
        )
        lines.append(f"{ann.id}\t{ann.type}\t{ann.start}\t{ann.end}\t{feats}")
    return "\n".join(lines) + "\n"


def import_standoff(data: str) -> Document:
    doc_id = None
    text = None
    set_name = DEFAULT_SET
    records = []
    # split on "\n" only: the escaping leaves other line-break characters
    # (\r, \x85, ...) intact inside header and feature fields
    for lineno, line in enumerate(data.split("\n"), 1):
        if not line.strip():
            continue
        if line.startswith("# doc "):
            doc_id = _unescape_line(line[len("# doc "):])
        elif line.startswith("# set"):
            set_name = _unescape_line(line[len("# set "):]) if len(line) > 5 else DEFAULT_SET
        elif line.startswith("# text "):
            text = _unescape_line(line[len("# text "):])
        elif line.startswith("#"):
            continue
        else:
            parts = line.split("\t")
            if len(parts) != 5:
                raise StandoffParseError(f"line {lineno}: expected 5 fields")
            records.append(parts)
    if doc_id is None or text is None:
        raise StandoffParseError("missing '# doc' or '# text' header")
    doc = Document(doc_id, text)
    max_id = -1
    for ann_id_s, ann_type, start_s, end_s, feats_s in records:
        try:
            ann_id, start, end = int(ann_id_s), int(start_s), int(end_s)
        except ValueError as exc:
            raise StandoffParseError(f"bad record {ann_id_s!r}: {exc}") from exc
        features: dict[str, FeatureValue] = {}
        if feats_s:
            for pair in _split_unescaped(feats_s, ";"):
                key_s, _, val_s = _partition_unescaped(pair, "=")
                features[str(_decode_value(key_s))] = _decode_value(val_s)
        if not (0 <= start <= end <= len(text)):
            raise StandoffParseError(f"record {ann_id}: span out of bounds")
        doc.get_set(set_name).add(Annotation(ann_id, ann_type, start, end, features))
        max_id = max(max_id, ann_id)
    doc._next_id = max_id + 1
    return doc


def _split_unescaped(s: str, sep: str) -> list[str]:
    parts, cur, i = [], [], 0
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s):
            cur.append(s[i:i + 2])
            i += 2
        elif s[i] == sep:
            parts.append("".join(cur))
            cur = []
            i += 1
        else:
            cur.append(s[i])
            i += 1
    parts.append("".join(cur))
    return parts


def _partition_unescaped(s: str, sep: str) -> tuple[str, str, str]:
    i = 0
    while i < len(s):
        if s[i] == "\\" and i + 1 < len(s):
            i += 2
        elif s[i] == sep:
            return s[:i], sep, s[i + 1:]
        else:
            i += 1
    return s, "", ""
