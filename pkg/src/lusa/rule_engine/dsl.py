"""Parser for the annotation-pattern rule language.

A phase file declares the annotation types visible to matching, a
control style, and an ordered list of rules.  Each rule pairs a pattern
(feature-constrained annotation groups with quantifiers and bindings)
with actions that create new annotations over the matched spans:

    phase SetbackQuant
    input Token SpaceToken Lookup
    control appelt

    rule SetbackDistance priority 10:
      ( {Lookup.majorType == "spatial_relation"} ):rel
      ( {Token.kind == "number"} ):dist
      ( {Lookup.majorType == "distance_unit"} ):unit
      {Token.category == "IN"} {Token.category == "DT"}?
      ( {Lookup.majorType == "setback_object"} ):obj
      -->
      :rel..obj => Setback { spatial_relation = :rel.string,
                             distance = :dist.numeric,
                             unit = :unit.string,
                             setback_from = :obj.string }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

CONTROL_STYLES = ("appelt", "brill", "all")
DEFAULT_QUANTIFIER_BOUND = 10


class RuleSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class RuleSemanticError(Exception):
    pass


Literal = Union[str, int, float, bool]


@dataclass(frozen=True)
class Constraint:
    ann_type: str
    feature: Optional[str] = None
    op: Optional[str] = None  # ==, !=, =~, in
    value: Union[Literal, tuple, None] = None


@dataclass
class ConstraintElem:
    constraints: list[Constraint]


@dataclass
class Group:
    alternatives: list["Seq"]


@dataclass
class Term:
    node: Union[ConstraintElem, Group]
    min: int = 1
    max: int = 1
    binding: Optional[str] = None


@dataclass
class Seq:
    terms: list[Term] = field(default_factory=list)


@dataclass(frozen=True)
class ValueExpr:
    kind: str  # literal, string, numeric, feature
    literal: Union[Literal, None] = None
    label: Optional[str] = None
    feature: Optional[str] = None


@dataclass
class Action:
    label_start: str
    label_end: Optional[str]
    new_type: str
    features: list[tuple[str, ValueExpr]]


@dataclass
class Rule:
    name: str
    priority: int
    pattern: Seq
    actions: list[Action]

    def bound_labels(self) -> set[str]:
        labels: set[str] = set()

        def walk(seq: Seq) -> None:
            for term in seq.terms:
                if term.binding:
                    labels.add(term.binding)
                if isinstance(term.node, Group):
                    for alt in term.node.alternatives:
                        walk(alt)

        walk(self.pattern)
        return labels


@dataclass
class RulePhase:
    name: str
    input_types: list[str]
    control: str = "appelt"
    quantifier_bound: int = DEFAULT_QUANTIFIER_BOUND
    rules: list[Rule] = field(default_factory=list)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|\#[^\n]*)
  | (?P<arrow>-->)
  | (?P<fat_arrow>=>)
  | (?P<dotdot>\.\.)
  | (?P<op>==|!=|=~)
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}()\[\]|?*+:.,=@])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(source: str) -> list[_Tok]:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise RuleSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup or ""
        text = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.toks = _lex(source)
        self.pos = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> _Tok:
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, message: str) -> RuleSyntaxError:
        tok = self.peek()
        return RuleSyntaxError(message + f" (got {tok.text!r})", tok.line, tok.col)

    def expect(self, kind: str, text: Optional[str] = None) -> _Tok:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            raise self.error(f"expected {text or kind}")
        return self.next()

    def accept(self, kind: str, text: Optional[str] = None) -> Optional[_Tok]:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        return None

    # --- phase structure ---

    def parse_phase(self) -> RulePhase:
        self.expect("ident", "phase")
        name = self.expect("ident").text
        self.expect("ident", "input")
        input_types = []
        while self.peek().kind == "ident" and self.peek().text not in (
                "control", "rule", "bound", "phase"):
            input_types.append(self.next().text)
        if not input_types:
            raise self.error("phase must declare at least one input type")
        phase = RulePhase(name=name, input_types=input_types)
        if self.accept("ident", "control"):
            style = self.expect("ident").text
            if style not in CONTROL_STYLES:
                raise self.error(f"unknown control style {style!r}")
            phase.control = style
        if self.accept("ident", "bound"):
            phase.quantifier_bound = int(self.expect("number").text)
        while self.accept("ident", "rule"):
            phase.rules.append(self.parse_rule())
        self.expect("eof")
        for rule in phase.rules:
            bound = rule.bound_labels()
            for action in rule.actions:
                for label in filter(None, (action.label_start, action.label_end)):
                    if label not in bound:
                        raise RuleSemanticError(
                            f"rule {rule.name!r}: action uses unbound label :{label}")
                for _, expr in action.features:
                    if expr.label and expr.label not in bound:
                        raise RuleSemanticError(
                            f"rule {rule.name!r}: value uses unbound label :{expr.label}")
        return phase

    def parse_rule(self) -> Rule:
        name = self.expect("ident").text
        priority = 0
        if self.accept("ident", "priority"):
            priority = int(self.expect("number").text)
        self.expect("punct", ":")
        pattern = self.parse_seq(stop_at_arrow=True)
        if not pattern.terms:
            raise self.error(f"rule {name!r} has an empty pattern")
        self.expect("arrow")
        actions = [self.parse_action()]
        while self.accept("punct", ","):
            actions.append(self.parse_action())
        return Rule(name=name, priority=priority, pattern=pattern, actions=actions)

    # --- patterns ---

    def parse_seq(self, stop_at_arrow: bool = False) -> Seq:
        seq = Seq()
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == "{" and self._is_constraint_brace():
                seq.terms.append(self.parse_term())
            elif tok.kind == "punct" and tok.text == "(":
                seq.terms.append(self.parse_term())
            else:
                break
        return seq

    def _is_constraint_brace(self) -> bool:
        return self.peek(1).kind == "ident"

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.text == "(":
            self.next()
            alternatives = [self.parse_seq()]
            while self.accept("punct", "|"):
                alternatives.append(self.parse_seq())
            self.expect("punct", ")")
            node: Union[ConstraintElem, Group] = Group(alternatives)
        else:
            node = self.parse_constraint_elem()
        term = Term(node=node)
        self._parse_postfix(term)
        return term

    def _parse_postfix(self, term: Term) -> None:
        saw_quant = saw_binding = False
        while True:
            tok = self.peek()
            if not saw_quant and tok.kind == "punct" and tok.text in "?*+":
                self.next()
                term.min, term.max = {"?": (0, 1), "*": (0, -1), "+": (1, -1)}[tok.text]
                saw_quant = True
            elif not saw_quant and tok.kind == "punct" and tok.text == "{" \
                    and self.peek(1).kind == "number":
                self.next()
                lo = int(self.expect("number").text)
                self.expect("punct", ",")
                hi = int(self.expect("number").text)
                self.expect("punct", "}")
                if lo < 0 or hi < lo:
                    raise self.error(f"bad quantifier bounds {{{lo},{hi}}}")
                term.min, term.max = lo, hi
                saw_quant = True
            elif not saw_binding and tok.kind == "punct" and tok.text == ":" \
                    and self.peek(1).kind == "ident" \
                    and not (self.peek(2).kind == "fat_arrow"
                             or self.peek(2).kind == "dotdot"):
                self.next()
                term.binding = self.expect("ident").text
                saw_binding = True
            else:
                return

    def parse_constraint_elem(self) -> ConstraintElem:
        self.expect("punct", "{")
        constraints = [self.parse_constraint()]
        while self.accept("punct", ","):
            constraints.append(self.parse_constraint())
        self.expect("punct", "}")
        return ConstraintElem(constraints)

    def parse_constraint(self) -> Constraint:
        ann_type = self.expect("ident").text
        if not self.accept("punct", "."):
            return Constraint(ann_type)
        feature = self.expect("ident").text
        tok = self.peek()
        if tok.kind == "op":
            op = self.next().text
        elif tok.kind == "ident" and tok.text == "in":
            self.next()
            op = "in"
        else:
            raise self.error("expected ==, !=, =~ or in")
        if op == "in":
            self.expect("punct", "[")
            values = [self.parse_literal()]
            while self.accept("punct", ","):
                values.append(self.parse_literal())
            self.expect("punct", "]")
            return Constraint(ann_type, feature, op, tuple(values))
        return Constraint(ann_type, feature, op, self.parse_literal())

    def parse_literal(self) -> Literal:
        tok = self.next()
        if tok.kind == "string":
            return _unquote(tok.text)
        if tok.kind == "number":
            return float(tok.text) if "." in tok.text else int(tok.text)
        if tok.kind == "ident" and tok.text in ("true", "false"):
            return tok.text == "true"
        raise RuleSyntaxError(f"expected literal, got {tok.text!r}", tok.line, tok.col)

    # --- actions ---

    def parse_action(self) -> Action:
        self.expect("punct", ":")
        label_start = self.expect("ident").text
        label_end = None
        if self.accept("dotdot"):
            label_end = self.expect("ident").text
        self.expect("fat_arrow")
        new_type = self.expect("ident").text
        features: list[tuple[str, ValueExpr]] = []
        self.expect("punct", "{")
        if self.peek().text != "}":
            features.append(self.parse_assignment())
            while self.accept("punct", ","):
                features.append(self.parse_assignment())
        self.expect("punct", "}")
        return Action(label_start, label_end, new_type, features)

    def parse_assignment(self) -> tuple[str, ValueExpr]:
        name = self.expect("ident").text
        self.expect("punct", "=")
        tok = self.peek()
        if tok.kind == "punct" and tok.text == ":":
            self.next()
            label = self.expect("ident").text
            if self.accept("punct", "."):
                accessor = self.expect("ident").text
                if accessor not in ("string", "numeric"):
                    raise self.error("expected .string or .numeric")
                return name, ValueExpr(kind=accessor, label=label)
            self.expect("punct", "@")
            feature = self.expect("ident").text
            return name, ValueExpr(kind="feature", label=label, feature=feature)
        return name, ValueExpr(kind="literal", literal=self.parse_literal())


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), body)


def parse_rules(source: str) -> RulePhase:
    """Parse one phase file into a RulePhase."""
    return _Parser(source).parse_phase()
