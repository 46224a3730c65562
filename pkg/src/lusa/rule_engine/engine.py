"""Finite-state matching over annotation streams.

Each phase compiles to one NFA per rule whose alphabet is "one
annotation of an input type".  Matching walks character offsets: at
offset p the machine may consume any input-type annotation starting at
p, advancing to its end offset.  SpaceToken annotations are consumable
implicitly between elements when the phase declares them as input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..doc_model import DEFAULT_SET, Annotation, Document
from .dsl import (
    Action,
    Constraint,
    ConstraintElem,
    Group,
    Rule,
    RulePhase,
    Seq,
    Term,
    ValueExpr,
)


class RuleCompileError(Exception):
    pass


class PhaseError(Exception):
    pass


def _eq(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a is b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return float(a) == float(b)
    return a == b


def constraint_satisfied(ann: Annotation, c: Constraint) -> bool:
    if ann.type != c.ann_type:
        return False
    if c.feature is None:
        return True
    value = ann.features.get(c.feature)
    if c.op == "==":
        return value is not None and _eq(value, c.value)
    if c.op == "!=":
        return value is None or not _eq(value, c.value)
    if c.op == "=~":
        return value is not None and str(c.value) in str(value)
    if c.op == "in":
        return value is not None and any(_eq(value, v) for v in c.value)
    raise RuleCompileError(f"unknown operator {c.op!r}")


def elem_satisfied(ann: Annotation, elem: ConstraintElem) -> bool:
    return all(constraint_satisfied(ann, c) for c in elem.constraints)


@dataclass
class CompiledRule:
    name: str
    priority: int
    index: int
    actions: list[Action]
    # state -> [(elem, labels, next_state)]
    transitions: dict[int, list[tuple[ConstraintElem, frozenset, int]]]
    accepting: frozenset


@dataclass
class CompiledPhase:
    name: str
    input_types: frozenset
    control: str
    rules: list[CompiledRule]


class _NfaBuilder:
    def __init__(self, bound: int):
        self.bound = bound
        self.n_states = 1  # state 0 is the start
        self.eps: list[tuple[int, int]] = []
        self.cons: list[tuple[int, ConstraintElem, frozenset, int]] = []

    def new_state(self) -> int:
        self.n_states += 1
        return self.n_states - 1

    def emit_seq(self, seq: Seq, src: int, labels: frozenset) -> int:
        cur = src
        for term in seq.terms:
            cur = self.emit_term(term, cur, labels)
        return cur

    def emit_term(self, term: Term, src: int, labels: frozenset) -> int:
        inner_labels = labels | ({term.binding} if term.binding else set())
        max_n = term.max if term.max >= 0 else self.bound
        if max_n > self.bound:
            raise RuleCompileError(
                f"quantifier upper bound {max_n} exceeds phase bound {self.bound}")
        if term.min > max_n:
            raise RuleCompileError(f"quantifier minimum {term.min} exceeds maximum {max_n}")
        cur = src
        for _ in range(term.min):
            cur = self.emit_node(term.node, cur, inner_labels)
        exits = [cur]
        for _ in range(max_n - term.min):
            cur = self.emit_node(term.node, cur, inner_labels)
            exits.append(cur)
        out = self.new_state()
        for state in exits:
            self.eps.append((state, out))
        return out

    def emit_node(self, node, src: int, labels: frozenset) -> int:
        if isinstance(node, ConstraintElem):
            dst = self.new_state()
            self.cons.append((src, node, labels, dst))
            return dst
        assert isinstance(node, Group)
        out = self.new_state()
        for alt in node.alternatives:
            end = self.emit_seq(alt, src, labels)
            self.eps.append((end, out))
        return out


def compile_rule(rule: Rule, bound: int, index: int) -> CompiledRule:
    builder = _NfaBuilder(bound)
    accept = builder.emit_seq(rule.pattern, 0, frozenset())

    closure: dict[int, set[int]] = {s: {s} for s in range(builder.n_states)}
    changed = True
    while changed:
        changed = False
        for src, dst in builder.eps:
            for s, cl in closure.items():
                if src in cl and dst not in cl:
                    cl.add(dst)
                    changed = True

    transitions: dict[int, list[tuple[ConstraintElem, frozenset, int]]] = {}
    for s in range(builder.n_states):
        outs = []
        for src, elem, labels, dst in builder.cons:
            if src in closure[s]:
                outs.append((elem, labels, dst))
        if outs:
            transitions[s] = outs
    accepting = frozenset(s for s in range(builder.n_states) if accept in closure[s])
    return CompiledRule(rule.name, rule.priority, index, rule.actions,
                        transitions, accepting)


def compile_phase(phase: RulePhase) -> CompiledPhase:
    """Compile a parsed phase into per-rule finite-state machines."""
    rules = [compile_rule(rule, phase.quantifier_bound, i)
             for i, rule in enumerate(phase.rules)]
    return CompiledPhase(phase.name, frozenset(phase.input_types),
                         phase.control, rules)


@dataclass
class Match:
    rule: CompiledRule
    start: int
    end: int
    bindings: dict[str, list[Annotation]]

    def signature(self) -> tuple:
        return (self.rule.index, self.start, self.end,
                tuple(sorted((label, tuple(a.id for a in anns))
                             for label, anns in self.bindings.items())))


def _find_matches(rule: CompiledRule,
                  by_start: dict[int, list[Annotation]], start: int,
                  implicit_space: bool) -> list[Match]:
    results: dict[tuple, Match] = {}

    def walk(state: int, offset: int,
             bound: tuple[tuple[str, Annotation], ...],
             consumed: bool, last_end: int) -> None:
        if consumed and state in rule.accepting:
            bindings: dict[str, list[Annotation]] = {}
            for label, ann in bound:
                bindings.setdefault(label, []).append(ann)
            match = Match(rule, start, last_end, bindings)
            results.setdefault(match.signature(), match)
        for ann in by_start.get(offset, []):
            for elem, labels, dst in rule.transitions.get(state, []):
                if elem_satisfied(ann, elem):
                    walk(dst, ann.end,
                         bound + tuple((lb, ann) for lb in sorted(labels)),
                         True, ann.end)
            if implicit_space and consumed and ann.type == "SpaceToken":
                walk(state, ann.end, bound, consumed, last_end)

    walk(0, start, (), False, start)
    return sorted(results.values(), key=lambda m: (-m.end, m.signature()))


_NUMBER_RE = re.compile(r"\d+(?:\.\d+)?")


def _hull(anns: Sequence[Annotation]) -> tuple[int, int]:
    return min(a.start for a in anns), max(a.end for a in anns)


def _eval_value(expr: ValueExpr, match: Match, doc: Document):
    if expr.kind == "literal":
        return expr.literal
    anns = match.bindings.get(expr.label or "", [])
    if not anns:
        return None
    if expr.kind == "string":
        s, e = _hull(anns)
        return doc.text[s:e]
    if expr.kind == "numeric":
        for ann in anns:
            if ann.type == "Token" and ann.features.get("kind") == "number":
                return float(str(ann.features.get("string")))
        s, e = _hull(anns)
        m = _NUMBER_RE.search(doc.text[s:e])
        return float(m.group()) if m else None
    if expr.kind == "feature":
        return anns[0].features.get(expr.feature or "")
    raise RuleCompileError(f"unknown value expression kind {expr.kind!r}")


def _fire(match: Match, doc: Document) -> list[tuple[str, int, int, tuple]]:
    created = []
    for action in match.rule.actions:
        start_anns = match.bindings.get(action.label_start, [])
        if not start_anns:
            continue
        span_start = min(a.start for a in start_anns)
        if action.label_end:
            end_anns = match.bindings.get(action.label_end, [])
            if not end_anns:
                continue
            span_end = max(a.end for a in end_anns)
        else:
            span_end = max(a.end for a in start_anns)
        features = []
        for name, expr in action.features:
            value = _eval_value(expr, match, doc)
            if value is not None:
                features.append((name, value))
        created.append((action.new_type, span_start, span_end, tuple(features)))
    return created


def apply_phase(doc: Document, set_name: str, compiled: CompiledPhase) -> Document:
    """Run one compiled phase over a document, adding its new annotations."""
    anns = [a for a in doc.get_set(set_name) if a.type in compiled.input_types]
    by_start: dict[int, list[Annotation]] = {}
    for a in anns:
        by_start.setdefault(a.start, []).append(a)
    offsets = sorted(by_start)
    implicit_space = "SpaceToken" in compiled.input_types

    created: list[tuple[str, int, int, tuple]] = []

    def matches_at(offset: int) -> list[Match]:
        out = []
        for rule in compiled.rules:
            out.extend(_find_matches(rule, by_start, offset, implicit_space))
        return out

    if compiled.control == "appelt":
        i = 0
        while i < len(offsets):
            candidates = matches_at(offsets[i])
            if not candidates:
                i += 1
                continue
            best = max(candidates,
                       key=lambda m: (m.end, m.rule.priority, -m.rule.index,
                                      [-x for x in _binding_id_order(m)]))
            created.extend(_fire(best, doc))
            while i < len(offsets) and offsets[i] < best.end:
                i += 1
    elif compiled.control == "brill":
        for offset in offsets:
            fired_rules = set()
            for match in matches_at(offset):
                if match.rule.index in fired_rules:
                    continue
                fired_rules.add(match.rule.index)
                created.extend(_fire(match, doc))
    elif compiled.control == "all":
        for offset in offsets:
            for match in matches_at(offset):
                created.extend(_fire(match, doc))
    else:
        raise PhaseError(f"unknown control style {compiled.control!r}")

    seen = set()
    for ann_type, start, end, features in sorted(
            created, key=lambda c: (c[1], -c[2], c[0], c[3])):
        key = (ann_type, start, end, features)
        if key in seen:
            continue
        seen.add(key)
        doc.add_annotation(set_name, ann_type, start, end, dict(features))
    return doc


def _binding_id_order(match: Match) -> list[int]:
    return sorted(a.id for anns in match.bindings.values() for a in anns)


def run_phase(doc: Document, phase: RulePhase, set_name: str = DEFAULT_SET) -> Document:
    compiled = compile_phase(phase)
    return apply_phase(doc, set_name, compiled)


def run_cascade(doc: Document, phases: Sequence[RulePhase],
                set_name: str = DEFAULT_SET) -> Document:
    """Apply phases in order; later phases see earlier phases' output."""
    for phase in phases:
        try:
            run_phase(doc, phase, set_name)
        except Exception as exc:
            raise PhaseError(f"phase {phase.name!r}: {exc}") from exc
    return doc
