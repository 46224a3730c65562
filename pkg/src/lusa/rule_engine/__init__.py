"""Annotation-pattern rule language: parser, compiler, and matcher."""

from .dsl import (
    Action,
    Constraint,
    ConstraintElem,
    Group,
    Rule,
    RulePhase,
    RuleSemanticError,
    RuleSyntaxError,
    Seq,
    Term,
    ValueExpr,
    parse_rules,
)
from .engine import (
    CompiledPhase,
    CompiledRule,
    PhaseError,
    RuleCompileError,
    apply_phase,
    compile_phase,
    constraint_satisfied,
    elem_satisfied,
    run_cascade,
    run_phase,
)

__all__ = [
    "Action", "Constraint", "ConstraintElem", "Group", "Rule", "RulePhase",
    "RuleSemanticError", "RuleSyntaxError", "Seq", "Term", "ValueExpr",
    "parse_rules", "CompiledPhase", "CompiledRule", "PhaseError",
    "RuleCompileError", "apply_phase", "compile_phase",
    "constraint_satisfied", "elem_satisfied", "run_cascade", "run_phase",
]
