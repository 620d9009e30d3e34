"""Argumentation-based verification that requirements models comply with legal norms."""

from .argumentation import (
    JustificationResult, Mark, NotAHypothesis, Relation, Status, TreeNode, UnknownArgument,
    build_tree, justify, justify_all, mark_tree, revalidate,
)
from .dsl import ParseDiagnostic, ParseError, SourceSpan, parse_model, parse_sources, serialize_model
from .model import (
    Actor, Argument, ArgumentKind, Goal, GoalKind, IntegrityError, IntegrityViolation, Modality, Model,
    NormativeProposition, RealizationRelation, Refinement, RefinementMode, SubjectBinding, Task,
    validate_referential_integrity,
)
from .process import (
    ProcessFinding, SolutionSet, Specification, UnknownGoal, check_affected_goals, check_applicability,
    check_operationalization, check_realizations, check_refinements, compute_solution,
    compute_specification, run_checks,
)
from .report import ComplianceReport, NpVerdict, Verdict, decide, to_dot, to_json

__version__ = "0.1.0"
