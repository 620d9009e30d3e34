"""Domain entities for law models, requirements models and the argument log.

Every collection on :class:`Model` is a tuple. Entity collections are kept
sorted by identifier so that two models built from the same statements in a
different order compare equal; the argument log keeps insertion order but is
compared as a set keyed by argument id.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, NamedTuple

ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Modality(str, enum.Enum):
    DUTY = "duty"
    RIGHT = "right"


class GoalKind(str, enum.Enum):
    STRATEGIC = "strategic"
    COMPLIANCE = "compliance"


class RefinementMode(str, enum.Enum):
    AND = "and"
    OR = "or"


class ArgumentKind(str, enum.Enum):
    HYPOTHESIS = "hypothesis"
    SUPPORT = "support"
    REVISION_ATTACK = "revision_attack"
    REJECTION_ATTACK = "rejection_attack"
    EVIDENCE = "evidence"

    @property
    def is_attack(self) -> bool:
        return self in (ArgumentKind.REVISION_ATTACK, ArgumentKind.REJECTION_ATTACK)


@dataclass(frozen=True)
class NormativeProposition:
    id: str
    subject_role: str
    modality: Modality = Modality.DUTY
    description: str = ""


@dataclass(frozen=True)
class Actor:
    id: str
    name: str = ""


@dataclass(frozen=True)
class SubjectBinding:
    """An actor agreed (or, if ``negated``, agreed not) to hold a legal role."""

    actor: str
    role: str
    justification: str
    negated: bool = False

    @property
    def key(self) -> tuple[str, str]:
        return (self.actor, self.role)


@dataclass(frozen=True)
class Refinement:
    mode: RefinementMode
    children: tuple[str, ...]
    selected: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Goal:
    id: str
    owner: str
    description: str = ""
    kind: GoalKind = GoalKind.STRATEGIC
    refinement: Refinement | None = None


@dataclass(frozen=True)
class Task:
    id: str
    description: str = ""


def hypothesis_id(goal: str, np: str) -> str:
    return f"H_{goal}_{np}"


@dataclass(frozen=True)
class RealizationRelation:
    goal: str
    np: str

    @property
    def hypothesis(self) -> str:
        return hypothesis_id(self.goal, self.np)


@dataclass(frozen=True)
class Argument:
    id: str
    claim: str
    kind: ArgumentKind
    targets: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(sorted(set(self.targets))))


def hypothesis_argument(rel: RealizationRelation) -> Argument:
    return Argument(rel.hypothesis, f"{rel.goal} realizes {rel.np}", ArgumentKind.HYPOTHESIS)


class IntegrityViolation(NamedTuple):
    code: str
    element: str
    detail: str = ""


class IntegrityError(ValueError):
    def __init__(self, violations: list[IntegrityViolation]):
        self.violations = violations
        super().__init__("; ".join(f"{v.code}({v.element})" for v in violations))


@dataclass(frozen=True, eq=False)
class Model:
    nps: tuple[NormativeProposition, ...] = ()
    actors: tuple[Actor, ...] = ()
    bindings: tuple[SubjectBinding, ...] = ()
    goals: tuple[Goal, ...] = ()
    tasks: tuple[Task, ...] = ()
    realizations: tuple[RealizationRelation, ...] = ()
    affects: tuple[tuple[str, str], ...] = ()
    arguments: tuple[Argument, ...] = field(default=())

    def __post_init__(self):
        by_id = lambda e: e.id  # noqa: E731
        object.__setattr__(self, "nps", tuple(sorted(self.nps, key=by_id)))
        object.__setattr__(self, "actors", tuple(sorted(self.actors, key=by_id)))
        object.__setattr__(self, "goals", tuple(sorted(self.goals, key=by_id)))
        object.__setattr__(self, "tasks", tuple(sorted(self.tasks, key=by_id)))
        object.__setattr__(self, "bindings", tuple(sorted(self.bindings, key=lambda b: (b.actor, b.role))))
        object.__setattr__(self, "realizations", tuple(sorted(self.realizations, key=lambda r: (r.goal, r.np))))
        object.__setattr__(self, "affects", tuple(sorted(set(map(tuple, self.affects)))))
        object.__setattr__(self, "arguments", tuple(self.arguments))

    @classmethod
    def with_hypotheses(cls, **kwargs) -> Model:
        """Build a model, generating the hypothesis argument of every realization.

        Hypotheses are placed at the front of the argument log.
        """
        realizations = tuple(kwargs.get("realizations", ()))
        arguments = [hypothesis_argument(r) for r in realizations]
        arguments.extend(kwargs.pop("arguments", ()))
        return cls(**kwargs, arguments=tuple(arguments))

    def _key(self):
        return (
            self.nps, self.actors, self.bindings, self.goals, self.tasks,
            self.realizations, self.affects,
            tuple(sorted(self.arguments, key=lambda a: a.id)),
        )

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    # Lookup tables. Duplicate ids keep the first occurrence; integrity
    # checking reports the duplicates.
    @cached_property
    def np_index(self) -> dict[str, NormativeProposition]:
        return _index(self.nps)

    @cached_property
    def actor_index(self) -> dict[str, Actor]:
        return _index(self.actors)

    @cached_property
    def goal_index(self) -> dict[str, Goal]:
        return _index(self.goals)

    @cached_property
    def task_index(self) -> dict[str, Task]:
        return _index(self.tasks)

    @cached_property
    def argument_index(self) -> dict[str, Argument]:
        return _index(self.arguments)

    @cached_property
    def element_ids(self) -> frozenset[str]:
        """Ids of every addressable element (arguments excluded)."""
        return frozenset().union(self.np_index, self.actor_index, self.goal_index, self.task_index)

    @cached_property
    def targeted_by(self) -> dict[str, tuple[Argument, ...]]:
        """Map from an id to the arguments naming it as a target, sorted by id."""
        out: dict[str, list[Argument]] = {}
        for arg in self.argument_index.values():
            for t in arg.targets:
                out.setdefault(t, []).append(arg)
        return {k: tuple(sorted(v, key=lambda a: a.id)) for k, v in out.items()}

    @property
    def hypotheses(self) -> list[str]:
        return sorted(a.id for a in self.arguments if a.kind is ArgumentKind.HYPOTHESIS)

    def realization_of(self, hypothesis: str) -> RealizationRelation | None:
        for r in self.realizations:
            if r.hypothesis == hypothesis:
                return r
        return None

    def append_arguments(self, new: Iterable[Argument]) -> Model:
        return Model(
            nps=self.nps, actors=self.actors, bindings=self.bindings, goals=self.goals,
            tasks=self.tasks, realizations=self.realizations, affects=self.affects,
            arguments=self.arguments + tuple(new),
        )

    def without(self, kinds: Iterable[ArgumentKind]) -> Model:
        """Copy of the model with every argument of the given kinds dropped."""
        drop = set(kinds)
        return Model(
            nps=self.nps, actors=self.actors, bindings=self.bindings, goals=self.goals,
            tasks=self.tasks, realizations=self.realizations, affects=self.affects,
            arguments=tuple(a for a in self.arguments if a.kind not in drop),
        )


def _index(items) -> dict:
    out = {}
    for item in items:
        out.setdefault(item.id, item)
    return out


def refinement_cycles(model: Model) -> list[str]:
    """Goal ids that lie on a directed cycle of the refinement graph."""
    graph = {
        g.id: [c for c in g.refinement.children if c in model.goal_index] if g.refinement else []
        for g in model.goals
    }
    try:
        tuple(TopologicalSorter(graph).static_order())
        return []
    except CycleError:
        pass
    on_cycle = []
    for start in sorted(graph):
        stack, seen = list(graph[start]), set()
        while stack:
            n = stack.pop()
            if n == start:
                on_cycle.append(start)
                break
            if n not in seen:
                seen.add(n)
                stack.extend(graph.get(n, ()))
    return on_cycle


def validate_referential_integrity(model: Model) -> list[IntegrityViolation]:
    """Return every broken reference or violated structural invariant.

    Realizations from strategic goals are not reported here; that is a
    process finding (W3), not a structural defect.
    """
    out: list[IntegrityViolation] = []
    seen: dict[str, str] = {}
    for kind, items in (("np", model.nps), ("actor", model.actors), ("goal", model.goals),
                        ("task", model.tasks), ("argument", model.arguments)):
        for item in items:
            if not ID_RE.match(item.id):
                out.append(IntegrityViolation("BadId", item.id, f"{kind} id is not an identifier"))
            if item.id in seen:
                out.append(IntegrityViolation("DuplicateId", item.id, f"{kind} reuses id of a {seen[item.id]}"))
            else:
                seen[item.id] = kind

    for np in model.nps:
        if not np.subject_role:
            out.append(IntegrityViolation("EmptySubjectRole", np.id))

    binding_keys = set()
    for b in model.bindings:
        if b.actor not in model.actor_index:
            out.append(IntegrityViolation("DanglingRef", b.actor, f"binding to role {b.role!r}"))
        if b.justification not in model.argument_index:
            out.append(IntegrityViolation("DanglingRef", b.justification, f"justification of binding {b.actor}"))
        if b.key in binding_keys:
            out.append(IntegrityViolation("DuplicateBinding", b.actor, b.role))
        binding_keys.add(b.key)

    for g in model.goals:
        if g.owner not in model.actor_index:
            out.append(IntegrityViolation("DanglingRef", g.owner, f"owner of goal {g.id}"))
        ref = g.refinement
        if ref is None:
            continue
        if not ref.children:
            out.append(IntegrityViolation("EmptyRefinement", g.id))
        if len(set(ref.children)) != len(ref.children):
            out.append(IntegrityViolation("DuplicateChild", g.id))
        for c in ref.children:
            if c not in model.goal_index and c not in model.task_index:
                out.append(IntegrityViolation("DanglingRef", c, f"child of goal {g.id}"))
        if ref.selected is not None:
            if ref.mode is RefinementMode.AND:
                out.append(IntegrityViolation("AndWithSelection", g.id))
            elif ref.selected not in ref.children:
                out.append(IntegrityViolation("BadSelection", g.id, ref.selected))
    for gid in refinement_cycles(model):
        out.append(IntegrityViolation("RefinementCycle", gid))

    hyp_expected = {}
    for r in model.realizations:
        if r.goal not in model.goal_index:
            out.append(IntegrityViolation("DanglingRef", r.goal, f"realization of {r.np}"))
        if r.np not in model.np_index:
            out.append(IntegrityViolation("DanglingRef", r.np, f"realized by {r.goal}"))
        if r.hypothesis in hyp_expected:
            out.append(IntegrityViolation("DuplicateRealization", r.hypothesis))
        hyp_expected[r.hypothesis] = r
    hyp_present = [a.id for a in model.arguments if a.kind is ArgumentKind.HYPOTHESIS]
    for h in sorted(set(hyp_expected) - set(hyp_present)):
        out.append(IntegrityViolation("MissingHypothesis", h))
    for h in hyp_present:
        if h not in hyp_expected:
            out.append(IntegrityViolation("OrphanHypothesis", h))

    for (np_id, goal_id) in model.affects:
        if np_id not in model.np_index:
            out.append(IntegrityViolation("DanglingRef", np_id, f"affects {goal_id}"))
        if goal_id not in model.goal_index:
            out.append(IntegrityViolation("DanglingRef", goal_id, f"affected by {np_id}"))

    for a in model.arguments:
        if a.kind is ArgumentKind.HYPOTHESIS:
            if a.targets:
                out.append(IntegrityViolation("HypothesisWithTarget", a.id))
            continue
        if a.kind is not ArgumentKind.EVIDENCE and not a.targets:
            out.append(IntegrityViolation("MissingTarget", a.id))
        for t in a.targets:
            if t not in model.argument_index and t not in model.element_ids:
                out.append(IntegrityViolation("DanglingRef", t, f"target of {a.id}"))

    return out
