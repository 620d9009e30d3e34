"""Dialectical trees over the argument log and their bottom-up marking.

A tree is rooted at an argument; the children of a node are the arguments
that name it as a target. For a hypothesis root, arguments targeting a model
element on its realization chain (the realizing goal, the NP, and every goal
or task the goal's solution traverses) are attached to the root as well.
An argument already on the path from the root is never added again, which
keeps trees finite when the attack relation has cycles.

Marking: a node is undefeated iff every attacking child is defeated (so
leaves are undefeated). Supporting children are kept in the tree and marked
themselves, but never influence their parent's mark.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .model import Argument, ArgumentKind, IntegrityError, Model, validate_referential_integrity
from .process import compute_solution


class UnknownArgument(KeyError):
    pass


class NotAHypothesis(ValueError):
    pass


class Relation(str, enum.Enum):
    ROOT = "root"
    ATTACK = "attack"
    SUPPORT = "support"


class Mark(str, enum.Enum):
    UNDEFEATED = "undefeated"
    DEFEATED = "defeated"


class Status(str, enum.Enum):
    JUSTIFIED = "justified"
    DEFEATED = "defeated"


@dataclass(frozen=True)
class TreeNode:
    argument: str
    kind: ArgumentKind
    relation: Relation
    children: tuple[TreeNode, ...] = ()
    mark: Mark | None = None

    def walk(self, depth=0):
        yield self, depth
        for c in self.children:
            yield from c.walk(depth + 1)

    @property
    def size(self) -> int:
        return sum(1 for _ in self.walk())

    @property
    def depth(self) -> int:
        return max(d for _, d in self.walk())


@dataclass(frozen=True)
class JustificationResult:
    hypothesis: str
    status: Status
    tree: TreeNode

    @property
    def defeaters(self) -> list[TreeNode]:
        """Undefeated attackers directly under the root."""
        return [c for c in self.tree.children
                if c.relation is Relation.ATTACK and c.mark is Mark.UNDEFEATED]

    @property
    def outcome(self) -> str:
        if self.status is Status.JUSTIFIED:
            return "accepted"
        if any(d.kind is ArgumentKind.REJECTION_ATTACK for d in self.defeaters):
            return "solution_rejected"
        return "revision_required"


def _lifted_targets(model: Model, root: Argument) -> list[str]:
    if root.kind is not ArgumentKind.HYPOTHESIS:
        return []
    rel = model.realization_of(root.id)
    if rel is None:
        return []
    ids = {rel.np}
    if rel.goal in model.goal_index:
        ids |= compute_solution(model, rel.goal).reached
    return sorted(ids)


def build_tree(model: Model, root: str) -> TreeNode:
    try:
        root_arg = model.argument_index[root]
    except KeyError:
        raise UnknownArgument(root) from None
    targeted = model.targeted_by
    root_extra = _lifted_targets(model, root_arg)

    def children_of(arg_id: str, is_root: bool) -> list[Argument]:
        found = {a.id: a for a in targeted.get(arg_id, ())}
        if is_root:
            for element in root_extra:
                found.update((a.id, a) for a in targeted.get(element, ()))
        return [found[k] for k in sorted(found)]

    def build(arg: Argument, relation: Relation, path: frozenset[str]) -> TreeNode:
        path = path | {arg.id}
        kids = tuple(
            build(c, Relation.ATTACK if c.kind.is_attack else Relation.SUPPORT, path)
            for c in children_of(arg.id, relation is Relation.ROOT)
            if c.id not in path
        )
        return TreeNode(arg.id, arg.kind, relation, kids)

    return build(root_arg, Relation.ROOT, frozenset())


def mark_tree(tree: TreeNode) -> TreeNode:
    children = tuple(mark_tree(c) for c in tree.children)
    beaten = any(c.relation is Relation.ATTACK and c.mark is Mark.UNDEFEATED for c in children)
    return replace(tree, children=children, mark=Mark.DEFEATED if beaten else Mark.UNDEFEATED)


def justify(model: Model, hypothesis: str) -> JustificationResult:
    arg = model.argument_index.get(hypothesis)
    if arg is None:
        raise UnknownArgument(hypothesis)
    if arg.kind is not ArgumentKind.HYPOTHESIS:
        raise NotAHypothesis(hypothesis)
    tree = mark_tree(build_tree(model, hypothesis))
    status = Status.JUSTIFIED if tree.mark is Mark.UNDEFEATED else Status.DEFEATED
    return JustificationResult(hypothesis, status, tree)


def justify_all(model: Model) -> dict[str, JustificationResult]:
    return {h: justify(model, h) for h in model.hypotheses}


def _reaches(model: Model, hypothesis: str, ids: set[str]) -> bool:
    """Whether any of ``ids`` can appear in the tree rooted at ``hypothesis``."""
    root = model.argument_index[hypothesis]
    frontier = [hypothesis, *_lifted_targets(model, root)]
    seen = set(frontier)
    while frontier:
        node = frontier.pop()
        for a in model.targeted_by.get(node, ()):
            if a.id in ids:
                return True
            if a.id not in seen:
                seen.add(a.id)
                frontier.append(a.id)
    return False


def revalidate(model: Model, new_arguments: list[Argument]) -> tuple[Model, dict[str, tuple[Status, Status]]]:
    """Append arguments to the log and report hypotheses whose status changed.

    Only hypotheses whose tree can contain one of the new arguments are
    re-justified; the rest keep their status by construction.
    """
    extended = model.append_arguments(new_arguments)
    violations = validate_referential_integrity(extended)
    if violations:
        raise IntegrityError(violations)
    new_ids = {a.id for a in new_arguments}
    delta = {}
    if not new_ids:
        return extended, delta
    for h in extended.hypotheses:
        if not _reaches(extended, h, new_ids):
            continue
        before = justify(model, h).status
        after = justify(extended, h).status
        if before is not after:
            delta[h] = (before, after)
    return extended, delta
