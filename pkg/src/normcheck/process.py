"""Mechanical well-formedness checks over a model, one finding code per step.

    W1  NP whose subject role nobody was bound to (blocking)
    W2  applicable NP with neither an ``affects`` declaration nor a
        realizing goal (warning)
    W3  applicable NP without a realizing goal, or a realization from a
        strategic goal (blocking)
    W4  OR refinement without ``select`` in the subtree of a compliance goal
        that realizes an NP, or a refinement cycle (blocking)
    W5  a compliance goal whose solution bottoms out in an unrefined goal
        (blocking)
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import GoalKind, Model, RefinementMode, refinement_cycles


class UnknownGoal(KeyError):
    pass


@dataclass(frozen=True, order=True)
class ProcessFinding:
    code: str
    subject: str
    message: str = field(compare=False)
    blocking: bool = field(compare=False, default=True)


@dataclass(frozen=True)
class SolutionSet:
    """Leaf tasks operationalizing ``goal``.

    ``tasks`` is empty unless the goal is fully operationalized; the reasons
    it is not are listed in ``unrefined`` (leaf goals without a refinement)
    and ``unselected`` (OR goals without a selection).
    """

    goal: str
    tasks: tuple[str, ...] = ()
    unrefined: tuple[str, ...] = ()
    unselected: tuple[str, ...] = ()
    reached: frozenset[str] = field(default=frozenset(), compare=False, repr=False)

    @property
    def operationalized(self) -> bool:
        return not self.unrefined and not self.unselected


@dataclass(frozen=True)
class Specification:
    per_goal: dict[str, SolutionSet]


def _traverse(model: Model, goal: str) -> SolutionSet:
    tasks, unrefined, unselected = set(), set(), set()
    reached = set()
    stack = [goal]
    while stack:
        node = stack.pop()
        if node in reached:
            continue
        reached.add(node)
        if node in model.task_index:
            tasks.add(node)
            continue
        ref = model.goal_index[node].refinement
        if ref is None:
            unrefined.add(node)
        elif ref.mode is RefinementMode.AND:
            stack.extend(ref.children)
        elif ref.selected is not None:
            stack.append(ref.selected)
        else:
            unselected.add(node)
    ok = not unrefined and not unselected
    return SolutionSet(
        goal,
        tuple(sorted(tasks)) if ok else (),
        tuple(sorted(unrefined)),
        tuple(sorted(unselected)),
        frozenset(reached),
    )


def compute_solution(model: Model, goal: str) -> SolutionSet:
    """Conjunction of leaf tasks reached from ``goal``.

    AND refinements contribute every child, OR refinements only the selected
    one. Any unrefined goal on the way leaves the result empty.
    """
    if goal not in model.goal_index:
        raise UnknownGoal(goal)
    return _traverse(model, goal)


def compute_specification(model: Model) -> Specification:
    goals = sorted({r.goal for r in model.realizations if r.goal in model.goal_index})
    return Specification({g: compute_solution(model, g) for g in goals})


def applicability(model: Model) -> dict[str, list[str]]:
    """Map each NP id to the actors positively bound to its subject role."""
    by_role: dict[str, list[str]] = {}
    for b in model.bindings:
        if not b.negated:
            by_role.setdefault(b.role, []).append(b.actor)
    return {np.id: sorted(by_role.get(np.subject_role, ())) for np in model.nps}


def check_applicability(model: Model) -> list[ProcessFinding]:
    decided_roles = {b.role for b in model.bindings}
    return sorted(
        ProcessFinding("W1", np.id, f"no actor has been bound (or explicitly not bound) to subject role "
                                    f"{np.subject_role!r} of {np.id}")
        for np in model.nps if np.subject_role not in decided_roles
    )


def _applicable(model: Model) -> list[str]:
    return [np for np, actors in applicability(model).items() if actors]


def check_affected_goals(model: Model) -> list[ProcessFinding]:
    declared = {np for np, _ in model.affects} | {r.np for r in model.realizations}
    return sorted(
        ProcessFinding("W2", np, f"{np} applies but no goal is declared affected by it or realizing it",
                       blocking=False)
        for np in _applicable(model) if np not in declared
    )


def check_realizations(model: Model) -> list[ProcessFinding]:
    realized = {r.np for r in model.realizations}
    out = {
        ProcessFinding("W3", np, f"{np} applies but no compliance goal realizes it")
        for np in _applicable(model) if np not in realized
    }
    for r in model.realizations:
        goal = model.goal_index.get(r.goal)
        if goal is not None and goal.kind is not GoalKind.COMPLIANCE:
            out.add(ProcessFinding("W3", r.goal, f"{r.goal} realizes {r.np} but is not a compliance goal"))
    return sorted(out)


def check_refinements(model: Model) -> list[ProcessFinding]:
    under_compliance = set()
    realizing = {r.goal for r in model.realizations}
    stack = [g.id for g in model.goals if g.kind is GoalKind.COMPLIANCE and g.id in realizing]
    while stack:
        gid = stack.pop()
        if gid in under_compliance or gid not in model.goal_index:
            continue
        under_compliance.add(gid)
        ref = model.goal_index[gid].refinement
        if ref is not None:
            stack.extend(ref.children)
    out = {
        ProcessFinding("W4", gid, f"OR refinement of {gid} must select one alternative")
        for gid in under_compliance
        if (ref := model.goal_index[gid].refinement) is not None
        and ref.mode is RefinementMode.OR and ref.selected is None
    }
    out |= {ProcessFinding("W4", gid, f"refinement of {gid} is cyclic") for gid in refinement_cycles(model)}
    return sorted(out)


def check_operationalization(model: Model, spec: Specification | None = None) -> list[ProcessFinding]:
    spec = spec or compute_specification(model)
    out = set()
    for gid, sol in spec.per_goal.items():
        for leaf in sol.unrefined:
            where = "has no refinement" if leaf == gid else f"has no refinement, so {gid} is not operationalized"
            out.add(ProcessFinding("W5", leaf, f"{leaf} {where}"))
    return sorted(out)


def run_checks(model: Model, spec: Specification | None = None) -> list[ProcessFinding]:
    spec = spec or compute_specification(model)
    findings = (
        check_applicability(model) + check_affected_goals(model) + check_realizations(model)
        + check_refinements(model) + check_operationalization(model, spec)
    )
    return sorted(findings)


def realization_chain(model: Model, np: str) -> set[str]:
    """Element ids whose defects undermine the realization of ``np``."""
    chain = {np}
    for r in model.realizations:
        if r.np == np and r.goal in model.goal_index:
            chain |= _traverse(model, r.goal).reached
    return chain
