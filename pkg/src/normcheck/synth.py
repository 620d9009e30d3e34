"""Random model generators for fuzzing and experiments.

All generators take a :class:`random.Random` so runs are reproducible.
"""

from __future__ import annotations

import random

from .model import (
    Actor, Argument, ArgumentKind, Goal, GoalKind, Modality, Model, NormativeProposition,
    RealizationRelation, Refinement, RefinementMode, SubjectBinding, Task,
)

_KINDS = [ArgumentKind.SUPPORT, ArgumentKind.REVISION_ATTACK, ArgumentKind.REJECTION_ATTACK, ArgumentKind.EVIDENCE]
_KIND_WEIGHTS = [2, 3, 4, 1]


def _targets(rng: random.Random, pool: list[str], elements: list[str], p_element: float) -> list[str]:
    k = rng.choices([1, 2, 3], weights=[70, 25, 5])[0]
    out = set()
    for _ in range(k):
        if elements and rng.random() < p_element:
            out.add(rng.choice(elements))
        else:
            out.add(rng.choice(pool))
    return sorted(out)


def argument_log(
    rng: random.Random,
    max_arguments: int = 12,
    max_hypotheses: int = 3,
    p_element: float = 0.1,
) -> Model:
    """A small model whose argument log has random attack and support edges.

    Every hypothesis sits on its own operationalized compliance goal, so the
    model passes integrity checking. Arguments may target any argument
    (including later ones and themselves, so cycles occur) and, with
    probability ``p_element``, a model element on a realization chain.
    """
    k = rng.randint(1, max_hypotheses)
    nps = [NormativeProposition(f"N{i}", "Subject", Modality.DUTY) for i in range(k)]
    tasks = [Task(f"T{i}") for i in range(k)]
    goals = [
        Goal(f"G{i}", "A", kind=GoalKind.COMPLIANCE, refinement=Refinement(RefinementMode.AND, (f"T{i}",)))
        for i in range(k)
    ]
    rels = [RealizationRelation(f"G{i}", f"N{i}") for i in range(k)]
    n_other = rng.randint(0, max_arguments - k - 1)
    ids = [f"A{i:02d}" for i in range(n_other)]
    hyps = [r.hypothesis for r in rels]
    pool = hyps + ids
    elements = [e.id for e in nps + goals + tasks]
    args = []
    for aid in ids:
        kind = rng.choices(_KINDS, weights=_KIND_WEIGHTS)[0]
        args.append(Argument(aid, f"claim {aid}", kind, _targets(rng, pool, elements, p_element)))
    args.append(Argument("E", "binding evidence", ArgumentKind.EVIDENCE))
    rng.shuffle(args)
    return Model.with_hypotheses(
        nps=nps, actors=[Actor("A")], tasks=tasks, goals=goals, realizations=rels,
        bindings=[SubjectBinding("A", "Subject", "E")], arguments=args,
    )


def new_arguments(rng: random.Random, model: Model, count: int, prefix: str = "X") -> list[Argument]:
    """Fresh arguments targeting existing arguments or each other."""
    existing = [a.id for a in model.arguments]
    ids = [f"{prefix}{i:02d}" for i in range(count)]
    out = []
    for aid in ids:
        kind = rng.choices(_KINDS[:3], weights=_KIND_WEIGHTS[:3])[0]
        out.append(Argument(aid, f"claim {aid}", kind, _targets(rng, existing + ids, [], 0.0)))
    return out


def goal_graph(rng: random.Random, max_nodes: int = 30, p_task: float = 0.4) -> Model:
    """A random acyclic refinement graph of goals and tasks.

    Nodes are numbered and goals only refine onto higher-numbered nodes.
    Most refinements are complete; a few goals stay unrefined and a few OR
    refinements have no selection, so both outcomes of the traversal occur.
    """
    n = rng.randint(2, max_nodes)
    is_task = [i > 0 and rng.random() < p_task for i in range(n)]
    names = [f"T{i:02d}" if t else f"G{i:02d}" for i, t in enumerate(is_task)]
    goals, tasks = [], []
    for i, name in enumerate(names):
        if is_task[i]:
            tasks.append(Task(name))
            continue
        later = names[i + 1:]
        refinement = None
        if later and rng.random() < 0.9:
            children = tuple(rng.sample(later, rng.randint(1, min(4, len(later)))))
            if rng.random() < 0.5:
                refinement = Refinement(RefinementMode.AND, children)
            else:
                selected = rng.choice(children) if rng.random() < 0.9 else None
                refinement = Refinement(RefinementMode.OR, children, selected)
        kind = GoalKind.COMPLIANCE if i == 0 else rng.choice(list(GoalKind))
        goals.append(Goal(name, "A", kind=kind, refinement=refinement))
    return Model(actors=[Actor("A")], goals=goals, tasks=tasks)
