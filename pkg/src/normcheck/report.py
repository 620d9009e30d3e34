"""Compose findings, solutions and justification results into a verdict."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from importlib import resources

from .argumentation import JustificationResult, Mark, Relation, Status, TreeNode, justify_all
from .dsl import quote, serialize_model
from .model import Model
from .process import ProcessFinding, Specification, applicability, compute_specification, realization_chain, run_checks

SCHEMA_VERSION = "1"


class Verdict(str, enum.Enum):
    COMPLIANT = "compliant"
    NON_COMPLIANT = "non_compliant"
    NOT_APPLICABLE = "not_applicable"


@dataclass(frozen=True)
class NpVerdict:
    np: str
    applicable_to: tuple[str, ...]
    hypotheses: tuple[JustificationResult, ...]
    status: Verdict
    causes: tuple[dict, ...] = ()


@dataclass(frozen=True)
class ComplianceReport:
    model_digest: str
    findings: tuple[ProcessFinding, ...]
    specification: Specification
    np_verdicts: tuple[NpVerdict, ...]
    overall: Verdict

    def verdict_for(self, np: str) -> NpVerdict | None:
        for v in self.np_verdicts:
            if v.np == np:
                return v
        return None


def model_digest(model: Model) -> str:
    return "sha256:" + hashlib.sha256(serialize_model(model).encode("utf-8")).hexdigest()


def _np_verdict(model, np, actors, results, blocking) -> NpVerdict:
    hyps = tuple(results[r.hypothesis] for r in model.realizations if r.np == np)
    if not actors:
        causes = tuple({"finding": f.code, "subject": f.subject} for f in blocking if f.subject == np)
        return NpVerdict(np, (), hyps, Verdict.NOT_APPLICABLE, causes)
    chain = realization_chain(model, np)
    causes = [{"finding": f.code, "subject": f.subject} for f in blocking if f.subject in chain]
    if not hyps:
        causes.append({"missing_hypothesis": np})
    elif not any(h.status is Status.JUSTIFIED for h in hyps):
        causes.extend({"defeated_hypothesis": h.hypothesis, "outcome": h.outcome} for h in hyps)
    status = Verdict.NON_COMPLIANT if causes else Verdict.COMPLIANT
    return NpVerdict(np, tuple(actors), hyps, status, tuple(causes))


def decide(model: Model) -> ComplianceReport:
    """Full verification of a model that already passed integrity checking."""
    spec = compute_specification(model)
    findings = tuple(run_checks(model, spec))
    blocking = [f for f in findings if f.blocking]
    results = justify_all(model)
    verdicts = tuple(
        _np_verdict(model, np, actors, results, blocking)
        for np, actors in sorted(applicability(model).items())
    )
    ok = not blocking and all(v.status is not Verdict.NON_COMPLIANT for v in verdicts)
    return ComplianceReport(
        model_digest(model), findings, spec, verdicts,
        Verdict.COMPLIANT if ok else Verdict.NON_COMPLIANT,
    )


def tree_to_dict(node: TreeNode) -> dict:
    return {
        "argument": node.argument,
        "kind": node.kind.value,
        "relation": node.relation.value,
        "mark": node.mark.value if node.mark else None,
        "children": [tree_to_dict(c) for c in node.children],
    }


def _hypothesis_dict(h: JustificationResult) -> dict:
    return {
        "hypothesis": h.hypothesis,
        "status": h.status.value,
        "outcome": h.outcome,
        "defeaters": [{"argument": d.argument, "kind": d.kind.value} for d in h.defeaters],
        "tree": tree_to_dict(h.tree),
    }


def report_to_dict(report: ComplianceReport) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "model_digest": report.model_digest,
        "overall": report.overall.value,
        "findings": [
            {"code": f.code, "subject": f.subject, "message": f.message, "blocking": f.blocking}
            for f in report.findings
        ],
        "specification": {
            gid: {
                "tasks": list(sol.tasks),
                "operationalized": sol.operationalized,
                "unrefined": list(sol.unrefined),
                "unselected": list(sol.unselected),
            }
            for gid, sol in report.specification.per_goal.items()
        },
        "np_verdicts": [
            {
                "np": v.np,
                "status": v.status.value,
                "applicable_to": list(v.applicable_to),
                "hypotheses": [_hypothesis_dict(h) for h in v.hypotheses],
                "causes": list(v.causes),
            }
            for v in report.np_verdicts
        ],
    }


def to_json(report: ComplianceReport) -> str:
    return json.dumps(report_to_dict(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text("utf-8"))


_MARK_STYLE = {
    Mark.UNDEFEATED: 'style=filled, fillcolor="palegreen"',
    Mark.DEFEATED: 'style="filled,dashed", fillcolor="lightcoral"',
    None: "style=solid",
}
_EDGE_STYLE = {
    Relation.ATTACK: 'style=solid, color="red", label="attack"',
    Relation.SUPPORT: 'style=dashed, color="darkgreen", label="support"',
}


def to_dot(report: ComplianceReport) -> str:
    """One ``digraph`` per hypothesis tree; edges point from child to target.

    Node names are the argument-id path from the root, since the same
    argument may occur on several branches.
    """
    results = sorted((h for v in report.np_verdicts for h in v.hypotheses), key=lambda h: h.hypothesis)
    out = []
    for h in results:
        lines = [f"digraph {quote(h.hypothesis)} {{", "  node [shape=box];"]
        edges = []

        def visit(node: TreeNode, path: str):
            lines.append(f"  {quote(path)} [label={quote(node.argument)}, {_MARK_STYLE[node.mark]}];")
            for c in node.children:
                cpath = f"{path}/{c.argument}"
                edges.append(f"  {quote(cpath)} -> {quote(path)} [{_EDGE_STYLE[c.relation]}];")
                visit(c, cpath)

        visit(h.tree, h.hypothesis)
        out.append("\n".join(lines + edges + ["}"]) + "\n")
    return "\n".join(out)
