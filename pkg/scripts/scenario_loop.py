"""Replay the hospital scenario as an iterate-until-acceptance loop.

Each round appends one argument to the model and re-runs justification
incrementally, printing the verdict and which hypotheses changed status.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path

from normcheck.argumentation import revalidate
from normcheck.dsl import parse_fragment, parse_model
from normcheck.report import decide

HERE = Path(__file__).resolve().parent
DEFAULT_MODEL = HERE.parent / "tests" / "fixtures" / "corpus" / "01_hospital.nms"

ROUNDS = [
    'argument A1 rejects H_G1_NP1 { claim "audit logs alone do not stop disclosure of PHI" }',
    'argument A2 rejects A1 { claim "the norm asks for accountability, which audit logs provide" }',
    'argument A3 revises T2 { claim "encryption at rest is not applied to backups" }',
    'argument A4 rejects A3 { claim "backups inherit the encrypted volume" }',
    'argument S1 supports H_G1_NP1 { claim "policy review signed off by the privacy officer" }',
]


@dataclass
class Config:
    model: Path = DEFAULT_MODEL


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--model", type=Path, default=Config.model)
    cfg = Config(model=p.parse_args().model)

    model = parse_model(cfg.model.read_text("utf-8"), str(cfg.model))
    print(f"round 0: overall {decide(model).overall.value}")
    for i, stmt in enumerate(ROUNDS, 1):
        new = parse_fragment(stmt, f"<round {i}>").arguments
        model, delta = revalidate(model, new)
        changes = ", ".join(f"{h} {a.value}->{b.value}" for h, (a, b) in sorted(delta.items())) or "no change"
        print(f"round {i}: + {new[0].id} ({new[0].kind.value}); {changes}; overall {decide(model).overall.value}")


if __name__ == "__main__":
    main()
