"""How dialectical trees grow with the size of the argument log.

Samples random logs per log size and prints mean/max tree size, mean depth,
and the share of hypotheses that end up justified.

    python scripts/tree_growth.py --samples 500 --sizes 4 8 12 16
"""

import argparse
import random
import statistics
from dataclasses import dataclass, field

from normcheck import synth
from normcheck.argumentation import Status, justify_all


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [4, 6, 8, 10, 12, 16])
    samples: int = 300
    max_hypotheses: int = 3
    p_element: float = 0.1
    seed: int = 0


def run(cfg: Config):
    rows = []
    for size in cfg.sizes:
        rng = random.Random(cfg.seed * 1_000_003 + size)
        sizes, depths, justified = [], [], []
        for _ in range(cfg.samples):
            m = synth.argument_log(rng, max_arguments=size, max_hypotheses=cfg.max_hypotheses,
                                   p_element=cfg.p_element)
            for r in justify_all(m).values():
                sizes.append(r.tree.size)
                depths.append(r.tree.depth)
                justified.append(r.status is Status.JUSTIFIED)
        rows.append((size, len(sizes), statistics.mean(sizes), max(sizes),
                     statistics.mean(depths), sum(justified) / len(justified)))
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--p-element", type=float, default=Config.p_element)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    cfg = Config(sizes=a.sizes, samples=a.samples, p_element=a.p_element, seed=a.seed)
    print(f"{'max_args':>8} {'trees':>6} {'mean_size':>9} {'max_size':>8} {'mean_depth':>10} {'justified':>9}")
    for size, n, mean, mx, depth, share in run(cfg):
        print(f"{size:>8} {n:>6} {mean:>9.2f} {mx:>8} {depth:>10.2f} {share:>9.1%}")


if __name__ == "__main__":
    main()
