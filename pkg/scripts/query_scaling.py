"""Query-count scaling of classical subgroup recovery.

For a ladder of group sizes, runs repeated recovery trials against the
uniform orthogonal-subgroup sampler and reports mean and tail query counts
next to log2|G|.  Example:

    python3 scripts/query_scaling.py --trials 200 --seed 3
"""

import argparse
import math

from ahsp_sim.groups import FiniteAbelianGroup
from ahsp_sim.recovery import (
    query_statistics,
    recover_hidden_subgroup,
    uniform_orthogonal_sampler,
)
from ahsp_sim.rng import shot_rng

LADDER = [
    ((8,), (2,)),
    ((16, 2), (4, 1)),
    ((64,), (8,)),
    ((16, 16), (4, 4)),
    ((2,) * 10, (2, 1) * 5),
    ((64, 64), (8, 8)),
    ((4096,), (64,)),
    ((16, 16, 16), (4, 4, 4)),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--stop-rule", default="verify", choices=["blind", "verify"])
    args = parser.parse_args()

    print(f"{'group':>18} {'log2|G|':>8} {'mean':>8} {'p50':>6} {'p90':>6} {'success':>8}")
    for idx, (moduli, gens) in enumerate(LADDER):
        group = FiniteAbelianGroup(moduli)
        hidden = group.subgroup(gens)
        results = []
        for t in range(args.trials):
            sampler = uniform_orthogonal_sampler(
                hidden, shot_rng(args.seed + 1000 * idx, t)
            )
            results.append(recover_hidden_subgroup(
                group, sampler, stop_rule=args.stop_rule, planted=hidden,
            ))
        summary = query_statistics(results)
        print(f"{str(moduli):>18} {math.log2(group.order):8.1f} "
              f"{summary.mean_queries:8.2f} {summary.p50_queries:6.1f} "
              f"{summary.p90_queries:6.1f} {summary.success_rate:8.3f}")


if __name__ == "__main__":
    main()
