"""Calibrate the truncation factor for the random-value MIS base.

Procedure (fixed before looking at results): for each factor kappa,
run 200 seeded instances of G(n, 2 ln n / n) for n in {32, 64, 128}
with the node-count guess equal to n, truncated at
kappa * ceil(log2 n) rounds.  A run succeeds if every node decided and
the output is a valid MIS.  Pick the smallest integer kappa whose
success rate is at least 0.5 on all three sizes; bake it into
baselib.LUBY_KAPPA.
"""

import math

from unilocal.baselib import RandomValueMIS
from unilocal.graph import Configuration, generate
from unilocal.problems import check_ruling
from unilocal.runtime import restrict, run_sync

SIZES = (32, 64, 128)
SEEDS = 200


def success_rate(kappa: int, n: int) -> float:
    p = 2 * math.log(n) / n
    budget = kappa * math.ceil(math.log2(n))
    good = 0
    for seed in range(SEEDS):
        g = generate("gnp", n=n, p=p, seed=seed)
        c = Configuration(g)
        outs, _ = run_sync(restrict(RandomValueMIS(), budget), c, seed=seed)
        if "0" not in outs.values() and check_ruling(c, outs, 2, 1):
            good += 1
    return good / SEEDS


def main():
    for kappa in range(1, 13):
        rates = [success_rate(kappa, n) for n in SIZES]
        line = " ".join(f"n={n}:{r:.3f}" for n, r in zip(SIZES, rates))
        print(f"kappa={kappa}  {line}")
        if all(r >= 0.5 for r in rates):
            print(f"calibrated kappa = {kappa}")
            return
    print("no kappa <= 12 reached 0.5 on all sizes")


if __name__ == "__main__":
    main()
