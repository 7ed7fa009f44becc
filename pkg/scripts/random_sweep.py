"""Seeded random sweep beyond the exhaustive grid: larger m and a_i.

Each seed draws one instance and checks every identity by brute force against
the moment route, the printed forms (where defined) and the |.|^2 split.

    python3 scripts/random_sweep.py --count 500 --m-max 5 --a-max 7
"""

import argparse
import sys
import time
from collections import Counter

from multisum.closed_form import DegenerateDenominator, rhs_abs_squared, rhs_by_moments, rhs_literal
from multisum.enumeration import brute_force_lhs
from multisum.instance import Bounds, IdentityLabel, random_instance


def check(inst, label, counts):
    target = inst if label.restricted else inst.with_n(None)
    lhs = brute_force_lhs(label, target)
    counts["moments", rhs_by_moments(label, target) == lhs] += 1
    try:
        counts["literal", rhs_literal(label, target) == lhs] += 1
    except DegenerateDenominator:
        counts["literal", "degenerate"] += 1
    if label.form == 4:
        counts["abs_squared", rhs_abs_squared(label, target) == lhs] += 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0, help="first seed; seeds run consecutively")
    parser.add_argument("--m-max", type=int, default=5)
    parser.add_argument("--a-max", type=int, default=6)
    parser.add_argument("--weights", choices=("rational", "gaussian"), default="gaussian")
    args = parser.parse_args(argv)

    bounds = Bounds(args.m_max, args.a_max, args.weights)
    counts = Counter()
    start = time.perf_counter()
    for seed in range(args.seed, args.seed + args.count):
        inst = random_instance(seed, bounds)
        for label in IdentityLabel:
            check(inst, label, counts)
    for (strategy, outcome), n in sorted(counts.items(), key=str):
        print(f"{strategy:<12} {str(outcome):<11} {n}")
    failed = sum(n for (_, outcome), n in counts.items() if outcome is False)
    print(f"{args.count} instances, {failed} mismatches, {time.perf_counter() - start:.1f}s")
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
