"""Run the exhaustive verification grid and print a per-identity breakdown.

    python3 scripts/run_exhaustive.py --m-max 3 --a-max 4 --out report.jsonl
"""

import argparse
import sys
from collections import defaultdict

from multisum.campaign import CampaignConfig, run_campaign


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--m-max", type=int, default=3)
    parser.add_argument("--a-max", type=int, default=4)
    parser.add_argument("--random-count", type=int, default=25)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--weights", choices=("rational", "gaussian"), default="gaussian")
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--records", default="fail", choices=("all", "nonpass", "fail", "none"))
    parser.add_argument("--out", help="JSON-lines report path")
    args = parser.parse_args(argv)

    cfg = CampaignConfig(m_max=args.m_max, a_max=args.a_max, random_count=args.random_count,
                         seed=args.seed, weight_kind=args.weights, jobs=args.jobs,
                         records=args.records, out=args.out)
    summary = run_campaign(cfg)

    table = defaultdict(dict)
    for (label, status), n in summary.by_identity.items():
        table[label][status] = n
    print(f"{'identity':<9}{'pass':>10}{'degenerate':>12}{'fail':>8}")
    for label in sorted(table, key=lambda s: (s[0] != "R", int(s[1:]))):
        row = table[label]
        print(f"{label:<9}{row.get('pass', 0):>10}{row.get('degenerate', 0):>12}{row.get('fail', 0):>8}")
    print(f"records={summary.records} fail={summary.failed} elapsed={summary.elapsed_s:.1f}s")
    return 0 if summary.ok else 1


if __name__ == "__main__":
    sys.exit(main())
