"""Command-line entry point: ``verify``, ``eval``, ``residue-selftest``, ``gen``."""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import residue
from .campaign import RECORD_LEVELS, STRATEGIES, CampaignConfig, run_campaign
from .closed_form import (
    MUTATION_IDS,
    DegenerateDenominator,
    rhs_abs_squared,
    rhs_by_moments,
    rhs_literal,
    rhs_unrestricted,
)
from .enumeration import brute_force_lhs
from .exact import gaussian_to_json
from .instance import (
    Bounds,
    IdentityLabel,
    InstanceFormatError,
    StructuralError,
    compute_aggregates,
    dump_instance,
    load_instance,
    random_instance,
    validate,
)

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


def parse_identities(text: str) -> tuple:
    """Comma-separated labels; ``all``, ``R`` and ``U`` select groups."""
    out = []
    for item in text.split(","):
        item = item.strip().upper()
        if not item:
            continue
        if item == "ALL":
            out.extend(IdentityLabel)
        elif item in ("R", "U"):
            out.extend(lab for lab in IdentityLabel if lab.value[0] == item)
        else:
            out.append(IdentityLabel.parse(item))
    seen = dict.fromkeys(out)
    return tuple(lab for lab in IdentityLabel if lab in seen)


def parse_strategies(text: str) -> tuple:
    out = []
    for item in text.split(","):
        item = item.strip().lower()
        if item == "absorption":  # the moment route is the absorption-form evaluator
            item = "moments"
        if item not in STRATEGIES:
            raise argparse.ArgumentTypeError(f"unknown strategy {item!r}")
        if item not in out:
            out.append(item)
    return tuple(out)


def _identities_arg(text):
    try:
        return parse_identities(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multisum",
                                     description="Exact verification of multi-sum Chu-Vandermonde identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a verification campaign over the exhaustive grid")
    v.add_argument("--identities", type=_identities_arg, default=tuple(IdentityLabel),
                   help="comma-separated labels, or all / R / U (default: all)")
    v.add_argument("--m-max", type=int, default=3)
    v.add_argument("--a-max", type=int, default=4)
    v.add_argument("--weights", choices=("rational", "gaussian"), default="gaussian")
    v.add_argument("--seed", type=_u64, default=0)
    v.add_argument("--random-count", type=int, default=25)
    v.add_argument("--strategies", type=parse_strategies, default=STRATEGIES,
                   help="comma-separated subset of literal,moments")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--out", help="report path (JSON lines); '-' for stdout")
    v.add_argument("--records", choices=RECORD_LEVELS, default="all",
                   help="which records to write (the summary line is always written)")
    v.add_argument("--mutate", choices=MUTATION_IDS, metavar="ID",
                   help="perturb one closed-form coefficient; the run must then fail")
    v.add_argument("--fail-fast", action="store_true")

    e = sub.add_parser("eval", help="evaluate one instance file")
    e.add_argument("--instance", required=True)
    e.add_argument("--identity", required=True, type=IdentityLabel.parse)

    r = sub.add_parser("residue-selftest", help="run the residue-engine property suites")
    r.add_argument("--order", type=int, default=residue.DEFAULT_ORDER)
    r.add_argument("--mutate", help="geometric.<s>.<j>: bump one series numerator")
    r.add_argument("--seed", type=int, default=0)

    g = sub.add_parser("gen", help="write a seeded random instance file")
    g.add_argument("--seed", type=_u64, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--m-max", type=int, default=3)
    g.add_argument("--a-max", type=int, default=4)
    g.add_argument("--weights", choices=("rational", "gaussian"), default="gaussian")
    return parser


def cmd_verify(args) -> int:
    cfg = CampaignConfig(
        identities=args.identities, m_max=args.m_max, a_max=args.a_max, weight_kind=args.weights,
        seed=args.seed, random_count=args.random_count, strategies=args.strategies,
        out=args.out, jobs=args.jobs, mutate=args.mutate, records=args.records,
        fail_fast=args.fail_fast,
    )
    summary = run_campaign(cfg)
    doc = summary.to_json()["summary"]
    print(f"records={doc['records']} pass={doc['pass']} fail={doc['fail']} "
          f"degenerate={doc['degenerate']} errors={doc['errors']} elapsed={doc['elapsed_s']}s",
          file=sys.stderr if args.out == "-" else sys.stdout)
    return EXIT_OK if summary.ok else EXIT_MISMATCH


def _json_value(v):
    return v if isinstance(v, str) else gaussian_to_json(v)


def cmd_eval(args) -> int:
    try:
        inst = load_instance(args.instance)
    except (InstanceFormatError, OSError) as exc:
        print(f"error: {args.instance}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    label = args.identity
    if not label.restricted:
        inst = inst.with_n(None)
    report = validate(inst, label)
    if not report.ok:
        for err in report.errors:
            print(f"structural error: {err}", file=sys.stderr)
        return EXIT_INPUT

    start = time.perf_counter_ns()
    lhs = brute_force_lhs(label, inst)
    rhs = {}
    try:
        rhs["literal"] = rhs_literal(label, inst) if label.restricted else rhs_unrestricted(label, inst)
    except DegenerateDenominator:
        rhs["literal"] = "degenerate"
    rhs["moments"] = rhs_by_moments(label, inst)
    if label.form == 4:
        rhs["abs_squared"] = rhs_abs_squared(label, inst)
    match = {k: (None if isinstance(v, str) else v == lhs) for k, v in rhs.items()}
    doc = {
        "identity": label.value,
        "weight": label.weight_form,
        "instance": inst.to_json(),
        "zero_instance": report.zero_instance,
        "lhs": gaussian_to_json(lhs),
        "rhs": {k: _json_value(v) for k, v in rhs.items()},
        "match": match,
        "degenerate": rhs["literal"] == "degenerate",
        "aggregates": compute_aggregates(inst).to_json(),
        "elapsed_us": (time.perf_counter_ns() - start) // 1000,
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK if all(v is not False for v in match.values()) else EXIT_MISMATCH


def cmd_selftest(args) -> int:
    try:
        results = residue.selftest(args.order, mutate=args.mutate, seed=args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for res in results:
        flag = "PASS" if res.passed else "FAIL"
        print(f"{flag} {res.name}: {res.checks - len(res.failures)}/{res.checks}")
        for case, detail in res.failures[:5]:
            print(f"    case={case} got={detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def cmd_gen(args) -> int:
    inst = random_instance(args.seed, Bounds(args.m_max, args.a_max, args.weights))
    dump_instance(inst, args.out)
    print(f"wrote {args.out} (m={inst.m}, n={inst.n})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "eval":
            return cmd_eval(args)
        if args.command == "residue-selftest":
            return cmd_selftest(args)
        return cmd_gen(args)
    except (ValueError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
