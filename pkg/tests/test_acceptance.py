"""Exit criteria of the artifact, each at zero tolerance.

Every test records one PASS/FAIL line that is printed in the terminal summary.
The exhaustive campaign (m <= 3, a_i <= 4, 25 Gaussian weight vectors per grid
point, both strategies) runs once per session and feeds the first two criteria.
"""

import io
import json
import time
from collections import defaultdict
from fractions import Fraction
from itertools import permutations
from math import comb

import pytest

from multisum.campaign import CampaignConfig, grid_points, run_campaign, strip_timing, weight_vectors
from multisum.cli import main
from multisum.closed_form import (
    MUTATION_IDS,
    DegenerateDenominator,
    literal_is_degenerate,
    moment_literal,
    moment_restricted,
    moment_unrestricted,
    rhs_by_moments,
    rhs_literal,
    rhs_unrestricted,
)
from multisum.enumeration import brute_force_lhs, brute_force_moment
from multisum.exact import GaussianRational as G, conj
from multisum.instance import (
    MOMENT_EXPONENTS,
    RESTRICTED_LABELS,
    IdentityLabel,
    MomentLabel,
    ProblemInstance,
    compute_aggregates,
    random_instance,
)
from multisum.residue import selftest

from conftest import ACCEPTANCE_RESULTS

pytestmark = pytest.mark.acceptance

R = IdentityLabel
GRID = dict(m_max=3, a_max=4)
RANDOM_COUNT = 25


def report(name, ok, detail):
    ACCEPTANCE_RESULTS[name] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def grid_instance_count():
    """Identity evaluations in the exhaustive grid: (label, instance) pairs."""
    total = 0
    for a, _ in grid_points(**GRID):
        total += RANDOM_COUNT * (8 * (sum(a) + 2) + 8)
    return total


@pytest.fixture(scope="session")
def exhaustive():
    buf = io.StringIO()
    start = time.perf_counter()
    summary = run_campaign(CampaignConfig(random_count=RANDOM_COUNT, records="fail", **GRID), stream=buf)
    return summary, buf.getvalue().splitlines(), time.perf_counter() - start


def test_exhaustive_identity_suite(exhaustive):
    summary, lines, elapsed = exhaustive
    evaluations = grid_instance_count()
    moments_pass = summary.by_strategy["moments", "pass"]
    ok = summary.ok and moments_pass == evaluations and len(lines) == 1
    report("exhaustive identity suite", ok,
           f"{evaluations} (identity, instance) pairs, moments route {moments_pass} exact matches, "
           f"{summary.failed} mismatches, {elapsed:.0f}s")
    assert ok


def test_literal_form_suite(exhaustive):
    summary, _, _ = exhaustive
    lit_pass = summary.by_strategy["literal", "pass"]
    lit_deg = summary.by_strategy["literal", "degenerate"]
    lit_fail = summary.by_strategy["literal", "fail"]
    # independent count of instances whose printed denominator vanishes
    expected_deg = 0
    for a, c in grid_points(**GRID):
        inst = ProblemInstance.build(a, c)
        for n in range(sum(a) + 2):
            at_n = inst.with_n(n)
            expected_deg += sum(literal_is_degenerate(lab, at_n) for lab in RESTRICTED_LABELS)
    expected_deg *= RANDOM_COUNT
    ok = (lit_fail == 0 and lit_deg == expected_deg and lit_pass + lit_deg == grid_instance_count()
          and summary.by_strategy["moments", "fail"] == 0)
    report("literal-form suite", ok,
           f"{lit_pass} literal matches, {lit_deg} degenerate (expected {expected_deg}) all matched "
           f"by the total route, {lit_fail} mismatches")
    assert ok


def test_moment_suite():
    checks = failures = 0
    asym = 0
    for a, c in grid_points(**GRID):
        m = len(a)
        base = ProblemInstance.build(a, c)
        for n in list(range(sum(a) + 2)) + [None]:
            inst = base.with_n(n)
            restricted = n is not None
            for kind in MOMENT_EXPONENTS:
                by_set = defaultdict(set)
                for label in MomentLabel.all_for(kind, m, restricted):
                    want = brute_force_moment(label, inst)
                    fn = moment_restricted if restricted else moment_unrestricted
                    got = fn(label, inst).value
                    checks += 1
                    failures += got != want
                    if restricted:
                        try:
                            checks += 1
                            failures += moment_literal(label, inst) != want
                        except DegenerateDenominator:
                            checks -= 1
                    if kind in ("11", "111"):
                        by_set[frozenset(label.indices)].add(got)
                asym += sum(len(v) != 1 for v in by_set.values())
    ok = failures == 0 and asym == 0
    report("moment suite", ok, f"{checks} moment checks (M1-M111, N1-N111), {failures} mismatches, "
                               f"{asym} permutation asymmetries")
    assert ok


def _cross_checks():
    counts = defaultdict(int)
    bad = defaultdict(int)

    def check(name, cond):
        counts[name] += 1
        bad[name] += not cond

    # square and conjugate reductions on seeded random instances
    for seed in range(200):
        inst = random_instance(seed)
        box = inst.with_n(None)
        for r3, r4, r5, target in ((R.R3, R.R4, R.R5, inst), (R.U3, R.U4, R.U5, box)):
            same = target.with_weights(target.x, target.x)
            check("R3 = R5 with y = x", rhs_by_moments(r5, same) == rhs_by_moments(r3, target)
                  == brute_force_lhs(r5, same))
            cj = target.with_weights(target.x, [conj(v) for v in target.x])
            check("R4 = R5 with y = conj(x)", rhs_by_moments(r5, cj) == rhs_by_moments(r4, target)
                  == brute_force_lhs(r4, target))

    # restricted sums over n against the unrestricted closed forms, whole grid
    cfg = CampaignConfig(random_count=1, **GRID)
    for a, c in grid_points(**GRID):
        (x, y), = weight_vectors(cfg, a, c)
        inst = ProblemInstance(len(a), a, c, x, None, y)
        for lab in RESTRICTED_LABELS:
            total = sum((rhs_by_moments(lab, inst.with_n(n)) for n in range(sum(a) + 1)), G.ZERO)
            check("sum over n of R_j = U_j", total == rhs_unrestricted(lab.partner(), inst))
        if not inst.is_zero_instance:
            T = inst.A0 - inst.C0
            check("sum over n of R_j = U_j",
                  sum(comb(T, n - inst.C0) for n in range(inst.C0, inst.A0 + 1)) == 2 ** T)

    # all c_i = 0: C-aggregates vanish and R1/R2/R4 lose their C terms
    for a, c in grid_points(**GRID):
        if any(c):
            continue
        (x, y), = weight_vectors(cfg, a, c)
        base = ProblemInstance(len(a), a, c, x, None, y)
        agg = compute_aggregates(base)
        A0, A1 = base.A0, agg.A_p(1)
        zero_c = all(v == 0 for (_, q), v in agg.C.items() if q >= 1) and agg.Cabs == 0
        for n in range(A0 + 2):
            inst = base.with_n(n)
            lead = comb(A0, n) if n <= A0 else 0
            ok = zero_c and rhs_literal(R.R1, inst) == lead == brute_force_lhs(R.R1, inst)
            if A0 >= 1:
                ok &= rhs_literal(R.R2, inst) == A1 * Fraction(lead * n, A0) == brute_force_lhs(R.R2, inst)
            if A0 >= 2:
                r4 = (A1 * conj(A1) * (n - 1) + agg.Aabs * (A0 - n)) * Fraction(lead * n, A0 * (A0 - 1))
                ok &= rhs_literal(R.R4, inst) == r4 == brute_force_lhs(R.R4, inst)
            check("all c_i = 0 specialization", ok)

    # m = 2, x = (1, 0): normalized values depend only on (a1, c1, a2 - c2, n - C0)
    for a1 in range(5):
        for c1 in range(a1 + 1):
            for d2 in range(5):
                for n in range(a1 + d2 + 1):
                    d1 = a1 - c1
                    for lab, s in ((R.R2, 1), (R.R3, 2), (R.R7, 3)):
                        single = sum(comb(d1, j) * comb(d2, n - c1 - j) * (j + c1) ** s
                                     for j in range(d1 + 1) if n - c1 - j >= 0)
                        ok = True
                        for c2 in range(3):
                            inst = ProblemInstance.build((a1, d2 + c2), (c1, c2), (1, 0), n=n + c2)
                            norm = comb(a1, c1) * comb(d2 + c2, c2)
                            ok &= rhs_by_moments(lab, inst) == single * norm == brute_force_lhs(lab, inst)
                        check("two-coordinate single-weight specialization", ok)
    return counts, bad


def test_cross_identity_consistency():
    counts, bad = _cross_checks()
    ok = all(bad[k] == 0 and counts[k] >= 100 for k in counts) and len(counts) == 5
    detail = "; ".join(f"{k}: {counts[k] - bad[k]}/{counts[k]}" for k in counts)
    report("cross-identity consistency", ok, detail)
    assert ok


def test_residue_selftest():
    start = time.perf_counter()
    results = selftest()
    elapsed = time.perf_counter() - start
    checks = sum(r.checks for r in results)
    ok = all(r.passed for r in results) and elapsed < 10
    report("residue self-test", ok, f"{len(results)} suites, {checks} checks, {elapsed:.2f}s")
    assert ok


def test_falsifiability(tmp_path, capsys):
    missed = []
    for mutation in MUTATION_IDS:
        out = tmp_path / "mutated.jsonl"
        code = main(["verify", "--mutate", mutation, "--fail-fast", "--records", "fail", "--out", str(out)])
        lines = out.read_text().splitlines()
        fails = [json.loads(line) for line in lines[:-1]]
        summary = json.loads(lines[-1])["summary"]
        if code == 0 or not fails or summary["fail"] < 1:
            missed.append(mutation)
    capsys.readouterr()
    ok = not missed
    report("falsifiability", ok,
           f"{len(MUTATION_IDS) - len(missed)}/{len(MUTATION_IDS)} single-coefficient mutations "
           f"reported with nonzero exit" + (f"; missed {missed}" if missed else ""))
    assert ok


def test_determinism(tmp_path, capsys):
    paths = [tmp_path / "first.jsonl", tmp_path / "second.jsonl"]
    args = ["verify", "--m-max", "3", "--a-max", "2", "--random-count", "1", "--seed", "12345"]
    codes = [main(args + ["--out", str(p)]) for p in paths]
    capsys.readouterr()
    first, second = (p.read_text().splitlines() for p in paths)
    same = len(first) == len(second) and all(
        json.dumps(u, sort_keys=True) == json.dumps(v, sort_keys=True)
        for u, v in zip(strip_timing(first), strip_timing(second)))
    ok = codes == [0, 0] and same
    report("determinism", ok, f"two runs of {len(first)} report lines identical modulo timing fields")
    assert ok
