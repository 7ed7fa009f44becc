from fractions import Fraction
from itertools import permutations
from math import comb

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from multisum.closed_form import (
    MUTATION_IDS,
    DegenerateDenominator,
    RhsStrategy,
    coordinate_factor,
    coordinate_layers,
    literal_is_degenerate,
    moment_literal,
    moment_restricted,
    moment_unrestricted,
    rhs,
    rhs_abs_squared,
    rhs_by_moments,
    rhs_literal,
    rhs_unrestricted,
)
from multisum.enumeration import brute_force_lhs, brute_force_moment
from multisum.exact import GaussianRational as G, conj
from multisum.instance import (
    MOMENT_EXPONENTS,
    RESTRICTED_LABELS,
    UNRESTRICTED_LABELS,
    IdentityLabel,
    MomentLabel,
    ProblemInstance,
    StructuralError,
    compute_aggregates,
)

from conftest import gaussians, instances

R = IdentityLabel
_MOMENT_DEGREE = {"1": 1, "2": 2, "11": 2, "3": 3, "12": 3, "111": 3}


def test_literal_examples():
    assert rhs_literal(R.R2, ProblemInstance.build((1, 1), (0, 0), (1, 0), n=1)) == 1
    assert rhs_literal(R.U2, ProblemInstance.build((1,), (0,), (1,))) == 1
    assert rhs_literal(R.R1, ProblemInstance.build((2, 1), (1, 0), n=2)) == 4
    assert rhs_unrestricted(R.U1, ProblemInstance.build((2,), (1,))) == 4
    assert rhs_unrestricted(R.U1, ProblemInstance.build((3, 2), (3, 2))) == 1


def test_unrestricted_below_degree_uses_total_form():
    inst = ProblemInstance.build((1,), (0,), (G(0, 1),))
    assert rhs_unrestricted(R.U4, inst) == 1 == brute_force_lhs(R.U4, inst)
    # the printed form with 2^(-1) is also exact here
    assert rhs_literal(R.U4, inst) == 1


def test_moment_examples():
    inst = ProblemInstance.build((3,), (0,), n=2)
    assert moment_restricted(MomentLabel("1", (1,)), inst).value == 6
    assert moment_restricted(MomentLabel("2", (1,)), inst).value == 12
    assert moment_literal(MomentLabel("2", (1,)), inst) == 12
    inst = ProblemInstance.build((1, 1), (0, 0), n=2)
    assert moment_restricted(MomentLabel("11", (1, 2)), inst).value == 1
    assert moment_unrestricted(MomentLabel("1", (1,), False), ProblemInstance.build((1,), (0,))).value == 1
    assert moment_unrestricted(MomentLabel("2", (1,), False), ProblemInstance.build((2,), (0,))).value == 6
    assert moment_unrestricted(MomentLabel("3", (1,), False), ProblemInstance.build((2,), (0,))).value == 10


def test_by_moments_examples():
    inst = ProblemInstance.build((3,), (1,), (G(2, 1),), n=2)
    m2 = moment_restricted(MomentLabel("2", (1,)), inst).value
    assert rhs_by_moments(R.R3, inst) == inst.x[0] * inst.x[0] * m2
    assert rhs_by_moments(R.R7, ProblemInstance.build((3,), (0,), (1,), n=2)) == 24


def test_abs_squared_examples():
    inst = ProblemInstance.build((1,), (0,), (G(1, 1),), n=1)
    assert rhs_abs_squared(R.R4, inst) == 2 == brute_force_lhs(R.R4, inst)
    real = ProblemInstance.build((3, 2), (1, 0), (2, Fraction(-1, 3)), n=3)
    assert rhs_abs_squared(R.R4, real) == rhs_by_moments(R.R3, real)
    imag = ProblemInstance.build((3,), (1,), (G(0, 1),), n=2)
    assert rhs_abs_squared(R.R4, imag) == rhs_by_moments(R.R3, imag.with_weights((G.ONE,)))
    with pytest.raises(ValueError):
        rhs_abs_squared(R.R3, real)


@given(instances())
def test_oracle_equivalence(inst):
    box = inst.with_n(None)
    for lab in RESTRICTED_LABELS:
        lhs = brute_force_lhs(lab, inst)
        assert rhs_by_moments(lab, inst) == lhs
        if literal_is_degenerate(lab, inst):
            with pytest.raises(DegenerateDenominator):
                rhs_literal(lab, inst)
        else:
            assert rhs_literal(lab, inst) == lhs
    for lab in UNRESTRICTED_LABELS:
        lhs = brute_force_lhs(lab, box)
        assert rhs_unrestricted(lab, box) == rhs_by_moments(lab, box) == rhs_literal(lab, box) == lhs
    assert rhs_abs_squared(R.R4, inst) == brute_force_lhs(R.R4, inst)
    assert rhs_abs_squared(R.U4, box) == brute_force_lhs(R.U4, box)


@given(instances(), st.sampled_from(sorted(MOMENT_EXPONENTS)))
def test_moments_match_brute_force(inst, kind):
    for restricted in (True, False):
        target = inst if restricted else inst.with_n(None)
        for label in MomentLabel.all_for(kind, inst.m, restricted):
            expected = brute_force_moment(label, target)
            fn = moment_restricted if restricted else moment_unrestricted
            assert fn(label, target).value == expected
            if restricted:
                try:
                    assert moment_literal(label, target) == expected
                except DegenerateDenominator:
                    assert inst.A0 - inst.C0 < _MOMENT_DEGREE[kind]


@given(instances())
def test_moment_symmetry(inst):
    for restricted in (True, False):
        target = inst if restricted else inst.with_n(None)
        fn = moment_restricted if restricted else moment_unrestricted
        for kind in ("11", "111"):
            width = len(MOMENT_EXPONENTS[kind])
            for idx in permutations(range(1, inst.m + 1), width):
                values = {fn(MomentLabel(kind, p, restricted), target).value for p in permutations(idx)}
                assert len(values) == 1


@given(instances())
def test_square_and_conjugate_reductions(inst):
    for r3, r4, r5 in ((R.R3, R.R4, R.R5), (R.U3, R.U4, R.U5)):
        target = inst if r3.restricted else inst.with_n(None)
        assert rhs_by_moments(r5, target.with_weights(target.x, target.x)) == rhs_by_moments(r3, target)
        conj_y = target.with_weights(target.x, [conj(v) for v in target.x])
        assert rhs_by_moments(r5, conj_y) == rhs_by_moments(r4, target)


@given(instances())
def test_restricted_sum_over_n_is_unrestricted(inst):
    box = inst.with_n(None)
    for lab in RESTRICTED_LABELS:
        total = sum((rhs_by_moments(lab, inst.with_n(n)) for n in range(inst.A0 + 1)), G.ZERO)
        assert total == rhs_unrestricted(lab.partner(), box)
    if not inst.is_zero_instance:
        T = inst.A0 - inst.C0
        assert sum(comb(T, n - inst.C0) for n in range(inst.C0, inst.A0 + 1)) == 2 ** T


@given(instances(zero_ok=False))
def test_all_c_zero_reduction(inst):
    """With every c_i = 0 the C-aggregates vanish and R1/R2/R4 lose their C terms."""
    inst = ProblemInstance.build(inst.a, [0] * inst.m, inst.x, inst.n, inst.y)
    agg = compute_aggregates(inst)
    assert all(v == 0 for (_, q), v in agg.C.items() if q >= 1) and agg.Cabs == 0
    assert all(v == 0 for v in agg.S.values())
    A0, n = inst.A0, inst.n
    lead = comb(A0, n) if n <= A0 else 0
    assert rhs_literal(R.R1, inst) == lead
    if A0 >= 1:
        assert rhs_literal(R.R2, inst) == agg.A_p(1) * Fraction(lead * n, A0)
    if A0 >= 2:
        A1 = agg.A_p(1)
        expected = (A1 * conj(A1) * (n - 1) + agg.Aabs * (A0 - n)) * Fraction(lead * n, A0 * (A0 - 1))
        assert rhs_literal(R.R4, inst) == expected


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 4), st.integers(0, 3), st.integers(0, 4),
       st.integers(0, 6))
def test_two_coordinate_single_weight_reduction(a1, c1, d2, c2, shift, n):
    """m=2, x=(1,0): normalized values depend only on (a1, c1, a2-c2, n-C0)."""
    assume(c1 <= a1)
    base = ProblemInstance.build((a1, d2 + c2), (c1, c2), (1, 0), n=n + c2)
    moved = ProblemInstance.build((a1, d2 + c2 + shift), (c1, c2 + shift), (1, 0), n=n + c2 + shift)
    d1 = a1 - c1
    for lab, s in ((R.R2, 1), (R.R3, 2), (R.R7, 3)):
        single = sum(comb(d1, j) * comb(d2, n - c1 - j) * (j + c1) ** s for j in range(d1 + 1) if n - c1 - j >= 0)
        for inst in (base, moved):
            norm = comb(a1, c1) * comb(inst.a[1], inst.c[1])
            assert rhs_by_moments(lab, inst) == single * norm


@given(instances())
def test_degenerate_instances_stay_total(inst):
    assume(not inst.is_zero_instance and inst.A0 - inst.C0 <= 2)
    for lab in RESTRICTED_LABELS:
        assert rhs_by_moments(lab, inst) == brute_force_lhs(lab, inst)
    assert literal_is_degenerate(R.R7, inst)


def test_degenerate_literal_raises():
    inst = ProblemInstance.build((2, 1), (1, 0), (1, 2), n=2)
    with pytest.raises(DegenerateDenominator):
        rhs_literal(R.R7, inst)
    zero = ProblemInstance.build((1,), (2,), (1,), n=1)
    assert rhs_literal(R.R7, zero) == 0 and not literal_is_degenerate(R.R7, zero)


def test_coordinate_pieces_match_direct_sums():
    for a in range(9):
        for c in range(a + 1):
            for power in range(4):
                direct = sum(comb(a, k) * comb(k, c) * k ** power for k in range(a + 1))
                assert coordinate_factor(a, c, power) == direct
        assert coordinate_layers(a, 0, 0) == [1]


def test_rhs_dispatch():
    inst = ProblemInstance.build((3, 2), (1, 1), (G(1, 2), 3), n=3)
    lhs = brute_force_lhs(R.R6, inst)
    for strategy in RhsStrategy:
        assert rhs(R.R6, inst, strategy) == lhs
    with pytest.raises(ValueError):
        rhs_unrestricted(R.R6, inst)
    with pytest.raises(StructuralError):
        rhs_by_moments(R.R5, inst)


@pytest.mark.parametrize("mutation", MUTATION_IDS)
def test_each_mutation_is_observable(mutation):
    """Each perturbed coefficient changes at least one small value."""
    seen = False
    for a in ((3, 2, 4), (4, 3), (4,)):
        for c in ((0,) * len(a), (1,) * len(a), tuple(min(3, ai) for ai in a)):
            x = [G(1 + i, 2 - i) for i in range(len(a))]
            for n in range(sum(a) + 1):
                inst = ProblemInstance.build(a, c, x, n, x)
                for lab in IdentityLabel:
                    target = inst if lab.restricted else inst.with_n(None)
                    try:
                        good = rhs_literal(lab, target)
                        bad = rhs_literal(lab, target, mutation)
                    except DegenerateDenominator:
                        good = bad = None
                    seen |= good != bad
                    seen |= rhs_by_moments(lab, target) != rhs_by_moments(lab, target, mutation)
                if seen:
                    return
    pytest.fail(f"mutation {mutation} left every value unchanged")
