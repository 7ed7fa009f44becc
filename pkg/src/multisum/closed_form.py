"""Right-hand sides: printed closed forms, moment closed forms, and moment decomposition.

Three evaluation routes:

* LITERAL   the printed formulas of the sixteen identities.  The restricted ones
            divide by (A0-C0)(A0-C0-1)...; when that vanishes on a nonzero instance
            :class:`DegenerateDenominator` is raised instead of dividing.
* ABSORPTION moment closed forms written as ``sum_L coeff_L * C(A0-C0-L, n-C0-L)``,
            the layered residue expansions before the final absorption step.  These
            have no denominators and are total.
* MOMENTS   split the weight of an identity into sums over mutually distinct
            indices and add up ABSORPTION (restricted) or per-coordinate
            (unrestricted) moment values.

Every function takes an optional ``mutation`` id (see :data:`MUTATION_IDS`) that
adds one to a single named coefficient.  It exists so the verification harness
can demonstrate that it fails when a formula is wrong.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Optional

from .exact import GaussianRational, binomial, common_denominator, conj, falling_factorial
from .instance import (
    Aggregates,
    IdentityLabel,
    MomentLabel,
    ProblemInstance,
    StructuralError,
    compute_aggregates,
    require_valid,
)

G = GaussianRational


class DegenerateDenominator(ZeroDivisionError):
    """A printed fraction has a vanishing denominator on a nonzero instance."""


class RhsStrategy(enum.Enum):
    LITERAL = "literal"
    ABSORPTION = "absorption"
    MOMENTS = "moments"


@dataclass(frozen=True)
class MomentResult:
    label: MomentLabel
    value: Fraction


# --------------------------------------------------------------------------
# mutation registry

# Layer coefficients of the single-coordinate residues at w_m, indexed by the
# number of derivatives falling on (1+w)^(a-c).  r2/r3/r4 are the residues of
# f/(w-w_m)^2, 2f/(w-w_m)^3, 6f/(w-w_m)^4 with f = (1+w)^(a-c) w^c.
_RESIDUE_LAYERS = {
    "r2": (
        lambda d, c: c,
        lambda d, c: d,
    ),
    "r3": (
        lambda d, c: c * (c - 1),
        lambda d, c: 2 * d * c,
        lambda d, c: d * (d - 1),
    ),
    "r4": (
        lambda d, c: c * (c - 1) * (c - 2),
        lambda d, c: 3 * d * c * (c - 1),
        lambda d, c: 3 * d * (d - 1) * c,
        lambda d, c: d * (d - 1) * (d - 2),
    ),
}

# k^s w^k summed = w/(1-w)^2 + 2w^2/(1-w)^3 ... ; multiplicity of each residue per power
_POWER_RESIDUES = {
    1: (("r2", 1),),
    2: (("r2", 1), ("r3", 1)),
    3: (("r2", 1), ("r3", 3), ("r4", 1)),
}

MUTATION_IDS = tuple(
    [f"M.{r}.L{l}" for r, fs in _RESIDUE_LAYERS.items() for l in range(len(fs))]
    + [f"M.k{s}.{r}" for s, pieces in _POWER_RESIDUES.items() for r, _ in pieces]
    + [f"N.k{s}" for s in range(4)]
    + [f"{lab.value}.literal" for lab in IdentityLabel]
)


def _bump(mutation: Optional[str], name: str) -> int:
    return 1 if mutation == name else 0


def check_mutation(mutation: Optional[str]) -> None:
    if mutation is not None and mutation not in MUTATION_IDS:
        raise ValueError(f"unknown mutation id {mutation!r}; choose from {', '.join(MUTATION_IDS)}")


# --------------------------------------------------------------------------
# restricted moments, absorption form

def coordinate_layers(a: int, c: int, power: int, mutation: Optional[str] = None) -> list:
    """Layer coefficients contributed by one coordinate raised to ``power``."""
    if power == 0:
        return [1]
    d = a - c
    out = [0] * (power + 1)
    for res, mult in _POWER_RESIDUES[power]:
        mult += _bump(mutation, f"M.k{power}.{res}")
        for layer, fn in enumerate(_RESIDUE_LAYERS[res]):
            out[layer] += mult * (fn(d, c) + _bump(mutation, f"M.{res}.L{layer}"))
    return out


def _poly_mul(p: list, q: list) -> list:
    out = [0] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi:
            for j, qj in enumerate(q):
                out[i + j] += pi * qj
    return out


def _binomial_product(a: tuple, c: tuple) -> int:
    out = 1
    for ai, ci in zip(a, c):
        out *= binomial(ai, ci)
    return out


@lru_cache(maxsize=1 << 20)
def _restricted_value(a: tuple, c: tuple, n: int, exps: tuple, mutation: Optional[str]) -> int:
    if any(ci > ai for ai, ci in zip(a, c)):
        return 0
    top = sum(a) - sum(c)
    low = n - sum(c)
    if low < 0 or low > top:
        return 0
    layers = [1]
    for i, power in exps:
        layers = _poly_mul(layers, coordinate_layers(a[i], c[i], power, mutation))
    total = 0
    for shift, coeff in enumerate(layers):
        if not coeff:
            continue
        if shift > top:
            raise ArithmeticError(f"nonzero layer {shift} beyond A0-C0 = {top}")
        total += coeff * binomial(top - shift, low - shift)
    return total * _binomial_product(a, c) if total else 0


def _exps(label: MomentLabel, inst: ProblemInstance) -> tuple:
    label.check(inst.m)
    return tuple(sorted((i - 1, e) for i, e in label.exponents.items()))


def moment_restricted(label: MomentLabel, inst: ProblemInstance,
                      mutation: Optional[str] = None) -> MomentResult:
    if inst.n is None:
        raise StructuralError("restricted moment needs n")
    value = _restricted_value(inst.a, inst.c, inst.n, _exps(label, inst), mutation)
    return MomentResult(label, Fraction(value))


def moment_literal(label: MomentLabel, inst: ProblemInstance) -> Fraction:
    """The printed restricted moment theorems, fractions and all."""
    if inst.n is None:
        raise StructuralError("restricted moment needs n")
    label.check(inst.m)
    if inst.is_zero_instance:
        return Fraction(0)
    kind = label.kind
    a = [inst.a[i - 1] for i in label.indices]
    c = [inst.c[i - 1] for i in label.indices]
    A0, C0, n = inst.A0, inst.C0, inst.n
    T, N, R = A0 - C0, n - C0, A0 - n
    degree = 1 if kind == "1" else 2 if kind in ("2", "11") else 3
    den = falling_factorial(T, degree)
    if den == 0:
        raise DegenerateDenominator(f"M{kind}: (A0-C0) falling factorial of order {degree} vanishes")
    lead = Fraction(binomial(T, N) if N >= 0 else 0) * _binomial_product(inst.a, inst.c)
    if kind == "1":
        (ap,), (cp,) = a, c
        num = N * ap + R * cp
    elif kind == "2":
        (ap,), (cp,) = a, c
        num = N * ((N - 1) * ap ** 2 + R * (ap - cp + 2 * ap * cp)) + R * (R - 1) * cp ** 2
    elif kind == "11":
        ap, aq = a
        cp, cq = c
        num = N * ((N - 1) * ap * aq + R * (ap * cq + cp * aq)) + R * (R - 1) * cp * cq
    elif kind == "3":
        (ap,), (cp,) = a, c
        num = (N * (N - 1) * ((N - 2) * ap ** 3
                              + R * (3 * ap ** 2 * cp + 3 * ap ** 2 - 3 * ap * cp - ap + cp))
               + R * (R - 1) * ((R - 2) * cp ** 3
                                + N * (3 * ap * cp ** 2 - 3 * cp ** 2 + 3 * ap * cp + ap - cp)))
    elif kind == "12":
        ap, aq = a
        cp, cq = c
        num = (N * (N - 1) * ((N - 2) * ap * aq ** 2
                              + R * (cp * aq ** 2 + ap * aq - ap * cq + 2 * ap * aq * cq))
               + R * (R - 1) * ((R - 2) * cp * cq ** 2
                                + N * (ap * cq ** 2 - cp * cq + cp * aq + 2 * cp * aq * cq)))
    else:
        ap, aq, ar = a
        cp, cq, cr = c
        num = (N * (N - 1) * ((N - 2) * ap * aq * ar + R * (ap * aq * cr + ap * cq * ar + cp * aq * ar))
               + R * (R - 1) * ((R - 2) * cp * cq * cr + N * (cp * cq * ar + cp * aq * cr + ap * cq * cr)))
    return lead * num / den


# --------------------------------------------------------------------------
# unrestricted moments, per-coordinate product

def _pow2(e: int) -> Fraction:
    return Fraction(2 ** e) if e >= 0 else Fraction(1, 2 ** (-e))


def coordinate_factor(a: int, c: int, power: int, mutation: Optional[str] = None) -> Fraction:
    """sum_k C(a,k) C(k,c) k^power for one coordinate, via the closed forms."""
    if c > a:
        return Fraction(0)
    d, s = a - c, a + c
    bump = _bump(mutation, f"N.k{power}")
    if power == 0:
        bracket = 1
    elif power == 1:
        bracket = s
    elif power == 2:
        bracket = s * s + d
    elif power == 3:
        bracket = s * (s * s + 3 * d)
    else:
        raise ValueError(f"power must be 0..3, got {power}")
    return _pow2(d - power) * (bracket + bump) * binomial(a, c)


@lru_cache(maxsize=1 << 18)
def _unrestricted_value(a: tuple, c: tuple, exps: tuple, mutation: Optional[str]) -> Fraction:
    powers = dict(exps)
    out = Fraction(1)
    for i, (ai, ci) in enumerate(zip(a, c)):
        out *= coordinate_factor(ai, ci, powers.get(i, 0), mutation)
        if not out:
            return Fraction(0)
    return out


def moment_unrestricted(label: MomentLabel, inst: ProblemInstance,
                        mutation: Optional[str] = None) -> MomentResult:
    return MomentResult(label, _unrestricted_value(inst.a, inst.c, _exps(label, inst), mutation))


# --------------------------------------------------------------------------
# literal forms of the identities

def literal_layers(label: IdentityLabel, agg: Aggregates) -> tuple:
    """Coefficient groups of the printed bracket.

    Restricted brackets of degree d are sum_j K_j (N)_(d-j) (R)_j with N = n - C0,
    R = A0 - n and (t)_s the falling factorial; e.g. the square identity reads
    A1^2 N(N-1) + (A2 - C2 + 2 A1 C1) N R + C1^2 R(R-1).  Unrestricted brackets
    do not depend on n and come back as a single group.
    """
    A, C, S = agg.A, agg.C, agg.S
    A1, A2, A3 = A[1, 1], A[2, 1], A[3, 1]
    C1, C2, C3 = C[1, 1], C[2, 1], C[3, 1]
    form = label.form
    if form == 1:
        return (G.ONE,)
    if label.restricted:
        if form == 2:
            return (A1, C1)
        if form == 3:
            return (A1 * A1, A2 - C2 + A1 * C1 * 2, C1 * C1)
        if form == 4:
            return (A1 * conj(A1), A1 * conj(C1) + conj(A1) * C1 + (agg.Aabs - agg.Cabs), C1 * conj(C1))
        if form == 5:
            As1, Cs1 = agg.Astar_p(1), agg.Cstar_p(1)
            return (A1 * As1, agg.Astar[1, 1] - agg.Cstar[1, 1] + A1 * Cs1 + As1 * C1, C1 * Cs1)
        if form == 6:
            return (A[1, 2], A1 - C1 + S[1, 1] * 2, C[1, 2])
        if form == 7:
            inner = A2 - C2 + A1 * C1
            return (A1 * A1 * A1, C3 - A3 + A1 * inner * 3, A3 - C3 + C1 * inner * 3, C1 * C1 * C1)
        return (A[1, 3], C1 - A1 + (S[2, 1] + A[1, 2] - S[1, 1]) * 3,
                A1 - C1 + (S[1, 2] - C[1, 2] + S[1, 1]) * 3, C[1, 3])
    s1 = A1 + C1
    if form == 2:
        return (s1,)
    if form == 3:
        return (A2 - C2 + s1 * s1,)
    if form == 4:
        return (s1 * conj(s1) + (agg.Aabs - agg.Cabs),)
    if form == 5:
        return (agg.Astar[1, 1] - agg.Cstar[1, 1] + s1 * (agg.Astar_p(1) + agg.Cstar_p(1)),)
    if form == 6:
        return (A1 - C1 + A[1, 2] + C[1, 2] + S[1, 1] * 2,)
    if form == 7:
        return (s1 * (s1 * s1 + (A2 - C2) * 3),)
    return (A[1, 3] + C[1, 3] + (A[1, 2] - C[1, 2] + S[1, 2] + S[2, 1]) * 3,)


def literal_layer_parts(label: IdentityLabel, agg: Aggregates) -> tuple:
    """:func:`literal_layers` over one integer denominator: ``(D, ((re, im), ...))``."""
    D, parts = common_denominator(literal_layers(label, agg))
    return D, tuple(parts)


def literal_is_degenerate(label: IdentityLabel, inst: ProblemInstance) -> bool:
    """True when the printed restricted fraction would divide by zero."""
    if not label.restricted or inst.is_zero_instance:
        return False
    return falling_factorial(inst.A0 - inst.C0, label.degree) == 0


def rhs_literal(label: IdentityLabel, inst: ProblemInstance, mutation: Optional[str] = None,
                agg: Optional[Aggregates] = None, check: bool = True,
                layers: Optional[tuple] = None) -> GaussianRational:
    """Printed right side.  Unrestricted powers of two below 2^0 are exact rationals.

    ``check=False`` skips structural validation for callers that already did it;
    ``layers`` may carry a precomputed :func:`literal_layer_parts` for this instance's weights.
    """
    if check:
        require_valid(inst, label)
    if inst.is_zero_instance:
        return G.ZERO
    A0, C0 = inst.A0, inst.C0
    T = A0 - C0
    d = label.degree
    if label.restricted:
        den = falling_factorial(T, d)
        if den == 0:
            raise DegenerateDenominator(f"{label.value}: falling factorial ({T})_{d} vanishes")
        N, R = inst.n - C0, A0 - inst.n
        lead = binomial(T, N) if N >= 0 else 0
    else:
        den = 1
        lead = _pow2(T - d)
    lead = lead * _binomial_product(inst.a, inst.c)
    if not lead:
        return G.ZERO
    if layers is None:
        layers = literal_layer_parts(label, agg if agg is not None else compute_aggregates(inst))
    D, parts = layers
    if label.restricted:
        nr = ni = 0
        for j, (kr, ki) in enumerate(parts):
            w = falling_factorial(N, d - j) * falling_factorial(R, j)
            nr += kr * w
            ni += ki * w
    else:
        (nr, ni), = parts
    nr += D * _bump(mutation, f"{label.value}.literal")
    if isinstance(lead, Fraction):
        return G.from_parts(nr * lead.numerator, ni * lead.numerator, D * den * lead.denominator)
    return G.from_parts(nr * lead, ni * lead, D * den)


def rhs_unrestricted(label: IdentityLabel, inst: ProblemInstance, mutation: Optional[str] = None,
                     agg: Optional[Aggregates] = None, check: bool = True,
                     layers: Optional[tuple] = None) -> GaussianRational:
    """Unrestricted right side: printed form when A0-C0 >= degree, else per-coordinate moments."""
    if label.restricted:
        raise ValueError(f"{label.value} is not an unrestricted identity")
    if check:
        require_valid(inst, label)
    if inst.is_zero_instance:
        return G.ZERO
    if inst.A0 - inst.C0 >= label.degree:
        return rhs_literal(label, inst, mutation, agg, check=False, layers=layers)
    return rhs_by_moments(label, inst, mutation, check=False)


# --------------------------------------------------------------------------
# moment decomposition

def _add(terms: dict, key: tuple, coeff) -> None:
    if coeff:
        terms[key] = terms[key] + coeff if key in terms else coeff


def _single(x, power: int) -> dict:
    terms = {}
    for p, xp in enumerate(x):
        _add(terms, ((p, power),), xp)
    return terms


def _pairs(x, y) -> dict:
    """(sum x k)(sum y k) = sum_{p!=q} x_p y_q k_p k_q + sum_p x_p y_p k_p^2."""
    terms = {}
    m = len(x)
    for p in range(m):
        _add(terms, ((p, 2),), x[p] * y[p])
        for q in range(p + 1, m):
            _add(terms, ((p, 1), (q, 1)), x[p] * y[q] + x[q] * y[p])
    return terms


def _triples(x, y, z) -> dict:
    """Triple product split over mutually unequal indices."""
    terms = {}
    m = len(x)
    for p, q, r in permutations(range(m), 3):
        _add(terms, tuple(sorted(((p, 1), (q, 1), (r, 1)))), x[p] * y[q] * z[r])
    for p, q in permutations(range(m), 2):
        key = tuple(sorted(((p, 1), (q, 2))))
        _add(terms, key, x[p] * y[q] * z[q] + y[p] * x[q] * z[q] + z[p] * x[q] * y[q])
    for p in range(m):
        _add(terms, ((p, 3),), x[p] * y[p] * z[p])
    return terms


def moment_expansion(form: int, x: tuple, y: Optional[tuple] = None) -> dict:
    """Weight of a form written as ``{moment exponents: coefficient}``.

    Keys are sorted ``((index, power), ...)`` tuples with 0-based indices; the empty
    key is the plain binomial sum.
    """
    if form == 1:
        return {(): G.ONE}
    if form == 2:
        return _single(x, 1)
    if form == 3:
        return _pairs(x, x)
    if form == 4:
        return _pairs(x, tuple(conj(v) for v in x))
    if form == 5:
        return _pairs(x, y)
    if form == 6:
        return _single(x, 2)
    if form == 7:
        return _triples(x, x, x)
    return _single(x, 3)


@lru_cache(maxsize=4096)
def _functional(form: int, x: tuple, y: Optional[tuple]) -> tuple:
    terms = moment_expansion(form, x, y)
    D, parts = common_denominator(terms.values())
    return D, tuple((key, nr, ni) for key, (nr, ni) in zip(terms, parts) if nr or ni)


def rhs_by_moments(label: IdentityLabel, inst: ProblemInstance,
                   mutation: Optional[str] = None, check: bool = True) -> GaussianRational:
    """Right side assembled from moment closed forms; total on every valid instance."""
    if check:
        require_valid(inst, label)
    if inst.is_zero_instance:
        return G.ZERO
    D, terms = _functional(label.form, inst.x, inst.y if label.form == 5 else None)
    a, c = inst.a, inst.c
    nr = ni = 0
    if label.restricted:
        n = inst.n
        for key, cr, ci in terms:
            v = _restricted_value(a, c, n, key, mutation)
            if v:
                nr += cr * v
                ni += ci * v
        return G.from_parts(nr, ni, D)
    for key, cr, ci in terms:
        v = _unrestricted_value(a, c, key, mutation)
        if v:
            nr += cr * v
            ni += ci * v
    return G(Fraction(nr) / D, Fraction(ni) / D)


def rhs_abs_squared(label: IdentityLabel, inst: ProblemInstance,
                    mutation: Optional[str] = None) -> GaussianRational:
    """|sum x k|^2 as (sum Re(x) k)^2 + (sum Im(x) k)^2, each by the square identity."""
    if label.form != 4:
        raise ValueError(f"{label.value} is not an absolute-square identity")
    require_valid(inst, label)
    square = IdentityLabel.R3 if label.restricted else IdentityLabel.U3
    re_part = inst.with_weights([G.coerce(v.re) for v in inst.x], inst.y)
    im_part = inst.with_weights([G.coerce(v.im) for v in inst.x], inst.y)
    return rhs_by_moments(square, re_part, mutation) + rhs_by_moments(square, im_part, mutation)


def rhs(label: IdentityLabel, inst: ProblemInstance, strategy: RhsStrategy = RhsStrategy.MOMENTS,
        mutation: Optional[str] = None) -> GaussianRational:
    if strategy is RhsStrategy.LITERAL:
        if label.restricted:
            return rhs_literal(label, inst, mutation)
        return rhs_unrestricted(label, inst, mutation)
    return rhs_by_moments(label, inst, mutation)
