"""Ground truth by direct enumeration of the summation domains.

Nothing in here knows a closed form: the left sides are summed term by term over
capped compositions (restricted identities) or the full box (unrestricted ones).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

from .exact import GaussianRational, PascalTable, abs_squared, common_denominator
from .instance import IdentityLabel, MomentLabel, ProblemInstance, StructuralError, require_valid

G = GaussianRational


class CompositionCursor:
    """Capped compositions of ``n`` in lexicographic order.

    A prefix is abandoned as soon as the remaining target exceeds what the
    remaining caps can absorb, so the walk never visits dead branches.
    """

    def __init__(self, n: int, caps: Sequence[int]):
        if n < 0:
            raise ValueError("n must be nonnegative")
        self.n = n
        self.caps = tuple(caps)
        # tail[i] = sum(caps[i:])
        tail = [0] * (len(self.caps) + 1)
        for i in range(len(self.caps) - 1, -1, -1):
            tail[i] = tail[i + 1] + self.caps[i]
        self._tail = tail

    def __iter__(self) -> Iterator[tuple]:
        m = len(self.caps)
        if m == 0:
            if self.n == 0:
                yield ()
            return
        if self.n > self._tail[0]:
            return
        caps, tail = self.caps, self._tail
        k = [0] * m

        def rec(i: int, remaining: int):
            if i == m - 1:
                k[i] = remaining
                yield tuple(k)
                return
            lo = max(0, remaining - tail[i + 1])
            hi = min(caps[i], remaining)
            for v in range(lo, hi + 1):
                k[i] = v
                yield from rec(i + 1, remaining - v)

        yield from rec(0, self.n)


class BoxCursor:
    """All tuples 0 <= k_i <= caps_i, lexicographically."""

    def __init__(self, caps: Sequence[int]):
        self.caps = tuple(caps)

    def __iter__(self) -> Iterator[tuple]:
        return product(*(range(cap + 1) for cap in self.caps))

    def __len__(self) -> int:
        out = 1
        for cap in self.caps:
            out *= cap + 1
        return out


def enumerate_compositions(n: int, caps: Sequence[int]) -> Iterator[tuple]:
    return iter(CompositionCursor(n, caps))


def enumerate_box(caps: Sequence[int]) -> Iterator[tuple]:
    return iter(BoxCursor(caps))


@lru_cache(maxsize=None)
def binomial_terms(a: tuple, c: tuple, n) -> tuple:
    """Nonzero ``(k, prod_i C(a_i,k_i) C(k_i,c_i))`` pairs over the domain.

    ``n=None`` selects the unrestricted box.  Depends on no weights, so it is
    shared by every label and every weight vector of a grid point.
    """
    table = PascalTable(max(a, default=0))
    domain = BoxCursor(a) if n is None else CompositionCursor(n, a)
    out = []
    for k in domain:
        coef = 1
        for ai, ki, ci in zip(a, k, c):
            coef *= table(ai, ki) * table(ki, ci)
            if not coef:
                break
        if coef:
            out.append((k, coef))
    return tuple(out)


def _linear(w: Sequence[GaussianRational], k: tuple, power: int = 1) -> GaussianRational:
    s = G.ZERO
    for wi, ki in zip(w, k):
        if ki:
            s = s + wi * (ki ** power)
    return s


def evaluate_weight(label: IdentityLabel, k: tuple, inst: ProblemInstance) -> GaussianRational:
    """The label's polynomial weight at index tuple ``k``."""
    if len(k) != inst.m:
        raise ValueError(f"tuple length {len(k)} != m = {inst.m}")
    form = label.form
    if form == 1:
        return G.ONE
    if form == 5:
        if inst.y is None:
            raise StructuralError(f"{label.value} requires y")
        return _linear(inst.x, k) * _linear(inst.y, k)
    if form == 6:
        return _linear(inst.x, k, 2)
    if form == 8:
        return _linear(inst.x, k, 3)
    s = _linear(inst.x, k)
    if form == 2:
        return s
    if form == 3:
        return s * s
    if form == 4:
        return G.coerce(abs_squared(s))
    return s * s * s


def brute_force_lhs(label: IdentityLabel, inst: ProblemInstance) -> GaussianRational:
    """Left side of the identity by summing every term of its domain."""
    require_valid(inst, label)
    n = inst.n if label.restricted else None
    total = G.ZERO
    for k, coef in binomial_terms(inst.a, inst.c, n):
        total = total + evaluate_weight(label, k, inst) * coef
    return total


def brute_force_lhs_many(labels: Sequence[IdentityLabel], inst: ProblemInstance,
                         check: bool = True) -> dict:
    """Same as :func:`brute_force_lhs` for several labels sharing one domain.

    Weights are put over a common denominator D so each term is accumulated in
    plain integers: with s = sum x_i k_i = (sr + i si)/D, the square is
    (sr^2 - si^2 + 2i sr si)/D^2 and so on.  Each total is normalized once.
    All labels must be restricted or all unrestricted.
    """
    if not labels:
        return {}
    restricted = labels[0].restricted
    if any(lab.restricted != restricted for lab in labels):
        raise ValueError("labels must share the summation domain")
    if check:
        for lab in labels:
            require_valid(inst, lab)
    forms = {lab.form for lab in labels}
    D, xs = common_denominator(inst.x)
    xr = [p[0] for p in xs]
    xi = [p[1] for p in xs]
    if 5 in forms:
        Dy, ys = common_denominator(inst.y)
        yr = [p[0] for p in ys]
        yi = [p[1] for p in ys]
    m = inst.m
    idx = range(m)
    need_s = bool(forms & {2, 3, 4, 5, 7})
    t1 = 0
    t2r = t2i = t3r = t3i = t4 = t5r = t5i = t6r = t6i = t7r = t7i = t8r = t8i = 0
    for k, coef in binomial_terms(inst.a, inst.c, inst.n if restricted else None):
        t1 += coef
        if need_s:
            sr = si = 0
            for i in idx:
                ki = k[i]
                if ki:
                    sr += xr[i] * ki
                    si += xi[i] * ki
            t2r += coef * sr
            t2i += coef * si
            qr = sr * sr - si * si
            qi = 2 * sr * si
            t3r += coef * qr
            t3i += coef * qi
            t4 += coef * (sr * sr + si * si)
            t7r += coef * (qr * sr - qi * si)
            t7i += coef * (qr * si + qi * sr)
            if 5 in forms:
                ur = ui = 0
                for i in idx:
                    ki = k[i]
                    if ki:
                        ur += yr[i] * ki
                        ui += yi[i] * ki
                t5r += coef * (sr * ur - si * ui)
                t5i += coef * (sr * ui + si * ur)
        if 6 in forms or 8 in forms:
            for i in idx:
                ki = k[i]
                if ki:
                    k2 = ki * ki * coef
                    t6r += xr[i] * k2
                    t6i += xi[i] * k2
                    t8r += xr[i] * k2 * ki
                    t8i += xi[i] * k2 * ki
    make = G.from_parts
    totals = {1: G.coerce(t1), 2: make(t2r, t2i, D), 3: make(t3r, t3i, D * D),
              4: make(t4, 0, D * D), 6: make(t6r, t6i, D), 7: make(t7r, t7i, D ** 3),
              8: make(t8r, t8i, D)}
    if 5 in forms:
        totals[5] = make(t5r, t5i, D * Dy)
    return {lab: totals[lab.form] for lab in labels}


def brute_force_moment(label: MomentLabel, inst: ProblemInstance) -> int:
    """Sum of the binomial products against the monomial k_p^e ... over the domain."""
    label.check(inst.m)
    if label.restricted and inst.n is None:
        raise StructuralError("restricted moment needs n")
    powers = [(i - 1, e) for i, e in label.exponents.items()]
    total = 0
    for k, coef in binomial_terms(inst.a, inst.c, inst.n if label.restricted else None):
        mono = coef
        for i, e in powers:
            mono *= k[i] ** e
        total += mono
    return total
