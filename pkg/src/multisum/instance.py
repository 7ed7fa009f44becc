"""Problem instances, aggregate statistics, label catalogs and seeded generation."""

from __future__ import annotations

import enum
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import permutations
from typing import Optional, Sequence

from .exact import GaussianRational, abs_squared, gaussian_from_json, gaussian_to_json

G = GaussianRational


class IdentityLabel(enum.Enum):
    """The sixteen identities; ``R*`` restricted to sum n, ``U*`` over the full box."""

    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"
    R6 = "R6"
    R7 = "R7"
    R8 = "R8"
    U1 = "U1"
    U2 = "U2"
    U3 = "U3"
    U4 = "U4"
    U5 = "U5"
    U6 = "U6"
    U7 = "U7"
    U8 = "U8"

    # plain attributes set below; enum value lookups are slow in hot loops
    restricted: bool
    form: int  # weight-form number 1..8, shared between R_j and U_j
    degree: int
    needs_y: bool

    @property
    def weight_form(self) -> str:
        return _WEIGHT_FORMS[self.form]

    def partner(self) -> "IdentityLabel":
        """R_j <-> U_j."""
        return IdentityLabel(("U" if self.restricted else "R") + self.value[1])

    @classmethod
    def parse(cls, text: str) -> "IdentityLabel":
        try:
            return cls(text.strip().upper())
        except ValueError:
            raise ValueError(f"unknown identity label {text!r}") from None


_DEGREE = {1: 0, 2: 1, 3: 2, 4: 2, 5: 2, 6: 2, 7: 3, 8: 3}
_WEIGHT_FORMS = {
    1: "1",
    2: "sum x_i k_i",
    3: "(sum x_i k_i)^2",
    4: "|sum x_i k_i|^2",
    5: "(sum x_i k_i)(sum y_i k_i)",
    6: "sum x_i k_i^2",
    7: "(sum x_i k_i)^3",
    8: "sum x_i k_i^3",
}

for _lab in IdentityLabel:
    _lab.restricted = _lab._value_[0] == "R"
    _lab.form = int(_lab._value_[1])
    _lab.degree = _DEGREE[_lab.form]
    _lab.needs_y = _lab.form == 5
del _lab

RESTRICTED_LABELS = tuple(lab for lab in IdentityLabel if lab.restricted)
UNRESTRICTED_LABELS = tuple(lab for lab in IdentityLabel if not lab.restricted)


# exponent pattern of each moment kind, assigned to indices in order
MOMENT_EXPONENTS = {
    "1": (1,),
    "2": (2,),
    "3": (3,),
    "11": (1, 1),
    "12": (1, 2),
    "111": (1, 1, 1),
}


@dataclass(frozen=True)
class MomentLabel:
    """k_p^e1 k_q^e2 ... with 1-based, mutually distinct indices.

    ``kind`` is one of ``"1", "2", "3", "11", "12", "111"``; for ``"12"`` the
    first index carries the first power and the second index the square.
    """

    kind: str
    indices: tuple
    restricted: bool = True

    def __post_init__(self):
        if self.kind not in MOMENT_EXPONENTS:
            raise ValueError(f"unknown moment kind {self.kind!r}")
        if len(self.indices) != len(MOMENT_EXPONENTS[self.kind]):
            raise ValueError(f"moment {self.kind} takes {len(MOMENT_EXPONENTS[self.kind])} indices")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError(f"moment indices must be distinct, got {self.indices}")

    @property
    def name(self) -> str:
        return ("M" if self.restricted else "N") + self.kind

    @property
    def exponents(self) -> dict:
        """index -> power."""
        return dict(zip(self.indices, MOMENT_EXPONENTS[self.kind]))

    def check(self, m: int) -> None:
        for i in self.indices:
            if not 1 <= i <= m:
                raise ValueError(f"moment index {i} outside 1..{m}")

    @classmethod
    def all_for(cls, kind: str, m: int, restricted: bool = True):
        """Every ordered choice of distinct indices in 1..m."""
        width = len(MOMENT_EXPONENTS[kind])
        return [cls(kind, idx, restricted) for idx in permutations(range(1, m + 1), width)]


@dataclass(frozen=True)
class ProblemInstance:
    m: int
    a: tuple
    c: tuple
    x: tuple
    n: Optional[int] = None
    y: Optional[tuple] = None

    @classmethod
    def build(cls, a, c, x=None, n=None, y=None) -> "ProblemInstance":
        """Convenience constructor; ``x`` defaults to all ones and scalars are coerced."""
        a = tuple(int(v) for v in a)
        c = tuple(int(v) for v in c)
        m = len(a)
        x = tuple(G.coerce(v) for v in (x if x is not None else [1] * m))
        if y is not None:
            y = tuple(G.coerce(v) for v in y)
        return cls(m=m, a=a, c=c, x=x, n=n, y=y)

    def with_n(self, n: Optional[int]) -> "ProblemInstance":
        return ProblemInstance(self.m, self.a, self.c, self.x, n, self.y)

    def with_weights(self, x, y=None) -> "ProblemInstance":
        return ProblemInstance(self.m, self.a, self.c, tuple(x), self.n,
                               None if y is None else tuple(y))

    @cached_property
    def is_zero_instance(self) -> bool:
        return any(ci > ai for ai, ci in zip(self.a, self.c))

    @cached_property
    def A0(self) -> int:
        return sum(self.a)

    @cached_property
    def C0(self) -> int:
        return sum(self.c)

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        doc = {"m": self.m}
        if self.n is not None:
            doc["n"] = self.n
        doc["a"] = list(self.a)
        doc["c"] = list(self.c)
        doc["x"] = [gaussian_to_json(v) for v in self.x]
        if self.y is not None:
            doc["y"] = [gaussian_to_json(v) for v in self.y]
        return doc

    @classmethod
    def from_json(cls, doc) -> "ProblemInstance":
        """Parse an instance document.  Raises :class:`InstanceFormatError` naming the field."""
        if not isinstance(doc, dict):
            raise InstanceFormatError("<root>", "instance must be an object")
        unknown = set(doc) - {"m", "n", "a", "c", "x", "y"}
        if unknown:
            raise InstanceFormatError(sorted(unknown)[0], "unknown field")
        for key in ("m", "a", "c", "x"):
            if key not in doc:
                raise InstanceFormatError(key, "missing required field")
        m = _int_field(doc["m"], "m")
        n = None if doc.get("n") is None else _int_field(doc["n"], "n")
        a = _int_list(doc["a"], "a")
        c = _int_list(doc["c"], "c")
        x = _gauss_list(doc["x"], "x")
        y = None if doc.get("y") is None else _gauss_list(doc["y"], "y")
        return cls(m=m, a=a, c=c, x=x, n=n, y=y)


class InstanceFormatError(ValueError):
    def __init__(self, field_name: str, message: str, line: Optional[int] = None):
        self.field = field_name
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}field {field_name!r}: {message}")


def _int_field(v, name):
    if isinstance(v, bool) or not isinstance(v, int):
        raise InstanceFormatError(name, f"expected integer, got {v!r}")
    return v


def _int_list(v, name):
    if not isinstance(v, list):
        raise InstanceFormatError(name, "expected a list of integers")
    return tuple(_int_field(item, f"{name}[{i}]") for i, item in enumerate(v))


def _gauss_list(v, name):
    if not isinstance(v, list):
        raise InstanceFormatError(name, "expected a list of scalars")
    out = []
    for i, item in enumerate(v):
        try:
            out.append(gaussian_from_json(item))
        except (ValueError, TypeError) as exc:
            raise InstanceFormatError(f"{name}[{i}]", str(exc)) from None
    return tuple(out)


def load_instance(path) -> ProblemInstance:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError("<json>", exc.msg, line=exc.lineno) from None
    try:
        return ProblemInstance.from_json(doc)
    except InstanceFormatError as exc:
        line = _find_line(text, exc.field.split("[")[0])
        raise InstanceFormatError(exc.field, str(exc).split(": ", 1)[1], line=line) from None


def _find_line(text: str, key: str) -> Optional[int]:
    needle = f'"{key}"'
    for lineno, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return lineno
    return None


def dump_instance(inst: ProblemInstance, path) -> None:
    with open(path, "w") as fh:
        json.dump(inst.to_json(), fh, indent=2)
        fh.write("\n")


# -- validation --------------------------------------------------------------

@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    zero_instance: bool = False

    @property
    def ok(self) -> bool:
        return not self.errors


class StructuralError(ValueError):
    pass


def validate(inst: ProblemInstance, label: Optional[IdentityLabel] = None) -> ValidationReport:
    """Structural checks.  ``c_i > a_i`` is flagged as a zero-instance, not rejected."""
    rep = ValidationReport()
    if inst.m < 1:
        rep.errors.append(f"m must be >= 1, got {inst.m}")
    for name in ("a", "c", "x"):
        if len(getattr(inst, name)) != inst.m:
            rep.errors.append(f"len({name}) = {len(getattr(inst, name))} != m = {inst.m}")
    if inst.y is not None and len(inst.y) != inst.m:
        rep.errors.append(f"len(y) = {len(inst.y)} != m = {inst.m}")
    for name in ("a", "c"):
        for i, v in enumerate(getattr(inst, name)):
            if v < 0:
                rep.errors.append(f"{name}[{i}] = {v} is negative")
    if inst.n is not None and inst.n < 0:
        rep.errors.append(f"n = {inst.n} is negative")
    if label is not None:
        if label.needs_y and inst.y is None:
            rep.errors.append(f"{label.value} requires y")
        if label.restricted and inst.n is None:
            rep.errors.append(f"{label.value} requires n")
    rep.zero_instance = any(ci > ai for ai, ci in zip(inst.a, inst.c))
    return rep


def require_valid(inst: ProblemInstance, label: Optional[IdentityLabel] = None) -> None:
    rep = validate(inst, label)
    if not rep.ok:
        raise StructuralError("; ".join(rep.errors))


# -- aggregates --------------------------------------------------------------

@dataclass(frozen=True)
class Aggregates:
    """Aggregate sums of an instance, p, q in 0..3.

    ``A[p, q] = sum x^p a^q``, ``Astar[p, q] = sum x^p y^q a`` and likewise for ``C``;
    ``S[p, q] = sum x a^p c^q`` for (1,1), (1,2), (2,1).  Starred tables are ``None``
    when the instance has no ``y``.
    """

    A: dict
    C: dict
    S: dict
    Aabs: Fraction
    Cabs: Fraction
    Astar: Optional[dict] = None
    Cstar: Optional[dict] = None

    def A_p(self, p: int) -> GaussianRational:
        return self.A[p, 1]

    def C_p(self, p: int) -> GaussianRational:
        return self.C[p, 1]

    def Astar_p(self, p: int) -> GaussianRational:
        return self._star(self.Astar)[0, p]

    def Cstar_p(self, p: int) -> GaussianRational:
        return self._star(self.Cstar)[0, p]

    @staticmethod
    def _star(table):
        if table is None:
            raise StructuralError("starred aggregates need y")
        return table

    def to_json(self) -> dict:
        doc = {
            "A": {f"{p},{q}": gaussian_to_json(v) for (p, q), v in sorted(self.A.items())},
            "C": {f"{p},{q}": gaussian_to_json(v) for (p, q), v in sorted(self.C.items())},
            "S": {f"{p},{q}": gaussian_to_json(v) for (p, q), v in sorted(self.S.items())},
            "Aabs": gaussian_to_json(self.Aabs),
            "Cabs": gaussian_to_json(self.Cabs),
        }
        if self.Astar is not None:
            doc["Astar"] = {f"{p},{q}": gaussian_to_json(v) for (p, q), v in sorted(self.Astar.items())}
            doc["Cstar"] = {f"{p},{q}": gaussian_to_json(v) for (p, q), v in sorted(self.Cstar.items())}
        return doc


def _powers(z: GaussianRational, top: int = 3):
    out = [G.ONE]
    for _ in range(top):
        out.append(out[-1] * z)
    return out


def compute_aggregates(inst: ProblemInstance) -> Aggregates:
    xp = [_powers(x) for x in inst.x]
    rng = range(4)
    zero = G.ZERO

    def table(ints):
        out = {}
        for p in rng:
            for q in rng:
                s = zero
                for i, v in enumerate(ints):
                    if v:
                        s = s + xp[i][p] * v ** q
                    elif q == 0:
                        s = s + xp[i][p]
                out[p, q] = s
        return out

    A = table(inst.a)
    C = table(inst.c)
    S = {}
    for p, q in ((1, 1), (1, 2), (2, 1)):
        s = zero
        for i in range(inst.m):
            s = s + inst.x[i] * (inst.a[i] ** p * inst.c[i] ** q)
        S[p, q] = s
    Aabs = sum((abs_squared(x) * a for x, a in zip(inst.x, inst.a)), Fraction(0))
    Cabs = sum((abs_squared(x) * c for x, c in zip(inst.x, inst.c)), Fraction(0))
    Astar = Cstar = None
    if inst.y is not None:
        yp = [_powers(y) for y in inst.y]

        def star(ints):
            return {(p, q): sum((xp[i][p] * yp[i][q] * ints[i] for i in range(inst.m)), zero)
                    for p in rng for q in rng}

        Astar = star(inst.a)
        Cstar = star(inst.c)
    return Aggregates(A=A, C=C, S=S, Aabs=Aabs, Cabs=Cabs, Astar=Astar, Cstar=Cstar)


# -- random generation -------------------------------------------------------

@dataclass(frozen=True)
class Bounds:
    m_max: int = 3
    a_max: int = 4
    weight_kind: str = "gaussian"  # or "rational"

    def __post_init__(self):
        if self.m_max < 1:
            raise ValueError("m_max must be >= 1")
        if self.a_max < 0:
            raise ValueError("a_max must be >= 0")
        if self.weight_kind not in ("gaussian", "rational"):
            raise ValueError(f"weight_kind must be 'gaussian' or 'rational', got {self.weight_kind!r}")


def draw_weight(rng: random.Random, kind: str) -> GaussianRational:
    """Components p/q with p in [-4, 4], q in [1, 4]; real part drawn first."""
    re = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
    if kind == "rational":
        return G.coerce(re)
    im = Fraction(rng.randint(-4, 4), rng.randint(1, 4))
    return G(re, im)


def draw_weights(rng: random.Random, m: int, kind: str) -> tuple:
    return tuple(draw_weight(rng, kind) for _ in range(m))


def child_rng(seed: int, *key) -> random.Random:
    """Deterministic stream for (seed, key...); string seeding hashes with SHA-512."""
    return random.Random(":".join(str(k) for k in (seed,) + key))


def random_instance(seed: int, bounds: Bounds = Bounds()) -> ProblemInstance:
    """Draw order: m, a_1..a_m, c_1..c_m, n, x_1..x_m, y_1..y_m.

    ``c_i`` is ``a_i + 1`` with probability 1/8 (a zero-instance), otherwise uniform
    in ``[0, a_i]``; ``n`` is uniform in ``[0, sum(a) + 1]``.
    """
    rng = child_rng(seed, "instance")
    m = rng.randint(1, bounds.m_max)
    a = tuple(rng.randint(0, bounds.a_max) for _ in range(m))
    c = tuple(ai + 1 if rng.randrange(8) == 0 else rng.randint(0, ai) for ai in a)
    n = rng.randint(0, sum(a) + 1)
    x = draw_weights(rng, m, bounds.weight_kind)
    y = draw_weights(rng, m, bounds.weight_kind)
    return ProblemInstance(m=m, a=a, c=c, x=x, n=n, y=y)


def permute(inst: ProblemInstance, perm: Sequence[int]) -> ProblemInstance:
    """Simultaneously reorder (a_i, c_i, x_i, y_i); ``perm`` is 0-based."""
    pick = lambda seq: None if seq is None else tuple(seq[j] for j in perm)  # noqa: E731
    return ProblemInstance(inst.m, pick(inst.a), pick(inst.c), pick(inst.x), inst.n, pick(inst.y))
