"""2x2 matrices over a quadratic tower and the three matrix families.

MK:  [[a, u^-1 (ad - 1)], [u, d]]           u a unit
NK:  commutator of [[a, u^-1(a-1)], [u, 1]] with diag(v, 1/v)
LK:  commutator of [[a, b], [c, d]] with diag(i, -i)
"""

from __future__ import annotations

from typing import Iterator, NamedTuple

from .exactalg import (
    FieldElem,
    FieldTower,
    QQ,
    TowerMismatch,
    common_tower,
    elem_from_json,
    elem_to_json,
    embed_prefix,
    golden,
    is_algebraic_integer,
    is_root_of_unity,
    is_unit,
    sqrt_in_tower,
    unit_exponents,
    with_sqrt,
)


class SingularMatrix(ArithmeticError):
    pass


class FamilyError(ValueError):
    pass


class NotAUnit(FamilyError):
    pass


class NotIntegral(FamilyError):
    pass


class RootOfUnityV(FamilyError):
    pass


class MissingI(FamilyError):
    pass


class DeterminantNotOne(FamilyError):
    pass


class ZeroCD(FamilyError):
    pass


def _coerce_all(values) -> tuple[FieldTower, list[FieldElem]]:
    elems = [v for v in values if isinstance(v, FieldElem)]
    tower = QQ
    for e in elems:
        if e.tower is tower or e.tower.is_prefix_of(tower):
            continue
        if tower.is_prefix_of(e.tower):
            tower = e.tower
        else:
            raise TowerMismatch(f"{tower!r} and {e.tower!r} are not nested")
    return tower, [tower(v) for v in values]


class Mat2:
    """Row-major [[a, b], [c, d]] with entries in a single tower."""

    __slots__ = ("a", "b", "c", "d", "tower")

    def __init__(self, a, b, c, d):
        tower, (a, b, c, d) = _coerce_all((a, b, c, d))
        self.a, self.b, self.c, self.d = a, b, c, d
        self.tower = tower

    @classmethod
    def identity(cls, tower: FieldTower = QQ) -> "Mat2":
        return cls(tower(1), tower(0), tower(0), tower(1))

    @classmethod
    def diag(cls, x, y) -> "Mat2":
        tower, (x, y) = _coerce_all((x, y))
        return cls(x, tower(0), tower(0), y)

    def entries(self) -> tuple[FieldElem, FieldElem, FieldElem, FieldElem]:
        return (self.a, self.b, self.c, self.d)

    def in_tower(self, tower: FieldTower) -> "Mat2":
        if tower is self.tower:
            return self
        return Mat2(*(embed_prefix(e, tower) for e in self.entries()))

    def map(self, f) -> "Mat2":
        return Mat2(*(f(e) for e in self.entries()))

    def __mul__(self, other):
        if isinstance(other, Mat2):
            a, b, c, d = self.entries()
            e, f, g, h = other.entries()
            return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
        return Mat2(*(x * other for x in self.entries()))

    def __rmul__(self, scalar):
        return Mat2(*(scalar * x for x in self.entries()))

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x + y for x, y in zip(self.entries(), other.entries())))

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x - y for x, y in zip(self.entries(), other.entries())))

    def det(self) -> FieldElem:
        return self.a * self.d - self.b * self.c

    def trace(self) -> FieldElem:
        return self.a + self.d

    def inverse(self) -> "Mat2":
        det = self.det()
        if det.is_zero():
            raise SingularMatrix("matrix is singular")
        if det == 1:
            return Mat2(self.d, -self.b, -self.c, self.a)
        k = det.inverse()
        return Mat2(self.d * k, -self.b * k, -self.c * k, self.a * k)

    def __pow__(self, n: int) -> "Mat2":
        base = self if n >= 0 else self.inverse()
        result = Mat2.identity(self.tower)
        for _ in range(abs(n)):
            result = result * base
        return result

    def is_identity(self) -> bool:
        return self.a == 1 and self.d == 1 and self.b.is_zero() and self.c.is_zero()

    def is_minus_identity(self) -> bool:
        return self.a == -1 and self.d == -1 and self.b.is_zero() and self.c.is_zero()

    def is_scalar(self) -> bool:
        return self.b.is_zero() and self.c.is_zero() and self.a == self.d

    def is_integral(self) -> bool:
        return all(is_algebraic_integer(e) for e in self.entries())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return all(x == y for x, y in zip(self.entries(), other.entries()))

    def __hash__(self) -> int:
        return hash(self.entries())

    def __repr__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def commutator(x: Mat2, y: Mat2) -> Mat2:
    return x * y * x.inverse() * y.inverse()


def mat_arith(op: str, x: Mat2, y: Mat2 | None = None):
    if op == "mul":
        return x * y
    if op == "inverse":
        return x.inverse()
    if op == "det":
        return x.det()
    if op == "trace":
        return x.trace()
    if op == "commutator":
        return commutator(x, y)
    raise ValueError(f"unknown operation {op!r}")


def unify(*mats: Mat2) -> list[Mat2]:
    """Bring matrices into one tower, merging non-nested towers if needed."""
    tower = mats[0].tower
    for m in mats[1:]:
        if m.tower is tower or m.tower.is_prefix_of(tower):
            continue
        if tower.is_prefix_of(m.tower):
            tower = m.tower
            continue
        tower, _, _ = common_tower(tower, m.tower)
    out = []
    for m in mats:
        if m.tower.is_prefix_of(tower):
            out.append(m.in_tower(tower))
        else:
            _, _, emb = common_tower(tower, m.tower)
            out.append(m.map(emb))
    return out


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

class FamilyParams(NamedTuple):
    family: str
    params: tuple


def _require_unit(x: FieldElem, what: str) -> None:
    if not is_unit(x):
        raise NotAUnit(f"{what} = {x} is not a unit")


def _require_integral(x: FieldElem, what: str) -> None:
    if not is_algebraic_integer(x):
        raise NotIntegral(f"{what} = {x} is not integral")


def make_MK(a, d, u, check: bool = True) -> Mat2:
    tower, (a, d, u) = _coerce_all((a, d, u))
    if check:
        _require_unit(u, "u")
        _require_integral(a, "a")
        _require_integral(d, "d")
    return Mat2(a, (a * d - 1) / u, u, d)


def _check_nk(a: FieldElem, u: FieldElem, v: FieldElem) -> None:
    _require_unit(u, "u")
    _require_unit(v, "v")
    if is_root_of_unity(v):
        raise RootOfUnityV(f"v = {v} is a root of unity")
    _require_unit(v - v.inverse(), "v - 1/v")
    _require_integral(a, "a")


def make_NK(a, u, v, check: bool = True) -> Mat2:
    tower, (a, u, v) = _coerce_all((a, u, v))
    if check:
        _check_nk(a, u, v)
    v2 = v * v
    w2 = v2.inverse()
    return Mat2(
        a * (1 - w2) + w2,
        a * (a - 1) * (1 - v2) / u,
        u * (1 - w2),
        a * (1 - v2) + v2,
    )


def nk_trace(a, u, v) -> FieldElem:
    """-a (v - 1/v)^2 + v^2 + 1/v^2."""
    tower, (a, u, v) = _coerce_all((a, u, v))
    w = v.inverse()
    return -a * (v - w) * (v - w) + v * v + w * w


def solve_NK_for_trace(k, u=None, v=None, check: bool = True) -> Mat2:
    """The NK member with trace ``k``; defaults u = 1 and v golden."""
    if v is None:
        kk = k if isinstance(k, FieldElem) else QQ(k)
        v = golden(with_sqrt(kk.tower, 5))
    if u is None:
        u = 1
    tower, (k, u, v) = _coerce_all((k, u, v))
    if check:
        _require_integral(k, "k")
    w = v.inverse()
    gap = (v - w) * (v - w)
    a = (v * v + w * w - k) / gap
    return make_NK(a, u, v, check=check)


def lk_has_i(tower: FieldTower) -> bool:
    return sqrt_in_tower(tower(-1)) is not None


def make_LK(a, b, c, d, check: bool = True) -> Mat2:
    tower, (a, b, c, d) = _coerce_all((a, b, c, d))
    if check:
        if not lk_has_i(tower):
            raise MissingI("tower must contain sqrt(-1)")
        if (a * d - b * c) != 1:
            raise DeterminantNotOne("ad - bc must be 1")
        if (c * d).is_zero():
            raise ZeroCD("c*d must be nonzero")
        for name, x in zip("abcd", (a, b, c, d)):
            _require_integral(x, name)
    e = a * d + b * c
    return Mat2(e, 2 * a * b, 2 * c * d, e)


# --------------------------------------------------------------------------
# membership
# --------------------------------------------------------------------------

class Membership(NamedTuple):
    member: bool
    params: tuple | None = None

    def __bool__(self) -> bool:
        return self.member


def unit_candidates(tower: FieldTower, budget: int = 64) -> Iterator[FieldElem]:
    """Signed powers of the visible fundamental-unit candidates, in a fixed order.

    The candidates are (1+sqrt5)/2 and 1+sqrt2 when the tower contains those
    roots; with neither present only +-1 are produced.
    """
    bases = []
    s5 = sqrt_in_tower(tower(5))
    if s5 is not None:
        bases.append((s5 + 1) / 2)
    s2 = sqrt_in_tower(tower(2))
    if s2 is not None:
        bases.append(s2 + 1)
    produced = 0
    seen = set()
    for e in unit_exponents():
        if produced >= budget or (e != 0 and not bases):
            return
        powers = [tower(1)] if e == 0 else [b**e for b in bases]
        for p in powers:
            for cand in (p, -p):
                key = cand.coeffs
                if key in seen:
                    continue
                seen.add(key)
                produced += 1
                yield cand


def _membership_MK(m: Mat2) -> Membership:
    if m.det() != 1 or not m.is_integral() or not is_unit(m.c):
        return Membership(False)
    return Membership(True, (m.a, m.d, m.c))


def _valid_nk(a, u, v) -> bool:
    try:
        _check_nk(a, u, v)
    except FamilyError:
        return False
    return True


def _membership_NK(m: Mat2, budget: int) -> Membership:
    if m.det() != 1:
        return Membership(False)
    tower = m.tower
    if m.a != 1:
        ratio = (m.d - 1) / (1 - m.a)
        root = sqrt_in_tower(ratio)
        vs = [] if root is None or root.is_zero() else [root, -root]
    else:
        vs = list(unit_candidates(tower, budget))
    for v in vs:
        w2 = (v * v).inverse()
        if w2 == 1:
            continue
        a = tower(1) if m.a == 1 else (m.a - w2) / (1 - w2)
        u = m.c / (1 - w2)
        if u.is_zero() or not _valid_nk(a, u, v):
            continue
        if make_NK(a, u, v, check=False) == m:
            return Membership(True, (a, u, v))
    return Membership(False)


def _membership_LK(m: Mat2, budget: int) -> Membership:
    tower = m.tower
    if not lk_has_i(tower) or m.a != m.d or m.det() != 1 or m.c.is_zero():
        return Membership(False)
    ab, cd = m.b / 2, m.c / 2
    ad, bc = (m.a + 1) / 2, (m.a - 1) / 2
    pivots = []
    for unit in unit_candidates(tower, budget):
        for n in range(1, 7):
            pivots.append(unit * n)
    for p in pivots:
        # pivot on c, then on d
        for c, d in ((p, cd / p), (cd / p, p)):
            if d.is_zero() or c.is_zero():
                continue
            a, b = ad / d, bc / c
            if a * b != ab:
                continue
            if all(is_algebraic_integer(x) for x in (a, b, c, d)):
                if make_LK(a, b, c, d, check=False) == m:
                    return Membership(True, (a, b, c, d))
    return Membership(False)


def family_membership(m: Mat2, family: str, budget: int = 64) -> Membership:
    if family == "MK":
        return _membership_MK(m)
    if family == "NK":
        return _membership_NK(m, budget)
    if family == "LK":
        return _membership_LK(m, budget)
    raise ValueError(f"unknown family {family!r}")


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def mat_to_json(m: Mat2) -> list:
    return [elem_to_json(e) for e in m.entries()]


def mat_from_json(tower: FieldTower, obj: list) -> Mat2:
    if len(obj) != 4:
        raise ValueError("a matrix has four entries")
    return Mat2(*(elem_from_json(tower, e) for e in obj))
