"""Exact arithmetic in towers of quadratic extensions of Q.

A tower of depth ``d`` is Q(s_0, ..., s_{d-1}) where ``s_i**2`` is the
radicand ``r_i``, an element of the tower truncated to its first ``i``
levels.  Elements are stored on the tensor basis of square-free monomials
in the ``s_i``: coefficient ``j`` multiplies the product of those ``s_i``
whose bit ``i`` is set in ``j``.  Splitting a coefficient vector in halves
therefore writes an element as ``p + q*s_top`` with ``p, q`` one level down,
which is how every routine below recurses.

Coefficients are Python ints or :class:`fractions.Fraction` (never a
Fraction with denominator 1), so equality is equality of coefficient
vectors.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from functools import reduce
from typing import Callable, NamedTuple, Sequence, Union

Rational = Union[int, Fraction]

DEFAULT_DEPTH_CAP = 6


class TowerError(ValueError):
    pass


class DepthCapExceeded(TowerError):
    pass


class TowerMismatch(TowerError):
    pass


# --------------------------------------------------------------------------
# coefficient-vector kernels
# --------------------------------------------------------------------------

def _q(c: Rational) -> Rational:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _to_rational(c) -> Rational:
    if isinstance(c, bool):
        raise TypeError("bool is not a field element")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _q(c)
    raise TypeError(f"cannot coerce {type(c).__name__} to a rational")


def _is_zero(v: tuple) -> bool:
    return not any(v)


def _add(x: tuple, y: tuple) -> tuple:
    return tuple(_q(a + b) for a, b in zip(x, y))


def _sub(x: tuple, y: tuple) -> tuple:
    return tuple(_q(a - b) for a, b in zip(x, y))


def _neg(x: tuple) -> tuple:
    return tuple(-a for a in x)


def _scale(x: tuple, c: Rational) -> tuple:
    if c == 1:
        return x
    return tuple(_q(a * c) for a in x)


def _is_rational(x: tuple) -> bool:
    return not any(x[1:])


def _mul(x: tuple, y: tuple, rads: tuple) -> tuple:
    if len(x) == 1:
        return (_q(x[0] * y[0]),)
    if _is_rational(x):
        return _scale(y, x[0])
    if _is_rational(y):
        return _scale(x, y[0])
    h = len(x) // 2
    sub = rads[:-1]
    p1, q1, p2, q2 = x[:h], x[h:], y[:h], y[h:]
    pp = _mul(p1, p2, sub)
    qq = _mul(q1, q2, sub)
    cross = _sub(_sub(_mul(_add(p1, q1), _add(p2, q2), sub), pp), qq)
    return _add(pp, _mul(qq, rads[-1], sub)) + cross


def _inv(x: tuple, rads: tuple) -> tuple:
    if len(x) == 1:
        if x[0] == 0:
            raise ZeroDivisionError("division by zero in tower")
        return (_q(Fraction(1) / x[0]),)
    h = len(x) // 2
    sub = rads[:-1]
    p, q = x[:h], x[h:]
    if _is_zero(q):
        return _inv(p, sub) + (0,) * h
    norm = _sub(_mul(p, p, sub), _mul(_mul(q, q, sub), rads[-1], sub))
    ninv = _inv(norm, sub)
    return _mul(p, ninv, sub) + _neg(_mul(q, ninv, sub))


def _rational_sqrt(c: Rational) -> Rational | None:
    if c < 0:
        return None
    c = Fraction(c)
    n, d = c.numerator, c.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return _q(Fraction(rn, rd))
    return None


def _sqrt(x: tuple, rads: tuple) -> tuple | None:
    """Square root of ``x`` inside the tower given by ``rads`` (or None).

    Ansatz y = a + b*s with a^2 + b^2*r = p and 2ab = q; the norm
    p^2 - q^2*r must then be the square of a^2 - b^2*r.
    """
    if len(x) == 1:
        r = _rational_sqrt(x[0])
        return None if r is None else (r,)
    h = len(x) // 2
    sub = rads[:-1]
    r = rads[-1]
    p, q = x[:h], x[h:]
    zero = (0,) * h
    if _is_zero(q):
        a = _sqrt(p, sub)
        if a is not None:
            return a + zero
        b = _sqrt(_mul(p, _inv(r, sub), sub), sub)
        if b is not None:
            return zero + b
        return None
    norm = _sub(_mul(p, p, sub), _mul(_mul(q, q, sub), r, sub))
    n = _sqrt(norm, sub)
    if n is None:
        return None
    for cand in (n, _neg(n)):
        a2 = _scale(_add(p, cand), Fraction(1, 2))
        a = _sqrt(a2, sub)
        if a is None or _is_zero(a):
            continue
        b = _mul(q, _inv(_scale(a, 2), sub), sub)
        y = a + b
        if _mul(y, y, rads) == x:
            return y
    return None


# --------------------------------------------------------------------------
# towers and elements
# --------------------------------------------------------------------------

class FieldTower:
    """A multi-quadratic tower; instances are interned by their radicands."""

    __slots__ = ("radicands", "depth", "dim", "__weakref__")
    _cache: dict = {}

    def __init__(self, radicands: tuple):
        self.radicands = radicands
        self.depth = len(radicands)
        self.dim = 1 << self.depth

    @classmethod
    def of(cls, radicands: Sequence[Sequence[Rational]], depth_cap: int = DEFAULT_DEPTH_CAP) -> "FieldTower":
        key = tuple(tuple(_to_rational(c) for c in r) for r in radicands)
        hit = cls._cache.get(key)
        if hit is not None:
            return hit
        if len(key) > depth_cap:
            raise DepthCapExceeded(f"tower depth {len(key)} exceeds cap {depth_cap}")
        for i, r in enumerate(key):
            if len(r) != 1 << i:
                raise TowerError(f"radicand {i} must have {1 << i} coefficients")
            if _sqrt(r, key[:i]) is not None:
                raise TowerError(f"radicand {i} is a square below it")
        tower = cls(key)
        cls._cache[key] = tower
        return tower

    def __reduce__(self):
        return (FieldTower.of, (self.radicands,))

    def __repr__(self) -> str:
        return f"FieldTower({', '.join(self.gen_name(i) for i in range(self.depth)) or 'Q'})"

    def gen_name(self, i: int) -> str:
        r = self.radicands[i]
        if _is_rational(r):
            return f"sqrt({r[0]})"
        return f"s{i}"

    def truncate(self, depth: int) -> "FieldTower":
        return FieldTower.of(self.radicands[:depth])

    def is_prefix_of(self, other: "FieldTower") -> bool:
        return self.depth <= other.depth and other.radicands[: self.depth] == self.radicands

    def zero(self) -> "FieldElem":
        return FieldElem(self, (0,) * self.dim)

    def one(self) -> "FieldElem":
        return self(1)

    def gen(self, i: int) -> "FieldElem":
        coeffs = [0] * self.dim
        coeffs[1 << i] = 1
        return FieldElem(self, tuple(coeffs))

    def radicand(self, i: int) -> "FieldElem":
        return FieldElem(self.truncate(i), self.radicands[i])

    def __call__(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            return embed_prefix(value, self)
        c = _to_rational(value)
        return FieldElem(self, (c,) + (0,) * (self.dim - 1))

    def element(self, coeffs: Sequence[Rational]) -> "FieldElem":
        if len(coeffs) != self.dim:
            raise TowerError(f"expected {self.dim} coefficients, got {len(coeffs)}")
        return FieldElem(self, tuple(_to_rational(c) for c in coeffs))


QQ = FieldTower.of(())


def _common(a: "FieldElem", b) -> tuple:
    if not isinstance(b, FieldElem):
        b = a.tower(b)
        return a, b, a.tower
    ta, tb = a.tower, b.tower
    if ta is tb:
        return a, b, ta
    if ta.is_prefix_of(tb):
        return embed_prefix(a, tb), b, tb
    if tb.is_prefix_of(ta):
        return a, embed_prefix(b, ta), ta
    raise TowerMismatch(f"{ta!r} and {tb!r} are not nested")


class FieldElem:
    """Immutable element of a :class:`FieldTower`."""

    __slots__ = ("tower", "coeffs", "_charpoly")

    def __init__(self, tower: FieldTower, coeffs: tuple):
        self.tower = tower
        self.coeffs = coeffs
        self._charpoly = None

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            a, b, t = _common(self, other)
        except TypeError:
            return NotImplemented
        return FieldElem(t, _add(a.coeffs, b.coeffs))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            a, b, t = _common(self, other)
        except TypeError:
            return NotImplemented
        return FieldElem(t, _sub(a.coeffs, b.coeffs))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldElem(self.tower, _neg(self.coeffs))

    def __pos__(self):
        return self

    def __mul__(self, other):
        try:
            a, b, t = _common(self, other)
        except TypeError:
            return NotImplemented
        return FieldElem(t, _mul(a.coeffs, b.coeffs, t.radicands))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        return FieldElem(self.tower, _inv(self.coeffs, self.tower.radicands))

    def __truediv__(self, other):
        try:
            a, b, t = _common(self, other)
        except TypeError:
            return NotImplemented
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        result = self.tower.one()
        for bit in bin(abs(n))[2:]:
            result = result * result
            if bit == "1":
                result = result * base
        return result

    # predicates -----------------------------------------------------------
    def is_zero(self) -> bool:
        return _is_zero(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational(self) -> bool:
        return _is_rational(self.coeffs)

    def rational(self) -> Rational:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.is_rational() and self.coeffs[0] == other
        if not isinstance(other, FieldElem):
            return NotImplemented
        try:
            a, b, _ = _common(self, other)
        except TowerMismatch:
            return False
        return a.coeffs == b.coeffs

    def __hash__(self) -> int:
        if self.is_rational():
            return hash(self.coeffs[0])
        trimmed = list(self.coeffs)
        while trimmed and trimmed[-1] == 0:
            trimmed.pop()
        return hash(tuple(trimmed))

    def sort_key(self) -> tuple:
        return tuple(self.coeffs)

    def bit_size(self) -> int:
        """Largest numerator/denominator bit length among the coefficients."""
        best = 0
        for c in self.coeffs:
            if type(c) is int:
                best = max(best, abs(c).bit_length())
            else:
                best = max(best, abs(c.numerator).bit_length(), c.denominator.bit_length())
        return best

    def __repr__(self) -> str:
        return f"FieldElem({self})"

    def __str__(self) -> str:
        terms = []
        for mask, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "*".join(self.tower.gen_name(i) for i in range(self.tower.depth) if mask >> i & 1)
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")


def embed_prefix(x: FieldElem, tower: FieldTower) -> FieldElem:
    """Coefficient-padding embedding of ``x`` into a tower extending its own."""
    if x.tower is tower:
        return x
    if not x.tower.is_prefix_of(tower):
        raise TowerMismatch(f"{x.tower!r} is not a sub-tower of {tower!r}")
    return FieldElem(tower, x.coeffs + (0,) * (tower.dim - x.tower.dim))


def as_elem(value, tower: FieldTower = QQ) -> FieldElem:
    if isinstance(value, FieldElem):
        return value
    return tower(value)


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------

def field_arith(a: FieldElem, b: FieldElem, op: str) -> FieldElem:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if as_elem(b).is_zero():
            raise ZeroDivisionError("division by zero in tower")
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def sqrt_in_tower(x: FieldElem) -> FieldElem | None:
    """Return ``y`` in the same tower with ``y*y == x``, or None."""
    y = _sqrt(x.coeffs, x.tower.radicands)
    return None if y is None else FieldElem(x.tower, y)


def _strip_rational_square(c: Rational) -> tuple[Rational, Rational]:
    """Write c = m**2 * c' with c' a square-free integer (small factors only)."""
    c = Fraction(c)
    n = c.numerator * c.denominator
    m = Fraction(1, c.denominator)
    p = 2
    while p * p <= abs(n) and p < 10_000:
        while n % (p * p) == 0:
            n //= p * p
            m *= p
        p += 1
    return _q(n), _q(m)


def extend_field(
    tower: FieldTower, d: FieldElem, depth_cap: int = DEFAULT_DEPTH_CAP
) -> tuple[FieldTower, Callable[[FieldElem], FieldElem]]:
    """Adjoin a square root of ``d``; identity if ``d`` is already a square."""
    d = as_elem(d, tower)
    if d.tower is not tower:
        d = embed_prefix(d, tower)
    if sqrt_in_tower(d) is not None:
        return tower, lambda x: x
    if tower.depth + 1 > depth_cap:
        raise DepthCapExceeded(f"adjoining a root would exceed depth cap {depth_cap}")
    new = FieldTower.of(tower.radicands + (d.coeffs,), depth_cap=depth_cap)
    return new, lambda x: embed_prefix(x, new)


def adjoin_sqrt(d: FieldElem, depth_cap: int = DEFAULT_DEPTH_CAP) -> FieldElem:
    """A square root of ``d``, in ``d``'s tower or a one-level extension of it.

    Rational radicands are reduced to square-free integers first, so that
    e.g. sqrt(-4) is stored as 2*sqrt(-1).
    """
    y = sqrt_in_tower(d)
    if y is not None:
        return y
    tower = d.tower
    scale: Rational = 1
    rad = d
    if d.is_rational():
        core, scale = _strip_rational_square(d.rational())
        rad = tower(core)
    new, _ = extend_field(tower, rad, depth_cap)
    return new.gen(new.depth - 1) * scale


def common_tower(
    t1: FieldTower, t2: FieldTower
) -> tuple[FieldTower, Callable[[FieldElem], FieldElem], Callable[[FieldElem], FieldElem]]:
    """A tower containing both, with embeddings of each."""
    if t1.is_prefix_of(t2):
        return t2, lambda x: embed_prefix(x, t2), lambda x: x
    if t2.is_prefix_of(t1):
        return t1, lambda x: x, lambda x: embed_prefix(x, t1)
    target = t1
    images: list[FieldElem] = []
    for j in range(t2.depth):
        rad = _evaluate(t2.radicands[j], images, target)
        root = sqrt_in_tower(rad)
        if root is None:
            target, _ = extend_field(target, rad)
            images = [embed_prefix(im, target) for im in images]
            root = target.gen(target.depth - 1)
        images.append(root)
    final = target
    imgs = [embed_prefix(im, final) for im in images]
    return final, lambda x: embed_prefix(x, final), lambda x: _evaluate(x.coeffs, imgs, final)


def _evaluate(coeffs: tuple, images: list, target: FieldTower) -> FieldElem:
    if len(coeffs) == 1:
        return target(coeffs[0])
    h = len(coeffs) // 2
    level = h.bit_length() - 1
    low = _evaluate(coeffs[:h], images, target)
    high = coeffs[h:]
    if _is_zero(high):
        return low
    return low + _evaluate(high, images, target) * embed_prefix(images[level], target)


# --------------------------------------------------------------------------
# polynomials over Q (coefficient lists, constant term first)
# --------------------------------------------------------------------------

Poly = tuple


def _ptrim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_eval(p: Sequence[Rational], t):
    acc = 0
    for c in reversed(p):
        acc = acc * t + c
    return acc


def poly_deriv(p: Sequence[Rational]) -> list:
    return [_q(i * c) for i, c in enumerate(p)][1:]


def poly_divmod(a: Sequence[Rational], b: Sequence[Rational]) -> tuple[list, list]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    quo = [0] * max(len(a) - len(b) + 1, 1)
    lead = Fraction(b[-1])
    while len(a) >= len(b) and a:
        c = _q(a[-1] / lead)
        shift = len(a) - len(b)
        quo[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] = _q(a[shift + i] - c * bc)
        a.pop()
        _ptrim(a)
    return _ptrim(quo), a


def poly_gcd(a: Sequence[Rational], b: Sequence[Rational]) -> list:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, poly_divmod(a, b)[1]
    if not a:
        return []
    lead = Fraction(a[-1])
    return [_q(c / lead) for c in a]


def squarefree_part(p: Sequence[Rational]) -> list:
    g = poly_gcd(p, poly_deriv(p))
    q, _ = poly_divmod(p, g)
    lead = Fraction(q[-1])
    return [_q(c / lead) for c in q]


def _berkowitz(a: list[list[int]]) -> list:
    """Division-free characteristic polynomial of an integer matrix, leading term first."""
    p = [1]
    for k in range(len(a)):
        row, v = a[k][:k], [a[i][k] for i in range(k)]
        t = [1, -a[k][k]]
        for _ in range(k):
            t.append(-sum(r * x for r, x in zip(row, v)))
            v = [sum(a[i][j] * v[j] for j in range(k)) for i in range(k)]
        p = [sum(t[i - j] * p[j] for j in range(max(0, i - k - 1), min(i, k) + 1)) for i in range(k + 2)]
    return p


def _poly_pow(p: list, e: int) -> list:
    out = [1]
    for _ in range(e):
        out = [sum(out[j] * p[i - j] for j in range(max(0, i - len(p) + 1), min(i, len(out) - 1) + 1))
               for i in range(len(out) + len(p) - 1)]
    return out


def char_poly(x: FieldElem) -> tuple:
    """Characteristic polynomial of multiplication by ``x`` on the tensor basis.

    Returned constant term first; monic of degree ``2**depth``.
    """
    if x._charpoly is not None:
        return x._charpoly
    t = x.tower
    # work in the smallest prefix tower holding x, then raise to the index
    used = max((i for i, c in enumerate(x.coeffs) if c), default=0)
    sub = t.truncate(used.bit_length())
    # integer coefficients keep the products below in plain ints
    pre = math.lcm(*(Fraction(c).denominator for c in x.coeffs[: sub.dim]))
    coeffs = tuple(_q(c * pre) for c in x.coeffs[: sub.dim])
    cols = []
    for j in range(sub.dim):
        e = [0] * sub.dim
        e[j] = 1
        cols.append(_mul(coeffs, tuple(e), sub.radicands))
    # clear denominators: the entries of L*x are integers
    post = math.lcm(*(Fraction(c).denominator for col in cols for c in col))
    mat = [[int(cols[j][i] * post) for j in range(sub.dim)] for i in range(sub.dim)]
    lead_first = _berkowitz(mat)
    scale = pre * post
    base = [_q(Fraction(c, scale**i)) for i, c in enumerate(lead_first)][::-1]
    res = tuple(_q(Fraction(c)) for c in _poly_pow(base, t.dim // sub.dim))
    x._charpoly = res
    return res


def _is_integer(c: Rational) -> bool:
    return type(c) is int


def is_algebraic_integer(x: FieldElem) -> bool:
    return all(_is_integer(c) for c in char_poly(x))


def is_unit(x: FieldElem) -> bool:
    if x.is_zero():
        return False
    return is_algebraic_integer(x) and abs(char_poly(x)[0]) == 1


# --------------------------------------------------------------------------
# Sturm sequences
# --------------------------------------------------------------------------

class RootCount(NamedTuple):
    in_interval: int
    total: int


def sturm_sequence(p: Sequence[Rational]) -> list[list]:
    seq = [_ptrim([Fraction(c) for c in p])]
    seq.append(poly_deriv(seq[0]))
    while seq[-1] and len(seq[-1]) > 1:
        _, r = poly_divmod(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(values: list) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _changes_at(seq: list, t) -> int:
    return _sign_changes([poly_eval(s, t) for s in seq])


def _changes_at_infinity(seq: list, positive: bool) -> int:
    vals = []
    for s in seq:
        lead = s[-1]
        deg = len(s) - 1
        if not positive and deg % 2:
            lead = -lead
        vals.append(lead)
    return _sign_changes(vals)


def real_roots_in_interval(p: Sequence[Rational], lo: Rational, hi: Rational) -> RootCount:
    """Distinct real roots of ``p`` in the closed interval [lo, hi], and in total."""
    p = _ptrim(list(p))
    if not p:
        raise ValueError("zero polynomial")
    if len(p) == 1:
        return RootCount(0, 0)
    seq = sturm_sequence(p)
    lo, hi = Fraction(lo), Fraction(hi)
    inside = _changes_at(seq, lo) - _changes_at(seq, hi)
    if poly_eval(p, lo) == 0:
        inside += 1  # Sturm counts (lo, hi]
    total = _changes_at_infinity(seq, False) - _changes_at_infinity(seq, True)
    return RootCount(inside, total)


def in_E(x: FieldElem) -> bool:
    """Whether ``x = z + 1/z`` for a root of unity ``z`` (Kronecker)."""
    if not is_algebraic_integer(x):
        return False
    if x.is_rational():
        return abs(x.coeffs[0]) <= 2
    sqf = squarefree_part(char_poly(x))
    deg = len(sqf) - 1
    return real_roots_in_interval(sqf, -2, 2).in_interval == deg


def is_root_of_unity(v: FieldElem) -> bool:
    if v.is_zero():
        raise ZeroDivisionError("zero is not a root of unity candidate")
    return is_unit(v) and in_E(v + v.inverse())


# --------------------------------------------------------------------------
# distinguished elements
# --------------------------------------------------------------------------

def golden(tower: FieldTower) -> FieldElem:
    """(1 + sqrt 5)/2 in ``tower``; requires sqrt(5) to be present."""
    s = sqrt_in_tower(tower(5))
    if s is None:
        raise TowerError("tower does not contain sqrt(5)")
    return (s + 1) / 2


def imaginary_unit(tower: FieldTower) -> FieldElem:
    s = sqrt_in_tower(tower(-1))
    if s is None:
        raise TowerError("tower does not contain sqrt(-1)")
    return s


def with_sqrt(tower: FieldTower, d: int) -> FieldTower:
    """``tower`` with sqrt(d) adjoined when missing."""
    return extend_field(tower, tower(d))[0]


def unit_exponents():
    """0, 1, -1, 2, -2, ... : the deterministic scan order for unit powers."""
    yield 0
    n = 1
    while True:
        yield n
        yield -n
        n += 1


# --------------------------------------------------------------------------
# serialization and parsing
# --------------------------------------------------------------------------

def _coeffs_to_json(coeffs: Sequence[Rational]) -> dict:
    den = reduce(math.lcm, (Fraction(c).denominator for c in coeffs), 1)
    return {"coeffs": [str(int(c * den)) for c in coeffs], "den": str(den)}


def _coeffs_from_json(obj: dict) -> tuple:
    den = int(obj["den"])
    if den <= 0:
        raise ValueError("denominator must be positive")
    return tuple(_q(Fraction(int(c), den)) for c in obj["coeffs"])


def elem_to_json(x: FieldElem) -> dict:
    return _coeffs_to_json(x.coeffs)


def elem_from_json(tower: FieldTower, obj: dict) -> FieldElem:
    return tower.element(_coeffs_from_json(obj))


def tower_to_json(t: FieldTower) -> dict:
    return {"radicands": [_coeffs_to_json(r) for r in t.radicands]}


def tower_from_json(obj: dict) -> FieldTower:
    return FieldTower.of([_coeffs_from_json(r) for r in obj["radicands"]])


def parse_element(text: str, tower: FieldTower = QQ) -> FieldElem:
    """Parse integers, ``sqrt(...)``, ``+ - * /`` and parentheses.

    ``sqrt`` adjoins a root when needed, so the result may live in an
    extension of ``tower``.
    """
    node = ast.parse(str(text).strip(), mode="eval").body
    current = tower

    def ev(n) -> FieldElem:
        nonlocal current
        if isinstance(n, ast.Constant) and isinstance(n.value, int) and not isinstance(n.value, bool):
            return current(n.value)
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.USub, ast.UAdd)):
            v = ev(n.operand)
            return -v if isinstance(n.op, ast.USub) else v
        if isinstance(n, ast.BinOp) and isinstance(n.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
            a, b = ev(n.left), ev(n.right)
            op = {ast.Add: "add", ast.Sub: "sub", ast.Mult: "mul", ast.Div: "div"}[type(n.op)]
            return field_arith(a, b, op)
        if (
            isinstance(n, ast.Call)
            and isinstance(n.func, ast.Name)
            and n.func.id == "sqrt"
            and len(n.args) == 1
            and not n.keywords
        ):
            root = adjoin_sqrt(embed_prefix(ev(n.args[0]), current))
            current = root.tower
            return root
        raise ValueError(f"unsupported syntax in {text!r}")

    return ev(node)
