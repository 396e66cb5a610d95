"""Markoff-type cubic surfaces and their Vieta/twist dynamics.

All surfaces are written in the shape

    x^2 + y^2 + z^2 + sigma*x*y*z = A*x + B*y + C*z + D

with sigma = -1 for the once-punctured-torus forms and sigma = +1 for the
four-holed sphere.  Coordinates are Python ints (fast path) or FieldElems.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .exactalg import FieldElem, elem_to_json, in_E
from .surfrep import TriplePoint, quartic_coefficients

DEFAULT_MAX_BITS = 512
DEFAULT_DEPTH = 30
DEFAULT_THRESHOLD = 10

VIETA_MOVES = ("vx", "vy", "vz")
TWIST_MOVES = ("tx", "ty", "tz", "tx-", "ty-", "tz-")


class SurfaceViolated(AssertionError):
    pass


class MissingSubsurfaceRecords(ValueError):
    pass


def _norm(v):
    """Rational-integer FieldElems become ints so the fast path applies."""
    if isinstance(v, FieldElem) and v.is_rational() and type(v.coeffs[0]) is int:
        return v.coeffs[0]
    return v


@dataclass(frozen=True)
class CubicSurface:
    form: str  # "S11", "S04", "TORUS" or "MARKOFF_MINUS"
    sigma: int
    A: object
    B: object
    C: object
    D: object
    params: tuple = ()

    @property
    def markoff_form(self) -> bool:
        return self.sigma == -1 and all(c == 0 for c in (self.A, self.B, self.C))

    def is_integral(self) -> bool:
        return all(type(_norm(c)) is int for c in (self.A, self.B, self.C, self.D))

    def describe(self) -> str:
        return f"{self.form}({', '.join(str(p) for p in self.params)})"


def s11(k) -> CubicSurface:
    """x^2 + y^2 + z^2 - xyz - 2 = k."""
    k = _norm(k)
    return CubicSurface("S11", -1, 0, 0, 0, _norm(k + 2), (k,))


def s04(k1, k2, k3, k4) -> CubicSurface:
    ks = tuple(_norm(k) for k in (k1, k2, k3, k4))
    a, b, c, d = (_norm(x) for x in quartic_coefficients(*ks))
    return CubicSurface("S04", 1, a, b, c, d, ks)


def torus() -> CubicSurface:
    """x^2 + y^2 + z^2 - xyz - 4 = 0."""
    return CubicSurface("TORUS", -1, 0, 0, 0, 4, ())


def markoff_minus(m) -> CubicSurface:
    """x^2 + y^2 + z^2 - xyz = m."""
    m = _norm(m)
    return CubicSurface("MARKOFF_MINUS", -1, 0, 0, 0, m, (m,))


def evaluate(s: CubicSurface, p: Sequence):
    x, y, z = p
    return x * x + y * y + z * z + s.sigma * x * y * z - s.A * x - s.B * y - s.C * z - s.D


def on_surface(s: CubicSurface, p: Sequence) -> bool:
    return evaluate(s, p) == 0


# --------------------------------------------------------------------------
# moves
# --------------------------------------------------------------------------

def _raw_move(s: CubicSurface, p: tuple, move: str) -> tuple:
    x, y, z = p
    sg = s.sigma
    if move == "vx":
        return (s.A - sg * y * z - x, y, z)
    if move == "vy":
        return (x, s.B - sg * x * z - y, z)
    if move == "vz":
        return (x, y, s.C - sg * x * y - z)
    if move in TWIST_MOVES:
        if not s.markoff_form:
            raise ValueError(f"twist {move} needs a Markoff-form surface")
        if move == "tx":
            return (x, z, x * z - y)
        if move == "tx-":
            return (x, x * y - z, y)
        if move == "ty":
            return (x * y - z, y, x)
        if move == "ty-":
            return (z, y, y * z - x)
        if move == "tz":
            return (y, y * z - x, z)
        if move == "tz-":
            return (x * z - y, x, z)
    raise ValueError(f"unknown move {move!r}")


def apply_move(s: CubicSurface, p: Sequence, move: str, check: bool = True) -> tuple:
    q = _raw_move(s, tuple(p), move)
    if check and not on_surface(s, q):
        raise SurfaceViolated(f"move {move} left the surface at {p}")
    return q


def inverse_move(move: str) -> str:
    if move in VIETA_MOVES:
        return move
    return move[:-1] if move.endswith("-") else move + "-"


# --------------------------------------------------------------------------
# orbit exploration
# --------------------------------------------------------------------------

def _bits(v) -> int:
    if isinstance(v, int):
        return abs(v).bit_length()
    return v.bit_size()


def _key(p: tuple) -> tuple:
    return tuple((0, v) if isinstance(v, int) else (1, v.sort_key()) for v in p)


@dataclass(frozen=True)
class OrbitResult:
    points: tuple
    stats: dict


def _expand_chunk(args) -> list:
    s, chunk, moves, max_bits = args
    out = []
    for p in chunk:
        for m in moves:
            q = apply_move(s, p, m)
            capped = any(_bits(v) > max_bits for v in q)
            out.append((q, capped))
    return out


def _chunks(seq: list, parts: int) -> list:
    size = max(1, math.ceil(len(seq) / parts))
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def orbit_explore(
    s: CubicSurface,
    seed: Sequence,
    moves: Iterable[str],
    depth: int,
    max_bits: int = DEFAULT_MAX_BITS,
    workers: int = 1,
) -> OrbitResult:
    """Breadth-first closure of ``seed`` under ``moves`` up to ``depth`` steps."""
    moves = tuple(moves)
    seed = tuple(_norm(v) for v in seed)
    if not on_surface(s, seed):
        raise SurfaceViolated(f"seed {seed} is not on the surface")
    seen = {seed}
    frontier = [seed]
    cap_hits = 0
    levels = [1]
    finite = False
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for _ in range(depth):
            if pool is not None and len(frontier) > 1:
                jobs = [(s, c, moves, max_bits) for c in _chunks(frontier, workers)]
                images = [item for part in pool.map(_expand_chunk, jobs) for item in part]
            else:
                images = _expand_chunk((s, frontier, moves, max_bits))
            nxt = []
            for q, capped in images:
                if capped:
                    cap_hits += 1
                    continue
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
            frontier = nxt
            levels.append(len(seen))
            if not frontier:
                finite = cap_hits == 0
                break
    finally:
        if pool is not None:
            pool.shutdown()
    points = tuple(sorted(seen, key=_key))
    stats = {
        "surface": s.describe(),
        "moves": list(moves),
        "depth": depth,
        "max_bits": max_bits,
        "points": len(points),
        "distinct_x": len({p[0] for p in points}),
        "distinct_y": len({p[1] for p in points}),
        "distinct_z": len({p[2] for p in points}),
        "cap_hits": cap_hits,
        "finite": finite,
        "growth": levels,
    }
    return OrbitResult(points, stats)


def point_to_json(p: Sequence) -> list:
    return [str(v) if isinstance(v, int) else elem_to_json(v) for v in p]


# --------------------------------------------------------------------------
# integral points
# --------------------------------------------------------------------------

def _int_coeffs(s: CubicSurface) -> tuple:
    if not s.is_integral():
        raise ValueError("surface must have rational-integer coefficients")
    return tuple(_norm(c) for c in (s.A, s.B, s.C, s.D))


def mod_obstruction(s: CubicSurface, m: int) -> int:
    """Number of solutions of the surface equation in (Z/m)^3."""
    if m <= 0:
        raise ValueError("modulus must be positive")
    a, b, c, d = _int_coeffs(s)
    r = np.arange(m, dtype=np.int64)
    x = r[:, None, None]
    y = r[None, :, None]
    z = r[None, None, :]
    xy = (x * y) % m
    val = (x * x + y * y + z * z) % m
    val = (val + s.sigma * ((xy * z) % m)) % m
    val = (val - (a % m) * x - (b % m) * y - (c % m) * z - d) % m
    return int(np.count_nonzero(val == 0))


def box_search(s: CubicSurface, bound: int) -> list:
    """All integer points with every |coordinate| <= bound, sorted."""
    a, b, c, d = _int_coeffs(s)
    out = []
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            # z^2 + (sigma x y - C) z + (x^2 + y^2 - A x - B y - D) = 0
            p = s.sigma * x * y - c
            q = x * x + y * y - a * x - b * y - d
            disc = p * p - 4 * q
            if disc < 0:
                continue
            r = math.isqrt(disc)
            if r * r != disc:
                continue
            for num in {-p + r, -p - r}:
                if num % 2 == 0 and abs(num // 2) <= bound:
                    out.append((x, y, num // 2))
    return sorted(out)


# --------------------------------------------------------------------------
# density evidence
# --------------------------------------------------------------------------

class CurveEvidence(NamedTuple):
    curve: str
    kind: str
    fixed_index: int | None
    a_values: int
    transverse_values: int
    ok: bool
    note: str


@dataclass(frozen=True)
class DensityReport:
    curves: tuple
    verdict: bool
    depth: int
    threshold: int
    label: str = "finite evidence (distinct-value counts), not a proof of density"


def _surface_of(sub) -> CubicSurface:
    if sub.kind == "11":
        return s11(sub.coefficients[0])
    a, b, c, d = (_norm(x) for x in sub.coefficients)
    return CubicSurface("S04", 1, a, b, c, d, ())


def _vieta_name(i: int) -> str:
    return VIETA_MOVES[i]


def _outside_E(v) -> bool:
    if isinstance(v, int):
        return abs(v) > 2
    return not in_E(v)


def _curve_evidence(args) -> CurveEvidence:
    sub, depth, threshold = args
    s = _surface_of(sub)
    p = tuple(_norm(v) for v in sub.point)
    a = sub.a_index
    if not on_surface(s, p):
        return CurveEvidence(sub.curve, sub.kind, None, 0, 0, False, "stored point is off its surface")
    if not _outside_E(p[a]):
        return CurveEvidence(sub.curve, sub.kind, None, 0, 0, False, f"curve trace {p[a]} lies in E")
    i, j = [k for k in range(3) if k != a]
    # Moves fixing the curve coordinate until one of the other two leaves E.
    fixed = None
    for step in range(2 * depth + 1):
        if _outside_E(p[i]):
            fixed = i
            break
        if _outside_E(p[j]):
            fixed = j
            break
        p = apply_move(s, p, _vieta_name(i if step % 2 == 0 else j))
    if fixed is None:
        return CurveEvidence(sub.curve, sub.kind, None, 0, 0, False, "no transverse coordinate outside E")
    t = j if fixed == i else i
    a_vals, t_vals = {p[a]}, {p[t]}
    for step in range(depth):
        p = apply_move(s, p, _vieta_name(a if step % 2 == 0 else t))
        a_vals.add(p[a])
        t_vals.add(p[t])
    ok = len(a_vals) >= threshold and len(t_vals) >= threshold
    note = "counts reached threshold" if ok else "counts below threshold"
    return CurveEvidence(sub.curve, sub.kind, fixed, len(a_vals), len(t_vals), ok, note)


def density_evidence(
    result,
    depth: int = DEFAULT_DEPTH,
    threshold: int = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> DensityReport:
    """Alternate the Vieta move changing each curve trace with a transverse one.

    For every recursion curve the coordinate of a third, fixed trace outside
    E is held constant, so the alternation acts with infinite order; the
    report counts distinct values of the curve trace and of the transverse
    trace.
    """
    cert = getattr(result, "certificate", result)
    subs = tuple(cert.subsurfaces)
    if not subs:
        raise MissingSubsurfaceRecords("certificate has no subsurface records")
    jobs = [(sub, depth, threshold) for sub in subs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            curves = tuple(pool.map(_curve_evidence, jobs))
    else:
        curves = tuple(_curve_evidence(j) for j in jobs)
    return DensityReport(curves, all(c.ok for c in curves), depth, threshold)


def report_to_json(report: DensityReport) -> dict:
    return {
        "label": report.label,
        "depth": report.depth,
        "threshold": report.threshold,
        "verdict": report.verdict,
        "curves": [c._asdict() for c in report.curves],
    }


def triple_point(p: Sequence) -> TriplePoint:
    return TriplePoint(*p)
