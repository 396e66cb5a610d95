"""Constructive forging of integral representations with given boundary traces.

Every construction works on a ``Piece``: a representation together with the
words describing its pants decomposition, so that gluing two pieces only has
to rename words.  Matrices and traces for the certificate are evaluated once,
on the finished representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

from .exactalg import (
    FieldElem,
    FieldTower,
    QQ,
    TowerMismatch,
    adjoin_sqrt,
    elem_from_json,
    elem_to_json,
    embed_prefix,
    golden,
    in_E,
    is_algebraic_integer,
    unit_exponents,
    with_sqrt,
)
from .sl2core import (
    FamilyError,
    Mat2,
    family_membership,
    make_MK,
    make_NK,
    mat_from_json,
    mat_to_json,
    solve_NK_for_trace,
)
from .surfrep import (
    Representation,
    SurfaceType,
    TriplePoint,
    boundary_traces,
    coords_04,
    coords_11,
    eval_word,
    glue_with_maps,
    rep_from_json,
    rep_to_json,
    substitute,
    word,
    word_from_json,
    word_to_json,
)

DEFAULT_BUDGET = 64


class ForgeError(ValueError):
    pass


class BudgetExhausted(ForgeError):
    pass


class NotInFamilyMK(ForgeError):
    pass


class PreconditionError(ForgeError):
    pass


class UnsupportedSurface(ForgeError):
    pass


class CertificateInvalid(ValueError):
    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def check_irreducibility_triple(t1, t2, t3) -> bool:
    """t1^2 + t2^2 + t3^2 - t1 t2 t3 != 4."""
    return t1 * t1 + t2 * t2 + t3 * t3 - t1 * t2 * t3 != 4


def _tower_of(*values) -> FieldTower:
    tower = QQ
    for v in values:
        t = v.tower if isinstance(v, (FieldElem, Mat2)) else QQ
        if t.is_prefix_of(tower):
            continue
        if tower.is_prefix_of(t):
            tower = t
        else:
            raise TowerMismatch(f"{tower!r} and {t!r} are not nested")
    return tower


def _work_tower(*values) -> FieldTower:
    return with_sqrt(_tower_of(*values), 5)


def _lift(x, tower: FieldTower):
    if isinstance(x, Mat2):
        return x.in_tower(tower)
    return tower(x)


def golden_powers(tower: FieldTower, budget: int) -> list[FieldElem]:
    phi = golden(tower)
    out = []
    for e in unit_exponents():
        if len(out) >= budget:
            return out
        out.append(phi**e)
    return out


def small_integers() -> Iterator[int]:
    """0, 1, -1, 2, -2, ..."""
    return unit_exponents()


def diagonal_pairs(first: Sequence, second: Sequence, budget: int) -> Iterator[tuple]:
    """Pairs (first[i], second[j]) ordered by i + j, then by i."""
    produced = 0
    total = 0
    while produced < budget and total <= len(first) + len(second):
        for i in range(total + 1):
            j = total - i
            if i < len(first) and j < len(second):
                yield first[i], second[j]
                produced += 1
                if produced >= budget:
                    return
        total += 1


def _not_in_E(x: FieldElem) -> bool:
    return not in_E(x)


# --------------------------------------------------------------------------
# pieces
# --------------------------------------------------------------------------

@dataclass
class CurveData:
    word: tuple
    kind: str  # "11" or "04"
    neighborhood: tuple  # two words for "11", four for "04"
    a_index: int


@dataclass
class PantsData:
    words: tuple  # three boundary words


@dataclass
class Piece:
    rep: Representation
    curves: list = field(default_factory=list)
    pants: list = field(default_factory=list)
    adjacency: dict = field(default_factory=dict)  # puncture -> (P, Q) with P Q gamma = 1


G1, G2, G3 = "gamma1", "gamma2", "gamma3"


def pants_piece(m1: Mat2, m2: Mat2, m3: Mat2) -> Piece:
    rep = Representation.build(0, 3, {G1: m1, G2: m2, G3: m3})
    w1, w2, w3 = word(G1), word(G2), word(G3)
    return Piece(
        rep,
        [],
        [PantsData((w1, w2, w3))],
        {G1: (w2, w3), G2: (w3, w1), G3: (w1, w2)},
    )


def glue_pieces(p1: Piece, i: int, p2: Piece, j: int) -> Piece:
    gl = glue_with_maps(p1.rep, p2.rep, i, j)
    r1 = lambda w: substitute(w, gl.rename1)  # noqa: E731
    r2 = lambda w: substitute(w, gl.rename2)  # noqa: E731

    def move_curve(c: CurveData, r) -> CurveData:
        return CurveData(r(c.word), c.kind, tuple(r(w) for w in c.neighborhood), c.a_index)

    curves = [move_curve(c, r1) for c in p1.curves] + [move_curve(c, r2) for c in p2.curves]
    pu1, pu2 = p1.rep.punctures[i - 1], p2.rep.punctures[j - 1]
    a1, b1 = p1.adjacency[pu1]
    a2, b2 = p2.adjacency[pu2]
    curves.append(CurveData(gl.curve, "04", (r1(a1), r1(b1), r2(a2), r2(b2)), 0))
    pants = [PantsData(tuple(r1(w) for w in pd.words)) for pd in p1.pants]
    pants += [PantsData(tuple(r2(w) for w in pd.words)) for pd in p2.pants]
    adjacency = {}
    for old, (a, b) in p1.adjacency.items():
        if old != pu1:
            adjacency[gl.rename1[old][0][0]] = (r1(a), r1(b))
    for old, (a, b) in p2.adjacency.items():
        if old != pu2:
            adjacency[gl.rename2[old][0][0]] = (r2(a), r2(b))
    return Piece(gl.rep, curves, pants, adjacency)


# --------------------------------------------------------------------------
# certificates
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveRecord:
    id: str
    word: tuple | None
    matrix: Mat2
    trace: FieldElem
    not_pm2: bool
    not_in_E: bool


@dataclass(frozen=True)
class PieceRecord:
    traces: tuple
    q: FieldElem
    irreducible: bool
    exempt: str | None = None


@dataclass(frozen=True)
class SubsurfaceRecord:
    curve: str
    kind: str
    words: tuple
    matrices: tuple
    point: TriplePoint
    coefficients: tuple  # "11": (k,), "04": (A, B, C, D)
    a_index: int


@dataclass(frozen=True)
class GoodnessCertificate:
    surface: SurfaceType
    curves: tuple
    pieces: tuple
    subsurfaces: tuple
    exceptional: bool = False
    minus_identity: bool = False
    verdict: bool | None = None


def curve_record(cid: str, w, m: Mat2) -> CurveRecord:
    t = m.trace()
    return CurveRecord(cid, w, m, t, t != 2 and t != -2, _not_in_E(t))


def piece_record(traces: tuple, exempt: str | None = None) -> PieceRecord:
    x, y, z = traces
    q = x * x + y * y + z * z - x * y * z
    return PieceRecord(tuple(traces), q, q != 4, exempt)


def subsurface_record(cid: str, c: CurveData, mats: tuple) -> SubsurfaceRecord:
    if c.kind == "11":
        pt = coords_11(*mats)
        comm = mats[0] * mats[1] * mats[0].inverse() * mats[1].inverse()
        coeffs = (comm.trace(),)
    else:
        res = coords_04(*mats)
        pt, coeffs = res.point, res.coefficients
    return SubsurfaceRecord(cid, c.kind, c.neighborhood, mats, pt, coeffs, c.a_index)


def build_certificate(piece: Piece, minus_identity: bool = False, exempt_traces=()) -> GoodnessCertificate:
    rep = piece.rep
    ks = boundary_traces(rep)
    exceptional = (rep.surface.genus, rep.surface.punctures) == (1, 1) and ks[0] == 2
    curves, subs = [], []
    for n, c in enumerate(piece.curves, start=1):
        cid = f"c{n}"
        m = eval_word(rep, c.word)
        curves.append(curve_record(cid, c.word, m))
        mats = tuple(eval_word(rep, w) for w in c.neighborhood)
        if c.kind == "04":
            # the first pair multiplies to the inverse of the curve
            assert (mats[0] * mats[1]).trace() == m.trace()
        else:
            assert mats[c.a_index].trace() == m.trace()
        subs.append(subsurface_record(cid, c, mats))
    pieces = []
    for pd in piece.pants:
        traces = tuple(eval_word(rep, w).trace() for w in pd.words)
        rec = piece_record(traces)
        if not rec.irreducible:
            if exceptional:
                rec = piece_record(traces, "(1,1,2)")
            elif minus_identity and any(t == -2 for t in traces):
                rec = piece_record(traces, "minus-identity")
        pieces.append(rec)
    return GoodnessCertificate(rep.surface, tuple(curves), tuple(pieces), tuple(subs), exceptional, minus_identity)


def certify_P_good(result, rep: Representation | None = None) -> GoodnessCertificate:
    """Recompute every flag of a certificate and return it with a verdict.

    Accepts a ForgeResult (then the curve words are re-evaluated on its
    representation) or a bare certificate.
    """
    if isinstance(result, GoodnessCertificate):
        cert = result
    else:
        cert, rep = result.certificate, result.rep
    for c in cert.curves:
        if c.matrix.trace() != c.trace:
            raise CertificateInvalid(f"curve {c.id}: stored trace does not match matrix", c)
        if rep is not None and c.word is not None and eval_word(rep, c.word) != c.matrix:
            raise CertificateInvalid(f"curve {c.id}: word does not evaluate to the stored matrix", c)
        if c.trace == 2 or c.trace == -2:
            raise CertificateInvalid(f"curve {c.id}: trace is +-2", c)
        if in_E(c.trace):
            raise CertificateInvalid(f"curve {c.id}: trace {c.trace} lies in E", c)
    for p in cert.pieces:
        x, y, z = p.traces
        q = x * x + y * y + z * z - x * y * z
        if q != p.q:
            raise CertificateInvalid("pants piece: stored q does not match its traces", p)
        if q != 4:
            continue
        if p.exempt == "(1,1,2)" and cert.exceptional:
            if (cert.surface.genus, cert.surface.punctures) == (1, 1) and 2 in (x, y, z):
                continue
        if p.exempt == "minus-identity" and cert.minus_identity and any(t == -2 for t in p.traces):
            continue
        raise CertificateInvalid(f"pants piece {p.traces}: reducible (q = 4)", p)
    curve_ids = {c.id: c for c in cert.curves}
    for s in cert.subsurfaces:
        if s.curve not in curve_ids:
            raise CertificateInvalid(f"subsurface record for unknown curve {s.curve}", s)
        fresh = subsurface_record(s.curve, CurveData((), s.kind, s.words, s.a_index), s.matrices)
        if fresh.point != s.point or tuple(fresh.coefficients) != tuple(s.coefficients):
            raise CertificateInvalid(f"subsurface record for {s.curve} is inconsistent", s)
    return GoodnessCertificate(
        cert.surface, cert.curves, cert.pieces, cert.subsurfaces, cert.exceptional, cert.minus_identity, True
    )


@dataclass(frozen=True)
class ForgeResult:
    rep: Representation
    certificate: GoodnessCertificate
    base_depth: int
    added_depth: int


def finish(piece: Piece, base: FieldTower, minus_identity: bool = False) -> ForgeResult:
    cert = build_certificate(piece, minus_identity)
    rep = piece.rep.with_integral_flag()
    return ForgeResult(rep, cert, base.depth, rep.tower.depth - base.depth)


# --------------------------------------------------------------------------
# matrices with prescribed traces
# --------------------------------------------------------------------------

def pants_from_A(A: Mat2, k1, k2, z=0) -> tuple[FieldTower, Mat2, Mat2]:
    """Integral M1, M2 with tr M1 = k1, tr M2 = k2 and M2 = A M1."""
    tower = _tower_of(A, k1, k2, z)
    A = A.in_tower(tower)
    k1, k2, z = tower(k1), tower(k2), tower(z)
    if not family_membership(A, "MK"):
        raise NotInFamilyMK("A must have unit lower-left entry, be integral and have det 1")
    a, b, c, d = A.entries()
    ci = c.inverse()
    # x^2 - lin x + const = 0 with y eliminated through tr(A M1) = k2
    lin = k1 + z * ci * (a - d)
    const = z * ci * (k2 - d * k1 - b * z) + 1
    root = adjoin_sqrt(lin * lin - 4 * const)
    tower = root.tower
    x = (tower(lin) + root) / 2
    y = (tower(k2) - d * k1 - b * z - (a - d) * x) * ci
    w = tower(k1) - x
    m1 = Mat2(x, y, tower(z), w)
    m2 = A.in_tower(tower) * m1
    assert m1.det() == 1 and m1.trace() == k1 and m2.trace() == k2
    return tower, m1, m2


def induction_step(
    A: Mat2,
    k,
    budget: int = DEFAULT_BUDGET,
    extra: Callable[[Mat2], bool] | None = None,
) -> tuple[Mat2, Mat2]:
    """(B, M) with A B M = I, tr M = k, B in MK and tr B outside E."""
    tower = _work_tower(A, k)
    A, k = A.in_tower(tower), tower(k)
    if not family_membership(A, "MK"):
        raise NotInFamilyMK("A must lie in MK")
    if not is_algebraic_integer(k):
        raise PreconditionError("k must be integral")
    a, _, u, d = A.entries()
    trA = A.trace()
    units = golden_powers(tower, budget)
    for v, s in diagonal_pairs(units, units, budget):
        x = k / s - v * d / u + (v / u + u / v) / s
        w = v * (s - a) / u
        B = Mat2(x, (x * w - 1) / v, v, w)
        trB = B.trace()
        if not _not_in_E(trB):
            continue
        if not check_irreducibility_triple(trA, trB, k):
            continue
        if extra is not None and not extra(B):
            continue
        M = (A * B).inverse()
        assert M.trace() == k
        return B, M
    raise BudgetExhausted("no (s, v) in the scan satisfied the trace conditions")


def induction_step_N(
    A: Mat2, k, budget: int = DEFAULT_BUDGET
) -> tuple[FieldTower, Mat2, Mat2, tuple]:
    """(tower, B, M, params) with A B M = I, tr M = k and B in NK over a quadratic extension.

    ``params`` are the NK parameters (a, u, v) of B.
    """
    tower = _work_tower(A, k)
    A, k = A.in_tower(tower), tower(k)
    if not family_membership(A, "MK"):
        raise NotInFamilyMK("A must lie in MK")
    trA = A.trace()
    if in_E(trA):
        raise PreconditionError("tr A must lie outside E")
    if not in_E(k):
        raise PreconditionError("k must lie in E")
    p, q, r, t = A.entries()
    v = golden(tower)
    w = v.inverse()
    for u in golden_powers(tower, budget):
        # tr(A N(a,u,v)) = k as a quadratic in a, divided by its unit lead
        lead = r * (1 - v * v) / u
        lin = (p * (1 - w * w) - r * (1 - v * v) / u + t * (1 - v * v)) / lead
        const = (p * w * w + q * u * (1 - w * w) + t * v * v - k) / lead
        root = adjoin_sqrt(lin * lin - 4 * const)
        ext = root.tower
        a = (root - lin) / 2
        uu, vv = ext(u), ext(v)
        B = make_NK(a, uu, vv, check=False)
        trB = B.trace()
        if not _not_in_E(trB) or not check_irreducibility_triple(trA, trB, k):
            continue
        Ae = A.in_tower(ext)
        M = (Ae * B).inverse()
        assert M.trace() == k
        return ext, B, M, (a, uu, vv)
    raise BudgetExhausted("no u in the scan gave an admissible NK matrix")


def nk_inverse_params(params: tuple) -> tuple:
    a, u, v = params
    return (a, u * (v * v).inverse(), v.inverse())


def _nk_params(C: Mat2, params) -> tuple:
    if params is not None:
        return tuple(C.tower(x) for x in params)
    mem = family_membership(C, "NK")
    if not mem:
        raise PreconditionError("matrix is not in NK")
    return mem.params


# --------------------------------------------------------------------------
# pieces of the recursion
# --------------------------------------------------------------------------

def torus_1_piece(C: Mat2, params=None, budget: int = DEFAULT_BUDGET) -> Piece:
    a, u, v = _nk_params(C, params)
    tower = _work_tower(C, a, u, v)
    C, a, u, v = C.in_tower(tower), tower(a), tower(u), tower(v)
    X = Mat2(a, (a - 1) / u, u, tower(1))
    D = Mat2.diag(v, v.inverse())
    trC = C.trace()
    for lam in golden_powers(tower, budget):
        A = X * Mat2.diag(lam, lam.inverse())
        trA = A.trace()
        if in_E(trA):
            continue
        if trC != 2 and trA * trA == 2 + trC:
            continue
        rep = Representation.build(1, 1, {"alpha1": D, "beta1": A, "gamma1": C})
        assert (D * A * D.inverse() * A.inverse() * C).is_identity()
        wa, wb = word("alpha1"), word("beta1")
        curve = CurveData(wb, "11", (wa, wb), 1)
        pants = PantsData((word("alpha1", "beta1", "alpha1^-1"), word("beta1^-1"), word("gamma1")))
        adjacency = {"gamma1": (word("alpha1", "beta1", "alpha1^-1"), word("beta1^-1"))}
        return Piece(rep, [curve], [pants], adjacency)
    raise BudgetExhausted("no lambda in the scan gave an admissible torus")


def torus_2_piece(M: Mat2, budget: int = DEFAULT_BUDGET, require_mk: bool = True) -> Piece:
    """Two-holed torus with punctures M and M^-1 and alpha = beta upper triangular.

    Membership of M in MK guarantees the scan succeeds; without it the
    conditions are still checked on every candidate.
    """
    tower = _work_tower(M)
    M = M.in_tower(tower)
    if require_mk and not family_membership(M, "MK"):
        raise NotInFamilyMK("M must lie in MK")
    Minv = M.inverse()
    trM = M.trace()
    shifts = []
    for t in small_integers():
        if len(shifts) >= budget:
            break
        shifts.append(t)
    for lam, t in diagonal_pairs(golden_powers(tower, budget), shifts, budget):
        A = Mat2(lam, tower(t), tower(0), lam.inverse())
        trA = A.trace()
        trD = (Minv * A).trace()
        if in_E(trA) or in_E(trD):
            continue
        if not check_irreducibility_triple(trA, trD, trM):
            continue
        rep = Representation.build(1, 2, {"alpha1": A, "beta1": A, "gamma1": M, "gamma2": Minv})
        al, be = "alpha1", "beta1"
        delta = word("gamma2", al)
        delta_inv = word(f"{al}^-1", "gamma2^-1")
        curves = [
            CurveData(
                word(al),
                "04",
                (
                    delta_inv,
                    word("gamma2"),
                    word(f"{be}^-1", "gamma1", be),
                    word(f"{be}^-1") + delta + word(be),
                ),
                0,
            ),
            CurveData(
                delta,
                "04",
                (word("gamma2"), word(al), word(be, f"{al}^-1", f"{be}^-1"), word("gamma1")),
                0,
            ),
        ]
        pants = [
            PantsData((word("gamma2"), word(al), delta_inv)),
            PantsData((word(be, f"{al}^-1", f"{be}^-1"), word("gamma1"), delta)),
        ]
        adjacency = {
            "gamma1": (delta, word(be, f"{al}^-1", f"{be}^-1")),
            "gamma2": (word(al), delta_inv),
        }
        return Piece(rep, curves, pants, adjacency)
    raise BudgetExhausted("no (lambda, t) in the scan gave an admissible two-holed torus")


def genus_piece(g: int, M: Mat2, params=None, budget: int = DEFAULT_BUDGET) -> Piece:
    """Genus g, one puncture with monodromy M in NK (tr M outside E)."""
    if g < 1:
        raise PreconditionError("genus must be at least 1")
    params = _nk_params(M, params)
    if g == 1:
        return torus_1_piece(M, params, budget)
    # gamma2 of the two-holed torus carries M^-1, matched by M below
    return glue_pieces(torus_2_piece(M, budget), 2, genus_piece(g - 1, M, params, budget), 1)


def sphere_piece(k: Sequence, M: Mat2, budget: int = DEFAULT_BUDGET) -> Piece:
    """Sphere with len(k)+1 punctures: traces k then monodromy exactly M."""
    n = len(k)
    if n < 3:
        raise PreconditionError("at least three prescribed traces are needed")
    tower = _work_tower(M, *k)
    M = M.in_tower(tower)
    ks = [tower(x) for x in k]
    extra = None
    if n == 3:
        extra = lambda B: check_irreducibility_triple(B.trace(), ks[0], ks[1])  # noqa: E731
    B, Mk = induction_step(M, ks[-1], budget, extra)
    outer = pants_piece(B, Mk, M)
    Binv = B.inverse()
    if n == 3:
        _, m1, m2 = pants_from_A(Binv, ks[0], ks[1])
        inner = pants_piece(m1, m2.inverse(), Binv)
    else:
        inner = sphere_piece(ks[:-1], Binv, budget)
    return glue_pieces(inner, n, outer, 1)


def torus_2_trace_piece(M: Mat2, k, budget: int = DEFAULT_BUDGET) -> Piece:
    _, B, Mk, params = induction_step_N(M, k, budget)
    M = M.in_tower(B.tower)
    middle = pants_piece(M, B, Mk)
    cap = torus_1_piece(B.inverse(), nk_inverse_params(params), budget)
    return glue_pieces(cap, 1, middle, 2)


# --------------------------------------------------------------------------
# public constructions
# --------------------------------------------------------------------------

def _base(*values) -> FieldTower:
    return _work_tower(*values)


def forge_sphere(k: Sequence, M: Mat2, budget: int = DEFAULT_BUDGET) -> ForgeResult:
    base = _base(M, *k)
    return finish(sphere_piece(k, M, budget), base)


def forge_torus_2(M: Mat2, budget: int = DEFAULT_BUDGET) -> ForgeResult:
    base = _base(M)
    return finish(torus_2_piece(M, budget), base)


def forge_torus_1(C: Mat2, params=None, budget: int = DEFAULT_BUDGET) -> ForgeResult:
    base = _base(C)
    return finish(torus_1_piece(C, params, budget), base)


def forge_genus_boundary(g: int, M: Mat2, params=None, budget: int = DEFAULT_BUDGET) -> ForgeResult:
    base = _base(M)
    # for g >= 2 the glued curves carry tr M, which must then avoid E
    if g >= 2 and in_E(M.trace()):
        raise PreconditionError("tr M must lie outside E")
    return finish(genus_piece(g, M, params, budget), base)


def forge_torus_2_trace(M: Mat2, k, budget: int = DEFAULT_BUDGET) -> ForgeResult:
    base = _base(M, k)
    return finish(torus_2_trace_piece(M, k, budget), base)


def _standard_nk(tower: FieldTower, a: int = 0) -> tuple[Mat2, tuple]:
    phi = golden(tower)
    params = (tower(a), tower(1), phi)
    return make_NK(*params, check=False), params


def _degenerate(g: int, n: int, ks: list, tower: FieldTower) -> Piece:
    one, zero = tower(1), tower(0)
    if (g, n) == (1, 0):
        A = Mat2(tower(3), -one, one, zero)
        rep = Representation.build(1, 0, {"alpha1": A, "beta1": A.inverse()})
        return Piece(rep)
    if n == 0:
        return Piece(Representation.build(0, 0, {}))
    if n == 1:
        if ks[0] != 2:
            raise UnsupportedSurface("a once-punctured sphere only carries the trivial representation")
        return Piece(Representation.build(0, 1, {G1: Mat2.identity(tower)}))
    m1 = Mat2(ks[0], -one, one, zero)
    if n == 2:
        if ks[0] != ks[1]:
            raise UnsupportedSurface("the two traces of an annulus must agree")
        return Piece(Representation.build(0, 2, {G1: m1, G2: m1.inverse()}))
    # n == 3: zeta + 1/zeta = k3
    k3 = ks[2]
    zeta = (k3 + adjoin_sqrt(k3 * k3 - 4)) / 2
    m1 = m1.in_tower(zeta.tower)
    m2 = Mat2(zeta.tower(0), zeta, -zeta.inverse(), ks[1])
    return pants_piece(m1, m2, (m1 * m2).inverse())


def forge_any(g: int, n: int, k: Sequence = (), budget: int = DEFAULT_BUDGET) -> ForgeResult:
    if len(k) != n:
        raise PreconditionError(f"expected {n} boundary traces, got {len(k)}")
    base = _base(*k)
    ks = [base(x) for x in k]
    for x in ks:
        if not is_algebraic_integer(x):
            raise PreconditionError(f"boundary trace {x} is not integral")
    surface = SurfaceType(g, n)
    if surface.degenerate:
        piece = _degenerate(g, n, ks, base)
    elif n == 0:
        M, params = _standard_nk(base)
        piece = glue_pieces(
            torus_1_piece(M, params, budget), 1, genus_piece(g - 1, M.inverse(), nk_inverse_params(params), budget), 1
        )
    elif n == 1 and g == 1:
        C = solve_NK_for_trace(ks[0], check=False)
        piece = torus_1_piece(C, None, budget)
    elif n == 1 and not in_E(ks[0]):
        C = solve_NK_for_trace(ks[0], check=False)
        piece = genus_piece(g, C, None, budget)
    elif n == 1:
        M, params = _standard_nk(base)
        piece = glue_pieces(
            torus_2_trace_piece(M, ks[0], budget),
            1,
            genus_piece(g - 1, M.inverse(), nk_inverse_params(params), budget),
            1,
        )
    elif n == 2:
        piece = _two_punctures(g, ks, base, budget)
    elif g == 0:
        last = make_MK(ks[-1], 0, 1, check=False)
        piece = sphere_piece(ks[:-1], last, budget)
    else:
        M, params = _standard_nk(base)
        piece = glue_pieces(
            sphere_piece(ks, M, budget), n + 1, genus_piece(g, M.inverse(), nk_inverse_params(params), budget), 1
        )
    result = finish(piece, base)
    _check_result(result, ks)
    return result


def _two_punctures(g: int, ks: list, base: FieldTower, budget: int) -> Piece:
    for a in small_integers():
        if a > budget:
            break
        N, params = _standard_nk(base, a)
        trN = N.trace()
        if in_E(trN) or not check_irreducibility_triple(trN, ks[0], ks[1]):
            continue
        _, m1, m2 = pants_from_A(N, ks[0], ks[1])
        pants = pants_piece(m1, m2.inverse(), N.in_tower(m1.tower))
        return glue_pieces(pants, 3, genus_piece(g, N.inverse(), nk_inverse_params(params), budget), 1)
    raise BudgetExhausted("no NK matrix in the scan satisfied the pants condition")


MAX_ADDED_DEPTH = 2


def _check_result(result: ForgeResult, ks: list) -> None:
    rep = result.rep
    got = boundary_traces(rep)
    if tuple(got) != tuple(ks):
        raise ForgeError(f"boundary traces {got} differ from the request {ks}")
    if not rep.integral:
        raise ForgeError("forged representation is not integral")
    if result.added_depth > MAX_ADDED_DEPTH:
        raise ForgeError(f"forging added {result.added_depth} quadratic levels")


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def _elems(xs) -> list:
    return [elem_to_json(x) for x in xs]


def certificate_to_json(cert: GoodnessCertificate) -> dict:
    return {
        "surface": {"genus": cert.surface.genus, "punctures": cert.surface.punctures},
        "exceptional": cert.exceptional,
        "minus_identity": cert.minus_identity,
        "verdict": cert.verdict,
        "curves": [
            {
                "id": c.id,
                "word": None if c.word is None else word_to_json(c.word),
                "matrix": mat_to_json(c.matrix),
                "trace": elem_to_json(c.trace),
                "not_pm2": c.not_pm2,
                "not_in_E": c.not_in_E,
            }
            for c in cert.curves
        ],
        "pieces": [
            {
                "traces": _elems(p.traces),
                "q": elem_to_json(p.q),
                "irreducible": p.irreducible,
                "exempt": p.exempt,
            }
            for p in cert.pieces
        ],
        "subsurfaces": [
            {
                "curve": s.curve,
                "kind": s.kind,
                "a_index": s.a_index,
                "words": [word_to_json(w) for w in s.words],
                "matrices": [mat_to_json(m) for m in s.matrices],
                "point": _elems(s.point),
                "coefficients": _elems(s.coefficients),
            }
            for s in cert.subsurfaces
        ],
    }


def certificate_from_json(obj: dict, tower: FieldTower) -> GoodnessCertificate:
    """Parse a certificate; flags are recomputed, never read back."""
    el = lambda o: elem_from_json(tower, o)  # noqa: E731
    curves = []
    for c in obj["curves"]:
        w = None if c["word"] is None else word_from_json(c["word"])
        m = mat_from_json(tower, c["matrix"])
        rec = curve_record(c["id"], w, m)
        curves.append(CurveRecord(rec.id, w, m, el(c["trace"]), rec.not_pm2, rec.not_in_E))
    pieces = []
    for p in obj["pieces"]:
        rec = piece_record(tuple(el(t) for t in p["traces"]), p.get("exempt"))
        pieces.append(PieceRecord(rec.traces, el(p["q"]), rec.irreducible, rec.exempt))
    subs = []
    for s in obj["subsurfaces"]:
        subs.append(
            SubsurfaceRecord(
                s["curve"],
                s["kind"],
                tuple(word_from_json(w) for w in s["words"]),
                tuple(mat_from_json(tower, m) for m in s["matrices"]),
                TriplePoint(*(el(x) for x in s["point"])),
                tuple(el(x) for x in s["coefficients"]),
                int(s["a_index"]),
            )
        )
    surface = SurfaceType(int(obj["surface"]["genus"]), int(obj["surface"]["punctures"]))
    return GoodnessCertificate(
        surface,
        tuple(curves),
        tuple(pieces),
        tuple(subs),
        bool(obj.get("exceptional", False)),
        bool(obj.get("minus_identity", False)),
        None,
    )


def result_to_json(result: ForgeResult) -> dict:
    return {
        "representation": rep_to_json(result.rep),
        "certificate": certificate_to_json(result.certificate),
        "depth": {"base": result.base_depth, "added": result.added_depth},
    }


def result_from_json(obj: dict) -> ForgeResult:
    rep = rep_from_json(obj["representation"])
    cert = certificate_from_json(obj["certificate"], rep.tower)
    return ForgeResult(rep, cert, int(obj["depth"]["base"]), int(obj["depth"]["added"]))
