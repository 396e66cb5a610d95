"""PGL2 side: the tr^2/det invariant, projection, lifting and -I monodromy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .exactalg import (
    FieldElem,
    FieldTower,
    adjoin_sqrt,
    elem_to_json,
    embed_prefix,
    imaginary_unit,
    in_E,
    tower_to_json,
    with_sqrt,
)
from .forge import (
    DEFAULT_BUDGET,
    BudgetExhausted,
    CurveData,
    GoodnessCertificate,
    PantsData,
    Piece,
    PreconditionError,
    build_certificate,
    check_irreducibility_triple,
    glue_pieces,
    golden_powers,
    pants_piece,
    torus_2_piece,
)
from .sl2core import MissingI, Mat2, SingularMatrix, family_membership, lk_has_i, mat_to_json
from .surfrep import (
    Representation,
    SurfaceType,
    TriplePoint,
    coords_11,
    eval_word,
    generator_names,
    relation_check,
    standard_relator,
    word,
    word_to_json,
)


def f_invariant(m: Mat2) -> FieldElem:
    det = m.det()
    if det.is_zero():
        raise SingularMatrix("f is undefined on singular matrices")
    t = m.trace()
    return t * t / det


# --------------------------------------------------------------------------
# PGL2 representations
# --------------------------------------------------------------------------

def canonical_representative(m: Mat2) -> Mat2:
    """Scale by a rational so coefficients are coprime integers, first nonzero positive."""
    coeffs = [c for e in m.entries() for c in e.coeffs]
    den = reduce(math.lcm, (Fraction(c).denominator for c in coeffs), 1)
    ints = [int(c * den) for c in coeffs]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        raise SingularMatrix("zero matrix has no projective class")
    lead = next(c for c in ints if c != 0)
    scale = Fraction(den, g) * (1 if lead > 0 else -1)
    return m * m.tower(scale)


@dataclass(frozen=True)
class PGL2Rep:
    surface: SurfaceType
    relator: tuple
    generators: tuple
    images: tuple
    tower: FieldTower
    punctures: tuple

    def image(self, name: str) -> Mat2:
        return self.images[self.generators.index(name)]

    def f_data(self) -> tuple:
        return tuple(f_invariant(self.image(p)) for p in self.punctures)

    def relator_is_scalar(self) -> bool:
        value = Mat2.identity(self.tower)
        for g, e in self.relator:
            m = self.image(g)
            value = value * (m if e == 1 else m.inverse())
        return value.is_scalar()


def project(rep: Representation) -> tuple[PGL2Rep, tuple]:
    images = tuple(canonical_representative(m) for m in rep.images)
    p = PGL2Rep(rep.surface, rep.relator, rep.generators, images, rep.tower, rep.punctures)
    return p, p.f_data()


def pgl2_to_json(p: PGL2Rep) -> dict:
    return {
        "surface": {"genus": p.surface.genus, "punctures": p.surface.punctures},
        "relator": word_to_json(p.relator),
        "generators": list(p.generators),
        "punctures": list(p.punctures),
        "tower": tower_to_json(p.tower),
        "images": {g: mat_to_json(m) for g, m in zip(p.generators, p.images)},
        "determinants": {g: elem_to_json(m.det()) for g, m in zip(p.generators, p.images)},
        "f_data": [elem_to_json(f) for f in p.f_data()],
    }


# --------------------------------------------------------------------------
# -I monodromy
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MinusIRep:
    """A once-punctured representation whose puncture image is exactly -I."""

    rep: Representation
    certificate: GoodnessCertificate | None = None
    gamma_curve: str | None = None
    delta_curve: str | None = None

    @property
    def gamma_trace(self) -> FieldElem | None:
        if self.certificate is None or self.gamma_curve is None:
            return None
        return next(c.trace for c in self.certificate.curves if c.id == self.gamma_curve)


def verify_minus_I(r: MinusIRep) -> bool:
    rep = r.rep
    if rep.surface.punctures != 1:
        return False
    if not rep.image(rep.punctures[0]).is_minus_identity():
        return False
    if relation_check(rep).kind != "Identity":
        return False
    return all(m.is_integral() for m in rep.images)


def close_puncture(rep: Representation) -> PGL2Rep:
    """Drop a scalar puncture image, giving the closed-surface PGL2 class."""
    if rep.surface.punctures != 1 or not rep.image(rep.punctures[0]).is_scalar():
        raise PreconditionError("needs a single puncture with scalar monodromy")
    g = rep.surface.genus
    names = generator_names(g, 0)
    images = tuple(canonical_representative(rep.image(x)) for x in names)
    return PGL2Rep(SurfaceType(g, 0), standard_relator(g, 0), names, images, rep.tower, ())


# --------------------------------------------------------------------------
# lifting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftResult:
    rep: object  # Representation, or MinusIRep for a closed surface on -I
    branch: str  # "+" or "-"
    classification: str  # value of the relator before normalization
    flipped: str | None
    sqrt_choice: str = "principal root of each determinant"


def lift_to_sl2(p: PGL2Rep, signs: dict | None = None) -> LiftResult:
    """Scale every image by 1/sqrt(det); fix a -I relator by flipping the last puncture.

    ``signs`` optionally negates chosen generator lifts.
    """
    signs = signs or {}
    tower = p.tower
    roots = []
    for m in p.images:
        r = adjoin_sqrt(embed_prefix(m.det(), tower))
        tower = r.tower
        roots.append(r)
    lifted = {}
    for name, m, r in zip(p.generators, p.images, roots):
        r = embed_prefix(r, tower)
        s = signs.get(name, 1)
        lifted[name] = m.in_tower(tower) * (r.inverse() * s)
    rep = Representation.build(p.surface.genus, p.surface.punctures, lifted, p.relator)
    status = relation_check(rep)
    if status.kind == "Identity":
        return LiftResult(rep, "+", "Identity", None)
    if status.kind != "MinusIdentity":
        raise AssertionError("lifted relator is not +-I; the input was not a PGL2 representation")
    if rep.surface.punctures == 0:
        g = rep.surface.genus
        images = dict(lifted)
        images["gamma1"] = -Mat2.identity(tower)
        filled = Representation.build(g, 1, images)
        return LiftResult(MinusIRep(filled), "-", "MinusIdentity", None)
    last = rep.punctures[-1]
    lifted[last] = -lifted[last]
    rep = Representation.build(p.surface.genus, p.surface.punctures, lifted, p.relator)
    assert relation_check(rep).kind == "Identity"
    return LiftResult(rep, "-", "MinusIdentity", last)


# --------------------------------------------------------------------------
# forging with -I at the puncture
# --------------------------------------------------------------------------

def _lk_params(M: Mat2, params) -> tuple:
    if params is not None:
        return tuple(M.tower(x) for x in params)
    mem = family_membership(M, "LK")
    if not mem:
        raise PreconditionError("matrix is not in LK")
    return mem.params


def lk_inverse_params(params: tuple) -> tuple:
    a, b, c, d = params
    return (-a, b, c, -d)


def lk_negative_params(params: tuple) -> tuple:
    a, b, c, d = params
    return (-b, a, -d, c)


def _minus_tower(*mats: Mat2) -> FieldTower:
    tower = mats[0].tower
    for m in mats[1:]:
        if tower.is_prefix_of(m.tower):
            tower = m.tower
    if not lk_has_i(tower):
        raise MissingI("the working tower must contain sqrt(-1)")
    return with_sqrt(tower, 5)


def torus_1_L_piece(C: Mat2, params=None, budget: int = DEFAULT_BUDGET) -> Piece:
    """Once-punctured torus with monodromy C in LK, as a commutator with diag(i, -i)."""
    a, b, c, d = _lk_params(C, params)
    tower = _minus_tower(C, a)
    C = C.in_tower(tower)
    a, b, c, d = (tower(x) for x in (a, b, c, d))
    i = imaginary_unit(tower)
    X = Mat2(a, b, c, d)
    D = Mat2.diag(i, -i)
    trC = C.trace()
    for lam in golden_powers(tower, budget):
        A = X * Mat2.diag(lam, lam.inverse())
        trA = A.trace()
        if in_E(trA) or not check_irreducibility_triple(trA, trA, trC):
            continue
        rep = Representation.build(1, 1, {"alpha1": D, "beta1": A, "gamma1": C})
        assert relation_check(rep).kind == "Identity"
        wa, wb = word("alpha1"), word("beta1")
        conj = word("alpha1", "beta1", "alpha1^-1")
        return Piece(
            rep,
            [CurveData(wb, "11", (wa, wb), 1)],
            [PantsData((conj, word("beta1^-1"), word("gamma1")))],
            {"gamma1": (conj, word("beta1^-1"))},
        )
    raise BudgetExhausted("no lambda in the scan gave an admissible torus")


def genus_L_piece(g: int, M: Mat2, params=None, budget: int = DEFAULT_BUDGET) -> Piece:
    params = _lk_params(M, params)
    if g == 1:
        return torus_1_L_piece(M, params, budget)
    return glue_pieces(
        torus_2_piece(M, budget, require_mk=False), 2, genus_L_piece(g - 1, M, params, budget), 1
    )


def minus_I_point(tower: FieldTower) -> MinusIRep:
    """The genus-one representation with [A, B] = -I: coordinates (0, 0, 0)."""
    i = imaginary_unit(tower)
    one, zero = tower(1), tower(0)
    A = Mat2.diag(i, -i)
    B = Mat2(zero, one, -one, zero)
    rep = Representation.build(1, 1, {"alpha1": A, "beta1": B, "gamma1": -Mat2.identity(tower)})
    assert coords_11(A, B) == TriplePoint(0, 0, 0)
    cert = GoodnessCertificate(rep.surface, (), (), (), False, True, None)
    return MinusIRep(rep, cert)


def forge_minus_I(g: int, M: Mat2, params=None, budget: int = DEFAULT_BUDGET) -> MinusIRep:
    """Genus g, one puncture with monodromy -I, and a separating curve with monodromy M."""
    if g < 1:
        raise PreconditionError("genus must be at least 1")
    tower = _minus_tower(M)
    M = M.in_tower(tower)
    if g == 1:
        return minus_I_point(tower)
    if in_E(M.trace()):
        raise PreconditionError("tr M must lie outside E")
    params = _lk_params(M, params)
    minus_I = -Mat2.identity(tower)
    # pants: gamma' = M, delta' = -M^-1, puncture = -I
    pants = pants_piece(M, -M.inverse(), minus_I)
    inner = genus_L_piece(g - 1, M.inverse(), lk_inverse_params(params), budget)
    first = glue_pieces(pants, 1, inner, 1)
    gamma_index = len(first.curves)
    cap = torus_1_L_piece(-M, lk_negative_params(params), budget)
    # after the first gluing the pants' delta' is the first puncture
    whole = glue_pieces(first, 1, cap, 1)
    delta_index = len(whole.curves)
    cert = build_certificate(whole, minus_identity=True)
    rep = whole.rep.with_integral_flag()
    return MinusIRep(rep, cert, f"c{gamma_index}", f"c{delta_index}")
