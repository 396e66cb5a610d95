"""Surface-group presentations, representations and gluing.

A word is a tuple of ``(generator, exponent)`` pairs with exponent +-1.
Generators are named ``alpha<i>``, ``beta<i>`` (genus pairs) and
``gamma<j>`` (punctures).  Every relator contains each puncture generator
exactly once with exponent +1, which is what gluing relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

from .exactalg import (
    FieldElem,
    FieldTower,
    QQ,
    common_tower,
    elem_to_json,
    tower_from_json,
    tower_to_json,
)
from .sl2core import Mat2, mat_from_json, mat_to_json, unify

Word = tuple  # tuple[tuple[str, int], ...]


class SurfaceError(ValueError):
    pass


class UnknownGenerator(SurfaceError):
    pass


class BoundaryMismatch(SurfaceError):
    pass


class RelationFail(SurfaceError):
    pass


class ProductNotIdentity(SurfaceError):
    pass


class CubicViolated(AssertionError):
    pass


@dataclass(frozen=True)
class SurfaceType:
    genus: int
    punctures: int

    def __post_init__(self):
        if self.genus < 0 or self.punctures < 0:
            raise SurfaceError("genus and puncture count must be non-negative")

    @property
    def complexity(self) -> int:
        return 3 * self.genus - 3 + self.punctures

    @property
    def degenerate(self) -> bool:
        return (self.genus == 0 and self.punctures <= 3) or (self.genus, self.punctures) == (1, 0)


# --------------------------------------------------------------------------
# words
# --------------------------------------------------------------------------

def alpha(i: int) -> str:
    return f"alpha{i}"


def beta(i: int) -> str:
    return f"beta{i}"


def gamma(j: int) -> str:
    return f"gamma{j}"


def generator_names(g: int, n: int) -> tuple[str, ...]:
    names = []
    for i in range(1, g + 1):
        names += [alpha(i), beta(i)]
    return tuple(names + [gamma(j) for j in range(1, n + 1)])


def standard_relator(g: int, n: int) -> Word:
    """[alpha1, beta1] ... [alpha_g, beta_g] gamma1 ... gamma_n."""
    w = []
    for i in range(1, g + 1):
        w += [(alpha(i), 1), (beta(i), 1), (alpha(i), -1), (beta(i), -1)]
    return tuple(w + [(gamma(j), 1) for j in range(1, n + 1)])


def word(*items) -> Word:
    """Build a word from names, with a trailing ``'^-1'`` marking inverses."""
    out = []
    for it in items:
        if isinstance(it, tuple):
            out.append(it)
        elif it.endswith("^-1"):
            out.append((it[:-3], -1))
        else:
            out.append((it, 1))
    return tuple(out)


def reduce_word(w: Sequence) -> Word:
    out: list = []
    for g, e in w:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def invert_word(w: Sequence) -> Word:
    return tuple((g, -e) for g, e in reversed(w))


def substitute(w: Sequence, table: dict) -> Word:
    """Replace each generator by a word (its inverse for exponent -1)."""
    out: list = []
    for g, e in w:
        img = table.get(g, ((g, 1),))
        out.extend(img if e == 1 else invert_word(img))
    return reduce_word(out)


def word_to_str(w: Sequence) -> str:
    return " ".join(g if e == 1 else f"{g}^-1" for g, e in w) or "1"


def word_to_json(w: Sequence) -> list:
    return [g if e == 1 else f"{g}^-1" for g, e in w]


def word_from_json(items: Sequence[str]) -> Word:
    return word(*items)


def rotate_to_end(w: Sequence, gen: str) -> Word:
    """Cyclic rotation of ``w`` whose final letter is ``gen`` (exponent +1)."""
    hits = [i for i, (g, e) in enumerate(w) if g == gen]
    if len(hits) != 1 or w[hits[0]][1] != 1:
        raise RelationFail(f"{gen} must occur exactly once, positively, in the relator")
    i = hits[0]
    return tuple(w[i + 1 :]) + tuple(w[: i + 1])


# --------------------------------------------------------------------------
# trace coordinates
# --------------------------------------------------------------------------

class TriplePoint(NamedTuple):
    x: object
    y: object
    z: object


def _tr(m: Mat2) -> FieldElem:
    return m.trace()


def coords_11(ra: Mat2, rb: Mat2) -> TriplePoint:
    """(tr a, tr b, tr ab), checked against the Fricke identity."""
    x, y, z = ra.trace(), rb.trace(), (ra * rb).trace()
    comm = ra * rb * ra.inverse() * rb.inverse()
    if x * x + y * y + z * z - x * y * z - 2 != comm.trace():
        raise CubicViolated("Fricke identity failed")
    return TriplePoint(x, y, z)


class Coords04(NamedTuple):
    point: TriplePoint
    coefficients: tuple  # (A, B, C, D)
    boundary: tuple  # (k1, k2, k3, k4)


def quartic_coefficients(k1, k2, k3, k4) -> tuple:
    a = k1 * k2 + k3 * k4
    b = k1 * k4 + k2 * k3
    c = k1 * k3 + k2 * k4
    d = 4 - (k1 * k1 + k2 * k2 + k3 * k3 + k4 * k4) - k1 * k2 * k3 * k4
    return (a, b, c, d)


def coords_04(m1: Mat2, m2: Mat2, m3: Mat2, m4: Mat2) -> Coords04:
    """(tr m1m2, tr m2m3, tr m1m3) for a four-holed sphere with m1m2m3m4 = I."""
    if not (m1 * m2 * m3 * m4).is_identity():
        raise ProductNotIdentity("boundary product is not the identity")
    ks = tuple(m.trace() for m in (m1, m2, m3, m4))
    coeffs = quartic_coefficients(*ks)
    x, y, z = (m1 * m2).trace(), (m2 * m3).trace(), (m1 * m3).trace()
    a, b, c, d = coeffs
    if x * x + y * y + z * z + x * y * z != a * x + b * y + c * z + d:
        raise CubicViolated("four-holed sphere cubic failed")
    return Coords04(TriplePoint(x, y, z), coeffs, ks)


# --------------------------------------------------------------------------
# representations
# --------------------------------------------------------------------------

class RelationStatus(NamedTuple):
    kind: str  # "Identity", "MinusIdentity" or "Fail"
    value: Mat2


@dataclass(frozen=True)
class Representation:
    surface: SurfaceType
    relator: Word
    generators: tuple
    images: tuple  # Mat2 per generator, same order
    tower: FieldTower = QQ
    integral: bool = False
    punctures: tuple = ()  # puncture generator names in boundary order

    @classmethod
    def build(
        cls,
        g: int,
        n: int,
        images: dict,
        relator: Word | None = None,
        check_integral: bool = True,
    ) -> "Representation":
        names = generator_names(g, n)
        missing = [x for x in names if x not in images]
        if missing:
            raise UnknownGenerator(f"missing images for {missing}")
        mats = [images[x] for x in names]
        if mats:
            mats = unify(*mats)
        tower = mats[0].tower if mats else QQ
        rep = cls(
            SurfaceType(g, n),
            relator if relator is not None else standard_relator(g, n),
            names,
            tuple(mats),
            tower,
            False,
            tuple(gamma(j) for j in range(1, n + 1)),
        )
        if check_integral:
            rep = rep.with_integral_flag()
        return rep

    def with_integral_flag(self) -> "Representation":
        flag = all(m.is_integral() for m in self.images)
        return Representation(
            self.surface, self.relator, self.generators, self.images, self.tower, flag, self.punctures
        )

    def image(self, name: str) -> Mat2:
        try:
            return self.images[self.generators.index(name)]
        except ValueError:
            raise UnknownGenerator(name) from None

    def image_map(self) -> dict:
        return dict(zip(self.generators, self.images))

    def map_entries(self, f: Callable[[FieldElem], FieldElem], tower: FieldTower) -> "Representation":
        return Representation(
            self.surface,
            self.relator,
            self.generators,
            tuple(m.map(f) for m in self.images),
            tower,
            self.integral,
            self.punctures,
        )


def eval_word(rep: Representation, w: Sequence) -> Mat2:
    table = rep.image_map()
    inverses: dict = {}
    result = Mat2.identity(rep.tower)
    for g, e in w:
        if g not in table:
            raise UnknownGenerator(g)
        if e == 1:
            m = table[g]
        else:
            m = inverses.get(g)
            if m is None:
                m = inverses[g] = table[g].inverse()
        result = result * m
    return result


def relation_check(rep: Representation) -> RelationStatus:
    value = eval_word(rep, rep.relator)
    if value.is_identity():
        return RelationStatus("Identity", value)
    if value.is_minus_identity():
        return RelationStatus("MinusIdentity", value)
    return RelationStatus("Fail", value)


def boundary_traces(rep: Representation) -> tuple:
    return tuple(rep.image(p).trace() for p in rep.punctures)


# --------------------------------------------------------------------------
# gluing
# --------------------------------------------------------------------------

class Gluing(NamedTuple):
    rep: Representation
    rename1: dict  # old generator -> word in the glued group
    rename2: dict
    embed1: Callable
    embed2: Callable
    curve: Word  # the glued curve, as rep1's puncture


def _renaming(rep: Representation, genus_offset: int, puncture_names: dict) -> dict:
    table = {}
    for i in range(1, rep.surface.genus + 1):
        table[alpha(i)] = ((alpha(i + genus_offset), 1),)
        table[beta(i)] = ((beta(i + genus_offset), 1),)
    for old, new in puncture_names.items():
        table[old] = ((new, 1),)
    return table


def _merge_towers(t1: FieldTower, t2: FieldTower):
    return common_tower(t1, t2)


def glue_with_maps(rep1: Representation, rep2: Representation, i: int, j: int) -> Gluing:
    """Glue puncture ``i`` of ``rep1`` to puncture ``j`` of ``rep2`` (1-based).

    Matching condition: rho1(gamma_i) * rho2(gamma_j) = I.  The glued relator
    is (rep1's relator rotated to end in gamma_i, gamma_i dropped) followed by
    the same for rep2; the deleted generators are rewritten as inverses of
    the rest of their own relators, so curve words stay valid.
    """
    p1, p2 = rep1.punctures[i - 1], rep2.punctures[j - 1]
    tower, emb1, emb2 = _merge_towers(rep1.tower, rep2.tower)
    m1 = rep1.image(p1).map(emb1)
    m2 = rep2.image(p2).map(emb2)
    if not (m1 * m2).is_identity():
        raise BoundaryMismatch(f"{p1} and {p2} images are not inverse to each other")

    g1, g2 = rep1.surface.genus, rep2.surface.genus
    rest1 = [p for p in rep1.punctures if p != p1]
    rest2 = [p for p in rep2.punctures if p != p2]
    names1 = {p: gamma(k + 1) for k, p in enumerate(rest1)}
    names2 = {p: gamma(len(rest1) + k + 1) for k, p in enumerate(rest2)}
    ren1 = _renaming(rep1, 0, names1)
    ren2 = _renaming(rep2, g1, names2)

    w1 = substitute(rotate_to_end(rep1.relator, p1)[:-1], ren1)
    w2 = substitute(rotate_to_end(rep2.relator, p2)[:-1], ren2)
    ren1[p1] = invert_word(w1)
    ren2[p2] = invert_word(w2)
    relator = w1 + w2

    g, n = g1 + g2, len(rest1) + len(rest2)
    images = {}
    for old, new in ren1.items():
        if old != p1:
            images[new[0][0]] = rep1.image(old).map(emb1)
    for old, new in ren2.items():
        if old != p2:
            images[new[0][0]] = rep2.image(old).map(emb2)
    names = generator_names(g, n)
    rep = Representation(
        SurfaceType(g, n),
        relator,
        names,
        tuple(images[x] for x in names),
        tower,
        rep1.integral and rep2.integral,
        tuple(gamma(k) for k in range(1, n + 1)),
    )
    status = relation_check(rep)
    if status.kind != "Identity":
        raise RelationFail(f"glued relator evaluates to {status.value}")
    return Gluing(rep, ren1, ren2, emb1, emb2, ren1[p1])


def glue(rep1: Representation, rep2: Representation, i: int, j: int) -> Representation:
    return glue_with_maps(rep1, rep2, i, j).rep


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def rep_to_json(rep: Representation) -> dict:
    return {
        "surface": {"genus": rep.surface.genus, "punctures": rep.surface.punctures},
        "relator": word_to_json(rep.relator),
        "generators": list(rep.generators),
        "punctures": list(rep.punctures),
        "tower": tower_to_json(rep.tower),
        "images": {g: mat_to_json(m) for g, m in zip(rep.generators, rep.images)},
        "integral": rep.integral,
        "boundary_traces": [elem_to_json(k) for k in boundary_traces(rep)],
    }


def rep_from_json(obj: dict) -> Representation:
    tower = tower_from_json(obj["tower"])
    surface = SurfaceType(int(obj["surface"]["genus"]), int(obj["surface"]["punctures"]))
    gens = tuple(obj["generators"])
    images = tuple(mat_from_json(tower, obj["images"][g]).in_tower(tower) for g in gens)
    return Representation(
        surface,
        word_from_json(obj["relator"]),
        gens,
        images,
        tower,
        bool(obj.get("integral", False)),
        tuple(obj.get("punctures", ())),
    )
