from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import M, sl2z
from surfchar.exactalg import QQ, in_E, with_sqrt
from surfchar.forge import PreconditionError, certify_P_good, forge_any
from surfchar.pgl2 import (
    MinusIRep,
    PGL2Rep,
    canonical_representative,
    close_puncture,
    f_invariant,
    forge_minus_I,
    lift_to_sl2,
    pgl2_to_json,
    project,
    verify_minus_I,
)
from surfchar.sl2core import Mat2, SingularMatrix, commutator, make_LK
from surfchar.surfrep import Representation, boundary_traces, coords_11, relation_check

QI5 = with_sqrt(with_sqrt(QQ, -1), 5)


def lk(a, b, c, d):
    return make_LK(*(QI5(x) for x in (a, b, c, d)))


# f invariant


def test_f_invariant_examples():
    assert f_invariant(Mat2.identity()) == 4
    assert f_invariant(M(1, 1, 0, 1) * QQ(7)) == 4
    assert f_invariant(M(0, -1, 1, 0)) == 0
    with pytest.raises(SingularMatrix):
        f_invariant(M(1, 1, 1, 1))


@settings(max_examples=50, deadline=None)
@given(sl2z(), st.fractions(min_value=-20, max_value=20).filter(lambda x: x != 0))
def test_f_invariant_scalar(m, lam):
    assert f_invariant(m * QQ(lam)) == f_invariant(m)


def test_canonical_representative():
    m = M(2, 4, -6, 8) * (QQ(-1) / 3)
    c = canonical_representative(m)
    assert c == M(1, 2, -3, 4)


# projection


def test_project_f_data():
    r = forge_any(0, 4, (0, 1, 2, 3))
    _, f = project(r.rep)
    assert f == (0, 1, 4, 9)


def test_project_ignores_puncture_sign():
    r = forge_any(0, 4, (0, 1, 2, 3)).rep
    images = r.image_map()
    images["gamma4"] = -images["gamma4"]
    flipped = Representation.build(0, 4, images, r.relator)
    assert project(flipped)[0] == project(r)[0]


def test_project_trivial():
    I = Mat2.identity()
    rep = Representation.build(0, 3, {"gamma1": I, "gamma2": I, "gamma3": I})
    assert project(rep)[1] == (4, 4, 4)


# lifting


@pytest.mark.parametrize("g,n,ks", [(0, 4, (0, 1, 2, 3)), (1, 1, (-2,)), (1, 2, (0, 3)), (0, 3, (1, 1, 1))])
def test_lift_round_trip(g, n, ks):
    r = forge_any(g, n, ks)
    p, f = project(r.rep)
    lifted = lift_to_sl2(p)
    assert lifted.branch in ("+", "-")
    assert relation_check(lifted.rep).kind == "Identity"
    assert tuple(t * t for t in boundary_traces(lifted.rep)) == tuple(f)
    assert lifted.sqrt_choice


def test_lift_identity_on_sl2():
    A, B = M(2, 1, 1, 1), M(1, 2, 0, 1)
    C = commutator(A, B).inverse()
    rep = Representation.build(1, 1, {"alpha1": A, "beta1": B, "gamma1": C})
    p = PGL2Rep(rep.surface, rep.relator, rep.generators, rep.images, rep.tower, rep.punctures)
    lifted = lift_to_sl2(p)
    assert lifted.branch == "+"
    assert lifted.classification == "Identity"
    assert lifted.rep.images == rep.images


def test_lift_flips_last_puncture():
    A, B = M(2, 1, 1, 1), M(1, 2, 0, 1)
    C = -commutator(A, B).inverse()
    rep = Representation.build(1, 1, {"alpha1": A, "beta1": B, "gamma1": C})
    p = PGL2Rep(rep.surface, rep.relator, rep.generators, rep.images, rep.tower, rep.punctures)
    lifted = lift_to_sl2(p)
    assert lifted.branch == "-"
    assert lifted.flipped == "gamma1"
    assert relation_check(lifted.rep).kind == "Identity"


def test_lift_closed_minus_identity():
    point = forge_minus_I(1, lk(1, 1, 1, 2))
    closed = close_puncture(point.rep)
    lifted = lift_to_sl2(closed)
    assert lifted.classification == "MinusIdentity"
    assert isinstance(lifted.rep, MinusIRep)
    assert verify_minus_I(lifted.rep)


def test_lift_needs_sqrt_of_det():
    # det 2 images: lifting adjoins sqrt(2)
    A = M(1, 1, -1, 1)
    rep = Representation.build(1, 0, {"alpha1": A, "beta1": A})
    p = PGL2Rep(rep.surface, rep.relator, rep.generators, rep.images, rep.tower, rep.punctures)
    lifted = lift_to_sl2(p)
    assert all(m.det() == 1 for m in lifted.rep.images)
    assert lifted.classification == "Identity"


def test_pgl2_json():
    p, _ = project(forge_any(0, 4, (0, 1, 2, 3)).rep)
    data = pgl2_to_json(p)
    assert set(data["determinants"]) == set(p.generators)
    assert len(data["f_data"]) == 4


# -I monodromy


def test_minus_I_genus_one():
    r = forge_minus_I(1, lk(1, 1, 1, 2))
    assert verify_minus_I(r)
    rep = r.rep
    assert coords_11(rep.image("alpha1"), rep.image("beta1")) == (0, 0, 0)
    assert boundary_traces(rep) == (-2,)


def test_minus_I_genus_two():
    m = lk(1, 1, 1, 2)
    assert m.trace() == 6
    r = forge_minus_I(2, m)
    assert verify_minus_I(r)
    assert boundary_traces(r.rep) == (-2,)
    assert r.gamma_trace == 6
    cert = certify_P_good(r.certificate, r.rep)
    assert cert.verdict and cert.minus_identity


def test_minus_I_genus_three():
    r = forge_minus_I(3, lk(1, 2, 1, 3))
    assert verify_minus_I(r)
    assert certify_P_good(r.certificate, r.rep).verdict


def test_minus_I_needs_trace_outside_E():
    m = lk(1, 0, 1, 1)
    assert in_E(m.trace())
    with pytest.raises(PreconditionError):
        forge_minus_I(2, m)


def test_minus_I_distinct_gamma_traces():
    traces = set()
    for b in range(1, 13):
        r = forge_minus_I(2, lk(1, b, 1, b + 1))
        assert verify_minus_I(r)
        traces.add(r.gamma_trace)
    assert len(traces) >= 10


def test_verify_minus_I_tampering():
    r = forge_minus_I(2, lk(1, 1, 1, 2))
    rep = r.rep
    images = list(rep.images)
    k = rep.generators.index("gamma1")
    images[k] = -images[k]
    assert not verify_minus_I(replace(r, rep=replace(rep, images=tuple(images))))
    # a half-integral conjugate keeps the relation but breaks integrality
    P = Mat2(rep.tower(2), rep.tower(0), rep.tower(0), rep.tower(1))
    conj = tuple(P * m * P.inverse() for m in rep.images)
    assert not verify_minus_I(replace(r, rep=replace(rep, images=conj)))
