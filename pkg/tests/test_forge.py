import json
from dataclasses import replace

import pytest

from helpers import M
from surfchar.exactalg import QQ, golden, imaginary_unit, in_E, is_algebraic_integer, with_sqrt
from surfchar.forge import (
    BudgetExhausted,
    CertificateInvalid,
    NotInFamilyMK,
    PreconditionError,
    UnsupportedSurface,
    certify_P_good,
    check_irreducibility_triple,
    curve_record,
    diagonal_pairs,
    forge_any,
    forge_genus_boundary,
    forge_sphere,
    forge_torus_1,
    forge_torus_2,
    forge_torus_2_trace,
    golden_powers,
    induction_step,
    induction_step_N,
    pants_from_A,
    piece_record,
    result_from_json,
    result_to_json,
)
from surfchar.sl2core import Mat2, commutator, family_membership, make_NK, solve_NK_for_trace
from surfchar.surfrep import (
    SurfaceType,
    boundary_traces,
    coords_04,
    coords_11,
    eval_word,
    relation_check,
)

Q5 = with_sqrt(QQ, 5)
PHI = golden(Q5)
A0 = M(1, 0, 1, 1)


def assert_valid(result, ks):
    rep = result.rep
    assert relation_check(rep).kind == "Identity"
    assert tuple(boundary_traces(rep)) == tuple(ks)
    assert all(is_algebraic_integer(e) for m in rep.images for e in m.entries())
    assert result.added_depth <= 2
    assert certify_P_good(result).verdict is True


# scan helpers


def test_golden_scan_order():
    assert golden_powers(Q5, 5) == [Q5(1), PHI, PHI**-1, PHI**2, PHI**-2]


def test_diagonal_pairs_order():
    assert list(diagonal_pairs("ab", "xy", 10)) == [("a", "x"), ("a", "y"), ("b", "x"), ("b", "y")]
    assert len(list(diagonal_pairs(range(10), range(10), 7))) == 7


# pants_from_A


def test_pants_from_A_adjoins_i():
    tower, m1, m2 = pants_from_A(A0, 0, 0)
    i = imaginary_unit(tower)
    assert m1 == Mat2(i, tower(0), tower(0), -i)
    assert m2 == Mat2(i, tower(0), i, -i)
    assert m2 == A0.in_tower(tower) * m1


def test_pants_from_A_rotation():
    A = M(0, -1, 1, 0)
    tower, m1, m2 = pants_from_A(A, 2, 0)
    assert m1.det() == 1 and m1.trace() == 2 and m2.trace() == 0
    assert m2 == A.in_tower(tower) * m1
    assert m1.is_integral()


def test_pants_from_A_nonunit():
    with pytest.raises(NotInFamilyMK):
        pants_from_A(M(1, 0, 2, 1), 0, 0)


# irreducibility


def test_irreducibility_triple():
    assert not check_irreducibility_triple(2, 2, 2)
    assert check_irreducibility_triple(0, 0, 0)
    assert check_irreducibility_triple(2, 2, 3)


# induction_step


def test_induction_step_example():
    B, Mk = induction_step(A0, 0)
    # v = 1, s = 1 gives tr B = 1 in E; the scan moves on to s = golden
    r5 = 2 * PHI - 1
    assert B.trace() == (3 * r5 - 5) / 2
    assert not in_E(B.trace())
    assert (A0.in_tower(B.tower) * B * Mk).is_identity()
    assert Mk.trace() == 0
    assert (A0.in_tower(B.tower) * B).trace() == 0
    assert family_membership(B, "MK")


def test_induction_step_rejects_E_candidate():
    first = []

    def record(B):
        first.append(B.trace())
        return True

    B, _ = induction_step(A0, 0, extra=record)
    assert first == [B.trace()]
    assert B.trace() != 1


def test_induction_step_traces_injective():
    seen = []

    def record(B):
        seen.append((B.c, B.trace()))
        return False

    with pytest.raises(BudgetExhausted):
        induction_step(A0, 0, budget=80, extra=record)
    for v in {c for c, _ in seen}:
        traces = [t for c, t in seen if c == v]
        assert len(set(traces)) == len(traces)
    assert max(sum(1 for c, _ in seen if c == v) for v in {c for c, _ in seen}) >= 10


# induction_step_N


def test_induction_step_N_needs_trace_outside_E():
    with pytest.raises(PreconditionError):
        induction_step_N(A0, 1)


def test_induction_step_N_example():
    A, _ = induction_step(A0, 0)
    tower, B, Mk, params = induction_step_N(A, 1)
    A = A.in_tower(tower)
    assert (A * B * Mk).is_identity()
    assert Mk.trace() == 1
    assert not in_E(B.trace())
    assert check_irreducibility_triple(A.trace(), B.trace(), 1)
    assert make_NK(*params) == B
    assert tower.depth <= A0.tower.depth + 2


def test_induction_step_N_coefficients_vary():
    """The quadratic for a in tr(A N(a,u,v)) = k changes with u."""
    A, _ = induction_step(A0, 0)
    k = 1

    def coefficients(u):
        f = [(A * make_NK(Q5(a), u, PHI, check=False)).trace() - k for a in (0, 1, 2)]
        lead = (f[2] - 2 * f[1] + f[0]) / 2
        return (lead, f[1] - f[0] - lead, f[0])

    sets = {tuple(x.coeffs for x in coefficients(u)) for u in golden_powers(Q5, 3)}
    assert len(sets) >= 2


# forge_sphere


def test_forge_sphere_four():
    r = forge_sphere((0, 0, 0), A0)
    assert r.rep.surface == SurfaceType(0, 4)
    assert_valid(r, (0, 0, 0, 2))
    assert r.rep.image("gamma4") == A0.in_tower(r.rep.tower)


def test_forge_sphere_five():
    N = make_NK(Q5(2), 1, PHI)
    r = forge_sphere((1, 1, 1, 1), N)
    assert r.rep.surface == SurfaceType(0, 5)
    assert len(r.certificate.curves) == 2
    assert all(c.not_pm2 and c.not_in_E for c in r.certificate.curves)
    assert_valid(r, (1, 1, 1, 1, N.trace()))


def test_forge_sphere_too_small():
    with pytest.raises(PreconditionError):
        forge_sphere((0, 0), A0)


# forge_torus_2


def test_forge_torus_2():
    r = forge_torus_2(A0)
    rep = r.rep
    assert rep.surface == SurfaceType(1, 2)
    assert relation_check(rep).kind == "Identity"
    a, b = rep.image("alpha1"), rep.image("beta1")
    assert commutator(a, b).is_identity()
    assert a.c.is_zero()
    lam = a.a
    assert a.trace() == lam + lam.inverse()
    assert not in_E(a.trace())
    assert rep.image("gamma1") == A0.in_tower(rep.tower)
    assert rep.image("gamma2") == A0.inverse().in_tower(rep.tower)
    assert certify_P_good(r).verdict


def test_golden_square_trace_outside_E():
    lam = PHI**2
    assert not in_E(lam + lam.inverse())


# forge_torus_1


def test_forge_torus_1_markoff():
    C = solve_NK_for_trace(-2)
    r = forge_torus_1(C)
    assert boundary_traces(r.rep) == (-2,)
    x, y, z = coords_11(r.rep.image("alpha1"), r.rep.image("beta1"))
    assert x * x + y * y + z * z - x * y * z == 0
    assert_valid(r, (-2,))


def test_forge_torus_1_exceptional():
    r = forge_torus_1(solve_NK_for_trace(2))
    assert r.certificate.exceptional
    cert = certify_P_good(r)
    assert cert.verdict
    assert not in_E(r.rep.image("beta1").trace())


@pytest.mark.parametrize("k", [-3, -1, 0, 1, 3, 5])
def test_forge_torus_1_rewritten_condition(k):
    r = forge_torus_1(solve_NK_for_trace(k))
    trA, trC = r.rep.image("beta1").trace(), r.rep.image("gamma1").trace()
    assert (trA * trA - (2 + trC)) * (2 - trC) != 0
    assert_valid(r, (k,))


# forge_genus_boundary


def test_forge_genus_one():
    r = forge_genus_boundary(1, solve_NK_for_trace(0))
    assert r.rep.surface == SurfaceType(1, 1)
    assert boundary_traces(r.rep) == (0,)


def test_forge_genus_two():
    m = solve_NK_for_trace(3)
    r = forge_genus_boundary(2, m)
    assert r.rep.surface == SurfaceType(2, 1)
    assert_valid(r, (3,))
    glued = r.certificate.curves[-1]
    assert glued.trace == 3 and glued.not_in_E


def test_forge_genus_rejects_E_trace():
    with pytest.raises(PreconditionError):
        forge_genus_boundary(2, solve_NK_for_trace(1))


# forge_torus_2_trace


def test_forge_torus_2_trace():
    B, _ = induction_step(A0, 0)
    r = forge_torus_2_trace(B, 1)
    assert r.rep.surface == SurfaceType(1, 2)
    assert_valid(r, (B.trace(), 1))
    assert all(c.not_in_E for c in r.certificate.curves)


def test_forge_torus_2_trace_needs_E():
    B, _ = induction_step(A0, 0)
    with pytest.raises(PreconditionError):
        forge_torus_2_trace(B, 3)


# forge_any


def test_forge_any_four_zeros():
    r = forge_any(0, 4, (0, 0, 0, 0))
    assert_valid(r, (0, 0, 0, 0))


def test_forge_any_closed_genus_two():
    r = forge_any(2, 0, ())
    assert r.rep.surface == SurfaceType(2, 0)
    assert_valid(r, ())
    assert len(r.certificate.curves) == 3


def test_forge_any_markoff():
    r = forge_any(1, 1, (-2,))
    x, y, z = coords_11(r.rep.image("alpha1"), r.rep.image("beta1"))
    assert x * x + y * y + z * z - x * y * z == 0


@pytest.mark.parametrize(
    "g,n,ks",
    [
        (0, 3, (0, 1, 3)),
        (0, 3, (2, 2, -1)),
        (1, 0, ()),
        (0, 2, (3, 3)),
        (0, 1, (2,)),
    ],
)
def test_forge_any_degenerate(g, n, ks):
    r = forge_any(g, n, ks)
    assert relation_check(r.rep).kind == "Identity"
    assert tuple(boundary_traces(r.rep)) == ks
    assert r.rep.integral


def test_forge_any_unsupported():
    with pytest.raises(UnsupportedSurface):
        forge_any(0, 1, (0,))
    with pytest.raises(UnsupportedSurface):
        forge_any(0, 2, (0, 1))


def test_forge_any_rejects_nonintegral():
    with pytest.raises(PreconditionError):
        forge_any(0, 4, (QQ(1) / 2, 0, 0, 0))


@pytest.mark.parametrize(
    "g,n,ks",
    [(1, 2, (0, 1)), (1, 3, (0, 1, 2)), (2, 1, (1,)), (2, 2, (3, -1)), (0, 6, (0, 1, 2, 3, -1, -2))],
)
def test_curve_and_piece_counts(g, n, ks):
    r = forge_any(g, n, ks)
    assert_valid(r, ks)
    assert len(r.certificate.curves) == 3 * g - 3 + n
    assert len(r.certificate.pieces) == 2 * g - 2 + n


@pytest.mark.parametrize("g,n,ks", [(1, 1, (0,)), (0, 5, (1, 1, 1, 1, 1)), (2, 0, ()), (1, 2, (2, 3))])
def test_subsurface_coordinates_consistent(g, n, ks):
    r = forge_any(g, n, ks)
    for s in r.certificate.subsurfaces:
        if s.kind == "11":
            x, y, z = coords_11(*s.matrices)
            assert (x, y, z) == tuple(s.point)
            k = commutator(*s.matrices).trace()
            assert x * x + y * y + z * z - x * y * z - 2 == k
        else:
            c = coords_04(*s.matrices)
            assert tuple(c.point) == tuple(s.point)
            assert tuple(c.coefficients) == tuple(s.coefficients)


def test_golden_traces():
    phi_bar = 1 - PHI
    r = forge_any(0, 4, (PHI, phi_bar, 0, 1))
    assert_valid(r, (PHI, phi_bar, 0, 1))


def test_forge_deterministic():
    a = json.dumps(result_to_json(forge_any(1, 2, (0, 1))), sort_keys=True)
    b = json.dumps(result_to_json(forge_any(1, 2, (0, 1))), sort_keys=True)
    assert a == b


# certify_P_good


def test_certify_forged():
    assert certify_P_good(forge_any(0, 4, (0, 0, 0, 0))).verdict is True


def test_certify_rejects_trace_two():
    cert = forge_any(0, 4, (0, 0, 0, 0)).certificate
    bad = curve_record("c1", None, M(1, 1, 0, 1))
    with pytest.raises(CertificateInvalid) as info:
        certify_P_good(replace(cert, curves=(bad,) + cert.curves[1:]))
    assert info.value.record is bad


def test_certify_rejects_reducible_piece():
    cert = forge_any(0, 4, (0, 0, 0, 0)).certificate
    bad = piece_record((QQ(2), QQ(2), QQ(2)))
    with pytest.raises(CertificateInvalid):
        certify_P_good(replace(cert, pieces=(bad,)))


def test_certify_rejects_wrong_word():
    r = forge_any(0, 4, (0, 1, 2, 3))
    cert = r.certificate
    c = cert.curves[0]
    moved = replace(c, word=c.word + (("gamma1", 1),))
    with pytest.raises(CertificateInvalid):
        certify_P_good(replace(cert, curves=(moved,)), r.rep)


def test_result_json_round_trip():
    r = forge_any(1, 2, (0, 1))
    back = result_from_json(json.loads(json.dumps(result_to_json(r))))
    assert back.rep == r.rep
    assert certify_P_good(back).verdict
    assert eval_word(back.rep, back.certificate.curves[0].word) == back.certificate.curves[0].matrix
