import itertools
import json
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfchar.exactalg import QQ, golden, with_sqrt
from surfchar.forge import forge_any
from surfchar.orbit import (
    TWIST_MOVES,
    VIETA_MOVES,
    MissingSubsurfaceRecords,
    SurfaceViolated,
    apply_move,
    box_search,
    density_evidence,
    evaluate,
    inverse_move,
    markoff_minus,
    mod_obstruction,
    on_surface,
    orbit_explore,
    report_to_json,
    s04,
    s11,
    torus,
)


def brute_mod(s, m):
    a, b, c, d = s.A, s.B, s.C, s.D
    return sum(
        1
        for x, y, z in itertools.product(range(m), repeat=3)
        if (x * x + y * y + z * z + s.sigma * x * y * z - a * x - b * y - c * z - d) % m == 0
    )


def brute_box(s, bound):
    r = range(-bound, bound + 1)
    return sorted(p for p in itertools.product(r, r, r) if on_surface(s, p))


# surfaces


def test_on_surface_examples():
    for n in (0, 3, 7):
        assert on_surface(torus(), (n, n, 2))
    assert on_surface(s11(-2), (0, 0, 0))
    assert on_surface(s11(0), (1, 1, 1))
    assert not on_surface(torus(), (1, 1, 1))


def test_s04_coefficients():
    s = s04(2, 2, 2, 2)
    assert (s.A, s.B, s.C, s.D) == (8, 8, 8, -28)
    assert on_surface(s, (2, 2, 2))


def test_describe():
    assert s11(-2).describe() == "S11(-2)"
    assert torus().describe() == "TORUS()"


# moves


def test_twist_examples():
    t = torus()
    assert apply_move(t, (3, 3, 2), "tx") == (3, 2, 3)
    assert apply_move(t, (3, 2, 3), "tx") == (3, 3, 7)


def test_vieta_example():
    assert apply_move(s11(-2), (3, 3, 3), "vz") == (3, 3, 6)


def test_move_off_surface_is_loud():
    with pytest.raises(SurfaceViolated):
        apply_move(torus(), (1, 1, 1), "vx")


def test_twist_needs_markoff_form():
    with pytest.raises(ValueError):
        apply_move(s04(0, 0, 0, 0), (0, 0, 0), "tx")


points = st.tuples(st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30))


@settings(max_examples=100, deadline=None)
@given(points, st.sampled_from(VIETA_MOVES + TWIST_MOVES))
def test_moves_invert_and_preserve(p, move):
    # put the surface through p so every move starts on it
    x, y, z = p
    s = markoff_minus(x * x + y * y + z * z - x * y * z)
    q = apply_move(s, p, move)
    assert apply_move(s, q, inverse_move(move)) == p
    if move in VIETA_MOVES:
        assert apply_move(s, q, move) == p


@settings(max_examples=50, deadline=None)
@given(points, st.tuples(*[st.integers(-3, 3)] * 4))
def test_s04_vieta_involutions(p, ks):
    s = s04(*ks)
    s = type(s)(s.form, s.sigma, s.A, s.B, s.C, s.D + evaluate(s, p), s.params)
    for move in VIETA_MOVES:
        q = apply_move(s, p, move)
        assert apply_move(s, q, move) == p


def test_moves_on_field_points():
    phi = golden(with_sqrt(QQ, 5))
    p = (phi, phi, 3 * phi)
    s = markoff_minus(evaluate(markoff_minus(0), p))
    q = apply_move(s, p, "tx")
    assert apply_move(s, q, "tx-") == p


# orbits


def test_torus_orbit_infinite():
    r = orbit_explore(torus(), (3, 3, 2), ["tx"], 20)
    assert r.stats["points"] >= 20
    assert r.stats["distinct_y"] >= 20
    assert not r.stats["finite"]
    assert all(on_surface(torus(), p) for p in r.points)
    growth = r.stats["growth"]
    assert all(b > a for a, b in zip(growth, growth[1:]))


def test_torus_orbit_finite():
    t = torus()
    assert apply_move(t, (0, 0, 2), "tx") == (0, 2, 0)
    assert apply_move(t, (0, 2, 0), "tx") == (0, 0, -2)
    r = orbit_explore(t, (0, 0, 2), ["tx"], 20)
    assert r.stats["finite"]
    assert r.stats["points"] == 4


def test_markoff_tree():
    s = s11(-2)
    r = orbit_explore(s, (3, 3, 3), VIETA_MOVES, 8)
    assert all(on_surface(s, p) for p in r.points)
    growth = r.stats["growth"]
    assert all(b > a for a, b in zip(growth, growth[1:]))
    # the maximum coordinate grows strictly along the tree, level by level
    seen, frontier, best = {(3, 3, 3)}, [(3, 3, 3)], 3
    for _ in range(8):
        nxt = []
        for p in frontier:
            for m in VIETA_MOVES:
                q = apply_move(s, p, m)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        level_max = max(max(q) for q in nxt)
        assert level_max > best
        best, frontier = level_max, nxt
    assert set(r.points) == seen


def test_bit_cap():
    r = orbit_explore(torus(), (3, 3, 2), ["tx"], 200, max_bits=64)
    assert r.stats["cap_hits"] > 0
    assert not r.stats["finite"]
    assert all(max(abs(v) for v in p).bit_length() <= 64 for p in r.points)


def test_orbit_independent_of_workers():
    s = s11(-2)
    one = orbit_explore(s, (3, 3, 3), VIETA_MOVES, 7)
    four = orbit_explore(s, (3, 3, 3), VIETA_MOVES, 7, workers=4)
    assert one == four


def test_seed_off_surface():
    with pytest.raises(SurfaceViolated):
        orbit_explore(torus(), (1, 1, 1), ["tx"], 3)


# integer points


def test_markoff_three_obstructed():
    s = s11(1)
    assert s.D == 3
    assert mod_obstruction(s, 9) == 0
    assert brute_mod(s, 9) == 0
    assert box_search(s, 50) == []


def test_markoff_zero_mod_three():
    assert mod_obstruction(s11(-2), 3) >= 1


@pytest.mark.parametrize(
    "surface,m",
    [(torus(), 2), (torus(), 5), (s11(-2), 3), (s11(1), 4), (s04(0, 1, 2, 3), 7), (markoff_minus(5), 6)],
)
def test_mod_obstruction_matches_brute_force(surface, m):
    assert mod_obstruction(surface, m) == brute_mod(surface, m)


def test_box_search_examples():
    pts = box_search(torus(), 10)
    for p in [(0, 0, 2), (3, 3, 2), (2, 2, 2)]:
        assert p in pts
    assert all(on_surface(torus(), p) for p in pts)
    s = box_search(s11(-2), 5)
    assert (0, 0, 0) in s and (3, 3, 3) in s


@pytest.mark.parametrize("surface", [torus(), s11(-2), s11(0), s04(1, 1, 1, 1), markoff_minus(7)])
def test_box_search_matches_brute_force(surface):
    assert box_search(surface, 6) == brute_box(surface, 6)


# density evidence


@pytest.mark.parametrize("g,n,ks", [(1, 1, (0,)), (0, 5, (1, 1, 1, 1, 1)), (2, 0, ())])
def test_density_counts(g, n, ks):
    report = density_evidence(forge_any(g, n, ks), depth=30)
    assert report.verdict
    assert len(report.curves) == 3 * g - 3 + n
    for c in report.curves:
        assert c.a_values >= 10 and c.transverse_values >= 10
    assert "not a proof" in report.label


def test_density_tampered_curve():
    r = forge_any(0, 5, (1, 1, 1, 1, 1))
    subs = list(r.certificate.subsurfaces)
    s = subs[1]
    point = list(s.point)
    point[s.a_index] = point[s.a_index].tower(2)
    subs[1] = replace(s, point=type(s.point)(*point))
    report = density_evidence(replace(r.certificate, subsurfaces=tuple(subs)))
    assert not report.verdict
    bad = [c for c in report.curves if not c.ok]
    assert [c.curve for c in bad] == [s.curve]


def test_density_needs_records():
    r = forge_any(1, 0, ())
    with pytest.raises(MissingSubsurfaceRecords):
        density_evidence(r)


def test_density_report_json_stable():
    r = forge_any(1, 1, (0,))
    a = json.dumps(report_to_json(density_evidence(r)), sort_keys=True)
    b = json.dumps(report_to_json(density_evidence(r, workers=4)), sort_keys=True)
    assert a == b
