import itertools
from fractions import Fraction

import pytest

import svdyn as sv
from svdyn.errors import AdjacencyError, DomainError
from svdyn.rng import SplitMix64

from conftest import random_finite_system


def orbit_point(F, pts, flavor=sv.RIGHT):
    return sv.TruncatedOrbitPoint(F, flavor, tuple(pts))


# ---------------------------------------------------------------------------
# validation


def test_pseudo_orbit_strictness(line_map):
    assert sv.validate_pseudo_orbit(line_map, ["p0", "p2"], Fraction(3, 5))
    assert not sv.validate_pseudo_orbit(line_map, ["p0", "p2"], Fraction(1, 2))
    with pytest.raises(DomainError):
        sv.PseudoOrbit(line_map, ("p0", "p2"), Fraction(1, 2))


def test_orbits_are_pseudo_orbits_for_any_slack(line_map):
    seg = ["p0", "p1", "p2", "p2"]
    assert sv.validate_orbit(line_map, seg)
    assert sv.validate_pseudo_orbit(line_map, seg, Fraction(1, 1000))


def test_reversed_cycle_orbit_validates_under_inverse(cycle_map):
    seg = ["p0", "p1", "p2", "p0"]
    assert sv.validate_orbit(cycle_map, seg)
    assert sv.validate_orbit(cycle_map.invert(), seg[::-1])


def test_inverse_flavor_is_right_flavor_of_inverse_exhaustive():
    rng = SplitMix64(31)
    for _ in range(10):
        F = random_finite_system(rng, 2 + rng.next_below(3))
        if not F.is_onto():
            continue
        G = F.invert()
        pts = F.space.points
        for prefix in itertools.product(pts, repeat=4):
            inv_ok = all(prefix[i] in F.images[prefix[i + 1]] for i in range(3))
            right_ok = sv.validate_orbit(G, prefix)
            assert inv_ok == right_ok


# ---------------------------------------------------------------------------
# the orbit metric


def test_orbit_distance_identity(line_map):
    u = orbit_point(line_map, ["p0", "p1", "p2"])
    d = sv.orbit_distance(u, u)
    assert d.partial == 0
    assert d.tail_bound == Fraction(1, 4)


def test_orbit_distance_constant_sequences(two_point_identity):
    F = two_point_identity
    n = 5
    u = orbit_point(F, ["a"] * (n + 1))
    v = orbit_point(F, ["b"] * (n + 1))
    d = sv.orbit_distance(u, v)
    # geometric sum of 1/2^{k+1} over k = 0..n at distance 1
    assert d.partial == 1 - Fraction(1, 2 ** (n + 1))


def test_orbit_distance_single_coordinate(full_map):
    u = orbit_point(full_map, ["p0", "p1", "p2", "p2"])
    v = orbit_point(full_map, ["p0", "p1", "p2", "p2"])
    w = orbit_point(full_map, ["p0", "p1", "p0", "p2"])  # differs at k = 2
    assert sv.orbit_distance(u, v).partial == 0
    assert sv.orbit_distance(u, w).partial == Fraction(1) / 2 ** 3


def test_orbit_distance_mismatch_rejected(line_map):
    u = orbit_point(line_map, ["p0", "p1"])
    v = orbit_point(line_map, ["p0", "p1", "p2"])
    with pytest.raises(DomainError):
        sv.orbit_distance(u, v)


def test_projection_bound(sym_tent2):
    rng = SplitMix64(17)
    space = sym_tent2.space
    for _ in range(1000):
        a = sv.extend_orbit(sym_tent2, [space.sample(rng)], 9,
                            policy="seeded", seed=rng.next_u64())
        b = sv.extend_orbit(sym_tent2, [space.sample(rng)], 9,
                            policy="seeded", seed=rng.next_u64())
        u = orbit_point(sym_tent2, a.points)
        v = orbit_point(sym_tent2, b.points)
        d = sv.orbit_distance(u, v)
        for k in range(9):
            assert space.dist(u.prefix[k], v.prefix[k]) \
                <= 2 ** (k + 1) * (d.partial + d.tail_bound) + 1e-12


def test_truncation_error_bound(line_map):
    u = orbit_point(line_map, ["p0", "p1"] + ["p2"] * 15)
    v = orbit_point(line_map, ["p1", "p2"] + ["p2"] * 15)
    full = sv.orbit_distance(u, v)
    short = sv.orbit_distance(u.truncate(8), v.truncate(8))
    assert abs(full.partial - short.partial) <= Fraction(1, 2 ** 8)


# ---------------------------------------------------------------------------
# shifts and prepending


def test_shift_right_drops_head(line_map):
    u = orbit_point(line_map, ["p0", "p1", "p2"])
    assert sv.shift_right(u).prefix == ("p1", "p2")


def test_shift_fixed_point_is_identity_on_prefix(line_map):
    u = orbit_point(line_map, ["p2", "p2", "p2"])
    assert sv.shift_right(u).prefix == ("p2", "p2")


def test_prepend_then_shift_roundtrip(cycle_map):
    # inverse flavor: each entry lies in the image of its successor
    u = sv.TruncatedOrbitPoint(cycle_map, sv.INVERSE, ("p1", "p0", "p2"))
    v = sv.prepend_step(u, "p2")  # p2 in F(p1)
    assert sv.shift_right(v) == u
    with pytest.raises(AdjacencyError):
        sv.prepend_step(u, "p0")


def test_shift_left_mirrors_shift_right(line_map):
    u = sv.TruncatedOrbitPoint(line_map, sv.LEFT, ("p0", "p1", "p2"))
    assert sv.shift_left(u).prefix == ("p1", "p2")
    with pytest.raises(DomainError):
        sv.shift_right(u)


# ---------------------------------------------------------------------------
# generation and extension


def test_generate_is_deterministic_and_valid(line_map, sym_tent2):
    a = sv.generate_pseudo_orbit(line_map, Fraction(3, 5), 12, seed=4)
    b = sv.generate_pseudo_orbit(line_map, Fraction(3, 5), 12, seed=4)
    assert a.points == b.points
    assert sv.validate_pseudo_orbit(line_map, a.points, Fraction(3, 5))
    c = sv.generate_pseudo_orbit(sym_tent2, 0.05, 30, seed=4)
    assert sv.validate_pseudo_orbit(sym_tent2, c.points, 0.05)


def test_generate_below_min_slack_gives_exact_orbit(line_map):
    # positive slacks of the line system start at 1/2
    p = sv.generate_pseudo_orbit(line_map, Fraction(1, 2), 10, seed=8)
    assert sv.validate_orbit(line_map, p.points)


def test_extend_lexicographic_chain(line_map):
    seg = sv.extend_orbit(line_map, ["p0"], 4, policy="lexicographic")
    assert seg.points == ("p0", "p1", "p2", "p2")


def test_extend_constant_at_fixed_point(line_map):
    seg = sv.extend_orbit(line_map, ["p2"], 5, policy="lexicographic")
    assert seg.points == ("p2",) * 5


def test_extend_nearest_matches_exhaustive_min(full_map):
    anchor = ["p2", "p0", "p1", "p2"]
    seg = sv.extend_orbit(full_map, ["p2"], 4, policy="nearest", anchor=anchor)
    space = full_map.space
    for k in range(1, 4):
        options = full_map.images[seg.points[k - 1]]
        best = min(space.dist(y, anchor[k]) for y in options)
        assert space.dist(seg.points[k], anchor[k]) == best
