import itertools
from fractions import Fraction

import pytest

import svdyn as sv
from svdyn.errors import ConstructionError, DomainError, PreconditionError
from svdyn.rng import SplitMix64

from conftest import random_finite_system
from oracles import brute_modulus


# ---------------------------------------------------------------------------
# evaluation


def test_folded_doubling_pointwise(folded):
    assert folded.value_list(1.0) == (0.0, 2.0)
    assert folded.value_list(0.5) == (1.0,)
    assert folded.value_list(1.5) == (1.0,)


def test_eval_set_examples(folded, full_map):
    image = folded.eval_set(folded.space.union([(0.0, 0.5)]))
    assert image.segments == ((1.0, 2.0),)
    # singleton set evaluation equals pointwise evaluation
    assert folded.eval_set(folded.space.union([(1.0, 1.0)])) == folded.eval(1.0)
    carrier = full_map.space.carrier_set()
    assert full_map.eval_set(full_map.space.subset(["p0"])) == carrier


def test_preimage_examples(folded, line_map):
    pre = folded.preimage(folded.space.union([(0.0, 0.0)]))
    assert pre.segments == ((1.0, 1.0), (2.0, 2.0))
    carrier = line_map.space.carrier_set()
    assert line_map.preimage(carrier) == carrier
    # duality on the finite fixture, exhaustively
    for x in line_map.space.points:
        for y in line_map.space.points:
            lhs = y in line_map.eval(x)
            pre_y = line_map.preimage(line_map.space.subset([y]))
            rhs = pre_y is not None and x in pre_y
            assert lhs == rhs


def test_invert_finite_cycle(cycle_map):
    inv = cycle_map.invert()
    assert inv.images == {"p1": ("p0",), "p2": ("p1",), "p0": ("p2",)}
    again = inv.invert()
    assert again.images == cycle_map.images


def test_invert_requires_onto(line_space):
    F = sv.FiniteRelation(line_space, {"p0": ["p1"], "p1": ["p1"], "p2": ["p1"]})
    with pytest.raises(PreconditionError):
        F.invert()


def test_invert_folded_doubling(folded):
    G = folded.invert()
    assert G.value_list(0.0) == (1.0, 2.0)
    assert G.value_list(2.0) == (0.0, 1.0)
    # double inversion returns the original pointwise on a grid
    for k in range(41):
        x = 2.0 * k / 40.0
        assert folded.invert().invert().value_list(x) == pytest.approx(
            folded.value_list(x))


def test_double_inversion_on_random_relations():
    rng = SplitMix64(2024)
    for _ in range(25):
        F = random_finite_system(rng, 2 + rng.next_below(4))
        if not F.is_onto():
            continue
        assert F.invert().invert().images == F.images


def test_iterate_examples(line_map, folded):
    assert line_map.iterate(1).images == line_map.images
    assert line_map.iterate(2).images["p0"] == ("p2",)
    assert line_map.iterate(0).images["p0"] == ("p0",)
    with pytest.raises(DomainError):
        line_map.iterate(-1)
    two = folded.iterate_eval(0.5, 2)
    assert two == folded.space.union([(0.0, 0.0), (2.0, 2.0)])


def test_iterate_composes(line_map):
    lhs = line_map.iterate(3).images
    mid = line_map.iterate(2)
    rhs = {p: tuple(sorted({z for y in mid.images[p]
                            for z in line_map.images[y]},
                           key=line_map.space.index.get))
           for p in line_map.space.points}
    assert lhs == rhs


def test_eval_set_distributes_over_components(folded):
    space = folded.space
    A = space.union([(0.0, 0.2)])
    B = space.union([(1.4, 1.6)])
    both = space.union([(0.0, 0.2), (1.4, 1.6)])
    merged = space.union(list(folded.eval_set(A).segments)
                         + list(folded.eval_set(B).segments))
    assert folded.eval_set(both) == merged


# ---------------------------------------------------------------------------
# topology predicates


def test_folded_doubling_predicates(folded):
    assert folded.is_usc()
    assert not folded.is_lsc()
    assert not folded.is_continuous()
    assert folded.is_open()
    assert folded.is_onto()
    assert folded.is_closed()


def test_symmetrized_tent_predicates(sym_tent2):
    assert sym_tent2.is_continuous()
    assert sym_tent2.is_open()
    assert sym_tent2.is_onto()


def test_finite_relations_trivially_continuous(line_map):
    assert line_map.is_usc() and line_map.is_lsc()
    assert line_map.is_continuous() and line_map.is_open()


def test_identity_map_open():
    assert sv.identity_map(0.0, 1.0).is_open()


def test_tent_is_open_at_the_boundary_peak(tent2):
    # the peak value 2 sits on the carrier boundary, so the image of a
    # neighborhood of the turning point is relatively open
    assert tent2.is_open()
    assert tent2.is_continuous()


def test_midslope_tent_is_not_open():
    assert not sv.tent_family(1.5).is_open()


def test_dropped_limit_breaks_usc():
    space = sv.IntervalSpace.interval(0.0, 2.0)
    F = sv.PiecewiseLinear(
        space,
        [(0.0, 1.0, ((1.0, 0.0),)), (1.0, 2.0, ((1.0, 0.0),))],
        [(1.0, (0.0,))])
    assert not F.is_usc()
    assert not F.is_closed()


def test_open_iff_inverse_continuous_on_corpus(folded, sym_tent2):
    ident = sv.identity_map(0.0, 2.0)
    for F in (folded, sym_tent2, ident):
        assert F.is_open() == F.invert().is_continuous()


# ---------------------------------------------------------------------------
# constructors


def test_tent_values(tent2):
    assert tent2.value_list(1.0) == (2.0,)
    assert tent2.value_list(2.0) == (0.0,)
    with pytest.raises(DomainError):
        sv.tent_family(1.0)


def test_symmetrize_values(sym_tent2):
    assert sym_tent2.value_list(0.5) == (-1.0, 1.0)
    assert sym_tent2.value_list(0.0) == (0.0,)
    rng = SplitMix64(5)
    for _ in range(100):
        x = (rng.next_float() - 0.5) * 4.0
        assert sym_tent2.value_list(x) == sym_tent2.value_list(-x)


def test_symmetrize_positive_gap_carrier():
    space = sv.IntervalSpace.interval(1.0, 2.0)
    f = sv.PiecewiseLinear(space, [(1.0, 2.0, ((-1.0, 3.0),))])  # 3 - x
    S = sv.symmetrize(f)
    assert S.space.components == ((-2.0, -1.0), (1.0, 2.0))
    assert S.value_list(1.5) == (-1.5, 1.5)


def test_escaping_image_rejected_at_construction():
    # maps are self-maps of their carrier, so an image escaping [a, b] is
    # refused before symmetrize could ever see it
    space = sv.IntervalSpace.interval(0.0, 1.0)
    with pytest.raises(ConstructionError):
        sv.PiecewiseLinear(space, [(0.0, 1.0, ((2.0, 0.0),))])


def test_fiber_map_examples(tent2, line_space):
    F = sv.fiber_map(tent2)
    assert F.value_list(0.5) == (0.5, 1.5)
    assert F.value_list(1.0) == (1.0,)
    ident = sv.identity_map(0.0, 1.0)
    FI = sv.fiber_map(ident)
    assert FI.value_list(0.3) == (0.3,)
    assert FI.is_continuous()
    f = sv.FiniteRelation(line_space,
                          {"p0": ["p2"], "p1": ["p2"], "p2": ["p0"]})
    fib = sv.fiber_map(f)
    assert fib.images["p0"] == ("p0", "p1")


# ---------------------------------------------------------------------------
# continuity moduli


def test_modulus_exact_on_finite(line_map, two_point_identity):
    w = sv.modulus(line_map, Fraction(1, 4))
    assert w == brute_modulus(line_map, Fraction(1, 4))
    assert sv.modulus(two_point_identity, Fraction(1, 2)) == 1


def test_modulus_matches_oracle_on_random_relations():
    rng = SplitMix64(99)
    for _ in range(20):
        F = random_finite_system(rng, 2 + rng.next_below(3))
        for eta in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
            assert sv.modulus(F, eta) == brute_modulus(F, eta)


def test_modulus_lipschitz_bound(sym_tent2):
    assert sv.modulus(sym_tent2, 0.2) == pytest.approx(0.05)


def test_modulus_requires_continuity(folded):
    with pytest.raises(PreconditionError):
        sv.modulus(folded, 0.1)


def test_modulus_chain_shape(sym_tent2):
    chain = sv.modulus_chain(sym_tent2, 0.1)
    assert 2.0 ** -chain.depth < 0.05
    assert all(d < 0.1 / 4 for d in chain.deltas)
    assert all(a < b for a, b in zip(chain.deltas, chain.deltas[1:]))


def test_modulus_chain_links_hold_on_samples(sym_tent2):
    chain = sv.modulus_chain(sym_tent2, 0.1)
    space = sym_tent2.space
    rng = SplitMix64(7)
    for _ in range(1000):
        i = rng.next_below(len(chain.deltas))
        x = space.sample(rng)
        r = chain.deltas[i] / space.scale
        lo = max(space.components[0][0], x - r)
        hi = min(space.components[-1][1], x + r)
        y = lo + rng.next_float() * (hi - lo)
        if space.dist(x, y) < chain.deltas[i]:
            gap = space.hausdorff(sym_tent2.eval(x), sym_tent2.eval(y))
            assert gap < chain.link_target(i)


def test_modulus_chain_exact_on_finite(line_map):
    chain = sv.modulus_chain(line_map, Fraction(1, 5))
    for i, d in enumerate(chain.deltas):
        target = chain.link_target(i)
        for x in line_map.space.points:
            for y in line_map.space.points:
                if line_map.space.dist(x, y) < d:
                    gap = line_map.space.hausdorff(line_map.eval(x),
                                                   line_map.eval(y))
                    assert gap < target
