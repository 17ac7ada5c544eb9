"""Constructive transfer between a system and its orbit-space dynamics.

Each operation here mechanizes a proof-shaped construction and returns the
built object together with the numerically re-validated bounds it claims:

* `match_orbit`: given nearby heads, build an orbit prefix through one head
  that stays close (in the weighted orbit metric) to a given prefix
  through the other, by greedy nearest-image selection along a modulus
  chain.
* `lift_pseudo_orbit`: turn a pseudo-orbit of the base system into a
  pseudo-orbit of the shift on truncated orbit prefixes, built backward by
  matching and head-prepending.
* `transfer_shadowing_down` / `transfer_shadowing_up`: move a shadowing
  witness between the base system and the shift level, recording the
  per-step error recursion.
* `shadow_inverse`: shadow a pseudo-orbit of the inverse map by reversing,
  shadowing forward, and reversing the witness.
* `lift_inverse`: the inverse-flavor lift used for the prepend dynamics on
  backward orbit sequences (requires the map to be usc, onto, and open).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import (ConsistencyError, DomainError, PreconditionError)
from .orbits import (DEFAULT_DEPTH, INVERSE, RIGHT, OrbitDistance,
                     OrbitSegment, PseudoOrbit, TruncatedOrbitPoint,
                     extend_orbit, orbit_distance, prepend_head, prepend_step,
                     shift_right, validate_pseudo_orbit)
from .shadowing import (SHADOWED, decide_finite_shadowing,
                        max_shadowing_slack)
from .space import TOL, as_fraction
from .svmap import (FiniteRelation, ModulusChain, SetValuedMap, image_points,
                    modulus, modulus_chain, nearest_image_point)


@dataclass
class LiftReport:
    kind: str
    chain: Optional[ModulusChain]
    beta: tuple           # measured per-index bounds (upper orbit distances)
    bounds: tuple         # bounds claimed by the construction, same length
    ok: bool
    failing_index: Optional[int] = None


def _less(space, value, bound) -> bool:
    if space.is_finite:
        return value < as_fraction(bound)
    return float(value) < float(bound) + TOL


def _same_point(space, a, b) -> bool:
    if space.is_finite:
        return a == b
    return abs(float(a) - float(b)) <= space.raw_tol


def _aligned_distance(u: TruncatedOrbitPoint, v: TruncatedOrbitPoint) -> OrbitDistance:
    d = min(u.depth, v.depth)
    return orbit_distance(u.truncate(d), v.truncate(d))


# ---------------------------------------------------------------------------
# orbit matching (pointwise closeness -> orbit-space closeness)


def match_orbit(F: SetValuedMap, x, y, orbit_y: TruncatedOrbitPoint, delta,
                chain: Optional[ModulusChain] = None) -> TruncatedOrbitPoint:
    """Orbit prefix with head x tracking `orbit_y` within delta.

    Requires d(x, y) below the first chain threshold; the first depth-many
    coordinates are chosen nearest to the matching coordinate of
    `orbit_y`, which keeps each coordinate gap under the next threshold;
    the rest of the prefix is extended with the nearest policy.
    """
    if chain is None:
        chain = modulus_chain(F, delta)
    space = F.space
    if orbit_y.flavor != RIGHT:
        raise DomainError("match_orbit expects a right-flavor prefix")
    if not _same_point(space, orbit_y.head, y):
        raise DomainError("orbit_y must start at y")
    if not _less(space, space.dist(x, y), chain.delta1):
        raise PreconditionError(
            "d(x, y) < delta_1",
            f"distance {space.dist(x, y)} exceeds {chain.delta1}")
    pts = [x]
    constrained = min(chain.depth - 1, orbit_y.depth)
    for i in range(constrained):
        target = orbit_y.prefix[i + 1]
        nxt = nearest_image_point(F, pts[-1], target)
        if not _less(space, space.dist(nxt, target), chain.link_target(i)):
            raise ConsistencyError(
                f"chain link {i} violated while matching orbits")
        pts.append(nxt)
    seg = extend_orbit(F, pts, orbit_y.depth + 1, policy="nearest",
                       anchor=orbit_y.prefix)
    return TruncatedOrbitPoint(F, RIGHT, seg.points, validate=False)


# ---------------------------------------------------------------------------
# lifting pseudo-orbits to the shift


def lift_pseudo_orbit(F: SetValuedMap, p, delta,
                      chain: Optional[ModulusChain] = None,
                      ) -> Tuple[List[TruncatedOrbitPoint], LiftReport]:
    """Shift-level pseudo-orbit over a base pseudo-orbit.

    Built backward from the last point: each earlier prefix is a matched
    orbit through the nearest image point, with the base point prepended.
    Every gap between the shifted prefix and its successor stays below
    delta; heads project back onto the base pseudo-orbit.
    """
    if chain is None:
        chain = modulus_chain(F, delta)
    pts = p.points if isinstance(p, PseudoOrbit) else tuple(p)
    if not validate_pseudo_orbit(F, pts, chain.delta1):
        raise PreconditionError(
            "pseudo-orbit slack < delta_1",
            f"input is not a {chain.delta1}-pseudo-orbit")
    depth = max(DEFAULT_DEPTH, chain.depth)
    tail = extend_orbit(F, [pts[-1]], depth + 1, policy="lexicographic")
    lifted = [TruncatedOrbitPoint(F, RIGHT, tail.points, validate=False)]
    for i in range(len(pts) - 2, -1, -1):
        successor = lifted[-1]
        via = nearest_image_point(F, pts[i], pts[i + 1])
        matched = match_orbit(F, via, pts[i + 1], successor, delta, chain=chain)
        lifted.append(prepend_head(matched, pts[i]))
    lifted.reverse()
    gaps = [orbit_distance(shift_right(lifted[i]), lifted[i + 1])
            for i in range(len(lifted) - 1)]
    beta = tuple(g.upper for g in gaps)
    bounds = tuple(chain.delta for _ in gaps)
    failing = next((i for i, g in enumerate(gaps)
                    if not _less(F.space, g.upper, chain.delta)), None)
    report = LiftReport(kind="shift", chain=chain, beta=beta, bounds=bounds,
                        ok=failing is None, failing_index=failing)
    return lifted, report


def shift_gaps(lifted: Sequence[TruncatedOrbitPoint]) -> List[OrbitDistance]:
    """Per-index gaps of a shift-level pseudo-orbit (for re-validation)."""
    return [orbit_distance(shift_right(lifted[i]), lifted[i + 1])
            for i in range(len(lifted) - 1)]


# ---------------------------------------------------------------------------
# moving witnesses between levels


def transfer_shadowing_down(witness_root: TruncatedOrbitPoint, p,
                            eps) -> OrbitSegment:
    """Project a shift-level witness back to the base system.

    The j-th head of the iterated shifts of the witness is simply the j-th
    prefix coordinate, and each base distance is at most twice the orbit
    distance at the shift level, so the projection tracks the base
    pseudo-orbit within 2*eps whenever the witness tracks within eps.
    """
    pts = p.points if isinstance(p, PseudoOrbit) else tuple(p)
    if witness_root.depth + 1 < len(pts):
        raise DomainError("witness prefix shorter than the pseudo-orbit")
    F = witness_root.system
    return OrbitSegment(F, witness_root.prefix[: len(pts)])


def closed_form_bound(eps, eps0, prepends: int):
    """Claimed per-step bound for the upward recursion: the fixed point of
    b -> eps0/4 + (eps/2 + b)/2 approached from below at rate 1/2."""
    return (eps + eps0) / 2 - (0.5 ** prepends) * (eps / 4)


def transfer_shadowing_up(F: SetValuedMap,
                          p_shift: Sequence[TruncatedOrbitPoint],
                          base_witness, eps0, eps,
                          chain: Optional[ModulusChain] = None,
                          ) -> Tuple[List[TruncatedOrbitPoint], LiftReport]:
    """Build a shift-level witness from a base witness.

    `base_witness` must track the head projection of `p_shift` within
    eps0/2, where eps0 is the first threshold of the modulus chain for
    eps/2.  The last witness point is matched to the last prefix; earlier
    points are head-prepended, so the shift iterates of the first output
    reproduce the rest.  Measured distances are compared against the
    claimed closed-form bound and against eps.
    """
    space = F.space
    if chain is None:
        chain = modulus_chain(F, eps / 2)
    if not _less(space, eps0, chain.delta1 * 2):
        raise PreconditionError("eps0 compatible with the chain",
                                f"eps0 {eps0} vs delta_1 {chain.delta1}")
    w = base_witness.points if isinstance(base_witness, OrbitSegment) else tuple(base_witness)
    heads = [u.head for u in p_shift]
    if len(w) != len(heads):
        raise DomainError("witness length mismatch")
    half0 = eps0 / 2
    for a, b in zip(w, heads):
        if not _less(space, space.dist(a, b), half0):
            raise PreconditionError("base witness within eps0/2",
                                    f"d({a},{b}) >= {half0}")
    m = len(heads)
    matched = match_orbit(F, w[-1], heads[-1], p_shift[-1], eps / 2, chain=chain)
    root = TruncatedOrbitPoint(F, RIGHT, tuple(w[: m - 1]) + matched.prefix)
    outputs = []
    current = root
    for _ in range(m):
        outputs.append(current)
        if current.depth >= 1:
            current = shift_right(current)
    beta = []
    bounds = []
    failing = None
    for pos in range(m):
        dist = _aligned_distance(p_shift[pos], outputs[pos])
        beta.append(dist.upper)
        prepends = m - 1 - pos
        bound = (eps / 2) if prepends == 0 else closed_form_bound(eps, eps0, prepends)
        bounds.append(bound)
        ok_here = _less(space, dist.upper, bound) and _less(space, dist.upper, eps)
        if not ok_here and failing is None:
            failing = pos
    report = LiftReport(kind="shift-up", chain=chain, beta=tuple(beta),
                        bounds=tuple(bounds), ok=failing is None,
                        failing_index=failing)
    return outputs, report


# ---------------------------------------------------------------------------
# inverse-map shadowing by reversal


def shadow_inverse(F: SetValuedMap, p, eps, delta=None) -> OrbitSegment:
    """Witness for a pseudo-orbit of the inverse map.

    The input must be a pseudo-orbit of invert(F) at the modulus-derived
    slack; reversing it gives a delta-pseudo-orbit of F, which the forward
    engine shadows; the reversed witness is a valid orbit of invert(F)
    within eps of the input.
    """
    if not F.is_continuous():
        raise PreconditionError("is_continuous")
    if not F.is_onto():
        raise PreconditionError("is_onto")
    G = F.invert()
    if delta is None:
        if not isinstance(F, FiniteRelation):
            raise DomainError("supply delta for interval systems")
        delta = max_shadowing_slack(F, eps)
        if delta <= 0:
            raise PreconditionError("shadowing slack", "no admissible delta")
    delta1 = modulus(F, delta / 2)
    pts = p.points if isinstance(p, PseudoOrbit) else tuple(p)
    if not validate_pseudo_orbit(G, pts, delta1):
        raise DomainError("input is not a delta_1-pseudo-orbit of the inverse")
    reversed_pts = tuple(reversed(pts))
    if not validate_pseudo_orbit(F, reversed_pts, delta):
        raise ConsistencyError(
            "reversal is not a delta-pseudo-orbit; modulus violated")
    report = decide_finite_shadowing(F, reversed_pts, eps)
    if report.verdict != SHADOWED:
        raise ConsistencyError(
            "forward engine failed to shadow the reversed pseudo-orbit")
    out = OrbitSegment(G, tuple(reversed(report.witness.points)))
    return out


# ---------------------------------------------------------------------------
# inverse-flavor lift


def lift_inverse(F: SetValuedMap, p, delta,
                 ) -> Tuple[List[TruncatedOrbitPoint], LiftReport]:
    """Inverse-flavor lift of a base pseudo-orbit.

    Hypotheses: usc, onto, open; then the inverse map is continuous and
    the matching runs in its orbit space.  Per-step gaps are measured as
    the point-to-set orbit distance from the prepend-image of one prefix
    to the next, and stay below delta.
    """
    for name, pred in (("is_usc", F.is_usc), ("is_onto", F.is_onto),
                       ("is_open", F.is_open)):
        if not pred():
            raise PreconditionError(name)
    G = F.invert()
    if not G.is_continuous():
        raise ConsistencyError("inverse of an open onto usc map must be continuous")
    chain = modulus_chain(G, delta)
    pts = p.points if isinstance(p, PseudoOrbit) else tuple(p)
    if not validate_pseudo_orbit(F, pts, chain.delta1):
        raise PreconditionError("pseudo-orbit slack < delta_1")
    if len(pts) < 2:
        raise DomainError("need at least two points to lift")
    space = F.space
    depth = max(DEFAULT_DEPTH, chain.depth)

    def as_inverse(u: TruncatedOrbitPoint) -> TruncatedOrbitPoint:
        return TruncatedOrbitPoint(F, INVERSE, u.prefix, validate=False)

    def as_forward(u: TruncatedOrbitPoint) -> TruncatedOrbitPoint:
        return TruncatedOrbitPoint(G, RIGHT, u.prefix, validate=False)

    via = nearest_image_point(F, pts[0], pts[1])
    backward = extend_orbit(G, [pts[0]], depth + 1, policy="lexicographic")
    primed = TruncatedOrbitPoint(F, INVERSE, (via,) + backward.points,
                                 validate=False)
    lifted = [shift_right(primed)]
    gaps = []
    for i in range(len(pts) - 1):
        matched = match_orbit(G, pts[i + 1], primed.head, as_forward(primed),
                              delta, chain=chain)
        nxt = as_inverse(matched)
        # gap: nearest prepend-image of the current prefix to the successor
        candidates = [prepend_step(lifted[i], z)
                      for z in image_points(F, lifted[i].head)]
        gaps.append(min((_aligned_distance(c, nxt) for c in candidates),
                        key=lambda g: g.upper))
        lifted.append(nxt)
        if i + 2 < len(pts):
            via = nearest_image_point(F, pts[i + 1], pts[i + 2])
            primed = prepend_step(nxt, via)
    beta = tuple(g.upper for g in gaps)
    bounds = tuple(chain.delta for _ in gaps)
    failing = next((i for i, g in enumerate(gaps)
                    if not _less(space, g.upper, chain.delta)), None)
    report = LiftReport(kind="inverse", chain=chain, beta=beta, bounds=bounds,
                        ok=failing is None, failing_index=failing)
    return lifted, report
