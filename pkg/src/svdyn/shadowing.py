"""Decision engines for shadowing questions.

* `decide_finite_shadowing`: is one finite pseudo-orbit traced within eps
  by a true orbit?  Exact layered-graph reachability on finite spaces;
  exact compact-set tube propagation on piecewise-linear systems.

* `decide_shadowing_property`: does EVERY delta-pseudo-orbit admit an
  eps-close orbit?  Decided on finite spaces by determinized trace
  inclusion over (pseudo-orbit point, set of consistent orbit states)
  pairs with memoization; a reachable empty state set yields a
  counterexample pseudo-orbit.

* `max_shadowing_slack`: the largest slack (from the finite candidate set
  where the pseudo-orbit graph changes) at which the property holds.

* `nstep_criterion`: instance-level check of the N-step image criterion,
  built from a chain of continuity thresholds.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import DomainError, PreconditionError, ResourceGuardError
from .orbits import OrbitSegment, PseudoOrbit, generate_pseudo_orbit
from .space import TOL, FiniteSpace, as_fraction
from .svmap import (FiniteRelation, PiecewiseLinear, SetValuedMap, modulus,
                    nearest_image_point)

SHADOWED = "shadowed"
NOT_SHADOWED = "not_shadowed"
PROPERTY_HOLDS = "property_holds"
PROPERTY_FAILS = "property_fails"

#: exact property decision explores subsets of the carrier; keep it small
MAX_PROPERTY_POINTS = 20


@dataclass
class ShadowingReport:
    epsilon: object
    verdict: str
    delta: object = None
    witness: Optional[OrbitSegment] = None
    counterexample: Optional[PseudoOrbit] = None
    nodes: int = 0
    runtime: float = field(default=0.0, compare=False)

    @property
    def holds(self) -> bool:
        return self.verdict in (SHADOWED, PROPERTY_HOLDS)


def _require_points(p) -> tuple:
    if isinstance(p, (PseudoOrbit, OrbitSegment)):
        return p.points
    return tuple(p)


# ---------------------------------------------------------------------------
# finite shadowing of a single pseudo-orbit


def decide_finite_shadowing(F: SetValuedMap, p, eps) -> ShadowingReport:
    pts = _require_points(p)
    if isinstance(F, FiniteRelation):
        return _finite_trace(F, pts, eps)
    if isinstance(F, PiecewiseLinear):
        return _interval_trace(F, pts, eps)
    raise DomainError("unsupported map representation")


def _finite_trace(F: FiniteRelation, pts, eps) -> ShadowingReport:
    eps = as_fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    t0 = time.perf_counter()
    space: FiniteSpace = F.space
    idist, _ = space.int_table()
    num, den = space.scale_threshold(eps)
    n = len(space.points)
    idx = space.index
    img_mask = [0] * n
    for x, img in F.images.items():
        m = 0
        for y in img:
            m |= 1 << idx[y]
        img_mask[idx[x]] = m
    tubes = []
    for p_i in pts:
        i = idx.get(p_i)
        if i is None:
            raise DomainError(f"unknown point id {p_i!r}")
        row = idist[i]
        tubes.append(sum(1 << j for j in range(n) if row[j] * den < num))
    reach = [tubes[0]]
    nodes = bin(tubes[0]).count("1")
    for t in tubes[1:]:
        cur = reach[-1]
        nxt = 0
        while cur:
            low = cur & -cur
            nxt |= img_mask[low.bit_length() - 1]
            cur ^= low
        nxt &= t
        reach.append(nxt)
        nodes += bin(nxt).count("1")
        if nxt == 0:
            break
    if reach[-1] == 0 or len(reach) < len(pts):
        return ShadowingReport(epsilon=eps, verdict=NOT_SHADOWED, nodes=nodes,
                               runtime=time.perf_counter() - t0)
    # backward reconstruction, smallest point id at each layer
    pre_mask = [0] * n
    for x, img in F.images.items():
        for y in img:
            pre_mask[idx[y]] |= 1 << idx[x]
    choice = (reach[-1] & -reach[-1]).bit_length() - 1
    witness = [choice]
    for layer in range(len(pts) - 2, -1, -1):
        allowed = reach[layer] & pre_mask[witness[-1]]
        witness.append((allowed & -allowed).bit_length() - 1)
    witness.reverse()
    seg = OrbitSegment(F, tuple(space.points[i] for i in witness))
    return ShadowingReport(epsilon=eps, verdict=SHADOWED, witness=seg,
                           nodes=nodes, runtime=time.perf_counter() - t0)


def _intersect_union(space, U, V):
    tol = space.raw_tol
    segs = []
    for a, b in U.segments:
        for c, d in V.segments:
            lo, hi = max(a, c), min(b, d)
            if hi >= lo - tol:
                segs.append((lo, max(hi, lo)))
    return space.union(segs) if segs else None


def _interval_trace(F: PiecewiseLinear, pts, eps) -> ShadowingReport:
    eps = float(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    t0 = time.perf_counter()
    space = F.space
    # closed tubes of radius eps - TOL implement the strict inequality
    # under the tie convention
    r = (eps - TOL) / space.scale
    tubes = []
    for p_i in pts:
        x = float(p_i)
        if not space.contains(x):
            raise DomainError(f"point {x} outside carrier")
        tube = _intersect_union(space, space.carrier_set(),
                                space.union([(x - r, x + r)]))
        if tube is None:
            return ShadowingReport(epsilon=eps, verdict=NOT_SHADOWED,
                                   runtime=time.perf_counter() - t0)
        tubes.append(tube)
    reach = [tubes[0]]
    nodes = len(tubes[0].segments)
    for tube in tubes[1:]:
        stepped = F.eval_set(reach[-1])
        cur = _intersect_union(space, stepped, tube)
        if cur is None:
            return ShadowingReport(epsilon=eps, verdict=NOT_SHADOWED,
                                   nodes=nodes, runtime=time.perf_counter() - t0)
        reach.append(cur)
        nodes += len(cur.segments)
    witness = [reach[-1].segments[0][0]]
    for layer in range(len(pts) - 2, -1, -1):
        pre = F.preimage(space.union([(witness[-1], witness[-1])]))
        allowed = _intersect_union(space, reach[layer], pre) if pre else None
        if allowed is None:
            # boundary rounding: fall back to the leftmost reachable point
            allowed = reach[layer]
        witness.append(allowed.segments[0][0])
    witness.reverse()
    seg = OrbitSegment(F, tuple(witness))
    return ShadowingReport(epsilon=eps, verdict=SHADOWED, witness=seg,
                           nodes=nodes, runtime=time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# the (eps, delta) shadowing property on finite spaces


def decide_shadowing_property(F: SetValuedMap, eps, delta) -> ShadowingReport:
    if not isinstance(F, FiniteRelation):
        raise DomainError("exact property decision requires a finite carrier")
    space = F.space
    n = len(space.points)
    if n > MAX_PROPERTY_POINTS:
        raise ResourceGuardError(
            f"determinized search supports at most {MAX_PROPERTY_POINTS} points")
    eps = as_fraction(eps)
    delta = as_fraction(delta)
    if eps <= 0 or delta <= 0:
        raise DomainError("eps and delta must be positive")
    t0 = time.perf_counter()
    idist, _ = space.int_table()
    eps_num, eps_den = space.scale_threshold(eps)
    del_num, del_den = space.scale_threshold(delta)
    idx = space.index
    img_mask = [0] * n
    for x, img in F.images.items():
        m = 0
        for y in img:
            m |= 1 << idx[y]
        img_mask[idx[x]] = m
    tube = [sum(1 << j for j in range(n) if idist[i][j] * eps_den < eps_num)
            for i in range(n)]
    islack = [[min(idist[j][idx[y]] for y in F.images[space.points[i]])
               for j in range(n)] for i in range(n)]
    adj = [[j for j in range(n) if islack[i][j] * del_den < del_num]
           for i in range(n)]
    union_cache = {}

    def image_union(mask):
        out = union_cache.get(mask)
        if out is None:
            out, cur = 0, mask
            while cur:
                low = cur & -cur
                out |= img_mask[low.bit_length() - 1]
                cur ^= low
            union_cache[mask] = out
        return out

    memo = set()
    parent = {}
    queue = deque()
    for i in range(n):
        state = (i, tube[i])
        memo.add(state)
        parent[state] = None
        queue.append(state)
    while queue:
        x, S = queue.popleft()
        stepped = image_union(S)
        for x2 in adj[x]:
            S2 = stepped & tube[x2]
            if S2 == 0:
                path = [x2]
                state = (x, S)
                while state is not None:
                    path.append(state[0])
                    state = parent[state]
                path.reverse()
                ce = PseudoOrbit(F, tuple(space.points[i] for i in path), delta)
                return ShadowingReport(
                    epsilon=eps, delta=delta, verdict=PROPERTY_FAILS,
                    counterexample=ce, nodes=len(memo),
                    runtime=time.perf_counter() - t0)
            nxt = (x2, S2)
            if nxt not in memo:
                memo.add(nxt)
                parent[nxt] = (x, S)
                queue.append(nxt)
    return ShadowingReport(epsilon=eps, delta=delta, verdict=PROPERTY_HOLDS,
                           nodes=len(memo), runtime=time.perf_counter() - t0)


def max_shadowing_slack(F: SetValuedMap, eps) -> Fraction:
    """Largest delta from the candidate set (positive step defects plus
    eps itself) at which the shadowing property holds; 0 if none."""
    if not isinstance(F, FiniteRelation):
        raise DomainError("slack search requires a finite carrier")
    eps = as_fraction(eps)
    slack = F.slack_table()
    candidates = {v for row in slack.values() for v in row.values() if v > 0}
    candidates.add(eps)
    for delta in sorted(candidates, reverse=True):
        if decide_shadowing_property(F, eps, delta).verdict == PROPERTY_HOLDS:
            return delta
    return Fraction(0)


# ---------------------------------------------------------------------------
# N-step image criterion


@dataclass
class NStepReport:
    epsilon: object
    steps: int
    deltas: tuple
    distances: tuple      # d(x_i^N, x_{i+N}) per start index
    bound: object         # eps / 2
    chain_ok: bool
    variants: dict        # "original" / "tail" / "chained" -> verdict
    pseudo_orbit: tuple


def _nstep_chain(F: SetValuedMap, eps, steps: int):
    """delta_1 < ... < delta_N with d(x,y) < delta_1 + delta_i forcing
    image gap < delta_{i+1}, and delta_N + delta_1 < eps / 2."""
    finite = isinstance(F, FiniteRelation)
    eps = as_fraction(eps) if finite else float(eps)
    chain = [eps / 4]
    for _ in range(steps - 1):
        nxt = chain[-1]
        chain.append(min(modulus(F, nxt) / 2, nxt / 2))
    chain.reverse()
    return tuple(chain)


def nstep_criterion(F: SetValuedMap, eps, p=None, steps: int = 8,
                    length: int = 24, seed: int = 0) -> NStepReport:
    if not F.is_continuous():
        raise PreconditionError("is_continuous")
    if not F.is_onto():
        raise PreconditionError("is_onto")
    if steps < 2:
        raise DomainError("need at least two chain steps")
    deltas = _nstep_chain(F, eps, steps)
    if p is None:
        p = generate_pseudo_orbit(F, deltas[0], max(length, steps + 2), seed)
    pts = _require_points(p)
    if len(pts) <= steps:
        raise DomainError("pseudo-orbit shorter than the step count")
    space = F.space
    finite = space.is_finite

    def less(a, b):
        return a < b if finite else float(a) < float(b) + TOL

    first = [nearest_image_point(F, pts[i], pts[i + 1])
             for i in range(len(pts) - 1)]
    chain_ok = all(less(space.dist(first[i], pts[i + 1]), deltas[0])
                   for i in range(len(first)))
    chained = []
    distances = []
    for i in range(len(pts) - steps):
        x = first[i]
        for j in range(1, steps):
            target = first[i + j]
            x = nearest_image_point(F, x, target)
            if not less(space.dist(x, target), deltas[j]):
                chain_ok = False
        distances.append(space.dist(x, pts[i + steps]))
        chained.append(x)
    bound = (as_fraction(eps) if finite else float(eps)) / 2
    chain_ok = chain_ok and all(less(d, bound) for d in distances)
    variants = {
        "original": decide_finite_shadowing(F, pts, eps).verdict,
        "tail": decide_finite_shadowing(F, pts[steps:], eps).verdict,
        "chained": decide_finite_shadowing(F, tuple(chained), eps).verdict,
    }
    return NStepReport(epsilon=eps, steps=steps, deltas=deltas,
                       distances=tuple(distances), bound=bound,
                       chain_ok=chain_ok, variants=variants,
                       pseudo_orbit=pts)
