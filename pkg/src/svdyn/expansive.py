"""Expansiveness certification and grid quantization.

A finite system is expansive at delta exactly when the product graph on
point pairs closer than delta, pruned of nodes without successors, retains
no pair with distinct components.  Pruning runs to a fixed point, so the
verdict is exact; a surviving unequal pair yields a witness path into a
cycle, i.e. two genuine orbits staying delta-close forever.

Interval systems are bridged to the exact engine by `quantize`, which
replaces the carrier with a uniform grid and rounds images within half the
grid step.  Grid verdicts are evidence about the original system, not
proofs, and reports say so.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import DomainError, PreconditionError, ResourceGuardError
from .orbits import OrbitSegment, extend_orbit
from .rng import SplitMix64
from .space import FiniteSpace, as_fraction
from .svmap import FiniteRelation, PiecewiseLinear, SetValuedMap

MAX_GRID_POINTS = 4096


@dataclass
class ExpansivenessCertificate:
    delta: object
    verdict: str                      # "expansive" | "not_expansive"
    witness_pair: Optional[tuple] = None   # (OrbitSegment, OrbitSegment)
    cycle_start: Optional[int] = None
    surviving_nodes: int = 0
    grid_evidence: bool = False       # True when certified on a quantized grid

    @property
    def expansive(self) -> bool:
        return self.verdict == "expansive"


def certify_expansive(F: SetValuedMap, delta,
                      grid_evidence: bool = False) -> ExpansivenessCertificate:
    """Exact product-graph decision on a finite system."""
    if not isinstance(F, FiniteRelation):
        raise DomainError("expansiveness certification requires a finite carrier")
    delta = as_fraction(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    space = F.space
    n = len(space.points)
    idist, _ = space.int_table()
    num, den = space.scale_threshold(delta)
    idx = space.index
    img = [[idx[y] for y in F.images[space.points[i]]] for i in range(n)]

    nodes = [(i, j) for i in range(n) for j in range(n)
             if idist[i][j] * den < num]
    node_set = set(nodes)
    succ: Dict[tuple, List[tuple]] = {}
    pred: Dict[tuple, List[tuple]] = {v: [] for v in nodes}
    outdeg: Dict[tuple, int] = {}
    for v in nodes:
        i, j = v
        targets = [(a, b) for a in img[i] for b in img[j] if (a, b) in node_set]
        succ[v] = targets
        outdeg[v] = len(targets)
        for t in targets:
            pred[t].append(v)
    # prune nodes that cannot continue forever
    stack = [v for v in nodes if outdeg[v] == 0]
    dead = set(stack)
    while stack:
        v = stack.pop()
        for u in pred[v]:
            if u in dead:
                continue
            outdeg[u] -= 1
            if outdeg[u] == 0:
                dead.add(u)
                stack.append(u)
    survivors = [v for v in nodes if v not in dead]
    unequal = sorted(v for v in survivors if v[0] != v[1])
    if not unequal:
        return ExpansivenessCertificate(delta=delta, verdict="expansive",
                                        surviving_nodes=len(survivors),
                                        grid_evidence=grid_evidence)
    # walk the surviving subgraph until a node repeats: prefix + cycle
    alive = set(survivors)
    path = [unequal[0]]
    seen = {unequal[0]: 0}
    while True:
        nxt = min(t for t in succ[path[-1]] if t in alive)
        if nxt in seen:
            cycle_start = seen[nxt]
            path.append(nxt)
            break
        seen[nxt] = len(path)
        path.append(nxt)
    seg_x = OrbitSegment(F, tuple(space.points[i] for i, _ in path))
    seg_y = OrbitSegment(F, tuple(space.points[j] for _, j in path))
    return ExpansivenessCertificate(delta=delta, verdict="not_expansive",
                                    witness_pair=(seg_x, seg_y),
                                    cycle_start=cycle_start,
                                    surviving_nodes=len(survivors),
                                    grid_evidence=grid_evidence)


# ---------------------------------------------------------------------------
# quantization


def quantize(F: PiecewiseLinear, h) -> FiniteRelation:
    """Uniform-grid relation: y relates to x when y lies within h/2 of the
    exact image of x.  Exact rational arithmetic throughout; the grid
    metric is the restricted line metric, renormalized.
    """
    if not isinstance(F, PiecewiseLinear):
        raise DomainError("quantize expects a piecewise-linear interval map")
    h = as_fraction(h)
    if h <= 0:
        raise DomainError("resolution must be positive")
    comp_grids = []
    total = 0
    for lo, hi in F.space.components:
        lo_f, hi_f = as_fraction(lo), as_fraction(hi)
        coords = []
        i = 0
        while lo_f + i * h <= hi_f:
            coords.append(lo_f + i * h)
            i += 1
            if total + i > MAX_GRID_POINTS:
                raise ResourceGuardError(
                    f"grid exceeds {MAX_GRID_POINTS} points")
        if coords[-1] != hi_f:
            coords.append(hi_f)
        total += len(coords)
        comp_grids.append((lo_f, hi_f, coords))
    all_coords = [c for _, _, coords in comp_grids for c in coords]
    ids = [str(c) for c in all_coords]
    dist = [[abs(a - b) for b in all_coords] for a in all_coords]
    space = FiniteSpace(ids, dist, labels=dict(zip(ids, all_coords)),
                        _trusted=True)  # line metric: triangle holds

    branches = [(as_fraction(br.lo), as_fraction(br.hi),
                 [(as_fraction(a), as_fraction(b)) for a, b in br.pieces])
                for br in F.branches]
    exceptions = [(as_fraction(x), [as_fraction(v) for v in values])
                  for x, values in F.exceptions]
    half = h / 2

    def exact_values(x: Fraction) -> List[Fraction]:
        for xe, values in exceptions:
            if xe == x:
                return list(values)
        vals = [a * x + b for lo, hi, pieces in branches if lo <= x <= hi
                for a, b in pieces]
        if not vals:
            raise DomainError(f"no branch covers grid point {x}")
        return vals

    def nearby_ids(v: Fraction) -> List[str]:
        out = []
        for lo_f, hi_f, coords in comp_grids:
            if v < lo_f - half or v > hi_f + half:
                continue
            i = int((v - lo_f) / h)
            for k in (i - 1, i, i + 1, i + 2):
                if 0 <= k < len(coords) and abs(coords[k] - v) <= half:
                    out.append(str(coords[k]))
        return out

    images = {}
    for x, pid in zip(all_coords, ids):
        hit = set()
        for v in exact_values(x):
            hit.update(nearby_ids(v))
        images[pid] = hit
    return FiniteRelation(space, images)


# ---------------------------------------------------------------------------
# separation of orbit pairs at the shift level


@dataclass
class ExpansiveLiftReport:
    delta: object
    depth: int
    samples: int
    separated: int
    max_horizon: int                  # largest k needed over all samples
    inconclusive: tuple               # sample indices that never separated
    ok: bool


def check_expansive_lift(F: SetValuedMap, delta, samples: int = 100,
                         depth: int = 32, seed: int = 0) -> ExpansiveLiftReport:
    """Sampled check that distinct-head orbit pairs separate under shifts.

    For each seeded pair of orbit prefixes with distinct heads, scans the
    shifted pairs for some k <= depth at which the truncated orbit
    distance exceeds delta/2 minus the tail allowance 2**-depth.
    """
    if not isinstance(F, FiniteRelation):
        raise DomainError("expansive lift check requires a finite carrier")
    cert = certify_expansive(F, delta)
    if not cert.expansive:
        raise PreconditionError("certify_expansive",
                                f"system is not expansive at {delta}")
    delta = as_fraction(delta)
    space = F.space
    n = len(space.points)
    if n < 2:
        return ExpansiveLiftReport(delta=delta, depth=depth, samples=0,
                                   separated=0, max_horizon=0,
                                   inconclusive=(), ok=True)
    rng = SplitMix64(seed)
    tail = Fraction(1, 2 ** depth)
    threshold = delta / 2 - tail
    weights = [Fraction(1, 2 ** (k + 1)) for k in range(depth + 1)]
    max_horizon = 0
    inconclusive = []
    for s in range(samples):
        i = rng.next_below(n)
        j = rng.next_below(n - 1)
        if j >= i:
            j += 1
        x, y = space.points[i], space.points[j]
        u = extend_orbit(F, [x], 2 * depth + 1, policy="seeded",
                         seed=rng.split(2 * s).next_u64())
        v = extend_orbit(F, [y], 2 * depth + 1, policy="seeded",
                         seed=rng.split(2 * s + 1).next_u64())
        horizon = None
        for k in range(depth + 1):
            partial = sum(
                space.dist(u.points[k + t], v.points[k + t]) * weights[t]
                for t in range(depth + 1))
            if partial > threshold:
                horizon = k
                break
        if horizon is None:
            inconclusive.append(s)
        else:
            max_horizon = max(max_horizon, horizon)
    return ExpansiveLiftReport(delta=delta, depth=depth, samples=samples,
                               separated=samples - len(inconclusive),
                               max_horizon=max_horizon,
                               inconclusive=tuple(inconclusive),
                               ok=not inconclusive)
