"""Set-valued maps: evaluation, preimages, inversion, and topology checks.

Two representations are supported:

* `FiniteRelation`: a total relation on a finite space (each point has a
  nonempty image set).  On a discrete carrier every map is upper and lower
  semicontinuous, open and closed, so the interesting predicates are all
  trivially true; the engines that act on finite relations live elsewhere.

* `PiecewiseLinear`: a map on an interval carrier given by branches, each
  a closed subinterval carrying one or more affine pieces x -> a*x + b,
  plus finitely many exceptional points with explicit finite image sets.
  Semicontinuity and openness are decided symbolically at breakpoints;
  no sampling is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ConstructionError, DomainError, PreconditionError
from .space import (FiniteSpace, FiniteSubset, IntervalSpace, IntervalUnion,
                    as_fraction)


class SetValuedMap:
    """Common interface; concrete maps set `space` and implement the ops."""

    space = None

    def eval(self, x):
        raise NotImplementedError

    def eval_set(self, A):
        raise NotImplementedError

    def preimage(self, A):
        raise NotImplementedError

    def invert(self) -> "SetValuedMap":
        raise NotImplementedError

    def is_onto(self) -> bool:
        raise NotImplementedError

    def is_usc(self) -> bool:
        raise NotImplementedError

    def is_lsc(self) -> bool:
        raise NotImplementedError

    def is_continuous(self) -> bool:
        return self.is_usc() and self.is_lsc()

    def is_open(self) -> bool:
        raise NotImplementedError

    def is_closed(self) -> bool:
        # For both representations closedness coincides with upper
        # semicontinuity: usc implies closed in general, and a one-sided
        # limit escaping the image at a breakpoint breaks both.
        return self.is_usc()


# ---------------------------------------------------------------------------
# finite relations


class FiniteRelation(SetValuedMap):
    """Total relation on a finite space."""

    def __init__(self, space: FiniteSpace, images: Dict[str, Iterable[str]]):
        self.space = space
        table = {}
        for p in space.points:
            img = tuple(sorted(set(images.get(p, ())), key=space.index.get))
            if not img:
                raise ConstructionError(f"point {p!r} has empty image")
            for q in img:
                if q not in space.index:
                    raise ConstructionError(f"image point {q!r} not in carrier")
            table[p] = img
        self.images = table
        self._slack_cache = None
        self._modulus_cache = None

    def eval(self, x) -> FiniteSubset:
        if x not in self.space.index:
            raise DomainError(f"unknown point id {x!r}")
        return self.space.subset(self.images[x])

    def eval_set(self, A: FiniteSubset) -> FiniteSubset:
        out = set()
        for a in A.ids:
            out.update(self.images[a])
        return self.space.subset(out)

    def preimage(self, A: FiniteSubset) -> Optional[FiniteSubset]:
        hit = set(A.ids)
        ids = [x for x in self.space.points if hit.intersection(self.images[x])]
        return self.space.subset(ids) if ids else None

    def is_onto(self) -> bool:
        covered = set()
        for img in self.images.values():
            covered.update(img)
        return len(covered) == len(self.space.points)

    def invert(self) -> "FiniteRelation":
        reverse: Dict[str, set] = {p: set() for p in self.space.points}
        for x, img in self.images.items():
            for y in img:
                reverse[y].add(x)
        for y, pre in reverse.items():
            if not pre:
                raise PreconditionError("is_onto", f"point {y!r} has empty preimage")
        return FiniteRelation(self.space, reverse)

    def iterate(self, n: int) -> "FiniteRelation":
        """n-fold relational composition; n = 0 is the identity relation."""
        if n < 0:
            raise DomainError("iteration count must be nonnegative")
        current = {p: {p} for p in self.space.points}
        for _ in range(n):
            current = {
                p: {z for y in img for z in self.images[y]}
                for p, img in current.items()
            }
        return FiniteRelation(self.space, current)

    # discrete carriers make every map continuous and open
    def is_usc(self) -> bool:
        return True

    def is_lsc(self) -> bool:
        return True

    def is_open(self) -> bool:
        return True

    def slack_table(self):
        """slack[x][y] = d(y, F(x)), the pseudo-orbit step defect (exact)."""
        if self._slack_cache is None:
            pts = self.space.points
            self._slack_cache = {
                x: {y: self.space.point_to_set(y, self.eval(x)) for y in pts}
                for x in pts
            }
        return self._slack_cache

    def modulus_table(self):
        """All pairs (image gap, point distance) arranged for threshold
        queries: sorted by image gap descending with running minimum of the
        point distance."""
        if self._modulus_cache is None:
            space = self.space
            sets = {x: self.eval(x) for x in space.points}
            pairs = []
            for i, x in enumerate(space.points):
                for y in space.points[i + 1:]:
                    pairs.append((space.hausdorff(sets[x], sets[y]),
                                  space.dist(x, y)))
            pairs.sort(key=lambda t: t[0], reverse=True)
            gaps, mins = [], []
            running = None
            for gap, d in pairs:
                running = d if running is None else min(running, d)
                gaps.append(gap)
                mins.append(running)
            self._modulus_cache = (gaps, mins)
        return self._modulus_cache


# ---------------------------------------------------------------------------
# piecewise-linear maps


@dataclass(frozen=True)
class Branch:
    lo: float
    hi: float
    pieces: tuple  # ((alpha, beta), ...)


def _dedupe_values(values: Sequence[float], tol: float) -> Tuple[float, ...]:
    out: List[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(v)
    return tuple(out)


def _split_branches(raw: Sequence[tuple], tol: float) -> Tuple[Branch, ...]:
    """Regroup possibly-overlapping (lo, hi, piece) triples into branches
    whose domains meet only at endpoints (refinement at all endpoints)."""
    cuts = sorted({v for lo, hi, _ in raw for v in (lo, hi)})
    merged_cuts: List[float] = []
    for c in cuts:
        if not merged_cuts or c - merged_cuts[-1] > tol:
            merged_cuts.append(c)
    branches = []
    for a, b in zip(merged_cuts, merged_cuts[1:]):
        pieces = []
        for lo, hi, piece in raw:
            if lo <= a + tol and b <= hi + tol:
                if not any(abs(piece[0] - q[0]) <= tol and abs(piece[1] - q[1]) <= tol
                           for q in pieces):
                    pieces.append(piece)
        if pieces:
            branches.append(Branch(a, b, tuple(sorted(pieces))))
    return tuple(branches)


class PiecewiseLinear(SetValuedMap):
    """Branchwise-affine set-valued map with finitely many exceptions."""

    def __init__(self, space: IntervalSpace, branches: Sequence, exceptions=()):
        self.space = space
        tol = space.raw_tol
        norm = []
        for br in branches:
            if isinstance(br, Branch):
                lo, hi, pieces = br.lo, br.hi, br.pieces
            else:
                lo, hi, pieces = br
            lo, hi = float(lo), float(hi)
            if hi <= lo:
                raise ConstructionError("degenerate branch domain")
            pieces = tuple(sorted((float(a), float(b)) for a, b in pieces))
            if not pieces:
                raise ConstructionError("branch without affine pieces")
            norm.append(Branch(lo, hi, pieces))
        norm.sort(key=lambda b: (b.lo, b.hi))
        for cur, nxt in zip(norm, norm[1:]):
            if nxt.lo < cur.hi - tol:
                raise ConstructionError("branch domains overlap in their interiors")
        self.branches = tuple(norm)
        exc = []
        for x, values in exceptions:
            exc.append((float(x), _dedupe_values([float(v) for v in values], tol)))
        exc.sort()
        for (x1, _), (x2, _) in zip(exc, exc[1:]):
            if x2 - x1 <= tol:
                raise ConstructionError("duplicate exceptional points")
        self.exceptions = tuple(exc)
        self._validate()

    def _validate(self):
        tol = self.space.raw_tol
        for br in self.branches:
            if not (self.space.contains(br.lo) and self.space.contains(br.hi)):
                raise ConstructionError("branch domain escapes carrier")
            for a, b in br.pieces:
                for xv in (br.lo, br.hi):
                    v = a * xv + b
                    if not self.space.contains(v):
                        raise ConstructionError(
                            f"piece value {v} at x={xv} escapes carrier")
                # a piece must stay inside one carrier component
                v1, v2 = sorted((a * br.lo + b, a * br.hi + b))
                if not any(lo - tol <= v1 and v2 <= hi + tol
                           for lo, hi in self.space.components):
                    raise ConstructionError("piece image straddles carrier components")
        for x, values in self.exceptions:
            if not self.space.contains(x):
                raise ConstructionError("exceptional point outside carrier")
            for v in values:
                if not self.space.contains(v):
                    raise ConstructionError("exceptional value outside carrier")
        # totality: branch domains must cover every carrier component
        for lo, hi in self.space.components:
            cover = lo
            for br in self.branches:
                if br.lo <= cover + tol and br.hi > cover:
                    cover = max(cover, br.hi)
            if cover < hi - tol:
                raise ConstructionError(
                    f"carrier not covered by branch domains near x={cover}")

    # -- pointwise and setwise evaluation -----------------------------------

    def _exception_at(self, x: float):
        tol = self.space.raw_tol
        for xe, values in self.exceptions:
            if abs(x - xe) <= tol:
                return values
        return None

    def value_list(self, x: float) -> Tuple[float, ...]:
        """Image of x as a sorted tuple of values."""
        if not self.space.contains(x):
            raise DomainError(f"point {x} outside carrier")
        exc = self._exception_at(x)
        if exc is not None:
            return exc
        tol = self.space.raw_tol
        vals = [a * x + b
                for br in self.branches if br.lo - tol <= x <= br.hi + tol
                for a, b in br.pieces]
        if not vals:
            raise DomainError(f"no branch covers x={x}")
        return _dedupe_values(vals, tol)

    def eval(self, x: float) -> IntervalUnion:
        return self.space.union((v, v) for v in self.value_list(x))

    def eval_set(self, A: IntervalUnion) -> IntervalUnion:
        tol = self.space.raw_tol
        segments = []
        for c, d in A.segments:
            if d - c <= tol:
                segments.extend((v, v) for v in self.value_list(c))
                continue
            for br in self.branches:
                lo, hi = max(c, br.lo), min(d, br.hi)
                if hi >= lo:
                    for a, b in br.pieces:
                        v1, v2 = a * lo + b, a * hi + b
                        segments.append((min(v1, v2), max(v1, v2)))
            for xe, values in self.exceptions:
                if c - tol <= xe <= d + tol:
                    segments.extend((v, v) for v in values)
        return self.space.union(segments)

    def preimage(self, A: IntervalUnion) -> Optional[IntervalUnion]:
        tol = self.space.raw_tol
        segments = []
        for br in self.branches:
            for a, b in br.pieces:
                if a == 0.0:
                    if A.contains(b):
                        segments.append((br.lo, br.hi))
                    continue
                for u, v in A.segments:
                    x1, x2 = sorted(((u - b) / a, (v - b) / a))
                    lo, hi = max(x1, br.lo), min(x2, br.hi)
                    if hi >= lo - tol:
                        segments.append((max(lo, br.lo), min(max(hi, lo), br.hi)))
        keep_exc, drop_exc = [], []
        for xe, values in self.exceptions:
            if any(A.contains(v) for v in values):
                keep_exc.append(xe)
            else:
                drop_exc.append(xe)
        segments.extend((xe, xe) for xe in keep_exc)
        if not segments:
            return None
        union = self.space.union(segments)
        if drop_exc:
            # remove exceptional points whose image misses A; if such a point
            # is interior to a solution interval the closure is kept.
            kept = [
                (lo, hi) for lo, hi in union.segments
                if not (lo == hi and any(abs(lo - xe) <= tol for xe in drop_exc))
            ]
            if not kept:
                return None
            union = self.space.union(kept)
        return union

    def is_onto(self) -> bool:
        return self.eval_set(self.space.carrier_set()) == self.space.carrier_set()

    def iterate_eval(self, x: float, n: int) -> IntervalUnion:
        if n < 0:
            raise DomainError("iteration count must be nonnegative")
        current = self.space.union([(x, x)])
        for _ in range(n):
            current = self.eval_set(current)
        return current

    # -- inversion -----------------------------------------------------------

    def invert(self) -> "PiecewiseLinear":
        if not self.is_onto():
            carrier = self.space.carrier_set()
            image = self.eval_set(carrier)
            witness = None
            for lo, hi in carrier.segments:
                if not image.contains(lo):
                    witness = lo
                    break
                if not image.contains(hi):
                    witness = hi
                    break
            raise PreconditionError("is_onto", f"no preimage near y={witness}")
        tol = self.space.raw_tol
        raw = []
        for br in self.branches:
            for a, b in br.pieces:
                if a == 0.0:
                    raise ConstructionError(
                        "cannot invert a constant piece within this representation")
                v1, v2 = sorted((a * br.lo + b, a * br.hi + b))
                raw.append((v1, v2, (1.0 / a, -b / a)))
        branches = _split_branches(raw, tol)
        shell = PiecewiseLinear(self.space, branches)
        candidates = set()
        for xe, values in self.exceptions:
            candidates.update(values)
            for br in self.branches:
                if br.lo - tol <= xe <= br.hi + tol:
                    candidates.update(a * xe + b for a, b in br.pieces)
        exceptions = []
        for v in sorted(candidates):
            true_pre = self.preimage(self.space.union([(v, v)]))
            if true_pre is None:
                raise ConstructionError("inverse of non-onto map")  # unreachable
            if any(hi - lo > tol for lo, hi in true_pre.segments):
                raise ConstructionError(
                    "pointwise preimage is not a finite point set")
            true_points = _dedupe_values([lo for lo, _ in true_pre.segments], tol)
            formula = shell.value_list(v)
            same = len(formula) == len(true_points) and all(
                abs(a - b) <= tol for a, b in zip(formula, true_points))
            if not same:
                exceptions.append((v, true_points))
        if not exceptions:
            return shell
        return PiecewiseLinear(self.space, branches, exceptions)

    # -- symbolic topology checks at breakpoints ------------------------------

    def breakpoints(self) -> Tuple[float, ...]:
        pts = [v for br in self.branches for v in (br.lo, br.hi)]
        pts.extend(x for x, _ in self.exceptions)
        pts.extend(v for comp in self.space.components for v in comp)
        return _dedupe_values(pts, self.space.raw_tol)

    def _side_limits(self, p: float):
        """(left_limits, right_limits, left_exists, right_exists) at p."""
        tol = self.space.raw_tol
        left, right = [], []
        for br in self.branches:
            at_p = [a * p + b for a, b in br.pieces]
            if br.lo < p - tol and p <= br.hi + tol:
                left.extend(at_p)
            if br.hi > p + tol and p >= br.lo - tol:
                right.extend(at_p)
        comp = next((lo, hi) for lo, hi in self.space.components
                    if lo - tol <= p <= hi + tol)
        left_exists = p > comp[0] + tol
        right_exists = p < comp[1] - tol
        return (_dedupe_values(left, tol), _dedupe_values(right, tol),
                left_exists, right_exists)

    @staticmethod
    def _subset(values, of, tol) -> bool:
        return all(any(abs(v - w) <= tol for w in of) for v in values)

    def is_usc(self) -> bool:
        tol = self.space.raw_tol
        for p in self.breakpoints():
            image = self.value_list(p)
            left, right, lex, rex = self._side_limits(p)
            if lex and not self._subset(left, image, tol):
                return False
            if rex and not self._subset(right, image, tol):
                return False
        return True

    def is_lsc(self) -> bool:
        tol = self.space.raw_tol
        for p in self.breakpoints():
            image = self.value_list(p)
            left, right, lex, rex = self._side_limits(p)
            if lex and not self._subset(image, left, tol):
                return False
            if rex and not self._subset(image, right, tol):
                return False
        return True

    def is_open(self) -> bool:
        """Images of open sets are relatively open in the carrier.

        Away from breakpoints every nonconstant affine piece maps open
        intervals to open intervals, so the decision reduces to endpoint
        attainment at breakpoints: each image value there must be
        approached from every direction the carrier requires of it.
        """
        tol = self.space.raw_tol
        for br in self.branches:
            if any(a == 0.0 for a, _ in br.pieces):
                return False
        for p in self.breakpoints():
            if not self._open_at(p, tol):
                return False
        return True

    def _open_at(self, p: float, tol: float) -> bool:
        up, down = set(), set()  # indices into `needed` covered per direction

        def cover(v, direction):
            for i, w in enumerate(needed):
                if abs(v - w) <= tol:
                    (up if direction == "up" else down).add(i)

        needed = list(self.value_list(p))
        for br in self.branches:
            interior = br.lo < p - tol and p < br.hi + tol and br.hi > p + tol
            on_left = br.lo < p - tol and p <= br.hi + tol
            on_right = br.hi > p + tol and p >= br.lo - tol
            for a, b in br.pieces:
                v = a * p + b
                if interior:
                    cover(v, "up")
                    cover(v, "down")
                    continue
                if on_left:
                    cover(v, "up" if a < 0 else "down")
                if on_right:
                    cover(v, "up" if a > 0 else "down")
        for i, v in enumerate(needed):
            comp = next(((lo, hi) for lo, hi in self.space.components
                         if lo - tol <= v <= hi + tol), None)
            if comp is None:
                return False
            need_up = v < comp[1] - tol
            need_down = v > comp[0] + tol
            if need_up and i not in up:
                return False
            if need_down and i not in down:
                return False
        return True

    def max_slope(self) -> float:
        return max(abs(a) for br in self.branches for a, _ in br.pieces)

    def is_single_valued(self) -> bool:
        return (not self.exceptions
                and all(len(br.pieces) == 1 for br in self.branches))


# ---------------------------------------------------------------------------
# image helpers shared by the orbit machinery


def image_points(F: SetValuedMap, x):
    """Pointwise image as a sorted sequence (ids or raw coordinates)."""
    if isinstance(F, FiniteRelation):
        return F.images[x] if x in F.images else F.eval(x).ids
    return F.value_list(x)


def nearest_image_point(F: SetValuedMap, x, target):
    """Point of F(x) closest to `target`; ties break toward the smallest
    point id (finite) or leftmost value (interval)."""
    if isinstance(F, FiniteRelation):
        sp = F.space
        return min(F.images[x], key=lambda y: (sp.dist(y, target), sp.index[y]))
    return min(F.value_list(x), key=lambda v: (abs(v - float(target)), v))


def member_of_image(F: SetValuedMap, y, x) -> bool:
    """y in F(x), exact on finite spaces and within TOL on intervals."""
    if isinstance(F, FiniteRelation):
        return y in F.images[x]
    tol = F.space.raw_tol
    return any(abs(float(y) - v) <= tol for v in F.value_list(x))


# ---------------------------------------------------------------------------
# constructors


def tent_family(c: float) -> PiecewiseLinear:
    """Tent map x -> c*min(x, 2-x) on [0, 2], slope sqrt(2) <= c <= 2."""
    if not (math.sqrt(2.0) - 1e-12 <= c <= 2.0 + 1e-12):
        raise DomainError(f"tent slope {c} outside [sqrt(2), 2]")
    space = IntervalSpace.interval(0.0, 2.0)
    branches = [(0.0, 1.0, ((c, 0.0),)), (1.0, 2.0, ((-c, 2.0 * c),))]
    return PiecewiseLinear(space, branches)


def identity_map(a: float = 0.0, b: float = 1.0) -> PiecewiseLinear:
    space = IntervalSpace.interval(a, b)
    return PiecewiseLinear(space, [(a, b, ((1.0, 0.0),))])


def folded_doubling_map() -> PiecewiseLinear:
    """Expanding two-branch map on [0, 2] with the two-valued seam at x = 1:
    x -> {2 - 2x} left of the seam, {4 - 2x} right of it, {0, 2} at it."""
    space = IntervalSpace.interval(0.0, 2.0)
    branches = [(0.0, 1.0, ((-2.0, 2.0),)), (1.0, 2.0, ((-2.0, 4.0),))]
    return PiecewiseLinear(space, branches, [(1.0, (0.0, 2.0))])


def symmetrize(f: PiecewiseLinear) -> PiecewiseLinear:
    """Two-valued symmetric extension of a single-valued map on [a, b],
    a >= 0: x maps to {f(|x|), -f(|x|)} on [-b, -a] union [a, b]."""
    if not f.is_single_valued():
        raise ConstructionError("symmetrize requires a single-valued map")
    if len(f.space.components) != 1:
        raise ConstructionError("symmetrize requires a single-interval carrier")
    a, b = f.space.components[0]
    if a < -f.space.raw_tol:
        raise ConstructionError("carrier must satisfy a >= 0")
    lo_vals, hi_vals = [], []
    for br in f.branches:
        (alpha, beta), = br.pieces
        lo_vals.append(min(alpha * br.lo + beta, alpha * br.hi + beta))
        hi_vals.append(max(alpha * br.lo + beta, alpha * br.hi + beta))
    if min(lo_vals) < a - f.space.raw_tol or max(hi_vals) > b + f.space.raw_tol:
        raise ConstructionError("image of f escapes [a, b]")
    if a <= f.space.raw_tol:
        space = IntervalSpace.interval(-b, b)
    else:
        space = IntervalSpace([(-b, -a), (a, b)])
    branches = []
    for br in f.branches:
        (alpha, beta), = br.pieces
        branches.append((br.lo, br.hi, ((alpha, beta), (-alpha, -beta))))
        branches.append((-br.hi, -br.lo, ((-alpha, beta), (alpha, -beta))))
    return PiecewiseLinear(space, branches)


def fiber_map(f) -> SetValuedMap:
    """Map each point to the full fiber of its value: x -> f^{-1}(f(x))."""
    if isinstance(f, FiniteRelation):
        if any(len(img) != 1 for img in f.images.values()):
            raise ConstructionError("fiber_map requires a single-valued map")
        value = {x: img[0] for x, img in f.images.items()}
        fibers = {
            x: [y for y in f.space.points if value[y] == value[x]]
            for x in f.space.points
        }
        return FiniteRelation(f.space, fibers)
    if not f.is_single_valued():
        raise ConstructionError("fiber_map requires a single-valued map")
    tol = f.space.raw_tol
    raw = []
    for bi in f.branches:
        (a1, b1), = bi.pieces
        for bj in f.branches:
            (a2, b2), = bj.pieces
            if a2 == 0.0:
                raise ConstructionError(
                    "fiber map of a constant branch is not representable")
            alpha, beta = a1 / a2, (b1 - b2) / a2
            if alpha == 0.0:
                x_lo, x_hi = bi.lo, bi.hi
                if not (bj.lo - tol <= beta <= bj.hi + tol):
                    continue
            else:
                t1 = (bj.lo - beta) / alpha
                t2 = (bj.hi - beta) / alpha
                x_lo, x_hi = max(bi.lo, min(t1, t2)), min(bi.hi, max(t1, t2))
            if x_hi > x_lo + tol:
                raw.append((x_lo, x_hi, (alpha, beta)))
    return PiecewiseLinear(f.space, _split_branches(raw, tol))


# ---------------------------------------------------------------------------
# continuity moduli


@dataclass(frozen=True)
class ModulusChain:
    """Backward chain of thresholds converting pointwise closeness into
    closeness of iterated images.

    `deltas` = (d_1, ..., d_{depth-1}) is strictly increasing with every
    entry below delta/4; dist(x, y) < d_i forces the images to be within
    d_{i+1} in the Hausdorff metric (within delta/4 after the last link),
    and 2**(-depth) < delta/2 so the tail of the orbit metric is absorbed.
    """

    delta: object
    depth: int
    deltas: tuple

    def link_target(self, i: int):
        """Hausdorff bound guaranteed after link i (0-based)."""
        if i + 1 < len(self.deltas):
            return self.deltas[i + 1]
        return self.delta / 4

    @property
    def delta1(self):
        return self.deltas[0]


def modulus(F: SetValuedMap, eta):
    """A threshold w > 0 with dist(x,y) < w implying images within eta.

    Exact on finite spaces (smallest distance realized by a violating
    pair); Lipschitz bound with safety factor 2 on piecewise-linear maps.
    """
    if not F.is_continuous():
        raise PreconditionError("is_continuous")
    if isinstance(F, FiniteRelation):
        eta = as_fraction(eta)
        if eta <= 0:
            raise DomainError("eta must be positive")
        gaps, mins = F.modulus_table()
        # smallest point distance among pairs whose image gap reaches eta
        lo, hi = 0, len(gaps)
        while lo < hi:
            mid = (lo + hi) // 2
            if gaps[mid] >= eta:
                lo = mid + 1
            else:
                hi = mid
        return mins[lo - 1] if lo else Fraction(2)
    eta = float(eta)
    if eta <= 0:
        raise DomainError("eta must be positive")
    slope = F.max_slope()
    if slope == 0.0:
        return 2.0
    return eta / (2.0 * slope)


def modulus_chain(F: SetValuedMap, delta) -> ModulusChain:
    """Build the threshold chain for target gap `delta` (see ModulusChain)."""
    if not F.is_continuous():
        raise PreconditionError("is_continuous")
    finite = isinstance(F, FiniteRelation)
    delta = as_fraction(delta) if finite else float(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    half = delta / 2
    depth = 2
    while (Fraction(1, 2 ** depth) if finite else 2.0 ** -depth) >= half:
        depth += 1
    backward = []
    nxt = delta / 4
    for _ in range(depth - 1):
        step = min(modulus(F, nxt), nxt / 2, delta / 8)
        backward.append(step)
        nxt = step
    return ModulusChain(delta=delta, depth=depth, deltas=tuple(reversed(backward)))
