"""Compact metric spaces, compact subsets, and the Hausdorff metric.

Two carriers are supported: finite point sets with an explicit distance
table, and closed intervals on the real line (possibly a union of a few
disjoint closed components).  Every space is normalized to diameter 1 at
construction time; all distances reported by this module are in normalized
units.

Arithmetic conventions:

* finite spaces store distances as exact `Fraction`s, so every strict
  threshold comparison is decided exactly;
* interval spaces use 64-bit floats with the global tolerance `TOL`: a
  value within TOL of a threshold counts as equal to it, so "d < eps"
  means d < eps - TOL.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ConstructionError, DomainError

#: Global comparison tolerance for interval-space reals (normalized units).
TOL = 1e-9

Rational = Union[int, float, str, Fraction]


def as_fraction(x: Rational) -> Fraction:
    """Exact conversion; floats convert via their dyadic representation."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def lt(a: float, b: float) -> bool:
    """Strict a < b for interval reals; ties within TOL count as equal."""
    return a < b - TOL


def le(a: float, b: float) -> bool:
    return a <= b + TOL


def eq(a: float, b: float) -> bool:
    return abs(a - b) <= TOL


# ---------------------------------------------------------------------------
# compact subsets


@dataclass(frozen=True)
class FiniteSubset:
    """Nonempty subset of a finite space, canonically ordered."""

    space: "FiniteSpace"
    ids: tuple

    def __post_init__(self):
        if not self.ids:
            raise DomainError("compact set must be nonempty")

    def __contains__(self, point) -> bool:
        return point in self.ids

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteSubset) and self.ids == other.ids

    def __hash__(self):
        return hash(self.ids)


@dataclass(frozen=True)
class IntervalUnion:
    """Finite union of closed intervals / points, sorted and disjoint.

    Segments are raw-coordinate pairs (lo, hi) with lo <= hi; a degenerate
    segment is an isolated point.  Adjacent segments whose gap is at most
    the normalized tolerance are merged at construction.
    """

    space: "IntervalSpace"
    segments: tuple

    def __post_init__(self):
        if not self.segments:
            raise DomainError("compact set must be nonempty")

    def points(self) -> tuple:
        """Isolated points (degenerate segments)."""
        return tuple(lo for lo, hi in self.segments if lo == hi)

    def contains(self, x: float) -> bool:
        tol = self.space.raw_tol
        return any(lo - tol <= x <= hi + tol for lo, hi in self.segments)

    __contains__ = contains

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        if len(self.segments) != len(other.segments):
            return False
        tol = self.space.raw_tol
        return all(
            abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol
            for a, b in zip(self.segments, other.segments)
        )

    def __hash__(self):
        return hash(len(self.segments))

    def total_length(self) -> float:
        return sum(hi - lo for lo, hi in self.segments)


CompactSet = Union[FiniteSubset, IntervalUnion]


@dataclass(frozen=True)
class Ball:
    """Open-ball descriptor for an interval space.

    `segments` are the carrier-relative pieces (lo, hi, lo_open, hi_open);
    an end clipped at a carrier boundary is attained (closed) because the
    ball is relatively open in the carrier.
    """

    center: float
    radius_raw: float
    segments: tuple


# ---------------------------------------------------------------------------
# finite spaces


class FiniteSpace:
    """Finite point set with an exact rational distance table."""

    is_finite = True

    def __init__(self, points: Sequence[str], dist: Sequence[Sequence[Rational]],
                 labels=None, _trusted: bool = False):
        self.points = tuple(points)
        if len(set(self.points)) != len(self.points):
            raise ConstructionError("duplicate point ids")
        n = len(self.points)
        if n == 0:
            raise ConstructionError("space must be nonempty")
        table = [[as_fraction(dist[i][j]) for j in range(n)] for i in range(n)]
        if not _trusted:
            self._validate(table)
        diameter = max(max(row) for row in table)
        if diameter <= 0 and n > 1:
            raise ConstructionError("distinct points at distance zero")
        if diameter > 0:
            table = [[d / diameter for d in row] for row in table]
        self.raw_diameter = diameter
        self._dist = tuple(tuple(row) for row in table)
        self.index = {p: i for i, p in enumerate(self.points)}
        #: optional id -> raw coordinate map (set by quantization)
        self.labels = dict(labels) if labels else None
        self._int_cache = None

    @staticmethod
    def _validate(table):
        n = len(table)
        for i in range(n):
            if table[i][i] != 0:
                raise ConstructionError("nonzero diagonal entry")
            for j in range(n):
                if table[i][j] < 0:
                    raise ConstructionError("negative distance")
                if table[i][j] != table[j][i]:
                    raise ConstructionError("asymmetric distance table")
                if i != j and table[i][j] == 0:
                    raise ConstructionError("distinct points at distance zero")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if table[i][j] > table[i][k] + table[k][j]:
                        raise ConstructionError(
                            f"triangle inequality fails at ({i},{j},{k})")

    # -- metric operations -------------------------------------------------

    def _idx(self, x) -> int:
        try:
            return self.index[x]
        except KeyError:
            raise DomainError(f"unknown point id {x!r}") from None

    def dist(self, x, y) -> Fraction:
        return self._dist[self._idx(x)][self._idx(y)]

    def subset(self, ids: Iterable) -> FiniteSubset:
        ordered = sorted(set(ids), key=self._idx)
        return FiniteSubset(self, tuple(ordered))

    def carrier_set(self) -> FiniteSubset:
        return FiniteSubset(self, self.points)

    def point_to_set(self, x, A: FiniteSubset) -> Fraction:
        i = self._idx(x)
        return min(self._dist[i][self._idx(a)] for a in A.ids)

    def hausdorff(self, A: FiniteSubset, B: FiniteSubset) -> Fraction:
        d_ab = max(self.point_to_set(a, B) for a in A.ids)
        d_ba = max(self.point_to_set(b, A) for b in B.ids)
        return max(d_ab, d_ba)

    def ball(self, x, eps: Rational) -> FiniteSubset:
        eps = as_fraction(eps)
        if eps <= 0:
            raise DomainError("ball radius must be positive")
        i = self._idx(x)
        ids = [p for j, p in enumerate(self.points) if self._dist[i][j] < eps]
        return self.subset(ids)

    # -- integer fast path --------------------------------------------------

    def int_table(self):
        """(scaled integer matrix, common denominator) for engine loops."""
        if self._int_cache is None:
            den = 1
            for row in self._dist:
                for d in row:
                    den = den * d.denominator // math.gcd(den, d.denominator)
            mat = [[int(d * den) for d in row] for row in self._dist]
            self._int_cache = (mat, den)
        return self._int_cache

    def scale_threshold(self, t: Rational):
        """Return f(num, den) so that dist < t  iff  int_dist * den < num."""
        t = as_fraction(t)
        _, space_den = self.int_table()
        return t.numerator * space_den, t.denominator


# ---------------------------------------------------------------------------
# interval spaces


class IntervalSpace:
    """Union of closed real intervals with the scaled Euclidean metric."""

    is_finite = False

    def __init__(self, components: Sequence[tuple]):
        comps = sorted((float(lo), float(hi)) for lo, hi in components)
        for lo, hi in comps:
            if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
                raise ConstructionError(f"bad interval component ({lo}, {hi})")
        for (a, b), (c, d) in zip(comps, comps[1:]):
            if c <= b:
                raise ConstructionError("overlapping carrier components")
        span = comps[-1][1] - comps[0][0]
        if span <= 0:
            raise ConstructionError("carrier has zero diameter")
        self.components = tuple(comps)
        self.scale = 1.0 / span
        self.raw_tol = TOL / self.scale

    @classmethod
    def interval(cls, a: float, b: float) -> "IntervalSpace":
        return cls([(a, b)])

    # -- metric operations -------------------------------------------------

    def contains(self, x: float) -> bool:
        return any(lo - self.raw_tol <= x <= hi + self.raw_tol
                   for lo, hi in self.components)

    def clip(self, x: float) -> float:
        """Snap a point within tolerance onto the carrier."""
        if not self.contains(x):
            raise DomainError(f"point {x} outside carrier")
        for lo, hi in self.components:
            if lo - self.raw_tol <= x <= hi + self.raw_tol:
                return min(max(x, lo), hi)
        raise DomainError(f"point {x} outside carrier")

    def dist(self, x: float, y: float) -> float:
        if not (self.contains(x) and self.contains(y)):
            raise DomainError("point outside carrier")
        return abs(x - y) * self.scale

    def union(self, segments: Iterable[tuple]) -> IntervalUnion:
        segs = sorted((float(lo), float(hi)) for lo, hi in segments)
        if any(hi < lo - self.raw_tol for lo, hi in segs):
            raise ConstructionError("inverted segment")
        merged = []
        for lo, hi in segs:
            hi = max(hi, lo)
            if merged and lo - merged[-1][1] <= self.raw_tol:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        return IntervalUnion(self, tuple((lo, hi) for lo, hi in merged))

    def carrier_set(self) -> IntervalUnion:
        return IntervalUnion(self, self.components)

    def point_to_set(self, x: float, A: IntervalUnion) -> float:
        if not self.contains(x):
            raise DomainError(f"point {x} outside carrier")
        raw = min(max(lo - x, x - hi, 0.0) for lo, hi in A.segments)
        return raw * self.scale

    def hausdorff(self, A: IntervalUnion, B: IntervalUnion) -> float:
        return max(self._directed(A, B), self._directed(B, A)) * self.scale

    def _directed(self, A: IntervalUnion, B: IntervalUnion) -> float:
        # sup_{a in A} d(a, B) is attained at a segment endpoint of A or at
        # a gap midpoint of B lying inside A (the peaks of the distance
        # function, which is piecewise linear with slope +-1).
        candidates = [p for lo, hi in A.segments for p in (lo, hi)]
        for (l1, h1), (l2, h2) in zip(B.segments, B.segments[1:]):
            mid = (h1 + l2) / 2.0
            if any(lo <= mid <= hi for lo, hi in A.segments):
                candidates.append(mid)
        return max(
            min(max(lo - c, c - hi, 0.0) for lo, hi in B.segments)
            for c in candidates
        )

    def ball(self, x: float, eps: float) -> Ball:
        if eps <= 0:
            raise DomainError("ball radius must be positive")
        if not self.contains(x):
            raise DomainError(f"point {x} outside carrier")
        r = float(eps) / self.scale
        segments = []
        for lo, hi in self.components:
            a, b = max(lo, x - r), min(hi, x + r)
            if a <= b + self.raw_tol:
                segments.append((a, b, a > lo + self.raw_tol, b < hi - self.raw_tol))
        return Ball(center=x, radius_raw=r, segments=tuple(segments))

    def sample(self, rng) -> float:
        """Uniform point of the carrier (by length across components)."""
        total = sum(hi - lo for lo, hi in self.components)
        u = rng.next_float() * total
        for lo, hi in self.components:
            if u <= hi - lo:
                return lo + u
            u -= hi - lo
        return self.components[-1][1]


MetricSpace = Union[FiniteSpace, IntervalSpace]
