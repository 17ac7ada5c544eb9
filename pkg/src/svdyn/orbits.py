"""Pseudo-orbits, orbit segments, and truncated orbit-space points.

Orbit spaces are never materialized: everything works on finite prefixes
(`TruncatedOrbitPoint`) carrying an explicit tail bound for the weighted
orbit metric.  Three prefix flavors exist:

* ``right``: forward orbits, x_{i+1} in F(x_i);
* ``left``: backward-indexed orbits stored head first, which makes the
  adjacency rule the same as for ``right`` while the shift acts deeper
  into the past;
* ``inverse``: sequences with x_i in F(x_{i+1}); a prefix is valid for F
  exactly when it is right-valid for the inverse of F.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import AdjacencyError, DomainError
from .rng import SplitMix64
from .space import as_fraction, lt
from .svmap import (FiniteRelation, SetValuedMap, image_points,
                    member_of_image, nearest_image_point)

RIGHT = "right"
LEFT = "left"
INVERSE = "inverse"

#: default prefix depth; the tail 2**-32 sits below the float tolerance
DEFAULT_DEPTH = 32


def step_defect(F: SetValuedMap, x, y):
    """d(y, F(x)): how far y is from being a valid successor of x."""
    return F.space.point_to_set(y, F.eval(x))


def _strictly_less(space, value, bound) -> bool:
    if space.is_finite:
        return value < as_fraction(bound)
    return lt(float(value), float(bound))


def validate_pseudo_orbit(F: SetValuedMap, points: Sequence, delta) -> bool:
    """Every step lands strictly within delta of the current image."""
    return all(
        _strictly_less(F.space, step_defect(F, points[i], points[i + 1]), delta)
        for i in range(len(points) - 1)
    )


def validate_orbit(F: SetValuedMap, points: Sequence) -> bool:
    """Each point is an exact member of the previous image (tolerance on
    interval carriers)."""
    return all(
        member_of_image(F, points[i + 1], points[i])
        for i in range(len(points) - 1)
    )


@dataclass(frozen=True)
class PseudoOrbit:
    """Finite sequence with a certified slack: d(x_{i+1}, F(x_i)) < delta."""

    system: SetValuedMap
    points: tuple
    delta: object

    def __post_init__(self):
        if len(self.points) == 0:
            raise DomainError("pseudo-orbit must be nonempty")
        if not validate_pseudo_orbit(self.system, self.points, self.delta):
            raise DomainError("sequence violates the pseudo-orbit slack")

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class OrbitSegment:
    """Finite sequence with exact adjacency y_{i+1} in F(y_i)."""

    system: SetValuedMap
    points: tuple

    def __post_init__(self):
        if len(self.points) == 0:
            raise DomainError("orbit segment must be nonempty")
        if not validate_orbit(self.system, self.points):
            raise AdjacencyError("sequence violates orbit adjacency")

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class TruncatedOrbitPoint:
    """Depth-N prefix of an orbit-space element (N+1 points)."""

    system: SetValuedMap
    flavor: str
    prefix: tuple
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.flavor not in (RIGHT, LEFT, INVERSE):
            raise DomainError(f"unknown flavor {self.flavor!r}")
        if len(self.prefix) == 0:
            raise DomainError("prefix must be nonempty")
        if self.validate:
            F = self.system
            ok = all(
                member_of_image(F, self.prefix[i], self.prefix[i + 1])
                if self.flavor == INVERSE
                else member_of_image(F, self.prefix[i + 1], self.prefix[i])
                for i in range(len(self.prefix) - 1)
            )
            if not ok:
                raise AdjacencyError(f"invalid {self.flavor}-flavor prefix")

    @property
    def depth(self) -> int:
        return len(self.prefix) - 1

    @property
    def head(self):
        return self.prefix[0]

    def truncate(self, depth: int) -> "TruncatedOrbitPoint":
        if depth < 0 or depth > self.depth:
            raise DomainError("cannot truncate to a deeper prefix")
        return TruncatedOrbitPoint(self.system, self.flavor,
                                   self.prefix[: depth + 1], validate=False)


@dataclass(frozen=True)
class OrbitDistance:
    """Truncated weighted orbit distance: the true value lies in
    [partial, partial + tail_bound]."""

    partial: object
    tail_bound: object

    @property
    def upper(self):
        return self.partial + self.tail_bound


def orbit_distance(u: TruncatedOrbitPoint, v: TruncatedOrbitPoint) -> OrbitDistance:
    """Sum of d(u_n, v_n) / 2^(n+1) over the shared prefix, plus the tail
    bound 2^-depth coming from the diameter-1 normalization."""
    if u.depth != v.depth:
        raise DomainError("depth mismatch")
    if u.flavor != v.flavor:
        raise DomainError("flavor mismatch")
    space = u.system.space
    if space.is_finite:
        partial = sum(
            (space.dist(a, b) / Fraction(2 ** (n + 1))
             for n, (a, b) in enumerate(zip(u.prefix, v.prefix))),
            Fraction(0),
        )
        tail = Fraction(1, 2 ** u.depth)
    else:
        partial = sum(
            space.dist(a, b) * (0.5 ** (n + 1))
            for n, (a, b) in enumerate(zip(u.prefix, v.prefix))
        )
        tail = 2.0 ** -u.depth
    return OrbitDistance(partial=partial, tail_bound=tail)


def shift_right(u: TruncatedOrbitPoint) -> TruncatedOrbitPoint:
    """Drop the head of a right- or inverse-flavor prefix (depth N-1)."""
    if u.flavor == LEFT:
        raise DomainError("use shift_left for left-flavor prefixes")
    if u.depth < 1:
        raise DomainError("prefix too shallow to shift")
    return TruncatedOrbitPoint(u.system, u.flavor, u.prefix[1:], validate=False)


def shift_left(u: TruncatedOrbitPoint) -> TruncatedOrbitPoint:
    """Shift a left-flavor prefix one step deeper into the past."""
    if u.flavor != LEFT:
        raise DomainError("shift_left acts on left-flavor prefixes")
    if u.depth < 1:
        raise DomainError("prefix too shallow to shift")
    return TruncatedOrbitPoint(u.system, u.flavor, u.prefix[1:], validate=False)


def prepend_step(u: TruncatedOrbitPoint, z) -> TruncatedOrbitPoint:
    """Prepend z from the image of the head of an inverse-flavor prefix
    (the inverse-system action); mutually inverse with shift_right."""
    if u.flavor != INVERSE:
        raise DomainError("prepend_step acts on inverse-flavor prefixes")
    if not member_of_image(u.system, z, u.head):
        raise AdjacencyError(f"{z!r} is not in the image of the head")
    return TruncatedOrbitPoint(u.system, INVERSE, (z,) + u.prefix, validate=False)


def prepend_head(u: TruncatedOrbitPoint, z) -> TruncatedOrbitPoint:
    """Prepend a predecessor z (head in F(z)) to a right-flavor prefix."""
    if u.flavor != RIGHT:
        raise DomainError("prepend_head acts on right-flavor prefixes")
    if not member_of_image(u.system, u.head, z):
        raise AdjacencyError(f"head is not in the image of {z!r}")
    return TruncatedOrbitPoint(u.system, RIGHT, (z,) + u.prefix, validate=False)


# ---------------------------------------------------------------------------
# generation and extension


def extend_orbit(F: SetValuedMap, points: Sequence, target_len: int,
                 policy: str = "lexicographic", anchor: Optional[Sequence] = None,
                 seed: Optional[int] = None) -> OrbitSegment:
    """Extend a valid orbit segment to `target_len` points.

    Successor choice per step: ``lexicographic`` takes the smallest point
    id / leftmost value; ``nearest`` minimizes the distance to the anchor
    coordinate at the same index (ties to the smallest / leftmost);
    ``seeded`` draws uniformly from the image under the fixed generator.
    """
    pts = list(points)
    if not validate_orbit(F, pts):
        raise AdjacencyError("extend_orbit requires a valid orbit segment")
    rng = SplitMix64(seed) if seed is not None else None
    if policy == "seeded" and rng is None:
        raise DomainError("seeded policy requires a seed")
    if policy == "nearest" and anchor is None:
        raise DomainError("nearest policy requires an anchor")
    while len(pts) < target_len:
        options = image_points(F, pts[-1])
        if policy == "lexicographic":
            nxt = options[0]
        elif policy == "nearest":
            k = min(len(pts), len(anchor) - 1)
            nxt = nearest_image_point(F, pts[-1], anchor[k])
        elif policy == "seeded":
            nxt = options[rng.next_below(len(options))]
        else:
            raise DomainError(f"unknown extension policy {policy!r}")
        pts.append(nxt)
    return OrbitSegment(F, tuple(pts))


def generate_pseudo_orbit(F: SetValuedMap, delta, length: int,
                          seed: int) -> PseudoOrbit:
    """Seeded pseudo-orbit: start uniformly, follow a uniform image point,
    then perturb it inside the open delta-ball."""
    if length < 1:
        raise DomainError("length must be at least 1")
    finite = isinstance(F, FiniteRelation)
    delta_f = as_fraction(delta) if finite else float(delta)
    if delta_f <= 0:
        raise DomainError("delta must be positive")
    rng = SplitMix64(seed)
    space = F.space
    if finite:
        pts = [space.points[rng.next_below(len(space.points))]]
        for _ in range(length - 1):
            img = image_points(F, pts[-1])
            z = img[rng.next_below(len(img))]
            qualifying = [y for y in space.points if space.dist(y, z) < delta_f]
            pts.append(qualifying[rng.next_below(len(qualifying))])
    else:
        from .space import TOL
        pts = [space.sample(rng)]
        # contract below the tie tolerance so the strict slack always holds
        r = max(0.0, (delta_f - 2.0 * TOL)) / space.scale
        for _ in range(length - 1):
            img = image_points(F, pts[-1])
            z = img[rng.next_below(len(img))]
            segs = [(max(lo, z - r), min(hi, z + r))
                    for lo, hi in space.components
                    if max(lo, z - r) <= min(hi, z + r)]
            total = sum(hi - lo for lo, hi in segs)
            if total <= 0.0:
                pts.append(z)
                continue
            u = rng.next_float() * total
            nxt = z
            for lo, hi in segs:
                if u <= hi - lo:
                    nxt = lo + u
                    break
                u -= hi - lo
            pts.append(nxt)
    return PseudoOrbit(F, tuple(pts), delta_f)
