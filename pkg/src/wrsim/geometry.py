"""Spatial primitives for germ-grain models.

Marked balls, axis-aligned windows, overlap predicates and a hash-grid index
for candidate neighbour queries.

Conventions
-----------
Balls are closed: two balls overlap iff the distance between their centres is
<= the sum of their radii, so tangent balls count as overlapping.  Windows are
half-open for uniform point sampling but containment checks use closed
inequalities; both distinctions sit on Lebesgue-null events.

All values are immutable after construction and safe to share across threads.
"""

import io
import math

import numpy as np

__all__ = [
    "MarkedPoint",
    "Window",
    "Configuration",
    "SpatialGrid",
    "balls_overlap",
    "ball_inside_window",
    "neighbor_candidates",
    "overlap_pairs",
    "dump_configuration",
    "load_configuration",
]

# one ball per line, >= 12 significant digits (17 round-trips doubles exactly)
FLOAT_FORMAT = "%.16e"


class MarkedPoint:
    """A closed ball: centre in R^d plus a nonnegative radius."""

    __slots__ = ("center", "radius")

    def __init__(self, center, radius):
        center = np.asarray(center, dtype=float)
        if center.ndim != 1 or center.size < 1:
            raise ValueError("center must be a vector of dimension >= 1")
        radius = float(radius)
        if not radius >= 0.0:
            raise ValueError(f"radius must be nonnegative, got {radius}")
        center.setflags(write=False)
        self.center = center
        self.radius = radius

    @property
    def dimension(self):
        return self.center.size

    def __repr__(self):
        return f"MarkedPoint(center={self.center.tolist()}, radius={self.radius})"


class Window:
    """Axis-aligned box ``[lower, upper]`` with positive volume."""

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.shape != upper.shape or lower.ndim != 1 or lower.size < 1:
            raise ValueError("lower/upper must be equal-length vectors")
        if not np.all(lower < upper):
            raise ValueError("window requires lower[i] < upper[i] on every axis")
        lower.setflags(write=False)
        upper.setflags(write=False)
        self.lower = lower
        self.upper = upper

    @classmethod
    def cube(cls, side, d, origin=0.0):
        lo = np.full(d, float(origin))
        return cls(lo, lo + float(side))

    @property
    def dimension(self):
        return self.lower.size

    @property
    def sides(self):
        return self.upper - self.lower

    @property
    def volume(self):
        return float(np.prod(self.sides))

    def sample_points(self, rng, n):
        """n i.i.d. uniform points; half-open box semantics via U[0,1)."""
        u = rng.random((n, self.dimension))
        return self.lower + u * self.sides

    def contains_points(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((points >= self.lower) & (points <= self.upper), axis=1)

    def distance_to(self, points):
        """Euclidean distance from each point to the box (0 inside)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        excess = np.maximum(self.lower - points, 0.0)
        excess = np.maximum(excess, points - self.upper)
        return np.sqrt((excess ** 2).sum(axis=1))

    def __repr__(self):
        return f"Window({self.lower.tolist()}, {self.upper.tolist()})"


class Configuration:
    """A finite set of closed balls stored as arrays.

    ``centers`` has shape (n, d) and ``radii`` shape (n,).  Treated as
    immutable once built; samplers emit fresh instances.
    """

    __slots__ = ("centers", "radii")

    def __init__(self, centers, radii):
        centers = np.asarray(centers, dtype=float)
        radii = np.asarray(radii, dtype=float)
        if centers.ndim != 2:
            raise ValueError("centers must have shape (n, d)")
        if radii.shape != (centers.shape[0],):
            raise ValueError("radii must have shape (n,) matching centers")
        if radii.size and not np.all(radii >= 0.0):
            raise ValueError("radii must be nonnegative")
        centers.setflags(write=False)
        radii.setflags(write=False)
        self.centers = centers
        self.radii = radii

    @classmethod
    def empty(cls, d):
        return cls(np.empty((0, d)), np.empty(0))

    @classmethod
    def from_balls(cls, balls, d=None):
        balls = list(balls)
        if not balls:
            if d is None:
                raise ValueError("dimension required for an empty ball list")
            return cls.empty(d)
        centers = np.stack([b.center for b in balls])
        radii = np.array([b.radius for b in balls])
        return cls(centers, radii)

    @property
    def dimension(self):
        return self.centers.shape[1]

    def __len__(self):
        return self.centers.shape[0]

    def ball(self, i):
        return MarkedPoint(self.centers[i], self.radii[i])

    def __repr__(self):
        return f"Configuration(n={len(self)}, d={self.dimension})"


def balls_overlap(a, b):
    """Closed-ball intersection test: |x_a - x_b| <= r_a + r_b."""
    if a.center.size != b.center.size:
        raise ValueError(
            f"dimension mismatch: {a.center.size} vs {b.center.size}"
        )
    gap = a.center - b.center
    return float(gap @ gap) <= (a.radius + b.radius) ** 2


def ball_inside_window(p, w):
    """True iff the closed ball B(x, r) is contained in the window."""
    return bool(
        np.all(p.center - p.radius >= w.lower)
        and np.all(p.center + p.radius <= w.upper)
    )


class SpatialGrid:
    """Uniform hash grid over a configuration for neighbour candidates.

    Balls whose radius exceeds the cell size go to an oversize list that every
    query scans, which keeps the superset guarantee unconditional even for
    heavy-tailed radii.  Default cell size is twice the median radius.
    """

    __slots__ = ("config", "cell_size", "buckets", "oversize")

    def __init__(self, config, cell_size=None):
        if cell_size is None:
            cell_size = 2.0 * float(np.median(config.radii)) if len(config) else 1.0
            if cell_size <= 0.0:
                cell_size = 1.0
        if cell_size <= 0.0:
            raise ValueError("cell_size must be positive")
        self.config = config
        self.cell_size = float(cell_size)
        self.buckets = {}
        self.oversize = []
        inv = 1.0 / self.cell_size
        for i in range(len(config)):
            if config.radii[i] > self.cell_size:
                self.oversize.append(i)
                continue
            key = tuple(np.floor(config.centers[i] * inv).astype(np.int64))
            self.buckets.setdefault(key, []).append(i)

    def candidates(self, p):
        """Indices of every ball that could overlap ``p`` (superset, never
        misses a true partner)."""
        n = len(self.config)
        if n == 0:
            return np.empty(0, dtype=np.int64)
        reach = p.radius + self.cell_size
        span = int(math.floor(reach / self.cell_size)) + 1
        cells_to_scan = (2 * span + 1) ** self.config.dimension
        out = list(self.oversize)
        if cells_to_scan > 4 * max(1, len(self.buckets)):
            # huge query ball: scanning the lattice would cost more than
            # walking the occupied buckets, so return everything
            return np.arange(n, dtype=np.int64)
        base = np.floor(p.center / self.cell_size).astype(np.int64)
        for offset in np.ndindex(*([2 * span + 1] * self.config.dimension)):
            key = tuple(base + np.asarray(offset) - span)
            hit = self.buckets.get(key)
            if hit:
                out.extend(hit)
        return np.asarray(sorted(out), dtype=np.int64)


def neighbor_candidates(grid, p):
    """Superset of the indices of balls overlapping ``p``; may contain false
    positives, never false negatives."""
    return grid.candidates(p)


def overlap_pairs(config, method="auto"):
    """All unordered index pairs (i, j), i < j, of overlapping balls.

    method: "brute" (dense distance matrix), "grid" (hash-grid accelerated)
    or "auto" (brute below 1500 balls).
    """
    n = len(config)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    if method == "auto":
        method = "brute" if n <= 1500 else "grid"
    if method == "brute":
        diff = config.centers[:, None, :] - config.centers[None, :, :]
        d2 = (diff ** 2).sum(axis=-1)
        rsum = config.radii[:, None] + config.radii[None, :]
        hit = d2 <= rsum ** 2
        iu = np.triu_indices(n, k=1)
        mask = hit[iu]
        return np.stack([iu[0][mask], iu[1][mask]], axis=1)
    if method == "grid":
        grid = SpatialGrid(config)
        pairs = []
        for i in range(n):
            cand = grid.candidates(config.ball(i))
            cand = cand[cand > i]
            if cand.size == 0:
                continue
            diff = config.centers[cand] - config.centers[i]
            d2 = (diff ** 2).sum(axis=1)
            rsum = config.radii[cand] + config.radii[i]
            for j in cand[d2 <= rsum ** 2]:
                pairs.append((i, int(j)))
        if not pairs:
            return np.empty((0, 2), dtype=np.int64)
        return np.asarray(pairs, dtype=np.int64)
    raise ValueError(f"unknown method {method!r}")


def dump_configuration(config, dest):
    """Write one ball per line as ``x_1 ... x_d r`` in full precision."""
    close = False
    if isinstance(dest, (str, bytes)):
        dest = open(dest, "w")
        close = True
    try:
        for i in range(len(config)):
            cols = [FLOAT_FORMAT % v for v in config.centers[i]]
            cols.append(FLOAT_FORMAT % config.radii[i])
            dest.write(" ".join(cols) + "\n")
    finally:
        if close:
            dest.close()


def load_configuration(src, d=None):
    """Inverse of :func:`dump_configuration`; ``d`` required only when the
    file may be empty."""
    close = False
    if isinstance(src, (str, bytes)):
        src = open(src, "r")
        close = True
    try:
        rows = [line.split() for line in src if line.strip()]
    finally:
        if close:
            src.close()
    if not rows:
        if d is None:
            raise ValueError("dimension required to load an empty dump")
        return Configuration.empty(d)
    data = np.asarray(rows, dtype=float)
    return Configuration(data[:, :-1], data[:, -1])
