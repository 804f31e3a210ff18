"""Connected components of germ-grain structures and derived observables.

Union-find over the ball overlap graph, finite-window crossing as the
percolation proxy, probe-based covered fraction, and the per-colour census
with the monochromatic/polychromatic flag.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import overlap_pairs

__all__ = [
    "UnionFind",
    "ComponentLabeling",
    "ColorCensus",
    "connected_components",
    "crossing_exists",
    "covered_fraction",
    "probe_points",
    "color_census",
]

_PROBE_JITTER_SEED = 0x5EEDC0DE  # fixed so coverage numbers are reproducible


class UnionFind:
    """Disjoint sets over range(n) with path compression and union by size."""

    __slots__ = ("parent", "size", "count")

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, i):
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1


@dataclass(frozen=True)
class ComponentLabeling:
    """Per-ball component ids, canonicalised to the smallest member index."""

    labels: np.ndarray
    n_cc: int
    component_boxes: dict = field(default_factory=dict)

    def members(self, label):
        return np.nonzero(self.labels == label)[0]


@dataclass(frozen=True)
class ColorCensus:
    counts: np.ndarray
    monochromatic: bool
    dominant_fraction: float
    covered: np.ndarray | None = None


def connected_components(config, method="auto"):
    """Label the overlap-graph components of a configuration.

    Two balls share a label iff a chain of pairwise-overlapping balls joins
    them.  Labels are the smallest ball index of each component.
    """
    n = len(config)
    if n == 0:
        return ComponentLabeling(np.empty(0, dtype=np.int64), 0, {})
    uf = UnionFind(n)
    for i, j in overlap_pairs(config, method=method):
        uf.union(int(i), int(j))
    roots = np.fromiter((uf.find(i) for i in range(n)), dtype=np.int64, count=n)
    # canonical label = smallest index in the component
    canon = {}
    for i in range(n):
        r = int(roots[i])
        if r not in canon:
            canon[r] = i
    labels = np.fromiter((canon[int(r)] for r in roots), dtype=np.int64, count=n)
    boxes = {}
    lo_all = config.centers - config.radii[:, None]
    hi_all = config.centers + config.radii[:, None]
    for lab in np.unique(labels):
        mask = labels == lab
        boxes[int(lab)] = (lo_all[mask].min(axis=0), hi_all[mask].max(axis=0))
    return ComponentLabeling(labels, uf.count, boxes)


def crossing_exists(labeling, config, window, axis):
    """True iff one component touches both opposite window faces along the
    axis (a ball touches a face iff centre +- radius reaches it)."""
    if axis < 0 or axis >= config.dimension:
        raise ValueError(f"axis {axis} out of range for d={config.dimension}")
    if len(config) == 0:
        return False
    low = config.centers[:, axis] - config.radii <= window.lower[axis]
    high = config.centers[:, axis] + config.radii >= window.upper[axis]
    touching_low = set(labeling.labels[low].tolist())
    touching_high = set(labeling.labels[high].tolist())
    return bool(touching_low & touching_high)


def probe_points(window, probes):
    """Deterministic stratified probe lattice with >= ``probes`` points.

    One jittered point per cell of a regular m^d grid; the jitter seed is a
    module constant so repeated calls give identical probes.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    d = window.dimension
    m = max(1, round(probes ** (1.0 / d)))
    while m ** d < probes:
        m += 1
    rng = np.random.default_rng(_PROBE_JITTER_SEED)
    idx = np.stack(np.meshgrid(*([np.arange(m)] * d), indexing="ij"), axis=-1)
    idx = idx.reshape(-1, d).astype(float)
    jitter = rng.random(idx.shape)
    cell = window.sides / m
    return window.lower + (idx + jitter) * cell


def covered_fraction(config, window, probes=2048):
    """Fraction of the probe lattice covered by some ball."""
    pts = probe_points(window, probes)
    if len(config) == 0:
        return 0.0
    covered = np.zeros(len(pts), dtype=bool)
    for i in range(len(config)):
        if covered.all():
            break
        rem = ~covered
        diff = pts[rem] - config.centers[i]
        covered[rem] = (diff ** 2).sum(axis=1) <= config.radii[i] ** 2
    return float(covered.mean())


def color_census(mc, window=None, probes=2048):
    """Per-colour counts (and coverage when a window is given) plus the
    monochromatic flag.

    Empty multi-type configurations count as monochromatic, with dominant
    fraction 1 by convention.
    """
    counts = np.array([len(c) for c in mc.configs], dtype=np.int64)
    total = int(counts.sum())
    mono = int((counts > 0).sum()) <= 1
    dominant = 1.0 if total == 0 else float(counts.max()) / total
    covered = None
    if window is not None:
        covered = np.array(
            [covered_fraction(c, window, probes) for c in mc.configs])
    return ColorCensus(counts=counts, monochromatic=mono,
                       dominant_fraction=dominant, covered=covered)
