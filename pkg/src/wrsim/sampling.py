"""Samplers for the multi-type hard-core model and its random-cluster form.

The finite-volume target on a window L with activity vector z, radius laws Q_i
and boundary condition w is the multi-type Poisson process conditioned on the
authorized event A (no two balls of distinct colours overlap, boundary balls
included):

    density  1_A(w' u w) / Z   against  (x) Poisson(z_i L^d (x) Q_i).

Two exact-in-the-limit routes are provided and cross-validated: plain
rejection against the multi-type Poisson draw, and a birth-death Metropolis
chain.  The colour-blind route goes through the continuum random cluster
measure q^{N_cc} Poisson(z, Q) / Z plus uniform colouring of components
(Fortuin-Kasteleyn representation); both must agree in distribution for
symmetric parameters.

Birth-death kernel (one proposal):
  * pick birth/death with probability 1/2 and a colour i uniformly;
  * birth: a uniform centre with radius from Q_i, accepted with probability
    min(1, z_i |L| / (n_i + 1)) when the result stays authorized, rejected
    outright otherwise;
  * death: a uniform ball of colour i, accepted with min(1, n_i / (z_i |L|)).
One sweep is max(1, ceil(sum_i z_i |L|)) proposals.  The cluster chain uses
the same kernel with each acceptance ratio multiplied by q^(delta N_cc),
where delta N_cc is the exact component-count change of the proposal,
obtained by locally re-solving connectivity on the affected component.

A chain is strictly sequential; parallelise by running independent replicas
with independently seeded generators.  Emitted configurations are immutable
snapshots, safe to share across threads.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Configuration, Window
from .components import connected_components

__all__ = [
    "MultiTypeConfiguration",
    "BoundaryCondition",
    "GibbsParams",
    "RejectionBudgetError",
    "sample_poisson",
    "sample_multitype_poisson",
    "is_authorized",
    "build_boundary",
    "sample_wr_rejection",
    "sample_wr_rejection_many",
    "authorized_count",
    "WidomRowlinsonChain",
    "RandomClusterChain",
    "mcmc_wr_run",
    "mcmc_crcm_run",
    "fk_coloring",
    "effective_sample_size",
    "dump_multitype_configuration",
    "load_multitype_configuration",
    "write_run_metadata",
]


class RejectionBudgetError(RuntimeError):
    """Raised when rejection sampling exhausts its attempt budget; carries the
    number of attempts used (signals Z too small, switch to the chain)."""

    def __init__(self, attempts):
        super().__init__(f"no authorized draw in {attempts} attempts")
        self.attempts = attempts


class MultiTypeConfiguration:
    """One configuration per colour, colours indexed 1..q."""

    __slots__ = ("configs",)

    def __init__(self, configs):
        configs = tuple(configs)
        if not configs:
            raise ValueError("need at least one colour")
        d = configs[0].dimension
        if any(c.dimension != d for c in configs):
            raise ValueError("all colours must share the ambient dimension")
        self.configs = configs

    @classmethod
    def empty(cls, q, d):
        return cls([Configuration.empty(d) for _ in range(q)])

    @property
    def q(self):
        return len(self.configs)

    @property
    def dimension(self):
        return self.configs[0].dimension

    def counts(self):
        return np.array([len(c) for c in self.configs], dtype=np.int64)

    def total_count(self):
        return int(self.counts().sum())

    def merged(self):
        """Colour-blind projection: (Configuration, 1-based colour array)."""
        centers = np.concatenate([c.centers for c in self.configs], axis=0)
        radii = np.concatenate([c.radii for c in self.configs])
        colors = np.concatenate(
            [np.full(len(c), i + 1, dtype=np.int64)
             for i, c in enumerate(self.configs)])
        return Configuration(centers, radii), colors

    def __repr__(self):
        return f"MultiTypeConfiguration(q={self.q}, counts={self.counts().tolist()})"


@dataclass(frozen=True)
class BoundaryCondition:
    """Free, ordered (a one-colour shell), or an explicit outside
    configuration whose centres must lie outside the window."""

    kind: str
    color: int | None = None
    shell: float = 0.0
    outside: MultiTypeConfiguration | None = None

    @classmethod
    def free(cls):
        return cls("free")

    @classmethod
    def ordered(cls, color, shell):
        if shell < 0:
            raise ValueError("shell thickness must be nonnegative")
        if color < 1:
            raise ValueError("colors are 1-based")
        return cls("ordered", color=int(color), shell=float(shell))

    @classmethod
    def explicit(cls, outside):
        return cls("explicit", outside=outside)


FREE = BoundaryCondition.free()


@dataclass(frozen=True)
class GibbsParams:
    """(q, activities, radius laws, window, boundary condition)."""

    q: int
    z: tuple
    laws: tuple
    window: Window
    boundary: BoundaryCondition = FREE

    def __post_init__(self):
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        object.__setattr__(self, "laws", tuple(self.laws))
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if len(self.z) != self.q or len(self.laws) != self.q:
            raise ValueError("z and laws must have length q")
        if any(v < 0 for v in self.z):
            raise ValueError("activities must be nonnegative")
        if self.boundary.kind == "ordered" and not (1 <= self.boundary.color <= self.q):
            raise ValueError("ordered boundary color out of range")

    @classmethod
    def symmetric(cls, q, z, law, window, boundary=FREE):
        return cls(q=q, z=(z,) * q, laws=(law,) * q, window=window,
                   boundary=boundary)

    @property
    def z_array(self):
        return np.asarray(self.z)

    @property
    def expected_count(self):
        return float(sum(self.z)) * self.window.volume


def sample_poisson(window, z, law, rng):
    """Poisson process with intensity z Lebesgue (x) Q on the window."""
    if z < 0:
        raise ValueError("activity must be nonnegative")
    n = rng.poisson(z * window.volume)
    centers = window.sample_points(rng, n)
    radii = np.asarray(law.sample(rng, n), dtype=float)
    return Configuration(centers, radii)


def sample_multitype_poisson(params, rng):
    """q independent Poisson draws, one per colour."""
    return MultiTypeConfiguration(
        [sample_poisson(params.window, params.z[i], params.laws[i], rng)
         for i in range(params.q)])


def _cross_overlap_any(c1, r1, c2, r2):
    if len(c1) == 0 or len(c2) == 0:
        return False
    d2 = ((c1[:, None, :] - c2[None, :, :]) ** 2).sum(axis=-1)
    rsum = r1[:, None] + r2[None, :]
    return bool((d2 <= rsum ** 2).any())


def _merge_boundary(mc, boundary_mc):
    """Per-colour (centers, radii) with the boundary balls folded in."""
    out = []
    for i, cfg in enumerate(mc.configs):
        if boundary_mc is not None and len(boundary_mc.configs[i]):
            bc = boundary_mc.configs[i]
            out.append((np.concatenate([cfg.centers, bc.centers]),
                        np.concatenate([cfg.radii, bc.radii])))
        else:
            out.append((cfg.centers, cfg.radii))
    return out


def is_authorized(mc, boundary=None):
    """True iff no two balls of distinct colours overlap (boundary balls are
    merged into their colours; same-colour overlap never disqualifies).

    ``boundary`` may be a materialised outside configuration, a free or
    explicit :class:`BoundaryCondition`, or None.  Ordered conditions must be
    materialised first (:func:`build_boundary`) since they are random.
    """
    if isinstance(boundary, BoundaryCondition):
        if boundary.kind == "free":
            boundary = None
        elif boundary.kind == "explicit":
            boundary = boundary.outside
        else:
            raise ValueError(
                "materialise an ordered boundary with build_boundary() first")
    merged = _merge_boundary(mc, boundary)
    q = len(merged)
    for i in range(q):
        ci, ri = merged[i]
        for j in range(i + 1, q):
            cj, rj = merged[j]
            if _cross_overlap_any(ci, ri, cj, rj):
                return False
    return True


def build_boundary(params, rng):
    """Materialise the boundary condition as outside-window balls.

    Ordered(i, shell): Poisson draw of colour i on the shell
    (window (+) shell) minus window, keeping only balls whose closed ball
    reaches the window.  Explicit boundaries are validated and passed
    through.  Free (or shell 0) gives an empty boundary.
    """
    b = params.boundary
    d = params.window.dimension
    if b.kind == "free":
        return MultiTypeConfiguration.empty(params.q, d)
    if b.kind == "explicit":
        if b.outside.q != params.q:
            raise ValueError("explicit boundary must have q colours")
        for cfg in b.outside.configs:
            if len(cfg) and np.any(params.window.contains_points(cfg.centers)):
                raise ValueError("explicit boundary centers must lie outside the window")
        return b.outside
    if b.kind == "ordered":
        if b.shell == 0.0:
            return MultiTypeConfiguration.empty(params.q, d)
        i = b.color - 1
        grown = Window(params.window.lower - b.shell,
                       params.window.upper + b.shell)
        draw = sample_poisson(grown, params.z[i], params.laws[i], rng)
        outside = ~params.window.contains_points(draw.centers) if len(draw) \
            else np.empty(0, dtype=bool)
        keep = outside.copy()
        if len(draw):
            dist = params.window.distance_to(draw.centers)
            keep &= dist <= draw.radii
        shell_cfg = Configuration(draw.centers[keep], draw.radii[keep])
        configs = [Configuration.empty(d) for _ in range(params.q)]
        configs[i] = shell_cfg
        return MultiTypeConfiguration(configs)
    raise ValueError(f"unknown boundary kind {b.kind!r}")


def sample_wr_rejection(params, rng, max_attempts=100000, boundary_mc=None):
    """First authorized multi-type Poisson draw, via plain rejection.

    Returns (configuration, attempts used).  The acceptance frequency is an
    unbiased estimate of the partition function Z given the boundary.  Raises
    :class:`RejectionBudgetError` when the budget runs out.

    For ordered boundaries a fresh shell is drawn per call unless
    ``boundary_mc`` pins one; pass it explicitly to condition several draws
    on the same boundary.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    if boundary_mc is None:
        boundary_mc = build_boundary(params, rng)
    for attempt in range(1, max_attempts + 1):
        mc = sample_multitype_poisson(params, rng)
        if is_authorized(mc, boundary_mc):
            return mc, attempt
    raise RejectionBudgetError(max_attempts)


def _batch_authorized(params, batch, rng, boundary_mc):
    """Vectorised rejection round: draw ``batch`` independent multi-type
    Poisson configurations and return the padded arrays plus the authorized
    mask.  Padding slots carry radius -inf so they can never overlap."""
    window = params.window
    counts, centers, radii = [], [], []
    for i in range(params.q):
        n_i = rng.poisson(params.z[i] * window.volume, batch)
        m = int(n_i.max()) if batch else 0
        c = window.lower + rng.random((batch, m, window.dimension)) * window.sides
        r = np.asarray(params.laws[i].sample(rng, (batch, m)), dtype=float)
        valid = np.arange(m)[None, :] < n_i[:, None]
        r = np.where(valid, r, -np.inf)
        counts.append(n_i)
        centers.append(c)
        radii.append(r)
    bad = np.zeros(batch, dtype=bool)
    boundary = [(c.centers, c.radii) for c in boundary_mc.configs]
    for i in range(params.q):
        for j in range(i + 1, params.q):
            d2 = ((centers[i][:, :, None, :] - centers[j][:, None, :, :]) ** 2).sum(-1)
            rsum = radii[i][:, :, None] + radii[j][:, None, :]
            hit = (d2 <= rsum ** 2) & (rsum >= 0)
            bad |= hit.reshape(batch, -1).any(axis=1)
        # chain colour i against every other colour's boundary balls
        for j in range(params.q):
            if j == i:
                continue
            bc, br = boundary[j]
            if len(bc) == 0:
                continue
            d2 = ((centers[i][:, :, None, :] - bc[None, None, :, :]) ** 2).sum(-1)
            rsum = radii[i][:, :, None] + br[None, None, :]
            hit = (d2 <= rsum ** 2) & (rsum >= 0)
            bad |= hit.reshape(batch, -1).any(axis=1)
    return counts, centers, radii, ~bad


def _extract_mc(params, counts, centers, radii, row):
    # the first n_i slots of every padded row are the valid balls
    configs = []
    for i in range(params.q):
        n = int(counts[i][row])
        configs.append(Configuration(centers[i][row, :n].copy(),
                                     radii[i][row, :n].copy()))
    return MultiTypeConfiguration(configs)


def sample_wr_rejection_many(params, n_samples, rng, max_attempts=10 ** 8,
                             batch=8192):
    """Vectorised rejection sampler: ``n_samples`` i.i.d. authorized draws.

    Returns (samples, attempts used).  Same law as repeated
    :func:`sample_wr_rejection`, orders of magnitude faster when Z is small.
    """
    boundary_mc = build_boundary(params, rng)
    samples = []
    attempts = 0
    while len(samples) < n_samples:
        if attempts >= max_attempts:
            raise RejectionBudgetError(attempts)
        b = int(min(batch, max_attempts - attempts))
        counts, centers, radii, ok = _batch_authorized(params, b, rng, boundary_mc)
        taken_through = b
        for row in np.nonzero(ok)[0]:
            samples.append(_extract_mc(params, counts, centers, radii, int(row)))
            if len(samples) == n_samples:
                taken_through = int(row) + 1
                break
        attempts += taken_through
    return samples, attempts


def authorized_count(params, attempts, rng, batch=8192):
    """Number of authorized draws among ``attempts`` independent multi-type
    Poisson samples (vectorised; used for partition-function estimates)."""
    boundary_mc = build_boundary(params, rng)
    done = 0
    accepted = 0
    while done < attempts:
        b = int(min(batch, attempts - done))
        _, _, _, ok = _batch_authorized(params, b, rng, boundary_mc)
        accepted += int(ok.sum())
        done += b
    return accepted


class _Buffer:
    """Growable (centers, radii) store with swap-remove deletion."""

    __slots__ = ("centers", "radii", "n")

    def __init__(self, d, cap=8):
        self.centers = np.empty((cap, d))
        self.radii = np.empty(cap)
        self.n = 0

    def append(self, x, r):
        if self.n == len(self.radii):
            self.centers = np.concatenate([self.centers, np.empty_like(self.centers)])
            self.radii = np.concatenate([self.radii, np.empty_like(self.radii)])
        self.centers[self.n] = x
        self.radii[self.n] = r
        self.n += 1

    def remove(self, j):
        self.n -= 1
        if j != self.n:
            self.centers[j] = self.centers[self.n]
            self.radii[j] = self.radii[self.n]

    def view(self):
        return self.centers[:self.n], self.radii[:self.n]

    def snapshot(self):
        return Configuration(self.centers[:self.n].copy(),
                             self.radii[:self.n].copy())


class WidomRowlinsonChain:
    """Birth-death Metropolis chain targeting the finite-volume hard-core
    specification; see the module docstring for the exact kernel."""

    def __init__(self, params, rng, boundary_mc=None):
        self.params = params
        self.rng = rng
        self.volume = params.window.volume
        if boundary_mc is None:
            boundary_mc = build_boundary(params, rng)
        self.boundary = [(c.centers, c.radii) for c in boundary_mc.configs]
        self.states = [_Buffer(params.window.dimension) for _ in range(params.q)]
        self.proposals_per_sweep = max(1, math.ceil(params.expected_count))
        self.proposals = 0
        self.accepted = 0

    @property
    def counts(self):
        return np.array([s.n for s in self.states], dtype=np.int64)

    @property
    def total_count(self):
        return int(sum(s.n for s in self.states))

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposals if self.proposals else 0.0

    def _birth_authorized(self, i, x, r):
        for j in range(self.params.q):
            if j == i:
                continue
            c, rad = self.states[j].view()
            if len(c):
                d2 = ((c - x) ** 2).sum(axis=1)
                if bool((d2 <= (rad + r) ** 2).any()):
                    return False
            bc, br = self.boundary[j]
            if len(bc):
                d2 = ((bc - x) ** 2).sum(axis=1)
                if bool((d2 <= (br + r) ** 2).any()):
                    return False
        return True

    def step(self):
        rng = self.rng
        p = self.params
        i = int(rng.integers(p.q))
        self.proposals += 1
        if rng.random() < 0.5:  # birth
            x = p.window.sample_points(rng, 1)[0]
            r = float(p.laws[i].sample(rng))
            if not self._birth_authorized(i, x, r):
                return
            ratio = p.z[i] * self.volume / (self.states[i].n + 1)
            if rng.random() < ratio:
                self.states[i].append(x, r)
                self.accepted += 1
        else:  # death
            n_i = self.states[i].n
            if n_i == 0:
                return
            j = int(rng.integers(n_i))
            ratio = n_i / (p.z[i] * self.volume)
            if rng.random() < ratio:
                self.states[i].remove(j)
                self.accepted += 1

    def sweep(self):
        for _ in range(self.proposals_per_sweep):
            self.step()

    def run(self, sweeps):
        for _ in range(sweeps):
            self.sweep()
        return self

    def state(self):
        return MultiTypeConfiguration([s.snapshot() for s in self.states])


def _connectivity_pieces(centers, radii):
    """Index groups of the overlap graph on a small ball set, via BFS with
    vectorised frontier expansion (fast on the dense graphs the cluster chain
    produces)."""
    m = len(radii)
    groups = []
    unvisited = np.ones(m, dtype=bool)
    while unvisited.any():
        seed = int(unvisited.argmax())
        comp = [seed]
        unvisited[seed] = False
        frontier = np.array([seed])
        while frontier.size and unvisited.any():
            cand = np.nonzero(unvisited)[0]
            d2 = ((centers[cand][:, None, :] - centers[frontier][None, :, :]) ** 2).sum(-1)
            rsum = radii[cand][:, None] + radii[frontier][None, :]
            hit = (d2 <= rsum ** 2).any(axis=1)
            frontier = cand[hit]
            comp.extend(frontier.tolist())
            unvisited[frontier] = False
        groups.append(np.asarray(comp, dtype=np.int64))
    return groups


class RandomClusterChain:
    """Birth-death chain for the q^{N_cc}-weighted Poisson process.

    Acceptance ratios carry the exact q^(delta N_cc) factor: a birth touching
    m distinct components changes N_cc by 1 - m; a death splits its component
    into ``pieces`` parts and changes N_cc by pieces - 1.  Component labels
    are maintained incrementally (skipped entirely when q == 1, where the
    weight is flat and the target is plain Poisson).
    """

    def __init__(self, window, z, law, q, rng):
        if q < 1:
            raise ValueError("q must be >= 1 (real values allowed)")
        if z < 0:
            raise ValueError("activity must be nonnegative")
        self.window = window
        self.z = float(z)
        self.law = law
        self.q = float(q)
        self.rng = rng
        self.volume = window.volume
        self.track = self.q != 1.0
        self.buf = _Buffer(window.dimension)
        self.labels = np.empty(8, dtype=np.int64)
        self.n_components = 0
        self._next_label = 0
        self.proposals_per_sweep = max(1, math.ceil(self.z * self.volume))
        self.proposals = 0
        self.accepted = 0

    @property
    def n(self):
        return self.buf.n

    @property
    def acceptance_rate(self):
        return self.accepted / self.proposals if self.proposals else 0.0

    def _partners(self, x, r):
        c, rad = self.buf.view()
        if len(c) == 0:
            return np.empty(0, dtype=np.int64)
        d2 = ((c - x) ** 2).sum(axis=1)
        return np.nonzero(d2 <= (rad + r) ** 2)[0]

    def _append(self, x, r, label):
        self.buf.append(x, r)
        if self.buf.n > len(self.labels):
            self.labels = np.concatenate([self.labels, np.empty_like(self.labels)])
        self.labels[self.buf.n - 1] = label

    def _remove(self, j):
        self.buf.remove(j)
        self.labels[j] = self.labels[self.buf.n]

    def step(self):
        rng = self.rng
        self.proposals += 1
        if rng.random() < 0.5:  # birth
            x = self.window.sample_points(rng, 1)[0]
            r = float(self.law.sample(rng))
            ratio = self.z * self.volume / (self.n + 1)
            touched = None
            if self.track:
                partners = self._partners(x, r)
                touched = np.unique(self.labels[:self.n][partners])
                ratio *= self.q ** (1 - len(touched))
            if rng.random() < ratio:
                self.accepted += 1
                if not self.track:
                    self._append(x, r, 0)
                    return
                if len(touched) == 0:
                    self._append(x, r, self._next_label)
                    self._next_label += 1
                    self.n_components += 1
                else:
                    keep = int(touched[0])
                    if len(touched) > 1:
                        lab = self.labels[:self.n]
                        lab[np.isin(lab, touched[1:])] = keep
                        self.n_components -= len(touched) - 1
                    self._append(x, r, keep)
        else:  # death
            if self.n == 0:
                return
            j = int(rng.integers(self.n))
            ratio = self.n / (self.z * self.volume)
            groups = None
            if self.track:
                groups = self._death_pieces(j)
                ratio *= self.q ** (len(groups) - 1)
            if rng.random() < ratio:
                self.accepted += 1
                if self.track:
                    self.n_components += len(groups) - 1
                    if len(groups) != 1:
                        for g in groups:
                            self.labels[g] = self._next_label
                            self._next_label += 1
                self._remove(j)

    def _death_pieces(self, j):
        """Connectivity groups of ball j's component after deleting j (local
        recomputation; exact)."""
        lab = self.labels[:self.n]
        members = np.nonzero(lab == lab[j])[0]
        members = members[members != j]
        if len(members) == 0:
            return []
        c, rad = self.buf.view()
        groups = _connectivity_pieces(c[members], rad[members])
        return [members[g] for g in groups]

    def sweep(self):
        for _ in range(self.proposals_per_sweep):
            self.step()

    def run(self, sweeps):
        for _ in range(sweeps):
            self.sweep()
        return self

    def state(self):
        return self.buf.snapshot()

    def state_n_cc(self):
        if self.track:
            return self.n_components
        return connected_components(self.state()).n_cc


def mcmc_wr_run(params, sweeps, rng):
    """Run the hard-core birth-death chain from empty; returns the final
    state after ``sweeps`` sweeps."""
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    return WidomRowlinsonChain(params, rng).run(sweeps).state()


def mcmc_crcm_run(window, z, law, q, sweeps, rng):
    """Run the cluster chain from empty; returns the final configuration."""
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    return RandomClusterChain(window, z, law, q, rng).run(sweeps).state()


def fk_coloring(config, q, rng):
    """Colour every component uniformly over {1..q}, i.i.d. across
    components; the output is always authorized and its colour-blind
    projection returns the input ball set."""
    if int(q) != q or q < 1:
        raise ValueError("q must be a positive integer")
    q = int(q)
    labeling = connected_components(config)
    roots = np.unique(labeling.labels)
    colors_of_root = {int(lab): int(rng.integers(1, q + 1)) for lab in roots}
    configs = []
    ball_colors = np.array([colors_of_root[int(lab)] for lab in labeling.labels],
                           dtype=np.int64) if len(config) else np.empty(0, np.int64)
    for color in range(1, q + 1):
        mask = ball_colors == color
        configs.append(Configuration(config.centers[mask], config.radii[mask]))
    return MultiTypeConfiguration(configs)


def effective_sample_size(series):
    """Autocorrelation-based ESS (Geyer initial positive sequence)."""
    x = np.asarray(series, dtype=float)
    n = x.size
    if n < 4:
        return float(n)
    x = x - x.mean()
    var = float(x @ x) / n
    if var == 0.0:
        return float(n)
    m = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, m)
    acov = np.fft.irfft(f * np.conj(f), m)[:n].real / n
    rho = acov / acov[0]
    # sum lag pairs while they stay positive
    s = 0.0
    k = 1
    while k + 1 < n:
        gamma = rho[k] + rho[k + 1]
        if gamma <= 0:
            break
        s += gamma
        k += 2
    ess = n / (1.0 + 2.0 * s)
    return float(min(max(ess, 1.0), n))


def dump_multitype_configuration(mc, dest):
    """Text dump, one ball per line: 1-based colour index then the geometry
    columns."""
    from .geometry import FLOAT_FORMAT
    close = False
    if isinstance(dest, (str, bytes)):
        dest = open(dest, "w")
        close = True
    try:
        for color, cfg in enumerate(mc.configs, start=1):
            for i in range(len(cfg)):
                cols = [str(color)]
                cols += [FLOAT_FORMAT % v for v in cfg.centers[i]]
                cols.append(FLOAT_FORMAT % cfg.radii[i])
                dest.write(" ".join(cols) + "\n")
    finally:
        if close:
            dest.close()


def load_multitype_configuration(src, q, d):
    close = False
    if isinstance(src, (str, bytes)):
        src = open(src, "r")
        close = True
    try:
        rows = [line.split() for line in src if line.strip()]
    finally:
        if close:
            src.close()
    per_color = {c: ([], []) for c in range(1, q + 1)}
    for row in rows:
        color = int(row[0])
        per_color[color][0].append([float(v) for v in row[1:-1]])
        per_color[color][1].append(float(row[-1]))
    configs = []
    for c in range(1, q + 1):
        centers, radii = per_color[c]
        if centers:
            configs.append(Configuration(np.asarray(centers), np.asarray(radii)))
        else:
            configs.append(Configuration.empty(d))
    return MultiTypeConfiguration(configs)


def write_run_metadata(dest, record):
    """Key-value text record (one ``key=value`` per line) accompanying a
    sample dump."""
    close = False
    if isinstance(dest, (str, bytes)):
        dest = open(dest, "w")
        close = True
    try:
        for key in record:
            dest.write(f"{key}={record[key]}\n")
    finally:
        if close:
            dest.close()
