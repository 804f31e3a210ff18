"""Config-driven experiment runner.

A run is described by a JSON file::

    {
      "experiment": "wr-sample",
      "seed": 42,
      "replicas": 8,
      "sweeps": 200,
      "out": "runs/demo",
      "format": "csv",
      "threads": 1,
      "params": {
        "q": 2, "z": 0.5,
        "law": {"kind": "dirac", "radius": 0.5},
        "window": [[0, 0], [3, 3]],
        "boundary": {"kind": "free"}
      },
      "sweep": [{"name": "z", "values": [0.25, 0.5, 1.0]}]
    }

Experiment kinds and their row schemas (all rows start with the swept
parameter columns, then ``replica`` and ``seed``, and end with ``error``):

* wr-sample            count_1..count_q, total_count, n_cc, crossing,
                       covered_fraction, dominant_fraction, monochromatic,
                       acceptance_rate, ess_total
* crcm-sample          count, n_cc, crossing, covered_fraction,
                       acceptance_rate, ess_count
* fk-compare           pipeline, count_1..count_q, total_count, n_cc,
                       polychromatic
* domination           wr_total, wr_exceed, poisson_total, poisson_exceed
* phase-sweep          count_1..count_q, total_count, dominant_fraction,
                       monochromatic, acceptance_rate
* slab-renewal         n, k, z, law, count, n_cc_right, right_edge_reached,
                       right_edge_reached_half
* entropy-certificate  phi_1..phi_q, beta, gamma, epsilon, z_star, psi_at_z,
                       bound_at_z, margin
* condition-check      integrable, moment, coverage_condition,
                       coverage_method, coverage_inconclusive,
                       coverage_conjectured, atom, atom_strict,
                       atom_conjectured

Law records use the field names of :func:`wrsim.distributions.law_from_spec`,
e.g. ``{"kind": "pareto", "alpha": 1.5, "xmin": 1.0}``.  Unknown keys
anywhere in the config are hard errors.

Replica seeds derive from the master seed through a splitmix64-style mix
with the documented constants below, so a (config, seed) pair fixes every
output byte except the tool-version metadata field.  Exit codes: 0 success,
2 validation error, 3 sampler failure in any row, 4 I/O error.
"""

import argparse
import concurrent.futures
import csv
import itertools
import json
import math
import re
import sys

import numpy as np

from . import __version__
from .geometry import Window
from .distributions import law_from_spec, condition_summary
from .components import connected_components, crossing_exists, covered_fraction
from .sampling import (GibbsParams, BoundaryCondition, WidomRowlinsonChain,
                       RandomClusterChain, sample_multitype_poisson,
                       fk_coloring, effective_sample_size,
                       dump_multitype_configuration, write_run_metadata)
from .analysis import (EntropyBoundInputs, phi_m, small_z_threshold,
                       domination_test)
from .slab import (SlabParams, sample_slab, n_cc_right, reaches_right_edge)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "derive_seed",
    "sweep_plan",
    "run_experiment",
    "emit_records",
    "load_records",
    "main",
]

# seed-mix constants; ports must copy these to reproduce the replica streams
SEED_MASK = (1 << 64) - 1
SEED_MIX_POINT = 0x9E3779B97F4A7C15
SEED_MIX_REPLICA = 0xD1B54A32D192ED03

EXPERIMENT_KINDS = (
    "wr-sample", "crcm-sample", "fk-compare", "domination", "phase-sweep",
    "slab-renewal", "entropy-certificate", "condition-check",
)

_TOP_KEYS = {"experiment", "seed", "replicas", "sweeps", "out", "format",
             "threads", "params", "sweep", "dump_samples"}

_PARAM_KEYS = {
    "wr-sample": ({"q", "z", "law", "window"}, {"boundary", "probes"}),
    "phase-sweep": ({"q", "z", "law", "window"}, {"boundary"}),
    "fk-compare": ({"q", "z", "law", "window"}, set()),
    "domination": ({"q", "z", "law", "window"}, {"boundary", "threshold"}),
    "crcm-sample": ({"q", "z", "law", "window"}, {"probes"}),
    "slab-renewal": ({"n", "k", "d", "z", "law"}, {"q", "q_bar"}),
    "entropy-certificate": ({"q", "alpha", "m_side", "d", "law"},
                            {"beta", "gamma", "epsilon", "phi_probes"}),
    "condition-check": ({"law", "d"}, {"q", "q_bar", "k"}),
}

# kinds whose schema hardwires the colour count; sweeping q there is an error
_Q_FIXED_KINDS = {"wr-sample", "phase-sweep", "fk-compare",
                  "entropy-certificate"}


class ConfigError(ValueError):
    """Invalid experiment configuration; ``problems`` lists every violation."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def derive_seed(master, point_index, replica_index):
    """Stable 64-bit replica seed from (master, point, replica)."""
    x = (int(master) + SEED_MIX_POINT * (point_index + 1)
         + SEED_MIX_REPLICA * (replica_index + 1)) & SEED_MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & SEED_MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & SEED_MASK
    x ^= x >> 31
    return x


class ExperimentConfig:
    """Validated experiment description."""

    def __init__(self, kind, params, sweep, replicas, sweeps, seed, out,
                 fmt, threads, dump_samples=False):
        self.kind = kind
        self.params = params
        self.sweep = sweep
        self.replicas = replicas
        self.sweeps = sweeps
        self.seed = seed
        self.out = out
        self.fmt = fmt
        self.threads = threads
        self.dump_samples = dump_samples

    @classmethod
    def from_dict(cls, raw, overrides=None):
        problems = []
        if not isinstance(raw, dict):
            raise ConfigError(["config must be a JSON object"])
        for key in raw:
            if key not in _TOP_KEYS:
                problems.append(f"unknown key {key!r}")
        kind = raw.get("experiment")
        if kind not in EXPERIMENT_KINDS:
            problems.append(
                f"experiment must be one of {', '.join(EXPERIMENT_KINDS)}; "
                f"got {kind!r}")
        overrides = overrides or {}
        seed = overrides.get("seed", raw.get("seed"))
        if seed is None:
            problems.append("seed: a master seed is required (no wall-clock seeding)")
        elif not isinstance(seed, int) or seed < 0:
            problems.append("seed: must be a nonnegative integer")
        replicas = overrides.get("replicas", raw.get("replicas", 1))
        if not isinstance(replicas, int) or replicas < 1:
            problems.append("replicas: must be an integer >= 1")
        sweeps = raw.get("sweeps", 100)
        if not isinstance(sweeps, int) or sweeps < 1:
            problems.append("sweeps: must be an integer >= 1")
        fmt = overrides.get("format", raw.get("format", "csv"))
        if fmt not in ("csv", "jsonl"):
            problems.append(f"format: must be csv or jsonl, got {fmt!r}")
        threads = overrides.get("threads", raw.get("threads", 1))
        if not isinstance(threads, int) or threads < 1:
            problems.append("threads: must be an integer >= 1")
        out = overrides.get("out", raw.get("out"))
        dump_samples = raw.get("dump_samples", False)
        if not isinstance(dump_samples, bool):
            problems.append("dump_samples: must be a boolean")

        params = raw.get("params")
        if not isinstance(params, dict):
            problems.append("params: required object")
            params = {}
        elif kind in _PARAM_KEYS:
            required, optional = _PARAM_KEYS[kind]
            allowed = required | optional
            for key in params:
                if key not in allowed:
                    problems.append(f"params.{key}: unknown for {kind}")
            for key in required:
                if key not in params:
                    problems.append(f"params.{key}: required for {kind}")

        sweep_raw = raw.get("sweep", [])
        sweep = []
        if not isinstance(sweep_raw, list):
            problems.append("sweep: must be a list of axes")
        else:
            allowed = set()
            if kind in _PARAM_KEYS:
                required, optional = _PARAM_KEYS[kind]
                allowed = required | optional
                if kind in _Q_FIXED_KINDS:
                    allowed = allowed - {"q"}
            for i, axis in enumerate(sweep_raw):
                if (not isinstance(axis, dict)
                        or set(axis) != {"name", "values"}):
                    problems.append(
                        f"sweep[{i}]: must be {{'name':…, 'values':[…]}}")
                    continue
                name, values = axis["name"], axis["values"]
                if name not in allowed:
                    problems.append(
                        f"sweep[{i}].name: {name!r} is not a sweepable "
                        f"parameter of {kind}")
                if not isinstance(values, list) or not values:
                    problems.append(f"sweep[{i}].values: nonempty list required")
                    continue
                sweep.append((name, list(values)))

        if problems:
            raise ConfigError(problems)
        return cls(kind=kind, params=params, sweep=sweep, replicas=replicas,
                   sweeps=sweeps, seed=seed, out=out, fmt=fmt,
                   threads=threads, dump_samples=dump_samples)

    @classmethod
    def from_file(cls, path, overrides=None):
        with open(path) as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError([f"config is not valid JSON: {exc}"])
        return cls.from_dict(raw, overrides)

    def resolved(self):
        return {
            "experiment": self.kind, "seed": self.seed,
            "replicas": self.replicas, "sweeps": self.sweeps,
            "format": self.fmt, "threads": self.threads,
            "params": self.params,
            "sweep": [{"name": n, "values": v} for n, v in self.sweep],
            "dump_samples": self.dump_samples,
        }


def sweep_plan(config):
    """Cartesian product of the sweep axes in declaration order (row-major);
    a single empty point when there are no axes."""
    if not config.sweep:
        return [{}]
    names = [n for n, _ in config.sweep]
    grids = [v for _, v in config.sweep]
    return [dict(zip(names, combo)) for combo in itertools.product(*grids)]


# ---------------------------------------------------------------- builders

def _window_from(value):
    if (not isinstance(value, list) or len(value) != 2):
        raise ValueError("window must be [[lower…], [upper…]]")
    return Window(value[0], value[1])


def _boundary_from(value, q):
    if value is None:
        return BoundaryCondition.free()
    kind = value.get("kind")
    if kind == "free":
        if set(value) != {"kind"}:
            raise ValueError("free boundary takes no other fields")
        return BoundaryCondition.free()
    if kind == "ordered":
        if set(value) != {"kind", "color", "shell"}:
            raise ValueError("ordered boundary takes fields color, shell")
        return BoundaryCondition.ordered(value["color"], value["shell"])
    raise ValueError(f"unknown boundary kind {kind!r}")


def _gibbs_from(merged):
    q = int(merged["q"])
    z = merged["z"]
    z = tuple(float(v) for v in z) if isinstance(z, list) else (float(z),) * q
    law = merged["law"]
    if isinstance(law, list):
        laws = tuple(law_from_spec(s) for s in law)
    else:
        laws = (law_from_spec(law),) * q
    window = _window_from(merged["window"])
    boundary = _boundary_from(merged.get("boundary"), q)
    return GibbsParams(q=q, z=z, laws=laws, window=window, boundary=boundary)


def _slab_from(merged):
    return SlabParams(n=float(merged["n"]), k=float(merged["k"]),
                      d=int(merged["d"]), z=float(merged["z"]),
                      law=law_from_spec(merged["law"]),
                      q=float(merged.get("q", 2.0)),
                      q_bar=float(merged.get("q_bar", 2.5)))


def _point_cell(value):
    """CSV/JSONL representation of a swept value (dict laws -> stable JSON)."""
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return value


# ---------------------------------------------------------------- runners

def _wr_chain_rows(cfg, merged, rng, with_geometry):
    params = _gibbs_from(merged)
    chain = WidomRowlinsonChain(params, rng)
    burn = cfg.sweeps // 2
    totals = []
    for s in range(cfg.sweeps):
        chain.sweep()
        if s >= burn:
            totals.append(chain.total_count)
    state = chain.state()
    counts = state.counts()
    total = int(counts.sum())
    dominant = 1.0 if total == 0 else float(counts.max()) / total
    mono = int((counts > 0).sum()) <= 1
    row = {f"count_{i + 1}": int(c) for i, c in enumerate(counts)}
    row["total_count"] = total
    if with_geometry:
        merged_cfg, _ = state.merged()
        labeling = connected_components(merged_cfg)
        row["n_cc"] = labeling.n_cc
        row["crossing"] = int(crossing_exists(labeling, merged_cfg,
                                              params.window, axis=0))
        row["covered_fraction"] = covered_fraction(
            merged_cfg, params.window, int(merged.get("probes", 1024)))
    row["dominant_fraction"] = dominant
    row["monochromatic"] = int(mono)
    row["acceptance_rate"] = chain.acceptance_rate
    if with_geometry:
        row["ess_total"] = effective_sample_size(totals)
    return row, state, chain


def _run_wr_sample(cfg, merged, rng):
    row, state, chain = _wr_chain_rows(cfg, merged, rng, with_geometry=True)
    return [row], state


def _run_phase_sweep(cfg, merged, rng):
    row, state, chain = _wr_chain_rows(cfg, merged, rng, with_geometry=False)
    return [row], state


def _run_crcm_sample(cfg, merged, rng):
    q = float(merged["q"])
    law = law_from_spec(merged["law"])
    window = _window_from(merged["window"])
    chain = RandomClusterChain(window, float(merged["z"]), law, q, rng)
    burn = cfg.sweeps // 2
    counts = []
    for s in range(cfg.sweeps):
        chain.sweep()
        if s >= burn:
            counts.append(chain.n)
    state = chain.state()
    labeling = connected_components(state)
    row = {
        "count": len(state),
        "n_cc": labeling.n_cc,
        "crossing": int(crossing_exists(labeling, state, window, axis=0)),
        "covered_fraction": covered_fraction(state, window,
                                             int(merged.get("probes", 1024))),
        "acceptance_rate": chain.acceptance_rate,
        "ess_count": effective_sample_size(counts),
    }
    return [row], None


def _run_fk_compare(cfg, merged, rng):
    params = _gibbs_from(merged)
    if len(set(params.z)) != 1 or len(set(params.laws)) != 1:
        raise ValueError("fk-compare requires symmetric activities and laws")
    q = params.q
    cluster = RandomClusterChain(params.window, params.z[0], params.laws[0],
                                 q, rng)
    cluster.run(cfg.sweeps)
    colored = fk_coloring(cluster.state(), q, rng)
    wr = WidomRowlinsonChain(params, rng)
    wr.run(cfg.sweeps)
    rows = []
    for pipeline, mc in (("fk", colored), ("wr", wr.state())):
        counts = mc.counts()
        merged_cfg, _ = mc.merged()
        rows.append({
            "pipeline": pipeline,
            **{f"count_{i + 1}": int(c) for i, c in enumerate(counts)},
            "total_count": int(counts.sum()),
            "n_cc": connected_components(merged_cfg).n_cc,
            "polychromatic": int((counts > 0).sum() > 1),
        })
    return rows, None


def _run_domination(cfg, merged, rng):
    params = _gibbs_from(merged)
    threshold = merged.get("threshold")
    if threshold is None:
        threshold = round(params.expected_count)
    chain = WidomRowlinsonChain(params, rng)
    chain.run(cfg.sweeps)
    wr_total = chain.total_count
    poisson = sample_multitype_poisson(params, rng)
    po_total = poisson.total_count()
    row = {
        "wr_total": wr_total,
        "wr_exceed": int(wr_total >= threshold),
        "poisson_total": po_total,
        "poisson_exceed": int(po_total >= threshold),
    }
    return [row], None


def _run_slab_renewal(cfg, merged, rng):
    params = _slab_from(merged)
    config = sample_slab(params, rng)
    row = {
        "n": params.n,
        "k": params.k,
        "z": params.z,
        "law": _point_cell(merged["law"]),
        "count": len(config),
        "n_cc_right": n_cc_right(config, params),
        "right_edge_reached": int(reaches_right_edge(config, params)),
        "right_edge_reached_half": int(
            reaches_right_edge(config, params, edge=params.n / 2.0)),
    }
    return [row], None


def _run_entropy_certificate(cfg, merged, rng):
    q = int(merged["q"])
    alpha = tuple(float(a) for a in merged["alpha"])
    m_side = float(merged["m_side"])
    d = int(merged["d"])
    law = merged["law"]
    laws = ([law_from_spec(s) for s in law] if isinstance(law, list)
            else [law_from_spec(law)] * q)
    probes = int(merged.get("phi_probes", 20000))
    phi = tuple(phi_m(l, m_side, d, probes=probes, rng=rng)[0] for l in laws)
    if all(k in merged for k in ("beta", "gamma", "epsilon")):
        inputs = EntropyBoundInputs(
            z=0.0, alpha=alpha, beta=float(merged["beta"]),
            gamma=float(merged["gamma"]), epsilon=float(merged["epsilon"]),
            m_side=m_side, d=d, phi=phi, q=q)
    else:
        inputs = EntropyBoundInputs.with_default_margins(
            0.0, alpha, m_side, d, phi)
    cert = small_z_threshold(inputs)
    row = {f"phi_{i + 1}": phi[i] for i in range(q)}
    row.update({
        "beta": inputs.beta, "gamma": inputs.gamma, "epsilon": inputs.epsilon,
        "z_star": cert.z_star, "psi_at_z": cert.psi_at_z,
        "bound_at_z": cert.bound_at_z, "margin": cert.margin,
    })
    return [row], None


def _run_condition_check(cfg, merged, rng):
    law = law_from_spec(merged["law"])
    q = int(merged.get("q", 2))
    summary = condition_summary(law, int(merged["d"]), q,
                                q_bar=merged.get("q_bar"),
                                k=merged.get("k"))
    row = {
        "integrable": int(summary["integrable"]),
        "moment": float(summary["moment"]),
        "coverage_condition": int(summary["coverage_condition"]),
        "coverage_method": summary["coverage_method"],
        "coverage_inconclusive": int(summary["coverage_inconclusive"]),
        "coverage_conjectured": int(summary["coverage_conjectured"]),
        "atom": float(summary["atom"]),
        "atom_strict": int(summary["atom_strict"]),
        "atom_conjectured": int(summary["atom_conjectured"]),
    }
    return [row], None


_RUNNERS = {
    "wr-sample": _run_wr_sample,
    "phase-sweep": _run_phase_sweep,
    "crcm-sample": _run_crcm_sample,
    "fk-compare": _run_fk_compare,
    "domination": _run_domination,
    "slab-renewal": _run_slab_renewal,
    "entropy-certificate": _run_entropy_certificate,
    "condition-check": _run_condition_check,
}

_KIND_COLUMNS = {
    "wr-sample": lambda q: [f"count_{i + 1}" for i in range(q)] + [
        "total_count", "n_cc", "crossing", "covered_fraction",
        "dominant_fraction", "monochromatic", "acceptance_rate", "ess_total"],
    "phase-sweep": lambda q: [f"count_{i + 1}" for i in range(q)] + [
        "total_count", "dominant_fraction", "monochromatic",
        "acceptance_rate"],
    "crcm-sample": lambda q: ["count", "n_cc", "crossing", "covered_fraction",
                              "acceptance_rate", "ess_count"],
    "fk-compare": lambda q: ["pipeline"] + [
        f"count_{i + 1}" for i in range(q)] + [
        "total_count", "n_cc", "polychromatic"],
    "domination": lambda q: ["wr_total", "wr_exceed", "poisson_total",
                             "poisson_exceed"],
    "slab-renewal": lambda q: ["n", "k", "z", "law", "count", "n_cc_right",
                               "right_edge_reached", "right_edge_reached_half"],
    "entropy-certificate": lambda q: [f"phi_{i + 1}" for i in range(q)] + [
        "beta", "gamma", "epsilon", "z_star", "psi_at_z", "bound_at_z",
        "margin"],
    "condition-check": lambda q: ["integrable", "moment", "coverage_condition",
                                  "coverage_method", "coverage_inconclusive",
                                  "coverage_conjectured", "atom",
                                  "atom_strict", "atom_conjectured"],
}


def experiment_schema(config):
    """Fixed column list for the configured experiment.  Sweep axes whose
    name already appears among the kind's own columns (slab geometry, say)
    are not duplicated in the prefix."""
    q = int(config.params.get("q", 2)) if config.kind != "slab-renewal" else 0
    kind_cols = _KIND_COLUMNS[config.kind](q)
    axes = [name for name, _ in config.sweep if name not in kind_cols]
    return axes + ["replica", "seed"] + kind_cols + ["error"]


def _summarize(config, records):
    """Per-point aggregates for the kinds that define them."""
    points = sweep_plan(config)
    axes = [name for name, _ in config.sweep]
    out = []
    for pi, point in enumerate(points):
        keyed = {name: _point_cell(point[name]) for name in axes}
        rows = [r for r in records
                if all(r.get(name) == keyed[name] for name in axes)
                and not r.get("error")]
        entry = dict(keyed)
        if config.kind == "domination" and rows:
            report = domination_test(
                {"total_count": [r["wr_total"] for r in rows],
                 "threshold_exceedance": [r["wr_exceed"] for r in rows]},
                {"total_count": [r["poisson_total"] for r in rows],
                 "threshold_exceedance": [r["poisson_exceed"] for r in rows]},
                min_samples=1)
            entry["observables"] = [
                {"observable": row.observable, "z_score": row.z_score,
                 "sample_mean": row.sample_mean,
                 "reference_mean": row.reference_mean, "passed": row.passed}
                for row in report.rows]
            entry["passed"] = report.passed
        elif config.kind == "slab-renewal" and rows:
            ncc = np.array([r["n_cc_right"] for r in rows])
            nonempty = ncc[ncc > 0]
            if len(nonempty):
                p_hat = float((nonempty == 1).mean())
                entry["p_hat"] = p_hat
                entry["p_stderr"] = math.sqrt(
                    max(p_hat * (1 - p_hat), 0.0) / len(nonempty))
                entry["inverse_mean_ncc"] = float(1.0 / nonempty.mean())
                entry["n_nonempty"] = int(len(nonempty))
        elif config.kind == "fk-compare" and rows:
            for pipeline in ("fk", "wr"):
                sel = [r for r in rows if r["pipeline"] == pipeline]
                if sel:
                    entry[f"{pipeline}_mean_total"] = float(
                        np.mean([r["total_count"] for r in sel]))
                    entry[f"{pipeline}_poly_rate"] = float(
                        np.mean([r["polychromatic"] for r in sel]))
        out.append(entry)
    return {"points": out}


def run_experiment(config):
    """Execute every (sweep point, replica) task.

    Returns (records, summary, final states for dumping).  Replica seed =
    mix(master seed, point index, replica index); rows are
    ordered by (point index, replica index) regardless of how the thread
    pool schedules the work.  A failing task yields a row with its ``error``
    field set; the run continues.
    """
    points = sweep_plan(config)
    axes = [name for name, _ in config.sweep]
    schema = experiment_schema(config)
    runner = _RUNNERS[config.kind]

    def task(pi, ri):
        seed = derive_seed(config.seed, pi, ri)
        rng = np.random.default_rng(seed)
        merged = {**config.params, **points[pi]}
        base = {name: _point_cell(points[pi][name]) for name in axes}
        base["replica"] = ri
        base["seed"] = seed
        try:
            rows, state = runner(config, merged, rng)
        except Exception as exc:  # runtime sampler failure: flag, continue
            row = dict(base)
            row["error"] = f"{type(exc).__name__}: {exc}"
            return [_complete_row(row, schema)], None
        out = []
        for row in rows:
            full = dict(base)
            full.update(row)
            full["error"] = ""
            out.append(_complete_row(full, schema))
        return out, state

    tasks = [(pi, ri) for pi in range(len(points))
             for ri in range(config.replicas)]
    results = {}
    if config.threads > 1:
        with concurrent.futures.ThreadPoolExecutor(config.threads) as pool:
            futures = {pool.submit(task, pi, ri): (pi, ri)
                       for pi, ri in tasks}
            for fut in concurrent.futures.as_completed(futures):
                results[futures[fut]] = fut.result()
    else:
        for pi, ri in tasks:
            results[(pi, ri)] = task(pi, ri)

    records = []
    states = {}
    for pi, ri in tasks:
        rows, state = results[(pi, ri)]
        records.extend(rows)
        if state is not None:
            states[(pi, ri)] = (state, rows[0])
    summary = _summarize(config, records)
    return records, summary, states


def _complete_row(row, schema):
    return {key: row.get(key) for key in schema}


# ---------------------------------------------------------------- emission

def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def emit_records(records, schema, out_stem, fmt, metadata):
    """Write the record stream plus the metadata sidecar; returns the paths.

    csv: fixed header then one row per record, all floats in shortest
    round-trip form.  jsonl: one JSON object per record with identical field
    names.  The sidecar ``<stem>.meta.json`` holds the tool version, resolved
    config and master seed.
    """
    if fmt not in ("csv", "jsonl"):
        raise ValueError(f"format must be csv or jsonl, got {fmt!r}")
    paths = []
    if fmt == "csv":
        path = f"{out_stem}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(schema)
            for record in records:
                writer.writerow([_format_cell(record.get(k)) for k in schema])
        paths.append(path)
    else:
        path = f"{out_stem}.jsonl"
        with open(path, "w") as fh:
            for record in records:
                clean = {k: (None if record.get(k) is None else record[k])
                         for k in schema}
                fh.write(json.dumps(clean, sort_keys=False) + "\n")
        paths.append(path)
    meta_path = f"{out_stem}.meta.json"
    with open(meta_path, "w") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(meta_path)
    return paths


_INT_RE = re.compile(r"[+-]?\d+$")


def _parse_cell(text):
    # the emitter writes ints bare and floats via repr(), so this inversion
    # is exact for round-tripping
    if text == "":
        return None
    if _INT_RE.fullmatch(text):
        return int(text)
    try:
        return float(text)
    except ValueError:
        return text


def load_records(path):
    """Parse an emitted CSV back into (schema, records); re-emitting the
    result reproduces the file byte for byte."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    schema = rows[0]
    records = []
    for row in rows[1:]:
        records.append({k: _parse_cell(v) for k, v in zip(schema, row)})
    return schema, records


def _dump_states(config, states, out_stem):
    for (pi, ri), (state, row) in sorted(states.items()):
        base = f"{out_stem}.p{pi:03d}r{ri:03d}"
        dump_multitype_configuration(state, base + ".balls.txt")
        meta = {
            "experiment": config.kind,
            "point_index": pi,
            "replica": ri,
            "seed": derive_seed(config.seed, pi, ri),
            "sweeps": config.sweeps,
        }
        for key in ("acceptance_rate", "ess_total"):
            if row.get(key) is not None:
                meta[key] = row[key]
        write_run_metadata(base + ".run.txt", meta)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="wrsim", description="hard-core/cluster model experiment runner")
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--replicas", type=int, help="override replica count")
    parser.add_argument("--out", help="output stem (overrides config)")
    parser.add_argument("--format", choices=("csv", "jsonl"),
                        help="override output format")
    parser.add_argument("--threads", type=int, help="worker pool size")
    args = parser.parse_args(argv)

    overrides = {}
    for key in ("seed", "replicas", "out", "format", "threads"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    try:
        config = ExperimentConfig.from_file(args.config, overrides)
        if not config.out:
            raise ConfigError(["out: an output stem is required"])
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4

    # fail on unwritable output before any sampling happens
    probe_path = f"{config.out}.csv" if config.fmt == "csv" else f"{config.out}.jsonl"
    try:
        with open(probe_path, "w"):
            pass
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4

    records, summary, states = run_experiment(config)
    metadata = {
        "tool_version": __version__,
        "master_seed": config.seed,
        "config": config.resolved(),
        "summary": summary,
    }
    try:
        emit_records(records, experiment_schema(config), config.out,
                     config.fmt, metadata)
        if config.dump_samples:
            _dump_states(config, states, config.out)
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 4
    if any(r.get("error") for r in records):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
