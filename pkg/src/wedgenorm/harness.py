"""Seeded Monte Carlo campaigns behind the command line tool.

Randomness is keyed by ``(seed, d, trial)`` for the sampled tensor and by
``(seed, d, trial, 1, restart)`` for optimizer restarts, so any subset of
trials can be recomputed alone, and serial and parallel runs give the same
numbers.  Each ``run_*`` function returns plain rows and never touches the
file system; the ``write_*`` helpers do the I/O.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from . import asymptotics as asy
from . import ensembles as ens
from .baselines import asymmetric_power, sample_asymmetric, sample_symmetric, symmetric_power
from .errors import InvalidArgument
from .exterior import COMPLEX, FIELDS, gme, hodge, hs_norm_sq, sample_gaussian
from .grassmann import OptimizerConfig, duality_check, injnorm_estimate, injnorm_exact_p2
from .rng import make_rng
from .svgplot import Figure

RUN_FIELDS = ("seed", "trial", "field", "p", "d", "estimate", "normalized",
              "iterations", "restarts_used", "wall_ms")


@dataclass
class ExperimentConfig:
    """Parameters shared by all subcommands; ``None`` means "use the default"."""

    p: int | None = None
    d: int | None = None
    d_min: int | None = None
    d_max: int | None = None
    d_step: int | None = None
    m: int | None = None
    field: str = "real"
    trials: int | None = None
    restarts: int | None = None
    seed: int = 0
    out: str | None = None
    plot: str | None = None
    workers: int = 1
    no_timing: bool = False

    def __post_init__(self):
        if self.field not in FIELDS:
            raise InvalidArgument(f"field must be one of {FIELDS}, got {self.field!r}")
        if self.trials is not None and self.trials < 1:
            raise InvalidArgument("trials must be >= 1")
        if self.restarts is not None and self.restarts < 1:
            raise InvalidArgument("restarts must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidArgument("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise InvalidArgument("workers must be >= 1")

    @classmethod
    def from_json(cls, path, **overrides) -> "ExperimentConfig":
        with open(path) as fh:
            raw = json.load(fh)
        known = {f.name for f in fields(cls)}
        data = {}
        for key, val in raw.items():
            name = key.replace("-", "_")
            if name not in known:
                raise InvalidArgument(f"unknown config key {key!r} in {path}")
            data[name] = val
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def d_values(self) -> list[int]:
        if self.d is not None:
            return [self.d]
        if self.d_min is None or self.d_max is None:
            raise InvalidArgument("give --d or both --d-min and --d-max")
        ds = list(range(self.d_min, self.d_max + 1, self.d_step or 1))
        if not ds:
            raise InvalidArgument(f"empty d range [{self.d_min}, {self.d_max}]")
        return ds

    def metadata(self) -> dict:
        return {k: v for k, v in dataclasses.asdict(self).items() if k not in ("out", "plot", "workers")}


def default_trials(p: int, d: int) -> int:
    """Sample counts used for the reference figures."""
    if p == 2:
        return 200
    if p == 3:
        return 100 if d <= 250 else 20
    if p == 4:
        return 100 if d <= 70 else 10
    return 20


def _optimizer_config(cfg: ExperimentConfig, d: int, trial: int) -> OptimizerConfig:
    ss = np.random.SeedSequence(int(cfg.seed), spawn_key=(d, trial, 1))
    return OptimizerConfig(restarts=cfg.restarts, rng_seed=ss)


# --------------------------------------------------------------------------
# injnorm sweep


def injnorm_trial(cfg: ExperimentConfig, p: int, d: int, trial: int) -> dict:
    """One row of the sweep: sample, estimate, normalize by ``sqrt(d - p)``."""
    t0 = time.perf_counter()
    T = sample_gaussian(d, p, cfg.field, make_rng(cfg.seed, d, trial))
    if p == 2:
        est, iters, used = injnorm_exact_p2(T), 0, 0
    else:
        ocfg = _optimizer_config(cfg, d, trial)
        res = injnorm_estimate(T, ocfg)
        est, iters, used = res.best_value, res.total_iterations, ocfg.restarts_for(p)
    wall = 0.0 if cfg.no_timing else 1e3 * (time.perf_counter() - t0)
    return dict(seed=cfg.seed, trial=trial, field=cfg.field, p=p, d=d, estimate=est,
                normalized=est / math.sqrt(d - p), iterations=iters, restarts_used=used, wall_ms=wall)


def _safe_trial(args):
    cfg, p, d, trial = args
    try:
        return injnorm_trial(cfg, p, d, trial)
    except Exception as exc:  # recorded, the sweep continues
        return {"error": f"{type(exc).__name__}: {exc}", "d": d, "trial": trial}


def _map(func, jobs, workers):
    if workers <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, jobs, chunksize=1))


def run_injnorm_sweep(cfg: ExperimentConfig) -> list[dict]:
    p = cfg.p if cfg.p is not None else 3
    if p < 2:
        raise InvalidArgument("sweep needs p >= 2")
    jobs = []
    for d in cfg.d_values():
        if d - p < 1:
            raise InvalidArgument(f"need d > p, got d={d}, p={p}")
        n = cfg.trials or default_trials(p, d)
        jobs.extend((cfg, p, d, t) for t in range(n))
    return _map(_safe_trial, jobs, cfg.workers)


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_run_csv(path, rows, meta: dict) -> None:
    with open(path, "w", newline="") as fh:
        for key, val in meta.items():
            fh.write(f"# {key}={json.dumps(val)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RUN_FIELDS)
        for row in rows:
            if "error" in row:
                fh.write(f"# error d={row['d']} trial={row['trial']} {row['error']}\n")
            else:
                w.writerow([_fmt(row[k]) for k in RUN_FIELDS])


def means_by_d(rows) -> dict[int, float]:
    acc: dict[int, list[float]] = {}
    for r in rows:
        if "error" not in r:
            acc.setdefault(r["d"], []).append(r["normalized"])
    return {d: float(np.mean(v)) for d, v in sorted(acc.items())}


def sweep_figure(rows, p: int, field: str) -> Figure:
    means = means_by_d(rows)
    fig = Figure(title=f"injective norm, p={p}, {field}", xlabel="d", ylabel="estimate / sqrt(d - p)")
    fig.add("mean estimate", list(means), list(means.values()), style="both")
    fig.hline(f"alpha({p}) = {asy.alpha_p(p):.4f}", asy.alpha_p(p))
    return fig


# --------------------------------------------------------------------------
# ratio figure


RATIO_FIELDS = ("d", "trial", "skew", "asym", "sym", "skew_over_asym", "skew_over_sym")


def ratio_trial(args) -> dict:
    """Normalized injective norms times ``d`` for the three order-3 ensembles."""
    cfg, d, trial = args
    restarts = cfg.restarts or 10
    T = sample_gaussian(d, 3, "real", make_rng(cfg.seed, d, trial, 0))
    skew = injnorm_estimate(T, _optimizer_config(cfg, d, trial)).best_value / math.sqrt(hs_norm_sq(T))
    A = sample_asymmetric(d, make_rng(cfg.seed, d, trial, 2))
    asym = asymmetric_power(A, restarts=restarts, rng=make_rng(cfg.seed, d, trial, 3))[0] / np.linalg.norm(A)
    S = sample_symmetric(d, make_rng(cfg.seed, d, trial, 4))
    sym = symmetric_power(S, restarts=restarts, rng=make_rng(cfg.seed, d, trial, 5))[0] / np.linalg.norm(S)
    scale = float(d)  # d^{(p-1)/2} for p = 3 keeps all three curves O(1)
    return dict(d=d, trial=trial, skew=skew * scale, asym=asym * scale, sym=sym * scale,
                skew_over_asym=skew / asym, skew_over_sym=skew / sym)


def run_ratio_figure(cfg: ExperimentConfig) -> list[dict]:
    if cfg.p not in (None, 3):
        raise InvalidArgument("the ratio figure is defined for p = 3")
    if cfg.d is None and cfg.d_min is None:
        cfg = dataclasses.replace(cfg, d_min=20, d_max=120, d_step=cfg.d_step or 20)
    jobs = [(cfg, d, t) for d in cfg.d_values() for t in range(cfg.trials or 5)]
    return _map(ratio_trial, jobs, cfg.workers)


def ratio_means(rows) -> dict[int, dict]:
    out = {}
    for d in sorted({r["d"] for r in rows}):
        sub = [r for r in rows if r["d"] == d]
        out[d] = {k: float(np.mean([r[k] for r in sub])) for k in RATIO_FIELDS[2:]}
    return out


def write_rows_csv(path, columns, rows, meta: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for key, val in (meta or {}).items():
            fh.write(f"# {key}={json.dumps(val)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def ratio_figure(rows) -> Figure:
    means = ratio_means(rows)
    ds = list(means)
    fig = Figure(title="order-3 normalized injective norms", xlabel="d", ylabel="d * injnorm / ||T||")
    for key, label in (("skew", "skew-symmetric"), ("asym", "asymmetric"), ("sym", "symmetric")):
        fig.add(label, ds, [means[d][key] for d in ds], style="both")
    fig.hline(f"alpha(3) = {asy.alpha_p(3):.4f}", asy.alpha_p(3))
    return fig


# --------------------------------------------------------------------------
# bounds


def bound_paths(out: str) -> dict[str, str]:
    stem = out[:-4] if out.endswith(".csv") else out
    return {k: f"{stem}.{k}.csv" for k in ("alpha", "beta", "gamma")}


def run_bounds(cfg: ExperimentConfig) -> dict[str, asy.BoundTable]:
    ps = (cfg.p,) if cfg.p is not None else (2, 3, 4)
    return {"alpha": asy.alpha_table(ps), "beta": asy.beta_table(), "gamma": asy.gamma_table()}


def beta_figure(table: asy.BoundTable) -> Figure:
    a = [r[0] for r in table.rows]
    b = [r[1] for r in table.rows]
    return Figure(title="double-scaling constant", xlabel="filling fraction", ylabel="beta").add("beta", a, b)


# --------------------------------------------------------------------------
# spectra


@dataclass
class SpectraSummary:
    kind: str
    p: int
    m: int
    trials: int
    l1_distance: float
    max_abs_eig: float
    edge: float
    edge_rel_error: float
    exceed_fraction: float


def run_spectra(cfg: ExperimentConfig):
    """Pooled eigenvalue histogram plus per-trial edge statistics."""
    p = cfg.p if cfg.p is not None else 4
    m = cfg.m if cfg.m is not None else (cfg.d - p if cfg.d is not None else 500)
    if p < 2 or m < 1:
        raise InvalidArgument("spectra need p >= 2 and m >= 1")
    kind = ens.CBHGAE if cfg.field == COMPLEX else ens.BHGAE
    trials = cfg.trials or 1
    eigs, norms = [], []
    for t in range(trials):
        ev = ens.spectrum(ens.sample(kind, m, p, seed=make_rng(cfg.seed, m, t)))
        eigs.append(ev)
        norms.append(max(abs(ev[0]), abs(ev[-1])))
    pooled = np.sort(np.concatenate(eigs))
    edges, emp, theory = ens.histogram(pooled, p)
    edge = asy.semicircle_radius(p)
    summary = SpectraSummary(kind, p, m, trials,
                             l1_distance=float(np.sum(np.abs(emp - theory) * np.diff(edges))),
                             max_abs_eig=float(np.max(norms)), edge=edge,
                             edge_rel_error=float(abs(np.max(norms) - edge) / edge),
                             exceed_fraction=float(np.mean(np.array(norms) > edge + 0.1)))
    return summary, pooled, (edges, emp, theory)


def spectra_figure(hist, p: int, kind: str) -> Figure:
    edges, emp, theory = hist
    mids = 0.5 * (edges[:-1] + edges[1:])
    fig = Figure(title=f"{kind} spectrum, p={p}", xlabel="eigenvalue", ylabel="density")
    fig.add("empirical", mids, emp, style="scatter")
    fig.add("limiting density", mids, ens.rho_p(mids, p))
    return fig


# --------------------------------------------------------------------------
# duality


DUALITY_FIELDS = ("trial", "inj_T", "inj_hodge_T", "relative_gap", "gme_T", "gme_hodge_T")


def duality_trial(args) -> dict:
    cfg, p, d, trial = args
    T = sample_gaussian(d, p, cfg.field, make_rng(cfg.seed, d, trial))
    rep = duality_check(T, _optimizer_config(cfg, d, trial))
    # fermionic states are normalized on their sorted coefficients, which the
    # Hodge dual only permutes and re-signs
    c = float(np.linalg.norm(T.coeffs))
    c_dual = float(np.linalg.norm(hodge(T).coeffs))
    return dict(trial=trial, inj_T=rep.inj_T, inj_hodge_T=rep.inj_hodge_T, relative_gap=rep.relative_gap,
                gme_T=gme(rep.inj_T / c), gme_hodge_T=gme(rep.inj_hodge_T / c_dual))


def run_duality(cfg: ExperimentConfig) -> list[dict]:
    p = cfg.p if cfg.p is not None else 2
    d = cfg.d if cfg.d is not None else 6
    if p < 2 or d - p < 2:
        raise InvalidArgument(f"duality needs p >= 2 and d - p >= 2, got p={p}, d={d}")
    jobs = [(cfg, p, d, t) for t in range(cfg.trials or 50)]
    return _map(duality_trial, jobs, cfg.workers)


def duality_summary(rows) -> dict[str, float]:
    gaps = np.array([r["relative_gap"] for r in rows])
    q = np.quantile(gaps, [0.5, 0.9, 1.0])
    return {"median_gap": float(q[0]), "q90_gap": float(q[1]), "max_gap": float(q[2])}
