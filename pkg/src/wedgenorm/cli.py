"""Command line entry point: ``wedgenorm <subcommand> [flags]``.

Every subcommand accepts the same flag set; ``--config file.json`` supplies
defaults with the same names (dashes or underscores) and explicit flags win.
On failure a single JSON line ``{"error": ..., "message": ...}`` goes to
stderr and the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import harness as hz
from .ensembles import write_histogram_csv
from .errors import InvalidArgument
from .exterior import sample_gaussian, save_tensor
from .rng import make_rng

COMMANDS = ("injnorm-sweep", "ratio-figure", "bounds", "spectra", "duality", "sample-tensor")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wedgenorm", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--p", type=int)
    ap.add_argument("--d", type=int)
    ap.add_argument("--d-min", type=int)
    ap.add_argument("--d-max", type=int)
    ap.add_argument("--d-step", type=int)
    ap.add_argument("--m", type=int, help="block size for spectra (default 500)")
    ap.add_argument("--field", choices=("real", "complex"))
    ap.add_argument("--trials", type=int)
    ap.add_argument("--restarts", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    ap.add_argument("--plot")
    ap.add_argument("--config")
    ap.add_argument("--workers", type=int, help="worker processes for independent trials")
    ap.add_argument("--no-timing", action="store_true", default=None,
                    help="write wall_ms as 0 so reruns are byte-identical")
    return ap


def make_config(args: argparse.Namespace) -> hz.ExperimentConfig:
    flags = {f.name: getattr(args, f.name, None) for f in dataclasses.fields(hz.ExperimentConfig)}
    if args.config:
        return hz.ExperimentConfig.from_json(args.config, **flags)
    return hz.ExperimentConfig(**{k: v for k, v in flags.items() if v is not None})


def _need_out(cfg, default):
    return cfg.out or default


def cmd_injnorm_sweep(cfg):
    rows = hz.run_injnorm_sweep(cfg)
    out = _need_out(cfg, "injnorm.csv")
    p = cfg.p if cfg.p is not None else 3
    opt = dataclasses.asdict(hz.OptimizerConfig(restarts=cfg.restarts))
    opt["rng_seed"] = "streams (seed, d, trial, 1, restart)"
    hz.write_run_csv(out, rows, {**cfg.metadata(), "p": p, "optimizer": opt})
    for d, mean in hz.means_by_d(rows).items():
        print(f"d={d} mean_normalized={mean:.6f}")
    failed = sum("error" in r for r in rows)
    if failed:
        print(f"failed_trials={failed}")
    if cfg.plot:
        hz.sweep_figure(rows, p, cfg.field).save(cfg.plot)


def cmd_ratio_figure(cfg):
    rows = hz.run_ratio_figure(cfg)
    hz.write_rows_csv(_need_out(cfg, "ratios.csv"), hz.RATIO_FIELDS, rows, cfg.metadata())
    for d, m in hz.ratio_means(rows).items():
        print(f"d={d} " + " ".join(f"{k}={v:.6f}" for k, v in m.items()))
    if cfg.plot:
        hz.ratio_figure(rows).save(cfg.plot)


def cmd_bounds(cfg):
    tables = hz.run_bounds(cfg)
    paths = hz.bound_paths(_need_out(cfg, "bounds.csv"))
    for key, table in tables.items():
        table.write_csv(paths[key])
        print(f"wrote {paths[key]}")
    for p, e, a in tables["alpha"].rows:
        print(f"p={p} E0={e:.8f} alpha={a:.8f}")
    if cfg.plot:
        hz.beta_figure(tables["beta"]).save(cfg.plot)


def cmd_spectra(cfg):
    summary, eigs, hist = hz.run_spectra(cfg)
    write_histogram_csv(_need_out(cfg, "spectrum.csv"), *hist)
    for key, val in dataclasses.asdict(summary).items():
        print(f"{key}={val}")
    if cfg.plot:
        hz.spectra_figure(hist, summary.p, summary.kind).save(cfg.plot)


def cmd_duality(cfg):
    rows = hz.run_duality(cfg)
    hz.write_rows_csv(_need_out(cfg, "duality.csv"), hz.DUALITY_FIELDS, rows, cfg.metadata())
    for key, val in hz.duality_summary(rows).items():
        print(f"{key}={val:.3e}")


def cmd_sample_tensor(cfg):
    p = cfg.p if cfg.p is not None else 3
    if cfg.d is None:
        raise InvalidArgument("sample-tensor needs --d")
    T = sample_gaussian(cfg.d, p, cfg.field, make_rng(cfg.seed, cfg.d, 0))
    out = _need_out(cfg, "tensor.csv")
    save_tensor(T, out)
    print(f"wrote {out}")


HANDLERS = {
    "injnorm-sweep": cmd_injnorm_sweep,
    "ratio-figure": cmd_ratio_figure,
    "bounds": cmd_bounds,
    "spectra": cmd_spectra,
    "duality": cmd_duality,
    "sample-tensor": cmd_sample_tensor,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        HANDLERS[args.command](cfg)
    except (ValueError, RuntimeError, OSError, TypeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "command": args.command, "message": str(exc)}),
              file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
