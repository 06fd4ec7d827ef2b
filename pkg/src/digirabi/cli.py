"""``digirabi`` command line.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import export as ex
from . import predistort as pd
from .config import EXPERIMENTS, SCHEMA, ConfigError, load_config
from .dynamics import NumericalError
from .hilbert import SpaceSpec, TruncationError

log = logging.getLogger("digirabi")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="digirabi", description="Digital quantum Rabi simulation harness.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def cfg_args(sp):
        sp.add_argument("--config", required=True, help="INI experiment configuration")
        sp.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config value (repeatable)")
        sp.add_argument("--seed", type=int, help="seed for sampling layers (overrides experiment.seed)")

    run = sub.add_parser("run", help="run an experiment and write its data files")
    cfg_args(run)
    run.add_argument("--out", help="output directory (overrides output.dir)")
    run.add_argument("--workers", type=int, default=1, help="worker processes for sweep points")

    val = sub.add_parser("validate", help="check a configuration and print the resolved values")
    cfg_args(val)

    sub.add_parser("list-experiments", help="list experiment names")

    rec = sub.add_parser("reconstruct", help="MLE reconstruction of a Wigner dataset")
    rec.add_argument("dataset", help="CSV with columns re_alpha,im_alpha,value[,shots]")
    rec.add_argument("--out", required=True, help="output density-matrix JSON")
    rec.add_argument("--n-trunc", type=int, default=8, help="reconstruction truncation")
    rec.add_argument("--tol", type=float, default=1e-10)
    rec.add_argument("--max-iter", type=int, default=5000)

    pre = sub.add_parser("predistort", help="predistortion kernel from a measured step response")
    pre.add_argument("trace", help="CSV t_ns,value step response, uniformly sampled from t = 0")
    pre.add_argument("--out", required=True, help="output kernel CSV (step response of the kernel)")
    pre.add_argument("--fit", choices=sorted(pd.FORMS), help="also fit this form and report its parameters")
    return p


def _load(args):
    overrides = list(args.override)
    if args.seed is not None:
        overrides.append(f"experiment.seed={args.seed}")
    return load_config(args.config, overrides)


def _cmd_run(args) -> int:
    from .experiments import run_experiment

    cfg = _load(args)
    if args.workers < 1:
        raise ConfigError("--workers: must be >= 1")
    out_dir = Path(args.out or cfg["output.dir"])
    arts = run_experiment(cfg, workers=args.workers)
    out_dir.mkdir(parents=True, exist_ok=True)
    h = ex.config_hash(cfg.resolved())
    prov = {"experiment": cfg.name, "config": cfg.resolved(), "seed": cfg["experiment.seed"]}
    written = []
    for a in arts:
        path = out_dir / a.filename
        if a.kind == "grid":
            rows, cols, grid, row_label = a.data
            ex.write_grid_csv(path, rows, cols, grid, row_label=row_label)
            meta = dict(a.meta)
            units = meta.pop("units", {})
            ex.write_sidecar(path.with_suffix(".json"), units=units, provenance=prov, cfg_hash=h, extra=meta)
        elif a.kind == "trace":
            pd.write_trace_csv(a.data, path)
            meta = dict(a.meta)
            units = meta.pop("units", {})
            ex.write_sidecar(path.with_suffix(".json"), units=units, provenance=prov, cfg_hash=h,
                             extra={**meta, "dt_ns": a.data.dt, "kind": a.data.kind})
        elif a.kind == "json":
            ex.write_json(path, {**a.data, "config_hash": h, "code_version": __version__})
        else:
            raise AssertionError(a.kind)
        written.append(path)
    print(f"{cfg.name}: wrote {len(written)} files to {out_dir} (config {h[:12]})")
    return EXIT_OK


def _cmd_validate(args) -> int:
    cfg = _load(args)
    print(json.dumps(ex.jsonable({"config_hash": ex.config_hash(cfg.resolved()), **cfg.values}),
                     sort_keys=True, indent=2))
    return EXIT_OK


def _cmd_list(args) -> int:
    width = max(map(len, EXPERIMENTS))
    for name, desc in EXPERIMENTS.items():
        print(f"{name:<{width}}  {desc}")
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    from .tomo import WignerDataset, mle_reconstruct

    try:
        alphas, values, shots = ex.read_wigner_dataset_csv(args.dataset)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"dataset: {exc}") from None
    if args.n_trunc < 1:
        raise ConfigError("--n-trunc: must be >= 1")
    from .measure import _pad_dim

    amp = float(np.max(np.abs(alphas)))
    build = SpaceSpec(_pad_dim(args.n_trunc, amp) - 1)
    try:
        ds = WignerDataset(alphas, values, build, SpaceSpec(args.n_trunc),
                           shots=None if shots is None else shots)
    except ValueError as exc:
        raise ConfigError(f"dataset: {exc}") from None
    res = mle_reconstruct(ds, tol=args.tol, max_iter=args.max_iter)
    meta = {"loglik": res.loglik, "iterations": res.iterations, "converged": res.converged,
            "rank_deficient": res.rank_deficient, "n_trunc": args.n_trunc, "source": str(args.dataset),
            "code_version": __version__}
    ex.write_density_json(args.out, res.rho, meta)
    print(f"reconstructed dim {res.rho.shape[0]} in {res.iterations} iterations "
          f"(converged={res.converged}) -> {args.out}")
    return EXIT_OK


def _cmd_predistort(args) -> int:
    try:
        trace = pd.read_trace_csv(args.trace)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"trace: {exc}") from None
    try:
        kernel = pd.invert_kernel(trace)
    except ValueError as exc:
        raise NumericalError(str(exc)) from None
    pd.write_trace_csv(kernel, args.out)
    meta = {"source": str(args.trace), "dt_ns": trace.dt, "n": len(trace), "kind": kernel.kind,
            "flatness": pd.flatness(trace, kernel), "code_version": __version__}
    if args.fit:
        fit = pd.fit_step_form(trace, args.fit)
        meta["fit"] = {"form": fit.form, "params": fit.params, "residual_rms": fit.residual_rms,
                       "converged": fit.converged}
    ex.write_json(Path(args.out).with_suffix(".json"), meta)
    print(f"kernel of {len(trace)} samples -> {args.out} (flatness {meta['flatness']:.2e})")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "validate": _cmd_validate,
    "list-experiments": _cmd_list,
    "reconstruct": _cmd_reconstruct,
    "predistort": _cmd_predistort,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, TruncationError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


__all__ = ["main", "SCHEMA"]
