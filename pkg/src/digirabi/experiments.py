"""Experiment drivers behind ``digirabi run``.

Each experiment reproduces one figure family as data:

* ``parity_chevron``: qubit and photon parity chevrons vs step and omega_rR/g (Fig. 1 e,g)
* ``photon_chevron``: mean photon number and photon-meter readout (Fig. 2 c,d)
* ``wigner_movie``: resonator Wigner function per Trotter step (Fig. 3 a)
* ``cat_conditional``: Wigner functions conditioned on the qubit outcome (Fig. 3 b-e)
* ``nondegenerate``: dynamics with a nonzero qubit frequency vs the ideal Rabi model (Fig. 5)
* ``trotter_compare``: first- vs second-order sequences (Fig. S9)
* ``stepsize_compare``: several step sizes at fixed simulated time (Fig. S10)
* ``entropy_chevron``: qubit entropy dynamics (Fig. S11)
* ``jc_chevron``: analog and digital JC chevrons, phase compensation (Fig. S8)
* ``predistort_demo``: flux predistortion kernels (Fig. S4)
* ``init_compare``: |0,0> vs |1,0> initial states (Fig. S7)

An experiment returns :class:`Artifact` objects; :mod:`digirabi.cli` writes
them. Sweep points are independent and may run in a process pool; results
are assembled in sweep order, and sampling noise is seeded per point from
the run seed, so outputs do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import predistort as pd
from .chevron import ChevronSpec, find_compensation_phase, find_resonances, run_chevron, satellite_detunings
from .config import METER_PRESETS, Config, ConfigError
from .dynamics import evolve_lindblad, evolve_trotter, evolve_unitary
from .hilbert import SpaceSpec, basis_state, min_n_max
from .measure import (
    QUBIT_PARITY_CONVENTION,
    PhotonMeterSpec,
    conditional_resonator,
    invert_meter,
    mean_photon,
    photon_distribution,
    photon_parity,
    qubit_entropy,
    qubit_parity,
    ramsey_meter_response,
    reduced_resonator,
    wigner_grid,
)
from .models import RabiParams, build_rabi
from .tomo import double_gaussian_fit
from .trotter import TrotterPlan

__all__ = ["Artifact", "PointJob", "simulate_point", "run_experiment", "guard_n_max"]

TWO_PI = 2 * math.pi


@dataclass
class Artifact:
    """One output file.

    ``kind`` is ``"grid"`` (rows x cols CSV plus sidecar), ``"json"`` or
    ``"trace"`` (predistortion trace CSV plus sidecar).
    """

    filename: str
    kind: str
    data: Any
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PointJob:
    """Everything needed to simulate one sweep point (picklable)."""

    g: float
    omega_rR: float
    omega_qR: float
    tau: float
    n_steps: int
    order: int
    engine: str
    t1_res: float
    decay_mode: str
    idle_per_step: float
    kerr: float
    n_max: int
    initial: str
    observables: tuple[str, ...]
    meter: tuple | None = None
    shots: int = 0
    seed: tuple[int, int] = (0, 0)
    wigner: tuple[float, int] | None = None  # (extent, points per axis)
    conditional_step: int | None = None


def guard_n_max(g: float, omega_rR: float, total_time: float) -> int:
    """Truncation guard for one point.

    The coherent amplitude is bounded by ``2 r`` and, for short times, by
    the resonant growth ``2 pi g t``; the smaller bound is used.
    """
    bound = TWO_PI * g * total_time
    if omega_rR != 0:
        bound = min(bound, 2 * g / abs(omega_rR))
    return min_n_max(bound)


def _initial(initial: str, space: SpaceSpec):
    q: int | str = int(initial) if initial in ("0", "1") else initial
    return basis_state(q, 0, space)


def _trajectory(job: PointJob):
    space = SpaceSpec(job.n_max)
    psi0 = _initial(job.initial, space)
    plan = TrotterPlan.for_rabi(job.g, job.omega_rR, job.tau, job.n_steps, order=job.order,
                                delta_q_jc=job.omega_qR)
    rabi_frame = "wigner_frames" in job.observables or job.conditional_step is not None
    decay = not math.isinf(job.t1_res)
    if job.engine == "exact":
        params = RabiParams(job.g, job.omega_rR, job.omega_qR, kerr=job.kerr, t1_res=job.t1_res)
        h = build_rabi(params, space)
        if decay:
            return evolve_lindblad([(h, job.tau)] * job.n_steps, psi0, job.t1_res, decay_mode=job.decay_mode)
        return evolve_unitary(h, psi0, plan.times, params)
    if job.engine == "lindblad" or (job.engine == "auto" and decay):
        return evolve_lindblad(plan, psi0, job.t1_res, decay_mode=job.decay_mode,
                               idle_per_step=job.idle_per_step, rabi_frame=rabi_frame)
    return evolve_trotter(plan, psi0, rabi_frame=rabi_frame)


def _meter_spec(meter: tuple) -> PhotonMeterSpec:
    tau_eff, chi2, d, mode = meter
    return PhotonMeterSpec(tau_eff, chi2, d, mode)


def simulate_point(job: PointJob) -> dict[str, Any]:
    """Simulate one sweep point and evaluate the requested observables.

    Returns a dict of per-sample arrays plus ``top_population`` (largest
    weight seen in the highest Fock level, a truncation diagnostic).
    """
    traj = _trajectory(job)
    out: dict[str, Any] = {}
    fns: dict[str, Callable] = {
        "qubit_parity": qubit_parity,
        "photon_parity": photon_parity,
        "mean_photon": mean_photon,
        "qubit_entropy": qubit_entropy,
    }
    for name in job.observables:
        if name in fns:
            out[name] = traj.map(fns[name])
    pn = np.array([photon_distribution(s) for s in traj.states])
    out["top_population"] = float(np.max(pn[:, -1]))
    if job.meter is not None:
        spec = _meter_spec(job.meter)
        rng = np.random.default_rng(np.random.SeedSequence(job.seed[0], spawn_key=(job.seed[1],)))
        shots = job.shots or None
        p = np.array([ramsey_meter_response(row, spec, shots=shots, rng=rng) for row in pn])
        out["meter_probability"] = p
        if spec.mode == "ramsey":
            out["meter_estimate"] = invert_meter(p, spec)
    if "wigner_frames" in job.observables:
        extent, npts = job.wigner or (4.0, 41)
        xs = np.linspace(-extent, extent, npts)
        grid = xs[None, :] + 1j * xs[:, None]
        frames, fits = [], []
        for s in traj.states:
            w = wigner_grid(reduced_resonator(s), grid)
            frames.append(w)
            fits.append(_fit_summary(double_gaussian_fit(xs, xs, w)))
        out["wigner_axis"] = xs
        out["wigner_frames"] = frames
        out["wigner_fits"] = fits
    if job.conditional_step is not None:
        extent, npts = job.wigner if job.wigner is not None else (4.0, 41)
        xs = np.linspace(-extent, extent, npts)
        grid = xs[None, :] + 1j * xs[:, None]
        s = traj.states[job.conditional_step]
        cond = {"all": (wigner_grid(reduced_resonator(s), grid), 1.0)}
        for label, outcome in (("q0", 0), ("q1", 1), ("plus", "+"), ("minus", "-")):
            try:
                rho, prob = conditional_resonator(s, outcome)
            except ValueError:
                continue
            cond[label] = (wigner_grid(rho, grid), prob)
        out["conditional"] = cond
        out["wigner_axis"] = xs
    out["times"] = traj.times
    return out


def _fit_summary(fit) -> dict:
    return {
        "single_peak": fit.single_peak,
        "residual_rms": fit.residual_rms,
        "peaks": [{"re": p.center.real, "im": p.center.imag, "width": p.width,
                   "amplitude": p.amplitude, "weight": p.weight} for p in fit.peaks],
    }


def map_points(fn: Callable, jobs: Sequence, workers: int = 1) -> list:
    """Ordered map over sweep points, optionally in a process pool."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, jobs, chunksize=1))


# ---------------------------------------------------------------------------
# sweep construction
# ---------------------------------------------------------------------------


def _omega_values(cfg: Config) -> tuple[str, np.ndarray, np.ndarray]:
    """``(axis_label, axis_values, omega_rR values)`` of the configured sweep."""
    kind, vals = cfg.sweep_ratios()
    g = cfg["physics.g"]
    vals = np.asarray(vals, dtype=float)
    if kind == "r":
        with np.errstate(divide="ignore"):
            omegas = np.where(np.isinf(vals), 0.0, g / np.where(np.isinf(vals), 1.0, vals))
        return "r", vals, omegas
    return "omega_rR_over_g", vals, g * vals


def _n_max_for(cfg: Config, omega_rR: float, total_time: float) -> int:
    guard = guard_n_max(cfg["physics.g"], omega_rR, total_time)
    n = cfg["physics.n_max"]
    if n == "auto":
        return guard
    if n < guard:
        r = "inf" if omega_rR == 0 else f"{cfg['physics.g'] / omega_rR:.3g}"
        raise ConfigError(f"physics.n_max: {n} is below the truncation guard {guard} for r = {r}")
    return n


def _meter_tuple(cfg: Config) -> tuple | None:
    v = cfg["meter.variant"]
    chi2 = cfg["meter.chi2"]
    if v == "none":
        return None
    if v == "parity":
        s = PhotonMeterSpec.parity(chi2)
        return (s.tau_eff, s.chi2, s.d, s.mode)
    if v == "custom":
        return (cfg["meter.tau_eff"], chi2, cfg["meter.d"], "ramsey")
    tau_eff, d = METER_PRESETS[v]
    return (tau_eff, chi2, d, "ramsey")


def _jobs(cfg: Config, omegas, observables, *, tau=None, n_steps=None, order=None, omega_qR=0.0,
          engine=None, initial=None, meter=None, wigner=None, conditional=None) -> list[PointJob]:
    tau = cfg["plan.tau"] if tau is None else tau
    n_steps = cfg["plan.n_steps"] if n_steps is None else n_steps
    engine = cfg["plan.engine"] if engine is None else engine
    kerr = cfg["physics.kerr"]
    if kerr and engine != "exact":
        raise ConfigError("physics.kerr: self-Kerr is only modelled by the exact engine (plan.engine = exact)")
    jobs = []
    for i, w in enumerate(omegas):
        jobs.append(PointJob(
            g=cfg["physics.g"], omega_rR=float(w), omega_qR=float(omega_qR), tau=tau, n_steps=int(n_steps),
            order=cfg["plan.order"] if order is None else order, engine=engine,
            t1_res=cfg["physics.t1_res"], decay_mode=cfg["plan.decay_mode"],
            idle_per_step=cfg["plan.idle_per_step"], kerr=kerr,
            n_max=_n_max_for(cfg, float(w), tau * n_steps),
            initial=cfg["physics.initial"] if initial is None else initial,
            observables=tuple(observables), meter=meter, shots=cfg["meter.shots"],
            seed=(cfg["experiment.seed"], i), wigner=wigner,
            conditional_step=None if conditional is None else conditional[i],
        ))
    return jobs


def _grid(name: str, results: list[dict], key: str, axis_label: str, axis, quantity: str,
          units: str, extra: dict | None = None) -> Artifact:
    times = results[0]["times"]
    grid = np.stack([r[key] for r in results], axis=1) if results else np.zeros((len(times), 0))
    meta = {"quantity": quantity, "units": {"rows": "us (simulated time)", "columns": axis_label,
                                            "values": units}}
    meta["n_max"] = None
    meta["top_population"] = [r["top_population"] for r in results]
    if extra:
        meta.update(extra)
    return Artifact(name, "grid", (times, np.asarray(axis, float), grid, "t_us"), meta)


def _chevron_grids(cfg: Config, prefix: str, results, jobs, axis_label, axis, keys, extra=None):
    out = []
    units = {"qubit_parity": "normalised, " + QUBIT_PARITY_CONVENTION,
             "photon_parity": "normalised (1 + <Pi>)/2",
             "mean_photon": "photons",
             "qubit_entropy": "bits",
             "meter_probability": "meter excited-state probability",
             "meter_estimate": "photons (linearised meter inversion)"}
    for key in keys:
        a = _grid(f"{prefix}_{key}.csv", results, key, axis_label, axis, key, units[key], extra)
        a.meta["n_max"] = [j.n_max for j in jobs]
        out.append(a)
    return out


def _engine_meta(cfg: Config, **kw) -> dict:
    engine = cfg["plan.engine"]
    if engine == "auto":
        engine = "trotter" if math.isinf(cfg["physics.t1_res"]) else "lindblad"
    meta = {"engine": engine, "qubit_parity_convention": QUBIT_PARITY_CONVENTION}
    meta.update(kw)
    return meta


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def _parity_chevron(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    jobs = _jobs(cfg, omegas, ("qubit_parity", "photon_parity"))
    res = map_points(simulate_point, jobs, workers)
    return _chevron_grids(cfg, prefix, res, jobs, label, axis, ("qubit_parity", "photon_parity"),
                          _engine_meta(cfg))


def _photon_chevron(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    meter = _meter_tuple(cfg)
    jobs = _jobs(cfg, omegas, ("mean_photon",), meter=meter)
    res = map_points(simulate_point, jobs, workers)
    keys = ["mean_photon"]
    extra = _engine_meta(cfg, meter_variant=cfg["meter.variant"], shots=cfg["meter.shots"])
    if meter is not None:
        keys.append("meter_probability")
        if meter[3] == "ramsey":
            keys.append("meter_estimate")
        extra["meter"] = {"tau_eff_us": meter[0], "chi2_mhz": meter[1], "d": meter[2], "mode": meter[3]}
    return _chevron_grids(cfg, prefix, res, jobs, label, axis, keys, extra)


def _wigner_movie(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    wig = (cfg["sweep.wigner_extent"], cfg["sweep.wigner_points"])
    jobs = _jobs(cfg, omegas, ("wigner_frames",), wigner=wig)
    res = map_points(simulate_point, jobs, workers)
    arts = []
    index = {"axis_label": label, "movies": [], "grid_units": "alpha (dimensionless)",
             **_engine_meta(cfg)}
    for x, job, r in zip(axis, jobs, res):
        tag = _tag(label, x)
        frames = []
        for k, (t, w, fit) in enumerate(zip(r["times"], r["wigner_frames"], r["wigner_fits"])):
            fname = f"{prefix}_{tag}_frame{k:03d}.csv"
            arts.append(Artifact(fname, "grid", (r["wigner_axis"], r["wigner_axis"], w, "im_alpha"),
                                 {"quantity": "wigner", "units": {"rows": "Im alpha", "columns": "Re alpha",
                                                                  "values": "W (bounded by 2/pi)"},
                                  "step": k, "t_us": float(t)}))
            frames.append({"step": k, "t_us": float(t), "file": fname, "fit": fit})
        index["movies"].append({label: float(x), "omega_rR_mhz": job.omega_rR, "n_max": job.n_max,
                                "frames": frames})
    arts.append(Artifact(f"{prefix}_index.json", "json", index))
    return arts


def _cat_conditional(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    steps = cfg["sweep.steps"] or (cfg["plan.n_steps"],)
    if len(steps) == 1:
        steps = steps * len(axis)
    wig = (cfg["sweep.wigner_extent"], cfg["sweep.wigner_points"])
    jobs = _jobs(cfg, omegas, (), n_steps=max(steps), wigner=wig, conditional=list(steps))
    res = map_points(simulate_point, jobs, workers)
    arts, summary = [], {"axis_label": label, "points": [], **_engine_meta(cfg)}
    for x, job, st, r in zip(axis, jobs, steps, res):
        tag = _tag(label, x)
        entry = {label: float(x), "step": int(st), "t_us": float(r["times"][st]), "n_max": job.n_max,
                 "outcomes": {}}
        for name, (w, prob) in r["conditional"].items():
            fname = f"{prefix}_{tag}_{name}.csv"
            arts.append(Artifact(fname, "grid", (r["wigner_axis"], r["wigner_axis"], w, "im_alpha"),
                                 {"quantity": f"conditional wigner ({name})",
                                  "units": {"rows": "Im alpha", "columns": "Re alpha", "values": "W"}}))
            entry["outcomes"][name] = {"file": fname, "probability": prob,
                                       "fit": _fit_summary(double_gaussian_fit(r["wigner_axis"],
                                                                               r["wigner_axis"], w))}
        summary["points"].append(entry)
    arts.append(Artifact(f"{prefix}_summary.json", "json", summary))
    return arts


def _nondegenerate(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    arts = []
    g = cfg["physics.g"]
    for q in cfg["physics.omega_q_ratio"]:
        wq = g / q
        qtag = f"gq{_num(q)}"
        keys = ("qubit_parity", "photon_parity")
        jobs = _jobs(cfg, omegas, keys, omega_qR=wq)
        res = map_points(simulate_point, jobs, workers)
        arts += _chevron_grids(cfg, f"{prefix}_{qtag}_trotter", res, jobs, label, axis, keys,
                               _engine_meta(cfg, omega_qR_mhz=wq, g_over_omega_qR=q))
        ideal = [PointJob(**{**j.__dict__, "engine": "exact", "t1_res": math.inf, "kerr": cfg["physics.kerr"]})
                 for j in jobs]
        res = map_points(simulate_point, ideal, workers)
        arts += _chevron_grids(cfg, f"{prefix}_{qtag}_ideal", res, ideal, label, axis, keys,
                               {"engine": "exact", "omega_qR_mhz": wq, "g_over_omega_qR": q,
                                "qubit_parity_convention": QUBIT_PARITY_CONVENTION})
    return arts


def _trotter_compare(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    keys = ("qubit_parity", "photon_parity")
    arts = []
    for order in (1, 2):
        jobs = _jobs(cfg, omegas, keys, order=order)
        res = map_points(simulate_point, jobs, workers)
        arts += _chevron_grids(cfg, f"{prefix}_order{order}", res, jobs, label, axis, keys,
                               _engine_meta(cfg, order=order))
    return arts


def _stepsize_compare(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    keys = ("qubit_parity", "photon_parity")
    total = cfg["plan.total_time"]
    arts = []
    for tau in cfg["plan.taus"]:
        n = round(total / tau)
        if abs(n * tau - total) > 1e-9 * max(1.0, total):
            raise ConfigError(f"plan.taus: {tau} does not divide plan.total_time = {total}")
        jobs = _jobs(cfg, omegas, keys, tau=tau, n_steps=n)
        res = map_points(simulate_point, jobs, workers)
        arts += _chevron_grids(cfg, f"{prefix}_tau{_num(tau * 1000)}ns", res, jobs, label, axis, keys,
                               _engine_meta(cfg, tau_us=tau, n_steps=n))
    return arts


def _entropy_chevron(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    jobs = _jobs(cfg, omegas, ("qubit_entropy",))
    res = map_points(simulate_point, jobs, workers)
    return _chevron_grids(cfg, prefix, res, jobs, label, axis, ("qubit_entropy",), _engine_meta(cfg))


def _init_compare(cfg, prefix, workers):
    label, axis, omegas = _omega_values(cfg)
    keys = ("qubit_parity", "photon_parity")
    arts, parities = [], {}
    for init in ("1", "0"):
        jobs = _jobs(cfg, omegas, keys, initial=init)
        res = map_points(simulate_point, jobs, workers)
        parities[init] = np.stack([r["photon_parity"] for r in res], axis=1)
        arts += _chevron_grids(cfg, f"{prefix}_init{init}0", res, jobs, label, axis, keys,
                               _engine_meta(cfg, initial=f"|{init},0>"))
    diff = float(np.max(np.abs(parities["1"] - parities["0"]))) if parities["1"].size else 0.0
    arts.append(Artifact(f"{prefix}_summary.json", "json",
                         {"max_photon_parity_difference": diff, "axis_label": label}))
    return arts


def _jc_chevron(cfg, prefix, workers):
    base = ChevronSpec(detunings=cfg["sweep.detunings"], durations=cfg["sweep.durations"],
                       pulse_len=cfg["sweep.pulse_len"], g=cfg["physics.g"])
    digital = base.replace(mode="digital", off_phase=cfg["sweep.off_phase"])
    comp = find_compensation_phase(digital.replace(detunings=(0.0,)))
    compensated = digital.replace(compensation=comp)
    arts = []
    summary: dict[str, Any] = {"compensation_rad": comp, "off_phase_rad": digital.off_phase,
                               "pulse_len_us": digital.pulse_len,
                               "predicted_satellites_mhz": satellite_detunings(digital).tolist()}
    specs = map_points(_chevron_job, [("analog", base), ("digital", digital), ("compensated", compensated)],
                       workers)
    for name, spec, grid, peaks in specs:
        arts.append(Artifact(f"{prefix}_{name}.csv", "grid",
                             (spec.durations, spec.detunings, grid, "t_us"),
                             {"quantity": "qubit excitation probability", "mode": spec.mode,
                              "units": {"rows": "us (total interaction time)", "columns": "MHz (detuning)",
                                        "values": "probability"}}))
        summary[f"{name}_resonances_mhz"] = peaks
    arts.append(Artifact(f"{prefix}_summary.json", "json", summary))
    return arts


def _chevron_job(item):
    name, spec = item
    res = run_chevron(spec, "qubit_excitation")
    return name, spec, res.grid, find_resonances(spec).tolist()


def _predistort_demo(cfg, prefix, workers):
    dt = cfg["predistort.dt_ns"]
    n = int(round(cfg["predistort.length_ns"] / dt))
    t1 = 1000 * cfg["predistort.bias_tee_tau1_us"]
    t2 = 1000 * cfg["predistort.bias_tee_tau2_us"]
    forms = {
        "bias_tee": ("high_pass2", {"tau1": t1, "tau2": t2}, (t1, t2)),
        "exp_5100ns": ("exp_approach", {"alpha": 0.0012, "tau": 5100.0}, (5100.0,)),
        "exp_670ns": ("exp_approach", {"alpha": 0.015, "tau": 670.0}, (670.0,)),
        "exp_520ns": ("exp_approach", {"alpha": -0.00037, "tau": 520.0}, (520.0,)),
        "skin": ("skin_effect", {"alpha_db": cfg["predistort.skin_db"]}, ()),
    }
    systems = {k: pd.parametric_kernel(f, p, dt, n) for k, (f, p, _) in forms.items()}
    systems["cascade"] = pd.compose_kernels(list(systems.values()))
    items = [(k, systems[k]) for k in systems]
    kernels = map_points(_invert_item, items, workers)
    arts, summary = [], {"dt_ns": dt, "n": n, "forms": {}}
    for (name, sys), kern in zip(items, kernels):
        tcs = forms[name][2] if name in forms else ()
        settle = min(pd.settle_index(tcs, dt), n - 1)
        entry = {"flatness": pd.flatness(sys, kern, settle), "settle_index": settle,
                 "flatness_from_start": pd.flatness(sys, kern, 0)}
        if name in forms:
            entry.update({"form": forms[name][0], "params": forms[name][1]})
            try:
                inv_form, inv_params = pd.analytic_inverse(*forms[name][:2])
                entry["analytic_inverse"] = {"form": inv_form, "params": inv_params}
            except ValueError:
                pass
        summary["forms"][name] = entry
        for label, tr in (("system", sys.as_step()), ("kernel", kern)):
            arts.append(Artifact(f"{prefix}_{name}_{label}.csv", "trace", tr,
                                 {"quantity": f"{label} step response", "units": {"t": "ns", "value": "a.u."}}))
    arts.append(Artifact(f"{prefix}_summary.json", "json", summary))
    return arts


def _invert_item(item):
    return pd.invert_kernel(item[1].as_step())


EXPERIMENT_FUNCS = {
    "parity_chevron": _parity_chevron,
    "photon_chevron": _photon_chevron,
    "wigner_movie": _wigner_movie,
    "cat_conditional": _cat_conditional,
    "nondegenerate": _nondegenerate,
    "trotter_compare": _trotter_compare,
    "stepsize_compare": _stepsize_compare,
    "entropy_chevron": _entropy_chevron,
    "jc_chevron": _jc_chevron,
    "predistort_demo": _predistort_demo,
    "init_compare": _init_compare,
}


def _num(x: float) -> str:
    s = f"{x:g}"
    return s.replace("-", "m").replace(".", "p").replace("inf", "inf")


def _tag(label: str, x: float) -> str:
    return f"{'r' if label == 'r' else 'w'}{_num(x)}"


def run_experiment(cfg: Config, workers: int = 1) -> list[Artifact]:
    prefix = cfg["output.prefix"] or cfg.name
    return EXPERIMENT_FUNCS[cfg.name](cfg, prefix, workers)
