"""Flux-pulse predistortion: kernels from sampled step responses.

A linear, causal distortion is described by its sampled step response
``x[n]``; its impulse response ``h[n] = x[n] - x[n-1]`` fills the lower
diagonals of a Toeplitz transfer matrix ``H``. The predistortion kernel is
the causal inverse of ``H``, obtained by forward substitution. Kernels can
be fitted to simple step-response forms and resampled.

Times are in ns throughout this module.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import toeplitz
from scipy.optimize import least_squares
from scipy.special import erf

__all__ = [
    "KernelTrace",
    "StepFit",
    "FORMS",
    "step_form",
    "impulse_from_step",
    "step_from_impulse",
    "transfer_matrix",
    "invert_kernel",
    "parametric_kernel",
    "analytic_inverse",
    "fit_step_form",
    "compose_kernels",
    "apply_kernel",
    "flatness",
    "settle_index",
    "read_trace_csv",
    "write_trace_csv",
    "kernel_record",
    "read_kernel_record",
]

KINDS = ("step_response", "impulse_response")


@dataclass(frozen=True)
class KernelTrace:
    """Uniformly sampled real response; ``samples[0]`` is at ``t = 0``."""

    dt: float
    samples: np.ndarray
    kind: str = "step_response"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or len(s) == 0:
            raise ValueError("samples must be a non-empty 1-D sequence")
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(len(self.samples))

    def as_step(self) -> "KernelTrace":
        return self if self.kind == "step_response" else step_from_impulse(self)

    def as_impulse(self) -> "KernelTrace":
        return self if self.kind == "impulse_response" else impulse_from_step(self)


# ---------------------------------------------------------------------------
# step-response forms
# ---------------------------------------------------------------------------


def _linear_ramp(t, a):
    return 1 + a * t


def _exp_approach(t, alpha, tau):
    return 1 + alpha * np.exp(-t / tau)


def _quadratic(t, c1, c2):
    return 1 + c1 * t + c2 * t * t


def _skin_effect(t, alpha_db):
    return 1 - erf(alpha_db / (21 * np.sqrt(t + 1)))


def _high_pass(t, tau):
    return np.exp(-t / tau)


def _high_pass2(t, tau1, tau2):
    # step response of two cascaded first-order high-pass sections
    if math.isclose(tau1, tau2, rel_tol=1e-9):
        return (1 - t / tau1) * np.exp(-t / tau1)
    return (np.exp(-t / tau2) / tau2 - np.exp(-t / tau1) / tau1) / (1 / tau2 - 1 / tau1)


#: name -> (function of t in ns, parameter names)
FORMS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    "linear_ramp": (_linear_ramp, ("a",)),
    "exp_approach": (_exp_approach, ("alpha", "tau")),
    "quadratic": (_quadratic, ("c1", "c2")),
    "skin_effect": (_skin_effect, ("alpha_db",)),
    "high_pass": (_high_pass, ("tau",)),
    "high_pass2": (_high_pass2, ("tau1", "tau2")),
}


def _check_params(form: str, params: dict) -> tuple[Callable, tuple[str, ...]]:
    try:
        fn, names = FORMS[form]
    except KeyError:
        raise ValueError(f"unknown form {form!r}; choose from {sorted(FORMS)}") from None
    missing = set(names) - set(params)
    extra = set(params) - set(names)
    if missing or extra:
        raise ValueError(f"{form} takes parameters {names}, got {sorted(params)}")
    for k in ("tau", "tau1", "tau2"):
        if k in params and not params[k] > 0:
            raise ValueError(f"{k} must be positive")
    return fn, names


def step_form(form: str, params: dict, t) -> np.ndarray:
    """Evaluate a named step-response form at times ``t`` (ns)."""
    fn, names = _check_params(form, params)
    return fn(np.asarray(t, dtype=float), *(params[k] for k in names))


def analytic_inverse(form: str, params: dict) -> tuple[str, dict]:
    """Continuous-time inverse kernel of a simple form.

    ``(1 + a t)`` is inverted by ``exp(-a t)``, and vice versa;
    ``1 + alpha exp(-t/tau)`` by ``1 + alpha' exp(-t/tau')`` with
    ``alpha' = -alpha/(1+alpha)`` and ``tau' = (1+alpha) tau``. Two
    cascaded high-pass poles are inverted by a quadratic ramp.
    """
    _check_params(form, params)
    if form == "linear_ramp":
        return "high_pass", {"tau": 1.0 / params["a"]}
    if form == "high_pass":
        return "linear_ramp", {"a": 1.0 / params["tau"]}
    if form == "exp_approach":
        a, tau = params["alpha"], params["tau"]
        if a <= -1:
            raise ValueError("exp_approach with alpha <= -1 has no causal inverse")
        return "exp_approach", {"alpha": -a / (1 + a), "tau": (1 + a) * tau}
    if form == "high_pass2":
        t1, t2 = params["tau1"], params["tau2"]
        return "quadratic", {"c1": 1 / t1 + 1 / t2, "c2": 0.5 / (t1 * t2)}
    raise ValueError(f"no closed-form inverse for {form}")


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------


def impulse_from_step(trace: KernelTrace) -> KernelTrace:
    """``h[n] = x[n] - x[n-1]`` with ``x[-1] = 0``."""
    if trace.kind != "step_response":
        raise ValueError("expected a step response")
    return KernelTrace(trace.dt, np.diff(trace.samples, prepend=0.0), "impulse_response")


def step_from_impulse(trace: KernelTrace) -> KernelTrace:
    if trace.kind != "impulse_response":
        raise ValueError("expected an impulse response")
    return KernelTrace(trace.dt, np.cumsum(trace.samples), "step_response")


def transfer_matrix(impulse: KernelTrace, n: int | None = None) -> np.ndarray:
    """Lower-triangular Toeplitz matrix with ``h[j]`` on the ``j``-th lower diagonal."""
    h = impulse.as_impulse().samples
    n = len(h) if n is None else int(n)
    if not 1 <= n <= len(h):
        raise ValueError(f"n must lie in 1..{len(h)}")
    return toeplitz(h[:n], np.zeros(n))


def _deconvolve(h: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``H k = rhs`` for lower-triangular Toeplitz ``H`` by forward substitution."""
    n = len(rhs)
    k = np.zeros(n)
    h0 = h[0]
    hr = h[:n][::-1]  # hr[n-1-j] = h[j]
    for i in range(n):
        # sum_{j=1..i} h[j] k[i-j]
        acc = np.dot(hr[n - 1 - i:n - 1], k[:i]) if i else 0.0
        k[i] = (rhs[i] - acc) / h0
    return k


def invert_kernel(step: KernelTrace, n: int | None = None) -> KernelTrace:
    """Step response of the predistortion kernel that undoes ``step``.

    The kernel impulse ``k`` solves ``H k = delta``; its step response is the
    cumulative sum, equivalently ``H^-1 u``.

    Raises:
        ValueError: ``h[0] = 0`` (the transfer matrix is singular).
    """
    h = step.as_impulse().samples
    n = len(h) if n is None else int(n)
    if not 1 <= n <= len(h):
        raise ValueError(f"n must lie in 1..{len(h)}")
    if abs(h[0]) < 1e-300:
        raise ValueError("h[0] = 0: the transfer matrix is not invertible")
    delta = np.zeros(n)
    delta[0] = 1.0
    k = _deconvolve(h[:n], delta)
    return KernelTrace(step.dt, np.cumsum(k), "step_response")


def parametric_kernel(form: str, params: dict, dt: float, n: int) -> KernelTrace:
    """Impulse response sampled from the analytic step response of ``form``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    t = dt * np.arange(n)
    return impulse_from_step(KernelTrace(dt, step_form(form, params, t)))


def compose_kernels(kernels: Sequence[KernelTrace]) -> KernelTrace:
    """Cascade of kernels (convolution of impulse responses).

    All kernels must share ``dt``; the result is as long as the shortest input.
    """
    if not kernels:
        raise ValueError("need at least one kernel")
    dt = kernels[0].dt
    if any(not math.isclose(k.dt, dt, rel_tol=1e-12) for k in kernels):
        raise ValueError("kernels have different sampling periods")
    n = min(len(k) for k in kernels)
    out = kernels[0].as_impulse().samples[:n]
    for k in kernels[1:]:
        out = np.convolve(out, k.as_impulse().samples[:n])[:n]
    return KernelTrace(dt, out, "impulse_response")


def apply_kernel(kernel: KernelTrace, waveform) -> np.ndarray:
    """Causal convolution of a waveform with the kernel's impulse response.

    Samples beyond the kernel length are taken as zero impulse (the kernel
    step response is held at its last value).
    """
    w = np.asarray(waveform, dtype=float)
    h = kernel.as_impulse().samples
    return np.convolve(w, h[: len(w)])[: len(w)]


def settle_index(time_constants: Sequence[float], dt: float, factor: float = 5.0) -> int:
    """First sample after ``factor`` times the longest time constant."""
    tmax = max((abs(t) for t in time_constants), default=0.0)
    return int(math.ceil(factor * tmax / dt))


def flatness(system: KernelTrace, kernel: KernelTrace, settle: int = 0, n: int | None = None) -> float:
    """``max |y[k] - 1|`` for ``k >= settle`` where ``y`` is the corrected unit step."""
    n = min(len(system), len(kernel)) if n is None else n
    if settle >= n:
        raise ValueError("settle index beyond trace length")
    y = apply_kernel(system, apply_kernel(kernel, np.ones(n)))
    return float(np.max(np.abs(y[settle:] - 1)))


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepFit:
    form: str
    params: dict
    residual_rms: float
    converged: bool


def _initial_guess(form: str, t: np.ndarray, y: np.ndarray) -> list[float]:
    if form == "exp_approach":
        a0 = y[0] - y[-1]
        # time at which the excursion falls to 1/e of its start
        target = abs(a0) / math.e
        idx = np.nonzero(np.abs(y - y[-1]) <= target)[0]
        tau0 = t[idx[0]] if len(idx) and t[idx[0]] > 0 else t[-1] / 5
        return [a0, max(tau0, t[1] if len(t) > 1 else 1.0)]
    if form == "skin_effect":
        return [1.0]
    if form == "high_pass2":
        return [t[-1] / 10, t[-1] / 3]
    if form == "high_pass":
        yl = np.log(np.clip(y, 1e-12, None))
        slope = np.polyfit(t, yl, 1)[0]
        return [-1 / slope if slope < 0 else t[-1]]
    raise AssertionError(form)


def fit_step_form(trace: KernelTrace, form: str, p0: Sequence[float] | None = None) -> StepFit:
    """Least-squares fit of a step response to a named form.

    Polynomial forms are linear in their parameters and solved directly
    (intercept fixed at 1); the others use trust-region least squares.
    """
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    tr = trace.as_step()
    t, y = tr.t, tr.samples
    fn, names = FORMS[form]
    if form in ("linear_ramp", "quadratic"):
        cols = [t] if form == "linear_ramp" else [t, t * t]
        a = np.stack(cols, axis=1)
        # scale columns for conditioning
        sc = np.max(np.abs(a), axis=0)
        sc[sc == 0] = 1
        coef, *_ = np.linalg.lstsq(a / sc, y - 1, rcond=None)
        coef = coef / sc
        params = dict(zip(names, map(float, coef)))
        res = y - fn(t, *coef)
        return StepFit(form, params, float(np.sqrt(np.mean(res**2))), True)
    x0 = np.asarray(p0 if p0 is not None else _initial_guess(form, t, y), dtype=float)
    lo = np.full(len(x0), -np.inf)
    if "tau" in names:
        lo[names.index("tau")] = 1e-12
    r = least_squares(lambda p: fn(t, *p) - y, x0, bounds=(lo, np.inf), x_scale="jac",
                      xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=2000)
    params = dict(zip(names, map(float, r.x)))
    return StepFit(form, params, float(np.sqrt(np.mean(r.fun**2))), bool(r.success))


# ---------------------------------------------------------------------------
# I/O
# ---------------------------------------------------------------------------


def write_trace_csv(trace: KernelTrace, path: str | Path) -> None:
    """Two-column CSV ``t_ns,value`` (step or impulse samples as stored)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_ns", "value"])
        for ti, v in zip(trace.t, trace.samples):
            w.writerow([repr(float(ti)), repr(float(v))])


def read_trace_csv(path: str | Path, kind: str = "step_response") -> KernelTrace:
    """Read a ``t_ns,value`` CSV; sampling must be uniform and start at 0."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty trace file")
    if rows[0] and not _is_number(rows[0][0]):
        rows = rows[1:]
    data = np.array([[float(c) for c in r[:2]] for r in rows if r])
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError(f"{path}: need at least two samples")
    t, v = data[:, 0], data[:, 1]
    dt = t[1] - t[0]
    if abs(t[0]) > 1e-9 * max(1.0, dt) or not np.allclose(np.diff(t), dt, rtol=1e-6, atol=0):
        raise ValueError(f"{path}: samples must be uniform and start at t = 0")
    return KernelTrace(float(dt), v, kind)


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def kernel_record(form: str, params: dict, dt: float, n: int) -> dict:
    _check_params(form, params)
    return {"form": form, "params": {k: float(v) for k, v in params.items()}, "dt": float(dt), "n": int(n)}


def read_kernel_record(path: str | Path) -> KernelTrace:
    rec = json.loads(Path(path).read_text())
    return parametric_kernel(rec["form"], rec["params"], rec["dt"], rec["n"])
