"""Wigner tomography: synthetic datasets, maximum-likelihood reconstruction and
double-Gaussian phase-space fits."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import sqrtm
from scipy.ndimage import maximum_filter
from scipy.optimize import least_squares

from .hilbert import SpaceSpec, displacement, parity_operator
from .measure import _pad_dim, wigner_grid

logger = logging.getLogger(__name__)

__all__ = [
    "WignerDataset",
    "MLEResult",
    "Peak",
    "GaussianFit",
    "build_measurement_ops",
    "mle_reconstruct",
    "double_gaussian_fit",
    "systematic_phase_correction",
    "fidelity",
    "trace_distance",
    "grid_points",
]

W_MAX = 2 / math.pi


def grid_points(xs, ys) -> np.ndarray:
    """Complex grid ``x + iy`` with rows indexed by ``y``."""
    x, y = np.meshgrid(np.asarray(xs, float), np.asarray(ys, float))
    return x + 1j * y


@dataclass
class WignerDataset:
    """Wigner samples ``W(alpha_i) = values[i]`` for reconstruction.

    ``shots`` (optional, per point) switches the likelihood weights to
    binomial variances.
    """

    alphas: np.ndarray
    values: np.ndarray
    space_build: SpaceSpec
    space_trunc: SpaceSpec
    shots: np.ndarray | None = None
    noise_margin: float = 1e-9

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=complex).ravel()
        self.values = np.asarray(self.values, dtype=float).ravel()
        if self.alphas.shape != self.values.shape:
            raise ValueError("alphas and values differ in length")
        if len(self.alphas) == 0:
            raise ValueError("empty dataset")
        if self.shots is not None:
            self.shots = np.broadcast_to(np.asarray(self.shots, dtype=float), self.values.shape).copy()
            if np.any(self.shots < 1):
                raise ValueError("shots must be >= 1")
        bound = W_MAX + self.noise_margin
        if np.any(np.abs(self.values) > bound):
            raise ValueError(f"Wigner values outside +-(2/pi + {self.noise_margin})")
        need = _pad_dim(self.space_trunc.n_max, float(np.max(np.abs(self.alphas))))
        if self.space_build.dim_res < need:
            raise ValueError(
                f"space_build n_max={self.space_build.n_max} too small for max|alpha|="
                f"{np.max(np.abs(self.alphas)):.3g}; need n_max >= {need - 1}"
            )

    @classmethod
    def synthetic(cls, rho: np.ndarray, alphas, n_trunc: int, shots: int | None = None,
                  rng: np.random.Generator | None = None) -> "WignerDataset":
        """Dataset sampled from a resonator density matrix.

        Without ``shots`` the values are exact; with ``shots`` each displaced
        parity is drawn as a binomial estimate.
        """
        alphas = np.asarray(alphas, dtype=complex).ravel()
        vals = wigner_grid(rho, alphas)
        margin = 1e-9
        if shots is not None:
            rng = rng if rng is not None else np.random.default_rng()
            p = np.clip(0.5 * (1 + vals / W_MAX), 0, 1)
            vals = W_MAX * (2 * rng.binomial(shots, p) / shots - 1)
            margin = 1e-12
        nb = _pad_dim(n_trunc, float(np.max(np.abs(alphas)))) - 1
        return cls(alphas, vals, SpaceSpec(nb), SpaceSpec(n_trunc),
                   None if shots is None else np.full(len(alphas), shots), margin)

    def weights(self) -> np.ndarray:
        if self.shots is None:
            return np.ones_like(self.values)
        p = np.clip(0.5 * (1 + self.values / W_MAX), 0.5 / self.shots, 1 - 0.5 / self.shots)
        var = (2 * W_MAX) ** 2 * p * (1 - p) / self.shots
        return 1.0 / var


def build_measurement_ops(ds: WignerDataset) -> np.ndarray:
    """``M_alpha = D(alpha) Pi D^dag(alpha)`` built at ``space_build`` and cropped.

    Returns an array of shape ``(n_points, d, d)``. Warns when the operators
    span fewer than ``d^2`` real dimensions (not informationally complete).
    """
    d = ds.space_trunc.dim_res
    par = np.diag(parity_operator(ds.space_build)).real
    ops = np.empty((len(ds.alphas), d, d), dtype=complex)
    for i, a in enumerate(ds.alphas):
        dm = displacement(a, ds.space_build)[:d, :]
        ops[i] = (dm * par) @ dm.conj().T
    rank = _span_rank(ops)
    if rank < d * d:
        warnings.warn(f"measurement operators span {rank} < {d * d} dimensions; "
                      "reconstruction is not unique", RuntimeWarning, stacklevel=2)
    return ops


def _span_rank(ops: np.ndarray) -> int:
    n = ops.shape[0]
    a = np.concatenate([ops.real.reshape(n, -1), ops.imag.reshape(n, -1)], axis=1)
    return int(np.linalg.matrix_rank(a, tol=1e-9 * max(1.0, np.abs(a).max())))


@dataclass
class MLEResult:
    rho: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    rank_deficient: bool
    history: list[float] = field(default_factory=list, repr=False)


def _loglik(ops_flat, vals, w, rho) -> tuple[float, np.ndarray]:
    pred = W_MAX * (ops_flat @ rho.T.ravel()).real
    res = vals - pred
    return -float(np.sum(w * res * res)), res


def mle_reconstruct(ds: WignerDataset, ops: np.ndarray | None = None, tol: float = 1e-10,
                    patience: int = 10, max_iter: int = 5000) -> MLEResult:
    """Maximum-likelihood density matrix under a Gaussian likelihood.

    Maximises ``-sum_i w_i (v_i - (2/pi) tr[M_i rho])^2`` over density
    matrices with the diluted fixed-point update
    ``rho <- R rho R / tr(R rho R)``, ``R = I + eps (G - tr(G rho) I)``,
    where ``G`` is the likelihood gradient. ``eps`` is halved until the
    likelihood does not decrease, so the sequence is monotone. Stops when the
    improvement stays below ``tol`` for ``patience`` iterations, or after
    ``max_iter`` iterations (``converged=False``, best iterate returned).
    """
    if ops is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            ops = build_measurement_ops(ds)
    d = ops.shape[1]
    rank_def = _span_rank(ops) < d * d
    if rank_def:
        logger.warning("rank-deficient Wigner data (%d points, d=%d)", len(ds.alphas), d)
    ops_flat = ops.reshape(len(ops), -1)
    w = ds.weights()
    vals = ds.values
    rho = np.eye(d, dtype=complex) / d
    ll, res = _loglik(ops_flat, vals, w, rho)
    hist = [ll]
    eps = 1.0
    quiet = 0
    eye = np.eye(d)
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        g = np.tensordot(2 * W_MAX * w * res, ops, axes=(0, 0))
        g = 0.5 * (g + g.conj().T)
        scale = float(np.max(np.abs(np.linalg.eigvalsh(g))))
        if scale == 0:
            converged = True
            break
        g_c = (g - np.trace(g @ rho).real * eye) / scale
        while True:
            r = eye + eps * g_c
            new = r @ rho @ r
            new = new / np.trace(new).real
            new = 0.5 * (new + new.conj().T)
            ll_new, res_new = _loglik(ops_flat, vals, w, new)
            if ll_new >= ll or eps < 1e-14:
                break
            eps *= 0.5
        gain = ll_new - ll
        if ll_new >= ll:
            rho, ll, res = new, ll_new, res_new
        hist.append(ll)
        eps = min(eps * 1.5, 1e3)
        quiet = quiet + 1 if gain < tol else 0
        if quiet >= patience:
            converged = True
            break
    return MLEResult(rho, ll, it, converged, rank_def, hist)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``; vectors allowed."""
    if rho.ndim == 1 and sigma.ndim == 1:
        return float(abs(np.vdot(rho, sigma)) ** 2)
    if rho.ndim == 1:
        return float(np.vdot(rho, sigma @ rho).real)
    if sigma.ndim == 1:
        return float(np.vdot(sigma, rho @ sigma).real)
    s = sqrtm(rho)
    return float(np.real(np.trace(sqrtm(s @ sigma @ s))) ** 2)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def systematic_phase_correction(rho: np.ndarray, theta: float) -> np.ndarray:
    """Conjugate by ``exp(i theta a^dag a)``: rotates phase space by ``theta``."""
    ph = np.exp(1j * theta * np.arange(rho.shape[0]))
    return ph[:, None] * rho * ph.conj()[None, :]


# ---------------------------------------------------------------------------
# double-Gaussian fit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Peak:
    center: complex
    width: float
    amplitude: float

    @property
    def weight(self) -> float:
        """Integrated volume of the peak."""
        return 2 * math.pi * self.width**2 * self.amplitude


@dataclass(frozen=True)
class GaussianFit:
    peaks: tuple[Peak, ...]
    residual_rms: float
    single_peak: bool
    success: bool


def _gauss(p, x, y):
    a, cx, cy, s = p
    return a * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * s * s))


def _fit(x, y, z, p0):
    k = len(p0) // 4

    def resid(p):
        m = sum(_gauss(p[4 * i:4 * i + 4], x, y) for i in range(k))
        return m - z

    lo = np.tile([-np.inf, -np.inf, -np.inf, 0.05], k)
    hi = np.tile([np.inf, np.inf, np.inf, np.inf], k)
    return least_squares(resid, p0, bounds=(lo, hi), x_scale="jac", xtol=1e-12, ftol=1e-12, gtol=1e-12)


def double_gaussian_fit(xs, ys, w: np.ndarray, min_sep: float | None = None) -> GaussianFit:
    """Fit two isotropic Gaussians to a Wigner grid ``w[len(ys), len(xs)]``.

    Starts from the two largest local maxima. If only one maximum is found,
    or the fitted centres are closer than the larger width (or ``min_sep``),
    a single-Gaussian fit is returned with ``single_peak=True``. Peaks are
    sorted by decreasing weight.
    """
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    w = np.asarray(w, float)
    if w.shape != (len(ys), len(xs)):
        raise ValueError("grid shape must be (len(ys), len(xs))")
    x, y = np.meshgrid(xs, ys)
    xf, yf, zf = x.ravel(), y.ravel(), w.ravel()
    loc = (w == maximum_filter(w, size=3, mode="constant", cval=-np.inf)) & (w > 0.2 * w.max())
    iy, ix = np.nonzero(loc)
    order = np.argsort(w[iy, ix])[::-1]
    iy, ix = iy[order], ix[order]
    s0 = 0.5

    def single():
        j = int(np.argmax(zf))
        r = _fit(xf, yf, zf, np.array([zf[j], xf[j], yf[j], s0]))
        a, cx, cy, s = r.x
        return GaussianFit((Peak(complex(cx, cy), float(s), float(a)),),
                           float(np.sqrt(np.mean(r.fun**2))), True, bool(r.success))

    if len(iy) < 2:
        return single()
    p0 = []
    for k in range(2):
        p0 += [w[iy[k], ix[k]], xs[ix[k]], ys[iy[k]], s0]
    r = _fit(xf, yf, zf, np.array(p0))
    peaks = [Peak(complex(r.x[4 * k + 1], r.x[4 * k + 2]), float(r.x[4 * k + 3]), float(r.x[4 * k]))
             for k in range(2)]
    sep = abs(peaks[0].center - peaks[1].center)
    if sep < (min_sep if min_sep is not None else max(p.width for p in peaks)) or min(
            p.amplitude for p in peaks) <= 0:
        return single()
    peaks.sort(key=lambda p: p.weight, reverse=True)
    return GaussianFit(tuple(peaks), float(np.sqrt(np.mean(r.fun**2))), False, bool(r.success))
