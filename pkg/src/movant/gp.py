"""Gaussian-process surrogate and expected improvement.

The GP uses a Matérn-5/2 kernel with one length-scale per input dimension.
Inputs are mapped to the unit cube and targets are standardised before the
fit; hyperparameters maximise the log marginal likelihood with L-BFGS-B from
several starting points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.optimize import minimize
from scipy.special import ndtr

from .errors import SingularKernel
from .rng import rng_for

SQRT5 = np.sqrt(5.0)
INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)

LENGTHSCALE_BOUNDS = (1e-2, 10.0)
NOISE_BOUNDS = (1e-8, 1e-1)
SIGNAL_BOUNDS = (1e-6, 1e2)
JITTER_LADDER = tuple(10.0 ** -e for e in range(10, 3, -1))  # 1e-10 ... 1e-4


def matern52(X1, X2, lengthscales, signal_var):
    D = (X1[:, None, :] - X2[None, :, :]) / lengthscales
    r = np.sqrt(np.sum(D * D, axis=-1))
    return signal_var * (1.0 + SQRT5 * r + 5.0 / 3.0 * r * r) * np.exp(-SQRT5 * r)


def _cholesky(K, jitter_start=JITTER_LADDER[0]):
    n = len(K)
    for jitter in JITTER_LADDER:
        if jitter < jitter_start:
            continue
        try:
            return linalg.cholesky(K + jitter * np.eye(n), lower=True), jitter
        except linalg.LinAlgError:
            continue
    raise SingularKernel("kernel matrix not positive definite after jitter 1e-4")


def _neg_lml(theta, X, y, sqdiff):
    """Negative log marginal likelihood and its gradient in log-hyperparameters.

    ``sqdiff`` holds squared coordinate differences with shape ``(d, n*n)``.
    """
    n, d = X.shape
    inv_ell2 = np.exp(-2.0 * theta[:d])
    s2 = np.exp(theta[d])
    sn2 = np.exp(theta[d + 1])
    r = np.sqrt(inv_ell2 @ sqdiff).reshape(n, n)
    e = np.exp(-SQRT5 * r)
    M = (1.0 + SQRT5 * r + 5.0 / 3.0 * r * r) * e
    K = s2 * M
    K[np.diag_indices(n)] += sn2
    try:
        L, _ = _cholesky(K)
    except SingularKernel:
        return 1e25, np.zeros_like(theta)
    alpha = linalg.cho_solve((L, True), y)
    nll = 0.5 * y @ alpha + np.log(np.diag(L)).sum() + 0.5 * n * np.log(2 * np.pi)
    Kinv, info = linalg.lapack.dpotri(L, lower=1)
    if info != 0:
        return 1e25, np.zeros_like(theta)
    Kinv = np.tril(Kinv) + np.tril(Kinv, -1).T
    A = np.outer(alpha, alpha) - Kinv
    F = s2 * 5.0 / 3.0 * (1.0 + SQRT5 * r) * e
    grad = np.empty_like(theta)
    grad[:d] = -0.5 * (sqdiff @ (A * F).ravel()) * inv_ell2
    grad[d] = -0.5 * np.sum(A * (s2 * M))
    grad[d + 1] = -0.5 * sn2 * np.trace(A)
    return nll, grad


@dataclass
class GpModel:
    """Fitted GP posterior.

    ``X`` is stored in unit-cube coordinates; :meth:`predict` takes raw
    inputs and maps them with ``lower``/``upper``.
    """

    X: np.ndarray
    y: np.ndarray               # standardised targets
    y_mean: float
    y_scale: float
    lengthscales: np.ndarray
    signal_var: float
    noise_var: float
    jitter: float
    lower: np.ndarray
    upper: np.ndarray
    L: np.ndarray = None
    alpha: np.ndarray = None
    lml: float = float("nan")

    def __post_init__(self):
        if self.L is None:
            K = matern52(self.X, self.X, self.lengthscales, self.signal_var)
            K[np.diag_indices_from(K)] += self.noise_var
            self.L, self.jitter = _cholesky(K, self.jitter)
            self.alpha = linalg.cho_solve((self.L, True), self.y)

    @property
    def theta(self):
        return np.concatenate([np.log(self.lengthscales), [np.log(self.signal_var), np.log(self.noise_var)]])

    def to_unit(self, x):
        return (np.atleast_2d(np.asarray(x, dtype=float)) - self.lower) / (self.upper - self.lower)

    def standardize(self, y):
        return (np.asarray(y, dtype=float) - self.y_mean) / self.y_scale

    def predict_unit(self, U):
        """Standardised posterior mean and std at unit-cube points ``U``."""
        Ks = matern52(U, self.X, self.lengthscales, self.signal_var)
        mu = Ks @ self.alpha
        v = linalg.solve_triangular(self.L, Ks.T, lower=True)
        var = self.signal_var - np.sum(v * v, axis=0)
        return mu, np.sqrt(np.maximum(var, 0.0))

    def predict(self, x):
        """Posterior mean and std of the latent function in original units."""
        mu, sd = self.predict_unit(self.to_unit(x))
        return self.y_mean + self.y_scale * mu, self.y_scale * sd

    def _moments_grad(self, u):
        # gradient of standardised mean and std at one unit-cube point
        diff = u[None, :] - self.X                                   # (n, d)
        r = np.sqrt(np.sum((diff / self.lengthscales) ** 2, axis=1))
        e = np.exp(-SQRT5 * r)
        ks = self.signal_var * (1.0 + SQRT5 * r + 5.0 / 3.0 * r * r) * e
        dk = -(self.signal_var * 5.0 / 3.0 * (1.0 + SQRT5 * r) * e)[:, None] * diff / self.lengthscales ** 2
        mu = ks @ self.alpha
        dmu = dk.T @ self.alpha
        w = linalg.cho_solve((self.L, True), ks)
        var = self.signal_var - ks @ w
        sd = np.sqrt(max(var, 0.0))
        dsd = -(dk.T @ w) / sd if sd > 1e-12 else np.zeros_like(u)
        return mu, sd, dmu, dsd


def gp_fit(X, y, bounds=None, n_restarts: int = 8, seed: int = 0,
           theta0: Optional[np.ndarray] = None, lengthscale_bounds=LENGTHSCALE_BOUNDS,
           noise_bounds=NOISE_BOUNDS, signal_bounds=SIGNAL_BOUNDS, maxiter: int = 200) -> GpModel:
    """Fit a Matérn-5/2 ARD GP by maximum marginal likelihood.

    Parameters
    ----------
    X : (n, d) array
    y : (n,) array of finite targets
    bounds : sequence of (lower, upper), optional
        Box used to map inputs to the unit cube; defaults to the unit cube.
    n_restarts : int
        Random starting points on top of ``theta0`` (or the default start).
    theta0 : array, optional
        Log-hyperparameters ``[log ell_1..d, log signal, log noise]`` for the
        first local search, e.g. the previous fit.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    n, d = X.shape
    if n < 2:
        raise ValueError("need at least two points")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets must be finite")
    if bounds is None:
        lower, upper = np.zeros(d), np.ones(d)
    else:
        b = np.asarray(bounds, dtype=float).reshape(d, 2)
        lower, upper = b[:, 0], b[:, 1]
    U = (X - lower) / (upper - lower)
    y_mean = float(y.mean())
    y_scale = float(y.std())
    if y_scale < 1e-12 * max(1.0, abs(y_mean)):
        y_scale = 1.0
    ys = (y - y_mean) / y_scale

    log_bounds = [tuple(np.log(lengthscale_bounds))] * d + [tuple(np.log(signal_bounds)), tuple(np.log(noise_bounds))]
    lo = np.array([b[0] for b in log_bounds])
    hi = np.array([b[1] for b in log_bounds])
    if theta0 is None:
        theta0 = np.concatenate([np.full(d, np.log(0.3)), [0.0, np.log(1e-4)]])
    rng = rng_for(seed)
    starts = [np.clip(theta0, lo, hi)] + [rng.uniform(lo, hi) for _ in range(n_restarts)]

    sqdiff = ((U[:, None, :] - U[None, :, :]) ** 2).transpose(2, 0, 1).reshape(d, n * n).copy()
    best = None
    for t0 in starts:
        res = minimize(_neg_lml, t0, args=(U, ys, sqdiff), jac=True, method="L-BFGS-B",
                       bounds=log_bounds, options={"maxiter": maxiter})
        if best is None or res.fun < best.fun:
            best = res
    th = np.clip(best.x, lo, hi)
    return GpModel(U, ys, y_mean, y_scale, np.exp(th[:d]), float(np.exp(th[d])), float(np.exp(th[d + 1])),
                   JITTER_LADDER[0], lower, upper, lml=-float(best.fun))


def ei_from_moments(mu, sigma, incumbent, xi=0.0):
    """Closed-form E[max(0, f - incumbent - xi)] for f ~ N(mu, sigma^2)."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    imp = mu - incumbent - xi
    safe = np.where(sigma > 1e-12, sigma, 1.0)
    z = imp / safe
    ei = safe * (z * ndtr(z) + INV_SQRT_2PI * np.exp(-0.5 * z * z))
    return np.where(sigma > 1e-12, np.maximum(ei, 0.0), np.maximum(imp, 0.0))


def expected_improvement(model: GpModel, x, incumbent: float, xi: float = 0.01):
    """Expected improvement over ``incumbent`` (original units).

    ``xi`` is given in standardised target units. The result is in original
    target units.
    """
    mu, sd = model.predict_unit(model.to_unit(x))
    ei = ei_from_moments(mu, sd, model.standardize(incumbent), xi)
    out = model.y_scale * ei
    return out if np.ndim(x) > 1 else float(out[0])


def _neg_ei_unit(u, model, inc_std, xi):
    mu, sd, dmu, dsd = model._moments_grad(u)
    if sd <= 1e-12:
        return -max(mu - inc_std - xi, 0.0), np.zeros_like(u)
    z = (mu - inc_std - xi) / sd
    cdf, pdf = ndtr(z), INV_SQRT_2PI * np.exp(-0.5 * z * z)
    ei = sd * (z * cdf + pdf)
    return -ei, -(cdf * dmu + pdf * dsd)


def maximize_ei(model: GpModel, incumbent_std: float, rng, xi: float = 0.01,
                n_candidates: int = 1024, n_refine: int = 4, center=None,
                local_fraction: float = 0.5, local_scale: float = 0.1) -> np.ndarray:
    """Unit-cube point maximising EI.

    The candidate pool is uniform over the cube, except that a
    ``local_fraction`` share is drawn as Gaussian perturbations (std
    ``local_scale``) of ``center`` when one is given. The best ``n_refine``
    candidates are then polished with L-BFGS-B.
    """
    d = model.X.shape[1]
    n_local = int(round(local_fraction * n_candidates)) if center is not None else 0
    C = rng.uniform(size=(n_candidates - n_local, d))
    if n_local:
        near = np.clip(center + local_scale * rng.standard_normal((n_local, d)), 0.0, 1.0)
        C = np.vstack([C, near])
    mu, sd = model.predict_unit(C)
    ei = ei_from_moments(mu, sd, incumbent_std, xi)
    order = np.argsort(-ei, kind="stable")[:n_refine]
    best_u, best_v = C[order[0]], ei[order[0]]
    for i in order:
        res = minimize(_neg_ei_unit, C[i], args=(model, incumbent_std, xi), jac=True,
                       method="L-BFGS-B", bounds=[(0.0, 1.0)] * d, options={"maxiter": 20})
        if -res.fun > best_v:
            best_u, best_v = np.clip(res.x, 0.0, 1.0), -res.fun
    return best_u
