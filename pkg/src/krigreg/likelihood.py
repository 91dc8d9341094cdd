"""Likelihood evaluation and regularization-parameter tuning.

Everything here is derivative-free and deterministic: fixed search grids,
fixed start lattices and fixed iteration budgets, so that repeated runs give
bit-identical results.

The nugget likelihood is evaluated through the eigendecomposition of ``C``:
adding ``tau2`` to the diagonal shifts every eigenvalue and keeps the
eigenvectors, so up to the constant ``n log(2 pi)``::

    -2 log L(y | tau2) = sum_i log(lambda_i + tau2) + sum_i <y, q_i>^2 / (lambda_i + tau2)

where ``q_i`` are the eigenvectors of ``C``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .exceptions import ConditioningError, NumericalError, UsageError
from .gpcore import EXACT_MAX_CONDITION
from .kernels import KernelSpec, as_design, covariance_matrix
from .spectral import SpectralDecomposition, condition_number, eigendecompose, image_projector

NUGGET_FLOOR = 1e-12
LOG_2PI = math.log(2.0 * math.pi)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _prepare(X, y, kernel):
    X = as_design(X, kernel.dim)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[0]:
        raise UsageError(f"got {y.shape[0]} outputs for {X.shape[0]} design points")
    return X, y


def _require_invertible(sd, tau2):
    if tau2 == 0 and condition_number(sd) > EXACT_MAX_CONDITION:
        raise ConditioningError(
            f"covariance matrix is singular or ill-conditioned (condition number "
            f"{condition_number(sd):.3e}); the likelihood needs a positive nugget"
        )


def nugget_objective(sd: SpectralDecomposition, y, tau2):
    """``-2 log L(y | tau2)`` without the ``n log(2 pi)`` constant, spectral form."""
    shifted = sd.eigenvalues + tau2
    coef = sd.eigenvectors.T @ np.asarray(y, dtype=float)
    return float(np.sum(np.log(shifted)) + np.sum(coef**2 / shifted))


def likelihood_terms(sd: SpectralDecomposition, y, tau2):
    """Split ``-2 log L`` (minus constant) into log-determinant, null-space and image-space terms.

    The null-space term is ``||y - P_Im y||^2 / tau2``; for repeated points
    ``||y - P_Im y||^2`` is the sum over sites of ``N_i s_i^2``.

    Returns
    -------
    dict with keys ``logdet``, ``null``, ``image``.
    """
    y = np.asarray(y, dtype=float)
    r = sd.rank
    lam = np.concatenate([sd.eigenvalues[:r], np.zeros(sd.n - r)])
    p_im = image_projector(sd) @ y
    resid = y - p_im
    coef = sd.V.T @ p_im
    return {
        "logdet": float(np.sum(np.log(lam + tau2))),
        "null": float(resid @ resid / tau2),
        "image": float(np.sum(coef**2 / (sd.eigenvalues[:r] + tau2))),
    }


def log_likelihood(X, y, kernel: KernelSpec, tau2=0.0):
    """Gaussian log-likelihood of ``y`` under covariance ``C + tau2 I``.

    Raises
    ------
    ConditioningError
        If ``tau2 == 0`` and ``C`` is singular or ill-conditioned.
    """
    X, y = _prepare(X, y, kernel)
    if tau2 < 0:
        raise UsageError("nugget must be non-negative")
    sd = eigendecompose(covariance_matrix(kernel, X))
    _require_invertible(sd, tau2)
    return -0.5 * (y.size * LOG_2PI + nugget_objective(sd, y, tau2))


def concentrated_neg2ll(X, y, kernel: KernelSpec, nugget_ratio=0.0):
    """Concentrated ``-2 log L`` with the process variance profiled out.

    The correlation-level matrix is ``K = C / s + nugget_ratio * I`` where
    ``s = kernel.scale``; its ML scale is ``sigma2_hat = y^T K^{-1} y / n``.

    Returns
    -------
    value : float
        ``n log(2 pi) + n log(sigma2_hat) + log|K| + n``
    sigma2_hat : float
    """
    X, y = _prepare(X, y, kernel)
    if nugget_ratio < 0:
        raise UsageError("nugget ratio must be non-negative")
    sd = eigendecompose(covariance_matrix(kernel.normalized(), X))
    _require_invertible(sd, nugget_ratio)
    return _concentrated_from_sd(sd, y, nugget_ratio)


def _concentrated_from_sd(sd, y, ratio):
    n = y.size
    shifted = sd.eigenvalues + ratio
    coef = sd.eigenvectors.T @ y
    sigma2_hat = float(np.sum(coef**2 / shifted) / n)
    if not sigma2_hat > 0:
        raise NumericalError("profiled process variance is not positive (all-zero outputs?)")
    value = n * LOG_2PI + n * math.log(sigma2_hat) + float(np.sum(np.log(shifted))) + n
    return value, sigma2_hat


def golden_section(f, lo, hi, xtol=1e-9, max_iter=500):
    """Minimize a unimodal scalar function on ``[lo, hi]`` by golden-section search.

    Returns ``(x_best, f_best, n_evaluations)``. The end points are not
    evaluated.
    """
    a, b = float(lo), float(hi)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    evals = 2
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
        evals += 1
    return (c, fc, evals) if fc <= fd else (d, fd, evals)


@dataclass
class ScalarSearch:
    """Result of a bounded one-dimensional search."""

    x: float
    objective: float
    evaluations: int


def _log_search(f, lo, hi, rtol, coarse=64):
    """Coarse log-grid bracketing followed by golden-section refinement on ``log x``."""
    u_lo, u_hi = math.log(lo), math.log(hi)
    grid = np.linspace(u_lo, u_hi, coarse)
    vals = np.array([f(math.exp(u)) for u in grid])
    evals = coarse
    vals = np.where(np.isfinite(vals), vals, np.inf)
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, coarse - 1)]
    # rtol on x is an absolute tolerance on log x
    u, fu, n_gs = golden_section(lambda t: f(math.exp(t)), a, b, xtol=rtol)
    evals += n_gs
    best_u, best_f = (u, fu) if fu < vals[i] else (grid[i], vals[i])
    return ScalarSearch(math.exp(best_u), float(best_f), evals)


def nugget_bounds(sd, floor=NUGGET_FLOOR, upper=None):
    upper = sd.eigenvalues[0] if upper is None else upper
    return floor, max(upper, 10.0 * floor)


def estimate_nugget_ml(X, y, kernel: KernelSpec, floor=NUGGET_FLOOR, upper=None, rtol=1e-6, full_output=False):
    """Maximum-likelihood nugget with every other kernel parameter held fixed.

    Minimizes ``-2 log L(y | tau2)`` over ``[floor, upper]`` (``upper``
    defaults to the largest eigenvalue of ``C``). A 64-point log grid
    brackets the minimum, then golden-section search on ``log tau2`` refines
    it to relative tolerance ``rtol``.

    Returns
    -------
    float, or :class:`ScalarSearch` when ``full_output`` is true.
    """
    X, y = _prepare(X, y, kernel)
    sd = eigendecompose(covariance_matrix(kernel, X))
    lo, hi = nugget_bounds(sd, floor, upper)
    res = _log_search(lambda t: nugget_objective(sd, y, t), lo, hi, rtol)
    return res if full_output else res.x


def loo_residuals(sd: SpectralDecomposition, y, tau2):
    """Leave-one-out residuals ``y_i - m_{-i}(x_i)`` of the nugget model.

    Uses the identity ``e_i = [K^{-1} y]_i / [K^{-1}]_{ii}`` with
    ``K = C + tau2 I``, equivalent to refitting on the ``n - 1`` remaining
    points for each ``i``.
    """
    Q = sd.eigenvectors
    inv = 1.0 / (sd.eigenvalues + tau2)
    alpha = Q @ (inv * (Q.T @ y))
    diag = np.einsum("ij,j,ij->i", Q, inv, Q)
    return alpha / diag


def cv_objective(sd, y, tau2):
    """Mean squared leave-one-out error."""
    e = loo_residuals(sd, np.asarray(y, dtype=float), tau2)
    return float(np.mean(e**2))


def estimate_nugget_cv(X, y, kernel: KernelSpec, floor=NUGGET_FLOOR, upper=None, rtol=1e-6, full_output=False):
    """Nugget minimizing the mean squared leave-one-out prediction error.

    Same bounds and search scheme as :func:`estimate_nugget_ml`.
    """
    X, y = _prepare(X, y, kernel)
    if X.shape[0] < 3:
        raise UsageError("cross-validation needs at least 3 points")
    sd = eigendecompose(covariance_matrix(kernel, X))
    lo, hi = nugget_bounds(sd, floor, upper)
    res = _log_search(lambda t: cv_objective(sd, y, t), lo, hi, rtol)
    return res if full_output else res.x


@dataclass
class HyperParams:
    """Estimated kernel hyperparameters."""

    theta: tuple
    sigma2: float
    nugget: float = 0.0
    objective: float = float("nan")
    evaluations: int = 0

    def kernel(self, template: KernelSpec) -> KernelSpec:
        """Kernel of the template's family carrying these hyperparameters."""
        k = template.with_theta(self.theta).normalized()
        return k.scaled(self.sigma2)


def _start_lattice(lo, hi):
    d = lo.size
    if 3**d <= 27:
        levels = [np.array([0.25, 0.5, 0.75])] * d
        fracs = np.array(list(itertools.product(*levels)))
    else:
        fracs = [np.full(d, 0.5)]
        for i in range(d):
            for f in (0.25, 0.75):
                v = np.full(d, 0.5)
                v[i] = f
                fracs.append(v)
        fracs = np.array(fracs)
    return lo + fracs * (hi - lo)


def estimate_lengthscales(X, y, kernel: KernelSpec, bounds, nugget_bounds=None, max_evals=400):
    """Length-scales (and optionally a nugget) minimizing the concentrated likelihood.

    Parameters
    ----------
    X, y : array_like
    kernel : KernelSpec
        Template fixing the family (and, for Additive kernels, the relative
        per-dimension variances). Its length-scales are ignored.
    bounds : (lower, upper)
        Length-scale box, scalars or one entry per dimension, ``lower > 0``.
    nugget_bounds : (lower, upper), optional
        If given, the nugget-to-variance ratio is searched as an extra
        coordinate. This joint search carries no monotonicity guarantee.
    max_evals : int
        Function-evaluation budget per start.

    Returns
    -------
    HyperParams
        Best point over a fixed lattice of Nelder-Mead starts in log space.
        A local optimum, not a certified global one.
    """
    X, y = _prepare(X, y, kernel)
    if kernel.kind == "DotProduct":
        raise UsageError("DotProduct kernel has no length-scales to estimate")
    lo = np.broadcast_to(np.asarray(bounds[0], dtype=float), (kernel.dim,))
    hi = np.broadcast_to(np.asarray(bounds[1], dtype=float), (kernel.dim,))
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo > 0) and np.all(hi >= lo)):
        raise UsageError(f"invalid length-scale bounds {bounds}")
    ulo, uhi = np.log(lo), np.log(hi)
    with_nugget = nugget_bounds is not None
    if with_nugget:
        nlo, nhi = (float(b) for b in nugget_bounds)
        if not (0 < nlo <= nhi):
            raise UsageError(f"invalid nugget bounds {nugget_bounds}")
        ulo = np.append(ulo, math.log(nlo))
        uhi = np.append(uhi, math.log(nhi))
    base = kernel.normalized()
    d = kernel.dim
    counter = [0]

    def objective(u):
        counter[0] += 1
        u = np.clip(u, ulo, uhi)
        k = base.with_theta(np.exp(u[:d]))
        ratio = math.exp(u[d]) if with_nugget else 0.0
        try:
            sd = eigendecompose(covariance_matrix(k, X))
            _require_invertible(sd, ratio)
            return _concentrated_from_sd(sd, y, ratio)[0]
        except (ConditioningError, NumericalError, UsageError):
            return np.inf

    candidates = []
    for u0 in _start_lattice(ulo, uhi):
        if not np.isfinite(objective(u0)):
            continue
        res = minimize(objective, u0, method="Nelder-Mead", bounds=list(zip(ulo, uhi)),
                       options={"maxfev": max_evals, "xatol": 1e-8, "fatol": 1e-10})
        u = np.clip(res.x, ulo, uhi)
        val = objective(u)
        if np.isfinite(val):
            candidates.append((val, tuple(u)))
    if not candidates:
        raise NumericalError("the concentrated likelihood could not be evaluated at any start point; "
                             "singular designs (repeated points) need a nugget search range")
    val, u = min(candidates)
    u = np.asarray(u)
    theta = np.exp(u[:d])
    ratio = math.exp(u[d]) if with_nugget else 0.0
    sd = eigendecompose(covariance_matrix(base.with_theta(theta), X))
    _, sigma2 = _concentrated_from_sd(sd, y, ratio)
    return HyperParams(tuple(float(t) for t in theta), sigma2, ratio * sigma2, val, counter[0])


def smallest_nugget_for_condition(lambda_max, lambda_min, kappa_max):
    """Smallest ``tau2`` with ``(lambda_max + tau2) / (lambda_min + tau2) <= kappa_max``.

    Zero when the matrix already satisfies the bound.
    """
    if not kappa_max > 1:
        raise UsageError(f"kappa_max must exceed 1, got {kappa_max}")
    if lambda_min < 0 or lambda_max < lambda_min:
        raise UsageError("need lambda_max >= lambda_min >= 0")
    gap = lambda_max - kappa_max * lambda_min
    return float(gap / (kappa_max - 1.0)) if gap >= 0 else 0.0


def pi_tolerance_for_condition(lambda_1, kappa_max):
    """Pseudoinverse cut-off ``lambda_1 / kappa_max``."""
    if not lambda_1 > 0:
        raise UsageError("lambda_1 must be positive")
    if not kappa_max > 1:
        raise UsageError(f"kappa_max must exceed 1, got {kappa_max}")
    return float(lambda_1 / kappa_max)


@dataclass
class TuningResult:
    """Serializable summary of a tuning run."""

    tau2_ml: float | None = None
    tau2_cv: float | None = None
    theta: list | None = None
    sigma2: float | None = None
    objective: float | None = None
    evaluations: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        extra = d.pop("extra")
        d.update(extra)
        return d

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)
