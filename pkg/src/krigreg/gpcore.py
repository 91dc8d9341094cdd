"""Zero-mean kriging under exact inversion, pseudoinverse or nugget regularization.

All three policies share the eigendecomposition ``C = [V W] diag(lambda) [V W]^T``
of the design covariance matrix, computed once at fit time:

* ``Exact``  -- plain inverse, refused when ``kappa(C) > 1e12``;
* ``PI``     -- eigenvalues ``<= eta`` are discarded (Moore-Penrose inverse);
* ``Nugget`` -- every eigenvalue is shifted by ``tau2``.

For the nugget model the weight vector ``beta = (C + tau2 I)^{-1} y`` has a
component along the null space of ``C``. Covariance vectors ``c(x)`` are
orthogonal to that null space, so predictions only use the image-space part;
dropping it avoids amplifying round-off by ``1 / tau2``.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConditioningError, UsageError
from .kernels import KernelSpec, as_design, as_points, covariance_matrix, cross_covariance, prior_variance
from .spectral import SpectralDecomposition, condition_number, eigendecompose, image_projector

logger = logging.getLogger(__name__)

EXACT_MAX_CONDITION = 1e12


@dataclass(frozen=True)
class Exact:
    """Plain inversion; only valid for well-conditioned covariance matrices."""

    def to_dict(self):
        return {"policy": "exact"}


@dataclass(frozen=True)
class PI:
    """Pseudoinverse regularization with eigenvalue cut-off ``eta``.

    ``eta=None`` selects ``lambda_1 / 1e8`` at fit time.
    """

    eta: float | None = None

    def __post_init__(self):
        if self.eta is not None and not (np.isfinite(self.eta) and self.eta > 0):
            raise UsageError(f"PI tolerance must be positive, got {self.eta}")

    def to_dict(self):
        return {"policy": "pi", "eta": self.eta}


@dataclass(frozen=True)
class Nugget:
    """Nugget regularization: ``tau2`` added to the diagonal of ``C``."""

    tau2: float

    def __post_init__(self):
        if not (np.isfinite(self.tau2) and self.tau2 >= 0):
            raise UsageError(f"nugget must be non-negative, got {self.tau2}")

    def to_dict(self):
        return {"policy": "nugget", "tau2": self.tau2}


def policy_from_dict(d):
    name = d.get("policy")
    if name == "exact":
        return Exact()
    if name == "pi":
        return PI(d.get("eta"))
    if name == "nugget":
        return Nugget(float(d["tau2"]))
    raise UsageError(f"unknown regularization policy {name!r}")


def _check_invertible(sd: SpectralDecomposition, what="covariance matrix"):
    kappa = condition_number(sd)
    if kappa > EXACT_MAX_CONDITION:
        lam = sd.eigenvalues
        raise ConditioningError(
            f"{what} is too ill-conditioned for exact inversion: condition number {kappa:.3e} > "
            f"{EXACT_MAX_CONDITION:.0e} (largest eigenvalue {lam[0]:.6e}, smallest {lam[-1]:.6e}); "
            "use pseudoinverse or nugget regularization"
        )


@dataclass(frozen=True, eq=False)
class KrigingModel:
    """A fitted kriging model. Build it with :func:`fit`.

    Attributes
    ----------
    X : ndarray, shape (n, d)
    y : ndarray, shape (n,)
    kernel : KernelSpec
    policy : Exact, PI or Nugget
    decomposition : SpectralDecomposition of ``C`` (PI tolerance applied)
    beta : ndarray, shape (n,)
        ``C^{-1} y``, ``C^+ y`` or ``(C + tau2 I)^{-1} y`` depending on the policy.
    """

    X: np.ndarray
    y: np.ndarray
    kernel: KernelSpec
    policy: object
    decomposition: SpectralDecomposition
    beta: np.ndarray
    # eigenvector block and inverse weights used at prediction time
    _basis: np.ndarray = field(repr=False)
    _inv_weights: np.ndarray = field(repr=False)
    _pred_beta: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    def _cross(self, x):
        pts, single = as_points(x, self.dim)
        return pts, single, cross_covariance(self.kernel, pts, self.X)

    def predict_mean(self, x):
        """Kriging mean ``c(x)^T beta`` at one point or at each row of ``x``."""
        _, single, c = self._cross(x)
        m = c @ self._pred_beta
        return float(m[0]) if single else m

    def predict_cov(self, x, x_prime):
        """Conditional covariance ``c(x, x')`` between two single points."""
        p1, _ = as_points(x, self.dim)
        p2, _ = as_points(x_prime, self.dim)
        if p1.shape[0] != 1 or p2.shape[0] != 1:
            raise UsageError("predict_cov takes two single points; use predict_cov_matrix for batches")
        q1 = cross_covariance(self.kernel, p1, self.X)[0] @ self._basis
        q2 = cross_covariance(self.kernel, p2, self.X)[0] @ self._basis
        prior = cross_covariance(self.kernel, p1, p2)[0, 0]
        # elementwise q1 * q2 keeps the result exactly symmetric in (x, x')
        return float(prior - np.sum(q1 * q2 * self._inv_weights))

    def predict_cov_matrix(self, points):
        """Conditional covariance matrix between the rows of ``points``."""
        pts, _ = as_points(points, self.dim)
        c = cross_covariance(self.kernel, pts, self.X)
        proj = c @ self._basis
        return cross_covariance(self.kernel, pts, pts) - (proj * self._inv_weights) @ proj.T

    def predict_var_raw(self, x):
        """Kriging variance before clamping at zero."""
        pts, single, c = self._cross(x)
        proj = c @ self._basis
        v = prior_variance(self.kernel, pts) - np.sum(proj**2 * self._inv_weights, axis=1)
        return float(v[0]) if single else v

    def predict_var(self, x):
        """Kriging variance ``c(x, x)``, clamped below at zero."""
        raw = np.atleast_1d(self.predict_var_raw(x))
        if np.any(raw < 0):
            logger.debug("clamped negative kriging variances: min %.3e", raw.min())
        v = np.maximum(raw, 0.0)
        _, single = as_points(x, self.dim)
        return float(v[0]) if single else v

    def predict_mean_at_design(self):
        """Predictions at the design points, ``V V^T y`` for a pseudoinverse model."""
        if isinstance(self.policy, Nugget):
            raise UsageError("prediction at the design is a projection only for PI/exact models; "
                             "use predict_mean(model.X) with a nugget model")
        return image_projector(self.decomposition) @ self.y

    # -- serialization ---------------------------------------------------

    def to_dict(self):
        return {
            "design": self.X.tolist(),
            "outputs": self.y.tolist(),
            "kernel": self.kernel.to_dict(),
            "policy": self.policy.to_dict(),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return fit(d["design"], d["outputs"], KernelSpec.from_dict(d["kernel"]), policy_from_dict(d["policy"]))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def fit(X, y, kernel: KernelSpec, policy=None) -> KrigingModel:
    """Fit a kriging model.

    Parameters
    ----------
    X : array_like, shape (n, d) or (n,)
    y : array_like, shape (n,)
    kernel : KernelSpec
    policy : Exact, PI or Nugget, default PI()

    Raises
    ------
    ConditioningError
        With the Exact policy (or a zero nugget) when ``kappa(C) > 1e12``.
    """
    policy = PI() if policy is None else policy
    X = as_design(X, kernel.dim)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[0]:
        raise UsageError(f"got {y.shape[0]} outputs for {X.shape[0]} design points")
    if not np.all(np.isfinite(y)):
        raise UsageError("outputs contain non-finite values")
    C = covariance_matrix(kernel, X)
    eta = policy.eta if isinstance(policy, PI) else None
    sd = eigendecompose(C, eta)
    Q, lam = sd.eigenvectors, sd.eigenvalues
    coef = Q.T @ y
    if isinstance(policy, PI):
        r = sd.rank
        basis, inv_w = Q[:, :r], 1.0 / lam[:r]
        beta = basis @ (coef[:r] * inv_w)
        pred_beta = beta
    elif isinstance(policy, Nugget) and policy.tau2 > 0:
        shifted = lam + policy.tau2
        beta = Q @ (coef / shifted)
        # c(x) is orthogonal to Null(C): only eigenvalues above round-off contribute
        r = sd.numerical_rank
        basis, inv_w = Q[:, :r], 1.0 / shifted[:r]
        pred_beta = basis @ (coef[:r] * inv_w)
    elif isinstance(policy, (Exact, Nugget)):
        _check_invertible(sd)
        basis, inv_w = Q, 1.0 / lam
        beta = Q @ (coef * inv_w)
        pred_beta = beta
    else:
        raise UsageError(f"unknown regularization policy {policy!r}")
    for a in (X, y, beta, pred_beta, basis, inv_w):
        a.setflags(write=False)
    return KrigingModel(X, y, kernel, policy, sd, beta, basis, inv_w, pred_beta)


def predict_mean(model: KrigingModel, x):
    return model.predict_mean(x)


def predict_cov(model: KrigingModel, x, x_prime):
    return model.predict_cov(x, x_prime)


def predict_var(model: KrigingModel, x):
    return model.predict_var(x)


def predict_mean_at_design(model: KrigingModel):
    return model.predict_mean_at_design()


def nugget_solve_prediction(X, y, kernel: KernelSpec, tau2, points):
    """Nugget mean and variance by a dense linear solve with ``C + tau2 I``.

    Independent of the spectral route used by :func:`fit`; kept as a
    cross-check.
    """
    X = as_design(X, kernel.dim)
    pts, _ = as_points(points, kernel.dim)
    K = covariance_matrix(kernel, X) + tau2 * np.eye(X.shape[0])
    c = cross_covariance(kernel, pts, X)
    sol = np.linalg.solve(K, np.column_stack([np.asarray(y, dtype=float), c.T]))
    mean = c @ sol[:, 0]
    var = prior_variance(kernel, pts) - np.sum(c * sol[:, 1:].T, axis=1)
    return mean, var
