"""Covariance functions and covariance matrix assembly.

Four kernel families are supported::

    SquaredExponential  K(x, x') = s2 * prod_i exp(-(x_i - x'_i)^2 / (2 theta_i^2))
    Additive            K(x, x') = sum_i s2_i * exp(-(x_i - x'_i)^2 / (2 theta_i^2))
    Periodic            K(x, x') = s2 * prod_i exp(-sin(omega (x_i - x'_i))^2 / (2 theta_i^2))
    DotProduct          K(x, x') = 1 + x . x'

The periodic kernel has period ``pi / omega`` in every coordinate because
``sin^2`` has period ``pi``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import UsageError

KINDS = ("SquaredExponential", "Additive", "Periodic", "DotProduct")
_JSON_KEYS = {"kind", "sigma2", "theta", "omega", "dim"}


def _positive_tuple(values, name):
    out = tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))
    if not all(math.isfinite(v) and v > 0 for v in out):
        raise UsageError(f"{name} must be strictly positive and finite, got {out}")
    return out


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a covariance function.

    Use the ``squared_exponential``, ``additive``, ``periodic`` and
    ``dot_product`` constructors rather than the raw initializer.

    Attributes
    ----------
    kind : str
        One of ``KINDS``.
    sigma2 : tuple of float
        Process variance. One entry for SquaredExponential and Periodic,
        one per dimension for Additive, empty for DotProduct.
    theta : tuple of float
        Length-scales, one per dimension (empty for DotProduct).
    omega : float or None
        Frequency multiplier inside the sine (Periodic only).
    dim : int
        Input dimension.
    """

    kind: str
    sigma2: tuple = ()
    theta: tuple = ()
    omega: float | None = None
    dim: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UsageError(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise UsageError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.kind == "DotProduct":
            if self.sigma2 or self.theta or self.omega is not None:
                raise UsageError("DotProduct kernel takes no hyperparameters")
            return
        object.__setattr__(self, "sigma2", _positive_tuple(self.sigma2, "sigma2"))
        object.__setattr__(self, "theta", _positive_tuple(self.theta, "theta"))
        if len(self.theta) != self.dim:
            raise UsageError(f"expected {self.dim} length-scales, got {len(self.theta)}")
        n_var = self.dim if self.kind == "Additive" else 1
        if len(self.sigma2) != n_var:
            raise UsageError(f"{self.kind} expects {n_var} process variance(s), got {len(self.sigma2)}")
        if self.kind == "Periodic":
            if self.omega is None or not (math.isfinite(self.omega) and self.omega > 0):
                raise UsageError("Periodic kernel needs a positive frequency omega")
            object.__setattr__(self, "omega", float(self.omega))
        elif self.omega is not None:
            raise UsageError(f"omega is only meaningful for the Periodic kernel, not {self.kind}")

    # -- constructors -----------------------------------------------------

    @classmethod
    def squared_exponential(cls, theta, sigma2=1.0):
        theta = np.atleast_1d(theta)
        return cls("SquaredExponential", (sigma2,), tuple(theta), None, len(theta))

    @classmethod
    def additive(cls, theta, sigma2=1.0):
        theta = np.atleast_1d(theta)
        sigma2 = np.broadcast_to(np.asarray(sigma2, dtype=float), theta.shape)
        return cls("Additive", tuple(sigma2), tuple(theta), None, len(theta))

    @classmethod
    def periodic(cls, theta, omega, sigma2=1.0):
        theta = np.atleast_1d(theta)
        return cls("Periodic", (sigma2,), tuple(theta), omega, len(theta))

    @classmethod
    def dot_product(cls, dim=1):
        return cls("DotProduct", (), (), None, dim)

    # -- derived quantities ---------------------------------------------

    @property
    def period(self):
        """Period of the Periodic kernel along each axis, ``pi / omega``."""
        if self.kind != "Periodic":
            raise UsageError("period is only defined for the Periodic kernel")
        return math.pi / self.omega

    @property
    def scale(self):
        """Overall variance scale: sigma2, sum of sigma2_i, or 1 for DotProduct."""
        return float(sum(self.sigma2)) if self.sigma2 else 1.0

    def with_theta(self, theta):
        """Copy of this kernel with new length-scales."""
        if self.kind == "DotProduct":
            raise UsageError("DotProduct kernel has no length-scales")
        return KernelSpec(self.kind, self.sigma2, tuple(np.atleast_1d(theta)), self.omega, self.dim)

    def scaled(self, factor):
        """Copy of this kernel with every process variance multiplied by ``factor``."""
        if self.kind == "DotProduct":
            raise UsageError("DotProduct kernel has no process variance to scale")
        return KernelSpec(self.kind, tuple(s * factor for s in self.sigma2), self.theta, self.omega, self.dim)

    def normalized(self):
        """Correlation-level copy whose ``scale`` is 1 (DotProduct is returned as is)."""
        if self.kind == "DotProduct":
            return self
        return self.scaled(1.0 / self.scale)

    # -- serialization -----------------------------------------------------

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind != "DotProduct":
            d["sigma2"] = self.sigma2[0] if len(self.sigma2) == 1 and self.kind != "Additive" else list(self.sigma2)
            d["theta"] = list(self.theta)
        if self.omega is not None:
            d["omega"] = self.omega
        d["dim"] = self.dim
        return d

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - _JSON_KEYS
        if unknown:
            raise UsageError(f"unknown kernel keys: {sorted(unknown)}")
        if "kind" not in d:
            raise UsageError("kernel JSON needs a 'kind'")
        kind = d["kind"]
        if kind == "DotProduct":
            extra = {"sigma2", "theta", "omega"} & set(d)
            if extra:
                raise UsageError(f"DotProduct kernel takes no {sorted(extra)}")
            return cls.dot_product(d.get("dim", 1))
        if "theta" not in d:
            raise UsageError(f"{kind} kernel needs 'theta'")
        theta = tuple(np.atleast_1d(np.asarray(d["theta"], dtype=float)))
        dim = d.get("dim", len(theta))
        sigma2 = d.get("sigma2", 1.0)
        if kind == "Additive":
            sigma2 = tuple(np.broadcast_to(np.asarray(sigma2, dtype=float), (len(theta),)))
        else:
            sigma2 = tuple(np.atleast_1d(np.asarray(sigma2, dtype=float)))
        return cls(kind, sigma2, theta, d.get("omega"), dim)

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        if not isinstance(d, dict):
            raise UsageError("kernel JSON must be an object")
        return cls.from_dict(d)


def as_design(X, dim=None):
    """Return ``X`` as a float ``(n, d)`` array, checking shape and finiteness.

    A 1-D input is read as ``n`` one-dimensional points.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] < 1:
        raise UsageError(f"design must be a non-empty (n, d) array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise UsageError("design contains non-finite coordinates")
    if dim is not None and X.shape[1] != dim:
        raise UsageError(f"design has dimension {X.shape[1]}, kernel expects {dim}")
    return X


def as_points(x, dim):
    """Coerce prediction input to ``(m, dim)``; also report whether it was a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        single, pts = True, x.reshape(1, 1)
    elif x.ndim == 1:
        if dim == 1:
            single, pts = x.size == 1, x[:, None]
        else:
            single, pts = True, x[None, :]
    elif x.ndim == 2:
        single, pts = False, x
    else:
        raise UsageError(f"points must be at most 2-D, got shape {x.shape}")
    if pts.shape[1] != dim:
        raise UsageError(f"point dimension {pts.shape[1]} does not match kernel dimension {dim}")
    return pts, single


def cross_covariance(k: KernelSpec, A, B) -> np.ndarray:
    """Matrix of kernel values ``K(A[i], B[j])`` for two ``(m, d)`` / ``(n, d)`` point sets."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[1] != k.dim or B.shape[1] != k.dim:
        raise UsageError(f"point dimension does not match kernel dimension {k.dim}")
    if k.kind == "DotProduct":
        return 1.0 + A @ B.T
    diff = A[:, None, :] - B[None, :, :]
    inv2 = 1.0 / (2.0 * np.square(k.theta))
    if k.kind == "SquaredExponential":
        return k.sigma2[0] * np.exp(-np.sum(diff**2 * inv2, axis=-1))
    if k.kind == "Additive":
        return np.sum(np.asarray(k.sigma2) * np.exp(-(diff**2) * inv2), axis=-1)
    # Periodic
    return k.sigma2[0] * np.exp(-np.sum(np.sin(k.omega * diff) ** 2 * inv2, axis=-1))


def kernel_eval(k: KernelSpec, x, x_prime) -> float:
    """Evaluate ``K(x, x')`` for two single points."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    x_prime = np.atleast_1d(np.asarray(x_prime, dtype=float))
    if x.shape != (k.dim,) or x_prime.shape != (k.dim,):
        raise UsageError(f"points must have dimension {k.dim}, got {x.shape} and {x_prime.shape}")
    return float(cross_covariance(k, x[None, :], x_prime[None, :])[0, 0])


def covariance_matrix(k: KernelSpec, X) -> np.ndarray:
    """Covariance matrix ``C[i, j] = K(x^i, x^j)`` over the design ``X``.

    The upper triangle is evaluated and mirrored so the result is exactly
    symmetric.
    """
    X = as_design(X, k.dim)
    C = np.triu(cross_covariance(k, X, X))
    return C + np.triu(C, 1).T


def covariance_vector(k: KernelSpec, X, x) -> np.ndarray:
    """Vector of covariances ``c(x)_i = K(x, x^i)`` between a point and the design."""
    X = as_design(X, k.dim)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (k.dim,):
        raise UsageError(f"point must have dimension {k.dim}, got shape {x.shape}")
    return cross_covariance(k, x[None, :], X)[0]


def prior_variance(k: KernelSpec, points) -> np.ndarray:
    """Diagonal ``K(x, x)`` for each row of ``points``."""
    points = np.asarray(points, dtype=float)
    if k.kind == "DotProduct":
        return 1.0 + np.sum(points**2, axis=1)
    return np.full(points.shape[0], k.scale)
