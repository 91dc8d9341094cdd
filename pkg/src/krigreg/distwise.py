"""Distribution-wise Gaussian process.

Observations are summarized per distinct site ``x^i`` by a count, a mean and
a variance. The model conditions on the site distributions rather than on the
raw outputs. With ``C_Z`` the ``k x k`` site covariance and ``c_Z(x)`` the
site covariance vector::

    m(x) = c_Z(x)^T C_Z^{-1} ybar
    v(x) = K(x, x) - c_Z(x)^T C_Z^{-1} c_Z(x) + c_Z(x)^T C_Z^{-1} Gamma C_Z^{-1} c_Z(x)

``Gamma = diag(s_i^2)``. At a site the model returns exactly the site mean and
variance, whatever the number of repeats. Cost depends on ``k``, not on the
number of raw observations.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from .exceptions import UsageError
from .gpcore import _check_invertible
from .kernels import KernelSpec, as_design, as_points, covariance_matrix, cross_covariance, prior_variance
from .spectral import SpectralDecomposition, eigendecompose

VARIANCE_CONVENTIONS = ("population", "sample")


@dataclass(frozen=True)
class SiteSummary:
    """Gaussian summary of the outputs observed at one location.

    Can also be built directly from a known distribution (mean, variance).
    """

    location: tuple
    count: int
    mean: float
    variance: float

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(v) for v in np.atleast_1d(self.location)))
        if int(self.count) != self.count or self.count < 1:
            raise UsageError(f"site count must be a positive integer, got {self.count}")
        object.__setattr__(self, "count", int(self.count))
        if not (np.isfinite(self.mean) and np.isfinite(self.variance) and self.variance >= 0):
            raise UsageError("site mean must be finite and variance non-negative")
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "variance", float(self.variance))


def _site_variance(values, convention):
    if values.size == 1:
        return 0.0
    ddof = 0 if convention == "population" else 1
    return float(np.var(values, ddof=ddof))


def group_repeated_points(X, y, group_tol=0.0, variance="population"):
    """Merge design points closer than ``group_tol`` (single linkage) into sites.

    Sites are ordered by first appearance in ``X``; the site location is that
    of its first point.

    Parameters
    ----------
    variance : {"population", "sample"}
        Divide the within-site sum of squares by ``N_i`` or ``N_i - 1``.
        Single-observation sites get variance 0 either way.
    """
    if variance not in VARIANCE_CONVENTIONS:
        raise UsageError(f"variance convention must be one of {VARIANCE_CONVENTIONS}")
    if group_tol < 0:
        raise UsageError("group_tol must be non-negative")
    X = as_design(X)
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != X.shape[0]:
        raise UsageError(f"got {y.shape[0]} outputs for {X.shape[0]} design points")
    n = X.shape[0]
    if n == 1:
        labels = np.zeros(1, dtype=int)
    else:
        Z = linkage(X, method="single", metric="euclidean")
        labels = fcluster(Z, t=group_tol, criterion="distance")
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    sites = []
    for g in np.argsort(first):
        idx = np.flatnonzero(inverse == g)
        vals = y[idx]
        sites.append(SiteSummary(tuple(X[idx[0]]), idx.size, float(vals.mean()), _site_variance(vals, variance)))
    return sites


@dataclass(frozen=True, eq=False)
class DistWiseModel:
    """Distribution-wise GP over ``k`` sites. Build it with :func:`fit_distwise`."""

    sites: tuple
    kernel: KernelSpec
    decomposition: SpectralDecomposition
    locations: np.ndarray = field(repr=False)
    means: np.ndarray = field(repr=False)
    variances: np.ndarray = field(repr=False)
    _weights: np.ndarray = field(repr=False)

    @property
    def k(self):
        return len(self.sites)

    def _solve_factor(self, pts):
        """Rows ``c_Z(x)^T C_Z^{-1}`` for each point."""
        c = cross_covariance(self.kernel, pts, self.locations)
        Q, lam = self.decomposition.eigenvectors, self.decomposition.eigenvalues
        return ((c @ Q) / lam) @ Q.T, c

    def predict_mean(self, x):
        pts, single = as_points(x, self.kernel.dim)
        m = cross_covariance(self.kernel, pts, self.locations) @ self._weights
        return float(m[0]) if single else m

    def predict_var(self, x):
        pts, single = as_points(x, self.kernel.dim)
        a, c = self._solve_factor(pts)
        v = prior_variance(self.kernel, pts) - np.sum(a * c, axis=1) + (a**2) @ self.variances
        v = np.maximum(v, 0.0)
        return float(v[0]) if single else v


def fit_distwise(sites, kernel: KernelSpec) -> DistWiseModel:
    """Fit a distribution-wise GP on site summaries.

    Raises
    ------
    ConditioningError
        If the site covariance matrix has condition number above 1e12
        (sites too close for the kernel's length-scales).
    """
    sites = tuple(sites)
    if not sites:
        raise UsageError("need at least one site")
    locations = as_design(np.array([s.location for s in sites]), kernel.dim)
    sd = eigendecompose(covariance_matrix(kernel, locations))
    _check_invertible(sd, "site covariance matrix")
    means = np.array([s.mean for s in sites])
    variances = np.array([s.variance for s in sites])
    for a in (locations, means, variances):
        a.setflags(write=False)
    weights = sd.eigenvectors @ ((sd.eigenvectors.T @ means) / sd.eigenvalues)
    return DistWiseModel(sites, kernel, sd, locations, means, variances, weights)


def predict_mean_dist(model: DistWiseModel, x):
    return model.predict_mean(x)


def predict_var_dist(model: DistWiseModel, x):
    return model.predict_var(x)


def sites_to_csv(sites) -> str:
    """CSV with header ``x1,...,xd,count,mean,variance``."""
    sites = list(sites)
    d = len(sites[0].location) if sites else 1
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{i + 1}" for i in range(d)] + ["count", "mean", "variance"])
    for s in sites:
        w.writerow([repr(v) for v in s.location] + [s.count, repr(s.mean), repr(s.variance)])
    return buf.getvalue()


def sites_from_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise UsageError("empty site CSV")
    header = [h.strip() for h in header]
    if header[-3:] != ["count", "mean", "variance"] or len(header) < 4:
        raise UsageError("site CSV header must be x1,...,xd,count,mean,variance")
    d = len(header) - 3
    if header[:d] != [f"x{i + 1}" for i in range(d)]:
        raise UsageError("site CSV header must be x1,...,xd,count,mean,variance")
    sites = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != d + 3:
            raise UsageError(f"line {lineno}: expected {d + 3} fields, got {len(row)}")
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise UsageError(f"line {lineno}: {exc}") from exc
        sites.append(SiteSummary(tuple(vals[:d]), vals[d], vals[d + 1], vals[d + 2]))
    return sites
