"""Redundant design points and model-data discrepancy.

Two design points ``i != j`` are redundant when the image-space projector
couples them, ``(V V^T)_ij != 0``. Coupled points are grouped into connected
components; the degree of a group is the number of zero eigenvalues of the
covariance matrix restricted to the group, i.e. how many of its points must
be dropped to make that sub-matrix invertible.

The discrepancy between outputs ``y`` and the covariance model is the share
of ``y`` lying in the null space of ``C``::

    residual = W W^T y = y - m_PI(X)
    discr    = ||residual||^2 / ||y||^2
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import UsageError
from .kernels import KernelSpec, as_design, covariance_matrix
from .spectral import SpectralDecomposition, eigendecompose, image_projector, null_projector

PAIR_TOL = 1e-6


@dataclass(frozen=True)
class RedundancyGroup:
    indices: tuple
    degree: int


@dataclass
class RedundancyReport:
    """Redundant pairs, their groups and, optionally, the discrepancy of some outputs.

    Indices are 0-based in Python and 1-based in the JSON export.
    """

    pairs: list
    groups: list
    discr_sq_ratio: float | None = None
    discr_rms_ratio: float | None = None
    residual: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self):
        return {
            "pairs": [[i + 1, j + 1] for i, j in self.pairs],
            "groups": [{"indices": [i + 1 for i in g.indices], "degree": g.degree} for g in self.groups],
            "discr_sq_ratio": self.discr_sq_ratio,
            "discr_rms_ratio": self.discr_rms_ratio,
            "residual": None if self.residual is None else [float(v) for v in self.residual],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)


def redundant_pairs(sd: SpectralDecomposition, pair_tol=PAIR_TOL):
    """Index pairs ``(i, j)``, ``i < j``, with ``|(V V^T)_ij| > pair_tol``."""
    if not pair_tol > 0:
        raise UsageError("pair_tol must be positive")
    P = image_projector(sd)
    i, j = np.nonzero(np.triu(np.abs(P) > pair_tol, k=1))
    return [(int(a), int(b)) for a, b in zip(i, j)]


def redundancy_groups(pairs, C, eta):
    """Connected components of the pair graph, each with its degree of redundancy.

    Parameters
    ----------
    pairs : list of (int, int)
    C : ndarray, shape (n, n)
        Covariance matrix the pairs were computed from.
    eta : float
        Tolerance below which an eigenvalue of a restricted sub-matrix counts as zero.
    """
    C = np.asarray(C, dtype=float)
    if not pairs:
        return []
    n = C.shape[0]
    rows, cols = zip(*pairs)
    graph = coo_matrix((np.ones(len(pairs)), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    flagged = sorted({i for p in pairs for i in p})
    groups = {}
    for i in flagged:
        groups.setdefault(labels[i], []).append(i)
    out = []
    for members in sorted(groups.values()):
        sub = C[np.ix_(members, members)]
        lam = np.linalg.eigvalsh(sub)
        out.append(RedundancyGroup(tuple(members), int(np.count_nonzero(lam <= eta))))
    return out


def discrepancy(X, y, kernel: KernelSpec, eta=None):
    """Model-data discrepancy of outputs ``y``.

    Returns
    -------
    discr_sq_ratio : float
        ``||W W^T y||^2 / ||y||^2``, in ``[0, 1]``.
    discr_rms_ratio : float
        Its square root.
    residual : ndarray
        ``W W^T y``, also the gradient of the squared PI error with respect to ``y``.
    """
    X = as_design(X, kernel.dim)
    sd = eigendecompose(covariance_matrix(kernel, X), eta)
    return _discrepancy(sd, y)


def _discrepancy(sd, y):
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != sd.n:
        raise UsageError(f"got {y.shape[0]} outputs for {sd.n} design points")
    norm2 = float(y @ y)
    if norm2 == 0.0:
        raise UsageError("discrepancy is undefined for an all-zero output vector")
    residual = null_projector(sd) @ y
    ratio = min(max(float(residual @ residual) / norm2, 0.0), 1.0)
    return ratio, float(np.sqrt(ratio)), residual


def diagnose(X, kernel: KernelSpec, y=None, eta=None, pair_tol=PAIR_TOL) -> RedundancyReport:
    """Full redundancy report for a design, plus discrepancy when outputs are given."""
    X = as_design(X, kernel.dim)
    C = covariance_matrix(kernel, X)
    sd = eigendecompose(C, eta)
    pairs = redundant_pairs(sd, pair_tol)
    report = RedundancyReport(pairs, redundancy_groups(pairs, C, sd.tolerance))
    if y is not None:
        report.discr_sq_ratio, report.discr_rms_ratio, report.residual = _discrepancy(sd, y)
    return report
