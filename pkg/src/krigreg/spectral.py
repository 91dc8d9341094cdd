"""Symmetric eigendecomposition, pseudoinverse and image/null projectors.

A :class:`SpectralDecomposition` stores the eigenvalues of a symmetric
positive semidefinite matrix in non-increasing order together with the
orthogonal matrix of eigenvectors. A tolerance ``eta`` splits the spectrum:
eigenvectors whose eigenvalue is strictly larger than ``eta`` span the
(numerical) image space, the others the null space.

Individual eigenvectors inside a degenerate eigenspace are not unique, so
downstream code only relies on projectors, eigenvalues and reconstructions.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .exceptions import NumericalError, UsageError

DEFAULT_KAPPA_MAX = 1e8
CLAMP_REL = 1e-8
SYMMETRY_REL = 1e-8


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Sorted eigen-pairs of a symmetric PSD matrix with a rank tolerance.

    Attributes
    ----------
    eigenvalues : ndarray, shape (n,)
        Non-increasing, tiny negative values clamped to zero.
    eigenvectors : ndarray, shape (n, n)
        Orthogonal matrix ``[V W]``; column ``i`` pairs with ``eigenvalues[i]``.
    tolerance : float
        Pseudoinverse cut-off ``eta``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    tolerance: float
    raw_min_eigenvalue: float = field(default=0.0, repr=False)

    @property
    def n(self):
        return self.eigenvalues.size

    @cached_property
    def rank(self):
        """Number of eigenvalues strictly above the tolerance."""
        return int(np.count_nonzero(self.eigenvalues > self.tolerance))

    @property
    def V(self):
        """Eigenvectors spanning the image space."""
        return self.eigenvectors[:, : self.rank]

    @property
    def W(self):
        """Eigenvectors spanning the null space."""
        return self.eigenvectors[:, self.rank :]

    @cached_property
    def numerical_floor(self):
        """Round-off level below which an eigenvalue is indistinguishable from zero."""
        lam1 = self.eigenvalues[0] if self.n else 0.0
        return max(self.n, 1) * np.finfo(float).eps * lam1

    @cached_property
    def numerical_rank(self):
        return int(np.count_nonzero(self.eigenvalues > self.numerical_floor))

    def with_tolerance(self, eta):
        """Same eigen-pairs, different cut-off."""
        _check_eta(eta)
        return SpectralDecomposition(self.eigenvalues, self.eigenvectors, float(eta), self.raw_min_eigenvalue)

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T

    def shifted(self, tau2):
        """Decomposition of ``C + tau2 I``: eigenvalues shift, eigenvectors stay."""
        if tau2 < 0:
            raise UsageError("shift must be non-negative")
        return SpectralDecomposition(self.eigenvalues + tau2, self.eigenvectors, self.tolerance + tau2,
                                     self.raw_min_eigenvalue + tau2)


def _check_eta(eta):
    if not (np.isfinite(eta) and eta > 0):
        raise UsageError(f"tolerance eta must be positive, got {eta}")


def default_tolerance(lambda_max, kappa_max=DEFAULT_KAPPA_MAX):
    """``lambda_max / kappa_max``, or the smallest positive float for a zero matrix."""
    if lambda_max <= 0:
        return float(np.finfo(float).tiny)
    return float(lambda_max / kappa_max)


def eigendecompose(C, eta=None) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric positive semidefinite matrix.

    Parameters
    ----------
    C : array_like, shape (n, n)
        Symmetric PSD matrix (symmetric to 1e-8 relative).
    eta : float, optional
        Pseudoinverse tolerance. Defaults to ``lambda_1 / 1e8``.

    Raises
    ------
    UsageError
        If ``C`` is not square, not symmetric, or clearly indefinite.
    NumericalError
        If the eigen-solver fails.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
        raise UsageError(f"expected a non-empty square matrix, got shape {C.shape}")
    if not np.all(np.isfinite(C)):
        raise UsageError("matrix has non-finite entries")
    scale = np.max(np.abs(C))
    if np.max(np.abs(C - C.T), initial=0.0) > SYMMETRY_REL * max(scale, np.finfo(float).tiny):
        raise UsageError("matrix is not symmetric")
    try:
        lam, Q = scipy.linalg.eigh(0.5 * (C + C.T))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"symmetric eigen-solver failed: {exc}") from exc
    lam = lam[::-1]
    Q = Q[:, ::-1]
    raw_min = float(lam[-1])
    lam1 = max(lam[0], 0.0)
    if raw_min < -CLAMP_REL * lam1:
        raise UsageError(f"matrix is not positive semidefinite (eigenvalue {raw_min:.3e})")
    lam = np.where(lam < 0.0, 0.0, lam)
    if eta is None:
        eta = default_tolerance(lam1)
    _check_eta(eta)
    lam.setflags(write=False)
    Q.setflags(write=False)
    return SpectralDecomposition(lam, Q, float(eta), raw_min)


def pseudoinverse(sd: SpectralDecomposition) -> np.ndarray:
    """Moore-Penrose pseudoinverse ``V diag(1/lambda) V^T`` over eigenvalues above the tolerance."""
    V = sd.V
    return (V / sd.eigenvalues[: sd.rank]) @ V.T


def image_projector(sd: SpectralDecomposition) -> np.ndarray:
    """Orthogonal projector ``V V^T`` onto the image space."""
    V = sd.V
    return V @ V.T


def null_projector(sd: SpectralDecomposition) -> np.ndarray:
    """Orthogonal projector ``I - V V^T`` onto the null space."""
    return np.eye(sd.n) - image_projector(sd)


def condition_number(sd: SpectralDecomposition) -> float:
    """``lambda_1 / lambda_n``; ``inf`` when the smallest eigenvalue is zero."""
    lam_min = sd.eigenvalues[-1]
    if lam_min <= 0:
        return float("inf")
    return float(sd.eigenvalues[0] / lam_min)


def pi_condition_bound(sd: SpectralDecomposition) -> float:
    """Condition number seen by the pseudoinverse, ``lambda_1 / lambda_r``.

    It never exceeds ``lambda_1 / eta``.
    """
    if sd.rank == 0:
        raise UsageError("pseudoinverse condition number needs rank >= 1")
    return float(sd.eigenvalues[0] / sd.eigenvalues[sd.rank - 1])


def matrix_to_csv(M, digits=15) -> str:
    """Render a matrix (or vector) as CSV with ``digits`` significant digits."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in M:
        writer.writerow([f"{v:.{digits}g}" for v in row])
    return buf.getvalue()


def matrix_from_csv(text) -> np.ndarray:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    return np.array([[float(v) for v in r] for r in rows])
