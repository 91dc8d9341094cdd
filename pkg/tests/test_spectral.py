import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from helpers import appendix_cases, random_psd

from krigreg import UsageError
from krigreg.cases import CASES, NEAR_REPEATED_SPECTRUM, TABLE_TOL
from krigreg.kernels import covariance_matrix
from krigreg.spectral import (
    condition_number,
    eigendecompose,
    image_projector,
    matrix_from_csv,
    matrix_to_csv,
    null_projector,
    pi_condition_bound,
    pseudoinverse,
)


def case_matrix(name, eta=1e-3):
    c = CASES[name]
    C = covariance_matrix(c.kernel, c.X)
    return C, eigendecompose(C, eta)


def test_second_additive_spectrum():
    _, sd = case_matrix("additive2")
    assert np.max(np.abs(sd.eigenvalues - [5.75, 2.90, 2.07, 0.80, 0.49, 0.0])) <= TABLE_TOL


def test_identity():
    sd = eigendecompose(np.eye(2), 0.5)
    assert list(sd.eigenvalues) == [1.0, 1.0] and sd.rank == 2


def test_reconstruction_random_psd():
    rng = np.random.default_rng(0)
    C = random_psd(rng, 5)
    sd = eigendecompose(C)
    assert np.max(np.abs(sd.reconstruct() - C)) < 1e-10


@pytest.mark.parametrize("case", appendix_cases(), ids=lambda c: c.name)
def test_decomposition_invariants(case):
    C = covariance_matrix(case.kernel, case.X)
    sd = eigendecompose(C)
    Q = sd.eigenvectors
    assert np.max(np.abs(Q.T @ Q - np.eye(sd.n))) < 1e-8
    assert np.max(np.abs(sd.reconstruct() - C)) < 1e-8 * sd.eigenvalues[0]
    assert np.all(np.diff(sd.eigenvalues) <= 0)
    assert np.all(sd.eigenvalues >= 0)


def test_rank_is_strict():
    sd = eigendecompose(np.diag([4.0, 1.0, 0.0]), eta=1.0)
    assert sd.rank == 1


def test_clamps_tiny_negative_eigenvalues():
    rng = np.random.default_rng(1)
    C = random_psd(rng, 6, rank=3)
    sd = eigendecompose(C)
    assert np.all(sd.eigenvalues >= 0) and sd.rank == 3


@pytest.mark.parametrize("bad", [np.array([[1.0, 2.0], [0.0, 1.0]]), np.ones((2, 3)), np.diag([1.0, -1.0])])
def test_rejects_bad_matrices(bad):
    with pytest.raises(UsageError):
        eigendecompose(bad)


def test_rejects_nonpositive_tolerance():
    with pytest.raises(UsageError):
        eigendecompose(np.eye(2), eta=0.0)


def test_pseudoinverse_diag():
    sd = eigendecompose(np.diag([4.0, 1.0, 0.0]), 1e-3)
    assert np.allclose(pseudoinverse(sd), np.diag([0.25, 1.0, 0.0]), atol=1e-15)


def test_pseudoinverse_of_invertible_is_inverse():
    C = random_psd(np.random.default_rng(2), 4) + np.eye(4)
    assert np.max(np.abs(pseudoinverse(eigendecompose(C)) @ C - np.eye(4))) < 1e-8


@pytest.mark.parametrize("case", appendix_cases(), ids=lambda c: c.name)
def test_penrose_identities(case):
    C = covariance_matrix(case.kernel, case.X)
    sd = eigendecompose(C, 1e-3)
    P = pseudoinverse(sd)
    tol = 1e-8 * sd.eigenvalues[0]
    assert np.max(np.abs(C @ P @ C - C)) < tol
    assert np.max(np.abs(P @ C @ P - P)) < 1e-8 * np.max(np.abs(P))
    assert np.max(np.abs((C @ P).T - C @ P)) < 1e-8


def _projector_laws(sd):
    for P in (image_projector(sd), null_projector(sd)):
        assert np.max(np.abs(P - P.T)) < 1e-8
        assert np.max(np.abs(P @ P - P)) < 1e-8
    assert np.max(np.abs(image_projector(sd) + null_projector(sd) - np.eye(sd.n))) < 1e-12
    assert np.max(np.abs(null_projector(sd) @ image_projector(sd))) < 1e-8


@pytest.mark.parametrize("case", appendix_cases(), ids=lambda c: c.name)
def test_projector_laws_appendix(case):
    _projector_laws(eigendecompose(covariance_matrix(case.kernel, case.X)))


def test_projector_laws_random():
    rng = np.random.default_rng(3)
    for _ in range(100):
        n = int(rng.integers(1, 11))
        _projector_laws(eigendecompose(random_psd(rng, n, rank=int(rng.integers(1, n + 1)))))


def test_repeated_projector_blocks():
    _, sd = case_matrix("repeated")
    assert np.max(np.abs(image_projector(sd) - CASES["repeated"].projector)) <= TABLE_TOL


def test_full_rank_projectors():
    sd = eigendecompose(np.diag([3.0, 2.0, 1.0]))
    assert np.allclose(image_projector(sd), np.eye(3))
    assert np.allclose(null_projector(sd), 0.0)


def test_second_additive_projector_entries():
    _, sd = case_matrix("additive2")
    P = np.abs(image_projector(sd))
    off = P[~np.eye(6, dtype=bool)]
    assert np.max(np.abs(np.diag(P) - 5 / 6)) <= TABLE_TOL
    assert np.max(np.abs(off - 1 / 6)) <= TABLE_TOL


def test_rectangles_null_projector_from_null_vectors():
    _, sd = case_matrix("additive1")
    # null vectors of each rectangle are (1,-1,-1,1)/2 on its four points
    w = np.zeros((10, 2))
    w[:4, 0] = w[4:8, 1] = np.array([1, -1, -1, 1]) / 2
    assert np.max(np.abs(null_projector(sd) - w @ w.T)) < 1e-8
    N = null_projector(sd)
    assert np.allclose(np.abs(N[:8, :8][np.abs(N[:8, :8]) > 1e-6]), 0.25)


def test_condition_numbers():
    assert condition_number(eigendecompose(np.diag([4.0, 1.0]))) == 4.0
    assert condition_number(case_matrix("repeated")[1]) == float("inf")
    assert condition_number(eigendecompose(np.diag([4.0, 0.0])).shifted(1.0)) == 5.0


def _tabulated_spectrum(eta):
    s = NEAR_REPEATED_SPECTRUM
    return eigendecompose(np.diag([s["lambda_1"], 10.0, 5.0, 2.0, s["lambda_5"], s["lambda_6"]]), eta)


def test_pi_condition_bound_tabulated_spectrum():
    sd = _tabulated_spectrum(1e-3)
    assert sd.rank == 5
    assert abs(pi_condition_bound(sd) - NEAR_REPEATED_SPECTRUM["pi_condition"]) <= 0.01


def test_pi_condition_bound_trivial():
    assert pi_condition_bound(eigendecompose(np.eye(3))) == 1.0
    assert pi_condition_bound(eigendecompose(np.diag([100.0, 10.0, 1.0]), eta=5.0)) == 10.0


def test_pi_condition_bound_rank_zero():
    with pytest.raises(UsageError):
        pi_condition_bound(eigendecompose(np.zeros((2, 2))))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 10.0))
def test_nugget_shifts_spectrum(seed, tau2):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    C = random_psd(rng, n, rank=int(rng.integers(1, n + 1)))
    a = eigendecompose(C).eigenvalues
    b = eigendecompose(C + tau2 * np.eye(n)).eigenvalues
    assert np.max(np.abs(b - (a + tau2))) < 1e-8 * max(1.0, a[0])


def test_decomposition_is_read_only():
    sd = eigendecompose(np.eye(2))
    with pytest.raises(ValueError):
        sd.eigenvalues[0] = 3.0


def test_csv_export_round_trip():
    _, sd = case_matrix("repeated")
    P = image_projector(sd)
    text = matrix_to_csv(P)
    assert len(text.splitlines()) == 6
    assert np.max(np.abs(matrix_from_csv(text) - P)) < 1e-14
