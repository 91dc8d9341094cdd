import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from krigreg import KernelSpec, UsageError
from krigreg.cases import CASES
from krigreg.kernels import covariance_matrix, covariance_vector, cross_covariance, kernel_eval

SE = KernelSpec.squared_exponential([0.25, 0.25])
PERIODIC = KernelSpec.periodic([0.2, 0.2], omega=4 * math.pi)
KERNELS_2D = [
    SE,
    KernelSpec.additive([0.2, 0.3], sigma2=[1.0, 2.0]),
    PERIODIC,
    KernelSpec.dot_product(2),
]

coords = st.floats(-3, 3, allow_nan=False)
points_2d = st.tuples(coords, coords)


def test_se_variance_at_coincident_points():
    assert kernel_eval(SE, (0.2, 0.3), (0.2, 0.3)) == 1.0


def test_dot_product_value():
    assert kernel_eval(KernelSpec.dot_product(1), 0.2, 0.6) == pytest.approx(1.12, abs=1e-15)


def test_periodic_points_one_period_apart_are_identical():
    assert kernel_eval(PERIODIC, (0.3, 0.2), (0.8, 0.2)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("k, expected", [
    (KernelSpec.squared_exponential([0.1, 0.4], sigma2=2.5), 2.5),
    (KernelSpec.periodic([0.3], omega=2.0, sigma2=0.7), 0.7),
    (KernelSpec.additive([0.2, 0.3], sigma2=[1.0, 2.0]), 3.0),
])
def test_diagonal_is_total_process_variance(k, expected):
    x = np.full(k.dim, 0.37)
    assert kernel_eval(k, x, x) == pytest.approx(expected, rel=1e-15)


def test_dot_product_diagonal():
    k = KernelSpec.dot_product(2)
    assert kernel_eval(k, (0.5, 2.0), (0.5, 2.0)) == pytest.approx(1 + 0.25 + 4.0)


def test_dimension_mismatch():
    with pytest.raises(UsageError):
        kernel_eval(SE, (0.1,), (0.1, 0.2))
    with pytest.raises(UsageError):
        covariance_vector(SE, np.zeros((3, 2)), (1.0, 2.0, 3.0))


def test_dot_product_matrix_corner():
    C = covariance_matrix(KernelSpec.dot_product(1), [0.2, 0.6, 0.8])
    assert C[0, 0] == pytest.approx(1.04, abs=1e-15)


def test_single_point_matrix():
    C = covariance_matrix(SE.scaled(3.0), [[0.1, 0.2]])
    assert C.shape == (1, 1) and C[0, 0] == 3.0


def test_matrix_is_exactly_symmetric_with_kernel_diagonal():
    rng = np.random.default_rng(1)
    X = rng.uniform(size=(12, 2))
    for k in KERNELS_2D:
        C = covariance_matrix(k, X)
        assert np.array_equal(C, C.T)
        assert np.allclose(np.diag(C), [kernel_eval(k, x, x) for x in X], rtol=1e-14)


def test_vector_at_design_point_is_matrix_column():
    X = CASES["repeated"].X
    C = covariance_matrix(SE, X)
    assert np.allclose(covariance_vector(SE, X, X[0]), C[:, 0], atol=1e-15)


def test_vector_decays_far_from_design():
    X = CASES["repeated"].X
    assert np.all(covariance_vector(SE, X, (10.0, -10.0)) < 1e-10)


def test_vector_at_repeated_location():
    c = covariance_vector(SE, CASES["repeated"].X, (0.2, 0.3))
    assert c[[0, 1, 5]] == pytest.approx([1.0, 1.0, 1.0], abs=1e-15)
    direct = [kernel_eval(SE, (0.2, 0.3), x) for x in CASES["repeated"].X]
    assert np.allclose(c, direct, atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(points_2d, points_2d, st.sampled_from(range(len(KERNELS_2D))))
def test_symmetry(x, xp, which):
    k = KERNELS_2D[which]
    assert kernel_eval(k, x, xp) == kernel_eval(k, xp, x)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 12))
def test_random_subsets_are_psd(seed, d, n):
    rng = np.random.default_rng(seed)
    pool = rng.uniform(-1, 1, size=(2 * n, d))
    X = pool[rng.choice(2 * n, size=n, replace=False)]
    for k in (
        KernelSpec.squared_exponential(rng.uniform(0.05, 1, d)),
        KernelSpec.additive(rng.uniform(0.05, 1, d), sigma2=rng.uniform(0.5, 2, d)),
        KernelSpec.periodic(rng.uniform(0.05, 1, d), omega=3.0),
        KernelSpec.dot_product(d),
    ):
        lam = np.linalg.eigvalsh(covariance_matrix(k, X))
        assert lam[0] >= -1e-8 * lam[-1]


@settings(max_examples=40, deadline=None)
@given(coords, coords, coords, coords)
def test_additive_rectangle_column_identity(a1, a2, b1, b2):
    k = KernelSpec.additive([0.3, 0.7], sigma2=[1.0, 1.5])
    rect = np.array([(a1, a2), (b1, a2), (a1, b2), (b1, b2)])
    X = np.vstack([rect, np.random.default_rng(0).uniform(-3, 3, size=(5, 2))])
    C = covariance_matrix(k, X)
    assert np.max(np.abs(C[:, 3] - (C[:, 2] + C[:, 1] - C[:, 0]))) < 1e-10


@settings(max_examples=40, deadline=None)
@given(points_2d, points_2d, st.integers(0, 1), st.integers(-3, 3))
def test_periodic_shift_by_period(x, xp, axis, periods):
    shifted = np.array(x, dtype=float)
    shifted[axis] += periods * PERIODIC.period
    assert abs(kernel_eval(PERIODIC, shifted, xp) - kernel_eval(PERIODIC, x, xp)) < 1e-12


def test_period_is_pi_over_omega():
    assert PERIODIC.period == pytest.approx(0.25)


def test_cross_covariance_matches_pointwise():
    rng = np.random.default_rng(3)
    A, B = rng.uniform(size=(4, 2)), rng.uniform(size=(5, 2))
    for k in KERNELS_2D:
        M = cross_covariance(k, A, B)
        assert np.allclose(M, [[kernel_eval(k, a, b) for b in B] for a in A], rtol=1e-14)


@pytest.mark.parametrize("bad", [
    dict(kind="SquaredExponential", sigma2=(1.0,), theta=(0.0,), dim=1),
    dict(kind="SquaredExponential", sigma2=(-1.0,), theta=(0.5,), dim=1),
    dict(kind="SquaredExponential", sigma2=(1.0,), theta=(0.5, 0.5), dim=1),
    dict(kind="Additive", sigma2=(1.0,), theta=(0.5, 0.5), dim=2),
    dict(kind="Periodic", sigma2=(1.0,), theta=(0.5,), omega=None, dim=1),
    dict(kind="Periodic", sigma2=(1.0,), theta=(0.5,), omega=-2.0, dim=1),
    dict(kind="SquaredExponential", sigma2=(1.0,), theta=(0.5,), omega=1.0, dim=1),
    dict(kind="DotProduct", sigma2=(1.0,), dim=1),
    dict(kind="Matern", sigma2=(1.0,), theta=(0.5,), dim=1),
])
def test_invalid_specs_rejected(bad):
    with pytest.raises(UsageError):
        KernelSpec(**bad)


@pytest.mark.parametrize("k", KERNELS_2D + [KernelSpec.squared_exponential(0.5, sigma2=2.0)])
def test_json_round_trip(k):
    assert KernelSpec.from_json(k.to_json()) == k


def test_json_layout():
    d = KernelSpec.periodic([0.2, 0.2], omega=4.0, sigma2=2.0).to_dict()
    assert d == {"kind": "Periodic", "sigma2": 2.0, "theta": [0.2, 0.2], "omega": 4.0, "dim": 2}


def test_json_unknown_key_rejected():
    with pytest.raises(UsageError, match="unknown"):
        KernelSpec.from_json('{"kind": "SquaredExponential", "theta": [0.5], "nugget": 1}')


def test_scaling_helpers():
    k = KernelSpec.additive([0.2, 0.3], sigma2=[1.0, 3.0])
    assert k.scale == 4.0
    assert k.normalized().sigma2 == (0.25, 0.75)
    assert k.with_theta([0.5, 0.6]).theta == (0.5, 0.6)
