import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semi_hilbert_lab.errors import DimensionMismatch, InvalidMatrix, \
    NotHermitian, NotPSD
from semi_hilbert_lab.linalg import DEFAULT_TOLERANCE, TolerancePolicy, \
    as_matrix, func_calculus, ginibre, haar_unitary, hermitian_eig, \
    moore_penrose, power_function, psd_power, psd_sqrt, seeded_rng, \
    spectral_norm


def test_tolerance_defaults():
    tol = TolerancePolicy()
    assert tol.rank_cutoff_rel == 1e-10
    assert tol.hermitize_tol == 1e-8
    assert tol.psd_tol == 1e-9
    assert tol.slack_tol == 1e-8


def test_tolerance_overrides_skip_none():
    tol = DEFAULT_TOLERANCE.with_overrides(slack_tol=1e-6, psd_tol=None)
    assert tol.slack_tol == 1e-6
    assert tol.psd_tol == DEFAULT_TOLERANCE.psd_tol


@pytest.mark.parametrize('value', [0.0, 1.0, -1e-3, 2.0])
def test_tolerance_range(value):
    with pytest.raises(ValueError):
        DEFAULT_TOLERANCE.with_overrides(slack_tol=value)


def test_tolerance_from_dict():
    assert TolerancePolicy.from_dict({'psd_tol': 1e-7}).psd_tol == 1e-7
    with pytest.raises(ValueError):
        TolerancePolicy.from_dict({'bogus': 0.1})


def test_as_matrix_validation():
    with pytest.raises(InvalidMatrix):
        as_matrix([1.0, 2.0])
    with pytest.raises(InvalidMatrix):
        as_matrix([[np.nan]])
    with pytest.raises(DimensionMismatch):
        as_matrix(np.zeros((2, 3)))
    M = as_matrix([[1, 2], [3, 4]])
    assert M.dtype == np.complex128
    assert not M.flags.writeable


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 6))
def test_moore_penrose_identities(seed, dim):
    rng = seeded_rng(seed, 'test')
    rank = int(rng.integers(0, dim + 1))
    M = ginibre(dim, rank, rng) @ ginibre(rank, dim, rng) if rank \
        else np.zeros((dim, dim), dtype=np.complex128)
    P = moore_penrose(M)
    scale = 1.0 + np.linalg.norm(M) * np.linalg.norm(P)
    assert np.linalg.norm(M @ P @ M - M) <= 1e-8 * scale * np.linalg.norm(M)
    assert np.linalg.norm(P @ M @ P - P) <= 1e-8 * scale * np.linalg.norm(P)
    assert np.linalg.norm((M @ P).conj().T - M @ P) <= 1e-8 * scale
    assert np.linalg.norm((P @ M).conj().T - P @ M) <= 1e-8 * scale


def test_power_function_zero_power_is_support_projection():
    f = power_function(0.0)
    assert list(f(np.array([0.0, 2.0, 5.0]))) == [0.0, 1.0, 1.0]


def test_psd_sqrt_squares_back():
    rng = seeded_rng(3, 'test')
    G = ginibre(4, 4, rng)
    M = G @ G.conj().T
    root = psd_sqrt(M)
    assert np.allclose(root @ root, M, atol=1e-10)
    assert np.allclose(psd_power(M, 2.0), M @ M, atol=1e-9)


def test_func_calculus_rejects_negative():
    with pytest.raises(NotPSD):
        func_calculus(np.diag([1.0, -1.0]), np.sqrt)


def test_func_calculus_elementwise_fallback():
    values = func_calculus(np.diag([4.0, 1.0]), lambda t: float(t) ** 0.5)
    assert np.allclose(values, np.diag([2.0, 1.0]))


def test_spectral_norm():
    assert spectral_norm(np.array([[0.0, 1.0], [0.0, 0.0]])) == \
        pytest.approx(1.0)


def test_haar_unitary_is_unitary():
    U = haar_unitary(5, seeded_rng(0, 'test'))
    assert np.allclose(U.conj().T @ U, np.eye(5), atol=1e-12)


def test_seeded_rng_streams():
    a = seeded_rng(11, 'spec').standard_normal(4)
    b = seeded_rng(11, 'spec').standard_normal(4)
    c = seeded_rng(11, 'other').standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
