import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gradedchain import (
    ChainSpec,
    GradingOverflow,
    VerificationError,
    band_edges,
    build_matrices,
    dispersion,
    verify_spectrum,
)
from gradedchain.chain import dispersion_relation, l_matrix


@pytest.mark.parametrize(
    "kwargs, field",
    [
        (dict(n=1, xi=2.0), "n"),
        (dict(n=2.5, xi=2.0), "n"),
        (dict(n=4, xi=0.0), "xi"),
        (dict(n=4, xi=-1.0), "xi"),
        (dict(n=4, xi=float("nan")), "xi"),
        (dict(n=4, xi=2.0, omega0=0.0), "omega0"),
        (dict(n=4, xi=2.0, m0=-1.0), "m0"),
    ],
)
def test_spec_validation_names_field(kwargs, field):
    with pytest.raises(ValueError, match=field):
        ChainSpec(**kwargs)


def test_homogeneous_three_site_matrix():
    mat = build_matrices(ChainSpec(3, 1.0)).l_mat
    expected = np.array([[2, -1, -1], [-1, 2, -1], [-1, -1, 2]], dtype=float)
    np.testing.assert_allclose(mat, expected)


def test_graded_three_site_matrix():
    mat = l_matrix(ChainSpec(3, 2.0))
    np.testing.assert_allclose(np.diag(mat), 1.25)
    for p in range(3):
        assert mat[p, (p + 1) % 3] == pytest.approx(-0.5)
        assert mat[p, (p - 1) % 3] == pytest.approx(-0.5)


def test_four_site_diagonal_and_symmetry():
    mat = l_matrix(ChainSpec(4, 0.5, omega0=2.0))
    np.testing.assert_allclose(np.diag(mat), 20.0)
    np.testing.assert_array_equal(mat, mat.T)


def test_two_site_wrap_accumulates():
    # both neighbours of site 0 are site 1
    mat = l_matrix(ChainSpec(2, 2.0))
    np.testing.assert_allclose(mat, [[1.25, -1.0], [-1.0, 1.25]])


def test_stiffness_is_graded_similarity():
    spec = ChainSpec(6, 1.7)
    m = build_matrices(spec)
    root = np.sqrt(np.diag(m.lambda_mat))
    np.testing.assert_allclose(m.k_mat, root[:, None] * m.l_mat * root[None, :])
    # wrap entry carries xi**(p+q) like the interior ones
    assert m.k_mat[0, 5] == pytest.approx(m.l_mat[0, 5] * 1.7**5)


def test_grading_overflow():
    with pytest.raises(GradingOverflow):
        build_matrices(ChainSpec(2000, 10.0))


@pytest.mark.parametrize(
    "xi, edges",
    [(1.0, (0.0, 2.0)), (2.0, (0.5, 1.5)), (10.0, (0.9, 1.1))],
)
def test_band_edges(xi, edges):
    np.testing.assert_allclose(band_edges(ChainSpec(4, xi)), edges, atol=1e-15)


def test_band_edges_against_dense_extremes():
    spec = ChainSpec(128, 2.0)
    w = np.sqrt(np.linalg.eigvalsh(l_matrix(spec)))
    assert w.min() == pytest.approx(0.5, abs=1e-12)
    assert w.max() == pytest.approx(1.5, abs=1e-3)


def test_dispersion_two_sites():
    res = dispersion(ChainSpec(2, 2.0))
    np.testing.assert_allclose(res.eigenvalues, [0.25, 2.25])
    np.testing.assert_allclose(res.frequencies, [0.5, 1.5])


def test_dispersion_four_sites_homogeneous():
    np.testing.assert_allclose(dispersion(ChainSpec(4, 1.0)).eigenvalues, [0, 2, 4, 2], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 17, 64])
def test_homogeneous_has_zero_mode(n):
    assert dispersion(ChainSpec(n, 1.0)).eigenvalues.min() == pytest.approx(0.0, abs=1e-15)


def test_eigenvectors_diagonalise_l():
    spec = ChainSpec(9, 0.7, omega0=1.3)
    res = dispersion(spec)
    v = res.eigenvectors
    lhs = l_matrix(spec) @ v
    np.testing.assert_allclose(lhs, v * res.eigenvalues[None, :], atol=1e-12)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(9), atol=1e-12)


@pytest.mark.parametrize("n, xi, tol", [(64, 2.0, 1e-10), (2, 1.0, 1e-12), (128, 0.3, 1e-9)])
def test_verify_spectrum_examples(n, xi, tol):
    assert verify_spectrum(ChainSpec(n, xi), tol=tol).passed


def test_verify_spectrum_two_site_values():
    res = dispersion(ChainSpec(2, 1.0, omega0=1.5))
    np.testing.assert_allclose(np.sort(res.eigenvalues), [0.0, 4 * 1.5**2], atol=1e-14)


def test_verify_spectrum_raises_on_impossible_tolerance():
    with pytest.raises(VerificationError) as info:
        verify_spectrum(ChainSpec(64, 2.0), tol=0.0)
    assert info.value.report.max_rel_deviation >= 0.0


def test_similarity_check_skipped_for_steep_grading():
    rep = verify_spectrum(ChainSpec(64, 10.0))
    assert rep.similarity_rel_deviation is None
    assert rep.passed


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 40),
    xi=st.floats(0.05, 20.0),
    omega0=st.floats(0.1, 10.0),
)
def test_spectrum_matches_dense(n, xi, omega0):
    spec = ChainSpec(n, xi, omega0)
    assert verify_spectrum(spec, tol=1e-9, check=False).max_rel_deviation < 1e-9


@settings(max_examples=40, deadline=None)
@given(xi=st.floats(0.05, 20.0), k=st.floats(-10.0, 10.0))
def test_dispersion_inside_band(xi, k):
    spec = ChainSpec(4, xi)
    w = math.sqrt(float(dispersion_relation(spec, k)))
    lo, hi = band_edges(spec)
    assert lo - 1e-12 <= w <= hi + 1e-12


@settings(max_examples=30, deadline=None)
@given(xi=st.floats(0.1, 10.0))
def test_dispersion_inversion_symmetry(xi):
    # lambda(xi) xi^2 = xi^2 + 1 - 2 xi cos k = lambda(1/xi)
    a = dispersion(ChainSpec(12, xi)).eigenvalues
    b = dispersion(ChainSpec(12, 1.0 / xi)).eigenvalues
    np.testing.assert_allclose(a * xi**2, b, rtol=1e-12, atol=1e-14 * (1 + xi) ** 2)
