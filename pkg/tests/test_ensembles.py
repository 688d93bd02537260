import json

import numpy as np
import pytest
import scipy.optimize
import scipy.stats

from krylov_range.convexgeom import (SweepConfig, convex_hull, diameter, hausdorff,
                                     numerical_range, numerical_range_bounds, projected_interval)
from krylov_range.ensembles import (MatrixSpec, beta_normality, beta_threshold, build_matrix,
                                    convtonum_bound, make_rng, near_orthonormal_basis,
                                    sample_complex_gaussian, sample_sphere)
from krylov_range.errors import DomainError, PreconditionError, SingularityError
from krylov_range.linalg import condition_number

from conftest import random_complex


# -- sampling -----------------------------------------------------------------

def test_sphere_unit_norm_and_determinism():
    b = sample_sphere(30, make_rng(7))
    assert abs(np.linalg.norm(b) - 1) <= 1e-12
    np.testing.assert_array_equal(b, sample_sphere(30, make_rng(7)))
    assert not np.array_equal(b, sample_sphere(30, make_rng(7, 1)))
    np.testing.assert_array_equal(sample_sphere(30, 7), b)


def test_sampling_errors():
    with pytest.raises(DomainError):
        sample_sphere(0, 1)
    with pytest.raises(DomainError):
        sample_complex_gaussian(-2, 1)
    with pytest.raises(DomainError):
        make_rng(-1)


def test_sphere_coordinate_mean():
    n, N = 10, 100_000
    x = np.abs(sample_sphere(n, make_rng(11), size=N)[:, 0]) ** 2
    # |b_1|^2 ~ Beta(1, n-1): variance (n-1) / (n^2 (n+1))
    sigma = np.sqrt((n - 1) / (n * n * (n + 1)) / N)
    assert abs(x.mean() - 1 / n) <= 3 * sigma


def test_gaussian_moments_and_chisq_law():
    n, N = 5, 100_000
    B = sample_complex_gaussian(n, make_rng(12), size=N)
    sq = np.sum(np.abs(B) ** 2, axis=1)
    assert abs(sq.mean() - n) <= 3 * np.sqrt(n / N)
    m = B[:, 0].mean()
    assert abs(m.real) <= 3 * np.sqrt(0.5 / N) and abs(m.imag) <= 3 * np.sqrt(0.5 / N)
    np.testing.assert_allclose(B.real.var(), 0.5, rtol=0.02)
    ks = scipy.stats.kstest(2 * sq, scipy.stats.chi2(2 * n).cdf).statistic
    assert ks <= 0.01


# -- matrix specs -------------------------------------------------------------

def test_spec_errors():
    with pytest.raises(DomainError):
        MatrixSpec("banded", n=4)
    with pytest.raises(DomainError):
        MatrixSpec("radial_roots", m=3, ell=2, n=17)
    with pytest.raises(DomainError):
        MatrixSpec("circle_mult", k=4, ell=3, n=13)
    with pytest.raises(DomainError):
        MatrixSpec("laplacian_1d")
    with pytest.raises(DomainError):
        MatrixSpec("ellipse_rank1", n=10, gamma=0.0)
    with pytest.raises(DomainError):
        MatrixSpec("explicit", entries=[[1, 2, 3]])
    with pytest.raises(DomainError):
        MatrixSpec.from_dict({"kind": "roots_of_unity", "n": 4, "size": 3})


@pytest.mark.parametrize("spec", [MatrixSpec("radial_roots", m=3, ell=2),
                                  MatrixSpec("ellipse_rank1", n=20, gamma=1.5),
                                  MatrixSpec("explicit", entries=[[1, 2j], [0, -1]])])
def test_spec_json_roundtrip(spec):
    back = MatrixSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert back == spec
    np.testing.assert_allclose(build_matrix(back).dense(), build_matrix(spec).dense())


def check_eigendecomposition(built, tol=1e-10):
    A = built.dense()
    V = np.eye(built.n) if built.V is None else built.V
    np.testing.assert_allclose(A @ V, V * built.eigenvalues, atol=tol * max(1.0, np.abs(A).max()))
    if built.V_inv is not None:
        np.testing.assert_allclose(built.V_inv @ V, np.eye(built.n), atol=tol)


@pytest.mark.parametrize("spec", [MatrixSpec("roots_of_unity", n=12), MatrixSpec("laplacian_1d", n=9),
                                  MatrixSpec("radial_roots", m=3, ell=2), MatrixSpec("circle_mult", k=5, ell=3),
                                  MatrixSpec("ellipse_rank1", n=15, gamma=2.0),
                                  MatrixSpec("correlated_eigvecs", m=3, ell=2),
                                  MatrixSpec("explicit", entries=[[2, 1], [0, 3]]),
                                  MatrixSpec("explicit", entries=[[0, 1], [-1, 0]])])
def test_build_eigendecomposition(spec):
    built = build_matrix(spec)
    assert built.n == spec.n
    check_eigendecomposition(built)


def test_laplacian_eigenvalues():
    lam = build_matrix(MatrixSpec("laplacian_1d", n=4)).eigenvalues
    np.testing.assert_allclose(np.sort(lam.real), 2 - 2 * np.cos(np.arange(1, 5) * np.pi / 5), atol=1e-14)


def test_radial_roots_eigenvalues():
    built = build_matrix(MatrixSpec("radial_roots", m=3, ell=2))
    assert built.n == 18 and built.normal
    ref = [np.sqrt(q / 3) * np.exp(2j * np.pi * p / 3) for q in (1, 2, 3) for p in (1, 2, 3)]
    got = np.unique(np.round(built.eigenvalues, 12))
    np.testing.assert_allclose(np.sort_complex(got), np.sort_complex(np.round(ref, 12)), atol=1e-12)
    assert all(np.sum(np.abs(built.eigenvalues - z) < 1e-12) == 2 for z in ref)


def test_roots_of_unity_hull():
    for n in (8, 64, 200):
        lam = build_matrix(MatrixSpec("roots_of_unity", n=n)).eigenvalues
        H = convex_hull(lam)
        assert len(H) == n
        assert diameter(H) == pytest.approx(2.0, abs=1e-12)


def test_explicit_normal_and_defective():
    assert build_matrix(MatrixSpec("explicit", entries=[[0, 1], [-1, 0]])).normal
    assert not build_matrix(MatrixSpec("explicit", entries=[[2, 1], [0, 3]])).normal
    with pytest.raises(SingularityError):
        build_matrix(MatrixSpec("explicit", entries=[[1, 1], [0, 1]]))


def test_correlated_operator_matches_dense(rng):
    built = build_matrix(MatrixSpec("correlated_eigvecs", m=4, ell=2))
    n = built.n
    dense = (built.V * built.eigenvalues) @ built.V_inv
    X = random_complex(rng, n, 3)
    np.testing.assert_allclose(built.A @ X, dense @ X, atol=1e-12)
    np.testing.assert_allclose(built.A.rmatvec(X[:, 0]), dense.conj().T @ X[:, 0], atol=1e-12)
    c = n ** (-2 / 3)
    np.testing.assert_allclose(built.V.conj().T @ built.V, (1 - c) * np.eye(n) + c, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(built.V, axis=0), 1.0, atol=1e-12)


# -- the ellipse example ----------------------------------------------------

def ellipse_kappa_oracle(gamma):
    """Minimize cond(V D) over positive column scalings numerically (n = 3 suffices)."""
    built = build_matrix(MatrixSpec("ellipse_rank1", n=3, gamma=gamma))
    V = built.V

    def f(logd):
        return np.log(np.linalg.cond(V * np.exp(np.concatenate([[0.0], logd]))))

    res = scipy.optimize.minimize(f, np.zeros(2), method="Nelder-Mead",
                                  options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return float(np.exp(res.fun))


@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0, 4.0])
def test_ellipse_kappa(gamma):
    # min over diagonalizing V is s + gamma/2 with s = sqrt(1 + gamma^2/4)
    s = np.sqrt(1 + gamma ** 2 / 4)
    assert ellipse_kappa_oracle(gamma) == pytest.approx(s + gamma / 2, rel=1e-8)
    built = build_matrix(MatrixSpec("ellipse_rank1", n=40, gamma=gamma))
    assert condition_number(built.V) == pytest.approx(s + gamma / 2, rel=1e-10)


def test_ellipse_kappa_gamma2_value():
    assert ellipse_kappa_oracle(2.0) == pytest.approx(1 + np.sqrt(2), rel=1e-8)


@pytest.mark.xfail(strict=True, reason="the minimal eigenvector condition number is 1 + sqrt(2)")
def test_ellipse_kappa_stated_value():
    assert ellipse_kappa_oracle(2.0) == pytest.approx(np.sqrt(2), rel=1e-6)


def test_ellipse_semi_axes_n200():
    gamma = 2.0
    A = build_matrix(MatrixSpec("ellipse_rank1", n=200, gamma=gamma)).A
    W = numerical_range(A, SweepConfig(2048))
    lo, hi = projected_interval(W, 0.0)
    lo2, hi2 = projected_interval(W, -np.pi / 2)
    assert abs((hi - lo) / 2 - np.sqrt(1 + gamma ** 2 / 4)) <= 1e-2
    assert abs((hi2 - lo2) / 2 - gamma / 2) <= 1e-2


def test_convtonum_examples(rng):
    U, _ = np.linalg.qr(random_complex(rng, 6, 6))
    assert convtonum_bound(U) <= 1e-12
    assert convtonum_bound(np.eye(2)) == 0.0
    with pytest.raises(SingularityError):
        convtonum_bound(np.ones((2, 2)))
    with pytest.raises(PreconditionError):
        convtonum_bound(np.eye(2), [2.0, 0.0])


def test_convtonum_bounds_ellipse_gap():
    built = build_matrix(MatrixSpec("ellipse_rank1", n=60, gamma=2.0))
    rb = numerical_range_bounds(built.dense(), SweepConfig(2048))
    measured = hausdorff(convex_hull(built.eigenvalues), rb.inner)
    assert convtonum_bound(built.V, built.eigenvalues) >= measured - rb.sweep_error


# -- beta-normality ---------------------------------------------------------

def beta_brute(V):
    n = V.shape[0]
    W = np.linalg.inv(V).conj().T
    best = -np.inf
    for j in range(n):
        for k in range(n):
            s = sum(abs(V[:, k].conj() @ V[:, l]) * (abs(W[:, l].conj() @ W[:, j])
                                                     + abs(W[:, k].conj() @ W[:, j]))
                    for l in range(n) if l != k)
            best = max(best, s / np.linalg.norm(W[:, j]) ** 2)
    return best


def test_beta_normality_matches_brute_force(rng):
    V = random_complex(rng, 7, 7)
    V /= np.linalg.norm(V, axis=0)
    rep = beta_normality(V)
    assert rep.max_ratio == pytest.approx(beta_brute(V), rel=1e-12)
    assert rep.beta_star == pytest.approx(-np.log(rep.max_ratio) / np.log(7))


def test_beta_unitary_is_inf(rng):
    U, _ = np.linalg.qr(random_complex(rng, 9, 9))
    rep = beta_normality(U)
    assert rep.beta_star == np.inf and rep.is_beta_normal


def test_beta_preconditions():
    with pytest.raises(PreconditionError):
        beta_normality(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(PreconditionError):
        beta_normality(2 * np.eye(3))
    with pytest.raises(PreconditionError):
        beta_normality(np.eye(3), V_inv=2 * np.eye(3))


def eigenangles_beta_oracle(n):
    c = n ** (-2 / 3)
    g = c / ((1 - c) * (1 - c + c * n))
    d = 1 / (1 - c) - g
    return -np.log((n - 1) * c * (g + d) / d) / np.log(n)


@pytest.mark.parametrize("m, ell", [(8, 4), (16, 4)])
def test_eigenangles_beta_star(m, ell):
    built = build_matrix(MatrixSpec("correlated_eigvecs", m=m, ell=ell))
    rep = beta_normality(built.V, built.V_inv)
    assert rep.beta_star == pytest.approx(eigenangles_beta_oracle(built.n), abs=1e-10)
    j, k = rep.worst_pair
    assert j == k
    assert rep.beta_star < 0 and not rep.is_beta_normal


def test_eigenangles_beta_frozen():
    assert eigenangles_beta_oracle(256) == pytest.approx(-0.33324, abs=5e-5)
    assert eigenangles_beta_oracle(1024) == pytest.approx(-0.33332, abs=5e-5)


@pytest.mark.xfail(strict=True, reason="the j = k terms give beta_star close to -1/3 at every n")
def test_eigenangles_stated_beta_positive():
    built = build_matrix(MatrixSpec("correlated_eigvecs", m=8, ell=4))
    assert beta_normality(built.V, built.V_inv).beta_star > 0


def test_near_orthonormal_basis_is_beta_normal():
    V, V_inv = near_orthonormal_basis(400, 1e-5, make_rng(3))
    rep = beta_normality(V, V_inv)
    assert rep.beta_star > beta_threshold(400)


def test_beta_threshold_value():
    n = 1000
    assert beta_threshold(n) == pytest.approx(2 * np.log(2 * np.log(np.e * n)) / np.log(n))
