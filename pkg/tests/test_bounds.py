import math

import pytest

from krylov_range.errors import DomainError
from krylov_range.harness.bounds import (THEOREMS, krylov_dim, required_params, theorem_bound,
                                         theorem_probability)


def test_thm_main_example():
    val = theorem_bound("thm_main", n=100, m=60, alpha=1, diam=1)
    assert val == pytest.approx(18 * math.log(100) / 60)
    assert val == pytest.approx(1.38155, abs=1e-5)


def test_circle_upper_example():
    val = theorem_bound("thm_circle_upper", n=100, m=30, alpha=1)
    assert val == pytest.approx(9 * math.log(100) ** 2 / (16 * 900), rel=1e-14)
    # the rounded figure 0.013256 agrees to 1e-4 relative; the exact value is 0.0132547...
    assert val == pytest.approx(0.013256, rel=1e-4)
    assert val == pytest.approx(0.0132547, abs=1e-7)


def test_nonnormal_kappa_one_collapse():
    for n, m, a in [(100, 10, 1.0), (5000, 37, 0.5)]:
        val = theorem_bound("thm_nonnormal", n=n, m=m, alpha=a, kappa=1.0, diam=1.0)
        assert val == pytest.approx(6 * math.log(n ** (2 + a)) / m, rel=1e-12)
        assert val == pytest.approx(theorem_bound("thm_main", n=n, m=m, alpha=a, diam=1.0), rel=1e-12)
    big = theorem_bound("thm_nonnormal", n=100, m=10, alpha=1, kappa=2.0, diam=1.0)
    assert big >= 4 * 2 * 1


def test_lemma_single_eig():
    val = theorem_bound("lemma_single_eig", m=12, b_norm=1.0, b_phi=0.1, diam=2.0)
    assert val == pytest.approx(6 / 12 * math.log(math.e * 12 / (6 * 0.01)) * 2)
    assert theorem_bound("lemma_single_eig", m=12, b_norm=1.0, b_phi=0.0, diam=1.0) == math.inf


def test_errsmall_and_eigenhull():
    n = 10 ** 8
    e = 2 * math.log(math.e * n) / n ** 0.5
    val = theorem_bound("cor_errsmall", n=n, m=10, beta=1.0, alpha_norm=1.0, alpha_k=0.5, diam=1.0)
    head = 6 / 10 * math.log(math.e * 10 / (6 * 0.25))
    assert val == pytest.approx((head + e) / (1 - e))
    # a vacuous normalization gives inf
    assert theorem_bound("cor_errsmall", n=100, m=10, beta=0.1, alpha_norm=1.0, alpha_k=0.5,
                         diam=1.0) == math.inf
    hull = theorem_bound("thm_eigenhull", n=n, m=10, alpha=1, beta=1.0, gamma=0.2, kappa=1.5, diam=1.0)
    assert math.isfinite(hull) and hull > 0
    with pytest.raises(DomainError):
        theorem_bound("thm_eigenhull", n=n, m=10, alpha=1, beta=0.3, gamma=0.2, kappa=1.5, diam=1.0)


def test_lower_bounds():
    assert theorem_bound("thm_norm_lower", m=10, diam=2.0) == pytest.approx(2 / 600)
    assert theorem_bound("thm_circle_lower", m=10) == pytest.approx(0.02)


def test_missing_and_unknown():
    with pytest.raises(DomainError):
        theorem_bound("thm_main", n=100, m=5, diam=1)
    with pytest.raises(DomainError):
        theorem_bound("thm_nine", n=100)
    with pytest.raises(DomainError):
        theorem_bound("thm_main", n=100, m=0, alpha=1, diam=1)
    with pytest.raises(DomainError):
        theorem_bound("thm_nonnormal", n=100, m=5, alpha=1, kappa=0.5, diam=1)
    for name in THEOREMS:
        assert len(required_params(name)) >= 1


def test_probabilities():
    assert theorem_probability("thm_main", n=500, m=4, alpha=1) == pytest.approx(1 - 5 * 4 / 2000)
    assert theorem_probability("thm_circle_upper", n=2000, m=3, alpha=1) == pytest.approx(
        1 - 64 * math.e ** 2 * 9 / 2000)
    assert theorem_probability("lemma_single_eig") == 1.0
    assert theorem_probability("thm_norm_lower", m=8) == pytest.approx(0.75)
    assert theorem_probability("thm_circle_lower", k=8) == pytest.approx(0.75)
    n, b = 1024, 0.5
    assert theorem_probability("cor_errsmall", n=n, beta=b) == pytest.approx(
        1 - (math.e * n ** (-b / 2) + 2 / math.sqrt(n) + 4 * n ** -0.25))
    with pytest.raises(DomainError):
        theorem_probability("thm_main", n=500)


def test_krylov_dims():
    assert krylov_dim("thm_main", 4) == 25
    assert krylov_dim("thm_circle_upper", 4) == 9
    assert krylov_dim("thm_circle_lower", 4) == 4
