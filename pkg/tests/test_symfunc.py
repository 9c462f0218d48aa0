from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fbquermass.errors import NotStrictlyConvex
from fbquermass.symfunc import (curvature_function_F, leave_one_out_sigma,
                                newton_maclaurin_margin, normalized, sigma_all,
                                sigma_partial, sigma_partials)


def brute_sigma(kappa, k):
    return sum(np.prod(c) for c in combinations(kappa, k)) if k else 1.0


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_sigma_matches_subset_sums(n):
    rng = np.random.default_rng(n)
    kappa = rng.normal(size=n)
    s = sigma_all(kappa)
    for k in range(n + 1):
        assert s[k] == pytest.approx(brute_sigma(kappa, k), rel=1e-12, abs=1e-14)


def test_sigma_batched_shapes():
    kappa = np.random.default_rng(0).uniform(0.1, 2, size=(7, 3, 4))
    s = sigma_all(kappa)
    assert s.shape == (7, 3, 5)
    assert np.allclose(s[..., 4], np.prod(kappa, axis=-1))


def test_normalized_at_umbilic_point():
    H = normalized(sigma_all(np.full(4, 1.7)))
    assert np.allclose(H, 1.7 ** np.arange(5))


def test_partial_derivative_matches_finite_difference():
    rng = np.random.default_rng(3)
    kappa = rng.uniform(0.3, 2.0, size=4)
    h = 1e-6
    for k in range(1, 5):
        for i in range(4):
            dk = np.zeros(4)
            dk[i] = h
            fd = (sigma_all(kappa + dk)[k] - sigma_all(kappa - dk)[k]) / (2 * h)
            assert sigma_partial(kappa, k, i) == pytest.approx(fd, rel=1e-8)
        assert np.allclose(sigma_partials(kappa, k), [sigma_partial(kappa, k, i) for i in range(4)])


def test_partial_edge_indices():
    kappa = np.array([1.0, 2.0, 3.0])
    assert sigma_partial(kappa, 0, 1) == 0.0
    assert sigma_partial(kappa, 4, 1) == 0.0
    assert sigma_partial(kappa, 1, 2) == 1.0


def test_leave_one_out():
    kappa = np.array([0.5, 1.5, 2.5])
    loo = leave_one_out_sigma(kappa)
    for i in range(3):
        rest = np.delete(kappa, i)
        assert np.allclose(loo[i], sigma_all(rest))


def test_F_gradient_matches_finite_difference():
    rng = np.random.default_rng(11)
    kappa = rng.uniform(0.2, 3.0, size=3)
    F, grad = curvature_function_F(kappa)
    h = 1e-6
    for i in range(3):
        dk = np.zeros(3)
        dk[i] = h
        fd = (curvature_function_F(kappa + dk)[0] - curvature_function_F(kappa - dk)[0]) / (2 * h)
        assert grad[i] == pytest.approx(fd, rel=1e-7)


def test_F_normalised_on_unit_sphere():
    for n in range(1, 6):
        F, grad = curvature_function_F(np.ones(n))
        assert F == pytest.approx(1.0)
        assert np.allclose(grad, 1.0 / n)


@pytest.mark.parametrize("kappa", [[1.0, 0.0], [1.0, -0.5], [0.0, 0.0, 1.0]])
def test_F_rejects_nonconvex(kappa):
    with pytest.raises(NotStrictlyConvex):
        curvature_function_F(np.array(kappa))


def test_margin_index_range():
    with pytest.raises(IndexError):
        newton_maclaurin_margin(np.ones(3), 0)
    with pytest.raises(IndexError):
        newton_maclaurin_margin(np.ones(3), 3)
    assert newton_maclaurin_margin(np.ones(3) * 2, 1) == pytest.approx(0.0, abs=1e-15)


def test_sum_of_partials_identity():
    # sum_i d sigma_k / d kappa_i = (n - k + 1) sigma_{k-1}
    kappa = np.random.default_rng(5).uniform(0.1, 2, size=(50, 5))
    s = sigma_all(kappa)
    for k in range(1, 6):
        assert np.allclose(sigma_partials(kappa, k).sum(-1), (5 - k + 1) * s[..., k - 1], rtol=1e-12)



@settings(max_examples=200, deadline=None)
@given(arrays(float, st.integers(2, 6), elements=st.floats(0.01, 100.0)))
def test_F_between_min_curvature_and_mean(kappa):
    # harmonic mean lies between min and arithmetic mean
    F, _ = curvature_function_F(kappa)
    assert kappa.min() * (1 - 1e-12) <= F <= kappa.mean() * (1 + 1e-12)
    for k in range(1, kappa.size - 1):
        assert newton_maclaurin_margin(kappa, k) >= -1e-12 * normalized(sigma_all(kappa))[k] ** 2
