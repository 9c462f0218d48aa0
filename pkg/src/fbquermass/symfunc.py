"""Elementary symmetric functions of principal curvatures.

All routines accept curvature arrays of shape ``(..., n)`` and broadcast over
the leading axes, so a whole curvature field is evaluated in one call.
"""
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import NotStrictlyConvex

# sigma_{n-1} below this is treated as a degenerate (non-convex) input
DEGENERATE_SIGMA = 1e-300


def sigma_all(kappa):
    """Return sigma_0 ... sigma_n along the last axis.

    Built by adding one curvature at a time to the product
    prod_i (1 + kappa_i t), which avoids subset enumeration.
    """
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    sig = np.zeros(kappa.shape[:-1] + (n + 1,))
    sig[..., 0] = 1.0
    for i in range(n):
        ki = kappa[..., i]
        for k in range(i + 1, 0, -1):
            sig[..., k] = sig[..., k] + ki * sig[..., k - 1]
    return sig


def normalized(sigma):
    """H_k = sigma_k / C(n, k) for a sigma array of length n + 1."""
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[-1] - 1
    binoms = np.array([comb(n, k) for k in range(n + 1)], dtype=float)
    return sigma / binoms


def _remove(kappa, i):
    return np.delete(np.asarray(kappa, dtype=float), i, axis=-1)


def sigma_partial(kappa, k, i):
    """d sigma_k / d kappa_i, i.e. sigma_{k-1} of the curvatures without kappa_i.

    ``i`` is a zero-based position in ``kappa``. ``k`` may range over
    0 ... n + 1 so the recursion sigma_k = sigma_k^i kappa_i + sigma_{k+1}^i
    can be written for every k; the end cases are identically zero.
    """
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    if not 0 <= i < n:
        raise IndexError(f"curvature index {i} outside 0..{n - 1}")
    if not 0 <= k <= n + 1:
        raise IndexError(f"degree {k} outside 0..{n + 1}")
    if k == 0 or k == n + 1:
        return np.zeros(kappa.shape[:-1])
    return sigma_all(_remove(kappa, i))[..., k - 1]


def leave_one_out_sigma(kappa):
    """Array s[..., i, j] = sigma_j of kappa with entry i removed, j = 0 ... n-1."""
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    idx = np.array([[j for j in range(n) if j != i] for i in range(n)], dtype=int)
    if n == 1:
        return np.ones(kappa.shape + (1,))
    return sigma_all(kappa[..., idx])


def sigma_partials(kappa, k):
    """All partials sigma_k^i stacked along the last axis."""
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    if not 0 <= k <= n + 1:
        raise IndexError(f"degree {k} outside 0..{n + 1}")
    if k == 0 or k == n + 1:
        return np.zeros(kappa.shape)
    return leave_one_out_sigma(kappa)[..., k - 1]


def _check_convex(kappa, sigma):
    n = kappa.shape[-1]
    if np.any(kappa <= 0.0) or np.any(sigma[..., n - 1] < DEGENERATE_SIGMA):
        raise NotStrictlyConvex("not strictly convex: some principal curvature is <= 0")


def curvature_function_F(kappa):
    """F = n sigma_n / sigma_{n-1} and its gradient with respect to kappa.

    Returns ``(F, F_grad)``; ``F_grad[..., i] = dF/dkappa_i``.
    """
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    sigma = sigma_all(kappa)
    _check_convex(kappa, sigma)
    s_n, s_nm1 = sigma[..., n], sigma[..., n - 1]
    F = n * s_n / s_nm1
    loo = leave_one_out_sigma(kappa)
    d_n = loo[..., n - 1]
    d_nm1 = loo[..., n - 2] if n >= 2 else np.zeros(kappa.shape)
    grad = n * d_n / s_nm1[..., None] - n * (s_n / s_nm1**2)[..., None] * d_nm1
    return F, grad


def newton_maclaurin_margin(kappa, k):
    """H_k^2 - H_{k-1} H_{k+1}; nonnegative for positive curvatures.

    Valid for 1 <= k <= n - 1, where it vanishes exactly at umbilic points.
    """
    kappa = np.asarray(kappa, dtype=float)
    n = kappa.shape[-1]
    if not 1 <= k <= n - 1:
        raise IndexError(f"margin index {k} outside 1..{n - 1}")
    H = normalized(sigma_all(kappa))
    return H[..., k] ** 2 - H[..., k - 1] * H[..., k + 1]


@dataclass
class SymmetricFunctionValues:
    sigma: np.ndarray
    normalized: np.ndarray
    F: np.ndarray
    F_grad: np.ndarray


def symmetric_values(kappa):
    """Bundle sigma, H, F and F_grad for strictly convex curvatures."""
    sigma = sigma_all(kappa)
    F, grad = curvature_function_F(kappa)
    return SymmetricFunctionValues(sigma, normalized(sigma), F, grad)
