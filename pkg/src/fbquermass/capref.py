"""Reference geometry of the static caps C_R(e) and the functions f_k(R)."""
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import MonotonicityViolation, OutOfRange
from .quermass import assemble_quermass, boundary_body_quermass, sphere_area

# validity bracket of the inversion; f_k is only tabulated on [R_LOW, R_HIGH]
R_LOW = 1e-3
R_HIGH = 1e3


def _angular(fn, alpha):
    val, _ = quad(fn, 0.0, alpha, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


@dataclass
class CapReference:
    n: int
    R: float
    d: float
    alpha: float
    tau: float
    boundary_height: float
    boundary_radius: float
    area: float
    meanint: np.ndarray  # int H_k over the cap, k = 0 ... n
    boundaryW: np.ndarray
    volume: float
    f: np.ndarray  # f_0 ... f_{n+1}


def cap_geometry(n, R):
    """Closed-form / quadrature geometry of C_R and f_k(R) = W_k of its body.

    Points of the cap are d e + R nu with nu = -cos t e + sin t theta,
    t in [0, alpha], cos alpha = R / d.
    """
    if not R > 0.0:
        raise ValueError("cap radius must be positive")
    R = float(R)
    d = np.sqrt(R * R + 1.0)
    alpha = np.arccos(R / d)
    tau = np.arccos(1.0 / d)
    om = sphere_area(n - 1)
    s = lambda t: np.sin(t) ** (n - 1)
    area = om * R**n * _angular(s, alpha)
    meanint = np.array([area / R**k for k in range(n + 1)])
    bW = boundary_body_quermass(n, tau)
    x_dot_nu = om * R**n * _angular(lambda t: (R - d * np.cos(t)) * s(t), alpha)
    volume = (x_dot_nu + bW[0]) / (n + 1)
    f = assemble_quermass(n, area, meanint, bW, volume)
    return CapReference(n, R, float(d), float(alpha), float(tau), float(1.0 / d), float(R / d),
                        float(area), meanint, bW, float(volume), f)


def cap_f(n, k, R):
    return float(cap_geometry(n, R).f[k])


def cap_variation_integral(n, k, R):
    """int_{C_R} sigma_k <X_e, nu>; on caps <X_e, nu> = R <x, e>."""
    d = np.sqrt(R * R + 1.0)
    alpha = np.arccos(R / d)
    om = sphere_area(n - 1)
    height = lambda t: d - R * np.cos(t)
    support = om * R**n * _angular(lambda t: R * height(t) * np.sin(t) ** (n - 1), alpha)
    return comb(n, k) / R**k * support


def cap_monotonicity_table(n, k, R_grid, strict=True):
    """f_k over an increasing grid of radii; raises on a monotonicity failure.

    For k <= n the values must strictly increase and the variation integral
    int sigma_k <X_e, nu> must be positive; f_{n+1} must be constant.
    """
    R_grid = np.asarray(R_grid, dtype=float)
    if R_grid.size == 0:
        raise ValueError("empty radius grid")
    if np.any(R_grid <= 0.0) or np.any(np.diff(R_grid) <= 0.0):
        raise ValueError("radius grid must be positive and strictly increasing")
    values = np.array([cap_f(n, k, R) for R in R_grid])
    if k <= n:
        if np.any(np.diff(values) <= 0.0):
            bad = int(np.argmin(np.diff(values)))
            raise MonotonicityViolation(
                f"f_{k} fails to increase between R = {R_grid[bad]} and {R_grid[bad + 1]}")
        if min(cap_variation_integral(n, k, R) for R in R_grid) <= 0.0:
            raise MonotonicityViolation(f"variation integral of f_{k} is not positive")
    elif strict:
        spread = np.ptp(values) / abs(values[0])
        if spread > 1e-10:
            raise MonotonicityViolation(f"f_{n + 1} is not constant (relative spread {spread:.2e})")
    return values


def cap_range(n, k):
    return cap_f(n, k, R_LOW), cap_f(n, k, R_HIGH)


def cap_invert(n, k, w):
    """Radius R with f_k(R) = w, for 0 <= k <= n."""
    if not 0 <= k <= n:
        raise OutOfRange(f"f_{k} is not invertible for n = {n}")
    lo_val, hi_val = cap_range(n, k)
    if not lo_val < w < hi_val:
        raise OutOfRange(f"W_{k} = {w!r} outside the cap range ({lo_val!r}, {hi_val!r})")
    target = lambda R: cap_f(n, k, R) - w
    # expanding bracket from R = 1, then a bracketed root solve
    a = b = 1.0
    fa = fb = target(1.0)
    while fa > 0.0:
        b, fb = a, fa
        a = max(a / 2.0, R_LOW)
        fa = target(a)
    while fb < 0.0:
        a, fa = b, fb
        b = min(b * 2.0, R_HIGH)
        fb = target(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    return brentq(target, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)


def compose(n, k, w):
    """f_n(f_k^{-1}(w))."""
    return cap_f(n, n, cap_invert(n, k, w))


def cap_speed(n, R, t):
    """Normal speed <x,e>/F - <X_e, nu> at the cap points with angle t, from closed forms.

    Works in the meridian plane spanned by e and one unit vector orthogonal to it;
    F = 1/R on C_R, so the speed vanishes identically.
    """
    t = np.asarray(t, dtype=float)
    d = np.sqrt(R * R + 1.0)
    nu = np.stack([np.sin(t), -np.cos(t)], axis=-1)  # (theta, e) components
    x = np.array([0.0, d]) + R * nu
    x_e = x[..., 1]
    X = x_e[..., None] * x - 0.5 * (np.sum(x * x, axis=-1) + 1.0)[..., None] * np.array([0.0, 1.0])
    return x_e * R - np.sum(X * nu, axis=-1)


def cap_table_csv(n, R_grid):
    """CSV text with columns R, f_0, ..., f_{n+1}; monotonicity is enforced."""
    cols = [cap_monotonicity_table(n, k, R_grid) for k in range(n + 2)]
    lines = ["R," + ",".join(f"f_{k}" for k in range(n + 2))]
    for i, R in enumerate(R_grid):
        lines.append(",".join(f"{v:.17g}" for v in [R] + [c[i] for c in cols]))
    return "\n".join(lines) + "\n"
