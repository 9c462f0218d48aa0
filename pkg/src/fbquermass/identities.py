"""Integral identities used as independent oracles on evaluated surfaces."""
from dataclasses import dataclass

import numpy as np

from .errors import NotStrictlyConvex
from .quermass import integrate
from .surface import AxisymmetricSurface, geometry_eval, require_convex

RESIDUAL_FLOOR = 1e-14


@dataclass
class IdentityReport:
    name: str
    lhs: float
    rhs: float
    residual: float
    tol: float
    passed: bool

    def row(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "residual": self.residual, "tol": self.tol, "passed": self.passed}


def relative_residual(lhs, rhs):
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), RESIDUAL_FLOOR)


def _field(surface):
    return geometry_eval(surface) if isinstance(surface, AxisymmetricSurface) else surface


def minkowski_residual(surface, k, tol=1e-4):
    """int sigma_{k-1} <x,e> against k/(n+1-k) int sigma_k <X_e, nu>."""
    fld = _field(surface)
    n = fld.n
    if not 1 <= k <= n:
        raise IndexError(f"Minkowski index {k} outside 1..{n}")
    lhs = integrate(fld, fld.sigma_k(k - 1) * fld.height)
    rhs = k / (n + 1 - k) * integrate(fld, fld.sigma_k(k) * fld.support_X)
    res = relative_residual(lhs, rhs)
    return IdentityReport(f"minkowski_{k}", lhs, rhs, res, tol, res <= tol)


def heintze_karcher(surface, tol=1e-8):
    """int (n <x,e> / H - <X_e, nu>), which is >= 0 with equality on caps.

    ``lhs`` holds the integral, ``rhs`` is 0 and ``residual`` the integral's
    absolute value; ``passed`` means the integral is >= -tol.
    """
    fld = _field(surface)
    H = fld.mean_curvature
    if np.any(H <= 0.0):
        raise NotStrictlyConvex("Heintze-Karcher integrand needs H > 0")
    val = integrate(fld, fld.n * fld.height / H - fld.support_X)
    return IdentityReport("heintze_karcher", val, 0.0, abs(val), tol, val >= -tol)


def newton_slack(surface, k):
    """int (sigma_k sigma_{n-1} / (n sigma_n) - (n-k+1)/k sigma_{k-1}) <x,e>.

    Nonnegative by Newton's inequality and zero for k = n or on caps.
    """
    fld = _field(surface)
    require_convex(fld)
    n = fld.n
    if not 1 <= k <= n:
        raise IndexError(f"slack index {k} outside 1..{n}")
    s = fld.sigma
    integrand = (s[:, k] * s[:, n - 1] / (n * s[:, n]) - (n - k + 1) / k * s[:, k - 1]) * fld.height
    return integrate(fld, integrand)
