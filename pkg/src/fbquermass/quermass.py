"""Free-boundary quermassintegrals W_0 ... W_{n+1} and their checks."""
import json
from dataclasses import dataclass
from math import gamma, pi

import numpy as np
from scipy.integrate import quad, simpson

from .errors import DomainError
from .surface import AxisymmetricSurface, geometry_eval


def sphere_area(k):
    """omega_k, the area of the unit k-sphere."""
    return 2.0 * pi ** ((k + 1) / 2.0) / gamma((k + 1) / 2.0)


def sin_power_integral(m, upper):
    """int_0^upper sin^m t dt."""
    val, _ = quad(lambda t: np.sin(t) ** m, 0.0, upper, epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def integrate(fld, values):
    """Surface integral of node values over the rotationally symmetric surface.

    Composite Simpson in r with the weight omega_{n-1} rho^{n-1} |gamma'(r)|.
    """
    weight = sphere_area(fld.n - 1) * fld.rho ** (fld.n - 1) * fld.ds
    return float(simpson(np.asarray(values, dtype=float) * weight, x=fld.r))


def boundary_body_quermass(n, tau):
    """W_0^{S^n} ... W_n^{S^n} of the geodesic ball of radius tau in S^n.

    Boundary curvatures are all cot(tau); the top entry equals omega_{n-1}/n.
    """
    if not 0.0 < tau <= pi / 2 + 1e-12:
        raise DomainError("boundary geodesic radius must lie in (0, pi/2]")
    tau = min(tau, pi / 2)
    om = sphere_area(n - 1)
    volume = om * sin_power_integral(n - 1, tau)
    boundary = om * np.sin(tau) ** (n - 1)
    cot = np.cos(tau) / np.sin(tau)
    W = np.zeros(n + 1)
    W[0] = volume
    if n >= 1:
        W[1] = boundary / n
    for k in range(2, n + 1):
        W[k] = boundary * cot ** (k - 1) / n + (k - 1) / (n - k + 2) * W[k - 2]
    return W


def assemble_quermass(n, area, curvature_integrals, boundaryW, enclosed_volume):
    """W_k from |Sigma|, int H_{k-1} (k >= 2) and the boundary body values."""
    W = np.zeros(n + 2)
    W[0] = enclosed_volume
    W[1] = area / (n + 1)
    for k in range(2, n + 2):
        W[k] = (curvature_integrals[k - 1] + (k - 1) / (n - k + 2) * boundaryW[k - 2]) / (n + 1)
    return W


@dataclass
class QuermassVector:
    n: int
    W: np.ndarray
    boundaryW: np.ndarray
    area: float
    enclosed_volume: float
    boundary_cap_area: float
    boundary_length: float
    mean_integrals: np.ndarray  # int_Sigma H_k, k = 0 ... n
    convex: bool

    def to_dict(self):
        return {
            "n": self.n,
            "W": self.W.tolist(),
            "boundaryW": self.boundaryW.tolist(),
            "area": self.area,
            "enclosed_volume": self.enclosed_volume,
            "boundary_cap_area": self.boundary_cap_area,
            "boundary_length": self.boundary_length,
            "mean_integrals": self.mean_integrals.tolist(),
            "convex": self.convex,
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(d["n"], np.array(d["W"]), np.array(d["boundaryW"]), d["area"],
                   d["enclosed_volume"], d["boundary_cap_area"], d["boundary_length"],
                   np.array(d["mean_integrals"]), d["convex"])


def boundary_radius(fld):
    """Geodesic radius tau of the boundary body around e."""
    return float(np.arccos(np.clip(fld.height[-1], -1.0, 1.0)))


def quermass_vector(surface):
    """Quermassintegrals of a surface (or of an already evaluated field)."""
    fld = geometry_eval(surface) if isinstance(surface, AxisymmetricSurface) else surface
    n = fld.n
    tau = boundary_radius(fld)
    bW = boundary_body_quermass(n, tau)
    area = integrate(fld, np.ones_like(fld.r))
    means = np.array([integrate(fld, fld.H_k(k)) for k in range(n + 1)])
    # <x, nu> in the meridian plane; nu is the outward normal of the enclosed body
    x_dot_nu = fld.rho * fld.nu_meridian[:, 0] + fld.height * fld.nu_meridian[:, 1]
    volume = (integrate(fld, x_dot_nu) + bW[0]) / (n + 1)
    W = assemble_quermass(n, area, means, bW, volume)
    length = sphere_area(n - 1) * fld.rho[-1] ** (n - 1)
    return QuermassVector(n, W, bW, area, volume, float(bW[0]), float(length), means,
                          fld.is_strictly_convex)


@dataclass
class GaussBonnetReport:
    value: float  # (n + 1) W_{n+1}
    target: float  # omega_n / 2
    residual: float
    expanded: float = None
    expanded_residual: float = None


def gauss_bonnet_check(surface):
    """Compare (n + 1) W_{n+1} with omega_n / 2 for a disk-type surface.

    For even n the topological sum int H_n + sum_j c_j int_{dSigma} H_{n-2-2j}
    with c_j = prod_{i<=j} (n - 2i) / (2i + 1) is evaluated as well.
    """
    fld = geometry_eval(surface) if isinstance(surface, AxisymmetricSurface) else surface
    qv = quermass_vector(fld)
    n = fld.n
    target = sphere_area(n) / 2.0
    value = (n + 1) * qv.W[n + 1]
    report = GaussBonnetReport(value, target, abs(value - target))
    if n % 2 == 0:
        cot = fld.height[-1] / fld.rho[-1]
        total = qv.mean_integrals[n]
        c = 1.0
        for j in range(n // 2):
            if j:
                c *= (n - 2 * j) / (2 * j + 1)
            total += c * qv.boundary_length * cot ** (n - 2 - 2 * j)
        report.expanded = float(total)
        report.expanded_residual = abs(total - target)
    return report


def normal_to_graph_speed(fld, f):
    """Graph velocity du/dt producing normal speed f (exact for any chart)."""
    return np.asarray(f, dtype=float) / fld.lam_normal


def variation_check(surface, bump, h=1e-4):
    """Centered-difference check of dW_k/dt = (n+1-k)/(n+1) int H_k f.

    ``bump`` is sampled on the grid as a graph velocity g with g'(0) = g'(1) = 0,
    which keeps the perturbed family free-boundary; the induced normal speed is
    f = <d phi/d lam, nu> g. Returns (relative errors, finite differences,
    formula values) for k = 0 ... n+1. The k = n+1 entry is the derivative
    divided by W_{n+1}, since the formula value is zero.
    """
    g = np.asarray(bump(surface.r) if callable(bump) else bump, dtype=float)
    fld = geometry_eval(surface)
    n = surface.n
    f = fld.lam_normal * g
    up = surface.with_u(surface.u + h * g)
    down = surface.with_u(surface.u - h * g)
    fd = (quermass_vector(up).W - quermass_vector(down).W) / (2.0 * h)
    formula = np.array([(n + 1 - k) / (n + 1) * integrate(fld, fld.H_k(k) * f)
                        for k in range(n + 2)])
    scale = np.maximum(np.abs(formula), 1e-300)
    err = np.abs(fd - formula) / scale
    err[n + 1] = abs(fd[n + 1]) / quermass_vector(fld).W[n + 1]
    if not np.any(g):
        err[:] = 0.0
    return err, fd, formula
