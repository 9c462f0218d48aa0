"""Axisymmetric free-boundary hypersurfaces as graphs in Moebius coordinates.

A surface is stored as samples u(r_j) of a radial graph over the unit n-disk,
pushed into the upper half-ball by the chart

    phi(z, lam) = [4 lam z + (1 + |z|^2)(lam^2 - 1) e] / [(1 + lam)^2 + (1 - lam)^2 |z|^2].

Level sets lam = const are exactly the spherical caps C_R(e), so a cap is the
constant graph u = cap_lambda(R) and the flat equatorial disk is u = 1. The
Neumann condition u'(1) = 0 is equivalent to meeting the unit sphere
orthogonally. Geometry is computed on the meridian half-plane (rho, h), with
rho the distance to the axis and h = <x, e>.
"""
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateProfile, DomainError, GenerationFailed, NotStrictlyConvex
from .symfunc import curvature_function_F, normalized, sigma_all

_TOL = 1e-12


def default_axis(n):
    e = np.zeros(n + 1)
    e[-1] = 1.0
    return e


def complement_basis(e):
    """Orthonormal basis (as columns) of the hyperplane orthogonal to e."""
    e = np.asarray(e, dtype=float)
    m = e.size
    q, _ = np.linalg.qr(np.column_stack([e, np.eye(m)]))
    basis = q[:, 1:m]
    # QR leaves the first column as +-e; the rest spans its complement
    return basis


@dataclass(frozen=True)
class MoebiusChart:
    e: np.ndarray
    n: int

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        if e.shape != (self.n + 1,):
            raise ValueError(f"axis must have {self.n + 1} components")
        if abs(np.linalg.norm(e) - 1.0) > 1e-12:
            raise ValueError("axis must be a unit vector")
        object.__setattr__(self, "e", e)

    @cached_property
    def basis(self):
        return complement_basis(self.e)


def _check_domain(z2, lam):
    if np.any(z2 > 1.0 + _TOL) or np.any(lam < 1.0 - _TOL):
        raise DomainError("chart domain is |z| <= 1, lambda >= 1")


def moebius_map(chart, z, lam):
    """Image of (z, lam) in R^{n+1}; z holds coordinates in ``chart.basis``."""
    z = np.asarray(z, dtype=float)
    lam = np.asarray(lam, dtype=float)
    z2 = np.sum(z * z, axis=-1)
    _check_domain(z2, lam)
    D = (1.0 + lam) ** 2 + (1.0 - lam) ** 2 * z2
    num = (4.0 * lam)[..., None] * (z @ chart.basis.T) \
        + ((1.0 + z2) * (lam**2 - 1.0))[..., None] * chart.e
    return num / D[..., None]


def conformal_factor(chart, z, lam):
    """e^psi = 4 lam / D.

    The pullback of the Euclidean metric is
    e^{2 psi} (|dz|^2 + ((1 + |z|^2) / (2 lam))^2 dlam^2), the flat metric
    written in polar form; e^psi is the stretch of every z-direction.
    """
    z = np.asarray(z, dtype=float)
    lam = np.asarray(lam, dtype=float)
    z2 = np.sum(z * z, axis=-1)
    _check_domain(z2, lam)
    return 4.0 * lam / ((1.0 + lam) ** 2 + (1.0 - lam) ** 2 * z2)


def chart_metric_weights(z, lam):
    """Diagonal of the reference metric that the chart scales conformally."""
    z = np.asarray(z, dtype=float)
    lam = np.asarray(lam, dtype=float)
    z2 = np.sum(z * z, axis=-1)
    n = z.shape[-1]
    w = np.ones(z.shape[:-1] + (n + 1,))
    w[..., n] = ((1.0 + z2) / (2.0 * lam)) ** 2
    return w


def conformal_killing(x, e):
    """X_e(x) = <x, e> x - (|x|^2 + 1) e / 2."""
    x = np.asarray(x, dtype=float)
    e = np.asarray(e, dtype=float)
    xe = x @ e
    return xe[..., None] * x - 0.5 * (np.sum(x * x, axis=-1) + 1.0)[..., None] * e


def cap_lambda(R):
    """Graph height of the cap C_R; infinite radius gives the flat disk u = 1."""
    R = np.asarray(R, dtype=float)
    w = 1.0 / (np.sqrt(R * R + 1.0) + R)
    return (1.0 + w) / (1.0 - w)


def cap_radius(lam):
    """Inverse of :func:`cap_lambda`; returns inf for lam = 1."""
    lam = np.asarray(lam, dtype=float)
    w = (lam - 1.0) / (lam + 1.0)
    with np.errstate(divide="ignore"):
        return (1.0 - w * w) / (2.0 * w)


def _meridian_jet(r, lam):
    """Values, first and second partials of (rho, h) in (r, lam).

    Returns arrays of shape (2, ...) for g, g_r, g_l, g_rr, g_rl, g_ll.
    """
    one = np.ones_like(r)
    D = (1 + lam) ** 2 + (1 - lam) ** 2 * r**2
    D_r = 2 * (1 - lam) ** 2 * r
    D_l = 2 * (1 + lam) - 2 * (1 - lam) * r**2
    D_rr = 2 * (1 - lam) ** 2 * one
    D_rl = -4 * (1 - lam) * r
    D_ll = 2 + 2 * r**2
    N = np.array([4 * lam * r, (1 + r**2) * (lam**2 - 1)])
    N_r = np.array([4 * lam * one, 2 * r * (lam**2 - 1)])
    N_l = np.array([4 * r, 2 * lam * (1 + r**2)])
    N_rr = np.array([0 * one, 2 * (lam**2 - 1)])
    N_rl = np.array([4 * one, 4 * r * lam])
    N_ll = np.array([0 * one, 2 * (1 + r**2)])
    g = N / D
    g_r = (N_r - g * D_r) / D
    g_l = (N_l - g * D_l) / D
    g_rr = (N_rr - 2 * g_r * D_r - g * D_rr) / D
    g_rl = (N_rl - g_r * D_l - g_l * D_r - g * D_rl) / D
    g_ll = (N_ll - 2 * g_l * D_l - g * D_ll) / D
    return g, g_r, g_l, g_rr, g_rl, g_ll


def radial_derivatives(u):
    """First and second r-derivatives of samples on the uniform grid of [0, 1].

    Fourth-order central differences in the interior with even reflection
    across the axis; second-order stencils next to and at r = 1.
    """
    u = np.asarray(u, dtype=float)
    M = u.size - 1
    h = 1.0 / M
    ext = np.concatenate([u[2:0:-1], u])  # ghosts u_{-2}, u_{-1}
    d1 = np.empty_like(u)
    d2 = np.empty_like(u)
    j = np.arange(0, M - 1)
    c = j + 2
    d1[j] = (-ext[c + 2] + 8 * ext[c + 1] - 8 * ext[c - 1] + ext[c - 2]) / (12 * h)
    d2[j] = (-ext[c + 2] + 16 * ext[c + 1] - 30 * ext[c] + 16 * ext[c - 1] - ext[c - 2]) / (12 * h * h)
    d1[0] = 0.0
    d1[M - 1] = (u[M] - u[M - 2]) / (2 * h)
    d2[M - 1] = (u[M] - 2 * u[M - 1] + u[M - 2]) / (h * h)
    d1[M] = (3 * u[M] - 4 * u[M - 1] + u[M - 2]) / (2 * h)
    d2[M] = (2 * u[M] - 5 * u[M - 1] + 4 * u[M - 2] - u[M - 3]) / (h * h)
    return d1, d2


@dataclass
class AxisymmetricSurface:
    n: int
    u: np.ndarray
    e: np.ndarray = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be >= 1")
        self.u = np.asarray(self.u, dtype=float)
        self.e = default_axis(self.n) if self.e is None else np.asarray(self.e, dtype=float)
        if self.e.shape != (self.n + 1,) or abs(np.linalg.norm(self.e) - 1.0) > 1e-12:
            raise ValueError(f"axis must be a unit vector with {self.n + 1} components")
        if self.u.ndim != 1 or self.u.size < 7 or (self.u.size - 1) % 2:
            raise ValueError("need an even number M >= 6 of radial intervals")
        if not np.all(np.isfinite(self.u)):
            raise ValueError("graph values must be finite")
        if np.any(self.u < 1.0 - _TOL):
            raise DomainError("graph values must satisfy u >= 1")

    @property
    def M(self):
        return self.u.size - 1

    @property
    def r(self):
        return np.linspace(0.0, 1.0, self.M + 1)

    @property
    def chart(self):
        return MoebiusChart(self.e, self.n)

    def with_u(self, u):
        return AxisymmetricSurface(self.n, u, self.e)

    def to_dict(self):
        return {"n": self.n, "e": self.e.tolist(), "M": self.M, "u": self.u.tolist()}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {"n", "e", "M", "u"}
        if unknown:
            raise ValueError(f"unknown surface fields: {sorted(unknown)}")
        for key in ("n", "M", "u"):
            if key not in data:
                raise ValueError(f"surface field {key!r} is missing")
        if len(data["u"]) != data["M"] + 1:
            raise ValueError(f"u has {len(data['u'])} values, expected M + 1 = {data['M'] + 1}")
        return cls(int(data["n"]), np.array(data["u"], dtype=float), data.get("e"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def cap_surface(n, R, M=512, e=None):
    """The cap C_R encoded as a constant graph (R = inf gives the flat disk)."""
    return AxisymmetricSurface(n, np.full(M + 1, float(cap_lambda(R))), e)


def flat_disk(n, M=512, e=None):
    return AxisymmetricSurface(n, np.ones(M + 1), e)


@dataclass
class CurvatureField:
    """Per-node geometry of a surface; arrays are indexed by radial node."""

    n: int
    e: np.ndarray
    r: np.ndarray
    du: np.ndarray
    rho: np.ndarray
    height: np.ndarray
    ds: np.ndarray  # arclength per unit r along the profile
    nu_meridian: np.ndarray  # (nu_rho, nu_h)
    kappa: np.ndarray
    support_X: np.ndarray
    lam_normal: np.ndarray  # <d phi / d lam, nu>
    sigma: np.ndarray = field(init=False)
    H: np.ndarray = field(init=False)

    def __post_init__(self):
        self.sigma = sigma_all(self.kappa)
        self.H = normalized(self.sigma)

    @cached_property
    def _F(self):
        return curvature_function_F(self.kappa)

    @property
    def F(self):
        return self._F[0]

    @property
    def F_grad(self):
        return self._F[1]

    @property
    def is_strictly_convex(self):
        return bool(np.all(self.kappa > 0.0))

    @property
    def mean_curvature(self):
        return self.sigma[:, 1]

    @property
    def x(self):
        theta = complement_basis(self.e)[:, 0]
        return self.rho[:, None] * theta + self.height[:, None] * self.e

    @property
    def nu(self):
        theta = complement_basis(self.e)[:, 0]
        return self.nu_meridian[:, :1] * theta + self.nu_meridian[:, 1:] * self.e

    def sigma_k(self, k):
        if k > self.n:
            return np.zeros_like(self.r)
        return self.sigma[:, k]

    def H_k(self, k):
        if k > self.n:
            return np.zeros_like(self.r)
        return self.H[:, k]

    def boundary_derivative(self, values):
        """Derivative along the outward conormal at r = 1 (one-sided, 2nd order)."""
        v = np.asarray(values, dtype=float)
        M = v.size - 1
        dv = (3 * v[M] - 4 * v[M - 1] + v[M - 2]) * M / 2.0
        return dv / self.ds[M]


def geometry_eval(surface):
    """Positions, normals and principal curvatures along the profile."""
    n = surface.n
    r = surface.r
    u = surface.u
    du, d2u = radial_derivatives(u)
    g, g_r, g_l, g_rr, g_rl, g_ll = _meridian_jet(r, u)
    d1 = g_r + g_l * du
    d2 = g_rr + 2 * g_rl * du + g_ll * du**2 + g_l * d2u
    speed = np.hypot(d1[0], d1[1])
    steps = np.hypot(np.diff(g[0]), np.diff(g[1]))
    if np.any(speed < 1e-14) or np.any(steps < 1e-15):
        raise DegenerateProfile("degenerate profile: consecutive embedded nodes coincide")
    T = d1 / speed
    nu = np.array([T[1], -T[0]])
    k_profile = (d1[0] * d2[1] - d1[1] * d2[0]) / speed**3
    rho, height = g
    k_rot = np.empty_like(k_profile)
    k_rot[1:] = nu[0, 1:] / rho[1:]
    k_rot[0] = k_profile[0]
    kappa = np.column_stack([k_profile] + [k_rot] * (n - 1))
    X_rho = height * rho
    X_h = height**2 - 0.5 * (rho**2 + height**2 + 1.0)
    support = X_rho * nu[0] + X_h * nu[1]
    lam_normal = g_l[0] * nu[0] + g_l[1] * nu[1]
    return CurvatureField(n, surface.e, r, du, rho, height, speed, nu.T.copy(), kappa,
                          support, lam_normal)


def free_boundary_residual(surface, field_=None):
    """(| |x(1)| - 1 |, |<nu(1), x(1)>|) at the boundary node."""
    fld = geometry_eval(surface) if field_ is None else field_
    rho, h = fld.rho[-1], fld.height[-1]
    on_sphere = abs(np.hypot(rho, h) - 1.0)
    perpendicular = abs(fld.nu_meridian[-1, 0] * rho + fld.nu_meridian[-1, 1] * h)
    return float(on_sphere), float(perpendicular)


def umbilicity_deficit(fld, integrate):
    """sqrt(int |A - (H/n) g|^2 / int H^2 / n); zero exactly on caps and disks."""
    mean = fld.mean_curvature / fld.n
    trace_free = np.sum((fld.kappa - mean[:, None]) ** 2, axis=1)
    denom = integrate(fld, fld.n * mean**2)
    if denom <= 0.0:
        return 0.0
    return float(np.sqrt(integrate(fld, trace_free) / denom))


def random_convex_surface(seed, n=2, M=256, R_min=0.5, R_max=2.0, amplitude=0.2,
                          modes=4, max_tries=200, e=None):
    """Strictly convex surface strictly between the caps C_{R_min} and C_{R_max}.

    The graph is the midpoint cap plus a random cosine blend
    sum_m a_m cos(m pi r) scaled into the barrier band, so u'(0) = u'(1) = 0.
    Draws with a non-positive principal curvature anywhere are rejected.
    """
    if not 0.0 < R_min < R_max:
        raise ValueError("need 0 < R_min < R_max")
    if not 0.0 <= amplitude < 1.0:
        raise ValueError("amplitude must lie in [0, 1)")
    lo, hi = float(cap_lambda(R_max)), float(cap_lambda(R_min))
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    rng = np.random.default_rng(seed)
    r = np.linspace(0.0, 1.0, M + 1)
    m = np.arange(1, modes + 1)
    basis = np.cos(np.pi * np.outer(r, m))
    for _ in range(max_tries):
        coeffs = rng.standard_normal(modes) / m**2
        profile = basis @ coeffs / np.sum(np.abs(coeffs))
        surf = AxisymmetricSurface(n, mid + amplitude * half * profile, e)
        try:
            fld = geometry_eval(surf)
        except DegenerateProfile:
            continue
        if fld.kappa.min() > 0.0:
            return surf
    raise GenerationFailed(f"no strictly convex sample after {max_tries} draws (seed {seed})")


def require_convex(fld):
    if not fld.is_strictly_convex:
        j = int(np.argmin(fld.kappa.min(axis=1)))
        raise NotStrictlyConvex(
            f"not strictly convex: min principal curvature {fld.kappa.min():.3e} at r = {fld.r[j]:.4f}")
