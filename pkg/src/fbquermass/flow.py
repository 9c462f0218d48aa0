"""Locally constrained inverse curvature flow for axisymmetric free-boundary surfaces.

Each node moves with normal speed f = <x,e>/F - <X_e, nu>. In the Moebius
chart the graph evolves by du/dt = f / <d phi/d lam, nu>, with the end values
slaved to the neighbours so that u'(0) = u'(1) = 0 after every stage.
"""
import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .capref import cap_f
from .errors import HemisphereViolation, NotStrictlyConvex, StepTooLarge
from .quermass import quermass_vector
from .surface import cap_radius, geometry_eval, require_convex

log = logging.getLogger(__name__)

FLAT_DISK_R = 1e6


@dataclass
class FlowConfig:
    dt_initial: float = 1e-2  # upper bound on the step
    dt_safety: float = 0.5
    t_max: float = 50.0
    tol_cap: float = 1e-4
    tol_speed: float = 1e-6
    tol_Wn: float = 1e-3
    tol_monotone: float = 1e-6
    tol_minF: float = 1e-6
    max_du: float = 1e-2
    record_every: int = 10
    max_steps: int = 5_000_000
    method: str = "bdf"  # "bdf" (stiff, banded Jacobian) or "rk2" (explicit Heun)
    rtol: float = 1e-8
    atol: float = 1e-11

    def __post_init__(self):
        if self.method not in ("bdf", "rk2"):
            raise ValueError("method must be 'bdf' or 'rk2'")
        for name in ("dt_initial", "dt_safety", "t_max", "tol_cap", "tol_speed", "tol_Wn",
                     "max_du", "record_every", "max_steps"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.dt_safety >= 1.0:
            raise ValueError("dt_safety must be < 1")


def choose_axis(surface, fld=None):
    """Axis e of the axisymmetric surface; its boundary body must lie in <x,e> > 0."""
    fld = geometry_eval(surface) if fld is None else fld
    if not fld.height[-1] > 0.0:
        raise HemisphereViolation(
            f"boundary height {fld.height[-1]:.3e} <= 0: boundary body not in the open hemisphere")
    return surface.e.copy()


def speed_field(fld):
    """f = <x,e>/F - <X_e, nu> per node; zero on caps."""
    require_convex(fld)
    return fld.height / fld.F - fld.support_X


def orientation_sign(fld):
    """Sign s with du/dt = s f v_hat / |d phi/d lam| (outward motion lowers u)."""
    return np.sign(np.median(fld.lam_normal))


def graph_velocity(surface, fld=None):
    fld = geometry_eval(surface) if fld is None else fld
    return speed_field(fld) / fld.lam_normal, fld


def diffusion_coefficient(fld):
    """Coefficient of u'' in the linearised graph equation, per node."""
    return fld.height * fld.F_grad[:, 0] / (fld.F**2 * fld.ds**2)


def stable_dt(fld, safety):
    """Explicit step bound from the evolved (non-projected) nodes."""
    dr = fld.r[1] - fld.r[0]
    return safety * dr * dr / (2.0 * float(np.max(diffusion_coefficient(fld)[1:-1])))


def _project_ends(u):
    u[0] = (4.0 * u[1] - u[2]) / 3.0
    u[-1] = (4.0 * u[-2] - u[-3]) / 3.0
    return u


def step(surface, dt, max_du=np.inf, fld=None):
    """One Heun (explicit RK2) step of size dt.

    Raises StepTooLarge when the update exceeds ``max_du`` in sup norm and
    NotStrictlyConvex when a stage loses convexity.
    """
    k1, _ = graph_velocity(surface, fld)
    stage = _project_ends(surface.u + dt * k1)
    if np.max(np.abs(stage - surface.u)) > max_du:
        raise StepTooLarge(f"stage update {np.max(np.abs(stage - surface.u)):.3e} > {max_du}")
    k2, _ = graph_velocity(surface.with_u(stage))
    new = _project_ends(surface.u + 0.5 * dt * (k1 + k2))
    if np.max(np.abs(new - surface.u)) > max_du:
        raise StepTooLarge(f"update {np.max(np.abs(new - surface.u)):.3e} > {max_du}")
    return surface.with_u(new)


def _cap_distance(w, rho, h):
    """Signed distance from meridian points to the cap with parameter w = d - R.

    Written so that w -> 0 (the flat disk) stays finite.
    """
    num = w * (rho**2 + h**2 + 1.0) - h * (1.0 + w * w)
    den = np.sqrt((w * rho) ** 2 + (w * h - 0.5 * (1.0 + w * w)) ** 2) + 0.5 * (1.0 - w * w)
    return num / den


def detect_cap(surface, fld=None):
    """Least-squares cap fit of the embedded profile; returns (R, max distance).

    R is inf for a flat disk.
    """
    fld = geometry_eval(surface) if fld is None else fld
    rho, h = fld.rho, fld.height
    lam0 = float(np.mean(surface.u))
    w0 = (lam0 - 1.0) / (lam0 + 1.0)
    sol = least_squares(lambda p: _cap_distance(p[0], rho, h), [w0],
                        bounds=([0.0], [1.0 - 1e-12]), xtol=1e-15, ftol=1e-15, gtol=1e-15)
    w = float(sol.x[0])
    residual = float(np.max(np.abs(_cap_distance(w, rho, h))))
    R = np.inf if w == 0.0 else (1.0 - w * w) / (2.0 * w)
    return float(R), residual


def is_flat_limit(R):
    return R > FLAT_DISK_R


COLUMNS_TAIL = ["minF", "maxH", "min_height", "max_height", "max_nu_e", "bd_res_F",
                "bd_res_height", "bd_res_H", "R_inner", "R_outer", "cap_R", "cap_residual",
                "max_speed"]


@dataclass
class FlowTrace:
    n: int
    M: int
    times: list = field(default_factory=list)
    W: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    steps: int = 0
    converged: bool = False
    aborted: str = ""
    terminal_R: float = float("nan")
    terminal_residual: float = float("nan")
    checks: dict = field(default_factory=dict)

    @property
    def columns(self):
        return ["t"] + [f"W_{k}" for k in range(self.n + 2)] + COLUMNS_TAIL

    def rows(self):
        for t, W, diag in zip(self.times, self.W, self.diagnostics):
            yield [t] + list(W) + [diag[c] for c in COLUMNS_TAIL]

    def column(self, name):
        if name == "t":
            return np.array(self.times)
        if name.startswith("W_"):
            return np.array(self.W)[:, int(name[2:])]
        return np.array([d[name] for d in self.diagnostics])

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows():
            writer.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()

    def summary(self, seed=None):
        return {"seed": seed, "n": self.n, "M": self.M, "steps": self.steps,
                "t_final": self.times[-1] if self.times else 0.0,
                "converged": self.converged, "aborted": self.aborted,
                "terminal_R": self.terminal_R, "terminal_residual": self.terminal_residual,
                "checks": dict(self.checks)}

    @property
    def passed(self):
        return self.converged and all(self.checks.values())


def _record(trace, t, surface, fld, f):
    qv = quermass_vector(fld)
    R, res = detect_cap(surface, fld)
    F = fld.F
    H = fld.mean_curvature
    trace.times.append(float(t))
    trace.W.append(qv.W.copy())
    trace.diagnostics.append({
        "minF": float(F.min()),
        "maxH": float(H.max()),
        "min_height": float(fld.height.min()),
        "max_height": float(fld.height.max()),
        "max_nu_e": float(fld.nu_meridian[:, 1].max()),
        "bd_res_F": abs(fld.boundary_derivative(F)),
        "bd_res_height": abs(fld.boundary_derivative(fld.height) - fld.height[-1]),
        "bd_res_H": float(fld.boundary_derivative(H)),
        "R_inner": float(cap_radius(surface.u.max())),
        "R_outer": float(cap_radius(surface.u.min())),
        "cap_R": R,
        "cap_residual": res,
        "max_speed": float(np.max(np.abs(f))),
    })
    return R, res


def evaluate_checks(trace, config):
    """Conservation and monotonicity verdicts on a recorded trace."""
    n = trace.n
    W = np.array(trace.W)
    t = np.array(trace.times)
    checks = {}
    Wn = W[:, n]
    checks["W_n_conserved"] = bool(np.max(np.abs(Wn - Wn[0])) / abs(Wn[0]) <= config.tol_Wn)
    for k in range(n):
        checks[f"W_{k}_nondecreasing"] = bool(np.all(np.diff(W[:, k]) >= -config.tol_monotone))
    minF = trace.column("minF")
    dt = np.diff(t)
    # tol_minF bounds the decay rate of min F per unit time
    checks["minF_nondecreasing"] = bool(np.all(np.diff(minF) >= -config.tol_minF * dt))
    R_in, R_out = trace.column("R_inner"), trace.column("R_outer")
    checks["barriers_monotone"] = bool(np.all(np.diff(R_in) >= -1e-9 * R_in[1:])
                                       and np.all(np.diff(R_out) <= 1e-9 * R_out[1:]))
    if trace.converged and np.isfinite(trace.terminal_R):
        fn = cap_f(n, n, trace.terminal_R)
        checks["terminal_cap_matches_W_n"] = bool(abs(fn - Wn[0]) / abs(Wn[0]) <= config.tol_Wn)
    return checks


def _expand(v):
    u = np.empty(v.size + 2)
    u[1:-1] = v
    return _project_ends(u)


def _run_rk2(surface, fld, f, config, trace, record):
    t = 0.0
    while not trace.converged and t < config.t_max and trace.steps < config.max_steps:
        dt = min(config.dt_initial, stable_dt(fld, config.dt_safety), config.t_max - t)
        while True:
            try:
                surface = step(surface, dt, config.max_du, fld)
                break
            except StepTooLarge:
                dt *= 0.5
        fld = geometry_eval(surface)
        f = speed_field(fld)
        t += dt
        trace.steps += 1
        record(t, surface, fld, f, trace.steps % config.record_every == 0)
    return t, surface, fld, f


def _run_bdf(surface, fld, f, config, trace, record):
    from scipy.integrate import BDF
    from scipy.sparse import diags

    template = surface
    nint = surface.M - 1

    def rhs(_t, v):
        vel, _ = graph_velocity(template.with_u(_expand(v)))
        return vel[1:-1]

    sparsity = diags([np.ones(nint - abs(o)) for o in range(-2, 3)], list(range(-2, 3)))
    solver = BDF(rhs, 0.0, surface.u[1:-1].copy(), config.t_max, rtol=config.rtol,
                 atol=config.atol, jac_sparsity=sparsity,
                 first_step=min(config.dt_initial, stable_dt(fld, config.dt_safety)))
    t = 0.0
    while not trace.converged and solver.status == "running" and trace.steps < config.max_steps:
        msg = solver.step()
        if solver.status == "failed":
            raise RuntimeError(f"time integration failed: {msg}")
        t = solver.t
        surface = template.with_u(_expand(solver.y))
        fld = geometry_eval(surface)
        f = speed_field(fld)
        trace.steps += 1
        record(t, surface, fld, f, trace.steps % config.record_every == 0)
    return t, surface, fld, f


def run(surface, config=None, callback=None):
    """Integrate the flow until the surface is a cap (or t_max).

    Returns a FlowTrace; ``trace.final_surface`` holds the last state.
    """
    config = FlowConfig() if config is None else config
    trace = FlowTrace(surface.n, surface.M)
    fld = geometry_eval(surface)
    choose_axis(surface, fld)
    require_convex(fld)
    f = speed_field(fld)
    state = {"R": np.nan, "res": np.inf}

    def record(t, surf, fl, sp, keep):
        # convergence is tested at every step; only every record_every-th is stored
        R, res = detect_cap(surf, fl)
        done = res <= config.tol_cap and np.max(np.abs(sp)) <= config.tol_speed
        if keep or done:
            _record(trace, t, surf, fl, sp)
            if callback is not None:
                callback(trace, surf)
        state.update(R=R, res=res)
        trace.converged = bool(done)

    record(0.0, surface, fld, f, True)
    t = 0.0
    try:
        runner = _run_bdf if config.method == "bdf" else _run_rk2
        t, surface, fld, f = runner(surface, fld, f, config, trace, record)
    except NotStrictlyConvex as exc:
        trace.aborted = str(exc)
        log.error("flow aborted: %s", exc)
    if trace.times[-1] != t and not trace.aborted:
        _record(trace, t, surface, fld, f)
    trace.terminal_R, trace.terminal_residual = state["R"], state["res"]
    trace.final_surface = surface
    trace.checks = evaluate_checks(trace, config)
    return trace
