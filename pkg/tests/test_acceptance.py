"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the summary only, or
through pytest, where the lines are repeated in the terminal summary.
"""
import time

import numpy as np
import pytest

from fbquermass.capref import cap_f, cap_speed
from fbquermass.flow import FlowConfig, run, speed_field
from fbquermass.harness import CorpusSpec, inequality_gaps, verify_corpus
from fbquermass.identities import heintze_karcher, minkowski_residual
from fbquermass.quermass import (assemble_quermass, boundary_body_quermass, gauss_bonnet_check,
                                 quermass_vector, sphere_area, variation_check)
from fbquermass.surface import cap_surface, flat_disk, geometry_eval, random_convex_surface
from fbquermass.symfunc import (curvature_function_F, newton_maclaurin_margin, sigma_all,
                                sigma_partials)

RESULTS = []


def report(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_gauss_bonnet():
    worst = {}
    for n in (2, 3):
        target = sphere_area(n) / 2  # 2 pi for n = 2, pi^2 for n = 3
        worst[n] = max(gauss_bonnet_check(random_convex_surface(s, n=n, M=512)).residual / target
                       for s in range(50))
    report(1, max(worst.values()) <= 1e-4,
           f"(n+1)W_(n+1) = omega_n/2 on 50 surfaces at M=512; worst rel {worst[2]:.2e} (n=2), "
           f"{worst[3]:.2e} (n=3)")


def test_criterion_02_exact_values():
    def disk(n):
        # closed-form inputs: unit n-ball base, zero curvature integrals, hemispherical boundary body
        area = sphere_area(n - 1) / n
        return assemble_quermass(n, area, np.r_[area, np.zeros(n)],
                                 boundary_body_quermass(n, np.pi / 2), 0.0)
    errs = [abs(disk(1)[2] - np.pi / 2), abs(disk(2)[3] - 2 * np.pi / 3),
            abs(quermass_vector(flat_disk(1, M=64)).W[2] - np.pi / 2),
            abs(quermass_vector(flat_disk(2, M=64)).W[3] - 2 * np.pi / 3)]
    report(2, max(errs) <= 1e-10,
           f"W_2 = pi/2 (n=1), W_3 = 2pi/3 (n=2); max error {max(errs):.2e}")


def test_criterion_03_cap_stationarity():
    closed, pipeline = 0.0, 0.0
    for R in (0.25, 1.0, 4.0):
        t = np.linspace(0.0, np.arctan(1.0 / R), 2001)
        for n in (2, 3):
            closed = max(closed, np.max(np.abs(cap_speed(n, R, t))))
            pipeline = max(pipeline, np.max(np.abs(speed_field(geometry_eval(cap_surface(n, R, M=512))))))
    report(3, closed <= 1e-8 and pipeline <= 1e-6,
           f"cap speed closed form {closed:.2e}, pipeline M=512 {pipeline:.2e}")


def test_criterion_04_minkowski():
    worst, min_order = 0.0, np.inf
    for n in (2, 3):
        for seed in range(50):
            s = random_convex_surface(seed, n=n, M=256)
            for k in range(1, n + 1):
                coarse = minkowski_residual(s.with_u(s.u[::2]), k).residual
                fine = minkowski_residual(s, k).residual
                worst = max(worst, fine)
                min_order = min(min_order, np.log2(coarse / fine))
    report(4, worst <= 1e-4 and min_order >= 2.0,
           f"50 surfaces, n=2,3, k=1..n: worst residual {worst:.2e} at M=256, "
           f"min observed order {min_order:.2f}")


def test_criterion_05_heintze_karcher():
    corpus = min(heintze_karcher(random_convex_surface(s, n=n, M=256)).lhs
                 for n in (2, 3) for s in range(50))
    caps = max(abs(heintze_karcher(cap_surface(n, R, M=512)).lhs)
               for n in (2, 3) for R in (0.25, 1.0, 4.0))
    report(5, corpus >= -1e-8 and caps <= 1e-6,
           f"corpus min integral {corpus:.2e}, cap max |integral| {caps:.2e}")


@pytest.fixture(scope="module")
def flow_runs():
    config = FlowConfig(record_every=1)
    out = []
    for seed in range(20):
        s = random_convex_surface(seed, n=2, M=256, amplitude=0.2)
        t0 = time.perf_counter()
        trace = run(s, config)
        out.append((trace, time.perf_counter() - t0))
    return out


def test_criterion_06_flow_monotonicity(flow_runs):
    drift, dW, dF = 0.0, np.inf, np.inf
    for trace, _ in flow_runs:
        W = np.array(trace.W)
        t = np.array(trace.times)
        drift = max(drift, np.max(np.abs(W[:, 2] - W[0, 2])) / W[0, 2])
        dW = min(dW, np.diff(W[:, :2], axis=0).min())
        dF = min(dF, np.min(np.diff(trace.column("minF")) / np.diff(t)))
    slowest = max(sec for _, sec in flow_runs)
    report(6, drift <= 1e-3 and dW >= -1e-6 and dF >= -1e-6,
           f"20 runs: max W_2 drift {drift:.2e}, min step dW_0,1 {dW:.2e}, "
           f"min d(minF)/dt {dF:.2e}, slowest run {slowest:.1f}s")


def test_criterion_07_convergence_to_caps(flow_runs):
    res, mismatch, converged = 0.0, 0.0, 0
    for trace, _ in flow_runs:
        converged += trace.converged
        res = max(res, trace.terminal_residual)
        W0 = trace.W[0][2]
        mismatch = max(mismatch, abs(cap_f(2, 2, trace.terminal_R) - W0) / W0)
    report(7, converged == 20 and res <= 1e-4 and mismatch <= 1e-3,
           f"{converged}/20 converged, max cap residual {res:.2e}, "
           f"max |f_2(R_T) - W_2(0)|/W_2(0) {mismatch:.2e}")


def test_criterion_08_main_inequality():
    lines, ok = [], True
    for n in (2, 3):
        reps = verify_corpus(CorpusSpec(n=n, M=256), range(200))
        gaps = np.array([r.gaps for r in reps])
        deficit = np.array([r.deficit for r in reps])
        errors = [r.seed for r in reps if r.error]
        active = deficit > 0.05
        strict = gaps[active].min() if active.any() else np.inf
        ok &= not errors and gaps.min() >= -1e-8 and strict > 1e-4
        lines.append(f"n={n}: min gap {gaps.min():.2e}, min gap at deficit>0.05 {strict:.2e} "
                     f"({active.sum()}/200)")
        if n == 3:
            lines.append(f"Willmore column (k=1) min {gaps[:, 1].min():.2e}")
    cap_gap = max(np.max(np.abs(inequality_gaps(n, quermass_vector(cap_surface(n, R, M=256)).W)))
                  for n in (2, 3) for R in (0.25, 1.0, 4.0))
    ok &= cap_gap <= 1e-6
    report(8, ok, "; ".join(lines) + f"; caps max |gap| {cap_gap:.2e}")


def test_criterion_09_variation_formula():
    bumps = [lambda r: 1.0 + 0.5 * np.cos(np.pi * r),
             lambda r: 1.0 + 0.3 * np.cos(2 * np.pi * r),
             lambda r: 1.0 + 8.0 * r**2 * (1 - r) ** 2]
    worst, top = 0.0, 0.0
    for n in (2, 3):
        for seed in (0, 1):
            s = random_convex_surface(seed, n=n, M=512)
            for bump in bumps:
                err, _, _ = variation_check(s, bump, h=1e-4)
                worst = max(worst, err[: n + 1].max())
                top = max(top, err[n + 1])
    report(9, worst <= 1e-3 and top <= 1e-3,
           f"h=1e-4, M=512: worst rel error k<=n {worst:.2e}, |dW_(n+1)/dt|/W_(n+1) {top:.2e}")


def test_criterion_10_symmetric_kernel():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    margin_min = np.inf
    trials = 0
    for n in (2, 3, 4, 5):
        kappa = rng.uniform(0.05, 5.0, size=(2500, n))
        trials += len(kappa)
        s = sigma_all(kappa)
        scale = rng.uniform(0.1, 10.0, size=(2500, 1))
        s_scaled = sigma_all(scale * kappa)
        F, grad = curvature_function_F(kappa)
        F_scaled, _ = curvature_function_F(scale * kappa)
        rel = lambda a, b: np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))
        for k in range(1, n + 1):
            P = sigma_partials(kappa, k)
            worst = max(worst,
                        rel(P.sum(-1), (n - k + 1) * s[:, k - 1]),  # sum_i sigma_k^i
                        rel((P * kappa).sum(-1), k * s[:, k]),  # Euler relation
                        rel(s_scaled[:, k], scale[:, 0] ** k * s[:, k]))
        worst = max(worst, rel((grad * kappa**2).sum(-1), F**2), rel((grad * kappa).sum(-1), F),
                    rel(F_scaled, scale[:, 0] * F))
        for k in range(1, n):
            margin_min = min(margin_min, newton_maclaurin_margin(kappa, k).min())
    elapsed = time.perf_counter() - t0
    report(10, worst <= 1e-12 and margin_min >= 0.0 and elapsed < 1.0,
           f"{trials} trials: worst rel {worst:.2e}, min Newton-Maclaurin margin {margin_min:.2e}, "
           f"{elapsed:.2f}s")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
