"""Acceptance criteria 1-10, each printing one PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from screwcal import algebra as alg
from screwcal import calibration as cal
from screwcal import intrinsic as intr
from screwcal import metrics as met
from screwcal import suites
from screwcal import volume as vol
from screwcal import vorticity as vort
from tests import oracle_values as ov
from tests.test_algebra import series_exp


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})")
        assert ok, f"criterion {number} failed: {detail}"

    return emit


def test_criterion_01_algebra(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    xs = rng.uniform(-4, 4, (1000, 3))
    series = max(float(np.max(np.abs(alg.rotation_exp(x) - series_exp(alg.hat(x))))) for x in xs)
    half = suites.half_angle_defect(1000, 1)
    diff = suites.conjugation_differential_defect(1000, 1)
    elapsed = time.perf_counter() - t0
    worst = max(series, half, diff)
    report(1, "algebra identities", worst < 1e-8 and elapsed < 5, f"max defect {worst:.2e}, {elapsed:.2f} s")


def test_criterion_02_bi_invariance(report):
    t0 = time.perf_counter()
    skew = max(met.check_ad_skew(k, 1000, 2) for k in (-1, 0, 1))
    br = max(met.bracket_commutator_defect(k, 1000, 2) for k in (-1, 0, 1))
    elapsed = time.perf_counter() - t0
    ok = skew < 1e-11 and br < 1e-12 and elapsed < 5
    report(2, "bi-invariance", ok, f"ad-skew {skew:.2e}, bracket {br:.2e}, {elapsed:.2f} s")


def test_criterion_03_local_isometries(report):
    t0 = time.perf_counter()
    pi_def = met.pi_isometry_defect(1000, 3)
    p_def = met.p_isometry_defect(1000, 3)
    elapsed = time.perf_counter() - t0
    ok = max(pi_def, p_def) < 1e-10 and elapsed < 5
    report(3, "local isometries", ok, f"Pi {pi_def:.2e}, P {p_def:.2e}, {elapsed:.2f} s")


def test_criterion_04_spacelike_classifier(report):
    bad, boundary = suites.spacelike_agreement(1000, 4, degenerate_tol=1e-10)
    report(4, "space-like classifier", bad == 0 and boundary == 0, f"{bad} disagreements, {boundary} boundary misses")


def test_criterion_05_calibration_inequality(report):
    t0 = time.perf_counter()
    results = {C: cal.calibration_inequality_test(C, 10_000, 5) for C in (math.sqrt(3) / 2, 1.0, 2.0)}
    elapsed = time.perf_counter() - t0
    violations = sum(v for v, _ in results.values())
    ratio = max(r for _, r in results.values())
    ok = violations == 0 and elapsed < 30
    report(5, "calibration inequality", ok, f"{violations} violations, max vol/omega {ratio:.12f}, {elapsed:.2f} s")


def test_criterion_06_calibrated_equality(report):
    ball, shell = suites._radius_grids(200)
    gap = max(cal.calibrated_equality_check(c, g) for c in (0.5, 1.0, 2.0) for g in (ball, shell))
    warren = max(cal.phi_warren_residual(c, g) for c in (0.5, 1.0, 2.0) for g in (ball, shell))
    ok = gap < 1e-9 and warren < 1e-9
    report(6, "calibrated equality", ok, f"max |omega - vol| {gap:.2e}, Warren residual {warren:.2e}")


@pytest.mark.parametrize("name", ["ball", "shell"])
def test_criterion_07_volume_maximization(report, name):
    domain = vol.ball(math.pi / 2) if name == "ball" else vol.shell(1, 0.2)
    t0 = time.perf_counter()
    rep = vol.maximization_experiment(1.0, domain, vol.lie_directions(), vol.DEFAULT_AMPLITUDES, threads=4)
    elapsed = time.perf_counter() - t0
    ok = (
        len(rep.fits) >= 6
        and rep.violations == 0
        and rep.omega_spread < 1e-6
        and rep.max_leading <= 0
        and rep.min_r_squared > 0.99
        and elapsed < 300
    )
    detail = (
        f"{name}: {rep.violations} violations, omega spread {rep.omega_spread:.1e}, "
        f"max leading {rep.max_leading:.3g}, min R^2 {rep.min_r_squared:.6f}, {elapsed:.1f} s"
    )
    report(7, "volume maximization", ok, detail)


def test_criterion_08_vorticity(report):
    checks = {c.name: c for c in suites.suite_vorticity(suites.SuiteConfig(seed=8, samples=100))}
    ok = all(c.passed for c in checks.values())
    detail = ", ".join(f"{k} {v.measured:.2e}" for k, v in checks.items())
    report(8, "vorticity", ok, detail)


def test_criterion_09_optimal_vorticity(report):
    resid = vort.optimality_residual(vort.section_left_invariant_s3(), 200, 9)
    onepoint = cal.onepoint_calibration_check(200, 9)
    _, inv1 = suites.involutivity_extremes(1, 100, 9)
    low0, _ = suites.involutivity_extremes(0, 100, 9)
    lowm, _ = suites.involutivity_extremes(-1, 100, 9)
    ok = resid < 1e-6 and onepoint < 1e-10 and inv1 < 1e-12 and min(low0, lowm) > 0.5
    detail = f"residual {resid:.2e}, one-point {onepoint:.2e}, involutivity 1: {inv1:.1e}, 0: {low0:.3f}, -1: {lowm:.3f}"
    report(9, "optimal vorticity on S^3", ok, detail)


def test_criterion_10_intrinsic_geometry(report):
    radii = np.linspace(0.05, math.pi - 0.05, 50)
    circle = max(abs(intr.circle_length_quadrature(1.0, r) / intr.circle_length(1.0, r) - 1) for r in radii)
    area = max(abs(intr.sphere_area_quadrature(1.0, r) / intr.sphere_area(1.0, r) - 1) for r in radii)
    simpson, gauss = intr.completion_length_oracles(1.0)
    length = intr.completion_length(1.0)
    ratio = float(np.max(intr.area_ratio(1.0, math.pi - np.logspace(-1, -6, 11))))
    bound = intr.completion_distance_bound(1.0, math.pi - 1e-6, math.pi - 1e-6)
    ok = (
        max(circle, area) < 1e-8
        and abs(simpson - gauss) < 1e-9
        and abs(length - ov.COMPLETION_LENGTH) < 1e-9
        and ratio > 1e3
        and bound < 0.01
    )
    detail = (
        f"closed forms {max(circle, area):.1e}, L {length:.12f} (quadratures differ by {abs(simpson - gauss):.1e}), "
        f"max area ratio {ratio:.3g}, bound {bound:.2e}"
    )
    report(10, "intrinsic geometry", ok, detail)
