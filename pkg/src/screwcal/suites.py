"""Named verification suites shared by the command line and the acceptance tests.

Each suite returns a list of :class:`Check` records; a suite passes when
every check does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import algebra as alg
from . import calibration as cal
from . import intrinsic as intr
from . import metrics as met
from . import screwmaps as sm
from . import vorticity as vort


@dataclass
class Check:
    name: str
    paper_ref: str
    measured: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "measured": _finite(self.measured),
            "tolerance": _finite(self.tolerance),
            "pass": bool(self.passed),
        }


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def at_most(name, ref, measured, tol) -> Check:
    return Check(name, ref, float(measured), float(tol), bool(measured <= tol))


def above(name, ref, measured, threshold) -> Check:
    return Check(name, ref, float(measured), float(threshold), bool(measured > threshold))


@dataclass
class SuiteConfig:
    seed: int = 0
    samples: int | None = None
    kappa: int | None = None
    c: float = 1.0
    tolerances: dict = field(default_factory=dict)

    def n(self, default: int) -> int:
        return default if self.samples is None else self.samples

    def tol(self, name: str, default: float) -> float:
        return self.tolerances.get(name, default)

    def kappas(self):
        return (-1, 0, 1) if self.kappa is None else (self.kappa,)


# -- algebra ---------------------------------------------------------------------------


def rotation_exp_defect(n: int, seed: int) -> float:
    """``rotation_exp`` against the Pade matrix exponential."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-4, 4, (n, 3))
    return max(float(np.max(np.abs(alg.rotation_exp(x) - expm(alg.hat(x))))) for x in xs)


def half_angle_defect(n: int, seed: int) -> float:
    """``exp(C_{ru}) = I_{exp(ru/2)}``."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-4, 4, (n, 3))
    return float(np.max(np.abs(alg.rotation_exp(xs) - alg.conjugation_rotation(alg.quat_exp(0.5 * xs)))))


def conjugation_differential_defect(n: int, seed: int, step: float = 1e-4) -> float:
    """``dI_1(xi) = C_{2 xi}`` by Richardson-extrapolated central differences."""
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((n, 3))

    def central(h):
        plus = alg.conjugation_rotation(alg.quat_exp(h * xs))
        minus = alg.conjugation_rotation(alg.quat_exp(-h * xs))
        return (plus - minus) / (2 * h)

    deriv = (4 * central(0.5 * step) - central(step)) / 3
    return float(np.max(np.abs(deriv - alg.hat(2 * xs))))


def suite_algebra(cfg: SuiteConfig):
    n = cfg.n(1000)
    ref = "rotation and quaternion algebra"
    return [
        at_most("rotation_exp_vs_expm", ref, rotation_exp_defect(n, cfg.seed), cfg.tol("algebra", 1e-8)),
        at_most(
            "rotation_equals_half_angle_conjugation",
            "rotation by ru is conjugation by exp(ru/2)",
            half_angle_defect(n, cfg.seed),
            cfg.tol("algebra", 1e-8),
        ),
        at_most(
            "conjugation_differential",
            "differential of the double cover at 1 is xi -> C_{2 xi}",
            conjugation_differential_defect(n, cfg.seed),
            cfg.tol("algebra", 1e-8),
        ),
    ]


def suite_bi_invariance(cfg: SuiteConfig):
    n = cfg.n(1000)
    checks = []
    for k in cfg.kappas():
        checks.append(
            at_most(
                f"ad_skew_kappa_{k}",
                "ad-invariance of the split metric on G_kappa",
                met.check_ad_skew(k, n, cfg.seed),
                cfg.tol("ad_skew", 1e-11),
            )
        )
        checks.append(
            at_most(
                f"bracket_vs_commutator_kappa_{k}",
                "bracket formula for Z_kappa(x, xi)",
                met.bracket_commutator_defect(k, n, cfg.seed),
                cfg.tol("bracket", 1e-12),
            )
        )
    return checks


def suite_local_isometry(cfg: SuiteConfig):
    n = cfg.n(1000)
    tol = cfg.tol("isometry", 1e-10)
    return [
        at_most("covering_Pi_isometry", "Pi is a local isometry", met.pi_isometry_defect(n, cfg.seed), tol),
        at_most(
            "S3xS3_to_SO4_isometry",
            "P(p, q) = L_p R_{q^-1} is a local isometry",
            met.p_isometry_defect(n, cfg.seed),
            tol,
        ),
    ]


# -- space-like classification -----------------------------------------------------------


def spacelike_agreement(n: int, seed: int, degenerate_tol: float = 1e-10):
    """``(disagreements, boundary_misses)`` between the classifier and the
    sign of the smallest eigenvalue of the pullback metric."""
    rng = np.random.default_rng(seed)
    profiles = [sm.ell_profile(c, th) for c in (0.5, 1.0, 2.0) for th in ("half", "custom")]
    bad = 0
    for i in range(n):
        prof = profiles[i % len(profiles)]
        r = float(rng.uniform(0.0, 4 * math.pi))
        bad += not _agrees(prof, r, degenerate_tol)
    boundary = 0
    for prof in profiles:
        for r in (math.pi, 2 * math.pi):
            if sm.spacelike_classify(prof, r) is not sm.SpacelikeClass.DEGENERATE:
                boundary += 1
            bad += not _agrees(prof, r, degenerate_tol)
    return bad, boundary


def _agrees(prof, r, tol) -> bool:
    cls = sm.spacelike_classify(prof, r)
    u = alg.random_unit_vectors(np.random.default_rng(int(r * 1e6)))
    lam = float(np.linalg.eigvalsh(sm.pullback_metric(prof, r * u))[0])
    if cls is sm.SpacelikeClass.SPACELIKE:
        return lam > 0
    if cls is sm.SpacelikeClass.NOT_SPACELIKE:
        return lam < 0
    return abs(lam) <= tol


def suite_spacelike_lemma(cfg: SuiteConfig):
    bad, boundary = spacelike_agreement(cfg.n(1000), cfg.seed)
    ref = "space-likeness of screw-radial maps"
    return [
        at_most("classifier_vs_eigenvalues", ref, bad, 0),
        at_most("pi_and_2pi_degenerate", ref, boundary, 0),
    ]


# -- calibration ----------------------------------------------------------------------------


def suite_calibration(cfg: SuiteConfig):
    n = cfg.n(10_000)
    checks = []
    for C in (math.sqrt(3) / 2, 1.0, 2.0):
        viol, ratio = cal.calibration_inequality_test(C, n, cfg.seed)
        checks.append(at_most(f"violations_C_{C:.6g}", "split special Lagrangian form is a calibration", viol, 0))
        checks.append(at_most(f"max_vol_over_omega_C_{C:.6g}", "calibration inequality", ratio, 1 + 1e-9))
    diag = cal.graph_blade(np.eye(3))
    checks.append(
        at_most(
            "diagonal_lagrangian_equality",
            "equality on special Lagrangian planes",
            abs(cal.omega_at_identity(1.0, diag) - cal.blade_volume(diag)),
            cfg.tol("equality", cal.EQUALITY_TOL),
        )
    )
    mismatch, _ = cal.equality_iff_warren(math.sqrt(3) / 2, min(n, 2000), cfg.seed)
    checks.append(at_most("equality_iff_warren_on_lagrangian", "Warren condition", mismatch, 0))
    return checks


def _radius_grids(n: int = 200):
    ball = np.linspace(0.0, math.pi, n + 2)[1:-1]
    shell = np.linspace(2 * math.pi, 3 * math.pi, n + 2)[1:-1]
    return ball, shell


def suite_warren(cfg: SuiteConfig):
    checks = []
    tol = cfg.tol("equality", cal.EQUALITY_TOL)
    for c in (0.5, 1.0, 2.0):
        for label, grid in zip(("ball", "shell"), _radius_grids(cfg.n(200))):
            checks.append(
                at_most(
                    f"warren_residual_c_{c:g}_{label}",
                    "Warren condition for the screw map with 4c^3C^2 = 3",
                    cal.phi_warren_residual(c, grid),
                    tol,
                )
            )
            checks.append(
                at_most(
                    f"omega_minus_volume_c_{c:g}_{label}",
                    "the screw map is calibrated by omega",
                    cal.calibrated_equality_check(c, grid),
                    tol,
                )
            )
    return checks


# -- vorticity --------------------------------------------------------------------------------


def _ball_points(rng, n, radius):
    return [vort.random_point(0, rng, radius) for _ in range(n)]


def screw_shell_samples(c: float, r_lo: float, r_hi: float, n: int, seed: int):
    """Points ``ell(r) u`` with ``r`` uniform in ``(r_lo, r_hi)`` and random unit directions."""
    rng = np.random.default_rng(seed)
    rs = rng.uniform(r_lo, r_hi, n)
    us = alg.random_unit_vectors(rng, n)
    pts = sm.ell(c, rs)[:, None] * us
    return pts, alg.random_unit_vectors(rng, n)


def negative_vorticity_count(c: float, n: int, seed: int) -> int:
    pts, dirs = screw_shell_samples(c, math.pi + 0.2, 2 * math.pi - 0.5, n, seed)
    sec = vort.section_from_screw(c)
    return sum(vort.vorticity_h(sec, p, y) < 0 for p, y in zip(pts, dirs))


def boundary_vorticity_defect(c: float, n: int, seed: int):
    """``(max |x^b - 2 u x y|, max |<x^b, x>|)`` at ``v = ell(pi) u``, ``x = ell(pi) y``."""
    rng = np.random.default_rng(seed)
    sec = vort.section_from_screw(c)
    L = float(sm.ell(c, math.pi))
    worst, worst_h = 0.0, 0.0
    for u in alg.random_unit_vectors(rng, n):
        z1, z2 = alg.orthonormal_completion(u)
        a = rng.uniform(0, 2 * math.pi)
        y = math.cos(a) * z1 + math.sin(a) * z2
        xb = vort.vorticity_vector(sec, L * u, L * y)
        worst = max(worst, float(np.max(np.abs(xb - 2 * np.cross(u, y)))))
        worst_h = max(worst_h, abs(float(np.dot(xb, L * y))))
    return worst, worst_h


def suite_vorticity(cfg: SuiteConfig):
    n = cfg.n(100)
    rng = np.random.default_rng(cfg.seed)
    b0 = vort.section_b0()
    origin_defect = max(
        float(np.max(np.abs(vort.vorticity_vector(b0, np.zeros(3), x) - x)))
        for x in alg.random_unit_vectors(rng, 20)
    )
    tol = cfg.tol("helicity", 1e-5)
    ref = "norm of db equals half the vorticity"
    pts = _ball_points(rng, n, 1.0)
    helicity_b0 = vort.spacelike_vorticity_check(b0, pts, alg.random_unit_vectors(rng, n))
    s3 = vort.section_left_invariant_s3()
    pts = [vort.random_point(1, rng) for _ in range(n)]
    dirs = [vort.random_unit_tangent(1, p, rng) for p in pts]
    helicity_s3 = vort.spacelike_vorticity_check(s3, pts, dirs)
    pts, dirs = screw_shell_samples(cfg.c, 2 * math.pi + 0.5, 3 * math.pi - 0.1, n, cfg.seed + 1)
    helicity_screw = vort.spacelike_vorticity_check(vort.section_from_screw(cfg.c), pts, dirs)
    bd, bh = boundary_vorticity_defect(cfg.c, 20, cfg.seed)
    return [
        at_most("b0_at_origin", "vorticity of b0 at the origin", origin_defect, cfg.tol("origin", 1e-6)),
        at_most("helicity_b0", ref, helicity_b0, tol),
        at_most("helicity_left_invariant_s3", ref, helicity_s3, tol),
        at_most("helicity_screw_first_shell", ref, helicity_screw, tol),
        at_most("boundary_vorticity_2_u_cross_y", "vorticity at the boundary sphere", bd, tol),
        at_most("boundary_vorticity_orthogonal", "vorticity at the boundary sphere", bh, tol),
        above(
            "negative_h_on_shell_pi_2pi",
            "negative vorticity occurs",
            negative_vorticity_count(cfg.c, 50, cfg.seed),
            0,
        ),
    ]


def suite_optimal_s3(cfg: SuiteConfig):
    return [
        at_most(
            "optimality_residual_left_invariant_s3",
            "left-invariant framing of S^3 has optimal vorticity",
            vort.optimality_residual(vort.section_left_invariant_s3(), cfg.n(200), cfg.seed),
            cfg.tol("optimal", 1e-6),
        ),
        at_most(
            "onepoint_calibration_S3x1",
            "S^3 x {1} is calibrated by a one-point calibration",
            cal.onepoint_calibration_check(cfg.n(200), cfg.seed),
            cfg.tol("onepoint", 1e-10),
        ),
    ]


def involutivity_extremes(kappa: int, n: int, seed: int):
    """``(min, max)`` defect over random orthonormal pairs ``(x, y)``."""
    rng = np.random.default_rng(seed)
    vals = []
    for x in alg.random_unit_vectors(rng, n):
        z1, _ = alg.orthonormal_completion(x)
        vals.append(vort.involutivity_defect(kappa, x, z1))
    return min(vals), max(vals)


def suite_involutivity(cfg: SuiteConfig):
    checks = []
    ref = "distribution of optimal vorticity is involutive only for kappa = 1"
    for k in cfg.kappas():
        lo, hi = involutivity_extremes(k, cfg.n(100), cfg.seed)
        if k == 1:
            checks.append(at_most("defect_kappa_1", ref, hi, cfg.tol("involutive", 1e-12)))
        else:
            checks.append(above(f"defect_kappa_{k}", ref, lo, 0.5))
    return checks


# -- intrinsic --------------------------------------------------------------------------------


def suite_intrinsic(cfg: SuiteConfig):
    c = cfg.c
    radii = np.linspace(0.05, math.pi - 0.05, cfg.n(50))
    circle = max(abs(intr.circle_length_quadrature(c, r) / intr.circle_length(c, r) - 1) for r in radii)
    area = max(abs(intr.sphere_area_quadrature(c, r) / intr.sphere_area(c, r) - 1) for r in radii)
    simpson, gauss = intr.completion_length_oracles(c)
    table = intr.completion_length(c)
    ratios = intr.area_ratio(c, math.pi - np.logspace(-1, -6, 11))
    return [
        at_most("circle_length_vs_quadrature", "length of great circles", circle, cfg.tol("intrinsic", 1e-8)),
        at_most("sphere_area_vs_quadrature", "area of geodesic spheres", area, cfg.tol("intrinsic", 1e-8)),
        at_most("L_simpson_vs_gauss", "finite completion length L", abs(simpson - gauss), 1e-9),
        at_most("L_table_vs_gauss", "finite completion length L", abs(table - gauss), 1e-9),
        above("max_area_ratio", "area ratio diverges at the completion point", float(np.max(ratios)), 1e3),
        at_most(
            "completion_distance_bound",
            "points near the boundary collapse",
            intr.completion_distance_bound(c, math.pi - 1e-6, math.pi - 1e-6),
            0.01,
        ),
    ]


SUITES = {
    "algebra": suite_algebra,
    "bi-invariance": suite_bi_invariance,
    "local-isometry": suite_local_isometry,
    "spacelike-lemma": suite_spacelike_lemma,
    "calibration": suite_calibration,
    "warren": suite_warren,
    "vorticity": suite_vorticity,
    "optimal-s3": suite_optimal_s3,
    "involutivity": suite_involutivity,
    "intrinsic": suite_intrinsic,
}


def run_suite(name: str, cfg: SuiteConfig | None = None):
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](cfg or SuiteConfig())
