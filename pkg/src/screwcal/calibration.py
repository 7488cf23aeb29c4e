"""The split special Lagrangian 3-form on ``R^3 x| S^3`` and its checks.

Blades are arrays of shape ``(..., 3, 6)`` holding three left-trivialized
tangent vectors ``(xi, eta)``.  In these null coordinates the form is
``omega = (C det[xi-parts] + det[eta-parts] / C) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import algebra as alg
from . import groups as grp
from .metrics import S3XS3_FORM, SPIN_FORM
from .screwmaps import tangent_blade, ell_profile

EQUALITY_TOL = 1e-9


class NotSpacelike(ValueError):
    """The induced Gram matrix of a blade is not positive definite."""


@dataclass(frozen=True)
class CalibrationForm:
    C: float
    group: str = "R3xS3"

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")

    def __call__(self, blade):
        return omega_at_identity(self.C, blade)


def calibrating_constant(c: float) -> float:
    """``C`` with ``4 c^3 C^2 = 3``: the value for which ``phi`` is calibrated."""
    return math.sqrt(3.0 / (4.0 * c**3))


def _parts(blade):
    blade = np.asarray(blade, dtype=float)
    return blade[..., :3], blade[..., 3:]


def omega_at_identity(C: float, blade):
    e, eps = _parts(blade)
    return 0.5 * (C * np.linalg.det(e) + np.linalg.det(eps) / C)


def pull_blade(basepoint: grp.SpinMotion, ambient):
    """Left-trivialize an ambient blade ``(dx (...,3,3), dq (...,3,4))`` at ``basepoint``."""
    dx, dq = ambient
    g = grp.SpinMotion(np.asarray(basepoint.x)[..., None, :], np.asarray(basepoint.q)[..., None, :])
    xi, eta = grp.left_diff_spin_inverse(g, (np.asarray(dx, dtype=float), np.asarray(dq, dtype=float)))
    return np.concatenate([xi, eta], axis=-1)


def push_blade(basepoint: grp.SpinMotion, blade):
    """Inverse of :func:`pull_blade`."""
    blade = np.asarray(blade, dtype=float)
    g = grp.SpinMotion(np.asarray(basepoint.x)[..., None, :], np.asarray(basepoint.q)[..., None, :])
    return grp.left_diff_spin(g, (blade[..., :3], blade[..., 3:]))


def omega_eval(C: float, basepoint: grp.SpinMotion, ambient):
    """``omega`` on an ambient blade at ``basepoint``; left invariance lets
    us evaluate at the identity."""
    return omega_at_identity(C, pull_blade(basepoint, ambient))


def blade_gram(blade, form=SPIN_FORM):
    blade = np.asarray(blade, dtype=float)
    return blade @ form @ np.swapaxes(blade, -1, -2)


def blade_volume(blade, form=SPIN_FORM):
    """``sqrt(det Gram)`` of a space-like blade.

    Raises
    ------
    NotSpacelike
        If some Gram matrix is not positive definite.
    """
    g = blade_gram(blade, form)
    ev = np.linalg.eigvalsh(g)
    if np.any(ev[..., 0] <= 0):
        raise NotSpacelike(f"Gram matrix not positive definite (min eigenvalue {np.min(ev[..., 0]):.3e})")
    return np.sqrt(np.linalg.det(g))


def warren_residual(blade, C: float):
    """``|det eta - C^2 det xi| / max(1, |det xi|)``."""
    e, eps = _parts(blade)
    de, deps = np.linalg.det(e), np.linalg.det(eps)
    return np.abs(deps - C * C * de) / np.maximum(1.0, np.abs(de))


def lagrangian_defect(blade):
    """Max of ``|<xi_a, eta_b> - <xi_b, eta_a>|``: zero iff the plane is Lagrangian."""
    e, eps = _parts(blade)
    m = e @ np.swapaxes(eps, -1, -2)
    return np.max(np.abs(m - np.swapaxes(m, -1, -2)), axis=(-2, -1))


# -- sampling space-like graphs ----------------------------------------------------


def random_graph_maps(rng: np.random.Generator, n: int, symmetric: bool = False):
    """``M = S + A`` with ``S`` SPD (eigenvalues in [0.1, 3]) and ``A``
    antisymmetric with entries in [-1, 1] (``A = 0`` if ``symmetric``)."""
    q, _ = np.linalg.qr(rng.standard_normal((n, 3, 3)))
    ev = rng.uniform(0.1, 3.0, (n, 3))
    s = q @ (ev[..., None] * np.swapaxes(q, -1, -2))
    if symmetric:
        return s
    upper = np.triu(rng.uniform(-1.0, 1.0, (n, 3, 3)), 1)
    return s + upper - np.swapaxes(upper, -1, -2)


def graph_blade(m, frame=None):
    """Blade with rows ``(u_a, M u_a)``; ``u`` defaults to the standard basis."""
    m = np.asarray(m, dtype=float)
    u = np.broadcast_to(np.eye(3), m.shape) if frame is None else np.asarray(frame, dtype=float)
    return np.concatenate([u, u @ np.swapaxes(m, -1, -2)], axis=-1)


def normalize_blade(blade, form=SPIN_FORM):
    """Scale each blade to unit volume."""
    vol = blade_volume(blade, form)
    return np.asarray(blade) / np.cbrt(vol)[..., None, None]


def calibration_inequality_test(C: float, n: int = 10_000, seed: int = 0):
    """Sample ``n`` space-like graph 3-planes; return ``(violations, max vol/omega)``."""
    if n <= 0:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    frames, _ = np.linalg.qr(rng.standard_normal((n, 3, 3)))
    blades = normalize_blade(graph_blade(random_graph_maps(rng, n), frames))
    om = omega_at_identity(C, blades)
    vol = blade_volume(blades)
    positive = om > 0
    violations = int(np.sum(positive & (om < vol - EQUALITY_TOL)))
    ratio = float(np.max(vol[positive] / om[positive])) if np.any(positive) else 0.0
    return violations, ratio


def equality_iff_warren(C: float, n: int = 2000, seed: int = 0, tol: float = EQUALITY_TOL):
    """Count disagreements of ``warren < tol`` and ``|omega - vol| < tol`` on
    unit-volume Lagrangian graphs, half of them rescaled onto ``det M = C^2``."""
    rng = np.random.default_rng(seed)
    m = random_graph_maps(rng, n, symmetric=True)
    special = np.arange(n) % 2 == 0
    scale = np.cbrt(C * C / np.linalg.det(m[special]))
    m[special] *= scale[:, None, None]
    blades = normalize_blade(graph_blade(m))
    om = omega_at_identity(C, blades)
    gap = np.abs(om - blade_volume(blades))
    warren = warren_residual(blades, C)
    mismatch = (warren < tol) != (gap < tol)
    return int(np.sum(mismatch)), int(np.sum(warren < tol))


def calibrated_equality_check(c: float, radii, theta: str = "half") -> float:
    """``max |omega - vol|`` over tangent blades of ``phi`` (``C`` calibrating)."""
    C = calibrating_constant(c)
    prof = ell_profile(c, theta)
    radii = np.asarray(radii, dtype=float)
    v = radii[:, None] * alg.E1
    blades = tangent_blade(prof, v)
    return float(np.max(np.abs(omega_at_identity(C, blades) - blade_volume(blades))))


def phi_warren_residual(c: float, radii) -> float:
    C = calibrating_constant(c)
    radii = np.asarray(radii, dtype=float)
    blades = tangent_blade(ell_profile(c), radii[:, None] * alg.E1)
    return float(np.max(warren_residual(blades, C)))


# -- S^3 x S^3 ----------------------------------------------------------------------

ONEPOINT_SCALE = 2.0**-1.5


def onepoint_form(blade):
    """Invariant 3-form on ``S^3 x S^3`` equal at ``(1, 1)`` to the dual of
    ``sqrt(2)(i,0), sqrt(2)(j,0), sqrt(2)(k,0)``: ``2^(-3/2) det[first parts]``."""
    return ONEPOINT_SCALE * np.linalg.det(np.asarray(blade, dtype=float)[..., :3])


def pull_blade_s3xs3(p, q, dp, dq):
    """Left-trivialize ambient quaternion blades ``dp, dq`` of shape ``(..., 3, 4)``."""
    pc = alg.qconj(np.asarray(p, dtype=float))[..., None, :]
    qc = alg.qconj(np.asarray(q, dtype=float))[..., None, :]
    return np.concatenate([alg.qmul(pc, dp)[..., 1:], alg.qmul(qc, dq)[..., 1:]], axis=-1)


def onepoint_calibration_check(n: int = 200, seed: int = 0) -> float:
    """``max |form - vol|`` on tangent planes of ``S^3 x {1}``.

    At random ``p`` the blade is ``sqrt(2) p R e_a`` in the first factor for a
    random rotation ``R``; it is pulled back to ``(1, 1)`` before evaluation.
    """
    rng = np.random.default_rng(seed)
    ps = alg.random_unit_quaternions(rng, n)
    rots = np.stack([alg.rotation_exp(w) for w in rng.standard_normal((n, 3))])
    first = math.sqrt(2.0) * np.swapaxes(rots, -1, -2)  # rows R e_a
    dp = alg.qmul(ps[:, None, :], alg.pure(first))
    dq = np.zeros_like(dp)
    blades = pull_blade_s3xs3(ps, np.tile(alg.QUAT_ONE, (n, 1)), dp, dq)
    vol = blade_volume(blades, S3XS3_FORM)
    return float(np.max(np.abs(onepoint_form(blades) - vol)))


def onepoint_tilted_check(n: int = 2000, seed: int = 0, tilt: float = 0.5):
    """Tilt orthonormal first-factor blades into the second factor.

    Returns ``(n_spacelike, violations)`` where a violation is a space-like
    tilted blade with ``0 < form < vol``.
    """
    rng = np.random.default_rng(seed)
    a = math.sqrt(2.0) * np.linalg.qr(rng.standard_normal((n, 3, 3)))[0]
    b = tilt * rng.standard_normal((n, 3, 3))
    blades = np.concatenate([a, b], axis=-1)
    g = blade_gram(blades, S3XS3_FORM)
    spacelike = np.linalg.eigvalsh(g)[:, 0] > 0
    form = np.abs(onepoint_form(blades[spacelike]))
    vol = np.sqrt(np.linalg.det(g[spacelike]))
    return int(np.sum(spacelike)), int(np.sum(form < vol - EQUALITY_TOL))
