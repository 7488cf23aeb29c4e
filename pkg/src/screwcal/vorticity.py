"""Frame sections of ``SO(M_kappa)`` and their vorticity.

A section is stored through the identification ``I(g) = (dg)_o``: its
evaluator takes an ambient point ``p`` of ``M_kappa`` (a 4-vector, with
``p = (1, a)`` for ``kappa = 0``) and returns the 4x4 matrix ``g`` in
``G_kappa`` with ``g(o) = p`` whose restriction to ``T_o M`` is the frame.

Derivatives of sections are taken by central differences with one level of
Richardson extrapolation.  Covariant derivatives use the transvections
``h exp(t Z(x', 0)) h^-1`` as parallel transport along geodesics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra as alg
from . import groups as grp
from .screwmaps import ell_inverse

FD_STEP = 1e-5
RICHARDSON_TOL = 1e-5
SKEW_TOL = 1e-6


class StepTooLarge(RuntimeError):
    """Richardson estimates disagree: the section is not resolved at this step."""


@dataclass(frozen=True)
class FrameSection:
    kappa: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    variant: str = "custom"

    def __call__(self, p) -> np.ndarray:
        return self.evaluator(grp.ambient_point(self.kappa, p))

    def frame(self, p) -> grp.Frame:
        return grp.frame_of(grp.IsometryG(self.kappa, self(p)))


@dataclass(frozen=True)
class VorticityReport:
    point: np.ndarray
    direction: np.ndarray
    xb: np.ndarray
    h: float
    spacelike_norm: float


# -- concrete sections ---------------------------------------------------------


def section_b0() -> FrameSection:
    """``b0(x) = (x, R_x)`` on ``R^3``."""
    return FrameSection(0, lambda p: grp.euclid_to_matrix(p[1:], alg.rotation_exp(p[1:])), "b0")


def section_constant() -> FrameSection:
    """Parallel section ``b(x) = (x, I)``."""
    return FrameSection(0, lambda p: grp.euclid_to_matrix(p[1:], np.eye(3)), "constant")


def section_from_screw(c: float = 1.0) -> FrameSection:
    """Section of ``Phi``: ``b(ell(r) u) = R_{r u}``."""

    def evaluator(p):
        a = p[1:]
        s = float(np.linalg.norm(a))
        if s == 0.0:
            return grp.euclid_to_matrix(a, np.eye(3))
        r = ell_inverse(c, s)
        return grp.euclid_to_matrix(a, alg.rotation_exp(a * (r / s)))

    return FrameSection(0, evaluator, f"screw:c={c:g}")


def section_left_invariant_s3() -> FrameSection:
    """``b(p) = (dL_p)_1`` on ``S^3``: the 4x4 matrix of ``z -> p z``."""
    return FrameSection(1, lambda p: alg.left_mult_matrix(alg.qnormalize(p)), "left-invariant-s3")


def section_transvection(kappa: int) -> FrameSection:
    """``b(p) = exp(Z(x_p, 0))`` with ``x_p`` the geodesic log of ``p`` at ``o``."""

    def evaluator(p):
        spatial = p[1:]
        s = float(np.linalg.norm(spatial))
        if kappa == 0:
            return grp.exp_p(0, spatial)
        dist = np.arctan2(s, p[0]) if kappa == 1 else np.arcsinh(s)
        x = spatial * (dist / s) if s > 0 else np.zeros(3)
        return grp.exp_p(kappa, x)

    return FrameSection(kappa, evaluator, "transvection")


def transform_section(section: FrameSection, g: grp.IsometryG) -> FrameSection:
    """``b_bar = (dg)^-1 o b o g`` as a section (group form ``q -> g^-1 b(g q)``)."""
    ginv = grp.isometry_inverse(g.kappa, g.matrix)
    return FrameSection(
        section.kappa, lambda p: ginv @ section.evaluator(g.matrix @ p), f"{section.variant}^g"
    )


_REGISTRY = {
    "b0": section_b0,
    "constant": section_constant,
    "left-invariant-s3": section_left_invariant_s3,
}


def section_from_name(name: str) -> FrameSection:
    if name.startswith("screw:c="):
        return section_from_screw(float(name.split("=", 1)[1]))
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise ValueError(f"unknown section {name!r}") from None


# -- differentiation -------------------------------------------------------------


def _richardson(fn, step: float, tol: float):
    def central(h):
        return (fn(h) - fn(-h)) / (2.0 * h)

    coarse, fine = central(step), central(0.5 * step)
    better = (4.0 * fine - coarse) / 3.0
    # relative to the size of the derivative once it exceeds 1
    gap = float(np.max(np.abs(better - fine))) / max(1.0, float(np.max(np.abs(better))))
    if gap > tol:
        raise StepTooLarge(f"Richardson disagreement {gap:.3e} exceeds {tol:.1e}")
    return better


def refine_step(fn, step: float = FD_STEP, attempts: int = 4):
    """Call ``fn(step)``, dividing the step by 10 after each StepTooLarge."""
    for _ in range(attempts - 1):
        try:
            return fn(step)
        except StepTooLarge:
            step /= 10.0
    return fn(step)


def transport_curve(section: FrameSection, p, x):
    """Transvection ``sigma(t)`` along the geodesic through ``p`` with velocity ``x``.

    Returns ``(sigma, h)`` where ``h = b(p)`` in group form.
    """
    kappa = section.kappa
    h = section(p)
    hinv = grp.isometry_inverse(kappa, h)
    xo = (hinv @ x)[1:]

    def sigma(t):
        return h @ grp.exp_p(kappa, t * xo) @ hinv

    return sigma, h


def nabla_b(section: FrameSection, p, x, step: float = FD_STEP, tol: float = RICHARDSON_TOL):
    """``(nabla_x b)``: ambient 4x3 matrix of a linear map ``T_o M -> T_p M``."""
    kappa = section.kappa
    p = grp.ambient_point(kappa, p)
    x = grp.ambient_vector(kappa, x)
    sigma, _ = transport_curve(section, p, x)

    def transported(t):
        s = sigma(t)
        return (grp.isometry_inverse(kappa, s) @ section(s @ p))[:, 1:]

    return _richardson(transported, step, tol)


def _frame_coordinates(section: FrameSection, p, m):
    """``b(p)^-1 m`` for an ambient 4x3 (or 4-vector) ``m`` tangent at ``p``."""
    h = section(p)
    return (grp.isometry_inverse(section.kappa, h) @ m)[1:], h


def vorticity_vector(section: FrameSection, p, x, step: float = FD_STEP, skew_tol: float = SKEW_TOL):
    """``X^b`` with ``nabla_x b = C_{X^b} o b(p)``, in native coordinates."""
    kappa = section.kappa
    p = grp.ambient_point(kappa, p)
    nab = nabla_b(section, p, x, step)
    coords, h = _frame_coordinates(section, p, nab)
    w = alg.skew_axis(coords, tol=skew_tol)
    return grp.native(kappa, h[:, 1:] @ w)


def vorticity_h(section: FrameSection, p, x, step: float = FD_STEP) -> float:
    """``h^b(x) = <X^b, x>`` for a unit tangent vector ``x``."""
    kappa = section.kappa
    xa = grp.ambient_vector(kappa, x)
    length = float(np.sqrt(grp.inner_kappa(kappa, xa, xa)))
    if abs(length - 1.0) > 1e-9:
        raise ValueError(f"direction must be a unit vector (|x| = {length})")
    xb = grp.ambient_vector(kappa, vorticity_vector(section, p, x, step))
    return float(grp.inner_kappa(kappa, xb, xa))


def section_velocity(section: FrameSection, p, y, step: float = FD_STEP) -> grp.LieElementZ:
    """Left-trivialized ``(db)_p(y)`` in ``g_kappa``, by differences of the
    group curve ``t -> b(alpha(t))`` along the geodesic ``alpha``."""
    kappa = section.kappa
    p = grp.ambient_point(kappa, p)
    y = grp.ambient_vector(kappa, y)
    sigma, h = transport_curve(section, p, y)
    hinv = grp.isometry_inverse(kappa, h)
    deriv = _richardson(lambda t: section(sigma(t) @ p), step, RICHARDSON_TOL)
    return grp.LieElementZ.from_matrix(hinv @ deriv, kappa, tol=1e-6)


def spacelike_norm(section: FrameSection, p, y, step: float = FD_STEP) -> float:
    """``||(db)_p(y)||`` for the split metric induced from ``G_kappa``."""
    z = section_velocity(section, p, y, step)
    return float(0.25 * 2.0 * np.dot(z.x, z.xi))


def vorticity_report(section: FrameSection, p, x, step: float = FD_STEP) -> VorticityReport:
    kappa = section.kappa
    xb = vorticity_vector(section, p, x, step)
    xa = grp.ambient_vector(kappa, x)
    h = float(grp.inner_kappa(kappa, grp.ambient_vector(kappa, xb), xa))
    return VorticityReport(
        np.asarray(p, dtype=float), np.asarray(x, dtype=float), xb, h, spacelike_norm(section, p, x, step)
    )


def spacelike_vorticity_check(section: FrameSection, points, directions, step: float = FD_STEP) -> float:
    """Max of ``| ||(db)_p(y)|| - <y, y^b>/2 |`` over paired samples."""
    worst = 0.0
    for p, y in zip(points, directions):
        rep = vorticity_report(section, p, y, step)
        worst = max(worst, abs(rep.spacelike_norm - 0.5 * rep.h))
    return worst


# -- sampling ----------------------------------------------------------------------


def random_point(kappa: int, rng: np.random.Generator, radius: float = 2.0):
    """Native random point: uniform on ``S^3``, in a ball of ``R^3``, or within
    distance ``radius`` of ``o`` in ``H^3``."""
    if kappa == 1:
        return alg.random_unit_quaternions(rng)
    direction = alg.random_unit_vectors(rng)
    dist = radius * rng.uniform() ** (1.0 / 3.0)
    if kappa == 0:
        return dist * direction
    return grp.geodesic_point(-1, dist * direction)


def random_unit_tangent(kappa: int, p, rng: np.random.Generator):
    """Native unit tangent vector at ``p``."""
    if kappa == 0:
        return alg.random_unit_vectors(rng)
    p = np.asarray(p, dtype=float)
    v = np.concatenate([[0.0], rng.standard_normal(3)]) if kappa == -1 else rng.standard_normal(4)
    v = v - grp.inner_kappa(kappa, v, p) / kappa * p
    return v / np.sqrt(grp.inner_kappa(kappa, v, v))


def optimality_residual(
    section: FrameSection,
    n_samples: int = 200,
    seed: int = 0,
    sampler: Callable[[np.random.Generator], np.ndarray] | None = None,
) -> float:
    """``max |X^b - X|`` over random points and unit directions."""
    rng = np.random.default_rng(seed)
    kappa = section.kappa
    worst = 0.0
    for _ in range(n_samples):
        p = sampler(rng) if sampler is not None else random_point(kappa, rng)
        x = random_unit_tangent(kappa, grp.ambient_point(kappa, p), rng)
        xb = vorticity_vector(section, p, x)
        diff = grp.ambient_vector(kappa, xb - x)
        # tangent difference; |.| via the ambient form (positive on tangent spaces)
        worst = max(worst, float(np.sqrt(abs(grp.inner_kappa(kappa, diff, diff)))))
    return worst


def involutivity_defect(kappa: int, x, y) -> float:
    """Size of the part of ``[Z(x,x), Z(y,y)]`` transverse to ``{Z(v,v)}``.

    Writing the bracket ``Z(a, b) = Z(v, v) + Z(w, -w)``, the transverse part
    is measured by ``|a - b| = |(kappa - 1)(x * y)|``.
    """
    z = grp.bracket_z(grp.LieElementZ(kappa, x, x), grp.LieElementZ(kappa, y, y))
    return float(np.linalg.norm(z.x - z.xi))
