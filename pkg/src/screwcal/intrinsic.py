"""Intrinsic geometry of the ball ``B = {|v| < pi}`` with the metric induced
by the screw map ``phi(ru) = (ell(r) u, exp(ru/2))``.

In polar coordinates the induced metric is diagonal: ``ell'(r)/2`` radially
and ``ell(r) sin(r) / (2 r^2)`` on unit tangential vectors.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline

from . import algebra as alg
from .screwmaps import ell, ell_prime, ell_profile, pullback_metric

N_PANELS = 512
PANEL_ORDER = 8
TAIL_ORDER = 32


def radial_speed(c: float, r):
    """``|alpha'(r)|`` for the radial geodesic ``alpha(r) = phi(r u)``."""
    return np.sqrt(ell_prime(c, r) / 2.0)


def _check_radius(r, upper=math.pi):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > upper):
        raise ValueError(f"radius must lie in [0, {upper}]")
    return r



@dataclass
class IntrinsicProfile:
    """Arc length ``sigma(r)`` tabulated on ``[0, pi]``.

    Panels of equal width carry ``PANEL_ORDER``-point Gauss rules; between
    the knots ``sigma`` is the cubic Hermite interpolant with exact slopes,
    which is monotone because the slopes are positive and the data increase.
    """

    c: float
    knots: np.ndarray = field(init=False, repr=False)
    values: np.ndarray = field(init=False, repr=False)
    spline: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")
        self.knots = np.linspace(0.0, math.pi, N_PANELS + 1)
        x, w = np.polynomial.legendre.leggauss(PANEL_ORDER)
        a, b = self.knots[:-1, None], self.knots[1:, None]
        nodes = 0.5 * (b - a) * x + 0.5 * (b + a)
        panels = np.sum(0.5 * (b - a) * w * radial_speed(self.c, nodes), axis=1)
        self.values = np.concatenate([[0.0], np.cumsum(panels)])
        self.spline = CubicHermiteSpline(self.knots, self.values, radial_speed(self.c, self.knots))

    @property
    def length(self) -> float:
        return float(self.values[-1])

    def sigma(self, r):
        r = _check_radius(r)
        return self.spline(r)

    def tail(self, r):
        """``sigma(pi) - sigma(r)`` without cancellation for ``r`` near ``pi``."""
        r = _check_radius(r)
        near = (math.pi - r) < 0.1
        out = self.length - self.spline(r)
        if np.any(near):
            rn = np.atleast_1d(r[near] if r.ndim else r)
            x, w = np.polynomial.legendre.leggauss(TAIL_ORDER)
            nodes = 0.5 * (math.pi - rn)[:, None] * x + 0.5 * (math.pi + rn)[:, None]
            direct = np.sum(0.5 * (math.pi - rn)[:, None] * w * radial_speed(self.c, nodes), axis=1)
            if r.ndim:
                out = np.array(out, dtype=float)
                out[near] = direct
            else:
                out = direct[0]
        return out


@lru_cache(maxsize=16)
def intrinsic_profile(c: float) -> IntrinsicProfile:
    return IntrinsicProfile(c)


def sigma(c: float, r):
    return intrinsic_profile(c).sigma(r)


def completion_length(c: float) -> float:
    """``L = sigma(pi)``: length of every radial geodesic from ``0``."""
    return intrinsic_profile(c).length


def circle_length(c: float, r):
    """Length of the image of a Euclidean great circle of radius ``r``."""
    r = _check_radius(r)
    return math.sqrt(2.0) * math.pi * np.sqrt(ell(c, r) * np.sin(r))


def sphere_area(c: float, r):
    r = _check_radius(r)
    return 2.0 * math.pi * ell(c, r) * np.sin(r)


def area_ratio(c: float, r):
    """Area of ``S_r`` over the Euclidean area of a sphere of radius ``L - sigma(r)``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= math.pi):
        raise ValueError("area_ratio is defined for 0 < r < pi")
    return sphere_area(c, r) / (4.0 * math.pi * intrinsic_profile(c).tail(r) ** 2)


def completion_distance_bound(c: float, r: float, s: float, u=alg.E1, v=alg.E1) -> float:
    """Upper bound for the distance from ``phi(s u)`` to ``phi(r v)``: the radial
    segment from ``s`` to ``r`` and then half a great circle of radius ``r``."""
    if not 0 <= s <= r < math.pi:
        raise ValueError("need 0 <= s <= r < pi")
    for w in (u, v):
        if abs(float(np.linalg.norm(w)) - 1.0) > 1e-12:
            raise ValueError("u and v must be unit vectors")
    prof = intrinsic_profile(c)
    return float(prof.tail(s) - prof.tail(r)) + 0.5 * float(circle_length(c, r))


def eventual_monotone_onset(c: float, radii) -> float | None:
    """Smallest grid radius beyond which ``area_ratio`` increases along the grid."""
    radii = np.sort(np.asarray(radii, dtype=float))
    vals = area_ratio(c, radii)
    rising = np.diff(vals) > 0
    if not rising[-1]:
        return None
    k = len(rising)
    while k > 0 and rising[k - 1]:
        k -= 1
    return float(radii[k])


# -- independent oracles ----------------------------------------------------------


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 50) -> float:
    """Adaptive Simpson rule with Richardson correction."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left, right = simpson(fa, flm, fm, a, m), simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth - 1
        )

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def sigma_quad(c: float, r: float) -> float:
    """``sigma(r)`` by adaptive Gauss-Kronrod (QUADPACK)."""
    val, _ = quad(lambda t: float(radial_speed(c, t)), 0.0, r, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def completion_length_oracles(c: float):
    """``(simpson, gauss_kronrod)`` values of ``L``."""
    simpson = adaptive_simpson(lambda t: float(radial_speed(c, t)), 0.0, math.pi)
    return simpson, sigma_quad(c, math.pi)


def circle_length_quadrature(c: float, r: float, n: int = 256, axis=alg.E3) -> float:
    """Integrate the induced speed of ``t -> r (cos t a + sin t b)`` with the
    full pullback metric, ``(a, b)`` completing ``axis``."""
    a, b = alg.orthonormal_completion(np.asarray(axis, dtype=float) / np.linalg.norm(axis))
    t = 2 * math.pi * np.arange(n) / n
    pts = r * (np.cos(t)[:, None] * a + np.sin(t)[:, None] * b)
    vel = r * (-np.sin(t)[:, None] * a + np.cos(t)[:, None] * b)
    g = pullback_metric(ell_profile(c), pts)
    speed = np.sqrt(np.einsum("ni,nij,nj->n", vel, g, vel))
    return float(np.sum(speed) * 2 * math.pi / n)


def sphere_area_quadrature(c: float, r: float, n_theta: int = 32, n_phi: int = 64) -> float:
    """2D quadrature of the induced area element on the sphere of radius ``r``."""
    xc, wc = np.polynomial.legendre.leggauss(n_theta)
    az = 2 * math.pi * np.arange(n_phi) / n_phi
    ct, sp = np.meshgrid(xc, az, indexing="ij")
    s = np.sqrt(1 - ct**2)
    u = np.stack([s * np.cos(sp), s * np.sin(sp), ct], axis=-1)
    e_theta = np.stack([ct * np.cos(sp), ct * np.sin(sp), -s], axis=-1)
    e_phi = np.stack([-np.sin(sp), np.cos(sp), np.zeros_like(sp)], axis=-1)
    g = pullback_metric(ell_profile(c), r * u)
    g2 = np.empty(g.shape[:-2] + (2, 2))
    for i, a in enumerate((e_theta, e_phi)):
        for j, b in enumerate((e_theta, e_phi)):
            g2[..., i, j] = np.einsum("...i,...ij,...j->...", a, g, b)
    density = np.sqrt(np.linalg.det(g2)) * r * r
    return float(np.sum(wc[:, None] * density) * 2 * math.pi / n_phi)


def write_profile_csv(path, c: float, radii):
    """Rows ``(r, sigma, circle_length, sphere_area, area_ratio)``."""
    radii = np.asarray(radii, dtype=float)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["r", "sigma", "circle_length", "sphere_area", "area_ratio"])
        for r in radii:
            ratio = float(area_ratio(c, r)) if 0 < r < math.pi else float("nan")
            row = [r, float(sigma(c, r)), float(circle_length(c, r)), float(sphere_area(c, r)), ratio]
            out.writerow([f"{x:.17g}" for x in row])
