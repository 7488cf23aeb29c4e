"""Screw-radial maps ``phi(ru) = (l(r) u, exp(theta(r) u))`` into ``R^3 x| S^3``.

Differentials are returned left-trivialized: row ``a`` of a blade is
``(dL_{phi(v)})^-1 dphi_v(w_a)`` as a 6-array ``(xi, eta)``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import algebra as alg
from . import groups as grp
from .metrics import SPIN_FORM, NULL_TOL

# below this radius phi and its differential use the r -> 0 limits
TINY_RADIUS = 1e-9


# -- the profile l(r) = c (r - sin r)^(1/3) -------------------------------


def r_minus_sin(r):
    """``r - sin r`` without cancellation near 0."""
    r = np.asarray(r, dtype=float)
    return r**3 * alg.sinc3(r)


def ell(c: float, r):
    return c * np.cbrt(r_minus_sin(r))


def ell_prime(c: float, r):
    """``(c/3)(1 - cos r)/(r - sin r)^(2/3)``, even, with ``ell'(0) = c 6^(-1/3)``."""
    r = np.asarray(r, dtype=float)
    # (1 - cos r) = r^2 cosc(r), (r - sin r)^(2/3) = r^2 sinc3(r)^(2/3)
    return (c / 3.0) * alg.cosc(r) / np.cbrt(alg.sinc3(r)) ** 2


def ell_ratio(c: float, r):
    """``ell(r)/r``, smooth and even."""
    return c * np.cbrt(alg.sinc3(r))


def ell_inverse(c: float, s: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Solve ``ell(r) = s`` for ``r``.

    ``ell`` is odd and nondecreasing with isolated critical points at
    ``2k pi``; Newton steps are kept inside a shrinking bracket and replaced
    by bisection whenever they leave it or stall.
    """
    if s == 0:
        return 0.0
    if s < 0:
        return -ell_inverse(c, -s, tol, max_iter)
    lo, hi = 0.0, 1.0
    while ell(c, hi) < s:
        lo, hi = hi, 2.0 * hi
    r = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = float(ell(c, r)) - s
        if f > 0:
            hi = r
        else:
            lo = r
        d = float(ell_prime(c, r))
        step_ok = d > 0
        if step_ok:
            nxt = r - f / d
            step_ok = lo < nxt < hi
        if not step_ok:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - r) <= tol * max(1.0, abs(r)) or hi - lo <= tol:
            return float(nxt)
        r = nxt
    return float(r)


# -- profiles ----------------------------------------------------------------


@dataclass(frozen=True)
class Profile:
    """Odd smooth profile pair ``(l, theta)`` with derivatives."""

    l: Callable
    dl: Callable
    theta: Callable
    dtheta: Callable
    name: str = "custom"
    l_ratio: Callable | None = None

    def ratio_l(self, r):
        if self.l_ratio is not None:
            return self.l_ratio(r)
        return _ratio(self.l, self.dl, r)

    def ratio_sin_theta(self, r):
        """``sin(theta(r))/r``."""
        r = np.asarray(r, dtype=float)
        small = np.abs(r) < TINY_RADIUS
        safe = np.where(small, 1.0, r)
        return np.where(small, self.dtheta(np.zeros_like(r)), np.sin(self.theta(safe)) / safe)

    def ratio_theta(self, r):
        return _ratio(self.theta, self.dtheta, r)


def _ratio(f, df, r):
    r = np.asarray(r, dtype=float)
    small = np.abs(r) < TINY_RADIUS
    safe = np.where(small, 1.0, r)
    return np.where(small, df(np.zeros_like(r)), f(safe) / safe)


def ell_profile(c: float = 1.0, theta: str = "half", amplitude: float = 0.2) -> Profile:
    """``l = ell_c`` with ``theta = r/2`` ("half") or ``r/2 + a sin r`` ("custom")."""
    if theta == "half":
        th, dth = (lambda r: 0.5 * np.asarray(r, dtype=float)), (lambda r: np.full_like(np.asarray(r, dtype=float), 0.5))
    elif theta == "custom":

        def th(r):
            r = np.asarray(r, dtype=float)
            return 0.5 * r + amplitude * np.sin(r)

        def dth(r):
            return 0.5 + amplitude * np.cos(np.asarray(r, dtype=float))

    else:
        raise ValueError(f"unknown theta profile {theta!r}")
    return Profile(
        l=lambda r: ell(c, r),
        dl=lambda r: ell_prime(c, r),
        theta=th,
        dtheta=dth,
        name=f"ell:c={c:g},theta:{theta}",
        l_ratio=lambda r: ell_ratio(c, r),
    )


_ELL_RE = re.compile(r"^ell:c=([-+0-9.eE]+)$")


def profile_from_names(l_name: str, theta_name: str = "theta:half") -> Profile:
    """Build a profile from registry names ``ell:c=<float>`` and
    ``theta:half`` / ``theta:custom``."""
    m = _ELL_RE.match(l_name)
    if not m:
        raise ValueError(f"unknown l profile {l_name!r}")
    c = float(m.group(1))
    if c <= 0:
        raise ValueError("c must be positive")
    kind = theta_name.split(":", 1)[-1]
    return ell_profile(c, kind)


# -- the map and its differential -------------------------------------------


def _polar(v):
    v = np.asarray(v, dtype=float)
    r = np.sqrt(np.sum(v * v, axis=-1))
    safe = np.where(r < TINY_RADIUS, 1.0, r)
    u = np.where((r < TINY_RADIUS)[..., None], alg.E1, v / safe[..., None])
    return r, u


@dataclass(frozen=True)
class ScrewRadialMap:
    profile: Profile

    def __call__(self, v) -> grp.SpinMotion:
        return phi_eval(self, v)

    def differential(self, v, w):
        return differential(self.profile, v, w)

    def blade(self, v):
        return tangent_blade(self.profile, v)


def screw_map(c: float = 1.0) -> ScrewRadialMap:
    """The map ``ru -> (ell(r) u, exp(ru/2))``."""
    return ScrewRadialMap(ell_profile(c))


def phi_eval(phi: ScrewRadialMap | Profile, v) -> grp.SpinMotion:
    prof = phi.profile if isinstance(phi, ScrewRadialMap) else phi
    v = np.asarray(v, dtype=float)
    r = np.sqrt(np.sum(v * v, axis=-1))
    x = prof.ratio_l(r)[..., None] * v
    q = alg.quat_exp(prof.ratio_theta(r)[..., None] * v)
    return grp.SpinMotion(x, q)


def Phi_eval(c: float, v) -> grp.EuclideanMotion:
    """``Phi(ru) = (ell(r) u, exp(C_{ru}))`` in ``R^3 x| SO_3``."""
    v = np.asarray(v, dtype=float)
    r = np.sqrt(np.sum(v * v, axis=-1))
    return grp.EuclideanMotion(ell_ratio(c, r)[..., None] * v, alg.rotation_exp(v))


def differential(profile: Profile, v, w):
    """Left-trivialized ``dphi_v(w)`` as a 6-array.

    With ``v = r u`` and ``w = s u + z`` (``z`` orthogonal to ``u``) this is
    ``s (l' u, theta' u)`` plus
    ``(l/r) R_{-2 theta u} z`` and ``(sin theta / r)(cos theta z - sin theta u x z)``.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    r, u = _polar(v)
    s = np.sum(w * u, axis=-1)
    z = w - s[..., None] * u
    th = profile.theta(r)
    radial = np.concatenate(
        [(s * profile.dl(r))[..., None] * u, (s * profile.dtheta(r))[..., None] * u], axis=-1
    )
    # Rodrigues for the rotation about u by -2 theta applied to z (z is orthogonal to u)
    uxz = np.cross(u, z)
    c2, s2 = np.cos(2 * th)[..., None], np.sin(2 * th)[..., None]
    rot_z = c2 * z - s2 * uxz
    tangential = np.concatenate(
        [
            profile.ratio_l(r)[..., None] * rot_z,
            profile.ratio_sin_theta(r)[..., None] * (np.cos(th)[..., None] * z - np.sin(th)[..., None] * uxz),
        ],
        axis=-1,
    )
    return radial + tangential


def tangent_blade(profile: Profile, v):
    """Rows ``dphi_v(e_1), dphi_v(e_2), dphi_v(e_3)``: shape ``(..., 3, 6)``."""
    v = np.asarray(v, dtype=float)
    return np.stack([differential(profile, v, e) for e in np.eye(3)], axis=-2)


def dphi_closed(phi: ScrewRadialMap | Profile, r: float, u=alg.E1):
    """Blade at ``r u`` on the frame ``(u, z1, z2)``: radial row first.

    ``z1, z2`` complete ``u`` to a right-handed orthonormal frame.  At
    ``r = 0`` this is the limit blade with rows ``(l'(0) e, theta'(0) e)``.
    """
    prof = phi.profile if isinstance(phi, ScrewRadialMap) else phi
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    z1, z2 = alg.orthonormal_completion(u)
    v = r * u
    return np.stack([differential(prof, v, w) for w in (u, z1, z2)])


def dphi_fd(phi: ScrewRadialMap | Profile, v, w, step: float = 1e-5):
    """Central difference of ``t -> phi(v + t w)``, pulled to the identity."""
    if step <= 0:
        raise ValueError("step must be positive")
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    plus, minus, mid = phi_eval(phi, v + step * w), phi_eval(phi, v - step * w), phi_eval(phi, v)
    dx = (plus.x - minus.x) / (2 * step)
    dq = (plus.q - minus.q) / (2 * step)
    xi, eta = grp.left_diff_spin_inverse(mid, (dx, dq))
    return np.concatenate([xi, eta], axis=-1)


def pullback_metric(phi: ScrewRadialMap | Profile, v):
    """``G_ij(v) = <dphi(e_i), dphi(e_j)>`` for the split metric on ``R^3 x| S^3``."""
    prof = phi.profile if isinstance(phi, ScrewRadialMap) else phi
    b = tangent_blade(prof, v)
    return b @ SPIN_FORM @ np.swapaxes(b, -1, -2)


# -- space-likeness ------------------------------------------------------------


class SpacelikeClass(enum.Enum):
    SPACELIKE = "spacelike"
    DEGENERATE = "degenerate"
    NOT_SPACELIKE = "not_spacelike"


def spacelike_classify(profile: Profile, r: float, tol: float = NULL_TOL) -> SpacelikeClass:
    """Space-likeness of ``dphi`` at radius ``r``.

    Space-like iff ``l'(r) > 0``, ``theta'(r) > 0`` and
    ``k pi < theta(r) < k pi + pi/2`` for an integer ``k >= 0`` (the angle
    condition is dropped at ``r = 0``).  Any quantity within ``tol`` of its
    boundary gives DEGENERATE.
    """
    if r < 0:
        raise ValueError("r must be nonnegative")
    dl = float(profile.dl(np.float64(r)))
    dth = float(profile.dtheta(np.float64(r)))
    margins = [dl, dth]
    angle_ok = True
    if r > 0:
        th = float(profile.theta(np.float64(r)))
        k = math.floor(th / math.pi)
        rest = th - k * math.pi
        # distance to the nearest point of (pi/2) Z
        margins.append(min(rest, abs(math.pi / 2 - rest), math.pi - rest))
        angle_ok = k >= 0 and 0 < rest < math.pi / 2
    if any(abs(m) <= tol for m in margins):
        return SpacelikeClass.DEGENERATE
    if dl > 0 and dth > 0 and angle_ok:
        return SpacelikeClass.SPACELIKE
    return SpacelikeClass.NOT_SPACELIKE
