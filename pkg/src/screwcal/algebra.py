"""Quaternion, cross-product and rotation algebra.

Vectors are numpy arrays of shape ``(..., 3)``; quaternions are arrays of
shape ``(..., 4)`` ordered ``(w, x, y, z)`` so that ``R^3`` is identified
with the imaginary quaternions.  Every function broadcasts over leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# below this argument the trigonometric ratios switch to Taylor expansions
SMALL_ANGLE = 1e-4
UNIT_DRIFT_TOL = 1e-12

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

QUAT_ONE = np.array([1.0, 0.0, 0.0, 0.0])
QUAT_I = np.array([0.0, 1.0, 0.0, 0.0])
QUAT_J = np.array([0.0, 0.0, 1.0, 0.0])
QUAT_K = np.array([0.0, 0.0, 0.0, 1.0])


class NotSkew(ValueError):
    """Raised when a matrix handed to :func:`skew_axis` is not skew-symmetric."""


def _norm(v):
    return np.sqrt(np.sum(np.square(v), axis=-1))


def sinc(t):
    """sin(t)/t, switching to its Taylor series for small ``|t|``."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < SMALL_ANGLE
    safe = np.where(small, 1.0, t)
    t2 = t * t
    return np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(safe) / safe)


def cosc(t):
    """(1 - cos t)/t^2 with a small-argument series."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < SMALL_ANGLE
    safe = np.where(small, 1.0, t)
    t2 = t * t
    half = 0.5 * safe
    # 2 sin^2(t/2) avoids the cancellation in 1 - cos t
    direct = 2.0 * np.sin(half) ** 2 / (safe * safe)
    return np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0, direct)


def sinc3(t):
    """(t - sin t)/t^3, by its Taylor series below ``|t| = 0.5``."""
    t = np.asarray(t, dtype=float)
    small = np.abs(t) < 0.5
    safe = np.where(small, 1.0, t)
    t2 = t * t
    series = 0.0
    # coefficients (-1)^n / (2n + 3)!, n = 0..6
    for n in range(6, -1, -1):
        series = series * t2 + (-1) ** n / math.factorial(2 * n + 3)
    return np.where(small, series, (safe - np.sin(safe)) / safe**3)


# -- cross products ---------------------------------------------------------


def cross(a, b):
    return np.cross(a, b)


def hat(xi):
    """Matrix of ``y -> xi x y``; broadcasts to shape ``(..., 3, 3)``."""
    xi = np.asarray(xi, dtype=float)
    m = np.zeros(xi.shape[:-1] + (3, 3))
    x, y, z = xi[..., 0], xi[..., 1], xi[..., 2]
    m[..., 0, 1] = -z
    m[..., 0, 2] = y
    m[..., 1, 0] = z
    m[..., 1, 2] = -x
    m[..., 2, 0] = -y
    m[..., 2, 1] = x
    return m


@dataclass(frozen=True)
class Skew3:
    """Skew operator ``C_xi``.  Only the axis is stored, so the matrix is
    skew-symmetric by construction."""

    axis: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return hat(self.axis)

    def __call__(self, y):
        return np.cross(self.axis, y)


def cross_operator(xi) -> Skew3:
    return Skew3(np.array(xi, dtype=float))


def skew_axis(m, tol: float = 1e-9):
    """Axis ``w`` with ``C_w`` equal to the skew part of ``m``.

    Raises
    ------
    NotSkew
        If ``|m + m^T|`` exceeds ``tol`` (max-abs entry).
    """
    m = np.asarray(m, dtype=float)
    defect = np.max(np.abs(m + np.swapaxes(m, -1, -2))) if m.size else 0.0
    if defect > tol:
        raise NotSkew(f"matrix is not skew-symmetric (|M + M^T| = {defect:.3e})")
    skew = 0.5 * (m - np.swapaxes(m, -1, -2))
    return np.stack([skew[..., 2, 1], skew[..., 0, 2], skew[..., 1, 0]], axis=-1)


# -- rotations --------------------------------------------------------------


def rotation_exp(x):
    """Rodrigues formula: ``exp(C_x)``, the rotation by ``|x|`` about ``x``."""
    x = np.asarray(x, dtype=float)
    t = _norm(x)
    k = hat(x)
    a = sinc(t)[..., None, None]
    b = cosc(t)[..., None, None]
    return np.eye(3) + a * k + b * (k @ k)


def rotation_left_jacobian(w):
    """``int_0^1 exp(s C_w) ds`` in closed form."""
    w = np.asarray(w, dtype=float)
    t = _norm(w)
    k = hat(w)
    return np.eye(3) + cosc(t)[..., None, None] * k + sinc3(t)[..., None, None] * (k @ k)


def is_rotation(a, tol: float = 1e-10) -> bool:
    a = np.asarray(a, dtype=float)
    orth = np.max(np.abs(np.swapaxes(a, -1, -2) @ a - np.eye(3)))
    return bool(orth <= tol and np.all(np.abs(np.linalg.det(a) - 1.0) <= tol))


# -- quaternions ------------------------------------------------------------


def quat(w, v):
    """Assemble a quaternion from a real part and a 3-vector part."""
    v = np.asarray(v, dtype=float)
    w = np.broadcast_to(np.asarray(w, dtype=float), v.shape[:-1])
    return np.concatenate([w[..., None], v], axis=-1)


def pure(v):
    """Imaginary quaternion with vector part ``v``."""
    return quat(0.0, v)


def qmul(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, pv = p[..., 0], p[..., 1:]
    qw, qv = q[..., 0], q[..., 1:]
    w = pw * qw - np.sum(pv * qv, axis=-1)
    v = pw[..., None] * qv + qw[..., None] * pv + np.cross(pv, qv)
    return quat(w, v)


def qconj(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm(q):
    return _norm(np.asarray(q, dtype=float))


def qnormalize(q):
    q = np.asarray(q, dtype=float)
    return q / qnorm(q)[..., None]


def unit_drift(q) -> float:
    """Largest ``| |q|^2 - 1 |`` over a batch; reported by diagnostics."""
    q = np.asarray(q, dtype=float)
    return float(np.max(np.abs(np.sum(q * q, axis=-1) - 1.0)))


def quat_exp(xi):
    """``cos|xi| + sin|xi| xi/|xi|`` for an imaginary quaternion ``xi``."""
    xi = np.asarray(xi, dtype=float)
    t = _norm(xi)
    return quat(np.cos(t), sinc(t)[..., None] * xi)


def quat_log(q):
    """Imaginary ``xi`` with ``|xi| <= pi`` and ``quat_exp(xi) = q``."""
    q = qnormalize(q)
    v = q[..., 1:]
    s = _norm(v)
    angle = np.arctan2(s, q[..., 0])
    # angle/s -> 1/w as s -> 0 with w > 0; near q = -1 the log is not unique
    coef = np.where(s > 1e-300, angle / np.where(s > 1e-300, s, 1.0), 1.0)
    return coef[..., None] * v


def conjugate(q, x):
    """``q x q^-1`` for a unit quaternion ``q`` and a 3-vector ``x``."""
    return qmul(qmul(q, pure(x)), qconj(q))[..., 1:]


def conjugation_rotation(q):
    """Matrix of ``I_q: x -> q x q^-1`` (``q`` unit)."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    m = np.empty(q.shape[:-1] + (3, 3))
    m[..., 0, 0] = w * w + x * x - y * y - z * z
    m[..., 0, 1] = 2 * (x * y - w * z)
    m[..., 0, 2] = 2 * (x * z + w * y)
    m[..., 1, 0] = 2 * (x * y + w * z)
    m[..., 1, 1] = w * w - x * x + y * y - z * z
    m[..., 1, 2] = 2 * (y * z - w * x)
    m[..., 2, 0] = 2 * (x * z - w * y)
    m[..., 2, 1] = 2 * (y * z + w * x)
    m[..., 2, 2] = w * w - x * x - y * y + z * z
    return m


def left_mult_matrix(p):
    """4x4 matrix of ``z -> p z`` on ``R^4 = H`` with basis ``(1, i, j, k)``."""
    p = np.asarray(p, dtype=float)
    w, x, y, z = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    rows = [
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def right_mult_matrix(q):
    """4x4 matrix of ``z -> z q``."""
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    rows = [
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def orthonormal_completion(u):
    """Unit vectors ``(z1, z2)`` with ``(u, z1, z2)`` a right-handed
    orthonormal frame; ``u`` must be a unit vector.

    Gram-Schmidt against the axis where ``u`` has its smallest component, so
    the choice is deterministic.
    """
    u = np.asarray(u, dtype=float)
    idx = np.argmin(np.abs(u), axis=-1)
    seed = np.eye(3)[idx]
    z1 = seed - np.sum(seed * u, axis=-1, keepdims=True) * u
    z1 = z1 / _norm(z1)[..., None]
    z2 = np.cross(u, z1)
    return z1, z2


def random_unit_vectors(rng: np.random.Generator, n=None, dim: int = 3):
    shape = (dim,) if n is None else (n, dim)
    v = rng.standard_normal(shape)
    return v / _norm(v)[..., None]


def random_unit_quaternions(rng: np.random.Generator, n=None):
    return random_unit_vectors(rng, n, dim=4)
