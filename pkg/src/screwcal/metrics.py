"""Split (3,3) inner products on the isometry groups and their verifiers.

Tangent vectors of ``R^3 x| S^3`` and ``S^3 x S^3`` are stored
left-trivialized as arrays of shape ``(..., 6)``: the first three entries are
the first factor, the last three the second.  Tangent vectors of ``G_kappa``
are :class:`~screwcal.groups.LieElementZ`.
"""

from __future__ import annotations

import enum

import numpy as np

from . import algebra as alg
from . import groups as grp

NULL_TOL = 1e-10

_HALF_SWAP = np.block([[np.zeros((3, 3)), np.eye(3)], [np.eye(3), np.zeros((3, 3))]])
# Gram matrices in the canonical 6-bases
G_FORM = 0.25 * _HALF_SWAP
SPIN_FORM = 0.5 * _HALF_SWAP
S3XS3_FORM = 0.5 * np.diag([1.0, 1.0, 1.0, -1.0, -1.0, -1.0])


class MetricKind(enum.Enum):
    G0 = "g"
    SPIN = "spin"
    S3XS3 = "s3xs3"


class CausalType(enum.Enum):
    SPACELIKE = "spacelike"
    NULL = "null"
    TIMELIKE = "timelike"


def as6(v) -> np.ndarray:
    """Accept a 6-array or a pair of 3-vectors."""
    if isinstance(v, tuple):
        return np.concatenate([np.asarray(v[0], dtype=float), np.asarray(v[1], dtype=float)], axis=-1)
    return np.asarray(v, dtype=float)


def _dot(a, b):
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def inner_g(a: grp.LieElementZ, b: grp.LieElementZ):
    """``<Z(x,xi), Z(y,eta)> = (<x,eta> + <y,xi>)/4``."""
    if a.kappa != b.kappa:
        raise grp.KappaMismatch(f"kappa {a.kappa} vs {b.kappa}")
    return 0.25 * (_dot(a.x, b.xi) + _dot(b.x, a.xi))


def inner_spin(v, w):
    """``<(x,xi), (y,eta)> = (<x,eta> + <y,xi>)/2`` at the identity of ``R^3 x| S^3``."""
    v, w = as6(v), as6(w)
    return 0.5 * (_dot(v[..., :3], w[..., 3:]) + _dot(w[..., :3], v[..., 3:]))


def inner_s3xs3(v, w):
    """``<(x,y), (x',y')> = (<x,x'> - <y,y'>)/2`` on ``S^3 x S^3``.

    Works left-trivialized (pairs of 3-vectors / 6-arrays) or ambient (pairs
    of quaternions tangent at some ``(p, q)``): left translation by unit
    quaternions is orthogonal, so both give the same number.
    """
    if isinstance(v, tuple):
        (x, y), (x2, y2) = v, w
    else:
        v, w = as6(v), as6(w)
        x, y, x2, y2 = v[..., :3], v[..., 3:], w[..., :3], w[..., 3:]
    return 0.5 * (_dot(x, x2) - _dot(y, y2))


def norm(kind: MetricKind, v):
    """Square norm ``||v|| = <v, v>`` (may be negative)."""
    if kind is MetricKind.G0:
        return inner_g(v, v)
    if kind is MetricKind.SPIN:
        return inner_spin(v, v)
    return inner_s3xs3(v, v)


def gram(kind: MetricKind, vectors, kappa: int = 0) -> np.ndarray:
    """Gram matrix of a list of tangent vectors (6-arrays or LieElementZ)."""
    if kind is MetricKind.G0:
        vs = [v if isinstance(v, grp.LieElementZ) else grp.LieElementZ(kappa, v[:3], v[3:]) for v in vectors]
        return np.array([[inner_g(a, b) for b in vs] for a in vs])
    vs = as6(np.asarray(vectors, dtype=float))
    form = SPIN_FORM if kind is MetricKind.SPIN else S3XS3_FORM
    return vs @ form @ vs.T


def signature(matrix, tol: float = 1e-12):
    """``(n_positive, n_negative, n_zero)`` eigenvalue counts of a symmetric matrix."""
    ev = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    return int(np.sum(ev > tol)), int(np.sum(ev < -tol)), int(np.sum(np.abs(ev) <= tol))


def causal_type(kind: MetricKind, v, tol: float = NULL_TOL) -> CausalType:
    n = float(norm(kind, v))
    if abs(n) <= tol:
        return CausalType.NULL
    return CausalType.SPACELIKE if n > 0 else CausalType.TIMELIKE


# -- left translation to the identity ---------------------------------------


def pull_to_identity(kind: MetricKind, basepoint, vector):
    """Apply ``(dL_{g^-1})`` to an ambient tangent vector at ``basepoint``.

    ``SPIN``: basepoint a SpinMotion, vector ``(dx, dq)``; returns a 6-array.
    ``G0``: basepoint an IsometryG, vector a 4x4 matrix; returns LieElementZ.
    ``S3XS3``: basepoint ``(p, q)``, vector ``(dp, dq)`` quaternions; returns a 6-array.
    """
    if kind is MetricKind.SPIN:
        return as6(grp.left_diff_spin_inverse(basepoint, vector))
    if kind is MetricKind.G0:
        g = basepoint
        m = grp.isometry_inverse(g.kappa, g.matrix) @ np.asarray(vector, dtype=float)
        return grp.LieElementZ.from_matrix(m, g.kappa, tol=1e-8)
    p, q = basepoint
    dp, dq = vector
    return np.concatenate(
        [alg.qmul(alg.qconj(p), dp)[..., 1:], alg.qmul(alg.qconj(q), dq)[..., 1:]], axis=-1
    )


def push_from_identity(kind: MetricKind, basepoint, v):
    """Inverse of :func:`pull_to_identity`."""
    if kind is MetricKind.SPIN:
        v = as6(v)
        return grp.left_diff_spin(basepoint, (v[..., :3], v[..., 3:]))
    if kind is MetricKind.G0:
        return basepoint.matrix @ v.matrix
    p, q = basepoint
    v = as6(v)
    return alg.qmul(p, alg.pure(v[..., :3])), alg.qmul(q, alg.pure(v[..., 3:]))


# -- verifiers -----------------------------------------------------------------


def _random_z(kappa, rng, n):
    return grp.LieElementZ(kappa, rng.standard_normal((n, 3)), rng.standard_normal((n, 3)))


def check_ad_skew(kappa: int, n_samples: int = 1000, seed: int = 0) -> float:
    """Max over samples of ``|<[Z,W],V> + <W,[Z,V]>|`` for metric (Z-form)."""
    grp.check_kappa(kappa)
    rng = np.random.default_rng(seed)
    z, w, v = (_random_z(kappa, rng, n_samples) for _ in range(3))
    lhs = inner_g(grp.bracket_z(z, w), v) + inner_g(w, grp.bracket_z(z, v))
    return float(np.max(np.abs(lhs)))


def bracket_commutator_defect(kappa: int, n_samples: int = 1000, seed: int = 0) -> float:
    """Max entry of ``Z(bracket_z(a, b)) - [Z(a), Z(b)]`` over random pairs."""
    rng = np.random.default_rng(seed)
    a, b = _random_z(kappa, rng, n_samples), _random_z(kappa, rng, n_samples)
    ma, mb = a.matrix, b.matrix
    return float(np.max(np.abs(grp.bracket_z(a, b).matrix - (ma @ mb - mb @ ma))))


def canonical_gram(kind: MetricKind) -> np.ndarray:
    return {MetricKind.G0: G_FORM, MetricKind.SPIN: SPIN_FORM, MetricKind.S3XS3: S3XS3_FORM}[kind]


def random_spin_motions(rng: np.random.Generator, n: int, scale: float = 2.0) -> grp.SpinMotion:
    return grp.SpinMotion(rng.uniform(-scale, scale, (n, 3)), alg.random_unit_quaternions(rng, n))


def pi_isometry_defect(n_samples: int = 1000, seed: int = 0) -> float:
    """``| ||dPi(w)||_{G0} - ||w||_{SPIN} |`` at random base points.

    ``w = dL_g(v)`` is ambient; ``dPi`` is the exact differential and the
    image is pulled back to the identity of ``G_0`` by matrix inversion.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    gs = random_spin_motions(rng, n_samples)
    vs = rng.standard_normal((n_samples, 6))
    for idx in range(n_samples):
        g = grp.SpinMotion(gs.x[idx], gs.q[idx])
        v = vs[idx]
        w = grp.left_diff_spin(g, (v[:3], v[3:]))
        dx, da = grp.dPi(g, w)
        h = grp.euclid_to_isometry(grp.covering_Pi(g))
        tangent = grp.euclid_to_matrix(dx, da)
        tangent[0, 0] = 0.0
        z = pull_to_identity(MetricKind.G0, h, tangent)
        worst = max(worst, abs(float(inner_g(z, z) - inner_spin(v, v))))
    return worst


def p_isometry_defect(n_samples: int = 1000, seed: int = 0) -> float:
    """``| ||dP(v,w)||_{G,kappa=1} - ||(v,w)||_{S3xS3} |`` at random ``(p, q)``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    ps = alg.random_unit_quaternions(rng, n_samples)
    qs = alg.random_unit_quaternions(rng, n_samples)
    vs = rng.standard_normal((n_samples, 6))
    for p, q, v in zip(ps, qs, vs):
        dp = alg.qmul(p, alg.pure(v[:3]))
        dq = alg.qmul(q, alg.pure(v[3:]))
        # d/dt L_{p(t)} R_{conj q(t)}
        tangent = alg.left_mult_matrix(dp) @ alg.right_mult_matrix(alg.qconj(q)) + alg.left_mult_matrix(
            p
        ) @ alg.right_mult_matrix(alg.qconj(dq))
        g = grp.IsometryG(1, grp.p_morphism(p, q))
        z = pull_to_identity(MetricKind.G0, g, tangent)
        worst = max(worst, abs(float(inner_g(z, z) - inner_s3xs3((dp, dq), (dp, dq)))))
    return worst


def rotational_action(q, g: grp.SpinMotion) -> grp.SpinMotion:
    """``(q, (x, p)) -> (q x q^-1, q p q^-1)``."""
    return grp.SpinMotion(alg.conjugate(q, g.x), alg.qmul(alg.qmul(q, g.q), alg.qconj(q)))


def action_isometry_defect(n_samples: int = 200, seed: int = 0, step: float = 1e-5) -> float:
    """Finite-difference check that the rotational action preserves ``inner_spin``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        g = grp.SpinMotion(rng.uniform(-2, 2, 3), alg.random_unit_quaternions(rng))
        q = alg.random_unit_quaternions(rng)
        v = rng.standard_normal(6)

        def moved(t):
            return rotational_action(q, g * grp.spin_exp(t * v[:3], t * v[3:]))

        plus, minus = moved(step), moved(-step)
        w = ((plus.x - minus.x) / (2 * step), (plus.q - minus.q) / (2 * step))
        pulled = pull_to_identity(MetricKind.SPIN, moved(0.0), w)
        worst = max(worst, abs(float(inner_spin(pulled, pulled) - inner_spin(v, v))))
    return worst
