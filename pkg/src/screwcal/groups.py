"""Isometry groups of the 3-dimensional space forms and their Lie algebras.

Two concrete models of the Euclidean motion group are provided,
``R^3 x| S^3`` (:class:`SpinMotion`) and ``R^3 x| SO_3``
(:class:`EuclideanMotion`), plus the uniform 4x4 picture of
``G_kappa = Iso_o(M_kappa)`` for ``kappa in {-1, 0, 1}``.

In the 4x4 picture points of ``M_kappa`` are ambient vectors of ``R^4``:
for ``kappa = +-1`` they satisfy ``<p, p>_kappa = kappa``; for ``kappa = 0``
a point ``a`` of ``R^3`` is stored as ``(1, a)``.  The base point is
``o = e_0`` and ``T_o M_kappa = e_0^perp = R^3``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra as alg

KAPPAS = (-1, 0, 1)
E0 = np.array([1.0, 0.0, 0.0, 0.0])


class KappaMismatch(ValueError):
    pass


class NotLieElement(ValueError):
    pass


class AntipodalPoint(ValueError):
    pass


def check_kappa(kappa: int) -> int:
    if kappa not in KAPPAS:
        raise ValueError(f"kappa must be one of {KAPPAS}, got {kappa!r}")
    return int(kappa)


def form_matrix(kappa: int) -> np.ndarray:
    """``J_kappa = diag(kappa, 1, 1, 1)``."""
    return np.diag([float(kappa), 1.0, 1.0, 1.0])


def inner_kappa(kappa: int, v, w):
    """Ambient product ``kappa v0 w0 + v1 w1 + v2 w2 + v3 w3``."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    return kappa * v[..., 0] * w[..., 0] + np.sum(v[..., 1:] * w[..., 1:], axis=-1)


# -- R^3 x| S^3 -------------------------------------------------------------


@dataclass(frozen=True)
class SpinMotion:
    """Element ``(x, q)`` of ``R^3 x| S^3`` with ``(x,p)(y,q) = (x + p y p^-1, p q)``.

    Fields may carry leading batch axes.
    """

    x: np.ndarray
    q: np.ndarray

    @classmethod
    def identity(cls) -> "SpinMotion":
        return cls(np.zeros(3), alg.QUAT_ONE.copy())

    def __mul__(self, other: "SpinMotion") -> "SpinMotion":
        return spin_mul(self, other)

    def inverse(self) -> "SpinMotion":
        qc = alg.qconj(self.q)
        return SpinMotion(-alg.conjugate(qc, self.x), qc)


def spin_mul(g: SpinMotion, h: SpinMotion) -> SpinMotion:
    x = np.asarray(g.x) + alg.conjugate(g.q, h.x)
    return SpinMotion(x, alg.qnormalize(alg.qmul(g.q, h.q)))


def spin_exp(xi, eta) -> SpinMotion:
    """One-parameter subgroup ``exp((xi, eta))`` of ``R^3 x| S^3``.

    The rotation part is ``e^eta``; the translation part integrates the
    conjugation ``R_{2 s eta}`` applied to ``xi`` over ``s in [0, 1]``.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    jac = alg.rotation_left_jacobian(2.0 * eta)
    x = np.einsum("...ij,...j->...i", jac, xi)
    return SpinMotion(x, alg.quat_exp(eta))


def left_diff_spin(g: SpinMotion, v):
    """``(dL_g)`` at the identity: ``(xi, eta) -> (p xi p^-1, p eta)``.

    Returns the ambient tangent vector ``(dx, dq)`` at ``g``; ``dq`` is a
    quaternion tangent to ``S^3`` at ``g.q``.
    """
    xi, eta = v
    return alg.conjugate(g.q, xi), alg.qmul(g.q, alg.pure(eta))


def left_diff_spin_inverse(g: SpinMotion, w):
    """Inverse of :func:`left_diff_spin`: ambient ``(dx, dq)`` at ``g`` to
    left-trivialized ``(xi, eta)``."""
    dx, dq = w
    qc = alg.qconj(g.q)
    return alg.conjugate(qc, dx), alg.qmul(qc, dq)[..., 1:]


def adjoint_spin(g: SpinMotion, v):
    """``Ad_g(xi, eta) = (I_q xi + 2 x * I_q eta, I_q eta)`` for ``g = (x, q)``."""
    xi, eta = v
    ieta = alg.conjugate(g.q, eta)
    return alg.conjugate(g.q, xi) + 2.0 * np.cross(g.x, ieta), ieta


# -- R^3 x| SO_3 ------------------------------------------------------------


@dataclass(frozen=True)
class EuclideanMotion:
    """Element ``(x, A)`` of ``R^3 x| SO_3``; ``(x,A)(y,B) = (x + A y, A B)``."""

    x: np.ndarray
    A: np.ndarray

    @classmethod
    def identity(cls) -> "EuclideanMotion":
        return cls(np.zeros(3), np.eye(3))

    def __mul__(self, other: "EuclideanMotion") -> "EuclideanMotion":
        return euclid_mul(self, other)

    def inverse(self) -> "EuclideanMotion":
        at = np.swapaxes(self.A, -1, -2)
        return EuclideanMotion(-np.einsum("...ij,...j->...i", at, self.x), at)

    def homogeneous(self) -> np.ndarray:
        """The 4x4 matrix ``[[1, 0], [x, A]]`` of ``G_0``."""
        return euclid_to_matrix(self.x, self.A)


def euclid_mul(g: EuclideanMotion, h: EuclideanMotion) -> EuclideanMotion:
    x = np.asarray(g.x) + np.einsum("...ij,...j->...i", g.A, h.x)
    return EuclideanMotion(x, g.A @ h.A)


def euclid_to_matrix(x, A):
    x = np.asarray(x, dtype=float)
    A = np.asarray(A, dtype=float)
    m = np.zeros(x.shape[:-1] + (4, 4))
    m[..., 0, 0] = 1.0
    m[..., 1:, 0] = x
    m[..., 1:, 1:] = A
    return m


def covering_Pi(g: SpinMotion) -> EuclideanMotion:
    """``Pi(x, q) = (x, I_q)``, the two-to-one covering morphism."""
    return EuclideanMotion(np.asarray(g.x, dtype=float), alg.conjugation_rotation(g.q))


def dPi(g: SpinMotion, w):
    """Differential of ``Pi`` at ``g`` on an ambient tangent ``(dx, dq)``.

    Returns ``(dx, dA)`` with ``dA = d/dt I_{q(t)}`` computed exactly from
    ``z -> dq z q^-1 + q z dq^-1``.
    """
    dx, dq = w
    q = np.asarray(g.q, dtype=float)
    cols = []
    for e in np.eye(3):
        z = alg.pure(e)
        val = alg.qmul(alg.qmul(dq, z), alg.qconj(q)) + alg.qmul(alg.qmul(q, z), alg.qconj(dq))
        cols.append(val[..., 1:])
    return np.asarray(dx, dtype=float), np.stack(cols, axis=-1)


# -- the Z_kappa parametrization of g_kappa --------------------------------


def z_matrix(kappa: int, x, xi) -> np.ndarray:
    """``Z_kappa(x, xi) = [[0, -kappa x^T], [x, C_xi]]``."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    shape = np.broadcast_shapes(x.shape, xi.shape)[:-1]
    m = np.zeros(shape + (4, 4))
    m[..., 1:, 0] = x
    m[..., 0, 1:] = -kappa * x
    m[..., 1:, 1:] = alg.hat(xi)
    return m


def z_unpack(m, kappa: int, tol: float = 1e-10):
    """Recover ``(x, xi)`` from ``Z_kappa(x, xi)``.

    Raises
    ------
    NotLieElement
        If ``m`` departs from the ``Z_kappa`` pattern by more than ``tol``.
    """
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (4, 4):
        raise NotLieElement(f"expected a 4x4 matrix, got shape {m.shape}")
    x = m[..., 1:, 0]
    block = m[..., 1:, 1:]
    defect = max(
        float(np.max(np.abs(m[..., 0, 0]))),
        float(np.max(np.abs(m[..., 0, 1:] + kappa * x))),
        float(np.max(np.abs(block + np.swapaxes(block, -1, -2)))),
    )
    if defect > tol:
        raise NotLieElement(f"matrix is not of the form Z_{kappa}(x, xi) (defect {defect:.3e})")
    return x.copy(), alg.skew_axis(block, tol=np.inf)


@dataclass(frozen=True)
class LieElementZ:
    kappa: int
    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        check_kappa(self.kappa)
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "xi", np.asarray(self.xi, dtype=float))

    @property
    def matrix(self) -> np.ndarray:
        return z_matrix(self.kappa, self.x, self.xi)

    @classmethod
    def from_matrix(cls, m, kappa: int, tol: float = 1e-10) -> "LieElementZ":
        return cls(kappa, *z_unpack(m, kappa, tol))

    def __add__(self, other: "LieElementZ") -> "LieElementZ":
        _same_kappa(self, other)
        return LieElementZ(self.kappa, self.x + other.x, self.xi + other.xi)

    def __sub__(self, other: "LieElementZ") -> "LieElementZ":
        _same_kappa(self, other)
        return LieElementZ(self.kappa, self.x - other.x, self.xi - other.xi)

    def __rmul__(self, s: float) -> "LieElementZ":
        return LieElementZ(self.kappa, s * self.x, s * self.xi)


def _same_kappa(a: LieElementZ, b: LieElementZ) -> int:
    if a.kappa != b.kappa:
        raise KappaMismatch(f"kappa {a.kappa} vs {b.kappa}")
    return a.kappa


def bracket_z(a: LieElementZ, b: LieElementZ) -> LieElementZ:
    """``[Z(x,xi), Z(y,eta)] = Z(xi*y - eta*x, kappa x*y + xi*eta)``."""
    kappa = _same_kappa(a, b)
    x = np.cross(a.xi, b.x) - np.cross(b.xi, a.x)
    xi = kappa * np.cross(a.x, b.x) + np.cross(a.xi, b.xi)
    return LieElementZ(kappa, x, xi)


def exp_p(kappa: int, x) -> np.ndarray:
    """Closed-form ``exp(Z_kappa(x, 0))`` (transvection at ``o``).

    ``N = Z(x,0)`` satisfies ``N^3 = -kappa |x|^2 N``, so
    ``exp(N) = I + s N + c N^2`` with trigonometric, polynomial or
    hyperbolic coefficients according to ``kappa``.
    """
    x = np.asarray(x, dtype=float)
    t = np.sqrt(np.sum(x * x, axis=-1))
    n = z_matrix(kappa, x, np.zeros_like(x))
    if kappa == 1:
        s, c = alg.sinc(t), alg.cosc(t)
    elif kappa == 0:
        s, c = np.ones_like(t), np.full_like(t, 0.5)
    else:
        small = t < 1e-4
        ts = np.where(small, 1.0, t)
        t2 = t * t
        s = np.where(small, 1.0 + t2 / 6.0 + t2 * t2 / 120.0, np.sinh(ts) / ts)
        c = np.where(small, 0.5 + t2 / 24.0 + t2 * t2 / 720.0, (np.cosh(ts) - 1.0) / ts**2)
    return np.eye(4) + s[..., None, None] * n + c[..., None, None] * (n @ n)


def exp_k(xi) -> np.ndarray:
    """``exp(Z(0, xi))``: the isotropy rotation ``diag(1, exp(C_xi))``."""
    xi = np.asarray(xi, dtype=float)
    m = np.zeros(xi.shape[:-1] + (4, 4))
    m[..., 0, 0] = 1.0
    m[..., 1:, 1:] = alg.rotation_exp(xi)
    return m


def p_morphism(p, q) -> np.ndarray:
    """Matrix of ``z -> p z q^-1`` on ``R^4 = H``; an element of ``SO_4``."""
    return alg.left_mult_matrix(p) @ alg.right_mult_matrix(alg.qconj(q))


# -- G_kappa as 4x4 matrices -------------------------------------------------


def isometry_defect(kappa: int, g) -> float:
    g = np.asarray(g, dtype=float)
    if kappa == 0:
        a = g[1:, 1:]
        return float(
            max(
                np.max(np.abs(g[0] - E0)),
                np.max(np.abs(a.T @ a - np.eye(3))),
                abs(np.linalg.det(a) - 1.0),
            )
        )
    j = form_matrix(kappa)
    defect = float(np.max(np.abs(g.T @ j @ g - j)))
    defect = max(defect, abs(np.linalg.det(g) - 1.0))
    if kappa == -1 and g[0, 0] <= 0:
        defect = max(defect, 1.0)
    return defect


@dataclass(frozen=True)
class IsometryG:
    """Direct isometry of ``M_kappa`` as a 4x4 matrix (``kappa`` stored explicitly)."""

    kappa: int
    matrix: np.ndarray

    def __post_init__(self):
        check_kappa(self.kappa)
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=float))

    @classmethod
    def identity(cls, kappa: int) -> "IsometryG":
        return cls(kappa, np.eye(4))

    def __mul__(self, other: "IsometryG") -> "IsometryG":
        if self.kappa != other.kappa:
            raise KappaMismatch(f"kappa {self.kappa} vs {other.kappa}")
        return IsometryG(self.kappa, self.matrix @ other.matrix)

    def inverse(self) -> "IsometryG":
        return IsometryG(self.kappa, isometry_inverse(self.kappa, self.matrix))

    def apply(self, p):
        return self.matrix @ np.asarray(p, dtype=float)

    @property
    def basepoint(self) -> np.ndarray:
        return self.matrix[:, 0].copy()

    def defect(self) -> float:
        return isometry_defect(self.kappa, self.matrix)


def isometry_inverse(kappa: int, g):
    g = np.asarray(g, dtype=float)
    if kappa == 0:
        a = np.swapaxes(g[..., 1:, 1:], -1, -2)
        x = g[..., 1:, 0]
        return euclid_to_matrix(-np.einsum("...ij,...j->...i", a, x), a)
    j = form_matrix(kappa)
    return j @ np.swapaxes(g, -1, -2) @ j


def euclid_to_isometry(g: EuclideanMotion) -> IsometryG:
    return IsometryG(0, g.homogeneous())


def isometry_to_euclid(g: IsometryG) -> EuclideanMotion:
    if g.kappa != 0:
        raise KappaMismatch("only kappa = 0 isometries are Euclidean motions")
    return EuclideanMotion(g.matrix[1:, 0].copy(), g.matrix[1:, 1:].copy())


def random_isometry(kappa: int, rng: np.random.Generator, scale: float = 1.0) -> IsometryG:
    """Random element of ``G_kappa``; ``scale`` bounds the translation size
    for ``kappa in {0, -1}``."""
    check_kappa(kappa)
    if kappa == 1:
        p, q = alg.random_unit_quaternions(rng, 2)
        return IsometryG(1, p_morphism(p, q))
    rot = exp_k(alg.random_unit_vectors(rng) * rng.uniform(0.0, np.pi))
    x = alg.random_unit_vectors(rng) * rng.uniform(0.0, scale)
    return IsometryG(kappa, exp_p(kappa, x) @ rot)


# -- frames --------------------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    """Direct linear isometry ``b: T_o M -> T_p M``.

    ``point`` is the ambient 4-vector of ``p`` and ``b`` the 4x3 matrix whose
    columns are the images of ``e_1, e_2, e_3``.
    """

    kappa: int
    point: np.ndarray
    b: np.ndarray

    @property
    def position(self) -> np.ndarray:
        """``p`` as a point of ``R^3`` (``kappa = 0``) or of ``R^4``."""
        return self.point[1:].copy() if self.kappa == 0 else self.point.copy()

    @property
    def rotation(self) -> np.ndarray:
        """``b`` as a 3x3 rotation (``kappa = 0``) or the 4x3 ambient matrix."""
        return self.b[1:, :].copy() if self.kappa == 0 else self.b.copy()

    def coordinates(self, w):
        """Coordinates in ``T_o M = R^3`` of an ambient tangent vector ``w`` at ``p``."""
        # J_0 = diag(0, 1, 1, 1) also works for kappa = 0
        return self.b.T @ form_matrix(self.kappa) @ np.asarray(w, dtype=float)


def frame_of(g: IsometryG) -> Frame:
    """``I(g) = (dg)_o``: base point ``g(o)`` and the restriction of ``g`` to ``T_o M``."""
    m = g.matrix
    return Frame(g.kappa, m[:, 0].copy(), m[:, 1:].copy())


def isometry_of(frame: Frame) -> IsometryG:
    """Inverse of :func:`frame_of`."""
    m = np.zeros((4, 4))
    m[:, 0] = frame.point
    m[:, 1:] = frame.b
    return IsometryG(frame.kappa, m)


def cartan_decompose(g: IsometryG, antipodal_tol: float = 1e-9):
    """Split ``g = exp(Z(x, 0)) k`` with ``k`` fixing ``o``.

    Raises
    ------
    AntipodalPoint
        For ``kappa = 1`` when ``g(o)`` is within ``antipodal_tol`` of ``-e_0``.
    """
    kappa = g.kappa
    p = g.matrix[:, 0]
    spatial = p[1:]
    s = float(np.linalg.norm(spatial))
    if kappa == 0:
        x = spatial.copy()
    else:
        if kappa == 1 and np.linalg.norm(p + E0) <= antipodal_tol:
            raise AntipodalPoint("g(o) is the antipode of o; the decomposition is not unique")
        dist = np.arctan2(s, p[0]) if kappa == 1 else np.arcsinh(s)
        x = spatial * (dist / s) if s > 0 else np.zeros(3)
    k = exp_p(kappa, -x) @ g.matrix
    return LieElementZ(kappa, x, np.zeros(3)), IsometryG(kappa, k)


# -- ambient <-> native coordinates --------------------------------------------


def ambient_point(kappa: int, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if kappa == 0 and p.shape[-1] == 3:
        return np.concatenate([np.ones(p.shape[:-1] + (1,)), p], axis=-1)
    return p


def ambient_vector(kappa: int, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if kappa == 0 and v.shape[-1] == 3:
        return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)
    return v


def native(kappa: int, v) -> np.ndarray:
    """Drop the homogeneous coordinate for ``kappa = 0``."""
    v = np.asarray(v, dtype=float)
    return v[..., 1:] if kappa == 0 else v


def geodesic_point(kappa: int, x) -> np.ndarray:
    """Point at distance ``|x|`` from ``o`` in direction ``x``: ``exp(Z(x,0)) o``."""
    return exp_p(kappa, x)[..., :, 0]


# -- serialization ---------------------------------------------------------------


def to_json(obj):
    """Plain nested lists for group elements (row-major matrices)."""
    if isinstance(obj, SpinMotion):
        return {"x": np.asarray(obj.x).tolist(), "q": np.asarray(obj.q).tolist()}
    if isinstance(obj, EuclideanMotion):
        return {"x": np.asarray(obj.x).tolist(), "A": np.asarray(obj.A).tolist()}
    if isinstance(obj, IsometryG):
        return {"kappa": obj.kappa, "matrix": obj.matrix.tolist()}
    if isinstance(obj, LieElementZ):
        return {"kappa": obj.kappa, "x": obj.x.tolist(), "xi": obj.xi.tolist()}
    if isinstance(obj, Frame):
        return {"kappa": obj.kappa, "point": obj.point.tolist(), "b": obj.b.tolist()}
    raise TypeError(f"cannot serialize {type(obj).__name__}")
