import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from screwcal import algebra as alg

finite = st.floats(-10, 10, allow_nan=False)
vec3 = arrays(np.float64, 3, elements=finite)


def series_exp(m, terms=40):
    """Truncated exponential series with scaling and squaring."""
    k = max(0, int(np.ceil(np.log2(max(np.abs(m).max(), 1e-300)))) + 1)
    a = m / 2.0**k
    out, term = np.eye(3), np.eye(3)
    for n in range(1, terms):
        term = term @ a / n
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def test_cross_examples():
    assert np.allclose(alg.cross(alg.E1, alg.E2), alg.E3)
    assert np.allclose(alg.cross(alg.E1, alg.E1), 0)
    assert np.allclose(alg.cross([1, 2, 3], [4, 5, 6]), [-3, 6, -3])


@given(vec3, vec3)
def test_cross_antisymmetric_and_orthogonal(a, b):
    c = alg.cross(a, b)
    assert np.allclose(c, -alg.cross(b, a))
    scale = 1 + np.linalg.norm(a) ** 2 * np.linalg.norm(b)
    assert abs(np.dot(c, a)) <= 1e-12 * scale


def test_cross_operator_examples():
    m = alg.cross_operator(alg.E1).matrix
    assert np.allclose(m @ alg.E2, alg.E3)
    assert np.allclose(m @ alg.E3, -alg.E2)
    assert np.allclose(m @ alg.E1, 0)
    assert np.all(alg.cross_operator(np.zeros(3)).matrix == 0)


@given(vec3, vec3)
def test_cross_operator_applies_cross(xi, y):
    op = alg.cross_operator(xi)
    assert np.allclose(op.matrix @ y, np.cross(xi, y))
    assert np.allclose(op(y), np.cross(xi, y))
    assert np.array_equal(op.matrix.T, -op.matrix)


@given(vec3)
def test_skew_axis_round_trip(xi):
    assert np.max(np.abs(alg.skew_axis(alg.hat(xi)) - xi)) < 1e-12


def test_skew_axis_examples():
    assert np.allclose(alg.skew_axis(alg.cross_operator(alg.E2).matrix), alg.E2)
    assert np.allclose(alg.skew_axis(np.zeros((3, 3))), 0)
    with pytest.raises(alg.NotSkew):
        alg.skew_axis(np.eye(3))


def test_rotation_exp_examples():
    q = alg.rotation_exp(0.5 * math.pi * alg.E1)
    assert np.allclose(q @ alg.E2, alg.E3, atol=1e-15)
    assert np.allclose(alg.rotation_exp(math.pi * alg.E1), np.diag([1.0, -1.0, -1.0]), atol=1e-15)
    assert np.array_equal(alg.rotation_exp(np.zeros(3)), np.eye(3))


def test_rotation_exp_matches_series(rng):
    for x in rng.uniform(-5, 5, (200, 3)):
        assert np.max(np.abs(alg.rotation_exp(x) - series_exp(alg.hat(x)))) < 1e-10


def test_rotation_exp_fixes_axis_and_turns_orthogonal_vectors(rng):
    for x in rng.standard_normal((50, 3)):
        r = alg.rotation_exp(x)
        assert np.allclose(r @ x, x)
        t = np.linalg.norm(x)
        u = x / t
        y = alg.orthonormal_completion(u)[0]
        assert np.allclose(r @ y, math.cos(t) * y + math.sin(t) * np.cross(u, y))
        assert alg.is_rotation(r)


def test_rotation_exp_periodic(rng):
    for x in rng.standard_normal((50, 3)):
        t = np.linalg.norm(x)
        assert np.max(np.abs(alg.rotation_exp(x) - alg.rotation_exp(x + 2 * math.pi * x / t))) < 1e-10


def test_small_angle_branches_are_continuous():
    for t in (1e-4 * (1 - 1e-9), 1e-4 * (1 + 1e-9)):
        assert alg.sinc(t) == pytest.approx(math.sin(t) / t, rel=1e-15)
        assert alg.cosc(t) == pytest.approx(2 * math.sin(t / 2) ** 2 / t**2, rel=1e-12)
    assert alg.sinc3(0.0) == pytest.approx(1 / 6)
    assert alg.sinc3(0.5 - 1e-12) == pytest.approx(alg.sinc3(0.5), rel=1e-10)


def test_quat_exp_examples():
    assert np.allclose(alg.quat_exp(0.5 * math.pi * alg.E1), alg.QUAT_I)
    u = alg.random_unit_vectors(np.random.default_rng(0))
    assert np.allclose(alg.quat_exp(math.pi * u), -alg.QUAT_ONE)
    q = alg.quat_exp(0.3 * alg.E2)
    assert q[0] == pytest.approx(0.955336489125606, abs=1e-15)
    assert q[2] == pytest.approx(0.29552020666133955, abs=1e-15)
    assert np.array_equal(alg.quat_exp(np.zeros(3)), alg.QUAT_ONE)


def test_quat_log_inverts_exp(rng):
    for xi in rng.uniform(-1, 1, (100, 3)):
        assert np.allclose(alg.quat_log(alg.quat_exp(xi)), xi)


def test_conjugation_rotation_examples():
    m = alg.conjugation_rotation(alg.QUAT_I)
    assert np.allclose(m @ alg.E2, -alg.E2) and np.allclose(m @ alg.E3, -alg.E3)
    assert np.allclose(alg.conjugation_rotation(alg.QUAT_ONE), np.eye(3))


def test_conjugation_rotation_properties(rng):
    qs = alg.random_unit_quaternions(rng, 100)
    ms = alg.conjugation_rotation(qs)
    assert np.allclose(ms, alg.conjugation_rotation(-qs))
    for q, m in zip(qs, ms):
        assert alg.is_rotation(m)
        x = rng.standard_normal(3)
        assert np.allclose(m @ x, alg.conjugate(q, x))


def test_half_angle_identity(rng):
    xs = rng.uniform(-6, 6, (1000, 3))
    err = np.abs(alg.rotation_exp(xs) - alg.conjugation_rotation(alg.quat_exp(0.5 * xs)))
    assert err.max() < 1e-12


@settings(max_examples=200)
@given(arrays(np.float64, 4, elements=finite), arrays(np.float64, 4, elements=finite), arrays(np.float64, 4, elements=finite))
def test_quaternion_product_associative_and_multiplicative(p, q, r):
    lhs = alg.qmul(alg.qmul(p, q), r)
    rhs = alg.qmul(p, alg.qmul(q, r))
    scale = 1 + np.linalg.norm(p) * np.linalg.norm(q) * np.linalg.norm(r)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale
    assert abs(alg.qnorm(alg.qmul(p, q)) - alg.qnorm(p) * alg.qnorm(q)) <= 1e-12 * scale


def test_left_and_right_multiplication_matrices(rng):
    p, z = rng.standard_normal((2, 4))
    assert np.allclose(alg.left_mult_matrix(p) @ z, alg.qmul(p, z))
    assert np.allclose(alg.right_mult_matrix(p) @ z, alg.qmul(z, p))


def test_orthonormal_completion_is_right_handed(rng):
    for u in alg.random_unit_vectors(rng, 50):
        z1, z2 = alg.orthonormal_completion(u)
        frame = np.stack([u, z1, z2])
        assert np.allclose(frame @ frame.T, np.eye(3))
        assert np.linalg.det(frame) == pytest.approx(1.0)


def test_unit_drift_reports_departure():
    assert alg.unit_drift(alg.QUAT_ONE) == 0.0
    assert alg.unit_drift(1.001 * alg.QUAT_ONE) == pytest.approx(0.002001)
