import math

import numpy as np
import pytest

from screwcal import intrinsic as intr
from tests import oracle_values as ov


def test_radial_speed_oracles():
    assert intr.radial_speed(1.0, 0.0) == pytest.approx(ov.RADIAL_SPEED_ZERO, abs=1e-14)
    assert intr.radial_speed(1.0, math.pi) == pytest.approx(ov.RADIAL_SPEED_PI, abs=1e-14)


def test_completion_length_and_sigma():
    assert intr.completion_length(1.0) == pytest.approx(ov.COMPLETION_LENGTH, abs=1e-12)
    assert intr.sigma(1.0, math.pi / 2) == pytest.approx(ov.SIGMA_HALF_PI, abs=1e-12)
    assert intr.sigma(1.0, 0.0) == 0.0


def test_closed_forms_match_oracles():
    assert intr.circle_length(1.0, math.pi / 2) == pytest.approx(ov.CIRCLE_LENGTH_HALF_PI, abs=1e-13)
    assert intr.sphere_area(1.0, math.pi / 2) == pytest.approx(ov.SPHERE_AREA_HALF_PI, abs=1e-13)
    assert intr.area_ratio(1.0, math.pi - 0.1) == pytest.approx(ov.AREA_RATIO_PI_MINUS_0_1, rel=1e-10)
    assert intr.area_ratio(1.0, math.pi - 0.01) == pytest.approx(ov.AREA_RATIO_PI_MINUS_0_01, rel=1e-9)


def test_sigma_against_two_quadratures():
    for r in (0.3, 1.0, 2.0, 3.0):
        assert intr.sigma(1.0, r) == pytest.approx(intr.sigma_quad(1.0, r), abs=1e-12)
    simpson, gauss = intr.completion_length_oracles(2.0)
    assert abs(simpson - gauss) < 1e-9
    assert abs(intr.completion_length(2.0) - gauss) < 1e-12


def test_sigma_is_increasing():
    vals = intr.sigma(1.0, np.linspace(0, math.pi, 1001))
    assert np.all(np.diff(vals) > 0)


def test_tail_without_cancellation():
    r = math.pi - 1e-7
    expect = 1e-7 * ov.RADIAL_SPEED_PI
    assert intr.intrinsic_profile(1.0).tail(r) == pytest.approx(expect, rel=1e-6)


@pytest.mark.parametrize("r", [0.3, 1.5, 2.9])
def test_closed_forms_match_raw_quadrature(r):
    assert intr.circle_length_quadrature(1.0, r) == pytest.approx(float(intr.circle_length(1.0, r)), rel=1e-10)
    assert intr.sphere_area_quadrature(1.0, r) == pytest.approx(float(intr.sphere_area(1.0, r)), rel=1e-10)


def test_circle_length_is_axis_independent(rng):
    axis = rng.standard_normal(3)
    assert intr.circle_length_quadrature(1.0, 1.2, axis=axis) == pytest.approx(float(intr.circle_length(1.0, 1.2)), rel=1e-10)


def test_area_ratio_diverges_and_is_eventually_monotone():
    radii = math.pi - np.logspace(-1, -6, 11)
    assert np.max(intr.area_ratio(1.0, radii)) > 1e3
    onset = intr.eventual_monotone_onset(1.0, np.linspace(2.0, math.pi - 1e-4, 200))
    assert onset is not None and onset < math.pi


def test_completion_distance_bound_collapses():
    assert intr.completion_distance_bound(1.0, math.pi - 1e-6, math.pi - 1e-6) < 0.01
    far = intr.completion_distance_bound(1.0, 1.0, 0.5)
    assert far > intr.completion_distance_bound(1.0, 3.0, 3.0)


def test_domain_errors():
    with pytest.raises(ValueError):
        intr.sigma(1.0, 4.0)
    with pytest.raises(ValueError):
        intr.area_ratio(1.0, math.pi)
    with pytest.raises(ValueError):
        intr.completion_distance_bound(1.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        intr.IntrinsicProfile(0.0)


def test_profile_csv(tmp_path):
    path = tmp_path / "profile.csv"
    intr.write_profile_csv(path, 1.0, [0.0, 1.0, math.pi])
    lines = path.read_text().splitlines()
    assert lines[0] == "r,sigma,circle_length,sphere_area,area_ratio"
    assert len(lines) == 4 and lines[1].endswith("nan")
