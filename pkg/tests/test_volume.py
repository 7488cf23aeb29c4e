import math

import numpy as np
import pytest

from screwcal import calibration as cal
from screwcal import groups as grp
from screwcal import screwmaps as sm
from screwcal import volume as vol
from tests import oracle_values as ov


def base(c=1.0):
    return vol.screw_parametrization(sm.ell_profile(c))


def test_grid_weights_integrate_polynomials():
    g = vol.quadrature_grid(vol.ball(1.3, n_r=10, n_theta=8, n_phi=12))
    assert math.fsum(g.weights) == pytest.approx(4 / 3 * math.pi * 1.3**3, rel=1e-13)
    z2 = math.fsum(g.weights * g.points[:, 2] ** 2)
    assert z2 == pytest.approx(4 / 15 * math.pi * 1.3**5, rel=1e-13)


def test_patch_grid_covers_a_spherical_cap():
    d = vol.patch(0.0, 1.0, math.pi / 3, n_r=6, n_theta=6, n_phi=6)
    g = vol.quadrature_grid(d)
    assert math.fsum(g.weights) == pytest.approx(2 * math.pi / 3 * (1 - math.cos(math.pi / 3)), rel=1e-13)


def test_ball_volume_matches_oracle():
    v, err = vol.submanifold_volume(base(), vol.ball(math.pi / 2))
    assert v == pytest.approx(ov.BALL_VOLUME_HALF_PI, rel=1e-10)
    assert err < 1e-8
    assert vol.radial_volume_oracle(1.0, 0, math.pi / 2) == pytest.approx(ov.BALL_VOLUME_HALF_PI, rel=1e-12)


def test_shell_volume_matches_oracle():
    v, _ = vol.submanifold_volume(base(), vol.shell(1, 0.2))
    assert v == pytest.approx(ov.SHELL_VOLUME, rel=1e-9)


def test_omega_integral_matches_oracle():
    om = vol.omega_integral(base(), vol.ball(math.pi / 2), cal.calibrating_constant(1.0))
    assert om == pytest.approx(ov.BALL_OMEGA_HALF_PI, rel=1e-10)


def test_empty_domain_has_zero_volume():
    assert vol.submanifold_volume(base(), vol.DomainSpec("shell", 1.0, 1.0)) == (0.0, 0.0)


def test_non_spacelike_region_is_rejected():
    with pytest.raises(cal.NotSpacelike):
        vol.submanifold_volume(base(), vol.patch(4.0, 5.0, math.pi, n_r=4, n_theta=4, n_phi=4))


@pytest.mark.parametrize("domain", [vol.ball(2.0), vol.shell(1, 0.3)])
def test_bump_vanishes_to_second_order(domain):
    rho, drho = vol.bump(domain)
    for edge in {domain.r_min, domain.r_max} - {0.0}:
        assert rho(edge) == 0 and drho(edge) == 0
    r = np.linspace(domain.r_min, domain.r_max, 101)[1:-1]
    h = 1e-6
    assert np.allclose((rho(r + h) - rho(r - h)) / (2 * h), drho(r), atol=1e-8)


def test_perturbed_blade_matches_finite_differences(rng):
    domain = vol.ball(math.pi / 2)
    spec = vol.PerturbationSpec((0.3, -0.2, 0.1), (0.0, 0.5, 0.2), 0.1)
    pmap = vol.perturb_map(base(), spec, domain)
    step = 1e-6
    for v in rng.uniform(-0.8, 0.8, (10, 3)):
        blade = pmap.blade(v)
        g = pmap(v)
        for a in range(3):
            e = np.eye(3)[a]
            p, m = pmap(v + step * e), pmap(v - step * e)
            xi, eta = grp.left_diff_spin_inverse(g, ((p.x - m.x) / (2 * step), (p.q - m.q) / (2 * step)))
            assert np.max(np.abs(np.concatenate([xi, eta]) - blade[a])) < 1e-8


def test_perturbation_fixes_the_boundary(rng):
    domain = vol.ball(1.0)
    pmap = vol.perturb_map(base(), vol.PerturbationSpec((1, 0, 0), (0, 1, 0), 0.1), domain)
    u = rng.standard_normal(3)
    v = u / np.linalg.norm(u)
    assert vol.group_distance(pmap(v), base()(v)) < 1e-15


def test_domain_names():
    assert vol.domain_from_name("ball:1.5").r_max == 1.5
    d = vol.domain_from_name("shell:1:0.3")
    assert d.r_min == pytest.approx(2 * math.pi + 0.3) and d.r_max == pytest.approx(3 * math.pi - 0.3)
    assert vol.domain_from_name("patch:0:1:0.5").cap == 0.5
    for bad in ("disk:1", "ball", "patch:1:2"):
        with pytest.raises(ValueError):
            vol.domain_from_name(bad)
    with pytest.raises(ValueError):
        vol.DomainSpec("ball", 2.0, 1.0)


def test_small_experiment_is_thread_independent():
    domain = vol.ball(math.pi / 2, n_r=12, n_theta=6, n_phi=8)
    dirs = vol.lie_directions()[:2]
    amps = (-0.05, 0.0, 0.05)
    one = vol.maximization_experiment(1.0, domain, dirs, amps, threads=1)
    two = vol.maximization_experiment(1.0, domain, dirs, amps, threads=3)
    assert one.to_dict() == two.to_dict()
    assert one.violations == 0
    assert one.max_leading <= 0
    with pytest.raises(ValueError):
        vol.maximization_experiment(1.0, domain, dirs, (0.1,))


def test_grid_csv(tmp_path):
    path = tmp_path / "grid.csv"
    domain = vol.ball(1.0, n_r=2, n_theta=2, n_phi=3)
    vol.dump_grid_csv(path, base(), domain)
    lines = path.read_text().splitlines()
    assert lines[0] == "r,i_theta,i_phi,sqrt_det_G,omega_density"
    assert len(lines) == 1 + domain.n_nodes


@pytest.mark.parametrize("domain", [vol.ball(math.pi / 2), vol.shell(1, 0.2)])
def test_doubling_the_grid_changes_volume_little(domain):
    v, _ = vol.submanifold_volume(base(), domain, refine=False)
    fine, _ = vol.submanifold_volume(base(), domain.refined(2.0), refine=False)
    assert abs(fine - v) / v < 1e-7


def test_omega_exceeds_volume_on_the_ball():
    """Integrated form of the pointwise omega/vol = sec(r/2) relation."""
    domain = vol.ball(math.pi / 2)
    om = vol.omega_integral(base(), domain, cal.calibrating_constant(1.0))
    v, _ = vol.submanifold_volume(base(), domain, refine=False)
    assert om / v == pytest.approx(ov.BALL_OMEGA_HALF_PI / ov.BALL_VOLUME_HALF_PI, rel=1e-10)
    assert om > v


def test_perturbation_distance_is_of_order_amplitude():
    domain = vol.ball(math.pi / 2, n_r=8, n_theta=6, n_phi=8)
    pts = vol.quadrature_grid(domain).points
    dists = []
    for eps in (0.05, 0.025):
        pmap = vol.perturb_map(base(), vol.PerturbationSpec((0, 0, 0), (1, 0, 0), eps), domain)
        dists.append(float(np.max(vol.group_distance(pmap(pts), base()(pts)))))
    assert dists[0] < 0.05 * 3
    assert dists[0] / dists[1] == pytest.approx(2.0, rel=0.05)
    b = base()
    assert vol.perturb_map(b, vol.PerturbationSpec(amplitude=0.0), domain) is b
