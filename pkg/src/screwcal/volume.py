"""Volumes of space-like 3-submanifolds of ``R^3 x| S^3`` parametrized over
domains of ``R^3``, and a maximality experiment for screw maps.

Integrals use a tensor grid: Gauss-Legendre in ``r``, Gauss-Legendre in
``cos(polar angle)`` and the periodic trapezoid rule in the azimuth.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import groups as grp
from .calibration import NotSpacelike, calibrating_constant, omega_at_identity
from .metrics import SPIN_FORM
from .screwmaps import Profile, ell_profile, phi_eval, tangent_blade

REL_TOL = 1e-7
OMEGA_REL_TOL = 1e-6
DEFAULT_AMPLITUDES = (-0.1, -0.05, -0.01, 0.0, 0.01, 0.05, 0.1)
FAMILY_NOTE = (
    "competitors form a finite family of compactly supported right translations; "
    "maximality among all homologous space-like submanifolds is not tested"
)


# -- domains and grids -------------------------------------------------------------


@dataclass(frozen=True)
class DomainSpec:
    """Region ``r_min < |v| < r_max`` with polar angle below ``cap``.

    ``cap = pi`` gives a full ball or shell.
    """

    kind: str
    r_min: float
    r_max: float
    cap: float = math.pi
    n_r: int = 48
    n_theta: int = 20
    n_phi: int = 30

    def __post_init__(self):
        if self.kind not in ("ball", "shell", "patch"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not 0 <= self.r_min <= self.r_max:
            raise ValueError("need 0 <= r_min <= r_max")
        if not 0 < self.cap <= math.pi:
            raise ValueError("cap must lie in (0, pi]")

    @property
    def n_nodes(self) -> int:
        return self.n_r * self.n_theta * self.n_phi

    def refined(self, factor: float = 2.0) -> "DomainSpec":
        return replace(
            self,
            n_r=int(round(self.n_r * factor)),
            n_theta=int(round(self.n_theta * factor)),
            n_phi=int(round(self.n_phi * factor)),
        )

    def in_support(self, r):
        return (r > self.r_min) & (r < self.r_max)


def ball(r0: float, **resolution) -> DomainSpec:
    return DomainSpec("ball", 0.0, r0, **resolution)


def shell(k: int = 1, delta: float = 0.2, **resolution) -> DomainSpec:
    """``2k pi + delta < |v| < (2k+1) pi - delta``."""
    return DomainSpec("shell", 2 * k * math.pi + delta, (2 * k + 1) * math.pi - delta, **resolution)


def patch(r_min: float, r_max: float, cap: float, **resolution) -> DomainSpec:
    return DomainSpec("patch", r_min, r_max, cap, **resolution)


def domain_from_name(name: str, **resolution) -> DomainSpec:
    """``ball:<r0>``, ``shell:<k>[:<delta>]`` or ``patch:<r_min>:<r_max>:<cap>``."""
    kind, *args = name.split(":")
    vals = [float(a) for a in args]
    if kind == "ball" and len(vals) == 1:
        return ball(vals[0], **resolution)
    if kind == "shell" and len(vals) in (1, 2):
        return shell(int(vals[0]), *vals[1:], **resolution)
    if kind == "patch" and len(vals) == 3:
        return patch(*vals, **resolution)
    raise ValueError(f"cannot parse domain {name!r}")


@dataclass(frozen=True)
class Grid:
    points: np.ndarray  # (N, 3)
    weights: np.ndarray  # (N,)
    radii: np.ndarray  # (N,)
    index: np.ndarray  # (N, 3) integer (i_r, i_theta, i_phi)


def quadrature_grid(domain: DomainSpec) -> Grid:
    xr, wr = np.polynomial.legendre.leggauss(domain.n_r)
    a, b = domain.r_min, domain.r_max
    r = 0.5 * (b - a) * xr + 0.5 * (b + a)
    wr = 0.5 * (b - a) * wr * r * r

    xc, wc = np.polynomial.legendre.leggauss(domain.n_theta)
    lo = math.cos(domain.cap)
    cos_t = 0.5 * (1 - lo) * xc + 0.5 * (1 + lo)
    wc = 0.5 * (1 - lo) * wc
    sin_t = np.sqrt(1 - cos_t**2)

    az = 2 * math.pi * np.arange(domain.n_phi) / domain.n_phi
    wa = np.full(domain.n_phi, 2 * math.pi / domain.n_phi)

    ir, it, ip = np.meshgrid(
        np.arange(domain.n_r), np.arange(domain.n_theta), np.arange(domain.n_phi), indexing="ij"
    )
    ir, it, ip = ir.ravel(), it.ravel(), ip.ravel()
    u = np.stack([sin_t[it] * np.cos(az[ip]), sin_t[it] * np.sin(az[ip]), cos_t[it]], axis=-1)
    return Grid(r[ir, None] * u, wr[ir] * wc[it] * wa[ip], r[ir], np.stack([ir, it, ip], axis=-1))


# -- parametrized maps ---------------------------------------------------------------


@dataclass(frozen=True)
class PerturbationSpec:
    """``v -> phi(v) exp(amplitude * rho(|v|) * W)`` with ``W = (xi, eta)``."""

    xi: tuple = (0.0, 0.0, 0.0)
    eta: tuple = (0.0, 0.0, 0.0)
    amplitude: float = 0.0

    @property
    def direction(self) -> np.ndarray:
        return np.concatenate([np.asarray(self.xi, float), np.asarray(self.eta, float)])

    def label(self) -> str:
        return "W=(" + ",".join(f"{v:g}" for v in self.direction) + ")"


def bump(domain: DomainSpec):
    """Radial profile ``rho`` and ``rho'`` vanishing to second order at the
    boundary of the domain.

    Ball: ``(1 - s^2)^2`` with ``s = r / r0``, an even function so the
    perturbation is smooth at the origin.  Shell or patch:
    ``16 t^2 (1 - t)^2`` with ``t`` the normalized radius.
    """
    a, b = domain.r_min, domain.r_max
    if domain.kind == "ball":

        def rho(r):
            s = np.asarray(r, dtype=float) / b
            return np.where(s < 1, (1 - s * s) ** 2, 0.0)

        def drho(r):
            s = np.asarray(r, dtype=float) / b
            return np.where(s < 1, -4 * s * (1 - s * s) / b, 0.0)

    else:

        def rho(r):
            t = (np.asarray(r, dtype=float) - a) / (b - a)
            return np.where((t > 0) & (t < 1), 16 * t * t * (1 - t) ** 2, 0.0)

        def drho(r):
            t = (np.asarray(r, dtype=float) - a) / (b - a)
            return np.where((t > 0) & (t < 1), 32 * t * (1 - t) * (1 - 2 * t) / (b - a), 0.0)

    return rho, drho


@dataclass(frozen=True)
class ParametrizedMap:
    """A map ``R^3 -> R^3 x| S^3`` with its left-trivialized tangent blade."""

    evaluate: Callable[[np.ndarray], grp.SpinMotion]
    blade: Callable[[np.ndarray], np.ndarray]
    name: str = "map"

    def __call__(self, v) -> grp.SpinMotion:
        return self.evaluate(np.asarray(v, dtype=float))


def screw_parametrization(profile: Profile) -> ParametrizedMap:
    return ParametrizedMap(lambda v: phi_eval(profile, v), lambda v: tangent_blade(profile, v), profile.name)


def perturb_map(base: ParametrizedMap, spec: PerturbationSpec, domain: DomainSpec) -> ParametrizedMap:
    """Right-translate ``base`` by ``exp(eps rho(|v|) W)``.

    With ``h = exp(s W)`` the left-trivialized differential of ``g h`` is
    ``Ad_{h^-1}(g^-1 dg) + (ds) W``.
    """
    if spec.amplitude == 0.0:
        return base
    rho, drho = bump(domain)
    w = spec.direction

    def factor(v):
        r = np.linalg.norm(v, axis=-1)
        s = spec.amplitude * rho(r)
        return grp.spin_exp(s[..., None] * w[:3], s[..., None] * w[3:]), r

    def evaluate(v):
        h, _ = factor(v)
        return base.evaluate(v) * h

    def blade(v):
        h, r = factor(v)
        hinv = h.inverse()
        rows = base.blade(v)
        hb = grp.SpinMotion(np.asarray(hinv.x)[..., None, :], np.asarray(hinv.q)[..., None, :])
        xi, eta = grp.adjoint_spin(hb, (rows[..., :3], rows[..., 3:]))
        safe = np.where(r > 0, r, 1.0)
        # d s / d v_a = eps rho'(r) v_a / r
        ds = (spec.amplitude * drho(r) / safe)[..., None] * v
        return np.concatenate([xi, eta], axis=-1) + ds[..., :, None] * w

    return ParametrizedMap(evaluate, blade, f"{base.name}*exp({spec.amplitude:g} rho {spec.label()})")


def group_distance(g: grp.SpinMotion, h: grp.SpinMotion):
    """Crude chart distance ``|x_g - x_h| + |q_g - q_h|`` (up to the sign of ``q``)."""
    dq = np.minimum(
        np.linalg.norm(np.asarray(g.q) - h.q, axis=-1), np.linalg.norm(np.asarray(g.q) + h.q, axis=-1)
    )
    return np.linalg.norm(np.asarray(g.x) - h.x, axis=-1) + dq


# -- integration ------------------------------------------------------------------------


@dataclass
class Densities:
    grid: Grid
    sqrt_det: np.ndarray
    omega: np.ndarray
    min_eig: np.ndarray


def densities(pmap: ParametrizedMap, domain: DomainSpec, C: float = 1.0) -> Densities:
    grid = quadrature_grid(domain)
    blades = pmap.blade(grid.points)
    gram = blades @ SPIN_FORM @ np.swapaxes(blades, -1, -2)
    ev = np.linalg.eigvalsh(gram)[:, 0]
    det = np.linalg.det(gram)
    return Densities(grid, np.sqrt(np.maximum(det, 0.0)), omega_at_identity(C, blades), ev)


def _integrate(weights, values) -> float:
    # fsum keeps the result independent of evaluation order
    return math.fsum((weights * values).tolist())


def _first_failure(dens: Densities):
    bad = np.flatnonzero(dens.min_eig <= 0)
    if bad.size == 0:
        return None
    return dens.grid.points[bad[0]]


def submanifold_volume(pmap: ParametrizedMap, domain: DomainSpec, refine: bool = True):
    """``(volume, error_estimate)``; the estimate compares against a grid with
    half the nodes in each direction.

    Raises
    ------
    NotSpacelike
        At the first grid node where the induced metric is not positive definite.
    """
    if domain.r_max == domain.r_min:
        return 0.0, 0.0
    dens = densities(pmap, domain)
    bad = _first_failure(dens)
    if bad is not None:
        raise NotSpacelike(f"induced metric not positive definite at v = {bad.tolist()}")
    vol = _integrate(dens.grid.weights, dens.sqrt_det)
    if not refine:
        return vol, float("nan")
    coarse = _integrate_only(pmap, domain.refined(0.5))
    return vol, abs(vol - coarse)


def _integrate_only(pmap, domain) -> float:
    dens = densities(pmap, domain)
    return _integrate(dens.grid.weights, dens.sqrt_det)


def omega_integral(pmap: ParametrizedMap, domain: DomainSpec, C: float) -> float:
    dens = densities(pmap, domain, C)
    return _integrate(dens.grid.weights, dens.omega)


def dump_grid_csv(path, pmap: ParametrizedMap, domain: DomainSpec, C: float = 1.0):
    dens = densities(pmap, domain, C)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["r", "i_theta", "i_phi", "sqrt_det_G", "omega_density"])
        for r, idx, s, o in zip(dens.grid.radii, dens.grid.index, dens.sqrt_det, dens.omega):
            out.writerow([f"{r:.17g}", int(idx[1]), int(idx[2]), f"{s:.17g}", f"{o:.17g}"])


# -- the experiment -----------------------------------------------------------------


def lie_directions():
    """``(e_a, 0)`` and ``(0, e_a)``."""
    eye = np.eye(3)
    return [(tuple(e), (0.0, 0.0, 0.0)) for e in eye] + [((0.0, 0.0, 0.0), tuple(e)) for e in eye]


@dataclass
class Competitor:
    direction: list
    amplitude: float
    spacelike: bool
    volume: float | None
    omega: float
    min_eig: float


@dataclass
class DirectionFit:
    direction: list
    coefficients: list  # a, b, c of a eps^2 + b eps + c
    r_squared: float


@dataclass
class VolumeReport:
    c: float
    C: float
    domain: dict
    base_volume: float
    base_error: float
    base_omega: float
    competitors: list = field(default_factory=list)
    fits: list = field(default_factory=list)
    violations: int = 0
    omega_spread: float = 0.0
    note: str = FAMILY_NOTE

    @property
    def max_leading(self) -> float:
        return max(f.coefficients[0] for f in self.fits) if self.fits else float("nan")

    @property
    def min_r_squared(self) -> float:
        return min(f.r_squared for f in self.fits) if self.fits else float("nan")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_leading"] = self.max_leading
        d["min_r_squared"] = self.min_r_squared
        return d


def _quadratic_fit(eps, dv):
    coef = np.polyfit(eps, dv, 2)
    resid = dv - np.polyval(coef, eps)
    total = np.sum((dv - np.mean(dv)) ** 2)
    r2 = 1.0 - np.sum(resid**2) / total if total > 0 else 1.0
    return coef.tolist(), float(r2)


def maximization_experiment(
    c: float,
    domain: DomainSpec,
    directions=None,
    amplitudes=DEFAULT_AMPLITUDES,
    threads: int = 1,
) -> VolumeReport:
    """Compare ``vol(phi)`` with right-translated competitors.

    Non-space-like competitors are flagged and excluded from the volume
    comparison and the fits.
    """
    if 0.0 not in amplitudes:
        raise ValueError("amplitudes must include 0")
    C = calibrating_constant(c)
    base = screw_parametrization(ell_profile(c))
    base_vol, base_err = submanifold_volume(base, domain)
    base_om = omega_integral(base, domain, C)
    directions = lie_directions() if directions is None else directions
    jobs = [(xi, eta, a) for xi, eta in directions for a in amplitudes if a != 0.0]

    def run(job):
        xi, eta, a = job
        pmap = perturb_map(base, PerturbationSpec(xi, eta, a), domain)
        dens = densities(pmap, domain, C)
        ok = bool(np.all(dens.min_eig > 0))
        vol = _integrate(dens.grid.weights, dens.sqrt_det) if ok else None
        return Competitor(
            list(xi) + list(eta), a, ok, vol, _integrate(dens.grid.weights, dens.omega), float(dens.min_eig.min())
        )

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            comps = list(pool.map(run, jobs))
    else:
        comps = [run(j) for j in jobs]

    report = VolumeReport(c, C, asdict(domain), base_vol, base_err, base_om, comps)
    report.violations = sum(
        1 for k in comps if k.spacelike and k.volume > base_vol * (1 + REL_TOL)
    )
    oms = [base_om] + [k.omega for k in comps]
    report.omega_spread = (max(oms) - min(oms)) / abs(base_om)
    for xi, eta in directions:
        d = list(xi) + list(eta)
        pts = [(0.0, 0.0)] + [(k.amplitude, k.volume - base_vol) for k in comps if k.direction == d and k.spacelike]
        eps, dv = np.array(pts).T
        coef, r2 = _quadratic_fit(eps, dv)
        report.fits.append(DirectionFit(d, coef, r2))
    return report


def radial_volume_oracle(c: float, r_min: float, r_max: float) -> float:
    """``2 pi int sqrt(ell'/2) ell sin r dr`` by adaptive quadrature."""
    prof = ell_profile(c)

    def f(r):
        return math.sqrt(float(prof.dl(r)) / 2) * float(prof.l(r)) * math.sin(r)

    val, _ = quad(f, r_min, r_max, epsabs=1e-13, epsrel=1e-13, limit=200)
    return 2 * math.pi * val
