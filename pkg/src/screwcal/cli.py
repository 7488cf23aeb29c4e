"""Command line: ``screwcal verify | volume | grid``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a bad
configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import algebra as alg
from . import groups as grp
from . import intrinsic as intr
from . import screwmaps as sm
from . import suites
from . import volume as vol
from . import vorticity as vort

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

GRID_QUANTITIES = (
    "ell",
    "ell-prime",
    "sigma",
    "circle-length",
    "sphere-area",
    "area-ratio",
    "pullback-eigs",
    "vorticity-h",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    c: float = 1.0
    kappa: int | None = None
    seed: int = 0
    samples: int | None = None
    tolerances: dict = field(default_factory=dict)
    threads: int = 1
    out: str | None = None


def _threads(value) -> int:
    if value is None:
        value = os.environ.get("SCREWCAL_THREADS", "1")
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"thread count must be an integer, got {value!r}") from None
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def _tolerances(items) -> dict:
    tols = {}
    for item in items or []:
        name, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"tolerance must look like name=value, got {item!r}")
        try:
            tol = float(val)
        except ValueError:
            raise ConfigError(f"bad tolerance value {val!r}") from None
        if not tol > 0:
            raise ConfigError(f"tolerance {name} must be positive")
        tols[name] = tol
    return tols


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(suite: str, config: dict, checks) -> tuple[str, bool]:
    ok = all(c.passed for c in checks)
    doc = {"suite": suite, "config": config, "checks": [c.to_dict() for c in checks], "pass": ok}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n", ok


# -- commands ----------------------------------------------------------------------------


def cmd_verify(args) -> int:
    cfg = RunConfig(
        "verify",
        c=args.c,
        kappa=args.kappa,
        seed=args.seed,
        samples=args.samples,
        tolerances=_tolerances(args.tol),
        threads=_threads(args.threads),
        out=args.out,
    )
    if cfg.kappa is not None and cfg.kappa not in (-1, 0, 1):
        raise ConfigError("kappa must be -1, 0 or 1")
    if cfg.samples is not None and cfg.samples < 1:
        raise ConfigError("samples must be positive")
    if not cfg.c > 0:
        raise ConfigError("c must be positive")
    scfg = suites.SuiteConfig(cfg.seed, cfg.samples, cfg.kappa, cfg.c, cfg.tolerances)
    checks = suites.run_suite(args.suite, scfg)
    config = asdict(cfg) | {"suite": args.suite}
    text, ok = _report(args.suite, config, checks)
    _emit(text, cfg.out)
    return EXIT_OK if ok else EXIT_FAIL


def _amplitudes(text: str):
    try:
        amps = sorted({float(a) for a in text.split(",") if a.strip()} | {0.0})
    except ValueError:
        raise ConfigError(f"cannot parse amplitudes {text!r}") from None
    full = sorted(set(amps) | {-a for a in amps})
    return tuple(full)


def cmd_volume(args) -> int:
    threads = _threads(args.threads)
    if not args.c > 0:
        raise ConfigError("c must be positive")
    res = {"n_r": args.n_r, "n_theta": args.n_theta, "n_phi": args.n_phi}
    name = args.domain
    if name.startswith("shell:") and name.count(":") == 1:
        name = f"{name}:{args.delta}"
    domain = vol.domain_from_name(name, **res)
    amps = _amplitudes(args.amplitudes)
    report = vol.maximization_experiment(args.c, domain, amplitudes=amps, threads=threads)
    checks = [
        suites.at_most(
            "competitors_exceeding_base", "homologically volume maximizing", report.violations, 0
        ),
        suites.at_most("omega_integral_spread", "omega is closed", report.omega_spread, vol.OMEGA_REL_TOL),
        suites.at_most("max_leading_coefficient", "second-order maximality", report.max_leading, 0.0),
        suites.above("min_r_squared", "second-order maximality", report.min_r_squared, 0.99),
    ]
    config = {
        "command": "volume",
        "c": args.c,
        "domain": asdict(domain),
        "amplitudes": list(amps),
        "threads": threads,
    }
    text, ok = _report("volume", config, checks)
    doc = json.loads(text)
    doc["report"] = _jsonable(report.to_dict())
    _emit(json.dumps(doc, indent=2, allow_nan=False) + "\n", args.out)
    if args.grid_csv:
        base = vol.screw_parametrization(sm.ell_profile(args.c))
        vol.dump_grid_csv(args.grid_csv, base, domain, report.C)
    return EXIT_OK if ok else EXIT_FAIL


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"range must be a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"cannot parse range {text!r}") from None
    if n < 1 or b < a:
        raise ConfigError(f"empty range {text!r}")
    return np.linspace(a, b, n)


def _vorticity_rows(section_name: str, radii):
    sec = vort.section_from_name(section_name)

    def frame_at(r):
        if sec.kappa == 1:
            p = grp.geodesic_point(1, r * alg.E1)
            return p, np.array([-math.sin(r), math.cos(r), 0.0, 0.0]), alg.QUAT_J
        scale = float(sm.ell(float(section_name.split("=")[1]), r)) if section_name.startswith("screw") else r
        return scale * alg.E1, alg.E1, alg.E2

    rows = []
    for r in radii:
        p, radial, tangential = frame_at(r)
        vals = []
        for x in (radial, tangential):
            try:
                vals.append(vort.refine_step(lambda h: vort.vorticity_h(sec, p, x, h)))
            except vort.StepTooLarge:
                vals.append(float("nan"))
        rows.append([r, *vals])
    return ["r", "h_radial", "h_tangential"], rows


def grid_table(quantity: str, radii, c: float = 1.0, section: str = "b0"):
    """Header and rows for ``grid``."""
    if quantity == "vorticity-h":
        return _vorticity_rows(section, radii)
    if quantity == "pullback-eigs":
        prof = sm.ell_profile(c)
        eig = np.linalg.eigvalsh(sm.pullback_metric(prof, radii[:, None] * alg.E1))
        return ["r", "eig_1", "eig_2", "eig_3"], [[r, *e] for r, e in zip(radii, eig)]
    fns = {
        "ell": lambda r: sm.ell(c, r),
        "ell-prime": lambda r: sm.ell_prime(c, r),
        "sigma": lambda r: intr.sigma(c, r),
        "circle-length": lambda r: intr.circle_length(c, r),
        "sphere-area": lambda r: intr.sphere_area(c, r),
        "area-ratio": lambda r: intr.area_ratio(c, r),
    }
    vals = np.asarray(fns[quantity](radii), dtype=float)
    return ["r", quantity.replace("-", "_")], [[r, v] for r, v in zip(radii, vals)]


def cmd_grid(args) -> int:
    radii = parse_range(args.r)
    if not args.c > 0:
        raise ConfigError("c must be positive")
    header, rows = grid_table(args.quantity, radii, args.c, args.section)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(header)
    for row in rows:
        out.writerow([f"{float(x):.17g}" for x in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="screwcal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--c", type=float, default=1.0, help="profile constant c in ell")
        p.add_argument("--threads", default=None, help="worker cap (default $SCREWCAL_THREADS or 1)")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    v = sub.add_parser("verify", help="run a property suite and print a JSON report")
    v.add_argument("suite", choices=sorted(suites.SUITES))
    v.add_argument("--kappa", type=int, default=None)
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a tolerance")
    common(v)
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("volume", help="volume maximization experiment")
    m.add_argument("--domain", required=True, help="ball:<r0>, shell:<k>[:<delta>] or patch:<a>:<b>:<cap>")
    m.add_argument("--delta", type=float, default=0.2, help="shell shrink for shell:<k>")
    m.add_argument("--amplitudes", default="0.01,0.05,0.1", help="comma list; mirrored to +-")
    m.add_argument("--n-r", type=int, default=48)
    m.add_argument("--n-theta", type=int, default=20)
    m.add_argument("--n-phi", type=int, default=30)
    m.add_argument("--grid-csv", default=None, help="also dump the base grid densities")
    common(m)
    m.set_defaults(func=cmd_volume)

    g = sub.add_parser("grid", help="tabulate a radial quantity as CSV")
    g.add_argument("quantity", choices=GRID_QUANTITIES)
    g.add_argument("--r", required=True, help="a:b:n")
    g.add_argument("--section", default="b0", help="section name for vorticity-h")
    common(g)
    g.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"screwcal: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
