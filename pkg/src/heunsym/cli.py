"""Command-line front end.

    heunsym MODE [options]

Modes: eval, fundamental, table, verify, mobius, connect, spectrum.
Exit codes: 0 success, 1 verification failure, 2 bad configuration or
arguments, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import cmath
import math
import re
import sys

import numpy as np

from . import mobius, series
from .connection import connection_gamma, eigenvalue_search
from .errors import ConfigError, NumericalError, OutsideDomain
from .fuchsian import SymmetricHeunConfig
from .oracle import ContourPath, verify_lagrange_identity

MODES = ("eval", "fundamental", "table", "verify", "mobius", "connect", "spectrum")

_NUM = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?:inf|nan)"


def parse_complex(text: str) -> complex:
    """Parse "re+imi" (also "re", "imi", "re-imi"; j accepted for i)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ConfigError("empty number")
    try:
        return complex(float(s))
    except ValueError:
        pass
    m = re.fullmatch(rf"({_NUM})?([+-](?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|[+-])?[ij]", s)
    if m is None:
        raise ConfigError(f"cannot parse complex number {text!r}")
    re_part = float(m.group(1)) if m.group(1) else 0.0
    im_txt = m.group(2)
    if im_txt is None:
        # a lone "2.5i": the real-looking group is really the imaginary part
        return complex(0.0, re_part) if m.group(1) else complex(0.0, 1.0)
    im_part = {"+": 1.0, "-": -1.0}.get(im_txt)
    im_part = float(im_txt) if im_part is None else im_part
    return complex(re_part, im_part)


def _g(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0  # drop the sign of negative zero
    return f"{x:.17g}"


def format_complex(z: complex) -> str:
    z = complex(z)
    im = z.imag if z.imag != 0 else 0.0
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{_g(z.real)}{sign}{_g(abs(im))}i"


def _complex_list(text: str) -> list[complex]:
    return [parse_complex(t) for t in text.split(",")]


# -- configuration ---------------------------------------------------------------

def read_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lower()] = value
    return out


def build_config(args) -> SymmetricHeunConfig:
    raw = read_config_file(args.config) if args.config else {}
    if args.phi is not None:
        raw["phi"] = args.phi
    if args.chi is not None:
        raw["chis"] = args.chi
    if args.lam is not None:
        raw["lambda"] = args.lam
    unknown = set(raw) - {"phi", "points", "chis", "lambda"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    chis = _complex_list(raw.get("chis", "0,0,0,0"))
    if len(chis) != 4:
        raise ConfigError("chis needs four values")
    lam = parse_complex(raw.get("lambda", "0"))
    if "points" in raw:
        pts = _complex_list(raw["points"])
        if len(pts) != 4:
            raise ConfigError("points needs four values")
        return SymmetricHeunConfig(tuple(pts), tuple(chis), lam)
    if "phi" not in raw:
        raise ConfigError("give either phi or points")
    phi = parse_complex(raw["phi"])
    return SymmetricHeunConfig.canonical(phi, tuple(chis), lam)


def write_config(cfg: SymmetricHeunConfig) -> str:
    return ("points = " + ",".join(format_complex(z) for z in cfg.points) + "\n"
            + "chis = " + ",".join(format_complex(c) for c in cfg.chis) + "\n"
            + "lambda = " + format_complex(cfg.lam) + "\n")


def _parse_grid(text: str):
    try:
        rpart, tpart = text.split(",")
        r0, r1, nr = rpart.split(":")
        t0, t1, nt = tpart.split(":")
        r0, r1, t0, t1 = map(float, (r0, r1, t0, t1))
        nr, nt = int(nr), int(nt)
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}; expected r0:r1:nr,t0:t1:nt") from exc
    if nr < 1 or nt < 1 or not all(map(math.isfinite, (r0, r1, t0, t1))) or r0 < 0:
        raise ConfigError("grid bounds must be finite with positive counts")
    return np.linspace(r0, r1, nr), np.linspace(t0, t1, nt)


def _pair(cfg, args, radius: float, kind: str = "taylor"):
    kw = {"family": args.family, "n_terms": args.terms}
    if kind == "taylor":
        return series.fundamental_pair(cfg, radius=radius, **kw)
    return series.laurent_pair(cfg, radius=radius, **kw)


def _region(cfg, r: float) -> str:
    """"taylor" or "laurent" for a radius, or OutsideDomain in between."""
    rad = min(abs(p) for p in cfg.points)
    if r < series.DOMAIN_SAFETY * rad:
        return "taylor"
    if r > 0 and cfg.is_canonical() and 1 / r < series.DOMAIN_SAFETY * rad:
        return "laurent"
    raise OutsideDomain(f"|z| = {r:.6g} is outside both series domains")


def _pair_for(cfg, args, z: complex):
    """Taylor pair inside the disk, Laurent pair outside it."""
    if _region(cfg, abs(z)) == "taylor":
        return _pair(cfg, args, max(abs(z), 1e-3))
    return _pair(cfg, args, 1 / abs(z), "laurent")


# -- modes -----------------------------------------------------------------------

def _emit(text: str, args):
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def mode_eval(cfg, args):
    if args.z is None:
        raise ConfigError("eval needs --z")
    z = parse_complex(args.z)
    f1, f2 = _pair_for(cfg, args, z)
    F1, dF1 = series.eval_series(f1, z, args.tol)
    F2, dF2 = series.eval_series(f2, z, args.tol)
    _emit("".join(f"{k}={format_complex(v)}\n" for k, v in
                  (("z", z), ("F1", F1), ("dF1", dF1), ("F2", F2), ("dF2", dF2))), args)
    return 0


def mode_fundamental(cfg, args):
    f1, f2 = _pair(cfg, args, 0.8)
    lines = ["n,re_f1,im_f1,re_f2,im_f2"]
    for n, (a, b) in enumerate(zip(f1.coeffs, f2.coeffs)):
        lines.append(f"{n},{_g(a.real)},{_g(a.imag)},{_g(b.real)},{_g(b.imag)}")
    _emit("\n".join(lines) + "\n", args)
    return 0


TABLE_HEADER = "re_z,im_z,re_F1,im_F1,re_F2,im_F2,wronskian_residual,ode_residual"


def mode_table(cfg, args):
    radii, angles = _parse_grid(args.grid or "0:0.8:5,0:6.283185307179586:8")
    kinds = [_region(cfg, r) for r in radii]
    inner = [r for r, k in zip(radii, kinds) if k == "taylor"]
    outer = [r for r, k in zip(radii, kinds) if k == "laurent"]
    pairs = {}
    if inner:
        pairs["taylor"] = _pair(cfg, args, max(max(inner), 1e-3))
    if outer:
        pairs["laurent"] = _pair(cfg, args, 1 / min(outer), "laurent")
    lines = [TABLE_HEADER]
    for r, kind in zip(radii, kinds):
        f1, f2 = pairs[kind]
        for t in angles:
            z = r * cmath.exp(1j * t)
            F1 = series.eval_series(f1, z, args.tol)[0]
            F2 = series.eval_series(f2, z, args.tol)[0]
            w = series.wronskian_residual(f1, f2, z)
            res = max(series.ode_residual(cfg, f1, z), series.ode_residual(cfg, f2, z))
            lines.append(",".join([_g(z.real), _g(z.imag), _g(F1.real), _g(F1.imag),
                                   _g(F2.real), _g(F2.imag), _g(w), _g(res)]))
    _emit("\n".join(lines) + "\n", args)
    return 0


VERIFY_THRESHOLDS = {"wronskian": 1e-10, "residual": 1e-9, "mobius": 1e-8, "lagrange": 1e-6}


def verify_suites(cfg, args) -> dict:
    """Max residual of each invariant suite on ``cfg``."""
    rng = np.random.default_rng(args.seed)
    rad = min(abs(p) for p in cfg.points)
    reach = 0.8 * rad
    f1, f2 = _pair(cfg, args, reach)
    grid = [r * cmath.exp(1j * t) for r in np.linspace(0, reach, 10)
            for t in np.linspace(0, 2 * math.pi, 10, endpoint=False)]
    out = {"wronskian": max(series.wronskian_residual(f1, f2, z) for z in grid)}
    out["residual"] = max(series.ode_residual(cfg, f, z) for f in (f1, f2) for z in grid)
    maps = [mobius.MobiusMap.translation(complex(*rng.normal(size=2))),
            mobius.MobiusMap.scaling(complex(*rng.normal(size=2)) + 1.5),
            mobius.MobiusMap.inversion()]
    samples = [0.5 * rad * cmath.exp(1j * t) for t in np.linspace(0.1, 2 * math.pi, 7, endpoint=False)]
    worst = 0.0
    for m in maps:
        try:
            moved = mobius.transform_config(cfg, m)
        except ConfigError:
            continue
        for z in samples:
            if mobius.is_inf(m(z)):
                continue
            for f in (f1, f2):
                worst = max(worst, series.covariance_residual(moved, f, m, z))
    out["mobius"] = worst
    lam1 = cfg.lam
    lam2 = cfg.lam + complex(*rng.uniform(-2, 2, size=2))
    path = ContourPath((0, 0.5 * rad, 0.5 * rad * cmath.exp(0.8j)))
    out["lagrange"] = verify_lagrange_identity(cfg, lam1, lam2, path)[2]
    return out


def mode_verify(cfg, args):
    results = verify_suites(cfg, args)
    ok = True
    for name, value in results.items():
        passed = value < VERIFY_THRESHOLDS[name]
        ok &= passed
        print(f"{name}: {'pass' if passed else 'FAIL'} max={value:.3e} "
              f"threshold={VERIFY_THRESHOLDS[name]:.0e}")
    return 0 if ok else 1


def mode_mobius(cfg, args):
    if args.map is None:
        raise ConfigError("mobius needs --map a,b,c,d")
    coeffs = _complex_list(args.map)
    if len(coeffs) != 4:
        raise ConfigError("--map needs four coefficients")
    m = mobius.MobiusMap(*coeffs)
    _emit(write_config(mobius.transform_config(cfg, m)), args)
    return 0


def mode_connect(cfg, args):
    js = [args.j] if args.j else [1, 2, 3, 4]
    lines = []
    for j in js:
        g = connection_gamma(cfg, j)
        lines.append(f"j={j} gamma1={format_complex(g.gamma1)} gamma2={format_complex(g.gamma2)} "
                     f"gap={g.gap:.3e}")
    _emit("\n".join(lines) + "\n", args)
    return 0


def mode_spectrum(cfg, args):
    if args.window is None:
        raise ConfigError("spectrum needs --window A:B")
    try:
        a, b = (parse_complex(t) for t in args.window.split(":"))
    except ValueError as exc:
        raise ConfigError("--window needs two complex numbers A:B") from exc
    roots = eigenvalue_search(cfg, args.i, args.j or 3, (a, b), tol=min(args.tol, 1e-8))
    _emit("".join(f"lambda={format_complex(r)}\n" for r in roots), args)
    return 0


DISPATCH = {"eval": mode_eval, "fundamental": mode_fundamental, "table": mode_table,
            "verify": mode_verify, "mobius": mode_mobius, "connect": mode_connect,
            "spectrum": mode_spectrum}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heunsym", description="Symmetric-form Heun solutions.")
    p.add_argument("mode", choices=MODES)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--phi", help="canonical arrangement angle")
    p.add_argument("--chi", help="four uniformization angles, comma separated")
    p.add_argument("--lambda", dest="lam", help="accessory parameter")
    p.add_argument("--z", help="evaluation point")
    p.add_argument("--terms", type=int, default=None, help="fixed truncation (default adaptive)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--family", choices=[f.value for f in series.Family], default=None)
    p.add_argument("--grid", help="polar grid r0:r1:nr,t0:t1:nt")
    p.add_argument("--output", help="write output here instead of stdout")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--map", help="Moebius coefficients a,b,c,d")
    p.add_argument("--i", type=int, default=1, help="first boundary point (spectrum)")
    p.add_argument("--j", type=int, default=None, help="singular point index")
    p.add_argument("--window", help="lambda segment A:B (spectrum)")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.tol <= 0:
            raise ConfigError("--tol must be positive")
        if args.terms is not None and args.terms < 8:
            raise ConfigError("--terms must be at least 8")
        cfg = build_config(args)
        return DISPATCH[args.mode](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
