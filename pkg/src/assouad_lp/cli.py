"""Command-line interface: ``assouad-lp <command> [options]``.

Commands: ``spectrum``, ``norms``, ``oracle``, ``verify``, ``plot``, ``presets``.
Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np
import yaml

from . import __version__, oracle, presets
from .measure import Interval, PiecewisePowerDensity, PowerSegment, density_from_segments
from .output import atomic_write, estimate_to_csv
from .spectrum import SweepConfig, estimate_spectra, geometric_radii
from .verification import (CheckReport, check_cdf_decay, check_combining_intervals,
                           check_equal_spaced_special_case, check_holder_chain, check_sharpness,
                           check_theorem_main)

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_measure_args(p):
    p.add_argument("--preset", help="preset name (see `presets`)")
    p.add_argument("--config", help="YAML config file; flags override its values")
    p.add_argument("--p1", help="L^p exponent (number or inf)")
    p.add_argument("--p2", help="L^-p exponent (number or inf)")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="extra preset parameter, repeatable")


def _add_sweep_args(p):
    p.add_argument("--theta-min", type=float)
    p.add_argument("--theta-max", type=float)
    p.add_argument("--theta-steps", type=int)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--points-per-decade", type=int)
    p.add_argument("--extrapolation", choices=("max-tail", "regression-decade"))
    p.add_argument("--tail", type=int)
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="assouad-lp", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="estimate Assouad and lower spectra")
    _add_measure_args(p)
    _add_sweep_args(p)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "text"), default="csv")

    p = sub.add_parser("norms", help="L^p and inverse L^p norms and smoothness profile")
    _add_measure_args(p)
    p.add_argument("--p", type=float, action="append", dest="ps", help="exponent, repeatable")
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("oracle", help="closed-form bounds over a theta grid")
    p.add_argument("--regime", choices=oracle.REGIMES, default="general")
    p.add_argument("--p1", default="inf")
    p.add_argument("--p2", default="inf")
    p.add_argument("--s", default="1")
    p.add_argument("--t", default="1")
    p.add_argument("--theta", help="single theta (exact when rational)")
    p.add_argument("--theta-min", type=float, default=0.05)
    p.add_argument("--theta-max", type=float, default=0.95)
    p.add_argument("--theta-steps", type=int, default=19)
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("verify", help="run verification checks")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true", help="run the full suite")
    g.add_argument("--check", choices=sorted(SUITE), help="run one named check")
    p.add_argument("--out")
    p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("plot", help="write a two-panel SVG figure")
    p.add_argument("--figure", type=int, choices=(1, 2, 3, 4), required=True)
    p.add_argument("--p1")
    p.add_argument("--p2")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("svg",), default="svg")

    p = sub.add_parser("presets", help="list available presets")
    p.add_argument("--format", choices=("text",), default="text")
    return ap


# -- configuration ------------------------------------------------------------

def _scalar(v: str):
    try:
        return yaml.safe_load(v)
    except yaml.YAMLError:
        return v


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except OSError:
        raise
    except yaml.YAMLError as exc:
        raise UsageError(f"cannot parse config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a mapping")
    return data


def _measure_from(args, cfg):
    """Return ``(measure, preset_name or None, params)`` from flags and config."""
    mcfg = dict(cfg.get("measure", {}))
    name = args.preset or mcfg.get("preset")
    params = dict(mcfg.get("params", {}) or {})
    for key in ("p1", "p2"):
        if getattr(args, key, None) is not None:
            params[key] = _scalar(getattr(args, key))
    for kv in getattr(args, "param", []):
        if "=" not in kv:
            raise UsageError(f"--param needs KEY=VALUE, got {kv!r}")
        k, v = kv.split("=", 1)
        params[k] = _scalar(v)
    if name is None and "segments" in mcfg:
        segs = mcfg["segments"]
        return density_from_segments(segs, bool(mcfg.get("normalize", True))), None, {}
    if name is None:
        raise UsageError("give --preset or a config with measure.preset / measure.segments")
    try:
        return presets.build_measure(name, params), name, params
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad parameters for {name}: {exc}") from exc


def _sweep_from(args, cfg, name, params) -> SweepConfig:
    s = dict(cfg.get("sweep", {}) or {})
    for key in ("theta_min", "theta_max", "theta_steps", "r_min", "r_max", "points_per_decade",
                "extrapolation", "tail", "workers"):
        v = getattr(args, key, None)
        if v is not None:
            s[key] = v
    base = presets.default_sweep(name, params) if name else SweepConfig()
    kw = {}
    if "thetas" in s:
        kw["thetas"] = tuple(float(t) for t in s["thetas"])
    elif {"theta_min", "theta_max", "theta_steps"} & set(s):
        lo = float(s.get("theta_min", 0.05))
        hi = float(s.get("theta_max", 0.95))
        n = int(s.get("theta_steps", 19))
        kw["thetas"] = tuple(round(float(t), 12) for t in np.linspace(lo, hi, n))
    if "dyadic" in s:
        d = s["dyadic"] or {}
        kw["radii"] = tuple(2.0 ** -(k + 1) for k in range(int(d.get("k_min", 6)),
                                                           int(d.get("k_max", 40)) + 1))
    elif {"r_min", "r_max", "points_per_decade"} & set(s):
        kw["radii"] = geometric_radii(float(s.get("r_max", 1e-2)), float(s.get("r_min", 1e-100)),
                                      int(s.get("points_per_decade", 3)))
    for key in ("extrapolation", "tail", "x_strategy", "n_uniform", "r_floor", "workers"):
        if key in s:
            kw[key] = s[key]
    if "radii" in kw and "tail" not in kw and base.tail == len(base.radii):
        kw["tail"] = len(kw["radii"])
    merged = base.to_dict()
    merged.update(kw)
    try:
        return SweepConfig(**merged)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid sweep: {exc}") from exc


def _emit(args, text):
    if getattr(args, "out", None):
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


# -- commands -----------------------------------------------------------------

def cmd_spectrum(args):
    cfg = _load_config(args.config)
    m, name, params = _measure_from(args, cfg)
    sweep = _sweep_from(args, cfg, name, params)
    try:
        est = estimate_spectra(m, sweep)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    orc = presets.oracle_curve(name, params) if name else None
    if args.format == "csv":
        _emit(args, estimate_to_csv(est, orc))
    else:
        lines = [f"{'theta':>6} {'assouad':>10} {'lower':>10} {'assouad*':>10} {'lower*':>10}"]
        for rec in est.records:
            a, l = orc(rec.theta) if orc else (math.nan, math.nan)
            lines.append(f"{rec.theta:6.3f} {rec.upper_exponent:10.5f} {rec.lower_exponent:10.5f}"
                         f" {a:10.5f} {l:10.5f}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_norms(args):
    cfg = _load_config(args.config)
    m, name, _ = _measure_from(args, cfg)
    ps = args.ps or [1.0, 1.5, 2.0, 3.0, math.inf]
    prof = m.smoothness_profile()
    rows = [("p", "lp_norm", "inverse_lp_norm")]
    for p in ps:
        try:
            lp = m.lp_norm(p)
        except ValueError:
            lp = math.nan
        inv = m.inverse_lp_norm(p)
        rows.append((format(p, "g"), format(lp, ".17g"), format(inv, ".17g")))
    if args.format == "csv":
        text = "\n".join(",".join(r) for r in rows) + "\n"
    else:
        text = "\n".join(f"{a:>6} {b:>24} {c:>24}" for a, b, c in rows) + "\n"
        text += (f"profile: p1_sup={prof.p1_sup:g} p2_sup={prof.p2_sup:g} "
                 f"attained={prof.attained} zero_set_positive={prof.zero_set_positive}\n")
        if prof.zero_set_positive:
            text += "density vanishes on a set of positive length: not in any L^-p\n"
    _emit(args, text)
    return EXIT_OK


def _exact_num(v: str):
    v = str(v).strip()
    if v.lower() in ("inf", "infinity"):
        return oracle.INF
    return Fraction(v)


def cmd_oracle(args):
    try:
        b = oracle.BoundSet(_exact_num(args.p1), _exact_num(args.p2), args.regime,
                            _exact_num(args.s), _exact_num(args.t))
        thetas = ([_exact_num(args.theta)] if args.theta is not None else
                  [Fraction(repr(round(float(t), 12)))
                   for t in np.linspace(args.theta_min, args.theta_max, args.theta_steps)])
        rows = [(th, oracle.assouad_upper_bound(b, th), oracle.lower_lower_bound(b, th))
                for th in thetas]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc

    def show(q):
        return f"{q} ≈ {float(q):.6f}" if isinstance(q, Fraction) and q.denominator != 1 \
            else f"{q}"

    if args.format == "csv":
        text = "theta,assouad_upper,lower_lower\n" + "".join(
            f"{float(th):.17g},{float(a):.17g},{float(l):.17g}\n" for th, a, l in rows)
    else:
        text = "".join(f"theta={th}  assouad_upper={show(a)}  lower_lower={show(l)}\n"
                       for th, a, l in rows)
        for tr in oracle.phase_transitions(b):
            text += f"transition: theta={show(tr.theta)} ({tr.spectrum}) {tr.description}\n"
    _emit(args, text)
    return EXIT_OK


def _suite_theorem(name):
    def run():
        m = presets.build_measure(name)
        return check_theorem_main(m, presets.natural_bounds(name), presets.default_sweep(name),
                                  name=f"theorem-bounds[{name}]")
    return run


def _suite_cdf():
    from .measure import uniform
    inv_sqrt = PiecewisePowerDensity((PowerSegment(Interval(0.0, 1.0), 0.5, -0.5, 0.0),))
    r1 = check_cdf_decay(inv_sqrt, 2.0, s_values=[0.4])
    r2 = check_cdf_decay(uniform(), 1e9, s_values=[0.9])
    worst = max(r1.worst_violation, r2.worst_violation)
    return CheckReport("cdf-decay", r1.passed and r2.passed, worst, f"{r1.locus}; {r2.locus}")


def _suite_combining():
    from .measure import uniform
    return check_combining_intervals(uniform(), 0.5, 1e6, Interval(0.1, 0.2),
                                     Interval(0.3, 0.4), 0.3)


def _suite_equal():
    from .measure import uniform
    return check_equal_spaced_special_case(uniform(), 1.0, 3.0, 4, 0.1, 1.0)


def _suite_holder():
    rng = np.random.default_rng(2024)
    m = presets.build_measure("assouad-sharp")
    samples = list(zip(rng.uniform(-1.2, 1.2, 2000), 10 ** rng.uniform(-8, 0.5, 2000)))
    return check_holder_chain(m, samples, 1.5)


SUITE = {
    **{f"theorem-{n}": _suite_theorem(n) for n in
       ("uniform", "linear-2x", "assouad-sharp", "mono-sharp", "lower-sharp", "staircase")},
    **{f"sharpness-{n}": (lambda n=n: check_sharpness(n)) for n in
       ("assouad-sharp", "lower-sharp", "mono-sharp", "mu_p")},
    "cdf-decay": _suite_cdf,
    "combining-intervals": _suite_combining,
    "equal-spaced": _suite_equal,
    "holder-chain": _suite_holder,
}


def cmd_verify(args):
    names = sorted(SUITE) if args.all else [args.check]
    reports = [SUITE[n]() for n in names]
    if args.format == "csv":
        text = "check,status,worst_violation,tolerance,locus\n" + "".join(
            f"{r.name},{r.status},{r.worst_violation:.17g},{r.tolerance:g},\"{r.locus}\"\n"
            for r in reports)
    else:
        text = "".join(r.line() + "\n" for r in reports)
    _emit(args, text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VERIFY


def cmd_plot(args):
    from .figures import FIGURES, emit_figure
    name = FIGURES[args.figure][0]
    params = {}
    for key in ("p1", "p2"):
        if getattr(args, key) is not None:
            params[key] = _scalar(getattr(args, key))
    for kv in args.param:
        k, _, v = kv.partition("=")
        params[k] = _scalar(v)
    try:
        presets.build_measure(name, params)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad parameters for figure {args.figure}: {exc}") from exc
    emit_figure(args.figure, args.out, params)
    return EXIT_OK


def cmd_presets(args):
    lines = []
    for name in sorted(presets.PRESETS):
        pre = presets.PRESETS[name]
        defaults = ", ".join(f"{k}={v if not isinstance(v, list) else '[...]'}"
                             for k, v in pre.defaults.items())
        lines.append(f"{name:<14} {pre.description}" + (f"  ({defaults})" if defaults else ""))
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "norms": cmd_norms, "oracle": cmd_oracle,
            "verify": cmd_verify, "plot": cmd_plot, "presets": cmd_presets}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"assouad-lp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"assouad-lp: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
