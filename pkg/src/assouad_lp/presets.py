"""Named measures, their natural integrability exponents and sweep settings.

Every entry builds a :class:`~assouad_lp.measure.MeasureModel` from keyword
parameters. ``bounds`` gives the exponents the density provably has (used by
the theorem-compliance check) and ``sweep`` the grid suited to the family:
segment densities use the deep geometric grid, truncated block families a
dyadic grid that stops at their truncation depth.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from . import dyadic, measure
from .oracle import INF, BoundSet, assouad_upper_bound, lower_lower_bound
from .spectrum import DEFAULT_THETAS, SweepConfig

__all__ = ["Preset", "PRESETS", "get_preset", "build_measure", "natural_bounds", "default_sweep",
           "oracle_curve"]


@dataclass(frozen=True)
class Preset:
    name: str
    builder: Callable
    defaults: dict
    description: str
    # maps params -> BoundSet, or None when the density is in no L^{-p}
    bounds: Callable | None = None
    sweep: Callable = field(default=lambda params: SweepConfig())


def _dyadic_sweep(extrapolation):
    def make(params):
        K = int(params.get("K", dyadic.DEFAULT_DEPTH))
        return SweepConfig.dyadic(DEFAULT_THETAS, k_min=6, k_max=K, extrapolation=extrapolation)
    return make


def _num(v):
    if isinstance(v, str) and v.lower() in ("inf", "infinity"):
        return INF
    return float(v)


PRESETS: dict[str, Preset] = {}


def _register(p: Preset):
    PRESETS[p.name] = p


_register(Preset(
    "uniform", lambda lo=0.0, hi=1.0: measure.uniform(float(lo), float(hi)),
    {"lo": 0.0, "hi": 1.0}, "Lebesgue measure on an interval",
    bounds=lambda prm: BoundSet(INF, INF)))
_register(Preset(
    "linear-2x", lambda: measure.linear_2x(), {}, "density 2x on [0, 1]",
    # in L^{-q} for every q < 1; the bound at q = 1 is the limit of valid bounds
    bounds=lambda prm: BoundSet(INF, 1.0)))
_register(Preset(
    "assouad-sharp", lambda p1=2.0, p2=3.0: measure.assouad_sharp(_num(p1), _num(p2)),
    {"p1": 2.0, "p2": 3.0}, "C(-x)^(1/p2) on [-1,0], C x^(-1/p1) on (0,1]",
    bounds=lambda prm: BoundSet(_num(prm["p1"]), _num(prm["p2"]))))
_register(Preset(
    "mono-sharp", lambda p1=2.0, p2=3.0: measure.mono_sharp(_num(p1), _num(p2)),
    {"p1": 2.0, "p2": 3.0}, "C x^(-1/p1) on (0,1], C(2-x)^(1/p2) on (1,2]",
    bounds=lambda prm: BoundSet(_num(prm["p1"]), _num(prm["p2"]), "monotone")))
_register(Preset(
    "lower-sharp",
    lambda p1=2.0, p2=3.0, theta_list=DEFAULT_THETAS, K=dyadic.DEFAULT_DEPTH:
        dyadic.build_lower_sharp(_num(p1), _num(p2), [float(t) for t in theta_list], int(K)),
    {"p1": 2.0, "p2": 3.0, "theta_list": list(DEFAULT_THETAS), "K": dyadic.DEFAULT_DEPTH},
    "dyadic blocks with thin tall cores and wide low shoulders",
    bounds=lambda prm: BoundSet(_num(prm["p1"]), _num(prm["p2"])),
    sweep=_dyadic_sweep("max-tail")))
_register(Preset(
    "staircase", lambda K=dyadic.DEFAULT_DEPTH: dyadic.build_staircase(int(K)),
    {"K": dyadic.DEFAULT_DEPTH}, "bounded, non-doubling step density on [-1, 1]",
    bounds=lambda prm: BoundSet(INF, 1.0), sweep=_dyadic_sweep("max-tail")))
_register(Preset(
    "mu_p", lambda p=1.5, K=dyadic.DEFAULT_DEPTH: dyadic.build_mu_p(float(p), int(K)),
    {"p": 1.5, "K": dyadic.DEFAULT_DEPTH}, "Assouad dimension 1 but not in L^p",
    sweep=_dyadic_sweep("regression-decade")))
_register(Preset(
    "composite",
    lambda K_outer=4, K_inner=dyadic.DEFAULT_DEPTH:
        dyadic.build_composite(int(K_outer), int(K_inner)),
    {"K_outer": 4, "K_inner": dyadic.DEFAULT_DEPTH}, "sum of shrunken mu_p copies, in no L^p, p > 1",
    sweep=_dyadic_sweep("regression-decade")))


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None


def _merged(name, params):
    pre = get_preset(name)
    out = dict(pre.defaults)
    out.update({k: v for k, v in (params or {}).items() if v is not None})
    unknown = set(out) - set(pre.defaults)
    if unknown:
        raise ValueError(f"preset {name!r} does not take {sorted(unknown)}")
    return pre, out


def build_measure(name: str, params: dict | None = None):
    pre, prm = _merged(name, params)
    return pre.builder(**prm)


def natural_bounds(name: str, params: dict | None = None) -> BoundSet | None:
    pre, prm = _merged(name, params)
    return pre.bounds(prm) if pre.bounds else None


def default_sweep(name: str, params: dict | None = None) -> SweepConfig:
    pre, prm = _merged(name, params)
    return pre.sweep(prm)


def oracle_curve(name: str, params: dict | None = None):
    """``theta -> (assouad, lower)`` reference values for the CSV oracle columns.

    Families with known bounds use them (lower clipped at 0, since the lower
    spectrum is never negative). ``mu_p`` and the composite have Assouad
    spectrum 1 and no stated lower value (``nan``).
    """
    pre, prm = _merged(name, params)
    if name in ("mu_p", "composite"):
        return lambda th: (1.0, float("nan"))
    b = pre.bounds(prm)
    return lambda th: (float(assouad_upper_bound(b, th)), float(max(lower_lower_bound(b, th), 0)))
