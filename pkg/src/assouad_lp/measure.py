"""Absolutely continuous measures with piecewise power-law densities.

A density is a finite, contiguous list of segments, each of the form
``c * |x - x0|**alpha`` with the anchor ``x0`` on one side of the segment.
Everything a segment contributes (mass, CDF, ball masses, ``L^p`` and
inverse ``L^p`` integrals) has a closed form, so nothing here integrates
numerically.

Ball masses are evaluated in log space by the kernels in
:mod:`assouad_lp.kernels`; see :meth:`PiecewisePowerDensity.log_ball_measure`.
"""
from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels

__all__ = [
    "Interval", "PowerSegment", "PiecewisePowerDensity", "SmoothnessProfile",
    "MeasureModel", "normalize", "normalizing_constant", "cdf", "ball_measure",
    "lp_norm", "inverse_lp_norm", "smoothness_profile",
    "uniform", "linear_2x", "assouad_sharp", "mono_sharp",
]

RIGHT = "right"  # segment lies to the right of its anchor
LEFT = "left"


class MeasureModel(abc.ABC):
    """A probability measure on a compact interval that can weigh balls.

    Implementations are immutable; all methods are safe to call from
    several threads at once.
    """

    @property
    @abc.abstractmethod
    def support(self) -> "Interval":
        """Smallest closed interval containing the support."""

    @abc.abstractmethod
    def log_ball_measure(self, x, r, backend=None, offset=None) -> np.ndarray:
        """``log mu([x - r, x + r])`` for an array of centres ``x``.

        With ``offset`` the centres are ``x + offset`` carried as unrounded
        pairs, which keeps sub-ulp displacements from a breakpoint.
        """

    @abc.abstractmethod
    def cdf(self, x):
        ...

    @abc.abstractmethod
    def in_support(self, x, offset=None) -> np.ndarray:
        """Boolean mask: ``x`` (plus an unrounded ``offset``) lies in the closed support."""

    @abc.abstractmethod
    def structural_points(self) -> np.ndarray:
        """Points where the density changes form (endpoints, anchors, block edges)."""

    @abc.abstractmethod
    def smoothness_profile(self) -> "SmoothnessProfile":
        ...

    def ball_measure(self, x, r, backend=None):
        out = np.exp(self.log_ball_measure(np.atleast_1d(np.asarray(x, float)), r, backend))
        return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if not self.lo < self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        return (x >= self.lo) & (x <= self.hi)


@dataclass(frozen=True)
class SmoothnessProfile:
    """Exact ``L^p`` / ``L^{-p}`` membership of a density.

    ``p1_sup`` is the supremum of ``p`` with ``f`` in ``L^p``; ``p2_sup`` the
    supremum with ``f`` in ``L^{-p}``. ``attained`` records whether the
    supremum itself is a member (only possible when it is infinite for pure
    power tails). ``zero_set_positive`` marks densities vanishing on a set of
    positive length: such densities are in no ``L^{-p}`` and report
    ``p2_sup = 0``.
    """

    p1_sup: float
    p2_sup: float
    attained: tuple[bool, bool] = (False, False)
    zero_set_positive: bool = False

    def admits(self, p1: float, p2: float) -> bool:
        """True if the density lies in ``L^{p1}`` and ``L^{-p2}``."""
        ok1 = p1 < self.p1_sup or (p1 == self.p1_sup and self.attained[0])
        ok2 = p2 < self.p2_sup or (p2 == self.p2_sup and self.attained[1])
        return ok1 and ok2 and not (self.zero_set_positive and p2 > 0)


def _int_t_pow(t0: float, t1: float, e: float) -> float:
    """Closed-form ``int_{t0}^{t1} t**e dt`` for ``0 <= t0 <= t1``; ``inf`` if divergent."""
    if t1 <= t0:
        return 0.0
    g = e + 1.0
    if t0 == 0.0 and g <= 0.0:
        return math.inf
    if g == 0.0:
        return math.log(t1 / t0)
    return (t1 ** g - t0 ** g) / g


@dataclass(frozen=True)
class PowerSegment:
    """Density ``coefficient * |x - anchor|**exponent`` on ``support``.

    ``side`` says where the segment sits relative to the anchor. A singular
    exponent (``< 0``) needs the anchor at the adjacent endpoint, so every
    singularity sits on a segment boundary. ``coefficient == 0`` (with
    ``exponent == 0``) is an explicit gap.
    """

    support: Interval
    coefficient: float
    exponent: float = 0.0
    anchor: float | None = None
    side: str = RIGHT

    def __post_init__(self):
        if self.anchor is None:
            object.__setattr__(
                self, "anchor", self.support.lo if self.side == RIGHT else self.support.hi)
        if self.side not in (RIGHT, LEFT):
            raise ValueError(f"side must be {RIGHT!r} or {LEFT!r}")
        if not self.exponent > -1.0:
            raise ValueError(f"exponent {self.exponent} is not integrable (need > -1)")
        if self.coefficient < 0 or not math.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite and nonnegative")
        if self.coefficient == 0 and self.exponent != 0:
            raise ValueError("a zero segment must have exponent 0")
        near = self.support.lo if self.side == RIGHT else self.support.hi
        if self.side == RIGHT and self.anchor > self.support.lo:
            raise ValueError("anchor must lie left of a right-of-anchor segment")
        if self.side == LEFT and self.anchor < self.support.hi:
            raise ValueError("anchor must lie right of a left-of-anchor segment")
        if self.exponent < 0 and self.anchor != near:
            raise ValueError("a singular segment must be anchored at its endpoint")

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0.0

    @property
    def t_range(self) -> tuple[float, float]:
        """Distances from the anchor to the near and far endpoints."""
        if self.side == RIGHT:
            return self.support.lo - self.anchor, self.support.hi - self.anchor
        return self.anchor - self.support.hi, self.anchor - self.support.lo

    @property
    def touches_anchor(self) -> bool:
        return self.t_range[0] == 0.0

    def mass(self) -> float:
        if self.is_zero:
            return 0.0
        t0, t1 = self.t_range
        return self.coefficient * _int_t_pow(t0, t1, self.exponent)

    def partial_mass(self, x):
        """Mass of ``[support.lo, x]`` (vectorised, clamped)."""
        x = np.clip(np.asarray(x, float), self.support.lo, self.support.hi)
        if self.is_zero:
            return np.zeros_like(x)
        beta = self.exponent + 1.0
        c = self.coefficient / beta
        if self.side == RIGHT:
            return c * ((x - self.anchor) ** beta - (self.support.lo - self.anchor) ** beta)
        return c * ((self.anchor - self.support.lo) ** beta - (self.anchor - x) ** beta)

    def density(self, x):
        x = np.asarray(x, float)
        if self.is_zero:
            return np.zeros_like(x)
        t = (x - self.anchor) if self.side == RIGHT else (self.anchor - x)
        with np.errstate(divide="ignore"):
            return self.coefficient * np.abs(t) ** self.exponent

    def power_integral(self, p: float) -> float:
        """``int f**p`` over the segment; ``p`` may be negative (inverse norms)."""
        if self.is_zero:
            return 0.0 if p > 0 else math.inf
        t0, t1 = self.t_range
        return self.coefficient ** p * _int_t_pow(t0, t1, self.exponent * p)

    def scaled(self, factor: float) -> "PowerSegment":
        return PowerSegment(self.support, self.coefficient * factor, self.exponent,
                            self.anchor, self.side)


@dataclass(frozen=True)
class PiecewisePowerDensity(MeasureModel):
    """Contiguous piecewise power density; see module docstring."""

    segments: tuple[PowerSegment, ...]
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("a density needs at least one segment")
        for a, b in zip(segs, segs[1:]):
            if a.support.hi != b.support.lo:
                raise ValueError(
                    "segments must be sorted and contiguous; express gaps as zero segments")
        if all(s.is_zero for s in segs):
            raise ValueError("density is identically zero")
        with np.errstate(divide="ignore"):
            arrays = (
                np.array([s.support.lo for s in segs]),
                np.array([s.support.hi for s in segs]),
                np.array([s.anchor for s in segs], dtype=float),
                np.array([1.0 if s.side == RIGHT else -1.0 for s in segs]),
                np.log(np.array([s.coefficient for s in segs])),
                np.array([s.exponent for s in segs]),
            )
        object.__setattr__(self, "_arrays", arrays)

    @classmethod
    def from_specs(cls, specs: Iterable[dict]) -> "PiecewisePowerDensity":
        """Build from dicts with keys ``lo, hi, coefficient, exponent, anchor[, side]``."""
        segs = []
        for s in specs:
            lo, hi = float(s["lo"]), float(s["hi"])
            anchor = s.get("anchor")
            side = s.get("side")
            if side is None:
                side = LEFT if anchor is not None and float(anchor) >= hi else RIGHT
            segs.append(PowerSegment(Interval(lo, hi), float(s.get("coefficient", 1.0)),
                                     float(s.get("exponent", 0.0)),
                                     None if anchor is None else float(anchor), side))
        return cls(tuple(segs))

    @property
    def support(self) -> Interval:
        live = [s for s in self.segments if not s.is_zero]
        return Interval(live[0].support.lo, live[-1].support.hi)

    @property
    def mass(self) -> float:
        return math.fsum(s.mass() for s in self.segments)

    @property
    def segment_log_masses(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.array([s.mass() for s in self.segments]))

    def density(self, x):
        x = np.asarray(x, float)
        out = np.zeros_like(x)
        for s in self.segments:
            inside = (x > s.support.lo) & (x <= s.support.hi)
            if s is self.segments[0]:
                inside |= x == s.support.lo
            out = np.where(inside, s.density(x), out)
        return out

    def cdf(self, x):
        x = np.asarray(x, float)
        out = np.zeros_like(x)
        for s in self.segments:
            out = out + s.partial_mass(x)
        return float(out) if out.ndim == 0 else out

    def log_ball_measure(self, x, r, backend=None, offset=None) -> np.ndarray:
        if not r > 0:
            raise ValueError("radius must be positive")
        return kernels.segment_log_ball(np.asarray(x, float), r, self._arrays, backend, offset)

    def in_support(self, x, offset=None) -> np.ndarray:
        x = np.asarray(x, float)
        out = np.zeros(x.shape, dtype=bool)
        for s in self.segments:
            if s.is_zero:
                continue
            if offset is None:
                out |= s.support.contains(x)
            else:
                out |= ((x - s.support.lo) + offset >= 0) & ((s.support.hi - x) - offset >= 0)
        return out

    def structural_points(self) -> np.ndarray:
        pts = {s.support.lo for s in self.segments} | {s.support.hi for s in self.segments}
        sup = self.support
        pts |= {s.anchor for s in self.segments if sup.lo <= s.anchor <= sup.hi}
        return np.array(sorted(pts))

    def normalized(self) -> "PiecewisePowerDensity":
        total = self.mass
        return PiecewisePowerDensity(tuple(s.scaled(1.0 / total) for s in self.segments))

    def affine_image(self, a: float, b: float) -> "PiecewisePowerDensity":
        """Push-forward under ``x -> a*x + b`` (``a != 0``)."""
        if a == 0:
            raise ValueError("scale factor must be nonzero")
        segs = []
        for s in self.segments:
            lo, hi = sorted((a * s.support.lo + b, a * s.support.hi + b))
            side = s.side if a > 0 else (LEFT if s.side == RIGHT else RIGHT)
            coeff = s.coefficient * abs(a) ** (-s.exponent - 1.0)
            segs.append(PowerSegment(Interval(lo, hi), coeff, s.exponent, a * s.anchor + b, side))
        if a < 0:
            segs.reverse()
        return PiecewisePowerDensity(tuple(segs))

    def lp_norm(self, p: float) -> float:
        if p == math.inf:
            sup = 0.0
            for s in self.segments:
                if s.is_zero:
                    continue
                t0, t1 = s.t_range
                if s.exponent < 0:
                    if t0 == 0.0:
                        return math.inf
                    sup = max(sup, s.coefficient * t0 ** s.exponent)
                else:
                    sup = max(sup, s.coefficient * t1 ** s.exponent)
            return sup
        if p < 1:
            raise ValueError("lp_norm needs p >= 1")
        total = math.fsum(s.power_integral(p) for s in self.segments)
        return total ** (1.0 / p)

    def inverse_lp_norm(self, p: float) -> float:
        """``(int 1/f**p)**(1/p)``; ``inf`` when divergent or when ``f`` vanishes on a gap."""
        if not p > 0:
            raise ValueError("inverse_lp_norm needs p > 0")
        if any(s.is_zero for s in self.segments):
            return math.inf
        if p == math.inf:
            inf_f = math.inf
            for s in self.segments:
                t0, t1 = s.t_range
                if s.exponent > 0:
                    inf_f = min(inf_f, s.coefficient * t0 ** s.exponent)
                else:
                    inf_f = min(inf_f, s.coefficient * t1 ** s.exponent)
            return math.inf if inf_f == 0 else 1.0 / inf_f
        total = math.fsum(s.power_integral(-p) for s in self.segments)
        return total ** (1.0 / p)

    def smoothness_profile(self) -> SmoothnessProfile:
        p1, p2 = math.inf, math.inf
        zero_gap = False
        for s in self.segments:
            if s.is_zero:
                zero_gap = True
                continue
            if s.exponent < 0 and s.touches_anchor:
                p1 = min(p1, -1.0 / s.exponent)
            elif s.exponent > 0 and s.touches_anchor:
                p2 = min(p2, 1.0 / s.exponent)
        if zero_gap:
            p2 = 0.0
        return SmoothnessProfile(p1, p2, (p1 == math.inf, p2 == math.inf and not zero_gap),
                                 zero_gap)


# -- module-level operations ------------------------------------------------

def normalizing_constant(d: PiecewisePowerDensity) -> float:
    """Common factor that turns ``d`` into a probability density."""
    return 1.0 / d.mass


def normalize(d: PiecewisePowerDensity) -> PiecewisePowerDensity:
    return d.normalized()


def cdf(d: MeasureModel, x):
    return d.cdf(x)


def ball_measure(m: MeasureModel, x, r, backend=None):
    return m.ball_measure(x, r, backend)


def lp_norm(d: PiecewisePowerDensity, p: float) -> float:
    return d.lp_norm(p)


def inverse_lp_norm(d: PiecewisePowerDensity, p: float) -> float:
    return d.inverse_lp_norm(p)


def smoothness_profile(m: MeasureModel) -> SmoothnessProfile:
    return m.smoothness_profile()


# -- presets -------------------------------------------------------------------

def _recip(p: float) -> float:
    return 0.0 if p == math.inf else 1.0 / p


def uniform(lo: float = 0.0, hi: float = 1.0) -> PiecewisePowerDensity:
    return PiecewisePowerDensity((PowerSegment(Interval(lo, hi), 1.0 / (hi - lo)),))


def linear_2x() -> PiecewisePowerDensity:
    """``f(x) = 2x`` on ``[0, 1]``: lower dimension 1, Assouad dimension 2."""
    return PiecewisePowerDensity((PowerSegment(Interval(0.0, 1.0), 2.0, 1.0, 0.0, RIGHT),))


def assouad_sharp(p1: float = 2.0, p2: float = 3.0) -> PiecewisePowerDensity:
    """``C(-x)**(1/p2)`` on ``[-1, 0]`` and ``C x**(-1/p1)`` on ``(0, 1]``.

    Sharp for the Assouad spectrum bound; ``C = 4/11`` at ``(p1, p2) = (2, 3)``.
    """
    _check_p(p1, p2)
    raw = PiecewisePowerDensity((
        PowerSegment(Interval(-1.0, 0.0), 1.0, _recip(p2), 0.0, LEFT),
        PowerSegment(Interval(0.0, 1.0), 1.0, -_recip(p1), 0.0, RIGHT),
    ))
    return raw.normalized()


def mono_sharp(p1: float = 2.0, p2: float = 3.0) -> PiecewisePowerDensity:
    """Nonincreasing density ``C x**(-1/p1)`` on ``(0, 1]``, ``C(2-x)**(1/p2)`` on ``(1, 2]``."""
    _check_p(p1, p2)
    raw = PiecewisePowerDensity((
        PowerSegment(Interval(0.0, 1.0), 1.0, -_recip(p1), 0.0, RIGHT),
        PowerSegment(Interval(1.0, 2.0), 1.0, _recip(p2), 2.0, LEFT),
    ))
    return raw.normalized()


def _check_p(p1: float, p2: float) -> None:
    if not (p1 > 1 and p2 > 1):
        raise ValueError("sharp examples need p1, p2 in (1, inf]")


def density_from_segments(specs: Sequence[dict], normalize_mass: bool = True) -> PiecewisePowerDensity:
    d = PiecewisePowerDensity.from_specs(specs)
    return d.normalized() if normalize_mass else d
