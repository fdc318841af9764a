"""Countable block measures, truncated at a finite depth.

Each family is a disjoint union of plateau blocks. A block has an inner
plateau ``|y - center| <= rho_in`` and optionally an outer annulus
``rho_in < |y - center| <= rho_out`` with its own height. Radii and heights
are kept as logarithms, because several families go far below the smallest
positive double (``mu_p`` near ``p = 1`` has radii around ``2**-3000``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .measure import Interval, MeasureModel, SmoothnessProfile

__all__ = [
    "Block", "DyadicBlockMeasure", "build_lower_sharp", "build_staircase",
    "build_mu_p", "build_composite", "block_ball_measure", "harmonic_partial_sum",
    "LOG_UNDERFLOW",
]

LOG2 = math.log(2.0)
# radii below 2**-60 are flagged as log-space only
LOG_UNDERFLOW = -60 * LOG2
MAX_COMPOSITE_DEPTH = 5
DEFAULT_DEPTH = 40


def _exp(v: float) -> float:
    return math.exp(v) if v > -745.0 else 0.0


@dataclass(frozen=True)
class Block:
    """One plateau block, all sizes in natural-log form.

    ``log_rho_out == log_rho_in`` and ``log_h_out == -inf`` describe a
    single plateau.
    """

    center: float
    log_rho_in: float
    log_h_in: float
    log_rho_out: float = -math.inf
    log_h_out: float = -math.inf

    def __post_init__(self):
        if self.log_rho_out == -math.inf:
            object.__setattr__(self, "log_rho_out", self.log_rho_in)
        if self.log_rho_out < self.log_rho_in:
            raise ValueError("outer radius must not be smaller than inner radius")

    @property
    def radius_inner(self) -> float:
        return _exp(self.log_rho_in)

    @property
    def radius_outer(self) -> float:
        return _exp(self.log_rho_out)

    @property
    def height_inner(self) -> float:
        return _exp(self.log_h_in)

    @property
    def height_outer(self) -> float:
        return _exp(self.log_h_out)

    @property
    def log_mass(self) -> float:
        inner = LOG2 + self.log_rho_in + self.log_h_in
        if self.log_h_out == -math.inf or self.log_rho_out == self.log_rho_in:
            return inner
        # annulus length 2(rho_out - rho_in), computed without cancellation
        ann = LOG2 + self.log_rho_out + math.log(-math.expm1(self.log_rho_in - self.log_rho_out))
        return float(np.logaddexp(inner, ann + self.log_h_out))

    @property
    def log_space_only(self) -> bool:
        return self.log_rho_in < LOG_UNDERFLOW

    def shifted(self, log_factor: float) -> "Block":
        return Block(self.center, self.log_rho_in, self.log_h_in + log_factor,
                     self.log_rho_out, self.log_h_out + log_factor)


@dataclass(frozen=True)
class DyadicBlockMeasure(MeasureModel):
    """Probability measure made of disjoint plateau blocks.

    ``blocks`` are stored sorted by centre (ascending). ``normalizer`` is the
    factor applied to the raw construction so that the truncation has mass 1.
    ``flags`` lists construction notes such as log-space-only radii.
    """

    blocks: tuple[Block, ...]
    truncation_depth: int
    normalizer: float
    family: str
    params: dict = field(default_factory=dict)
    profile: SmoothnessProfile | None = None
    flags: tuple[str, ...] = ()
    _arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple(sorted(self.blocks, key=lambda b: b.center))
        object.__setattr__(self, "blocks", blocks)
        c = np.array([b.center for b in blocks])
        lri = np.array([b.log_rho_in for b in blocks])
        lro = np.array([b.log_rho_out for b in blocks])
        ri, ro = np.exp(lri), np.exp(lro)
        arrays = (c, ri, ro, lri, lro,
                  np.array([b.log_h_in for b in blocks]),
                  np.array([b.log_h_out for b in blocks]),
                  c - ro, c + ro)
        object.__setattr__(self, "_arrays", arrays)

    def __hash__(self):
        return id(self)

    @property
    def support(self) -> Interval:
        left, right = self._arrays[-2], self._arrays[-1]
        return Interval(float(left.min()), float(right.max()))

    @property
    def log_masses(self) -> np.ndarray:
        return np.array([b.log_mass for b in self.blocks])

    @property
    def mass(self) -> float:
        return math.fsum(np.exp(self.log_masses))

    @property
    def centers(self) -> np.ndarray:
        return self._arrays[0]

    def log_ball_measure(self, x, r, backend=None, offset=None) -> np.ndarray:
        if not r > 0:
            raise ValueError("radius must be positive")
        return kernels.block_log_ball(np.asarray(x, float), r, self._arrays, backend, offset)

    def brute_force_log_ball(self, x, r) -> np.ndarray:
        """Reference O(K) scan over every block (numpy backend)."""
        return kernels.block_log_ball(np.asarray(x, float), r, self._arrays, "numpy")

    def density(self, x):
        x = np.asarray(x, float)
        out = np.zeros(x.shape)
        for b in self.blocks:
            d = np.abs(x - b.center)
            out = np.where(d <= b.radius_inner, b.height_inner,
                           np.where(d <= b.radius_outer, b.height_outer, out))
        return out

    def cdf(self, x):
        x = np.asarray(x, float)
        out = np.zeros(x.shape)
        for b in self.blocks:
            for log_rho, log_h, sign in ((b.log_rho_out, b.log_h_out, 1.0),
                                         (b.log_rho_in, b.log_h_out, -1.0),
                                         (b.log_rho_in, b.log_h_in, 1.0)):
                if log_h == -math.inf:
                    continue
                rho = _exp(log_rho)
                covered = np.clip(x - (b.center - rho), 0.0, 2 * rho)
                out = out + sign * covered * _exp(log_h)
        return float(out) if out.ndim == 0 else out

    def in_support(self, x, offset=None) -> np.ndarray:
        x = np.asarray(x, float)
        off = 0.0 if offset is None else offset
        out = np.zeros(x.shape, dtype=bool)
        for b in self.blocks:
            rho = b.radius_outer if b.log_h_out > -math.inf else b.radius_inner
            out |= np.abs((x - b.center) + off) <= rho
        return out

    def structural_points(self) -> np.ndarray:
        c, ri, ro = self._arrays[0], self._arrays[1], self._arrays[2]
        pts = np.concatenate([c, c - ri, c + ri, c - ro, c + ro])
        return np.unique(pts)

    def log_power_integrals(self, p: float) -> np.ndarray:
        """Per-block ``log int f**p`` (any real ``p``; ``inf`` where a zero height meets ``p < 0``)."""
        out = []
        for b in self.blocks:
            inner = LOG2 + b.log_rho_in + p * b.log_h_in
            if b.log_rho_out > b.log_rho_in:
                if b.log_h_out == -math.inf:
                    ann = math.inf if p < 0 else -math.inf
                else:
                    ann = (LOG2 + b.log_rho_out + math.log(-math.expm1(b.log_rho_in - b.log_rho_out))
                           + p * b.log_h_out)
                inner = float(np.logaddexp(inner, ann))
            out.append(inner)
        return np.array(out)

    def power_partial_sums(self, p: float, raw: bool = True) -> np.ndarray:
        """Cumulative ``int f**p`` over blocks in decreasing-centre order.

        With ``raw`` the truncation renormalisation is undone, so the sums
        are those of the infinite construction's first blocks.
        """
        logs = self.log_power_integrals(p)[::-1]
        if raw:
            logs = logs - p * math.log(self.normalizer)
        return np.cumsum(np.exp(logs))

    def has_gaps(self) -> bool:
        left, right, ro = self._arrays[-2], self._arrays[-1], self._arrays[2]
        # radii come from exp(log rho); ignore rounding-level slivers
        slack = 1e-12 * np.maximum(ro[1:], ro[:-1])
        return bool(np.any(left[1:] - right[:-1] > slack))

    def lp_norm(self, p: float) -> float:
        if p == math.inf:
            return float(np.exp(max(max(b.log_h_in, b.log_h_out) for b in self.blocks)))
        return float(np.exp(np.logaddexp.reduce(self.log_power_integrals(p)) / p))

    def inverse_lp_norm(self, p: float) -> float:
        """``(int 1/f**p)**(1/p)`` over the support hull; ``inf`` across gaps."""
        if self.has_gaps():
            return math.inf
        if p == math.inf:
            return float(np.exp(-min(b.log_h_in if b.log_rho_out == b.log_rho_in
                                     else min(b.log_h_in, b.log_h_out) for b in self.blocks)))
        return float(np.exp(np.logaddexp.reduce(self.log_power_integrals(-p)) / p))

    def smoothness_profile(self) -> SmoothnessProfile:
        if self.profile is None:
            raise ValueError(f"no smoothness profile recorded for family {self.family!r}")
        return self.profile


def block_ball_measure(m: DyadicBlockMeasure, x, r, backend=None):
    """``mu([x - r, x + r])`` summed over the blocks the ball meets."""
    return m.ball_measure(x, r, backend)


def harmonic_partial_sum(K: int) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, K + 1)), Fraction(0))


def _normalized(blocks, K, family, params, profile, flags=()):
    log_total = float(np.logaddexp.reduce([b.log_mass for b in blocks]))
    blocks = [b.shifted(-log_total) for b in blocks]
    if any(b.log_space_only for b in blocks):
        flags = tuple(flags) + ("log-space-only radii below 2**-60",)
    return DyadicBlockMeasure(tuple(blocks), K, math.exp(-log_total), family, params,
                              profile, tuple(flags))


def _recip(p: float) -> float:
    return 0.0 if p == math.inf else 1.0 / p


def build_lower_sharp(p1: float = 2.0, p2: float = 3.0,
                      theta_list: Sequence[float] = (0.5,), K: int = DEFAULT_DEPTH
                      ) -> DyadicBlockMeasure:
    """Blocks at ``x_i = 3 * 2**-(i+1)``: tall thin core, low wide shoulder.

    Block ``i`` uses ``theta_i = theta_list[(i - 1) % len(theta_list)]``; the
    core has radius ``2**(-(i+1)/theta_i)`` and height ``~ 2**(i/(theta_i p1))``,
    the shoulder radius ``2**-(i+1)`` and height ``~ 2**(-i/p2)``.
    """
    if K < 8:
        raise ValueError("depth K must be at least 8")
    thetas = [float(t) for t in theta_list]
    if not thetas or not all(0 < t < 1 for t in thetas):
        raise ValueError("theta_list must be a nonempty list in (0, 1)")
    if not (p1 > 1 and p2 > 1):
        raise ValueError("p1 and p2 must lie in (1, inf]")
    a, b = _recip(p1), _recip(p2)
    blocks = []
    for i in range(1, K + 1):
        th = thetas[(i - 1) % len(thetas)]
        blocks.append(Block(
            center=3.0 * 2.0 ** -(i + 1),
            log_rho_in=-(i + 1) / th * LOG2,
            log_h_in=i * a / th * LOG2,
            log_rho_out=-(i + 1) * LOG2,
            log_h_out=-i * b * LOG2,
        ))
    profile = SmoothnessProfile(p1, p2, (p1 == math.inf, p2 == math.inf))
    return _normalized(blocks, K, "lower-sharp",
                       {"p1": p1, "p2": p2, "theta_list": tuple(thetas)}, profile)


def build_staircase(K: int = DEFAULT_DEPTH) -> DyadicBlockMeasure:
    """Bounded density ``2**-k`` on ``[2**-k, 2**-k+1)`` and ``2/3`` on ``[-1, 0]``.

    The steps beyond depth ``K`` carry mass ``4**-K / 3``; it is folded into a
    flat piece of height ``2**-K / 3`` on ``[0, 2**-K]`` so the total stays 1.
    """
    if K < 8:
        raise ValueError("depth K must be at least 8")
    blocks = [Block(-0.5, -LOG2, math.log(2.0 / 3.0))]
    for k in range(1, K + 1):
        blocks.append(Block(1.5 * 2.0 ** -k, -(k + 1) * LOG2, -k * LOG2))
    blocks.append(Block(2.0 ** -(K + 1), -(K + 1) * LOG2, -K * LOG2 - math.log(3.0)))
    profile = SmoothnessProfile(math.inf, 1.0, (True, False))
    return DyadicBlockMeasure(tuple(blocks), K, 1.0, "staircase", {}, profile)


def _mu_p_blocks(p: float, K: int, scale_log: float = 0.0, shift: float = 0.0,
                 weight_log: float = 0.0):
    """Blocks of ``mu_p`` (unnormalised), pushed through ``y -> e**scale_log * y + shift``.

    Block ``k`` sits at ``2**-k`` with length ``(k 2**(-p k))**(1/(p-1))`` and
    height ``(2**k / k)**(1/(p-1))``, so it carries mass ``2**-k`` and
    ``int f**p = 1/k``.
    """
    q = 1.0 / (p - 1.0)
    out = []
    for k in range(1, K + 1):
        log_len = q * (math.log(k) - p * k * LOG2)
        log_h = q * (k * LOG2 - math.log(k))
        out.append(Block(shift + math.exp(scale_log) * 2.0 ** -k,
                         log_len - LOG2 + scale_log,
                         log_h - scale_log + weight_log))
    return out


def build_mu_p(p: float = 1.5, K: int = DEFAULT_DEPTH) -> DyadicBlockMeasure:
    """Regular measure (Assouad dimension 1) whose density is not in ``L^p``."""
    if not 1 < p <= 1.5:
        raise ValueError("p must lie in (1, 1.5]")
    if K < 1:
        raise ValueError("depth K must be positive")
    profile = SmoothnessProfile(p, 0.0, (False, False), zero_set_positive=True)
    return _normalized(_mu_p_blocks(p, K), K, "mu_p", {"p": p}, profile)


def composite_inner_depth(k: int, margin: int = 4) -> int:
    """Deepest ``mu_p`` block of copy ``k`` whose centre is distinct in double precision."""
    return max(1, 52 + k - 2 ** k - margin)


def build_composite(K_outer: int = 4, K_inner: int = DEFAULT_DEPTH) -> DyadicBlockMeasure:
    """Truncation of ``sum_k 2**-k T_k(mu_{1 + 2**-k})`` with ``T_k(y) = 2**(-2**k) y + 2**-k``.

    The inner depth of copy ``k`` is capped by :func:`composite_inner_depth`.
    """
    if K_outer > MAX_COMPOSITE_DEPTH:
        raise ValueError(
            f"K_outer={K_outer} exceeds {MAX_COMPOSITE_DEPTH}: the copy T_k shrinks by "
            "2**(-2**k), and beyond k=5 its blocks are no longer distinct doubles")
    if K_outer < 1:
        raise ValueError("K_outer must be positive")
    blocks, flags = [], []
    for k in range(1, K_outer + 1):
        p = 1.0 + 2.0 ** -k
        depth = min(K_inner, composite_inner_depth(k))
        if depth < K_inner:
            flags.append(f"copy {k}: inner depth capped at {depth}")
        inner = _mu_p_blocks(p, depth)
        log_total = float(np.logaddexp.reduce([b.log_mass for b in inner]))
        blocks += _mu_p_blocks(p, depth, scale_log=-(2 ** k) * LOG2, shift=2.0 ** -k,
                               weight_log=-k * LOG2 - log_total)
    profile = SmoothnessProfile(1.0, 0.0, (False, False), zero_set_positive=True)
    return _normalized(blocks, K_outer, "composite",
                       {"K_outer": K_outer, "K_inner": K_inner}, profile, flags)
