"""Numerical Assouad and lower spectra.

For a scale pair ``R`` and ``r = R**(1/theta)`` the local exponent at ``x`` is

    E(x, R) = log(mu B(x, R) / mu B(x, r)) / log(R / r).

The Assouad spectrum is approached by the largest ``E`` over witness points
as ``R -> 0``, the lower spectrum by the smallest. Two ways of passing to the
limit are offered: the extreme over the ``m`` smallest radii (``max-tail``)
and a least-squares slope of the extreme log-ratio against ``log(R/r)`` over
the smallest decade of radii (``regression-decade``).

All radii live in log space: ``r`` may be as small as ``2**-1000``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .measure import MeasureModel

__all__ = [
    "SweepConfig", "ThetaRecord", "SpectrumEstimate", "QuasiLimits", "ResolutionError",
    "scale_exponent", "witness_points", "witness_pairs", "estimate_spectra",
    "estimate_assouad_spectrum", "estimate_lower_spectrum", "estimate_quasi_limits",
    "DEFAULT_THETAS", "geometric_radii",
]

DEFAULT_THETAS = tuple(round(0.05 * i, 2) for i in range(1, 20))
DEFAULT_R_FLOOR = 2.0 ** -1000
EXTRAPOLATIONS = ("max-tail", "regression-decade")
X_STRATEGIES = ("uniform", "structural", "combined")


class ResolutionError(ValueError):
    """Every scale pair for some theta fell below the radius floor."""


def geometric_radii(r_max: float = 1e-2, r_min: float = 1e-100, per_decade: int = 3):
    n = int(round(math.log10(r_max / r_min) * per_decade)) + 1
    return tuple(np.geomspace(r_max, r_min, n).tolist())


@dataclass(frozen=True)
class SweepConfig:
    """Grids and limit procedure for a spectrum sweep.

    Parameters
    ----------
    thetas : strictly increasing values in (0, 1)
    radii : outer radii ``R``, decreasing
    x_strategy : 'uniform', 'structural' or 'combined'
    n_uniform : number of evenly spaced fill points
    extrapolation : 'max-tail' or 'regression-decade'
    tail : number of smallest radii used by 'max-tail'
    r_floor : scale pairs with ``R**(1/theta) < r_floor`` are dropped
    workers : thread count for the theta loop (results do not depend on it)
    """

    thetas: tuple = DEFAULT_THETAS
    radii: tuple = field(default_factory=geometric_radii)
    x_strategy: str = "combined"
    n_uniform: int = 256
    extrapolation: str = "regression-decade"
    tail: int = 5
    r_floor: float = DEFAULT_R_FLOOR
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "radii", tuple(float(R) for R in self.radii))
        th = np.array(self.thetas)
        if th.size == 0 or np.any(th <= 0) or np.any(th >= 1) or np.any(np.diff(th) <= 0):
            raise ValueError("thetas must be strictly increasing values in (0, 1)")
        R = np.array(self.radii)
        if R.size == 0 or np.any(R <= 0) or np.any(R >= 1) or np.any(np.diff(R) >= 0):
            raise ValueError("radii must be strictly decreasing values in (0, 1)")
        if not 0 < self.r_floor < 1:
            raise ValueError("r_floor must lie in (0, 1)")
        if R.min() < self.r_floor:
            raise ValueError(f"smallest radius {R.min():g} is below r_floor {self.r_floor:g}")
        if self.x_strategy not in X_STRATEGIES:
            raise ValueError(f"x_strategy must be one of {X_STRATEGIES}")
        if self.extrapolation not in EXTRAPOLATIONS:
            raise ValueError(f"extrapolation must be one of {EXTRAPOLATIONS}")
        if self.tail < 1 or self.n_uniform < 0 or self.workers < 1:
            raise ValueError("tail and workers must be positive, n_uniform nonnegative")

    @classmethod
    def dyadic(cls, thetas=DEFAULT_THETAS, k_min: int = 6, k_max: int = 40, **kw):
        """Radii ``2**-(k+1)`` for ``k_min <= k <= k_max``, matching block scales."""
        radii = tuple(2.0 ** -(k + 1) for k in range(k_min, k_max + 1))
        kw.setdefault("tail", len(radii))
        return cls(thetas=thetas, radii=radii, **kw)

    def to_dict(self) -> dict:
        return {"thetas": list(self.thetas), "radii": list(self.radii),
                "x_strategy": self.x_strategy, "n_uniform": self.n_uniform,
                "extrapolation": self.extrapolation, "tail": self.tail,
                "r_floor": self.r_floor, "workers": self.workers}


@dataclass(frozen=True)
class ThetaRecord:
    theta: float
    upper_exponent: float
    lower_exponent: float
    witness_x_upper: float
    witness_x_lower: float
    R_used: tuple
    dropped_pairs: int
    fit_residual: float
    upper_divergent: bool = False


@dataclass(frozen=True)
class SpectrumEstimate:
    records: tuple
    config: SweepConfig

    @property
    def thetas(self) -> np.ndarray:
        return np.array([rec.theta for rec in self.records])

    @property
    def upper(self) -> np.ndarray:
        return np.array([rec.upper_exponent for rec in self.records])

    @property
    def lower(self) -> np.ndarray:
        return np.array([rec.lower_exponent for rec in self.records])

    def at(self, theta: float) -> ThetaRecord:
        for rec in self.records:
            if math.isclose(rec.theta, theta, rel_tol=0, abs_tol=1e-12):
                return rec
        raise KeyError(theta)


class QuasiLimits(NamedTuple):
    """Trend of the spectra toward ``theta = 1``.

    ``assouad`` is ``None`` when the divergence test fires; the last finite
    estimate is kept in ``assouad_last``.
    """

    assouad: float | None
    lower: float
    assouad_divergent: bool
    assouad_last: float
    theta_used: float


def inner_radius(R: float, theta: float) -> float:
    """``R**(1/theta)``, computed the same way everywhere so offsets ``+-r`` are exact tangencies."""
    return math.exp(math.log(R) / theta)


def _log_ratio(m: MeasureModel, xs, R: float, r: float, backend=None, offset=None):
    return (m.log_ball_measure(xs, R, backend, offset),
            m.log_ball_measure(xs, r, backend, offset))


def scale_exponent(m: MeasureModel, x, R: float, theta: float, backend=None):
    """``log(mu B(x,R) / mu B(x,r)) / log(R/r)`` with ``r = R**(1/theta)``.

    Returns ``inf`` where the inner ball has zero mass but the outer one does
    not, and ``nan`` where both are empty.
    """
    if not 0 < R < 1:
        raise ValueError("R must lie in (0, 1)")
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    xs = np.atleast_1d(np.asarray(x, float))
    log_R = math.log(R)
    log_r = log_R / theta
    lR, lr = _log_ratio(m, xs, R, math.exp(log_r), backend)
    out = _exponents(lR, lr, log_R - log_r)
    return float(out[0]) if np.ndim(x) == 0 else out


def _exponents(lR, lr, denom):
    with np.errstate(invalid="ignore"):
        e = (lR - lr) / denom
    e = np.where(np.isfinite(lr), e, np.where(np.isfinite(lR), np.inf, np.nan))
    return e


def _fill(m: MeasureModel, n: int) -> np.ndarray:
    sup = m.support
    if n == 0:
        return np.empty(0)
    return np.linspace(sup.lo, sup.hi, n)


def witness_pairs(m: MeasureModel, R: float, theta: float, x_strategy: str = "combined",
                  n_uniform: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Candidate centres as ``(base, offset)`` pairs, centre ``base + offset``.

    Structural points (endpoints, anchors, block centres and edges) are
    offset by ``0``, ``+-r``, ``+-R/2`` and ``+-R``; a uniform fill (offset
    ``0``) covers the rest. Keeping the offset apart means ``s + r`` is still
    distinct from ``s`` when ``r`` is below ``ulp(s)``. The ``R/2`` offsets
    catch a singular point inside the outer ball but far outside the inner
    one. Pairs outside the support are dropped; the hull endpoints are
    structural, so nothing is lost by that.
    """
    r = inner_radius(R, theta)
    bases, offs = [], []
    if x_strategy in ("structural", "combined"):
        s = m.structural_points()
        for o in (0.0, -r, r, -0.5 * R, 0.5 * R, -R, R):
            bases.append(s)
            offs.append(np.full(s.shape, o))
    if x_strategy in ("uniform", "combined"):
        f = _fill(m, n_uniform)
        bases.append(f)
        offs.append(np.zeros(f.shape))
    pairs = np.unique(np.column_stack([np.concatenate(bases), np.concatenate(offs)]), axis=0)
    b, o = pairs[:, 0], pairs[:, 1]
    keep = m.in_support(b, o)
    return b[keep], o[keep]


def witness_points(m: MeasureModel, R: float, theta: float, x_strategy: str = "combined",
                   n_uniform: int = 256) -> np.ndarray:
    """Candidate centres rounded to floats (see ``witness_pairs``)."""
    b, o = witness_pairs(m, R, theta, x_strategy, n_uniform)
    return np.unique(b + o)


def _sweep_theta(m: MeasureModel, theta: float, cfg: SweepConfig, backend) -> ThetaRecord:
    log_floor = math.log(cfg.r_floor)
    used, dropped = [], 0
    y_up, y_lo, x_up, x_lo, denoms, divergent_at = [], [], [], [], [], []
    for R in cfg.radii:
        log_R = math.log(R)
        log_r = log_R / theta
        if log_r < log_floor:
            dropped += 1
            continue
        xb, xo = witness_pairs(m, R, theta, cfg.x_strategy, cfg.n_uniform)
        lR, lr = _log_ratio(m, xb, R, inner_radius(R, theta), backend, xo)
        xs = xb + xo
        ok = np.isfinite(lr)
        diverge = bool(np.any(~ok & np.isfinite(lR)))
        if not ok.any():
            dropped += 1
            continue
        lg = np.where(ok, lR - lr, np.nan)
        iu, il = int(np.nanargmax(lg)), int(np.nanargmin(lg))
        used.append(R)
        denoms.append(log_R - log_r)
        y_up.append(lg[iu])
        y_lo.append(lg[il])
        x_up.append(xs[iu])
        x_lo.append(xs[il])
        divergent_at.append(diverge)
    if not used:
        raise ResolutionError(f"resolution insufficient for theta={theta}")
    X = np.array(denoms)
    e_up, e_lo = np.array(y_up) / X, np.array(y_lo) / X
    if cfg.extrapolation == "max-tail":
        sl = slice(max(0, len(used) - cfg.tail), len(used))
        ju = sl.start + int(np.argmax(e_up[sl]))
        jl = sl.start + int(np.argmin(e_lo[sl]))
        up, lo = float(e_up[ju]), float(e_lo[jl])
        resid = float(max(np.ptp(e_up[sl]), np.ptp(e_lo[sl])))
        tail_R = used[sl]
        wu, wl = x_up[ju], x_lo[jl]
        div = any(divergent_at[sl])
    else:
        R_arr = np.array(used)
        sel = R_arr <= R_arr.min() * 10.0 * (1 + 1e-12)
        if sel.sum() < 2:
            sel = np.zeros(len(used), bool)
            sel[-2:] = True
        up, ru = _slope(X[sel], np.array(y_up)[sel])
        lo, rl = _slope(X[sel], np.array(y_lo)[sel])
        resid = max(ru, rl)
        wu, wl = x_up[-1], x_lo[-1]
        tail_R = tuple(R_arr[sel].tolist())
        div = any(np.array(divergent_at)[sel])
    if div:
        up = math.inf
    return ThetaRecord(theta, up, lo, float(wu), float(wl), tuple(tail_R), dropped, resid, div)


def _slope(X, Y):
    if len(X) < 2:
        return float(Y[0] / X[0]), 0.0
    A = np.vstack([X, np.ones_like(X)]).T
    coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
    fit = A @ coef
    return float(coef[0]), float(np.sqrt(np.mean((Y - fit) ** 2)))


def estimate_spectra(m: MeasureModel, cfg: SweepConfig | None = None,
                     backend: str | None = None) -> SpectrumEstimate:
    """Both spectra from one sweep; records follow ``cfg.thetas`` order."""
    cfg = cfg or SweepConfig()
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            recs = list(pool.map(lambda t: _sweep_theta(m, t, cfg, backend), cfg.thetas))
    else:
        recs = [_sweep_theta(m, t, cfg, backend) for t in cfg.thetas]
    return SpectrumEstimate(tuple(recs), cfg)


def estimate_assouad_spectrum(m: MeasureModel, cfg: SweepConfig | None = None,
                              backend=None) -> SpectrumEstimate:
    return estimate_spectra(m, cfg, backend)


def estimate_lower_spectrum(m: MeasureModel, cfg: SweepConfig | None = None,
                            backend=None) -> SpectrumEstimate:
    return estimate_spectra(m, cfg, backend)


def estimate_quasi_limits(m: MeasureModel, cfg: SweepConfig | None = None,
                          est: SpectrumEstimate | None = None,
                          ratio: float = 4.0) -> QuasiLimits:
    """Read off the spectra at the largest theta and flag Assouad divergence.

    Divergence is reported when the estimate at the largest theta exceeds
    ``ratio`` times the estimate at the theta nearest 0.5.
    """
    cfg = cfg or SweepConfig()
    if max(cfg.thetas) < 0.95 - 1e-12:
        raise ValueError("quasi limits need a theta grid reaching 0.95")
    est = est or estimate_spectra(m, cfg)
    th = est.thetas
    last = est.records[-1]
    mid = est.records[int(np.argmin(np.abs(th - 0.5)))]
    div = last.upper_divergent or last.upper_exponent > ratio * mid.upper_exponent
    return QuasiLimits(None if div else last.upper_exponent, last.lower_exponent,
                       div, last.upper_exponent, last.theta)
