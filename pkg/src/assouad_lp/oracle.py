"""Closed-form bounds on the Assouad and lower spectra.

Every formula is written in the reciprocals ``a = 1/p1`` and ``b = 1/p2`` so
that ``p = inf`` enters as ``0`` and no infinity ever appears in arithmetic.
Rational inputs (``int``, ``Fraction`` or short decimal floats) give exact
``Fraction`` results from :func:`phase_transitions`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

__all__ = [
    "INF", "REGIMES", "BoundSet", "Transition", "assouad_upper_bound", "lower_lower_bound",
    "sharp_assouad_spectrum", "sharp_lower_spectrum", "mono_sharp_spectra",
    "phase_transitions", "lower_zero_threshold",
]

INF = math.inf
REGIMES = ("general", "monotone", "piecewise-monotone", "general-reference")


def _recip(p):
    if p == INF:
        return 0
    return Fraction(1) / p if isinstance(p, (int, Fraction)) else 1.0 / p


def _exact(v):
    """Fraction for rational-looking input, ``INF`` unchanged."""
    if v == INF:
        return INF
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    return Fraction(repr(float(v)))


@dataclass(frozen=True)
class BoundSet:
    """Integrability exponents and regime of a bound.

    ``p1`` is the ``L^p`` exponent, ``p2`` the ``L^{-p}`` exponent. ``s`` and
    ``t`` are the upper and lower exponents of a general reference measure
    and are only read in the 'general-reference' regime. ``p2`` may lie below
    1 (for example ``f = 2x`` is in ``L^{-q}`` only for ``q < 1``).
    """

    p1: float = INF
    p2: float = INF
    regime: str = "general"
    s: float = 1.0
    t: float = 1.0

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}")
        if not self.p1 >= 1:
            raise ValueError("p1 must be >= 1")
        if not self.p2 > 0:
            raise ValueError("p2 must be positive")
        if self.s < 0 or self.t < 0 or self.t > self.s:
            raise ValueError("need 0 <= t <= s")

    @property
    def a(self):
        return _recip(self.p1)

    @property
    def b(self):
        return _recip(self.p2)


def _check_theta(theta):
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")


def _general_upper(a, b, th):
    return 1 + (b + th * a) / (1 - th)


def _general_lower(a, b, th):
    return 1 - (th * b + a) / (1 - th)


def _mono_upper(a, b, th):
    return max(1 + b / (1 - th), 1 + th * a / (1 - th))


def _mono_lower(a, b, th):
    return min(1 - th * b / (1 - th), 1 - a / (1 - th))


def assouad_upper_bound(bs: BoundSet, theta):
    """Upper bound for the Assouad spectrum at ``theta``."""
    _check_theta(theta)
    a, b = bs.a, bs.b
    if bs.regime == "monotone":
        return _mono_upper(a, b, theta)
    if bs.regime == "general-reference":
        s, t = bs.s, bs.t
        return (s - theta * t) / (1 - theta) + (b * s + theta * a * t) / (1 - theta)
    return _general_upper(a, b, theta)


def lower_lower_bound(bs: BoundSet, theta):
    """Lower bound for the lower spectrum at ``theta`` (unclipped, may be negative)."""
    _check_theta(theta)
    a, b = bs.a, bs.b
    if bs.regime in ("monotone", "piecewise-monotone"):
        return _mono_lower(a, b, theta)
    if bs.regime == "general-reference":
        s, t = bs.s, bs.t
        return (t - theta * s) / (1 - theta) - (theta * b * s + a * t) / (1 - theta)
    return _general_lower(a, b, theta)


def sharp_assouad_spectrum(p1, p2, theta):
    """Assouad spectrum of the two-sided power example (equals the general bound)."""
    return assouad_upper_bound(BoundSet(p1, p2), theta)


def sharp_lower_spectrum(p1, p2, theta):
    """Lower spectrum of the dyadic block example: the general bound clipped at 0."""
    return max(lower_lower_bound(BoundSet(p1, p2), theta), 0)


def lower_zero_threshold(p1, p2):
    """``theta`` at which the general lower bound reaches 0: ``(1 - 1/p1) / (1 + 1/p2)``."""
    a, b = _recip(_exact(p1)), _recip(_exact(p2))
    return (1 - a) / (1 + b)


def mono_sharp_spectra(p1, p2, theta):
    """Stated (Assouad, lower) spectra of the monotone power example."""
    bs = BoundSet(p1, p2, "monotone")
    return assouad_upper_bound(bs, theta), max(lower_lower_bound(bs, theta), 0)


class Transition(NamedTuple):
    theta: Fraction | float
    spectrum: str  # 'assouad' or 'lower'
    description: str


def _inside(th) -> bool:
    return 0 < th < 1


def phase_transitions(bs: BoundSet) -> list[Transition]:
    """Kinks in (0, 1) of the regime's spectrum formulas, lower ones clipped at 0.

    Exact ``Fraction`` values when the parameters are rational.
    """
    a, b = _recip(_exact(bs.p1)), _recip(_exact(bs.p2))
    out: list[Transition] = []
    if bs.regime == "monotone" and a > 0 and _inside(b / a):
        out.append(Transition(b / a, "assouad",
                              "branches 1+1/(p2(1-theta)) and 1+theta/(p1(1-theta)) cross"))
    if bs.regime in ("monotone", "piecewise-monotone"):
        zero = min(1 / (1 + b), 1 - a)
        if b > 0 and _inside(a / b) and a / b < zero:
            out.append(Transition(a / b, "lower", "branches of the lower minimum cross"))
        if _inside(zero):
            out.append(Transition(zero, "lower", "lower spectrum reaches 0"))
    elif bs.regime == "general":
        zero = (1 - a) / (1 + b)
        if _inside(zero):
            out.append(Transition(zero, "lower", "lower spectrum reaches 0"))
    else:
        s, t = _exact(bs.s), _exact(bs.t)
        if s > 0:
            zero = t * (1 - a) / (s * (1 + b))
            if _inside(zero):
                out.append(Transition(zero, "lower", "lower bound reaches 0"))
    return sorted(out, key=lambda tr: (tr.theta, tr.spectrum))
