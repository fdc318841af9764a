"""Seeded randomized property suites (hypothesis, derandomized)."""
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from assouad_lp import presets
from assouad_lp.measure import Interval, PiecewisePowerDensity, PowerSegment, uniform
from assouad_lp.oracle import INF, BoundSet, assouad_upper_bound, lower_lower_bound, sharp_lower_spectrum
from assouad_lp.spectrum import SweepConfig, estimate_spectra, geometric_radii
from assouad_lp.verification import check_combining_intervals, combining_construction

# seeded cases per property
PROPERTY_CASES = 10_000

many = settings(max_examples=PROPERTY_CASES)

ALL_PRESETS = sorted(presets.PRESETS)
_MEASURES = {name: presets.build_measure(name) for name in ALL_PRESETS}
thetas = st.floats(0.02, 0.98)
log10_R = st.floats(-12.0, -0.01)
DEEP_RADII = geometric_radii(1e-2, 1e-40, 3)


@st.composite
def segment_densities(draw):
    """Random contiguous piecewise power densities on a subinterval of [-1, 1]."""
    n = draw(st.integers(1, 4))
    cuts = sorted(draw(st.lists(st.floats(-1.0, 1.0), min_size=n + 1, max_size=n + 1,
                                unique=True)))
    if min(np.diff(cuts)) < 1e-3:
        cuts = list(np.linspace(-1.0, 1.0, n + 1))
    segs = []
    for lo, hi in zip(cuts, cuts[1:]):
        side = draw(st.sampled_from(["left", "right"]))
        e = draw(st.floats(-0.9, 2.0))
        c = draw(st.floats(0.1, 5.0))
        segs.append(PowerSegment(Interval(lo, hi), c, e, lo if side == "right" else hi, side))
    return PiecewisePowerDensity(tuple(segs)).normalized()


def _point(m, u):
    sup = m.support
    return sup.lo + u * sup.length


# -- Hölder chain, literal ratio form ----------------------------------------------------

HOLDER_PRESETS = ["uniform", "assouad-sharp", "mono-sharp", "lower-sharp", "staircase",
                  "linear-2x"]


@many
@given(name=st.sampled_from(HOLDER_PRESETS), u=st.floats(0, 1), lR=log10_R, theta=thetas,
       f1=st.floats(0.0, 0.99), f2=st.floats(0.01, 0.99))
def test_holder_ratio_chain(name, u, lR, theta, f1, f2):
    m = _MEASURES[name]
    prof = m.smoothness_profile()
    p1 = 1.0 + f1 * (min(prof.p1_sup, 10.0) - 1.0)
    p2 = f2 * min(prof.p2_sup, 10.0)
    assume(lR / theta > -300)
    x = _point(m, u)
    R = 10.0 ** lR
    r = R ** (1.0 / theta)
    sup = m.support
    # length of B(x, r) inside the support hull, without cancellation
    length_r = min(sup.hi - x, r) + min(x - sup.lo, r)
    lR_mass = float(m.log_ball_measure(np.array([x]), R)[0])
    lr_mass = float(m.log_ball_measure(np.array([x]), r)[0])
    assert math.isfinite(lr_mass)
    bound = (math.log(m.lp_norm(p1)) + math.log(m.inverse_lp_norm(p2))
             + (1 - 1 / p1) * math.log(2 * R) - (1 + 1 / p2) * math.log(length_r))
    assert lR_mass - lr_mass <= bound + 1e-9 * max(1.0, abs(bound))


# -- ball monotonicity ------------------------------------------------------------------

@many
@given(name=st.sampled_from(ALL_PRESETS), u=st.floats(-0.1, 1.1), a=st.floats(-300, 0.5),
       b=st.floats(-300, 0.5))
def test_ball_monotone_in_radius(name, u, a, b):
    m = _MEASURES[name]
    x = np.array([_point(m, u)])
    r1, r2 = sorted((10.0 ** a, 10.0 ** b))
    l1 = float(m.log_ball_measure(x, r1)[0])
    l2 = float(m.log_ball_measure(x, r2)[0])
    assert l1 <= l2 + 1e-12


@many
@given(d=segment_densities(), u=st.floats(-0.1, 1.1), a=st.floats(-200, 0.5),
       b=st.floats(-200, 0.5))
def test_ball_monotone_random_density(d, u, a, b):
    x = np.array([_point(d, u)])
    r1, r2 = sorted((10.0 ** a, 10.0 ** b))
    assert float(d.log_ball_measure(x, r1)[0]) <= float(d.log_ball_measure(x, r2)[0]) + 1e-12


# -- CDF against quadrature --------------------------------------------------------------

def _from_anchor(c, e, t):
    # int_0^t c * u**e du by QUADPACK's algebraic-weight rule, which handles
    # the endpoint singularity; anchor-relative so tiny t keeps its precision
    if t <= 0:
        return 0.0
    val, _ = integrate.quad(lambda u: c, 0.0, t, weight="alg", wvar=(e, 0.0),
                            epsabs=0, epsrel=1e-12)
    return val


def _quad_cdf(d, x):
    total = 0.0
    for s in d.segments:
        lo, hi = s.support.lo, s.support.hi
        top = min(hi, x)
        if top <= lo or s.is_zero:
            continue
        c, e = s.coefficient, s.exponent
        if s.side == "right":
            total += _from_anchor(c, e, top - s.anchor) - _from_anchor(c, e, lo - s.anchor)
        else:
            total += _from_anchor(c, e, s.anchor - lo) - _from_anchor(c, e, s.anchor - top)
    return total


@many
@given(d=segment_densities(), u=st.floats(0, 1))
def test_cdf_matches_quadrature(d, u):
    x = _point(d, u)
    ref = _quad_cdf(d, x)
    assert float(d.cdf(x)) == pytest.approx(ref, rel=1e-9, abs=1e-14)


@many
@given(name=st.sampled_from(ALL_PRESETS), u=st.floats(0, 1), lr=st.floats(-6, 0))
def test_cdf_difference_is_ball_mass(name, u, lr):
    m = _MEASURES[name]
    x, r = _point(m, u), 10.0 ** lr
    ball = float(m.ball_measure(x, r))
    diff = float(m.cdf(x + r)) - float(m.cdf(x - r))
    assert diff == pytest.approx(ball, rel=1e-9, abs=1e-13)


# -- sandwich ---------------------------------------------------------------------------

@many
@given(d=segment_densities(), theta=thetas,
       mode=st.sampled_from(["max-tail", "regression-decade"]))
def test_sandwich_random_density(d, theta, mode):
    # the grid reaches far below every feature size (cuts are >= 1e-3 apart)
    cfg = SweepConfig(thetas=(theta,), radii=DEEP_RADII, n_uniform=16, extrapolation=mode)
    rec = estimate_spectra(d, cfg).records[0]
    assert rec.lower_exponent <= rec.upper_exponent + 1e-9


# -- oracle identities ---------------------------------------------------------------------

exps = st.one_of(st.just(INF), st.floats(1.0, 1e6))


@many
@given(p1=exps, p2=st.one_of(st.just(INF), st.floats(0.05, 1e6)), theta=thetas)
def test_oracle_dominance_and_reduction(p1, p2, theta):
    g = BoundSet(p1, p2)
    mono = BoundSet(p1, p2, "monotone")
    ref = BoundSet(p1, p2, "general-reference", 1.0, 1.0)
    A, L = assouad_upper_bound(g, theta), lower_lower_bound(g, theta)
    assert assouad_upper_bound(mono, theta) <= A * (1 + 1e-15)
    assert lower_lower_bound(mono, theta) >= L - 1e-15 * abs(L)
    assert assouad_upper_bound(ref, theta) == pytest.approx(A, rel=1e-14, abs=1e-14)
    assert lower_lower_bound(ref, theta) == pytest.approx(L, rel=1e-14, abs=1e-14)
    assert L <= 1 <= A


@many
@given(p1=st.floats(1.0, 1e3), p2=st.floats(0.5, 1e3), k=st.floats(1.0, 1e3), theta=thetas)
def test_oracle_limit_monotone(p1, p2, k, theta):
    b1, b2 = BoundSet(p1, p2), BoundSet(p1 * k, p2 * k)
    assert assouad_upper_bound(b2, theta) <= assouad_upper_bound(b1, theta) * (1 + 1e-15)
    assert lower_lower_bound(b2, theta) >= lower_lower_bound(b1, theta) - 1e-12
    inf = BoundSet(INF, INF)
    assert assouad_upper_bound(inf, theta) == 1 == lower_lower_bound(inf, theta)


@many
@given(p1=st.floats(1.01, 1e3), p2=st.floats(1.01, 1e3), theta=thetas)
def test_oracle_clip(p1, p2, theta):
    assert sharp_lower_spectrum(p1, p2, theta) == max(lower_lower_bound(BoundSet(p1, p2), theta), 0)


@many
@given(p1=st.floats(1.0, 50), p2=st.floats(0.1, 50), s=st.floats(0, 3), frac=st.floats(0, 1),
       theta=thetas)
def test_reference_bounds_ordered(p1, p2, s, frac, theta):
    t = s * frac
    b = BoundSet(p1, p2, "general-reference", s, t)
    assert lower_lower_bound(b, theta) <= t + 1e-12
    assert assouad_upper_bound(b, theta) >= s - 1e-12


# -- combining intervals (randomized) ----------------------------------------------------------

@many
@given(a=st.floats(0, 0.6), l1=st.floats(1e-4, 0.2), d=st.floats(1e-5, 0.2),
       l2=st.floats(1e-4, 0.2), C=st.floats(0.05, 1.0), p=st.floats(1.01, 50), extra=st.floats(0, 1))
def test_combining_intervals_never_violated(a, l1, d, l2, C, p, extra):
    I1 = Interval(a, a + l1)
    I2 = Interval(a + l1 + d, a + l1 + d + l2)
    x1, r1, x2, r2, x0, half = combining_construction(I1, I2)
    assert x1 + r1 == pytest.approx(x2 - r2, abs=1e-12)
    assert (x1 - r1 + x2 + r2) / 2 == pytest.approx(x0, abs=1e-12)
    R = half + extra * (0.999 - half)
    if R < half:
        return
    rep = check_combining_intervals(uniform(), C, p, I1, I2, R)
    assert rep.status in ("pass", "hypothesis-not-satisfied", "rejected"), rep.line()
