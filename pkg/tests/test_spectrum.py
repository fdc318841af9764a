import math

import numpy as np
import pytest

from assouad_lp import oracle, presets
from assouad_lp.measure import Interval, PiecewisePowerDensity, PowerSegment, linear_2x, uniform
from assouad_lp.spectrum import (DEFAULT_THETAS, ResolutionError, SweepConfig, estimate_quasi_limits,
                                 estimate_spectra, geometric_radii, scale_exponent, witness_points)


# -- single-scale exponent ---------------------------------------------------------

def test_uniform_interior_exponent():
    assert scale_exponent(uniform(), 0.5, 0.01, 0.5) == pytest.approx(1.0, abs=1e-12)


def test_2x_exponent_at_zero_and_one():
    assert scale_exponent(linear_2x(), 1e-9, 1e-3, 0.5) == pytest.approx(2.0, abs=0.01)
    assert scale_exponent(linear_2x(), 1.0, 1e-3, 0.5) == pytest.approx(1.0, abs=0.01)


def test_empty_inner_ball_is_infinite():
    from assouad_lp.measure import Interval, PiecewisePowerDensity, PowerSegment
    d = PiecewisePowerDensity((PowerSegment(Interval(0, 1), 1.0), PowerSegment(Interval(1, 2), 0.0),
                               PowerSegment(Interval(2, 3), 1.0))).normalized()
    assert scale_exponent(d, 1.5, 0.6, 0.5) == math.inf
    assert math.isnan(scale_exponent(d, 1.5, 0.1, 0.5))


def test_scale_exponent_validates():
    with pytest.raises(ValueError):
        scale_exponent(uniform(), 0.5, 1.5, 0.5)
    with pytest.raises(ValueError):
        scale_exponent(uniform(), 0.5, 0.1, 1.0)


def test_scale_exponent_affine_invariant():
    d = presets.build_measure("assouad-sharp")
    a, b = 0.25, 3.0
    img = d.affine_image(a, b)
    xs = np.array([-0.5, -1e-7, 0.0, 1e-7, 0.3])
    for R, th in ((1e-3, 0.3), (1e-5, 0.7)):
        e1 = scale_exponent(d, xs, R, th)
        # the same pair of balls in image coordinates: radii scale by a
        lR, lr = np.log(R) + np.log(a), np.log(R) / th + np.log(a)
        num = img.log_ball_measure(a * xs + b, math.exp(lR)) - img.log_ball_measure(a * xs + b,
                                                                                   math.exp(lr))
        np.testing.assert_allclose(num / (np.log(R) - np.log(R) / th), e1, atol=1e-10)


# -- witness points ----------------------------------------------------------------

def test_witnesses_include_minus_r_for_assouad_sharp():
    m = presets.build_measure("assouad-sharp")
    R, th = 1e-4, 0.5
    xs = witness_points(m, R, th)
    r = R ** (1 / th)
    assert np.any(np.isclose(xs, -r, rtol=1e-12, atol=0))


def test_witnesses_include_block_centres():
    m = presets.build_measure("lower-sharp")
    xs = witness_points(m, 1e-3, 0.5)
    assert np.all(np.isin(m._arrays[0], xs))


def test_uniform_witnesses():
    xs = witness_points(uniform(), 1e-3, 0.5, n_uniform=16)
    assert xs[0] == 0.0 and xs[-1] == 1.0
    assert np.all((xs >= 0) & (xs <= 1))
    assert len(np.unique(xs)) == len(xs)


# -- sweep configuration --------------------------------------------------------------

def test_default_grids():
    cfg = SweepConfig()
    assert cfg.thetas == DEFAULT_THETAS and len(cfg.thetas) == 19
    assert min(cfg.radii) < 1e-9
    assert cfg.extrapolation == "regression-decade"


def test_geometric_radii():
    r = geometric_radii(1e-2, 1e-9, 8)
    assert len(r) == 57
    assert r[0] == pytest.approx(1e-2) and r[-1] == pytest.approx(1e-9)


@pytest.mark.parametrize("kw", [dict(thetas=(0.5, 0.3)), dict(thetas=(0.0, 0.5)),
                                dict(radii=(1e-2, 2.0)), dict(extrapolation="median"),
                                dict(tail=0), dict(workers=0)])
def test_invalid_sweep_rejected(kw):
    with pytest.raises(ValueError):
        SweepConfig(**kw)


def test_all_pairs_dropped_raises():
    cfg = SweepConfig(thetas=(0.05,), radii=(1e-5,), r_floor=2.0 ** -60)
    with pytest.raises(ResolutionError, match="resolution insufficient"):
        estimate_spectra(uniform(), cfg)


def test_dropped_pairs_counted():
    cfg = SweepConfig(thetas=(0.2, 0.9), radii=geometric_radii(1e-2, 1e-9, 8),
                      r_floor=2.0 ** -60)
    est = estimate_spectra(uniform(), cfg)
    assert est.at(0.2).dropped_pairs > 0
    assert est.at(0.9).dropped_pairs == 0


# -- estimates -----------------------------------------------------------------------

def test_uniform_spectra(preset_estimates):
    est = preset_estimates("uniform")
    np.testing.assert_allclose(est.upper, 1.0, atol=0.01)
    np.testing.assert_allclose(est.lower, 1.0, atol=0.01)
    assert max(r.fit_residual for r in est.records) < 1e-6


def test_assouad_sharp_midpoint(preset_estimates):
    est = preset_estimates("assouad-sharp")
    assert est.at(0.5).upper_exponent == pytest.approx(13 / 6, abs=0.05)


def test_linear_2x_spectra(preset_estimates):
    est = preset_estimates("linear-2x")
    np.testing.assert_allclose(est.upper, 2.0, atol=0.05)
    np.testing.assert_allclose(est.lower, 1.0, atol=0.05)


def test_lower_sharp_values(preset_estimates):
    est = preset_estimates("lower-sharp")
    assert est.at(0.25).lower_exponent == pytest.approx(2 / 9, abs=0.05)
    assert est.at(0.5).lower_exponent == pytest.approx(0.0, abs=0.05)


@pytest.mark.parametrize("name", ["uniform", "linear-2x", "assouad-sharp", "mono-sharp",
                                  "lower-sharp", "staircase"])
def test_sandwich(preset_estimates, name):
    est = preset_estimates(name)
    assert np.all(est.lower <= est.upper + 1e-12)


def test_bound_compliance(preset_estimates):
    for name in ("uniform", "linear-2x", "assouad-sharp", "mono-sharp", "lower-sharp"):
        est = preset_estimates(name)
        b = presets.natural_bounds(name)
        for rec in est.records:
            assert rec.upper_exponent <= oracle.assouad_upper_bound(b, rec.theta) + 0.05
            assert rec.lower_exponent >= oracle.lower_lower_bound(b, rec.theta) - 0.05


def test_staircase_estimates_exceed_one(preset_estimates):
    # finite depth caps the estimate; the non-doubling shows as growth in theta
    est = preset_estimates("staircase")
    assert np.all(est.upper > 1.0)
    assert est.upper[-1] > 10 * est.upper[0]


def test_mu_p_assouad_is_one(preset_estimates):
    est = preset_estimates("mu_p")
    np.testing.assert_allclose(est.upper, 1.0, atol=0.05)


def test_deterministic():
    m = presets.build_measure("assouad-sharp")
    cfg = presets.default_sweep("assouad-sharp")
    a, b = estimate_spectra(m, cfg), estimate_spectra(m, cfg)
    assert a == b


def test_threaded_matches_serial():
    m = presets.build_measure("lower-sharp")
    cfg = presets.default_sweep("lower-sharp")
    a = estimate_spectra(m, cfg)
    b = estimate_spectra(m, SweepConfig(**{**cfg.to_dict(), "workers": 4}))
    assert a.records == b.records


def test_max_tail_mode_on_uniform():
    cfg = SweepConfig(extrapolation="max-tail", tail=5)
    est = estimate_spectra(uniform(), cfg)
    np.testing.assert_allclose(est.upper, 1.0, atol=0.01)


# -- quasi limits ----------------------------------------------------------------------

def test_quasi_limits(preset_estimates):
    q = estimate_quasi_limits(None, SweepConfig(), est=preset_estimates("assouad-sharp"))
    assert q.assouad_divergent and q.assouad is None
    q = estimate_quasi_limits(None, presets.default_sweep("lower-sharp"),
                              est=preset_estimates("lower-sharp"))
    assert q.lower == pytest.approx(0.0, abs=0.05)
    q = estimate_quasi_limits(None, SweepConfig(), est=preset_estimates("uniform"))
    assert not q.assouad_divergent
    assert (q.assouad, q.lower) == (pytest.approx(1.0, abs=0.01), pytest.approx(1.0, abs=0.01))


def test_quasi_limits_need_theta_near_one():
    with pytest.raises(ValueError):
        estimate_quasi_limits(uniform(), SweepConfig(thetas=(0.2, 0.5)))


def test_sub_ulp_witness_keeps_vanishing_side():
    # density vanishes like t**0.4 right of s = 0.574...; the witness s + r
    # sees it even once r is far below ulp(s), so the slope stays put
    s = 0.5741966149773667
    d = PiecewisePowerDensity((
        PowerSegment(Interval(-0.5, s), 1.0, 0.0, -0.5, "right"),
        PowerSegment(Interval(s, 0.75), 2.0, 0.4, s, "right"))).normalized()
    theta = 0.25
    expect = (1.4 - theta) / (1 - theta)
    for top in (-3.0, -6.0):
        radii = tuple(10.0 ** (top - 0.5 * k) for k in range(5))
        rec = estimate_spectra(d, SweepConfig(thetas=(theta,), radii=radii, n_uniform=16)).records[0]
        assert rec.upper_exponent == pytest.approx(expect, abs=0.02)
        assert rec.lower_exponent <= rec.upper_exponent


def test_witness_pairs_carry_sub_ulp_offsets():
    from assouad_lp.spectrum import witness_pairs
    d = uniform()
    b, o = witness_pairs(d, 1e-6, 0.1, n_uniform=4)
    r = 1e-60
    assert np.any((b == 0.0) & np.isclose(o, r, rtol=1e-9, atol=0))
    assert np.all(d.in_support(b, o))
