"""Acceptance criteria, one test each, every one at its stated tolerance.

Each test prints a single PASS/FAIL line (also repeated in the pytest
terminal summary). Run directly with ``python3 tests/test_acceptance.py`` to
get only those lines. Randomized trials use seeded numpy generators.
"""
import dataclasses
import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from assouad_lp import oracle, presets
from assouad_lp.dyadic import block_ball_measure, build_mu_p, build_staircase, harmonic_partial_sum
from assouad_lp.measure import Interval, PiecewisePowerDensity, PowerSegment, assouad_sharp
from assouad_lp.oracle import INF, BoundSet, assouad_upper_bound, lower_lower_bound
from assouad_lp.spectrum import SweepConfig, estimate_spectra, geometric_radii
from assouad_lp.verification import check_combining_intervals, combining_construction, detect_kinks

TOL = 0.05
TRIALS = 10_000
GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))


def _thetas(est):
    return [float(t) for t in est.thetas]


def _worst(est_values, thetas, formula, only=None):
    worst, at = 0.0, None
    for t, v in zip(thetas, est_values):
        if only is not None and not any(abs(t - o) < 1e-9 for o in only):
            continue
        err = abs(float(v) - formula(t))
        if not err <= worst:
            worst, at = err, t
    return worst, at


# -- 1 ----------------------------------------------------------------------------

def criterion_1():
    exact = 1 / (Fraction(3, 4) + Fraction(2))
    d = assouad_sharp(2, 3)
    err = max(abs(s.coefficient - 4 / 11) for s in d.segments)
    ok = exact == Fraction(4, 11) and err <= 1e-14
    return ok, f"C={exact}, |C_built - 4/11|={err:.1e}"


# -- 2 ----------------------------------------------------------------------------

def criterion_2():
    cfg = presets.default_sweep("assouad-sharp")
    t0 = time.perf_counter()
    est = estimate_spectra(presets.build_measure("assouad-sharp"), cfg)
    dt = time.perf_counter() - t0
    worst, at = _worst(est.upper, _thetas(est),
                       lambda t: 1 + (2 + 3 * t) / (6 * (1 - t)), only=GRID)
    r_min = min(cfg.radii)
    ok = worst <= TOL and r_min <= 1e-9 and dt < 60
    return ok, f"max err {worst:.4f} at theta={at}, R_min={r_min:.0e}, {dt:.1f} s"


# -- 3 ----------------------------------------------------------------------------

def criterion_3():
    grid = tuple(sorted(set(GRID) | {0.25}))
    prm = {"p1": 2.0, "p2": 3.0, "theta_list": list(grid), "K": 40}
    t0 = time.perf_counter()
    m = presets.build_measure("lower-sharp", prm)
    cfg = dataclasses.replace(presets.default_sweep("lower-sharp", prm), thetas=grid)
    est = estimate_spectra(m, cfg)
    dt = time.perf_counter() - t0
    f = lambda t: max(1 - (2 * t + 3) / (6 * (1 - t)), 0.0)  # noqa: E731
    worst, at = _worst(est.lower, _thetas(est), f)
    at25 = float(est.lower[grid.index(0.25)])
    zeros = [float(v) for t, v in zip(grid, est.lower) if t >= 0.4]
    ok = (worst <= TOL and abs(at25 - 2 / 9) <= TOL and max(abs(z) for z in zeros) <= TOL
          and dt < 120)
    return ok, (f"max err {worst:.4f} at theta={at}, theta=0.25 -> {at25:.4f}, "
                f"max |L| for theta>=0.4 {max(abs(z) for z in zeros):.4f}, {dt:.1f} s")


# -- 4 ----------------------------------------------------------------------------

def _bracketed(kinks, target, thetas):
    th = np.asarray(thetas)
    lo, hi = th[th <= target + 1e-12].max(), th[th >= target - 1e-12].min()
    return [k.theta for k in kinks if lo - 1e-12 <= k.theta <= hi + 1e-12]


def criterion_4():
    m = presets.build_measure("mono-sharp")
    est = estimate_spectra(m, presets.default_sweep("mono-sharp"))
    th = _thetas(est)
    ka = _bracketed(detect_kinks(th, est.upper), 2 / 3, th)
    kl = _bracketed(detect_kinks(th, est.lower), 1 / 2, th)
    ok = bool(ka) and bool(kl)
    span_a = float(np.ptp(est.upper))
    span_l = float(np.ptp(est.lower))
    return ok, (f"Assouad kink near 2/3: {ka or 'none'}, lower kink near 1/2: {kl or 'none'}; "
                f"estimate ranges {span_a:.3f} (Assouad), {span_l:.3f} (lower)")


# -- 5 ----------------------------------------------------------------------------

def criterion_5():
    m = presets.build_measure("mu_p", {"p": 1.5})
    est = estimate_spectra(m, presets.default_sweep("mu_p", {"p": 1.5}))
    worst, at = _worst(est.upper, _thetas(est), lambda t: 1.0)
    K = 40
    sums = build_mu_p(1.5, K).power_partial_sums(1.5)
    h_err = max(abs(sums[n - 1] - float(harmonic_partial_sum(n))) for n in range(1, K + 1))
    ok = worst <= TOL and h_err <= 1e-10
    return ok, f"max |A - 1| {worst:.4f} at theta={at}, max |S_K - H_K| {h_err:.1e} (K<={K})"


# -- 6 ----------------------------------------------------------------------------

def criterion_6():
    m = presets.build_measure("linear-2x")
    est = estimate_spectra(m, presets.default_sweep("linear-2x"))
    wa, ta = _worst(est.upper, _thetas(est), lambda t: 2.0)
    wl, tl = _worst(est.lower, _thetas(est), lambda t: 1.0)
    inv = m.inverse_lp_norm(1.0)
    ok = wa <= TOL and wl <= TOL and inv == math.inf
    return ok, f"max |A - 2| {wa:.4f}, max |L - 1| {wl:.4f}, inverse L^1 norm {inv}"


# -- 7 ----------------------------------------------------------------------------

def criterion_7():
    m = build_staircase(40)
    worst_rel, min_margin = 0.0, math.inf
    for k in range(5, 31):
        big = float(block_ball_measure(m, 2.0 ** -k, 2.0 ** (-k + 1)))
        small = float(block_ball_measure(m, 2.0 ** -k, 2.0 ** -k))
        ratio = big / small
        exact = Fraction(2) ** (k - 1) + Fraction(5, 2)
        worst_rel = max(worst_rel, abs(ratio - float(exact)) / float(exact))
        min_margin = min(min_margin, ratio / 2.0 ** (k - 1))
    ok = min_margin >= 1.0 and worst_rel <= 1e-12
    return ok, f"min ratio / 2^(k-1) = {min_margin:.6f}, max rel err vs 2^(k-1)+5/2 {worst_rel:.1e}"


# -- 8 ----------------------------------------------------------------------------

def random_density(rng):
    """Contiguous piecewise power density with 1 to 4 pieces on [-1, 1]."""
    n = int(rng.integers(1, 5))
    cuts = np.sort(rng.uniform(-1, 1, n + 1))
    if np.min(np.diff(cuts)) < 1e-3:
        cuts = np.linspace(-1, 1, n + 1)
    segs = []
    for lo, hi in zip(cuts, cuts[1:]):
        side = "right" if rng.random() < 0.5 else "left"
        e, c = rng.uniform(-0.9, 2.0), rng.uniform(0.1, 5.0)
        segs.append(PowerSegment(Interval(float(lo), float(hi)), c, e,
                                 float(lo) if side == "right" else float(hi), side))
    return PiecewisePowerDensity(tuple(segs)).normalized()


def _from_anchor(c, e, t):
    if t <= 0:
        return 0.0
    return integrate.quad(lambda u: c, 0.0, t, weight="alg", wvar=(e, 0.0),
                          epsabs=0, epsrel=1e-12)[0]


def quad_cdf(d, x):
    """CDF by QUADPACK's algebraic-weight rule, in anchor-relative coordinates."""
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


HOLDER = ["uniform", "assouad-sharp", "mono-sharp", "lower-sharp", "staircase", "linear-2x"]


def trial_holder(rng):
    bad = n = 0
    fixed = {name: presets.build_measure(name) for name in HOLDER}
    while n < TRIALS:
        m = fixed[HOLDER[n % len(HOLDER)]] if n % 2 else random_density(rng)
        prof = m.smoothness_profile()
        p1 = 1.0 + rng.uniform(0, 0.99) * (min(prof.p1_sup, 10.0) - 1.0)
        p2 = rng.uniform(0.01, 0.99) * min(prof.p2_sup, 10.0)
        theta, lR = rng.uniform(0.02, 0.98), rng.uniform(-12, -0.01)
        if lR / theta < -300:
            continue
        sup = m.support
        x = sup.lo + rng.random() * sup.length
        R = 10.0 ** lR
        r = R ** (1 / theta)
        length_r = min(sup.hi - x, r) + min(x - sup.lo, r)
        lRm = float(m.log_ball_measure(np.array([x]), R)[0])
        lrm = float(m.log_ball_measure(np.array([x]), r)[0])
        bound = (math.log(m.lp_norm(p1)) + math.log(m.inverse_lp_norm(p2))
                 + (1 - 1 / p1) * math.log(2 * R) - (1 + 1 / p2) * math.log(length_r))
        n += 1
        bad += not (math.isfinite(lrm) and lRm - lrm <= bound + 1e-9 * max(1.0, abs(bound)))
    return bad, n


def trial_monotone(rng):
    bad = 0
    fixed = [presets.build_measure(name) for name in sorted(presets.PRESETS)]
    for i in range(TRIALS):
        m = fixed[i % len(fixed)] if i % 2 else random_density(rng)
        sup = m.support
        x = np.array([sup.lo + rng.uniform(-0.1, 1.1) * sup.length])
        r1, r2 = np.sort(10.0 ** rng.uniform(-300, 0.5, 2))
        bad += not (float(m.log_ball_measure(x, r1)[0]) <= float(m.log_ball_measure(x, r2)[0]) + 1e-12)
    return bad, TRIALS


def trial_cdf(rng):
    bad = 0
    for _ in range(TRIALS):
        d = random_density(rng)
        sup = d.support
        x = sup.lo + rng.random() * sup.length
        got, ref = float(d.cdf(x)), quad_cdf(d, x)
        bad += not abs(got - ref) <= 1e-9 * abs(ref) + 1e-14
    return bad, TRIALS


def trial_sandwich(rng):
    bad = 0
    radii = geometric_radii(1e-2, 1e-40, 3)
    for i in range(TRIALS):
        d = random_density(rng)
        mode = ("max-tail", "regression-decade")[i % 2]
        cfg = SweepConfig(thetas=(float(rng.uniform(0.02, 0.98)),), radii=radii, n_uniform=16,
                          extrapolation=mode)
        rec = estimate_spectra(d, cfg).records[0]
        bad += not rec.lower_exponent <= rec.upper_exponent + 1e-9
    return bad, TRIALS


def _exponent(rng, lo=1.0):
    return INF if rng.random() < 0.1 else float(lo + 10.0 ** rng.uniform(-3, 6))


def trial_oracle(rng):
    bad = 0
    for _ in range(TRIALS):
        p1, p2 = _exponent(rng), _exponent(rng, 0.05)
        theta = float(rng.uniform(0.02, 0.98))
        g, mono = BoundSet(p1, p2), BoundSet(p1, p2, "monotone")
        ref = BoundSet(p1, p2, "general-reference", 1.0, 1.0)
        A, L = assouad_upper_bound(g, theta), lower_lower_bound(g, theta)
        ok = (assouad_upper_bound(mono, theta) <= A * (1 + 1e-15)
              and lower_lower_bound(mono, theta) >= L - 1e-15 * abs(L)
              and abs(assouad_upper_bound(ref, theta) - A) <= 1e-14 * max(1.0, abs(A))
              and abs(lower_lower_bound(ref, theta) - L) <= 1e-14 * max(1.0, abs(L))
              and L <= 1 <= A)
        # larger exponents tighten both bounds; both tend to 1 as p1, p2 -> infinity
        k = float(rng.uniform(1.0, 1e3))
        b2 = BoundSet(p1 * k, p2 * k)
        ok = ok and assouad_upper_bound(b2, theta) <= A * (1 + 1e-15)
        ok = ok and lower_lower_bound(b2, theta) >= L - 1e-12
        ok = ok and assouad_upper_bound(BoundSet(INF, INF), theta) == 1
        ok = ok and lower_lower_bound(BoundSet(INF, INF), theta) == 1
        if p1 > 1 and p2 > 1 and math.isfinite(p1) and math.isfinite(p2):
            ok = ok and oracle.sharp_lower_spectrum(p1, p2, theta) == max(L, 0)
        bad += not ok
    return bad, TRIALS


def trial_combining(rng):
    bad = n = 0
    fixed = [presets.build_measure(name) for name in ("uniform", "assouad-sharp", "linear-2x")]
    while n < TRIALS:
        m = fixed[n % len(fixed)] if n % 2 else random_density(rng)
        sup = m.support
        l1, gap, l2 = rng.uniform(1e-4, 0.2, 3) * sup.length
        a = sup.lo + rng.random() * (sup.length - l1 - gap - l2)
        if a < sup.lo:
            continue
        I1 = Interval(a, a + l1)
        I2 = Interval(a + l1 + gap, a + l1 + gap + l2)
        half = combining_construction(I1, I2)[-1]
        R = half + rng.random() * (0.999 - half)
        if R < half:
            continue
        rep = check_combining_intervals(m, float(rng.uniform(0.05, 1.0)),
                                        float(rng.uniform(1.01, 50)), I1, I2, R)
        n += 1
        bad += rep.status == "fail"
    return bad, n


SUITES = [("Hoelder chain", trial_holder), ("ball monotonicity", trial_monotone),
          ("CDF vs quadrature (1e-9)", trial_cdf), ("sandwich", trial_sandwich),
          ("oracle limit/reduction", trial_oracle), ("combining intervals", trial_combining)]


def criterion_8():
    parts, ok = [], True
    for i, (name, fn) in enumerate(SUITES):
        bad, n = fn(np.random.default_rng(20260 + i))
        ok = ok and bad == 0 and n >= TRIALS
        parts.append(f"{name} {bad}/{n}")
    return ok, "violations: " + ", ".join(parts)


CRITERIA = {
    1: ("normalization C = 4/11", criterion_1),
    2: ("Assouad sharpness, assouad-sharp(2,3)", criterion_2),
    3: ("lower sharpness, lower-sharp(2,3), K=40", criterion_3),
    4: ("phase transitions of mono-sharp(2,3)", criterion_4),
    5: ("mu_1.5 Assouad spectrum 1, harmonic partial sums", criterion_5),
    6: ("f = 2x spectra and inverse L^1 norm", criterion_6),
    7: ("staircase non-doubling ratio", criterion_7),
    8: ("randomized property suites", criterion_8),
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    assert acceptance(number, title, ok, detail), detail


if __name__ == "__main__":
    failed = 0
    for number in sorted(CRITERIA):
        title, fn = CRITERIA[number]
        ok, detail = fn()
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title} ({detail})", flush=True)
    sys.exit(1 if failed else 0)
