"""Cylinder-function wrappers checked against hand-rolled series and integrals."""

import math

import numpy as np
import pytest
from scipy import integrate

from levinson2d import special
from levinson2d.errors import DomainError

EULER_GAMMA = 0.5772156649015329


# ---------------------------------------------------------------- oracles --

def j0_series(x, terms=40):
    # J0(x) = sum_k (-1)^k (x^2/4)^k / (k!)^2
    acc, term = 0.0, 1.0
    q = x * x / 4.0
    for k in range(terms):
        acc += term
        term *= -q / ((k + 1) * (k + 1))
    return acc


def n0_series(x, terms=40):
    # N0(x) = (2/pi)[(ln(x/2)+gamma) J0(x) + sum_k (-1)^{k+1} H_k (x^2/4)^k / (k!)^2]
    q = x * x / 4.0
    acc = 0.0
    term = 1.0  # (x^2/4)^k / (k!)^2 at k
    harmonic = 0.0
    for k in range(1, terms):
        term *= q / (k * k)
        harmonic += 1.0 / k
        acc += (-1) ** (k + 1) * harmonic * term
    return (2.0 / math.pi) * ((math.log(x / 2.0) + EULER_GAMMA) * j0_series(x) + acc)


def i_series(nu, x, terms=60):
    # I_nu(x) = sum_k (x/2)^{2k+nu} / (k! Gamma(k+nu+1))
    acc = 0.0
    term = (x / 2.0) ** nu / math.gamma(nu + 1.0)
    q = x * x / 4.0
    for k in range(terms):
        acc += term
        term *= q / ((k + 1) * (k + nu + 1))
    return acc


def k0_integral(x):
    # K0(x) = integral_0^inf exp(-x cosh t) dt
    val, _ = integrate.quad(lambda t: math.exp(-x * math.cosh(t)), 0.0, 40.0, limit=200)
    return val


def log_k0_integral(x):
    # shifted form stays finite for large x
    val, _ = integrate.quad(lambda t: math.exp(-x * (math.cosh(t) - 1.0)), 0.0, 40.0, limit=200)
    return -x + math.log(val)


def log_i0_integral(x):
    # I0(x) = (1/pi) integral_0^pi exp(x cos t) dt, shifted by the peak at t=0
    val, _ = integrate.quad(lambda t: math.exp(x * (math.cos(t) - 1.0)), 0.0, math.pi, limit=200)
    return x + math.log(val / math.pi)


# ------------------------------------------------------------------ tests --

def test_j0_matches_series():
    for x in (0.1, 0.7, 1.9, 3.3, 6.5):
        assert special.bessel_j(0.0, x) == pytest.approx(j0_series(x), abs=1e-13)


def test_values_at_zero_argument():
    assert special.bessel_j(0.0, 0.0) == 1.0
    assert special.bessel_j(1.0, 0.0) == 0.0
    assert special.mod_bessel_i(0.0, 0.0) == 1.0
    assert special.mod_bessel_i(2.0, 0.0) == 0.0


def test_j0_first_zero():
    # bracket the first zero of the series by bisection, then compare routes
    lo, hi = 2.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if j0_series(lo) * j0_series(mid) <= 0:
            hi = mid
        else:
            lo = mid
    zero = 0.5 * (lo + hi)
    assert zero == pytest.approx(2.404825557695773, abs=1e-12)
    assert abs(special.bessel_j(0.0, zero)) < 1e-12


def test_n0_matches_series():
    for x in (0.2, 0.9, 2.1, 4.0):
        assert special.bessel_n(0.0, x) == pytest.approx(n0_series(x), rel=1e-11, abs=1e-12)


def test_i_matches_series():
    for nu in (0.5, 1.5, 2.5):
        for x in (0.3, 1.7, 4.2):
            assert special.mod_bessel_i(nu, x) == pytest.approx(i_series(nu, x), rel=1e-12)


def test_k0_matches_integral():
    for x in (0.4, 1.0, 2.7, 6.0):
        assert special.mod_bessel_k(0.0, x) == pytest.approx(k0_integral(x), rel=1e-10)


def test_half_integer_closed_forms():
    # J_{1/2}, N_{1/2}, I_{1/2}, K_{1/2} reduce to elementary functions
    for x in (0.3, 1.1, 2.9, 7.7):
        s = math.sqrt(2.0 / (math.pi * x))
        assert special.bessel_j(0.5, x) == pytest.approx(s * math.sin(x), rel=1e-12)
        assert special.bessel_n(0.5, x) == pytest.approx(-s * math.cos(x), rel=1e-12)
        assert special.mod_bessel_i(0.5, x) == pytest.approx(s * math.sinh(x), rel=1e-12)
        assert special.mod_bessel_k(0.5, x) == pytest.approx(
            math.sqrt(math.pi / (2.0 * x)) * math.exp(-x), rel=1e-12)


def test_wronskian_j_n():
    # J N' - J' N = 2 / (pi x)
    rng = np.random.default_rng(7)
    for _ in range(40):
        nu = rng.integers(0, 8) + 0.5
        x = float(rng.uniform(0.05, 20.0))
        w = (special.bessel_j(nu, x) * special.bessel_n_prime(nu, x)
             - special.bessel_j_prime(nu, x) * special.bessel_n(nu, x))
        assert w == pytest.approx(2.0 / (math.pi * x), rel=1e-9)


def test_wronskian_i_k():
    # I K' - I' K = -1 / x
    rng = np.random.default_rng(11)
    for _ in range(40):
        nu = rng.integers(0, 8) + 0.5
        x = float(rng.uniform(0.05, 25.0))
        w = (special.mod_bessel_i(nu, x) * special.mod_bessel_k_prime(nu, x)
             - special.mod_bessel_i_prime(nu, x) * special.mod_bessel_k(nu, x))
        assert w == pytest.approx(-1.0 / x, rel=1e-9)


def test_recurrence_three_term():
    # Z_{nu-1} + Z_{nu+1} = (2 nu / x) Z_nu for J and N
    for nu in (1.5, 3.5):
        for x in (0.8, 5.5):
            for fn in (special.bessel_j, special.bessel_n):
                lhs = fn(nu - 1.0, x) + fn(nu + 1.0, x)
                assert lhs == pytest.approx(2.0 * nu / x * fn(nu, x), rel=1e-10)


def test_log_scaled_matches_plain_at_moderate_x():
    for nu in (0.5, 2.5):
        for x in (0.6, 8.0, 40.0):
            li, lk = special.log_scaled_ik(nu, x)
            assert li == pytest.approx(math.log(special.mod_bessel_i(nu, x)), abs=1e-11)
            assert lk == pytest.approx(math.log(special.mod_bessel_k(nu, x)), abs=1e-11)


def test_log_scaled_large_argument():
    # plain wrappers overflow here; the log-scaled path must stay consistent
    # with integral representations of I0 and K0
    x = 800.0
    with pytest.raises(OverflowError):
        special.mod_bessel_i(0.5, 1000.0)
    li, lk = special.log_scaled_ik(0.0, x)
    assert li == pytest.approx(log_i0_integral(x), abs=1e-10)
    assert lk == pytest.approx(log_k0_integral(x), abs=1e-10)


def test_log_scaled_ratio_recurrence():
    # I_{nu-1} - I_{nu+1} = (2 nu / x) I_nu, checked on ratios so the
    # exponential scaling cancels
    x = 600.0
    for nu in (1.5, 2.5, 3.5):
        lo = special.log_scaled_ik(nu - 1.0, x)[0]
        mid = special.log_scaled_ik(nu, x)[0]
        hi = special.log_scaled_ik(nu + 1.0, x)[0]
        r_down = math.exp(mid - lo)       # I_nu / I_{nu-1}
        r_up = math.exp(hi - mid)         # I_{nu+1} / I_nu
        assert 1.0 / r_down - r_up == pytest.approx(2.0 * nu / x, rel=1e-9)


def test_crossover_continuity():
    # small/large-argument evaluation regimes meet near x = max(10, 2 nu);
    # a central difference across that point must reproduce the recurrence
    # derivative, which a branch jump of even 1e-10 would wreck
    pairs = (
        (special.bessel_j, special.bessel_j_prime),
        (special.bessel_n, special.bessel_n_prime),
        (special.mod_bessel_i, special.mod_bessel_i_prime),
        (special.mod_bessel_k, special.mod_bessel_k_prime),
    )
    for nu in (0.5, 2.5, 7.5):
        xc = max(10.0, 2.0 * nu)
        h = 1e-5 * xc
        for fn, dfn in pairs:
            fd = (fn(nu, xc + h) - fn(nu, xc - h)) / (2.0 * h)
            scale = abs(dfn(nu, xc)) + abs(fn(nu, xc)) / xc
            assert abs(fd - dfn(nu, xc)) <= 1e-8 * scale


def test_domain_checks():
    with pytest.raises(DomainError):
        special.bessel_j(-0.5, 1.0)
    with pytest.raises(DomainError):
        special.bessel_n(0.5, 0.0)
    with pytest.raises(DomainError):
        special.mod_bessel_k(0.5, -2.0)


def test_half_integer_factorial():
    assert special.half_integer_factorial(3.0) == pytest.approx(6.0)
    assert special.half_integer_factorial(0.5) == pytest.approx(0.8862269254527580, rel=1e-14)
    assert special.half_integer_factorial(2.5) == pytest.approx(3.3233509704478426, rel=1e-14)
    assert special.half_integer_factorial(0.0) == pytest.approx(1.0)
