"""Radial solver: projective integration vs closed forms, monotonicity, identities."""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from levinson2d import errors
from levinson2d import potentials as pot
from levinson2d import radial
from levinson2d.errors import DomainError
from levinson2d.radial import Energy, MatchRatio

M = 1.0
R0 = 1.0


def well(V0, r0=R0, tail=None):
    return pot.PotentialModel.square_well(V0, r0=r0, tail=tail)


def angle_gap(t1, t2):
    """Distance between two angles modulo pi."""
    return abs(math.remainder(t1 - t2, math.pi))


def test_energy_momenta():
    e = Energy(1.25, 1.0)
    assert e.is_scattering
    assert e.k == pytest.approx(0.75)
    with pytest.raises(DomainError):
        e.kappa
    b = Energy(0.6, 1.0)
    assert b.kappa == pytest.approx(0.8)
    with pytest.raises(DomainError):
        b.k
    edge = Energy(1.0, 1.0)
    assert edge.kappa == 0.0


def test_match_ratio_representations():
    m = MatchRatio.from_theta(0.3)
    assert m.value == pytest.approx(math.tan(0.3))
    shifted = MatchRatio.from_theta(0.3 + 2 * math.pi)
    assert shifted.value == pytest.approx(m.value, rel=1e-12)
    p = MatchRatio.pole(-1.0)
    assert math.isinf(p.value) and p.value < 0
    assert p.theta_mod_pi == math.pi / 2
    assert p.inverse_value == 0.0
    z = MatchRatio.from_value(0.0)
    assert math.isinf(z.inverse_value)


def test_series_start_lower_component_suppressed():
    spec = pot.ProblemSpec(well(-2.0), j=0.5)
    st = radial.series_start(spec, Energy(M, M), 1e-6 * R0)
    f, g = st.components()
    assert abs(g / f) < 5e-6  # one power of r higher


def test_series_start_slope_is_j():
    # log f vs log r over two decades near the origin has slope j
    r = np.geomspace(1e-5, 1e-3, 40)
    for j in (0.5, 1.5):
        spec = pot.ProblemSpec(well(-2.0), j=j)
        f, _ = radial.reconstruct_components(spec, Energy(0.5, M), r)
        slope = np.polyfit(np.log(r), np.log(np.abs(f)), 1)[0]
        assert slope == pytest.approx(j, abs=1e-3)


def test_interior_matches_free_closed_form():
    # lambda = 0 integration against the modified-Bessel ratio, as angles
    rng = np.random.default_rng(5)
    js = (0.5, 1.5, 2.5)
    Es = np.concatenate([rng.uniform(-0.999, 0.999, 12), [0.0, 0.5, -0.5]])
    for j in js:
        pairs = [(float(E), 0.0) for E in Es]
        thetas = radial.interior_theta(well(-3.0), j, M, pairs)
        for E, th in zip(Es, thetas):
            ref = radial.free_interior_ratio(j, Energy(float(E), M), R0, M)
            assert angle_gap(th, ref.theta_mod_pi) < 1e-9
            if abs(ref.value) < 5.0:
                assert math.tan(math.remainder(th, math.pi)) == pytest.approx(
                    ref.value, rel=1e-8, abs=1e-10)


def test_free_interior_limits():
    # E -> -M: A -> -(2j+1)/(2M r0); E -> M: A * kappa^2 r0 -> -2M(2j+1)
    for j in (0.5, 1.5, 2.5):
        low = radial.free_interior_ratio(j, Energy(-M, M), R0, M)
        assert low.value == pytest.approx(-(2 * j + 1) / (2 * M * R0), rel=1e-12)
        E = M * (1 - 1e-9)
        kap2 = M * M - E * E
        near = radial.free_interior_ratio(j, Energy(E, M), R0, M)
        assert near.value * kap2 * R0 == pytest.approx(-2 * M * (2 * j + 1), rel=1e-6)
        exact = radial.free_interior_ratio(j, Energy(M, M), R0, M)
        assert exact.is_pole and exact.value < 0


def test_exterior_edge_values():
    for j in (1.5, 2.5):
        top = radial.exterior_bound_ratio(j, Energy(M, M), R0, M)
        assert top.value == pytest.approx(2 * M * R0 / (2 * j - 1), rel=1e-12)
    pole = radial.exterior_bound_ratio(0.5, Energy(M, M), R0, M)
    assert pole.is_pole and pole.value > 0
    for j in (0.5, 1.5):
        bot = radial.exterior_bound_ratio(j, Energy(-M, M), R0, M)
        assert bot.value == 0.0


def test_exterior_small_kappa_branches():
    # all four limiting branches at kappa r0 = 1e-3; log branches carry the
    # constant-corrected asymptote -2Mr0 (log(x/2) + gamma_E)
    gamma_e = 0.5772156649015329
    x = 1e-3
    E_top = math.sqrt(M * M - (x / R0) ** 2)
    E_bot = -E_top
    top_j32 = radial.exterior_bound_ratio(1.5, Energy(E_top, M), R0, M)
    assert top_j32.value == pytest.approx(2 * M * R0 / 2.0, rel=1e-3)
    top_j12 = radial.exterior_bound_ratio(0.5, Energy(E_top, M), R0, M)
    assert top_j12.value == pytest.approx(
        -2 * M * R0 * (math.log(x / 2) + gamma_e), rel=1e-3)
    bot_j32 = radial.exterior_bound_ratio(1.5, Energy(E_bot, M), R0, M)
    assert bot_j32.value == pytest.approx(x * x / R0 / (2 * M * 2.0), rel=1e-3)
    bot_j12 = radial.exterior_bound_ratio(0.5, Energy(E_bot, M), R0, M)
    assert bot_j12.value == pytest.approx(
        -(x * x / R0) * (math.log(x / 2) + gamma_e) / (2 * M), rel=1e-3)


def test_interior_theta_decreases_in_E():
    Es = np.linspace(-0.98, 0.98, 25)
    for V0 in (-1.0, -6.0, 2.0):
        pairs = [(float(E), 1.0) for E in Es]
        th = radial.interior_theta(well(V0), 1.5, M, pairs)
        assert np.all(np.diff(th) < 0)


def test_exterior_ratio_increases_in_E():
    Es = np.linspace(-0.98, 0.98, 25)
    for j in (0.5, 1.5, 2.5):
        vals = [radial.exterior_bound_ratio(j, Energy(float(E), M), R0, M).value
                for E in Es]
        assert np.all(np.diff(vals) > 0)


def test_two_energy_wronskian_identity():
    # (f1 g - g1 f)(r0) = -(E1 - E) * integral of (f1 f + g1 g)
    spec_a = pot.ProblemSpec(well(-2.0), j=0.5)
    E, E1 = 0.2, 0.5
    r = np.geomspace(1e-6 * R0, R0, 6000)
    f, g = radial.reconstruct_components(spec_a, Energy(E, M), r)
    f1, g1 = radial.reconstruct_components(spec_a, Energy(E1, M), r)
    lhs = f1[-1] * g[-1] - g1[-1] * f[-1]
    rhs = -(E1 - E) * simpson(f1 * f + g1 * g, x=r)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_reconstruction_solves_the_system():
    # finite differences of reconstructed (f, g) reproduce the coupled system
    spec = pot.ProblemSpec(well(-2.0), j=1.5)
    E = Energy(0.3, M)
    r = np.geomspace(1e-4, 0.999, 3000)
    f, g = radial.reconstruct_components(spec, E, r)
    V = -2.0
    df = np.gradient(f, r)
    dg = np.gradient(g, r)
    res_f = df - ((spec.j / r) * f - (E.E - V + M) * g)
    res_g = dg - (-(spec.j / r) * g + (E.E - V - M) * f)
    # normalize by the derivative scale: the difference oracle's own
    # truncation error is proportional to it
    scale_f = np.abs(df) + np.abs(f) / r + 1e-30
    scale_g = np.abs(dg) + np.abs(g) / r + np.abs(f) + 1e-30
    assert np.max(np.abs(res_f[5:-5]) / scale_f[5:-5]) < 1e-4
    assert np.max(np.abs(res_g[5:-5]) / scale_g[5:-5]) < 1e-4


def test_component_swap_maps_the_angle_equation():
    # swapping f and g sends theta -> pi/2 - theta; the angle derivative
    # must flip sign under (j, E, lambda) -> (-j, -E, -lambda)
    rng = np.random.default_rng(13)
    for _ in range(50):
        r = float(rng.uniform(0.05, 3.0))
        th = float(rng.uniform(-4.0, 4.0))
        j = float(rng.integers(0, 4) + 0.5) * rng.choice([-1.0, 1.0])
        E = float(rng.uniform(-2.0, 2.0))
        lamV = float(rng.uniform(-3.0, 3.0))
        fwd = radial.theta_rhs(r, th, j, M, E, lamV)
        swp = radial.theta_rhs(r, math.pi / 2 - th, -j, M, -E, -lamV)
        assert swp == pytest.approx(-fwd, rel=1e-12, abs=1e-12)


def test_exterior_tail_threshold_values():
    # inverse-square tail threshold ratios, including the b -> 0 limits
    r = radial.exterior_tail_ratio(1.5, +1.0, R0, M, b=0.0)
    assert r.value == pytest.approx(2 * M * R0 / 2.0, rel=1e-12)
    r = radial.exterior_tail_ratio(1.5, -1.0, R0, M, b=0.0)
    assert r.value == pytest.approx(0.0, abs=1e-15)
    # j=1/2: alpha^2 = 2Mb exactly, so 2Mb=3/4 gives ratio 2Mr0/sqrt(3/4)
    r = radial.exterior_tail_ratio(0.5, +1.0, R0, M, b=0.375 / M)
    assert r.value == pytest.approx(2 * M * R0 / math.sqrt(0.75), rel=1e-12)
    # E=-M side with attractive tail: -(j - beta + 1/2)/(2Mr0)
    b = 0.3 / (2 * M)
    beta = math.sqrt(1.5 ** 2 + 1.5 - 0.3 + 0.25)
    r = radial.exterior_tail_ratio(1.5, -1.0, R0, M, b=b)
    assert r.value == pytest.approx(-(1.5 - beta + 0.5) / (2 * M * R0), rel=1e-12)
    # j=1/2 with 2Mb=1 makes beta vanish: outside the theorem's validity
    with pytest.raises(errors.UnsupportedRegime):
        radial.exterior_tail_ratio(0.5, +1.0, R0, M, b=0.5 / M)


def test_exterior_theta_tail_reduces_to_cutoff():
    # vanishing tail strength reproduces the cutoff exterior angle
    for E in (0.0, 0.55, -0.62):
        for j in (0.5, 1.5):
            base = radial.exterior_theta(well(-1.0), j, M, Energy(E, M))
            tiny = well(-1.0, tail=pot.PowerTail(b=1e-10, n=2.0))
            th = radial.exterior_theta(tiny, j, M, Energy(E, M))
            assert angle_gap(th, base) < 1e-6


def test_exterior_theta_tail_seam_matches_analytic_gap():
    # The inward integration solves the exact tail equation while the
    # threshold form keeps the leading order in b/r0. Their mismatch at
    # the switchover must equal the first correction of the exact
    # threshold solution r^(-1/2) Z_nu(b/r):
    #   E ~ +M:  A_exact - A_form = -(b/r0) / (2 (alpha+1))
    #   E ~ -M:  A_exact - A_form = A_form z0^2 / (2 (beta+1)(j+beta+1/2))
    # with z0 = b/r0.
    b = 0.4 / (2 * M)
    z0 = b / R0
    V = well(-1.0, tail=pot.PowerTail(b=b, n=2.0))
    for j in (0.5, 1.5):
        alpha = math.sqrt(j * j - j + 2 * M * b + 0.25)
        beta = math.sqrt(j * j + j - 2 * M * b + 0.25)
        for side in (+1.0, -1.0):
            if side > 0:
                a_form = 2 * M * R0 / (j + alpha - 0.5)
                d_a = -z0 / (2 * (alpha + 1))
            else:
                a_form = -(j - beta + 0.5) / (2 * M * R0)
                d_a = a_form * z0 * z0 / (2 * (beta + 1) * (j + beta + 0.5))
            predicted = d_a / (1 + a_form * a_form)
            x_hi, x_lo = 1.05e-2, 0.95e-2
            E_hi = side * math.sqrt(M * M - (x_hi / R0) ** 2)
            E_lo = side * math.sqrt(M * M - (x_lo / R0) ** 2)
            th_ode = radial.exterior_theta(V, j, M, Energy(E_hi, M))
            th_form = radial.exterior_theta(V, j, M, Energy(E_lo, M))
            gap = math.remainder(th_ode - th_form, math.pi)
            assert gap == pytest.approx(predicted, rel=0.25, abs=2e-4)


def test_interior_deterministic():
    pairs = [(0.3, 1.0), (-0.7, 0.5)]
    a = radial.interior_theta(well(-4.0), 0.5, M, pairs)
    b = radial.interior_theta(well(-4.0), 0.5, M, pairs)
    assert a[0] == b[0] and a[1] == b[1]
