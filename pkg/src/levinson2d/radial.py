"""Radial integration in projective form and the closed-form match ratios.

The coupled first-order system for the two radial components (f, g),

    f' =  (j/r) f - (E - V(r) + M) g
    g' = -(j/r) g + (E - V(r) - M) f

is integrated as a single angle theta with f = rho sin(theta),
g = rho cos(theta):

    theta'   = (j/r) sin(2 theta) - (E - V) - M cos(2 theta)
    log_rho' = -(j/r) cos(2 theta) - M sin(2 theta)

The angle is continuous through zeros of g, so the match ratio
A = f/g = tan(theta) needs no special handling at its poles. Batches of
(E, lambda) pairs ride through one ODE solve as independent components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy import special as _sp

from . import special
from .errors import (
    DomainError,
    IllConditioned,
    IntegrationFailure,
    UnsupportedOrigin,
)
from .potentials import PotentialModel, ProblemSpec

__all__ = [
    "Energy",
    "RadialState",
    "MatchRatio",
    "series_start",
    "interior_theta",
    "integrate_interior",
    "free_interior_ratio",
    "exterior_bound_ratio",
    "exterior_tail_ratio",
    "exterior_theta",
    "reconstruct_components",
    "theta_rhs",
    "clamp_gap_energy",
]

R_START_FACTOR = 1e-6
RTOL = 1e-10
ATOL = 1e-12
# generic-branch evaluations stay this far (in energy) from |E| = M
GAP_MARGIN_FACTOR = 2.5e-11
# switch radius (in kappa*r0) below which tail exteriors use the
# threshold-order Bessel forms instead of inward integration
TAIL_SWITCH_X = 1e-2


@dataclass(frozen=True)
class Energy:
    """Energy with its derived momentum: k outside the gap, kappa inside."""

    E: float
    M: float

    def __post_init__(self):
        if self.M <= 0 or not math.isfinite(self.M):
            raise DomainError(f"mass must be positive, got M={self.M}")
        if not math.isfinite(self.E):
            raise DomainError(f"energy must be finite, got E={self.E}")

    @property
    def is_scattering(self) -> bool:
        return abs(self.E) > self.M

    @property
    def k(self) -> float:
        if not self.is_scattering:
            raise DomainError(f"k undefined for |E| <= M (E={self.E}, M={self.M})")
        return math.sqrt((self.E - self.M) * (self.E + self.M))

    @property
    def kappa(self) -> float:
        if self.is_scattering:
            raise DomainError(f"kappa undefined for |E| > M (E={self.E}, M={self.M})")
        return math.sqrt((self.M - self.E) * (self.M + self.E))


@dataclass(frozen=True)
class RadialState:
    r: float
    theta: float
    log_rho: float

    def components(self) -> tuple:
        rho = math.exp(self.log_rho)
        return rho * math.sin(self.theta), rho * math.cos(self.theta)


@dataclass(frozen=True)
class MatchRatio:
    """f/g at the match radius, kept alongside its pole-free angle.

    value = tan(theta_mod_pi); the angle representation stays regular when
    g vanishes, where value passes through +-infinity.
    """

    value: float
    theta_mod_pi: float
    theta: float  # continuous angle accumulated by the integration

    @classmethod
    def from_theta(cls, theta: float) -> "MatchRatio":
        t = math.remainder(theta, math.pi)
        if t == -math.pi / 2.0:
            t = math.pi / 2.0
        value = math.inf if t == math.pi / 2.0 else math.tan(t)
        return cls(value=value, theta_mod_pi=t, theta=theta)

    @classmethod
    def from_value(cls, value: float) -> "MatchRatio":
        t = math.atan(value)  # atan(+-inf) = +-pi/2
        if t == -math.pi / 2.0:
            t = math.pi / 2.0
        return cls(value=value, theta_mod_pi=t, theta=t)

    @classmethod
    def pole(cls, sign: float) -> "MatchRatio":
        """Representation of A -> sign * infinity (theta at pi/2 mod pi)."""
        return cls(value=math.copysign(math.inf, sign), theta_mod_pi=math.pi / 2.0,
                   theta=math.pi / 2.0)

    @property
    def is_pole(self) -> bool:
        return math.isinf(self.value)

    @property
    def inverse_value(self) -> float:
        if self.is_pole:
            return 0.0
        if self.value == 0.0:
            return math.inf
        return 1.0 / self.value


def theta_rhs(r, theta, j: float, M: float, E, V):
    """Angle derivative; E and V may be arrays matching theta."""
    return (j / r) * np.sin(2.0 * theta) - (E - V) - M * np.cos(2.0 * theta)


def clamp_gap_energy(E: float, M: float) -> float:
    """Pull E off the exact gap edges so kappa stays resolvable."""
    margin = GAP_MARGIN_FACTOR * M
    return min(max(E, -M + margin), M - margin)


# ------------------------------------------------------------------ interior

def series_start(spec: ProblemSpec, E: Energy, r_start: float) -> RadialState:
    """Leading regular behavior at r_start: f ~ r^j, g ~ c r^(j+1).

    c = (E - V(0+) - M) / (2j + 1) with V averaged near the origin when it
    has no finite limit there.
    """
    if spec.j <= 0:
        raise DomainError("series start requires j > 0; reduce negative j first")
    if not (0.0 < r_start <= 1e-4 * spec.potential.r0):
        raise DomainError(f"r_start={r_start} too large for the series start")
    v0 = spec.lam * spec.potential.origin_value(r_start)
    if not math.isfinite(v0):
        raise UnsupportedOrigin("potential has no usable origin average")
    c = (E.E - v0 - spec.M) / (2.0 * spec.j + 1.0)
    if abs(c) * r_start > 10.0:
        raise UnsupportedOrigin(
            "origin behavior too singular for the power-series start")
    theta = math.pi / 2.0 - math.atan(c * r_start)
    log_rho = spec.j * math.log(r_start) + 0.5 * math.log1p((c * r_start) ** 2)
    return RadialState(r=r_start, theta=theta, log_rho=log_rho)


def _solve_segments(rhs, r_a: float, r_b: float, y0, interior_points,
                    rtol: float, atol: float, t_eval=None):
    """Chain solve_ivp over [r_a, r_b], forcing steps onto interior_points.

    With t_eval (requested sample radii) returns (t, y, y_end); otherwise
    returns the state at r_b. Supports inward integration (r_a > r_b).
    """
    inward = r_a > r_b
    pts = sorted((p for p in interior_points
                  if min(r_a, r_b) < p < max(r_a, r_b)), reverse=inward)
    edges = [r_a] + pts + [r_b]
    y = np.asarray(y0, dtype=float)
    out_t, out_y = [], []
    if t_eval is not None and t_eval.size and t_eval[0] == r_a:
        out_t.append(np.array([r_a]))
        out_y.append(y[:, None].copy())
    for lo, hi in zip(edges, edges[1:]):
        seg_eval = None
        n_req = 0
        if t_eval is not None:
            lo_, hi_ = min(lo, hi), max(lo, hi)
            sel = t_eval[(t_eval > lo_) & (t_eval <= hi_)]
            sel = np.sort(sel)[::-1] if inward else np.sort(sel)
            n_req = sel.size
            if n_req == 0 or sel[-1] != hi:
                sel = np.append(sel, hi)  # always land on the segment end
            seg_eval = sel
        res = solve_ivp(rhs, (lo, hi), y, method="DOP853",
                        rtol=rtol, atol=atol, t_eval=seg_eval)
        if not res.success:
            where = res.t[-1] if res.t.size else lo
            raise IntegrationFailure(
                f"step control failed near r={where:.6g}: {res.message}")
        y = res.y[:, -1]
        if seg_eval is not None and n_req:
            out_t.append(res.t[:n_req] if n_req < seg_eval.size else res.t)
            out_y.append(res.y[:, :n_req] if n_req < seg_eval.size else res.y)
    if t_eval is not None:
        if out_t:
            return np.concatenate(out_t), np.concatenate(out_y, axis=1), y
        return np.empty(0), np.empty((y.size, 0)), y
    return y


def interior_theta(potential: PotentialModel, j: float, M: float, pairs,
                   r_end=None, rtol: float = RTOL, atol: float = ATOL):
    """Continuous interior angle at r_end for a batch of (E, lambda) pairs.

    pairs: array-like of shape (n, 2). Returns shape (n,) thetas. All pairs
    ride one adaptive solve; the step controller sees them as independent
    components of a single system.
    """
    pairs = np.atleast_2d(np.asarray(pairs, dtype=float))
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise DomainError("pairs must have shape (n, 2) of (E, lambda) rows")
    if j <= 0:
        raise DomainError("interior integration requires j > 0")
    E_arr = pairs[:, 0]
    lam_arr = pairs[:, 1]
    r0 = potential.r0
    rb = r0 if r_end is None else float(r_end)
    r_start = R_START_FACTOR * r0
    v0 = potential.origin_value(r_start)
    if not math.isfinite(v0):
        raise UnsupportedOrigin("potential has no usable origin average")
    c = (E_arr - lam_arr * v0 - M) / (2.0 * j + 1.0)
    if np.any(np.abs(c) * r_start > 10.0):
        raise UnsupportedOrigin("origin behavior too singular for the series start")
    theta0 = math.pi / 2.0 - np.arctan(c * r_start)

    def rhs(r, th):
        v = lam_arr * potential.value(r)
        return (j / r) * np.sin(2.0 * th) - (E_arr - v) - M * np.cos(2.0 * th)

    pts = potential.breakpoints_between(r_start, rb)
    out = _solve_segments(rhs, r_start, rb, theta0, pts, rtol, atol)
    return out


def integrate_interior(spec: ProblemSpec, E: Energy) -> MatchRatio:
    """Match ratio A at r0- for a single problem."""
    theta = interior_theta(spec.potential, spec.j, spec.M,
                           [(E.E, spec.lam)])[0]
    return MatchRatio.from_theta(float(theta))


# ------------------------------------------------------- closed-form ratios

def _i_ratio(nu: float, x: float) -> float:
    """I_(nu-1)(x) / I_nu(x), stable down to tiny arguments."""
    if x < 1e-4:
        # two-term ascending series of each factor; error O(x^4)
        num = 1.0 + x * x / (4.0 * nu)
        den = 1.0 + x * x / (4.0 * (nu + 1.0))
        return (2.0 * nu / x) * num / den
    a = _sp.ive(nu - 1.0, x)
    b = _sp.ive(nu, x)
    if b == 0.0 or not (math.isfinite(a) and math.isfinite(b)):
        raise IllConditioned(f"modified Bessel ratio unusable at nu={nu}, x={x}")
    return a / b


def _k_ratio(nu_num: float, nu_den: float, x: float) -> float:
    """K_nu_num(x) / K_nu_den(x) via scaled kernels."""
    a = _sp.kve(nu_num, x)
    b = _sp.kve(nu_den, x)
    if not (math.isfinite(a) and math.isfinite(b)) or b == 0.0:
        raise IllConditioned(f"K-ratio unusable at orders {nu_num},{nu_den}, x={x}")
    return a / b


def free_interior_ratio(j: float, E: Energy, r0: float, M: float) -> MatchRatio:
    """Zero-coupling interior ratio for |E| <= M.

    A = -sqrt((M+E)/(M-E)) I_(j-1/2)(kappa r0) / I_(j+1/2)(kappa r0),
    with the E = +-M limits taken explicitly. The prefactor equals
    (M+E)/kappa exactly, which is the form used here.
    """
    if j <= 0:
        raise DomainError("free interior ratio requires j > 0")
    if abs(E.E) > M:
        raise DomainError("free interior ratio is a bound-region formula")
    if E.E == M:
        # A ~ -2M(2j+1)/(kappa^2 r0) -> -infinity
        return MatchRatio.pole(-1.0)
    if E.E == -M:
        return MatchRatio.from_value(-(2.0 * j + 1.0) / (2.0 * M * r0))
    kap = E.kappa
    ratio = _i_ratio(j + 0.5, kap * r0)
    return MatchRatio.from_value(-((M + E.E) / kap) * ratio)


def exterior_bound_ratio(j: float, E: Energy, r0: float, M: float) -> MatchRatio:
    """Cutoff exterior ratio at r0+ for |E| <= M; independent of lambda.

    A = ((M+E)/kappa) K_(j-1/2)(kappa r0) / K_(j+1/2)(kappa r0) > 0 with
    explicit limits at the gap edges.
    """
    if j <= 0:
        raise DomainError("exterior ratio requires j > 0")
    if abs(E.E) > M:
        raise DomainError("exterior bound ratio is a bound-region formula")
    if E.E == M:
        if j < 1.0:
            # ~ -2M r0 log(kappa r0) -> +infinity
            return MatchRatio.pole(+1.0)
        return MatchRatio.from_value(2.0 * M * r0 / (2.0 * j - 1.0))
    if E.E == -M:
        return MatchRatio.from_value(0.0)
    kap = E.kappa
    ratio = _k_ratio(j - 0.5, j + 0.5, kap * r0)
    return MatchRatio.from_value(((M + E.E) / kap) * ratio)


def exterior_tail_ratio(j: float, sign: float, r0: float, M: float,
                        b: float) -> MatchRatio:
    """Exterior threshold ratio at r0+ for an inverse-square tail.

    sign=+1 gives the E=M value 2Mr0/(j+alpha-1/2); sign=-1 gives the
    E=-M value -(j-beta+1/2)/(2Mr0).
    """
    from .levinson import tail_exponents

    exps = tail_exponents(j, M, b)
    if sign > 0:
        return MatchRatio.from_value(2.0 * M * r0 / (j + exps.alpha - 0.5))
    return MatchRatio.from_value(-(j - exps.beta + 0.5) / (2.0 * M * r0))


def _tail_threshold_theta(potential: PotentialModel, j: float, M: float,
                          E: Energy) -> float:
    """Near-edge tail exterior via the threshold-order K forms.

    For E near +M the decaying solution is r^(1/2) K_alpha(kappa r) in f
    with g carrying the derivative combination; near -M the roles swap
    with order beta. Valid for kappa r0 << 1.
    """
    from .levinson import tail_exponents

    b = potential.tail.b
    exps = tail_exponents(j, M, b)
    r0 = potential.r0
    kap = E.kappa
    x = kap * r0
    if E.E > 0:
        a = exps.alpha
        num = 2.0 * M * _sp.kv(a, x)
        den = kap * (-special.mod_bessel_k_prime(a, x)
                     + ((j - 0.5) / x) * _sp.kv(a, x))
    else:
        bta = exps.beta
        num = -kap * (special.mod_bessel_k_prime(bta, x)
                      + ((j + 0.5) / x) * _sp.kv(bta, x))
        den = 2.0 * M * _sp.kv(bta, x)
    if not (math.isfinite(num) and math.isfinite(den)):
        raise IllConditioned(f"tail threshold form unusable at x={x}")
    return math.atan2(num, den) if den >= 0 else math.atan2(-num, -den)


def exterior_theta(potential: PotentialModel, j: float, M: float,
                   E: Energy, rtol: float = RTOL, atol: float = ATOL) -> float:
    """Exterior angle at r0+ in a principal-like branch.

    Cutoff potentials use the closed K-ratio form. Inverse-square tails
    use inward integration of the angle equation from a radius where the
    tail is negligible, switching to threshold-order Bessel forms when
    kappa r0 is tiny. Values are continuous in E within each regime;
    callers align branches across an E grid when they need a globally
    continuous curve.
    """
    r0 = potential.r0
    tail = potential.tail
    if tail is None or tail.b == 0.0:
        m = exterior_bound_ratio(j, E, r0, M)
        return m.theta_mod_pi
    if tail.truncated:
        # Truncated tail: the angle is the exact free form at the stop
        # radius carried inward through the tail region; stable in the gap
        # because the decaying solution attracts inward. Valid at the exact
        # edges too, where the free forms are closed.
        if tail.r_stop <= r0:
            return exterior_bound_ratio(j, E, r0, M).theta_mod_pi
        Ec = E if abs(E.E) == M else Energy(clamp_gap_energy(E.E, M), M)
        theta_far = exterior_bound_ratio(j, Ec, tail.r_stop, M).theta_mod_pi

        def rhs_trunc(r, th):
            v = tail.value(r)
            return (j / r) * np.sin(2.0 * th) - (Ec.E - v) - M * np.cos(2.0 * th)

        out = _solve_segments(rhs_trunc, tail.r_stop, r0,
                              np.array([theta_far]), [], rtol, atol)
        return float(out[0])
    if tail.n != 2.0:
        raise DomainError("general-E tail exterior implemented for n = 2 only")
    Ec = Energy(clamp_gap_energy(E.E, M), M)
    kap = Ec.kappa
    if kap * r0 <= TAIL_SWITCH_X:
        return _tail_threshold_theta(potential, j, M, Ec)
    r_far = r0 + min(16.0 / kap, 1e4 * r0)
    theta_far = exterior_bound_ratio(j, Ec, r_far, M).theta_mod_pi

    def rhs(r, th):
        v = tail.value(r)
        return (j / r) * np.sin(2.0 * th) - (Ec.E - v) - M * np.cos(2.0 * th)

    out = _solve_segments(rhs, r_far, r0, np.array([theta_far]), [], rtol, atol)
    return float(out[0])


# ------------------------------------------------------------ reconstruction

def reconstruct_components(spec: ProblemSpec, E: Energy, r_grid):
    """(f, g) on r_grid from the joint (theta, log_rho) integration.

    Normalization is the arbitrary one fixed by the series start; only
    ratios and relative amplitudes are meaningful.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(np.diff(r_grid) <= 0):
        raise DomainError("r_grid must be strictly increasing")
    pot = spec.potential
    r0 = pot.r0
    r_start = R_START_FACTOR * r0
    if r_grid[0] < r_start:
        raise DomainError(f"r_grid must start at or above {r_start}")
    state = series_start(spec, E, r_start)

    def rhs(r, y):
        th = y[0]
        v = spec.lam * pot.value(r)
        dth = (spec.j / r) * math.sin(2.0 * th) - (E.E - v) - spec.M * math.cos(2.0 * th)
        dlr = -(spec.j / r) * math.cos(2.0 * th) - spec.M * math.sin(2.0 * th)
        return np.array([dth, dlr])

    pts = pot.breakpoints_between(r_start, r_grid[-1])
    t, y, _ = _solve_segments(rhs, r_start, float(r_grid[-1]),
                              np.array([state.theta, state.log_rho]),
                              pts, RTOL, ATOL, t_eval=r_grid)
    order = np.argsort(t)
    theta = y[0, order]
    log_rho = y[1, order]
    rho = np.exp(log_rho - np.max(log_rho))
    return rho * np.sin(theta), rho * np.cos(theta)
