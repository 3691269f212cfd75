"""Bound-state census in the mass gap.

The matching defect Delta(E) = theta_int(E) - theta_ext(E), built from the
continuous interior angle and a branch-aligned exterior angle, is strictly
decreasing across |E| <= M: the interior ratio falls with energy while the
exterior ratio rises. Bound states are the lattice crossings Delta = m*pi,
so counting reduces to the integers strictly between the two exact edge
values, and each energy is then pinned by bisection on its own lattice
line. A coupling sweep of the edge angles counts the same states a second
way (net signed crossings of the per-edge critical surfaces), and the
report records whether the two methods agree.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import radial
from .errors import CrossingAmbiguity, DomainError, GridInsufficient
from .levinson import tail_exponents
from .potentials import (
    PotentialModel,
    ProblemSpec,
    check_integrability,
    cutoff_view,
)
from .radial import ATOL, RTOL, Energy, MatchRatio

TOL_HALF = 1e-6
TOL_E_FACTOR = 1e-10

GRID_START = 257          # 256 cells
GRID_MAX_POINTS = 2 ** 16
_MAX_BISECT = 200


class HalfBound(enum.Enum):
    NONE = "none"
    AT_PLUS_M = "at_plus_M"
    AT_MINUS_M = "at_minus_M"


@dataclass(frozen=True)
class MethodAgreement:
    direct: int
    sweep: object        # int, or None when the sweep refused to tally
    equal: object        # bool, or None alongside a refused sweep
    note: str = ""


@dataclass
class SpectrumReport:
    j: float
    bound_energies: list
    n_j: int
    half_bound: HalfBound
    method_agreement: MethodAgreement
    metadata: dict = field(default_factory=dict)


# --------------------------------------------------------------- edge data

def _require_supported_tail(potential: PotentialModel) -> None:
    tail = potential.tail
    if (tail is not None and tail.b != 0.0 and tail.n != 2.0
            and not tail.truncated):
        raise DomainError(
            "the census handles sharp cutoffs, inverse-square tails, and "
            "truncated tails; reduce steeper infinite tails to a truncated "
            "effective cutoff first")


def _edge_reference(potential: PotentialModel, j: float, M: float,
                    sign: float) -> MatchRatio:
    """Exterior threshold ratio defining the critical surface at sign*M."""
    tail = potential.tail
    if tail is not None and tail.b != 0.0:
        if tail.truncated:
            # cutoff-class: exact free edge form at r_stop carried inward
            th = radial.exterior_theta(potential, j, M, Energy(sign * M, M))
            return MatchRatio.from_theta(th)
        return radial.exterior_tail_ratio(j, sign, potential.r0, M, tail.b)
    return radial.exterior_bound_ratio(j, Energy(sign * M, M), potential.r0, M)


def _edge_orders(potential: PotentialModel, j: float, M: float):
    """Effective centrifugal orders (alpha, beta); cutoff reduces to b = 0."""
    tail = potential.tail
    b = 0.0 if (tail is None or tail.truncated) else tail.b
    exps = tail_exponents(j, M, b)
    return exps.alpha, exps.beta


def _coincides(A: MatchRatio, ref: MatchRatio, tol: float) -> bool:
    """Interior ratio sits on the critical surface within a relative band."""
    if ref.is_pole:
        return abs(A.inverse_value) < tol
    if A.is_pole:
        return False
    return abs(A.value - ref.value) < tol * (1.0 + abs(ref.value))


def _surface_band(ref: MatchRatio, tol: float) -> float:
    """Angular half-width of the critical band around theta = ref angle."""
    if ref.is_pole:
        return tol
    v = ref.value
    return tol * (1.0 + abs(v)) / (1.0 + v * v)


# ---------------------------------------------------------- direct search

def _exterior_angle(potential: PotentialModel, j: float, M: float, E: float,
                    rtol: float, atol: float) -> float:
    if abs(E) == M:
        return _edge_reference(potential, j, M, math.copysign(1.0, E)).theta_mod_pi
    return radial.exterior_theta(potential, j, M, Energy(E, M), rtol, atol)


def _align(value: float, anchor: float) -> float:
    """Shift by a multiple of pi onto the branch of the anchor."""
    return value + math.pi * round((anchor - value) / math.pi)


def _defect_grid(potential: PotentialModel, j: float, M: float, n_points: int,
                 rtol: float, atol: float):
    """(E grid, branch-aligned exterior, Delta); edges use closed forms."""
    E = np.linspace(-M, M, n_points)
    theta_int = radial.interior_theta(
        potential, j, M, np.column_stack([E, np.ones_like(E)]),
        rtol=rtol, atol=atol)
    ext = np.empty_like(E)
    for i, Ei in enumerate(E):
        raw = _exterior_angle(potential, j, M, float(Ei), rtol, atol)
        ext[i] = raw if i == 0 else _align(raw, ext[i - 1])
    return E, ext, theta_int - ext


def find_bound_energies(spec: ProblemSpec, tol_E=None,
                        rtol: float = RTOL, atol: float = ATOL):
    """Sorted bound-state energies strictly inside (-M, M) at full coupling.

    Scans the monotone matching defect on a grid (256 cells, doubled while
    any cell's swing exceeds pi, up to 2^16 points), then bisects each
    bracketed lattice line to tol_E. Edge-coincident lattice lines belong
    to the threshold classification, not to this list.
    """
    if spec.lam != 1.0:
        raise DomainError("the census is defined at full coupling lambda = 1")
    potential, j, M = spec.potential, spec.j, spec.M
    if j <= 0:
        raise DomainError("direct search requires j > 0; map negative j first")
    spec.validate_range()
    _require_supported_tail(potential)
    if not check_integrability(potential).integrable:
        raise DomainError("potential is not r-weighted integrable at the origin")
    if tol_E is None:
        tol_E = TOL_E_FACTOR * M

    n_points = GRID_START
    while True:
        E, ext, delta = _defect_grid(potential, j, M, n_points, rtol, atol)
        if np.all(np.abs(np.diff(delta)) <= math.pi):
            break
        if n_points >= GRID_MAX_POINTS:
            raise GridInsufficient(
                f"defect swings more than pi per cell at {n_points} points")
        n_points = min(2 * (n_points - 1) + 1, GRID_MAX_POINTS)

    # strictly interior lattice indices; edge coincidences are excluded here
    ref_p = _edge_reference(potential, j, M, +1.0)
    ref_m = _edge_reference(potential, j, M, -1.0)
    band_p = _surface_band(ref_p, TOL_HALF)
    band_m = _surface_band(ref_m, TOL_HALF)
    y_lo = delta[-1] / math.pi     # at E = +M, the smaller value
    y_hi = delta[0] / math.pi      # at E = -M, the larger value
    if abs(y_lo - round(y_lo)) * math.pi < band_p:
        m_start = round(y_lo) + 1
    else:
        m_start = math.floor(y_lo) + 1
    if abs(y_hi - round(y_hi)) * math.pi < band_m:
        m_end = round(y_hi) - 1
    else:
        m_end = math.floor(y_hi)
    if m_end < m_start:
        return []

    targets = [m * math.pi for m in range(m_start, m_end + 1)]
    brackets = []
    for t in targets:
        hit = np.nonzero((delta[:-1] - t) * (delta[1:] - t) <= 0.0)[0]
        if hit.size == 0:
            raise GridInsufficient(f"no grid cell brackets the lattice line {t}")
        i = int(hit[0])
        brackets.append([float(E[i]), float(E[i + 1]), float(ext[i])])

    roots = []
    for t, (a, b, anchor) in zip(targets, brackets):
        for _ in range(_MAX_BISECT):
            if (b - a) <= tol_E:
                break
            mid = 0.5 * (a + b)
            th = float(radial.interior_theta(potential, j, M, [(mid, 1.0)],
                                             rtol=rtol, atol=atol)[0])
            e_mid = _align(_exterior_angle(potential, j, M, mid, rtol, atol),
                           anchor)
            if (th - e_mid) - t >= 0.0:
                a = mid        # defect decreasing: still above the line
            else:
                b = mid
        roots.append(0.5 * (a + b))

    # Lattice lines coinciding with an edge were excluded above via the
    # ratio-space band, so every bisected root is a genuine interior state
    # even when it sits within tol_E of an edge (newborn states at +M are
    # exponentially shallow when the exterior diverges logarithmically).
    return sorted(roots)


# ------------------------------------------------------------- thresholds

def _edge_interior(potential: PotentialModel, j: float, M: float,
                   rtol: float, atol: float):
    """Continuous interior angles at the two gap edges, full coupling."""
    th = radial.interior_theta(potential, j, M, [(M, 1.0), (-M, 1.0)],
                               rtol=rtol, atol=atol)
    return float(th[0]), float(th[1])


def detect_half_bound(spec: ProblemSpec, tol_half: float = TOL_HALF,
                      rtol: float = RTOL, atol: float = ATOL) -> HalfBound:
    """Classify a gap-edge coincidence that is NOT square-integrable.

    The edge solution decays like r^(1/2 - order) with order = alpha at +M
    and beta at -M (a sharp cutoff has alpha = j - 1/2, beta = j + 1/2), so
    a coincidence is half bound iff the order is <= 1; larger orders make
    the same coincidence a genuine edge bound state and this flag stays
    NONE. Checks +M first; simultaneous edge criticality is not resolved
    here.
    """
    if spec.lam != 1.0:
        raise DomainError("half-bound detection is defined at lambda = 1")
    potential, j, M = spec.potential, spec.j, spec.M
    if j <= 0:
        raise DomainError("detection requires j > 0; map negative j first")
    _require_supported_tail(potential)
    alpha, beta = _edge_orders(potential, j, M)
    th_p, th_m = _edge_interior(potential, j, M, rtol, atol)
    A_p = MatchRatio.from_theta(th_p)
    A_m = MatchRatio.from_theta(th_m)
    if _coincides(A_p, _edge_reference(potential, j, M, +1.0), tol_half) \
            and alpha <= 1.0:
        return HalfBound.AT_PLUS_M
    if _coincides(A_m, _edge_reference(potential, j, M, -1.0), tol_half) \
            and beta <= 1.0:
        return HalfBound.AT_MINUS_M
    return HalfBound.NONE


# ----------------------------------------------------------- lambda sweep

def lambda_sweep_count(potential: PotentialModel, j: float, M: float = 1.0,
                       tol_half: float = TOL_HALF,
                       rtol: float = RTOL, atol: float = ATOL) -> int:
    """Net signed count of critical-surface crossings over lambda in [0, 1].

    A bound state enters when the interior edge ratio at +M decreases
    through the exterior threshold value (for j = 1/2 that surface is the
    pole, tracked as 1/A increasing through 0) and leaves the census when
    the -M ratio decreases through its own surface. Because the interior
    angle is continuous in the coupling, the net tally is a difference of
    endpoint floor indices; the free endpoints sit strictly inside their
    first lattice cell, so only the full-coupling angles are computed.
    """
    if j <= 0:
        raise DomainError("sweep requires j > 0; map negative j first")
    _require_supported_tail(potential)
    if potential.is_free():
        return 0
    # truncated tails: count in the cutoff frame at r_stop, where the free
    # endpoints provably sit inside their first lattice cell
    potential = cutoff_view(potential)
    up1, um1 = _edge_interior(potential, j, M, rtol, atol)
    ref_p = _edge_reference(potential, j, M, +1.0)
    ref_m = _edge_reference(potential, j, M, -1.0)
    dist_p = abs(math.remainder(up1 - ref_p.theta_mod_pi, math.pi))
    dist_m = abs(math.remainder(um1 - ref_m.theta_mod_pi, math.pi))
    for dist, band, name in ((dist_p, _surface_band(ref_p, tol_half), "+M"),
                             (dist_m, _surface_band(ref_m, tol_half), "-M")):
        if dist < band:
            raise CrossingAmbiguity(
                f"edge ratio at {name} sits on the critical surface "
                f"within tolerance at full coupling")
    yp1 = (up1 - ref_p.theta_mod_pi) / math.pi
    ym1 = (um1 - ref_m.theta_mod_pi) / math.pi
    return math.floor(ym1) - math.floor(yp1)


# ----------------------------------------------------------------- report

def spectrum_report(potential: PotentialModel, j: float, M: float = 1.0,
                    tol_E=None, tol_half: float = TOL_HALF,
                    rtol: float = RTOL, atol: float = ATOL) -> SpectrumReport:
    """Full census: energies, count, edge classification, method cross-check.

    n_j counts the strictly interior energies plus any square-integrable
    edge coincidence (order > 1); half-bound coincidences are flagged but
    never counted. The lambda-sweep tally's jump convention at full
    coupling is inclusive: an exactly-critical edge raises ambiguity
    instead of guessing, and the sweep column is left empty.
    """
    spec = ProblemSpec(potential=potential, j=j, M=M, lam=1.0)
    energies = find_bound_energies(spec, tol_E=tol_E, rtol=rtol, atol=atol)

    alpha, beta = _edge_orders(potential, j, M)
    th_p, th_m = _edge_interior(potential, j, M, rtol, atol)
    A_p = MatchRatio.from_theta(th_p)
    A_m = MatchRatio.from_theta(th_m)
    coin_p = _coincides(A_p, _edge_reference(potential, j, M, +1.0), tol_half)
    coin_m = _coincides(A_m, _edge_reference(potential, j, M, -1.0), tol_half)
    edge_bound_p = coin_p and alpha > 1.0
    edge_bound_m = coin_m and beta > 1.0
    if coin_p and alpha <= 1.0:
        half = HalfBound.AT_PLUS_M
    elif coin_m and beta <= 1.0:
        half = HalfBound.AT_MINUS_M
    else:
        half = HalfBound.NONE

    n_j = len(energies) + int(edge_bound_p) + int(edge_bound_m)
    try:
        sweep = lambda_sweep_count(potential, j, M, tol_half, rtol, atol)
        agreement = MethodAgreement(direct=n_j, sweep=sweep,
                                    equal=(sweep == n_j))
    except CrossingAmbiguity as exc:
        agreement = MethodAgreement(direct=n_j, sweep=None, equal=None,
                                    note=str(exc))
    return SpectrumReport(
        j=j, bound_energies=energies, n_j=n_j, half_bound=half,
        method_agreement=agreement,
        metadata={
            "edge_bound_plus": edge_bound_p,
            "edge_bound_minus": edge_bound_m,
            "edge_orders": (alpha, beta),
            "critical_plus": coin_p,
            "critical_minus": coin_m,
            "jump_convention": "inclusive at lambda = 1",
            "tol_half": tol_half,
        })


__all__ = [
    "TOL_HALF", "TOL_E_FACTOR", "GRID_START", "GRID_MAX_POINTS",
    "HalfBound", "MethodAgreement", "SpectrumReport",
    "find_bound_energies", "detect_half_bound", "lambda_sweep_count",
    "spectrum_report",
]
