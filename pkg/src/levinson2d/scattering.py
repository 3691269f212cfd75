"""Phase shifts from the match at r0, tracked continuously along sweeps.

Outside the support the scattering solution is a fixed combination of
Bessel and Neumann functions whose mixing angle is the phase shift eta.
Matching f/g across r0 fixes tan(eta); following the matched direction
continuously along a coupling-then-momentum path fixes the branch, with
eta = 0 at zero coupling. Threshold values eta(+-M) come from a k -> 0
extrapolation of the swept phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import special
from .errors import BranchAmbiguity, DomainError, IllConditioned, NotConverged
from .levinson import tail_exponents
from .potentials import PotentialModel, cutoff_view
from .radial import ATOL, RTOL, Energy, MatchRatio, interior_theta

# Smallest k*r0 a sweep visits. Below this the Neumann magnitudes at large
# j leave the safe dynamic range of the matching formulas.
K_MIN_X = 1e-3
# k*r0 where the coupling leg of a standard sweep runs; moderate enough
# that phase jumps in lambda stay smooth, small enough to stay threshold-ish.
K_ANCHOR_X = 0.5
WINDOW_X = 1e-2          # extrapolation window: samples with k*r0 <= this
LAMBDA_FLOOR = 1e-8      # finest coupling bisection before giving up
K_RATIO_FLOOR = 1e-12    # finest relative momentum bisection likewise
SPREAD_TOL = 0.05 * math.pi
MAX_SWEEP_NODES = 100_000
_MAX_ROUNDS = 60


def _check_j(j: float) -> None:
    two_j = 2.0 * j
    if j <= 0 or abs(two_j - round(two_j)) > 1e-9 or round(two_j) % 2 == 0:
        raise DomainError(f"j must be a positive half-odd integer, got {j}")


def b_factor(E: float, M: float) -> float:
    """Upper/lower amplitude ratio of the free exterior pair.

    sqrt((E+M)/(E-M)) above the gap, -sqrt((|E|-M)/(|E|+M)) below it;
    both branches coincide with (E+M)/k.
    """
    if M <= 0 or not math.isfinite(M):
        raise DomainError(f"mass must be positive, got M={M}")
    if abs(E) <= M:
        raise DomainError(f"b_factor needs |E| > M, got E={E}, M={M}")
    if E > 0:
        return math.sqrt((E + M) / (E - M))
    return -math.sqrt((-E - M) / (-E + M))


def tan_phase_shift(j: float, E: Energy, A: MatchRatio, r0: float, M: float) -> float:
    """tan(eta) from the interior/exterior match at r0, cutoff exterior.

    A pole of the match ratio (lower component zero at r0) routes through
    the algebraically identical inverse form.
    """
    _check_j(j)
    x = E.k * r0
    B = b_factor(E.E, M)
    jp = special.bessel_j(j + 0.5, x)
    jm = special.bessel_j(j - 0.5, x)
    yp = special.bessel_n(j + 0.5, x)
    ym = special.bessel_n(j - 0.5, x)
    if A.is_pole:
        inv = A.inverse_value
        num = inv - (jp / jm) / B
        den = inv - (yp / ym) / B
        return (jm / ym) * num / den
    num = A.value - B * jm / jp
    den = A.value - B * ym / yp
    return (jp / yp) * num / den


# ------------------------------------------------- matched-direction parts

def _cutoff_parts(j: float, s: float, c: float, x: float, B: float):
    """(num, den) with tan(eta) = num/den for the cutoff exterior.

    (s, c) is the interior direction (f, g)/rho at r0; the pair varies
    continuously with it, which is what the sweep unwrap needs.
    """
    jp = special.bessel_j(j + 0.5, x)
    jm = special.bessel_j(j - 0.5, x)
    yp = special.bessel_n(j + 0.5, x)
    ym = special.bessel_n(j - 0.5, x)
    return s * jp - c * B * jm, s * yp - c * B * ym


def _tail_parts_plus(j, s, c, x, k, M, alpha):
    """Same as _cutoff_parts for the order-alpha basis above the gap."""
    ja = special.bessel_j(alpha, x)
    na = special.bessel_n(alpha, x)
    pj = -special.bessel_j_prime(alpha, x) + ((j - 0.5) / x) * ja
    pn = -special.bessel_n_prime(alpha, x) + ((j - 0.5) / x) * na
    return s * (k / (2.0 * M)) * pj - c * ja, s * (k / (2.0 * M)) * pn - c * na


def _tail_parts_minus(j, s, c, x, k, M, beta):
    """Order-beta basis below the gap."""
    jb = special.bessel_j(beta, x)
    nb = special.bessel_n(beta, x)
    qj = special.bessel_j_prime(beta, x) + ((j + 0.5) / x) * jb
    qn = special.bessel_n_prime(beta, x) + ((j + 0.5) / x) * nb
    return 2.0 * M * s * jb + k * c * qj, 2.0 * M * s * nb + k * c * qn


def _tail_offset(j: float, side: float, order: float) -> float:
    """eta minus the basis phase: the asymptotic order shift in quarter turns."""
    if side > 0:
        return (j - order - 0.5) * (math.pi / 2.0)
    return (j - order + 0.5) * (math.pi / 2.0)


def tail_phase_shift(j: float, E: Energy, A: MatchRatio, r0: float, M: float,
                     b: float) -> float:
    """Phase shift for an inverse-square exterior via the shifted-order basis.

    Returns the principal basis phase plus the order-shift offset. The
    basis keeps only the leading momentum dependence of the exterior
    equations, so the value is meaningful for k*r0 well below one; as
    b -> 0 at small k it reduces to atan(tan_phase_shift(...)).
    """
    _check_j(j)
    exps = tail_exponents(j, M, b)
    k = E.k
    x = k * r0
    s = math.sin(A.theta_mod_pi)
    c = math.cos(A.theta_mod_pi)
    if E.E > 0:
        num, den = _tail_parts_plus(j, s, c, x, k, M, exps.alpha)
        off = _tail_offset(j, +1.0, exps.alpha)
    else:
        num, den = _tail_parts_minus(j, s, c, x, k, M, exps.beta)
        off = _tail_offset(j, -1.0, exps.beta)
    if den < 0.0:
        num, den = -num, -den
    return math.atan2(num, den) + off


# --------------------------------------------------------------- sweeps

@dataclass(frozen=True)
class PhaseSample:
    lam: float
    E: float
    k: float
    tan_eta: float
    eta: float


@dataclass
class PhaseShiftRecord:
    """Phase shifts along a sweep path, branch fixed at zero coupling.

    eta_at_plus_M / eta_at_minus_M hold the raw k -> 0 extrapolants when
    the path reaches the corresponding gap edge; threshold_phase() rounds
    them to exact multiples of pi after checking convergence.
    """

    j: float
    lam: float
    samples: list
    eta_at_plus_M: Optional[float] = None
    eta_at_minus_M: Optional[float] = None
    metadata: dict = field(default_factory=dict)


def threshold_path(j: float, M: float, r0: float, sign: float,
                   k_anchor_x: float = K_ANCHOR_X, k_min_x: float = K_MIN_X,
                   n_lambda: int = 17, n_k: int = 10) -> list:
    """Standard sweep path toward one gap edge.

    Couples up 0 -> 1 at a moderate anchor momentum, then rides the
    momentum down to the extrapolation window. The last four nodes sit at
    k_min * (8, 4, 2, 1) for the threshold fit.
    """
    if not 0.0 < k_min_x <= WINDOW_X:
        raise DomainError(f"k_min_x must lie in (0, {WINDOW_X}]")
    if k_anchor_x <= 8.0 * k_min_x:
        raise DomainError("anchor momentum must sit above the extrapolation window")
    s = 1.0 if sign > 0 else -1.0
    k_anchor = k_anchor_x / r0
    E_anchor = s * math.hypot(M, k_anchor)
    path = [(float(lam), E_anchor) for lam in np.linspace(0.0, 1.0, n_lambda)]
    ks = list(np.geomspace(k_anchor, 8.0 * k_min_x / r0, n_k))
    ks += [4.0 * k_min_x / r0, 2.0 * k_min_x / r0, k_min_x / r0]
    for k in ks[1:]:
        path.append((1.0, s * math.hypot(M, float(k))))
    return path


def _free_state(j: float, E: float, r0: float, M: float):
    """Direction of the exact free interior pair at r0 for |E| > M.

    Oriented like the series start (upper component positive near the
    origin), so it splices continuously into swept interior angles.
    """
    e = Energy(E, M)
    x = e.k * r0
    f = b_factor(E, M) * special.bessel_j(j - 0.5, x)
    g = special.bessel_j(j + 0.5, x)
    if E < 0:
        f, g = -f, -g
    h = math.hypot(f, g)
    return f / h, g / h


def _eval_nodes(potential: PotentialModel, j: float, M: float, nodes,
                rtol: float, atol: float):
    """Per-node matched direction: rows of (w, w0, num, den, off, theta).

    w is the atan2 angle of the matched exterior direction, w0 the same
    for the free interior at the same momentum (tail case only; it
    carries the basis systematics that the subtraction removes). theta is
    the continuous interior angle; the matched direction winds with it, so
    bounding the per-segment theta advance bounds how many pi jumps one
    segment can hide from the wrapped w comparison.
    """
    r0 = potential.r0
    tail = potential.tail
    pairs = [(E, lam) for lam, E in nodes]
    thetas = [float(t) for t in
              interior_theta(potential, j, M, pairs, rtol=rtol, atol=atol)]
    rows = []
    for (lam, E), th in zip(nodes, thetas):
        if lam == 0.0:
            s, c = _free_state(j, E, r0, M)  # exact free direction
        else:
            s, c = math.sin(th), math.cos(th)
        k = Energy(E, M).k
        x = k * r0
        if tail is None:
            num, den = _cutoff_parts(j, s, c, x, b_factor(E, M))
            if lam == 0.0:
                num = 0.0  # free match is exact for a cutoff: eta vanishes
            rows.append((math.atan2(num, den), 0.0, num, den, 0.0, th))
        else:
            exps = tail_exponents(j, M, lam * tail.b)
            s0, c0 = _free_state(j, E, r0, M)
            if E > 0:
                num, den = _tail_parts_plus(j, s, c, x, k, M, exps.alpha)
                num0, den0 = _tail_parts_plus(j, s0, c0, x, k, M, exps.alpha)
                off = _tail_offset(j, +1.0, exps.alpha)
            else:
                num, den = _tail_parts_minus(j, s, c, x, k, M, exps.beta)
                num0, den0 = _tail_parts_minus(j, s0, c0, x, k, M, exps.beta)
                off = _tail_offset(j, -1.0, exps.beta)
            rows.append((math.atan2(num, den), math.atan2(num0, den0),
                         num, den, off, th))
    return rows


def _wrap(x: float) -> float:
    return math.remainder(x, math.tau)


def _step(row_a, row_b) -> float:
    """Phase advance between adjacent nodes after anchor subtraction."""
    return _wrap(row_b[0] - row_a[0]) - _wrap(row_b[1] - row_a[1])


def _midpoint(node_a, node_b, M: float):
    """Bisection node: linear in coupling, geometric in momentum."""
    (l0, E0), (l1, E1) = node_a, node_b
    lam = 0.5 * (l0 + l1)
    if l0 != l1 and abs(l1 - l0) * 0.5 < LAMBDA_FLOOR:
        raise BranchAmbiguity(
            f"phase jump not localized above the coupling floor {LAMBDA_FLOOR:g}")
    if E0 == E1:
        return (lam, E0)
    k0 = Energy(E0, M).k
    k1 = Energy(E1, M).k
    ratio = max(k0, k1) / min(k0, k1)
    if math.sqrt(ratio) - 1.0 < K_RATIO_FLOOR:
        raise BranchAmbiguity(
            f"phase jump not localized above the momentum floor {K_RATIO_FLOOR:g}")
    km = math.sqrt(k0 * k1)
    return (lam, math.copysign(math.hypot(M, km), E0))


def _free_record(j: float, M: float, nodes) -> PhaseShiftRecord:
    samples = [PhaseSample(lam, E, Energy(E, M).k, 0.0, 0.0) for lam, E in nodes]
    side = "plus" if nodes[-1][1] > 0 else "minus"
    meta = {side: {"raw": 0.0, "spread": 0.0, "basis": "free", "n_points": 0}}
    return PhaseShiftRecord(
        j=j, lam=nodes[-1][0], samples=samples,
        eta_at_plus_M=0.0 if side == "plus" else None,
        eta_at_minus_M=0.0 if side == "minus" else None,
        metadata=meta)


def phase_sweep(potential: PotentialModel, j: float, M: float, path,
                rtol: float = RTOL, atol: float = ATOL) -> PhaseShiftRecord:
    """Follow eta continuously along a (lambda, E) path from zero coupling.

    Both the wrapped phase advance and the continuous interior-angle
    advance between adjacent nodes must stay below pi/2; violating
    segments are bisected down to the coupling/momentum floors, past
    which BranchAmbiguity is raised. When the path ends inside the
    extrapolation window of a gap edge, the record carries the raw k -> 0
    extrapolant for that edge.
    """
    _check_j(j)
    if M <= 0 or not math.isfinite(M):
        raise DomainError(f"mass must be positive, got M={M}")
    nodes = [(float(l), float(E)) for l, E in path]
    if len(nodes) < 2:
        raise DomainError("sweep path needs at least two nodes")
    if nodes[0][0] != 0.0:
        raise DomainError("sweep path must start at the zero-coupling anchor")
    for lam, E in nodes:
        if abs(lam) > 1.0:
            raise DomainError(f"|lambda| <= 1 required, got {lam}")
        if abs(E) <= M:
            raise DomainError(f"sweep nodes must lie outside the gap, got E={E}")
    if len({E > 0 for _, E in nodes}) > 1:
        raise DomainError("a single sweep stays on one side of the gap")
    # a truncated tail is cutoff-class: match against free solutions at its
    # stop radius (path nodes must already be built for that radius)
    potential = cutoff_view(potential)
    tail = potential.tail
    if tail is not None and tail.n != 2.0:
        raise DomainError("only inverse-square tails match the exterior basis; "
                          "reduce steeper tails to an effective cutoff first")
    if potential.is_free():
        return _free_record(j, M, nodes)

    rows = _eval_nodes(potential, j, M, nodes, rtol, atol)
    # two guards: the wrapped w step alone cannot see a full-turn slip
    # (two pi jumps in one segment wrap to ~0), but the interior angle is
    # continuous and carries the true winding, so its advance is bounded too
    for _ in range(_MAX_ROUNDS + 1):
        bad = [i for i in range(len(nodes) - 1)
               if abs(_step(rows[i], rows[i + 1])) >= math.pi / 2.0
               or abs(rows[i + 1][5] - rows[i][5]) >= math.pi / 2.0]
        if not bad:
            break
        if len(nodes) + len(bad) > MAX_SWEEP_NODES:
            raise BranchAmbiguity("sweep refinement exceeded the node budget")
        mids = [_midpoint(nodes[i], nodes[i + 1], M) for i in bad]
        mid_rows = _eval_nodes(potential, j, M, mids, rtol, atol)
        for i, mid, row in zip(reversed(bad), reversed(mids), reversed(mid_rows)):
            nodes.insert(i + 1, mid)
            rows.insert(i + 1, row)
    else:
        raise BranchAmbiguity("sweep refinement did not settle")

    v = 0.0
    etas = [rows[0][4]]  # anchor offset is zero for lam = 0
    for i in range(1, len(nodes)):
        v += _step(rows[i - 1], rows[i])
        etas.append(v + rows[i][4])

    samples = []
    for (lam, E), row, eta in zip(nodes, rows, etas):
        if tail is None:
            tan = row[2] / row[3]
        else:
            tan = math.tan(eta)
        samples.append(PhaseSample(lam, E, Energy(E, M).k, tan, eta))

    record = PhaseShiftRecord(j=j, lam=nodes[-1][0], samples=samples)
    _attach_threshold(record, potential, M)
    return record


def _attach_threshold(record: PhaseShiftRecord, potential: PotentialModel,
                      M: float) -> None:
    """Extrapolate eta(k -> 0) from the final-coupling window samples."""
    final_lam = record.samples[-1].lam
    side = 1.0 if record.samples[-1].E > 0 else -1.0
    r0 = potential.r0
    window = [sm for sm in record.samples
              if sm.lam == final_lam and (sm.E > 0) == (side > 0)
              and sm.k * r0 <= WINDOW_X * (1.0 + 1e-12)]
    window.sort(key=lambda sm: sm.k)
    distinct = []
    for sm in window:
        if not distinct or sm.k > distinct[-1].k * (1.0 + 1e-9):
            distinct.append(sm)
        if len(distinct) == 4:
            break
    if len(distinct) < 4:
        return
    order = None
    offset = 0.0
    if potential.tail is not None:
        exps = tail_exponents(record.j, M, final_lam * potential.tail.b)
        order = exps.alpha if side > 0 else exps.beta
        offset = _tail_offset(record.j, side, order)
    basis = _threshold_basis(record.j, side, order)
    ks = [sm.k for sm in distinct]
    etas = [sm.eta for sm in distinct]
    raw, spread = _extrapolate_threshold(ks, etas, r0, basis)
    key = "plus" if side > 0 else "minus"
    record.metadata[key] = {
        "raw": raw, "spread": spread, "offset": offset,
        "basis": "log" if basis == "log" else list(basis),
        "n_points": len(distinct),
        "k_window": [ks[0], ks[-1]],
    }
    if side > 0:
        record.eta_at_plus_M = raw
    else:
        record.eta_at_minus_M = raw


def _threshold_basis(j: float, side: float, order):
    """Fit basis for the k -> 0 extrapolation near a gap edge.

    Cutoff: powers k^2, k^4, except the upper edge at j = 1/2 where the
    approach is logarithmic. Tail of order p: the leading power is k^(2p)
    when p < 1, otherwise the quadratic systematics dominate.
    """
    if order is None or order == 0.0:
        if side > 0 and j == 0.5:
            return "log"
        return (2.0, 4.0)
    if order >= 0.95:
        return (2.0, 4.0)
    p1 = 2.0 * order
    p2 = min(4.0 * order, 2.0)
    if p2 - p1 < 0.1:
        p2 = p1 + 1.0
    return (p1, p2)


def _extrapolate_threshold(ks, etas, r0: float, basis):
    """Intercept of a three-term fit plus the leave-one-out spread."""
    ks = np.asarray(ks, dtype=float)
    etas = np.asarray(etas, dtype=float)
    if basis == "log":
        t = 1.0 / np.log(ks * r0)
        cols = np.column_stack([np.ones_like(t), t, t * t])
    else:
        p1, p2 = basis
        cols = np.column_stack([np.ones_like(ks), ks ** p1, ks ** p2])
    scale = np.max(np.abs(cols), axis=0)
    cols = cols / scale
    full = float(np.linalg.lstsq(cols, etas, rcond=None)[0][0])
    loo = []
    for drop in range(len(ks)):
        keep = [i for i in range(len(ks)) if i != drop]
        sol = np.linalg.lstsq(cols[keep], etas[keep], rcond=None)[0]
        loo.append(float(sol[0]))
    return full, max(loo) - min(loo)


def threshold_record(potential: PotentialModel, j: float, M: float,
                     rtol: float = RTOL, atol: float = ATOL,
                     k_anchor_x: float = K_ANCHOR_X,
                     k_min_x: float = K_MIN_X) -> PhaseShiftRecord:
    """Sweep both gap edges along the standard paths and merge the records."""
    potential = cutoff_view(potential)
    r0 = potential.r0
    rec_p = phase_sweep(potential, j, M,
                        threshold_path(j, M, r0, +1.0, k_anchor_x, k_min_x),
                        rtol, atol)
    rec_m = phase_sweep(potential, j, M,
                        threshold_path(j, M, r0, -1.0, k_anchor_x, k_min_x),
                        rtol, atol)
    return PhaseShiftRecord(
        j=j, lam=rec_p.lam, samples=rec_p.samples + rec_m.samples,
        eta_at_plus_M=rec_p.eta_at_plus_M,
        eta_at_minus_M=rec_m.eta_at_minus_M,
        metadata={**rec_p.metadata, **rec_m.metadata})


def threshold_phase(record: PhaseShiftRecord, sign: float) -> float:
    """Threshold phase eta(sign * M), snapped to its quantized lattice.

    Sharp-cutoff potentials reach the gap edges at exact multiples of pi;
    an inverse-square tail shifts the lattice by a fixed per-edge offset
    that depends on the effective centrifugal order. The raw extrapolant
    is snapped to the nearest lattice point.

    Raises NotConverged when the leave-one-out extrapolants disagree by
    more than SPREAD_TOL, DomainError when the record never reached the
    requested gap edge.
    """
    raw = record.eta_at_plus_M if sign > 0 else record.eta_at_minus_M
    if raw is None:
        raise DomainError("record has no extrapolation window at that gap edge")
    key = "plus" if sign > 0 else "minus"
    meta = record.metadata.get(key, {})
    spread = meta.get("spread", 0.0)
    if spread > SPREAD_TOL:
        raise NotConverged(
            f"threshold extrapolants spread {spread:.3g} rad at the {key} edge")
    offset = meta.get("offset", 0.0)
    return math.pi * round((raw - offset) / math.pi) + offset


# ------------------------------------------------------ threshold algebra

@dataclass(frozen=True)
class ThresholdFit:
    """Threshold curvatures of the match ratio.

    A ~ A(M) - c1_sq * k^2 just above the gap, A ~ A(-M) + c2_sq * k^2
    just below; both coefficients are non-negative because the interior
    ratio decreases with energy.
    """

    c1_sq: float
    c2_sq: float


def threshold_fit(samples_plus, samples_minus, M: float) -> ThresholdFit:
    """Least-squares quadratic-in-k^2 fit of (E, A) samples near both edges.

    Raises IllConditioned when the residual exceeds 1% of the sampled
    variation or the curvature has the unphysical sign beyond noise.
    """
    return ThresholdFit(c1_sq=_threshold_coeff(samples_plus, M, +1.0),
                        c2_sq=_threshold_coeff(samples_minus, M, -1.0))


def _threshold_coeff(samples, M: float, side: float) -> float:
    pts = [(float(E), float(A)) for E, A in samples]
    if len(pts) < 3:
        raise DomainError("threshold fit needs at least three samples per edge")
    for E, _ in pts:
        if side * E <= M:
            raise DomainError(
                f"threshold samples must lie outside the gap on the fitted side, got E={E}")
    k2 = np.array([E * E - M * M for E, _ in pts])
    A = np.array([a for _, a in pts])
    u = k2 / k2.max()
    cols = np.column_stack([np.ones_like(u), u, u * u])
    sol, *_ = np.linalg.lstsq(cols, A, rcond=None)
    resid = float(np.max(np.abs(cols @ sol - A)))
    var = float(A.max() - A.min())
    if var == 0.0:
        return 0.0
    if resid > 0.01 * var:
        raise IllConditioned(
            "threshold samples are not quadratic in k^2 at the 1% level")
    slope = sol[1] / k2.max()
    c = -slope if side > 0 else slope
    if c < 0.0:
        if c * k2.max() < -0.01 * var:
            raise IllConditioned(
                "match ratio curvature has the wrong sign near the gap edge")
        c = 0.0
    return float(c)


def asymptotic_tan_eta(j: float, E: Energy, A_threshold: float,
                       fit: ThresholdFit, r0: float, M: float) -> float:
    """Small-k threshold law for tan(eta), cutoff exterior.

    Validation-only companion of tan_phase_shift: pins the threshold
    exponents and resonance denominators, keeping the next-to-leading
    terms that matter near critical couplings. Meaningful for k*r0 << 1.
    """
    _check_j(j)
    k = E.k
    x = k * r0
    A = A_threshold
    if E.E > 0:
        c1 = fit.c1_sq
        if j > 1.6:
            pref = -math.pi * (x / 2.0) ** (2.0 * j + 1.0) / (
                special.half_integer_factorial(j + 0.5)
                * special.half_integer_factorial(j - 0.5))
            if math.isinf(A):
                return pref
            num = A - 2.0 * M * (2.0 * j + 1.0) / (k * k * r0)
            den = A - c1 * k * k - (2.0 * M * r0 / (2.0 * j - 1.0)) * (
                1.0 + x * x / ((2.0 * j - 1.0) * (2.0 * j - 3.0)))
            return pref * num / den
        if j > 1.0:
            pref = -(math.pi / 2.0) * (x / 2.0) ** 4
            if math.isinf(A):
                return pref
            num = A - 8.0 * M / (k * k * r0)
            den = A - c1 * k * k - M * r0 * (1.0 - (x * x / 2.0) * math.log(x))
            return pref * num / den
        pref = math.pi / (2.0 * math.log(x))
        if A == 0.0:
            return pref
        inv = 0.0 if math.isinf(A) else 1.0 / A
        num = inv + c1 * k * k - k * k * r0 / (4.0 * M)
        den = inv + c1 * k * k + 1.0 / (2.0 * M * r0 * math.log(x))
        return pref * num / den
    c2 = fit.c2_sq
    if j > 1.0:
        pref = -math.pi * (x / 2.0) ** (2.0 * j + 1.0) / (
            special.half_integer_factorial(j + 0.5)
            * special.half_integer_factorial(j - 0.5))
        if math.isinf(A):
            return pref
        num = A + (2.0 * j + 1.0) / (2.0 * M * r0)
        den = A + c2 * k * k + k * k * r0 / (2.0 * M * (2.0 * j - 1.0))
        return pref * num / den
    pref = -math.pi * (x / 2.0) ** 2
    if math.isinf(A):
        return pref
    num = A + 1.0 / (M * r0)
    den = A + c2 * k * k - k * k * r0 * math.log(x) / (2.0 * M)
    return pref * num / den


__all__ = [
    "PhaseSample", "PhaseShiftRecord", "ThresholdFit",
    "b_factor", "tan_phase_shift", "tail_phase_shift",
    "phase_sweep", "threshold_path", "threshold_record", "threshold_phase",
    "threshold_fit", "asymptotic_tan_eta",
    "K_MIN_X", "K_ANCHOR_X", "SPREAD_TOL",
]
