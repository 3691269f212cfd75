"""Theorem assembly: thresholds, bound counts, and residual classification.

The statement under test: the sum of the two gap-edge phase shifts equals
pi times the bound-state count, plus a pi correction for the half-bound
branches, plus a fixed offset when the potential carries an inverse-square
tail. verify() computes the left side from the phase sweep, the right side
from the census, and classifies the residual; a second, winding-number
route to the edge phases cross-checks the sweep, and disagreements are
reported instead of silently merged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import ExcludedCase, InfiniteSpectrum, NotConverged, OutOfValidatedRange

__all__ = [
    "Classification",
    "LevinsonReport",
    "RESIDUAL_TOL",
    "TailExponents",
    "reduce_tail",
    "symmetry_map",
    "tail_exponents",
    "verify",
]

# Bessel orders beyond this overflow double precision at the small arguments
# the threshold analysis needs.
MAX_TAIL_ORDER = 45.0

RESIDUAL_TOL = 0.05 * math.pi

# Steeper-than-inverse-square tails are dropped beyond the radius where
# 2M |V(r)| r^2 falls under this bound, capped at R_EFF_CAP * r0.
TAIL_DROP_BOUND = 1e-3
R_EFF_CAP = 100.0

_ORDER_ONE_TOL = 1e-9


@dataclass(frozen=True)
class TailExponents:
    """Effective Bessel orders for an inverse-square potential tail.

    alpha governs the E = +M threshold, beta the E = -M one. For a
    vanishing tail they reduce to j - 1/2 and j + 1/2.
    """

    alpha: float
    beta: float


def tail_exponents(j: float, M: float, b: float) -> TailExponents:
    """Orders alpha = sqrt(j^2 - j + 2Mb + 1/4), beta = sqrt(j^2 + j - 2Mb + 1/4).

    b = 0 is the cutoff limit and is returned directly. A negative squared
    order means the spectrum accumulates at the corresponding threshold
    (infinitely many bound states); a vanishing order is outside the
    theorem's stated validity.
    """
    if b == 0.0:
        return TailExponents(alpha=j - 0.5, beta=j + 0.5)
    two_mb = 2.0 * M * b
    alpha_sq = j * j - j + two_mb + 0.25
    beta_sq = j * j + j - two_mb + 0.25
    zero_tol = 1e-14 * (1.0 + abs(two_mb))
    for name, sq in (("alpha", alpha_sq), ("beta", beta_sq)):
        if abs(sq) <= zero_tol:
            raise ExcludedCase(f"tail order {name} vanishes (2Mb = {two_mb:g})")
        if sq < 0.0:
            raise InfiniteSpectrum(
                f"{name}^2 = {sq:g} < 0: bound states accumulate at threshold")
    alpha = math.sqrt(alpha_sq)
    beta = math.sqrt(beta_sq)
    if max(alpha, beta) > MAX_TAIL_ORDER:
        raise OutOfValidatedRange(
            f"tail order {max(alpha, beta):g} exceeds validated {MAX_TAIL_ORDER}")
    return TailExponents(alpha=alpha, beta=beta)


class Classification(enum.Enum):
    VERIFIED = "VERIFIED"
    VIOLATED = "VIOLATED"
    CRITICAL_AMBIGUOUS = "CRITICAL_AMBIGUOUS"
    UNSUPPORTED_REGIME = "UNSUPPORTED_REGIME"


@dataclass
class LevinsonReport:
    """One theorem check: lhs = eta(+M) + eta(-M) against the census.

    residual = lhs - (n_j + correction) * pi - tail_offset. correction is
    the extra pi unit owed to a half-bound state on the branches where the
    theorem statement includes one. metadata carries the per-edge phase
    routes, criticality flags, and dual residuals for ambiguous cases.
    """

    j: float
    lhs: float
    n_j: int
    half_bound: object            # spectrum.HalfBound
    correction: int
    tail_offset: float
    residual: float
    classification: Classification
    metadata: dict = field(default_factory=dict)


def _correction(j: float, half_bound) -> int:
    """The +1 branches: half bound at +M for j in {3/2, -1/2}, at -M for
    j in {1/2, -3/2}; every other combination contributes nothing."""
    from .spectrum import HalfBound

    if half_bound is HalfBound.AT_PLUS_M and j in (1.5, -0.5):
        return 1
    if half_bound is HalfBound.AT_MINUS_M and j in (0.5, -1.5):
        return 1
    return 0


def reduce_tail(potential, M: float, drop_bound: float = TAIL_DROP_BOUND):
    """Truncate a steeper-than-inverse-square tail, making the shape
    cutoff-class.

    The tail is kept out to the radius where 2M |V(r)| r^2 falls below
    drop_bound (capped at R_EFF_CAP * r0) and dropped beyond it. Returns
    the truncated model and a description of what was dropped.
    """
    import dataclasses

    from .potentials import PowerTail

    tail = potential.tail
    if tail is None or tail.b == 0.0 or tail.n == 2.0 or tail.truncated:
        raise ValueError(
            "reduction applies to infinite tails steeper than inverse-square")
    r0 = potential.r0
    r_eff = (2.0 * M * abs(tail.b) / drop_bound) ** (1.0 / (tail.n - 2.0))
    capped = r_eff > R_EFF_CAP * r0
    r_eff = min(max(r_eff, r0), R_EFF_CAP * r0)

    reduced = dataclasses.replace(
        potential, tail=PowerTail(tail.b, tail.n, r_stop=r_eff))
    note = {
        "r_eff": r_eff,
        "dropped_tail_bound": 2.0 * M * abs(tail.b) / r_eff ** (tail.n - 2.0),
        "capped": capped,
        "tail_n": tail.n,
        "tail_b": tail.b,
    }
    return reduced, note


def _edge_phase_floors(potential, j: float, M: float, rtol, atol):
    """Winding-number route to the edge phases.

    The net pi-jump count at each edge is the floor drop of the interior
    angle relative to the critical surface between the coupling endpoints;
    the free endpoint floors vanish identically, so only the full-coupling
    angles are needed. Tails add their per-edge offsets on top. A floor is
    flagged unreliable when the angle sits inside the critical band, where
    rounding could tip it either way.
    """
    from . import radial, spectrum
    from .potentials import cutoff_view

    if potential.is_free():
        return {"plus": 0.0, "minus": 0.0,
                "plus_reliable": True, "minus_reliable": True}
    # truncated tails count in the cutoff frame at the stop radius, where
    # the zero-coupling endpoint floors provably vanish
    potential = cutoff_view(potential)
    th = radial.interior_theta(potential, j, M, [(M, 1.0), (-M, 1.0)],
                               rtol=rtol, atol=atol)
    ref_p = spectrum._edge_reference(potential, j, M, +1.0)
    ref_m = spectrum._edge_reference(potential, j, M, -1.0)
    alpha, beta = spectrum._edge_orders(potential, j, M)
    tail = potential.tail
    has_tail = tail is not None and tail.b != 0.0
    off_p = (j - alpha - 0.5) * math.pi / 2.0 if has_tail else 0.0
    off_m = (j - beta + 0.5) * math.pi / 2.0 if has_tail else 0.0
    y_p = (float(th[0]) - ref_p.theta_mod_pi) / math.pi
    y_m = (float(th[1]) - ref_m.theta_mod_pi) / math.pi
    band_p = spectrum._surface_band(ref_p, spectrum.TOL_HALF)
    band_m = spectrum._surface_band(ref_m, spectrum.TOL_HALF)
    return {
        "plus": math.pi * (0 - math.floor(y_p)) + off_p,
        "minus": math.pi * math.floor(y_m) + off_m,
        "plus_reliable": abs(y_p - round(y_p)) * math.pi >= band_p,
        "minus_reliable": abs(y_m - round(y_m)) * math.pi >= band_m,
    }


def verify(potential, j: float, M: float = 1.0, *,
           residual_tol: float = RESIDUAL_TOL, tol_half=None,
           drop_bound: float = TAIL_DROP_BOUND,
           rtol=None, atol=None) -> LevinsonReport:
    """Check the phase-count relation for one potential and one channel.

    Negative j is always served by mapping the reflected positive-j
    problem. Inverse-square tails use the offset relation; steeper tails
    are reduced to an enlarged sharp cutoff first. The report is VERIFIED
    only when the swept phases are cleanly quantized, agree with the
    winding route, and the residual passes; critical-band configurations
    degrade to CRITICAL_AMBIGUOUS with both theorem variants reported.
    """
    from . import radial, scattering, spectrum

    if tol_half is None:
        tol_half = spectrum.TOL_HALF
    if rtol is None:
        rtol = radial.RTOL
    if atol is None:
        atol = radial.ATOL

    if j < 0:
        base = verify(potential.negated(), -j, M, residual_tol=residual_tol,
                      tol_half=tol_half, drop_bound=drop_bound,
                      rtol=rtol, atol=atol)
        return symmetry_map(base)

    meta: dict = {}
    work = potential
    tail = potential.tail
    exps = None
    tail_offset = 0.0
    if tail is not None and tail.b != 0.0:
        if tail.truncated:
            # already cutoff-class; nothing to reduce and no lattice offset
            meta["tail_truncated"] = {"r_stop": tail.r_stop, "n": tail.n}
        elif tail.n == 2.0:
            exps = tail_exponents(j, M, tail.b)
            tail_offset = (2.0 * j - exps.alpha - exps.beta) * math.pi / 2.0
            meta["tail"] = {"alpha": exps.alpha, "beta": exps.beta,
                            "offset": tail_offset}
        else:
            work, note = reduce_tail(potential, M, drop_bound)
            meta["tail_reduction"] = note

    srep = spectrum.spectrum_report(work, j, M, tol_half=tol_half,
                                    rtol=rtol, atol=atol)
    n_j = srep.n_j
    half = srep.half_bound
    correction = _correction(j, half)

    rec = scattering.threshold_record(work, j, M, rtol=rtol, atol=atol)
    raw_p = rec.eta_at_plus_M
    raw_m = rec.eta_at_minus_M
    snapped = {}
    for sign, key in ((+1.0, "plus"), (-1.0, "minus")):
        try:
            snapped[key] = scattering.threshold_phase(rec, sign)
        except NotConverged as exc:
            snapped[key] = None
            meta.setdefault("threshold_warnings", []).append(str(exc))

    floors = _edge_phase_floors(work, j, M, rtol, atol)
    floor_p = floors["plus"]
    floor_m = floors["minus"]

    lhs = raw_p + raw_m
    rhs = (n_j + correction) * math.pi + tail_offset
    residual = lhs - rhs
    lhs_floor = floor_p + floor_m
    residual_floor = lhs_floor - rhs
    resid_n = lhs - (n_j * math.pi + tail_offset)
    resid_n1 = lhs - ((n_j + 1) * math.pi + tail_offset)

    off_p = rec.metadata.get("plus", {}).get("offset", 0.0)
    off_m = rec.metadata.get("minus", {}).get("offset", 0.0)
    gap_p = abs(raw_p - off_p - math.pi * round((raw_p - off_p) / math.pi))
    gap_m = abs(raw_m - off_m - math.pi * round((raw_m - off_m) / math.pi))
    quant_ok = gap_p < residual_tol and gap_m < residual_tol
    # A floor inside the critical band is a coin flip; only reliable sides
    # can vote on route agreement.
    routes_agree = (
        snapped["plus"] is not None and snapped["minus"] is not None
        and (not floors["plus_reliable"]
             or abs(snapped["plus"] - floor_p) < 1e-9)
        and (not floors["minus_reliable"]
             or abs(snapped["minus"] - floor_m) < 1e-9))

    coin_p = srep.metadata["critical_plus"]
    coin_m = srep.metadata["critical_minus"]

    if exps is not None and (
            (coin_p and exps.alpha < 1.0 - _ORDER_ONE_TOL)
            or (coin_m and exps.beta < 1.0 - _ORDER_ONE_TOL)):
        classification = Classification.UNSUPPORTED_REGIME
    elif quant_ok and routes_agree and abs(residual) < residual_tol:
        classification = Classification.VERIFIED
    elif coin_p or coin_m:
        # On a critical surface the small-k behavior changes law, so the
        # extrapolated phase cannot be trusted to condemn the relation.
        classification = Classification.CRITICAL_AMBIGUOUS
    elif (abs(residual_floor) < residual_tol or abs(resid_n) < residual_tol
          or abs(resid_n1) < residual_tol):
        classification = Classification.CRITICAL_AMBIGUOUS
    else:
        classification = Classification.VIOLATED

    meta["eta"] = {
        "plus": {"raw": raw_p, "snapped": snapped["plus"], "floor": floor_p,
                 "floor_reliable": floors["plus_reliable"],
                 "quantization_gap": gap_p},
        "minus": {"raw": raw_m, "snapped": snapped["minus"], "floor": floor_m,
                  "floor_reliable": floors["minus_reliable"],
                  "quantization_gap": gap_m},
    }
    meta["routes_agree"] = routes_agree
    meta["quantized"] = quant_ok
    meta["residuals"] = {"primary": residual, "floor_route": residual_floor,
                         "against_n": resid_n, "against_n_plus_1": resid_n1}
    meta["spectrum"] = {
        "bound_energies": list(srep.bound_energies),
        "sweep_count": srep.method_agreement.sweep,
        "methods_equal": srep.method_agreement.equal,
        "critical_plus": coin_p,
        "critical_minus": coin_m,
        "edge_bound_plus": srep.metadata["edge_bound_plus"],
        "edge_bound_minus": srep.metadata["edge_bound_minus"],
        "jump_convention": srep.metadata["jump_convention"],
    }
    return LevinsonReport(
        j=j, lhs=lhs, n_j=n_j, half_bound=half, correction=correction,
        tail_offset=tail_offset, residual=residual,
        classification=classification, metadata=meta)


def symmetry_map(report: LevinsonReport) -> LevinsonReport:
    """Relabel a (j, coupling) report as the (-j, -coupling) one.

    Swapping the two radial components maps solutions at (j, E) onto
    (-j, -E): the gap-edge phases trade places, so their sum, the count,
    and the residual survive unchanged, while a half-bound flag moves to
    the opposite edge. Applying the map twice is the identity.
    """
    from .spectrum import HalfBound

    swapped = {HalfBound.AT_PLUS_M: HalfBound.AT_MINUS_M,
               HalfBound.AT_MINUS_M: HalfBound.AT_PLUS_M}.get(
                   report.half_bound, HalfBound.NONE)
    j_new = -report.j
    corr = _correction(j_new, swapped)
    meta = dict(report.metadata)
    # Toggled, not stamped, so a second application restores the original.
    if not meta.pop("mapped", False):
        meta["mapped"] = True
    eta = meta.get("eta")
    if eta is not None:
        meta["eta"] = {"plus": eta["minus"], "minus": eta["plus"]}
    sp = meta.get("spectrum")
    if sp is not None:
        sp = dict(sp)
        sp["bound_energies"] = sorted(-e for e in sp["bound_energies"])
        sp["critical_plus"], sp["critical_minus"] = (
            sp["critical_minus"], sp["critical_plus"])
        sp["edge_bound_plus"], sp["edge_bound_minus"] = (
            sp["edge_bound_minus"], sp["edge_bound_plus"])
        meta["spectrum"] = sp
    residual = report.lhs - (report.n_j + corr) * math.pi - report.tail_offset
    return LevinsonReport(
        j=j_new, lhs=report.lhs, n_j=report.n_j, half_bound=swapped,
        correction=corr, tail_offset=report.tail_offset, residual=residual,
        classification=report.classification, metadata=meta)
