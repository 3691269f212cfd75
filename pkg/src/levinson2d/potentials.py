"""Radial potential models and the problem description they plug into.

A potential is a short-range core on (0, r0) plus an optional power tail
b / r^n for r >= r0. The coupling lambda scales the whole shape, so the
family V(r, lambda) = lambda * V(r) can be swept continuously from the
free problem at lambda = 0 to the target at lambda = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate as _integrate
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError, DomainError, OutOfValidatedRange

__all__ = [
    "PowerTail",
    "PotentialModel",
    "ProblemSpec",
    "IntegrabilityResult",
    "evaluate",
    "cutoff_view",
    "check_integrability",
    "negate_and_reflect",
]

# Validated-range guards: larger j or deeper cores are rejected, not attempted.
MAX_TWO_J = 41
MAX_STRENGTH_OVER_M = 100.0


@dataclass(frozen=True)
class PowerTail:
    """Long-range piece V(r) = b / r^n for r >= r0. Requires n >= 2.

    A finite r_stop truncates the tail to zero beyond that radius; the
    shape is then of sharp-cutoff class and threshold machinery treats it
    as such.
    """

    b: float
    n: float = 2.0
    r_stop: float = math.inf

    def __post_init__(self):
        if not (self.n >= 2.0):
            raise DomainError(f"tail power must satisfy n >= 2, got n={self.n}")
        if not math.isfinite(self.b):
            raise DomainError("tail strength b must be finite")
        if not (self.r_stop > 0.0):
            raise DomainError(f"tail stop radius must be positive, got {self.r_stop}")

    @property
    def truncated(self) -> bool:
        return math.isfinite(self.r_stop)

    def value(self, r: float) -> float:
        if r >= self.r_stop:
            return 0.0
        return self.b * r ** (-self.n)


@dataclass(frozen=True)
class PotentialModel:
    """Core shape on (0, r0) plus an optional power tail beyond r0.

    kinds:
      square_well      params = (V0,)
      piecewise_linear params = ((r_i, v_i), ...) nodes with 0 <= r_i <= r0
      sampled_table    params = ((r_i, v_i), ...) monotone-cubic interpolated
      custom           closure(r) -> V, library use only
    """

    kind: str
    r0: float
    params: tuple = ()
    tail: Optional[PowerTail] = None
    closure: Optional[Callable[[float], float]] = None
    closure_breakpoints: tuple = ()
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.r0 <= 0 or not math.isfinite(self.r0):
            raise DomainError(f"matching radius must be positive, got r0={self.r0}")
        if self.kind == "square_well":
            if len(self.params) != 1:
                raise ConfigError("square_well takes params=(V0,)")
        elif self.kind == "piecewise_linear":
            self._check_nodes()
        elif self.kind == "sampled_table":
            nodes = self._check_nodes()
            r, v = zip(*nodes)
            object.__setattr__(self, "_interp", PchipInterpolator(r, v, extrapolate=False))
        elif self.kind == "custom":
            if self.closure is None:
                raise ConfigError("custom potentials need a closure")
        else:
            raise ConfigError(f"unknown potential kind {self.kind!r}")

    def _check_nodes(self):
        nodes = tuple((float(r), float(v)) for r, v in self.params)
        if len(nodes) < 2:
            raise ConfigError(f"{self.kind} needs at least two (r, V) nodes")
        radii = [r for r, _ in nodes]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ConfigError(f"{self.kind} node radii must strictly increase")
        if radii[0] < 0 or radii[-1] > self.r0 * (1 + 1e-12):
            raise ConfigError(f"{self.kind} nodes must lie within [0, r0]")
        return nodes

    # -- constructors ------------------------------------------------------

    @staticmethod
    def square_well(V0: float, r0: float = 1.0, tail: Optional[PowerTail] = None) -> "PotentialModel":
        return PotentialModel(kind="square_well", r0=r0, params=(float(V0),), tail=tail)

    # -- evaluation --------------------------------------------------------

    def core_value(self, r: float) -> float:
        """Core shape at 0 < r < r0 (unit coupling)."""
        if self.kind == "square_well":
            return self.params[0]
        if self.kind == "piecewise_linear":
            return float(np.interp(r, [p[0] for p in self.params], [p[1] for p in self.params]))
        if self.kind == "sampled_table":
            nodes = self.params
            if r <= nodes[0][0]:
                return nodes[0][1]
            if r >= nodes[-1][0]:
                return nodes[-1][1]
            return float(self._interp(r))
        return float(self.closure(r))

    def value(self, r: float) -> float:
        """Full shape at unit coupling, tail included."""
        if r >= self.r0:
            return self.tail.value(r) if self.tail is not None else 0.0
        return self.core_value(r)

    def origin_value(self, r_probe: float = 1e-6) -> float:
        """V(0+) for the series start; averages near 0 when no finite limit exists."""
        if self.kind == "square_well":
            return self.params[0]
        if self.kind in ("piecewise_linear", "sampled_table"):
            return self.core_value(r_probe)
        lo, hi = r_probe * 1e-3, r_probe
        val, _ = _integrate.quad(self.closure, lo, hi, limit=200)
        return val / (hi - lo)

    def breakpoints_between(self, a: float, b: float) -> list[float]:
        """Radii in (a, b) where the shape loses smoothness; steps land on them."""
        pts = set()
        if self.kind in ("piecewise_linear", "sampled_table"):
            pts.update(r for r, _ in self.params)
        if self.kind == "custom":
            pts.update(self.closure_breakpoints)
        pts.add(self.r0)
        if self.tail is not None and self.tail.truncated:
            pts.add(self.tail.r_stop)
        return sorted(p for p in pts if a < p < b)

    def strength_bound(self) -> float:
        """Upper bound on |V| over (0, r0] plus the tail value at r0."""
        if self.kind == "square_well":
            core = abs(self.params[0])
        elif self.kind in ("piecewise_linear", "sampled_table"):
            # monotone cubic never overshoots its data
            core = max(abs(v) for _, v in self.params)
        else:
            rs = np.linspace(self.r0 * 1e-4, self.r0, 1000)
            core = max(abs(self.closure(float(r))) for r in rs)
        tail = abs(self.tail.value(self.r0)) if self.tail is not None else 0.0
        return max(core, tail)

    def negated(self) -> "PotentialModel":
        """The shape -V(r), used by the negative-j reflection."""
        tail = (PowerTail(-self.tail.b, self.tail.n, self.tail.r_stop)
                if self.tail is not None else None)
        if self.kind in ("square_well",):
            params = tuple(-p for p in self.params)
            return PotentialModel(self.kind, self.r0, params, tail)
        if self.kind in ("piecewise_linear", "sampled_table"):
            params = tuple((r, -v) for r, v in self.params)
            return PotentialModel(self.kind, self.r0, params, tail)
        f = self.closure
        return PotentialModel(
            "custom", self.r0, (), tail,
            closure=lambda r: -f(r), closure_breakpoints=self.closure_breakpoints,
        )

    def is_free(self) -> bool:
        return self.strength_bound() == 0.0


def evaluate(potential: PotentialModel, r: float, lam: float = 1.0) -> float:
    """V(r, lambda) = lambda * V(r); the only way coupling enters anywhere."""
    if r <= 0:
        raise DomainError(f"potential evaluated at r={r} <= 0")
    return lam * potential.value(r)


def cutoff_view(potential: PotentialModel) -> PotentialModel:
    """Re-describe a truncated-tail shape as a sharp cutoff at the stop radius.

    The shape V(r) is unchanged; only the bookkeeping radius moves, so
    machinery that assumes a free exterior can match at r_stop directly.
    Shapes without a truncated tail are returned as-is.
    """
    tail = potential.tail
    if tail is None or tail.b == 0.0 or not tail.truncated:
        return potential
    if tail.r_stop <= potential.r0:
        return PotentialModel(
            potential.kind, potential.r0, potential.params, None,
            closure=potential.closure,
            closure_breakpoints=potential.closure_breakpoints)
    pts = tuple(potential.breakpoints_between(0.0, tail.r_stop))
    return PotentialModel("custom", tail.r_stop, (), None,
                          closure=potential.value, closure_breakpoints=pts)


@dataclass(frozen=True)
class IntegrabilityResult:
    integrable: bool
    weighted_integrals: tuple
    growth_per_decade: float


def check_integrability(potential: PotentialModel) -> IntegrabilityResult:
    """Probe the r-weighted integral of |V| near the origin.

    Short-range machinery needs integral of r*|V(r)| dr to converge at 0.
    The integral over [eps, max(1, r0)] is evaluated at eps = 1e-4, 1e-6,
    1e-8; growth above 10% per decade of eps flags divergence.
    """
    upper = max(1.0, potential.r0)
    points = potential.breakpoints_between(0.0, upper)

    def wgt(r: float) -> float:
        return r * abs(potential.value(r))

    vals = []
    for eps in (1e-4, 1e-6, 1e-8):
        v, _ = _integrate.quad(wgt, eps, upper, points=points or None, limit=400)
        vals.append(v)
    growth = 1.0
    for lo, hi in zip(vals, vals[1:]):
        if lo > 0:
            growth = max(growth, (hi / lo) ** 0.5)  # each step spans two decades
        elif hi > 0:
            growth = math.inf
    return IntegrabilityResult(growth <= 1.1, tuple(vals), growth)


@dataclass(frozen=True)
class ProblemSpec:
    """One scattering problem: shape, half-integer angular quantum number, mass, coupling."""

    potential: PotentialModel
    j: float
    M: float = 1.0
    lam: float = 1.0

    def __post_init__(self):
        two_j = 2.0 * self.j
        if abs(two_j - round(two_j)) > 1e-9 or round(two_j) % 2 == 0:
            raise DomainError(f"j must be a half odd integer, got j={self.j}")
        if self.j == 0 or not math.isfinite(self.j):
            raise DomainError(f"j must be nonzero, got j={self.j}")
        if self.M <= 0 or not math.isfinite(self.M):
            raise DomainError(f"mass must be positive, got M={self.M}")
        if not (-1.0 <= self.lam <= 1.0):
            raise DomainError(f"coupling must lie in [-1, 1], got lambda={self.lam}")

    def validate_range(self) -> None:
        """Reject inputs outside the validated range (huge j, extreme depth)."""
        if round(abs(2.0 * self.j)) > MAX_TWO_J:
            raise OutOfValidatedRange(f"|j| = {abs(self.j)} exceeds {MAX_TWO_J}/2")
        bound = self.potential.strength_bound()
        if bound > MAX_STRENGTH_OVER_M * self.M:
            raise OutOfValidatedRange(
                f"potential strength {bound:.3g} exceeds {MAX_STRENGTH_OVER_M} * M"
            )


def negate_and_reflect(spec: ProblemSpec) -> ProblemSpec:
    """Map to the equivalent problem with j -> -j and lambda -> -lambda.

    Swapping the two radial components maps (j, E, lambda) solutions onto
    (-j, -E, -lambda) ones, which is how negative j is always handled.
    """
    return ProblemSpec(potential=spec.potential, j=-spec.j, M=spec.M, lam=-spec.lam)
