"""Cylinder-function kernels used by the radial matching formulas.

Thin, contract-enforcing wrappers over scipy.special. Orders here are
real and non-negative (half-integers j -+ 1/2 and the tail exponents);
arguments are positive reals. Derivatives use the standard three-term
recurrences so they stay consistent with the values returned by the
wrappers themselves.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import DomainError

__all__ = [
    "bessel_j",
    "bessel_n",
    "mod_bessel_i",
    "mod_bessel_k",
    "log_scaled_ik",
    "bessel_j_prime",
    "bessel_n_prime",
    "mod_bessel_i_prime",
    "mod_bessel_k_prime",
    "half_integer_factorial",
]


def _check_args(nu: float, x, allow_zero: bool = False) -> None:
    if nu < 0:
        raise DomainError(f"order must be >= 0, got nu={nu}")
    arr = np.asarray(x)
    bad = np.any(arr < 0) if allow_zero else np.any(arr <= 0)
    if bad:
        raise DomainError(f"argument out of range, got x={x}")


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu(x), x >= 0, nu >= 0."""
    _check_args(nu, x, allow_zero=True)
    return _sp.jv(nu, x)


def bessel_n(nu: float, x):
    """Bessel function of the second kind N_nu(x) (a.k.a. Y_nu), x > 0."""
    _check_args(nu, x)
    return _sp.yv(nu, x)


def mod_bessel_i(nu: float, x):
    """Modified Bessel function I_nu(x), x >= 0; raises on overflow (use log_scaled_ik)."""
    _check_args(nu, x, allow_zero=True)
    out = _sp.iv(nu, x)
    if np.any(np.isinf(out)):
        raise OverflowError(
            f"I_{nu}({x}) overflows double precision; use log_scaled_ik"
        )
    return out


def mod_bessel_k(nu: float, x):
    """Modified Bessel function K_nu(x), exponentially decaying branch."""
    _check_args(nu, x)
    out = _sp.kv(nu, x)
    if np.any(np.isinf(out)):
        raise OverflowError(
            f"K_{nu}({x}) overflows double precision; use log_scaled_ik"
        )
    return out


def log_scaled_ik(nu: float, x):
    """Return (log I_nu(x), log K_nu(x)) without overflow at large x.

    Uses the exponentially scaled kernels, so the result is finite for any
    x representable in double precision (I grows like e^x, K decays like
    e^-x; only the logs are formed).
    """
    _check_args(nu, x)
    log_i = np.log(_sp.ive(nu, x)) + x
    log_k = np.log(_sp.kve(nu, x)) - x
    return log_i, log_k


def bessel_j_prime(nu: float, x):
    """dJ_nu/dx via the downward recurrence J'_nu = J_{nu-1} - (nu/x) J_nu."""
    _check_args(nu, x)
    return _sp.jv(nu - 1.0, x) - (nu / x) * _sp.jv(nu, x)


def bessel_n_prime(nu: float, x):
    """dN_nu/dx via N'_nu = N_{nu-1} - (nu/x) N_nu."""
    _check_args(nu, x)
    return _sp.yv(nu - 1.0, x) - (nu / x) * _sp.yv(nu, x)


def mod_bessel_i_prime(nu: float, x):
    """dI_nu/dx via I'_nu = I_{nu-1} - (nu/x) I_nu."""
    _check_args(nu, x)
    return _sp.iv(nu - 1.0, x) - (nu / x) * _sp.iv(nu, x)


def mod_bessel_k_prime(nu: float, x):
    """dK_nu/dx via K'_nu = -K_{nu-1} - (nu/x) K_nu."""
    _check_args(nu, x)
    return -_sp.kv(nu - 1.0, x) - (nu / x) * _sp.kv(nu, x)


def half_integer_factorial(m: float) -> float:
    """m! = Gamma(m + 1) for m on the non-negative half-integer lattice."""
    two_m = 2.0 * m
    if abs(two_m - round(two_m)) > 1e-9 or m < 0:
        raise DomainError(f"expected a non-negative half-integer, got {m}")
    return math.gamma(round(two_m) / 2.0 + 1.0)
