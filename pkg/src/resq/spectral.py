"""Reservoir spectral functions and principal-value integrals.

All reservoir coupling functions belong to the isotropic family whose
squared modulus integrates over angles to ``w * r**(2p) * exp(-2*r**m)``.
Everything the rate formulas need from a coupling function enters through
four scalar quantities evaluated here: the thermal spectral weight
``sigma`` (and its emission/absorption parts ``sigma_pm``), the static
reservoir integral ``pv_r``, the on-shell angular weight ``r_prime`` and
the principal-value Lamb-shift integral ``pv_rg``.

Units: hbar = k_B = 1, energies dimensionless, ``beta`` in inverse energy.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureError

DEFAULT_QUAD_RTOL = 1e-10

# coth(y) = 1/y + y/3 - y^3/45 + O(y^5); the cubic term at |y|=1e-3 is
# ~2e-11, so switching to the series there keeps full double precision.
_COTH_SERIES_CUTOFF = 1e-3


def quad_rtol() -> float:
    """Relative quadrature tolerance, overridable via RESQ_QUAD_TOL."""
    raw = os.environ.get("RESQ_QUAD_TOL")
    if raw is None:
        return DEFAULT_QUAD_RTOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise DomainError(f"RESQ_QUAD_TOL is not a number: {raw!r}") from exc
    if not 0.0 < tol < 1.0:
        raise DomainError(f"RESQ_QUAD_TOL out of range (0, 1): {tol}")
    return tol


@dataclass(frozen=True)
class FormFactor:
    """Radial power-law times exponential-decay coupling function.

    ``power`` is the radial exponent p with p + 1/2 a nonnegative integer,
    ``decay`` the exponent m in exp(-r**m) with m in {1, 2}, and
    ``angular_weight`` the angular L2 weight w >= 0.
    """

    power: float
    decay: int
    angular_weight: float

    def __post_init__(self):
        n = self.power + 0.5
        if abs(n - round(n)) > 1e-12 or n < -1e-12:
            raise DomainError(
                f"form factor power must be -1/2 + n with integer n >= 0, got {self.power}"
            )
        if self.decay not in (1, 2):
            raise DomainError(f"form factor decay exponent must be 1 or 2, got {self.decay}")
        if not self.angular_weight >= 0.0:
            raise DomainError(f"angular weight must be nonnegative, got {self.angular_weight}")

    def angular_l2(self, r: float) -> float:
        """Angular integral of |h(r, .)|^2 at radius r > 0."""
        return self.angular_weight * r ** (2.0 * self.power) * math.exp(-2.0 * r**self.decay)


@dataclass(frozen=True)
class SpectralValue:
    """A spectral quantity together with its evaluation-error estimate."""

    value: float
    est_error: float = 0.0

    def __post_init__(self):
        if not self.est_error >= 0.0:
            raise DomainError(f"est_error must be nonnegative, got {self.est_error}")

    def __float__(self) -> float:
        return self.value


def _coth(y: float) -> float:
    if abs(y) < _COTH_SERIES_CUTOFF:
        return 1.0 / y + y / 3.0 - y**3 / 45.0
    return math.cosh(y) / math.sinh(y)


def _closed_form_error(value: float) -> float:
    # closed-form evaluations: a handful of ulps
    return 8.0 * np.finfo(float).eps * abs(value)


def sigma(h: FormFactor, x: float, beta: float) -> SpectralValue:
    """Thermal spectral weight 4*pi*x^2*coth(beta*x) * (angular L2 of h at 2x).

    At x = 0 the analytic limit is returned: it is 2*pi*w/beta for the
    marginal power p = -1/2 and zero for every steeper power.
    """
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    if x < 0.0:
        raise DomainError(f"energy argument must be nonnegative, got {x}")
    if x == 0.0:
        if h.power == -0.5:
            value = 2.0 * math.pi * h.angular_weight / beta
        else:
            value = 0.0
        return SpectralValue(value, _closed_form_error(value))
    value = 4.0 * math.pi * x * x * _coth(beta * x) * h.angular_l2(2.0 * x)
    return SpectralValue(value, _closed_form_error(value))


def sigma_pm(h: FormFactor, x: float, beta: float, sign: int) -> SpectralValue:
    """Emission (+) / absorption (-) part 2*pi*x^2*e^{s*beta*x}/sinh(beta*x) * angular L2.

    Only defined for x > 0; the two parts individually diverge at x = 0.
    """
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    if x <= 0.0:
        raise DomainError(f"sigma_pm requires x > 0, got {x}")
    if sign not in (+1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    # e^{+bx}/sinh(bx) = 2/(1 - e^{-2bx}),  e^{-bx}/sinh(bx) = 2 e^{-2bx}/(1 - e^{-2bx})
    denom = -math.expm1(-2.0 * beta * x)
    if sign > 0:
        thermal = 2.0 / denom
    else:
        thermal = 2.0 * math.exp(-2.0 * beta * x) / denom
    value = 2.0 * math.pi * x * x * thermal * h.angular_l2(2.0 * x)
    return SpectralValue(value, _closed_form_error(value))


def _radial_cutoff(m: int) -> float:
    # exp(-2 U^m) below ~1e-23 makes the dropped tail < 1e-14 relative
    return 26.0 ** (1.0 / m) + 2.0


def _quad(fn, a: float, b: float, rtol: float):
    if b <= a:
        return 0.0, 0.0
    value, abserr, info, *rest = integrate.quad(
        fn, a, b, epsabs=0.0, epsrel=rtol, limit=200, full_output=1
    )
    if rest:
        raise QuadratureError(
            f"quadrature failed on [{a}, {b}]: {rest[0]}", value=value, residual=abserr
        )
    return value, abserr


@lru_cache(maxsize=1024)
def _pv_r_cached(h: FormFactor, rtol: float) -> SpectralValue:
    u = _radial_cutoff(h.decay)
    w = h.angular_weight
    if w == 0.0:
        return SpectralValue(0.0, 0.0)

    def integrand(r):
        return r * h.angular_l2(r)

    value, err = _quad(integrand, 0.0, u, rtol)
    return SpectralValue(value, err)


def pv_r(f: FormFactor) -> SpectralValue:
    """Static reservoir integral of |f|^2 / |k| over momentum space.

    For this coupling family the integrand has no pole, so the principal
    value reduces to the ordinary radial integral
    ``w * int_0^inf r^(2p+1) exp(-2 r^m) dr``.
    """
    return _pv_r_cached(f, quad_rtol())


def r_prime(g: FormFactor, B: float) -> SpectralValue:
    """On-shell angular weight 4*pi*B^2 * (angular L2 of g at 2B)."""
    if B <= 0.0:
        raise DomainError(f"r_prime requires B > 0, got {B}")
    value = 4.0 * math.pi * B * B * g.angular_l2(2.0 * B)
    return SpectralValue(value, _closed_form_error(value))


def _pv_phi(g: FormFactor, beta: float, u: float) -> float:
    """Smooth part of the Lamb-shift integrand, (1/2) u^2 |g|^2_ang coth(beta|u|/2)."""
    au = abs(u)
    if au == 0.0:
        # u^2 |u|^(2p) coth(beta|u|/2) -> (2/beta)|u|^(2p+1); finite only for p = -1/2
        if g.power == -0.5:
            return g.angular_weight / beta
        return 0.0
    return 0.5 * u * u * g.angular_l2(au) * _coth(0.5 * beta * au)


@lru_cache(maxsize=1024)
def _pv_rg_cached(g: FormFactor, x: float, beta: float, rtol: float) -> SpectralValue:
    if g.angular_weight == 0.0:
        return SpectralValue(0.0, 0.0)
    pole = 2.0 * x
    u_m = _radial_cutoff(g.decay)
    dom = u_m + pole
    half = min(x, u_m)
    phi0 = _pv_phi(g, beta, pole)

    # derivative scale for guarding the 0/0 form right at the pole
    h_fd = 1e-6 * max(1.0, pole)
    dphi0 = (_pv_phi(g, beta, pole + h_fd) - _pv_phi(g, beta, pole - h_fd)) / (2.0 * h_fd)
    guard = 1e-9 * max(1.0, pole)

    def subtracted(u):
        d = u - pole
        if abs(d) < guard:
            return dphi0
        return (_pv_phi(g, beta, u) - phi0) / d

    # pole subtraction over the whole truncated domain; the subtracted
    # constant reinstated through the exact log of the asymmetric tail ratio
    pieces = [(-dom, 0.0), (0.0, pole - half), (pole - half, pole + half), (pole + half, dom)]
    value = 0.0
    err = 0.0
    for a, b in pieces:
        v, e = _quad(subtracted, a, b, rtol)
        value += v
        err += e
    log_term = phi0 * math.log((dom - pole) / (dom + pole))
    value += log_term
    err += abs(log_term) * 4.0 * np.finfo(float).eps
    return SpectralValue(value, err)


def pv_rg(g: FormFactor, x: float, beta: float) -> SpectralValue:
    """Principal-value Lamb-shift integral with the pole at u = 2x.

    Computes ``(1/2) P.V. int_R u^2 |g|^2_ang coth(beta|u|/2) / (u - 2x) du``
    by subtracting the integrand value at the pole (the principal value of
    the subtracted constant over the truncated symmetric domain is an exact
    logarithm) and integrating the remaining smooth function adaptively.
    """
    if beta <= 0.0:
        raise DomainError(f"beta must be positive, got {beta}")
    if x <= 0.0:
        raise DomainError(f"pv_rg requires x > 0, got {x}")
    return _pv_rg_cached(g, x, beta, quad_rtol())
