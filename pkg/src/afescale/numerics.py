"""Special functions and unit conversions used throughout the package.

All internal quantities are linear (watts, hertz, ratios); the dB helpers
here are meant for I/O boundaries only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from afescale.errors import DomainError

__all__ = [
    "PhysicalConstants",
    "DEFAULT_CONSTANTS",
    "db_to_linear",
    "linear_to_db",
    "dbm_to_watt",
    "watt_to_dbm",
    "q_function",
    "q_inverse",
    "upper_incomplete_gamma_half",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_PI = math.sqrt(math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class PhysicalConstants:
    """Boltzmann constant, reference temperature and receiver input resistance."""

    boltzmann_k: float = 1.380649e-23
    temperature: float = 290.0
    input_resistance: float = 50.0

    def __post_init__(self):
        for name in ("boltzmann_k", "temperature", "input_resistance"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def kt(self) -> float:
        """Thermal noise power spectral density k*T in W/Hz."""
        return self.boltzmann_k * self.temperature


DEFAULT_CONSTANTS = PhysicalConstants()


def db_to_linear(x: float) -> float:
    """Convert a power ratio in dB to linear: ``10**(x/10)``."""
    if not math.isfinite(x):
        raise DomainError(f"dB value must be finite, got {x!r}")
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a positive linear power ratio to dB."""
    if not x > 0:
        raise DomainError(f"linear ratio must be > 0, got {x!r}")
    return 10.0 * math.log10(x)


def dbm_to_watt(x: float) -> float:
    return db_to_linear(x) * 1e-3


def watt_to_dbm(p: float) -> float:
    return linear_to_db(p / 1e-3)


def q_function(x: float) -> float:
    """Upper-tail probability of a standard normal variable, Q(x)."""
    if math.isnan(x):
        raise DomainError("q_function argument is NaN")
    return 0.5 * math.erfc(x / _SQRT2)


def _gaussian_pdf(x: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def q_inverse(p: float) -> float:
    """Inverse of :func:`q_function` on (0, 1).

    Bisection down to a 1e-12 bracket, then two Newton steps on
    ``Q(x) - p``. Slow compared to rational approximations but robust over
    the whole range representable in double precision.
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"q_inverse requires 0 < p < 1, got {p!r}")
    if p == 0.5:
        return 0.0
    # Q is odd-symmetric about 1/2: Q(-x) = 1 - Q(x). Solve in the upper
    # tail where Q(x) is representable with full relative precision.
    if p > 0.5:
        return -q_inverse(1.0 - p)

    lo, hi = 0.0, 1.0
    while q_function(hi) > p:
        lo, hi = hi, 2.0 * hi
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if q_function(mid) > p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(2):
        pdf = _gaussian_pdf(x)
        if pdf == 0.0:
            break
        x += (q_function(x) - p) / pdf
    return x


def upper_incomplete_gamma_half(x: float) -> float:
    """Gamma(1/2, x) = integral from x to infinity of t**-0.5 * exp(-t) dt."""
    if not x >= 0:
        raise DomainError(f"upper_incomplete_gamma_half requires x >= 0, got {x!r}")
    return _SQRT_PI * math.erfc(math.sqrt(x))
