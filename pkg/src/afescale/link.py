"""Link-level trade-offs: uncoded square QAM and error control coding.

Every power scaling here is an *at least* result: the true front-end power
can drop by at least the returned factor. ``mu`` is the tuning range of the
front end (``math.inf`` for an unlimited one).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable

from afescale.errors import DomainError
from afescale.numerics import db_to_linear, q_inverse

__all__ = [
    "QamConfig",
    "CodedSystem",
    "TuningRange",
    "CodedRow",
    "is_square_qam",
    "required_sndr_qam",
    "sndr_scaling_qam",
    "achievable_power_scaling",
    "power_scaling_qam",
    "power_scaling_constellation",
    "power_scaling_ser_orders",
    "power_scaling_ser_intermediate",
    "SER_BOUND_CONSTANT",
    "savings_percent",
    "energy_efficiency",
    "qam_efficiency_ratio",
    "coding_sndr_scaling",
    "coding_power_scaling",
    "coded_receiver_report",
    "coded_afe_efficiency_gain",
    "load_coded_systems",
]

# From Q(x) <= exp(-x^2/2) with p = Pe/4: x^2 <= 2 ln 4 (1 - log_4(10) log10 Pe).
SER_BOUND_CONSTANT = math.log(10.0) / math.log(4.0)


def is_square_qam(m: int) -> bool:
    if m < 4 or m & (m - 1):
        return False
    return (m.bit_length() - 1) % 2 == 0


def _check_m(m: int) -> None:
    if not (isinstance(m, int) and is_square_qam(m)):
        raise DomainError(f"M = {m!r} is not a square QAM size (4, 16, 64, ...)")


def _check_mu(mu: float) -> None:
    if not mu >= 1:
        raise DomainError(f"tuning range mu must be >= 1, got {mu!r}")


@dataclass(frozen=True)
class QamConfig:
    """Square M-QAM at symbol error probability ``p_e``; ``rho`` in bit/s/Hz."""

    m: int
    p_e: float
    rho: float = 1.0

    def __post_init__(self):
        _check_m(self.m)
        if not 0 < self.p_e < 1:
            raise DomainError(f"symbol error probability must be in (0, 1), got {self.p_e!r}")
        if not self.rho > 0:
            raise DomainError(f"spectral efficiency must be > 0, got {self.rho!r}")

    @property
    def bits_per_symbol(self) -> int:
        return self.m.bit_length() - 1


@dataclass(frozen=True)
class CodedSystem:
    """A channel code with its decoder; ``g_c`` is linear."""

    label: str
    r_c: float
    g_c: float
    decoder_power: float = 0.0
    info_bitrate: float | None = None

    def __post_init__(self):
        if not 0 < self.r_c <= 1:
            raise DomainError(f"coding rate must be in (0, 1], got {self.r_c!r}")
        if not self.g_c > 0:
            raise DomainError(f"coding gain must be > 0, got {self.g_c!r}")
        if not self.decoder_power >= 0:
            raise DomainError(f"decoder power must be >= 0, got {self.decoder_power!r}")

    @classmethod
    def from_db(cls, label: str, r_c: float, g_c_db: float, decoder_power: float = 0.0,
                info_bitrate: float | None = None) -> "CodedSystem":
        return cls(label, r_c, db_to_linear(g_c_db), decoder_power, info_bitrate)


@dataclass(frozen=True)
class TuningRange:
    mu: float = math.inf

    def __post_init__(self):
        _check_mu(self.mu)

    @property
    def floor(self) -> float:
        """Smallest power scaling reachable, mu**-1.5."""
        return self.mu**-1.5


def _mu_value(mu: float | TuningRange) -> float:
    value = mu.mu if isinstance(mu, TuningRange) else float(mu)
    _check_mu(value)
    return value


def required_sndr_qam(cfg: QamConfig) -> float:
    """SNDR at which the square-QAM SER upper bound equals ``cfg.p_e``.

    Assumes IM3 is small next to thermal noise so the matched filter is
    optimal.
    """
    m = cfg.m
    return cfg.rho * (m - 1) / (3.0 * math.log2(m)) * q_inverse(cfg.p_e / 4.0) ** 2


def sndr_scaling_qam(pre: QamConfig, post: QamConfig) -> float:
    """Ratio of required SNDRs at equal bandwidth (the log2 M terms cancel)."""
    q_ratio = q_inverse(post.p_e / 4.0) / q_inverse(pre.p_e / 4.0)
    return (post.m - 1) / (pre.m - 1) * q_ratio**2


def achievable_power_scaling(sigma_sndr: float, mu: float | TuningRange = math.inf) -> float:
    """max(sigma**1.5, mu**-1.5): SNDR relaxation capped by the tuning range."""
    if not sigma_sndr > 0:
        raise DomainError(f"SNDR scaling must be > 0, got {sigma_sndr!r}")
    return max(sigma_sndr**1.5, _mu_value(mu) ** -1.5)


def power_scaling_qam(pre: QamConfig, post: QamConfig, mu: float | TuningRange = math.inf) -> float:
    return achievable_power_scaling(sndr_scaling_qam(pre, post), mu)


def power_scaling_constellation(delta_b: int) -> float:
    """Scaling for dropping ``delta_b`` bits/symbol at fixed SER, 2**(-1.5*delta_b)."""
    if delta_b < 0 or delta_b % 2:
        raise DomainError(f"bits/symbol reduction must be a non-negative even number, got {delta_b!r}")
    return 2.0 ** (-1.5 * delta_b)


def _check_omegas(omega1: float, omega2: float) -> None:
    if not (omega1 < 0 and omega2 < 0):
        raise DomainError(f"SER orders of magnitude must be negative, got {omega1!r}, {omega2!r}")
    if omega2 < omega1:
        raise DomainError(f"omega2 = {omega2!r} is a stricter SER than omega1 = {omega1!r}")


def power_scaling_ser_orders(omega1: float, omega2: float) -> float:
    """(omega2/omega1)**1.5 with omega = log10(SER)."""
    _check_omegas(omega1, omega2)
    return (omega2 / omega1) ** 1.5


def power_scaling_ser_intermediate(omega1: float, omega2: float, constant: float = 1.66) -> float:
    """The exponential-bound step before the large-|omega| limit.

    ``constant`` defaults to the rounded 1.66; pass SER_BOUND_CONSTANT for
    the unrounded log_4(10).
    """
    _check_omegas(omega1, omega2)
    return ((1.0 - constant * omega2) / (1.0 - constant * omega1)) ** 1.5


def savings_percent(sigma_p: float) -> float:
    if not sigma_p > 0:
        raise DomainError(f"power scaling must be > 0, got {sigma_p!r}")
    return 100.0 * (1.0 - sigma_p)


def energy_efficiency(bitrate: float, power: float) -> float:
    """Bits per joule."""
    if not (bitrate > 0 and power > 0):
        raise DomainError(f"bitrate and power must be > 0, got {bitrate!r}, {power!r}")
    return bitrate / power


def qam_efficiency_ratio(m1: int, m2: int) -> float:
    """Lower bound on eta2/eta1 when shrinking M1 to M2 at fixed SER."""
    _check_m(m1)
    _check_m(m2)
    if m2 > m1:
        raise DomainError(f"expected M2 <= M1, got M1={m1}, M2={m2}")
    return ((m1 - 1) / (m2 - 1)) ** 1.5 * math.log2(m2) / math.log2(m1)


def coding_sndr_scaling(code: CodedSystem) -> float:
    return code.r_c / code.g_c


def coding_power_scaling(code: CodedSystem, mu: float | TuningRange = math.inf) -> float:
    return achievable_power_scaling(coding_sndr_scaling(code), mu)


def coded_afe_efficiency_gain(code: CodedSystem, sigma_p: float) -> float:
    """AFE-only energy-efficiency ratio coded/uncoded, r_c / sigma_p."""
    if not sigma_p > 0:
        raise DomainError(f"power scaling must be > 0, got {sigma_p!r}")
    return code.r_c / sigma_p


@dataclass(frozen=True)
class CodedRow:
    label: str
    r_c: float | None
    g_c_db: float | None
    bitrate: float
    afe_power: float
    decoder_power: float

    @property
    def total_power(self) -> float:
        return self.afe_power + self.decoder_power

    @property
    def efficiency(self) -> float:
        return energy_efficiency(self.bitrate, self.total_power)


def coded_receiver_report(
    uncoded_afe_power: float,
    systems: Iterable[CodedSystem],
    mu: float | TuningRange = math.inf,
    uncoded_bitrate: float | None = None,
) -> list[CodedRow]:
    """Receiver totals (AFE + decoder) for an uncoded reference and coded variants.

    The first row is always the uncoded reference. A code without an
    explicit bitrate runs at ``r_c * uncoded_bitrate``.
    """
    if not uncoded_afe_power > 0:
        raise DomainError(f"uncoded AFE power must be > 0, got {uncoded_afe_power!r}")
    systems = list(systems)
    if uncoded_bitrate is None:
        known = [s for s in systems if s.info_bitrate is not None]
        if not known:
            raise DomainError("uncoded bitrate unknown: pass uncoded_bitrate or give codes a bitrate")
        uncoded_bitrate = known[0].info_bitrate / known[0].r_c
    rows = [CodedRow("uncoded", None, None, uncoded_bitrate, uncoded_afe_power, 0.0)]
    for code in systems:
        bitrate = code.info_bitrate if code.info_bitrate is not None else code.r_c * uncoded_bitrate
        rows.append(
            CodedRow(
                code.label,
                code.r_c,
                10.0 * math.log10(code.g_c),
                bitrate,
                uncoded_afe_power * coding_power_scaling(code, mu),
                code.decoder_power,
            )
        )
    return rows


def load_coded_systems(path: str | Path | None = None) -> tuple[float, list[CodedSystem]]:
    """Read a code table CSV; returns (uncoded bitrate, coded systems).

    Columns: label, r_c, g_c_db, decoder_mw, bitrate_mbps. The row labelled
    ``uncoded`` supplies the reference bitrate. Without ``path`` the bundled
    example table is used.
    """
    if path is None:
        text = (resources.files("afescale") / "data" / "coded_systems.csv").read_text()
    else:
        text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    uncoded_bitrate = None
    systems = []
    for row in csv.DictReader(lines):
        bitrate = float(row["bitrate_mbps"]) * 1e6
        if row["label"].strip() == "uncoded":
            uncoded_bitrate = bitrate
            continue
        systems.append(
            CodedSystem.from_db(
                row["label"].strip(),
                float(Fraction(row["r_c"].strip())),
                float(row["g_c_db"]),
                float(row["decoder_mw"]) * 1e-3,
                bitrate,
            )
        )
    if uncoded_bitrate is None:
        raise DomainError("code table has no 'uncoded' row")
    return uncoded_bitrate, systems
