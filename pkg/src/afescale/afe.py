"""Front-end quantities and the closed-form optimal AFE power.

Conversions between circuit-level parameters (noise factor, IIP3 voltage)
and system-level parameters (noise, IM3 and IIP3 powers), plus the
minimum chain power expressed in both parameter sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from afescale.errors import DomainError, InfeasibleDesignError
from afescale.numerics import DEFAULT_CONSTANTS, PhysicalConstants

__all__ = [
    "BlockFoM",
    "ChainFoM",
    "Scenario",
    "FrontEndDesign",
    "dynamic_range",
    "block_power",
    "kappa_circuit",
    "optimal_power_circuit_form",
    "noise_power",
    "f_from_noise_power",
    "iip3_power_from_voltage",
    "iip3_voltage_from_power",
    "im3_from_iip3",
    "iip3_from_im3",
    "sndr",
    "required_noise_power",
    "scenario_to_design",
    "optimal_power_system_form",
    "optimal_power",
]


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class BlockFoM:
    """Power per unit dynamic range of one analog block."""

    name: str
    p_c: float

    def __post_init__(self):
        _require_positive(p_c=self.p_c)


@dataclass(frozen=True)
class ChainFoM:
    """Ordered chain of blocks; ``kappa_circuit`` is derived on construction."""

    blocks: tuple[BlockFoM, ...]
    kappa_circuit: float = field(init=False)

    def __post_init__(self):
        blocks = tuple(self.blocks)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "kappa_circuit", kappa_circuit(blocks))

    @classmethod
    def from_values(cls, p_c: Sequence[float], names: Sequence[str] | None = None) -> "ChainFoM":
        if names is None:
            names = [f"block{j + 1}" for j in range(len(p_c))]
        return cls(tuple(BlockFoM(n, float(p)) for n, p in zip(names, p_c)))

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class Scenario:
    """One application-environment case.

    sndr and alpha_im3 are linear ratios, bandwidth_b in Hz, p_s and p_i in
    W. ``p_i`` is the total power of both interfering tones.
    """

    sndr: float
    bandwidth_b: float
    p_s: float
    p_i: float
    alpha_im3: float

    def __post_init__(self):
        _require_positive(
            sndr=self.sndr,
            bandwidth_b=self.bandwidth_b,
            p_s=self.p_s,
            p_i=self.p_i,
            alpha_im3=self.alpha_im3,
        )


@dataclass(frozen=True)
class FrontEndDesign:
    """Front-end requirements derived from a scenario (all linear units)."""

    p_n: float
    p_im3: float
    p_iip3: float
    f_afe: float
    v_iip3_sq: float
    bandwidth_b: float
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        _require_positive(
            p_n=self.p_n,
            p_im3=self.p_im3,
            p_iip3=self.p_iip3,
            v_iip3_sq=self.v_iip3_sq,
            bandwidth_b=self.bandwidth_b,
        )
        if not self.f_afe > 1:
            raise InfeasibleDesignError(
                f"noise factor must exceed 1, got F_AFE = {self.f_afe!r}"
            )

    @property
    def alpha_im3(self) -> float:
        return self.p_im3 / self.p_n


def dynamic_range(v_iip3_sq: float, noise_psd: float) -> float:
    """IIP3 voltage squared over input-referred noise PSD."""
    _require_positive(v_iip3_sq=v_iip3_sq, noise_psd=noise_psd)
    return v_iip3_sq / noise_psd


def block_power(fom: BlockFoM, dr: float) -> float:
    """Power of a block whose consumption is linear in dynamic range."""
    _require_positive(dr=dr)
    return fom.p_c * dr


def kappa_circuit(blocks: Sequence[BlockFoM]) -> float:
    """Aggregate chain figure of merit, (sum of cube roots of p_c)**3."""
    if len(blocks) == 0:
        raise DomainError("kappa_circuit needs at least one block")
    return sum(b.p_c ** (1.0 / 3.0) for b in blocks) ** 3


def optimal_power_circuit_form(
    v_iip3_sq: float,
    f_afe: float,
    chain: ChainFoM,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> float:
    """Minimum chain power from the total IIP3 voltage and noise factor.

    Independent of the individual block gains.
    """
    _require_positive(v_iip3_sq=v_iip3_sq)
    if not f_afe > 1:
        raise InfeasibleDesignError(f"noise factor must exceed 1, got {f_afe!r}")
    denom = (f_afe - 1.0) * constants.kt * constants.input_resistance
    return v_iip3_sq / denom * chain.kappa_circuit


def noise_power(f_afe: float, bandwidth_b: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Input-referred thermal noise power k*T*B*F."""
    _require_positive(bandwidth_b=bandwidth_b)
    if not f_afe >= 1:
        raise DomainError(f"noise factor must be >= 1, got {f_afe!r}")
    return constants.kt * bandwidth_b * f_afe


def f_from_noise_power(p_n: float, bandwidth_b: float, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    _require_positive(p_n=p_n, bandwidth_b=bandwidth_b)
    return p_n / (constants.kt * bandwidth_b)


def iip3_power_from_voltage(v_iip3_sq: float, r_in: float = DEFAULT_CONSTANTS.input_resistance) -> float:
    _require_positive(v_iip3_sq=v_iip3_sq, r_in=r_in)
    return v_iip3_sq / r_in


def iip3_voltage_from_power(p_iip3: float, r_in: float = DEFAULT_CONSTANTS.input_resistance) -> float:
    _require_positive(p_iip3=p_iip3, r_in=r_in)
    return p_iip3 * r_in


def im3_from_iip3(p_iip3: float, p_i: float) -> float:
    """In-band IM3 power produced by a two-tone blocker of total power p_i."""
    _require_positive(p_iip3=p_iip3, p_i=p_i)
    return p_i**3 / p_iip3**2


def iip3_from_im3(p_im3: float, p_i: float) -> float:
    _require_positive(p_im3=p_im3, p_i=p_i)
    return math.sqrt(p_i**3 / p_im3)


def sndr(p_s: float, p_n: float, alpha_im3: float) -> float:
    """p_s / (p_n + p_im3) with p_im3 = alpha_im3 * p_n."""
    _require_positive(p_s=p_s, p_n=p_n)
    if not alpha_im3 >= 0:
        raise DomainError(f"alpha_im3 must be >= 0, got {alpha_im3!r}")
    return p_s / ((1.0 + alpha_im3) * p_n)


def required_noise_power(p_s: float, sndr_target: float, alpha_im3: float) -> float:
    """Noise power at which :func:`sndr` equals ``sndr_target``."""
    _require_positive(p_s=p_s, sndr_target=sndr_target)
    if not alpha_im3 >= 0:
        raise DomainError(f"alpha_im3 must be >= 0, got {alpha_im3!r}")
    return p_s / ((1.0 + alpha_im3) * sndr_target)


def scenario_to_design(s: Scenario, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> FrontEndDesign:
    """Translate a scenario into noise/IM3/IIP3 requirements.

    Raises InfeasibleDesignError when the scenario would need a front end
    quieter than the thermal floor (F <= 1).
    """
    p_n = required_noise_power(s.p_s, s.sndr, s.alpha_im3)
    p_im3 = s.alpha_im3 * p_n
    p_iip3 = iip3_from_im3(p_im3, s.p_i)
    f_afe = f_from_noise_power(p_n, s.bandwidth_b, constants)
    if not f_afe > 1:
        raise InfeasibleDesignError(
            f"scenario requires F_AFE = {f_afe:.6g} <= 1 (noise below the thermal floor)"
        )
    return FrontEndDesign(
        p_n=p_n,
        p_im3=p_im3,
        p_iip3=p_iip3,
        f_afe=f_afe,
        v_iip3_sq=iip3_voltage_from_power(p_iip3, constants.input_resistance),
        bandwidth_b=s.bandwidth_b,
        constants=constants,
    )


def _system_forms(design: FrontEndDesign, p_i: float, chain: ChainFoM) -> tuple[float, float]:
    f = design.f_afe
    pre = f / (f - 1.0) * design.bandwidth_b * chain.kappa_circuit
    via_im3 = pre * p_i**1.5 / (design.p_n * math.sqrt(design.p_im3))
    via_alpha = pre / math.sqrt(design.alpha_im3) * (p_i / design.p_n) ** 1.5
    return via_im3, via_alpha


def optimal_power_system_form(design: FrontEndDesign, p_i: float, chain: ChainFoM) -> float:
    """Minimum chain power in terms of noise, IM3 and blocker power.

    Both the IM3 form and the alpha form are evaluated; they must agree,
    otherwise ``design`` is internally inconsistent.
    """
    _require_positive(p_i=p_i)
    if not design.f_afe > 1:
        raise InfeasibleDesignError(f"noise factor must exceed 1, got {design.f_afe!r}")
    via_im3, via_alpha = _system_forms(design, p_i, chain)
    if not math.isclose(via_im3, via_alpha, rel_tol=1e-9):
        raise DomainError(
            f"inconsistent design: IM3 form {via_im3!r} != alpha form {via_alpha!r}"
        )
    return via_im3


def optimal_power(s: Scenario, chain: ChainFoM, constants: PhysicalConstants = DEFAULT_CONSTANTS) -> float:
    """Convenience: minimum AFE power for a scenario."""
    return optimal_power_system_form(scenario_to_design(s, constants), s.p_i, chain)
