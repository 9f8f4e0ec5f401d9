"""Power scaling between a pre-scaling and a post-scaling scenario.

The general formula handles any pair of scenarios; the four single-parameter
laws (bandwidth, SNDR, wanted signal, interference) are closed forms of it
with their validity ranges enforced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal

from afescale.afe import (
    ChainFoM,
    FrontEndDesign,
    Scenario,
    optimal_power_system_form,
    scenario_to_design,
)
from afescale.errors import DomainError, InfeasibleDesignError, ValidityError
from afescale.numerics import DEFAULT_CONSTANTS, PhysicalConstants

__all__ = [
    "Law",
    "LAWS",
    "LAW_SLOPES",
    "ScenarioPair",
    "ScalingReport",
    "phi_factor",
    "delta_factor",
    "power_scaling_general",
    "phi_for_bw_or_sndr",
    "phi_for_signal",
    "law_bandwidth",
    "law_sndr",
    "law_signal",
    "law_interference",
    "law_value",
    "ideal_law_value",
    "validity_constraint",
    "derive_post_design",
    "scaled_scenario",
]

Law = Literal["bandwidth", "sndr", "signal", "interference"]
LAWS: tuple[Law, ...] = ("bandwidth", "sndr", "signal", "interference")
LAW_SLOPES: dict[str, float] = {"bandwidth": 1.0, "sndr": 1.5, "signal": -1.5, "interference": 1.5}


@dataclass(frozen=True)
class ScenarioPair:
    pre: Scenario
    post: Scenario


@dataclass(frozen=True)
class ScalingReport:
    sigma_b: float
    sigma_sndr: float
    sigma_s: float
    sigma_i: float
    sigma_p: float
    phi: float
    delta_factor: float
    power_pre: float
    power_post: float
    valid: dict[str, bool] = field(default_factory=dict)

    @property
    def sigma_p_db(self) -> float:
        return 10.0 * math.log10(self.sigma_p)


def phi_factor(f1: float, f2: float) -> float:
    """Noise-factor correction (F2/F1) * (F1-1)/(F2-1)."""
    if not (f1 > 1 and f2 > 1):
        raise InfeasibleDesignError(f"noise factors must exceed 1, got F1={f1!r}, F2={f2!r}")
    return (f2 / f1) * (f1 - 1.0) / (f2 - 1.0)


def delta_factor(alpha1: float, alpha2: float) -> float:
    """Correction for unequal IM3-to-noise ratios; exactly 1 when they match."""
    if alpha1 == alpha2:
        return 1.0
    return math.sqrt(alpha1 / alpha2) * ((1.0 + alpha2) / (1.0 + alpha1)) ** 1.5


def power_scaling_general(
    pair: ScenarioPair,
    chain: ChainFoM,
    constants: PhysicalConstants = DEFAULT_CONSTANTS,
) -> ScalingReport:
    """Optimal-power ratio for an arbitrary scenario pair.

    The product form is cross-checked against the ratio of the two absolute
    optimal powers; a mismatch beyond 1e-12 relative means a bug, not a
    user error, so it raises AssertionError.
    """
    pre, post = pair.pre, pair.post
    d1 = scenario_to_design(pre, constants)
    d2 = scenario_to_design(post, constants)

    s_b = post.bandwidth_b / pre.bandwidth_b
    s_sndr = post.sndr / pre.sndr
    s_s = post.p_s / pre.p_s
    s_i = post.p_i / pre.p_i
    phi = phi_factor(d1.f_afe, d2.f_afe)
    delta = delta_factor(pre.alpha_im3, post.alpha_im3)
    sigma_p = phi * delta * s_b * s_sndr**1.5 * s_i**1.5 * s_s**-1.5

    p1 = optimal_power_system_form(d1, pre.p_i, chain)
    p2 = optimal_power_system_form(d2, post.p_i, chain)
    if not math.isclose(sigma_p, p2 / p1, rel_tol=1e-12):
        raise AssertionError(f"product form {sigma_p!r} != power ratio {p2 / p1!r}")

    valid = {
        "F1 > 1": d1.f_afe > 1,
        "F2 > 1": d2.f_afe > 1,
        "phi > 0": phi > 0,
        "alpha_IM3 equal": pre.alpha_im3 == post.alpha_im3,
    }
    return ScalingReport(s_b, s_sndr, s_s, s_i, sigma_p, phi, delta, p1, p2, valid)


def _check_f1(f1: float) -> None:
    if not f1 > 1:
        raise InfeasibleDesignError(f"pre-scaling noise factor must exceed 1, got {f1!r}")


def phi_for_bw_or_sndr(f1: float, sigma: float) -> float:
    """phi when the noise factor is divided by ``sigma`` (bandwidth or SNDR law)."""
    _check_f1(f1)
    if not (0 < sigma < f1):
        raise ValidityError(f"sigma = {sigma!r} with F1 = {f1!r}", "0 < sigma < F1")
    return (f1 - 1.0) / (f1 - sigma)


def phi_for_signal(f1: float, sigma_s: float) -> float:
    """phi when the noise factor is multiplied by ``sigma_s`` (signal law)."""
    _check_f1(f1)
    if not sigma_s > 1.0 / f1:
        raise ValidityError(f"sigma_S = {sigma_s!r} with F1 = {f1!r}", "sigma_S > 1/F1")
    return (f1 - 1.0) / (f1 - 1.0 / sigma_s)


def law_bandwidth(sigma_b: float, f1: float) -> float:
    return phi_for_bw_or_sndr(f1, sigma_b) * sigma_b


def law_sndr(sigma_sndr: float, f1: float) -> float:
    return phi_for_bw_or_sndr(f1, sigma_sndr) * sigma_sndr**1.5


def law_signal(sigma_s: float, f1: float) -> float:
    return phi_for_signal(f1, sigma_s) * sigma_s**-1.5


def law_interference(sigma_i: float, f1: float | None = None) -> float:
    """Interference law; the noise factor is untouched so phi is exactly 1."""
    if not sigma_i > 0:
        raise ValidityError(f"sigma_I = {sigma_i!r}", "sigma_I > 0")
    return sigma_i**1.5


def validity_constraint(law: Law) -> str:
    if law not in LAW_SLOPES:
        raise DomainError(f"unknown law {law!r}; expected one of {LAWS}")
    return {
        "bandwidth": "0 < sigma_B < F1",
        "sndr": "0 < sigma_SNDR < F1",
        "signal": "sigma_S > 1/F1",
        "interference": "sigma_I > 0",
    }[law]


def law_value(law: Law, sigma: float, f1: float) -> float:
    """phi-corrected power scaling for one of the four laws."""
    fn = {
        "bandwidth": law_bandwidth,
        "sndr": law_sndr,
        "signal": law_signal,
        "interference": law_interference,
    }.get(law)
    if fn is None:
        raise DomainError(f"unknown law {law!r}; expected one of {LAWS}")
    return fn(sigma, f1)


def ideal_law_value(law: Law, sigma: float) -> float:
    """The law's pure power-law value (phi = 1), for comparison only."""
    if law not in LAW_SLOPES:
        raise DomainError(f"unknown law {law!r}; expected one of {LAWS}")
    return sigma ** LAW_SLOPES[law]


def derive_post_design(law: Law, sigma: float, pre: FrontEndDesign) -> FrontEndDesign:
    """Post-scaling design requirements for a single-parameter scaling."""
    if not sigma > 0:
        raise ValidityError(f"sigma = {sigma!r}", validity_constraint(law))
    root = math.sqrt(sigma)
    if law == "bandwidth":
        changes = dict(bandwidth_b=sigma * pre.bandwidth_b, f_afe=pre.f_afe / sigma)
    elif law == "sndr":
        changes = dict(
            p_n=pre.p_n / sigma,
            p_im3=pre.p_im3 / sigma,
            f_afe=pre.f_afe / sigma,
            v_iip3_sq=root * pre.v_iip3_sq,
            p_iip3=root * pre.p_iip3,
        )
    elif law == "signal":
        changes = dict(
            p_n=sigma * pre.p_n,
            p_im3=sigma * pre.p_im3,
            f_afe=sigma * pre.f_afe,
            v_iip3_sq=pre.v_iip3_sq / root,
            p_iip3=pre.p_iip3 / root,
        )
    elif law == "interference":
        changes = dict(v_iip3_sq=sigma**1.5 * pre.v_iip3_sq, p_iip3=sigma**1.5 * pre.p_iip3)
    else:
        raise DomainError(f"unknown law {law!r}; expected one of {LAWS}")
    return _replace_checked(pre, law, **changes)


def _replace_checked(pre: FrontEndDesign, law: Law, **changes) -> FrontEndDesign:
    if not changes.get("f_afe", pre.f_afe) > 1:
        raise InfeasibleDesignError(
            f"post-scaling noise factor {changes['f_afe']:.6g} <= 1 ({validity_constraint(law)})"
        )
    return replace(pre, **changes)


def scaled_scenario(law: Law, sigma: float, pre: Scenario) -> Scenario:
    """The post-scaling scenario implied by scaling one fundamental parameter."""
    attr = {"bandwidth": "bandwidth_b", "sndr": "sndr", "signal": "p_s", "interference": "p_i"}.get(law)
    if attr is None:
        raise DomainError(f"unknown law {law!r}; expected one of {LAWS}")
    return replace(pre, **{attr: getattr(pre, attr) * sigma})
