"""Front ends that adapt to Rayleigh fading or to out-of-band blocker level.

Power figures are normalised to the non-adaptive worst-case design and are
upper bounds: an adaptive front end saves at least what is reported here.

Two different "delta" quantities exist in this domain. The alpha-ratio
correction of the scaling laws lives in :mod:`afescale.scaling` as
``delta_factor``; here ``delta_high`` is the probability that the blocker
is in the high-interference bin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from afescale.afe import im3_from_iip3
from afescale.errors import DomainError, OutOfModelError
from afescale.montecarlo import MonteCarloConfig, MonteCarloEstimate, run_monte_carlo
from afescale.numerics import upper_incomplete_gamma_half

__all__ = [
    "PolicyKind",
    "FadingModel",
    "AdaptationPolicy",
    "InterferenceModel",
    "phi_min_from_outage",
    "outage_from_phi_min",
    "worst_case_noise",
    "noise_tuning_rule",
    "instantaneous_power_ratio",
    "delivered_sndr",
    "expected_scaling_continuous",
    "expected_scaling_two_step",
    "expected_scaling_fading",
    "monte_carlo_fading",
    "im3_ceiling",
    "interference_threshold",
    "interference_policy",
    "interference_power_ratio",
    "expected_scaling_interference",
    "sensor_adjusted_power",
    "SensorComparison",
    "compare_with_baseline",
    "two_point_sampler",
    "uniform_within_bins_sampler",
    "monte_carlo_interference",
]

PolicyKind = Literal["fixed", "two-step", "continuous"]
POLICY_KINDS: tuple[PolicyKind, ...] = ("fixed", "two-step", "continuous")


def phi_min_from_outage(omega: float) -> float:
    """Fading threshold whose exponential-CDF mass equals the outage probability."""
    if not 0 < omega < 1:
        raise DomainError(f"outage probability must be in (0, 1), got {omega!r}")
    return -math.log1p(-omega)


def outage_from_phi_min(phi_min: float) -> float:
    if not phi_min > 0:
        raise DomainError(f"phi_min must be > 0, got {phi_min!r}")
    return -math.expm1(-phi_min)


@dataclass(frozen=True)
class FadingModel:
    """Rayleigh-faded link with received power beta * phi, phi ~ Exp(1)."""

    outage_omega: float
    sndr_min: float = 1.0
    beta: float = 1.0
    alpha_im3: float = 0.1
    phi_min: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "phi_min", phi_min_from_outage(self.outage_omega))
        if not (self.sndr_min > 0 and self.beta > 0 and self.alpha_im3 >= 0):
            raise DomainError("sndr_min and beta must be > 0 and alpha_im3 >= 0")

    @classmethod
    def from_phi_min(cls, phi_min: float, **kwargs) -> "FadingModel":
        return cls(outage_from_phi_min(phi_min), **kwargs)


@dataclass(frozen=True)
class AdaptationPolicy:
    kind: PolicyKind
    mu: float = 1.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise DomainError(f"unknown policy {self.kind!r}; expected one of {POLICY_KINDS}")
        if not self.mu >= 1:
            raise DomainError(f"tuning range mu must be >= 1, got {self.mu!r}")


@dataclass(frozen=True)
class InterferenceModel:
    p_i_wc: float
    delta_high: float
    mu: float

    def __post_init__(self):
        if not self.p_i_wc > 0:
            raise DomainError(f"worst-case blocker power must be > 0, got {self.p_i_wc!r}")
        if not 0 <= self.delta_high <= 1:
            raise DomainError(f"delta_high must be in [0, 1], got {self.delta_high!r}")
        if not self.mu >= 1:
            raise DomainError(f"tuning range mu must be >= 1, got {self.mu!r}")


def worst_case_noise(model: FadingModel) -> float:
    """Noise power that just meets SNDR_min at the outage threshold."""
    return model.beta * model.phi_min / ((1.0 + model.alpha_im3) * model.sndr_min)


def _check_phi(phi):
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0) or np.any(np.isnan(phi)):
        raise DomainError("fading power phi must be >= 0")
    return phi


def _unwrap(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def noise_tuning_rule(phi, model: FadingModel, policy: AdaptationPolicy):
    """Input-referred noise power the policy selects at fading level ``phi``."""
    phi = _check_phi(phi)
    p_min = worst_case_noise(model)
    top = policy.mu * model.phi_min
    if policy.kind == "fixed":
        out = np.full_like(phi, p_min)
    elif policy.kind == "two-step":
        out = np.where(phi <= top, p_min, policy.mu * p_min)
    else:
        tracking = model.beta * phi / ((1.0 + model.alpha_im3) * model.sndr_min)
        out = np.where(phi <= model.phi_min, p_min, np.where(phi <= top, tracking, policy.mu * p_min))
    return _unwrap(out)


def instantaneous_power_ratio(phi, model: FadingModel, policy: AdaptationPolicy):
    """Upper bound on P_AFE(phi) / P_AFE,wc for the given policy."""
    phi = _check_phi(phi)
    top = policy.mu * model.phi_min
    floor = policy.mu**-1.5
    if policy.kind == "fixed":
        out = np.ones_like(phi)
    elif policy.kind == "two-step":
        out = np.where(phi <= top, 1.0, floor)
    else:
        # Clip before the power so outage samples never evaluate 0**-1.5.
        ratio = np.maximum(phi, model.phi_min) / model.phi_min
        out = np.where(phi <= model.phi_min, 1.0, np.where(phi <= top, ratio**-1.5, floor))
    return _unwrap(out)


def delivered_sndr(phi, model: FadingModel, policy: AdaptationPolicy):
    phi = _check_phi(phi)
    p_n = np.asarray(noise_tuning_rule(phi, model, policy))
    with np.errstate(divide="ignore"):
        out = model.beta * phi / ((1.0 + model.alpha_im3) * p_n)
    return _unwrap(np.asarray(out))


def expected_scaling_continuous(model: FadingModel, mu: float) -> float:
    """Closed-form bound on mean normalised power under continuous tracking."""
    if not mu >= 1:
        raise DomainError(f"tuning range mu must be >= 1, got {mu!r}")
    pm = model.phi_min
    tracking = pm * math.exp(-pm) * (1.0 - mu**-0.5 * math.exp((1.0 - mu) * pm))
    gamma_diff = upper_incomplete_gamma_half(mu * pm) - upper_incomplete_gamma_half(pm)
    return (
        -math.expm1(-pm)
        + 2.0 * (tracking + pm**1.5 * gamma_diff)
        + mu**-1.5 * math.exp(-mu * pm)
    )


def expected_scaling_two_step(model: FadingModel, mu: float) -> float:
    if not mu >= 1:
        raise DomainError(f"tuning range mu must be >= 1, got {mu!r}")
    return 1.0 - (1.0 - mu**-1.5) * math.exp(-mu * model.phi_min)


def expected_scaling_fading(model: FadingModel, policy: AdaptationPolicy) -> float:
    if policy.kind == "fixed":
        return 1.0
    if policy.kind == "two-step":
        return expected_scaling_two_step(model, policy.mu)
    return expected_scaling_continuous(model, policy.mu)


def monte_carlo_fading(model: FadingModel, policy: AdaptationPolicy,
                       mc: MonteCarloConfig) -> MonteCarloEstimate:
    """Average of the instantaneous bound over phi ~ Exp(1), by inverse CDF."""

    def integrand(rng: np.random.Generator, n: int) -> np.ndarray:
        phi = -np.log1p(-rng.random(n))
        return instantaneous_power_ratio(phi, model, policy)

    return run_monte_carlo(integrand, mc, value_range=(0.0, 1.0))


def im3_ceiling(p_i_wc: float, p_iip3_wc: float) -> float:
    """IM3 power of the worst-case design at the worst-case blocker."""
    return im3_from_iip3(p_iip3_wc, p_i_wc)


def interference_threshold(model: InterferenceModel) -> float:
    """Blocker level at or below which the low-linearity front end suffices."""
    return model.p_i_wc / model.mu ** (1.0 / 3.0)


def interference_policy(p_i: float, model: InterferenceModel, p_iip3_wc: float) -> float:
    """IIP3 power selected by the two-step switching rule."""
    if not p_i > 0:
        raise DomainError(f"blocker power must be > 0, got {p_i!r}")
    if p_i > model.p_i_wc:
        raise OutOfModelError(
            f"blocker power {p_i!r} W exceeds the worst case {model.p_i_wc!r} W"
        )
    if p_i <= interference_threshold(model):
        selected = p_iip3_wc / math.sqrt(model.mu)
    else:
        selected = p_iip3_wc
    ceiling = im3_ceiling(model.p_i_wc, p_iip3_wc)
    assert im3_from_iip3(selected, p_i) <= ceiling * (1.0 + 1e-12), "IM3 ceiling violated"
    return selected


def interference_power_ratio(p_i, model: InterferenceModel):
    """1 in the high bin, 1/sqrt(mu) in the low bin (vectorised)."""
    p_i = np.asarray(p_i, dtype=float)
    if np.any(p_i > model.p_i_wc):
        raise OutOfModelError("blocker power exceeds the worst case")
    out = np.where(p_i <= interference_threshold(model), 1.0 / math.sqrt(model.mu), 1.0)
    return _unwrap(out)


def expected_scaling_interference(model: InterferenceModel) -> float:
    return model.delta_high + (1.0 - model.delta_high) / math.sqrt(model.mu)


def sensor_adjusted_power(avg_afe_power: float, sensor_power: float) -> float:
    if not (avg_afe_power >= 0 and sensor_power >= 0):
        raise DomainError("powers must be >= 0")
    return avg_afe_power + sensor_power


@dataclass(frozen=True)
class SensorComparison:
    baseline: float
    adaptive_afe: float
    sensor: float

    @property
    def total(self) -> float:
        return sensor_adjusted_power(self.adaptive_afe, self.sensor)

    @property
    def savings_pct(self) -> float:
        return 100.0 * (1.0 - self.total / self.baseline)

    @property
    def savings_without_sensor_pct(self) -> float:
        return 100.0 * (1.0 - self.adaptive_afe / self.baseline)


def compare_with_baseline(baseline: float, model: InterferenceModel, sensor_power: float) -> SensorComparison:
    """Adaptive receiver (AFE + blocker sensor) against the fixed worst-case design."""
    return SensorComparison(baseline, baseline * expected_scaling_interference(model), sensor_power)


Sampler = Callable[[np.random.Generator, int], np.ndarray]


def two_point_sampler(model: InterferenceModel) -> Sampler:
    """Blocker power at the centre of its bin, high bin with probability delta_high."""
    thr = interference_threshold(model)
    high, low = 0.5 * (thr + model.p_i_wc), 0.5 * thr

    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        return np.where(rng.random(n) < model.delta_high, high, low)

    return sample


def uniform_within_bins_sampler(model: InterferenceModel) -> Sampler:
    """Uniform over (thr, p_wc] or (0, thr], high bin with probability delta_high."""
    thr = interference_threshold(model)

    def sample(rng: np.random.Generator, n: int) -> np.ndarray:
        in_high = rng.random(n) < model.delta_high
        u = rng.random(n)
        return np.where(in_high, model.p_i_wc - (model.p_i_wc - thr) * u, thr * (1.0 - u))

    return sample


def monte_carlo_interference(model: InterferenceModel, sampler: Sampler,
                             mc: MonteCarloConfig) -> MonteCarloEstimate:
    def integrand(rng: np.random.Generator, n: int) -> np.ndarray:
        return interference_power_ratio(sampler(rng, n), model)

    return run_monte_carlo(integrand, mc, value_range=(0.0, 1.0))
