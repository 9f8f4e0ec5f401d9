"""Numerical check of the closed-form optimal chain power.

Cascade convention: block ``j`` has input-referred noise PSD ``n_j``
(V^2/Hz), IIP3 voltage squared ``v_j`` and voltage gain squared ``g_j``.
The cumulative gain into block ``j`` is ``G_j = g_1 * ... * g_{j-1}``
(``G_1 = 1``). Noise refers to the chain input as ``n_j / G_j`` and adds
to the source noise ``k*T*R_in``; the reciprocal IIP3 voltages add as
``G_j / v_j``.

The optimizer works on per-block log noise PSD and log IIP3, eliminates
both equality constraints by an exact rescaling projection, and runs a
multi-start BFGS.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from afescale.afe import ChainFoM, optimal_power_circuit_form
from afescale.errors import ConvergenceError, DomainError, InfeasibleDesignError
from afescale.numerics import DEFAULT_CONSTANTS, PhysicalConstants

log = logging.getLogger(__name__)

__all__ = [
    "ChainDesignVariables",
    "CascadeTargets",
    "OptimizationResult",
    "GainIndependenceReport",
    "cumulative_gains",
    "cascade_noise_factor",
    "cascade_iip3",
    "total_chain_power",
    "optimize_allocation",
    "verify_gain_independence",
]


@dataclass(frozen=True)
class ChainDesignVariables:
    noise_psd: tuple[float, ...]
    v_iip3_sq: tuple[float, ...]
    voltage_gain_sq: tuple[float, ...]
    chain: ChainFoM
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        n = len(self.chain)
        for name in ("noise_psd", "v_iip3_sq", "voltage_gain_sq"):
            values = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, values)
            if len(values) != n:
                raise DomainError(f"{name} has {len(values)} entries, chain has {n} blocks")
            if not all(v > 0 and math.isfinite(v) for v in values):
                raise DomainError(f"{name} entries must be finite and > 0")


@dataclass(frozen=True)
class CascadeTargets:
    f_target: float
    v_iip3_target_sq: float
    constants: PhysicalConstants = DEFAULT_CONSTANTS

    def __post_init__(self):
        if not self.f_target > 1:
            raise InfeasibleDesignError(f"target noise factor must exceed 1, got {self.f_target!r}")
        if not self.v_iip3_target_sq > 0:
            raise DomainError(f"target IIP3 voltage squared must be > 0, got {self.v_iip3_target_sq!r}")

    @property
    def excess_noise_psd(self) -> float:
        """Input-referred noise PSD budget of the chain, (F - 1) k T R_in."""
        c = self.constants
        return (self.f_target - 1.0) * c.kt * c.input_resistance


@dataclass(frozen=True)
class OptimizationResult:
    variables: ChainDesignVariables
    power: float
    closed_form: float
    start_index: int
    n_starts: int

    @property
    def relative_gap(self) -> float:
        return (self.power - self.closed_form) / self.closed_form


@dataclass(frozen=True)
class GainIndependenceReport:
    gain_sets: tuple[tuple[float, ...], ...]
    results: tuple[OptimizationResult, ...]
    closed_form: float

    @property
    def minima(self) -> tuple[float, ...]:
        return tuple(r.power for r in self.results)

    @property
    def max_pairwise_spread(self) -> float:
        """Largest relative difference between any two per-gain-set minima."""
        m = self.minima
        return max(abs(a - b) / min(a, b) for a in m for b in m)

    def agrees(self, rel_tol: float = 1e-3) -> bool:
        return self.max_pairwise_spread <= rel_tol


def cumulative_gains(voltage_gain_sq: Sequence[float]) -> np.ndarray:
    g = np.asarray(voltage_gain_sq, dtype=float)
    return np.concatenate(([1.0], np.cumprod(g[:-1])))


def cascade_noise_factor(vars: ChainDesignVariables) -> float:
    G = cumulative_gains(vars.voltage_gain_sq)
    referred = float(np.sum(np.asarray(vars.noise_psd) / G))
    c = vars.constants
    return 1.0 + referred / (c.kt * c.input_resistance)


def cascade_iip3(vars: ChainDesignVariables) -> float:
    """Total IIP3 voltage squared of the chain."""
    G = cumulative_gains(vars.voltage_gain_sq)
    return 1.0 / float(np.sum(G / np.asarray(vars.v_iip3_sq)))


def total_chain_power(vars: ChainDesignVariables) -> float:
    p_c = np.array([b.p_c for b in vars.chain.blocks])
    return float(np.sum(p_c * np.asarray(vars.v_iip3_sq) / np.asarray(vars.noise_psd)))


class _Problem:
    """Objective over raw per-block log noise PSD and log IIP3.

    Both equality constraints are met exactly by rescaling: all noise PSDs
    are scaled so the referred noise hits its budget, all reciprocal IIP3
    voltages so the cascade IIP3 hits its target. The gains enter through
    the referral, so different gain sets give different landscapes over
    the raw variables.
    """

    def __init__(self, targets: CascadeTargets, chain: ChainFoM, gains: Sequence[float]):
        self.p_c = np.array([b.p_c for b in chain.blocks])
        self.n_blocks = len(self.p_c)
        self.G = cumulative_gains(gains)
        self.noise_total = targets.excess_noise_psd
        self.v_total = targets.v_iip3_target_sq

    def project(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k = self.n_blocks
        log_n, log_v = x[:k], x[k:]
        log_a = log_n - np.log(self.G)
        log_b = np.log(self.G) - log_v
        log_n = log_n + math.log(self.noise_total) - _logsumexp(log_a)
        log_v = log_v + math.log(self.v_total) + _logsumexp(log_b)
        return np.exp(log_n), np.exp(log_v)

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        k = self.n_blocks
        log_a = x[:k] - np.log(self.G)
        log_b = np.log(self.G) - x[k:]
        log_w = log_a - _logsumexp(log_a)
        log_u = log_b - _logsumexp(log_b)
        w, u = np.exp(log_w), np.exp(log_u)
        # Capped so wild line-search trials stay finite instead of inf.
        log_c = math.log(self.v_total / self.noise_total) + np.log(self.p_c) - log_w - log_u
        c = np.exp(np.minimum(log_c, 700.0))
        total = float(c.sum())
        return total, np.concatenate((-c + w * total, c - u * total))

    def to_variables(self, x: np.ndarray, gains: Sequence[float], chain: ChainFoM,
                     constants: PhysicalConstants) -> ChainDesignVariables:
        noise_psd, v_iip3_sq = self.project(x)
        return ChainDesignVariables(tuple(noise_psd), tuple(v_iip3_sq), tuple(gains), chain, constants)


def _logsumexp(z: np.ndarray) -> float:
    m = float(z.max())
    return m + math.log(float(np.exp(z - m).sum()))


def _run_start(problem: _Problem, x0: np.ndarray, max_iter: int):
    return optimize.minimize(
        problem.value_and_grad,
        x0,
        jac=True,
        method="BFGS",
        options={"maxiter": max_iter, "gtol": 1e-12 * problem.value_and_grad(x0)[0]},
    )


def optimize_allocation(
    targets: CascadeTargets,
    chain: ChainFoM,
    gains: Sequence[float] | None = None,
    *,
    n_starts: int = 16,
    seed: int = 0,
    max_iter: int = 10_000,
    workers: int = 1,
) -> OptimizationResult:
    """Minimize total chain power subject to the cascade targets.

    Starts are drawn log-uniformly from a fixed seed; the best start wins
    and ties go to the lowest start index, so the result does not depend
    on ``workers``.
    """
    n = len(chain)
    if n == 0:
        raise DomainError("chain must contain at least one block")
    if gains is None:
        gains = (1.0,) * n
    gains = tuple(float(g) for g in gains)
    if len(gains) != n:
        raise DomainError(f"expected {n} gains, got {len(gains)}")
    if not all(g > 0 for g in gains):
        raise DomainError("gains must be > 0")

    constants = targets.constants
    closed = optimal_power_circuit_form(targets.v_iip3_target_sq, targets.f_target, chain, constants)
    problem = _Problem(targets, chain, gains)

    if n == 1:
        variables = problem.to_variables(np.zeros(2), gains, chain, constants)
        return OptimizationResult(variables, total_chain_power(variables), closed, 0, 1)

    # Starts are spread +-3 nepers around the target magnitudes; gains are
    # deliberately not used to place them.
    rng = np.random.default_rng(seed)
    centre = np.concatenate((np.full(n, math.log(problem.noise_total)), np.full(n, math.log(problem.v_total))))
    starts = centre + rng.uniform(-3.0, 3.0, size=(n_starts, 2 * n))
    # Line-search fallbacks inside BFGS are routine here; convergence is judged below.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                runs = list(pool.map(lambda x0: _run_start(problem, x0, max_iter), starts))
        else:
            runs = [_run_start(problem, x0, max_iter) for x0 in starts]

    best_index, best = None, None
    for i, res in enumerate(runs):
        # BFGS reports precision loss once it is at the floating point floor;
        # accept that as converged when the gradient is negligible.
        ok = res.success or (res.status == 2 and np.max(np.abs(res.jac)) < 1e-8 * res.fun)
        if not ok:
            log.debug("start %d did not converge: %s", i, res.message)
            continue
        if best is None or res.fun < best.fun:
            best_index, best = i, res
    if best is None:
        raise ConvergenceError(f"none of {n_starts} starts converged within {max_iter} iterations")

    variables = problem.to_variables(best.x, gains, chain, constants)
    return OptimizationResult(variables, total_chain_power(variables), closed, best_index, n_starts)


def verify_gain_independence(
    targets: CascadeTargets,
    chain: ChainFoM,
    gain_sets: Sequence[Sequence[float]],
    **kwargs,
) -> GainIndependenceReport:
    if len(gain_sets) < 2:
        raise DomainError("need at least two gain sets")
    results = tuple(optimize_allocation(targets, chain, g, **kwargs) for g in gain_sets)
    return GainIndependenceReport(
        gain_sets=tuple(tuple(float(x) for x in g) for g in gain_sets),
        results=results,
        closed_form=results[0].closed_form,
    )
