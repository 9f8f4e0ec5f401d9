"""Deterministic, chunked Monte Carlo averaging.

Samples are split into fixed-size chunks. Chunk ``i`` draws from its own
PCG64 stream spawned as child ``i`` of ``SeedSequence(seed)``, so the
chunk layout, and therefore every estimate, depends only on ``seed``,
``samples`` and ``chunk_size``. Workers only decide who computes which
chunk; chunk sums are reduced in chunk order, so results are bit-identical
for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from afescale.errors import DomainError
from afescale.numerics import q_inverse

__all__ = ["MonteCarloConfig", "MonteCarloEstimate", "run_monte_carlo"]

Integrand = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True)
class MonteCarloConfig:
    samples: int = 1_000_000
    seed: int = 0
    confidence: float = 0.99
    workers: int = 1
    chunk_size: int = 1 << 16

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples!r}")
        if not 0 < self.confidence < 1:
            raise DomainError(f"confidence must be in (0, 1), got {self.confidence!r}")
        if self.workers < 1 or self.chunk_size < 1:
            raise DomainError("workers and chunk_size must be >= 1")


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    samples: int
    confidence: float

    def contains(self, value: float, atol: float = 1e-12) -> bool:
        return self.ci_low - atol <= value <= self.ci_high + atol

    def interval(self, confidence: float) -> tuple[float, float]:
        """Normal-approximation interval at another confidence level."""
        z = q_inverse((1.0 - confidence) / 2.0)
        return self.mean - z * self.std_error, self.mean + z * self.std_error


def _chunk_sizes(samples: int, chunk_size: int) -> list[int]:
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_monte_carlo(integrand: Integrand, mc: MonteCarloConfig,
                    value_range: tuple[float, float] | None = None) -> MonteCarloEstimate:
    """Mean of ``integrand(rng, n)`` over ``mc.samples`` draws, with a CI.

    The interval is the normal approximation. If the integrand is known to
    lie in ``value_range``, its half-width is floored at the rule-of-three
    bound ``(hi - lo) * ln(1/alpha) / n``; otherwise a rare region that no
    sample hit would give a zero-width interval.
    """
    sizes = _chunk_sizes(mc.samples, mc.chunk_size)
    seeds = np.random.SeedSequence(mc.seed).spawn(len(sizes))

    def chunk(i: int) -> tuple[float, float]:
        rng = np.random.Generator(np.random.PCG64(seeds[i]))
        x = np.asarray(integrand(rng, sizes[i]), dtype=float)
        if x.shape != (sizes[i],):
            raise DomainError(f"integrand returned shape {x.shape}, expected ({sizes[i]},)")
        return float(np.sum(x)), float(np.sum(x * x))

    if mc.workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            parts = list(pool.map(chunk, range(len(sizes))))
    else:
        parts = [chunk(i) for i in range(len(sizes))]

    sums = np.array([p[0] for p in parts])
    squares = np.array([p[1] for p in parts])
    n = mc.samples
    total = float(np.sum(sums))
    mean = total / n
    if n > 1:
        var = max(float(np.sum(squares)) - total * total / n, 0.0) / (n - 1)
    else:
        var = 0.0
    se = math.sqrt(var / n)
    alpha = 1.0 - mc.confidence
    half = q_inverse(alpha / 2.0) * se
    if value_range is not None:
        lo, hi = value_range
        half = max(half, (hi - lo) * math.log(1.0 / alpha) / n)
    return MonteCarloEstimate(mean, se, mean - half, mean + half, n, mc.confidence)
