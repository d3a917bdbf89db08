"""Order-of-magnitude estimates of evolutionary search time and cost.

The "~" relations are evaluated as exact formulas; the tolerance lives in
:func:`check_estimate`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .chains import InvalidParameterError

AGREEMENT_BAND = (0.2, 5.0)
CONVERGENCE_THRESHOLD = 0.5


@dataclass(frozen=True)
class RateEstimate:
    mutation_timescale: float   # G_m = 1 / (N p_m)
    selection_timescale: float  # G_s = 1 / beta
    per_unit_rho: float         # G_-1 = G_m + G_s
    total_generations: float    # G_T = N * G_-1
    neutral_timescale: float    # G_n = n
    total_organisms: float      # n_total = n * G_T

    def to_dict(self) -> dict:
        return asdict(self)


def estimate_rates(N: int, n: int, p_m: float, beta: float) -> RateEstimate:
    """Generations and organisms needed to find the optimum by pure evolution."""
    if N < 1 or n < 1:
        raise InvalidParameterError("N and n must be >= 1")
    if not p_m > 0 or p_m > 1:
        raise InvalidParameterError(f"p_m must lie in (0, 1], got {p_m}")
    if not beta > 0:  # beta = inf is allowed: instantaneous selection
        raise InvalidParameterError(f"beta must be > 0, got {beta}")
    g_m = 1.0 / (N * p_m)
    g_s = 1.0 / beta
    g_1 = g_m + g_s
    g_t = N * g_1
    return RateEstimate(g_m, g_s, g_1, g_t, float(n), n * g_t)


def recommend_params(N: int) -> tuple[int, float, float]:
    """(n, p_m, beta) = (N, 1/N, 1): the cheapest effective search."""
    if N < 1:
        raise InvalidParameterError(f"N must be >= 1, got {N}")
    return N, 1.0 / N, 1.0


@dataclass(frozen=True)
class EstimateCheck:
    converged_generation: Optional[int]
    predicted_generations: float
    ratio: Optional[float]
    agrees: bool
    threshold: float

    @property
    def status(self) -> str:
        if self.converged_generation is None:
            return "no convergence"
        return "agrees" if self.agrees else "disagrees"

    def to_dict(self) -> dict:
        return {**asdict(self), "status": self.status}


def first_below(series, threshold: float) -> Optional[int]:
    """1-based index of the first value strictly below ``threshold``."""
    hits = np.flatnonzero(np.asarray(series) < threshold)
    return int(hits[0]) + 1 if hits.size else None


def check_estimate(measured, estimate: RateEstimate,
                   threshold: float = CONVERGENCE_THRESHOLD) -> EstimateCheck:
    """Compare the measured convergence time of ``measured`` with ``estimate``.

    Convergence is the first generation whose replicate-averaged genotype
    distance drops below ``threshold``; agreement means the ratio of
    measured to predicted time lies in [0.2, 5].
    """
    g = first_below(measured.mean_rho_series, threshold)
    if g is None:
        return EstimateCheck(None, estimate.total_generations, None, False, threshold)
    ratio = g / estimate.total_generations
    lo, hi = AGREEMENT_BAND
    return EstimateCheck(g, estimate.total_generations, ratio, lo <= ratio <= hi, threshold)
