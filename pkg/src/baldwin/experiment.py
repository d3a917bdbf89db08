"""Seeded replicate runs and exact aggregation over replicates.

Seeding scheme (stable; changing it changes every published result file):

* the optimal chain is drawn from ``SeedSequence(base_seed, spawn_key=(0,))``;
* replicate ``k`` gets the integer seed
  ``SeedSequence(base_seed, spawn_key=(1, k)).generate_state(1, uint64)[0]``;
* inside a replicate, ``SeedSequence(seed).spawn(3)`` yields the streams for
  the initial population, for learning/selection/mutation, and for fitness
  noise.  Keeping noise on its own stream means a noisy-fitness run and its
  noise-free counterpart consume identical draws everywhere else.

All distance statistics are integers and are summed as integers, so the
aggregate does not depend on the order in which replicates run.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .chains import (
    InvalidParameterError,
    ModelParams,
    Population,
    SymbolChain,
    random_chain,
)
from .evolution import advance

log = logging.getLogger(__name__)

_TARGET_KEY = 0
_REPLICATE_KEY = 1


@dataclass(frozen=True)
class SnapshotRequest:
    generations: frozenset = frozenset()

    def __contains__(self, g: int) -> bool:
        return g in self.generations

    def sorted(self) -> list[int]:
        return sorted(self.generations)


def snapshot_request(generations: Iterable[int], params: ModelParams) -> SnapshotRequest:
    """Validate the generations (1-based) at which full histograms are kept."""
    gens = frozenset(int(g) for g in generations)
    bad = sorted(g for g in gens if not 1 <= g <= params.generations)
    if bad:
        raise InvalidParameterError(
            f"snapshot generations {bad} outside 1..{params.generations}"
        )
    return SnapshotRequest(gens)


def target_for(params: ModelParams) -> SymbolChain:
    ss = np.random.SeedSequence(params.base_seed, spawn_key=(_TARGET_KEY,))
    return random_chain(params.chain_length, np.random.default_rng(ss))


def replicate_seed(base_seed: int, k: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(_REPLICATE_KEY, k))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ReplicateSeries:
    """Per-generation genotype distance sums of one replicate.

    ``begin_sums[g-1]`` sums distances over the population at the start of
    generation ``g``; ``end_sums`` over the selected parents.
    ``snapshots[g]`` is a ``(4, N+1)`` integer array of the four curves.
    """

    population_size: int
    begin_sums: np.ndarray
    end_sums: np.ndarray
    snapshots: dict = field(default_factory=dict)

    @property
    def mean_genotype_rho_begin(self) -> np.ndarray:
        return self.begin_sums / self.population_size

    @property
    def mean_genotype_rho_end(self) -> np.ndarray:
        return self.end_sums / self.population_size

    def __len__(self) -> int:
        return len(self.begin_sums)


def run_replicate(
    params: ModelParams,
    target: SymbolChain,
    seed: int,
    snapshots: SnapshotRequest | Iterable[int] = (),
) -> ReplicateSeries:
    """One full evolutionary history; determined by (params, target, seed)."""
    if target.length != params.chain_length:
        raise InvalidParameterError("target length does not match params.chain_length")
    if not isinstance(snapshots, SnapshotRequest):
        snapshots = snapshot_request(snapshots, params)
    init_ss, main_ss, noise_ss = np.random.SeedSequence(seed).spawn(3)
    rng = np.random.default_rng(main_ss)
    noise_rng = np.random.default_rng(noise_ss)

    n, G, bins = params.population_size, params.generations, params.chain_length + 1
    genomes = Population.random(n, params.chain_length, np.random.default_rng(init_ss)).genomes
    tw = target.words
    begin = np.empty(G, dtype=np.int64)
    end = np.empty(G, dtype=np.int64)
    snaps = {}
    for g in range(1, G + 1):
        step = advance(genomes, tw, params, rng, noise_rng, params.learning_active(g))
        begin[g - 1] = step.rho_genotype.sum()
        end[g - 1] = step.rho_genotype[step.chosen].sum()
        if g in snapshots:
            snaps[g] = np.stack([
                np.bincount(step.rho_genotype, minlength=bins),
                np.bincount(step.rho_final, minlength=bins),
                np.bincount(step.rho_final[step.chosen], minlength=bins),
                np.bincount(step.rho_genotype[step.chosen], minlength=bins),
            ])
        genomes = step.next_genomes
    return ReplicateSeries(n, begin, end, snaps)


@dataclass
class _Totals:
    begin: np.ndarray
    begin_sq: np.ndarray
    end: np.ndarray
    end_sq: np.ndarray
    hist: dict
    count: int = 0

    @classmethod
    def empty(cls, params: ModelParams, snapshots: SnapshotRequest) -> "_Totals":
        G, bins = params.generations, params.chain_length + 1
        z = lambda: np.zeros(G, dtype=np.int64)  # noqa: E731
        hist = {g: np.zeros((4, bins), dtype=np.int64) for g in snapshots.generations}
        return cls(z(), z(), z(), z(), hist)

    def add(self, rep: ReplicateSeries):
        self.begin += rep.begin_sums
        self.begin_sq += rep.begin_sums * rep.begin_sums
        self.end += rep.end_sums
        self.end_sq += rep.end_sums * rep.end_sums
        for g, h in rep.snapshots.items():
            self.hist[g] += h
        self.count += 1

    def merge(self, other: "_Totals"):
        self.begin += other.begin
        self.begin_sq += other.begin_sq
        self.end += other.end
        self.end_sq += other.end_sq
        for g, h in other.hist.items():
            self.hist[g] += h
        self.count += other.count


@dataclass
class ExperimentResult:
    """Replicate-averaged series and histograms.

    The integer totals are kept so results can be compared or re-derived
    exactly; the float series are computed from them once.
    """

    params: ModelParams
    target: SymbolChain
    replicate_count: int
    snapshot_generations: tuple
    begin_totals: np.ndarray
    begin_sq_totals: np.ndarray
    end_totals: np.ndarray
    end_sq_totals: np.ndarray
    histogram_totals: dict

    @property
    def generations(self) -> np.ndarray:
        return np.arange(1, self.params.generations + 1)

    @property
    def mean_rho_series(self) -> np.ndarray:
        return self.begin_totals / (self.replicate_count * self.params.population_size)

    @property
    def mean_rho_end_series(self) -> np.ndarray:
        return self.end_totals / (self.replicate_count * self.params.population_size)

    @property
    def stderr_begin(self) -> np.ndarray:
        return _stderr(self.begin_totals, self.begin_sq_totals, self.replicate_count,
                       self.params.population_size)

    @property
    def stderr_end(self) -> np.ndarray:
        return _stderr(self.end_totals, self.end_sq_totals, self.replicate_count,
                       self.params.population_size)

    @property
    def averaged_snapshots(self) -> dict:
        """generation -> ``(4, N+1)`` mean counts per distance bin (curves 1-4)."""
        return {g: h / self.replicate_count for g, h in sorted(self.histogram_totals.items())}

    def at(self, generation: int) -> float:
        """Replicate-averaged start-of-generation mean distance at ``generation``."""
        return float(self.mean_rho_series[generation - 1])

    def curve_means(self, generation: int) -> np.ndarray:
        """Means of the four averaged curves at a snapshot generation."""
        h = self.averaged_snapshots[generation]
        return h @ np.arange(h.shape[1]) / h.sum(axis=1)


def _stderr(s: np.ndarray, sq: np.ndarray, R: int, n: int) -> np.ndarray:
    """Standard error over replicates of the per-replicate population mean."""
    if R < 2:
        return np.full(s.shape, math.nan)
    out = np.empty(s.shape)
    for i, (a, b) in enumerate(zip(s.tolist(), sq.tolist())):
        # exact integer numerator: R * sum(x^2) - (sum x)^2
        var = (R * b - a * a) / (R * (R - 1) * n * n)
        out[i] = math.sqrt(max(var, 0.0) / R)
    return out


def _run_chunk(args) -> _Totals:
    params, target_words, indices, snapshots = args
    target = SymbolChain(target_words, params.chain_length)
    totals = _Totals.empty(params, snapshots)
    for k in indices:
        totals.add(run_replicate(params, target, replicate_seed(params.base_seed, k), snapshots))
    return totals


def run_experiment(
    params: ModelParams,
    snapshots: SnapshotRequest | Iterable[int] | None = None,
    workers: int = 1,
    schedule: Optional[Sequence[int]] = None,
) -> ExperimentResult:
    """Run ``params.replicates`` replicates and aggregate them.

    ``schedule`` optionally fixes the execution order of replicate indices
    (it must be a permutation of ``range(R)``); the result never depends on it.
    ``workers > 1`` spreads replicates over processes.
    """
    if snapshots is None:
        snapshots = SnapshotRequest()
    elif not isinstance(snapshots, SnapshotRequest):
        snapshots = snapshot_request(snapshots, params)
    R = params.replicates
    order = list(range(R)) if schedule is None else [int(k) for k in schedule]
    if sorted(order) != list(range(R)):
        raise InvalidParameterError("schedule must be a permutation of the replicate indices")
    target = target_for(params)
    totals = _Totals.empty(params, snapshots)

    if workers <= 1 or R == 1:
        for i, k in enumerate(order):
            totals.add(run_replicate(params, target, replicate_seed(params.base_seed, k), snapshots))
            if (i + 1) % 100 == 0:
                log.info("replicate %d/%d done", i + 1, R)
    else:
        chunks = [order[i::workers] for i in range(workers)]
        jobs = [(params, target.words.copy(), c, snapshots) for c in chunks if c]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, jobs):
                totals.merge(part)

    return ExperimentResult(
        params=params,
        target=target,
        replicate_count=totals.count,
        snapshot_generations=tuple(snapshots.sorted()),
        begin_totals=totals.begin,
        begin_sq_totals=totals.begin_sq,
        end_totals=totals.end,
        end_sq_totals=totals.end_sq,
        histogram_totals=totals.hist,
    )
