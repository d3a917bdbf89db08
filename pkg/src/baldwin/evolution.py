"""Selection, mutation and the one-generation pipeline.

A generation runs record -> learn -> evaluate -> select -> mutate.  The
distance histograms recorded along the way are the four curves of the
within-generation distribution plots:

1. genotypes at the start of the generation,
2. final phenotypes after learning, before selection,
3. final phenotypes of the selected organisms,
4. genotypes of the selected organisms (before mutation).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import fitness as fit
from .chains import (
    InvalidParameterError,
    ModelParams,
    Population,
    SymbolChain,
    n_words,
    popcount_rows,
    tail_mask,
)
from .learning import learn_population


@dataclass(frozen=True)
class SelectionResult:
    chosen_indices: np.ndarray

    def __len__(self) -> int:
        return len(self.chosen_indices)


@dataclass(frozen=True)
class GenerationSnapshot:
    genotype_dist_before: np.ndarray
    phenotype_dist_after_learning: np.ndarray
    phenotype_dist_selected: np.ndarray
    genotype_dist_selected: np.ndarray

    @property
    def curves(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (
            self.genotype_dist_before,
            self.phenotype_dist_after_learning,
            self.phenotype_dist_selected,
            self.genotype_dist_selected,
        )

    @property
    def mean_genotype_rho_begin(self) -> float:
        return histogram_mean(self.genotype_dist_before)

    @property
    def mean_genotype_rho_end(self) -> float:
        return histogram_mean(self.genotype_dist_selected)


def histogram_mean(hist: np.ndarray) -> float:
    hist = np.asarray(hist, dtype=float)
    return float(np.dot(np.arange(hist.size), hist) / hist.sum())


def _check_fitness(fitness) -> np.ndarray:
    f = np.asarray(fitness, dtype=float)
    if f.ndim != 1 or f.size == 0:
        raise InvalidParameterError("fitness must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(f)) or np.any(f < 0):
        raise InvalidParameterError("fitness values must be finite and non-negative")
    return f


def roulette_indices(f: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = f.size
    cdf = np.cumsum(f)
    total = cdf[-1]
    if total <= 0.0:
        return rng.integers(0, n, size=n)
    idx = np.searchsorted(cdf, rng.random(n) * total, side="right")
    # u * total can round up to total itself
    overflow = idx >= n
    if overflow.any():
        idx[overflow] = np.flatnonzero(f > 0)[-1]
    return idx


def roulette_select(fitness, rng: np.random.Generator) -> SelectionResult:
    """n independent fitness-proportionate draws (uniform if all fitness is zero)."""
    return SelectionResult(roulette_indices(_check_fitness(fitness), rng))


def deterministic_indices(f: np.ndarray) -> np.ndarray:
    n = f.size
    if n % 2:
        raise InvalidParameterError(f"deterministic selection needs an even population, got {n}")
    # stable sort: equal fitness keeps the lower index first
    top = np.sort(np.argsort(-f, kind="stable")[: n // 2])
    return np.repeat(top, 2)


def deterministic_select(fitness) -> SelectionResult:
    """The better half of the population, each organism duplicated."""
    return SelectionResult(deterministic_indices(_check_fitness(fitness)))


def flip_masks(count: int, length: int, p_m: float, rng: np.random.Generator) -> np.ndarray:
    """``(count, W)`` masks with each valid bit set independently with prob ``p_m``.

    Draws the number of flips from a binomial and places them uniformly
    without replacement, which has the same law as per-bit coin tosses but
    costs O(flips) random numbers.
    """
    shape = (count, n_words(length))
    if p_m <= 0.0:
        return np.zeros(shape, dtype=np.uint64)
    if p_m >= 1.0:
        return np.broadcast_to(tail_mask(length), shape).copy()
    total = count * length
    k = int(rng.binomial(total, p_m))
    mask = np.zeros(shape, dtype=np.uint64)
    if k == 0:
        return mask
    pos = rng.choice(total, size=k, replace=False)
    row, bit = np.divmod(pos, length)
    values = np.left_shift(np.uint64(1), (bit & 63).astype(np.uint64))
    np.bitwise_or.at(mask, (row, bit >> 6), values)
    return mask


def mutate(genotype: SymbolChain, p_m: float, rng: np.random.Generator) -> SymbolChain:
    """Flip each symbol independently with probability ``p_m``."""
    if not 0.0 <= p_m <= 1.0:
        raise InvalidParameterError(f"mutation probability must lie in [0, 1], got {p_m}")
    mask = flip_masks(1, genotype.length, p_m, rng)
    return SymbolChain(genotype.words ^ mask[0], genotype.length)


class StepArrays(NamedTuple):
    next_genomes: np.ndarray
    rho_genotype: np.ndarray
    rho_final: np.ndarray
    chosen: np.ndarray


def advance(
    genomes: np.ndarray,
    target_words: np.ndarray,
    params: ModelParams,
    rng: np.random.Generator,
    noise_rng: np.random.Generator | None,
    learning_active: bool,
) -> StepArrays:
    """Array-level generation step used by both the public API and the runner."""
    length = params.chain_length
    rho_genotype = popcount_rows(genomes ^ target_words)
    if learning_active:
        phenotypes = learn_population(
            genomes, target_words, length, params.learning_prob, params.lifetime, rng
        )
        rho_final = popcount_rows(phenotypes ^ target_words)
        learn_dist = popcount_rows(genomes ^ phenotypes)
    else:
        rho_final = rho_genotype
        learn_dist = np.zeros_like(rho_genotype)

    f = fit.evaluate(
        params.fitness_variant, rho_final, learn_dist, rho_genotype, params,
        noise_rng if noise_rng is not None else rng,
    )
    if params.selection_mode == "roulette":
        chosen = roulette_indices(f, rng)
    else:
        chosen = deterministic_indices(f)

    children = genomes[chosen] ^ flip_masks(chosen.size, length, params.mutation_prob, rng)
    return StepArrays(children, rho_genotype, rho_final, chosen)


def generation_step(
    population: Population,
    target: SymbolChain,
    params: ModelParams,
    rng: np.random.Generator,
    noise_rng: np.random.Generator | None = None,
    learning_active: bool | None = None,
) -> tuple[Population, GenerationSnapshot]:
    """Advance ``population`` by one generation.

    ``learning_active`` defaults to the schedule in ``params`` for the
    generation about to run (``population.generation + 1``).  ``noise_rng``
    is the stream for the fitness noise draws; it defaults to ``rng``.
    """
    if population.length != params.chain_length or target.length != params.chain_length:
        raise InvalidParameterError("chain lengths of population, target and params disagree")
    if population.size != params.population_size:
        raise InvalidParameterError(
            f"population has {population.size} organisms, params expect {params.population_size}"
        )
    if learning_active is None:
        learning_active = params.learning_active(population.generation + 1)
    step = advance(population.genomes, target.words, params, rng, noise_rng, learning_active)
    bins = params.chain_length + 1
    snapshot = GenerationSnapshot(
        np.bincount(step.rho_genotype, minlength=bins),
        np.bincount(step.rho_final, minlength=bins),
        np.bincount(step.rho_final[step.chosen], minlength=bins),
        np.bincount(step.rho_genotype[step.chosen], minlength=bins),
    )
    nxt = Population(step.next_genomes, params.chain_length, population.generation + 1)
    return nxt, snapshot
