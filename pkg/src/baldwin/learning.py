"""Trial-and-error lifetime learning.

In one time moment every phenotype symbol is tried with probability
``p_l``: a candidate symbol is drawn uniformly from {0, 1} and kept only if
it equals the target symbol.  A mismatched position is therefore corrected
with probability ``p_l / 2`` per sweep, and a matched position never changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import (
    InvalidParameterError,
    Organism,
    SymbolChain,
    hamming,
    pack_bits,
    popcount_rows,
    random_words,
    tail_mask,
)


@dataclass(frozen=True)
class LearningOutcome:
    final_phenotype: SymbolChain
    learning_distance: int


def bernoulli_words(shape: tuple[int, int], length: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Packed words whose ``length`` valid bits are iid Bernoulli(p)."""
    mask = tail_mask(length)
    if p <= 0.0:
        return np.zeros(shape, dtype=np.uint64)
    if p >= 1.0:
        return np.broadcast_to(mask, shape).copy()
    if p == 0.5:
        return random_words(shape, rng) & mask
    return pack_bits(rng.random((shape[0], length)) < p)


def sweep_words(
    phenotypes: np.ndarray,
    target_words: np.ndarray,
    length: int,
    p_l: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """One learning sweep applied row-wise to a ``(n, W)`` phenotype array."""
    if p_l <= 0.0:
        return phenotypes.copy()
    if p_l >= 1.0:
        trial = tail_mask(length)
    else:
        trial = bernoulli_words(phenotypes.shape, length, p_l, rng)
    candidate = random_words(phenotypes.shape, rng)
    # the candidate is kept only where it equals the target symbol
    accept = trial & ~(candidate ^ target_words)
    return (phenotypes & ~accept) | (target_words & accept)


def learn_population(
    genomes: np.ndarray,
    target_words: np.ndarray,
    length: int,
    p_l: float,
    lifetime: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Final phenotypes after ``lifetime`` sweeps, starting from the genotypes."""
    phenotypes = genomes
    for _ in range(lifetime):
        phenotypes = sweep_words(phenotypes, target_words, length, p_l, rng)
    return phenotypes


def _check_prob(p_l: float):
    if not 0.0 <= p_l <= 1.0:
        raise InvalidParameterError(f"learning probability must lie in [0, 1], got {p_l}")


def learning_sweep(
    phenotype: SymbolChain, target: SymbolChain, p_l: float, rng: np.random.Generator
) -> SymbolChain:
    if phenotype.length != target.length:
        raise InvalidParameterError(
            f"phenotype length {phenotype.length} != target length {target.length}"
        )
    _check_prob(p_l)
    out = sweep_words(phenotype.words[None, :], target.words, target.length, p_l, rng)
    return SymbolChain(out[0], target.length)


def learn_lifetime(
    organism: Organism,
    target: SymbolChain,
    p_l: float,
    lifetime: int,
    rng: np.random.Generator,
) -> LearningOutcome:
    """Run ``lifetime`` sweeps on a newborn organism.

    Returns the final phenotype and its Hamming distance from the genotype
    (the amount of learning the organism did).
    """
    if lifetime < 1:
        raise InvalidParameterError(f"lifetime must be >= 1, got {lifetime}")
    if organism.phenotype.length != target.length:
        raise InvalidParameterError(
            f"organism length {organism.phenotype.length} != target length {target.length}"
        )
    _check_prob(p_l)
    final = learn_population(
        organism.phenotype.words[None, :], target.words, target.length, p_l, lifetime, rng
    )
    final_chain = SymbolChain(final[0], target.length)
    return LearningOutcome(final_chain, hamming(organism.genotype, final_chain))


def learning_distances(genomes: np.ndarray, phenotypes: np.ndarray) -> np.ndarray:
    return popcount_rows(genomes ^ phenotypes)
