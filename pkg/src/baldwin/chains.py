"""Binary symbol chains, organisms, populations and model parameters.

Chains are bit-packed: symbol ``i`` lives in word ``i // 64`` at bit
``i % 64`` of a little-endian ``uint64`` array.  Padding bits past the chain
length are always zero, so XOR followed by a population count gives the
Hamming distance directly.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

WORD_BITS = 64
_ALL_ONES = np.iinfo(np.uint64).max

FITNESS_VARIANTS = (
    "basic",
    "load",
    "noisy",
    "noisy_load",
    "hinton",
    "hinton_pure",
    "hinton_load",
)
SELECTION_MODES = ("roulette", "deterministic")


class InvalidParameterError(ValueError):
    """Raised when an argument violates a documented precondition."""


def n_words(length: int) -> int:
    return (length + WORD_BITS - 1) // WORD_BITS


@lru_cache(maxsize=None)
def tail_mask(length: int) -> np.ndarray:
    """Word mask with ones exactly at the ``length`` valid symbol positions (read-only)."""
    mask = np.full(n_words(length), _ALL_ONES, dtype=np.uint64)
    rem = length % WORD_BITS
    if rem:
        mask[-1] = np.uint64((1 << rem) - 1)
    mask.flags.writeable = False
    return mask


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a ``(..., N)`` array of 0/1 values into ``(..., W)`` uint64 words."""
    bits = np.asarray(bits, dtype=bool)
    length = bits.shape[-1]
    pad = n_words(length) * WORD_BITS - length
    if pad:
        widths = [(0, 0)] * (bits.ndim - 1) + [(0, pad)]
        bits = np.pad(bits, widths)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_bits(words: np.ndarray, length: int) -> np.ndarray:
    """Inverse of :func:`pack_bits`; returns a ``(..., length)`` uint8 array."""
    words = np.ascontiguousarray(words, dtype="<u8")
    raw = words.view(np.uint8)
    return np.unpackbits(raw, axis=-1, count=length, bitorder="little")


def popcount_rows(words: np.ndarray) -> np.ndarray:
    """Number of set bits in each row of a ``(n, W)`` word array."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


class SymbolChain:
    """Immutable binary chain of fixed length."""

    __slots__ = ("_words", "_length")

    def __init__(self, words: np.ndarray, length: int):
        if length < 1:
            raise InvalidParameterError(f"chain length must be >= 1, got {length}")
        words = np.array(words, dtype=np.uint64).reshape(-1)
        if words.shape[0] != n_words(length):
            raise InvalidParameterError(
                f"{words.shape[0]} words cannot hold a chain of length {length}"
            )
        if np.any(words & ~tail_mask(length)):
            raise InvalidParameterError("padding bits beyond the chain length must be zero")
        words.flags.writeable = False
        self._words = words
        self._length = int(length)

    @classmethod
    def from_bits(cls, bits: Iterable[int] | str) -> "SymbolChain":
        if isinstance(bits, str):
            bits = [int(c) for c in bits]
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidParameterError("a chain needs a non-empty 1-d sequence of symbols")
        if not np.all((arr == 0) | (arr == 1)):
            raise InvalidParameterError("every symbol must be 0 or 1")
        return cls(pack_bits(arr), arr.size)

    @property
    def words(self) -> np.ndarray:
        return self._words

    @property
    def length(self) -> int:
        return self._length

    def bits(self) -> np.ndarray:
        return unpack_bits(self._words, self._length)

    def __len__(self) -> int:
        return self._length

    def __iter__(self) -> Iterator[int]:
        return iter(int(b) for b in self.bits())

    def __getitem__(self, i: int) -> int:
        if not -self._length <= i < self._length:
            raise IndexError(i)
        i %= self._length
        return int((int(self._words[i // WORD_BITS]) >> (i % WORD_BITS)) & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolChain):
            return NotImplemented
        return self._length == other._length and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._length, self._words.tobytes()))

    def __str__(self) -> str:
        return "".join(map(str, self.bits()))

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 40:
            s = s[:37] + "..."
        return f"SymbolChain({s!r}, length={self._length})"


def random_chain(length: int, rng: np.random.Generator) -> SymbolChain:
    """Chain of ``length`` independent fair coin symbols."""
    if length < 1:
        raise InvalidParameterError(f"chain length must be >= 1, got {length}")
    words = random_words((1, n_words(length)), rng)[0] & tail_mask(length)
    return SymbolChain(words, length)


def random_words(shape: tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    """Array of uniformly random 64-bit words (every bit a fair coin)."""
    return rng.integers(0, _ALL_ONES, size=shape, dtype=np.uint64, endpoint=True)


def hamming(a: SymbolChain, b: SymbolChain) -> int:
    """Number of positions at which ``a`` and ``b`` differ."""
    if a.length != b.length:
        raise InvalidParameterError(f"chain lengths differ: {a.length} != {b.length}")
    return int(np.bitwise_count(a.words ^ b.words).sum())


@dataclass(frozen=True)
class Organism:
    genotype: SymbolChain
    phenotype: SymbolChain

    def __post_init__(self):
        if self.genotype.length != self.phenotype.length:
            raise InvalidParameterError("genotype and phenotype lengths differ")

    @classmethod
    def newborn(cls, genotype: SymbolChain) -> "Organism":
        return cls(genotype, genotype)


class Population:
    """``n`` genotypes of common length, stored as one ``(n, W)`` word array.

    At a generation boundary every phenotype equals its genotype, so only
    genotypes are kept.
    """

    def __init__(self, genomes: np.ndarray, length: int, generation: int = 0):
        genomes = np.array(genomes, dtype=np.uint64)
        if genomes.ndim != 2 or genomes.shape[0] < 1:
            raise InvalidParameterError("population needs a non-empty (n, W) genome array")
        if genomes.shape[1] != n_words(length):
            raise InvalidParameterError("genome word count does not match chain length")
        if generation < 0:
            raise InvalidParameterError("generation counter must be non-negative")
        genomes.flags.writeable = False
        self.genomes = genomes
        self.length = int(length)
        self.generation = int(generation)

    @classmethod
    def random(cls, size: int, length: int, rng: np.random.Generator) -> "Population":
        if size < 1 or length < 1:
            raise InvalidParameterError("population size and chain length must be >= 1")
        genomes = random_words((size, n_words(length)), rng) & tail_mask(length)
        return cls(genomes, length)

    @classmethod
    def from_chains(cls, chains: Sequence[SymbolChain], generation: int = 0) -> "Population":
        if not chains:
            raise InvalidParameterError("population needs at least one organism")
        length = chains[0].length
        if any(c.length != length for c in chains):
            raise InvalidParameterError("all chains in a population must share one length")
        return cls(np.stack([c.words for c in chains]), length, generation)

    @property
    def size(self) -> int:
        return self.genomes.shape[0]

    def __len__(self) -> int:
        return self.size

    def genotype(self, k: int) -> SymbolChain:
        return SymbolChain(self.genomes[k], self.length)

    @property
    def organisms(self) -> list[Organism]:
        return [Organism.newborn(self.genotype(k)) for k in range(self.size)]

    def distances(self, target: SymbolChain) -> np.ndarray:
        """Hamming distance of every genotype to ``target``."""
        if target.length != self.length:
            raise InvalidParameterError("target length does not match population chains")
        return popcount_rows(self.genomes ^ target.words)


@dataclass(frozen=True)
class ModelParams:
    """Every scalar of the model plus the mode switches.

    Defaults are the main simulation regime: N = n = 100, beta = 1,
    p_m = 1/N, p_l = 1, T = 2, eps = 1e-6.
    """

    chain_length: int = 100
    population_size: int = 100
    selection_intensity: float = 1.0
    load_coefficient: float = 1.0
    noise_floor: float = 1e-6
    mutation_prob: float = 0.01
    learning_prob: float = 1.0
    lifetime: int = 2
    generations: int = 2000
    replicates: int = 1000
    base_seed: int = 0
    fitness_variant: str = "basic"
    selection_mode: str = "roulette"
    learning_enabled: bool = True
    learning_off_generation: Optional[int] = None

    def __post_init__(self):
        for name in ("chain_length", "population_size", "lifetime", "generations", "replicates"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise InvalidParameterError(f"{name} must be an integer >= 1, got {value!r}")
        for name in ("mutation_prob", "learning_prob"):
            value = getattr(self, name)
            if not _is_real(value) or not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"{name} must be a probability in [0, 1], got {value!r}")
        if not _is_real(self.selection_intensity) or not self.selection_intensity > 0:
            raise InvalidParameterError(
                f"selection_intensity must be > 0, got {self.selection_intensity!r}"
            )
        if not _is_real(self.load_coefficient) or self.load_coefficient < 0:
            raise InvalidParameterError(
                f"load_coefficient must be >= 0, got {self.load_coefficient!r}"
            )
        if not _is_real(self.noise_floor) or not 0.0 <= self.noise_floor < 1.0:
            raise InvalidParameterError(f"noise_floor must lie in [0, 1), got {self.noise_floor!r}")
        if isinstance(self.base_seed, bool) or not isinstance(self.base_seed, (int, np.integer)):
            raise InvalidParameterError(f"base_seed must be an integer, got {self.base_seed!r}")
        if self.base_seed < 0:
            raise InvalidParameterError(f"base_seed must be non-negative, got {self.base_seed}")
        if self.fitness_variant not in FITNESS_VARIANTS:
            raise InvalidParameterError(
                f"fitness_variant must be one of {', '.join(FITNESS_VARIANTS)}; "
                f"got {self.fitness_variant!r}"
            )
        if self.selection_mode not in SELECTION_MODES:
            raise InvalidParameterError(
                f"selection_mode must be one of {', '.join(SELECTION_MODES)}; "
                f"got {self.selection_mode!r}"
            )
        if self.selection_mode == "deterministic" and self.population_size % 2:
            raise InvalidParameterError("deterministic selection needs an even population_size")
        if not isinstance(self.learning_enabled, bool):
            raise InvalidParameterError("learning_enabled must be true or false")
        off = self.learning_off_generation
        if off is not None:
            if isinstance(off, bool) or not isinstance(off, (int, np.integer)) or off < 1:
                raise InvalidParameterError(
                    f"learning_off_generation must be an integer >= 1, got {off!r}"
                )
            if off > self.generations:
                raise InvalidParameterError(
                    f"learning_off_generation ({off}) exceeds generations ({self.generations})"
                )

    def learning_active(self, generation: int) -> bool:
        """Whether organisms learn during ``generation`` (1-based)."""
        if not self.learning_enabled:
            return False
        off = self.learning_off_generation
        return off is None or generation < off

    def to_dict(self) -> dict:
        return asdict(self)

    def replace(self, **changes) -> "ModelParams":
        return ModelParams(**{**asdict(self), **changes})

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls))


def _is_real(x) -> bool:
    return isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool) and math.isfinite(x)
