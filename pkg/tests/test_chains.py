import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from baldwin.chains import (
    InvalidParameterError,
    ModelParams,
    Organism,
    Population,
    SymbolChain,
    hamming,
    pack_bits,
    random_chain,
    unpack_bits,
)

C = SymbolChain.from_bits


@pytest.mark.parametrize("a,b,expected", [
    ("0000", "0000", 0),
    ("0101", "1010", 4),
    ("0110", "0100", 1),
])
def test_hamming_examples(a, b, expected):
    assert hamming(C(a), C(b)) == expected


def test_hamming_length_mismatch():
    with pytest.raises(InvalidParameterError):
        hamming(C("010"), C("0101"))


@pytest.mark.parametrize("N", range(1, 7))
def test_hamming_is_a_metric_exhaustively(N):
    chains = [C(bits) for bits in itertools.product((0, 1), repeat=N)]
    D = np.array([[hamming(a, b) for b in chains] for a in chains])
    assert np.all(np.diag(D) == 0)
    assert np.array_equal(D, D.T)
    assert np.all((D > 0) | np.eye(len(chains), dtype=bool))
    # d(a,c) <= d(a,b) + d(b,c) for all a, b, c
    assert np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :])
    agree = np.array([[sum(x == y for x, y in zip(a, b)) for b in chains] for a in chains])
    assert np.all(D + agree == N)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=200),
       st.lists(st.integers(0, 1), min_size=1, max_size=200))
def test_hamming_matches_naive_count(xs, ys):
    m = min(len(xs), len(ys))
    xs, ys = xs[:m], ys[:m]
    assert hamming(C(xs), C(ys)) == sum(x != y for x, y in zip(xs, ys))


@given(st.lists(st.integers(0, 1), min_size=1, max_size=300))
def test_pack_roundtrip(bits):
    chain = C(bits)
    assert list(chain) == bits
    assert len(chain) == len(bits)
    assert np.array_equal(unpack_bits(pack_bits(np.array(bits)), len(bits)), bits)
    assert str(chain) == "".join(map(str, bits))


def test_chain_is_immutable_and_hashable():
    c = C("0110")
    with pytest.raises(ValueError):
        c.words[0] = 0
    assert c == C([0, 1, 1, 0])
    assert len({c, C("0110"), C("0111")}) == 2
    assert c[1] == 1 and c[-1] == 0


def test_chain_rejects_bad_symbols():
    with pytest.raises(InvalidParameterError):
        C([0, 2, 1])
    with pytest.raises(InvalidParameterError):
        C([])


def test_random_chain_zero_length():
    with pytest.raises(InvalidParameterError):
        random_chain(0, np.random.default_rng(0))


def test_random_chain_domain():
    c = random_chain(4, np.random.default_rng(1))
    assert len(c) == 4 and set(c) <= {0, 1}


def test_random_chain_symbol_frequency():
    rng = np.random.default_rng(2)
    bits = np.concatenate([random_chain(100, rng).bits() for _ in range(1000)])
    assert bits.size == 100_000
    sigma = np.sqrt(bits.size * 0.25)
    assert abs(bits.sum() - bits.size / 2) < 3 * sigma


def test_random_chain_mean_distance_to_fixed_target():
    rng = np.random.default_rng(3)
    target = random_chain(100, rng)
    d = [hamming(random_chain(100, rng), target) for _ in range(10_000)]
    assert 48.5 <= np.mean(d) <= 51.5


def test_random_chain_respects_padding():
    rng = np.random.default_rng(4)
    for length in (1, 63, 64, 65, 100, 128):
        c = random_chain(length, rng)
        assert sum(c) == np.bitwise_count(c.words).sum()


def test_organism_and_population():
    g = C("0101")
    org = Organism.newborn(g)
    assert org.phenotype == org.genotype
    with pytest.raises(InvalidParameterError):
        Organism(g, C("01"))
    pop = Population.from_chains([g, C("1111"), C("0000")])
    assert len(pop) == 3 and pop.generation == 0
    assert pop.genotype(1) == C("1111")
    assert list(pop.distances(C("0000"))) == [2, 4, 0]
    assert all(o.phenotype == o.genotype for o in pop.organisms)
    with pytest.raises(InvalidParameterError):
        Population.from_chains([g, C("01")])


def test_params_defaults_are_the_main_regime():
    p = ModelParams()
    assert (p.chain_length, p.population_size, p.selection_intensity) == (100, 100, 1.0)
    assert (p.mutation_prob, p.learning_prob, p.lifetime, p.noise_floor) == (0.01, 1.0, 2, 1e-6)


@pytest.mark.parametrize("bad", [
    dict(mutation_prob=1.5),
    dict(learning_prob=-0.1),
    dict(chain_length=0),
    dict(lifetime=0),
    dict(generations=0),
    dict(replicates=0),
    dict(selection_intensity=0.0),
    dict(load_coefficient=-1.0),
    dict(noise_floor=1.0),
    dict(fitness_variant="quadratic"),
    dict(selection_mode="tournament"),
    dict(generations=10, learning_off_generation=11),
    dict(selection_mode="deterministic", population_size=7),
    dict(learning_enabled="yes"),
])
def test_params_validation(bad):
    with pytest.raises(InvalidParameterError):
        ModelParams(**bad)


def test_params_error_names_field():
    with pytest.raises(InvalidParameterError, match="mutation_prob"):
        ModelParams(mutation_prob=1.5)


def test_learning_schedule():
    p = ModelParams(generations=10, learning_off_generation=4)
    assert [p.learning_active(g) for g in range(1, 7)] == [True, True, True, False, False, False]
    assert not ModelParams(learning_enabled=False).learning_active(1)
