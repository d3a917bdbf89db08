"""Simulation of the interaction between lifetime learning and Darwinian
evolution on binary chains: genetic assimilation, the hiding effect and the
learning load."""

from .chains import (
    InvalidParameterError,
    ModelParams,
    Organism,
    Population,
    SymbolChain,
    hamming,
    random_chain,
)
from .estimator import RateEstimate, check_estimate, estimate_rates, recommend_params
from .evolution import (
    GenerationSnapshot,
    SelectionResult,
    deterministic_select,
    generation_step,
    mutate,
    roulette_select,
)
from .experiment import (
    ExperimentResult,
    ReplicateSeries,
    run_experiment,
    run_replicate,
    snapshot_request,
)
from .fitness import (
    fitness_basic,
    fitness_hinton,
    fitness_hinton_load,
    fitness_hinton_pure,
    fitness_load,
    fitness_noisy,
    fitness_noisy_load,
)
from .learning import LearningOutcome, learn_lifetime, learning_sweep
from .presets import PRESETS, get_preset, parse_config

__version__ = "0.1.0"
