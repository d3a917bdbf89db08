"""Fitness functions of the main and Hinton-Nowlan style models.

All functions accept scalars or numpy arrays for the distance arguments.
``rho`` is the distance of the final phenotype to the optimum, ``d`` the
distance travelled by learning (genotype to final phenotype).
"""

from __future__ import annotations

import numpy as np

from .chains import InvalidParameterError


def _nonneg(name: str, x):
    x = np.asarray(x, dtype=float)
    if np.any(np.isnan(x)) or np.any(x < 0):
        raise InvalidParameterError(f"{name} must be non-negative")
    return x


def _xi(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(np.isnan(xi)) or np.any((xi < 0) | (xi > 1)):
        raise InvalidParameterError("noise draw xi must lie in [0, 1]")
    return xi


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def fitness_basic(rho, beta: float, eps: float):
    """exp(-beta*rho) + eps"""
    rho = _nonneg("rho", rho)
    return _out(np.exp(-beta * rho) + eps)


def fitness_load(rho, d, alpha: float, beta: float, eps: float):
    """Basic fitness discounted by the learning load exp(-alpha*d)."""
    rho = _nonneg("rho", rho)
    d = _nonneg("d", d)
    _nonneg("alpha", alpha)
    return _out(np.exp(-alpha * d) * (np.exp(-beta * rho) + eps))


def fitness_noisy(rho, beta: float, eps: float, xi):
    """exp(-beta*rho) + 2*eps*xi with xi ~ U[0, 1]; mean equals fitness_basic."""
    rho = _nonneg("rho", rho)
    xi = _xi(xi)
    return _out(np.exp(-beta * rho) + 2.0 * eps * xi)


def fitness_noisy_load(rho, d, alpha: float, beta: float, eps: float, xi):
    rho = _nonneg("rho", rho)
    d = _nonneg("d", d)
    _nonneg("alpha", alpha)
    xi = _xi(xi)
    return _out(np.exp(-alpha * d) * (np.exp(-beta * rho) + 2.0 * eps * xi))


def fitness_hinton(rho, beta: float):
    rho = _nonneg("rho", rho)
    return _out(np.exp(-beta * rho))


def fitness_hinton_pure(genotype_matches_target):
    """1 for a genotype identical to the optimum, otherwise 0 (no learning)."""
    return _out(np.asarray(genotype_matches_target, dtype=bool).astype(float))


def fitness_hinton_load(rho, d, alpha: float, beta: float):
    rho = _nonneg("rho", rho)
    d = _nonneg("d", d)
    _nonneg("alpha", alpha)
    return _out(np.exp(-alpha * d - beta * rho))


NOISY_VARIANTS = frozenset({"noisy", "noisy_load"})


def evaluate(
    variant: str,
    rho_final: np.ndarray,
    learn_dist: np.ndarray,
    rho_genotype: np.ndarray,
    params,
    noise_rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Fitness of a whole population under ``params`` for the given variant.

    ``noise_rng`` supplies one fresh xi per organism for the noisy variants.
    """
    beta = params.selection_intensity
    alpha = params.load_coefficient
    eps = params.noise_floor
    # inputs come from popcounts, so the validated public functions are bypassed
    if variant == "basic":
        return np.exp(-beta * rho_final) + eps
    if variant == "load":
        return np.exp(-alpha * learn_dist) * (np.exp(-beta * rho_final) + eps)
    if variant in NOISY_VARIANTS:
        if noise_rng is None:
            raise InvalidParameterError(f"variant {variant!r} needs a noise random stream")
        xi = noise_rng.random(np.shape(rho_final))
        f = np.exp(-beta * rho_final) + 2.0 * eps * xi
        return f if variant == "noisy" else np.exp(-alpha * learn_dist) * f
    if variant == "hinton":
        return np.exp(-beta * rho_final)
    if variant == "hinton_pure":
        return (np.asarray(rho_genotype) == 0).astype(float)
    if variant == "hinton_load":
        return np.exp(-alpha * learn_dist - beta * rho_final)
    raise InvalidParameterError(f"unknown fitness variant {variant!r}")
