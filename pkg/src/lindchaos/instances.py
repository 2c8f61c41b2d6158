"""Seeded random instances.

All draws use ``numpy.random.Generator`` on the PCG64 bit generator, seeded
with the integer the caller passes; the same seed always yields the same
matrix.
"""

from __future__ import annotations

import math
from itertools import permutations

import numpy as np

from . import tensor as ta
from .dynamics import ModelParams
from .errors import BudgetError


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def ginibre(d: int, rng: np.random.Generator) -> np.ndarray:
    """Complex matrix with independent standard normal real and imaginary parts."""
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(d, rng)
    return 0.5 * (g + g.conj().T)


def random_state(d: int, seed: int | np.random.Generator) -> np.ndarray:
    """G G† / tr(G G†) for a seeded complex Gaussian G (faithful almost surely)."""
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed)
    g = ginibre(d, rng)
    rho = g @ g.conj().T
    rho = ta.hermitize(rho)
    return rho / np.trace(rho).real


def random_swap_symmetric(d: int, rng: np.random.Generator) -> np.ndarray:
    a = random_hermitian(d * d, rng)
    s = ta.swap_operator(d)
    return 0.5 * (a + s @ a @ s)


def random_model(d: int, seed: int | np.random.Generator, scale: float = 1.0) -> ModelParams:
    """Random (H, A, L) with ||H|| = ||A|| = scale and ||L|| = scale / 2."""
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed)
    h = random_hermitian(d, rng)
    a = random_swap_symmetric(d, rng)
    lj = ginibre(d, rng)
    h *= scale / ta.op_norm(h)
    a *= scale / ta.op_norm(a)
    lj *= 0.5 * scale / ta.op_norm(lj)
    return ModelParams(d=d, h_tilde=h, a_int=a, l_jump=lj)


def symmetrize(rho_n: np.ndarray, n: int, d: int) -> np.ndarray:
    """Average of P rho P† over all n! site permutations."""
    if n > 6:
        raise BudgetError("symmetrize enumerates n! permutations; n must be <= 6")
    rho_n = ta.as_matrix(rho_n)
    t = rho_n.reshape((d,) * (2 * n))
    acc = np.zeros_like(t)
    for perm in permutations(range(n)):
        acc += t.transpose(list(perm) + [p + n for p in perm])
    return acc.reshape(rho_n.shape) / math.factorial(n)
