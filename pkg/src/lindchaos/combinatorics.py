"""Brute-force oracles for the edge-product vanishing and tuple-counting lemmas."""

from __future__ import annotations

import math
from collections import Counter
from itertools import combinations, product
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import tensor as ta
from .errors import BudgetError, DimensionError
from .meanfield import centering_residuals
from .instances import random_hermitian, rng_for

ENUMERATION_BUDGET = 10**8
_CHUNK = 1 << 20


@dataclass(frozen=True)
class EdgeTuple:
    edges: tuple[tuple[int, int], ...]
    n: int

    def __post_init__(self):
        for i, j in self.edges:
            if not 1 <= i < j <= self.n:
                raise ValueError(f"edge ({i}, {j}) must satisfy 1 <= i < j <= {self.n}")

    @classmethod
    def of(cls, edges: Sequence[Sequence[int]], n: int) -> "EdgeTuple":
        return cls(tuple((int(i), int(j)) for i, j in edges), n)

    def has_isolated_endpoint(self) -> bool:
        counts = Counter(v for e in self.edges for v in e)
        return any(c == 1 for c in counts.values())


@dataclass(frozen=True)
class AdmissibleCount:
    n: int
    k: int
    count: int
    bound: float
    regime: str

    def __post_init__(self):
        assert self.regime == ("small_k" if 2 * self.k <= self.n else "large_k")


def lemma_bound(n: int, k: int) -> float:
    """k e^k N^k k^k when 2k <= N, else N^{2k}."""
    if 2 * k <= n:
        return k * math.e**k * n**k * k**k
    return float(n ** (2 * k))


def intermediate_bound(n: int, k: int) -> int:
    """sum_{r=1}^{k} C(N, r) r^{2k}."""
    return sum(math.comb(n, r) * r ** (2 * k) for r in range(1, k + 1))


def enumerate_admissible(n: int, k: int) -> AdmissibleCount:
    """Count ordered 2k-tuples over {1..n} in which no value occurs exactly once.

    Every tuple is visited: tuple index ``t`` in [0, n^{2k}) is decoded into
    base-n digits chunk by chunk and per-value multiplicities are tallied.
    """
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    length = 2 * k
    total = n**length
    if total > ENUMERATION_BUDGET:
        raise BudgetError(f"{n}^{length} tuples exceed the enumeration budget")
    count = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        mult = np.zeros((idx.size, n), dtype=np.int8)
        rows = np.arange(idx.size)
        for _ in range(length):
            mult[rows, idx % n] += 1
            idx //= n
        count += int(np.count_nonzero(~np.any(mult == 1, axis=1)))
    regime = "small_k" if 2 * k <= n else "large_k"
    return AdmissibleCount(n=n, k=k, count=count, bound=lemma_bound(n, k), regime=regime)


class CountCheck(NamedTuple):
    count: int
    bound: float
    ok: bool
    intermediate: int
    intermediate_ok: bool


def counting_bound_check(n: int, k: int) -> CountCheck:
    res = enumerate_admissible(n, k)
    inter = intermediate_bound(n, k)
    return CountCheck(res.count, res.bound, res.count <= res.bound, inter, res.count <= inter)


def random_centered_h(rho: np.ndarray, seed: int) -> np.ndarray:
    """Random Hermitian h on d^2 with tr_2((1⊗rho)h) = tr_1((rho⊗1)h) = 0."""
    rho = ta.as_matrix(rho)
    d = rho.shape[0]
    h0 = random_hermitian(d * d, rng_for(seed))
    return center(h0, rho)


def center(h0: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """h0 - B2 ⊗ 1 - 1 ⊗ B1 + c 1, the doubly-centered version of h0."""
    d = rho.shape[0]
    eye = np.eye(d, dtype=complex)
    b2 = ta.partial_trace(np.kron(eye, rho) @ h0, [1], 2, d)
    b1 = ta.partial_trace(np.kron(rho, eye) @ h0, [2], 2, d)
    c = np.trace(np.kron(rho, rho) @ h0)
    return h0 - np.kron(b2, eye) - np.kron(eye, b1) + c * np.eye(d * d)


def isolated_vertex_trace(
    h: np.ndarray,
    rho: np.ndarray,
    edges: EdgeTuple | Sequence[Sequence[int]],
    n: int,
    center_tol: float = 1e-10,
) -> complex:
    """tr(rho^{⊗n} h_{e_1} ... h_{e_k}) by explicit embedding and multiplication."""
    h = ta.as_matrix(h)
    rho = ta.as_matrix(rho)
    d = rho.shape[0]
    if d**n > ta.MAX_DIM:
        raise DimensionError(f"d**n = {d ** n} exceeds {ta.MAX_DIM}")
    if max(centering_residuals(h, rho)) > center_tol:
        raise ValueError("h is not centered with respect to rho")
    if not isinstance(edges, EdgeTuple):
        edges = EdgeTuple.of(edges, n)
    prod = np.eye(d**n, dtype=complex)
    for i, j in edges.edges:
        prod = prod @ ta.embed(h, [i, j], n, d)
    return complex(np.trace(ta.kron_power(rho, n) @ prod))


def all_edge_tuples(n: int, k: int) -> list[EdgeTuple]:
    pairs = list(combinations(range(1, n + 1), 2))
    return [EdgeTuple(tuple(es), n) for es in product(pairs, repeat=k)]
