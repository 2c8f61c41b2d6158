"""Umegaki relative entropy and the inequalities used around it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import tensor as ta
from .errors import DimensionError, NotFaithfulError, SupportError
from .tensor import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class EntropyResult:
    """A relative entropy value; ``support_violation`` tags the +inf case."""

    value: float
    support_violation: bool = False

    @classmethod
    def infinite(cls) -> "EntropyResult":
        return cls(math.inf, True)

    @property
    def finite(self) -> bool:
        return not self.support_violation

    def __float__(self) -> float:
        return self.value


def _xlogx(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(np.sum(p * np.log(p)))


def relative_entropy(rho, sigma, tol: Tolerances = DEFAULT_TOL) -> EntropyResult:
    """D(rho || sigma) = tr rho (log rho - log sigma).

    Each logarithm is taken in its own eigenbasis, with 0 log 0 = 0.  The
    result is the +inf sentinel when an eigenvector of ``rho`` with weight
    above ``supp_tol`` overlaps the (numerical) kernel of ``sigma``.
    """
    rho = ta.as_matrix(rho)
    sigma = ta.as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise DimensionError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    p, u = np.linalg.eigh(ta.hermitize(rho))
    s, v = np.linalg.eigh(ta.hermitize(sigma))
    supp_tol = tol.supp_tol
    null = s < supp_tol
    if np.any(null):
        overlap = np.abs(v[:, null].conj().T @ u[:, p > supp_tol]) ** 2
        if overlap.size and np.max(np.sum(overlap, axis=0)) > supp_tol:
            return EntropyResult.infinite()
    # diagonal of V† rho V gives the weights of rho on sigma's eigenvectors
    weights = np.real(np.einsum("ij,jk,ki->i", v.conj().T, rho, v))
    cross = float(np.sum(weights[~null] * np.log(s[~null])))
    value = _xlogx(p) - cross
    return EntropyResult(value)


def normalized_entropy(rho_n, m, n: int, tol: Tolerances = DEFAULT_TOL) -> float:
    """(1/n) D(rho_n || m^{⊗n}) using log(m^{⊗n}) = sum of one-site logs."""
    rho_n = ta.as_matrix(rho_n)
    m = ta.as_matrix(m)
    d = m.shape[0]
    if rho_n.shape[0] != d**n:
        raise DimensionError(f"rho_n has dimension {rho_n.shape[0]}, expected {d}**{n}")
    lam = ta.herm_log(m, tol.eig_floor, tol.herm_tol)
    p = np.linalg.eigvalsh(ta.hermitize(rho_n))
    cross = 0.0
    for site in range(1, n + 1):
        marginal = ta.partial_trace(rho_n, [site], n, d)
        cross += float(np.real(np.trace(marginal @ lam)))
    return (_xlogx(p) - cross) / n


def _finite(result: EntropyResult) -> float:
    if result.support_violation:
        raise SupportError("relative entropy is infinite")
    return result.value


def pinsker_gap(rho, sigma, tol: Tolerances = DEFAULT_TOL) -> float:
    """D(rho||sigma) - ||rho - sigma||_1^2 / 2, nonnegative up to round-off."""
    dval = _finite(relative_entropy(rho, sigma, tol))
    return dval - 0.5 * ta.trace_norm(ta.as_matrix(rho) - ta.as_matrix(sigma)) ** 2


def golden_thompson_gap(a, b, tol: Tolerances = DEFAULT_TOL) -> float:
    """tr(e^a e^b) - tr(e^{a+b}) for Hermitian a, b."""
    ea = ta.herm_exp(a, tol.herm_tol)
    eb = ta.herm_exp(b, tol.herm_tol)
    eab = ta.herm_exp(ta.as_matrix(a) + ta.as_matrix(b), tol.herm_tol)
    return float(np.real(np.trace(ea @ eb)) - np.real(np.trace(eab)))


def variational_gap(rho, sigma, x, lam: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """(1/λ) D(rho||sigma) + (1/λ) log tr(sigma e^{λx}) - tr(rho x)."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    sigma = ta.as_matrix(sigma)
    if ta.lambda_min(sigma, tol.herm_tol) < tol.eig_floor:
        raise NotFaithfulError("sigma must be faithful")
    x = ta.as_matrix(x)
    if not ta.is_hermitian(x, tol.herm_tol):
        raise ta.NotHermitianError("x must be Hermitian")
    dval = _finite(relative_entropy(rho, sigma, tol))
    # shift by the top eigenvalue so e^{λx} cannot overflow
    w, u = ta.herm_eig(x, tol.herm_tol)
    top = w[-1]
    weights = np.real(np.einsum("ij,jk,ki->i", u.conj().T, sigma, u))
    log_mgf = lam * top + math.log(float(np.sum(weights * np.exp(lam * (w - top)))))
    return dval / lam + log_mgf / lam - float(np.real(np.trace(ta.as_matrix(rho) @ x)))


def superadditivity_gap(rho_n, sigma, k: int, tol: Tolerances = DEFAULT_TOL) -> float:
    """D(rho_N || sigma^{⊗N}) minus the sum over consecutive k-blocks of the block entropies."""
    rho_n = ta.as_matrix(rho_n)
    sigma = ta.as_matrix(sigma)
    d = sigma.shape[0]
    n_sites = ta.n_sites_of(rho_n.shape[0], d)
    if k < 1 or n_sites % k:
        raise DimensionError(f"{n_sites} sites cannot be split into blocks of size {k}")
    total = n_sites * normalized_entropy(rho_n, sigma, n_sites, tol)
    blocks = 0.0
    for j in range(n_sites // k):
        block = list(range(j * k + 1, (j + 1) * k + 1))
        marginal = ta.partial_trace(rho_n, block, n_sites, d)
        blocks += k * normalized_entropy(marginal, sigma, k, tol)
    return total - blocks


def monotonicity_profile(
    rho,
    sigma,
    generator: Callable[[np.ndarray], np.ndarray],
    s_grid: Sequence[float],
    dt: float = 1e-3,
    tol: Tolerances = DEFAULT_TOL,
) -> list[float]:
    """g(s) = D(e^{sL} rho || e^{sL} sigma) on an ascending grid starting at 0.

    Both states are propagated jointly by fixed-step RK4 between grid points.
    """
    from .dynamics import rk4_step

    s_grid = [float(s) for s in s_grid]
    if any(b < a for a, b in zip(s_grid, s_grid[1:])) or (s_grid and s_grid[0] < 0):
        raise ValueError("s_grid must be ascending and nonnegative")
    r = ta.as_matrix(rho).copy()
    g = ta.as_matrix(sigma).copy()
    now = 0.0
    out = []
    for s in s_grid:
        while now < s - 1e-15:
            h = min(dt, s - now)
            r = ta.hermitize(rk4_step(generator, r, h))
            g = ta.hermitize(rk4_step(generator, g, h))
            now += h
        res = relative_entropy(r, g, tol)
        if res.support_violation:
            raise SupportError(f"support violation at s={s}")
        out.append(res.value)
    return out
