"""Two-body observables built from the mean-field state and their moments.

With Λ = log m:

    a     = -i [A, Λ ⊗ 1 + 1 ⊗ Λ]
    b     = tr_2((1 ⊗ m) a)
    a_hat = a - b ⊗ 1 - 1 ⊗ b

``a_hat`` is centered with respect to ``m`` on both factors, which is what
makes first moments of W = (1/N) sum_{i<j} a_hat_{ij} vanish under m^{⊗N}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensor as ta
from .dynamics import a_sigma
from .errors import BudgetError, DimensionError
from .tensor import DEFAULT_TOL, Tolerances


@dataclass(frozen=True)
class InteractionObservables:
    a: np.ndarray
    b: np.ndarray
    a_hat: np.ndarray
    lam: np.ndarray


def interaction_observables(a_int: np.ndarray, m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> InteractionObservables:
    a_int = ta.as_matrix(a_int)
    m = ta.as_matrix(m)
    d = m.shape[0]
    if a_int.shape[0] != d * d:
        raise DimensionError(f"A has dimension {a_int.shape[0]}, expected {d * d}")
    lam = ta.herm_log(m, tol.eig_floor, tol.herm_tol)
    eye = np.eye(d, dtype=complex)
    a = -1j * ta.commutator(a_int, np.kron(lam, eye) + np.kron(eye, lam))
    b = ta.partial_trace(np.kron(eye, m) @ a, [1], 2, d)
    a_hat = a - np.kron(b, eye) - np.kron(eye, b)
    return InteractionObservables(a=a, b=b, a_hat=a_hat, lam=lam)


def centering_residuals(h: np.ndarray, rho: np.ndarray) -> tuple[float, float]:
    """max-abs of tr_2((1⊗rho) h) and tr_1((rho⊗1) h)."""
    rho = ta.as_matrix(rho)
    d = rho.shape[0]
    eye = np.eye(d, dtype=complex)
    r2 = ta.partial_trace(np.kron(eye, rho) @ h, [1], 2, d)
    r1 = ta.partial_trace(np.kron(rho, eye) @ h, [2], 2, d)
    return float(np.max(np.abs(r2))), float(np.max(np.abs(r1)))


def b_identity_residual(a_int: np.ndarray, m: np.ndarray, obs: InteractionObservables | None = None) -> float:
    """max |b - (-i [A^m, Λ])|."""
    obs = obs or interaction_observables(a_int, m)
    other = -1j * ta.commutator(a_sigma(a_int, m), obs.lam)
    return float(np.max(np.abs(obs.b - other)))


def build_w(a_hat: np.ndarray, n: int, d: int) -> np.ndarray:
    """W = (1/N) sum_{i<j} a_hat acting on factors i, j."""
    a_hat = ta.as_matrix(a_hat)
    if a_hat.shape[0] != d * d:
        raise DimensionError(f"a_hat has dimension {a_hat.shape[0]}, expected {d * d}")
    w = np.zeros((d**n, d**n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            w += ta.embed(a_hat, [i, j], n, d)
    return w / n


def _moment_data(m: np.ndarray, a_hat: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    m = ta.as_matrix(m)
    d = m.shape[0]
    if d**n > ta.MAX_DIM:
        raise BudgetError(f"d**n = {d ** n} exceeds {ta.MAX_DIM}")
    w_vals, u = np.linalg.eigh(ta.hermitize(build_w(a_hat, n, d)))
    big = ta.kron_power(m, n)
    weights = np.real(np.einsum("ij,jk,ki->i", u.conj().T, big, u))
    return w_vals, weights


def exp_moment(m: np.ndarray, a_hat: np.ndarray, n: int, q: float) -> float:
    """tr(m^{⊗n} exp(q W)) by exact diagonalization of W."""
    w_vals, weights = _moment_data(m, a_hat, n)
    return float(np.sum(weights * np.exp(q * w_vals)))


def moment_term(m: np.ndarray, a_hat: np.ndarray, n: int, k: int) -> float:
    """tr(m^{⊗n} W^k)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    w_vals, weights = _moment_data(m, a_hat, n)
    return float(np.sum(weights * w_vals**k))


def u_expectation(rho_n: np.ndarray, a_hat: np.ndarray, n: int, d: int) -> float:
    """tr(rho_N U) with U = W / N."""
    return float(np.real(np.trace(ta.as_matrix(rho_n) @ build_w(a_hat, n, d)))) / n
