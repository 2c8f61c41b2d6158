"""Dense complex matrix kernel.

Operators are plain ``numpy`` complex arrays of shape ``(dim, dim)``.  Sites of
a tensor product are numbered from 1, so ``embed(o, [1], ...)`` acts on the
leftmost factor of ``H ⊗ H ⊗ ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, NotFaithfulError, NotHermitianError

MAX_DIM = 4096


@dataclass(frozen=True)
class Tolerances:
    herm_tol: float = 1e-10
    trace_tol: float = 1e-9
    recon_tol: float = 1e-10
    eig_floor: float = 1e-14
    supp_tol: float = 1e-12
    psd_clip: float = 1e-10
    sanitize_warn: float = 1e-7
    sanitize_fail: float = 1e-4

    def replace(self, **overrides) -> "Tolerances":
        unknown = set(overrides) - set(self.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown tolerance(s): {sorted(unknown)}")
        return Tolerances(**{**self.__dict__, **overrides})


DEFAULT_TOL = Tolerances()

# Pauli matrices and the qubit lowering operator |0><1|.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
LOWER = np.array([[0, 1], [0, 0]], dtype=complex)


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


def herm_residual(m: np.ndarray) -> float:
    """max |M_ij - conj(M_ji)|."""
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL.herm_tol) -> bool:
    """Residual at most tol, scaled by the largest entry once that exceeds 1."""
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return herm_residual(m) <= tol * scale


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def n_sites_of(dim: int, d: int) -> int:
    """Number of factors n with d**n == dim, or DimensionError."""
    if d < 1:
        raise DimensionError(f"local dimension must be positive, got {d}")
    if d == 1:
        if dim != 1:
            raise DimensionError(f"dimension {dim} is not a power of 1")
        return 1
    n, p = 0, 1
    while p < dim:
        p *= d
        n += 1
    if p != dim:
        raise DimensionError(f"dimension {dim} is not a power of {d}")
    return n


def check_density(
    rho,
    tol: Tolerances = DEFAULT_TOL,
    psd_floor: float | None = None,
) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    Raises ``NotHermitianError`` or ``ValueError`` when the Hermiticity, trace
    or positivity invariant fails.  ``psd_floor`` defaults to ``tol.psd_clip``.
    """
    rho = as_matrix(rho)
    if not is_hermitian(rho, tol.herm_tol):
        raise NotHermitianError(f"state is not Hermitian (residual {herm_residual(rho):.3e})")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol.trace_tol:
        raise ValueError(f"state trace {tr!r} differs from 1")
    floor = tol.psd_clip if psd_floor is None else psd_floor
    lmin = np.linalg.eigvalsh(hermitize(rho))[0]
    if lmin < -floor:
        raise ValueError(f"state has negative eigenvalue {lmin:.3e}")
    return rho


def kron(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more operators, left factor first."""
    if not ops:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def kron_power(o: np.ndarray, n: int) -> np.ndarray:
    return kron(*([o] * n))


def _check_sites(sites: Sequence[int], n_sites: int) -> list[int]:
    sites = [int(s) for s in sites]
    if len(set(sites)) != len(sites):
        raise DimensionError(f"repeated site in {sites}")
    for s in sites:
        if not 1 <= s <= n_sites:
            raise DimensionError(f"site {s} outside 1..{n_sites}")
    return sites


def embed(o: np.ndarray, sites: Sequence[int], n_sites: int, d: int) -> np.ndarray:
    """Operator acting as ``o`` on ``sites`` (in that order) and as 1 elsewhere."""
    o = as_matrix(o)
    sites = _check_sites(sites, n_sites)
    k = len(sites)
    if o.shape[0] != d**k:
        raise DimensionError(f"operator of dimension {o.shape[0]} cannot act on {k} sites of dimension {d}")
    if d ** n_sites > MAX_DIM:
        raise DimensionError(f"d**n = {d ** n_sites} exceeds {MAX_DIM}")
    rest = [s for s in range(1, n_sites + 1) if s not in sites]
    full = np.kron(o, np.eye(d ** len(rest), dtype=complex))
    order = sites + rest
    # axis j of the kron'd tensor belongs to site order[j]
    perm = [order.index(s) for s in range(1, n_sites + 1)]
    t = full.reshape((d,) * (2 * n_sites))
    t = t.transpose(perm + [p + n_sites for p in perm])
    return t.reshape(d**n_sites, d**n_sites).copy()


def partial_trace(m: np.ndarray, keep: Iterable[int], n_sites: int, d: int) -> np.ndarray:
    """Trace out every site not in ``keep``; kept sites stay in ascending order."""
    m = as_matrix(m)
    if m.shape[0] != d**n_sites:
        raise DimensionError(f"matrix of dimension {m.shape[0]} is not d**n = {d ** n_sites}")
    keep = sorted(set(_check_sites(list(keep), n_sites)))
    if len(keep) == n_sites:
        return m.copy()
    t = m.reshape((d,) * (2 * n_sites))
    letters = [chr(ord("a") + i) for i in range(2 * n_sites)]
    row = letters[:n_sites]
    col = letters[n_sites:]
    for s in range(n_sites):
        if s + 1 not in keep:
            col[s] = row[s]
    out = "".join(row[s - 1] for s in keep) + "".join(col[s - 1] for s in keep)
    dk = d ** len(keep)
    return np.einsum("".join(row) + "".join(col) + "->" + out, t).reshape(dk, dk)


def apply_local(o: np.ndarray, rho: np.ndarray, site: int, n_sites: int, d: int, side: str = "left") -> np.ndarray:
    """``O_l @ rho`` (side='left') or ``rho @ O_l`` (side='right') without forming O_l."""
    dim = rho.shape[0]
    left = d ** (site - 1)
    right = dim // (left * d)
    if side == "left":
        t = rho.reshape(left, d, right * rho.shape[1])
        return np.matmul(o, t).reshape(rho.shape)
    t = rho.reshape(rho.shape[0] * left, d, right)
    return np.matmul(o.T, t).reshape(rho.shape)


def swap_operator(d: int) -> np.ndarray:
    """The flip S(psi ⊗ phi) = phi ⊗ psi on C^d ⊗ C^d."""
    if d < 1:
        raise DimensionError("d must be >= 1")
    s = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def permutation_operator(perm: Sequence[int], d: int) -> np.ndarray:
    """Unitary sending the factor at site ``k`` to site ``perm[k-1]`` (both 1-based)."""
    n = len(perm)
    p0 = [p - 1 for p in perm]
    if sorted(p0) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 1..{n}")
    dim = d**n
    idx = np.arange(dim).reshape((d,) * n)
    # output axis p0[k] takes input axis k
    inv = np.argsort(p0)
    src = idx.transpose(inv).reshape(-1)
    out = np.zeros((dim, dim), dtype=complex)
    out[np.arange(dim), src] = 1.0
    return out


class Eig(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def herm_eig(m: np.ndarray, herm_tol: float = DEFAULT_TOL.herm_tol) -> Eig:
    """Ascending eigenpairs of a Hermitian matrix with a deterministic phase.

    Each eigenvector is rotated so its largest-magnitude component is real
    and positive.
    """
    m = as_matrix(m)
    if not is_hermitian(m, herm_tol):
        raise NotHermitianError(f"matrix is not Hermitian (residual {herm_residual(m):.3e})")
    w, u = np.linalg.eigh(hermitize(m))
    pivot = np.argmax(np.abs(u), axis=0)
    phase = u[pivot, np.arange(u.shape[1])]
    u = u * (np.abs(phase) / phase)[None, :]
    return Eig(w, u)


def herm_apply(
    m: np.ndarray,
    f: Callable[[np.ndarray], np.ndarray],
    herm_tol: float = DEFAULT_TOL.herm_tol,
) -> np.ndarray:
    """Functional calculus U f(λ) U†."""
    w, u = herm_eig(m, herm_tol)
    return (u * f(w)[None, :]) @ u.conj().T


def herm_exp(m: np.ndarray, herm_tol: float = DEFAULT_TOL.herm_tol) -> np.ndarray:
    return herm_apply(m, np.exp, herm_tol)


def herm_log(m: np.ndarray, eig_floor: float = DEFAULT_TOL.eig_floor, herm_tol: float = DEFAULT_TOL.herm_tol) -> np.ndarray:
    w, u = herm_eig(m, herm_tol)
    if w[0] < eig_floor:
        raise NotFaithfulError(f"smallest eigenvalue {w[0]:.3e} below floor {eig_floor:.1e}")
    return (u * np.log(w)[None, :]) @ u.conj().T


def log_divided_differences(w: np.ndarray, degen_rtol: float = 1e-12) -> np.ndarray:
    """Matrix of (log w_i - log w_j) / (w_i - w_j), with limit 1/w_i when w_i ≈ w_j."""
    wi = w[:, None]
    wj = w[None, :]
    diff = wi - wj
    degenerate = np.abs(diff) < degen_rtol * np.max(w)
    safe = np.where(degenerate, 1.0, diff)
    # log1p keeps precision when w_i and w_j are close but not degenerate
    dd = np.log1p(safe / wj) / safe
    return np.where(degenerate, 1.0 / np.broadcast_to(wi, diff.shape), dd)


def frechet_log(
    sigma: np.ndarray,
    x: np.ndarray,
    eig_floor: float = DEFAULT_TOL.eig_floor,
    herm_tol: float = DEFAULT_TOL.herm_tol,
) -> np.ndarray:
    """Derivative of ``log`` at ``sigma`` in direction ``x``.

    Evaluated in the eigenbasis of ``sigma`` as a Hadamard product with the
    divided differences of ``log``; ``x`` need not be Hermitian.
    """
    w, u = herm_eig(sigma, herm_tol)
    if w[0] < eig_floor:
        raise NotFaithfulError(f"sigma is not faithful (smallest eigenvalue {w[0]:.3e})")
    ud = u.conj().T
    xt = ud @ as_matrix(x) @ u
    return u @ (xt * log_divided_differences(w)) @ ud


class Spectral(NamedTuple):
    trace_norm: float
    op_norm: float
    lambda_min: float | None


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(as_matrix(m), compute_uv=False)))


def op_norm(m: np.ndarray) -> float:
    m = as_matrix(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def lambda_min(m: np.ndarray, herm_tol: float = DEFAULT_TOL.herm_tol) -> float:
    m = as_matrix(m)
    if not is_hermitian(m, herm_tol):
        raise NotHermitianError("lambda_min requires a Hermitian matrix")
    return float(np.linalg.eigvalsh(hermitize(m))[0])


def spectral_functionals(m: np.ndarray, with_lambda_min: bool = True, herm_tol: float = DEFAULT_TOL.herm_tol) -> Spectral:
    """Trace norm, operator norm and (for Hermitian input) the smallest eigenvalue."""
    m = as_matrix(m)
    s = np.linalg.svd(m, compute_uv=False)
    lmin = lambda_min(m, herm_tol) if with_lambda_min else None
    return Spectral(float(np.sum(s)), float(s[0]), lmin)
