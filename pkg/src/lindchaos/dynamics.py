"""N-body and mean-field Lindblad flows.

The N-body generator is

    L^N(rho) = -i[H^N, rho] + sum_l (L_l rho L_l† - {L_l† L_l, rho} / 2),
    H^N = sum_l H_l + (1/N) sum_{l<l'} A_{ll'},

and the mean-field flow replaces the pair interaction by the one-body
potential A^m = tr_2((1 ⊗ m) A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import tensor as ta
from .errors import DimensionError, ModelError, NotFaithfulError, NotHermitianError, NumericalError
from .tensor import DEFAULT_TOL, Tolerances

Rhs = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ModelParams:
    """One-body Hamiltonian, exchange-symmetric pair interaction and jump operator."""

    d: int
    h_tilde: np.ndarray
    a_int: np.ndarray
    l_jump: np.ndarray
    herm_tol: float = DEFAULT_TOL.herm_tol

    def __post_init__(self):
        d = self.d
        h = ta.as_matrix(self.h_tilde)
        a = ta.as_matrix(self.a_int)
        lj = ta.as_matrix(self.l_jump)
        if h.shape != (d, d) or lj.shape != (d, d) or a.shape != (d * d, d * d):
            raise DimensionError(
                f"model shapes {h.shape}, {a.shape}, {lj.shape} do not match d={d}"
            )
        if not ta.is_hermitian(h, self.herm_tol):
            raise NotHermitianError("h_tilde must be Hermitian")
        if not ta.is_hermitian(a, self.herm_tol):
            raise NotHermitianError("a_int must be Hermitian")
        s = ta.swap_operator(d)
        if np.max(np.abs(s @ a @ s - a)) > self.herm_tol:
            raise ModelError("a_int must be exchange-symmetric (S A S = A)")
        object.__setattr__(self, "h_tilde", h)
        object.__setattr__(self, "a_int", a)
        object.__setattr__(self, "l_jump", lj)

    @property
    def a_norm(self) -> float:
        return ta.op_norm(self.a_int)

    @property
    def l_norm(self) -> float:
        return ta.op_norm(self.l_jump)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[np.ndarray]
    n: int = 1
    params: ModelParams | None = None
    # worst pre-repair diagnostics over every integrator step
    min_eig_before_clip: float = math.inf
    max_trace_drift: float = 0.0
    max_repair: float = 0.0
    warned: bool = False
    n_steps: int = 0

    def __len__(self) -> int:
        return len(self.times)

    def at(self, t: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise KeyError(f"no recorded state at t={t}")
        return self.states[i]


def a_sigma(a_int: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Mean-field potential tr_2((1 ⊗ sigma) A)."""
    a_int = ta.as_matrix(a_int)
    sigma = ta.as_matrix(sigma)
    d = sigma.shape[0]
    if a_int.shape[0] != d * d:
        raise DimensionError(f"A has dimension {a_int.shape[0]}, expected {d * d}")
    # tr_2((1⊗σ)A)_{ij} = sum_{k,l} σ_{lk} A_{(i,k),(j,l)}
    t = a_int.reshape(d, d, d, d)
    return np.einsum("lk,ikjl->ij", sigma, t)


def hamiltonian_n(params: ModelParams, n: int) -> np.ndarray:
    d = params.d
    if d**n > ta.MAX_DIM:
        raise DimensionError(f"d**n = {d ** n} exceeds {ta.MAX_DIM}")
    h = np.zeros((d**n, d**n), dtype=complex)
    for l in range(1, n + 1):
        h += ta.embed(params.h_tilde, [l], n, d)
    for l in range(1, n + 1):
        for r in range(l + 1, n + 1):
            h += ta.embed(params.a_int, [l, r], n, d) / n
    return h


class NBodyGenerator:
    """Matrix-free L^N for a fixed model and particle number.

    The Hamiltonian and the anticommutator part are folded into one dense
    effective Hamiltonian; jump terms are applied factor by factor.
    """

    def __init__(self, params: ModelParams, n: int, assume_hermitian: bool = False):
        self.params = params
        self.n = n
        self.assume_hermitian = assume_hermitian
        d = params.d
        lj = params.l_jump
        k_sum = np.zeros((d**n, d**n), dtype=complex)
        ldl = ta.dagger(lj) @ lj
        for l in range(1, n + 1):
            k_sum += ta.embed(ldl, [l], n, d)
        self.h_n = hamiltonian_n(params, n)
        self.h_eff = self.h_n - 0.5j * k_sum
        self.h_eff_dag = ta.dagger(self.h_eff)
        self._l = lj
        self._ldag = ta.dagger(lj)
        self._dissipative = bool(np.any(lj != 0))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        d, n = self.params.d, self.n
        if rho.shape[0] != d**n:
            raise DimensionError(f"state has dimension {rho.shape[0]}, expected {d ** n}")
        if self.assume_hermitian:
            # rho = rho† gives rho H_eff† = (H_eff rho)†
            t = -1j * (self.h_eff @ rho)
            out = t + t.conj().T
        else:
            out = -1j * (self.h_eff @ rho - rho @ self.h_eff_dag)
        if self._dissipative:
            for l in range(1, n + 1):
                t = ta.apply_local(self._l, rho, l, n, d, "left")
                out += ta.apply_local(self._ldag, t, l, n, d, "right")
        return out


def lindblad_rhs_n(rho: np.ndarray, params: ModelParams, n: int) -> np.ndarray:
    """L^N(rho); builds the generator on each call, so prefer NBodyGenerator in loops."""
    return NBodyGenerator(params, n)(ta.as_matrix(rho))


def superoperator_n(params: ModelParams, n: int) -> np.ndarray:
    """Assembled matrix of L^N acting on row-major vec(rho); reference for small n."""
    d = params.d
    dim = d**n
    if dim > 64:
        raise DimensionError("assembled superoperator is limited to d**n <= 64")
    eye = np.eye(dim, dtype=complex)
    h = hamiltonian_n(params, n)
    # row-major: vec(A rho B) = (A ⊗ B^T) vec(rho)
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for l in range(1, n + 1):
        ll = ta.embed(params.l_jump, [l], n, d)
        ldl = ta.dagger(ll) @ ll
        sup += np.kron(ll, ll.conj())
        sup -= 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return sup


def meanfield_rhs(m: np.ndarray, params: ModelParams) -> np.ndarray:
    """-i[H + A^m, m] + L m L† - {L†L, m}/2."""
    m = ta.as_matrix(m)
    if m.shape[0] != params.d:
        raise DimensionError(f"state has dimension {m.shape[0]}, expected {params.d}")
    lj = params.l_jump
    ldl = ta.dagger(lj) @ lj
    h = params.h_tilde + a_sigma(params.a_int, m)
    return -1j * ta.commutator(h, m) + lj @ m @ ta.dagger(lj) - 0.5 * ta.anticommutator(ldl, m)


def meanfield_rhs_partial_trace(m: np.ndarray, params: ModelParams) -> np.ndarray:
    """Same flow with the interaction written as -i tr_2([A, m ⊗ m])."""
    m = ta.as_matrix(m)
    d = params.d
    lj = params.l_jump
    ldl = ta.dagger(lj) @ lj
    inter = ta.partial_trace(ta.commutator(params.a_int, np.kron(m, m)), [1], 2, d)
    return (
        -1j * ta.commutator(params.h_tilde, m)
        - 1j * inter
        + lj @ m @ ta.dagger(lj)
        - 0.5 * ta.anticommutator(ldl, m)
    )


class MeanFieldGenerator:
    def __init__(self, params: ModelParams):
        self.params = params

    def __call__(self, m: np.ndarray) -> np.ndarray:
        return meanfield_rhs(m, self.params)


def rk4_step(f: Rhs, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_sizes(t_end: float, dt: float) -> list[float]:
    """Fixed steps of size dt with a final partial step when dt does not divide t_end."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    n_full = int(math.floor(t_end / dt + 1e-9))
    steps = [dt] * n_full
    rest = t_end - n_full * dt
    if rest > 1e-12 * max(1.0, t_end):
        steps.append(rest)
    return steps


def sanitize(rho: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, dict]:
    """Re-Hermitize, clip negative eigenvalues and renormalize the trace.

    Returns the repaired state and the pre-repair diagnostics
    ``herm``, ``trace_drift``, ``lambda_min`` and ``repair``.
    """
    if not np.all(np.isfinite(rho)):
        raise NumericalError("non-finite entries in state")
    herm = ta.herm_residual(rho)
    rho = ta.hermitize(rho)
    drift = abs(np.trace(rho).real - 1.0)
    lmin = float(np.linalg.eigvalsh(rho)[0])
    if lmin < -tol.psd_clip:
        w, u = np.linalg.eigh(rho)
        w = np.where(w < 0, 0.0, w)
        rho = (u * w[None, :]) @ u.conj().T
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol.trace_tol:
        rho = rho / tr
    repair = max(herm, drift, max(0.0, -lmin))
    return rho, {"herm": herm, "trace_drift": drift, "lambda_min": lmin, "repair": repair}


def integrate(
    rhs: Rhs,
    state0: np.ndarray,
    t_end: float,
    dt: float,
    record_stride: int = 1,
    tol: Tolerances = DEFAULT_TOL,
    sanitize_states: bool = True,
    n: int = 1,
    params: ModelParams | None = None,
) -> Trajectory:
    """Classical RK4 with fixed step ``dt``, recording every ``record_stride`` steps and at t_end."""
    if record_stride < 1:
        raise ValueError("record_stride must be >= 1")
    rho = ta.as_matrix(state0).copy()
    steps = step_sizes(t_end, dt)
    traj = Trajectory(times=np.array([0.0]), states=[rho.copy()], n=n, params=params)
    times = [0.0]
    t = 0.0
    for i, h in enumerate(steps, start=1):
        rho = rk4_step(rhs, rho, h)
        t = t_end if i == len(steps) else i * dt
        if sanitize_states:
            rho, diag = sanitize(rho, tol)
            traj.min_eig_before_clip = min(traj.min_eig_before_clip, diag["lambda_min"])
            traj.max_trace_drift = max(traj.max_trace_drift, diag["trace_drift"])
            traj.max_repair = max(traj.max_repair, diag["repair"])
            if diag["repair"] > tol.sanitize_fail:
                raise NumericalError(f"state repair {diag['repair']:.3e} at t={t:.6g} exceeds sanitize_fail")
            if diag["repair"] > tol.sanitize_warn:
                traj.warned = True
        elif not np.all(np.isfinite(rho)):
            raise NumericalError("non-finite entries in state")
        if i % record_stride == 0 or i == len(steps):
            times.append(t)
            traj.states.append(rho.copy())
    traj.times = np.array(times)
    traj.n_steps = len(steps)
    return traj


def defect_operator(m: np.ndarray, params: ModelParams, n: int) -> np.ndarray:
    """(1/N) sum_{l<r} A_lr - sum_l (A^m)_l on d**n dimensions."""
    m = ta.as_matrix(m)
    d = params.d
    if m.shape[0] != d:
        raise DimensionError(f"m has dimension {m.shape[0]}, expected {d}")
    am = a_sigma(params.a_int, m)
    delta = np.zeros((d**n, d**n), dtype=complex)
    for l in range(1, n + 1):
        delta -= ta.embed(am, [l], n, d)
        for r in range(l + 1, n + 1):
            delta += ta.embed(params.a_int, [l, r], n, d) / n
    return delta


def tensor_power_derivative(m: np.ndarray, mdot: np.ndarray, n: int) -> np.ndarray:
    """d/dt m^{⊗n} by the product rule."""
    out = 0
    for l in range(n):
        out = out + ta.kron(*([m] * l + [mdot] + [m] * (n - l - 1)))
    return out


def defect_identity_residual(m: np.ndarray, params: ModelParams, n: int) -> float:
    """max |L^N(m^{⊗n}) - d/dt m^{⊗n} + i[Δ, m^{⊗n}]|."""
    m = ta.as_matrix(m)
    big = ta.kron_power(m, n)
    lhs = lindblad_rhs_n(big, params, n) - tensor_power_derivative(m, meanfield_rhs(m, params), n)
    rhs = -1j * ta.commutator(defect_operator(m, params, n), big)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass
class DuhamelResult:
    times: np.ndarray
    m: list[np.ndarray]
    v: list[np.ndarray]
    integral: list[np.ndarray] = field(default_factory=list)

    def residuals(self) -> np.ndarray:
        """Operator-norm residual of m_t - V_t m_0 V_t† - integral at each time."""
        m0 = self.m[0]
        return np.array(
            [
                ta.op_norm(mt - vt @ m0 @ ta.dagger(vt) - it)
                for mt, vt, it in zip(self.m, self.v, self.integral)
            ]
        )

    def integral_lambda_min(self) -> np.ndarray:
        return np.array([ta.lambda_min(ta.hermitize(it)) for it in self.integral])


def _sandwich_inverse(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    """V^{-1} X (V†)^{-1} via two linear solves."""
    y = np.linalg.solve(v, x)
    return ta.dagger(np.linalg.solve(v, ta.dagger(y)))


def duhamel_decompose(
    params: ModelParams,
    m0: np.ndarray,
    t_end: float,
    dt: float,
    tol: Tolerances = DEFAULT_TOL,
    max_cond: float = 1e12,
) -> DuhamelResult:
    """Propagator V_t and dissipative integral of the mean-field flow.

    (m, V) are advanced jointly by RK4 with dV/dt = -i K_t V,
    K_t = H + A^{m_t} - (i/2) L†L.  The integral of V_s^{-1} L m_s L† (V_s†)^{-1}
    is accumulated by the trapezoidal rule and conjugated back by V_t.
    """
    m0 = ta.as_matrix(m0)
    if ta.lambda_min(m0, tol.herm_tol) < tol.eig_floor:
        raise NotFaithfulError("m0 must be faithful")
    d = params.d
    lj = params.l_jump
    ldag = ta.dagger(lj)
    ldl = ldag @ lj

    def joint(y: np.ndarray) -> np.ndarray:
        m, v = y[0], y[1]
        k = params.h_tilde + a_sigma(params.a_int, m) - 0.5j * ldl
        return np.stack([meanfield_rhs(m, params), -1j * k @ v])

    def source(m: np.ndarray, v: np.ndarray) -> np.ndarray:
        if np.linalg.cond(v) > max_cond:
            raise NumericalError("propagator V_t is numerically singular")
        return _sandwich_inverse(v, lj @ m @ ldag)

    y = np.stack([m0.copy(), np.eye(d, dtype=complex)])
    acc = np.zeros((d, d), dtype=complex)
    prev = source(y[0], y[1])
    times, ms, vs, ints = [0.0], [y[0].copy()], [y[1].copy()], [acc.copy()]
    t = 0.0
    for h in step_sizes(t_end, dt):
        y = rk4_step(joint, y, h)
        t += h
        cur = source(y[0], y[1])
        acc = acc + 0.5 * h * (prev + cur)
        prev = cur
        times.append(t)
        ms.append(y[0].copy())
        vs.append(y[1].copy())
        ints.append(y[1] @ acc @ ta.dagger(y[1]))
    return DuhamelResult(np.array(times), ms, vs, ints)
