from itertools import permutations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lindchaos import tensor as ta
from lindchaos.dynamics import (
    MeanFieldGenerator,
    ModelParams,
    NBodyGenerator,
    a_sigma,
    defect_identity_residual,
    defect_operator,
    duhamel_decompose,
    hamiltonian_n,
    integrate,
    lindblad_rhs_n,
    meanfield_rhs,
    meanfield_rhs_partial_trace,
    rk4_step,
    sanitize,
    step_sizes,
    superoperator_n,
)
from lindchaos.errors import DimensionError, NotFaithfulError, NotHermitianError, NumericalError
from lindchaos.instances import random_model, random_state, rng_for, symmetrize
from lindchaos.tensor import Tolerances

ZZ = np.kron(ta.Z, ta.Z)
XZ_ZX = np.kron(ta.X, ta.Z) + np.kron(ta.Z, ta.X)
M07 = np.diag([0.7, 0.3]).astype(complex)
ZERO2 = np.zeros((2, 2), dtype=complex)
ZERO4 = np.zeros((4, 4), dtype=complex)
seeds = st.integers(0, 2**32 - 1)


def model(h=ZERO2, a=ZERO4, lj=ZERO2):
    return ModelParams(d=2, h_tilde=h, a_int=a, l_jump=lj)


def test_model_params_validation():
    with pytest.raises(NotHermitianError):
        model(h=np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(ValueError, match="exchange-symmetric"):
        model(a=np.kron(ta.X, ta.Z))
    with pytest.raises(DimensionError):
        ModelParams(d=2, h_tilde=np.eye(3), a_int=ZERO4, l_jump=ZERO2)
    p = model(a=XZ_ZX, lj=0.5 * ta.LOWER)
    assert p.a_norm == pytest.approx(2) and p.l_norm == pytest.approx(0.5)


def test_a_sigma_examples():
    assert np.allclose(a_sigma(ZZ, np.eye(2) / 2), 0)
    assert np.allclose(a_sigma(ZZ, M07), 0.4 * ta.Z, atol=1e-15)
    out = a_sigma(XZ_ZX, M07)
    assert np.allclose(out, 0.4 * ta.X, atol=1e-15)
    assert ta.op_norm(out) == pytest.approx(0.4) and ta.op_norm(out) <= ta.op_norm(XZ_ZX)


@given(seeds)
def test_a_sigma_properties(seed):
    rng = rng_for(seed)
    p = random_model(3, rng)
    s1, s2 = random_state(3, rng), random_state(3, rng)
    out = a_sigma(p.a_int, s1)
    assert ta.is_hermitian(out, 1e-12)
    assert ta.op_norm(out) <= ta.op_norm(p.a_int) + 1e-12
    lin = a_sigma(p.a_int, 0.3 * s1 + 0.7 * s2) - 0.3 * out - 0.7 * a_sigma(p.a_int, s2)
    assert np.max(np.abs(lin)) <= 1e-13
    ref = ta.partial_trace(np.kron(np.eye(3), s1) @ p.a_int, [1], 2, 3)
    assert np.allclose(out, ref, atol=1e-13)


def test_a_sigma_dimension_error():
    with pytest.raises(DimensionError):
        a_sigma(np.eye(9), M07)


def test_nbody_rhs_examples(rng):
    p = random_model(2, rng)
    out = lindblad_rhs_n(random_state(8, rng), p, 3)
    assert abs(np.trace(out)) <= 1e-12 and ta.is_hermitian(out, 1e-12)
    damp = model(lj=ta.LOWER)
    assert np.allclose(lindblad_rhs_n(np.diag([0.0, 1.0]), damp, 1), np.diag([1.0, -1.0]), atol=0)
    with pytest.raises(DimensionError):
        lindblad_rhs_n(np.eye(4) / 4, p, 3)


def test_nbody_hamiltonian_structure():
    p = model(h=ta.Z, a=ZZ)
    h = hamiltonian_n(p, 3)
    ref = sum(ta.embed(ta.Z, [l], 3, 2) for l in (1, 2, 3))
    ref = ref + sum(ta.embed(ZZ, pair, 3, 2) for pair in ([1, 2], [1, 3], [2, 3])) / 3
    assert np.allclose(h, ref, atol=0)


def test_nbody_permutation_covariance(rng):
    p = random_model(2, rng)
    gen = NBodyGenerator(p, 3)
    rho = random_state(8, rng)
    for perm in permutations((1, 2, 3)):
        u = ta.permutation_operator(perm, 2)
        lhs = gen(u @ rho @ u.conj().T)
        rhs = u @ gen(rho) @ u.conj().T
        assert np.max(np.abs(lhs - rhs)) <= 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_generator_matches_assembled_superoperator(n, rng):
    for d in (2, 3) if n < 3 else (2,):
        p = random_model(d, rng)
        sup = superoperator_n(p, n)
        for _ in range(3):
            rho = random_state(d**n, rng)
            ref = (sup @ rho.reshape(-1)).reshape(rho.shape)
            assert np.max(np.abs(NBodyGenerator(p, n)(rho) - ref)) <= 1e-13
            assert np.max(np.abs(NBodyGenerator(p, n, assume_hermitian=True)(rho) - ref)) <= 1e-13
        # the general path also handles non-Hermitian arguments
        x = rng.standard_normal((d**n, d**n)) + 1j * rng.standard_normal((d**n, d**n))
        assert np.max(np.abs(NBodyGenerator(p, n)(x) - (sup @ x.reshape(-1)).reshape(x.shape))) <= 1e-12


def test_superoperator_size_limit(rng):
    with pytest.raises(DimensionError):
        superoperator_n(random_model(2, rng), 7)


def test_meanfield_examples(rng):
    damp = model(lj=ta.LOWER)
    assert np.allclose(meanfield_rhs(np.diag([1.0, 0.0]), damp), 0, atol=0)
    p = model(a=ZZ)
    m = np.diag([0.6, 0.4]).astype(complex)
    assert np.allclose(meanfield_rhs(m, p), 0, atol=0)
    q = random_model(3, rng)
    assert abs(np.trace(meanfield_rhs(random_state(3, rng), q))) <= 1e-13


@given(seeds)
def test_meanfield_partial_trace_form(seed):
    rng = rng_for(seed)
    p = random_model(int(rng.integers(2, 4)), rng)
    m = random_state(p.d, rng)
    assert np.max(np.abs(meanfield_rhs(m, p) - meanfield_rhs_partial_trace(m, p))) <= 1e-12


def test_meanfield_from_nbody_marginal(rng):
    # d/dt of the one-site marginal of m^{⊗N} under L^N approaches the mean-field rhs as N grows
    p = random_model(2, rng)
    m = random_state(2, rng)
    errs = []
    for n in (2, 4, 8):
        full = NBodyGenerator(p, n)(ta.kron_power(m, n))
        errs.append(ta.op_norm(ta.partial_trace(full, [1], n, 2) - meanfield_rhs(m, p)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] == pytest.approx(errs[0] / 4, rel=1e-8)


def test_step_sizes():
    assert step_sizes(0.5, 0.1) == pytest.approx([0.1] * 5)
    steps = step_sizes(0.25, 0.1)
    assert len(steps) == 3 and steps[-1] == pytest.approx(0.05)
    assert step_sizes(0.0, 0.1) == []
    with pytest.raises(ValueError):
        step_sizes(1.0, 0.0)


def test_integrate_zero_rhs_and_grid(rng):
    rho = random_state(3, rng)
    traj = integrate(lambda r: np.zeros_like(r), rho, 0.25, 0.1)
    assert traj.times[0] == 0 and traj.times[-1] == pytest.approx(0.25)
    assert all(np.allclose(s, rho, atol=1e-15) for s in traj.states)
    traj = integrate(lambda r: np.zeros_like(r), rho, 1.0, 0.01, record_stride=30)
    assert np.allclose(traj.times, [0, 0.3, 0.6, 0.9, 1.0])
    assert traj.n_steps == 100


def test_integrate_unitary_closed_form(rng):
    rho = random_state(2, rng)
    traj = integrate(lambda r: -1j * ta.commutator(ta.Z, r), rho, 1.0, 1e-3, record_stride=1000)
    u = np.diag(np.exp(-1j * np.array([1.0, -1.0])))
    assert np.max(np.abs(traj.states[-1] - u @ rho @ u.conj().T)) <= 1e-8


def test_rk4_is_fourth_order(rng):
    p = random_model(2, rng, scale=2.0)
    m0 = random_state(2, rng)
    gen = MeanFieldGenerator(p)

    def endpoint(dt):
        return integrate(gen, m0, 1.0, dt, record_stride=10**6, sanitize_states=False).states[-1]

    ref = endpoint(1e-3 / 8)
    e1 = np.max(np.abs(endpoint(0.04) - ref))
    e2 = np.max(np.abs(endpoint(0.02) - ref))
    assert 12 <= e1 / e2 <= 20


def test_sanitize_repairs_and_reports():
    rho = np.diag([1.0 + 2e-9, -1e-9]).astype(complex)
    fixed, diag = sanitize(rho)
    assert ta.lambda_min(fixed) >= 0 and abs(np.trace(fixed) - 1) < 1e-15
    assert diag["lambda_min"] == pytest.approx(-1e-9) and diag["trace_drift"] == pytest.approx(1e-9)
    clean = np.diag([0.6, 0.4]).astype(complex)
    out, diag = sanitize(clean)
    assert np.array_equal(out, clean) and diag["repair"] == 0
    with pytest.raises(NumericalError):
        sanitize(np.array([[np.nan, 0], [0, 1]]))


def test_integrate_fails_loudly_on_blowup():
    def unstable(r):
        return 50.0 * r

    with pytest.raises(NumericalError):
        integrate(unstable, np.eye(2) / 2, 1.0, 0.1)


def test_integrate_warns_on_large_repair():
    tol = Tolerances(sanitize_warn=1e-12, sanitize_fail=1.0)
    traj = integrate(lambda r: 1e-6 * r, np.eye(2, dtype=complex) / 2, 0.01, 0.001, tol=tol)
    assert traj.warned and traj.max_trace_drift > 1e-12


def test_trajectory_invariants(qubit_params):
    n = 3
    traj = integrate(NBodyGenerator(qubit_params, n), ta.kron_power(M07, n), 0.5, 1e-3, record_stride=50)
    assert traj.max_trace_drift <= 1e-8
    assert traj.min_eig_before_clip >= -1e-8
    perms = [ta.permutation_operator(p, 2) for p in permutations(range(1, n + 1))]
    for rho in traj.states:
        assert max(np.max(np.abs(u @ rho @ u.conj().T - rho)) for u in perms) <= 1e-9
    assert np.allclose(traj.at(0.25), traj.states[5])
    with pytest.raises(KeyError):
        traj.at(0.123)


def test_defect_examples(rng):
    p = model(a=ZZ)
    assert np.allclose(defect_operator(np.eye(2) / 2, p, 2), 0.5 * ZZ, atol=0)
    assert np.allclose(defect_operator(random_state(2, rng), model(h=ta.X), 3), 0, atol=0)
    with pytest.raises(DimensionError):
        defect_operator(np.eye(3) / 3, p, 2)


def test_defect_identity(rng):
    for n in (2, 3):
        for _ in range(10):
            p = random_model(2, rng)
            assert defect_identity_residual(random_state(2, rng), p, n) <= 1e-9


def test_duhamel_trivial_cases(rng):
    p = random_model(2, rng)
    p = ModelParams(d=2, h_tilde=p.h_tilde, a_int=p.a_int, l_jump=ZERO2)
    m0 = random_state(2, rng)
    res = duhamel_decompose(p, m0, 0.5, 1e-3)
    assert np.allclose(res.v[0], np.eye(2)) and np.allclose(res.integral[0], 0)
    assert max(np.max(np.abs(i)) for i in res.integral) == 0
    # no dissipation: V_t is unitary and m_t = V_t m0 V_t†
    assert np.allclose(res.v[-1] @ res.v[-1].conj().T, np.eye(2), atol=1e-10)
    assert res.residuals().max() <= 1e-10


def test_duhamel_qubit_damping(qubit_params):
    res = duhamel_decompose(qubit_params, M07, 1.0, 1e-3)
    assert res.residuals().max() <= 1e-6
    assert res.integral_lambda_min().min() >= -1e-9
    mf = integrate(MeanFieldGenerator(qubit_params), M07, 1.0, 1e-3, record_stride=1000)
    assert np.allclose(res.m[-1], mf.states[-1], atol=1e-12)


def test_duhamel_errors(qubit_params):
    with pytest.raises(NotFaithfulError):
        duhamel_decompose(qubit_params, np.diag([1.0, 0.0]), 0.1, 1e-3)
    with pytest.raises(NumericalError):
        duhamel_decompose(qubit_params, M07, 0.1, 1e-3, max_cond=1.0 + 1e-12)


def test_exchangeable_initial_state_stays_symmetric(rng):
    p = random_model(2, rng)
    rho0 = symmetrize(random_state(8, rng), 3, 2)
    traj = integrate(NBodyGenerator(p, 3), rho0, 0.2, 1e-3, record_stride=200)
    end = traj.states[-1]
    assert np.max(np.abs(symmetrize(end, 3, 2) - end)) <= 1e-9
