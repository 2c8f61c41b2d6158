import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lindchaos import tensor as ta
from lindchaos.errors import DimensionError, NotFaithfulError, NotHermitianError
from lindchaos.instances import random_hermitian, random_state, rng_for

I2 = np.eye(2, dtype=complex)
seeds = st.integers(0, 2**32 - 1)


def test_kron_examples():
    assert np.array_equal(ta.kron(I2, I2), np.eye(4))
    assert np.array_equal(ta.kron(np.diag([1, 2]), I2), np.diag([1, 1, 2, 2]))
    e00 = np.zeros(4)
    e00[0] = 1
    out = ta.kron(ta.X, ta.Z) @ e00
    expected = np.zeros(4)
    expected[2] = 1  # e1 ⊗ e0
    assert np.allclose(out, expected, atol=0)


@given(seeds)
def test_kron_mixed_product(seed):
    rng = rng_for(seed)
    a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
    assert np.allclose(ta.kron(a, b) @ ta.kron(c, d), ta.kron(a @ c, b @ d), atol=1e-12)


def test_embed_examples():
    assert np.array_equal(ta.embed(ta.Z, [1], 2, 2), np.kron(ta.Z, I2))
    a = np.kron(ta.X, ta.Z)
    assert np.array_equal(ta.embed(a, [1, 2], 2, 2), a)
    zz = np.kron(ta.Z, ta.Z)
    assert np.array_equal(ta.embed(zz, [2, 3], 3, 2), ta.kron(I2, ta.Z, ta.Z))


def test_embed_respects_site_order():
    # A on (3, 1) means first tensor factor of A acts on site 3
    a = np.kron(ta.X, ta.Z)
    assert np.allclose(ta.embed(a, [3, 1], 3, 2), ta.kron(ta.Z, I2, ta.X))


def test_embed_products(rng):
    o1, o2 = random_hermitian(4, rng), random_hermitian(4, rng)
    lhs = ta.embed(o1 @ o2, [1, 3], 3, 2)
    rhs = ta.embed(o1, [1, 3], 3, 2) @ ta.embed(o2, [1, 3], 3, 2)
    assert np.allclose(lhs, rhs, atol=1e-12)


@pytest.mark.parametrize(
    "o, sites, n",
    [(ta.Z, [1, 1], 2), (ta.Z, [3], 2), (ta.Z, [0], 2), (np.eye(4), [1], 2)],
)
def test_embed_errors(o, sites, n):
    with pytest.raises((DimensionError, ValueError)):
        ta.embed(o, sites, n, 2)


def test_partial_trace_examples(rng):
    rho, sigma = random_state(2, rng), random_state(2, rng)
    # unnormalized sigma exercises the tr(σ) factor
    m = np.kron(rho, 2.5 * sigma)
    assert np.allclose(ta.partial_trace(m, [1], 2, 2), 2.5 * rho, atol=1e-12)
    assert np.allclose(ta.partial_trace(m, [1], 2, 2), _pt_by_index(m), atol=1e-15)
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = np.outer(phi, phi.conj())
    assert np.allclose(ta.partial_trace(bell, [1], 2, 2), I2 / 2, atol=1e-15)
    big = random_state(8, rng)
    assert np.array_equal(ta.partial_trace(big, [1, 2, 3], 3, 2), big)


def _pt_by_index(m):
    out = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            out[a, b] = sum(m[2 * a + j, 2 * b + j] for j in range(2))
    return out


def test_partial_trace_total_trace_and_order(rng):
    m = random_state(8, rng)
    for keep in ([1], [2], [3], [1, 3], [2, 3]):
        assert abs(np.trace(ta.partial_trace(m, keep, 3, 2)) - 1) < 1e-12
    a, b, c = random_state(2, rng), random_state(2, rng), random_state(2, rng)
    assert np.allclose(ta.partial_trace(ta.kron(a, b, c), [1, 3], 3, 2), np.kron(a, c), atol=1e-14)


def test_partial_trace_dimension_error():
    with pytest.raises(DimensionError):
        ta.partial_trace(np.eye(6), [1], 2, 2)


def test_swap_operator():
    assert np.array_equal(ta.swap_operator(1), np.ones((1, 1)))
    expected = np.eye(4)[[0, 2, 1, 3]]
    assert np.array_equal(ta.swap_operator(2), expected)
    s = ta.swap_operator(2)
    assert np.allclose(s @ np.kron(ta.Z, ta.X) @ s, np.kron(ta.X, ta.Z), atol=0)
    s3 = ta.swap_operator(3)
    assert np.allclose(s3 @ s3, np.eye(9)) and ta.is_hermitian(s3)


def test_permutation_operator_matches_swap():
    assert np.array_equal(ta.permutation_operator([2, 1], 3), ta.swap_operator(3))
    a, b, c = np.diag([1, 2]), ta.X, ta.Z
    p = ta.permutation_operator([2, 3, 1], 2)
    # site 1 -> 2, site 2 -> 3, site 3 -> 1
    assert np.allclose(p @ ta.kron(a, b, c) @ p.conj().T, ta.kron(c, a, b))


def test_herm_eig_examples():
    w, _ = ta.herm_eig(np.diag([3.0, 1.0]))
    assert np.array_equal(w, [1.0, 3.0])
    w, _ = ta.herm_eig(ta.X)
    assert np.allclose(w, [-1.0, 1.0], atol=1e-15)


def test_herm_eig_reconstruction_and_phase(rng):
    for _ in range(50):
        h = random_hermitian(8, rng)
        w, u = ta.herm_eig(h)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs((u * w) @ u.conj().T - h)) <= 1e-12
        pivot = u[np.argmax(np.abs(u), axis=0), np.arange(8)]
        assert np.allclose(pivot.imag, 0, atol=1e-15) and np.all(pivot.real > 0)


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        ta.herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_hermiticity_scales_with_entries():
    m = np.array([[1e9, 1e9 + 1e-4j], [1e9, 1.0]])
    m = m + m.conj().T
    m[0, 1] += 1e-3
    assert ta.is_hermitian(m)
    assert not ta.is_hermitian(np.array([[0, 1e-9], [0, 0]]))


def test_herm_log_examples():
    assert np.allclose(ta.herm_log(np.eye(2)), 0, atol=0)
    assert np.allclose(ta.herm_log(np.diag([0.5, 0.5])), np.log(0.5) * np.eye(2), atol=1e-15)
    out = ta.herm_log(np.diag([0.7, 0.3]))
    assert np.allclose(np.diag(out).real, [-0.356674943938732, -1.20397280432594], atol=1e-14)


def test_herm_log_rejects_singular():
    with pytest.raises(NotFaithfulError):
        ta.herm_log(np.diag([1.0, 0.0]))


@given(seeds)
def test_log_exp_roundtrip(seed):
    rng = rng_for(seed)
    h = random_hermitian(4, rng)
    h *= 5 / ta.op_norm(h)
    assert np.max(np.abs(ta.herm_log(ta.herm_exp(h)) - h)) <= 1e-10
    m = random_state(3, rng)
    assert np.max(np.abs(ta.herm_exp(ta.herm_log(m)) - m)) <= 1e-10


def test_log_exp_roundtrip_wide_spectrum_commuting():
    d = np.linspace(-20, 20, 7)
    out = ta.herm_log(ta.herm_exp(np.diag(d)))
    assert np.max(np.abs(np.diag(out) - d)) <= 1e-10


def test_frechet_log_examples(rng):
    sigma = random_state(3, rng)
    assert np.allclose(ta.frechet_log(sigma, sigma), np.eye(3), atol=1e-12)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    lhs = ta.frechet_log(sigma, ta.commutator(x, sigma))
    assert np.allclose(lhs, ta.commutator(x, ta.herm_log(sigma)), atol=1e-12)
    x2 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    assert np.allclose(ta.frechet_log(np.eye(2) / 2, x2), 2 * x2, atol=1e-14)


def test_frechet_log_matches_finite_difference(rng):
    sigma = random_state(3, rng)
    x = random_hermitian(3, rng)
    h = 1e-6
    fd = (ta.herm_log(sigma + h * x) - ta.herm_log(sigma - h * x)) / (2 * h)
    assert np.allclose(ta.frechet_log(sigma, x), fd, atol=1e-6)


def test_divided_differences_near_degenerate():
    w = np.array([0.4, 0.4 + 1e-9])
    dd = ta.log_divided_differences(w)
    assert np.allclose(dd, 1 / 0.4, rtol=1e-8)
    w = np.array([0.25, 0.25 * (1 + 1e-13)])
    assert np.allclose(ta.log_divided_differences(w), [[4, 4], [4, 4]], rtol=1e-12)


@given(seeds)
def test_frechet_log_properties(seed):
    rng = rng_for(seed)
    d = int(rng.integers(2, 5))
    sigma = random_state(d, rng)
    x, y = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)) for _ in range(2))
    a, b = 0.3 - 1.2j, 2.0
    lin = ta.frechet_log(sigma, a * x + b * y) - a * ta.frechet_log(sigma, x) - b * ta.frechet_log(sigma, y)
    assert np.max(np.abs(lin)) <= 1e-10
    assert abs(np.trace(y @ ta.frechet_log(sigma, x)) - np.trace(ta.frechet_log(sigma, y) @ x)) <= 1e-10
    assert abs(np.trace(sigma @ ta.frechet_log(sigma, x)) - np.trace(x)) <= 1e-10


def test_spectral_functionals_examples():
    assert ta.spectral_functionals(np.eye(2)) == pytest.approx((2, 1, 1))
    assert ta.spectral_functionals(np.diag([1.0, -3.0])) == pytest.approx((4, 3, -3))
    m = np.kron(ta.X, ta.Z) + np.kron(ta.Z, ta.X)
    assert ta.op_norm(m) == pytest.approx(2, abs=1e-12)


def test_spectral_functionals_non_hermitian():
    m = np.array([[0, 2], [0, 0]], dtype=complex)
    out = ta.spectral_functionals(m, with_lambda_min=False)
    assert out.trace_norm == pytest.approx(2) and out.op_norm == pytest.approx(2) and out.lambda_min is None
    with pytest.raises(NotHermitianError):
        ta.lambda_min(m)


def test_check_density(rng):
    rho = random_state(3, rng)
    ta.check_density(rho)
    with pytest.raises(ValueError):
        ta.check_density(2 * rho)
    with pytest.raises(ValueError):
        ta.check_density(np.diag([1.5, -0.5]))


def test_tolerances_replace():
    tol = ta.Tolerances().replace(trace_tol=1e-6)
    assert tol.trace_tol == 1e-6 and tol.herm_tol == 1e-10
    with pytest.raises((TypeError, ValueError)):
        ta.Tolerances().replace(bogus=1.0)


def test_apply_local_matches_embed(rng):
    rho = random_state(8, rng)
    o = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    for site in (1, 2, 3):
        big = ta.embed(o, [site], 3, 2)
        assert np.allclose(ta.apply_local(o, rho, site, 3, 2, "left"), big @ rho, atol=1e-14)
        assert np.allclose(ta.apply_local(o, rho, site, 3, 2, "right"), rho @ big, atol=1e-14)
