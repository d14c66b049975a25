import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hsirestore.errors import DomainError
from hsirestore.proximal import (
    GammaPenalty,
    gamma_norm,
    grad_weights,
    soft,
    update_L_patch,
    update_N_patch,
    wsvt,
)

from oracles import beats_perturbations, gamma_norm_bruteforce, svt_dense, tnn_svt_direct

PEN = GammaPenalty(0.3)


def test_gamma_must_be_positive():
    with pytest.raises(DomainError):
        GammaPenalty(0.0)


def test_phi_shape():
    x = np.linspace(0, 50, 200)
    v = PEN.phi(x)
    assert v[0] == 0 and np.all(np.diff(v) >= 0) and np.all(v < 1)


def test_gamma_norm_examples(rng):
    assert gamma_norm(np.zeros((3, 3, 2)), PEN) == 0
    assert gamma_norm(np.full((1, 1, 1), 5.0), PEN) == pytest.approx(0.77687, abs=1e-5)
    t = rng.standard_normal((4, 4, 3))
    assert gamma_norm(t, PEN) == pytest.approx(gamma_norm_bruteforce(t, 0.3), abs=1e-8)


# magnitudes below ~1e-16 underflow phi to exactly zero
entries = st.one_of(st.just(0.0), st.floats(1e-6, 5), st.floats(-5, -1e-6))
small_cubes = st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(1, 5)).flatmap(
    lambda s: arrays(np.float64, s, elements=entries)
)


@settings(max_examples=40, deadline=None)
@given(small_cubes, st.floats(1, 4))
def test_gamma_norm_bounds_and_scaling(t, c):
    v = gamma_norm(t, PEN)
    assert 0 <= v <= min(t.shape[:2]) + 1e-12
    assert (v == 0) == (not np.any(t))
    assert gamma_norm(c * t, PEN) >= v - 1e-12


def test_grad_weights_examples():
    np.testing.assert_allclose(grad_weights([0, 0, 0], PEN), [0.3, 0.3, 0.3])
    np.testing.assert_allclose(grad_weights([10, 1], PEN), [0.014936, 0.222245], atol=1e-6)
    with pytest.raises(DomainError):
        grad_weights([1.0, -0.1], PEN)


@given(st.lists(st.floats(0, 100), min_size=1, max_size=10))
def test_grad_weights_antimonotone(sig):
    w = grad_weights(sorted(sig, reverse=True), PEN)
    assert np.all(np.diff(w) >= 0)


def test_wsvt_examples():
    np.testing.assert_array_equal(wsvt(np.zeros((3, 2)), [0.5, 0.5], 1.0), np.zeros((3, 2)))
    np.testing.assert_allclose(wsvt(np.diag([3.0, 1.0]), [0.5, 0.5], 1.0), np.diag([2.5, 0.5]), atol=1e-12)


def _relaxed_objective(M, weights, scale):
    def f(X):
        sv = np.linalg.svd(X, compute_uv=False)
        return scale * np.sum(weights * sv) + 0.5 * np.linalg.norm(X - M) ** 2
    return f


@pytest.mark.parametrize("scale", [0.5, 2.0, 5.0])
def test_wsvt_beats_perturbations(rng, scale):
    M = rng.standard_normal((6, 5)) + 1j * rng.standard_normal((6, 5))
    sig_prev = np.sort(rng.uniform(0, 6, 5))[::-1]
    w = grad_weights(sig_prev, PEN)
    out = wsvt(M, w, scale)
    f = _relaxed_objective(M, w, scale)
    assert f(out) <= f(M) + 1e-9
    assert beats_perturbations(f, out, rng)


def test_wsvt_shrinkage_is_bounded(rng):
    M = rng.standard_normal((6, 5)) + 1j * rng.standard_normal((6, 5))
    w = grad_weights(np.sort(rng.uniform(0, 4, 5))[::-1], PEN)
    s_in = np.linalg.svd(M, compute_uv=False)
    s_out = np.linalg.svd(wsvt(M, w, 3.0), compute_uv=False)
    assert np.all(s_in - s_out <= 3.0 * w.max() + 1e-12)


def test_update_L_examples(rng):
    L, sigma = update_L_patch(np.zeros((4, 4, 3)), None, 1.0, PEN)
    np.testing.assert_array_equal(L, 0)
    np.testing.assert_array_equal(sigma, 0)

    M = rng.standard_normal((5, 4, 6))
    L, _ = update_L_patch(M, None, 1e9, PEN)
    assert np.linalg.norm(L - M) / np.linalg.norm(M) < 1e-6


@pytest.mark.parametrize("mu", [0.01, 0.1, 1.0])
def test_first_iteration_is_uniform_svt(rng, mu):
    M = rng.standard_normal((8, 8, 4))
    L, sigma = update_L_patch(M, np.zeros((4, 8)), mu, PEN)
    np.testing.assert_allclose(L, tnn_svt_direct(M, 0.3 / (2 * mu)), atol=1e-8)
    assert sigma.shape == (4, 8)


def test_constant_weights_reproduce_tnn_svt(rng):
    # weights of one with scale lambda: plain tensor nuclear norm thresholding
    lam = 0.7
    M = rng.standard_normal((6, 6, 4))
    mu = 1.0 / (2 * lam)
    # gamma -> 0 makes the weights gamma * exp(-gamma * s) ~= gamma for every s
    flat = GammaPenalty(1e-12)
    # direct path: per-slice wsvt with weights 1
    hat = np.fft.fft(M, axis=2)
    out = np.stack([wsvt(hat[:, :, q], np.ones(6), lam) for q in range(4)], axis=2)
    L_direct = np.real(np.fft.ifft(out, axis=2))
    np.testing.assert_allclose(L_direct, tnn_svt_direct(M, lam), atol=1e-8)
    L, _ = update_L_patch(M, np.zeros((4, 6)), mu * 1e-12, flat)
    np.testing.assert_allclose(L, tnn_svt_direct(M, lam), atol=1e-8)


def test_update_L_batched_matches_single(rng):
    M = rng.standard_normal((3, 5, 4, 7))
    sig = np.abs(rng.standard_normal((3, 7, 4)))
    sig = -np.sort(-sig, axis=-1)
    sig = (sig + sig[:, (-np.arange(7)) % 7]) / 2  # conjugate slices share singular values
    L, s = update_L_patch(M, sig, 0.5, PEN)
    for k in range(3):
        Lk, sk = update_L_patch(M[k], sig[k], 0.5, PEN)
        np.testing.assert_allclose(L[k], Lk, atol=1e-12)
        np.testing.assert_allclose(s[k], sk, atol=1e-12)


def test_update_L_relaxed_descent(rng):
    M = rng.standard_normal((6, 5, 4))
    sig_prev = np.tile(np.sort(rng.uniform(0, 5, 5))[::-1], (4, 1))
    mu = 0.2
    L, _ = update_L_patch(M, sig_prev, mu, PEN)
    w = grad_weights(sig_prev[0], PEN)
    Mh, Lh = np.fft.fft(M, axis=2), np.fft.fft(L, axis=2)
    for q in range(4):
        f = _relaxed_objective(Mh[:, :, q], w, 1 / (2 * mu))
        assert f(Lh[:, :, q]) <= f(Mh[:, :, q]) + 1e-9


def test_soft_examples():
    assert soft(1.2, 0.5) == pytest.approx(0.7)
    assert soft(-0.3, 0.5) == 0
    assert soft(-1.2, 0.5) == pytest.approx(-0.7)
    x = np.linspace(-2, 2, 9)
    np.testing.assert_array_equal(soft(x, 0.0), x)


@given(arrays(np.float64, 12, elements=st.floats(-10, 10)), st.floats(0, 3), st.floats(0, 3))
def test_soft_semigroup(x, a, b):
    np.testing.assert_allclose(soft(soft(x, a), b), soft(x, a + b), atol=1e-12)


def test_update_N_examples(rng):
    L, S = rng.standard_normal((2, 4, 4, 3))
    O = L + S
    np.testing.assert_allclose(update_N_patch(O, L, S, np.zeros_like(O), 1.0, 0.3), 0, atol=1e-15)
    O = rng.standard_normal((4, 4, 3))
    N = update_N_patch(O, L, S, np.zeros_like(O), 1.0, 1e-12)
    np.testing.assert_allclose(N, O - L - S, atol=1e-9)


def test_update_N_beats_perturbations(rng):
    O, L, S, Lam = rng.standard_normal((4, 4, 4, 3))
    mu, beta = 0.7, 0.4
    R = O - L - S
    N = update_N_patch(O, L, S, Lam, mu, beta)

    def f(x):
        return beta * np.sum(x**2) + np.sum(Lam * (R - x)) + mu / 2 * np.sum((R - x) ** 2)

    assert beats_perturbations(f, N, rng)
