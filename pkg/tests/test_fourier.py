"""Truncated Fourier layer and the periodic forced ODE solve."""

import math
import random

import numpy as np
import pytest
from scipy.integrate import cumulative_simpson

from folspec.errors import BackendError
from folspec.fourier import FourierLayer, fourier_apply, fourier_solve


def closed_form_coefficients(mu, h_coeffs, grid=4096):
    """Quadrature oracle: periodic solution lambda^{-t} (k + int_0^t lambda^x h dx)
    with k = (lambda-1)^{-1} int_0^1 lambda^x h dx, projected onto the modes by FFT."""
    layer = FourierLayer((len(h_coeffs) - 1) // 2)
    lam = math.exp(mu)
    t = np.arange(grid + 1) / grid
    integrand = lam**t * layer.evaluate(np.asarray(h_coeffs, float), t)
    running = cumulative_simpson(integrand, x=t, initial=0.0)
    k = running[-1] / (lam - 1.0)
    f = lam ** (-t) * (k + running)
    spectrum = np.fft.rfft(f[:-1]) / grid
    coeffs = np.zeros_like(np.asarray(h_coeffs, float))
    coeffs[0] = spectrum[0].real
    for m in range(1, layer.modes + 1):
        coeffs[2 * m - 1] = 2.0 * spectrum[m].real
        coeffs[2 * m] = -2.0 * spectrum[m].imag
    return coeffs


def test_layer_dimensions_and_labels():
    layer = FourierLayer(2)
    assert layer.dim == 5
    assert layer.labels == ("1", "cos1", "sin1", "cos2", "sin2")


def test_derivative_matrix_action():
    layer = FourierLayer(2)
    d = layer.derivative_matrix()
    cos1 = np.array([0.0, 1.0, 0.0, 0.0, 0.0])
    sin2 = np.array([0.0, 0.0, 0.0, 0.0, 1.0])
    np.testing.assert_allclose(d.dot(cos1), [0, 0, -2 * math.pi, 0, 0])
    np.testing.assert_allclose(d.dot(sin2), [0, 0, 0, 4 * math.pi, 0])


def test_evaluate_matches_direct_formula():
    layer = FourierLayer(2)
    coeffs = np.array([0.5, 1.0, -2.0, 0.25, 3.0])
    t = np.linspace(0, 1, 17)
    direct = (
        0.5
        + 1.0 * np.cos(2 * math.pi * t)
        - 2.0 * np.sin(2 * math.pi * t)
        + 0.25 * np.cos(4 * math.pi * t)
        + 3.0 * np.sin(4 * math.pi * t)
    )
    np.testing.assert_allclose(layer.evaluate(coeffs, t), direct)


def test_solve_constant_mode():
    f = fourier_solve(2.0, np.array([1.0, 0.0, 0.0]))
    np.testing.assert_allclose(f, [0.5, 0.0, 0.0])


def test_solve_single_cosine_frozen():
    # f' + f = cos_1 has the periodic solution (cos_1 + 2*pi*sin_1)/(1+4*pi^2)
    f = fourier_solve(1.0, np.array([0.0, 1.0, 0.0]))
    denom = 1.0 + 4.0 * math.pi**2
    np.testing.assert_allclose(f, [0.0, 1.0 / denom, 2.0 * math.pi / denom], rtol=1e-14)


def test_forward_operator_inverts_solve():
    rng = random.Random(1234)
    for _ in range(20):
        modes = rng.randint(1, 5)
        mu = rng.choice([-1, 1]) * (0.1 + 4.0 * rng.random())
        h = np.array([rng.uniform(-3, 3) for _ in range(2 * modes + 1)])
        f = fourier_solve(mu, h)
        residual = fourier_apply(mu, f) - h
        assert np.max(np.abs(residual)) <= 1e-8 * max(1.0, np.linalg.norm(h))


def test_solve_matches_quadrature_closed_form():
    rng = random.Random(987)
    for _ in range(20):
        modes = rng.randint(1, 4)
        mu = rng.choice([-1, 1]) * (0.1 + 3.0 * rng.random())
        h = np.array([rng.uniform(-2, 2) for _ in range(2 * modes + 1)])
        f = fourier_solve(mu, h)
        oracle = closed_form_coefficients(mu, h)
        assert np.max(np.abs(f - oracle)) <= 1e-6 * max(1.0, np.linalg.norm(h))


def test_small_mu_rejected():
    with pytest.raises(BackendError):
        fourier_solve(1e-12, np.array([1.0, 0.0, 0.0]))


def test_periodicity_of_oracle_solution():
    # the closed form with the chosen k is periodic: f(0) = f(1)
    layer = FourierLayer(3)
    rng = random.Random(55)
    h = np.array([rng.uniform(-1, 1) for _ in range(layer.dim)])
    mu = 1.7
    f = fourier_solve(mu, h)
    vals = layer.evaluate(f, np.array([0.0, 1.0]))
    assert abs(vals[0] - vals[1]) < 1e-12
