import math

import numpy as np
import pytest
from scipy import special as sp

from frhtlab import DomainError, QuadratureOptions
from frhtlab.quadrature import (abel_regularized, euler_accelerate, integrate_bessel_oscillatory,
                                integrate_finite, integrate_semi_infinite, richardson_to_zero)


def test_finite_polynomial_and_smooth():
    r = integrate_finite(lambda x: x ** 5 - 2 * x, 0.0, 2.0)
    assert r.value == pytest.approx(64 / 6 - 4, abs=1e-13)
    assert r.converged and r.method == "finite-adaptive"
    r = integrate_finite(np.cos, 0.0, 10.0)
    assert r.value.real == pytest.approx(math.sin(10.0), abs=1e-12)


def test_finite_endpoint_singularity():
    # int_0^1 x^{-3/4} dx = 4
    r = integrate_finite(lambda x: x ** -0.75, 0.0, 1.0)
    assert r.value.real == pytest.approx(4.0, rel=1e-8)
    r = integrate_finite(lambda x: np.log(x), 0.0, 1.0)
    assert r.value.real == pytest.approx(-1.0, rel=1e-9)


def test_finite_complex_and_breakpoints():
    r = integrate_finite(lambda x: np.exp(1j * x), 0.0, math.pi, points=[1.0, 2.0])
    assert abs(r.value - 2j) < 1e-12


def test_finite_is_deterministic():
    f = lambda x: np.sin(x ** 2) * np.exp(-x)
    a = integrate_finite(f, 0.0, 7.0)
    b = integrate_finite(f, 0.0, 7.0)
    assert a.value == b.value and a.err_estimate == b.err_estimate


def test_finite_rejects_empty_interval():
    with pytest.raises(DomainError):
        integrate_finite(np.cos, 1.0, 1.0)


def test_options_validation():
    with pytest.raises(DomainError):
        QuadratureOptions(abs_tol=0)
    with pytest.raises(DomainError):
        QuadratureOptions(max_zeros=3)
    with pytest.raises(DomainError):
        QuadratureOptions(abel_deltas=(0.1, 0.2))
    with pytest.raises(DomainError):
        QuadratureOptions(accel_depth=20)


def test_semi_infinite_gaussian():
    r = integrate_semi_infinite(lambda x: np.exp(-x * x))
    assert r.value.real == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)
    assert r.converged


def test_euler_acceleration_of_alternating_series():
    k = np.arange(40)
    partial = np.cumsum((-1.0) ** k / (k + 1))
    est, resid = euler_accelerate(partial, 12)
    assert abs(est - math.log(2)) < 1e-9
    assert resid < 1e-8


def test_richardson_recovers_polynomial_limit():
    h = np.array([0.4, 0.2, 0.1, 0.05])
    vals = 3.0 + 2 * h - h ** 2 + 0.5 * h ** 3
    assert abs(richardson_to_zero(h, vals)[-1] - 3.0) < 1e-12


@pytest.mark.parametrize("mu", [0.0, 1.0, 2.5])
def test_hankel_of_gaussian(mu):
    # int x^{mu+1/2} e^{-x^2/2} sqrt(xi x) J_mu(xi x) dx = xi^{mu+1/2} e^{-xi^2/2}
    g = lambda x: x ** (mu + 0.5) * np.exp(-x * x / 2)
    for xi in (0.3, 1.0, 4.0):
        r = integrate_bessel_oscillatory(g, mu, xi)
        assert abs(r.value - xi ** (mu + 0.5) * math.exp(-xi * xi / 2)) < 1e-9
        assert r.converged


def test_oscillatory_slow_algebraic_decay_is_accelerated():
    # int_0^inf x^a sqrt(x) J_mu(x) dx has a Mellin closed form
    a, mu = -1.0, 1.0
    exact = 2.0 ** (a + 0.5) * sp.gamma((mu + a + 1.5) / 2) / sp.gamma((mu - a + 0.5) / 2)
    r = integrate_bessel_oscillatory(lambda x: x ** a, mu, 1.0)
    assert r.method in ("zero-split-accelerated", "abel-extrapolated")
    assert abs(r.value - exact) < 1e-7


def test_oscillatory_growing_integrand_via_abel():
    # Weber-type integral that only exists in the Abel sense:
    # int z^{1-eta} J_mu(z) dz with eta = 0.75, mu = 1 -> 2^{1-eta} G(1+mu/2-eta/2)/G(mu/2+eta/2)
    mu, eta = 1.0, 0.75
    exact = 2.0 ** (1 - eta) * sp.gamma(1 + mu / 2 - eta / 2) / sp.gamma(mu / 2 + eta / 2)
    f = lambda z: z ** (1 - eta) * sp.jv(mu, z)
    r = abel_regularized(f, QuadratureOptions(abs_tol=1e-8, rel_tol=1e-8))
    assert abs(r.value - exact) < 1e-5
    assert r.method == "abel-extrapolated"


def test_oscillatory_requires_positive_frequency():
    with pytest.raises(DomainError):
        integrate_bessel_oscillatory(lambda x: x, 0.0, 0.0)
