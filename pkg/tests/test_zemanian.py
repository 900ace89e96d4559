import math

import numpy as np
import pytest
from scipy import special as sp
from scipy.integrate import trapezoid

from frhtlab import DomainError, FunctionSpec
from frhtlab.zemanian import (CompactDistribution, TestFunction, bmu_seminorm,
                              canonical_test_function, compact_order_bound, fornberg_weights,
                              gamma_r_norm, gamma_seminorm, gaussian_witness, pair_regular,
                              xinv_d_power)


def exact_gauss_seminorm(m, k, width=1.0):
    # psi = e^{-w x^2}, (x^{-1}D)^k psi = (-2w)^k psi, sup of x^m e^{-w x^2} at x^2 = m/(2w)
    peak = 1.0 if m == 0 else (m / (2 * width)) ** (m / 2) * math.exp(-m / 2)
    return (2 * width) ** k * peak


def test_fornberg_weights_classic_stencils():
    nodes = np.array([-1.0, 0.0, 1.0])
    assert np.allclose(fornberg_weights(0.0, nodes, 1), [-0.5, 0.0, 0.5])
    assert np.allclose(fornberg_weights(0.0, nodes, 2), [1.0, -2.0, 1.0])
    w = fornberg_weights(np.array([0.0, 0.5]), nodes, 0)
    assert w.shape == (2, 3)
    assert np.allclose(w[1], [-0.125, 0.75, 0.375])


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_xinv_d_power_on_gaussian(k):
    x = np.geomspace(1e-3, 4, 60)
    got = xinv_d_power(lambda t: np.exp(-t * t), x, k)
    assert np.max(np.abs(got - (-2.0) ** k * np.exp(-x * x))) < 1e-6


@pytest.mark.parametrize("m", [0, 1, 2, 3])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_gaussian_seminorms(m, k):
    rep = gamma_seminorm(gaussian_witness(0.0), m, k)
    assert not rep.unbounded
    assert rep.value == pytest.approx(exact_gauss_seminorm(m, k), rel=1e-6)


def test_seminorm_examples():
    assert gamma_seminorm(gaussian_witness(1.0), 0, 1).value == pytest.approx(2.0, rel=1e-6)
    assert gamma_seminorm(gaussian_witness(0.0), 1, 0).value == pytest.approx(
        1 / math.sqrt(2 * math.e), rel=1e-6)


def test_seminorm_scales_with_the_function():
    phi = gaussian_witness(0.5)
    base = gamma_seminorm(phi, 2, 1).value
    assert gamma_seminorm(phi.scaled(-3.0), 2, 1).value == pytest.approx(3 * base, rel=1e-10)


def test_seminorm_decreases_with_narrower_gaussians():
    vals = [gamma_seminorm(gaussian_witness(0.0, w), 2, 0).value for w in (0.5, 1.0, 2.0)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] == pytest.approx(exact_gauss_seminorm(2, 0, 2.0), rel=1e-6)


def test_r_norm_examples_and_monotonicity():
    phi = gaussian_witness(0.0)
    norms = [gamma_r_norm(phi, r) for r in range(4)]
    assert norms[0] == pytest.approx(1.0, rel=1e-6)
    assert norms[1] == pytest.approx(2.0, rel=1e-6)
    assert all(a <= b for a, b in zip(norms, norms[1:]))
    assert gamma_r_norm(TestFunction(FunctionSpec.builtin("zero"), 0.0), 3) == 0


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_dilation_invariance_of_the_sup(lam):
    mu = 1.0
    base = canonical_test_function(mu, 2)
    dilated = TestFunction(FunctionSpec.from_callable(
        lambda x: base(lam * x) * lam ** (-mu - 0.5)), mu)
    assert gamma_seminorm(dilated, 0, 0).value == pytest.approx(
        gamma_seminorm(base, 0, 0).value, rel=1e-6)


def test_non_decaying_function_flagged_unbounded():
    phi = TestFunction(FunctionSpec.expr("sqrt(x)/(1+x)"), 0.0)
    rep = gamma_seminorm(phi, 2, 0)
    assert rep.unbounded
    assert gamma_r_norm(phi, 2) == math.inf


def test_canonical_witnesses():
    assert gamma_r_norm(canonical_test_function(0.0, 0), 2) == pytest.approx(1.0, rel=1e-6)
    w1 = canonical_test_function(0.0, 1)
    x = np.array([0.5, 1.5])
    assert np.allclose(w1(x), np.sqrt(x) * (1 - x * x) * np.exp(-x * x / 2))
    with pytest.raises(DomainError):
        canonical_test_function(0.0, 13)


def test_bmu_seminorm_cubic():
    spec = FunctionSpec.from_callable(lambda x: np.where(x < 1, np.sqrt(x) * (1 - x) ** 3, 0.0))
    phi = TestFunction(spec, 0.0, b=1.0)
    # sup of (1 - x)^3 on (0, 1] is approached at the left end
    assert bmu_seminorm(phi, 0) == pytest.approx(1.0, abs=1e-3)
    zero = TestFunction(FunctionSpec.builtin("zero"), 0.0, b=1.0)
    assert bmu_seminorm(zero, 2) == 0


def test_bmu_requires_support_bound():
    with pytest.raises(DomainError):
        bmu_seminorm(gaussian_witness(0.0), 0)
    with pytest.raises(DomainError):
        TestFunction(FunctionSpec.expr("sqrt(x)"), 0.0, b=1.0)


def test_seminorm_index_domain():
    phi = gaussian_witness(0.0)
    with pytest.raises(DomainError):
        gamma_seminorm(phi, -1, 0)
    with pytest.raises(DomainError):
        gamma_seminorm(phi, 0, 7)
    with pytest.raises(DomainError):
        gamma_r_norm(phi, 7)


def test_pair_regular_closed_form():
    one = FunctionSpec.expr("1")
    r = pair_regular(one, gaussian_witness(0.0))
    assert r.value.real == pytest.approx(sp.gamma(0.75) / 2, rel=1e-12)
    r = pair_regular(FunctionSpec.expr("x"), gaussian_witness(0.0))
    assert abs(r.value - sp.gamma(1.25) / 2) < 1e-8
    assert pair_regular(FunctionSpec.builtin("zero"), gaussian_witness(0.0)).value == 0


def test_dual_bound_with_held_out_witnesses():
    f = FunctionSpec.expr("1")
    r = 2

    def ratio(n):
        phi = canonical_test_function(0.0, n)
        return abs(pair_regular(f, phi).value) / gamma_r_norm(phi, r)

    C = max(ratio(n) for n in range(5))
    assert all(ratio(n) <= C for n in range(5, 9))


def test_compact_dual_bound():
    bump = FunctionSpec.builtin("bump", a=1, b=2)
    h = CompactDistribution(bump, (1, 2), order=0)
    phi = gaussian_witness(0.0)
    rep = compact_order_bound(h, phi)
    mass = trapezoid(bump(np.linspace(1, 2, 20001)).real, np.linspace(1, 2, 20001))
    assert rep["converged"]
    assert abs(rep["pairing"]) <= mass * rep["bound"] * (1 + 1e-9)
    assert rep["C_fit"] <= mass * (1 + 1e-9)
    ten = compact_order_bound(h, phi.scaled(10.0))
    assert ten["pairing"] == pytest.approx(10 * rep["pairing"], rel=1e-12)
    assert ten["C_fit"] == pytest.approx(rep["C_fit"], rel=1e-12)
    empty = CompactDistribution(FunctionSpec.builtin("zero"), (1, 2))
    assert compact_order_bound(empty, phi)["pairing"] == 0
    h1 = CompactDistribution(bump, (1, 2), order=1)
    x = np.linspace(1, 2, 2001)
    dphi = np.abs(np.gradient(phi(x).real, x))
    assert compact_order_bound(h1, phi)["bound"] == pytest.approx(dphi.max(), rel=1e-3)


def test_compact_distribution_validation():
    with pytest.raises(DomainError):
        CompactDistribution(FunctionSpec.expr("x"), (1, 2))
    with pytest.raises(DomainError):
        CompactDistribution(FunctionSpec.builtin("bump", a=1, b=2), (2, 1))
    with pytest.raises(DomainError):
        CompactDistribution(FunctionSpec.builtin("bump", a=1, b=2), (1, 2), order=1.5)
