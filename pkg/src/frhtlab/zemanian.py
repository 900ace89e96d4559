"""Test functions of the Zemanian space K_mu, their seminorms and pairings.

The operator (x^{-1} D) is d/ds in the variable s = x^2 / 2, so
(x^{-1} D)^k psi is an ordinary k-th derivative in s. It is computed with
finite-difference stencils whose weights come from Fornberg's recursion,
which keeps k = 4..6 free of the roundoff blow-up that repeated central
differences in x suffer from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ._errors import DomainError
from .dsl import FunctionSpec
from .quadrature import QuadratureOptions, integrate_finite, integrate_semi_infinite
from .special import BesselOrder

MAX_DERIVATIVE = 6
POINTS_PER_DECADE = 513
X_MIN = 1e-4


@dataclass
class TestFunction:
    """A witness phi in K_mu; ``b`` marks membership of B_{mu,b} (phi = 0 beyond b)."""

    __test__ = False  # keep pytest from collecting this class

    spec: FunctionSpec
    mu: float
    b: float | None = None

    def __post_init__(self):
        self.mu = float(BesselOrder(float(self.mu)))
        if self.b is not None:
            if not self.b > 0:
                raise DomainError("support bound must be positive")
            probe = np.linspace(self.b, 4 * self.b, 64)[1:]
            if np.any(np.abs(self.spec(probe)) > 0):
                raise DomainError(f"test function does not vanish beyond b={self.b}")

    def __call__(self, x):
        return self.spec(x)

    def psi(self, x):
        """x^{-mu-1/2} phi(x)."""
        x = np.asarray(x, dtype=float)
        return x ** (-self.mu - 0.5) * self.spec(x)

    def scaled(self, c):
        return TestFunction(self.spec.scaled(c), self.mu, self.b)


@dataclass
class CompactDistribution:
    """Regular functional with density supported in [a, b] and declared order r."""

    density: FunctionSpec
    support: tuple
    order: int = 0

    def __post_init__(self):
        a, b = map(float, self.support)
        if not 0 < a < b:
            raise DomainError("support must satisfy 0 < a < b")
        if int(self.order) != self.order or self.order < 0:
            raise DomainError("order must be a nonnegative integer")
        self.support = (a, b)
        self.order = int(self.order)
        probe = np.concatenate([np.linspace(a / 4, a, 33)[:-1], np.linspace(b, 4 * b, 33)[1:]])
        if np.any(np.abs(self.density(probe)) > 0):
            raise DomainError("density does not vanish outside its support")


@dataclass
class SeminormReport:
    m: int
    k: int
    value: float
    argmax: float
    x_max: float
    unbounded: bool = False
    diagnostics: dict = field(default_factory=dict)


def fornberg_weights(z, nodes, k):
    """Weights w with sum_j w_j f(nodes_j) ~ f^(k)(z) (Fornberg's recursion).

    ``z`` may be an array; the result then has shape ``z.shape + (n,)``.
    """
    nodes = np.asarray(nodes, dtype=float)
    z = np.asarray(z, dtype=float)
    n = nodes.size
    c = np.zeros((n, k + 1) + z.shape)
    c1 = np.ones(z.shape)
    c4 = nodes[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, k)
        c2 = np.ones(z.shape)
        c5 = c4
        c4 = nodes[i] - z
        for j in range(i):
            c3 = nodes[i] - nodes[j]
            c2 = c2 * c3
            if j == i - 1:
                for m in range(mn, 0, -1):
                    c[i, m] = c1 * (m * c[i - 1, m - 1] - c5 * c[i - 1, m]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for m in range(mn, 0, -1):
                c[j, m] = (c4 * c[j, m] - m * c[j, m - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return np.moveaxis(c[:, k], 0, -1)


STENCIL_EXTRA = 12


def _stencil_step(k):
    # balances eps / h^k roundoff against h^12 truncation
    return np.finfo(float).eps ** (1.0 / (k + STENCIL_EXTRA))


def derivative_s(psi, s, k, s_bounds=(0.0, np.inf), h=None):
    """k-th derivative in s of ``psi`` (a callable of s) at the points ``s``.

    Stencils have k + 12 nodes spaced by ``h``; near the ends of ``s_bounds``
    they are shifted to stay strictly inside.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if k == 0:
        return np.asarray(psi(s), dtype=complex)
    n = k + STENCIL_EXTRA
    lo, hi = s_bounds
    h = _stencil_step(k) if h is None else h
    if np.isfinite(hi):
        h = min(h, (hi - lo) / (n + 1))
    start = np.clip(s - (n - 1) / 2 * h, lo + 0.5 * h, hi - 0.5 * h - (n - 1) * h)
    nodes = start[:, None] + np.arange(n)[None, :] * h
    vals = np.asarray(psi(nodes.ravel()), dtype=complex).reshape(nodes.shape)
    w = fornberg_weights((s - start) / h, np.arange(n, dtype=float), k) / h ** k
    return np.sum(vals * w, axis=-1)


def xinv_d_power(psi_x, x, k, x_bounds=(0.0, np.inf)):
    """(x^{-1} D)^k applied to ``psi_x`` (a callable of x) at the points ``x``."""
    if k < 0 or k > MAX_DERIVATIVE:
        raise DomainError(f"derivative order must be in 0..{MAX_DERIVATIVE}")
    x = np.asarray(x, dtype=float)
    lo, hi = x_bounds
    s_bounds = (lo * lo / 2, hi * hi / 2 if np.isfinite(hi) else np.inf)

    def psi_s(s):
        return psi_x(np.sqrt(2 * np.asarray(s)))
    return derivative_s(psi_s, x * x / 2, k, s_bounds)


def _log_grid(lo, hi):
    n = max(2, int(math.ceil(POINTS_PER_DECADE * math.log10(hi / lo))) + 1)
    return np.geomspace(lo, hi, n)


def _quantity(phi, m, k, x, x_bounds):
    return np.abs(x ** m * xinv_d_power(phi.psi, x, k, x_bounds))


def _refine(phi, m, k, x, vals, x_bounds):
    i = int(np.argmax(vals))  # first maximal index: smallest abscissa wins ties
    best_x, best_v = float(x[i]), float(vals[i])
    if 0 < i < x.size - 1:
        def neg(t):
            return -float(_quantity(phi, m, k, np.array([t]), x_bounds)[0])
        res = minimize_scalar(neg, bounds=(x[i - 1], x[i + 1]), method="bounded",
                              options={"xatol": 1e-12})
        if x[i - 1] <= res.x <= x[i + 1] and -res.fun > best_v:
            best_x, best_v = float(res.x), float(-res.fun)
    return best_x, best_v


def gamma_seminorm(phi, m, k, x_max=10.0, x_limit=1e6):
    """sup over x > 0 of |x^m (x^{-1}D)^k (x^{-mu-1/2} phi(x))| on a log grid.

    The upper end grows by decades until the last two decades decay
    monotonically; otherwise the report is flagged ``unbounded``.
    """
    if m < 0 or k < 0:
        raise DomainError("seminorm indices must be nonnegative")
    if k > MAX_DERIVATIVE:
        raise DomainError(f"derivative order must be <= {MAX_DERIVATIVE}")
    if phi.b is not None:
        x_max = phi.b
    while True:
        x = _log_grid(X_MIN, x_max)
        bounds = (0.0, phi.b if phi.b is not None else np.inf)
        vals = _quantity(phi, m, k, x, bounds)
        if not np.all(np.isfinite(vals)):
            return SeminormReport(m, k, math.inf, math.nan, x_max, True, {"reason": "non-finite"})
        peak = float(np.max(vals))
        if phi.b is not None or _tail_decays(x, vals, peak):
            break
        if x_max * 10 > x_limit:
            return SeminormReport(m, k, peak, float(x[np.argmax(vals)]), x_max, True,
                                  {"reason": "tail does not decay"})
        x_max *= 10
    arg, val = _refine(phi, m, k, x, vals, bounds)
    return SeminormReport(m, k, val, arg, x_max, False, {"grid_points": int(x.size)})


def _tail_decays(x, vals, peak):
    if peak == 0:
        return True
    last = vals[x >= x[-1] / 10]
    prev = vals[(x >= x[-1] / 100) & (x < x[-1] / 10)]
    return (last.size > 0 and prev.size > 0 and np.max(last) < np.max(prev)
            and np.max(last) <= 1e-6 * peak)


def gamma_r_norm(phi, r):
    """max of gamma_seminorm over 0 <= m, k <= r; ``inf`` if any is unbounded."""
    if r < 0 or r > MAX_DERIVATIVE:
        raise DomainError(f"r must be in 0..{MAX_DERIVATIVE}")
    best = 0.0
    for m in range(r + 1):
        for k in range(r + 1):
            rep = gamma_seminorm(phi, m, k)
            if rep.unbounded:
                return math.inf
            best = max(best, rep.value)
    return best


def bmu_seminorm(phi, k):
    """sup over (0, b] of |(x^{-1}D)^k psi| for a B_{mu,b} member."""
    if phi.b is None:
        raise DomainError("bmu_seminorm needs a declared support bound b")
    return gamma_seminorm(phi, 0, k).value


def pair_regular(f, phi, opts=None):
    """<f, phi> = int_0^inf f(x) phi(x) dx."""
    opts = opts or QuadratureOptions()

    def integrand(x):
        return f(x) * phi(x)
    if phi.b is not None:
        return integrate_finite(integrand, 0.0, phi.b, opts)
    return integrate_semi_infinite(integrand, opts)


def _sup_derivative_x(phi, r, a, b):
    x = np.linspace(a, b, 2049)
    if r == 0:
        vals = np.abs(phi(x))
    else:
        n = r + STENCIL_EXTRA
        h = _stencil_step(r)
        nodes = x[:, None] + (np.arange(n) - (n - 1) / 2)[None, :] * h
        w = fornberg_weights(0.0, (np.arange(n) - (n - 1) / 2) * h, r)
        vals = np.abs(phi(nodes.ravel()).reshape(nodes.shape) @ w)
    return float(np.max(vals))


def compact_order_bound(h, phi, opts=None):
    """Pairing of a compact distribution with phi and the ratio to sup |D^r phi|."""
    if h.order > MAX_DERIVATIVE:
        raise DomainError(f"order {h.order} unsupported (max {MAX_DERIVATIVE})")
    opts = opts or QuadratureOptions()
    a, b = h.support
    res = integrate_finite(lambda x: h.density(x) * phi(x), a, b, opts)
    sup = _sup_derivative_x(phi, h.order, a, b)
    return {
        "pairing": res.value,
        "bound": sup,
        "C_fit": abs(res.value) / sup if sup > 0 else 0.0,
        "converged": res.converged,
    }


def canonical_test_function(mu, index):
    """n-th witness x^{mu+1/2} L_n^{(mu)}(x^2) e^{-x^2/2}."""
    if int(index) != index or not 0 <= index <= 12:
        raise DomainError("witness index must be an integer in 0..12")
    return TestFunction(FunctionSpec.builtin("laguerre", mu=float(mu), n=int(index)), mu)


def gaussian_witness(mu, width=1.0):
    """x^{mu+1/2} e^{-width x^2}, the seminorm oracle witness."""
    mu = float(mu)
    return TestFunction(FunctionSpec.from_callable(
        lambda x: x ** (mu + 0.5) * np.exp(-width * x * x), f"gauss[{mu},{width}]"), mu)
