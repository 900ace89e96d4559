"""Bessel functions of the first kind, the Gamma function and friends.

Everything here is vectorised over numpy arrays. ``bessel_j`` uses the
ascending power series (summed in extended precision) for small arguments
and the Hankel asymptotic expansion beyond ``switch_point(mu)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._errors import DomainError

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

SERIES_SWITCH = 16.0
_TWO_PI_LD = 2 * np.longdouble("3.14159265358979323846264338327950288")


@dataclass(frozen=True)
class BesselOrder:
    mu: float

    def __post_init__(self):
        if not math.isfinite(self.mu) or self.mu < -0.5:
            raise DomainError(f"Bessel order must be >= -1/2, got {self.mu}")

    def __float__(self):
        return float(self.mu)


@dataclass(frozen=True)
class HEtaPair:
    """Order/exponent pair for ``H(mu, eta)``; valid for ``1 < eta < 2 + mu``."""

    mu: float
    eta: float

    def __post_init__(self):
        BesselOrder(self.mu)
        if not (1.0 < self.eta < 2.0 + self.mu):
            raise DomainError(
                f"eta={self.eta} outside the window 1 < eta < 2 + mu = {2.0 + self.mu}")

    @property
    def in_theorem_window(self):
        return 1.5 < self.eta < 2.0 + self.mu


def _order(mu):
    return float(BesselOrder(float(mu)))


def gamma_fn(z):
    """Gamma function for positive real arguments (Lanczos, g=7)."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(~(z_arr > 0)):
        raise DomainError("gamma_fn is defined here for z > 0 only")
    out = np.empty_like(z_arr)
    small = z_arr < 0.5
    # reflection for (0, 1/2)
    if np.any(small):
        zs = z_arr[small]
        out[small] = np.pi / (np.sin(np.pi * zs) * _lanczos(1.0 - zs))
    big = ~small
    if np.any(big):
        out[big] = _lanczos(z_arr[big])
    return out if out.ndim else float(out)


def _lanczos(z):
    z = z - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for k, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc = acc + c / (z + k)
    t = z + _LANCZOS_G + 0.5
    # split the power to postpone overflow for large z
    half = t ** ((z + 0.5) / 2.0)
    return math.sqrt(2.0 * math.pi) * half * np.exp(-t) * half * acc


def switch_point(mu):
    """Argument at which ``bessel_j`` changes from series to asymptotics."""
    return max(SERIES_SWITCH, abs(mu))


def bessel_series(mu, x, tol=1e-16):
    """Ascending power series of J_mu, summed in extended precision."""
    mu = _order(mu)
    x = np.asarray(x, dtype=float)
    xl = x.astype(np.longdouble)
    q = -(xl * xl) / 4
    with np.errstate(divide="ignore"):
        term = (xl / 2) ** np.longdouble(mu) / np.longdouble(gamma_fn(mu + 1.0))
    total = term.copy()
    n = 0
    while True:
        n += 1
        term = term * q / (n * (mu + n))
        total = total + term
        done = np.abs(term) <= tol * np.abs(total)
        if np.all(done | ~np.isfinite(total)) or n > 500:
            break
    return total.astype(float)


def bessel_asymptotic(mu, x):
    """Hankel large-argument expansion, truncated at its smallest term."""
    mu = _order(mu)
    x = np.asarray(x, dtype=float)
    four_mu2 = 4.0 * mu * mu
    p = np.ones_like(x)
    qsum = np.zeros_like(x)
    term = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 120):
        term = term * (four_mu2 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        # stop per element once terms start growing or are negligible
        active &= (mag < prev) & (mag > 1e-18)
        if not np.any(active):
            break
        contrib = np.where(active, term, 0.0)
        if k % 2 == 0:
            p = p + (-1) ** (k // 2) * contrib
        else:
            qsum = qsum + (-1) ** (k // 2) * contrib
        prev = mag
    omega = x - (0.5 * mu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(omega) - qsum * np.sin(omega))


def bessel_j(mu, x):
    """Bessel function of the first kind J_mu(x) for x >= 0."""
    mu = _order(mu)
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("bessel_j requires x >= 0")
    out = np.empty_like(x_arr)
    cut = switch_point(mu)
    lo = x_arr <= cut
    if np.any(lo):
        out[lo] = bessel_series(mu, x_arr[lo])
    if np.any(~lo):
        out[~lo] = _bessel_large(mu, x_arr[~lo])
    if mu == 0:
        out[x_arr == 0] = 1.0
    return out if out.ndim else float(out)


def _bessel_large(mu, x):
    """J_mu for x beyond the switch point.

    Low orders use the Hankel expansion directly. Higher orders recur upwards
    from the two lowest orders with the same fractional part, which is stable
    because the switch point keeps x above the order.
    """
    if mu < 2:
        return bessel_asymptotic(mu, x)
    nu = mu - math.floor(mu)
    prev, cur = bessel_asymptotic(nu, x), bessel_asymptotic(nu + 1, x)
    order = nu + 1
    while order < mu - 0.5:
        prev, cur = cur, 2 * order / x * cur - prev
        order += 1
    return cur


def mcmahon_zero(mu, k):
    """McMahon's asymptotic estimate of the k-th positive zero of J_mu."""
    beta = (k + 0.5 * mu - 0.25) * np.pi
    m = 4.0 * mu * mu
    return beta - (m - 1) / (8 * beta) - 4 * (m - 1) * (7 * m - 31) / (3 * (8 * beta) ** 3)


def bessel_zeros(mu, count):
    """First ``count`` positive zeros of J_mu, increasing.

    McMahon's estimate fixes the scan horizon; sign changes on a fine scan
    bracket each zero and bisection polishes it to machine precision.
    """
    mu = _order(mu)
    if int(count) != count or count < 1:
        raise DomainError("count must be a positive integer")
    return _zeros_cached(mu, int(count)).copy()


@lru_cache(maxsize=64)
def _zeros_cached(mu, count):
    step = 0.2
    horizon = max(mcmahon_zero(mu, count), 0.0) + 2 * np.pi + mu
    while True:
        grid = np.arange(step / 2, horizon + step, step)
        vals = bessel_j(mu, grid)
        idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
        if idx.size >= count:
            break
        horizon *= 1.5
    idx = idx[:count]
    a = grid[idx]
    b = grid[idx + 1]
    fa = bessel_j(mu, a)
    for _ in range(80):
        mid = 0.5 * (a + b)
        fm = bessel_j(mu, mid)
        left = np.sign(fm) == np.sign(fa)
        a = np.where(left, mid, a)
        fa = np.where(left, fm, fa)
        b = np.where(left, b, mid)
        if np.all(b - a <= 4 * np.finfo(float).eps * b):
            break
    return 0.5 * (a + b)


def h_constant(mu, eta=None):
    """``Gamma(1 + mu/2 - eta/2) / (2**(eta-1) * Gamma(mu/2 + eta/2))``.

    Accepts either ``(mu, eta)`` or a single :class:`HEtaPair`.
    """
    pair = mu if isinstance(mu, HEtaPair) else HEtaPair(float(mu), float(eta))
    m, e = pair.mu, pair.eta
    return gamma_fn(1 + m / 2 - e / 2) / (2.0 ** (e - 1) * gamma_fn(m / 2 + e / 2))


def mellin_hankel_constant(a, mu):
    """Constant lam with H_mu[x**a](xi) = lam * xi**(-a-1).

    Valid for -mu - 3/2 < a < 0 (the defining integral converges).
    """
    return 2.0 ** (a + 0.5) * gamma_fn((mu + a + 1.5) / 2) / gamma_fn((mu - a + 0.5) / 2)


def weber_integral_check(pair, tolerance=1e-6, opts=None):
    """Compare the regularised integral of z**(1-eta) J_mu(z) with ``h_constant``."""
    from .quadrature import QuadratureOptions, abel_regularized

    if not isinstance(pair, HEtaPair):
        pair = HEtaPair(*pair)
    mu, eta = pair.mu, pair.eta
    opts = opts or QuadratureOptions(abs_tol=1e-11, rel_tol=1e-11)

    def integrand(z):
        return z ** (1.0 - eta) * bessel_j(mu, z)

    res = abel_regularized(integrand, opts, period=np.pi)
    closed = h_constant(pair)
    err = abs(res.value - closed)
    return {
        "mu": mu,
        "eta": eta,
        "numeric": float(res.value.real),
        "closed_form": float(closed),
        "abs_err": float(err),
        "err_estimate": float(res.err_estimate),
        "converged": bool(res.converged),
        "pass": bool(res.converged and err < tolerance),
    }


def chirp(c1, x2, sign=-1):
    """exp(sign * i * c1 * x2 / 2) with the phase reduced mod 2*pi in extended precision.

    ``x2`` is the squared abscissa (or a sum of squares).
    """
    phase = np.asarray(x2, dtype=np.longdouble) * np.longdouble(c1) / 2
    phase = np.mod(phase, _TWO_PI_LD).astype(float)
    return np.exp(sign * 1j * phase)
