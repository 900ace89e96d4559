"""Slowly varying functions and quasiasymptotic behaviour of regular distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from ._errors import DomainError
from .dsl import FunctionSpec
from .quadrature import QuadratureOptions, integrate_finite
from .zemanian import pair_regular

SITES = ("origin", "infinity")
EPS_FLOOR = 1e-6
# scaled pairings shrink or grow like a power of eps, so only a relative
# tolerance is meaningful for them
PAIRING_OPTIONS = QuadratureOptions(abs_tol=1e-250, rel_tol=1e-10)


def _site(site):
    if site not in SITES:
        raise DomainError(f"site must be one of {SITES}, got {site!r}")
    return site


@dataclass(frozen=True)
class SlowlyVaryingSpec:
    """L(x) = exp(u(x) + int_x^A omega(t)/t dt) near the origin.

    At infinity the integral runs from A to x instead, so in both cases the
    integral vanishes at x = A and L(A) = exp(u(A)).
    """

    u: FunctionSpec
    omega: FunctionSpec
    A: float
    site: str = "origin"

    def __post_init__(self):
        _site(self.site)
        if not self.A > 0:
            raise DomainError("A must be positive")


def sv_eval(spec, x, opts=None):
    x = float(x)
    opts = opts or QuadratureOptions()
    if spec.site == "origin" and not 0 < x <= spec.A:
        raise DomainError(f"x={x} outside (0, A={spec.A}]")
    if spec.site == "infinity" and x < spec.A:
        raise DomainError(f"x={x} below A={spec.A}")
    lo, hi = sorted((x, spec.A))
    if lo == hi:
        integral = 0.0
    else:
        # integrate in log t: d(log t) = dt/t
        res = integrate_finite(lambda v: spec.omega(np.exp(v)), math.log(lo), math.log(hi), opts)
        integral = res.value.real
    if spec.site == "infinity":
        integral = -integral if x < spec.A else integral
    return float(math.exp(spec.u(np.array([x]))[0].real + integral))


@dataclass(frozen=True)
class EpsSchedule:
    """Geometric grid eps_j = eps0 * rho**j for j = 0..J."""

    eps0: float = 0.5
    rho: float = 0.7
    J: int = 30

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise DomainError("rho must lie in (0, 1)")
        if not 0 < self.eps0 <= 1 or self.J < 1:
            raise DomainError("need 0 < eps0 <= 1 and J >= 1")
        if self.eps0 * self.rho ** self.J < EPS_FLOOR * (1 - 1e-12):
            raise DomainError(f"schedule goes below the floor {EPS_FLOOR}")

    @classmethod
    def down_to(cls, eps_min, eps0=0.5, J=30):
        """Schedule whose last point is exactly ``eps_min``."""
        return cls(eps0, (eps_min / eps0) ** (1.0 / J), J)

    @property
    def values(self):
        v = self.eps0 * self.rho ** np.arange(self.J + 1)
        return v


def _ratio_report(values, tol):
    dev = np.abs(np.asarray(values) - 1.0)
    tail = dev[-5:]
    nonincreasing = bool(np.all(np.diff(tail) <= 1e-12))
    # the ratio has to be heading to 1, not parked near it (a^0.1 for x^0.1)
    shrinking = tail[-1] <= 1e-12 or tail[0] - tail[-1] > 1e-6 * tail[0]
    return dev, bool(dev[-1] < tol and nonincreasing and shrinking)


def check_slowly_varying(L, site="origin", a_grid=(0.5, 2.0), schedule=None, tol=0.05):
    """Track L(a eps)/L(eps) down the schedule (or L(a/eps)/L(1/eps) at infinity).

    The default schedule runs from 0.1 to 1e-6, keeping a*eps clear of 1
    where |log x|-type functions vanish.
    """
    _site(site)
    schedule = schedule or EpsSchedule.down_to(EPS_FLOOR, eps0=0.1)
    eps = schedule.values
    t = eps if site == "origin" else 1.0 / eps
    base = L(t).real
    if np.any(~(base > 0)):
        raise DomainError("L must be positive on the probed range")
    rows = []
    for a in a_grid:
        shifted = L(a * t).real
        if np.any(~(shifted > 0)):
            raise DomainError("L must be positive on the probed range")
        ratios = shifted / base
        dev, ok = _ratio_report(ratios, tol)
        rows.append({"a": float(a), "final_ratio": float(ratios[-1]),
                     "final_deviation": float(dev[-1]), "pass": ok})
    return {"site": site, "eps_final": float(eps[-1]), "tol": tol, "rows": rows,
            "pass": all(r["pass"] for r in rows)}


def check_global_bounds(L, x_range=(1.0, 1e6), points_per_decade=200):
    """Empirical C1 <= L <= C2 on a log grid of [1, X]."""
    lo, hi = map(float, x_range)
    decades = max(1, int(math.ceil(math.log10(hi / lo))))
    x = np.geomspace(lo, hi, decades * points_per_decade + 1)
    v = L(x).real
    finite = bool(np.all(np.isfinite(v)))
    C1 = float(np.min(v)) if finite else math.nan
    C2 = float(np.max(v)) if finite else math.inf
    # per-decade extrema; a steady climb (or fall) over the last three decades
    # is reported as a trend towards an unbounded (or vanishing) L
    edges = np.geomspace(lo, hi, decades + 1)
    hi_d, lo_d = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = v[(x >= a) & (x <= b)]
        hi_d.append(np.max(sel))
        lo_d.append(np.min(sel))
    hi_d, lo_d = np.array(hi_d), np.array(lo_d)
    growing = decades >= 3 and bool(np.all(hi_d[-3:][1:] > 1.05 * hi_d[-3:][:-1]))
    vanishing = decades >= 3 and bool(np.all(lo_d[-3:][1:] < lo_d[-3:][:-1] / 1.05))
    ok = finite and C1 > 0 and not growing and not vanishing
    return {"C1": C1, "C2": C2, "X": hi, "unbounded_trend": growing,
            "vanishing_trend": vanishing, "pass": ok}


def scaled_pairing(f, phi, eps, site="origin", opts=None):
    """<f(eps x), phi(x)> at the origin, <f(x / eps), phi(x)> at infinity."""
    _site(site)
    if not eps > 0:
        raise DomainError("eps must be positive")
    lam = eps if site == "origin" else 1.0 / eps
    return pair_regular(f.dilated(lam), phi, opts or PAIRING_OPTIONS)


@dataclass
class QuasiFit:
    """Fitted degree m, the L samples |pairing| / lam^m and the limit pairings.

    ``log_coeffs`` = (c0, c1) of the affine model L ~ c0 + c1 |log eps| used
    during the fit; c1 = 0 for an exactly homogeneous f.
    """

    m: float
    site: str
    eps: np.ndarray
    L: np.ndarray
    limit_pairings: list
    log_coeffs: tuple
    residual: float
    clean: bool
    reference: int
    pairings: np.ndarray = field(repr=False, default=None)


def _pairing_table(f, witnesses, eps, site, opts):
    table = np.empty((len(witnesses), eps.size), dtype=complex)
    for i, phi in enumerate(witnesses):
        for j, e in enumerate(eps):
            table[i, j] = scaled_pairing(f, phi, e, site, opts).value
    return table


def _affine_log_fit(mag, lam, m):
    """Fit mag / lam^m ~ c0 + c1 |log lam| in relative least squares."""
    w = mag / lam ** m
    X = np.stack([np.ones_like(lam), np.abs(np.log(lam))], axis=1)
    c, *_ = np.linalg.lstsq(X / w[:, None], np.ones_like(w), rcond=None)
    model = X @ c
    if np.any(model <= 0):
        return c, math.inf
    return c, float(np.sqrt(np.mean((np.log(model) - np.log(w)) ** 2)))


def fit_quasiasymptotics(f, witnesses, schedule=None, site="origin", opts=None, tail=15):
    """Estimate the quasiasymptotic degree m of ``f`` at ``site``.

    Uses the last ``tail`` schedule points of the witness with the largest
    pairing at the smallest eps. The plain log-log slope seeds a search for
    the m whose L samples are best explained by c0 + c1 |log eps|, which
    covers powers and powers times logarithms.
    """
    _site(site)
    schedule = schedule or EpsSchedule()
    eps = schedule.values
    table = _pairing_table(f, witnesses, eps, site, opts)
    mags = np.abs(table)
    if not np.any(mags[:, -1] > 0):
        raise DomainError("degenerate fit: all pairings vanish")
    ref = int(np.argmax(mags[:, -1]))
    lam = eps if site == "origin" else 1.0 / eps
    mag_t, lam_t = mags[ref, -tail:], lam[-tail:]
    m0 = float(np.polyfit(np.log(lam_t), np.log(mag_t), 1)[0])
    cands = m0 + np.linspace(-0.5, 0.5, 201)
    resid = [_affine_log_fit(mag_t, lam_t, m)[1] for m in cands]
    i = int(np.argmin(resid))
    lo, hi = cands[max(i - 1, 0)], cands[min(i + 1, cands.size - 1)]
    res = minimize_scalar(lambda m: _affine_log_fit(mag_t, lam_t, m)[1], bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-10})
    m = float(res.x)
    coeffs, r = _affine_log_fit(mag_t, lam_t, m)
    scale = lam ** m
    L = mags[ref] / scale
    limits = [complex(table[i, -1] / (scale[-1] * L[-1])) for i in range(len(witnesses))]
    return QuasiFit(m, site, eps, L, limits, (float(coeffs[0]), float(coeffs[1])), r,
                    r <= 0.05, ref, table)


def check_homogeneity(fit, f, a_grid, phi, tol=1e-2, m=None, opts=None):
    """Ratio <f(a eps x), phi> / (a^m <f(eps x), phi>) down the schedule."""
    m = fit.m if m is None else float(m)
    rows = []
    for a in a_grid:
        ratios = []
        for e in fit.eps:
            num = scaled_pairing(f, phi, a * e, fit.site, opts).value
            den = scaled_pairing(f, phi, e, fit.site, opts).value
            factor = a ** m if fit.site == "origin" else a ** (-m)
            # at infinity the dilation is 1/(a eps) = lambda / a
            ratios.append(num / (factor * den))
        ratios = np.array(ratios)
        dev = float(abs(ratios[-1] - 1))
        rows.append({"a": float(a), "final_ratio": complex(ratios[-1]), "deviation": dev,
                     "pass": dev < tol})
    return {"m": m, "rows": rows, "pass": all(r["pass"] for r in rows)}


def check_qa_bounded(f, phi, m, L, schedule=None, site="origin", opts=None):
    """sup |<f(lam x), phi>| / (lam^m L(lam)), lam = eps or 1/eps, and a growth
    verdict from :func:`bounded_verdict`."""
    schedule = schedule or EpsSchedule()
    eps = schedule.values
    lam = eps if site == "origin" else 1.0 / eps
    vals = np.array([abs(scaled_pairing(f, phi, e, site, opts).value) for e in eps])
    ratios = vals / (lam ** m * L(lam).real)
    return {"sup_ratio": float(np.max(ratios)), "ratios": ratios.tolist(),
            "pass": bounded_verdict(ratios)}


def bounded_verdict(ratios):
    """False when the sequence climbs over each of its last five steps and its
    final third exceeds 1.5 times everything before it."""
    ratios = np.asarray(ratios, dtype=float)
    if not np.all(np.isfinite(ratios)):
        return False
    cut = 2 * ratios.size // 3
    climbing = bool(np.all(np.diff(ratios[-6:]) > 0))
    outgrows = bool(np.max(ratios[cut:]) > 1.5 * np.max(ratios[:cut]))
    return not (climbing and outgrows)
