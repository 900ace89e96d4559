"""Numerical verification of the boundedness, Tauberian, initial-value and
final-value theorems for the fractional Hankel transform.

Every ``verify_*`` function returns a :class:`TheoremReport` that lists the
hypothesis checks with their measured values and, when all of them could be
evaluated, the conclusion check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import DomainError
from .asymptotics import EpsSchedule, bounded_verdict, check_qa_bounded
from .dsl import FunctionSpec
from .quadrature import QuadratureOptions, integrate_finite
from .special import HEtaPair, chirp, h_constant
from .transform import compact_transform, hankel_transform, twisted_transform
from .zemanian import CompactDistribution, pair_regular

STABILITY_SPREAD = 0.01
SLOPE_TOL = 0.02


@dataclass
class TauberianCase:
    f: FunctionSpec
    params: object
    m: float
    L: FunctionSpec
    xi_window: tuple = (0.5, 5.0)
    N: float = 0.5
    C: float = 1.0
    eps0: float = 1.0

    def __post_init__(self):
        lo, hi = map(float, self.xi_window)
        if not 0 < lo < hi:
            raise DomainError("xi window must satisfy 0 < xi_min < xi_max")
        if not 0 < self.eps0 <= 1:
            raise DomainError("eps0 must lie in (0, 1]")
        if not (self.N > 0 and self.C > 0):
            raise DomainError("N and C must be positive")
        self.xi_window = (lo, hi)


@dataclass
class IvtFvtCase:
    g: FunctionSpec
    params: object
    eta: float
    target_constant: complex
    probe_xis: tuple
    h: CompactDistribution | None = None
    tol: float = 0.05


@dataclass
class TheoremReport:
    theorem: str
    hypotheses: dict = field(default_factory=dict)
    conclusion: dict | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self):
        return (all(h["pass"] for h in self.hypotheses.values())
                and self.conclusion is not None and bool(self.conclusion["pass"]))

    def to_dict(self):
        """Serializable form; a conclusion behind a failed hypothesis is
        reported as null and kept under diagnostics for inspection."""
        out = {"theorem": self.theorem, "hypotheses": self.hypotheses,
               "diagnostics": dict(self.diagnostics), "pass": self.passed}
        held = all(h["pass"] for h in self.hypotheses.values())
        if self.conclusion is not None and not held:
            out["conclusion"] = None
            out["diagnostics"]["conclusion_unverified"] = self.conclusion
        elif self.conclusion is not None or self.hypotheses:
            out["conclusion"] = self.conclusion
        return out


def _log_gauss_nodes(lo, hi, n):
    """Gauss-Legendre nodes/weights for int_lo^hi g(xi) dxi in the variable log xi."""
    t, w = np.polynomial.legendre.leggauss(n)
    a, b = math.log(lo), math.log(hi)
    u = 0.5 * (b - a) * t + 0.5 * (b + a)
    xi = np.exp(u)
    return xi, 0.5 * (b - a) * w * xi


def scaled_transform(case, xi, eps, opts=None):
    """e^{i c1 (xi/eps)^2/2} H^alpha f(xi/eps) / (eps^{m+1} L(eps))."""
    r = twisted_transform(case.params, case.f, xi / eps, opts)
    norm = eps ** (case.m + 1) * case.L(np.array([eps]))[0].real
    return r.value / norm, r.converged


def _spread(values):
    v = np.asarray(values)
    scale = np.max(np.abs(v))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(v - v[-1])) / scale)


def _slope(x, y):
    y = np.maximum(np.asarray(y, dtype=float), 1e-300)
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def verify_tbound(case, phi, schedule=None, opts=None, n_nodes=48, xi_range=(1e-3, 12.0)):
    """Boundedness transfer: premise via scaled pairings, conclusion via the transform."""
    schedule = schedule or EpsSchedule()
    eps = schedule.values
    rep = TheoremReport("tbound")
    prem = check_qa_bounded(case.f, phi, case.m, case.L, schedule, "origin", opts)
    ratios = np.asarray(prem["ratios"])
    rep.hypotheses["premise_bounded"] = {"pass": prem["pass"], "value": prem["sup_ratio"],
                                         "spread_last10": _spread(ratios[-10:])}
    nodes, weights = _log_gauss_nodes(*xi_range, n_nodes)
    phi_vals = phi(nodes)
    concl, failures = [], []
    for e in eps:
        vals = []
        for x in nodes:
            v, ok = scaled_transform(case, x, e, opts)
            if not ok:
                failures.append((float(e), float(x)))
            vals.append(v)
        concl.append(complex(np.sum(np.asarray(vals) * phi_vals * weights)))
    mags = np.abs(concl)
    verdict = bounded_verdict(mags)
    rep.conclusion = {"pass": verdict, "sup_ratio": float(np.max(mags)),
                      "spread_last10": _spread(mags[-10:]),
                      "ratios": [abs(c) for c in concl]}
    rep.diagnostics = {"quadrature_failures": failures, "eps": eps.tolist()}
    return rep


def _exponent_verdicts(xi, envelope, N, mu):
    third = max(3, xi.size // 3)
    p_small = _slope(xi[:third], envelope[:third])
    p_large = _slope(xi[-third:], envelope[-third:])
    target = N + mu + 0.5
    return {
        "p_small": p_small,
        "p_large": p_large,
        "target_exponent": target,
        # the bound with exponent N + mu + 1/2 enforced only away from 0,
        # with the transform merely required to stay bounded near xi_min
        "windowed_pass": bool(p_small >= -SLOPE_TOL and p_large <= target + SLOPE_TOL),
        # the bound as stated, for all xi: it forces decay like xi^target at 0
        "literal_pass": bool(p_small >= target - SLOPE_TOL and p_large <= target + SLOPE_TOL),
    }


def verify_tauberian(case, witnesses, schedule=None, opts=None, n_window=9, n_nodes=48,
                     xi_range=(1e-3, 12.0)):
    """Conditions (i), (ii) and the final pairing identity of the Tauberian theorem."""
    schedule = schedule or EpsSchedule()
    eps = schedule.values
    eps = eps[eps <= case.eps0]
    p = case.params
    rep = TheoremReport("tauberian")
    xi_w = np.geomspace(*case.xi_window, n_window)
    table = np.array([[scaled_transform(case, x, e, opts)[0] for e in eps] for x in xi_w])
    spreads = [_spread(row[-3:]) for row in table]
    unstable = [float(x) for x, s in zip(xi_w, spreads) if s > STABILITY_SPREAD]
    M = table[:, -1]
    rep.hypotheses["condition_i"] = {"pass": not unstable, "value": max(spreads),
                                     "unstable_xi": unstable}
    envelope = np.max(np.abs(table), axis=1)
    ex = _exponent_verdicts(xi_w, envelope, case.N, p.mu)
    rep.hypotheses["condition_ii"] = {"pass": ex["windowed_pass"], "value": ex["p_small"], **ex}

    # M_xi on quadrature nodes, from the last three schedule points only
    nodes, weights = _log_gauss_nodes(*xi_range, n_nodes)
    M_nodes = np.array([scaled_transform(case, x, eps[-1], opts)[0] for x in nodes])
    rows = []
    for i, phi in enumerate(witnesses):
        h_phi = np.array([hankel_transform(p.mu, phi.spec, x, opts).value for x in nodes])
        rhs = p.C_star * p.c2 ** case.m * np.sum(M_nodes * h_phi * weights)
        lhs_seq = [_twisted_pairing(case, phi, e, opts) for e in eps[-3:]]
        lhs = lhs_seq[-1]
        scale = max(abs(lhs), abs(rhs))
        rel = abs(lhs - rhs) / scale if scale > 0 else 0.0
        rows.append({"witness": i, "lhs": complex(lhs), "rhs": complex(rhs),
                     "rel_err": float(rel), "lhs_spread": _spread(lhs_seq),
                     "pass": rel <= 0.02})
    rep.conclusion = {"pass": all(r["pass"] for r in rows), "rows": rows, "tolerance": 0.02}
    rep.diagnostics = {"xi": xi_w.tolist(), "M_xi": [complex(v) for v in M],
                       "envelope": envelope.tolist(), "eps_final": float(eps[-1])}
    return rep


def _twisted_pairing(case, phi, e, opts):
    """<e^{-i c1 (eps t)^2/2} f(eps t), phi(t)> / (eps^m L(eps))."""
    c1 = case.params.c1

    def g(t):
        u = e * np.asarray(t, dtype=float)
        return chirp(c1, np.asarray(u, dtype=np.longdouble) ** 2, -1) * case.f(u)
    val = pair_regular(FunctionSpec.from_callable(g), phi, opts).value
    return val / (e ** case.m * case.L(np.array([e]))[0].real)


def _limit_probe(values, target, tol):
    dev = np.abs(np.asarray(values) - target)
    # below the floor the sequence has converged and only roundoff is left
    floor = 1e-6 * max(1.0, abs(target))
    shrinking = bool(np.all(np.diff(dev[-3:]) < 0)) or dev[-1] <= floor
    return dev, bool(dev[-1] < tol and shrinking)


def _twisted_side(case, x):
    """e^{-i c1 x^2/2} x^{eta-1/2} g(x)."""
    p = case.params
    xl = np.asarray(x, dtype=np.longdouble)
    return chirp(p.c1, xl * xl, -1) * x ** (case.eta - 0.5) * case.g(x)


def _probe_conclusion(case, opts):
    p = case.params
    pair = HEtaPair(p.mu, case.eta)
    predicted = case.target_constant * h_constant(pair)
    values, conv = [], []
    for xi in case.probe_xis:
        r = twisted_transform(p, case.g, xi, opts)
        v = r.value
        ok = r.converged
        if case.h is not None:
            rh = compact_transform(p, case.h, xi, opts)
            v = v + complex(chirp(p.c1, np.longdouble(xi) ** 2, +1)) * rh.value
            ok = ok and rh.converged
        values.append(xi ** (1.5 - case.eta) * v)
        conv.append(bool(ok))
    dev, ok = _limit_probe(values, predicted, case.tol)
    return {"pass": ok and all(conv), "predicted": complex(predicted),
            "measured": [complex(v) for v in values], "deviation": dev.tolist(),
            "xi": [float(x) for x in case.probe_xis], "converged": conv,
            "tolerance": case.tol}


def verify_ivt(case, opts=None):
    """Initial value theorem: xi -> inf of the transform recovers x -> 0+ of g."""
    p = case.params
    rep = TheoremReport("ivt")
    r = case.h.order if case.h is not None else 0
    lo = 1.5 + r
    window_ok = lo < case.eta < 2 + p.mu and (case.h is None or p.mu >= 0.5)
    rep.hypotheses["eta_window"] = {"pass": bool(window_ok), "value": case.eta,
                                    "window": [lo, 2 + p.mu]}
    x = np.geomspace(1e-1, 1e-8, 8)
    target = case.target_constant * p.c2 ** (1.5 - case.eta) / p.C
    dev, ok = _limit_probe(_twisted_side(case, x), target, case.tol)
    rep.hypotheses["limit_at_origin"] = {"pass": ok, "value": float(dev[-1]),
                                         "target": complex(target)}
    xt = np.geomspace(10, 1e4, 7)
    gt = np.abs(case.g(xt))
    decays = bool(np.all(np.diff(gt) <= 0) and gt[-1] < 1e-3 * max(gt[0], 1e-300)) or not np.any(gt)
    rep.hypotheses["vanishes_at_infinity"] = {"pass": decays, "value": float(gt[-1])}
    if window_ok:
        rep.conclusion = _probe_conclusion(case, opts)
    return rep


def verify_fvt(case, opts=None):
    """Final value theorem: xi -> 0+ of the transform recovers x -> inf of g."""
    p = case.params
    opts = opts or QuadratureOptions()
    rep = TheoremReport("fvt")
    window_ok = 1.5 < case.eta < 2 + p.mu
    rep.hypotheses["eta_window"] = {"pass": bool(window_ok), "value": case.eta,
                                    "window": [1.5, 2 + p.mu]}
    ints = {}
    ok_int = True
    for X in (1.0, 10.0):
        res = integrate_finite(lambda t: t ** (p.mu + 0.5) * np.abs(case.g(t)), 0.0, X, opts)
        ints[str(X)] = float(res.value.real)
        ok_int &= res.converged and math.isfinite(res.value.real)
    rep.hypotheses["local_integrability"] = {"pass": bool(ok_int), "value": ints}
    # beyond ~1e4 the chirp phase x^2 c1 / 2 is no longer representable
    x = np.geomspace(10, 1e4, 7)
    target = case.target_constant * p.c2 ** (1.5 - case.eta) / p.C
    dev, ok = _limit_probe(_twisted_side(case, x), target, case.tol)
    rep.hypotheses["limit_at_infinity"] = {"pass": ok, "value": float(dev[-1]),
                                           "target": complex(target)}
    if window_ok:
        rep.conclusion = _probe_conclusion(case, opts)
    return rep


def compact_transform_growth(h, params, xi_grid=None, opts=None):
    """Fit |F(xi)| <= K xi^p near 0 and <= K xi^s beyond 1 for F = <h, K_alpha(., xi)>."""
    xi = np.geomspace(1e-3, 30, 61) if xi_grid is None else np.asarray(xi_grid, dtype=float)
    F = np.array([compact_transform(params, h, x, opts).value for x in xi])
    mag = np.abs(F)
    small, large = xi < 1, xi > 1
    if not np.any(mag > 0):
        return {"K": 0.0, "p_small": math.nan, "s": math.nan, "K_mu_plus_1": 0.0,
                "mu_plus_1_ok": True, "F": F.tolist(), "xi": xi.tolist()}
    # fit the small-xi exponent on the first decade, where x xi is small
    first = xi <= 10 * xi[0]
    p_small = _slope(xi[first], mag[first])
    # upper envelope from the right, so oscillation zeros do not drag the fit
    env = np.maximum.accumulate(mag[large][::-1])[::-1]
    s = _slope(xi[large], env)
    K_small = float(np.max(mag[small] / xi[small] ** p_small))
    K_large = float(np.max(mag[large] / xi[large] ** s))
    mu = params.mu
    return {
        "K": max(K_small, K_large),
        "p_small": p_small,
        "s": s,
        # sup over (0,1) of |F| / xi^{mu+1}; grows like xi^{-1/2} towards 0
        "K_mu_plus_1": float(np.max(mag[small] / xi[small] ** (mu + 1))),
        "mu_plus_1_ok": bool(p_small >= mu + 1 - SLOPE_TOL),
        "F": F.tolist(),
        "xi": xi.tolist(),
    }
