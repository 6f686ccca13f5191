"""Closed-form quantities for cores of G(n, c/n) and the phase-3 branching process.

Notation: pi_j(mu) is the Poisson(mu) pmf, psi_j(mu) = Pr[Po(mu) >= j].
During phase 3 the degree-i density (i >= 4) is e^{-d} d^i / i! with
d = tau e^{-s}, and the degree-3 density a3(s) has a closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

TOL = 1e-10


class RegimeError(ValueError):
    """The requested root does not exist for these parameters."""


@dataclass(frozen=True)
class RootFindSpec:
    lo: float
    hi: float
    xtol: float = TOL
    maxiter: int = 200


def _bisect(f, spec: RootFindSpec) -> float:
    flo, fhi = f(spec.lo), f(spec.hi)
    if flo == 0:
        return spec.lo
    if fhi == 0:
        return spec.hi
    if np.sign(flo) == np.sign(fhi):
        raise RegimeError(f"no sign change on [{spec.lo}, {spec.hi}]")
    return optimize.bisect(f, spec.lo, spec.hi, xtol=spec.xtol, maxiter=spec.maxiter)


# ---------------------------------------------------------------------------
# Poisson tools

def poisson_pmf(j: int, mu):
    """Pr[Po(mu) = j]."""
    mu_arr = np.asarray(mu, float)
    if np.any(mu_arr < 0):
        raise ValueError("mu must be non-negative")
    if j < 0:
        out = np.zeros_like(mu_arr)
    else:
        out = special.xlogy(j, mu_arr) - mu_arr - special.gammaln(j + 1)
        out = np.exp(out)
    return float(out) if out.ndim == 0 else out


def psi(j: int, mu):
    """Pr[Po(mu) >= j], via the regularised lower incomplete gamma function."""
    mu_arr = np.asarray(mu, float)
    if np.any(mu_arr < 0):
        raise ValueError("mu must be non-negative")
    if j <= 0:
        out = np.ones_like(mu_arr)
    else:
        out = special.gammainc(j, mu_arr)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# k-core thresholds

def lambda_k(k: int) -> tuple[float, float]:
    """(lambda_k, argmin mu) for lambda_k = min over mu > 0 of mu / psi_{k-1}(mu).

    The minimiser solves psi_{k-1}(mu) = mu * pi_{k-2}(mu).
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    g = lambda m: psi(k - 1, m) - m * float(poisson_pmf(k - 2, m))
    mu = _bisect(g, RootFindSpec(1e-6, 10.0 * k + 20.0))
    return mu / psi(k - 1, mu), mu


def mu_k(k: int, lam: float) -> float:
    """Largest root of mu / psi_{k-1}(mu) = lam; needs lam > lambda_k."""
    thr, arg = lambda_k(k)
    if lam <= thr:
        raise RegimeError(f"lambda={lam} is not above the threshold {thr}")
    return _bisect(lambda m: m - lam * psi(k - 1, m), RootFindSpec(arg, lam))


def core_fraction(c: float, k: int = 3) -> float:
    """Asymptotic k-core size / n in G(n, c/n); zero below the threshold."""
    try:
        return psi(k, mu_k(k, c))
    except RegimeError:
        return 0.0


def core_avg_degree(c: float) -> float:
    """Asymptotic average degree of the 3-core: mu psi_2(mu) / psi_3(mu), mu = mu_3(c)."""
    mu = mu_k(3, c)
    return mu * psi(2, mu) / psi(3, mu)


def truncated_mean(tau: float, min_deg: int = 3) -> float:
    """Mean of Poisson(tau) conditioned on >= min_deg."""
    return tau * psi(min_deg - 1, tau) / psi(min_deg, tau)


def c2_solve() -> float:
    """The c where the 3-core's average degree reaches 4."""
    lam3, _ = lambda_k(3)
    return _bisect(lambda c: core_avg_degree(c) - 4.0, RootFindSpec(lam3 + 1e-9, 10.0))


def q_32core(c: float) -> tuple[float, float]:
    """Largest root q in (0, 1) of q = 1 - e^{-qc}(1 + qc), and tau = q c."""
    lam3, arg = lambda_k(3)
    if c <= lam3:
        raise RegimeError(f"c={c} has no nontrivial root (threshold {lam3})")
    q = _bisect(lambda x: x - psi(2, x * c), RootFindSpec(arg / c, 1.0))
    return q, q * c


def lambda0(tau):
    """Branching ratio at the start of phase 3: e^{-t} t^2 / (1 - e^{-t}(1 + t))."""
    tau = np.asarray(tau, float)
    if np.any(tau <= 0):
        raise ValueError("tau must be positive")
    out = np.exp(-tau) * tau ** 2 / psi(2, tau)
    return float(out) if out.ndim == 0 else out


def lambda0_critical() -> float:
    """The tau where the initial branching ratio equals 1."""
    return _bisect(lambda t: lambda0(t) - 1.0, RootFindSpec(0.5, 5.0))


# ---------------------------------------------------------------------------
# phase-3 curves

def _f(d):
    # antiderivative of 1 - e^{-d}(1 + d + d^2/2 + d^3/6)
    return d + np.exp(-d) * (d ** 3 / 6 + d ** 2 + 3 * d + 4)


@dataclass(frozen=True)
class Phase3Curve:
    tau: float
    s_star: float

    def delta(self, s):
        return self.tau * np.exp(-np.asarray(s, float))

    def a3(self, s):
        t = self.tau
        return math.exp(-t) * t ** 3 / 6 + _f(self.delta(s)) - _f(t)

    def mu_ge5(self, s):
        d = self.delta(s)
        return d * psi(4, d)

    def mu(self, s):
        d = self.delta(s)
        return 3 * self.a3(s) + d * psi(3, d)

    def lam(self, s):
        return 6 * self.a3(s) / self.mu(s)


S_MAX = 20.0


def phase3_curve(tau: float) -> Phase3Curve:
    """Closed-form phase-3 curves; s_star is the first zero of a3 on [0, 20]."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    probe = Phase3Curve(tau, math.nan)
    grid = np.linspace(0.0, S_MAX, 4001)
    vals = probe.a3(grid)
    neg = np.flatnonzero(vals <= 0)
    if len(neg) == 0:
        raise RegimeError(f"a3 has no root on [0, {S_MAX}] for tau={tau}")
    i = neg[0]
    s_star = _bisect(lambda s: float(probe.a3(s)), RootFindSpec(grid[i - 1], grid[i], xtol=1e-13))
    return Phase3Curve(tau, s_star)


@dataclass
class ODESolution:
    s: np.ndarray
    a3: np.ndarray
    a: np.ndarray          # a[:, i] is the degree-i density, columns 0..D
    delta: np.ndarray      # reconstructed as mu^{>=5} / sum_{i>=4} a_i
    mu: np.ndarray
    lam: np.ndarray


def ode_oracle(tau: float, s_end: float, cap: int = 60, h: float = 1e-3) -> ODESolution:
    """Integrate the truncated degree system with classical RK4.

    a3' = -sum_{i>=5} i a_i and a_i' = -i a_i + (i+1) a_{i+1} for 4 <= i <= cap.
    """
    if cap < 40:
        raise ValueError("degree cap must be at least 40")
    if h > 1e-3:
        raise ValueError("step must be at most 1e-3")
    if psi(cap, tau) > 1e-12:
        raise ValueError(f"truncation mass psi_{cap}({tau}) exceeds 1e-12")
    idx = np.arange(cap + 1, dtype=float)
    x0 = np.exp(-tau + idx * math.log(tau) - special.gammaln(idx + 1))
    x0[:3] = 0.0

    def rhs(x):
        dx = np.zeros_like(x)
        dx[3] = -np.dot(idx[5:], x[5:])
        dx[4:cap] = -idx[4:cap] * x[4:cap] + idx[5:] * x[5:]
        dx[cap] = -cap * x[cap]
        return dx

    steps = int(math.ceil(s_end / h))
    h = s_end / steps if steps else h
    out = np.empty((steps + 1, cap + 1))
    x = x0
    out[0] = x
    for k in range(steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        x = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = x
    s = np.linspace(0.0, s_end, steps + 1)
    mu5 = out[:, 5:] @ idx[5:]
    delta = mu5 / out[:, 4:].sum(axis=1)
    mu = 3 * out[:, 3] + out[:, 4:] @ idx[4:]
    return ODESolution(s, out[:, 3].copy(), out, delta, mu, 6 * out[:, 3] / mu)
