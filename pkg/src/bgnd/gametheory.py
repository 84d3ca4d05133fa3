"""Smoothness parameters, the Rosenthal-style potential and the round budget."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .estimate import _bisect, estimation_params, inclusion_probs
from .model import check_action_profile, loads


@dataclass(frozen=True)
class SmoothnessParams:
    lam: float
    mu: float
    gamma: float
    scale: float  # rho * (eta_low * eta_high)^2


@dataclass(frozen=True)
class GameConstants:
    rho: float
    eta_low: float
    eta_high: float
    smoothness: SmoothnessParams
    K: int
    Q: float
    R: int
    n_agents: int
    alpha_max: float

    @property
    def bound(self) -> float:
        """Guaranteed ratio ``C(s_out) / E[OPT]``."""
        sc = self.smoothness.scale
        return 2 * self.K * sc * self.smoothness.lam / (1 - sc * self.smoothness.mu)

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "eta_low": self.eta_low,
            "eta_high": self.eta_high,
            "lambda": self.smoothness.lam,
            "mu": self.smoothness.mu,
            "gamma": self.smoothness.gamma,
            "K": self.K,
            "Q": self.Q,
            "R": self.R,
            "bound": self.bound,
        }


def gamma_root(alpha_max: float) -> float:
    """Unique positive root of ``(x + 1)^(a - 1) = x^a``."""
    if not alpha_max > 1:
        raise ValueError(f"alpha_max must exceed 1, got {alpha_max}")
    a = alpha_max

    def f(x):
        return (x + 1) ** (a - 1) - x**a

    hi = 4.0
    while f(hi) > 0:
        hi *= 2
    return _bisect(f, 1e-9, hi, 0.0)


def _h(x: float, a: float) -> float:
    return (a - 1) * (x + 1) ** (a - 2) / (a * x ** (a - 1))


def _g(x: float, mu: float, a: float) -> float:
    return (x + 1) ** (a - 1) - mu * x**a


def smoothness_params(alpha_max: float, rho: float = 1.0, eta_low: float = 1.0, eta_high: float = 1.0) -> SmoothnessParams:
    if not alpha_max > 1:
        raise ValueError(f"alpha_max must exceed 1, got {alpha_max}")
    if min(rho, eta_low, eta_high) < 1:
        raise ValueError("rho and eta parameters must be >= 1")
    scale = rho * (eta_low * eta_high) ** 2
    gamma = gamma_root(alpha_max)
    x0 = scale * gamma
    mu = _h(x0, alpha_max)
    lam = _g(x0, mu, alpha_max)
    if not scale * mu < 1 - 1 / alpha_max:
        raise AssertionError(f"smoothness condition violated: scale*mu={scale * mu} >= {1 - 1 / alpha_max}")
    return SmoothnessParams(lam, mu, gamma, scale)


def verify_smoothness_inequality(lam: float, mu: float, alphas, x_max: int = 50, tol: float = 1e-9) -> bool:
    """Check ``y (x + y)^(a-1) <= lam y^a + mu x^a`` on the integer grid ``[0, x_max]^2``.

    The slack ``tol`` is relative to the right-hand side once it exceeds 1.
    """
    grid = np.arange(x_max + 1, dtype=np.float64)
    x, y = np.meshgrid(grid, grid, indexing="ij")
    for a in alphas:
        lhs = y * (x + y) ** (a - 1)
        rhs = lam * y**a + mu * x**a
        if np.any(lhs - rhs > tol * np.maximum(1.0, rhs)):
            return False
    return True


def _power_prefix(cost, max_load: int) -> np.ndarray:
    """``P[l] = sum_{k=1}^{l} sum_j xi_j k^(alpha_j - 1)``, for l = 0..max_load."""
    ks = np.arange(1, max_load + 1, dtype=np.float64)
    per = np.zeros(max_load, dtype=np.float64)
    for xi, alpha in cost.terms:
        per += xi * ks ** (alpha - 1.0)
    return np.concatenate(([0.0], np.cumsum(per)))


def potential_realized(instance, t, a) -> float:
    """Rosenthal potential of action profile ``a`` under type profile ``t``."""
    check_action_profile(instance, t, a)
    counts = loads(a)
    total = []
    for e in instance.resource_ids:
        load_e = counts.get(e, 0)
        if load_e:
            total.append(math.fsum(instance.cost_of[e].share(k) for k in range(1, load_e + 1)))
    return math.fsum(total)


def potential_expected(instance, s) -> float:
    """Expected potential ``E_t[Phi_t(s(t))]`` via per-resource load distributions."""
    pis = inclusion_probs(instance, s)
    n = instance.n_agents
    parts = []
    for e in instance.resource_ids:
        pmf = kernels.pb_pmf(np.asarray(pis[e], dtype=np.float64))
        parts.append(float(pmf @ _power_prefix(instance.cost_of[e], n)))
    return math.fsum(parts)


def round_budget(Q: float, K: int, n_agents: int, alpha_max: float) -> int:
    return max(1, math.ceil(Q * math.log(K * n_agents ** (alpha_max - 1))))


def game_constants(instance, rho: float = 1.0) -> GameConstants:
    est = estimation_params(instance)
    a_max = instance.alpha_max
    sm = smoothness_params(a_max, rho, est.eta_low, est.eta_high)
    n = instance.n_agents
    K = math.ceil(a_max)
    Q = 2 * est.product * n / (1 - sm.scale * sm.mu)
    return GameConstants(rho, est.eta_low, est.eta_high, sm, K, Q, round_budget(Q, K, n, a_max), n, a_max)
