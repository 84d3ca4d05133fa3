"""Expected cost-share estimation.

The expected share of agent ``i`` on resource ``e`` depends on the other
agents only through independent Bernoulli indicators "agent i' uses e", with
success probabilities given by ``inclusion_prob``. The closed-form estimator
plugs the mean load into each power term; the exact value takes the expectation
over the Poisson-binomial load distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class EstimationParams:
    eta_low: float
    eta_high: float

    @property
    def product(self) -> float:
        return self.eta_low * self.eta_high


def inclusion_prob(prior, table, e) -> float:
    """Probability that a strategy ``table`` (one action per type) uses ``e``."""
    return math.fsum(p for p, action in zip(prior, table) if e in action)


def inclusion_probs(instance, s) -> dict:
    """``{e: [pi_0e, ..., pi_(N-1)e]}`` for every resource."""
    out = {e: [0.0] * instance.n_agents for e in instance.resource_ids}
    for i, (agent, table) in enumerate(zip(instance.agents, s)):
        for e in instance.resource_ids:
            out[e][i] = inclusion_prob(agent.prior, table, e)
    return out


def _others(pis, i):
    return [p for k, p in enumerate(pis) if k != i]


def estimate_from_probs(cost, other_probs) -> float:
    mean = 1.0 + math.fsum(other_probs)
    return math.fsum(xi * mean ** (alpha - 1.0) for xi, alpha in cost.terms)


def exact_from_probs(cost, other_probs) -> float:
    pmf = kernels.pb_pmf(np.asarray(other_probs, dtype=np.float64))
    levels = np.arange(1, len(pmf) + 1, dtype=np.float64)
    return math.fsum(xi * float(pmf @ levels ** (alpha - 1.0)) for xi, alpha in cost.terms)


def estimate_cost_share(instance, i: int, e, s) -> float:
    """Closed-form estimate of agent ``i``'s expected share on ``e`` when it uses ``e``.

    Only ``s[k]`` for ``k != i`` is read. One pass over the other agents' types.
    """
    probs = [inclusion_prob(agent.prior, s[k], e) for k, agent in enumerate(instance.agents) if k != i]
    return estimate_from_probs(instance.cost_of[e], probs)


def exact_cost_share(instance, i: int, e, s) -> float:
    probs = [inclusion_prob(agent.prior, s[k], e) for k, agent in enumerate(instance.agents) if k != i]
    return exact_from_probs(instance.cost_of[e], probs)


def estimate_weights(instance, i: int, s) -> dict:
    """Estimated expected share of agent ``i`` on every resource, given ``s_{-i}``."""
    pis = inclusion_probs(instance, s)
    return {e: estimate_from_probs(instance.cost_of[e], _others(pis[e], i)) for e in instance.resource_ids}


def exact_weights(instance, i: int, s) -> dict:
    pis = inclusion_probs(instance, s)
    return {e: exact_from_probs(instance.cost_of[e], _others(pis[e], i)) for e in instance.resource_ids}


def type_averaged(prior, table, w) -> float:
    """``sum_t p(t) * sum_{e in table[t]} w(e)``."""
    return math.fsum(p * math.fsum(w[e] for e in action) for p, action in zip(prior, table))


def estimated_individual_cost(instance, i: int, t: int, s) -> float:
    w = estimate_weights(instance, i, s)
    return math.fsum(w[e] for e in s[i][t])


def estimated_type_averaged_cost(instance, i: int, s) -> float:
    return type_averaged(instance.agents[i].prior, s[i], estimate_weights(instance, i, s))


def exact_individual_cost(instance, i: int, s) -> float:
    """Exact type-averaged expected individual cost ``C_i(s)``."""
    return type_averaged(instance.agents[i].prior, s[i], exact_weights(instance, i, s))


def bell_fractional(z: float) -> float:
    """``B_z = e^{-1} sum_k k^z / k!``, the z-th moment of a unit-rate Poisson variable."""
    if z < 1:
        raise ValueError(f"fractional Bell number needs z >= 1, got {z}")
    total = 0.0
    small = 0
    k = 1
    while True:
        term = math.exp(z * math.log(k) - math.lgamma(k + 1) - 1.0)
        total += term
        # terms rise until k ~ z, then decay super-exponentially
        if k > z and term < 1e-15 * total:
            small += 1
            if small == 3:
                return total
        else:
            small = 0
        k += 1


def _bisect(f, lo: float, hi: float, tol: float, max_iter: int = 200) -> float:
    flo = f(lo)
    fhi = f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ArithmeticError(f"root not bracketed on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo <= tol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def cantelli_beta(z: float) -> float:
    """Root in (1, inf) of ``2 b^3 - (z + 2) b^2 - 2``."""
    if not 0 < z < 1:
        raise ValueError(f"b-constant needs 0 < z < 1, got {z}")
    return _bisect(lambda b: 2 * b**3 - (z + 2) * b**2 - 2, 1 + 1e-9, z + 3, 1e-12)


def b_const(z: float) -> float:
    """``(beta^2 + 1)(1 - 1/beta)^{-z}`` evaluated at ``beta = cantelli_beta(z)``.

    Any ``beta > 1`` gives a valid lower-sandwich constant. The cubic that fixes
    ``beta`` here is not the exact stationarity condition of this expression
    (that one has constant term ``-z``), so the value sits slightly above the
    true minimum over ``beta``. It is conservative, never unsafe.
    """
    beta = cantelli_beta(z)
    return (beta * beta + 1.0) * (1.0 - 1.0 / beta) ** (-z)


def estimation_params_for_alphas(alphas) -> EstimationParams:
    low = [b_const(a - 1.0) for a in alphas if 1 < a < 2]
    high = [bell_fractional(a - 1.0) for a in alphas if a >= 2]
    return EstimationParams(max([1.0, *low]), max([1.0, *high]))


def estimation_params(instance) -> EstimationParams:
    return estimation_params_for_alphas(instance.alphas)
