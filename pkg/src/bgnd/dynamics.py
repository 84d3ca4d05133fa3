"""Bayes-ABRD: round-based approximate best-response dynamics over strategy tables.

Each round every agent computes an approximate best response against the
current profile using estimated expected cost shares as oracle weights. One
agent whose estimated improvement is positive and at least the average is
moved; the dynamics stop when nobody can improve beyond the estimation slack
or after ``R`` rounds.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .estimate import estimate_weights, estimation_params, type_averaged
from .gametheory import game_constants, potential_expected
from .model import check_strategy_profile

log = logging.getLogger(__name__)

THREADS_ENV = "BGND_THREADS"


@dataclass
class DynamicsConfig:
    rounds: int | None = None  # overrides the computed round budget
    diagnostics: bool = False  # exact potential and social cost every round
    workers: int | None = None  # ABR computations in parallel within a round

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return max(1, self.workers)
        return max(1, int(os.environ.get(THREADS_ENV, "1")))


@dataclass(frozen=True)
class RoundRecord:
    round: int
    deltas: tuple
    chosen: int | None  # None marks convergence
    est_current: tuple  # estimated C_i(s^{r-1})
    est_response: tuple  # estimated C_i(abr_i, s_{-i}^{r-1})
    potential: float | None = None  # exact potential of s^r
    social_cost: float | None = None  # exact social cost of s^r


@dataclass
class DynamicsTrace:
    initial: tuple
    rounds: list = field(default_factory=list)
    final: tuple = ()
    termination: str = ""
    budget: int = 0
    initial_potential: float | None = None
    initial_social_cost: float | None = None


def initial_profile(instance, oracle) -> tuple:
    """Every type answered as if its agent were alone: weights ``F_e(1)``."""
    w0 = {r.id: r.cost.base_weight for r in instance.resources}
    return tuple(
        tuple(oracle(req, w0, instance.graph) for req in agent.types) for agent in instance.agents
    )


def compute_abr(instance, i: int, s, oracle, weights=None):
    """Approximate best response of agent ``i`` to ``s_{-i}``.

    Returns ``(table, estimated_cost, weights)`` where ``weights`` are the
    estimated expected shares the oracle was queried with.
    """
    w = estimate_weights(instance, i, s) if weights is None else weights
    agent = instance.agents[i]
    table = tuple(oracle(req, w, instance.graph) for req in agent.types)
    return table, type_averaged(agent.prior, table, w), w


def select_agent(deltas) -> int | None:
    """Smallest index with ``delta > 0`` and ``delta >= sum(deltas) / N``; None if all ``<= 0``."""
    if all(d <= 0 for d in deltas):
        return None
    avg = sum(deltas) / len(deltas)
    for i, d in enumerate(deltas):
        if d > 0 and d >= avg:
            return i
    raise AssertionError(f"no agent meets the selection rule for deltas {deltas}")


def _exact_diagnostics(instance, s):
    from .evaluate import exact_social_cost

    return potential_expected(instance, s), exact_social_cost(instance, s)


def run(instance, oracle, config: DynamicsConfig | None = None, constants=None) -> DynamicsTrace:
    config = config or DynamicsConfig()
    if constants is None:
        constants = game_constants(instance, oracle.descriptor(instance).rho)
    budget = config.rounds if config.rounds is not None else constants.R
    slack = estimation_params(instance).product

    s = initial_profile(instance, oracle)
    check_strategy_profile(instance, s)
    trace = DynamicsTrace(initial=s, budget=budget)
    if config.diagnostics:
        trace.initial_potential, trace.initial_social_cost = _exact_diagnostics(instance, s)

    n = instance.n_agents
    workers = config.resolved_workers()
    pool = ThreadPoolExecutor(workers) if workers > 1 and n > 1 else None
    try:
        for r in range(1, budget + 1):
            jobs = range(n)
            if pool is None:
                results = [compute_abr(instance, i, s, oracle) for i in jobs]
            else:
                results = list(pool.map(lambda i: compute_abr(instance, i, s, oracle), jobs))
            est_cur = tuple(type_averaged(instance.agents[i].prior, s[i], results[i][2]) for i in jobs)
            est_abr = tuple(res[1] for res in results)
            deltas = tuple(c - slack * b for c, b in zip(est_cur, est_abr))
            chosen = select_agent(deltas)
            if chosen is not None:
                s = s[:chosen] + (results[chosen][0],) + s[chosen + 1:]
            pot = cost = None
            if config.diagnostics:
                pot, cost = _exact_diagnostics(instance, s)
            trace.rounds.append(RoundRecord(r, deltas, chosen, est_cur, est_abr, pot, cost))
            log.debug("round %d: chosen=%s deltas=%s", r, chosen, deltas)
            if chosen is None:
                trace.termination = "converged"
                break
        else:
            trace.termination = "round-cap"
    finally:
        if pool is not None:
            pool.shutdown()
    if budget == 0:
        trace.termination = "round-cap"
    trace.final = s
    return trace
