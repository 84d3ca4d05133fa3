"""Exact desk-scale evaluation: expected social cost, brute-force optimum and the BCR report.

Everything here is exhaustive and fails loudly when an enumeration cap is hit.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .estimate import inclusion_probs
from .model import Explicit, Routing, SetConnectivity, eval_cost, feasible

DEFAULT_CAP_ACTIONS = 10**7  # product of candidate counts for one type profile
DEFAULT_CAP_PROFILES = 10**5  # number of type profiles
SUBSET_EDGE_CAP = 20  # set connectivity enumerates all subsets of at most this many edges


class TooLargeError(RuntimeError):
    """An exhaustive enumeration would exceed its configured cap."""


def exact_social_cost(instance, s) -> float:
    """``E_t[sum_e F_e(load_e)]`` from per-resource Poisson-binomial loads."""
    pis = inclusion_probs(instance, s)
    n = instance.n_agents
    parts = []
    for e in instance.resource_ids:
        pmf = kernels.pb_pmf(np.asarray(pis[e], dtype=np.float64))
        table = np.array([eval_cost(instance.cost_of[e], k) for k in range(n + 1)])
        parts.append(float(pmf @ table))
    return math.fsum(parts)


def simple_paths(g, u: int, v: int, max_len: int | None = None) -> list:
    """Edge sets of all simple ``u``-``v`` paths (direction respected)."""
    if u == v:
        return [frozenset()]
    max_len = g.nodes if max_len is None else max_len
    out = []
    stack = [(u, (u,), ())]
    while stack:
        x, nodes, rids = stack.pop()
        for y, rid in reversed(g.adjacency[x]):
            if y in nodes or len(rids) >= max_len:
                continue
            if y == v:
                out.append(frozenset(rids + (rid,)))
            else:
                stack.append((y, nodes + (y,), rids + (rid,)))
    return out


def minimal_connecting_sets(g, req) -> list:
    """Inclusion-minimal edge subsets satisfying a set connectivity request."""
    rids = [edge.resource for edge in g.edges]
    if len(rids) > SUBSET_EDGE_CAP:
        raise TooLargeError(f"{len(rids)} edges exceed the subset enumeration cap {SUBSET_EDGE_CAP}")
    out = []
    for size in range(len(rids) + 1):
        for combo in itertools.combinations(rids, size):
            a = frozenset(combo)
            if feasible(req, a, g) and not any(feasible(req, a - {e}, g) for e in a):
                out.append(a)
    return out


def candidate_actions(instance, req) -> list:
    """All actions that can appear in an optimal profile, sorted by resource-id sequence."""
    g = instance.graph
    if isinstance(req, Explicit):
        acts = set(req.actions)
    elif isinstance(req, Routing):
        acts = set(simple_paths(g, req.source, req.target))
    elif isinstance(req, SetConnectivity):
        acts = set(minimal_connecting_sets(g, req))
    else:
        raise TypeError(f"unknown request type {type(req).__name__}")
    return sorted(acts, key=lambda a: tuple(sorted(a)))


@dataclass
class OptContext:
    """Cost tables and cached candidate lists for repeated optimum searches."""

    instance: object
    cap_actions: int = DEFAULT_CAP_ACTIONS
    _candidates: dict = field(default_factory=dict)

    def __post_init__(self):
        inst = self.instance
        self.index = {e: k for k, e in enumerate(inst.resource_ids)}
        n = inst.n_agents
        self.tables = np.array(
            [[eval_cost(inst.cost_of[e], k) for k in range(n + 1)] for e in inst.resource_ids],
            dtype=np.float64,
        ).reshape(len(inst.resource_ids), n + 1)

    def candidates(self, i: int, ti: int) -> list:
        key = (i, ti)
        if key not in self._candidates:
            self._candidates[key] = candidate_actions(self.instance, self.instance.agents[i].types[ti])
        return self._candidates[key]

    def solve(self, t) -> tuple:
        cands = [self.candidates(i, ti) for i, ti in enumerate(t)]
        size = math.prod(len(c) for c in cands)
        if size == 0:
            raise TooLargeError(f"type profile {tuple(t)} has an agent with no feasible action")
        if size > self.cap_actions:
            raise TooLargeError(f"type profile {tuple(t)} has {size} action profiles (cap {self.cap_actions})")
        agent_off = np.cumsum([0] + [len(c) for c in cands], dtype=np.int64)
        flat = [a for c in cands for a in c]
        cand_off = np.cumsum([0] + [len(a) for a in flat], dtype=np.int64)
        cand_edges = np.array(
            [self.index[e] for a in flat for e in sorted(a)], dtype=np.int64
        )
        cost, choice, _ = kernels.search_min_profile(self.tables, agent_off, cand_off, cand_edges)
        profile = tuple(c[int(k)] for c, k in zip(cands, choice))
        return profile, float(cost)


def brute_force_opt(instance, t, cap_actions: int = DEFAULT_CAP_ACTIONS, context: OptContext | None = None) -> tuple:
    """``(argmin action profile, OPT(t))`` over all candidate profiles for ``t``."""
    ctx = context or OptContext(instance, cap_actions)
    return ctx.solve(t)


def type_profiles(instance):
    return itertools.product(*(range(len(agent.types)) for agent in instance.agents))


def count_type_profiles(instance) -> int:
    return math.prod(len(agent.types) for agent in instance.agents)


def expected_opt(
    instance,
    cap_profiles: int = DEFAULT_CAP_PROFILES,
    cap_actions: int = DEFAULT_CAP_ACTIONS,
    breakdown: bool = False,
):
    """``E_t[OPT(t)]``; with ``breakdown`` also the list of ``(t, p(t), OPT(t))``."""
    total = count_type_profiles(instance)
    if total > cap_profiles:
        raise TooLargeError(f"{total} type profiles exceed the cap {cap_profiles}")
    ctx = OptContext(instance, cap_actions)
    rows = []
    for t in type_profiles(instance):
        p = math.prod(agent.prior[ti] for agent, ti in zip(instance.agents, t))
        _, opt = ctx.solve(t)
        rows.append((t, p, opt))
    value = math.fsum(p * opt for _, p, opt in rows)
    return (value, rows) if breakdown else value


@dataclass(frozen=True)
class BcrReport:
    exact_cost: float
    expected_opt: float
    empirical_bcr: float
    theoretical_bound: float
    per_profile: tuple = ()

    @property
    def holds(self) -> bool:
        return self.empirical_bcr <= self.theoretical_bound + 1e-6

    def as_dict(self) -> dict:
        out = {
            "exact_cost": self.exact_cost,
            "expected_opt": self.expected_opt,
            "empirical_bcr": self.empirical_bcr,
            "theoretical_bound": self.theoretical_bound,
        }
        if self.per_profile:
            out["per_profile"] = [
                {"types": list(t), "probability": p, "opt": opt} for t, p, opt in self.per_profile
            ]
        return out


def ratio(cost: float, opt: float) -> float:
    if opt == 0:
        return 1.0 if cost == 0 else math.inf
    return cost / opt


def bcr_report(
    instance,
    s_out,
    constants,
    cap_profiles: int = DEFAULT_CAP_PROFILES,
    cap_actions: int = DEFAULT_CAP_ACTIONS,
    keep_profiles: bool = False,
) -> BcrReport:
    cost = exact_social_cost(instance, s_out)
    opt, rows = expected_opt(instance, cap_profiles, cap_actions, breakdown=True)
    return BcrReport(cost, opt, ratio(cost, opt), constants.bound, tuple(rows) if keep_profiles else ())
