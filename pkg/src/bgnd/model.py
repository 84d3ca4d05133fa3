"""Domain types for Bayesian network design instances and realized-profile arithmetic.

Resources carry polynomial cost functions ``F(l) = sum_j xi_j * l**alpha_j``.
Actions are frozensets of resource ids; a strategy profile is a tuple (one
entry per agent) of tuples (one action per type).
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

Action = frozenset
ActionProfile = tuple  # tuple[Action, ...], one per agent
TypeProfile = tuple  # tuple[int, ...], one type index per agent
StrategyProfile = tuple  # tuple[tuple[Action, ...], ...]

PRIOR_TOL = 1e-12


class ValidationError(ValueError):
    """Raised when an instance or profile violates an invariant.

    ``violations`` lists every problem found, not just the first.
    """

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InfeasibleError(ValueError):
    """An action does not satisfy the request it is supposed to answer."""


@dataclass(frozen=True)
class CostFunction:
    terms: tuple  # tuple[tuple[float, float], ...] of (xi, alpha)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(x), float(a)) for x, a in self.terms))
        problems = []
        if not self.terms:
            problems.append("cost function needs at least one term")
        for xi, alpha in self.terms:
            if not (xi > 0 and math.isfinite(xi)):
                problems.append(f"coefficient xi={xi} must be positive")
            if not (alpha >= 1 and math.isfinite(alpha)):
                problems.append(f"exponent alpha={alpha} must be >= 1")
        if problems:
            raise ValidationError(problems)

    @property
    def alpha_max(self) -> float:
        return max(a for _, a in self.terms)

    @property
    def base_weight(self) -> float:
        """Cost of a single user, ``F(1) = sum_j xi_j``."""
        return math.fsum(x for x, _ in self.terms)

    def __call__(self, load: int) -> float:
        return eval_cost(self, load)

    def share(self, load: int) -> float:
        """Per-user share ``F(l) / l`` for ``l >= 1``."""
        return math.fsum(x * load ** (a - 1.0) for x, a in self.terms)


@dataclass(frozen=True)
class Resource:
    id: str
    cost: CostFunction


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    resource: str


@dataclass(frozen=True)
class Graph:
    nodes: int
    edges: tuple  # tuple[Edge, ...]
    directed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))

    def violations(self) -> list:
        out = []
        if self.nodes < 1:
            out.append(f"graph needs at least one node, got {self.nodes}")
        seen = set()
        for k, edge in enumerate(self.edges):
            for end in (edge.u, edge.v):
                if not 0 <= end < self.nodes:
                    out.append(f"edge {k}: node {end} out of range [0, {self.nodes})")
            if edge.resource in seen:
                out.append(f"edge {k}: resource {edge.resource!r} used by more than one edge")
            seen.add(edge.resource)
        return out

    @cached_property
    def edge_of(self) -> dict:
        return {edge.resource: edge for edge in self.edges}

    @cached_property
    def adjacency(self) -> tuple:
        """Per node, sorted ``(neighbor, resource)`` pairs respecting direction."""
        adj = [[] for _ in range(self.nodes)]
        for edge in self.edges:
            adj[edge.u].append((edge.v, edge.resource))
            if not self.directed:
                adj[edge.v].append((edge.u, edge.resource))
        return tuple(tuple(sorted(a)) for a in adj)

    def reachable(self, source: int, allowed: Iterable[str] | None = None) -> set:
        """Nodes reachable from ``source`` using only ``allowed`` resources."""
        allowed = None if allowed is None else set(allowed)
        seen = {source}
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y, rid in self.adjacency[x]:
                if y not in seen and (allowed is None or rid in allowed):
                    seen.add(y)
                    queue.append(y)
        return seen


@dataclass(frozen=True)
class Routing:
    source: int
    target: int

    kind = "routing"


@dataclass(frozen=True)
class SetConnectivity:
    terminals: tuple

    kind = "set_connectivity"

    def __post_init__(self):
        object.__setattr__(self, "terminals", tuple(sorted(set(self.terminals))))


@dataclass(frozen=True)
class Explicit:
    actions: tuple  # tuple[Action, ...]

    kind = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(frozenset(a) for a in self.actions))


Request = Union[Routing, SetConnectivity, Explicit]


@dataclass(frozen=True)
class Agent:
    types: tuple  # tuple[Request, ...]
    prior: tuple  # tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(self.types))
        object.__setattr__(self, "prior", tuple(float(p) for p in self.prior))


@dataclass(frozen=True)
class Instance:
    resources: tuple  # tuple[Resource, ...]
    agents: tuple  # tuple[Agent, ...]
    graph: Graph | None = None
    _checked: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        # canonical order: resources sorted by id
        object.__setattr__(self, "resources", tuple(sorted(self.resources, key=lambda r: r.id)))
        object.__setattr__(self, "agents", tuple(self.agents))
        if self._checked:
            problems = self.violations()
            if problems:
                raise ValidationError(problems)

    def violations(self) -> list:
        out = []
        ids = [r.id for r in self.resources]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            out.append(f"duplicate resource ids: {dupes}")
        known = set(ids)
        if self.resources and self.alpha_max <= 1:
            out.append("alpha_max must exceed 1")
        if self.graph is not None:
            out.extend(self.graph.violations())
            for k, edge in enumerate(self.graph.edges):
                if edge.resource not in known:
                    out.append(f"edge {k}: unknown resource {edge.resource!r}")
        if not self.agents:
            out.append("instance needs at least one agent")
        for i, agent in enumerate(self.agents):
            where = f"agent {i}"
            if not agent.types:
                out.append(f"{where}: empty type space")
            if len(agent.prior) != len(agent.types):
                out.append(f"{where}: prior has {len(agent.prior)} entries for {len(agent.types)} types")
            if any(p < 0 or not math.isfinite(p) for p in agent.prior):
                out.append(f"{where}: negative or non-finite prior probability")
            total = math.fsum(agent.prior)
            if abs(total - 1.0) > PRIOR_TOL:
                out.append(f"{where}: prior sums to {total:.12g}")
            for t, req in enumerate(agent.types):
                out.extend(f"{where} type {t}: {msg}" for msg in request_violations(req, self.graph, known))
        return out

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @cached_property
    def resource_ids(self) -> tuple:
        return tuple(r.id for r in self.resources)

    @cached_property
    def cost_of(self) -> dict:
        return {r.id: r.cost for r in self.resources}

    @cached_property
    def alphas(self) -> tuple:
        """Distinct exponents appearing anywhere in the instance, sorted."""
        return tuple(sorted({a for r in self.resources for _, a in r.cost.terms}))

    @property
    def alpha_max(self) -> float:
        return max(self.alphas)


def request_violations(req, graph: Graph | None, known: set) -> list:
    out = []
    if isinstance(req, (Routing, SetConnectivity)):
        if graph is None:
            return [f"{req.kind} request needs a graph"]
        nodes = (req.source, req.target) if isinstance(req, Routing) else req.terminals
        for x in nodes:
            if not 0 <= x < graph.nodes:
                out.append(f"node {x} out of range [0, {graph.nodes})")
        if isinstance(req, SetConnectivity) and len(req.terminals) < 2:
            out.append("set connectivity needs at least 2 terminals")
    elif isinstance(req, Explicit):
        if not req.actions:
            out.append("explicit request lists no actions")
        for k, a in enumerate(req.actions):
            if not a:
                out.append(f"action {k} is empty")
            unknown = sorted(a - known)
            if unknown:
                out.append(f"action {k} references unknown resources {unknown}")
    else:
        out.append(f"unknown request type {type(req).__name__}")
    return out


def eval_cost(cost: CostFunction, load: int) -> float:
    if load < 0:
        raise ValueError(f"load must be nonnegative, got {load}")
    if load == 0:
        return 0.0
    return math.fsum(xi * load**alpha for xi, alpha in cost.terms)


def load(a: ActionProfile, e: str) -> int:
    return sum(1 for action in a if e in action)


def loads(a: ActionProfile) -> dict:
    out: dict = {}
    for action in a:
        for e in action:
            out[e] = out.get(e, 0) + 1
    return out


def cost_share(instance: Instance, i: int, a: ActionProfile, e: str) -> float:
    if e not in a[i]:
        return 0.0
    return instance.cost_of[e].share(load(a, e))


def realized_social_cost(instance: Instance, a: ActionProfile) -> float:
    counts = loads(a)
    return math.fsum(eval_cost(instance.cost_of[e], counts.get(e, 0)) for e in instance.resource_ids)


def individual_cost(instance: Instance, i: int, a: ActionProfile) -> float:
    return math.fsum(cost_share(instance, i, a, e) for e in a[i])


def feasible(req, a: Iterable[str], graph: Graph | None = None) -> bool:
    a = frozenset(a)
    if isinstance(req, Explicit):
        return a in req.actions
    if graph is None:
        raise ValueError(f"{req.kind} request needs a graph")
    if isinstance(req, Routing):
        if req.source == req.target:
            return True
        return req.target in graph.reachable(req.source, a)
    if isinstance(req, SetConnectivity):
        terms = req.terminals
        if graph.directed:
            # strong connectivity: every terminal reaches every other
            return all(set(terms) <= graph.reachable(x, a) for x in terms)
        return set(terms) <= graph.reachable(terms[0], a)
    raise TypeError(f"unknown request type {type(req).__name__}")


def check_action_profile(instance: Instance, t: TypeProfile, a: ActionProfile) -> None:
    if len(a) != instance.n_agents or len(t) != instance.n_agents:
        raise InfeasibleError("profile length does not match the number of agents")
    for i, (ti, ai) in enumerate(zip(t, a)):
        if not feasible(instance.agents[i].types[ti], ai, instance.graph):
            raise InfeasibleError(f"agent {i}: action {sorted(ai)} infeasible for type {ti}")


def check_strategy_profile(instance: Instance, s: StrategyProfile) -> None:
    """Raise ``ValidationError`` listing every (agent, type) whose action is infeasible."""
    problems = []
    if len(s) != instance.n_agents:
        raise ValidationError([f"strategy profile has {len(s)} entries for {instance.n_agents} agents"])
    known = set(instance.resource_ids)
    for i, (agent, table) in enumerate(zip(instance.agents, s)):
        if len(table) != len(agent.types):
            problems.append(f"agent {i}: {len(table)} actions for {len(agent.types)} types")
            continue
        for t, (req, action) in enumerate(zip(agent.types, table)):
            unknown = sorted(set(action) - known)
            if unknown:
                problems.append(f"agent {i} type {t}: unknown resources {unknown}")
            elif not feasible(req, action, instance.graph):
                problems.append(f"agent {i} type {t}: action {sorted(action)} is infeasible")
    if problems:
        raise ValidationError(problems)


def type_profile_probability(instance: Instance, t: TypeProfile) -> float:
    return math.prod(agent.prior[ti] for agent, ti in zip(instance.agents, t))


def realize(s: StrategyProfile, t: TypeProfile) -> ActionProfile:
    return tuple(table[ti] for table, ti in zip(s, t))
