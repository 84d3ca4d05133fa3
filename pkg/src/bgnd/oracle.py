"""Action oracles: given one request and a nonnegative weight per resource,
return a feasible action whose total weight is within ``rho`` of the minimum.

Three concrete oracles are provided:

* shortest path (exact, ``rho = 1``) for routing requests,
* metric-closure MST Steiner tree (``rho = 2``) for undirected set connectivity,
* direct argmin over the listed actions (exact) for explicit requests.

Ties are broken on the sorted resource-id sequence so repeated calls with the
same input always return the same action.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .model import Explicit, Graph, Routing, SetConnectivity

KINDS = ("auto", "shortest-path", "steiner", "explicit")
RHO = {"shortest-path": 1.0, "steiner": 2.0, "explicit": 1.0}


class OracleError(ValueError):
    """The request cannot be answered (unsatisfiable or unsupported)."""


@dataclass(frozen=True)
class OracleDescriptor:
    kind: str
    rho: float


def action_weight(action, w) -> float:
    return math.fsum(w[e] for e in action)


def _tiebreak_key(action) -> tuple:
    return tuple(sorted(action))


def _check_weights(w):
    bad = [e for e, x in w.items() if not (x >= 0 and math.isfinite(x))]
    if bad:
        raise OracleError(f"weights must be finite and nonnegative: {sorted(bad)}")


def shortest_path_tree(g: Graph, source: int, w) -> tuple:
    """Label-setting search from ``source``.

    Labels are ``(distance, node sequence, resource sequence)`` compared
    lexicographically, so among equal-weight paths the smallest node sequence
    is kept. Returns ``(dist, path_resources)`` dicts keyed by reached node.
    """
    dist: dict = {}
    route: dict = {}
    heap = [(0.0, (source,), (), source)]
    while heap:
        d, nodes, rids, x = heapq.heappop(heap)
        if x in dist:
            continue
        dist[x] = d
        route[x] = rids
        for y, rid in g.adjacency[x]:
            if y not in dist:
                heapq.heappush(heap, (d + w[rid], nodes + (y,), rids + (rid,), y))
    return dist, route


def shortest_path(g: Graph, u: int, v: int, w) -> frozenset:
    if u == v:
        return frozenset()
    _check_weights(w)
    dist, route = shortest_path_tree(g, u, w)
    if v not in dist:
        raise OracleError(f"no path from {u} to {v}")
    return frozenset(route[v])


def _kruskal(n_nodes: int, weighted_edges) -> list:
    """Minimum spanning forest; ``weighted_edges`` are ``(key, a, b, payload)`` sorted by key."""
    parent = list(range(n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []
    for key, a, b, payload in sorted(weighted_edges):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            chosen.append((a, b, payload))
    return chosen


def steiner_mst(g: Graph, terminals, w) -> frozenset:
    """2-approximate Steiner tree: MST of the terminal metric closure, expanded
    to graph paths, re-spanned, then stripped of non-terminal leaves."""
    if g.directed:
        raise OracleError("steiner oracle supports undirected graphs only")
    terms = sorted(set(terminals))
    if len(terms) <= 1:
        return frozenset()
    _check_weights(w)
    trees = {x: shortest_path_tree(g, x, w) for x in terms}
    closure = []
    for a_idx, a in enumerate(terms):
        dist, route = trees[a]
        for b_idx in range(a_idx + 1, len(terms)):
            b = terms[b_idx]
            if b not in dist:
                raise OracleError(f"terminals {a} and {b} are disconnected")
            closure.append(((dist[b], a, b), a_idx, b_idx, route[b]))
    union = set()
    for _, _, path in _kruskal(len(terms), closure):
        union.update(path)

    sub = [((w[rid], rid), g.edge_of[rid].u, g.edge_of[rid].v, rid) for rid in union]
    tree = {rid: (a, b) for a, b, rid in _kruskal(g.nodes, sub)}

    keep = set(terms)
    while True:
        degree: dict = {}
        for a, b in tree.values():
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
        leaves = {x for x, d in degree.items() if d == 1 and x not in keep}
        if not leaves:
            break
        tree = {rid: ab for rid, ab in tree.items() if ab[0] not in leaves and ab[1] not in leaves}
    return frozenset(tree)


def explicit_argmin(req: Explicit, w) -> frozenset:
    if not req.actions:
        raise OracleError("explicit request lists no actions")
    _check_weights({e: w[e] for a in req.actions for e in a})
    return min(req.actions, key=lambda a: (action_weight(a, w), _tiebreak_key(a)))


class Oracle:
    """Dispatching action oracle.

    ``kind='auto'`` picks shortest path for routing, Steiner for undirected set
    connectivity and the explicit argmin for explicit requests. A fixed kind
    refuses requests it cannot answer.
    """

    def __init__(self, kind: str = "auto"):
        if kind not in KINDS:
            raise ValueError(f"unknown oracle kind {kind!r}; expected one of {KINDS}")
        self.kind = kind

    def resolve(self, req, g: Graph | None) -> str:
        if isinstance(req, Routing):
            natural = "shortest-path"
        elif isinstance(req, SetConnectivity):
            if g is not None and g.directed:
                raise OracleError("no oracle for directed set connectivity; encode it as an explicit request")
            natural = "steiner"
        elif isinstance(req, Explicit):
            natural = "explicit"
        else:
            raise OracleError(f"unknown request type {type(req).__name__}")
        if self.kind != "auto" and self.kind != natural:
            raise OracleError(f"oracle {self.kind!r} cannot answer a {req.kind} request")
        return natural

    def descriptor(self, instance) -> OracleDescriptor:
        """The guarantee this oracle gives on ``instance`` (worst ``rho`` over its requests)."""
        kinds = {self.resolve(req, instance.graph) for agent in instance.agents for req in agent.types}
        rho = max(RHO[k] for k in kinds)
        label = self.kind if self.kind != "auto" else "+".join(sorted(kinds))
        return OracleDescriptor(label, rho)

    def __call__(self, req, w, g: Graph | None = None) -> frozenset:
        return best_action(req, w, g, self.resolve(req, g))


def best_action(req, w, g: Graph | None = None, kind: str | None = None) -> frozenset:
    if kind is None:
        kind = Oracle().resolve(req, g)
    if kind == "shortest-path":
        if g is None:
            raise OracleError("routing request needs a graph")
        return shortest_path(g, req.source, req.target, w)
    if kind == "steiner":
        if g is None:
            raise OracleError("set connectivity request needs a graph")
        return steiner_mst(g, req.terminals, w)
    return explicit_argmin(req, w)
