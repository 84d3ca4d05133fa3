"""JSON instance and report formats, plus a seeded random instance generator.

Instance document::

    {"resources": [{"id": "e0", "terms": [{"xi": 1.0, "alpha": 2.0}]}, ...],
     "graph": {"nodes": 4, "directed": false,
               "edges": [{"from": 0, "to": 1, "resource": "e0"}, ...]},
     "agents": [{"types": [{"kind": "routing", "source": 0, "target": 3},
                           {"kind": "set_connectivity", "terminals": [0, 2, 3]},
                           {"kind": "explicit", "actions": [["e0"], ["e1", "e2"]]}],
                 "prior": [0.5, 0.25, 0.25]}]}

Canonical output sorts object keys and resource ids. Floats are written with
Python's shortest round-trip representation, so every double reloads exactly.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .model import (
    Agent,
    CostFunction,
    Edge,
    Explicit,
    Graph,
    Instance,
    Resource,
    Routing,
    SetConnectivity,
    ValidationError,
    check_strategy_profile,
    request_violations,
)

REPORT_FORMAT = "bgnd-report/1"
REQUEST_KINDS = ("routing", "set_connectivity", "explicit")


class ParseError(ValueError):
    """Malformed document; ``path`` locates the offending value."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _get(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise ParseError(path, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        raise ParseError(f"{path}.{key}", "missing")
    value = obj[key]
    if kind is not None and not _is(value, kind):
        raise ParseError(f"{path}.{key}", f"expected {kind}, got {type(value).__name__}")
    return value


def _is(value, kind) -> bool:
    if kind == "int":
        return isinstance(value, int) and not isinstance(value, bool)
    if kind == "number":
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind == "list":
        return isinstance(value, list)
    if kind == "str":
        return isinstance(value, str)
    if kind == "bool":
        return isinstance(value, bool)
    if kind == "object":
        return isinstance(value, dict)
    raise ValueError(kind)


def _rid(value, path) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ParseError(path, "resource id must be a string or integer")
    return str(value)


def _parse_request(doc, path):
    kind = _get(doc, "kind", path, "str")
    if kind == "routing":
        return Routing(_get(doc, "source", path, "int"), _get(doc, "target", path, "int"))
    if kind == "set_connectivity":
        terms = _get(doc, "terminals", path, "list")
        for k, x in enumerate(terms):
            if not _is(x, "int"):
                raise ParseError(f"{path}.terminals[{k}]", "expected int")
        return SetConnectivity(tuple(terms))
    if kind == "explicit":
        acts = _get(doc, "actions", path, "list")
        out = []
        for k, a in enumerate(acts):
            if not isinstance(a, list):
                raise ParseError(f"{path}.actions[{k}]", "expected a list of resource ids")
            out.append(frozenset(_rid(e, f"{path}.actions[{k}][{j}]") for j, e in enumerate(a)))
        return Explicit(tuple(out))
    raise ParseError(f"{path}.kind", f"unknown request kind {kind!r}; expected one of {REQUEST_KINDS}")


def parse_instance(doc) -> Instance:
    """Build an ``Instance`` from a decoded JSON document.

    Raises ``ParseError`` for structural problems and ``ValidationError``
    (listing every violation) for semantic ones.
    """
    resources = []
    problems = []
    for k, rdoc in enumerate(_get(doc, "resources", "$", "list")):
        path = f"$.resources[{k}]"
        rid = _rid(_get(rdoc, "id", path), f"{path}.id")
        terms = []
        for j, tdoc in enumerate(_get(rdoc, "terms", path, "list")):
            tpath = f"{path}.terms[{j}]"
            terms.append((_get(tdoc, "xi", tpath, "number"), _get(tdoc, "alpha", tpath, "number")))
        try:
            resources.append(Resource(rid, CostFunction(tuple(terms))))
        except ValidationError as exc:
            problems.extend(f"resource {rid!r}: {v}" for v in exc.violations)

    graph = None
    if doc.get("graph") is not None:
        gdoc = _get(doc, "graph", "$", "object")
        edges = []
        for k, edoc in enumerate(_get(gdoc, "edges", "$.graph", "list")):
            path = f"$.graph.edges[{k}]"
            edges.append(
                Edge(_get(edoc, "from", path, "int"), _get(edoc, "to", path, "int"), _rid(_get(edoc, "resource", path), f"{path}.resource"))
            )
        graph = Graph(_get(gdoc, "nodes", "$.graph", "int"), tuple(edges), bool(gdoc.get("directed", False)))

    agents = []
    for i, adoc in enumerate(_get(doc, "agents", "$", "list")):
        path = f"$.agents[{i}]"
        types = tuple(
            _parse_request(tdoc, f"{path}.types[{t}]") for t, tdoc in enumerate(_get(adoc, "types", path, "list"))
        )
        prior = _get(adoc, "prior", path, "list")
        for k, p in enumerate(prior):
            if not _is(p, "number"):
                raise ParseError(f"{path}.prior[{k}]", "expected a number")
        agents.append(Agent(types, tuple(prior)))

    if problems:
        raise ValidationError(problems)
    return Instance(tuple(resources), tuple(agents), graph)


def _request_doc(req) -> dict:
    if isinstance(req, Routing):
        return {"kind": "routing", "source": req.source, "target": req.target}
    if isinstance(req, SetConnectivity):
        return {"kind": "set_connectivity", "terminals": list(req.terminals)}
    return {"kind": "explicit", "actions": [sorted(a) for a in req.actions]}


def instance_to_doc(instance: Instance) -> dict:
    doc = {
        "resources": [
            {"id": r.id, "terms": [{"xi": xi, "alpha": a} for xi, a in r.cost.terms]}
            for r in instance.resources
        ],
        "agents": [
            {"types": [_request_doc(req) for req in agent.types], "prior": list(agent.prior)}
            for agent in instance.agents
        ],
    }
    g = instance.graph
    if g is not None:
        doc["graph"] = {
            "nodes": g.nodes,
            "directed": g.directed,
            "edges": [{"from": e.u, "to": e.v, "resource": e.resource} for e in g.edges],
        }
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename; never leaves partial output."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".bgnd-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None


def load_instance(path) -> Instance:
    return parse_instance(load_json(path))


def save_instance(instance: Instance, path) -> None:
    atomic_write(path, dumps(instance_to_doc(instance)))


def strategies_to_doc(s) -> list:
    return [[sorted(action) for action in table] for table in s]


def build_report(oracle_desc, constants, trace, bcr=None) -> dict:
    doc = {
        "format": REPORT_FORMAT,
        "oracle": {"kind": oracle_desc.kind, "rho": oracle_desc.rho},
        "constants": constants.as_dict(),
        "trace": {
            "budget": trace.budget,
            "rounds_executed": len(trace.rounds),
            "termination": trace.termination,
            "updates": [
                {"round": rec.round, "agent": rec.chosen, "delta": rec.deltas[rec.chosen]}
                for rec in trace.rounds
                if rec.chosen is not None
            ],
        },
        "strategies": strategies_to_doc(trace.final),
    }
    if trace.initial_potential is not None:
        doc["trace"]["diagnostics"] = {
            "initial": {"potential": trace.initial_potential, "social_cost": trace.initial_social_cost},
            "rounds": [{"potential": rec.potential, "social_cost": rec.social_cost} for rec in trace.rounds],
        }
    if bcr is not None:
        doc["bcr"] = bcr.as_dict()
    return doc


def serialize_report(report: dict) -> str:
    return dumps(report)


def parse_strategies(doc, instance: Instance) -> tuple:
    """Strategy tables from a report document, checked for feasibility against ``instance``."""
    if not isinstance(doc, dict) or doc.get("format") != REPORT_FORMAT:
        raise ParseError("$.format", f"expected {REPORT_FORMAT!r}")
    tables = _get(doc, "strategies", "$", "list")
    s = []
    for i, tdoc in enumerate(tables):
        if not isinstance(tdoc, list):
            raise ParseError(f"$.strategies[{i}]", "expected a list of actions")
        row = []
        for t, adoc in enumerate(tdoc):
            if not isinstance(adoc, list):
                raise ParseError(f"$.strategies[{i}][{t}]", "expected a list of resource ids")
            row.append(frozenset(_rid(e, f"$.strategies[{i}][{t}][{k}]") for k, e in enumerate(adoc)))
        s.append(tuple(row))
    s = tuple(s)
    check_strategy_profile(instance, s)
    return s


# -- generator ---------------------------------------------------------------

def _random_graph(rng, nodes: int, edge_density: float, max_edges: int, directed: bool):
    """Random spanning tree plus extra edges, each pair kept with ``edge_density``."""
    order = rng.permutation(nodes)
    pairs = []
    for k in range(1, nodes):
        a, b = int(order[k]), int(order[rng.integers(0, k)])
        pairs.append((a, b) if (not directed or rng.random() < 0.5) else (b, a))
    present = {frozenset(p) for p in pairs} if not directed else set(pairs)
    extra = []
    for a in range(nodes):
        for b in range(nodes):
            if a == b or (not directed and b < a):
                continue
            key = (a, b) if directed else frozenset((a, b))
            if key not in present and rng.random() < edge_density:
                extra.append((a, b))
    rng.shuffle(extra)
    pairs.extend(extra[: max(0, max_edges - len(pairs))])
    return pairs


def _random_terms(rng, alphas, xi_range):
    lo, hi = xi_range
    return tuple((float(rng.uniform(lo, hi)), float(a)) for a in alphas)


def _prior(rng, k: int) -> tuple:
    p = rng.dirichlet(np.ones(k))
    p = p / p.sum()
    return tuple(float(x) for x in p)


def generate_instance(
    seed: int,
    n_agents: int = 3,
    nodes: int = 6,
    edge_density: float = 0.3,
    types_per_agent: int = 2,
    alphas=(2.0,),
    xi_range=(0.5, 2.0),
    request_kind: str = "routing",
    directed: bool = False,
    max_edges: int = 12,
    n_resources: int = 6,
    max_terminals: int = 3,
    max_retries: int = 1000,
) -> Instance:
    """Seeded random instance (numpy PCG64 via ``default_rng(seed)``).

    Graph requests are rejection-resampled until satisfiable; explicit requests
    list 1-3 random nonempty resource subsets. Priors are symmetric Dirichlet.
    """
    if request_kind not in REQUEST_KINDS:
        raise ValueError(f"unknown request kind {request_kind!r}")
    rng = np.random.default_rng(seed)
    if request_kind == "explicit":
        ids = [f"e{k}" for k in range(n_resources)]
        resources = tuple(Resource(e, CostFunction(_random_terms(rng, alphas, xi_range))) for e in ids)
        agents = []
        for _ in range(n_agents):
            types = []
            for _ in range(types_per_agent):
                acts = set()
                for _ in range(int(rng.integers(1, 4))):
                    size = int(rng.integers(1, min(3, n_resources) + 1))
                    acts.add(frozenset(ids[int(x)] for x in rng.choice(n_resources, size, replace=False)))
                types.append(Explicit(tuple(sorted(acts, key=sorted))))
            agents.append(Agent(tuple(types), _prior(rng, types_per_agent)))
        return Instance(resources, tuple(agents))

    pairs = _random_graph(rng, nodes, edge_density, max_edges, directed)
    edges = tuple(Edge(a, b, f"e{k}") for k, (a, b) in enumerate(pairs))
    graph = Graph(nodes, edges, directed)
    resources = tuple(Resource(e.resource, CostFunction(_random_terms(rng, alphas, xi_range))) for e in edges)
    known = {r.id for r in resources}

    def draw_request():
        for _ in range(max_retries):
            if request_kind == "routing":
                u, v = (int(x) for x in rng.choice(nodes, 2, replace=False))
                if v in graph.reachable(u):
                    return Routing(u, v)
            else:
                k = int(rng.integers(2, min(max_terminals, nodes) + 1))
                terms = tuple(sorted(int(x) for x in rng.choice(nodes, k, replace=False)))
                reach = [graph.reachable(x) for x in terms]
                if all(set(terms) <= r for r in reach):
                    return SetConnectivity(terms)
        raise ValueError(f"no satisfiable {request_kind} request after {max_retries} draws")

    agents = []
    for _ in range(n_agents):
        types = tuple(draw_request() for _ in range(types_per_agent))
        assert all(not request_violations(t, graph, known) for t in types)
        agents.append(Agent(types, _prior(rng, types_per_agent)))
    return Instance(resources, tuple(agents), graph)
