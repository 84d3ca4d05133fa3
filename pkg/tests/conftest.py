import random

import pytest

from bgnd.evaluate import candidate_actions
from bgnd.model import (
    Agent,
    CostFunction,
    Edge,
    Explicit,
    Graph,
    Instance,
    Resource,
    Routing,
)

ACCEPTANCE = {}


def quad(xi=1.0, alpha=2.0):
    return CostFunction(((xi, alpha),))


def explicit_instance(n_agents, n_types, n_res, rng, alphas=(2.0,), xi=(0.5, 2.0), max_actions=3):
    """Random explicit-request instance built from a ``random.Random``."""
    ids = [f"r{k}" for k in range(n_res)]
    resources = [Resource(e, CostFunction(tuple((rng.uniform(*xi), a) for a in alphas))) for e in ids]
    agents = []
    for _ in range(n_agents):
        k = rng.randint(1, n_types)
        types = []
        for _ in range(k):
            acts = {frozenset(rng.sample(ids, rng.randint(1, min(3, n_res)))) for _ in range(rng.randint(1, max_actions))}
            types.append(Explicit(tuple(sorted(acts, key=sorted))))
        raw = [rng.random() + 0.05 for _ in range(k)]
        if rng.random() < 0.2:
            raw[0] = 0.0 if k > 1 else raw[0]
        total = sum(raw)
        prior = [x / total for x in raw]
        prior[-1] = 1.0 - sum(prior[:-1])
        agents.append(Agent(tuple(types), tuple(prior)))
    return Instance(tuple(resources), tuple(agents))


def random_strategy(instance, rng):
    return tuple(
        tuple(rng.choice(candidate_actions(instance, req)) for req in agent.types) for agent in instance.agents
    )


def two_path_graph():
    """Nodes 0..3; upper path 0-1-3 (a, b), lower path 0-2-3 (c, d)."""
    edges = (Edge(0, 1, "a"), Edge(1, 3, "b"), Edge(0, 2, "c"), Edge(2, 3, "d"))
    return Graph(4, edges)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def two_path_instance():
    g = two_path_graph()
    res = tuple(Resource(e, quad()) for e in "abcd")
    agents = (Agent((Routing(0, 3),), (1.0,)), Agent((Routing(0, 3),), (1.0,)))
    return Instance(res, agents, g)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    key = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        ok = rep.outcome == "passed"
        prev = ACCEPTANCE.get(key, (True, marker.args[1]))
        ACCEPTANCE[key] = (prev[0] and ok, marker.args[1])


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[1:])):
        ok, title = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {key}: {title}")
