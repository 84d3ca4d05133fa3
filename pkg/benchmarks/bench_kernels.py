"""Compare the compiled kernels against the pure-Python fallback.

Run from the repository root after building the extension::

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so the ``BGND_PURE_PYTHON`` switch does
not matter here. Every case also checks that the two backends agree bit for bit.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from bgnd import _kernels_py
from bgnd.evaluate import OptContext
from bgnd.io import generate_instance

try:
    from bgnd import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def pmf_cases(rng):
    for n in (4, 16, 64, 256):
        yield f"pb_pmf n={n}", "pb_pmf", (rng.random(n),)


def search_cases():
    """Kernel inputs for the optimum search, built from generated instances."""
    specs = [
        ("explicit N=4 T=3", dict(n_agents=4, types_per_agent=3, request_kind="explicit", n_resources=6)),
        ("routing N=4 8 nodes", dict(n_agents=4, types_per_agent=1, request_kind="routing", nodes=8, max_edges=12, edge_density=0.5)),
        ("steiner N=3 6 nodes", dict(n_agents=3, types_per_agent=1, request_kind="set_connectivity", nodes=6, max_edges=9, edge_density=0.6)),
    ]
    for label, params in specs:
        inst = generate_instance(5, alphas=(2.0,), **params)
        ctx = OptContext(inst)
        t = (0,) * inst.n_agents
        cands = [ctx.candidates(i, ti) for i, ti in enumerate(t)]
        flat = [a for c in cands for a in c]
        agent_off = np.cumsum([0] + [len(c) for c in cands], dtype=np.int64)
        cand_off = np.cumsum([0] + [len(a) for a in flat], dtype=np.int64)
        cand_edges = np.array([ctx.index[e] for a in flat for e in sorted(a)], dtype=np.int64)
        size = int(np.prod([len(c) for c in cands]))
        yield f"search {label} ({size} profiles)", "search_min_profile", (ctx.tables, agent_off, cand_off, cand_edges)


def best_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    if _kernels_c is None:
        print("compiled extension not built; timing the Python fallback only")
    rng = np.random.default_rng(0)
    print(f"{'case':<48} {'python':>12} {'cython':>12} {'speedup':>9}")
    for label, name, inputs in [*pmf_cases(rng), *search_cases()]:
        py = best_time(getattr(_kernels_py, name), inputs, args.repeat)
        if _kernels_c is None:
            print(f"{label:<48} {py * 1e6:>10.1f}us")
            continue
        cy = best_time(getattr(_kernels_c, name), inputs, args.repeat)
        if not same(getattr(_kernels_py, name)(*inputs), getattr(_kernels_c, name)(*inputs)):
            raise SystemExit(f"backends disagree on {label}")
        print(f"{label:<48} {py * 1e6:>10.1f}us {cy * 1e6:>10.1f}us {py / cy:>8.1f}x")


if __name__ == "__main__":
    main()
