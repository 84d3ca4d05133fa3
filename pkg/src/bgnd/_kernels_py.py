"""Pure-Python kernels; same algorithms and operation order as ``_kernels.pyx``."""

import numpy as np

BACKEND = "python"


def pb_pmf(probs):
    """Probability mass function of a sum of independent Bernoulli variables."""
    p = [float(x) for x in probs]
    f = [0.0] * (len(p) + 1)
    f[0] = 1.0
    for k, r in enumerate(p):
        q = 1.0 - r
        for j in range(k + 1, 0, -1):
            f[j] = f[j] * q + f[j - 1] * r
        f[0] = f[0] * q
    return np.array(f, dtype=np.float64)


def search_min_profile(tables, agent_off, cand_off, cand_edges):
    """Branch and bound over candidate-action products; see the compiled twin."""
    tab = [list(map(float, row)) for row in np.asarray(tables, dtype=np.float64)]
    aoff = [int(x) for x in agent_off]
    coff = [int(x) for x in cand_off]
    edges = [int(x) for x in cand_edges]
    n = len(aoff) - 1
    m = len(tab)
    loads = [0] * m
    choice = [0] * n
    best_choice = [-1] * n
    best = float("inf")
    visited = 0
    if n == 0:
        return 0.0, np.array(best_choice, dtype=np.int64), 0
    depth = 0
    choice[0] = aoff[0] - 1
    while depth >= 0:
        c = choice[depth]
        if c >= aoff[depth]:
            for k in range(coff[c], coff[c + 1]):
                loads[edges[k]] -= 1
        c += 1
        if c >= aoff[depth + 1]:
            choice[depth] = aoff[depth] - 1
            depth -= 1
            continue
        choice[depth] = c
        for k in range(coff[c], coff[c + 1]):
            loads[edges[k]] += 1
        visited += 1
        cost = 0.0
        for e in range(m):
            cost += tab[e][loads[e]]
        if cost >= best:
            continue
        if depth == n - 1:
            best = cost
            best_choice = [choice[k] - aoff[k] for k in range(n)]
            continue
        depth += 1
        choice[depth] = aoff[depth] - 1
    return best, np.array(best_choice, dtype=np.int64), visited
