# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. ``_kernels_py`` mirrors every function operation for operation."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def pb_pmf(probs):
    """Probability mass function of a sum of independent Bernoulli variables."""
    cdef double[::1] p = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t k, j
    cdef double q, r
    out = np.zeros(n + 1, dtype=np.float64)
    cdef double[::1] f = out
    f[0] = 1.0
    for k in range(n):
        r = p[k]
        q = 1.0 - r
        for j in range(k + 1, 0, -1):
            f[j] = f[j] * q + f[j - 1] * r
        f[0] = f[0] * q
    return out


def search_min_profile(tables, agent_off, cand_off, cand_edges):
    """Depth-first branch and bound over the product of per-agent candidate actions.

    ``tables[e, l]`` is the cost of resource ``e`` at load ``l``. Candidates of
    agent ``k`` occupy ``agent_off[k]:agent_off[k+1]``; candidate ``c`` touches
    resources ``cand_edges[cand_off[c]:cand_off[c+1]]``. Partial costs only grow
    as agents are added, so a branch whose partial cost reaches the incumbent is
    cut. The first minimum in lexicographic candidate order wins.

    Returns ``(best_cost, local_choice, nodes_visited)``.
    """
    cdef double[:, ::1] tab = np.ascontiguousarray(tables, dtype=np.float64)
    cdef long long[::1] aoff = np.ascontiguousarray(agent_off, dtype=np.int64)
    cdef long long[::1] coff = np.ascontiguousarray(cand_off, dtype=np.int64)
    cdef long long[::1] edges = np.ascontiguousarray(cand_edges, dtype=np.int64)
    cdef Py_ssize_t n = aoff.shape[0] - 1
    cdef Py_ssize_t m = tab.shape[0]
    loads_arr = np.zeros(m, dtype=np.int64)
    choice_arr = np.zeros(n, dtype=np.int64)
    best_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] loads = loads_arr
    cdef long long[::1] choice = choice_arr
    cdef long long[::1] best_choice = best_arr
    cdef double best = np.inf
    cdef double cost
    cdef long long visited = 0
    cdef Py_ssize_t depth, e, k
    cdef long long c

    if n == 0:
        return 0.0, best_arr, 0
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
            cost += tab[e, loads[e]]
        if cost >= best:
            continue
        if depth == n - 1:
            best = cost
            for k in range(n):
                best_choice[k] = choice[k] - aoff[k]
            continue
        depth += 1
        choice[depth] = aoff[depth] - 1
    return best, best_arr, visited
