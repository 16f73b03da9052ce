"""Fill-reducing orderings for symmetric sparsity patterns."""
import heapq

import numpy as np


def minimum_degree(a):
    """Minimum-degree elimination order of the symmetric pattern of ``a``.

    Works on the explicit elimination graph (exact external degrees), with
    ties broken by the smaller vertex index so the result is deterministic.
    Adequate for the few-thousand-unknown systems this package targets.
    """
    n = a.n_rows
    rows = a.row_indices()
    cols = a.col_indices
    off = rows != cols
    adj = [set() for _ in range(n)]
    for i, j in zip(rows[off].tolist(), cols[off].tolist()):
        adj[i].add(j)
        adj[j].add(i)
    heap = [(len(adj[i]), i) for i in range(n)]
    heapq.heapify(heap)
    done = np.zeros(n, dtype=bool)
    order = []
    while heap:
        deg, v = heapq.heappop(heap)
        if done[v] or deg != len(adj[v]):
            continue
        done[v] = True
        order.append(v)
        nbrs = adj[v]
        for u in nbrs:
            au = adj[u]
            au.discard(v)
            au.update(nbrs)
            au.discard(u)
        for u in nbrs:
            heapq.heappush(heap, (len(adj[u]), u))
        adj[v] = set()
    return np.asarray(order, dtype=np.int64)


def natural(a):
    return np.arange(a.n_rows, dtype=np.int64)
