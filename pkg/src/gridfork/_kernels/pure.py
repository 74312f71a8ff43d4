"""Pure-Python/NumPy kernels, the fallback when the compiled core is absent.

Both backends must consume randomness identically: one uniform draw per
unordered node pair, pairs enumerated in canonical order (i < j over the
row-major node ordering).  Pairs that are ineligible for a long link still
own their draw, so edge sets are nested as beta grows and stable across
scope policies.
"""

import heapq

import numpy as np


def sample_long_edges(xs, ys, beta, layers, uniforms):
    """Sample long-range edges over all canonical node pairs.

    xs, ys: int32 node coordinates in canonical order.
    layers: int32 per-node layer index relative to the scope source, -1 for
        the source itself, or None when every distance >= 2 pair is eligible.
    uniforms: one float64 draw per pair, canonical order.

    Returns (i_idx, j_idx) int32 arrays of sampled edge endpoints.
    """
    n = xs.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    d = np.abs(xs[iu] - xs[ju]) + np.abs(ys[iu] - ys[ju])
    eligible = d >= 2
    if layers is not None:
        li = layers[iu]
        lj = layers[ju]
        eligible &= (li >= 0) & (lj >= 0) & (np.abs(li - lj) == 1)
    prob = np.zeros(d.shape[0], dtype=np.float64)
    mask = d >= 2
    prob[mask] = np.power(d[mask].astype(np.float64), -beta)
    take = eligible & (uniforms < prob)
    return iu[take].astype(np.int32), ju[take].astype(np.int32)


def dijkstra(indptr, indices, weights, source):
    """First-arrival times from ``source`` over a CSR adjacency.

    Flooding with fixed per-link delays is exactly a shortest-path problem,
    so a binary heap gives the same times as event-driven simulation.
    """
    n = indptr.shape[0] - 1
    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    weights_l = weights.tolist()
    dist = [float("inf")] * n
    dist[source] = 0.0
    done = [False] * n
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for k in range(indptr_l[u], indptr_l[u + 1]):
            v = indices_l[k]
            dv = du + weights_l[k]
            if dv < dist[v]:
                dist[v] = dv
                heapq.heappush(heap, (dv, v))
    return np.asarray(dist, dtype=np.float64)
