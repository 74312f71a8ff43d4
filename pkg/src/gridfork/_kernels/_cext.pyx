# cython: language_level=3
"""Compiled kernels: per-pair long-link sampling and shortest-path flooding.

Semantics mirror gridfork._kernels.pure exactly, including the canonical
pair order and the one-draw-per-pair convention.
"""

from libc.math cimport pow, INFINITY

import numpy as np


def sample_long_edges(const int[::1] xs, const int[::1] ys, double beta, layers,
                      const double[::1] uniforms):
    """Sample long-range edges; see the pure backend for the contract."""
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t i, j
    cdef Py_ssize_t k = 0
    cdef int d
    cdef double p
    cdef bint scoped = layers is not None
    cdef const int[::1] lay
    if scoped:
        lay = layers
    out_i = []
    out_j = []
    for i in range(n):
        for j in range(i + 1, n):
            d = abs(xs[i] - xs[j]) + abs(ys[i] - ys[j])
            if d >= 2:
                if not scoped or (lay[i] >= 0 and lay[j] >= 0 and abs(lay[i] - lay[j]) == 1):
                    p = pow(<double> d, -beta)
                    if uniforms[k] < p:
                        out_i.append(i)
                        out_j.append(j)
            k += 1
    return (np.asarray(out_i, dtype=np.int32), np.asarray(out_j, dtype=np.int32))


cdef inline void _sift_up(double[::1] hkey, int[::1] hnode, Py_ssize_t pos) noexcept:
    cdef Py_ssize_t parent
    cdef double key = hkey[pos]
    cdef int node = hnode[pos]
    while pos > 0:
        parent = (pos - 1) >> 1
        if hkey[parent] <= key:
            break
        hkey[pos] = hkey[parent]
        hnode[pos] = hnode[parent]
        pos = parent
    hkey[pos] = key
    hnode[pos] = node


cdef inline void _sift_down(double[::1] hkey, int[::1] hnode, Py_ssize_t size) noexcept:
    cdef Py_ssize_t pos = 0
    cdef Py_ssize_t child
    cdef double key = hkey[pos]
    cdef int node = hnode[pos]
    while True:
        child = 2 * pos + 1
        if child >= size:
            break
        if child + 1 < size and hkey[child + 1] < hkey[child]:
            child += 1
        if hkey[child] >= key:
            break
        hkey[pos] = hkey[child]
        hnode[pos] = hnode[child]
        pos = child
    hkey[pos] = key
    hnode[pos] = node


def dijkstra(const int[::1] indptr, const int[::1] indices, const double[::1] weights, int source):
    """First-arrival times from ``source`` over a CSR adjacency."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t m = indices.shape[0]
    dist_arr = np.full(n, np.inf, dtype=np.float64)
    cdef double[::1] dist = dist_arr
    done_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] done = done_arr
    # every edge can push once, plus the source entry
    hkey_arr = np.empty(m + 1, dtype=np.float64)
    hnode_arr = np.empty(m + 1, dtype=np.int32)
    cdef double[::1] hkey = hkey_arr
    cdef int[::1] hnode = hnode_arr
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t k
    cdef int u, v
    cdef double du, dv

    dist[source] = 0.0
    hkey[0] = 0.0
    hnode[0] = source
    size = 1
    while size > 0:
        du = hkey[0]
        u = hnode[0]
        size -= 1
        if size > 0:
            hkey[0] = hkey[size]
            hnode[0] = hnode[size]
            _sift_down(hkey, hnode, size)
        if done[u]:
            continue
        done[u] = 1
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            dv = du + weights[k]
            if dv < dist[v]:
                dist[v] = dv
                hkey[size] = dv
                hnode[size] = v
                size += 1
                _sift_up(hkey, hnode, size - 1)
    return dist_arr
