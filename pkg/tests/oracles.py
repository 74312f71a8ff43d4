"""Independent reference implementations the tests check the package against.

Each oracle deliberately avoids the code path it validates: brute-force
enumeration, naive event-driven simulation, numeric ODE integration,
high-precision arithmetic and explicit series summation.
"""

from __future__ import annotations

import math
from decimal import Decimal, getcontext

import numpy as np


def enumerate_layer_population(j: int, window: int = 300) -> int:
    """Count unbounded-lattice nodes at distance in (2**(j-1), 2**j] of a
    fixed origin by scanning a window that surely contains them."""
    lo = 1 if j == 0 else 2 ** (j - 1)
    hi = 1 if j == 0 else 2 ** j
    assert hi <= window
    count = 0
    for dx in range(-window, window + 1):
        for dy in range(-window, window + 1):
            d = abs(dx) + abs(dy)
            if j == 0:
                if d == 1:
                    count += 1
            elif lo < d <= hi:
                count += 1
    return count


def ring_sum_population(j: int) -> int:
    """Same count via the 4*i nodes-per-ring identity."""
    if j == 0:
        return 4
    return sum(4 * i for i in range(2 ** (j - 1) + 1, 2 ** j + 1))


def rk4_logistic(population: int, contact_rate: float, grid, step: float = 0.002):
    """Fourth-order integration of dI/dw = rate * I * (population - I), I(0)=1."""

    def f(y):
        return contact_rate * y * (population - y)

    out = []
    y, t = 1.0, 0.0
    for tg in grid:
        while t < tg - 1e-12:
            h = min(step, tg - t)
            k1 = f(y)
            k2 = f(y + 0.5 * h * k1)
            k3 = f(y + 0.5 * h * k2)
            k4 = f(y + h * k3)
            y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
        out.append(y)
    return np.asarray(out)


def event_loop_times(topology, source, delta_s: float, delta_l: float) -> np.ndarray:
    """Naive event-driven flooding: scan-for-earliest event list, no heap."""
    indptr, indices, is_long = topology.csr()
    n = len(topology.nodes)
    src = topology.node_index[source]
    best = [math.inf] * n
    best[src] = 0.0
    pending = [(0.0, src)]
    while pending:
        k = min(range(len(pending)), key=lambda i: pending[i][0])
        t, u = pending.pop(k)
        if t > best[u]:
            continue
        for e in range(indptr[u], indptr[u + 1]):
            v = int(indices[e])
            tv = t + (delta_l if is_long[e] else delta_s)
            if tv < best[v]:
                best[v] = tv
                pending.append((tv, v))
    return np.asarray(best, dtype=np.float64)


def decimal_crossing_probability(j: int, beta: int, prec: int = 60) -> Decimal:
    """High-precision 1 - (1 - (3*2**(j-1))**(-beta))**pairs."""
    getcontext().prec = prec
    base = Decimal(3 * 2 ** (j - 1))
    p_min = 1 / (base ** beta)
    n_prev = 3 * 2 ** (2 * (j - 1) - 1) + 2 ** (j - 1) if j - 1 >= 1 else 4
    n_j = 3 * 2 ** (2 * j - 1) + 2 ** j
    pairs = n_prev * n_j
    return 1 - (1 - p_min) ** pairs


def skellam_tail(k: int, lam_h: float, lam_a: float) -> float:
    """P(adversary - honest >= k) by explicit truncated double summation of
    the two Poisson series."""
    hi_a = int(lam_a + 12 * math.sqrt(lam_a + 1) + 30)
    hi_h = int(lam_h + 12 * math.sqrt(lam_h + 1) + 30)
    pa = [math.exp(-lam_a)]
    for a in range(1, hi_a + 1):
        pa.append(pa[-1] * lam_a / a)
    ph = [math.exp(-lam_h)]
    for h in range(1, hi_h + 1):
        ph.append(ph[-1] * lam_h / h)
    ph_cum = np.cumsum(ph)
    total = 0.0
    for a in range(hi_a + 1):
        h_max = a - k
        if h_max < 0:
            continue
        total += pa[a] * float(ph_cum[min(h_max, hi_h)])
    return total


def skellam_race_k(lam_h: float, lam_a: float, eps: float) -> int:
    """Smallest lead k >= 1 with tail probability at most eps."""
    k = 1
    while skellam_tail(k, lam_h, lam_a) > eps:
        k += 1
    return k
