"""Closed-form propagation and forking analytics.

Layer populations, the expected time for the chain to advance one layer,
cumulative activation times, logistic intra-layer growth, the global
activation degree, per-interval and cumulative fork probabilities, and the
dynamic robust level against intentional forks.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HonestMinorityWarning, ParameterError, SingularityError
from .params import ActivationVariant, ModelParams, TauPolicy


def layer_population(j: int) -> int:
    """Nodes in layer j of an unbounded lattice: 4 for j=0, else 3*2**(2j-1) + 2**j."""
    if j < 0:
        raise ParameterError(f"layer index must be >= 0, got {j}")
    if j == 0:
        return 4
    return 3 * 2 ** (2 * j - 1) + 2 ** j


def cross_layer_pairs(j: int) -> int:
    """Number of node pairs spanning layers j-1 and j, for j >= 2.

    Equals layer_population(j-1) * layer_population(j).  Undefined for j < 2
    because the closed-form population does not hold at layer 0.
    """
    if j < 2:
        raise ParameterError(f"cross-layer pair count needs j >= 2, got {j}")
    return layer_population(j - 1) * layer_population(j)


@dataclass(frozen=True)
class LayerStats:
    """Per-layer quantities the growth formulas consume."""

    j: int
    population: int
    cross_pairs: int | None
    contact_rate: float


def layer_stats(j: int) -> LayerStats:
    if j < 1:
        raise ParameterError(f"layer stats need j >= 1, got {j}")
    pop = layer_population(j)
    return LayerStats(
        j=j,
        population=pop,
        cross_pairs=cross_layer_pairs(j) if j >= 2 else None,
        contact_rate=4.0 / (pop - 1),
    )


def crossing_probability(j: int, beta: float) -> float:
    """Probability that at least one long link spans layers j-1 and j (j >= 2).

    The minimum pair probability (3 * 2**(j-1))**(-beta) over all
    cross-layer pairs gives 1 - (1 - p_min)**pairs.
    """
    if j < 2:
        raise ParameterError(f"crossing probability needs j >= 2, got {j}")
    if beta <= 0:
        raise ParameterError(f"long-range factor must be positive, got {beta}")
    p_min = float(3 * 2 ** (j - 1)) ** (-beta)
    pairs = cross_layer_pairs(j)
    return -math.expm1(pairs * math.log1p(-p_min))


def long_route_time(j: int, params: ModelParams) -> float:
    """Crossing time into layer j via a long link, per the configured policy."""
    if j < 2:
        raise ParameterError(f"long-route time needs j >= 2, got {j}")
    if params.tau_policy is TauPolicy.FIXED:
        return params.delta_l
    return params.delta_l + params.c * params.delta_s * 2.0 ** (j - 2)


def adjacent_propagation_time(j: int, params: ModelParams) -> float:
    """Expected time for the chain to advance from layer j-1 to layer j.

    Layers 0 and 1 take exactly one short hop.  Deeper layers mix the
    long-link crossing with a discounted short-hop walk of up to 2**(j-2)
    steps.  The mixture is an optimistic lower bound used as the point
    estimate; the simulator provides the empirical truth.
    """
    if j < 0:
        raise ParameterError(f"layer index must be >= 0, got {j}")
    if j <= 1:
        return params.delta_s
    p_cross = crossing_probability(j, params.beta)
    short_time = params.c * params.delta_s * 2.0 ** (j - 2)
    return p_cross * long_route_time(j, params) + (1.0 - p_cross) * short_time


@dataclass(frozen=True)
class ActivationSchedule:
    """Per-layer advance times and cumulative first-arrival times."""

    apt: dict[int, float]
    cumulative: dict[int, float]
    max_layer: int

    @classmethod
    def from_cumulative(cls, cumulative: dict[int, float]) -> "ActivationSchedule":
        """Wrap externally measured first-arrival times (e.g. simulated means)."""
        if not cumulative:
            raise ParameterError("cumulative activation times must not be empty")
        ordered = dict(sorted(cumulative.items()))
        apt = {}
        prev = 0.0
        for j, t in ordered.items():
            apt[j] = t - prev
            prev = t
        return cls(apt=apt, cumulative=ordered, max_layer=max(ordered))


def build_schedule(params: ModelParams, max_layer: int) -> ActivationSchedule:
    """Activation times for layers 0..max_layer from the closed-form advance times."""
    if max_layer < 0:
        raise ParameterError(f"max layer must be >= 0, got {max_layer}")
    apt = {j: adjacent_propagation_time(j, params) for j in range(max_layer + 1)}
    cumulative = {}
    total = 0.0
    for j in range(max_layer + 1):
        total += apt[j]
        cumulative[j] = total
    return ActivationSchedule(apt=apt, cumulative=cumulative, max_layer=max_layer)


def activation_time(j: int, params: ModelParams) -> float:
    """Expected time the first node of layer j receives the chain."""
    if j < 0:
        raise ParameterError(f"layer index must be >= 0, got {j}")
    return build_schedule(params, j).cumulative[j]


def local_activation_degree(j: int, omega: float, stats: LayerStats | None = None) -> float:
    """Activated nodes inside layer j, a time ``omega`` after its first arrival.

    Logistic growth from one seed node toward the layer population, the
    exact solution of dI/dw = contact_rate * I * (population - I), I(0) = 1.
    """
    if omega < 0:
        raise ParameterError(f"elapsed time must be >= 0, got {omega}")
    if stats is None:
        stats = layer_stats(j)
    n = stats.population
    return n / (1.0 + (n - 1) * math.exp(-stats.contact_rate * n * omega))


def global_activation_degree(
    t: float,
    params: ModelParams,
    schedule: ActivationSchedule,
    total: int,
    variant: ActivationVariant = ActivationVariant.PAPER_LITERAL,
) -> float:
    """Network-wide activated node count at time t > 0, clamped to ``total``.

    Piecewise: 1 before layer 0 activates, 5 until layer 1, 13 until
    layer 2, then 13 plus logistic growth terms for the deeper layers
    (starting at layer 3 or, under INCLUDE_LAYER2, at layer 2).
    """
    if t <= 0:
        raise DomainError(f"activation degree is defined for t > 0, got {t}")
    times = schedule.cumulative
    if t < times.get(0, math.inf):
        return min(1.0, float(total))
    if t < times.get(1, math.inf):
        return min(5.0, float(total))
    if t < times.get(2, math.inf):
        return min(13.0, float(total))
    j_start = 3 if variant is ActivationVariant.PAPER_LITERAL else 2
    acc = 13.0
    for j in range(j_start, schedule.max_layer + 1):
        tj = times.get(j)
        if tj is None or t < tj:
            continue
        acc += local_activation_degree(j, t - tj)
    return min(acc, float(total))


def activation_curve(
    grid,
    params: ModelParams,
    schedule: ActivationSchedule,
    total: int,
    variant: ActivationVariant = ActivationVariant.PAPER_LITERAL,
) -> np.ndarray:
    """Activation degree sampled on a time grid; t <= 0 maps to the lone creator."""
    out = np.empty(len(grid), dtype=np.float64)
    for k, t in enumerate(grid):
        out[k] = 1.0 if t <= 0 else global_activation_degree(t, params, schedule, total, variant)
    return out


def susceptible_count(
    t: float,
    total: int,
    params: ModelParams,
    schedule: ActivationSchedule,
    variant: ActivationVariant = ActivationVariant.PAPER_LITERAL,
) -> float:
    """Nodes still unaware of the chain at time t, floored at zero."""
    i_t = 1.0 if t <= 0 else global_activation_degree(t, params, schedule, total, variant)
    return max(float(total) - i_t, 0.0)


def _require_rate(params: ModelParams) -> float:
    if params.pi_u is None:
        raise ParameterError("mining rate pi_u is not set on the model parameters")
    return params.pi_u


def fork_rate_from_load(total_rate: float, delta: float) -> float:
    """Probability of at least one block in an interval given the aggregate rate.

    With non-uniform computing power, pass the sum of the susceptible
    nodes' individual rates.
    """
    if delta <= 0:
        raise ParameterError(f"interval length must be positive, got {delta}")
    if total_rate < 0:
        raise ParameterError(f"aggregate rate must be >= 0, got {total_rate}")
    return -math.expm1(-delta * total_rate)


def fork_prob_unit_from_susceptible(susceptible: float, params: ModelParams) -> float:
    """Per-interval fork probability with ``susceptible`` uniform-rate miners."""
    return fork_rate_from_load(max(susceptible, 0.0) * _require_rate(params), params.delta)


def fork_prob_unit(
    t: float,
    params: ModelParams,
    schedule: ActivationSchedule,
    total: int,
    variant: ActivationVariant = ActivationVariant.PAPER_LITERAL,
) -> float:
    """Probability a conflicting block appears during [t, t + delta)."""
    s_t = susceptible_count(t, total, params, schedule, variant)
    return fork_prob_unit_from_susceptible(s_t, params)


def fork_prob_cumulative_from_susceptible(susceptible_series, params: ModelParams) -> float:
    """Cumulative fork probability from susceptible counts at 0, delta, 2*delta, ..."""
    rate = _require_rate(params)
    load = sum(max(float(s), 0.0) for s in susceptible_series) * rate
    return -math.expm1(-params.delta * load)


def fork_prob_cumulative(
    t: float,
    params: ModelParams,
    schedule: ActivationSchedule,
    total: int,
    variant: ActivationVariant = ActivationVariant.PAPER_LITERAL,
) -> float:
    """Probability at least one conflicting block appears during [0, t + delta).

    ``t`` must be a whole multiple of the interval length, inside the horizon
    when one is set.
    """
    delta = params.delta
    steps = t / delta
    if abs(steps - round(steps)) > 1e-9:
        raise ParameterError(f"t={t} is not a multiple of the interval {delta}")
    if t < 0 or (params.horizon is not None and t > params.horizon - delta + 1e-9):
        raise ParameterError(f"t={t} outside [0, horizon - delta]")
    series = [
        susceptible_count(k * delta, total, params, schedule, variant)
        for k in range(int(round(steps)) + 1)
    ]
    return fork_prob_cumulative_from_susceptible(series, params)


def robust_level_from_activation(i_t: float, params: ModelParams) -> float:
    """Required block lead for an adversary attack to stay below the
    vulnerability threshold, given the activated count i_t.

    Equals -log(eps) / log(gamma * i_t / (lambda_adv * e_adv)); the ratio of
    logarithms makes the value independent of the logarithm base.  A ratio
    below 1 (honest side outgunned) returns the negative value under a
    HonestMinorityWarning rather than failing silently.
    """
    denom = params.lambda_adv * params.e_adv
    if denom <= 0:
        raise DomainError("adversary power is zero; the power ratio is undefined")
    ratio = params.gamma * i_t / denom
    if ratio <= 0:
        raise DomainError(f"power ratio must be positive, got {ratio}")
    if ratio == 1.0:
        raise SingularityError("honest and adversary power are equal; the level diverges")
    value = -math.log(params.epsilon) / math.log(ratio)
    if ratio < 1.0:
        warnings.warn(
            f"honest power ratio {ratio:.6g} < 1; robust level {value:.6g} is negative",
            HonestMinorityWarning,
            stacklevel=2,
        )
    return value


def robust_level(
    t: float,
    params: ModelParams,
    schedule: ActivationSchedule,
    total: int,
    variant: ActivationVariant = ActivationVariant.PAPER_LITERAL,
) -> float:
    """Dynamic robust level at time t, using the analytic activation degree."""
    i_t = 1.0 if t <= 0 else global_activation_degree(t, params, schedule, total, variant)
    return robust_level_from_activation(i_t, params)
