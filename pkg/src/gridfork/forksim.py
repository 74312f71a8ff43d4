"""Monte Carlo layers on top of propagation traces.

Unintentional forks: Poisson mining thinned per interval over the nodes
that have not yet received the chain.  Intentional forks: a block race
between the aggregated honest network and an adversary group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ParameterError
from .params import ModelParams
from .propsim import PropagationTrace, susceptible_counts


@dataclass(frozen=True, eq=False)
class ForkStatistics:
    """Fork-event frequencies across repetitions, with normal-approximation CIs.

    Index i covers the interval [i * delta, (i + 1) * delta).  The CIs are
    approximate near frequencies of 0 or 1.
    """

    delta: float
    grid: np.ndarray = field(repr=False)
    per_interval: np.ndarray = field(repr=False)
    per_interval_ci: np.ndarray = field(repr=False)  # shape (n, 2)
    cumulative: np.ndarray = field(repr=False)
    cumulative_ci: np.ndarray = field(repr=False)
    repetitions: int = 0
    seed_base: int = 0


def mining_probability(pi_u: float, delta: float) -> float:
    """Chance one node mines at least one block within an interval."""
    return -np.expm1(-pi_u * delta)


def fork_event_matrix(
    trace: PropagationTrace,
    pi_u: float,
    delta: float,
    horizon: float,
    repetitions: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate mining over a fixed trace.

    Returns (grid, events) where events[r, i] flags at least one conflicting
    block mined by a susceptible node during interval i of repetition r.
    The miner count per interval is binomial over the susceptible nodes,
    each mining with the Poisson-thinned per-interval probability.
    """
    if delta <= 0:
        raise ParameterError(f"interval length must be positive, got {delta}")
    if horizon < delta:
        raise ParameterError(f"horizon {horizon} is shorter than one interval {delta}")
    if pi_u < 0:
        raise ParameterError(f"mining rate must be >= 0, got {pi_u}")
    if repetitions < 1:
        raise ParameterError(f"repetitions must be >= 1, got {repetitions}")
    n_intervals = int(np.ceil(horizon / delta - 1e-12))
    grid = np.arange(n_intervals, dtype=np.float64) * delta
    s_counts = susceptible_counts(trace, grid)
    p = mining_probability(pi_u, delta)
    if p == 0.0:
        return grid, np.zeros((repetitions, n_intervals), dtype=bool)
    miners = rng.binomial(s_counts[None, :].repeat(repetitions, axis=0), p)
    return grid, miners >= 1


def simulate_forks(
    trace: PropagationTrace,
    pi_u: float,
    delta: float,
    horizon: float,
    repetitions: int,
    seed: int,
) -> ForkStatistics:
    """Estimate per-interval and cumulative fork frequencies on one trace."""
    rng = np.random.default_rng(seed)
    grid, events = fork_event_matrix(trace, pi_u, delta, horizon, repetitions, rng)
    cum_events = np.maximum.accumulate(events, axis=1)
    per_interval = events.mean(axis=0)
    cumulative = cum_events.mean(axis=0)
    return ForkStatistics(
        delta=delta,
        grid=grid,
        per_interval=per_interval,
        per_interval_ci=frequency_ci(per_interval, repetitions),
        cumulative=cumulative,
        cumulative_ci=frequency_ci(cumulative, repetitions),
        repetitions=repetitions,
        seed_base=seed,
    )


def frequency_ci(freq: np.ndarray, n: int, z: float = 1.96) -> np.ndarray:
    """95% normal-approximation interval for observed frequencies."""
    half = z * np.sqrt(np.clip(freq * (1.0 - freq), 0.0, None) / n)
    return np.stack([np.clip(freq - half, 0.0, 1.0), np.clip(freq + half, 0.0, 1.0)], axis=1)


@dataclass(frozen=True)
class RaceOutcome:
    """Blocks completed by each side of one mining race window."""

    honest: int
    adversary: int
    window: float

    @property
    def lead(self) -> int:
        return self.adversary - self.honest


def sample_race(
    honest_rate: float, adversary_rate: float, window: float, rng: np.random.Generator
) -> RaceOutcome:
    """Draw one block race: independent Poisson counts over the window."""
    if honest_rate < 0 or adversary_rate < 0 or window <= 0:
        raise ParameterError("race rates must be >= 0 and the window positive")
    return RaceOutcome(
        honest=int(rng.poisson(honest_rate * window)),
        adversary=int(rng.poisson(adversary_rate * window)),
        window=window,
    )


def estimate_robust_level_mc(
    i_t: float,
    params: ModelParams,
    repetitions: int = 10_000,
    seed: int = 0,
    window: float = 1.0,
) -> int:
    """Smallest block lead k >= 1 whose empirical tail probability is below
    the vulnerability threshold.

    The honest side mines at aggregate rate gamma * i_t, the adversary group
    at lambda_adv * e_adv (its members share state with no internal delay,
    so only the aggregate rate matters).  Returns the minimal integer k with
    P(adversary lead >= k) <= epsilon, floored at one block.
    """
    if i_t < 1:
        raise ParameterError(f"activated count must be >= 1, got {i_t}")
    if repetitions < 1:
        raise ParameterError(f"repetitions must be >= 1, got {repetitions}")
    honest_rate = params.gamma * i_t
    adv_rate = params.lambda_adv * params.e_adv
    if honest_rate <= 0 and adv_rate <= 0:
        raise DomainError("both aggregate rates are zero; the race is degenerate")
    rng = np.random.default_rng(seed)
    leads = rng.poisson(adv_rate * window, repetitions) - rng.poisson(
        honest_rate * window, repetitions
    )
    eps = params.epsilon
    k = 1
    while float(np.mean(leads >= k)) > eps:
        k += 1
    return k
