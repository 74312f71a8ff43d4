"""Model parameters and policy switches consumed by the analytic formulas."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ParameterError


class TauPolicy(enum.Enum):
    """How the long-route crossing time into layer j is estimated.

    FIXED assumes the first-activated node of the inner layer already holds
    the long link, so crossing costs one long-link delay.  OFFSET adds the
    expected intra-layer relay walk on top of that delay.
    """

    FIXED = "fixed"
    OFFSET = "offset"


class ActivationVariant(enum.Enum):
    """Which layers contribute logistic growth to the global activation count.

    PAPER_LITERAL sums logistic terms from layer 3 up, on top of the
    constant 13 for the first three shells; layer 2's interior stays
    uncounted, so the curve tops out below the node total.  INCLUDE_LAYER2
    starts the sum at layer 2 and saturates at the full count exactly.
    """

    PAPER_LITERAL = "paper_literal"
    INCLUDE_LAYER2 = "include_layer2"


class LinkScope(enum.Enum):
    """Which node pairs are eligible for long-range links.

    ALL_PAIRS samples every pair at lattice distance >= 2.
    ADJACENT_LAYERS additionally requires the two endpoints to sit in
    neighbouring layers relative to a designated source node.
    """

    ALL_PAIRS = "all_pairs"
    ADJACENT_LAYERS = "adjacent_layers"


@dataclass(frozen=True)
class ModelParams:
    """Every scalar the propagation / forking formulas consume.

    delta is the fork-accounting interval; it defaults to the short-link
    delay.  pi_u is the per-node mining rate and stays unset (None) until a
    caller provides one, because a sensible default depends on network size.
    horizon, when set, bounds the cumulative fork probability's time span.
    """

    beta: float = 1.0
    delta_s: float = 1.0
    delta_l: float = 1.5
    c: float = 0.5
    delta: float | None = None
    pi_u: float | None = None
    epsilon: float = 0.1
    gamma: float = 1.0
    lambda_adv: float = 1.0
    e_adv: int = 20
    tau_policy: TauPolicy = TauPolicy.FIXED
    horizon: float | None = None

    def __post_init__(self):
        if self.beta <= 0:
            raise ParameterError(f"long-range factor must be positive, got {self.beta}")
        if self.delta_s <= 0:
            raise ParameterError(f"short-link delay must be positive, got {self.delta_s}")
        if self.delta_l < self.delta_s:
            raise ParameterError(
                f"long-link delay {self.delta_l} must be >= short-link delay {self.delta_s}"
            )
        if not 0 < self.c <= 1:
            raise ParameterError(f"discounting factor must lie in (0, 1], got {self.c}")
        if self.delta is None:
            object.__setattr__(self, "delta", self.delta_s)
        if self.delta <= 0:
            raise ParameterError(f"interval length must be positive, got {self.delta}")
        if self.pi_u is not None and self.pi_u < 0:
            raise ParameterError(f"mining rate must be >= 0, got {self.pi_u}")
        if not 0 < self.epsilon < 1:
            raise ParameterError(f"vulnerability threshold must lie in (0, 1), got {self.epsilon}")
        if self.gamma <= 0:
            raise ParameterError(f"honest computing power must be positive, got {self.gamma}")
        if self.lambda_adv < 0:
            raise ParameterError(f"adversary computing power must be >= 0, got {self.lambda_adv}")
        if self.e_adv < 1:
            raise ParameterError(f"adversary group size must be >= 1, got {self.e_adv}")
        if self.horizon is not None and self.horizon <= 0:
            raise ParameterError(f"horizon must be positive, got {self.horizon}")

    def scaled_delays(self, ratio: float) -> "ModelParams":
        """Return a copy with both link delays multiplied by ``ratio``."""
        if ratio <= 0:
            raise ParameterError(f"delay ratio must be positive, got {ratio}")
        return ModelParams(
            beta=self.beta,
            delta_s=self.delta_s * ratio,
            delta_l=self.delta_l * ratio,
            c=self.c,
            delta=self.delta,
            pi_u=self.pi_u,
            epsilon=self.epsilon,
            gamma=self.gamma,
            lambda_adv=self.lambda_adv,
            e_adv=self.e_adv,
            tau_policy=self.tau_policy,
            horizon=self.horizon,
        )

    def with_values(self, **overrides) -> "ModelParams":
        """Return a copy with the given fields replaced."""
        base = {
            "beta": self.beta,
            "delta_s": self.delta_s,
            "delta_l": self.delta_l,
            "c": self.c,
            "delta": self.delta,
            "pi_u": self.pi_u,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "lambda_adv": self.lambda_adv,
            "e_adv": self.e_adv,
            "tau_policy": self.tau_policy,
            "horizon": self.horizon,
        }
        base.update(overrides)
        return ModelParams(**base)
