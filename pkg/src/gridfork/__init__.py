"""Spatial-temporal propagation and fork analysis on lattice overlays."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ConfigError,
    DomainError,
    GridforkError,
    GridMismatchError,
    HonestMinorityWarning,
    InvalidPairError,
    ParameterError,
    SingularityError,
    UnknownEdgeError,
)
from .params import ActivationVariant, LinkScope, ModelParams, TauPolicy  # noqa: F401
from .topology import (  # noqa: F401
    GridShape,
    LayerDecomposition,
    Topology,
    build_topology,
    decompose_layers,
    expansivity,
    lattice_distance,
    layer_index,
    load_topology,
    long_link_probability,
    save_topology,
)
from .analytic import (  # noqa: F401
    ActivationSchedule,
    LayerStats,
    activation_time,
    adjacent_propagation_time,
    build_schedule,
    cross_layer_pairs,
    fork_prob_cumulative,
    fork_prob_unit,
    global_activation_degree,
    layer_population,
    layer_stats,
    local_activation_degree,
    robust_level,
    susceptible_count,
)
from .propsim import (  # noqa: F401
    PropagationTrace,
    empirical_activation_degree,
    empirical_layer_activation_times,
    save_trace,
    simulate_propagation,
)
from .forksim import (  # noqa: F401
    ForkStatistics,
    RaceOutcome,
    estimate_robust_level_mc,
    simulate_forks,
)
from .harness import (  # noqa: F401
    ExperimentConfig,
    RunReport,
    compare_curves,
    load_config,
    run_experiment,
)
