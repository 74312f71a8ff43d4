"""Configuration-driven experiment runner.

Four scenarios, each sweeping the long-range factor and a delay ratio over
repeated topologies and writing deterministic CSV datasets:

  activation_degree  analytic vs simulated activated-node curves
  fork_unit          per-interval fork probability, model and Monte Carlo
  fork_cumulative    cumulative fork probability, model and Monte Carlo
  robust_level       dynamic robust level and the Monte Carlo race lead

The analytic fork columns apply the closed-form probabilities to the mean
simulated susceptible counts, so both columns describe the same propagation
sample; the activation scenario reports the fully closed-form curve and
additionally a hybrid that reuses the simulated layer arrival times.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__ as _version
from . import analytic, forksim, propsim
from .errors import (
    ConfigError,
    DomainError,
    GridMismatchError,
    HonestMinorityWarning,
    ParameterError,
)
from .params import ActivationVariant, LinkScope, ModelParams, TauPolicy
from .topology import GridShape, build_topology, decompose_layers, max_layer_from

SCENARIOS = ("activation_degree", "fork_unit", "fork_cumulative", "robust_level")

_EXPERIMENT_KEYS = {
    "scenario", "shape", "beta_values", "delay_ratios", "repetitions",
    "seed", "out_dir", "horizon", "race_repetitions",
}
_MODEL_KEYS = {
    "delta_s", "delta_l", "c", "delta", "pi_u", "epsilon",
    "gamma", "lambda_adv", "e_adv",
}
_VARIANT_KEYS = {"tau_policy", "activation_variant", "scope"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run depends on."""

    scenario: str
    shape: GridShape
    beta_values: tuple[float, ...]
    delay_ratios: tuple[float, ...] = (1.0,)
    repetitions: int = 50
    seed: int = 0
    out_dir: str = "results"
    horizon: float | None = None
    race_repetitions: int = 4000
    base_params: ModelParams = field(default_factory=ModelParams)
    pi_u_auto: bool = True
    tau_policy: TauPolicy = TauPolicy.FIXED
    variant: ActivationVariant = ActivationVariant.PAPER_LITERAL
    scope: LinkScope = LinkScope.ALL_PAIRS

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not self.beta_values:
            raise ConfigError("at least one beta value is required")
        if any(b <= 0 for b in self.beta_values):
            raise ConfigError("beta values must be positive")
        if any(r <= 0 for r in self.delay_ratios):
            raise ConfigError("delay ratios must be positive")
        if self.race_repetitions < 1:
            raise ConfigError("race_repetitions must be >= 1")

    def resolved_pi_u(self) -> float:
        """Configured mining rate, or one block network-wide per 10 short delays."""
        if not self.pi_u_auto and self.base_params.pi_u is not None:
            return self.base_params.pi_u
        return 1.0 / (10.0 * self.base_params.delta_s * self.shape.node_count())

    def fingerprint(self) -> str:
        """Stable hash of every field that influences the outputs."""
        text = "|".join(
            [
                self.scenario, self.shape.label(),
                ",".join(f"{b:g}" for b in self.beta_values),
                ",".join(f"{r:g}" for r in self.delay_ratios),
                str(self.repetitions), str(self.seed),
                "" if self.horizon is None else f"{self.horizon:g}",
                str(self.race_repetitions),
                f"{self.base_params.delta_s:g},{self.base_params.delta_l:g}",
                f"{self.base_params.c:g},{self.base_params.delta:g}",
                f"{self.resolved_pi_u():.12g}",
                f"{self.base_params.epsilon:g},{self.base_params.gamma:g}",
                f"{self.base_params.lambda_adv:g},{self.base_params.e_adv}",
                self.tau_policy.value, self.variant.value, self.scope.value,
            ]
        )
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Parse an INI-style experiment file; unknown sections or keys are errors.

    Recognised sections: [experiment], [model], [variants].  ``overrides``
    may replace scenario, seed, repetitions, out_dir or activation variant
    (the CLI flags).
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    known = {"experiment": _EXPERIMENT_KEYS, "model": _MODEL_KEYS, "variants": _VARIANT_KEYS}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown config section [{section}]")
        extra = set(parser[section]) - known[section]
        if extra:
            raise ConfigError(f"unknown keys in [{section}]: {', '.join(sorted(extra))}")
    if "experiment" not in parser:
        raise ConfigError("config needs an [experiment] section")
    exp = parser["experiment"]
    model = parser["model"] if "model" in parser else {}
    variants = parser["variants"] if "variants" in parser else {}

    try:
        scenario = exp.get("scenario", "activation_degree").strip()
        shape = GridShape.parse(exp.get("shape", "diamond:8"))
        beta_values = _float_list(exp.get("beta_values", "1"))
        delay_ratios = _float_list(exp.get("delay_ratios", "1.0"))
        repetitions = int(exp.get("repetitions", "50"))
        seed = int(exp.get("seed", "0"))
        out_dir = exp.get("out_dir", "results").strip()
        horizon = exp.get("horizon")
        horizon_val = float(horizon) if horizon not in (None, "", "auto") else None
        race_repetitions = int(exp.get("race_repetitions", "4000"))

        pi_u_raw = model.get("pi_u", "auto").strip() if model else "auto"
        pi_u_auto = pi_u_raw == "auto"
        params = ModelParams(
            delta_s=float(model.get("delta_s", "1.0")),
            delta_l=float(model.get("delta_l", "1.5")),
            c=float(model.get("c", "0.5")),
            delta=float(model["delta"]) if model and model.get("delta") else None,
            pi_u=None if pi_u_auto else float(pi_u_raw),
            epsilon=float(model.get("epsilon", "0.1")),
            gamma=float(model.get("gamma", "1.0")),
            lambda_adv=float(model.get("lambda_adv", "1.0")),
            e_adv=int(model.get("e_adv", "20")),
            tau_policy=TauPolicy(variants.get("tau_policy", "fixed")),
            horizon=horizon_val,
        )
        config = ExperimentConfig(
            scenario=scenario,
            shape=shape,
            beta_values=tuple(beta_values),
            delay_ratios=tuple(delay_ratios),
            repetitions=repetitions,
            seed=seed,
            out_dir=out_dir,
            horizon=horizon_val,
            race_repetitions=race_repetitions,
            base_params=params,
            pi_u_auto=pi_u_auto,
            tau_policy=TauPolicy(variants.get("tau_policy", "fixed")),
            variant=ActivationVariant(variants.get("activation_variant", "paper_literal")),
            scope=LinkScope(variants.get("scope", "all_pairs")),
        )
    except ConfigError:
        raise
    except (ValueError, ParameterError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    if overrides:
        config = _apply_overrides(config, overrides)
    return config


def _apply_overrides(config: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    allowed = {"scenario", "seed", "repetitions", "out_dir", "variant"}
    unknown = set(overrides) - allowed
    if unknown:
        raise ConfigError(f"unsupported overrides: {sorted(unknown)}")
    kwargs = dict(
        scenario=config.scenario,
        shape=config.shape,
        beta_values=config.beta_values,
        delay_ratios=config.delay_ratios,
        repetitions=config.repetitions,
        seed=config.seed,
        out_dir=config.out_dir,
        horizon=config.horizon,
        race_repetitions=config.race_repetitions,
        base_params=config.base_params,
        pi_u_auto=config.pi_u_auto,
        tau_policy=config.tau_policy,
        variant=config.variant,
        scope=config.scope,
    )
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "variant":
            kwargs["variant"] = ActivationVariant(value)
        else:
            kwargs[key] = value
    return ExperimentConfig(**kwargs)


def _float_list(text: str) -> list[float]:
    values = [float(part) for part in text.replace(";", ",").split(",") if part.strip()]
    if not values:
        raise ConfigError(f"empty numeric list: {text!r}")
    return values


@dataclass
class CurveComparison:
    """Gap metrics between an analytic curve and a simulated one."""

    max_abs_gap: float
    mean_abs_gap: float
    ci_coverage: float


def compare_curves(t_analytic, analytic_values, t_sim, sim_mean, sim_ci_lo, sim_ci_hi) -> CurveComparison:
    """Max/mean absolute gap plus the fraction of points where the analytic
    curve lies inside the simulated confidence band."""
    ta = np.asarray(t_analytic, dtype=np.float64)
    ts = np.asarray(t_sim, dtype=np.float64)
    if ta.shape != ts.shape or not np.allclose(ta, ts):
        raise GridMismatchError("curves are sampled on different time grids")
    a = np.asarray(analytic_values, dtype=np.float64)
    m = np.asarray(sim_mean, dtype=np.float64)
    lo = np.asarray(sim_ci_lo, dtype=np.float64)
    hi = np.asarray(sim_ci_hi, dtype=np.float64)
    if not (a.shape == m.shape == lo.shape == hi.shape == ta.shape):
        raise GridMismatchError("curve arrays differ in length")
    gaps = np.abs(a - m)
    inside = (a >= lo - 1e-12) & (a <= hi + 1e-12)
    return CurveComparison(
        max_abs_gap=float(gaps.max()),
        mean_abs_gap=float(gaps.mean()),
        ci_coverage=float(inside.mean()),
    )


@dataclass
class RunReport:
    """Artifacts and summary metrics of one experiment run."""

    scenario: str
    csv_paths: list[Path]
    summary_path: Path
    metrics: dict
    config_hash: str
    seed: int
    version: str


@dataclass
class _Cell:
    """One (beta, delay-ratio) sweep cell with its repeated simulations."""

    beta: float
    ratio: float
    params: ModelParams
    grid: np.ndarray
    sim_counts: np.ndarray  # (reps, n_t) activated nodes
    layer_times: list[dict[int, float]]
    full_times: np.ndarray  # (reps,) time of last receive


def _child_seed(base: int, *key: int) -> int:
    ss = np.random.SeedSequence(entropy=base, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _simulate_cell(config: ExperimentConfig, bi: int, ri: int) -> _Cell:
    beta = config.beta_values[bi]
    ratio = config.delay_ratios[ri]
    params = config.base_params.with_values(
        beta=beta, pi_u=config.resolved_pi_u(), tau_policy=config.tau_policy
    ).scaled_delays(ratio)
    shape = config.shape
    source = shape.center()

    traces = []
    layer_times = []
    for rep in range(config.repetitions):
        topo = build_topology(
            shape, beta, scope=config.scope, seed=_child_seed(config.seed, bi, ri, rep),
            source=source,
        )
        trace = propsim.simulate_propagation(topo, source, params.delta_s, params.delta_l)
        traces.append(trace)
        layer_times.append(
            propsim.empirical_layer_activation_times(trace, decompose_layers(topo, source))
        )

    full_times = np.asarray([tr.max_time() for tr in traces])
    horizon = config.horizon
    if horizon is None:
        horizon = float(np.ceil(full_times.max() / params.delta) + 2.0) * params.delta
    n_t = int(round(horizon / params.delta)) + 1
    grid = np.arange(n_t, dtype=np.float64) * params.delta
    sim_counts = np.stack([propsim.activation_counts(tr, grid) for tr in traces])
    return _Cell(
        beta=beta, ratio=ratio, params=params, grid=grid,
        sim_counts=sim_counts, layer_times=layer_times, full_times=full_times,
    )


def _mean_layer_times(cell: _Cell) -> dict[int, float]:
    keys = sorted({j for times in cell.layer_times for j in times})
    return {
        j: float(np.mean([times[j] for times in cell.layer_times if j in times])) for j in keys
    }


def _mean_ci(values: np.ndarray, z: float = 1.96) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    if values.shape[0] > 1:
        half = z * values.std(axis=0, ddof=1) / math.sqrt(values.shape[0])
    else:
        half = np.zeros_like(mean)
    return mean, mean - half, mean + half


def _fmt(x: float) -> str:
    # shortest lossless decimal form, so readers recover the exact float
    return repr(float(x))


def _write_csv(path: Path, header_comment: str, columns: list[str], rows) -> None:
    lines = [header_comment, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def run_experiment(config: ExperimentConfig) -> RunReport:
    """Run one scenario over every (beta, delay ratio) cell and write CSVs.

    Fully deterministic for a given config: repetition r of cell (i, k)
    draws its topology from a seed derived from (seed, i, k, r).
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stamp = f"# gridfork v{_version} scenario={config.scenario} config_hash={config.fingerprint()} seed={config.seed}"

    csv_paths: list[Path] = []
    metrics: dict = {"cells": {}}
    summary_lines = [
        stamp.lstrip("# "),
        f"shape={config.shape.label()} repetitions={config.repetitions} "
        f"scope={config.scope.value} tau_policy={config.tau_policy.value} "
        f"variant={config.variant.value} pi_u={config.resolved_pi_u():.10g}",
    ]

    for bi, beta in enumerate(config.beta_values):
        for ri, ratio in enumerate(config.delay_ratios):
            cell = _simulate_cell(config, bi, ri)
            tag = f"beta{beta:g}_delta{ratio:g}"
            cell_metrics: dict = {}
            if config.scenario == "activation_degree":
                path = out_dir / f"activation_{tag}.csv"
                cell_metrics = _emit_activation(config, cell, path, stamp)
            elif config.scenario in ("fork_unit", "fork_cumulative"):
                path = out_dir / f"{config.scenario}_{tag}.csv"
                cell_metrics = _emit_fork(config, cell, path, stamp, bi, ri)
            elif config.scenario == "robust_level":
                path = out_dir / f"robust_{tag}.csv"
                cell_metrics = _emit_robust(config, cell, path, stamp, bi, ri)
            csv_paths.append(path)
            metrics["cells"][tag] = cell_metrics
            summary_lines.append(f"[{tag}] " + " ".join(
                f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                for k, v in sorted(cell_metrics.items())
            ))

    summary_path = out_dir / f"summary_{config.scenario}.txt"
    summary_path.write_text("\n".join(summary_lines) + "\n", encoding="ascii")
    return RunReport(
        scenario=config.scenario,
        csv_paths=csv_paths,
        summary_path=summary_path,
        metrics=metrics,
        config_hash=config.fingerprint(),
        seed=config.seed,
        version=_version,
    )


def _emit_activation(config: ExperimentConfig, cell: _Cell, path: Path, stamp: str) -> dict:
    total = config.shape.node_count()
    source = config.shape.center()
    schedule = analytic.build_schedule(cell.params, max_layer_from(config.shape, source))
    curve = analytic.activation_curve(cell.grid, cell.params, schedule, total, config.variant)
    hybrid_schedule = analytic.ActivationSchedule.from_cumulative(_mean_layer_times(cell))
    hybrid = analytic.activation_curve(
        cell.grid, cell.params, hybrid_schedule, total, ActivationVariant.INCLUDE_LAYER2
    )
    mean, lo, hi = _mean_ci(cell.sim_counts.astype(np.float64))
    _write_csv(
        path, stamp, ["t", "analytic_I", "sim_mean_I", "sim_ci_lo", "sim_ci_hi"],
        zip(cell.grid.tolist(), curve.tolist(), mean.tolist(), lo.tolist(), hi.tolist()),
    )
    cmp_ = compare_curves(cell.grid, curve, cell.grid, mean, lo, hi)
    sim_full = float(cell.full_times.mean())
    analytic_full = _first_grid_time(cell.grid, curve, total)
    hybrid_full = _first_grid_time(cell.grid, hybrid, total)
    return {
        "max_gap": cmp_.max_abs_gap,
        "mean_gap": cmp_.mean_abs_gap,
        "ci_coverage": cmp_.ci_coverage,
        "sim_full_activation": sim_full,
        "analytic_full_activation": analytic_full,
        "hybrid_full_activation": hybrid_full,
        "hybrid_max_gap": float(np.abs(hybrid - mean).max()),
    }


def _first_grid_time(grid: np.ndarray, curve: np.ndarray, total: int) -> float:
    """First grid time where the curve is within half a node of saturation."""
    hit = np.nonzero(curve >= total - 0.5)[0]
    return float(grid[hit[0]]) if hit.size else float("inf")


def _emit_fork(config: ExperimentConfig, cell: _Cell, path: Path, stamp: str, bi: int, ri: int) -> dict:
    total = config.shape.node_count()
    params = cell.params
    reps = config.repetitions
    n_t = cell.grid.shape[0]

    # analytic formulas over the mean simulated susceptible counts
    s_mean = total - cell.sim_counts.astype(np.float64).mean(axis=0)
    fr_analytic = np.asarray(
        [analytic.fork_prob_unit_from_susceptible(s, params) for s in s_mean]
    )
    cum_load = np.cumsum(s_mean)
    fr_cum_analytic = -np.expm1(-params.delta * params.pi_u * cum_load)

    # Monte Carlo mining: one stream per repetition over that repetition's trace
    events = np.zeros((reps, n_t), dtype=bool)
    p_mine = forksim.mining_probability(params.pi_u, params.delta)
    for rep in range(reps):
        s_rep = total - cell.sim_counts[rep]
        rng = np.random.default_rng(_child_seed(config.seed, 1000 + bi, ri, rep))
        miners = rng.binomial(s_rep, p_mine)
        events[rep] = miners >= 1
    sim_fr = events.mean(axis=0)
    ci = forksim.frequency_ci(sim_fr, reps)
    sim_cum = np.maximum.accumulate(events, axis=1).mean(axis=0)

    _write_csv(
        path, stamp,
        ["t", "analytic_fr", "analytic_FR", "sim_fr", "sim_fr_ci_lo", "sim_fr_ci_hi", "sim_FR"],
        zip(
            cell.grid.tolist(), fr_analytic.tolist(), fr_cum_analytic.tolist(),
            sim_fr.tolist(), ci[:, 0].tolist(), ci[:, 1].tolist(), sim_cum.tolist(),
        ),
    )
    gap_fr = float(np.abs(fr_analytic - sim_fr).max())
    gap_cum = float(np.abs(fr_cum_analytic - sim_cum).max())
    return {
        "max_gap_fr": gap_fr,
        "max_gap_FR": gap_cum,
        "final_FR_analytic": float(fr_cum_analytic[-1]),
        "final_FR_sim": float(sim_cum[-1]),
    }


def _emit_robust(config: ExperimentConfig, cell: _Cell, path: Path, stamp: str, bi: int, ri: int) -> dict:
    total = config.shape.node_count()
    source = config.shape.center()
    schedule = analytic.build_schedule(cell.params, max_layer_from(config.shape, source))
    curve = analytic.activation_curve(cell.grid, cell.params, schedule, total, config.variant)
    thetas = []
    ks = []
    for k_t, i_t in enumerate(curve):
        # undefined rows (pole or honest minority) become NaN in the table
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HonestMinorityWarning)
            try:
                theta = analytic.robust_level_from_activation(float(i_t), cell.params)
            except DomainError:
                theta = float("nan")
        if theta < 0:
            theta = float("nan")
        thetas.append(theta)
        ks.append(
            forksim.estimate_robust_level_mc(
                float(i_t), cell.params, repetitions=config.race_repetitions,
                seed=_child_seed(config.seed, 2000 + bi, ri, k_t),
            )
        )
    _write_csv(
        path, stamp, ["t", "analytic_I", "theta", "mc_k"],
        zip(cell.grid.tolist(), curve.tolist(), thetas, ks),
    )
    finite = [v for v in thetas if not math.isnan(v)]
    return {
        "theta_final": finite[-1] if finite else float("nan"),
        "mc_k_final": ks[-1],
        "defined_points": len(finite),
    }
