import numpy as np
import pytest

from gridfork import (
    GridShape,
    LinkScope,
    ParameterError,
    build_topology,
    decompose_layers,
    lattice_distance,
    save_trace,
    simulate_propagation,
)
from gridfork.propsim import (
    activation_counts,
    empirical_activation_degree,
    empirical_layer_activation_times,
)
from gridfork.topology import Topology, _build_csr, _canonical_edge
from oracles import event_loop_times


def _pure_grid(r):
    # huge beta: no long links survive sampling
    return build_topology(GridShape.diamond(r), 1000.0, seed=0)


def _with_edges(shape, long_pairs_nodes, seed=0):
    """Topology with an explicit long-edge list instead of sampled ones."""
    base = build_topology(shape, 1000.0, seed=seed)
    nodes = list(base.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    short_pairs = [(index[a], index[b]) for a, b in base.short_edges]
    long_pairs = [(index[a], index[b]) for a, b in long_pairs_nodes]
    indptr, indices, is_long = _build_csr(len(nodes), short_pairs, long_pairs)
    return Topology(
        shape=shape,
        beta=base.beta,
        scope=base.scope,
        scope_source=None,
        seed=seed,
        nodes=base.nodes,
        short_edges=base.short_edges,
        long_edges=frozenset(_canonical_edge(a, b) for a, b in long_pairs_nodes),
        _indptr=indptr,
        _indices=indices,
        _is_long=is_long,
    )


def test_pure_grid_times_equal_lattice_distance():
    topo = _pure_grid(6)
    src = topo.shape.center()
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    for v in topo.nodes:
        assert trace.receive_time(v) == lattice_distance(v, src)


def test_single_long_edge_shortcut():
    shape = GridShape.diamond(8)
    src = shape.center()
    far = (src[0] + 3, src[1] + 3)  # distance 6
    topo = _with_edges(shape, [(src, far)])
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    assert trace.receive_time(far) == 1.5  # min(6 * 1.0, 1.5)
    assert trace.receive_time(src) == 0.0


def test_source_must_exist_and_delays_must_be_sane():
    topo = _pure_grid(3)
    with pytest.raises(ParameterError):
        simulate_propagation(topo, (99, 99), 1.0, 1.5)
    with pytest.raises(ParameterError):
        simulate_propagation(topo, topo.shape.center(), 1.0, 0.5)
    with pytest.raises(ParameterError):
        simulate_propagation(topo, topo.shape.center(), 0.0, 1.0)


def test_relaxation_consistency():
    # every node's time is the min over neighbours of their time plus the link delay
    shape = GridShape.diamond(5)
    topo = build_topology(shape, 1.0, seed=12)
    src = shape.center()
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    indptr, indices, is_long = topo.csr()
    times = trace.times
    for i, v in enumerate(topo.nodes):
        if v == src:
            assert times[i] == 0.0
            continue
        options = [
            times[indices[e]] + (1.5 if is_long[e] else 1.0)
            for e in range(indptr[i], indptr[i + 1])
        ]
        assert times[i] == pytest.approx(min(options), abs=0.0)


@pytest.mark.parametrize("case", range(12))
def test_matches_event_loop_oracle(case):
    rng = np.random.default_rng(case)
    r = int(rng.integers(2, 5))
    beta = float(rng.choice([0.5, 1.0, 2.0, 10.0]))
    shape = GridShape.diamond(r)
    topo = build_topology(shape, beta, seed=int(rng.integers(0, 10**6)))
    src = shape.nodes()[int(rng.integers(0, shape.node_count()))]
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    assert np.array_equal(trace.times, event_loop_times(topo, src, 1.0, 1.5))


def test_square_grid_with_three_long_edges_matches_event_loop():
    shape = GridShape.square(5)
    rng = np.random.default_rng(7)
    nodes = shape.nodes()
    extra = []
    while len(extra) < 3:
        a, b = rng.choice(len(nodes), 2, replace=False)
        if lattice_distance(nodes[a], nodes[b]) >= 2:
            extra.append((nodes[a], nodes[b]))
    topo = _with_edges(shape, extra)
    src = (3, 3)
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    assert np.array_equal(trace.times, event_loop_times(topo, src, 1.0, 1.5))


def test_adding_long_edge_never_slows_anyone():
    shape = GridShape.diamond(5)
    src = shape.center()
    base = _pure_grid(5)
    before = simulate_propagation(base, src, 1.0, 1.5).times
    rng = np.random.default_rng(3)
    nodes = shape.nodes()
    extra = []
    for _ in range(8):
        a, b = rng.choice(len(nodes), 2, replace=False)
        if lattice_distance(nodes[a], nodes[b]) >= 2:
            extra.append((nodes[a], nodes[b]))
    topo = _with_edges(shape, extra)
    after = simulate_propagation(topo, src, 1.0, 1.5).times
    assert np.all(after <= before + 1e-15)


def test_empirical_activation_degree():
    topo = _pure_grid(6)
    src = topo.shape.center()
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    assert empirical_activation_degree(trace, 0.0) == 1
    assert empirical_activation_degree(trace, 1.0) == 5  # source plus 4 neighbours
    assert empirical_activation_degree(trace, 100.0) == topo.node_count()
    with pytest.raises(ParameterError):
        empirical_activation_degree(trace, -1.0)
    grid = np.arange(0.0, 8.0)
    counts = activation_counts(trace, grid)
    assert counts[0] == 1 and counts[1] == 5 and counts[2] == 13


def test_layer_activation_times_on_pure_grid():
    topo = _pure_grid(6)
    src = topo.shape.center()
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    layers = decompose_layers(topo, src)
    times = empirical_layer_activation_times(trace, layers)
    assert times[0] == 1.0
    assert times[1] == 2.0
    vals = [times[j] for j in sorted(times)]
    assert all(b > a for a, b in zip(vals, vals[1:]))  # strictly later layer by layer
    assert sorted(times) == list(range(layers.max_layer + 1))


def test_layer_activation_source_mismatch():
    topo = _pure_grid(4)
    src = topo.shape.center()
    other = (src[0] + 1, src[1])
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    layers = decompose_layers(topo, other)
    with pytest.raises(ParameterError):
        empirical_layer_activation_times(trace, layers)


def test_mean_activation_dominance_low_beta_over_high():
    # 50 repetitions per factor; the denser overlay is never behind
    shape = GridShape.diamond(8)
    src = shape.center()
    grid = np.arange(0.0, 13.0)
    curves = {}
    for beta in (1.0, 10.0):
        counts = []
        for rep in range(50):
            topo = build_topology(
                shape, beta, scope=LinkScope.ADJACENT_LAYERS, seed=1000 * rep + 17
            )
            counts.append(activation_counts(simulate_propagation(topo, src, 1.0, 1.5), grid))
        curves[beta] = np.mean(counts, axis=0)
    dominated = np.mean(curves[1.0] >= curves[10.0] - 1e-12)
    assert dominated >= 0.9


def test_trace_export(tmp_path):
    topo = _pure_grid(3)
    src = topo.shape.center()
    trace = simulate_propagation(topo, src, 1.0, 1.5)
    path = tmp_path / "trace.txt"
    save_trace(trace, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith(f"# gridfork-trace source={src[0]},{src[1]} delta_s=1 delta_l=1.5")
    assert len(lines) == 1 + topo.node_count()
    x, y, t = lines[1].split(",")
    assert trace.receive_time((int(x), int(y))) == float(t)
