"""Backend equivalence: the compiled kernels must replicate the pure ones."""

import numpy as np
import pytest

from gridfork import GridShape, build_topology
from gridfork._kernels import available_backends, backend_name

BACKENDS = available_backends()
needs_cext = pytest.mark.skipif("cext" not in BACKENDS, reason="compiled kernels not built")


def test_backend_selection_reports_a_known_name():
    assert backend_name() in ("pure", "cext")


def _pair_inputs(shape, seed):
    nodes = shape.nodes()
    xs = np.asarray([v[0] for v in nodes], dtype=np.int32)
    ys = np.asarray([v[1] for v in nodes], dtype=np.int32)
    n = len(nodes)
    uniforms = np.random.default_rng(seed).random(n * (n - 1) // 2)
    return xs, ys, uniforms


@needs_cext
@pytest.mark.parametrize(
    "shape,beta,seed",
    [
        (GridShape.diamond(4), 0.7, 3),
        (GridShape.diamond(8), 1.0, 42),
        (GridShape.square(9), 2.0, 7),
        (GridShape.diamond(6), 10.0, 0),
    ],
)
def test_sample_long_edges_identical(shape, beta, seed):
    xs, ys, uniforms = _pair_inputs(shape, seed)
    pi, pj = BACKENDS["pure"].sample_long_edges(xs, ys, beta, None, uniforms)
    ci, cj = BACKENDS["cext"].sample_long_edges(xs, ys, beta, None, uniforms)
    assert np.array_equal(pi, ci)
    assert np.array_equal(pj, cj)


@needs_cext
def test_sample_long_edges_identical_with_layer_scope():
    shape = GridShape.diamond(6)
    xs, ys, uniforms = _pair_inputs(shape, 11)
    center = shape.center()
    layers = np.empty(len(xs), dtype=np.int32)
    for i, (x, y) in enumerate(shape.nodes()):
        d = abs(x - center[0]) + abs(y - center[1])
        layers[i] = -1 if d == 0 else (d - 1).bit_length() if d > 1 else 0
    pi, pj = BACKENDS["pure"].sample_long_edges(xs, ys, 1.0, layers, uniforms)
    ci, cj = BACKENDS["cext"].sample_long_edges(xs, ys, 1.0, layers, uniforms)
    assert np.array_equal(pi, ci) and np.array_equal(pj, cj)


@needs_cext
@pytest.mark.parametrize("seed,source", [(5, 0), (9, 72), (13, 144)])
def test_dijkstra_identical(seed, source):
    topo = build_topology(GridShape.diamond(8), 1.0, seed=seed)
    indptr, indices, is_long = topo.csr()
    for ds, dl in ((1.0, 1.5), (1.1, 1.65)):
        w = np.where(is_long, dl, ds)
        dp = BACKENDS["pure"].dijkstra(indptr, indices, w, source)
        dc = BACKENDS["cext"].dijkstra(indptr, indices, w, source)
        assert np.array_equal(dp, dc)


def test_pure_dijkstra_on_hand_graph():
    # 0 -1.0- 1 -1.0- 2, plus a 1.5 shortcut 0-2
    indptr = np.asarray([0, 2, 4, 6], dtype=np.int32)
    indices = np.asarray([1, 2, 0, 2, 1, 0], dtype=np.int32)
    weights = np.asarray([1.0, 1.5, 1.0, 1.0, 1.0, 1.5])
    dist = BACKENDS["pure"].dijkstra(indptr, indices, weights, 0)
    assert dist.tolist() == [0.0, 1.0, 1.5]


def test_forced_pure_backend_env(tmp_path):
    import subprocess
    import sys

    code = (
        "import gridfork._kernels as k; print(k.backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"GRIDFORK_PURE": "1", "PATH": "/usr/bin:/bin"},
    )
    assert out.stdout.strip() == "pure"
