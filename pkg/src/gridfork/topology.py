"""Lattice overlay construction: grid shapes, short/long-range links, layers.

Nodes are integer lattice coordinates (x, y) with x, y >= 1.  Every node is
wired deterministically to its in-bounds Manhattan neighbours (short-range
links); every pair at lattice distance >= 2 may carry a long-range link,
sampled independently with probability d**(-beta).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidPairError, ParameterError, UnknownEdgeError
from .params import LinkScope

Node = tuple[int, int]
Edge = tuple[Node, Node]


def lattice_distance(a: Node, b: Node) -> int:
    """Number of lattice steps between two nodes (Manhattan distance)."""
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def long_link_probability(a: Node, b: Node, beta: float) -> float:
    """Probability d(a,b)**(-beta) that a pair at distance >= 2 is linked."""
    if beta <= 0:
        raise ParameterError(f"long-range factor must be positive, got {beta}")
    d = lattice_distance(a, b)
    if d < 2:
        raise InvalidPairError(
            f"nodes {a} and {b} are at distance {d}; long links need distance >= 2"
        )
    return float(d) ** (-beta)


def layer_index(distance: int) -> int:
    """Layer of a node at the given lattice distance from the creator.

    Distance 1 is layer 0; distance in (2**(j-1), 2**j] is layer j.
    """
    if distance < 1:
        raise ParameterError(f"layer index needs distance >= 1, got {distance}")
    if distance == 1:
        return 0
    return (distance - 1).bit_length()


@dataclass(frozen=True)
class GridShape:
    """A square (n x n) or diamond (Manhattan ball of radius r) lattice."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in ("square", "diamond"):
            raise ParameterError(f"unknown grid shape kind {self.kind!r}")
        if self.kind == "square" and self.size < 2:
            raise ParameterError("square grids need n >= 2")
        if self.kind == "diamond" and self.size < 1:
            raise ParameterError("diamond grids need radius >= 1")

    @classmethod
    def square(cls, n: int) -> "GridShape":
        return cls("square", n)

    @classmethod
    def diamond(cls, r: int) -> "GridShape":
        return cls("diamond", r)

    def node_count(self) -> int:
        if self.kind == "square":
            return self.size * self.size
        r = self.size
        return 2 * r * r + 2 * r + 1

    def center(self) -> Node:
        if self.kind == "square":
            c = (self.size + 1) // 2
            return (c, c)
        return (self.size + 1, self.size + 1)

    def contains(self, node: Node) -> bool:
        x, y = node
        if self.kind == "square":
            return 1 <= x <= self.size and 1 <= y <= self.size
        return x >= 1 and y >= 1 and lattice_distance(node, self.center()) <= self.size

    def nodes(self) -> list[Node]:
        """All nodes in canonical (row-major) order."""
        if self.kind == "square":
            n = self.size
            return [(x, y) for x in range(1, n + 1) for y in range(1, n + 1)]
        r = self.size
        cx, cy = self.center()
        out = []
        for x in range(1, 2 * r + 2):
            spread = r - abs(x - cx)
            for y in range(cy - spread, cy + spread + 1):
                out.append((x, y))
        return out

    def label(self) -> str:
        return f"{self.kind}:{self.size}"

    @classmethod
    def parse(cls, text: str) -> "GridShape":
        """Parse 'diamond:8' or 'square:9'."""
        try:
            kind, _, size = text.partition(":")
            return cls(kind.strip(), int(size))
        except (ValueError, TypeError) as exc:
            raise ParameterError(f"cannot parse grid shape {text!r}") from exc


@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable sampled overlay: nodes, short edges, long edges.

    Kept immutable after construction so instances can be shared freely
    across threads or worker processes.
    """

    shape: GridShape
    beta: float
    scope: LinkScope
    scope_source: Node | None
    seed: int
    nodes: tuple[Node, ...]
    short_edges: frozenset[Edge]
    long_edges: frozenset[Edge]
    # CSR adjacency over canonical node indices; entry kinds mark long links
    _indptr: np.ndarray = field(repr=False)
    _indices: np.ndarray = field(repr=False)
    _is_long: np.ndarray = field(repr=False)

    @property
    def node_index(self) -> dict[Node, int]:
        idx = self.__dict__.get("_node_index_cache")
        if idx is None:
            idx = {v: i for i, v in enumerate(self.nodes)}
            self.__dict__["_node_index_cache"] = idx
        return idx

    def node_count(self) -> int:
        return len(self.nodes)

    def edge_count(self) -> tuple[int, int]:
        return len(self.short_edges), len(self.long_edges)

    def has_edge(self, a: Node, b: Node) -> bool:
        e = _canonical_edge(a, b)
        return e in self.short_edges or e in self.long_edges

    def neighbors(self, v: Node) -> list[Node]:
        i = self.node_index[v]
        return [self.nodes[j] for j in self._indices[self._indptr[i]: self._indptr[i + 1]]]

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, indices, is_long) arrays over canonical node indices."""
        return self._indptr, self._indices, self._is_long

    def ident(self) -> str:
        """Short stable identifier of (shape, beta, scope, seed)."""
        src = "-" if self.scope_source is None else f"{self.scope_source[0]},{self.scope_source[1]}"
        text = f"{self.shape.label()}|{self.beta!r}|{self.scope.value}|{src}|{self.seed}"
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def _canonical_edge(a: Node, b: Node) -> Edge:
    return (a, b) if a <= b else (b, a)


def _short_edge_pairs(shape: GridShape, nodes: list[Node]) -> list[tuple[int, int]]:
    index = {v: i for i, v in enumerate(nodes)}
    pairs = []
    for i, (x, y) in enumerate(nodes):
        for nb in ((x + 1, y), (x, y + 1)):
            j = index.get(nb)
            if j is not None:
                pairs.append((i, j))
    return pairs


def build_topology(
    shape: GridShape,
    beta: float,
    scope: LinkScope = LinkScope.ALL_PAIRS,
    seed: int = 0,
    source: Node | None = None,
) -> Topology:
    """Build the overlay for a shape: deterministic short edges, sampled long edges.

    One uniform is drawn per canonical node pair, so identical
    (shape, beta, scope, seed) always reproduce the same edge set and raising
    beta can only remove long edges, never add them.  Under the
    ADJACENT_LAYERS scope only pairs in neighbouring layers relative to
    ``source`` are eligible; the source itself gets no long links.
    """
    if beta <= 0:
        raise ParameterError(f"long-range factor must be positive, got {beta}")
    nodes = shape.nodes()
    if scope is LinkScope.ADJACENT_LAYERS:
        if source is None:
            source = shape.center()
        if not shape.contains(source):
            raise ParameterError(f"scope source {source} is outside the grid")
    else:
        source = None

    xs = np.asarray([v[0] for v in nodes], dtype=np.int32)
    ys = np.asarray([v[1] for v in nodes], dtype=np.int32)
    layers = None
    if scope is LinkScope.ADJACENT_LAYERS:
        layers = np.empty(len(nodes), dtype=np.int32)
        for i, v in enumerate(nodes):
            d = lattice_distance(v, source)
            layers[i] = -1 if d == 0 else layer_index(d)

    n = len(nodes)
    rng = np.random.default_rng(seed)
    uniforms = rng.random(n * (n - 1) // 2)
    li, lj = _kernels.sample_long_edges(xs, ys, float(beta), layers, uniforms)

    short_pairs = _short_edge_pairs(shape, nodes)
    long_pairs = list(zip(li.tolist(), lj.tolist()))

    short_edges = frozenset(_canonical_edge(nodes[i], nodes[j]) for i, j in short_pairs)
    long_edges = frozenset(_canonical_edge(nodes[i], nodes[j]) for i, j in long_pairs)

    indptr, indices, is_long = _build_csr(n, short_pairs, long_pairs)
    return Topology(
        shape=shape,
        beta=float(beta),
        scope=scope,
        scope_source=source,
        seed=int(seed),
        nodes=tuple(nodes),
        short_edges=short_edges,
        long_edges=long_edges,
        _indptr=indptr,
        _indices=indices,
        _is_long=is_long,
    )


def _build_csr(n, short_pairs, long_pairs):
    deg = np.zeros(n + 1, dtype=np.int32)
    all_pairs = [(i, j, False) for i, j in short_pairs] + [(i, j, True) for i, j in long_pairs]
    for i, j, _ in all_pairs:
        deg[i + 1] += 1
        deg[j + 1] += 1
    indptr = np.cumsum(deg, dtype=np.int32)
    indices = np.empty(indptr[-1], dtype=np.int32)
    is_long = np.empty(indptr[-1], dtype=bool)
    cursor = indptr[:-1].copy()
    for i, j, lng in all_pairs:
        indices[cursor[i]] = j
        is_long[cursor[i]] = lng
        cursor[i] += 1
        indices[cursor[j]] = i
        is_long[cursor[j]] = lng
        cursor[j] += 1
    # shared across threads; freeze to keep the instance immutable
    for arr in (indptr, indices, is_long):
        arr.flags.writeable = False
    return indptr, indices, is_long


@dataclass(frozen=True)
class LayerDecomposition:
    """Source-relative layer assignment of every non-source node.

    analytic_counts holds the closed-form populations of an unbounded
    lattice; actual_counts what this grid really contains, which falls
    short near the boundary.
    """

    source: Node
    layer_of: dict[Node, int]
    actual_counts: dict[int, int]
    analytic_counts: dict[int, int]
    max_layer: int

    def layer_nodes(self, j: int) -> list[Node]:
        return [v for v, lj in self.layer_of.items() if lj == j]


def analytic_layer_population(j: int) -> int:
    """Unbounded-lattice population of layer j (4 neighbours for layer 0)."""
    if j < 0:
        raise ParameterError(f"layer index must be >= 0, got {j}")
    if j == 0:
        return 4
    return 3 * 2 ** (2 * j - 1) + 2 ** j


def decompose_layers(topology: Topology, source: Node) -> LayerDecomposition:
    """Assign every non-source node to its layer relative to ``source``."""
    if source not in topology.node_index:
        raise ParameterError(f"source {source} is not a node of the topology")
    layer_of: dict[Node, int] = {}
    actual: dict[int, int] = {}
    max_layer = 0
    for v in topology.nodes:
        if v == source:
            continue
        j = layer_index(lattice_distance(v, source))
        layer_of[v] = j
        actual[j] = actual.get(j, 0) + 1
        if j > max_layer:
            max_layer = j
    analytic = {j: analytic_layer_population(j) for j in range(max_layer + 1)}
    return LayerDecomposition(
        source=source,
        layer_of=layer_of,
        actual_counts=dict(sorted(actual.items())),
        analytic_counts=analytic,
        max_layer=max_layer,
    )


def expansivity(topology: Topology, edge: Edge) -> float:
    """Remote-transfer ability of an edge: link probability times the layer
    of one end relative to the other.  Short-range edges score 0."""
    a, b = edge
    if not topology.has_edge(a, b):
        raise UnknownEdgeError(f"edge {edge!r} is not in the topology")
    d = lattice_distance(a, b)
    if d == 1:
        return 0.0
    return long_link_probability(a, b, topology.beta) * layer_index(d)


def topology_text(topology: Topology) -> str:
    """Edge list as plain text: a header line, then x1,y1,x2,y2,kind rows."""
    src = topology.scope_source
    src_text = "-" if src is None else f"{src[0]},{src[1]}"
    lines = [
        f"# gridfork-topology shape={topology.shape.label()} beta={topology.beta:g} "
        f"scope={topology.scope.value} source={src_text} seed={topology.seed}"
    ]
    for kind, edges in (("S", topology.short_edges), ("L", topology.long_edges)):
        for (x1, y1), (x2, y2) in sorted(edges):
            lines.append(f"{x1},{y1},{x2},{y2},{kind}")
    return "\n".join(lines) + "\n"


def save_topology(topology: Topology, path) -> None:
    """Write the edge list to a file; load_topology reads it back."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(topology_text(topology))


def load_topology(path) -> Topology:
    """Rebuild a Topology from an edge-list file written by save_topology."""
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        body = [ln.strip() for ln in fh if ln.strip()]
    fields = dict(
        part.split("=", 1) for part in header.removeprefix("# gridfork-topology").split()
    )
    shape = GridShape.parse(fields["shape"])
    beta = float(fields["beta"])
    scope = LinkScope(fields["scope"])
    source = None
    if fields["source"] != "-":
        sx, sy = fields["source"].split(",")
        source = (int(sx), int(sy))
    seed = int(fields["seed"])

    nodes = shape.nodes()
    index = {v: i for i, v in enumerate(nodes)}
    short_pairs, long_pairs = [], []
    short_edges, long_edges = set(), set()
    for ln in body:
        x1, y1, x2, y2, kind = ln.split(",")
        a, b = (int(x1), int(y1)), (int(x2), int(y2))
        e = _canonical_edge(a, b)
        pair = (index[e[0]], index[e[1]])
        if kind == "S":
            short_pairs.append(pair)
            short_edges.add(e)
        elif kind == "L":
            long_pairs.append(pair)
            long_edges.add(e)
        else:
            raise ParameterError(f"unknown edge kind {kind!r} in {path}")
    indptr, indices, is_long = _build_csr(len(nodes), short_pairs, long_pairs)
    return Topology(
        shape=shape,
        beta=beta,
        scope=scope,
        scope_source=source,
        seed=seed,
        nodes=tuple(nodes),
        short_edges=frozenset(short_edges),
        long_edges=frozenset(long_edges),
        _indptr=indptr,
        _indices=indices,
        _is_long=is_long,
    )


def expected_long_edge_count(shape: GridShape, beta: float) -> float:
    """Sum of d**(-beta) over all pairs at distance >= 2 (ALL_PAIRS scope)."""
    nodes = shape.nodes()
    xs = np.asarray([v[0] for v in nodes], dtype=np.int64)
    ys = np.asarray([v[1] for v in nodes], dtype=np.int64)
    iu, ju = np.triu_indices(len(nodes), k=1)
    d = np.abs(xs[iu] - xs[ju]) + np.abs(ys[iu] - ys[ju])
    d = d[d >= 2].astype(np.float64)
    return float(np.sum(d ** (-beta)))


def max_distance_from(shape: GridShape, source: Node) -> int:
    """Largest lattice distance from ``source`` to any node of the shape."""
    return max(lattice_distance(v, source) for v in shape.nodes())


def max_layer_from(shape: GridShape, source: Node) -> int:
    """Largest layer index any node of the shape occupies around ``source``."""
    n_max = max_distance_from(shape, source)
    if n_max < 1:
        raise ParameterError("shape has no node distinct from the source")
    return layer_index(n_max)
