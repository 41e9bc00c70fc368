"""
Finite base graphs, their cycle spaces and the voltages that define a crystal.

A crystal is the abelian cover of a finite graph X0 whose deck group is Z^n. The cover
is encoded by an integer voltage on every oriented edge: the lift of e starting in the
sheet σ ends in the sheet σ + voltage(e). Everything in this module is exact integer
arithmetic.
"""

from collections import deque
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import gcd
from typing import TYPE_CHECKING, NamedTuple

import networkx as nx
import numpy as np
from loguru import logger
from sympy import Matrix

from xtal_acoustics.errors import InputError

if TYPE_CHECKING:
    from xtal_acoustics.models import CrystalFile


@dataclass(frozen=True)
class Vertex:
    id: int
    mass: float


@dataclass(frozen=True)
class Edge:
    """Geometric edge stored once; `tail -> head` is its positive orientation."""

    id: int
    tail: int
    head: int

    @property
    def is_loop(self) -> bool:
        return self.tail == self.head


class OrientedEdge(NamedTuple):
    edge: Edge
    sign: int

    @property
    def origin(self) -> int:
        return self.edge.tail if self.sign > 0 else self.edge.head

    @property
    def terminus(self) -> int:
        return self.edge.head if self.sign > 0 else self.edge.tail

    def reversed(self) -> "OrientedEdge":
        return OrientedEdge(self.edge, -self.sign)


@dataclass(frozen=True)
class FiniteGraph:
    """Connected finite multigraph with vertex masses. Vertices and edges sorted by id."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    @cached_property
    def vertex_index(self) -> dict[int, int]:
        return {v.id: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_index(self) -> dict[int, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @property
    def vertex_ids(self) -> list[int]:
        return [v.id for v in self.vertices]

    @property
    def edge_ids(self) -> list[int]:
        return [e.id for e in self.edges]

    def edge(self, edge_id: int) -> Edge:
        return self.edges[self.edge_index[edge_id]]

    def mass(self, vertex_id: int) -> float:
        return self.vertices[self.vertex_index[vertex_id]].mass

    @property
    def cell_mass(self) -> float:
        """m(V0): total mass of one fundamental cell."""
        return float(sum(v.mass for v in self.vertices))

    @property
    def betti_number(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def oriented_edges(self) -> list[OrientedEdge]:
        return [OrientedEdge(e, s) for e in self.edges for s in (1, -1)]

    def out_edges(self, vertex_id: int) -> list[OrientedEdge]:
        """Oriented edges with origin `vertex_id`, by edge id. A loop appears twice."""
        result = []
        for e in self.edges:
            if e.tail == vertex_id:
                result.append(OrientedEdge(e, 1))
            if e.head == vertex_id:
                result.append(OrientedEdge(e, -1))
        return result

    def incidence_matrix(self) -> np.ndarray:
        """Boundary map C1 -> C0: column e is head(e) - tail(e) (zero for loops)."""
        b = np.zeros((len(self.vertices), len(self.edges)), dtype=np.int64)
        for j, e in enumerate(self.edges):
            b[self.vertex_index[e.head], j] += 1
            b[self.vertex_index[e.tail], j] -= 1
        return b


@dataclass(frozen=True)
class SpanningTree:
    """BFS spanning tree. `parent[v]` is the oriented edge leading from v's parent to v."""

    root: int
    order: tuple[int, ...]
    parent: Mapping[int, OrientedEdge]

    @property
    def edges(self) -> frozenset[int]:
        return frozenset(oe.edge.id for oe in self.parent.values())


@dataclass(frozen=True, eq=False)
class CycleBasis:
    """Fundamental cycles of a spanning tree, one per chord, as signed edge vectors."""

    tree: SpanningTree
    chords: tuple[int, ...]
    cycles: np.ndarray = field(repr=False)

    def cycle(self, chord_id: int) -> np.ndarray:
        return self.cycles[self.chords.index(chord_id)]


@dataclass(frozen=True)
class VoltageAssignment:
    """Integer voltage of the positive orientation of every geometric edge."""

    dim: int
    vectors: Mapping[int, tuple[int, ...]]

    def voltage(self, edge_id: int, sign: int = 1) -> np.ndarray:
        return sign * np.asarray(self.vectors[edge_id], dtype=np.int64)

    def of(self, oriented: OrientedEdge) -> np.ndarray:
        return self.voltage(oriented.edge.id, oriented.sign)

    def matrix(self, g: FiniteGraph) -> np.ndarray:
        """|E| x n integer matrix, rows in edge order of `g`."""
        return np.array(
            [self.vectors[e.id] for e in g.edges], dtype=np.int64
        ).reshape(len(g.edges), self.dim)

    def validate(self, g: FiniteGraph) -> None:
        if self.dim < 1:
            raise InputError("voltage dimension must be at least 1")
        if set(self.vectors) != set(g.edge_ids):
            raise InputError("voltages must be given for exactly the edges of the graph")
        for edge_id, vec in self.vectors.items():
            if len(vec) != self.dim:
                raise InputError(
                    f"edge {edge_id}: voltage has {len(vec)} entries, expected {self.dim}"
                )
        if not spans_integer_lattice(self.matrix(g)):
            raise InputError(f"voltages do not span Z^{self.dim}")


def spans_integer_lattice(rows: np.ndarray) -> bool:
    """
    True when the integer row vectors generate all of Z^n.

    Uses the n-th determinantal divisor: the gcd of all n x n minors is 1 exactly when
    the Smith invariants are all 1.
    """
    rows = np.asarray(rows, dtype=np.int64)
    count, n = rows.shape
    if count < n or np.linalg.matrix_rank(rows.astype(float)) < n:
        return False
    divisor = 0
    for subset in combinations(range(count), n):
        minor = int(Matrix(rows[list(subset)].tolist()).det(method="bareiss"))
        divisor = gcd(divisor, minor)
        if divisor == 1:
            return True
    return False


def make_graph(
    vertices: Iterable[tuple[int, float]], edges: Iterable[tuple[int, int, int]]
) -> FiniteGraph:
    """Validate raw (id, mass) and (id, tail, head) records into a FiniteGraph."""
    vertex_list = [Vertex(int(i), float(m)) for i, m in vertices]
    edge_list = [Edge(int(i), int(t), int(h)) for i, t, h in edges]
    if not vertex_list:
        raise InputError("graph has no vertices")

    ids = [v.id for v in vertex_list]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate vertex ids: {sorted({i for i in ids if ids.count(i) > 1})}")
    edge_ids = [e.id for e in edge_list]
    if len(set(edge_ids)) != len(edge_ids):
        dup = sorted({i for i in edge_ids if edge_ids.count(i) > 1})
        raise InputError(f"duplicate edge ids: {dup}")
    for v in vertex_list:
        if not v.mass > 0:
            raise InputError(f"vertex {v.id}: mass must be positive, got {v.mass}")
    known = set(ids)
    for e in edge_list:
        if e.tail not in known or e.head not in known:
            raise InputError(f"edge {e.id}: endpoint references an unknown vertex")

    multigraph = nx.MultiGraph()
    multigraph.add_nodes_from(ids)
    multigraph.add_edges_from((e.tail, e.head, e.id) for e in edge_list)
    if not nx.is_connected(multigraph):
        raise InputError("graph is disconnected; a crystal needs a connected base graph")

    g = FiniteGraph(
        vertices=tuple(sorted(vertex_list, key=lambda v: v.id)),
        edges=tuple(sorted(edge_list, key=lambda e: e.id)),
    )
    logger.debug("Base graph built", vertices=len(g.vertices), edges=len(g.edges))
    return g


def build_graph(crystal: "CrystalFile") -> FiniteGraph:
    """Build the validated base graph X0 of a parsed crystal description."""
    return make_graph(
        ((v.id, v.mass) for v in crystal.vertices),
        ((e.id, e.tail, e.head) for e in crystal.edges),
    )


def spanning_tree(g: FiniteGraph) -> SpanningTree:
    """Breadth-first tree from the lowest vertex id, scanning incident edges by id."""
    root = g.vertices[0].id
    parent: dict[int, OrientedEdge] = {}
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for oe in g.out_edges(x):
            y = oe.terminus
            if y not in seen:
                seen.add(y)
                parent[y] = oe
                order.append(y)
                queue.append(y)
    if len(seen) != len(g.vertices):
        raise InputError("graph is disconnected; no spanning tree exists")
    return SpanningTree(root=root, order=tuple(order), parent=parent)


def _path_to_root(g: FiniteGraph, tree: SpanningTree, vertex_id: int) -> np.ndarray:
    """Signed edge vector of the tree path from `vertex_id` up to the root."""
    path = np.zeros(len(g.edges), dtype=np.int64)
    v = vertex_id
    while v != tree.root:
        oe = tree.parent[v]
        # walking child -> parent traverses the parent edge backwards
        path[g.edge_index[oe.edge.id]] -= oe.sign
        v = oe.origin
    return path


def cycle_basis(g: FiniteGraph, tree: SpanningTree | None = None) -> CycleBasis:
    """One fundamental cycle per chord: chord + tree path from its head back to its tail."""
    tree = tree or spanning_tree(g)
    tree_edges = tree.edges
    chords = tuple(e.id for e in g.edges if e.id not in tree_edges)
    cycles = np.zeros((len(chords), len(g.edges)), dtype=np.int64)
    for row, chord_id in enumerate(chords):
        chord = g.edge(chord_id)
        cycles[row, g.edge_index[chord_id]] += 1
        cycles[row] += _path_to_root(g, tree, chord.head)
        cycles[row] -= _path_to_root(g, tree, chord.tail)
    if cycles.size and np.any(g.incidence_matrix() @ cycles.T):
        raise AssertionError("fundamental cycle with nonzero boundary")
    return CycleBasis(tree=tree, chords=chords, cycles=cycles)


def maximal_abelian_voltages(
    g: FiniteGraph, basis: CycleBasis | None = None
) -> VoltageAssignment:
    """Voltages of the maximal abelian cover: chord i -> i-th unit vector, tree edges -> 0."""
    basis = basis or cycle_basis(g)
    n = len(basis.chords)
    if n == 0:
        raise InputError("base graph is a tree; its maximal abelian cover is not a crystal")
    vectors: dict[int, tuple[int, ...]] = {e.id: (0,) * n for e in g.edges}
    for i, chord_id in enumerate(basis.chords):
        vectors[chord_id] = tuple(int(i == j) for j in range(n))
    logger.debug("Maximal abelian voltages", rank=n)
    return VoltageAssignment(dim=n, vectors=vectors)
