"""
Standard (harmonic) periodic realizations.

The edge vectors come from orthogonal projection of the 1-chain space R^E (edges
orthonormal) onto the part of the cycle space that survives in the deck group, written
in an orthonormal basis of that subspace. Projection makes the realization harmonic
(every coboundary is orthogonal to the cycle space) and gives Σ_e v(e)v(e)^T = I over
geometric edges, so c = 1.
"""

from collections.abc import Mapping
from dataclasses import dataclass, replace

import numpy as np
from loguru import logger
from scipy.linalg import null_space

from xtal_acoustics.config.settings import get_settings
from xtal_acoustics.crystal.graph import (
    FiniteGraph,
    OrientedEdge,
    VoltageAssignment,
    spanning_tree,
)
from xtal_acoustics.errors import InputError, NumericalError


@dataclass(frozen=True, eq=False)
class Realization:
    """
    Periodic realization of a crystal.

    edge_vectors: v(e) for the positive orientation of each geometric edge
    positions: φ of the fundamental-domain lift of each vertex (root at the origin)
    period_basis: columns are ρ of the standard generators of Z^n
    ortho_constant: c of Σ_{geometric e} (x·v(e)) v(e) = c·x
    """

    dim: int
    edge_vectors: Mapping[int, np.ndarray]
    positions: Mapping[int, np.ndarray]
    period_basis: np.ndarray
    ortho_constant: float
    voltages: VoltageAssignment

    def vector(self, edge_id: int, sign: int = 1) -> np.ndarray:
        return sign * self.edge_vectors[edge_id]

    def of(self, oriented: OrientedEdge) -> np.ndarray:
        return self.vector(oriented.edge.id, oriented.sign)

    def vector_matrix(self, g: FiniteGraph) -> np.ndarray:
        """|E| x n matrix of edge vectors, rows in edge order of `g`."""
        return np.array([self.edge_vectors[e.id] for e in g.edges], dtype=float)


@dataclass(frozen=True)
class VertexResiduals:
    vectors: Mapping[int, np.ndarray]
    max_norm: float


def _canonical_frame(period_basis: np.ndarray) -> np.ndarray:
    """Orthogonal R with R^T P upper triangular and positive on the diagonal."""
    rotation, triangular = np.linalg.qr(period_basis)
    signs = np.where(np.diag(triangular) < 0, -1.0, 1.0)
    return rotation * signs


def standard_realization(g: FiniteGraph, va: VoltageAssignment) -> Realization:
    """Harmonic realization with maximal orthogonality for the cover defined by `va`."""
    settings = get_settings()
    va.validate(g)
    n = va.dim

    cycle_space = null_space(g.incidence_matrix().astype(float))
    if cycle_space.shape[1] < n:
        raise NumericalError(
            f"cycle space has dimension {cycle_space.shape[1]}, cover needs {n}"
        )
    # image of the cycle space in R^n, in cycle-space coordinates
    homology_map = va.matrix(g).astype(float).T @ cycle_space
    spanning = cycle_space @ homology_map.T

    u, s, _ = np.linalg.svd(spanning, full_matrices=False)
    if s.size < n or s[-1] <= settings.rank_tolerance * s[0]:
        raise NumericalError(
            "degenerate crystal: projected cycle space has numerical rank below "
            f"{n} (singular values {s.tolist()})"
        )
    basis = u[:, :n]

    gram = homology_map @ homology_map.T
    # nonsingular whenever the rank check above passes; det shrinks with large voltages
    period_basis = np.linalg.solve(gram, (basis.T @ spanning).T).T

    frame = _canonical_frame(period_basis)
    vectors = basis @ frame
    period_basis = frame.T @ period_basis
    edge_vectors = {e.id: vectors[i].copy() for i, e in enumerate(g.edges)}

    tree = spanning_tree(g)
    positions: dict[int, np.ndarray] = {tree.root: np.zeros(n)}
    for v in tree.order[1:]:
        oe = tree.parent[v]
        positions[v] = (
            positions[oe.origin]
            + oe.sign * edge_vectors[oe.edge.id]
            - period_basis @ va.of(oe)
        )

    gram_sum = vectors.T @ vectors
    c = float(np.trace(gram_sum) / n)
    logger.info("Standard realization computed", dim=n, edges=len(g.edges), c=c)
    return Realization(
        dim=n,
        edge_vectors=edge_vectors,
        positions=positions,
        period_basis=period_basis,
        ortho_constant=c,
        voltages=va,
    )


def laplacian_residual(g: FiniteGraph, r: Realization) -> VertexResiduals:
    """Δφ(x) = Σ_{e: o(e)=x} v(e) at every vertex of X0."""
    vectors = {
        x: sum((r.of(oe) for oe in g.out_edges(x)), start=np.zeros(r.dim))
        for x in g.vertex_ids
    }
    worst = max((float(np.linalg.norm(v)) for v in vectors.values()), default=0.0)
    return VertexResiduals(vectors=vectors, max_norm=worst)


def orthogonality_constant(r: Realization) -> tuple[float, float]:
    """(c, ‖M − cI‖_max) for M = Σ_{geometric e} v(e) v(e)^T."""
    vectors = np.array(list(r.edge_vectors.values()), dtype=float).reshape(-1, r.dim)
    moment = vectors.T @ vectors
    c = float(np.trace(moment) / r.dim)
    deviation = float(np.max(np.abs(moment - c * np.eye(r.dim))))
    return c, deviation


def equivariance_residual(g: FiniteGraph, r: Realization) -> float:
    """max_e |φ(head) − φ(tail) + P·voltage(e) − v(e)| over geometric edges."""
    worst = 0.0
    for e in g.edges:
        gap = (
            r.positions[e.head]
            - r.positions[e.tail]
            + r.period_basis @ r.voltages.voltage(e.id)
            - r.edge_vectors[e.id]
        )
        worst = max(worst, float(np.linalg.norm(gap)))
    return worst


def perturb_edge(r: Realization, edge_id: int, factor: float) -> Realization:
    """Copy of `r` with one edge vector scaled; positions are left as they were."""
    if edge_id not in r.edge_vectors:
        raise InputError(f"unknown edge {edge_id}")
    edge_vectors = dict(r.edge_vectors)
    edge_vectors[edge_id] = factor * edge_vectors[edge_id]
    return replace(r, edge_vectors=edge_vectors)
