"""
Lattice vibrations: force models, the acoustic matrix A_χ and the Bloch fibers of the
elastic Laplacian.

Edge sums run over geometric (unoriented) edges for A_χ; the elastic Laplacian sums
over both orientations of every edge at each vertex.
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from math import pi
from typing import Literal, NamedTuple

import numpy as np
from loguru import logger
from scipy.linalg import LinAlgError, eigvalsh

from xtal_acoustics.crystal.graph import FiniteGraph
from xtal_acoustics.crystal.parallel import parallel_map
from xtal_acoustics.crystal.realization import Realization
from xtal_acoustics.errors import InputError, NumericalError
from xtal_acoustics.models import ForceDefault

Gauge = Literal["lattice", "edge"]


@dataclass(frozen=True, eq=False)
class ForceModel:
    """Force matrices A(e) (n x n, symmetric positive-definite) on a realized crystal."""

    graph: FiniteGraph
    realization: Realization
    force: Mapping[int, np.ndarray]

    def __post_init__(self):
        n = self.realization.dim
        if set(self.force) != set(self.graph.edge_ids):
            raise InputError("force matrices must be given for exactly the edges of the graph")
        for edge_id, a in self.force.items():
            if a.shape != (n, n):
                raise InputError(f"edge {edge_id}: force matrix has shape {a.shape}, expected {(n, n)}")
            if np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, float(np.max(np.abs(a)))):
                raise InputError(f"edge {edge_id}: force matrix is not symmetric")
            if np.min(np.linalg.eigvalsh(a)) <= 0:
                raise InputError(f"edge {edge_id}: force matrix is not positive-definite")

    @property
    def dim(self) -> int:
        return self.realization.dim

    @property
    def cell_mass(self) -> float:
        return self.graph.cell_mass

    def stack(self) -> np.ndarray:
        """|E| x n x n force matrices in edge order."""
        return np.array([self.force[e.id] for e in self.graph.edges], dtype=float)


@dataclass(frozen=True, eq=False)
class DispersionPoint:
    chi: np.ndarray
    acoustic_speeds_sq: np.ndarray
    band_freqs_sq: np.ndarray


class AcousticSpeeds(NamedTuple):
    squared: np.ndarray
    speeds: np.ndarray


@dataclass(frozen=True, eq=False)
class AcousticLimit:
    """ω_i(tχ)² / (t² s_i(χ)²) per direction and acoustic branch."""

    kappa: float
    ratios: np.ndarray
    spread: float


def normalized_force(cell_mass: float, dim: int) -> np.ndarray:
    """(3 m(V0) / (2π² n)) I_n: the force with tr A(e) = 3 m(V0) / (2π²)."""
    return 3 * cell_mass / (2 * pi**2 * dim) * np.eye(dim)


def default_force_model(
    g: FiniteGraph,
    r: Realization,
    kind: ForceDefault = ForceDefault.NORMALIZED,
    overrides: Mapping[int, np.ndarray] | None = None,
) -> ForceModel:
    """Same default force on every edge, with per-edge overrides."""
    base = (
        normalized_force(g.cell_mass, r.dim)
        if kind == ForceDefault.NORMALIZED
        else np.eye(r.dim)
    )
    force = {e.id: base.copy() for e in g.edges}
    for edge_id, a in (overrides or {}).items():
        force[edge_id] = np.asarray(a, dtype=float)
    return ForceModel(graph=g, realization=r, force=force)


def _check_chi(fm: ForceModel, chi) -> np.ndarray:
    chi = np.asarray(chi, dtype=float).reshape(-1)
    if chi.shape != (fm.dim,):
        raise InputError(f"χ has {chi.size} coordinates, realization has dimension {fm.dim}")
    return chi


def a_chi(fm: ForceModel, chi) -> np.ndarray:
    """A_χ = (2π² / m(V0)) Σ_{geometric e} (χ·v(e))² A(e)."""
    chi = _check_chi(fm, chi)
    weights = (fm.realization.vector_matrix(fm.graph) @ chi) ** 2
    matrix = 2 * pi**2 / fm.cell_mass * np.einsum("e,eij->ij", weights, fm.stack())
    return 0.5 * (matrix + matrix.T)


def _eigvalsh(matrix: np.ndarray) -> np.ndarray:
    try:
        values = eigvalsh(matrix)
    except LinAlgError as e:
        raise NumericalError(f"symmetric eigensolver failed: {e}") from e
    if not np.all(np.isfinite(values)):
        raise NumericalError("symmetric eigensolver returned non-finite eigenvalues")
    return values


def acoustic_speeds(fm: ForceModel, chi) -> AcousticSpeeds:
    """s_i(χ)², ascending, and the speeds s_i(χ) themselves."""
    squared = _eigvalsh(a_chi(fm, chi))
    return AcousticSpeeds(squared=squared, speeds=np.sqrt(np.clip(squared, 0.0, None)))


def phase_velocity(fm: ForceModel, chi) -> np.ndarray:
    """Acoustic phase velocities s_i(χ) / (2π‖χ‖)."""
    chi = _check_chi(fm, chi)
    norm = float(np.linalg.norm(chi))
    if norm == 0.0:
        raise InputError("phase velocity is undefined at χ = 0")
    return acoustic_speeds(fm, chi).speeds / (2 * pi * norm)


def _edge_phase(fm: ForceModel, edge_id: int, chi: np.ndarray, gauge: Gauge) -> complex:
    r = fm.realization
    if gauge == "lattice":
        shift = r.period_basis @ r.voltages.voltage(edge_id)
    elif gauge == "edge":
        shift = r.edge_vectors[edge_id]
    else:
        raise InputError(f"unknown gauge {gauge!r}")
    return complex(np.exp(2j * pi * float(chi @ shift)))


def dynamical_matrix(fm: ForceModel, chi, gauge: Gauge = "lattice") -> np.ndarray:
    """
    Fiber −D_χ on χ-equivariant displacements, mass-symmetrized.

    Block (x, y) collects A(e)(δ_xy − phase(e) δ_{t(e) y}) / sqrt(m(x) m(y)) over oriented
    edges e with o(e) = x. The "lattice" gauge puts exp(2πi χ·ρ(voltage(e))) on the head
    term, so the matrix is periodic in χ modulo L*; the "edge" gauge uses exp(2πi χ·v(e)).
    Both are unitarily equivalent.
    """
    chi = _check_chi(fm, chi)
    g = fm.graph
    n = fm.dim
    size = n * len(g.vertices)
    matrix = np.zeros((size, size), dtype=complex)

    def block(vertex_id: int) -> slice:
        i = g.vertex_index[vertex_id]
        return slice(i * n, (i + 1) * n)

    for e in g.edges:
        a = fm.force[e.id]
        phase = _edge_phase(fm, e.id, chi, gauge)
        ma, mb = g.mass(e.tail), g.mass(e.head)
        coupling = a / np.sqrt(ma * mb)
        matrix[block(e.tail), block(e.tail)] += a / ma
        matrix[block(e.head), block(e.head)] += a / mb
        matrix[block(e.tail), block(e.head)] -= phase * coupling
        matrix[block(e.head), block(e.tail)] -= np.conj(phase) * coupling
    return matrix


def dispersion(fm: ForceModel, chi, gauge: Gauge = "lattice") -> DispersionPoint:
    """Bands of −D_χ together with the acoustic speeds s_i(χ)²."""
    chi = _check_chi(fm, chi)
    return DispersionPoint(
        chi=chi,
        acoustic_speeds_sq=acoustic_speeds(fm, chi).squared,
        band_freqs_sq=_eigvalsh(dynamical_matrix(fm, chi, gauge)),
    )


def band_path(
    fm: ForceModel,
    start,
    end,
    steps: int,
    gauge: Gauge = "lattice",
    threads: int | None = None,
) -> list[DispersionPoint]:
    """Dispersion sampled at `steps` equally spaced points of the segment start -> end."""
    start, end = _check_chi(fm, start), _check_chi(fm, end)
    if steps < 2:
        raise InputError(f"band path needs at least 2 steps, got {steps}")
    if np.allclose(start, end):
        logger.warning("Degenerate band path: start equals end", chi=start.tolist())
    points = [start + (end - start) * k / (steps - 1) for k in range(steps)]
    return parallel_map(lambda chi: dispersion(fm, chi, gauge), points, threads)


def acoustic_limit_constant(
    fm: ForceModel, directions: Sequence, t: float = 1e-3
) -> AcousticLimit:
    """
    Measure κ = lim ω_i(tχ)² / (t² s_i(χ)²) on the lowest n bands.

    Under the geometric-edge convention for A_χ the expected value is 2.
    """
    rows = []
    for chi in directions:
        chi = _check_chi(fm, chi)
        speeds = acoustic_speeds(fm, chi).squared
        bands = _eigvalsh(dynamical_matrix(fm, t * chi))[: fm.dim]
        rows.append(bands / (t**2 * speeds))
    ratios = np.array(rows)
    kappa = float(np.mean(ratios))
    spread = float(np.max(np.abs(ratios - kappa)) / kappa)
    logger.info("Acoustic limit measured", kappa=kappa, spread=spread)
    return AcousticLimit(kappa=kappa, ratios=ratios, spread=spread)
