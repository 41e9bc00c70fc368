"""
Full-rank lattices in R^n: duals, ball enumeration, length spectra and the closed
geodesics of the character torus R^n / L*.
"""

from collections.abc import Iterable
from dataclasses import dataclass
from functools import cached_property
from math import pi

import numpy as np
from loguru import logger

from xtal_acoustics.config.settings import get_settings
from xtal_acoustics.errors import BudgetError, InputError
from xtal_acoustics.models import SpectrumKind


@dataclass(frozen=True, eq=False)
class Lattice:
    """Lattice generated by the columns of `basis`."""

    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1] or basis.shape[0] == 0:
            raise InputError(f"lattice basis must be a nonempty square matrix, got shape {basis.shape}")
        scale = float(np.prod(np.linalg.norm(basis, axis=0)))
        if scale == 0.0 or abs(np.linalg.det(basis)) <= 1e-12 * scale:
            raise InputError("singular lattice basis")
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @cached_property
    def volume(self) -> float:
        return float(abs(np.linalg.det(self.basis)))

    @property
    def gram(self) -> np.ndarray:
        return self.basis.T @ self.basis

    @property
    def generators(self) -> list[np.ndarray]:
        return [self.basis[:, j] for j in range(self.dim)]


@dataclass(frozen=True, eq=False)
class LatticeVectors:
    """Enumerated nonzero lattice vectors in canonical order (length, then coefficients)."""

    coefficients: np.ndarray
    vectors: np.ndarray
    norms: np.ndarray
    radius: float

    def __len__(self) -> int:
        return len(self.norms)


@dataclass(frozen=True)
class SpectrumSet:
    """Multiset of nonnegative reals, complete below `cutoff`."""

    entries: tuple[tuple[float, int], ...]
    cutoff: float
    kind: SpectrumKind

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.entries], dtype=float)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.entries], dtype=np.int64)

    @property
    def total(self) -> int:
        return int(sum(m for _, m in self.entries))

    def as_set(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.entries)


@dataclass(frozen=True, eq=False)
class Geodesic:
    """Closed geodesic of R^n/L* through the identity, t ↦ t·vector for t in [0, 1]."""

    deck_vector: tuple[int, ...]
    vector: np.ndarray
    length: float
    primitive: bool


def spectrum_from_values(
    values: Iterable[float],
    cutoff: float,
    kind: SpectrumKind,
    multiplicities: Iterable[int] | None = None,
    tolerance: float | None = None,
) -> SpectrumSet:
    """Merge values equal within a relative tolerance, summing their multiplicities."""
    tolerance = get_settings().merge_tolerance if tolerance is None else tolerance
    values = np.asarray(list(values), dtype=float)
    counts = (
        np.ones(len(values), dtype=np.int64)
        if multiplicities is None
        else np.asarray(list(multiplicities), dtype=np.int64)
    )
    if np.any(values < 0):
        raise InputError("spectrum values must be nonnegative")
    order = np.argsort(values, kind="stable")
    entries: list[list] = []
    for value, count in zip(values[order], counts[order]):
        if entries and value - entries[-1][0] <= tolerance * max(abs(entries[-1][0]), abs(value)):
            entries[-1][1] += int(count)
        else:
            entries.append([float(value), int(count)])
    return SpectrumSet(
        entries=tuple((v, m) for v, m in entries), cutoff=float(cutoff), kind=kind
    )


def parse_basis(text: str) -> Lattice:
    """Parse `"a,b;c,d"`: each `;`-separated row is one generator."""
    try:
        rows = [
            [float(x) for x in row.split(",")]
            for row in text.replace(" ", "").split(";")
            if row
        ]
    except ValueError as e:
        raise InputError(f"malformed lattice basis {text!r}: {e}") from e
    if not rows or any(len(row) != len(rows) for row in rows):
        raise InputError(f"lattice basis {text!r} must list n generators of length n")
    return Lattice(np.array(rows, dtype=float).T)


def dual_lattice(lattice: Lattice) -> Lattice:
    """Reciprocal lattice L* = {x : x·y ∈ Z for all y ∈ L} (no 2π factor)."""
    return Lattice(np.linalg.inv(lattice.basis).T)


def enumerate_vectors(
    lattice: Lattice, radius: float, budget: int | None = None
) -> LatticeVectors:
    """
    All nonzero v ∈ L with |v| <= radius, each once.

    Coefficients k = B^{-1} v obey |k_i| <= radius · |row_i(B^{-1})|, so the box of
    those bounds is searched and then filtered by true length.
    """
    if not radius > 0:
        raise InputError(f"radius must be positive, got {radius}")
    budget = get_settings().point_budget if budget is None else budget
    n = lattice.dim
    bounds = np.floor(
        radius * np.linalg.norm(np.linalg.inv(lattice.basis), axis=1) + 1e-9
    ).astype(np.int64)
    box = int(np.prod(2 * bounds + 1))
    if box > budget:
        raise BudgetError(
            f"enumeration of radius {radius} needs {box} coefficient vectors, "
            f"budget is {budget}"
        )

    axes = [np.arange(-b, b + 1, dtype=np.int64) for b in bounds]
    coefficients = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    vectors = coefficients @ lattice.basis.T
    norms = np.linalg.norm(vectors, axis=1)
    keep = (norms <= radius * (1 + 1e-12)) & np.any(coefficients != 0, axis=1)
    coefficients, vectors, norms = coefficients[keep], vectors[keep], norms[keep]

    keys = [coefficients[:, j] for j in reversed(range(n))] + [np.round(norms, 10)]
    order = np.lexsort(keys)
    logger.debug("Lattice enumeration", radius=radius, box=box, found=int(keep.sum()))
    return LatticeVectors(
        coefficients=coefficients[order],
        vectors=vectors[order],
        norms=norms[order],
        radius=float(radius),
    )


def length_spectrum(lattice: Lattice, radius: float) -> SpectrumSet:
    """Lsp: distinct lengths |v| <= radius with multiplicities (±v counted separately)."""
    points = enumerate_vectors(lattice, radius)
    return spectrum_from_values(points.norms, radius, SpectrumKind.LATTICE_LENGTHS)


def shortest_vector_length(lattice: Lattice) -> float:
    radius = float(np.min(np.linalg.norm(lattice.basis, axis=0)))
    return float(enumerate_vectors(lattice, radius).norms.min())


def _is_primitive(coefficients: np.ndarray) -> np.ndarray:
    return np.gcd.reduce(np.abs(coefficients), axis=1) == 1


def _sign_canonical(coefficients: np.ndarray) -> np.ndarray:
    """Mask of rows whose first nonzero coefficient is positive."""
    first = np.argmax(coefficients != 0, axis=1)
    return coefficients[np.arange(len(coefficients)), first] > 0


def lattice_geodesics(dual: Lattice, radius: float) -> list[Geodesic]:
    """Every nonzero y ∈ L* with |y| <= radius, both signs, primitive or not."""
    points = enumerate_vectors(dual, radius)
    primitive = _is_primitive(points.coefficients)
    return [
        Geodesic(
            deck_vector=tuple(int(k) for k in points.coefficients[i]),
            vector=points.vectors[i],
            length=float(points.norms[i]),
            primitive=bool(primitive[i]),
        )
        for i in range(len(points))
    ]


def primitive_geodesics(dual: Lattice, radius: float) -> list[Geodesic]:
    """Simple closed geodesics: primitive y ∈ L*, |y| <= radius, one of ±y."""
    points = enumerate_vectors(dual, radius)
    keep = _is_primitive(points.coefficients) & _sign_canonical(points.coefficients)
    return [
        Geodesic(
            deck_vector=tuple(int(k) for k in points.coefficients[i]),
            vector=points.vectors[i],
            length=float(points.norms[i]),
            primitive=True,
        )
        for i in np.flatnonzero(keep)
    ]


def torus_eigenvalues(lattice: Lattice, cutoff: float) -> SpectrumSet:
    """Laplace eigenvalues 4π²|y|², y ∈ L*, of the flat torus R^n/L, up to `cutoff`."""
    if not cutoff > 0:
        raise InputError(f"cutoff must be positive, got {cutoff}")
    dual = dual_lattice(lattice)
    radius = np.sqrt(cutoff) / (2 * pi)
    points = enumerate_vectors(dual, radius)
    values = np.concatenate([[0.0], 4 * pi**2 * points.norms**2])
    values = values[values <= cutoff * (1 + 1e-12)]
    return spectrum_from_values(values, cutoff, SpectrumKind.TORUS_EIGENVALUES)
