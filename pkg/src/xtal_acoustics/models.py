from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SpectrumKind(str, Enum):
    """What the values of a spectrum set measure."""

    LATTICE_LENGTHS = "lattice-lengths"
    SQUARED_LENGTHS = "squared-lengths"
    ACOUSTIC = "acoustic"
    TORUS_EIGENVALUES = "torus-eigenvalues"


class ForceDefault(str, Enum):
    """
    Force matrix used for edges without an explicit `force`.

    - NORMALIZED: (3 m(V0) / (2π² n)) I_n, so tr A(e) = 3 m(V0) / (2π²)
    - IDENTITY: I_n
    """

    NORMALIZED = "normalized"
    IDENTITY = "identity"


# Crystal description files
class VertexSpec(BaseModel):
    """Atom of the fundamental cell."""

    model_config = ConfigDict(extra="forbid")

    id: int = Field(..., description="Vertex id, unique within the file")
    mass: float = Field(..., description="Atomic mass m(x), positive")


class EdgeSpec(BaseModel):
    """Bond of the base graph, oriented tail -> head."""

    model_config = ConfigDict(extra="forbid")

    id: int = Field(..., description="Edge id, unique within the file")
    tail: int = Field(..., description="Vertex id of o(e)")
    head: int = Field(..., description="Vertex id of t(e)")
    voltage: Optional[list[int]] = Field(
        None, description="Deck translation of the lift of e, length dim"
    )
    force: Optional[list[float]] = Field(
        None, description="Force matrix A(e), dim x dim, row-major"
    )


class CrystalFile(BaseModel):
    """Crystal description: base graph, masses, optional voltages and force matrices."""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., description="Crystal name")
    dim: Optional[int] = Field(
        None, ge=1, description="Rank n of the deck group (derived when voltages are absent)"
    )
    vertices: list[VertexSpec] = Field(..., min_length=1)
    edges: list[EdgeSpec] = Field(..., min_length=1)
    force_default: ForceDefault = Field(
        ForceDefault.NORMALIZED, description="Force matrix for edges without `force`"
    )

    @model_validator(mode="after")
    def _check_voltages(self) -> "CrystalFile":
        given = [e.voltage is not None for e in self.edges]
        if any(given) and not all(given):
            raise ValueError("voltages must be given for all edges or for none")
        if all(given):
            if self.dim is None:
                raise ValueError("dim is required when voltages are given")
            for e in self.edges:
                if len(e.voltage) != self.dim:
                    raise ValueError(
                        f"edge {e.id}: voltage has {len(e.voltage)} entries, expected dim={self.dim}"
                    )
        if self.dim is not None:
            for e in self.edges:
                if e.force is not None and len(e.force) != self.dim**2:
                    raise ValueError(
                        f"edge {e.id}: force has {len(e.force)} entries, expected {self.dim**2}"
                    )
        return self

    @property
    def has_voltages(self) -> bool:
        return all(e.voltage is not None for e in self.edges)


# Realization files
class RealizationVertex(BaseModel):
    id: int
    mass: float
    position: list[float]


class RealizationEdge(BaseModel):
    id: int
    tail: int
    head: int
    voltage: list[int]
    vector: list[float]


class RealizationFile(BaseModel):
    """Serialized realization; period_basis is row-major, columns are generators."""

    name: str
    dim: int = Field(..., ge=1)
    ortho_constant: float
    period_basis: list[float]
    vertices: list[RealizationVertex]
    edges: list[RealizationEdge]


# Spectra and reports
class SpectrumSetFile(BaseModel):
    kind: SpectrumKind
    cutoff: float = Field(..., ge=0)
    entries: list[tuple[float, int]] = Field(
        default_factory=list, description="[value, multiplicity] pairs, increasing"
    )


class ThetaReport(BaseModel):
    """Both sides of the Gaussian Poisson identity for a lattice L and its dual."""

    t: float
    lhs: float = Field(..., description="Σ_{y∈L*} exp(−4π²|y|²t)")
    rhs: float = Field(..., description="Vol(L)/(4πt)^{n/2} Σ_{s∈L} exp(−|s|²/(4t))")
    volume: float
    truncation_radius_primal: float
    truncation_radius_dual: float
    tail_bound: float
    relative_error: float


class TupleCandidate(BaseModel):
    """A tuple (m, α, β, γ) whose generated value set matches a target."""

    m: int
    alpha: float
    beta: float
    gamma: float
    score: float = Field(..., description="Hausdorff distance to the target set")
    positive_semidefinite: bool = Field(..., description="alpha * beta >= gamma**2")
    min_alpha_beta: Optional[float] = Field(
        None, description="min(alpha, beta), reported when gamma > 0"
    )
    min_form_value: float = Field(
        ..., description="Smallest α k² + β l² + 2γ k l over nonzero (k, l) in the box"
    )


class Example1Candidate(BaseModel):
    k: int = Field(..., description="Candidate |χ|²")
    divisor: float = Field(..., description="value / k, inside the window")
    length: float = Field(..., description="Candidate |χ| = sqrt(k)")


class Example1Element(BaseModel):
    value: float
    multiplicity: int
    candidates: list[Example1Candidate]


class Example1Result(BaseModel):
    window: tuple[float, float]
    consistent: bool = Field(..., description="Every element admits at least one candidate")
    elements: list[Example1Element]
    divisor_ranking: list[tuple[float, int]] = Field(
        default_factory=list,
        description="(divisor, number of elements admitting it), most shared first",
    )


class Example2Result(BaseModel):
    """All grid tuples whose generated value set matches the target."""

    K: int = Field(..., ge=1, description="Coefficient bound |k|, |l| <= K")
    tol: float = Field(..., ge=0)
    grid_size: int
    target: list[float]
    candidates: list[TupleCandidate]
