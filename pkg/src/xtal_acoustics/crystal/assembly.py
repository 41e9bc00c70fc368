from dataclasses import dataclass

import numpy as np
from loguru import logger

from xtal_acoustics.crystal.bloch import ForceModel, default_force_model
from xtal_acoustics.crystal.graph import (
    FiniteGraph,
    VoltageAssignment,
    build_graph,
    maximal_abelian_voltages,
)
from xtal_acoustics.crystal.lattice import Lattice, dual_lattice
from xtal_acoustics.crystal.realization import Realization, standard_realization
from xtal_acoustics.errors import InputError
from xtal_acoustics.models import CrystalFile


@dataclass(frozen=True, eq=False)
class Crystal:
    """A crystal description carried through graph, voltages, realization and forces."""

    name: str
    graph: FiniteGraph
    voltages: VoltageAssignment
    realization: Realization
    force_model: ForceModel

    @property
    def dim(self) -> int:
        return self.realization.dim

    @property
    def period_lattice(self) -> Lattice:
        return Lattice(self.realization.period_basis)

    @property
    def dual_period_lattice(self) -> Lattice:
        return dual_lattice(self.period_lattice)


def voltages_of(crystal: CrystalFile, g: FiniteGraph) -> VoltageAssignment:
    """User voltages when the file has them, otherwise the maximal abelian cover."""
    if not crystal.has_voltages:
        return maximal_abelian_voltages(g)
    return VoltageAssignment(
        dim=int(crystal.dim),
        vectors={e.id: tuple(int(x) for x in e.voltage) for e in crystal.edges},
    )


def assemble_crystal(crystal: CrystalFile) -> Crystal:
    """Graph, voltages, standard realization and force model of a parsed crystal file."""
    g = build_graph(crystal)
    va = voltages_of(crystal, g)
    if crystal.dim is not None and crystal.dim != va.dim:
        raise InputError(
            f"dim={crystal.dim} but the maximal abelian cover has rank {va.dim}"
        )
    r = standard_realization(g, va)

    n = r.dim
    overrides = {}
    for e in crystal.edges:
        if e.force is None:
            continue
        if len(e.force) != n * n:
            raise InputError(
                f"edge {e.id}: force has {len(e.force)} entries, expected {n * n}"
            )
        overrides[e.id] = np.asarray(e.force, dtype=float).reshape(n, n)
    fm = default_force_model(g, r, crystal.force_default, overrides)

    logger.info(
        "Crystal assembled",
        name=crystal.name,
        dim=n,
        vertices=len(g.vertices),
        edges=len(g.edges),
        custom_forces=len(overrides),
    )
    return Crystal(
        name=crystal.name,
        graph=g,
        voltages=va,
        realization=r,
        force_model=fm,
    )
