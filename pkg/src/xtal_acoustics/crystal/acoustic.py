"""
Integrated acoustic phase velocities along closed geodesics of the character torus,
and the integrated acoustic spectrum Asp.

A geodesic through the identity with deck vector λ ∈ L* is parametrized as t ↦ tλ on
[0, 1] and integrated against dt. Since s_i(tλ)² = t² s_i(λ)², the integral of
Σ s_i² is tr(A_λ)/3.
"""

from dataclasses import dataclass
from math import pi

import numpy as np
from loguru import logger
from scipy.integrate import simpson

from xtal_acoustics.config.settings import get_settings
from xtal_acoustics.crystal.bloch import ForceModel, a_chi, acoustic_speeds
from xtal_acoustics.crystal.lattice import (
    Geodesic,
    Lattice,
    SpectrumSet,
    lattice_geodesics,
    primitive_geodesics,
    spectrum_from_values,
)
from xtal_acoustics.crystal.parallel import parallel_map
from xtal_acoustics.errors import InputError
from xtal_acoustics.models import SpectrumKind


@dataclass(frozen=True)
class AspEntry:
    geodesic: Geodesic
    value_quadrature: float | None
    value_closed_form: float


@dataclass(frozen=True)
class NormalizationReport:
    """Relative deviation of tr A(e) from 3 m(V0) / (2π²), per edge."""

    target_trace: float
    per_edge: dict[int, float]
    max_deviation: float


def _deck_vector(geo: Geodesic) -> np.ndarray:
    vector = np.asarray(geo.vector, dtype=float)
    if not np.any(geo.deck_vector) or not np.any(vector):
        raise InputError("geodesic has a zero deck vector")
    return vector


def integrated_velocity(fm: ForceModel, geo: Geodesic, samples: int | None = None) -> float:
    """Composite Simpson value of ∫_0^1 Σ_i s_i(tλ)² dt."""
    samples = get_settings().quadrature_samples if samples is None else samples
    if samples < 3 or samples % 2 == 0:
        raise InputError(f"Simpson quadrature needs an odd sample count >= 3, got {samples}")
    vector = _deck_vector(geo)
    t = np.linspace(0.0, 1.0, samples)
    integrand = np.array([acoustic_speeds(fm, s * vector).squared.sum() for s in t])
    return float(simpson(integrand, x=t))


def integrated_velocity_closed_form(fm: ForceModel, geo: Geodesic) -> float:
    """(1/3) tr A_λ = (2π² / (3 m(V0))) Σ_e (λ·v(e))² tr A(e)."""
    return float(np.trace(a_chi(fm, _deck_vector(geo))) / 3)


def _spectrum_cutoff(fm: ForceModel, radius: float) -> float:
    """Largest value below which every Asp value stems from some |λ| <= radius."""
    vectors = fm.realization.vector_matrix(fm.graph)
    traces = np.trace(fm.stack(), axis1=1, axis2=2)
    form = 2 * pi**2 / (3 * fm.cell_mass) * (vectors.T * traces) @ vectors
    return float(radius**2 * np.linalg.eigvalsh(form)[0])


def asp_entries(
    fm: ForceModel,
    dual: Lattice,
    radius: float,
    primitive_only: bool = False,
    samples: int | None = None,
) -> list[AspEntry]:
    """
    Integrated velocities of all geodesics with |λ| <= radius.

    With `samples` set, each entry also carries the Simpson value.
    """
    geodesics = (
        primitive_geodesics(dual, radius)
        if primitive_only
        else lattice_geodesics(dual, radius)
    )

    def evaluate(geo: Geodesic) -> AspEntry:
        return AspEntry(
            geodesic=geo,
            value_quadrature=None if samples is None else integrated_velocity(fm, geo, samples),
            value_closed_form=integrated_velocity_closed_form(fm, geo),
        )

    entries = parallel_map(evaluate, geodesics)
    logger.info(
        "Integrated acoustic velocities evaluated",
        geodesics=len(entries),
        primitive_only=primitive_only,
        quadrature=samples,
    )
    return entries


def spectrum_of_entries(
    fm: ForceModel, entries: list[AspEntry], radius: float
) -> SpectrumSet:
    cutoff = _spectrum_cutoff(fm, radius)
    values = [
        e.value_closed_form
        for e in entries
        if e.value_closed_form <= cutoff * (1 + get_settings().merge_tolerance)
    ]
    spectrum = spectrum_from_values(values, cutoff, SpectrumKind.ACOUSTIC)
    if not spectrum.entries:
        logger.warning("Acoustic spectrum is empty", radius=radius, cutoff=cutoff)
    return spectrum


def acoustic_spectrum(
    fm: ForceModel, dual: Lattice, radius: float, primitive_only: bool = False
) -> SpectrumSet:
    """Asp over geodesics with deck vectors in L* up to `radius`, as a multiset."""
    return spectrum_of_entries(fm, asp_entries(fm, dual, radius, primitive_only), radius)


def quadrature_deviation(entries: list[AspEntry]) -> float:
    """Largest relative gap between Simpson and closed-form values."""
    worst = 0.0
    for e in entries:
        if e.value_quadrature is None:
            continue
        scale = max(abs(e.value_closed_form), 1e-300)
        worst = max(worst, abs(e.value_quadrature - e.value_closed_form) / scale)
    return worst


def normalization_check(fm: ForceModel) -> NormalizationReport:
    """How far each tr A(e) is from the 3 m(V0) / (2π²) that makes Asp = {Σ(λ·v)²}."""
    target = 3 * fm.cell_mass / (2 * pi**2)
    per_edge = {
        edge_id: float(abs(np.trace(a) - target) / target)
        for edge_id, a in sorted(fm.force.items())
    }
    return NormalizationReport(
        target_trace=target,
        per_edge=per_edge,
        max_deviation=max(per_edge.values(), default=0.0),
    )
