from typing import Annotated, Optional

from pydantic import Field

from xtal_acoustics.crystal.acoustic import acoustic_spectrum
from xtal_acoustics.crystal.assembly import Crystal, assemble_crystal
from xtal_acoustics.crystal.inverse import recover_lsp, theta_check
from xtal_acoustics.crystal.lattice import parse_basis
from xtal_acoustics.crystal.realization import (
    equivariance_residual,
    laplacian_residual,
    orthogonality_constant,
)
from xtal_acoustics.errors import InputError
from xtal_acoustics.io import (
    BUNDLED,
    bundled_crystal_text,
    dumps_json,
    parse_model,
    realization_to_file,
    spectrum_from_file,
    spectrum_to_file,
)
from xtal_acoustics.models import CrystalFile, SpectrumSetFile
from xtal_acoustics.server import mcp

CrystalArg = Annotated[
    str,
    Field(
        description="Bundled crystal name (bouquet, chain, k4, theta) or a crystal JSON document"
    ),
]


def _assemble(crystal: str) -> Crystal:
    text = bundled_crystal_text(crystal) if crystal in BUNDLED else crystal
    return assemble_crystal(parse_model(text, CrystalFile, source="crystal"))


# MCP Tools
@mcp.tool
def realize_crystal(crystal: CrystalArg) -> str:
    """
    Standard realization of a crystal.

    Returns the realization JSON followed by c, the orthogonality deviation and the
    Laplacian and equivariance residuals.
    """
    try:
        xtal = _assemble(crystal)
        c, deviation = orthogonality_constant(xtal.realization)
        residual = laplacian_residual(xtal.graph, xtal.realization).max_norm
        equivariance = equivariance_residual(xtal.graph, xtal.realization)

        result = dumps_json(realization_to_file(xtal.name, xtal.graph, xtal.realization))
        result += f"\nc: {c!r}\n"
        result += f"Orthogonality deviation: {deviation:.3e}\n"
        result += f"Laplacian residual: {residual:.3e}\n"
        result += f"Equivariance residual: {equivariance:.3e}\n"
        return result

    except Exception as e:
        return f"Error realizing crystal: {str(e)}"


@mcp.tool
def integrated_acoustic_spectrum(
    crystal: CrystalArg,
    radius: Annotated[float, Field(description="Bound on |λ| for deck vectors λ in L*", gt=0)],
    primitive_only: Annotated[
        bool, Field(description="Only simple closed geodesics (primitive λ, one of ±λ)")
    ] = False,
) -> str:
    """
    Integrated acoustic spectrum Asp of the crystal's standard realization.

    Next step: pass the JSON to recover_length_spectrum() with c = 1 (full-lattice mode).
    """
    try:
        xtal = _assemble(crystal)
        spectrum = acoustic_spectrum(
            xtal.force_model, xtal.dual_period_lattice, radius, primitive_only
        )
        return dumps_json(spectrum_to_file(spectrum))

    except Exception as e:
        return f"Error computing acoustic spectrum: {str(e)}"


@mcp.tool
def recover_length_spectrum(
    asp_json: Annotated[str, Field(description="SpectrumSet JSON of an acoustic spectrum")],
    c: Annotated[float, Field(description="Orthogonality constant of the realization", gt=0)],
) -> str:
    """Lengths of the dual period lattice L* recovered from Asp as sqrt(a / c)."""
    try:
        asp = spectrum_from_file(parse_model(asp_json, SpectrumSetFile, source="asp_json"))
        return dumps_json(spectrum_to_file(recover_lsp(asp, c)))

    except Exception as e:
        return f"Error recovering length spectrum: {str(e)}"


@mcp.tool
def poisson_theta_check(
    t: Annotated[float, Field(description="Heat parameter t > 0")],
    lattice: Annotated[
        Optional[str], Field(description='Lattice basis rows, e.g. "1,0;0,1"')
    ] = None,
    crystal: Annotated[
        Optional[str], Field(description="Crystal whose period lattice is checked")
    ] = None,
    target_tail: Annotated[float, Field(description="Truncation tail target", gt=0)] = 1e-12,
) -> str:
    """Both sides of Σ_{L*} exp(−4π²|y|²t) = Vol(L)/(4πt)^{n/2} Σ_L exp(−|s|²/4t)."""
    try:
        if lattice is not None:
            target = parse_basis(lattice)
        elif crystal is not None:
            target = _assemble(crystal).period_lattice
        else:
            raise InputError("give either lattice or crystal")
        return dumps_json(theta_check(target, t, target_tail))

    except Exception as e:
        return f"Error checking theta identity: {str(e)}"
