from .acoustic import (
    AspEntry,
    acoustic_spectrum,
    asp_entries,
    integrated_velocity,
    integrated_velocity_closed_form,
    normalization_check,
    quadrature_deviation,
)
from .assembly import Crystal, assemble_crystal
from .bloch import (
    ForceModel,
    a_chi,
    acoustic_limit_constant,
    acoustic_speeds,
    band_path,
    default_force_model,
    dispersion,
    dynamical_matrix,
    phase_velocity,
)
from .graph import (
    FiniteGraph,
    VoltageAssignment,
    build_graph,
    cycle_basis,
    make_graph,
    maximal_abelian_voltages,
    spanning_tree,
)
from .inverse import (
    Example2Grid,
    estimate_c,
    example1_candidates,
    example1_forward,
    example2_form,
    example2_forward,
    example2_search,
    poisson_consistency,
    recover_lsp,
    theta_check,
)
from .lattice import (
    Lattice,
    SpectrumSet,
    dual_lattice,
    enumerate_vectors,
    length_spectrum,
    parse_basis,
    primitive_geodesics,
    torus_eigenvalues,
)
from .realization import (
    Realization,
    equivariance_residual,
    laplacian_residual,
    orthogonality_constant,
    standard_realization,
)

__all__ = [
    "AspEntry",
    "Crystal",
    "Example2Grid",
    "FiniteGraph",
    "ForceModel",
    "Lattice",
    "Realization",
    "SpectrumSet",
    "VoltageAssignment",
    "a_chi",
    "acoustic_limit_constant",
    "acoustic_spectrum",
    "acoustic_speeds",
    "asp_entries",
    "assemble_crystal",
    "band_path",
    "build_graph",
    "cycle_basis",
    "default_force_model",
    "dispersion",
    "dual_lattice",
    "dynamical_matrix",
    "enumerate_vectors",
    "equivariance_residual",
    "estimate_c",
    "example1_candidates",
    "example1_forward",
    "example2_form",
    "example2_forward",
    "example2_search",
    "integrated_velocity",
    "integrated_velocity_closed_form",
    "laplacian_residual",
    "length_spectrum",
    "make_graph",
    "maximal_abelian_voltages",
    "normalization_check",
    "orthogonality_constant",
    "parse_basis",
    "phase_velocity",
    "poisson_consistency",
    "primitive_geodesics",
    "quadrature_deviation",
    "recover_lsp",
    "spanning_tree",
    "standard_realization",
    "theta_check",
    "torus_eigenvalues",
]
