from fastmcp import FastMCP

mcp = FastMCP(
    name="Crystal Acoustics MCP Server",
    instructions="""
# Crystal Acoustics MCP Server

Tools for crystal lattices given as abelian covers of finite graphs.

## Crystals
Pass either a bundled name (`bouquet`, `chain`, `k4`, `theta`) or a crystal JSON document:
`{"name", "dim"?, "vertices": [{"id", "mass"}], "edges": [{"id", "tail", "head", "voltage"?, "force"?}], "force_default"?}`.
Without voltages the maximal abelian cover is used.

## Workflow
1. `realize_crystal(crystal)` for the standard realization and its invariants (c, residuals).
2. `integrated_acoustic_spectrum(crystal, radius)` for Asp over deck vectors of L* with |λ| <= radius.
3. `recover_length_spectrum(asp_json, c)` turns Asp back into lengths of L*.
4. `poisson_theta_check(lattice or crystal, t)` verifies the Gaussian Poisson identity.

Results are canonical JSON strings; failures come back as text starting with `Error`.
    """,
)
