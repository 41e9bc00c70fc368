"""
xtal-acoustics

Standard realizations of crystal lattices, their acoustic phase velocities and the
integrated acoustic spectrum, together with the Poisson-formula bridge that recovers
the length spectrum of the period lattice from it.

Crystals are abelian covers of finite graphs with Z^n deck group. The numerical core
lives in `xtal_acoustics.crystal`; `xtal` (see `xtal_acoustics.cli`) and the MCP tools
in `xtal_acoustics.tools` expose the same pipeline.
"""
