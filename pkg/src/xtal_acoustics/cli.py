"""
Command-line front end: `xtal realize | bands | asp | theta | invert | serve`.

Result files go to `--out`; without it the JSON (or CSV) is printed on stdout and the
human summary moves to stderr so piped output stays machine-readable.
"""

import argparse
import sys
from collections.abc import Sequence
from itertools import combinations
from math import degrees

import numpy as np
from loguru import logger
from pydantic import BaseModel

from xtal_acoustics.config.logging import setup_logging
from xtal_acoustics.config.settings import get_settings
from xtal_acoustics.crystal.acoustic import (
    asp_entries,
    normalization_check,
    quadrature_deviation,
    spectrum_of_entries,
)
from xtal_acoustics.crystal.assembly import Crystal, assemble_crystal
from xtal_acoustics.crystal.bloch import band_path
from xtal_acoustics.crystal.inverse import (
    Example2Grid,
    example1_candidates,
    example2_search,
    poisson_consistency,
    recover_lsp,
    theta_check,
)
from xtal_acoustics.crystal.lattice import parse_basis
from xtal_acoustics.crystal.realization import (
    equivariance_residual,
    laplacian_residual,
    orthogonality_constant,
)
from xtal_acoustics.errors import InputError, NumericalError, XtalError
from xtal_acoustics.io import (
    dumps_json,
    format_band_csv,
    load_crystal,
    load_spectrum,
    realization_to_file,
    spectrum_to_file,
    write_json,
)
from xtal_acoustics.models import Example2Result, SpectrumKind

REALIZE_TOLERANCE = 1e-8


def parse_vector(text: str, dim: int | None = None) -> np.ndarray:
    try:
        vector = np.array([float(x) for x in text.replace(" ", "").split(",") if x], dtype=float)
    except ValueError as e:
        raise InputError(f"malformed vector {text!r}") from e
    if vector.size == 0 or (dim is not None and vector.size != dim):
        raise InputError(f"vector {text!r} must have {dim} comma-separated coordinates")
    return vector


def parse_window(text: str) -> tuple[float, float]:
    lo, hi = parse_vector(text, 2)
    return float(lo), float(hi)


def emit(model: BaseModel, out: str | None, summary: Sequence[str]) -> None:
    """Write `model` to `out` and the summary to stdout, or JSON to stdout and summary to stderr."""
    if out:
        write_json(model, out)
        stream = sys.stdout
    else:
        sys.stdout.write(dumps_json(model))
        stream = sys.stderr
    for line in summary:
        print(line, file=stream)


def _crystal(args: argparse.Namespace) -> Crystal:
    return assemble_crystal(load_crystal(args.crystal))


# ==================== Commands ====================


def cmd_realize(args: argparse.Namespace) -> int:
    crystal = _crystal(args)
    g, r = crystal.graph, crystal.realization
    c, deviation = orthogonality_constant(r)
    residual = laplacian_residual(g, r).max_norm
    equivariance = equivariance_residual(g, r)

    summary = [f"crystal {crystal.name}: n={r.dim}, |V0|={len(g.vertices)}, |E0|={len(g.edges)}"]
    summary += [f"c = {c:.12g} (deviation {deviation:.3e})"]
    summary += [f"edge {e.id}: |v| = {np.linalg.norm(r.edge_vectors[e.id]):.12g}" for e in g.edges]
    for a, b in combinations(g.edges, 2):
        va, vb = r.edge_vectors[a.id], r.edge_vectors[b.id]
        cosine = float(va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb)))
        summary.append(f"angle({a.id},{b.id}) = {degrees(np.arccos(np.clip(cosine, -1, 1))):.10g} deg")
    summary += [
        f"laplacian residual {residual:.3e}",
        f"equivariance residual {equivariance:.3e}",
    ]
    emit(realization_to_file(crystal.name, g, r), args.out, summary)

    worst = max(deviation, residual, equivariance)
    if worst > REALIZE_TOLERANCE:
        raise NumericalError(f"realization check failed: worst residual {worst:.3e}")
    return 0


def cmd_bands(args: argparse.Namespace) -> int:
    crystal = _crystal(args)
    n = crystal.dim
    points = band_path(
        crystal.force_model,
        parse_vector(args.start, n),
        parse_vector(args.end, n),
        args.steps,
        gauge=args.gauge,
    )
    text = format_band_csv(points, full=args.full)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        print(f"{len(points)} band samples written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_asp(args: argparse.Namespace) -> int:
    if not args.cutoff > 0:
        raise InputError(f"--cutoff must be positive, got {args.cutoff}")
    crystal = _crystal(args)
    fm = crystal.force_model
    entries = asp_entries(
        fm,
        crystal.dual_period_lattice,
        args.cutoff,
        primitive_only=args.primitive,
        samples=args.quadrature,
    )
    spectrum = spectrum_of_entries(fm, entries, args.cutoff)

    summary = [
        f"{spectrum.total} geodesics, {len(spectrum)} distinct values below {spectrum.cutoff:.12g}",
        f"normalization deviation {normalization_check(fm).max_deviation:.3e}",
    ]
    if args.quadrature is not None:
        summary.append(f"quadrature vs closed form: max relative deviation {quadrature_deviation(entries):.3e}")
    emit(spectrum_to_file(spectrum), args.out, summary)
    return 0


def cmd_theta(args: argparse.Namespace) -> int:
    if args.lattice is not None:
        lattice = parse_basis(args.lattice)
    elif args.crystal is not None:
        lattice = _crystal(args).period_lattice
    else:
        raise InputError("theta needs a crystal file or --lattice")
    report = theta_check(lattice, args.t, args.tail)
    summary = [
        f"lhs = {report.lhs!r}",
        f"rhs = {report.rhs!r}",
        f"relative error {report.relative_error:.3e} (tail bound {report.tail_bound:.3e})",
        f"radii: primal {report.truncation_radius_primal:.6g}, dual {report.truncation_radius_dual:.6g}",
    ]
    emit(report, args.out, summary)
    return 0


def cmd_invert(args: argparse.Namespace) -> int:
    asp = load_spectrum(args.asp, allow_negative=args.example2)
    if args.example1:
        lo, hi = parse_window(args.window)
        result = example1_candidates(asp, lo, hi)
        summary = [
            f"{len(result.elements)} elements, consistent={result.consistent}",
            *(
                f"{e.value!r}: k in {[c.k for c in e.candidates]}"
                for e in result.elements
            ),
        ]
        emit(result, args.out, summary)
        return 0

    if args.example2:
        grid = Example2Grid.from_spec(args.m, args.alpha, args.beta, args.gamma)
        target = asp.as_set()
        candidates = example2_search(target, args.K, grid, args.tol)
        result = Example2Result(
            K=args.K, tol=args.tol, grid_size=grid.size, target=list(target), candidates=candidates
        )
        summary = [f"{len(candidates)} of {grid.size} tuples match"] + [
            f"(m, alpha, beta, gamma) = ({c.m}, {c.alpha!r}, {c.beta!r}, {c.gamma!r}) score {c.score:.3e}"
            for c in candidates
        ]
        emit(result, args.out, summary)
        return 0

    if args.c is None:
        raise InputError("--c is required to recover lengths (or pick --example1/--example2)")
    if asp.kind != SpectrumKind.ACOUSTIC:
        logger.warning("Inverting a spectrum that is not acoustic", kind=asp.kind.value)
    recovered = recover_lsp(asp, args.c)
    summary = [f"{recovered.total} dual lengths below {recovered.cutoff:.12g}"]
    if args.lattice is not None:
        report = poisson_consistency(recovered, parse_basis(args.lattice), args.t)
        summary.append(f"poisson check at t={report.t}: relative error {report.relative_error:.3e}")
    emit(spectrum_to_file(recovered), args.out, summary)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from xtal_acoustics.server import mcp
    import xtal_acoustics.tools  # noqa: F401 to register tools

    mcp.run()
    return 0


# ==================== Parser ====================


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="xtal",
        description="Standard realizations, acoustic spectra and theta checks for crystal lattices.",
    )
    parser.add_argument("--log-level", default=None, help="loguru level (default from XTAL_LOGGING_LEVEL)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("realize", help="standard realization of a crystal")
    p.add_argument("crystal", help="crystal JSON file or bundled name (bouquet, chain, k4, theta)")
    p.add_argument("--out", help="realization JSON output path")
    p.set_defaults(handler=cmd_realize)

    p = sub.add_parser("bands", help="acoustic speeds and bands along a segment")
    p.add_argument("crystal")
    p.add_argument("--from", dest="start", required=True, help="start character, e.g. 0,0")
    p.add_argument("--to", dest="end", required=True, help="end character, e.g. 0.5,0")
    p.add_argument("--steps", type=int, default=11)
    p.add_argument("--full", action="store_true", help="add every band of the dynamical matrix")
    p.add_argument("--gauge", choices=["lattice", "edge"], default="lattice")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(handler=cmd_bands)

    p = sub.add_parser("asp", help="integrated acoustic spectrum")
    p.add_argument("crystal")
    p.add_argument("--cutoff", type=float, required=True, help="radius bound on deck vectors in L*")
    p.add_argument("--primitive", action="store_true", help="simple closed geodesics only")
    p.add_argument("--quadrature", type=int, default=None, metavar="N", help="cross-check with N-point Simpson")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_asp)

    p = sub.add_parser("theta", help="Gaussian Poisson identity between L and L*")
    p.add_argument("crystal", nargs="?", default=None, help="use the crystal's period lattice")
    p.add_argument("--lattice", help='basis rows, e.g. "1,0;0,1"')
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--tail", type=float, default=1e-12, help="target truncation tail")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_theta)

    p = sub.add_parser("invert", help="recover lengths or search Example models from an Asp file")
    p.add_argument("asp", help="SpectrumSet JSON")
    p.add_argument("--c", type=float, default=None, help="orthogonality constant of the realization")
    p.add_argument("--lattice", help="primal period lattice for a Poisson consistency check")
    p.add_argument("--t", type=float, default=0.1, help="Poisson check parameter")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--example1", action="store_true")
    mode.add_argument("--example2", action="store_true")
    p.add_argument("--window", default="1,2", help="Example-1 divisor window lo,hi")
    p.add_argument("--m", default="1", help="Example-2 grid lo:hi:step")
    p.add_argument("--alpha", default="0.1:2:0.1")
    p.add_argument("--beta", default="0.1:2:0.1")
    p.add_argument("--gamma", default="0:1:0.5")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_invert)

    p = sub.add_parser("serve", help="run the MCP tool server on stdio")
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        return args.handler(args)
    except XtalError as e:
        logger.error("Command failed", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
