"""
Reading and writing the JSON and CSV interchange files.

JSON is written canonically (sorted keys, two-space indent, shortest round-trip floats,
trailing newline) so that re-emitting a file that was read back is byte-identical.
"""

import csv
import io
import json
from collections.abc import Sequence
from importlib import resources
from pathlib import Path
from typing import TypeVar

import numpy as np
from loguru import logger
from pydantic import BaseModel, ValidationError

from xtal_acoustics.crystal.bloch import DispersionPoint
from xtal_acoustics.crystal.graph import FiniteGraph, VoltageAssignment, make_graph
from xtal_acoustics.crystal.lattice import SpectrumSet
from xtal_acoustics.crystal.realization import Realization
from xtal_acoustics.errors import InputError
from xtal_acoustics.models import (
    CrystalFile,
    RealizationEdge,
    RealizationFile,
    RealizationVertex,
    SpectrumSetFile,
)

M = TypeVar("M", bound=BaseModel)

BUNDLED = ("bouquet", "chain", "k4", "theta")


def dumps_json(model: BaseModel) -> str:
    payload = model.model_dump(mode="json")
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(model: BaseModel, path: str | Path) -> None:
    Path(path).write_text(dumps_json(model), encoding="utf-8")
    logger.debug("JSON written", path=str(path), schema=type(model).__name__)


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        loc = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{loc}: {item['msg']}")
    return "; ".join(lines)


def parse_model(text: str, schema: type[M], source: str = "<input>") -> M:
    """Parse JSON text into `schema`, reporting JSON positions and field paths."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        return schema.model_validate(payload)
    except ValidationError as e:
        raise InputError(f"{source}: {_format_validation_error(e)}") from e


def read_model(path: str | Path, schema: type[M]) -> M:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror or e}") from e
    return parse_model(text, schema, source=str(path))


# ==================== Crystals ====================


def bundled_crystal_text(name: str) -> str:
    if name not in BUNDLED:
        raise InputError(f"unknown bundled crystal {name!r}; choose from {', '.join(BUNDLED)}")
    return resources.files("xtal_acoustics.data").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_crystal(source: str | Path) -> CrystalFile:
    """Crystal file from a path, or a bundled crystal by name (bouquet, chain, k4, theta)."""
    path = Path(source)
    if path.exists():
        return read_model(path, CrystalFile)
    if str(source) in BUNDLED:
        return parse_model(bundled_crystal_text(str(source)), CrystalFile, source=str(source))
    raise InputError(f"no crystal file or bundled crystal named {source!r}")


# ==================== Realizations ====================


def realization_to_file(name: str, g: FiniteGraph, r: Realization) -> RealizationFile:
    return RealizationFile(
        name=name,
        dim=r.dim,
        ortho_constant=r.ortho_constant,
        period_basis=[float(x) for x in r.period_basis.ravel()],
        vertices=[
            RealizationVertex(id=v.id, mass=v.mass, position=[float(x) for x in r.positions[v.id]])
            for v in g.vertices
        ],
        edges=[
            RealizationEdge(
                id=e.id,
                tail=e.tail,
                head=e.head,
                voltage=[int(x) for x in r.voltages.voltage(e.id)],
                vector=[float(x) for x in r.edge_vectors[e.id]],
            )
            for e in g.edges
        ],
    )


def realization_from_file(data: RealizationFile) -> tuple[FiniteGraph, Realization]:
    n = data.dim
    if len(data.period_basis) != n * n:
        raise InputError(f"period_basis has {len(data.period_basis)} entries, expected {n * n}")
    for v in data.vertices:
        if len(v.position) != n:
            raise InputError(f"vertex {v.id}: position has {len(v.position)} coordinates, expected {n}")
    for e in data.edges:
        if len(e.vector) != n or len(e.voltage) != n:
            raise InputError(f"edge {e.id}: vector and voltage need {n} coordinates")
    g = make_graph(
        ((v.id, v.mass) for v in data.vertices),
        ((e.id, e.tail, e.head) for e in data.edges),
    )
    va = VoltageAssignment(dim=n, vectors={e.id: tuple(e.voltage) for e in data.edges})
    va.validate(g)
    r = Realization(
        dim=n,
        edge_vectors={e.id: np.asarray(e.vector, dtype=float) for e in data.edges},
        positions={v.id: np.asarray(v.position, dtype=float) for v in data.vertices},
        period_basis=np.asarray(data.period_basis, dtype=float).reshape(n, n),
        ortho_constant=data.ortho_constant,
        voltages=va,
    )
    return g, r


# ==================== Spectra ====================


def spectrum_to_file(spectrum: SpectrumSet) -> SpectrumSetFile:
    return SpectrumSetFile(
        kind=spectrum.kind, cutoff=spectrum.cutoff, entries=[(v, m) for v, m in spectrum.entries]
    )


def spectrum_from_file(data: SpectrumSetFile, allow_negative: bool = False) -> SpectrumSet:
    """Validate a spectrum file; `allow_negative` admits targets of indefinite forms."""
    values = [v for v, _ in data.entries]
    if not allow_negative and any(v < 0 for v in values):
        raise InputError("spectrum values must be nonnegative")
    if any(m < 1 for _, m in data.entries):
        raise InputError("spectrum multiplicities must be positive")
    if values != sorted(values) or len(set(values)) != len(values):
        raise InputError("spectrum entries must be strictly increasing")
    return SpectrumSet(
        entries=tuple((float(v), int(m)) for v, m in data.entries),
        cutoff=data.cutoff,
        kind=data.kind,
    )


def load_spectrum(path: str | Path, allow_negative: bool = False) -> SpectrumSet:
    return spectrum_from_file(read_model(path, SpectrumSetFile), allow_negative)


# ==================== Band CSV ====================


def band_csv_header(dim: int, bands: int | None) -> list[str]:
    header = [f"chi_{i + 1}" for i in range(dim)] + [f"s{i + 1}_sq" for i in range(dim)]
    if bands is not None:
        header += [f"omega{i + 1}_sq" for i in range(bands)]
    return header


def format_band_csv(points: Sequence[DispersionPoint], full: bool = False) -> str:
    """One row per sample: χ coordinates, s_i², and with `full` every band ω_j²."""
    if not points:
        raise InputError("band path is empty")
    dim = len(points[0].chi)
    bands = len(points[0].band_freqs_sq) if full else None
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(band_csv_header(dim, bands))
    for p in points:
        row = [*p.chi, *p.acoustic_speeds_sq]
        if full:
            row += list(p.band_freqs_sq)
        writer.writerow([repr(float(x)) for x in row])
    return buffer.getvalue()
