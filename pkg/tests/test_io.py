import json

import numpy as np
import pytest

from xtal_acoustics.crystal.acoustic import acoustic_spectrum
from xtal_acoustics.crystal.bloch import band_path
from xtal_acoustics.errors import InputError
from xtal_acoustics.io import (
    BUNDLED,
    dumps_json,
    format_band_csv,
    load_crystal,
    load_spectrum,
    parse_model,
    realization_from_file,
    realization_to_file,
    spectrum_from_file,
    spectrum_to_file,
    write_json,
)
from xtal_acoustics.models import CrystalFile, RealizationFile, SpectrumKind, SpectrumSetFile


class TestCrystalFiles:
    """Test cases for loading crystal descriptions."""

    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled(self, name):
        crystal = load_crystal(name)
        assert crystal.name == name
        assert not crystal.has_voltages

    def test_from_path(self, tmp_path):
        path = tmp_path / "loop.json"
        path.write_text(
            json.dumps(
                {
                    "name": "loop",
                    "dim": 1,
                    "vertices": [{"id": 0, "mass": 2.0}],
                    "edges": [{"id": 0, "tail": 0, "head": 0, "voltage": [1], "force": [0.5]}],
                }
            )
        )
        crystal = load_crystal(path)
        assert crystal.has_voltages
        assert crystal.edges[0].force == [0.5]

    def test_unknown_source(self):
        with pytest.raises(InputError, match="no crystal file"):
            load_crystal("no-such-crystal")

    def test_invalid_json_position(self):
        with pytest.raises(InputError, match="line 1, column"):
            parse_model('{"name": }', CrystalFile)

    def test_missing_field_path(self):
        with pytest.raises(InputError, match="vertices"):
            parse_model('{"name": "x", "edges": [{"id": 0, "tail": 0, "head": 0}]}', CrystalFile)

    def test_inconsistent_voltage_dimension(self):
        text = json.dumps(
            {
                "name": "bad",
                "dim": 2,
                "vertices": [{"id": 0, "mass": 1.0}],
                "edges": [
                    {"id": 0, "tail": 0, "head": 0, "voltage": [1, 0]},
                    {"id": 1, "tail": 0, "head": 0, "voltage": [0, 1, 0]},
                ],
            }
        )
        with pytest.raises(InputError, match="edge 1: voltage has 3 entries"):
            parse_model(text, CrystalFile)

    def test_partial_voltages(self):
        text = json.dumps(
            {
                "name": "bad",
                "dim": 1,
                "vertices": [{"id": 0, "mass": 1.0}],
                "edges": [
                    {"id": 0, "tail": 0, "head": 0, "voltage": [1]},
                    {"id": 1, "tail": 0, "head": 0},
                ],
            }
        )
        with pytest.raises(InputError, match="all edges or for none"):
            parse_model(text, CrystalFile)

    def test_unknown_keys_rejected(self):
        with pytest.raises(InputError):
            parse_model(
                '{"name": "x", "vertices": [{"id": 0, "mass": 1, "charge": 3}], "edges": [{"id": 0, "tail": 0, "head": 0}]}',
                CrystalFile,
            )


class TestRealizationFiles:
    """Test cases for realization serialization."""

    def test_round_trip(self, honeycomb):
        data = realization_to_file(honeycomb.name, honeycomb.graph, honeycomb.realization)
        text = dumps_json(data)
        g, r = realization_from_file(parse_model(text, RealizationFile))
        assert g.edge_ids == honeycomb.graph.edge_ids
        for edge_id, vector in honeycomb.realization.edge_vectors.items():
            np.testing.assert_array_equal(r.edge_vectors[edge_id], vector)
        np.testing.assert_array_equal(r.period_basis, honeycomb.realization.period_basis)
        assert dumps_json(realization_to_file(honeycomb.name, g, r)) == text

    def test_row_major_period_basis(self, diamond):
        data = realization_to_file(diamond.name, diamond.graph, diamond.realization)
        assert data.period_basis == diamond.realization.period_basis.ravel().tolist()

    def test_dimension_checked(self, square):
        data = realization_to_file(square.name, square.graph, square.realization)
        data.period_basis = data.period_basis[:3]
        with pytest.raises(InputError):
            realization_from_file(data)


class TestSpectrumFiles:
    """Test cases for SpectrumSet JSON."""

    def test_byte_identical_round_trip(self, square, tmp_path):
        spectrum = acoustic_spectrum(square.force_model, square.dual_period_lattice, 2.3)
        path = tmp_path / "asp.json"
        write_json(spectrum_to_file(spectrum), path)
        again = tmp_path / "again.json"
        write_json(spectrum_to_file(load_spectrum(path)), again)
        assert path.read_bytes() == again.read_bytes()

    def test_canonical_layout(self):
        data = SpectrumSetFile(kind=SpectrumKind.ACOUSTIC, cutoff=2.0, entries=[(1.0, 4)])
        text = dumps_json(data)
        assert text.endswith("\n")
        assert list(json.loads(text)) == ["cutoff", "entries", "kind"]
        assert json.loads(text)["entries"] == [[1.0, 4]]

    def test_non_increasing_rejected(self):
        data = SpectrumSetFile(kind=SpectrumKind.ACOUSTIC, cutoff=5.0, entries=[(2.0, 1), (1.0, 1)])
        with pytest.raises(InputError, match="increasing"):
            spectrum_from_file(data)

    def test_negative_value_rejected(self):
        data = SpectrumSetFile(kind=SpectrumKind.ACOUSTIC, cutoff=5.0, entries=[(-0.5, 1), (1.0, 4)])
        with pytest.raises(InputError, match="nonnegative"):
            spectrum_from_file(data)

    def test_negative_value_allowed_for_form_targets(self):
        data = SpectrumSetFile(kind=SpectrumKind.SQUARED_LENGTHS, cutoff=5.0, entries=[(-1.0, 1), (0.0, 1), (1.0, 1)])
        spectrum = spectrum_from_file(data, allow_negative=True)
        assert spectrum.as_set() == (-1.0, 0.0, 1.0)


class TestBandCsv:
    """Test cases for band CSV output."""

    def test_header(self, square):
        points = band_path(square.force_model, [0.0, 0.0], [0.5, 0.0], 3)
        lines = format_band_csv(points).splitlines()
        assert lines[0] == "chi_1,chi_2,s1_sq,s2_sq"
        assert len(lines) == 4

    def test_full_adds_bands(self, honeycomb):
        points = band_path(honeycomb.force_model, [0.0, 0.0], [0.5, 0.0], 2)
        header = format_band_csv(points, full=True).splitlines()[0].split(",")
        assert header[-4:] == ["omega1_sq", "omega2_sq", "omega3_sq", "omega4_sq"]
        assert len(header) == 2 + 2 + 4
