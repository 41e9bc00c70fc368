import numpy as np
import pytest

from xtal_acoustics.crystal.graph import (
    VoltageAssignment,
    build_graph,
    cycle_basis,
    make_graph,
    maximal_abelian_voltages,
    spanning_tree,
    spans_integer_lattice,
)
from xtal_acoustics.errors import InputError
from xtal_acoustics.io import load_crystal


@pytest.fixture
def theta_graph():
    return build_graph(load_crystal("theta"))


@pytest.fixture
def bouquet_graph():
    return build_graph(load_crystal("bouquet"))


@pytest.fixture
def k4_graph():
    return build_graph(load_crystal("k4"))


class TestBuildGraph:
    """Test cases for building validated base graphs."""

    def test_bouquet(self, bouquet_graph):
        """Bouquet has one vertex and two loops."""
        assert len(bouquet_graph.vertices) == 1
        assert len(bouquet_graph.edges) == 2
        assert all(e.is_loop for e in bouquet_graph.edges)

    def test_theta_betti_number(self, theta_graph):
        """Theta graph has b1 = 3 - 2 + 1 = 2."""
        assert len(theta_graph.vertices) == 2
        assert len(theta_graph.edges) == 3
        assert theta_graph.betti_number == 2

    def test_k4_betti_number(self, k4_graph):
        """K4 has b1 = 6 - 4 + 1 = 3."""
        assert k4_graph.betti_number == 3

    def test_cell_mass(self, theta_graph):
        """m(V0) sums vertex masses."""
        assert theta_graph.cell_mass == 2.0

    def test_loop_appears_twice_in_out_edges(self, bouquet_graph):
        """Both orientations of a loop start at its vertex."""
        out = bouquet_graph.out_edges(0)
        assert [(oe.edge.id, oe.sign) for oe in out] == [(0, 1), (0, -1), (1, 1), (1, -1)]

    def test_disconnected_graph_rejected(self):
        """A disconnected base graph is an input error."""
        with pytest.raises(InputError, match="disconnected"):
            make_graph([(0, 1.0), (1, 1.0)], [(0, 0, 0)])

    def test_unknown_endpoint_rejected(self):
        """Edges must reference known vertices."""
        with pytest.raises(InputError, match="unknown vertex"):
            make_graph([(0, 1.0)], [(0, 0, 7)])

    def test_duplicate_edge_ids_rejected(self):
        """Edge ids are unique."""
        with pytest.raises(InputError, match="duplicate edge ids"):
            make_graph([(0, 1.0)], [(0, 0, 0), (0, 0, 0)])

    def test_nonpositive_mass_rejected(self):
        """Masses are positive."""
        with pytest.raises(InputError, match="mass"):
            make_graph([(0, 0.0)], [(0, 0, 0)])


class TestCycleBasis:
    """Test cases for spanning trees and fundamental cycles."""

    def test_theta_tree(self, theta_graph):
        """Edge 0 spans the theta graph; 1 and 2 are chords."""
        basis = cycle_basis(theta_graph)
        assert basis.tree.edges == frozenset({0})
        assert basis.chords == (1, 2)

    def test_bouquet_tree_is_empty(self, bouquet_graph):
        """A single vertex needs no tree edges."""
        tree = spanning_tree(bouquet_graph)
        assert tree.edges == frozenset()
        np.testing.assert_array_equal(cycle_basis(bouquet_graph).cycles, np.eye(2))

    def test_theta_cycles(self, theta_graph):
        """c1 = e1 - e0 and c2 = e2 - e0."""
        cycles = cycle_basis(theta_graph).cycles
        np.testing.assert_array_equal(cycles, [[-1, 1, 0], [-1, 0, 1]])

    def test_k4_triangles(self, k4_graph):
        """BFS from vertex 0 takes edges 0, 1, 2; each chord closes a triangle."""
        basis = cycle_basis(k4_graph)
        assert basis.tree.edges == frozenset({0, 1, 2})
        assert basis.chords == (3, 4, 5)
        assert all(np.count_nonzero(row) == 3 for row in basis.cycles)

    def test_cycles_have_zero_boundary(self, k4_graph):
        """Every fundamental cycle is a cycle."""
        basis = cycle_basis(k4_graph)
        assert not np.any(k4_graph.incidence_matrix() @ basis.cycles.T)

    def test_cycles_independent(self, k4_graph):
        """Fundamental cycles have full rank."""
        assert np.linalg.matrix_rank(cycle_basis(k4_graph).cycles) == 3


class TestVoltages:
    """Test cases for voltage assignments."""

    def test_bouquet_maximal(self, bouquet_graph):
        """Loops map to the standard basis."""
        va = maximal_abelian_voltages(bouquet_graph)
        assert va.dim == 2
        assert va.vectors == {0: (1, 0), 1: (0, 1)}

    def test_theta_maximal(self, theta_graph):
        """Tree edge to zero, chords to the standard basis."""
        va = maximal_abelian_voltages(theta_graph)
        assert va.vectors == {0: (0, 0), 1: (1, 0), 2: (0, 1)}

    def test_antisymmetry(self, theta_graph):
        """Reversing an edge negates its voltage."""
        va = maximal_abelian_voltages(theta_graph)
        np.testing.assert_array_equal(va.voltage(1, -1), -va.voltage(1))

    def test_k4_chords_get_basis(self, k4_graph):
        """K4 chords map to the standard basis of Z^3."""
        va = maximal_abelian_voltages(k4_graph)
        np.testing.assert_array_equal(va.matrix(k4_graph)[3:], np.eye(3, dtype=int))
        assert not np.any(va.matrix(k4_graph)[:3])

    @pytest.mark.parametrize("name", ["bouquet_graph", "theta_graph", "k4_graph"])
    def test_cycle_voltages_are_basis_vectors(self, request, name):
        """The signed voltage sum around fundamental cycle i is the i-th unit vector."""
        g = request.getfixturevalue(name)
        basis = cycle_basis(g)
        va = maximal_abelian_voltages(g, basis)
        np.testing.assert_array_equal(basis.cycles @ va.matrix(g), np.eye(va.dim, dtype=np.int64))

    def test_tree_has_no_cover(self):
        """A tree has b1 = 0 and no crystal."""
        g = make_graph([(0, 1.0), (1, 1.0)], [(0, 0, 1)])
        with pytest.raises(InputError, match="tree"):
            maximal_abelian_voltages(g)

    def test_voltages_must_span(self, bouquet_graph):
        """Voltages generating 2Z x Z are rejected."""
        va = VoltageAssignment(dim=2, vectors={0: (2, 0), 1: (0, 1)})
        with pytest.raises(InputError, match="span"):
            va.validate(bouquet_graph)


class TestSpansIntegerLattice:
    """Test cases for the determinantal-divisor spanning test."""

    def test_identity(self):
        assert spans_integer_lattice(np.eye(3, dtype=int))

    def test_index_two(self):
        assert not spans_integer_lattice(np.array([[2, 0], [3, 1]]))

    def test_coprime_minors(self):
        """Minors 2 and 3 have gcd 1."""
        assert spans_integer_lattice(np.array([[2, 0], [3, 0], [0, 1]]))

    def test_rank_deficient(self):
        assert not spans_integer_lattice(np.array([[1, 1], [2, 2]]))
