from math import pi, sqrt

import numpy as np
import pytest

from xtal_acoustics.crystal.acoustic import acoustic_spectrum
from xtal_acoustics.crystal.inverse import (
    Example2Grid,
    estimate_c,
    example1_candidates,
    example1_forward,
    example2_form,
    example2_forward,
    example2_search,
    gaussian_sum,
    parse_grid_axis,
    poisson_consistency,
    recover_lsp,
    theta_check,
)
from xtal_acoustics.crystal.lattice import length_spectrum, spectrum_from_values
from xtal_acoustics.errors import InputError
from xtal_acoustics.models import SpectrumKind


def _asp(values, cutoff=10.0, multiplicities=None):
    return spectrum_from_values(values, cutoff, SpectrumKind.ACOUSTIC, multiplicities=multiplicities)


class TestThetaCheck:
    """Test cases for the Gaussian Poisson identity."""

    @pytest.mark.parametrize("t", [0.05, 0.1, 0.2, 0.5, 1.0])
    @pytest.mark.parametrize("lattice_name", ["z2", "hexagonal", "rect"])
    def test_identity_holds(self, request, lattice_name, t):
        lattice = request.getfixturevalue(lattice_name)
        report = theta_check(lattice, t, 1e-12)
        assert report.relative_error <= 1e-8
        prefactor = lattice.volume / (4 * pi * t)
        assert report.tail_bound <= 1e-12 * (1 + prefactor)

    def test_self_dual_fixed_point(self, z2):
        """At t = 1/(4π) both sides are Σ exp(−π|v|²) term by term."""
        t = 1 / (4 * pi)
        report = theta_check(z2, t)
        assert report.lhs == pytest.approx(report.rhs, rel=1e-14)
        assert report.truncation_radius_primal == pytest.approx(report.truncation_radius_dual)

    def test_hexagonal_volume(self, hexagonal):
        report = theta_check(hexagonal, 0.2)
        assert report.volume == pytest.approx(sqrt(3) / 2)
        assert report.relative_error <= 1e-10

    def test_nonpositive_t_rejected(self, z2):
        with pytest.raises(InputError):
            theta_check(z2, 0.0)
        with pytest.raises(InputError):
            theta_check(z2, 0.1, target_tail=0.0)

    def test_gaussian_sum_includes_origin(self, z2):
        """Σ over |v| <= 0.5 is just the zero vector."""
        assert gaussian_sum(z2, 1.0, 0.5) == 1.0


class TestRecovery:
    """Test cases for recovering lengths of L* from Asp."""

    def test_square_c1(self):
        recovered = recover_lsp(_asp([1.0, 2.0, 4.0, 5.0], multiplicities=[4, 4, 4, 8]), 1.0)
        np.testing.assert_allclose(recovered.values, [1, sqrt(2), 2, sqrt(5)])
        assert recovered.multiplicities.tolist() == [4, 4, 4, 8]
        assert recovered.kind == SpectrumKind.LATTICE_LENGTHS

    def test_square_c4(self):
        recovered = recover_lsp(_asp([1.0, 2.0, 4.0, 5.0]), 4.0)
        np.testing.assert_allclose(recovered.values, [0.5, sqrt(2) / 2, 1, sqrt(5) / 2])
        assert recovered.cutoff == pytest.approx(sqrt(10.0 / 4))

    def test_invalid_c(self):
        with pytest.raises(InputError):
            recover_lsp(_asp([1.0]), 0.0)

    @pytest.mark.parametrize("name", ["square", "honeycomb", "diamond"])
    def test_round_trip(self, request, name):
        """Asp then recovery reproduces the dual length spectrum, multiplicities included."""
        crystal = request.getfixturevalue(name)
        radius = 4.0
        dual = crystal.dual_period_lattice
        asp = acoustic_spectrum(crystal.force_model, dual, radius)
        recovered = recover_lsp(asp, crystal.realization.ortho_constant)
        direct = length_spectrum(dual, radius)
        assert recovered.multiplicities.tolist() == direct.multiplicities.tolist()
        np.testing.assert_allclose(recovered.values, direct.values, rtol=1e-9)

    def test_poisson_bridge(self, square):
        """Recovered L* lengths satisfy the Poisson identity with the period lattice."""
        asp = acoustic_spectrum(square.force_model, square.dual_period_lattice, 6.0)
        recovered = recover_lsp(asp, 1.0)
        report = poisson_consistency(recovered, square.period_lattice, 0.1)
        assert report.relative_error <= 1e-8

    def test_estimate_c(self, z2):
        asp = _asp([2.0, 4.0, 8.0])
        reference = length_spectrum(z2, 2.1)
        assert estimate_c(asp, reference) == pytest.approx(2.0)


class TestExample1:
    """Test cases for the window-divisor procedure."""

    def test_three_and_a_half(self):
        """a = 3.5: k in {2, 3} with divisors 1.75 and 7/6."""
        result = example1_candidates(_asp([3.5]))
        candidates = result.elements[0].candidates
        assert [c.k for c in candidates] == [2, 3]
        assert [c.divisor for c in candidates] == pytest.approx([1.75, 7 / 6])
        assert candidates[0].length == pytest.approx(sqrt(2))

    def test_one_has_no_candidate(self):
        result = example1_candidates(_asp([1.0]))
        assert result.elements[0].candidates == []
        assert not result.consistent

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            example1_candidates(_asp([]))

    def test_window_validated(self):
        with pytest.raises(InputError):
            example1_candidates(_asp([3.5]), 2.0, 1.0)

    def test_forward_then_invert(self):
        """True |χ|² appears among the candidates for each of the 20 smallest elements."""
        direction = np.array([1.0, sqrt(2), pi])
        pairs = example1_forward(direction, radius=3.0)[:20]
        values = [v for v, _ in pairs]
        result = example1_candidates(spectrum_from_values(values, 30.0, SpectrumKind.ACOUSTIC))
        by_value = {e.value: {c.k for c in e.candidates} for e in result.elements}
        for value, norm_sq in pairs:
            match = min(by_value, key=lambda v: abs(v - value))
            assert norm_sq in by_value[match]

    def test_default_direction(self):
        """Equal angles with the axes: (1,0,0) gives 1 + 1/3."""
        values = [v for v, k in example1_forward(radius=1.0) if k == 1]
        assert values == pytest.approx([4 / 3] * 6)


class TestExample2:
    """Test cases for the quadratic-form four-tuple problem."""

    def test_sums_of_two_squares(self):
        np.testing.assert_allclose(example2_forward(1, 1.0, 1.0, 0.0, 2), [0, 1, 2, 4, 5, 8])

    def test_swap_symmetry(self):
        np.testing.assert_array_equal(
            example2_forward(1, 2.0, 1.0, 0.5, 3), example2_forward(1, 1.0, 2.0, 0.5, 3)
        )

    def test_scaling_symmetry(self):
        np.testing.assert_array_equal(
            example2_forward(2, 1.0, 1.5, 0.25, 3), example2_forward(1, 2.0, 3.0, 0.5, 3)
        )

    def test_scaling_is_exact_for_decimal_parameters(self):
        """m is folded into the coefficients, so non-dyadic tuples agree bit for bit."""
        m, alpha, beta, gamma = 3, 0.1, 0.7, 0.3
        np.testing.assert_array_equal(
            example2_forward(m, alpha, beta, gamma, 3),
            example2_forward(1, m * alpha, m * beta, m * gamma, 3),
        )

    def test_bound_validated(self):
        with pytest.raises(InputError):
            example2_forward(1, 1.0, 1.0, 0.0, 0)

    def test_grid_axis(self):
        np.testing.assert_allclose(parse_grid_axis("0.1:0.5:0.1"), [0.1, 0.2, 0.3, 0.4, 0.5])
        np.testing.assert_array_equal(parse_grid_axis("2"), [2.0])
        with pytest.raises(InputError):
            parse_grid_axis("1:0:0.1")

    def test_search_finds_truth_and_swap(self):
        target = example2_forward(1, 1.0, 1.0, 0.0, 2)
        grid = Example2Grid.from_spec("1", "0.5:1.5:0.5", "0.5:1.5:0.5", "0:0.5:0.5")
        found = {(c.m, c.alpha, c.beta, c.gamma) for c in example2_search(target, 2, grid, 1e-9)}
        assert (1, 1.0, 1.0, 0.0) in found

    def test_search_swap_class(self):
        target = example2_forward(1, 2.0, 1.0, 0.5, 3)
        grid = Example2Grid.from_spec("1", "0:2:0.1", "0:2:0.1", "0:1:0.5")
        candidates = example2_search(target, 3, grid, 1e-9)
        found = {(c.m, c.alpha, c.beta, c.gamma) for c in candidates}
        assert found == {(1, 2.0, 1.0, 0.5), (1, 1.0, 2.0, 0.5)}
        assert all(c.positive_semidefinite for c in candidates)
        assert all(c.min_alpha_beta == 1.0 for c in candidates)

    def test_search_full_grid_with_m_axis(self):
        """21 x 21 x 21 x 3 tuples; scaling by m > 1 never reproduces the target."""
        target = example2_forward(1, 2.0, 1.0, 0.5, 3)
        grid = Example2Grid.from_spec("1:21:1", "0:2:0.1", "0:2:0.1", "0:1:0.5")
        assert grid.size == 21 * 21 * 21 * 3
        found = {(c.m, c.alpha, c.beta, c.gamma) for c in example2_search(target, 3, grid, 1e-9)}
        assert found == {(1, 2.0, 1.0, 0.5), (1, 1.0, 2.0, 0.5)}

    def test_fractional_m_axis_rejected(self):
        with pytest.raises(InputError):
            Example2Grid.from_spec("0.5:2:0.5", "1", "1", "0")

    def test_integer_m_axis(self):
        grid = Example2Grid.from_spec("1:3:1", "1", "1", "0")
        np.testing.assert_array_equal(grid.m, [1, 2, 3])
        assert grid.m.dtype == np.int64

    def test_off_grid_truth(self):
        """tol = 0 with the truth off the grid finds nothing."""
        target = example2_forward(1, 1.05, 1.0, 0.0, 2)
        grid = Example2Grid.from_spec("1", "0.5:1.5:0.5", "0.5:1.5:0.5", "0")
        assert example2_search(target, 2, grid, 0.0) == []

    def test_empty_grid(self):
        grid = Example2Grid(m=np.array([], dtype=np.int64), alpha=np.array([1.0]), beta=np.array([1.0]), gamma=np.array([0.0]))
        with pytest.raises(InputError):
            example2_search([0.0, 1.0], 2, grid)

    def test_form_reproduces_acoustic_spectrum(self):
        """Cosine sums turn Σ(v·(kχ + lη))² into |χ|²(αk² + βl² + 2γkl)."""
        vectors = np.array([[1.0, 0.0], [-0.5, sqrt(3) / 2], [-0.5, -sqrt(3) / 2]])
        chi, eta = np.array([1.0, 0.0]), np.array([0.5, sqrt(3) / 2])
        alpha, beta, gamma = example2_form(vectors, chi, eta)
        for k, l in [(1, 0), (1, 1), (2, -1), (0, 3)]:
            y = k * chi + l * eta
            direct = float(np.sum((vectors @ y) ** 2))
            assert direct == pytest.approx(alpha * k * k + beta * l * l + 2 * gamma * k * l)
