"""Tests for Pauli decomposition, named states and state metrics."""

import numpy as np
import pytest

from isolab.exceptions import InvalidStateError, NotAStateError
from isolab.pauli import (
    BELL_NAMES,
    BELL_VERTICES,
    bell_state,
    bell_weights,
    canonical_form,
    compose,
    decompose,
    density_matrix,
    diagonal_line_state,
    edge_midpoint_state,
    in_tetrahedron,
    pauli_form,
    product_state,
    random_state,
    relative_entropy,
    t_state,
    trace_distance,
    werner_state,
)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(1234)


class TestValidation:
    """Tests for validated constructors."""

    def test_density_matrix_wraps_validation_error(self):
        """Test that invalid matrices raise InvalidStateError."""
        with pytest.raises(InvalidStateError):
            density_matrix(np.eye(4))

    def test_pauli_form_wraps_validation_error(self):
        """Test that invalid triples raise InvalidStateError."""
        with pytest.raises(InvalidStateError):
            pauli_form([2, 0, 0], [0, 0, 0], np.zeros((3, 3)))

    def test_compose_rejects_non_state(self):
        """Test that compose() raises NotAStateError outside the tetrahedron."""
        with pytest.raises(NotAStateError) as exc_info:
            compose(t_state((1.0, 1.0, 1.0)))
        assert exc_info.value.min_eigenvalue == pytest.approx(-0.5)


class TestDecomposition:
    """Tests for decompose() and compose()."""

    def test_decompose_then_compose_recovers_random_states(self, rng):
        """Test that the Pauli form determines the state."""
        for _ in range(20):
            rho = random_state(rng)
            np.testing.assert_allclose(compose(decompose(rho)).entries, rho.entries, atol=1e-14)

    def test_maximally_mixed_has_zero_form(self):
        """Test that 1/4 has a = b = 0 and T = 0."""
        pf = decompose(density_matrix(np.eye(4) / 4))
        np.testing.assert_allclose(pf.a, 0, atol=1e-15)
        np.testing.assert_allclose(pf.T, 0, atol=1e-15)

    @pytest.mark.parametrize("name,vertex", list(zip(BELL_NAMES, BELL_VERTICES)))
    def test_bell_states_sit_on_vertices(self, name, vertex):
        """Test that each Bell state has a = b = 0 and T = diag(vertex)."""
        pf = decompose(bell_state(name))
        np.testing.assert_allclose(pf.a, 0, atol=1e-15)
        np.testing.assert_allclose(pf.b, 0, atol=1e-15)
        np.testing.assert_allclose(pf.T, np.diag(vertex), atol=1e-15)

    def test_unknown_bell_state_raises(self):
        """Test that an unknown Bell label is rejected."""
        with pytest.raises(ValueError):
            bell_state("omega")

    def test_product_state_correlations(self):
        """Test that a product state has T = a b^T."""
        pf = product_state([0, 0, 1], [1, 0, 0])
        np.testing.assert_array_equal(pf.T, np.outer([0, 0, 1], [1, 0, 0]))
        compose(pf)


class TestCanonicalForm:
    """Tests for canonical_form()."""

    def test_diagonal_input_keeps_axes_sorted_by_magnitude(self):
        """Test that diagonal T gets a permutation frame ordered by |tau|."""
        cf = canonical_form(t_state((0.1, -0.6, 0.3)))
        np.testing.assert_allclose(np.abs(cf.taus), [0.6, 0.3, 0.1])
        np.testing.assert_allclose(cf.correlation_matrix(), np.diag([0.1, -0.6, 0.3]), atol=1e-15)

    def test_random_state_reconstructs_with_proper_frames(self, rng):
        """Test T = C diag(tau) D^T with det C = det D = 1."""
        for _ in range(20):
            pf = decompose(random_state(rng))
            cf = canonical_form(pf)
            np.testing.assert_allclose(cf.correlation_matrix(), pf.T, atol=1e-12)
            assert np.linalg.det(cf.c_basis) == pytest.approx(1.0)
            assert np.linalg.det(cf.d_basis) == pytest.approx(1.0)
            np.testing.assert_allclose(cf.c_basis @ cf.a, pf.a, atol=1e-12)

    def test_singlet_keeps_negative_determinant(self):
        """Test that det T = -1 survives in the signed taus of the singlet."""
        cf = canonical_form(decompose(bell_state("psi_minus")))
        np.testing.assert_allclose(np.abs(cf.taus), [1, 1, 1], atol=1e-12)
        assert np.prod(cf.taus) == pytest.approx(-1.0)


class TestMetrics:
    """Tests for trace_distance() and relative_entropy()."""

    def test_trace_distance_between_orthogonal_bell_states(self):
        """Test that orthogonal pure states are at distance 1."""
        assert trace_distance(bell_state("phi_plus"), bell_state("psi_minus")) == pytest.approx(1.0)

    def test_trace_distance_accepts_mixed_representations(self):
        """Test that density matrices and Pauli forms can be compared."""
        rho = bell_state("phi_plus")
        assert trace_distance(rho, decompose(rho)) == pytest.approx(0.0, abs=1e-14)

    def test_t_state_distance_closed_form(self):
        """Test the Bell-basis closed form (1/8) sum_k |v_k . delta tau|."""
        first = (-0.9, -0.85, -0.95)
        second = (-0.9, -0.9, -0.9)
        delta = np.subtract(first, second)
        expected = np.sum(np.abs(BELL_VERTICES @ delta)) / 8
        assert expected == pytest.approx(0.025)
        assert trace_distance(t_state(first), t_state(second)) == pytest.approx(expected, abs=1e-12)

    def test_trace_distance_is_symmetric(self, rng):
        """Test D(rho, sigma) = D(sigma, rho), also across representations."""
        for _ in range(50):
            rho, sigma = random_state(rng), random_state(rng)
            forward = trace_distance(rho, sigma)
            assert trace_distance(sigma, rho) == pytest.approx(forward, abs=1e-14)
            assert trace_distance(decompose(sigma), rho) == pytest.approx(forward, abs=1e-12)

    def test_trace_distance_triangle_inequality(self, rng):
        """Test D(rho, tau) <= D(rho, sigma) + D(sigma, tau)."""
        for _ in range(200):
            rho, sigma, tau = random_state(rng), random_state(rng), random_state(rng)
            assert trace_distance(rho, tau) <= trace_distance(rho, sigma) + trace_distance(sigma, tau) + 1e-12

    def test_trace_distance_vanishes_only_on_equal_states(self, rng):
        """Test that D is zero on equal inputs and positive, at most 1, otherwise."""
        for _ in range(50):
            rho, sigma = random_state(rng), random_state(rng)
            assert trace_distance(rho, rho) == 0.0
            assert trace_distance(decompose(rho), decompose(rho)) == 0.0
            assert 0.0 < trace_distance(rho, sigma) <= 1.0

    def test_trace_distance_sees_small_perturbations(self, rng):
        """Test that a state shifted by 1e-6 along a Pauli direction is at positive distance."""
        pf = decompose(random_state(rng))
        shifted = pauli_form(pf.a + np.array([0.0, 0.0, 1e-6]), pf.b, pf.T)
        assert trace_distance(pf, shifted) > 0.0

    def test_relative_entropy_of_state_with_itself_is_zero(self, rng):
        """Test S(rho || rho) = 0."""
        rho = random_state(rng)
        assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)

    def test_relative_entropy_to_maximally_mixed(self):
        """Test S(pure || 1/4) = log 4."""
        rho = bell_state("phi_plus")
        mixed = density_matrix(np.eye(4) / 4)
        assert relative_entropy(rho, mixed) == pytest.approx(np.log(4))

    def test_relative_entropy_infinite_outside_support(self):
        """Test that supp(rho) outside supp(sigma) gives infinity."""
        assert relative_entropy(bell_state("phi_plus"), bell_state("psi_minus")) == float('inf')


class TestNamedStates:
    """Tests for the named state families."""

    def test_werner_state_is_isotropic_t_state(self):
        """Test that werner_state(tau) has T = tau 1."""
        np.testing.assert_array_equal(werner_state(-0.5).T, -0.5 * np.eye(3))

    def test_edge_midpoint_state(self):
        """Test that edge midpoint i has a single unit correlation."""
        pf = edge_midpoint_state(1)
        np.testing.assert_array_equal(pf.T, np.diag([0.0, 1.0, 0.0]))
        compose(pf)

    @pytest.mark.parametrize("i,expected", [
        (0, (0.4, 0.3, 0.3)),
        (1, (0.3, 0.4, 0.3)),
        (2, (0.3, 0.3, 0.4)),
    ])
    def test_diagonal_line_states(self, i, expected):
        """Test the diagonal families at p = 0.3."""
        np.testing.assert_allclose(np.diag(diagonal_line_state(i, 0.3).T), expected)

    def test_diagonal_line_rejects_bad_arguments(self):
        """Test that index and p are range-checked."""
        with pytest.raises(ValueError):
            diagonal_line_state(3, 0.5)

        with pytest.raises(ValueError):
            diagonal_line_state(0, 1.5)

    def test_bell_weights_of_vertices(self):
        """Test that each vertex has unit weight on its own Bell state."""
        for k, vertex in enumerate(BELL_VERTICES):
            expected = np.zeros(4)
            expected[k] = 1.0
            np.testing.assert_allclose(bell_weights(vertex), expected)

    def test_in_tetrahedron(self):
        """Test membership of the T-state tetrahedron."""
        assert in_tetrahedron((0.0, 0.0, 0.0))
        assert in_tetrahedron((-1.0, -1.0, -1.0))
        assert not in_tetrahedron((1.0, 1.0, 1.0))
