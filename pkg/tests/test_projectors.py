"""Tests for the closed-form subgroup projectors and their quadrature oracle."""

import numpy as np
import pytest

from isolab.exceptions import InvalidQuadratureError
from isolab.models import SubgroupClass, SubgroupDescriptor
from isolab.pauli import (
    bell_state,
    compose,
    decompose,
    density_matrix,
    pauli_form,
    pauli_operator,
    random_state,
    t_state,
)
from isolab.projectors import (
    conjugated_project,
    fixed_point_residual,
    non_normalizer_witness,
    normalizer_samples,
    project,
    project_arrays,
    projection_gap,
    random_descriptor,
    random_member,
    su2_twirl_matrix,
    twirl_numeric,
)
from isolab.su2 import (
    act,
    conjugate_descriptor,
    haar_quaternions,
    haar_sample,
    rotation_matrices,
    subgroup_quadrature,
)

ALL_CLASSES = list(SubgroupClass)


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(7)


def assert_forms_close(first, second, atol):
    np.testing.assert_allclose(first.a, second.a, atol=atol)
    np.testing.assert_allclose(first.b, second.b, atol=atol)
    np.testing.assert_allclose(first.T, second.T, atol=atol)


class TestClosedForm:
    """Tests for project() on specific inputs."""

    def test_su2_projection_of_bell_state(self):
        """Test that the SU2 average of phi+ is T = 1/3."""
        out = project(SubgroupDescriptor.su2(), decompose(bell_state("phi_plus")))
        np.testing.assert_allclose(out.T, np.eye(3) / 3, atol=1e-15)
        np.testing.assert_allclose(out.a, 0, atol=1e-15)

    def test_z2_is_identity(self, rng):
        """Test that the central subgroup fixes every state."""
        pf = decompose(random_state(rng))
        assert_forms_close(project(SubgroupDescriptor.z2(), pf), pf, atol=0)

    def test_u1_keeps_antisymmetric_plane_block(self):
        """Test that U1(z) keeps the rotation-invariant antisymmetric part."""
        T = np.zeros((3, 3))
        T[0, 1], T[1, 0] = 0.2, -0.2
        pf = pauli_form([0, 0, 0.1], [0.3, 0, 0], T)
        out = project(SubgroupDescriptor.u1([0, 0, 1]), pf)
        np.testing.assert_allclose(out.T, T, atol=1e-15)
        np.testing.assert_allclose(out.a, [0, 0, 0.1])
        np.testing.assert_allclose(out.b, 0, atol=1e-15)

    def test_kinf_ignores_pi_axis(self, rng):
        """Test that Kinf projections do not depend on the pi-axis."""
        pf = decompose(random_state(rng))
        first = project(SubgroupDescriptor.kinf([0, 0, 1], [1, 0, 0]), pf)
        second = project(SubgroupDescriptor.kinf([0, 0, 1], [0, 1, 0]), pf)
        assert_forms_close(first, second, atol=1e-15)

    def test_k2_keeps_frame_diagonal(self):
        """Test that K2 keeps only the frame-diagonal part of T and drops a and b."""
        T = np.array([[0.2, 0.1, 0.0], [0.1, -0.3, 0.05], [0.0, 0.05, 0.1]])
        out = project_arrays(SubgroupDescriptor.k2(), [0.1, 0, 0], [0, 0.2, 0], T)
        np.testing.assert_allclose(out[2], np.diag([0.2, -0.3, 0.1]))
        np.testing.assert_allclose(out[0], 0)

    def test_t_states_are_k2_fixed(self):
        """Test that diagonal T-states have zero K2 residual."""
        assert fixed_point_residual(SubgroupDescriptor.k2(), t_state((0.3, -0.2, 0.1))) == pytest.approx(0, abs=1e-15)
        assert projection_gap(SubgroupDescriptor.k2(), t_state((0.3, -0.2, 0.1))) == pytest.approx(0, abs=1e-15)


class TestProjectorLaws:
    """Tests for idempotence, covariance and agreement with quadrature."""

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_idempotent(self, subgroup_class, rng):
        """Test P_H P_H = P_H."""
        for _ in range(5):
            H = random_descriptor(subgroup_class, rng)
            once = project(H, decompose(random_state(rng)))
            assert_forms_close(project(H, once), once, atol=1e-14)

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_closed_form_matches_quadrature(self, subgroup_class, rng):
        """Test that the closed form equals the weighted node average."""
        H = random_descriptor(subgroup_class, rng)
        rule = subgroup_quadrature(H, n_circle=16)
        for _ in range(3):
            pf = decompose(random_state(rng))
            assert_forms_close(twirl_numeric(H, pf, rule), project(H, pf), atol=1e-12)

    def test_mismatched_rule_raises(self, rng):
        """Test that a rule built for another subgroup is rejected."""
        rule = subgroup_quadrature(SubgroupDescriptor.u1([0, 0, 1]), n_circle=8)
        with pytest.raises(InvalidQuadratureError):
            twirl_numeric(SubgroupDescriptor.u1([1, 0, 0]), decompose(random_state(rng)), rule)

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_conjugation_covariance(self, subgroup_class, rng):
        """Test U_g P_H U_g^-1 = P_{g H g^-1}."""
        H = random_descriptor(subgroup_class, rng)
        pf = decompose(random_state(rng))
        for g in haar_sample(rng, 3):
            expected = project(conjugate_descriptor(g, H), pf)
            assert_forms_close(conjugated_project(g, H, pf), expected, atol=1e-12)

    def test_su2_twirl_matrix_matches_projection(self, rng):
        """Test that alpha 1 + beta SWAP is the SU2 projection."""
        pf = decompose(random_state(rng))
        expected = compose(project(SubgroupDescriptor.su2(), pf)).entries
        np.testing.assert_allclose(su2_twirl_matrix(compose(pf).entries), expected, atol=1e-14)

    @pytest.mark.slow
    def test_haar_monte_carlo_approaches_su2_projection(self, rng):
        """Test that a Haar sample average converges to P_SU2."""
        pf = decompose(random_state(rng))
        samples = haar_sample(rng, 4000)
        T = np.mean([act(g, pf).T for g in samples], axis=0)
        np.testing.assert_allclose(T, project(SubgroupDescriptor.su2(), pf).T, atol=0.05)


class TestRandomMembers:
    """Tests for random_member() and random_descriptor()."""

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_member_is_fixed(self, subgroup_class, rng):
        """Test that a random member is fixed by its descriptor."""
        pf, H = random_member(subgroup_class, rng)
        assert H.subgroup_class is subgroup_class
        assert fixed_point_residual(H, pf) == pytest.approx(0, abs=1e-13)


class TestNormalizer:
    """Tests for normalizer_samples() and non_normalizer_witness()."""

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_normalizer_commutes_with_projector(self, subgroup_class, rng):
        """Test U_g P_H U_g^-1 = P_H for normalizer elements."""
        H = random_descriptor(subgroup_class, rng)
        pf = decompose(random_state(rng))
        expected = project(H, pf)
        for g in normalizer_samples(H, rng, 10):
            assert_forms_close(conjugated_project(g, H, pf), expected, atol=1e-12)

    @pytest.mark.parametrize("subgroup_class", [SubgroupClass.Z2, SubgroupClass.SU2])
    def test_normal_subgroups_have_no_witness(self, subgroup_class):
        """Test that Z2 and SU2 return no witness."""
        assert non_normalizer_witness(random_descriptor(subgroup_class, np.random.default_rng(0))) is None

    @pytest.mark.parametrize("subgroup_class", [
        SubgroupClass.Z4, SubgroupClass.K2, SubgroupClass.U1, SubgroupClass.KINF,
    ])
    def test_witness_breaks_commutation(self, subgroup_class, rng):
        """Test that the witness element moves the projection of the witness state."""
        H = random_descriptor(subgroup_class, rng)
        g, pf = non_normalizer_witness(H)
        moved = conjugated_project(g, H, pf)
        assert np.max(np.abs(moved.T - project(H, pf).T)) > 1e-3


class TestProjectorPositivity:
    """Tests that P_H is a self-adjoint, trace-preserving, positive map."""

    @staticmethod
    def hilbert_schmidt(first, second):
        return np.real(np.trace(pauli_operator(*first) @ pauli_operator(*second)))

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_self_adjoint(self, subgroup_class, rng):
        """Test tr[P_H(X) Y] = tr[X P_H(Y)] for Hermitian X, Y outside the state set."""
        H = random_descriptor(subgroup_class, rng)
        for _ in range(50):
            X = (rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal((3, 3)))
            Y = (rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal((3, 3)))
            left = self.hilbert_schmidt(project_arrays(H, *X), Y)
            right = self.hilbert_schmidt(X, project_arrays(H, *Y))
            assert left == pytest.approx(right, abs=1e-12)

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_projected_states_are_states(self, subgroup_class, rng):
        """Test that projections of random states stay positive with unit trace."""
        for _ in range(200):
            H = random_descriptor(subgroup_class, rng)
            out = project(H, decompose(random_state(rng)))
            m = pauli_operator(out.a, out.b, out.T)
            assert np.real(np.trace(m)) == pytest.approx(1.0, abs=1e-12)
            assert np.linalg.eigvalsh(m)[0] >= -1e-12
            compose(out)

    @pytest.mark.parametrize("subgroup_class", ALL_CLASSES)
    def test_projected_pure_states_are_states(self, subgroup_class, rng):
        """Test positivity on rank-one inputs, where the margin is smallest."""
        for _ in range(50):
            v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            v /= np.linalg.norm(v)
            pf = decompose(density_matrix(np.outer(v, v.conj())))
            out = project(random_descriptor(subgroup_class, rng), pf)
            assert np.linalg.eigvalsh(pauli_operator(out.a, out.b, out.T))[0] >= -1e-12


@pytest.mark.slow
class TestHaarMonteCarlo:
    """Tests comparing the closed-form SU2 projection to a large Haar average."""

    def test_million_sample_twirl(self, rng):
        """Test that 10^6 Haar samples reproduce P_SU2 within 5e-3."""
        pf = decompose(random_state(rng))
        expected = project(SubgroupDescriptor.su2(), pf)
        a = np.zeros(3)
        b = np.zeros(3)
        T = np.zeros((3, 3))
        n_total = 10 ** 6
        for _ in range(10):
            Rs = rotation_matrices(haar_quaternions(rng, n_total // 10))
            a += np.einsum('nij,j->i', Rs, pf.a)
            b += np.einsum('nij,j->i', Rs, pf.b)
            T += np.einsum('nij,jk,nlk->il', Rs, pf.T, Rs)
        np.testing.assert_allclose(a / n_total, expected.a, atol=5e-3)
        np.testing.assert_allclose(b / n_total, expected.b, atol=5e-3)
        np.testing.assert_allclose(T / n_total, expected.T, atol=5e-3)
