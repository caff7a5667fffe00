"""Tests for qubit channels, channel isotropy and the simulation gate."""

import numpy as np
import pytest

from isolab.channels import (
    KINF_CHANNEL_NOTE,
    amplitude_damping,
    apply_symmetric_channel,
    apply_symmetric_channel_pauli,
    channel_isotropy,
    compose_channels,
    conjugate_channel,
    covariance_residual,
    dephasing,
    depolarizing,
    identity_channel,
    measurement,
    mix_channels,
    noisy_channel,
    ptm,
    ptm_from_kraus,
    random_symmetric_channel,
    rotation,
    simulation_gate,
    state_isotropy,
    state_preparation,
    state_preparation_kraus,
    symmetric_channel,
)
from isolab.exceptions import InvalidChannelError, NotTracePreservingError
from isolab.isotropy import classify
from isolab.lattice import in_hat_C
from isolab.models import GateVerdict, GroupElement, SubgroupClass, SubgroupDescriptor
from isolab.pauli import IDENTITY2, decompose, product_state, random_state, werner_state
from isolab.su2 import rotate_about, rotation_of

X_AXIS = np.array([1.0, 0.0, 0.0])
Z_AXIS = np.array([0.0, 0.0, 1.0])


@pytest.fixture
def rng():
    """Seeded generator."""
    return np.random.default_rng(11)


class TestConstruction:
    """Tests for channel factories and validation."""

    def test_identity_choi_spectrum(self):
        """Test that the identity channel has Choi eigenvalues (0, 0, 0, 2)."""
        ch = identity_channel()
        np.testing.assert_allclose(ch.lambda_, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(np.linalg.eigvalsh(ch.choi()), [0, 0, 0, 2], atol=1e-12)

    def test_dephasing_ptm(self):
        """Test that z-dephasing shrinks x and y by p."""
        ch = dephasing(0.5)
        np.testing.assert_allclose(ch.lambda_, np.diag([0.5, 0.5, 1.0]), atol=1e-15)
        np.testing.assert_allclose(ch.t, 0, atol=1e-15)

    def test_depolarizing_ptm(self):
        """Test lambda = p 1 for depolarizing noise."""
        np.testing.assert_allclose(depolarizing(0.3).lambda_, 0.3 * np.eye(3), atol=1e-15)

    def test_rotation_ptm_is_adjoint_rotation(self):
        """Test that the unitary channel acts on Bloch vectors by its adjoint rotation."""
        ch = rotation(0.6, Z_AXIS)
        expected = rotation_of(GroupElement.from_axis_angle(Z_AXIS, 0.6))
        np.testing.assert_allclose(ch.lambda_, expected, atol=1e-15)

    def test_amplitude_damping_fixed_point(self):
        """Test that amplitude damping shifts towards its axis."""
        ch = amplitude_damping(0.5, X_AXIS)
        np.testing.assert_allclose(ch.t, 0.5 * X_AXIS, atol=1e-12)
        np.testing.assert_allclose(ch.apply(X_AXIS), X_AXIS, atol=1e-12)

    def test_measurement_ptm(self):
        """Test that measuring along z keeps only the z component."""
        np.testing.assert_allclose(measurement(Z_AXIS).lambda_, np.diag([0.0, 0.0, 1.0]), atol=1e-15)

    def test_state_preparation_kraus_matches_ptm(self):
        """Test that the Kraus form of the preparation channel has the same PTM."""
        bloch = [0.1, -0.2, 0.5]
        from_kraus = ptm_from_kraus(state_preparation_kraus(bloch))
        np.testing.assert_allclose(from_kraus.lambda_, 0, atol=1e-12)
        np.testing.assert_allclose(from_kraus.t, state_preparation(bloch).t, atol=1e-12)

    def test_not_trace_preserving_raises(self):
        """Test that sum K^dagger K != 1 is rejected."""
        with pytest.raises(NotTracePreservingError):
            ptm_from_kraus([2 * IDENTITY2])

    def test_non_cp_ptm_raises(self):
        """Test that a PTM with negative Choi spectrum is rejected."""
        with pytest.raises(InvalidChannelError):
            ptm(2 * np.eye(3), np.zeros(3))

    @pytest.mark.parametrize("factory,arg", [
        (depolarizing, 1.5),
        (dephasing, -1.5),
        (amplitude_damping, 1.2),
    ])
    def test_parameter_ranges(self, factory, arg):
        """Test that out-of-range parameters raise InvalidChannelError."""
        with pytest.raises(InvalidChannelError):
            factory(arg)

    def test_zero_axis_raises(self):
        """Test that a zero axis is rejected."""
        with pytest.raises(InvalidChannelError):
            rotation(0.2, [0, 0, 0])


class TestAlgebra:
    """Tests for composition, mixing, conjugation and noise."""

    def test_composed_rotations_add_angles(self):
        """Test that rotations about one axis compose additively."""
        composed = compose_channels(rotation(0.3), rotation(0.4))
        np.testing.assert_allclose(composed.lambda_, rotation(0.7).lambda_, atol=1e-14)

    def test_composition_applies_right_first(self):
        """Test that compose_channels(e, f) applies f first."""
        e = state_preparation([0, 0, 0.5])
        f = rotation(0.3, X_AXIS)
        np.testing.assert_allclose(compose_channels(e, f).t, [0, 0, 0.5])

    def test_mixing(self):
        """Test p e + (1 - p) f on (lambda, t)."""
        mixed = mix_channels(0.25, identity_channel(), state_preparation([0, 0, 1]))
        np.testing.assert_allclose(mixed.lambda_, 0.25 * np.eye(3), atol=1e-15)
        np.testing.assert_allclose(mixed.t, [0, 0, 0.75])

    def test_mixing_weight_range(self):
        """Test that p outside [0, 1] raises."""
        with pytest.raises(InvalidChannelError):
            mix_channels(1.5, identity_channel(), identity_channel())

    def test_noisy_channel(self):
        """Test that noise shrinks both parts."""
        ch = noisy_channel(amplitude_damping(0.4), 0.2)
        np.testing.assert_allclose(ch.t, 0.8 * amplitude_damping(0.4).t)

    def test_conjugated_channel_has_conjugated_isotropy(self):
        """Test that conjugating amplitude damping moves its axis."""
        g = rotate_about([0.0, 1.0, 0.0], np.pi / 2)
        report = channel_isotropy(conjugate_channel(g, amplitude_damping(0.3)))
        assert report.subgroup_class is SubgroupClass.U1
        assert abs(np.dot(report.descriptor.axis_vector, X_AXIS)) == pytest.approx(1.0)


class TestChannelIsotropy:
    """Tests for channel_isotropy() and state_isotropy()."""

    def test_depolarizing_is_su2(self):
        """Test that depolarizing noise commutes with every rotation."""
        assert channel_isotropy(depolarizing(0.5)).subgroup_class is SubgroupClass.SU2

    def test_rotation_is_u1(self):
        """Test that a z-rotation is only symmetric about z."""
        report = channel_isotropy(rotation(0.6, Z_AXIS))
        assert report.subgroup_class is SubgroupClass.U1
        assert abs(np.dot(report.descriptor.axis_vector, Z_AXIS)) == pytest.approx(1.0)

    def test_state_preparation_is_u1(self):
        """Test that preparing a z-polarised state has U1(z) isotropy."""
        assert channel_isotropy(state_preparation([0, 0, 0.5])).subgroup_class is SubgroupClass.U1
        assert state_isotropy([0, 0, 0.5]).subgroup_class is SubgroupClass.U1

    def test_maximally_mixed_preparation_is_su2(self):
        """Test that preparing 1/2 is fully symmetric."""
        assert state_isotropy([0, 0, 0]).subgroup_class is SubgroupClass.SU2

    def test_amplitude_damping_is_u1(self):
        """Test that the shift breaks the pi-rotations of the unital part."""
        assert channel_isotropy(amplitude_damping(0.5)).subgroup_class is SubgroupClass.U1

    @pytest.mark.parametrize("ch", [dephasing(0.5), measurement(Z_AXIS)])
    def test_dephasing_and_measurement_are_kinf(self, ch):
        """Test that the computed stabiliser includes pi-rotations orthogonal to z."""
        report = channel_isotropy(ch)
        assert report.subgroup_class is SubgroupClass.KINF
        assert abs(np.dot(report.descriptor.axis_vector, Z_AXIS)) == pytest.approx(1.0)
        assert KINF_CHANNEL_NOTE in report.notes


class TestSimulationGate:
    """Tests for simulation_gate()."""

    def test_werner_cannot_simulate_dephasing(self):
        """Test that an SU2-symmetric resource is ruled out for a Kinf channel."""
        verdict = simulation_gate(classify(werner_state(-0.5)), channel_isotropy(dephasing(0.5)))
        assert verdict is GateVerdict.RULED_OUT

    def test_aligned_product_state_allows_rotation(self):
        """Test that |00> passes the gate for a z-rotation."""
        verdict = simulation_gate(classify(product_state(Z_AXIS, Z_AXIS)), channel_isotropy(rotation(0.6)))
        assert verdict is GateVerdict.ALLOWED

    def test_misaligned_product_state_is_ruled_out(self):
        """Test that |00> does not pass for an x-rotation."""
        verdict = simulation_gate(classify(product_state(Z_AXIS, Z_AXIS)), channel_isotropy(rotation(0.6, X_AXIS)))
        assert verdict is GateVerdict.RULED_OUT

    def test_trivial_resource_passes_everything(self, rng):
        """Test that a resource with trivial isotropy is never ruled out."""
        sigma = classify(random_state(rng))
        assert simulation_gate(sigma, channel_isotropy(rotation(0.6))) is GateVerdict.ALLOWED


class TestSymmetricChannels:
    """Tests for the collective-SU(2)-covariant channel mixtures."""

    def test_invalid_weights_raise(self):
        """Test that weights must be a probability vector."""
        with pytest.raises(InvalidChannelError):
            symmetric_channel([0.5, 0.5, 0.5, 0.0, 0.0])

        with pytest.raises(InvalidChannelError):
            symmetric_channel([1.2, -0.2, 0.0, 0.0, 0.0])

    def test_identity_component(self, rng):
        """Test that unit weight on the identity leaves the input unchanged."""
        rho = random_state(rng).entries
        out = apply_symmetric_channel(symmetric_channel([1, 0, 0, 0, 0]), rho)
        np.testing.assert_allclose(out, rho, atol=1e-15)

    def test_twirl_component_outputs_werner_state(self, rng):
        """Test that the twirl component maps every state to an SU2-invariant one."""
        pf = decompose(random_state(rng))
        out = apply_symmetric_channel_pauli(symmetric_channel([0, 0, 0, 1, 0]), pf)
        assert classify(out).subgroup_class is SubgroupClass.SU2

    def test_trace_preserved(self, rng):
        """Test that random symmetric channels keep unit trace."""
        ch = random_symmetric_channel(rng)
        out = apply_symmetric_channel(ch, random_state(rng).entries)
        assert np.trace(out).real == pytest.approx(1.0)

    def test_random_channels_are_covariant(self, rng):
        """Test that generated channels commute with collective rotations."""
        for _ in range(3):
            ch = random_symmetric_channel(rng)
            assert covariance_residual(ch, rng) < 1e-10

    def test_symmetric_channel_keeps_input_symmetry(self, rng):
        """Test that the image of |00> is still fixed by U1(z)."""
        ch = random_symmetric_channel(rng)
        out = apply_symmetric_channel_pauli(ch, product_state(Z_AXIS, Z_AXIS))
        assert in_hat_C(out, SubgroupDescriptor.u1(Z_AXIS))
