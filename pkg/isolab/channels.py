"""Qubit channels in Pauli transfer form, channel isotropy, and the simulation gate."""

import logging
from typing import Any, List, Sequence

import numpy as np
from pydantic import ValidationError

from isolab.exceptions import IsolabError, InvalidChannelError, NotTracePreservingError
from isolab.isotropy import DEFAULT_TOL, DEFAULT_TOL_ABS, classify_arrays
from isolab.lattice import leq
from isolab.models import (
    GateVerdict,
    GroupElement,
    IsotropyReport,
    PauliForm,
    QubitChannelPTM,
    SubgroupClass,
    SymmetricChannel,
)
from isolab.pauli import IDENTITY2, PAULIS, SWAP, decompose, density_matrix, pauli_operator
from isolab.projectors import su2_twirl_matrix
from isolab.su2 import haar_sample, rotate_about, rotation_of, unitary_of

logger = logging.getLogger(__name__)

TP_TOL = 1e-10
COVARIANCE_TOL = 1e-10
COVARIANCE_SAMPLES = 10

KINF_CHANNEL_NOTE = (
    "pi-rotations about every axis orthogonal to the main axis also fix this channel, "
    "so the stabiliser is Kinf rather than U1"
)

_Z = np.array([0.0, 0.0, 1.0])


def _unit(axis: Any) -> np.ndarray:
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if norm == 0:
        raise InvalidChannelError("axis must be nonzero")
    return n / norm


def _pauli_along(axis: Any) -> np.ndarray:
    return np.einsum('k,kab->ab', _unit(axis), PAULIS)


def ptm(lambda_: Any, t: Any) -> QubitChannelPTM:
    """Validated (lambda, t) pair."""
    try:
        return QubitChannelPTM(lambda_=lambda_, t=t)
    except ValidationError as e:
        raise InvalidChannelError(f"Invalid channel: {e.errors()[0]['msg']}") from e


def apply_kraus(kraus: Sequence[np.ndarray], X: np.ndarray) -> np.ndarray:
    return sum(K @ X @ K.conj().T for K in kraus)


def ptm_from_kraus(kraus: Sequence[Any]) -> QubitChannelPTM:
    """Pauli transfer form of a Kraus representation.

    Raises:
        NotTracePreservingError: If sum K^dagger K differs from 1 by more than 1e-10
    """
    ops = [np.asarray(K, dtype=complex) for K in kraus]
    if not ops or any(K.shape != (2, 2) for K in ops):
        raise InvalidChannelError("Kraus operators must be a nonempty list of 2x2 matrices")
    completeness = sum(K.conj().T @ K for K in ops)
    deviation = float(np.max(np.abs(completeness - IDENTITY2)))
    if deviation > TP_TOL:
        raise NotTracePreservingError(f"sum K^dagger K deviates from identity by {deviation:.3e}")

    lambda_ = np.array(
        [[0.5 * np.real(np.trace(PAULIS[i] @ apply_kraus(ops, PAULIS[j]))) for j in range(3)] for i in range(3)]
    )
    t = np.array([0.5 * np.real(np.trace(PAULIS[i] @ apply_kraus(ops, IDENTITY2))) for i in range(3)])
    return ptm(lambda_, t)


def identity_channel() -> QubitChannelPTM:
    return ptm_from_kraus([IDENTITY2])


def depolarizing(p: float) -> QubitChannelPTM:
    """rho -> p rho + (1 - p) 1/2."""
    if not -1 / 3 <= p <= 1:
        raise InvalidChannelError(f"depolarizing parameter must lie in [-1/3, 1], got {p}")
    kraus = [np.sqrt((1 + 3 * p) / 4) * IDENTITY2] + [np.sqrt((1 - p) / 4) * s for s in PAULIS]
    return ptm_from_kraus(kraus)


def dephasing(p: float, axis: Any = _Z) -> QubitChannelPTM:
    """Shrinks the Bloch components orthogonal to `axis` by p."""
    if not -1 <= p <= 1:
        raise InvalidChannelError(f"dephasing parameter must lie in [-1, 1], got {p}")
    return ptm_from_kraus([np.sqrt((1 + p) / 2) * IDENTITY2, np.sqrt((1 - p) / 2) * _pauli_along(axis)])


def rotation(theta: float, axis: Any = _Z) -> QubitChannelPTM:
    """Unitary channel of exp(i theta n.s)."""
    return ptm_from_kraus([unitary_of(GroupElement.from_axis_angle(_unit(axis), theta))])


def _aligning_element(axis: np.ndarray) -> GroupElement:
    """Element whose rotation takes z onto axis."""
    cross = np.cross(_Z, axis)
    if np.linalg.norm(cross) < 1e-12:
        return GroupElement.identity() if axis[2] > 0 else rotate_about([1.0, 0.0, 0.0], np.pi)
    angle = float(np.arccos(np.clip(np.dot(_Z, axis), -1.0, 1.0)))
    return rotate_about(cross, angle)


def amplitude_damping(gamma: float, axis: Any = _Z) -> QubitChannelPTM:
    """Decay towards the pure state with Bloch vector `axis`."""
    if not 0 <= gamma <= 1:
        raise InvalidChannelError(f"damping must lie in [0, 1], got {gamma}")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    U = unitary_of(_aligning_element(_unit(axis)))
    return ptm_from_kraus([U @ k0 @ U.conj().T, U @ k1 @ U.conj().T])


def measurement(axis: Any = _Z) -> QubitChannelPTM:
    """Non-selective projective measurement along `axis`."""
    n_sigma = _pauli_along(axis)
    return ptm_from_kraus([(IDENTITY2 + n_sigma) / 2, (IDENTITY2 - n_sigma) / 2])


def state_preparation(bloch: Any) -> QubitChannelPTM:
    """Replace any input with the state of Bloch vector `bloch`."""
    return ptm(np.zeros((3, 3)), np.asarray(bloch, dtype=float))


def state_preparation_kraus(bloch: Any) -> List[np.ndarray]:
    """Kraus operators sqrt(lambda_j) |e_j><k| of the preparation channel."""
    rho = (IDENTITY2 + np.einsum('k,kab->ab', np.asarray(bloch, dtype=float), PAULIS)) / 2
    vals, vecs = np.linalg.eigh(rho)
    kraus = []
    for val, vec in zip(vals, vecs.T):
        if val <= 0:
            continue
        for k in range(2):
            basis = np.zeros(2)
            basis[k] = 1.0
            kraus.append(np.sqrt(val) * np.outer(vec, basis))
    return kraus


def compose_channels(e: QubitChannelPTM, f: QubitChannelPTM) -> QubitChannelPTM:
    """e o f, applying f first."""
    return ptm(e.lambda_ @ f.lambda_, e.lambda_ @ f.t + e.t)


def mix_channels(p: float, e: QubitChannelPTM, f: QubitChannelPTM) -> QubitChannelPTM:
    """p e + (1 - p) f."""
    if not 0 <= p <= 1:
        raise InvalidChannelError(f"mixing weight must lie in [0, 1], got {p}")
    return ptm(p * e.lambda_ + (1 - p) * f.lambda_, p * e.t + (1 - p) * f.t)


def conjugate_channel(g: GroupElement, ch: QubitChannelPTM) -> QubitChannelPTM:
    """U_g o E o U_{g^-1}: (lambda, t) -> (R lambda R^T, R t)."""
    R = rotation_of(g)
    return ptm(R @ ch.lambda_ @ R.T, R @ ch.t)


def noisy_channel(ch: QubitChannelPTM, eps: float) -> QubitChannelPTM:
    """(1 - eps) E + eps D with D the completely depolarising channel."""
    if not 0 <= eps <= 1:
        raise InvalidChannelError(f"eps must lie in [0, 1], got {eps}")
    return ptm((1 - eps) * ch.lambda_, (1 - eps) * ch.t)


def channel_isotropy(
    ch: QubitChannelPTM, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS
) -> IsotropyReport:
    """Iso(E) from the stabiliser equations R t = t, R lambda R^T = lambda."""
    report = classify_arrays(ch.t, np.zeros(3), ch.lambda_, tol, tol_abs)
    if report.subgroup_class is SubgroupClass.KINF:
        logger.info("Channel isotropy is Kinf about %s", report.descriptor.axis)
        report = report.model_copy(update={'notes': report.notes + [KINF_CHANNEL_NOTE]})
    return report


def state_isotropy(bloch: Any, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS) -> IsotropyReport:
    """Isotropy of a single-qubit state, via its preparation channel."""
    return channel_isotropy(state_preparation(bloch), tol, tol_abs)


def simulation_gate(sigma_report: IsotropyReport, channel_report: IsotropyReport) -> GateVerdict:
    """Necessary condition Iso(sigma) <= Iso(E); Allowed does not imply simulability."""
    if leq(sigma_report.descriptor, channel_report.descriptor):
        return GateVerdict.ALLOWED
    return GateVerdict.RULED_OUT


def symmetric_channel(weights: Sequence[float], theta: float = 0.0, replacement: float = 0.0) -> SymmetricChannel:
    try:
        return SymmetricChannel(weights=tuple(float(w) for w in weights), theta=theta, replacement=replacement)
    except ValidationError as e:
        raise InvalidChannelError(f"Invalid symmetric channel: {e.errors()[0]['msg']}") from e


def apply_symmetric_channel(ch: SymmetricChannel, rho: np.ndarray) -> np.ndarray:
    """Apply the mixture to a 4x4 operator."""
    rho = np.asarray(rho, dtype=complex)
    twirled = su2_twirl_matrix(rho)
    V = np.cos(ch.theta) * np.eye(4) + 1j * np.sin(ch.theta) * SWAP
    components = [
        rho,
        SWAP @ rho @ SWAP,
        V @ rho @ V.conj().T,
        twirled,
        (1 - ch.replacement) * rho + ch.replacement * twirled,
    ]
    out = sum(w * c for w, c in zip(ch.weights, components))
    return (out + out.conj().T) / 2


def apply_symmetric_channel_pauli(ch: SymmetricChannel, pf: PauliForm) -> PauliForm:
    return decompose(density_matrix(apply_symmetric_channel(ch, pauli_operator(pf.a, pf.b, pf.T))))


def covariance_residual(ch: SymmetricChannel, rng: np.random.Generator, n: int = COVARIANCE_SAMPLES) -> float:
    """max ||E(U rho U^dagger) - U E(rho) U^dagger|| over random collective U and a random input."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho)
    worst = 0.0
    for element in haar_sample(rng, n):
        U = unitary_of(element)
        UU = np.kron(U, U)
        lhs = apply_symmetric_channel(ch, UU @ rho @ UU.conj().T)
        rhs = UU @ apply_symmetric_channel(ch, rho) @ UU.conj().T
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def random_symmetric_channel(rng: np.random.Generator) -> SymmetricChannel:
    """Dirichlet mixture of the symmetric components, checked for covariance."""
    ch = symmetric_channel(
        rng.dirichlet(np.ones(5)),
        theta=float(rng.uniform(0, 2 * np.pi)),
        replacement=float(rng.uniform(0, 1)),
    )
    residual = covariance_residual(ch, rng)
    if residual > COVARIANCE_TOL:
        raise IsolabError(f"Generated channel is not covariant (residual {residual:.3e})")
    return ch
