"""SU(2) elements as unit quaternions, the double cover onto SO(3), and subgroup quadratures."""

import logging
from typing import Any, List

import numpy as np
from scipy.spatial.transform import Rotation

from isolab.exceptions import InvalidQuadratureError
from isolab.models import (
    DensityMatrix4,
    GroupElement,
    PauliForm,
    QuadratureRule,
    SubgroupClass,
    SubgroupDescriptor,
)
from isolab.pauli import PAULIS, IDENTITY2, density_matrix, pauli_form

logger = logging.getLogger(__name__)

MIN_CIRCLE_POINTS = 5
MEMBERSHIP_TOL = 1e-10

_CIRCLE_CLASSES = (SubgroupClass.U1, SubgroupClass.KINF, SubgroupClass.SU2)


def cross_matrix(v: Any) -> np.ndarray:
    """[v]_x with [v]_x u = v x u."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def quaternion_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Product of (..., 4) quaternion arrays matching U(p) U(q)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    w1, v1 = p[..., 0], p[..., 1:]
    w2, v2 = q[..., 0], q[..., 1:]
    w = w1 * w2 - np.sum(v1 * v2, axis=-1)
    v = w1[..., None] * v2 + w2[..., None] * v1 - np.cross(v1, v2)
    return np.concatenate([w[..., None], v], axis=-1)


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    q = quaternion_product(g.as_array(), h.as_array())
    return GroupElement.from_array(q / np.linalg.norm(q))


def inverse(g: GroupElement) -> GroupElement:
    w, x, y, z = g.q
    return GroupElement(q=(w, -x, -y, -z))


def rotation_matrices(qs: np.ndarray) -> np.ndarray:
    """Adjoint rotations for an (n, 4) stack of quaternions."""
    qs = np.asarray(qs, dtype=float)
    w = qs[:, 0]
    v = qs[:, 1:]
    n = qs.shape[0]
    eye = np.broadcast_to(np.eye(3), (n, 3, 3))
    cross = np.zeros((n, 3, 3))
    cross[:, 0, 1] = -v[:, 2]
    cross[:, 0, 2] = v[:, 1]
    cross[:, 1, 0] = v[:, 2]
    cross[:, 1, 2] = -v[:, 0]
    cross[:, 2, 0] = -v[:, 1]
    cross[:, 2, 1] = v[:, 0]
    scale = (w ** 2 - np.sum(v * v, axis=1))[:, None, None]
    return scale * eye + 2 * np.einsum('ni,nj->nij', v, v) - 2 * w[:, None, None] * cross


def rotation_of(g: GroupElement) -> np.ndarray:
    """R in SO(3) with U(g) (v.s) U(g)^dagger = (R v).s."""
    return rotation_matrices(g.as_array()[None, :])[0]


def unitary_of(g: GroupElement) -> np.ndarray:
    """U(g) = w 1 + i (x X + y Y + z Z)."""
    w, x, y, z = g.q
    return w * IDENTITY2 + 1j * np.einsum('k,kab->ab', np.array([x, y, z]), PAULIS)


def element_from_rotation(R: Any) -> GroupElement:
    """One of the two SU(2) preimages of a rotation matrix."""
    x, y, z, w = Rotation.from_matrix(np.asarray(R, dtype=float)).as_quat()
    q = np.array([w, -x, -y, -z])
    return GroupElement.from_array(q / np.linalg.norm(q))


def act(g: GroupElement, pf: PauliForm) -> PauliForm:
    """Collective action (U x U) rho (U x U)^dagger in Pauli form."""
    R = rotation_of(g)
    return pauli_form(R @ pf.a, R @ pf.b, R @ pf.T @ R.T)


def act_matrix(g: GroupElement, rho: DensityMatrix4) -> DensityMatrix4:
    """Same action by explicit 4x4 conjugation."""
    U = unitary_of(g)
    UU = np.kron(U, U)
    out = UU @ rho.entries @ UU.conj().T
    return density_matrix((out + out.conj().T) / 2)


def locally_rotated(pf: PauliForm, g1: GroupElement, g2: GroupElement) -> PauliForm:
    """Local action U(g1) x U(g2); not a symmetry of the collective group."""
    R1 = rotation_of(g1)
    R2 = rotation_of(g2)
    return pauli_form(R1 @ pf.a, R2 @ pf.b, R1 @ pf.T @ R2.T)


def haar_quaternions(rng: np.random.Generator, n: int) -> np.ndarray:
    """(n, 4) Haar-distributed unit quaternions."""
    q = rng.standard_normal((n, 4))
    return q / np.linalg.norm(q, axis=1, keepdims=True)


def haar_sample(rng: np.random.Generator, n: int) -> List[GroupElement]:
    if n <= 0:
        return []
    return [GroupElement.from_array(q) for q in haar_quaternions(rng, n)]


def random_axis(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def _pi_rotation(axis: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], axis])


def _circle(axis: np.ndarray, n: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(theta), np.sin(theta)[:, None] * axis[None, :]])


def subgroup_quadrature(H: SubgroupDescriptor, n_circle: int = 16) -> QuadratureRule:
    """Weighted nodes whose average reproduces the Haar average over H.

    Finite classes are summed exactly. Circle components use an n_circle
    trapezoid rule, exact for harmonics up to e^{+-i(n_circle - 1) theta}.
    SU2 uses Euler angles with Gauss-Legendre nodes in cos of the polar
    angle, which is exact for the quadratic integrands of the collective
    action.

    Raises:
        InvalidQuadratureError: If n_circle < 5 for a class with a circle factor
    """
    c = H.subgroup_class
    if c in _CIRCLE_CLASSES and n_circle < MIN_CIRCLE_POINTS:
        raise InvalidQuadratureError(
            f"{c.value} needs n_circle >= {MIN_CIRCLE_POINTS}, got {n_circle}"
        )

    identity = np.array([1.0, 0.0, 0.0, 0.0])
    if c is SubgroupClass.Z2:
        nodes = np.array([identity, -identity])
        weights = np.full(2, 0.5)
    elif c is SubgroupClass.Z4:
        r = H.axis_vector
        nodes = np.array([identity, _pi_rotation(r), -identity, -_pi_rotation(r)])
        weights = np.full(4, 0.25)
    elif c is SubgroupClass.K2:
        rows = [identity] + [_pi_rotation(r) for r in H.frame_matrix]
        nodes = np.array(rows + [-q for q in rows])
        weights = np.full(8, 0.125)
    elif c is SubgroupClass.U1:
        nodes = _circle(H.axis_vector, n_circle)
        weights = np.full(n_circle, 1.0 / n_circle)
    elif c is SubgroupClass.KINF:
        circle = _circle(H.axis_vector, n_circle)
        flipped = quaternion_product(_pi_rotation(H.pi_axis_vector), circle)
        nodes = np.concatenate([circle, flipped])
        weights = np.full(2 * n_circle, 0.5 / n_circle)
    else:
        nodes, weights = _euler_nodes(n_circle)

    weights = weights / np.sum(weights)
    logger.debug("Built %d-node quadrature for %s", len(nodes), c.value)
    return QuadratureRule(
        descriptor=H,
        nodes=[GroupElement.from_array(q / np.linalg.norm(q)) for q in nodes],
        weights=weights,
    )


def _euler_nodes(n_circle: int):
    """e^{iA Z} e^{iB Y} e^{iC Z} with A, C uniform on [0, 2pi) and cos 2B Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(n_circle)
    z_axis = np.array([0.0, 0.0, 1.0])
    y_axis = np.array([0.0, 1.0, 0.0])
    z_circle = _circle(z_axis, n_circle)
    half_polar = np.arccos(x) / 2
    y_nodes = np.column_stack([np.cos(half_polar), np.sin(half_polar)[:, None] * y_axis[None, :]])

    left = z_circle[:, None, None, :]
    middle = y_nodes[None, :, None, :]
    right = z_circle[None, None, :, :]
    nodes = quaternion_product(quaternion_product(left, middle), right).reshape(-1, 4)
    weights = np.einsum('a,b,c->abc', np.ones(n_circle), w / 2, np.ones(n_circle)).reshape(-1)
    return nodes, weights / (n_circle * n_circle)


def element_in_subgroup(g: GroupElement, H: SubgroupDescriptor, tol: float = MEMBERSHIP_TOL) -> bool:
    """Check g against the defining relations of H."""
    return bool(_satisfies_relations(g, H, tol))


def _satisfies_relations(g: GroupElement, H: SubgroupDescriptor, tol: float) -> bool:
    w = g.q[0]
    v = np.array(g.q[1:])
    c = H.subgroup_class
    central = abs(abs(w) - 1.0) <= tol

    def parallel(axis: np.ndarray) -> bool:
        return np.linalg.norm(np.cross(v, axis)) <= tol

    if c is SubgroupClass.SU2:
        return True
    if c is SubgroupClass.Z2:
        return central
    if c is SubgroupClass.Z4:
        return central or (abs(w) <= tol and parallel(H.axis_vector))
    if c is SubgroupClass.U1:
        return parallel(H.axis_vector)
    if c is SubgroupClass.K2:
        return central or (abs(w) <= tol and any(parallel(r) for r in H.frame_matrix))
    # Kinf: e^{i theta r.s} or (i p.s) e^{i theta r.s}, i.e. w = 0 with v orthogonal to r
    r = H.axis_vector
    return parallel(r) or (abs(w) <= tol and abs(np.dot(v, r)) <= tol)


def conjugate_descriptor(g: GroupElement, H: SubgroupDescriptor) -> SubgroupDescriptor:
    """Descriptor of g H g^-1."""
    R = rotation_of(g)
    c = H.subgroup_class
    if c is SubgroupClass.K2:
        return SubgroupDescriptor.k2(H.frame_matrix @ R.T)
    if c is SubgroupClass.KINF:
        return SubgroupDescriptor.kinf(R @ H.axis_vector, R @ H.pi_axis_vector)
    if c is SubgroupClass.Z4:
        return SubgroupDescriptor.z4(R @ H.axis_vector)
    if c is SubgroupClass.U1:
        return SubgroupDescriptor.u1(R @ H.axis_vector)
    return H


def kinf_element(axis: Any, pi_axis: Any, theta: float, flip: bool) -> GroupElement:
    """(i p.s)^flip e^{i theta r.s}."""
    r = np.asarray(axis, dtype=float)
    q = np.concatenate([[np.cos(theta)], np.sin(theta) * r])
    if flip:
        q = quaternion_product(_pi_rotation(np.asarray(pi_axis, dtype=float)), q)
    return GroupElement.from_array(q / np.linalg.norm(q))


def rotate_about(axis: Any, angle: float) -> GroupElement:
    """Element whose adjoint rotation turns vectors by `angle` about `axis`."""
    return GroupElement.from_axis_angle(axis, -angle / 2)

