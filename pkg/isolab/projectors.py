"""Subgroup-averaging projectors P_H in closed form, plus a quadrature oracle."""

import itertools
import logging
from typing import List, Optional, Tuple

import numpy as np

from isolab.exceptions import InvalidQuadratureError
from isolab.models import (
    GroupElement,
    PauliForm,
    QuadratureRule,
    SubgroupClass,
    SubgroupDescriptor,
    perpendicular_unit,
)
from isolab.pauli import SWAP, decompose, pauli_form, random_state, trace_norm_batch
from isolab.su2 import (
    act,
    element_from_rotation,
    haar_quaternions,
    haar_sample,
    inverse,
    kinf_element,
    random_axis,
    rotate_about,
    rotation_matrices,
)

logger = logging.getLogger(__name__)

AXIS_CLASSES = (SubgroupClass.Z4, SubgroupClass.U1, SubgroupClass.KINF)

# Proper signed permutation matrices: the rotations mapping a frame onto itself
SIGNED_PERMUTATIONS = [
    m
    for m in (
        np.diag(signs) @ np.eye(3)[list(perm)]
        for perm in itertools.permutations(range(3))
        for signs in itertools.product((1.0, -1.0), repeat=3)
    )
    if np.linalg.det(m) > 0
]


def _cross_batch(axes: np.ndarray) -> np.ndarray:
    x, y, z = axes[:, 0], axes[:, 1], axes[:, 2]
    zero = np.zeros_like(x)
    return np.stack(
        [
            np.stack([zero, -z, y], axis=-1),
            np.stack([z, zero, -x], axis=-1),
            np.stack([-y, x, zero], axis=-1),
        ],
        axis=1,
    )


def project_axis_batch(
    subgroup_class: SubgroupClass, axes: np.ndarray, a: np.ndarray, b: np.ndarray, T: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P_H for Z4, U1 or Kinf evaluated at each row of `axes`.

    Kinf does not depend on its pi-axis, so one axis is enough.
    """
    axes = np.asarray(axes, dtype=float).reshape(-1, 3)
    n = axes.shape[0]
    P = np.einsum('ni,nj->nij', axes, axes)
    Q = np.eye(3)[None, :, :] - P
    PTP = P @ T @ P
    half_trace = 0.5 * np.einsum('nii->n', Q @ T)

    if subgroup_class is SubgroupClass.KINF:
        zeros = np.zeros((n, 3))
        return zeros, zeros.copy(), PTP + half_trace[:, None, None] * Q

    new_a = (axes @ a)[:, None] * axes
    new_b = (axes @ b)[:, None] * axes
    if subgroup_class is SubgroupClass.Z4:
        return new_a, new_b, PTP + Q @ T @ Q
    if subgroup_class is SubgroupClass.U1:
        K = _cross_batch(axes)
        # rotation-invariant antisymmetric part of the plane block
        coeff = 0.5 * np.einsum('nij,ij->n', K, T)
        return new_a, new_b, PTP + half_trace[:, None, None] * Q + coeff[:, None, None] * K
    raise ValueError(f"{subgroup_class.value} is not parametrised by a single axis")


def project_frame_batch(frames: np.ndarray, T: np.ndarray) -> np.ndarray:
    """K2 projection of T for each (3, 3) frame whose rows are the pi-axes."""
    frames = np.asarray(frames, dtype=float).reshape(-1, 3, 3)
    diag = np.einsum('nia,ab,nib->ni', frames, T, frames)
    return np.einsum('ni,nia,nib->nab', diag, frames, frames)


def project_arrays(
    H: SubgroupDescriptor, a: np.ndarray, b: np.ndarray, T: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """P_H on raw (a, b, T) arrays; also valid for non-state Hermitian inputs."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    T = np.asarray(T, dtype=float)
    c = H.subgroup_class
    if c is SubgroupClass.Z2:
        return a.copy(), b.copy(), T.copy()
    if c in AXIS_CLASSES:
        new_a, new_b, new_T = project_axis_batch(c, H.axis_vector[None, :], a, b, T)
        return new_a[0], new_b[0], new_T[0]
    zeros = np.zeros(3)
    if c is SubgroupClass.K2:
        return zeros, zeros.copy(), project_frame_batch(H.frame_matrix, T)[0]
    return zeros, zeros.copy(), np.trace(T) / 3 * np.eye(3)


def project(H: SubgroupDescriptor, pf: PauliForm) -> PauliForm:
    """Closed-form P_H(rho)."""
    return pauli_form(*project_arrays(H, pf.a, pf.b, pf.T))


def su2_twirl_matrix(m: np.ndarray) -> np.ndarray:
    """SU(2) twirl of a 4x4 operator as alpha 1 + beta SWAP.

    Coefficients follow from matching tr(X) and tr(SWAP X).
    """
    t0 = np.trace(m)
    t1 = np.trace(SWAP @ m)
    alpha = (2 * t0 - t1) / 6
    beta = (2 * t1 - t0) / 6
    return alpha * np.eye(4, dtype=complex) + beta * SWAP


def twirl_numeric(H: SubgroupDescriptor, pf: PauliForm, rule: QuadratureRule) -> PauliForm:
    """Weighted average of act(h, pf) over the quadrature nodes.

    Raises:
        InvalidQuadratureError: If the rule was generated for another subgroup
    """
    if rule.descriptor != H:
        raise InvalidQuadratureError(
            f"Rule was built for {rule.descriptor.to_json_dict()}, not {H.to_json_dict()}"
        )
    Rs = rotation_matrices(rule.quaternions())
    w = rule.weights
    a = np.einsum('n,nij,j->i', w, Rs, pf.a)
    b = np.einsum('n,nij,j->i', w, Rs, pf.b)
    T = np.einsum('n,nij,jk,nlk->il', w, Rs, pf.T, Rs)
    return pauli_form(a, b, T)


def projection_differences(H: SubgroupDescriptor, pf: PauliForm) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    new_a, new_b, new_T = project_arrays(H, pf.a, pf.b, pf.T)
    return pf.a - new_a, pf.b - new_b, pf.T - new_T


def fixed_point_residual(H: SubgroupDescriptor, pf: PauliForm) -> float:
    """Trace distance between rho and P_H(rho)."""
    da, db, dT = projection_differences(H, pf)
    return float(trace_norm_batch(da[None], db[None], dT[None])[0])


def projection_gap(H: SubgroupDescriptor, pf: PauliForm) -> float:
    """Largest entrywise change of (a, b, T) under P_H."""
    return float(max(np.max(np.abs(d)) for d in projection_differences(H, pf)))


def conjugated_project(g: GroupElement, H: SubgroupDescriptor, pf: PauliForm) -> PauliForm:
    """U_g o P_H o U_{g^-1} applied to pf."""
    return act(g, project(H, act(inverse(g), pf)))


def random_descriptor(subgroup_class: SubgroupClass, rng: np.random.Generator) -> SubgroupDescriptor:
    """Descriptor of the given class with random axis or frame."""
    if subgroup_class is SubgroupClass.Z2:
        return SubgroupDescriptor.z2()
    if subgroup_class is SubgroupClass.SU2:
        return SubgroupDescriptor.su2()
    if subgroup_class is SubgroupClass.K2:
        return SubgroupDescriptor.k2(rotation_matrices(haar_quaternions(rng, 1))[0].T)
    axis = random_axis(rng)
    if subgroup_class is SubgroupClass.KINF:
        pi_axis = np.cross(axis, random_axis(rng))
        return SubgroupDescriptor.kinf(axis, pi_axis / np.linalg.norm(pi_axis))
    if subgroup_class is SubgroupClass.Z4:
        return SubgroupDescriptor.z4(axis)
    return SubgroupDescriptor.u1(axis)


def random_member(subgroup_class: SubgroupClass, rng: np.random.Generator) -> Tuple[PauliForm, SubgroupDescriptor]:
    """A projected Ginibre state whose isotropy is generically exactly the given class."""
    H = random_descriptor(subgroup_class, rng)
    return project(H, decompose(random_state(rng))), H


def normalizer_samples(H: SubgroupDescriptor, rng: np.random.Generator, n: int) -> List[GroupElement]:
    """Elements g with g H g^-1 = H."""
    c = H.subgroup_class
    if c in (SubgroupClass.Z2, SubgroupClass.SU2):
        return haar_sample(rng, n)

    samples: List[GroupElement] = []
    if c is SubgroupClass.K2:
        frame = H.frame_matrix
        for _ in range(n):
            S = SIGNED_PERMUTATIONS[int(rng.integers(len(SIGNED_PERMUTATIONS)))]
            g = element_from_rotation(frame.T @ S @ frame)
            if rng.integers(2):
                g = GroupElement.from_array(-g.as_array())
            samples.append(g)
        return samples

    # Kinf(r) normalises Z4(r), U1(r) and itself for every pi-axis choice
    r = H.axis_vector
    p0 = perpendicular_unit(r)
    for _ in range(n):
        phi = rng.uniform(0, 2 * np.pi)
        p = np.cos(phi) * p0 + np.sin(phi) * np.cross(r, p0)
        samples.append(kinf_element(r, p, rng.uniform(0, 2 * np.pi), bool(rng.integers(2))))
    return samples


def non_normalizer_witness(H: SubgroupDescriptor) -> Optional[Tuple[GroupElement, PauliForm]]:
    """An element moving H off itself and a state on which the conjugated projector differs.

    Returns None for the normal subgroups Z2 and SU2.
    """
    c = H.subgroup_class
    if c in (SubgroupClass.Z2, SubgroupClass.SU2):
        return None
    zeros = np.zeros(3)
    if c is SubgroupClass.K2:
        r1, r2, _ = H.frame_matrix
        return rotate_about(r1, np.pi / 4), pauli_form(zeros, zeros, np.outer(r2, r2))
    r = H.axis_vector
    return rotate_about(perpendicular_unit(r), np.pi / 4), pauli_form(zeros, zeros, np.outer(r, r))
