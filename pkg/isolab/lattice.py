"""The observed isotropy lattice: inclusion, meet, class-level join, and C(H) membership."""

import logging
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from isolab.models import CLASS_RANK, SubgroupClass, SubgroupDescriptor
from isolab.pauli import StateLike, as_pauli_form
from isolab.projectors import fixed_point_residual
from isolab.isotropy import DEFAULT_TOL, DEFAULT_TOL_ABS, canonical_axis, classify

logger = logging.getLogger(__name__)

AXIS_TOL = 1e-8

HASSE_EDGES: List[Tuple[SubgroupClass, SubgroupClass]] = [
    (SubgroupClass.Z2, SubgroupClass.Z4),
    (SubgroupClass.Z4, SubgroupClass.U1),
    (SubgroupClass.Z4, SubgroupClass.K2),
    (SubgroupClass.U1, SubgroupClass.KINF),
    (SubgroupClass.K2, SubgroupClass.KINF),
    (SubgroupClass.KINF, SubgroupClass.SU2),
]


def _upsets() -> Dict[SubgroupClass, Set[SubgroupClass]]:
    above = {c: {c} for c in SubgroupClass}
    changed = True
    while changed:
        changed = False
        for low, high in HASSE_EDGES:
            for c in SubgroupClass:
                if low in above[c] and not above[high] <= above[c]:
                    above[c] |= above[high]
                    changed = True
    return above


_ABOVE = _upsets()


def rank(c: SubgroupClass) -> int:
    return CLASS_RANK[c]


def class_leq(c1: SubgroupClass, c2: SubgroupClass) -> bool:
    """c1 below c2 on the Hasse diagram (reflexive)."""
    return c2 in _ABOVE[c1]


def join_class(c1: SubgroupClass, c2: SubgroupClass) -> SubgroupClass:
    """Least common upper class."""
    common = _ABOVE[c1] & _ABOVE[c2]
    for c in sorted(common, key=rank):
        if all(class_leq(c, other) for other in common):
            return c
    raise ValueError(f"No least upper bound for {c1.value} and {c2.value}")


def meet_class(c1: SubgroupClass, c2: SubgroupClass) -> SubgroupClass:
    """Greatest common lower class."""
    common = {c for c in SubgroupClass if class_leq(c, c1) and class_leq(c, c2)}
    for c in sorted(common, key=rank, reverse=True):
        if all(class_leq(other, c) for other in common):
            return c
    raise ValueError(f"No greatest lower bound for {c1.value} and {c2.value}")


def _parallel(u: np.ndarray, v: np.ndarray) -> bool:
    return bool(abs(np.dot(u, v)) >= 1 - AXIS_TOL)


def _perpendicular(u: np.ndarray, v: np.ndarray) -> bool:
    return bool(abs(np.dot(u, v)) <= AXIS_TOL)


def _continuous_axis(H: SubgroupDescriptor) -> Optional[np.ndarray]:
    if H.subgroup_class in (SubgroupClass.U1, SubgroupClass.KINF):
        return H.axis_vector
    return None


def _contains_pi(H: SubgroupDescriptor, u: np.ndarray) -> bool:
    """Whether H contains the pi-rotation about u."""
    c = H.subgroup_class
    if c is SubgroupClass.SU2:
        return True
    if c is SubgroupClass.Z2:
        return False
    if c is SubgroupClass.K2:
        return any(_parallel(u, r) for r in H.frame_matrix)
    if c is SubgroupClass.KINF:
        return _parallel(u, H.axis_vector) or _perpendicular(u, H.axis_vector)
    return _parallel(u, H.axis_vector)


def _contains_circle(H: SubgroupDescriptor, u: np.ndarray) -> bool:
    """Whether H contains every rotation about u."""
    if H.subgroup_class is SubgroupClass.SU2:
        return True
    axis = _continuous_axis(H)
    return axis is not None and _parallel(u, axis)


def leq(H1: SubgroupDescriptor, H2: SubgroupDescriptor) -> bool:
    """H1 is a subgroup of H2, checked generator by generator."""
    return bool(_leq(H1, H2))


def _leq(H1: SubgroupDescriptor, H2: SubgroupDescriptor) -> bool:
    c1 = H1.subgroup_class
    if c1 is SubgroupClass.Z2:
        return True
    if c1 is SubgroupClass.SU2:
        return H2.subgroup_class is SubgroupClass.SU2
    if c1 is SubgroupClass.Z4:
        return _contains_pi(H2, H1.axis_vector)
    if c1 is SubgroupClass.K2:
        return all(_contains_pi(H2, r) for r in H1.frame_matrix)
    if c1 is SubgroupClass.U1:
        return _contains_circle(H2, H1.axis_vector)
    return _contains_circle(H2, H1.axis_vector) and _contains_pi(H2, H1.pi_axis_vector)


def equivalent(H1: SubgroupDescriptor, H2: SubgroupDescriptor) -> bool:
    """Same subgroup; Kinf pi-axes and K2 frame order or signs are gauge."""
    return leq(H1, H2) and leq(H2, H1)


def _pi_candidates(H: SubgroupDescriptor) -> List[np.ndarray]:
    c = H.subgroup_class
    if c in (SubgroupClass.Z4, SubgroupClass.U1, SubgroupClass.KINF):
        return [H.axis_vector]
    if c is SubgroupClass.K2:
        return list(H.frame_matrix)
    return []


def meet(H1: SubgroupDescriptor, H2: SubgroupDescriptor) -> SubgroupDescriptor:
    """Descriptor of the intersection H1 and H2."""
    if H1.subgroup_class is SubgroupClass.SU2:
        return H2
    if H2.subgroup_class is SubgroupClass.SU2:
        return H1
    if SubgroupClass.Z2 in (H1.subgroup_class, H2.subgroup_class):
        return SubgroupDescriptor.z2()

    axis1 = _continuous_axis(H1)
    axis2 = _continuous_axis(H2)
    if axis1 is not None and axis2 is not None and _parallel(axis1, axis2):
        if H1.subgroup_class is SubgroupClass.KINF and H2.subgroup_class is SubgroupClass.KINF:
            return SubgroupDescriptor.kinf(axis1, H1.pi_axis_vector)
        return SubgroupDescriptor.u1(axis1)

    candidates = _pi_candidates(H1) + _pi_candidates(H2)
    if H1.subgroup_class is SubgroupClass.KINF and H2.subgroup_class is SubgroupClass.KINF:
        # both contain every pi-axis orthogonal to their own axis
        common = np.cross(axis1, axis2)
        candidates.append(common / np.linalg.norm(common))

    shared: List[np.ndarray] = []
    for u in candidates:
        u = canonical_axis(u)
        if _contains_pi(H1, u) and _contains_pi(H2, u) and not any(_parallel(u, w) for w in shared):
            shared.append(u)

    if not shared:
        return SubgroupDescriptor.z2()
    if len(shared) == 1:
        return SubgroupDescriptor.z4(shared[0])
    # any two shared pi-axes come from a common K2 and generate the third
    first, second = shared[0], shared[1]
    third = np.cross(first, second)
    return SubgroupDescriptor.k2(np.array([first, second, third / np.linalg.norm(third)]))


def in_hat_C(
    pf: StateLike, H: SubgroupDescriptor, tol: float = DEFAULT_TOL
) -> bool:
    """rho is fixed by P_H, i.e. H is contained in Iso(rho)."""
    return bool(fixed_point_residual(H, as_pauli_form(pf)) <= tol)


def in_C(
    pf: StateLike, H: SubgroupDescriptor, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS
) -> bool:
    """Iso(rho) is exactly H."""
    return equivalent(classify(pf, tol, tol_abs).descriptor, H)


def hasse_dot() -> str:
    """Graphviz DOT text of the observed lattice, bottom to top."""
    lines = ['digraph isotropy {', '    rankdir=BT;']
    for c in sorted(SubgroupClass, key=rank):
        lines.append(f'    "{c.value}";')
    for low, high in HASSE_EDGES:
        lines.append(f'    "{low.value}" -> "{high.value}";')
    lines.append('}')
    return '\n'.join(lines) + '\n'
