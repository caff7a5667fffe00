"""Isotropy classification: continuous stabiliser kernel, discrete pi-axes, and smoothing."""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from isolab.exceptions import AmbiguousToleranceError, InvalidResolutionError
from isolab.models import (
    CLASS_RANK,
    IsotropyReport,
    PauliForm,
    SubgroupClass,
    SubgroupDescriptor,
    perpendicular_unit,
)
from isolab.pauli import StateLike, as_pauli_form, canonical_form, trace_norm_batch
from isolab.projectors import (
    project_arrays,
    project_axis_batch,
    project_frame_batch,
)
from isolab.su2 import cross_matrix, haar_quaternions, rotation_matrices

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
DEFAULT_TOL_ABS = 1e-10
AMBIGUITY_DECADE = 10.0

FIBONACCI_POINTS = 812
FRAME_SEEDS = 64
REFINED_SEEDS = 3
_STAGE_STEPS = (0.05, 0.002)

# Smoothed search order; classes sharing a rank are compared by distance, first listed wins ties
_SEARCH_LEVELS = [
    (4, (SubgroupClass.SU2,)),
    (3, (SubgroupClass.KINF,)),
    (2, (SubgroupClass.U1, SubgroupClass.K2)),
    (1, (SubgroupClass.Z4,)),
]


def canonical_axis(u: np.ndarray) -> np.ndarray:
    """Unit vector with its largest-magnitude component made positive."""
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    if u[int(np.argmax(np.abs(u)))] < 0:
        u = -u
    return u


def _check_band(quantity: str, value: float, threshold: float) -> None:
    if threshold / AMBIGUITY_DECADE <= value <= threshold * AMBIGUITY_DECADE:
        raise AmbiguousToleranceError(quantity, float(value), float(threshold))


def stabilizer_matrix(a: np.ndarray, b: np.ndarray, T: np.ndarray) -> np.ndarray:
    """15x3 matrix of omega -> (omega x a, omega x b, [Omega, T])."""
    columns = []
    for k in range(3):
        e = np.eye(3)[k]
        E = cross_matrix(e)
        columns.append(np.concatenate([np.cross(e, a), np.cross(e, b), (E @ T - T @ E).ravel()]))
    return np.column_stack(columns)


def _kernel(a, b, T, tol: float, tol_abs: float) -> Tuple[int, List[np.ndarray], float]:
    _, s, Vt = np.linalg.svd(stabilizer_matrix(a, b, T))
    threshold = max(tol * s[0], tol_abs)
    for value in s:
        _check_band('kernel', value, threshold)
    small = s < threshold
    dim = int(np.sum(small))
    if dim == 2:
        # stabiliser algebras of dimension 2 do not exist in su(2)
        raise AmbiguousToleranceError('kernel_dim', float(s[1]), float(threshold))
    axes = [canonical_axis(Vt[i]) for i in range(3) if small[i]]
    residual = float(np.max(s[small])) if dim else 0.0
    logger.debug("Stabiliser singular values %s, threshold %.3e, dim %d", s, threshold, dim)
    return dim, axes, residual


def continuous_stabilizer(
    pf: StateLike, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS
) -> Tuple[int, List[np.ndarray]]:
    """Dimension and basis of the Lie algebra fixing (a, b, T).

    Raises:
        AmbiguousToleranceError: If a singular value sits within a decade of the threshold
    """
    pf = as_pauli_form(pf)
    dim, axes, _ = _kernel(pf.a, pf.b, pf.T, tol, tol_abs)
    return dim, axes


def _pi_threshold(a, b, T, tol: float, tol_abs: float) -> float:
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)), np.max(np.abs(T)))
    return max(tol * scale, tol_abs)


def pi_residual(u: np.ndarray, a: np.ndarray, b: np.ndarray, T: np.ndarray) -> float:
    """Largest violation of R a = a, R b = b, R T R^T = T for the pi-rotation about u."""
    R = 2 * np.outer(u, u) - np.eye(3)
    return float(max(
        np.max(np.abs(R @ a - a)),
        np.max(np.abs(R @ b - b)),
        np.max(np.abs(R @ T @ R.T - T)),
    ))


def _pi_candidates(a, b, T, threshold: float) -> List[np.ndarray]:
    # a pi-rotation fixes a nonzero vector only if it is the rotation axis
    for v in (a, b):
        norm = np.linalg.norm(v)
        _check_band('pi_axis_vector', norm, threshold)
        if norm > threshold:
            return [v / norm]
    A = (T - T.T) / 2
    axial = np.array([A[2, 1], A[0, 2], A[1, 0]])
    norm = np.linalg.norm(axial)
    _check_band('pi_axis_vector', norm, threshold)
    if norm > threshold:
        return [axial / norm]
    _, vecs = np.linalg.eigh((T + T.T) / 2)
    return [vecs[:, i] for i in range(3)]


def _pi_axes(a, b, T, tol: float, tol_abs: float) -> Tuple[List[np.ndarray], float]:
    threshold = _pi_threshold(a, b, T, tol, tol_abs)
    accepted: List[np.ndarray] = []
    worst = 0.0
    for u in _pi_candidates(a, b, T, threshold):
        res = pi_residual(u, a, b, T)
        _check_band('pi_axis', res, threshold)
        if res < threshold:
            u = canonical_axis(u)
            if all(abs(np.dot(u, w)) < 1 - 1e-8 for w in accepted):
                accepted.append(u)
                worst = max(worst, res)
    return accepted, worst


def discrete_pi_axes(pf: StateLike, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS) -> List[np.ndarray]:
    """Axes u (up to sign) whose pi-rotation fixes the state.

    For a degenerate correlation spectrum the returned axes are one
    orthonormal set of representatives of the degenerate family.
    """
    pf = as_pauli_form(pf)
    axes, _ = _pi_axes(pf.a, pf.b, pf.T, tol, tol_abs)
    return axes


def _ordered_frame(axes: List[np.ndarray]) -> np.ndarray:
    order = sorted(range(3), key=lambda i: int(np.argmax(np.abs(axes[i]))))
    return np.array([axes[i] for i in order])


def pi_axes_of(H: SubgroupDescriptor) -> List[np.ndarray]:
    if H.subgroup_class is SubgroupClass.Z4:
        return [H.axis_vector]
    if H.subgroup_class is SubgroupClass.KINF:
        return [H.pi_axis_vector]
    if H.subgroup_class is SubgroupClass.K2:
        return list(H.frame_matrix)
    return []


def _report(H: SubgroupDescriptor, a, b, T, residuals: dict, notes: Optional[List[str]] = None) -> IsotropyReport:
    new_a, new_b, new_T = project_arrays(H, a, b, T)
    da, db, dT = a - new_a, b - new_b, T - new_T
    residuals = dict(residuals)
    residuals['projector'] = float(max(np.max(np.abs(da)), np.max(np.abs(db)), np.max(np.abs(dT))))
    residuals.setdefault('distance', float(trace_norm_batch(da[None], db[None], dT[None])[0]))
    return IsotropyReport.for_descriptor(H, pi_axes=pi_axes_of(H), residuals=residuals, notes=notes)


def classify_arrays(
    a: np.ndarray, b: np.ndarray, T: np.ndarray, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS
) -> IsotropyReport:
    """Exact isotropy of the triple (a, b, T); shared by states and channels."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    T = np.asarray(T, dtype=float)

    dim, kernel_axes, kernel_residual = _kernel(a, b, T, tol, tol_abs)
    pi_worst = 0.0
    if dim == 3:
        H = SubgroupDescriptor.su2()
    elif dim == 1:
        k = kernel_axes[0]
        p = perpendicular_unit(k)
        threshold = _pi_threshold(a, b, T, tol, tol_abs)
        res = pi_residual(p, a, b, T)
        _check_band('pi_axis', res, threshold)
        if res < threshold:
            H = SubgroupDescriptor.kinf(k, p)
            pi_worst = res
        else:
            H = SubgroupDescriptor.u1(k)
    else:
        axes, pi_worst = _pi_axes(a, b, T, tol, tol_abs)
        if len(axes) == 0:
            H = SubgroupDescriptor.z2()
        elif len(axes) == 1:
            H = SubgroupDescriptor.z4(axes[0])
        elif len(axes) == 2:
            # two orthogonal pi-axes always generate the third
            raise AmbiguousToleranceError('pi_axis_count', 2.0, 3.0)
        else:
            H = SubgroupDescriptor.k2(_ordered_frame(axes))

    logger.debug("Classified as %s", H.subgroup_class.value)
    return _report(H, a, b, T, {'kernel': kernel_residual, 'pi_axes': pi_worst})


def classify(pf: StateLike, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS) -> IsotropyReport:
    """Exact isotropy subgroup of a two-qubit state.

    Raises:
        AmbiguousToleranceError: If any decision residual is within a decade of its threshold
    """
    pf = as_pauli_form(pf)
    return classify_arrays(pf.a, pf.b, pf.T, tol, tol_abs)


def fibonacci_sphere(n: int = FIBONACCI_POINTS) -> np.ndarray:
    """Near-uniform (n, 3) unit vectors on a golden-angle spiral."""
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    r = np.sqrt(1 - z * z)
    phi = np.pi * (1 + np.sqrt(5)) * i
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _axis_distances(subgroup_class: SubgroupClass, axes: np.ndarray, a, b, T) -> np.ndarray:
    new_a, new_b, new_T = project_axis_batch(subgroup_class, axes, a, b, T)
    return trace_norm_batch(a - new_a, b - new_b, T - new_T)


def _frame_distances(frames: np.ndarray, a, b, T) -> np.ndarray:
    new_T = project_frame_batch(frames, T)
    n = new_T.shape[0]
    return trace_norm_batch(np.broadcast_to(a, (n, 3)), np.broadcast_to(b, (n, 3)), T - new_T)


def _structural_axes(pf: PauliForm) -> List[np.ndarray]:
    cf = canonical_form(pf)
    seeds = list(cf.c_basis.T) + list(cf.d_basis.T)
    for v in (pf.a, pf.b):
        if np.linalg.norm(v) > 1e-12:
            seeds.append(v / np.linalg.norm(v))
    T = np.asarray(pf.T)
    _, vecs = np.linalg.eigh((T + T.T) / 2)
    seeds.extend(vecs.T)
    A = (T - T.T) / 2
    axial = np.array([A[2, 1], A[0, 2], A[1, 0]])
    if np.linalg.norm(axial) > 1e-12:
        seeds.append(axial / np.linalg.norm(axial))
    return seeds


def _nelder_mead(f: Callable[[np.ndarray], float], dim: int, stages: int) -> Tuple[float, np.ndarray]:
    x = np.zeros(dim)
    value = f(x)
    for step in _STAGE_STEPS[:stages]:
        simplex = np.vstack([x, x + step * np.eye(dim)])
        result = minimize(
            f,
            x,
            method='Nelder-Mead',
            options={'initial_simplex': simplex, 'xatol': 1e-10, 'fatol': 1e-14, 'maxiter': 400},
        )
        if result.fun <= value:
            x, value = result.x, float(result.fun)
    return value, x


def _minimise_axis(subgroup_class: SubgroupClass, pf: PauliForm, eps: float) -> Tuple[float, np.ndarray]:
    a, b, T = pf.a, pf.b, pf.T
    seeds = np.vstack([np.array(_structural_axes(pf)), fibonacci_sphere()])
    distances = _axis_distances(subgroup_class, seeds, a, b, T)
    order = np.argsort(distances, kind='stable')
    best_value = float(distances[order[0]])
    best_axis = seeds[order[0]]
    stages = 1 if best_value <= eps else 2

    refined: List[np.ndarray] = []
    for idx in order:
        if len(refined) == REFINED_SEEDS:
            break
        seed = seeds[idx] / np.linalg.norm(seeds[idx])
        if any(abs(np.dot(seed, s)) > 1 - 1e-6 for s in refined):
            continue
        refined.append(seed)
        p1 = perpendicular_unit(seed)
        p2 = np.cross(seed, p1)

        def to_axis(x: np.ndarray, seed=seed, p1=p1, p2=p2) -> np.ndarray:
            theta, phi = x
            return np.cos(theta) * np.cos(phi) * seed + np.sin(theta) * np.cos(phi) * p1 + np.sin(phi) * p2

        def objective(x: np.ndarray, to_axis=to_axis) -> float:
            return float(_axis_distances(subgroup_class, to_axis(x)[None, :], a, b, T)[0])

        value, x = _nelder_mead(objective, 2, stages)
        logger.debug("%s refinement from seed %d reached %.3e", subgroup_class.value, idx, value)
        if value < best_value:
            best_value, best_axis = value, to_axis(x)
    return best_value, canonical_axis(best_axis)


def _proper(frame: np.ndarray) -> np.ndarray:
    frame = np.array(frame, dtype=float)
    if np.linalg.det(frame) < 0:
        frame[2] = -frame[2]
    return frame


def _minimise_frame(pf: PauliForm, eps: float) -> Tuple[float, np.ndarray]:
    a, b, T = pf.a, pf.b, pf.T
    cf = canonical_form(pf)
    _, vecs = np.linalg.eigh((T + T.T) / 2)
    structural = [cf.c_basis.T, cf.d_basis.T, _proper(vecs.T)]
    rng = np.random.default_rng(0)
    random_frames = rotation_matrices(haar_quaternions(rng, FRAME_SEEDS))
    seeds = np.concatenate([np.array(structural), random_frames])
    distances = _frame_distances(seeds, a, b, T)
    order = np.argsort(distances, kind='stable')
    best_value = float(distances[order[0]])
    best_frame = seeds[order[0]]
    stages = 1 if best_value <= eps else 2

    for idx in order[:REFINED_SEEDS]:
        seed = seeds[idx]

        def to_frame(x: np.ndarray, seed=seed) -> np.ndarray:
            return seed @ Rotation.from_rotvec(x).as_matrix().T

        def objective(x: np.ndarray, to_frame=to_frame) -> float:
            return float(_frame_distances(to_frame(x)[None], a, b, T)[0])

        value, x = _nelder_mead(objective, 3, stages)
        if value < best_value:
            best_value, best_frame = value, to_frame(x)
    return best_value, best_frame


def minimise_distance(subgroup_class: SubgroupClass, pf: PauliForm, eps: float = 0.0) -> Tuple[float, SubgroupDescriptor]:
    """Smallest trace distance from pf to P_H(pf) over subgroups H of the class."""
    if subgroup_class is SubgroupClass.Z2:
        return 0.0, SubgroupDescriptor.z2()
    if subgroup_class is SubgroupClass.SU2:
        H = SubgroupDescriptor.su2()
        _, _, new_T = project_arrays(H, pf.a, pf.b, pf.T)
        value = trace_norm_batch(pf.a[None], pf.b[None], (pf.T - new_T)[None])[0]
        return float(value), H
    if subgroup_class is SubgroupClass.K2:
        value, frame = _minimise_frame(pf, eps)
        U, _, Vt = np.linalg.svd(frame)
        return value, SubgroupDescriptor.k2(_proper(U @ Vt))
    value, axis = _minimise_axis(subgroup_class, pf, eps)
    if subgroup_class is SubgroupClass.KINF:
        return value, SubgroupDescriptor.kinf(axis)
    if subgroup_class is SubgroupClass.U1:
        return value, SubgroupDescriptor.u1(axis)
    return value, SubgroupDescriptor.z4(axis)


def smoothed_classify(
    pf: StateLike, eps: float, tol: float = DEFAULT_TOL, tol_abs: float = DEFAULT_TOL_ABS
) -> IsotropyReport:
    """Largest isotropy reachable within trace distance eps.

    Classes ranked above the exact class are searched top-down; the
    distance to a class is min_H ||rho - P_H(rho)|| over its parameters.

    Raises:
        InvalidResolutionError: If eps is negative
        AmbiguousToleranceError: If eps is 0 and exact classification is ambiguous
    """
    if eps < 0:
        raise InvalidResolutionError(f"eps must be nonnegative, got {eps}")
    pf = as_pauli_form(pf)
    if eps == 0:
        return classify(pf, tol, tol_abs)

    try:
        exact: Optional[IsotropyReport] = classify(pf, tol, tol_abs)
        floor_rank = CLASS_RANK[exact.subgroup_class]
    except AmbiguousToleranceError as e:
        logger.debug("Exact classification ambiguous (%s); searching every level", e.quantity)
        exact = None
        floor_rank = -1

    for rank, classes in _SEARCH_LEVELS:
        if rank <= floor_rank:
            break
        accepted = []
        for position, subgroup_class in enumerate(classes):
            value, H = minimise_distance(subgroup_class, pf, eps)
            logger.debug("Smoothed distance to %s: %.6e", subgroup_class.value, value)
            if value <= eps:
                accepted.append((value, position, H))
        if accepted:
            value, _, H = min(accepted, key=lambda item: (item[0], item[1]))
            return _report(
                H, pf.a, pf.b, pf.T,
                {'distance': value, 'eps': eps},
                notes=[f"smoothed with eps={eps:g}"],
            )

    if exact is not None:
        return exact
    return _report(SubgroupDescriptor.z2(), pf.a, pf.b, pf.T, {'distance': 0.0, 'eps': eps})
