"""Pauli decomposition of two-qubit states, named states, and state metrics."""

import logging
from typing import Any, Sequence, Union

import numpy as np
from pydantic import ValidationError

from isolab.exceptions import InvalidStateError, NotAStateError
from isolab.models import DensityMatrix4, PauliForm, CanonicalForm, TOL_PSD

logger = logging.getLogger(__name__)

IDENTITY2 = np.eye(2, dtype=complex)
PAULIS = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# sigma_i x 1, 1 x sigma_j and sigma_i x sigma_j
SIGMA_A = np.array([np.kron(s, IDENTITY2) for s in PAULIS])
SIGMA_B = np.array([np.kron(IDENTITY2, s) for s in PAULIS])
SIGMA_AB = np.array([[np.kron(si, sj) for sj in PAULIS] for si in PAULIS])

SWAP = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ],
    dtype=complex,
)

EIG_FLOOR = 1e-14
SUPPORT_TOL = 1e-12

# Bell vertices of the T-state tetrahedron, in the order phi+, phi-, psi+, psi-
BELL_NAMES = ('phi_plus', 'phi_minus', 'psi_plus', 'psi_minus')
BELL_VERTICES = np.array(
    [
        [1.0, -1.0, 1.0],
        [-1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0],
        [-1.0, -1.0, -1.0],
    ]
)

_BELL_VECTORS = {
    'phi_plus': np.array([1, 0, 0, 1]) / np.sqrt(2),
    'phi_minus': np.array([1, 0, 0, -1]) / np.sqrt(2),
    'psi_plus': np.array([0, 1, 1, 0]) / np.sqrt(2),
    'psi_minus': np.array([0, 1, -1, 0]) / np.sqrt(2),
}

# Vertex opposite each edge midpoint inside the triplet triangle
_OPPOSITE_VERTEX = {0: 1, 1: 0, 2: 2}

StateLike = Union[DensityMatrix4, PauliForm]


def density_matrix(entries: Any) -> DensityMatrix4:
    """Validate a 4x4 matrix as a two-qubit state."""
    try:
        return DensityMatrix4(entries=entries)
    except ValidationError as e:
        raise InvalidStateError(f"Invalid density matrix: {e.errors()[0]['msg']}") from e


def pauli_form(a: Any, b: Any, T: Any) -> PauliForm:
    """Validate a Pauli triple."""
    try:
        return PauliForm(a=a, b=b, T=T)
    except ValidationError as e:
        raise InvalidStateError(f"Invalid Pauli form: {e.errors()[0]['msg']}") from e


def pauli_operator(a: Any, b: Any, T: Any, identity: float = 1.0) -> np.ndarray:
    """(identity 1x1 + a.s x 1 + 1 x b.s + sum T_ij s_i x s_j) / 4, unvalidated."""
    op = identity * np.eye(4, dtype=complex)
    op = op + np.einsum('i,iab->ab', np.asarray(a, dtype=float), SIGMA_A)
    op = op + np.einsum('j,jab->ab', np.asarray(b, dtype=float), SIGMA_B)
    op = op + np.einsum('ij,ijab->ab', np.asarray(T, dtype=float), SIGMA_AB)
    return op / 4


def decompose(rho: DensityMatrix4) -> PauliForm:
    """Bloch vectors and correlation matrix of rho."""
    m = rho.entries
    a = np.real(np.einsum('iab,ba->i', SIGMA_A, m))
    b = np.real(np.einsum('iab,ba->i', SIGMA_B, m))
    T = np.real(np.einsum('ijab,ba->ij', SIGMA_AB, m))
    return pauli_form(a, b, T)


def compose(pf: PauliForm) -> DensityMatrix4:
    """Rebuild rho from its Pauli form.

    Raises:
        NotAStateError: If the operator has an eigenvalue below -1e-10
    """
    m = pauli_operator(pf.a, pf.b, pf.T)
    min_eig = float(np.linalg.eigvalsh(m)[0])
    if min_eig < -TOL_PSD:
        raise NotAStateError(
            f"(a, b, T) is outside the two-qubit state set (eigenvalue {min_eig:.3e})",
            min_eigenvalue=min_eig,
        )
    return density_matrix(m)


def as_pauli_form(state: StateLike) -> PauliForm:
    if isinstance(state, PauliForm):
        return state
    return decompose(state)


def as_matrix(state: StateLike) -> np.ndarray:
    if isinstance(state, DensityMatrix4):
        return np.asarray(state.entries)
    return pauli_operator(state.a, state.b, state.T)


def canonical_form(pf: PauliForm) -> CanonicalForm:
    """Diagonalise T by two proper rotations.

    T = C diag(tau) D^T with det C = det D = +1. Diagonal inputs keep their
    axes (C = D = a permutation ordering |tau| descending, ties kept in axis
    order); otherwise the SVD frames are used and the sign of tau_3 absorbs
    any reflection.
    """
    T = np.asarray(pf.T, dtype=float)
    off_diagonal = T - np.diag(np.diag(T))
    if np.max(np.abs(off_diagonal)) == 0.0:
        diag = np.diag(T)
        order = sorted(range(3), key=lambda i: -abs(diag[i]))
        C = np.eye(3)[:, order]
        if np.linalg.det(C) < 0:
            C[:, 2] *= -1
        D = C.copy()
        taus = diag[order]
    else:
        U, s, Vt = np.linalg.svd(T)
        C = U.copy()
        D = Vt.T.copy()
        taus = s.copy()
        if np.linalg.det(C) < 0:
            C[:, 2] *= -1
            taus[2] *= -1
        if np.linalg.det(D) < 0:
            D[:, 2] *= -1
            taus[2] *= -1
    return CanonicalForm(taus=taus, c_basis=C, d_basis=D, a=C.T @ pf.a, b=D.T @ pf.b)


def trace_norm_batch(delta_a: np.ndarray, delta_b: np.ndarray, delta_T: np.ndarray) -> np.ndarray:
    """Trace distances 1/2 ||1/4 (da.s x 1 + 1 x db.s + dT_ij s_i x s_j)||_1 for stacked differences."""
    ops = (
        np.einsum('ni,iab->nab', delta_a, SIGMA_A)
        + np.einsum('nj,jab->nab', delta_b, SIGMA_B)
        + np.einsum('nij,ijab->nab', delta_T, SIGMA_AB)
    ) / 4
    eigs = np.linalg.eigvalsh(ops)
    return 0.5 * np.sum(np.abs(eigs), axis=-1)


def trace_distance(rho: StateLike, sigma: StateLike) -> float:
    """1/2 ||rho - sigma||_1."""
    diff = as_matrix(rho) - as_matrix(sigma)
    eigs = np.linalg.eigvalsh((diff + diff.conj().T) / 2)
    return float(min(1.0, 0.5 * np.sum(np.abs(eigs))))


def relative_entropy(rho: StateLike, sigma: StateLike) -> float:
    """S(rho || sigma) in nats; infinite when supp(rho) is not inside supp(sigma)."""
    r = as_matrix(rho)
    s = as_matrix(sigma)
    r_vals, _ = np.linalg.eigh(r)
    s_vals, s_vecs = np.linalg.eigh(s)

    kernel = s_vecs[:, s_vals <= EIG_FLOOR]
    if kernel.shape[1] > 0:
        weight = float(np.real(np.trace(kernel.conj().T @ r @ kernel)))
        if weight > SUPPORT_TOL:
            return float('inf')

    positive = r_vals[r_vals > EIG_FLOOR]
    neg_entropy = float(np.sum(positive * np.log(positive)))

    support = s_vals > EIG_FLOOR
    populations = np.real(np.einsum('ak,ab,bk->k', s_vecs.conj(), r, s_vecs))
    cross = float(np.sum(populations[support] * np.log(s_vals[support])))
    return max(0.0, neg_entropy - cross)


def bell_state(name: str) -> DensityMatrix4:
    """Projector onto phi_plus, phi_minus, psi_plus or psi_minus."""
    if name not in _BELL_VECTORS:
        raise ValueError(f"Unknown Bell state {name!r}; expected one of {', '.join(BELL_NAMES)}")
    v = _BELL_VECTORS[name].astype(complex)
    return density_matrix(np.outer(v, v.conj()))


def t_state(taus: Sequence[float]) -> PauliForm:
    """Maximally mixed marginals and T = diag(taus)."""
    return pauli_form(np.zeros(3), np.zeros(3), np.diag(np.asarray(taus, dtype=float)))


def werner_state(tau: float) -> PauliForm:
    return t_state((tau, tau, tau))


def edge_midpoint_state(i: int) -> PauliForm:
    """(1 x 1 + s_i x s_i) / 4."""
    T = np.zeros((3, 3))
    T[i, i] = 1.0
    return pauli_form(np.zeros(3), np.zeros(3), T)


def diagonal_line_state(i: int, p: float) -> PauliForm:
    """(1 - p) * edge midpoint i + p * the opposite triplet vertex."""
    if i not in _OPPOSITE_VERTEX:
        raise ValueError(f"diagonal index must be 0, 1 or 2, got {i}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    midpoint = np.zeros(3)
    midpoint[i] = 1.0
    taus = (1 - p) * midpoint + p * BELL_VERTICES[_OPPOSITE_VERTEX[i]]
    return t_state(taus)


def product_state(a: Any, b: Any) -> PauliForm:
    """rho_A x rho_B with Bloch vectors a and b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return pauli_form(a, b, np.outer(a, b))


def random_state(rng: np.random.Generator) -> DensityMatrix4:
    """Ginibre-distributed full-rank state G G^dagger / tr."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = g @ g.conj().T
    return density_matrix(m / np.real(np.trace(m)))


def bell_weights(taus: Sequence[float]) -> np.ndarray:
    """Bell-diagonal weights of a T-state, ordered phi+, phi-, psi+, psi-."""
    return (1.0 + BELL_VERTICES @ np.asarray(taus, dtype=float)) / 4


def in_tetrahedron(taus: Sequence[float], tol: float = 1e-12) -> bool:
    return bool(np.all(bell_weights(taus) >= -tol))
