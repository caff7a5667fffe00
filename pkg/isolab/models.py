"""Pydantic models for isolab."""

import os
from enum import Enum
from typing import Optional, List, Dict, Any, Tuple

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TOL_HERM = 1e-12
TOL_TRACE = 1e-12
TOL_PSD = 1e-10
TOL_BLOCH = 1e-10
TOL_UNIT = 1e-12
TOL_FRAME = 1e-10

Vector3 = Tuple[float, float, float]


def _frozen_array(value: Any, shape: Tuple[int, ...], dtype: type) -> np.ndarray:
    arr = np.array(value, dtype=dtype)
    if arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("entries must be finite")
    arr.setflags(write=False)
    return arr


def perpendicular_unit(v: np.ndarray) -> np.ndarray:
    """Deterministic unit vector orthogonal to the unit vector v."""
    v = np.asarray(v, dtype=float)
    e = np.zeros(3)
    e[int(np.argmin(np.abs(v)))] = 1.0
    w = e - np.dot(e, v) * v
    return w / np.linalg.norm(w)


class SubgroupClass(str, Enum):
    """Isotropy subgroups of SU(2) realised by two-qubit states."""
    Z2 = "Z2"
    Z4 = "Z4"
    U1 = "U1"
    K2 = "K2"
    KINF = "Kinf"
    SU2 = "SU2"


class OrbitShape(str, Enum):
    """Orbit manifold SO(3)/(H/Z2) of a state with isotropy H."""
    POINT = "Point"
    SPHERE2 = "Sphere2"
    SO3_MOD_DINF = "SO3modDinf"
    SO3_MOD_D2 = "SO3modD2"
    SO3_MOD_C2 = "SO3modC2"
    SO3 = "SO3"


class GateVerdict(str, Enum):
    """Outcome of the necessary simulation condition."""
    ALLOWED = "Allowed"
    RULED_OUT = "RuledOut"


SHAPE_OF_CLASS: Dict[SubgroupClass, OrbitShape] = {
    SubgroupClass.SU2: OrbitShape.POINT,
    SubgroupClass.KINF: OrbitShape.SO3_MOD_DINF,
    SubgroupClass.K2: OrbitShape.SO3_MOD_D2,
    SubgroupClass.U1: OrbitShape.SPHERE2,
    SubgroupClass.Z4: OrbitShape.SO3_MOD_C2,
    SubgroupClass.Z2: OrbitShape.SO3,
}

CONTINUOUS_DIM: Dict[SubgroupClass, int] = {
    SubgroupClass.SU2: 3,
    SubgroupClass.KINF: 1,
    SubgroupClass.U1: 1,
    SubgroupClass.K2: 0,
    SubgroupClass.Z4: 0,
    SubgroupClass.Z2: 0,
}

CLASS_RANK: Dict[SubgroupClass, int] = {
    SubgroupClass.Z2: 0,
    SubgroupClass.Z4: 1,
    SubgroupClass.U1: 2,
    SubgroupClass.K2: 2,
    SubgroupClass.KINF: 3,
    SubgroupClass.SU2: 4,
}

# Image in SO(3) after quotienting the common {+1, -1}
POINT_GROUP: Dict[SubgroupClass, str] = {
    SubgroupClass.Z2: "C1",
    SubgroupClass.Z4: "C2",
    SubgroupClass.U1: "C_inf",
    SubgroupClass.K2: "D2",
    SubgroupClass.KINF: "D_inf",
    SubgroupClass.SU2: "SO(3)",
}


class IsolabConfig(BaseModel):
    """Isolab configuration."""
    tol: float = Field(default=1e-8, gt=0, description="Relative decision tolerance")
    tol_abs: float = Field(default=1e-10, gt=0, description="Absolute tolerance floor")
    n_circle: int = Field(default=16, ge=5, description="Trapezoid points per circle component")
    threads: Optional[int] = Field(default=None, ge=1, description="Scan worker cap")
    seed: int = Field(default=0, description="Seed for randomised searches and lemma runs")
    log_level: str = Field(default="WARNING", description="Logging level for the CLI")

    @classmethod
    def from_env(cls) -> 'IsolabConfig':
        """Load from environment variables."""

        load_dotenv()

        values: Dict[str, Any] = {}
        parsers = {
            'ISOLAB_TOL': ('tol', float),
            'ISOLAB_TOL_ABS': ('tol_abs', float),
            'ISOLAB_N_CIRCLE': ('n_circle', int),
            'ISOLAB_THREADS': ('threads', int),
            'ISOLAB_SEED': ('seed', int),
        }
        for env_name, (field_name, parse) in parsers.items():
            raw = os.getenv(env_name)
            if raw is None or raw == '':
                continue
            try:
                values[field_name] = parse(raw)
            except ValueError as e:
                raise ValueError(f"Invalid value for {env_name}: {raw!r}") from e

        log_level = os.getenv('ISOLAB_LOG_LEVEL')
        if log_level:
            values['log_level'] = log_level.upper()

        return cls(**values)


class DensityMatrix4(BaseModel):
    """Two-qubit density matrix rho_AB."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    entries: np.ndarray = Field(..., description="4x4 complex Hermitian PSD unit-trace matrix")

    @field_validator('entries', mode='before')
    @classmethod
    def _coerce_entries(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, (4, 4), complex)

    @model_validator(mode='after')
    def _check_state(self) -> 'DensityMatrix4':
        m = self.entries
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > TOL_HERM:
            raise ValueError(f"matrix is not Hermitian (deviation {herm:.3e})")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > TOL_TRACE:
            raise ValueError(f"trace is {trace.real:.15g}, expected 1")
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if min_eig < -TOL_PSD:
            raise ValueError(f"minimum eigenvalue {min_eig:.3e} is negative")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        """Convert to the {"re", "im"} state schema."""
        return {'re': self.entries.real.tolist(), 'im': self.entries.imag.tolist()}

    @classmethod
    def from_json_dict(cls, obj: Dict[str, Any]) -> 'DensityMatrix4':
        """Create from the {"re", "im"} state schema."""
        re = np.asarray(obj['re'], dtype=float)
        im = np.asarray(obj.get('im', np.zeros_like(re)), dtype=float)
        return cls(entries=re + 1j * im)


class PauliForm(BaseModel):
    """Local Bloch vectors and correlation matrix of a two-qubit operator."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    a: np.ndarray = Field(..., description="Bloch vector of qubit A")
    b: np.ndarray = Field(..., description="Bloch vector of qubit B")
    T: np.ndarray = Field(..., description="Correlation matrix T_ij = tr(rho s_i x s_j)")

    @field_validator('a', 'b', mode='before')
    @classmethod
    def _coerce_vector(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, (3,), float)

    @field_validator('T', mode='before')
    @classmethod
    def _coerce_matrix(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, (3, 3), float)

    @model_validator(mode='after')
    def _check_bounds(self) -> 'PauliForm':
        if np.linalg.norm(self.a) > 1 + TOL_BLOCH:
            raise ValueError("|a| exceeds 1")
        if np.linalg.norm(self.b) > 1 + TOL_BLOCH:
            raise ValueError("|b| exceeds 1")
        if np.max(np.abs(self.T)) > 1 + TOL_BLOCH:
            raise ValueError("correlation entries exceed 1 in magnitude")
        return self

    def to_json_dict(self) -> Dict[str, Any]:
        """Convert to the {"a", "b", "T"} state schema."""
        return {'a': self.a.tolist(), 'b': self.b.tolist(), 'T': self.T.tolist()}

    @classmethod
    def from_json_dict(cls, obj: Dict[str, Any]) -> 'PauliForm':
        """Create from the {"a", "b", "T"} state schema."""
        return cls(a=obj['a'], b=obj['b'], T=obj['T'])


class CanonicalForm(BaseModel):
    """Correlation matrix diagonalised by two SO(3) frames."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    taus: np.ndarray = Field(..., description="Signed singular values (tau1, tau2, tau3)")
    c_basis: np.ndarray = Field(..., description="Columns c_i, frame on qubit A")
    d_basis: np.ndarray = Field(..., description="Columns d_i, frame on qubit B")
    a: np.ndarray = Field(..., description="Bloch vector of A in the c frame")
    b: np.ndarray = Field(..., description="Bloch vector of B in the d frame")

    @field_validator('taus', 'a', 'b', mode='before')
    @classmethod
    def _coerce_vector(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, (3,), float)

    @field_validator('c_basis', 'd_basis', mode='before')
    @classmethod
    def _coerce_frame(cls, value: Any) -> np.ndarray:
        frame = _frozen_array(value, (3, 3), float)
        if np.max(np.abs(frame.T @ frame - np.eye(3))) > TOL_FRAME:
            raise ValueError("frame is not orthonormal")
        if abs(np.linalg.det(frame) - 1.0) > TOL_FRAME:
            raise ValueError("frame is not right-handed")
        return frame

    def correlation_matrix(self) -> np.ndarray:
        """Reconstruct T = sum_i tau_i c_i d_i^T."""
        return self.c_basis @ np.diag(self.taus) @ self.d_basis.T


class GroupElement(BaseModel):
    """SU(2) element U = w 1 + i (x X + y Y + z Z) stored as a unit quaternion."""
    model_config = ConfigDict(frozen=True)

    q: Tuple[float, float, float, float] = Field(..., description="Unit quaternion (w, x, y, z)")

    @field_validator('q')
    @classmethod
    def _check_unit(cls, value: Tuple[float, float, float, float]) -> Tuple[float, float, float, float]:
        norm = float(np.linalg.norm(value))
        if abs(norm - 1.0) > TOL_UNIT:
            raise ValueError(f"quaternion norm is {norm:.15g}, expected 1")
        return value

    @classmethod
    def identity(cls) -> 'GroupElement':
        return cls(q=(1.0, 0.0, 0.0, 0.0))

    @classmethod
    def from_axis_angle(cls, axis: Any, phi: float) -> 'GroupElement':
        """exp(i phi r.s) for a unit (or normalisable) axis r."""
        r = np.asarray(axis, dtype=float)
        r = r / np.linalg.norm(r)
        s = np.sin(phi)
        return cls(q=(float(np.cos(phi)), float(s * r[0]), float(s * r[1]), float(s * r[2])))

    @classmethod
    def from_array(cls, q: Any) -> 'GroupElement':
        arr = np.asarray(q, dtype=float)
        return cls(q=tuple(float(x) for x in arr))

    def as_array(self) -> np.ndarray:
        return np.array(self.q, dtype=float)


class SubgroupDescriptor(BaseModel):
    """Parametrised residual-symmetry subgroup of SU(2)."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    subgroup_class: SubgroupClass = Field(..., alias='class', description="Subgroup class tag")
    axis: Optional[Vector3] = Field(default=None, description="Z4 pi-axis, U1 or Kinf rotation axis")
    pi_axis: Optional[Vector3] = Field(default=None, description="Kinf pi-axis orthogonal to the axis")
    frame: Optional[Tuple[Vector3, Vector3, Vector3]] = Field(
        default=None, description="K2 pi-axes r_1, r_2, r_3 as rows"
    )

    @model_validator(mode='before')
    @classmethod
    def _normalise(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        raw_class = data.get('class', data.get('subgroup_class'))
        subgroup_class = SubgroupClass(raw_class) if raw_class is not None else None

        for key in ('axis', 'pi_axis'):
            if data.get(key) is None:
                continue
            v = np.asarray(data[key], dtype=float)
            if v.shape != (3,):
                raise ValueError(f"{key} must be a 3-vector")
            norm = np.linalg.norm(v)
            if norm < TOL_UNIT:
                raise ValueError(f"{key} must be nonzero")
            data[key] = tuple(float(x) for x in v / norm)

        if subgroup_class is SubgroupClass.KINF and data.get('axis') is not None:
            axis = np.array(data['axis'])
            if data.get('pi_axis') is None:
                data['pi_axis'] = tuple(float(x) for x in perpendicular_unit(axis))
            elif abs(np.dot(axis, data['pi_axis'])) > TOL_FRAME:
                raise ValueError("pi_axis must be orthogonal to axis")

        if data.get('frame') is not None:
            frame = np.array(data['frame'], dtype=float)
            if frame.shape != (3, 3):
                raise ValueError("frame must be 3x3")
            if np.max(np.abs(frame @ frame.T - np.eye(3))) > TOL_FRAME:
                raise ValueError("frame must be orthonormal")
            if np.linalg.det(frame) < 0:
                frame[2] = -frame[2]
            data['frame'] = tuple(tuple(float(x) for x in row) for row in frame)
        return data

    @model_validator(mode='after')
    def _check_fields(self) -> 'SubgroupDescriptor':
        c = self.subgroup_class
        wants_axis = c in (SubgroupClass.Z4, SubgroupClass.U1, SubgroupClass.KINF)
        wants_pi = c is SubgroupClass.KINF
        wants_frame = c is SubgroupClass.K2
        for name, wanted in (('axis', wants_axis), ('pi_axis', wants_pi), ('frame', wants_frame)):
            present = getattr(self, name) is not None
            if wanted and not present:
                raise ValueError(f"{c.value} requires {name}")
            if present and not wanted:
                raise ValueError(f"{c.value} does not take {name}")
        return self

    @classmethod
    def z2(cls) -> 'SubgroupDescriptor':
        return cls(subgroup_class=SubgroupClass.Z2)

    @classmethod
    def su2(cls) -> 'SubgroupDescriptor':
        return cls(subgroup_class=SubgroupClass.SU2)

    @classmethod
    def z4(cls, axis: Any) -> 'SubgroupDescriptor':
        return cls(subgroup_class=SubgroupClass.Z4, axis=tuple(np.asarray(axis, dtype=float)))

    @classmethod
    def u1(cls, axis: Any) -> 'SubgroupDescriptor':
        return cls(subgroup_class=SubgroupClass.U1, axis=tuple(np.asarray(axis, dtype=float)))

    @classmethod
    def kinf(cls, axis: Any, pi_axis: Any = None) -> 'SubgroupDescriptor':
        pi = None if pi_axis is None else tuple(np.asarray(pi_axis, dtype=float))
        return cls(subgroup_class=SubgroupClass.KINF, axis=tuple(np.asarray(axis, dtype=float)), pi_axis=pi)

    @classmethod
    def k2(cls, frame: Any = None) -> 'SubgroupDescriptor':
        rows = np.eye(3) if frame is None else np.asarray(frame, dtype=float)
        return cls(subgroup_class=SubgroupClass.K2, frame=tuple(tuple(r) for r in rows))

    @property
    def axis_vector(self) -> Optional[np.ndarray]:
        return None if self.axis is None else np.array(self.axis)

    @property
    def pi_axis_vector(self) -> Optional[np.ndarray]:
        return None if self.pi_axis is None else np.array(self.pi_axis)

    @property
    def frame_matrix(self) -> Optional[np.ndarray]:
        """Rows are the three pi-axes."""
        return None if self.frame is None else np.array(self.frame)

    def to_json_dict(self) -> Dict[str, Any]:
        """Convert to the descriptor JSON schema."""
        out: Dict[str, Any] = {'class': self.subgroup_class.value}
        if self.axis is not None:
            out['axis'] = list(self.axis)
        if self.pi_axis is not None:
            out['pi_axis'] = list(self.pi_axis)
        if self.frame is not None:
            out['frame'] = [list(row) for row in self.frame]
        return out


class QuadratureRule(BaseModel):
    """Weighted SU(2) nodes approximating the Haar integral over a subgroup."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    descriptor: SubgroupDescriptor = Field(..., description="Subgroup the rule was generated for")
    nodes: List[GroupElement] = Field(..., description="Group elements")
    weights: np.ndarray = Field(..., description="Nonnegative weights summing to 1")

    @field_validator('weights', mode='before')
    @classmethod
    def _coerce_weights(cls, value: Any) -> np.ndarray:
        arr = np.array(value, dtype=float)
        if arr.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        if np.any(arr < 0):
            raise ValueError("weights must be nonnegative")
        total = float(np.sum(arr))
        if abs(total - 1.0) > 1e-14:
            raise ValueError(f"weights sum to {total:.17g}, expected 1")
        arr.setflags(write=False)
        return arr

    @model_validator(mode='after')
    def _check_lengths(self) -> 'QuadratureRule':
        if len(self.nodes) != self.weights.size:
            raise ValueError("nodes and weights differ in length")
        return self

    def quaternions(self) -> np.ndarray:
        """Nodes as an (n, 4) array."""
        return np.array([g.q for g in self.nodes], dtype=float)


class IsotropyReport(BaseModel):
    """Classification verdict for a state or channel."""
    model_config = ConfigDict(frozen=True)

    descriptor: SubgroupDescriptor
    shape: OrbitShape
    continuous_dim: int
    pi_axes: List[Vector3] = Field(default_factory=list)
    residuals: Dict[str, float] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode='after')
    def _check_pairing(self) -> 'IsotropyReport':
        c = self.descriptor.subgroup_class
        if SHAPE_OF_CLASS[c] is not self.shape:
            raise ValueError(f"{c.value} pairs with {SHAPE_OF_CLASS[c].value}, not {self.shape.value}")
        if CONTINUOUS_DIM[c] != self.continuous_dim:
            raise ValueError(f"{c.value} has continuous dimension {CONTINUOUS_DIM[c]}")
        return self

    @classmethod
    def for_descriptor(
        cls,
        descriptor: SubgroupDescriptor,
        pi_axes: Optional[List[Any]] = None,
        residuals: Optional[Dict[str, float]] = None,
        notes: Optional[List[str]] = None,
    ) -> 'IsotropyReport':
        """Build a report with shape and dimension taken from the class tables."""
        c = descriptor.subgroup_class
        return cls(
            descriptor=descriptor,
            shape=SHAPE_OF_CLASS[c],
            continuous_dim=CONTINUOUS_DIM[c],
            pi_axes=[tuple(float(x) for x in v) for v in (pi_axes or [])],
            residuals=residuals or {},
            notes=notes or [],
        )

    @property
    def subgroup_class(self) -> SubgroupClass:
        return self.descriptor.subgroup_class

    @property
    def point_group(self) -> str:
        return POINT_GROUP[self.subgroup_class]

    @property
    def orbit_dimension(self) -> int:
        return 3 - self.continuous_dim

    def to_json_dict(self) -> Dict[str, Any]:
        """Convert to the report JSON schema."""
        return {
            'class': self.subgroup_class.value,
            'shape': self.shape.value,
            'point_group': self.point_group,
            'continuous_dim': self.continuous_dim,
            'orbit_dimension': self.orbit_dimension,
            'descriptor': self.descriptor.to_json_dict(),
            'pi_axes': [list(v) for v in self.pi_axes],
            'residuals': dict(self.residuals),
            'notes': list(self.notes),
        }


class QubitChannelPTM(BaseModel):
    """Affine Bloch representation r -> lambda r + t of a qubit CPTP map."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, populate_by_name=True)

    lambda_: np.ndarray = Field(..., alias='lambda', description="Linear part on Bloch vectors")
    t: np.ndarray = Field(..., description="Non-unital shift")

    @field_validator('lambda_', mode='before')
    @classmethod
    def _coerce_lambda(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, (3, 3), float)

    @field_validator('t', mode='before')
    @classmethod
    def _coerce_shift(cls, value: Any) -> np.ndarray:
        return _frozen_array(value, (3,), float)

    @model_validator(mode='after')
    def _check_cp(self) -> 'QubitChannelPTM':
        min_eig = float(np.linalg.eigvalsh(self.choi())[0])
        if min_eig < -TOL_PSD:
            raise ValueError(f"Choi matrix has negative eigenvalue {min_eig:.3e}")
        return self

    def choi(self) -> np.ndarray:
        """Choi matrix sum_ij |i><j| (x) E(|i><j|)."""
        paulis = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)
        choi = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                unit = np.zeros((2, 2), dtype=complex)
                unit[i, j] = 1.0
                x0 = np.trace(unit) / 2
                x = np.einsum('kab,ba->k', paulis, unit) / 2
                out = x0 * (np.eye(2) + np.einsum('k,kab->ab', self.t, paulis))
                out = out + np.einsum('k,kab->ab', self.lambda_ @ x, paulis)
                choi += np.kron(unit, out)
        return choi

    def apply(self, bloch: Any) -> np.ndarray:
        """Image of a Bloch vector."""
        return self.lambda_ @ np.asarray(bloch, dtype=float) + self.t

    def to_json_dict(self) -> Dict[str, Any]:
        """Convert to the {"lambda", "t"} channel schema."""
        return {'lambda': self.lambda_.tolist(), 't': self.t.tolist()}

    @classmethod
    def from_json_dict(cls, obj: Dict[str, Any]) -> 'QubitChannelPTM':
        return cls(lambda_=obj['lambda'], t=obj['t'])


class SymmetricChannel(BaseModel):
    """Convex mixture of collective-SU(2)-covariant two-qubit channels.

    Components, in weight order: identity, SWAP conjugation,
    exp(i theta SWAP) conjugation, SU(2) twirl, and partial replacement
    (1 - s) rho + s twirl(rho).
    """
    weights: Tuple[float, float, float, float, float] = Field(..., description="Mixture weights")
    theta: float = Field(default=0.0, description="Angle of the exp(i theta SWAP) component")
    replacement: float = Field(default=0.0, ge=0.0, le=1.0, description="s of the partial replacement")

    @field_validator('weights')
    @classmethod
    def _check_weights(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(w < 0 for w in value):
            raise ValueError("weights must be nonnegative")
        if abs(sum(value) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        return value


class ScanRow(BaseModel):
    """One classified grid point of the T-state tetrahedron."""
    tau1: float
    tau2: float
    tau3: float
    subgroup_class: str = Field(..., description="Class tag, or 'ambiguous'")
    shape: str = Field(default="", description="Orbit shape label, empty when ambiguous")
    min_residual: float = Field(default=0.0, description="Distance to the accepted fixed-point set")


class LemmaResult(BaseModel):
    """Outcome of one property family in the lemma suite."""
    name: str
    trials: int
    failures: int
    worst_residual: float
    passed: bool


class LemmaReport(BaseModel):
    """Full lemma-suite report."""
    seed: int
    n_trials: int
    lemmas: List[LemmaResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.lemmas)
