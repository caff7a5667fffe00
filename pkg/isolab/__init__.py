"""Isolab - isotropy classification of two-qubit states and qubit channels under collective SU(2)."""

__version__ = "0.1.0"

from isolab.lab import IsotropyLab
from isolab.models import (
    IsolabConfig,
    DensityMatrix4,
    PauliForm,
    CanonicalForm,
    GroupElement,
    SubgroupClass,
    SubgroupDescriptor,
    OrbitShape,
    GateVerdict,
    IsotropyReport,
    QuadratureRule,
    QubitChannelPTM,
    SymmetricChannel,
    ScanRow,
    LemmaReport,
    LemmaResult,
)
from isolab.exceptions import (
    IsolabError,
    InvalidStateError,
    NotAStateError,
    InvalidQuadratureError,
    AmbiguousToleranceError,
    NotTracePreservingError,
    InvalidChannelError,
    InvalidResolutionError,
    MalformedInputError,
)
from isolab.pauli import (
    decompose,
    compose,
    canonical_form,
    trace_distance,
    relative_entropy,
    bell_state,
    werner_state,
    t_state,
)
from isolab.su2 import act, rotation_of, haar_sample, subgroup_quadrature
from isolab.projectors import project, twirl_numeric
from isolab.isotropy import classify, smoothed_classify, continuous_stabilizer, discrete_pi_axes
from isolab.lattice import leq, meet, equivalent
from isolab.channels import ptm_from_kraus, channel_isotropy, simulation_gate
from isolab.scan import scan_tetrahedron, write_scan_csv
from isolab.lemmas import run_lemma_suite

__all__ = [
    "IsotropyLab",
    "IsolabConfig",
    "DensityMatrix4",
    "PauliForm",
    "CanonicalForm",
    "GroupElement",
    "SubgroupClass",
    "SubgroupDescriptor",
    "OrbitShape",
    "GateVerdict",
    "IsotropyReport",
    "QuadratureRule",
    "QubitChannelPTM",
    "SymmetricChannel",
    "ScanRow",
    "LemmaReport",
    "LemmaResult",
    "IsolabError",
    "InvalidStateError",
    "NotAStateError",
    "InvalidQuadratureError",
    "AmbiguousToleranceError",
    "NotTracePreservingError",
    "InvalidChannelError",
    "InvalidResolutionError",
    "MalformedInputError",
    "decompose",
    "compose",
    "canonical_form",
    "trace_distance",
    "relative_entropy",
    "bell_state",
    "werner_state",
    "t_state",
    "act",
    "rotation_of",
    "haar_sample",
    "subgroup_quadrature",
    "project",
    "twirl_numeric",
    "classify",
    "smoothed_classify",
    "continuous_stabilizer",
    "discrete_pi_axes",
    "leq",
    "meet",
    "equivalent",
    "ptm_from_kraus",
    "channel_isotropy",
    "simulation_gate",
    "scan_tetrahedron",
    "write_scan_csv",
    "run_lemma_suite",
]
