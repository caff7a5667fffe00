"""JSON codecs for states, subgroup descriptors, channels and reports."""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
from pydantic import ValidationError

from isolab.exceptions import MalformedInputError
from isolab.models import DensityMatrix4, IsotropyReport, PauliForm, QubitChannelPTM, SubgroupDescriptor
from isolab.pauli import density_matrix, pauli_form
from isolab.channels import ptm, ptm_from_kraus

logger = logging.getLogger(__name__)


def _require_mapping(obj: Any, what: str) -> Dict[str, Any]:
    if not isinstance(obj, dict):
        raise MalformedInputError(f"{what} JSON must be an object, got {type(obj).__name__}")
    return obj


def parse_state(obj: Any) -> Union[DensityMatrix4, PauliForm]:
    """Accept {"re", "im"} (4x4 row-major) or {"a", "b", "T"}.

    Raises:
        MalformedInputError: If neither schema matches
        InvalidStateError: If the matrix or triple is not a state
    """
    obj = _require_mapping(obj, "State")
    try:
        if 're' in obj:
            re = np.asarray(obj['re'], dtype=float)
            im = np.asarray(obj.get('im', np.zeros_like(re)), dtype=float)
            if re.shape != (4, 4) or im.shape != (4, 4):
                raise MalformedInputError("State 're' and 'im' must be 4x4")
            return density_matrix(re + 1j * im)
        if {'a', 'b', 'T'} <= obj.keys():
            a = np.asarray(obj['a'], dtype=float)
            b = np.asarray(obj['b'], dtype=float)
            T = np.asarray(obj['T'], dtype=float)
            if a.shape != (3,) or b.shape != (3,) or T.shape != (3, 3):
                raise MalformedInputError("State 'a', 'b' must be 3-vectors and 'T' a 3x3 matrix")
            return pauli_form(a, b, T)
    except (TypeError, ValueError) as e:
        raise MalformedInputError(f"State entries are not numeric: {e}") from e
    raise MalformedInputError("State JSON needs either 're'/'im' or 'a'/'b'/'T'")


def parse_descriptor(obj: Any) -> SubgroupDescriptor:
    """Accept {"class": ..., "axis"?, "pi_axis"?, "frame"?}."""
    obj = _require_mapping(obj, "Subgroup")
    if 'class' not in obj:
        raise MalformedInputError("Subgroup JSON needs a 'class' field")
    try:
        return SubgroupDescriptor.model_validate(obj)
    except (ValidationError, ValueError) as e:
        raise MalformedInputError(f"Invalid subgroup descriptor: {e}") from e


def parse_channel(obj: Any) -> QubitChannelPTM:
    """Accept {"kraus": [{"re", "im"}, ...]} or {"lambda", "t"}."""
    obj = _require_mapping(obj, "Channel")
    try:
        if 'kraus' in obj:
            kraus = []
            for op in obj['kraus']:
                op = _require_mapping(op, "Kraus operator")
                re = np.asarray(op['re'], dtype=float)
                im = np.asarray(op.get('im', np.zeros_like(re)), dtype=float)
                kraus.append(re + 1j * im)
            return ptm_from_kraus(kraus)
        if 'lambda' in obj and 't' in obj:
            return ptm(obj['lambda'], obj['t'])
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedInputError(f"Channel entries are malformed: {e}") from e
    raise MalformedInputError("Channel JSON needs either 'kraus' or 'lambda'/'t'")


def _load_json(path: Union[str, Path]) -> Any:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    try:
        return json.loads(path.read_text(encoding='utf-8'))
    except json.JSONDecodeError as e:
        raise MalformedInputError(f"{path} is not valid JSON: {e}") from e


def load_state(path: Union[str, Path]) -> Union[DensityMatrix4, PauliForm]:
    return parse_state(_load_json(path))


def load_descriptor(path: Union[str, Path]) -> SubgroupDescriptor:
    return parse_descriptor(_load_json(path))


def load_channel(path: Union[str, Path]) -> QubitChannelPTM:
    return parse_channel(_load_json(path))


def state_to_json(rho: DensityMatrix4) -> Dict[str, Any]:
    return rho.to_json_dict()


def pauli_to_json(pf: PauliForm) -> Dict[str, Any]:
    return pf.to_json_dict()


def report_to_json(report: IsotropyReport) -> Dict[str, Any]:
    return report.to_json_dict()


def dumps(obj: Dict[str, Any]) -> str:
    """Stable JSON text for command output."""
    return json.dumps(obj, indent=2, sort_keys=True)
