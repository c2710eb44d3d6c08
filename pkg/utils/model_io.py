"""JSON persistence of identified models and reports (see FORMATS.md)."""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Union

from models.output_error_model import OutputErrorModel
from models.state_space_model import StateSpaceModel
from utils.csv_io import FormatError, atomic_writer

logger = logging.getLogger(__name__)

MODEL_TYPES = {
    "state_space": StateSpaceModel,
    "output_error": OutputErrorModel,
}


def finite_only(value: Any) -> Any:
    """Replace non-finite floats by None, recursively."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: finite_only(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [finite_only(item) for item in value]
    return value


def write_json(path: Union[str, Path], data: Dict[str, Any]) -> Path:
    """Write a dictionary as sorted, indented JSON (floats keep their repr digits)."""
    path = Path(path)
    text = json.dumps(finite_only(data), indent=2, sort_keys=True, allow_nan=False) + "\n"
    with atomic_writer(path) as handle:
        handle.write(text)
    logger.info(f"Wrote {path}")
    return path


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise FormatError(f"Cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise FormatError(f"Invalid JSON in {path}: {exc.msg}", line=exc.lineno)


def save_model(path: Union[str, Path], model: Union[StateSpaceModel, OutputErrorModel]) -> Path:
    return write_json(path, model.to_dict())


def model_from_dict(data: Dict[str, Any]) -> Union[StateSpaceModel, OutputErrorModel]:
    kind = data.get("type")
    if kind not in MODEL_TYPES:
        raise FormatError(f"Unknown model type '{kind}'", column="type")
    try:
        return MODEL_TYPES[kind].from_dict(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"Malformed {kind} model: {exc}")


def load_model(path: Union[str, Path]) -> Union[StateSpaceModel, OutputErrorModel]:
    return model_from_dict(read_json(path))
