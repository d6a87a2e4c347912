import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from functional import FunctionalData, FunctionalError, PLFunction, functional_data
from spherical import NormalizedModel, SphericalData, load_spherical_data, normalize


@dataclass(frozen=True)
class Loaded:
    path: Path
    digest: str
    data: SphericalData
    model: NormalizedModel
    fdata: FunctionalData


def load_input(path: str) -> Loaded:
    path = Path(path)
    raw = path.read_bytes()
    data = load_spherical_data(path)
    model = normalize(data)
    return Loaded(path, hashlib.sha256(raw).hexdigest(), data, model, functional_data(model))


def load_function(path: str | None, dim: int) -> PLFunction | None:
    if path is None:
        return None
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FunctionalError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e
    f = PLFunction.from_document(document)
    if f.dim != dim:
        raise FunctionalError(f"{path}: slopes have dimension {f.dim}, model rank is {dim}")
    return f
