"""Report records and their JSON / text renderings."""
import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from sympy import Basic, Rational

from config import EXIT_EXISTS, EXIT_INDETERMINATE, EXIT_NOT_EXISTS
from criteria import Outcome, Verdict
from functional import PLFunction


@dataclass(frozen=True)
class Report:
    command: str
    source: str
    outcome: str | None = None
    values: dict[str, Any] = field(default_factory=dict)
    provenance: dict[str, Any] = field(default_factory=dict)
    timing: float | None = field(default=None, compare=False)


def jsonable(value: Any) -> Any:
    """Recursively turn exact values into JSON-native ones; rationals become ``"p/q"`` strings."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, PLFunction):
        return value.to_document()
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, Rational):
        return str(value)
    if isinstance(value, Basic):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def verdict_report(command: str, source: str, verdict: Verdict, **values) -> Report:
    payload = {"diagnostics": verdict.diagnostics, **values}
    if verdict.witness is not None:
        payload["witness"] = verdict.witness
        payload["witness_L"] = verdict.witness_value
    return Report(
        command=command,
        source=source,
        outcome=verdict.outcome.value,
        values=jsonable(payload),
        provenance={"criterion": verdict.criterion, "theorem": verdict.theorem},
    )


def exit_code(report: Report) -> int:
    return {
        Outcome.EXISTS.value: EXIT_EXISTS,
        Outcome.NOT_EXISTS.value: EXIT_NOT_EXISTS,
        Outcome.INDETERMINATE.value: EXIT_INDETERMINATE,
        None: EXIT_EXISTS,
    }[report.outcome]


def _flatten(prefix: str, value: Any, lines: list[tuple[str, str]]) -> None:
    if isinstance(value, dict) and value:
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], lines)
    elif isinstance(value, list) and value and any(isinstance(v, (dict, list)) for v in value):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, lines)
    else:
        lines.append((prefix, json.dumps(value) if not isinstance(value, str) else value))


def emit_report(report: Report, fmt: str = "text", include_timing: bool = False) -> str:
    document = asdict(report)
    if not include_timing:
        document.pop("timing")
    if fmt == "json":
        return json.dumps(document, sort_keys=True, indent=2) + "\n"
    if fmt == "text":
        lines: list[tuple[str, str]] = []
        _flatten("", document, lines)
        width = max(len(k) for k, _ in lines)
        return "".join(f"{k.ljust(width)} : {v}\n" for k, v in lines)
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(text: str) -> Report:
    document = json.loads(text)
    return Report(
        command=document["command"],
        source=document["source"],
        outcome=document.get("outcome"),
        values=document.get("values", {}),
        provenance=document.get("provenance", {}),
        timing=document.get("timing"),
    )
