"""Run reports: one JSON object per CLI invocation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Any

TOOL = "uag"
VERSION = "0.1.0"


def digest(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return "sha256:" + hashlib.sha256(data).hexdigest()


def points_json(points) -> list[list[int]]:
    return [[int(c) for c in p] for p in points]


@dataclass
class RunReport:
    command: list[str]
    input_digest: str | None = None
    result: dict[str, Any] = field(default_factory=dict)
    verdict: str = ""
    wall_time: float | None = None
    tool: str = TOOL
    version: str = VERSION

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        lines = [f"{self.tool} {' '.join(self.command)}: {self.verdict}"]
        lines += _render(self.result, 1)
        if self.wall_time is not None:
            lines.append(f"  wall time: {self.wall_time:.3f}s")
        return "\n".join(lines) + "\n"


def _scalar(v: Any) -> bool:
    return not isinstance(v, (dict, list)) or (
        isinstance(v, list) and len(v) <= 16 and all(not isinstance(x, (dict, list)) or
                                                     (isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x))
                                                     for x in v))


def _fmt(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def _render(obj: Any, level: int) -> list[str]:
    pad = "  " * level
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if _scalar(v):
                out.append(f"{pad}{k}: {_fmt(v)}")
            else:
                out.append(f"{pad}{k}:")
                out.extend(_render(v, level + 1))
    elif isinstance(obj, list):
        for v in obj:
            if _scalar(v):
                out.append(f"{pad}- {_fmt(v)}")
            else:
                out.append(f"{pad}-")
                out.extend(_render(v, level + 1))
    else:
        out.append(f"{pad}{_fmt(obj)}")
    return out
