"""Per-operation statistics and the line-based stats document.

Every line of the document is ``<record> key=value ...``.  Keys whose name
ends in ``_s`` hold wall-clock seconds; everything else is deterministic for
a fixed configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

FORMAT_VERSION = 1


@dataclass
class StructStats:
    name: str
    bound: int
    mode: str
    high_water: int = 0
    element_bytes: int = 0
    budget_bytes: int = 0
    setup_s: float = 0.0
    spilled_bytes: int = 0
    # Predicted bound for every granularity the metadata allowed.
    bounds: dict[str, int] = field(default_factory=dict)

    @property
    def sound(self) -> bool:
        return self.high_water <= self.bound and all(
            self.high_water <= b for b in self.bounds.values()
        )

    @property
    def ratio(self) -> Optional[float]:
        if self.high_water == 0:
            return None
        return self.bound / self.high_water


@dataclass
class OpStats:
    op_id: int
    name: str
    granularity: str
    structures: list[StructStats] = field(default_factory=list)
    total_s: float = 0.0
    nodes_in: int = 0
    nodes_out: int = 0

    @property
    def internal(self) -> bool:
        return all(s.mode == "internal" for s in self.structures)

    def structure(self, name: str) -> StructStats:
        for s in self.structures:
            if s.name == name:
                return s
        raise KeyError(name)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _line(tag: str, items: Iterable[tuple[str, object]]) -> str:
    return " ".join([tag] + [f"{k}={_fmt(v)}" for k, v in items])


def aggregates(ops: list[OpStats]) -> dict[str, object]:
    ratios = [r for op in ops for s in op.structures if (r := s.ratio) is not None]
    geo = math.exp(sum(math.log(r) for r in ratios) / len(ratios)) if ratios else 1.0
    share = sum(op.internal for op in ops) / len(ops) if ops else 1.0
    return {
        "ops": len(ops),
        "geomean_ratio": geo,
        "internal_share": share,
        "spilled_bytes": sum(s.spilled_bytes for op in ops for s in op.structures),
        "violations": sum(not s.sound for op in ops for s in op.structures),
    }


def render(ops: list[OpStats], header: dict | None = None, result: dict | None = None) -> str:
    lines = [f"levicut-stats version={FORMAT_VERSION}"]
    if header:
        lines.append(_line("config", header.items()))
    for op in ops:
        lines.append(_line("op", [
            ("id", op.op_id), ("name", op.name), ("granularity", op.granularity),
            ("nodes_in", op.nodes_in), ("nodes_out", op.nodes_out), ("total_s", op.total_s),
        ]))
        for s in op.structures:
            items = [
                ("op", op.op_id), ("name", s.name), ("mode", s.mode), ("bound", s.bound),
                ("high_water", s.high_water), ("element_bytes", s.element_bytes),
                ("budget_bytes", s.budget_bytes), ("spilled_bytes", s.spilled_bytes),
            ]
            items += [(f"bound_{g}", b) for g, b in s.bounds.items()]
            items += [("sound", s.sound), ("setup_s", s.setup_s)]
            lines.append(_line("struct", items))
    if result:
        lines.append(_line("result", result.items()))
    lines.append(_line("aggregate", aggregates(ops).items()))
    return "\n".join(lines) + "\n"


def parse(text: str) -> list[tuple[str, dict[str, str]]]:
    out = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        tag, *rest = ln.split()
        out.append((tag, dict(tok.split("=", 1) for tok in rest)))
    return out


def strip_timing(text: str) -> str:
    """The document with every ``*_s`` field removed (for determinism checks)."""
    keep = []
    for ln in text.splitlines():
        toks = [t for t in ln.split() if not t.split("=", 1)[0].endswith("_s")]
        keep.append(" ".join(toks))
    return "\n".join(keep) + "\n"
