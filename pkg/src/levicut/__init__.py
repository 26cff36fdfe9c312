"""Levelised BDD/ZDD manipulation with cut-based memory prediction."""

from .core import (
    BDD,
    FALSE,
    TRUE,
    ZDD,
    ArcFiles,
    CutSet,
    DiagramFile,
    NodeRecord,
    Uid,
    deserialize,
    serialize,
    validate_diagram,
)
from .cuts import cutset_of, max_1level_cut, max_2level_cut
from .sweep import Config, Session, apply, count, equal, evaluate, reduce

__version__ = "0.1.0"

__all__ = [
    "BDD", "ZDD", "FALSE", "TRUE", "ArcFiles", "CutSet", "DiagramFile", "NodeRecord", "Uid",
    "deserialize", "serialize", "validate_diagram", "cutset_of", "max_1level_cut",
    "max_2level_cut", "Config", "Session", "apply", "count", "equal", "evaluate", "reduce",
]
