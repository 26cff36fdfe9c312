"""Levelised priority queue and sorter, each in an internal and an external variant.

The external variants keep one append buffer per level and write full blocks
to run files; a level's run is loaded and sorted when that level is opened.
Both variants count elements identically, so their high-water marks agree.
"""

from __future__ import annotations

import enum
import heapq
import io
import itertools
import logging
import os
import pickle
import tempfile
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional

log = logging.getLogger(__name__)


class Mode(enum.Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


class TimeForwardError(RuntimeError):
    """A request was pushed to a level that is already being (or was) consumed."""


class SpillError(RuntimeError):
    pass


class BoundViolation(AssertionError):
    """An internal structure outgrew the bound that justified choosing it."""


# Bytes per element for each structure; fixed so byte arithmetic is reproducible.
ELEMENT_BYTES = {
    "apply_pq": 24,       # target uid pair + source uid with the low/high bit packed in
    "reduce_pq": 16,      # source uid (low/high packed) + forwarded target uid
    "reduce_sorter": 24,  # node uid + low + high
    "count_pq": 16,       # target uid + 64-bit path count
}

MIN_MEMORY = 4096


def select_mode(bound_elements: int, element_bytes: int, budget_bytes: int) -> Mode:
    if element_bytes <= 0:
        raise ValueError("element size must be positive")
    if bound_elements * element_bytes <= budget_bytes:
        return Mode.INTERNAL
    return Mode.EXTERNAL


@dataclass
class Decision:
    op_id: int
    structure: str
    bound: int
    element_bytes: int
    budget: int
    mode: Mode


@dataclass
class MemoryBudget:
    """Total memory handed out per operation; each of k structures gets total/k."""

    total: int
    element_bytes: dict[str, int] = field(default_factory=lambda: dict(ELEMENT_BYTES))
    decisions: list[Decision] = field(default_factory=list)

    def __post_init__(self):
        if self.total <= 0:
            raise ValueError("memory budget must be positive")

    def decide(
        self,
        op_id: int,
        bounds: dict[str, int],
        force: Optional[Mode] = None,
    ) -> dict[str, Mode]:
        share = self.total // max(1, len(bounds))
        out = {}
        for name, bound in bounds.items():
            eb = self.element_bytes[name]
            mode = force or select_mode(bound, eb, share)
            self.decisions.append(Decision(op_id, name, bound, eb, share, mode))
            out[name] = mode
        return out


@dataclass
class SpillConfig:
    """Where and how external runs are stored.

    With ``simulate`` the runs are written to in-memory buffers instead of
    files; the code path and the byte accounting stay the same.
    """

    temp_dir: Optional[str] = None
    op_id: str = "op"
    simulate: bool = False
    keep: bool = False
    block_items: int = 256


class _RunStore:
    """Append-only run storage keyed by name, on disk or simulated."""

    def __init__(self, cfg: SpillConfig, structure: str):
        self.cfg = cfg
        self.structure = structure
        self._bufs: dict[Any, io.BytesIO] = {}
        self._paths: dict[Any, str] = {}
        self._dir: Optional[str] = None
        self.items_written = 0

    def _path(self, key) -> str:
        if self._dir is None:
            if self.cfg.temp_dir:
                try:
                    os.makedirs(self.cfg.temp_dir, exist_ok=True)
                except OSError as exc:
                    raise SpillError(f"cannot create {self.cfg.temp_dir}: {exc}") from exc
                self._dir = self.cfg.temp_dir
            else:
                self._dir = tempfile.gettempdir()
        return os.path.join(self._dir, f"{self.cfg.op_id}.{self.structure}.{key}.run")

    def append(self, key, items: list) -> None:
        self.items_written += len(items)
        blob = pickle.dumps(items, protocol=pickle.HIGHEST_PROTOCOL)
        if self.cfg.simulate:
            self._bufs.setdefault(key, io.BytesIO()).write(blob)
            return
        path = self._paths.get(key)
        if path is None:
            path = self._paths[key] = self._path(key)
            mode = "wb"
        else:
            mode = "ab"
        try:
            with open(path, mode) as fh:
                fh.write(blob)
        except OSError as exc:
            raise SpillError(f"cannot write run {path}: {exc}") from exc

    def read(self, key) -> list:
        if self.cfg.simulate:
            buf = self._bufs.pop(key, None)
            if buf is None:
                return []
            buf.seek(0)
            return self._unpickle_all(buf)
        path = self._paths.pop(key, None)
        if path is None:
            return []
        try:
            with open(path, "rb") as fh:
                items = self._unpickle_all(fh)
        except OSError as exc:
            raise SpillError(f"cannot read run {path}: {exc}") from exc
        if not self.cfg.keep:
            os.remove(path)
        return items

    @staticmethod
    def _unpickle_all(fh) -> list:
        out: list = []
        while True:
            try:
                out.extend(pickle.load(fh))
            except EOFError:
                return out

    def close(self) -> None:
        self._bufs.clear()
        if not self.cfg.keep:
            for path in self._paths.values():
                try:
                    os.remove(path)
                except FileNotFoundError:
                    pass
        self._paths.clear()


class LevelisedPQ:
    """Priority queue whose elements are bucketed by level.

    Levels are consumed monotonically (ascending, or descending when
    ``descending``); pushing to the level being consumed or an earlier one is
    a time-forward violation.  Items within a level are consumed in sorted
    order, grouped by ``group_key``.
    """

    def __init__(
        self,
        name: str,
        mode: Mode = Mode.INTERNAL,
        *,
        descending: bool = False,
        group_key: Callable[[Any], Any] = lambda item: item[0],
        spill: Optional[SpillConfig] = None,
    ):
        self.name = name
        self.mode = mode
        self.descending = descending
        self.group_key = group_key
        self._sign = -1 if descending else 1
        self._size = 0
        self.high_water = 0
        self.pushes = 0
        self._current: Optional[int] = None
        self._levels: list[int] = []
        self._level_count: dict[int, int] = {}
        t0 = time.perf_counter()
        if mode is Mode.INTERNAL:
            self._heap: list = []
            self._seq = itertools.count()
        else:
            self._spill = spill or SpillConfig(simulate=True)
            self._store = _RunStore(self._spill, name)
            self._buffers: dict[int, list] = {}
        self.setup_s = time.perf_counter() - t0

    def __len__(self) -> int:
        return self._size

    def _check_level(self, level: int) -> None:
        if self._current is not None and self._sign * level <= self._sign * self._current:
            raise TimeForwardError(
                f"{self.name}: push to level {level} while consuming level {self._current}"
            )

    def push(self, level: int, item) -> None:
        self._check_level(level)
        if level not in self._level_count:
            self._level_count[level] = 0
            heapq.heappush(self._levels, self._sign * level)
        self._level_count[level] += 1
        if self.mode is Mode.INTERNAL:
            heapq.heappush(self._heap, (self._sign * level, item))
        else:
            buf = self._buffers.setdefault(level, [])
            buf.append(item)
            if len(buf) >= self._spill.block_items:
                self._store.append(level, buf)
                self._buffers[level] = []
        self._size += 1
        self.pushes += 1
        if self._size > self.high_water:
            self.high_water = self._size

    def next_level(self) -> Optional[int]:
        while self._levels:
            lvl = self._sign * self._levels[0]
            if self._level_count.get(lvl):
                return lvl
            heapq.heappop(self._levels)
            self._level_count.pop(lvl, None)
        return None

    def pop_level(self, level: int) -> Iterator[tuple[Any, list]]:
        """Yield ``(group, items)`` for ``level`` in sorted order.

        A group stays counted in the queue until it is yielded.
        """
        nxt = self.next_level()
        if nxt is not None and self._sign * nxt < self._sign * level:
            raise TimeForwardError(f"{self.name}: level {nxt} skipped while opening {level}")
        if self._current is not None and self._sign * level <= self._sign * self._current:
            raise TimeForwardError(f"{self.name}: level {level} was already consumed")
        self._current = level
        count = self._level_count.pop(level, 0)
        if self._levels and self._sign * self._levels[0] == level:
            heapq.heappop(self._levels)
        if not count:
            return
        if self.mode is Mode.INTERNAL:
            items = [heapq.heappop(self._heap)[1] for _ in range(count)]
        else:
            items = self._store.read(level)
            items.extend(self._buffers.pop(level, []))
            items.sort()
        key = self.group_key
        for group, grp in itertools.groupby(items, key):
            grp = list(grp)
            self._size -= len(grp)
            yield group, grp

    @property
    def spilled_items(self) -> int:
        return 0 if self.mode is Mode.INTERNAL else self._store.items_written

    def close(self) -> None:
        if self.mode is Mode.EXTERNAL:
            self._store.close()


class Sorter:
    """Sorts a batch of items; the external variant sorts fixed-size runs and merges."""

    def __init__(self, name: str, mode: Mode = Mode.INTERNAL, *, spill: Optional[SpillConfig] = None):
        self.name = name
        self.mode = mode
        self.high_water = 0
        self._items: list = []
        self._runs = 0
        t0 = time.perf_counter()
        if mode is Mode.EXTERNAL:
            self._spill = spill or SpillConfig(simulate=True)
            self._store = _RunStore(self._spill, name)
        self.setup_s = time.perf_counter() - t0

    def __len__(self) -> int:
        return len(self._items)

    def add(self, item) -> None:
        self._items.append(item)
        if len(self._items) > self.high_water:
            self.high_water = len(self._items)

    def run(self, key: Optional[Callable] = None) -> list:
        """Stable sort of everything added since the last run; empties the sorter."""
        items, self._items = self._items, []
        if self.mode is Mode.INTERNAL:
            return sorted(items, key=key)
        keyf = key or (lambda x: x)
        block = self._spill.block_items
        names = []
        for start in range(0, len(items), block):
            chunk = sorted(
                ((keyf(x), start + i, x) for i, x in enumerate(items[start:start + block])),
                key=lambda t: (t[0], t[1]),
            )
            name = f"{self._runs}"
            self._runs += 1
            self._store.append(name, chunk)
            names.append(name)
        runs = [self._store.read(n) for n in names]
        merged = heapq.merge(*runs, key=lambda t: (t[0], t[1]))
        return [x for _, _, x in merged]

    @property
    def spilled_items(self) -> int:
        return 0 if self.mode is Mode.INTERNAL else self._store.items_written

    def close(self) -> None:
        if self.mode is Mode.EXTERNAL:
            self._store.close()


def sorter_run(items, key=None, mode: Mode = Mode.INTERNAL, spill: Optional[SpillConfig] = None):
    """Sort ``items`` with a fresh sorter; returns ``(sorted_list, high_water)``."""
    s = Sorter("sorter", mode, spill=spill)
    for x in items:
        s.add(x)
    try:
        return s.run(key), s.high_water
    finally:
        s.close()
