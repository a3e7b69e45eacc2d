"""Panel data model, CSV ingestion and the capacity discretizer.

A panel holds two ``n x T`` integer grids, states and actions, with ids
running from 1 to the size of the respective support.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import BinaryIO, Iterable

import numpy as np

HEADER = ("market", "period", "state", "action")


class PanelError(ValueError):
    """Base class for malformed panel input."""


class MissingCellError(PanelError):
    pass


class OutOfRangeError(PanelError):
    pass


class NonContiguousPeriodsError(PanelError):
    pass


class TooFewPeriodsError(PanelError):
    pass


class DuplicateCellError(PanelError):
    pass


class NegativeValueError(ValueError):
    pass


@dataclass(frozen=True)
class SupportSpec:
    state_count: int
    action_count: int

    def __post_init__(self):
        if int(self.state_count) < 1 or int(self.action_count) < 1:
            raise ValueError("state_count and action_count must be >= 1")


class Panel:
    """Immutable (states, actions) pair of ``n x T`` grids.

    Ids are 1-based. The arrays are stored read-only so a panel can be
    shared between workers without copying.
    """

    __slots__ = ("states", "actions", "support", "_key")

    def __init__(self, states, actions, support: SupportSpec | None = None):
        states = np.array(states, dtype=np.int64)
        actions = np.array(actions, dtype=np.int64)
        if states.ndim != 2 or states.shape != actions.shape:
            raise PanelError(
                f"states and actions must be equal-shape 2-d grids, got "
                f"{states.shape} and {actions.shape}"
            )
        n, T = states.shape
        if n < 1:
            raise PanelError("panel needs at least one market")
        if T < 2:
            raise TooFewPeriodsError(f"panel needs T >= 2 periods, got {T}")
        if support is None:
            support = SupportSpec(int(states.max()), int(actions.max()))
        if states.min() < 1 or states.max() > support.state_count:
            raise OutOfRangeError(f"state ids must lie in 1..{support.state_count}")
        if actions.min() < 1 or actions.max() > support.action_count:
            raise OutOfRangeError(f"action ids must lie in 1..{support.action_count}")
        self._init(states, actions, support)

    def _init(self, states, actions, support):
        states.flags.writeable = False
        actions.flags.writeable = False
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "_key", None)

    @classmethod
    def _trusted(cls, states, actions, support):
        # Skips validation; for grids produced by the sampler itself.
        obj = cls.__new__(cls)
        obj._init(np.array(states, dtype=np.int64), np.array(actions, dtype=np.int64), support)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Panel is immutable")

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def T(self) -> int:
        return self.states.shape[1]

    def key(self) -> bytes:
        """Row-major byte encoding of both grids, used for hashing."""
        if self._key is None:
            object.__setattr__(
                self, "_key", self.states.tobytes() + b"|" + self.actions.tobytes()
            )
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Panel):
            return NotImplemented
        return (
            self.support == other.support
            and self.states.shape == other.states.shape
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.states.shape, self.key()))

    def __repr__(self):
        return (
            f"Panel(n={self.n}, T={self.T}, states={self.states.tolist()}, "
            f"actions={self.actions.tolist()})"
        )

    def with_grids(self, states=None, actions=None) -> "Panel":
        return Panel(
            self.states if states is None else states,
            self.actions if actions is None else actions,
            self.support,
        )


def _as_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def load_panel(source: BinaryIO | bytes | str, support: SupportSpec | None = None) -> Panel:
    """Read a long-format ``market,period,state,action`` CSV.

    Markets are renumbered 1..n in order of first appearance. Every market
    must cover periods 1..T for a common T. When ``support`` is omitted it
    is inferred from the largest observed ids.
    """
    reader = csv.reader(io.StringIO(_as_text(source)))
    try:
        header = next(reader)
    except StopIteration:
        raise PanelError("empty input") from None
    if tuple(h.strip().lower() for h in header) != HEADER:
        raise PanelError(f"expected header {','.join(HEADER)}, got {','.join(header)}")

    market_ids: dict[str, int] = {}
    cells: dict[tuple[int, int], tuple[int, int]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != 4:
            raise PanelError(f"line {lineno}: expected 4 fields, got {len(row)}")
        try:
            period, state, action = (int(f) for f in row[1:])
        except ValueError:
            raise PanelError(f"line {lineno}: non-integer field") from None
        market = market_ids.setdefault(row[0].strip(), len(market_ids) + 1)
        if period < 1:
            raise NonContiguousPeriodsError(f"line {lineno}: period {period} < 1")
        if (market, period) in cells:
            raise DuplicateCellError(f"line {lineno}: duplicate (market, period)")
        cells[(market, period)] = (state, action)

    if not cells:
        raise PanelError("no data rows")
    n = len(market_ids)
    periods: dict[int, list[int]] = {m: [] for m in range(1, n + 1)}
    for m, t in cells:
        periods[m].append(t)
    T = max(t for _, t in cells)
    names = {v: k for k, v in market_ids.items()}
    for m, ts in periods.items():
        if min(ts) != 1:
            raise NonContiguousPeriodsError(
                f"market {names[m]}: periods start at {min(ts)}, not 1"
            )
        if len(ts) != T:
            missing = sorted(set(range(1, T + 1)) - set(ts))[0]
            raise MissingCellError(f"market {names[m]}: period {missing} missing")
    if T < 2:
        raise TooFewPeriodsError("panel needs T >= 2 periods")

    states = np.empty((n, T), dtype=np.int64)
    actions = np.empty((n, T), dtype=np.int64)
    for (m, t), (s, a) in cells.items():
        states[m - 1, t - 1] = s
        actions[m - 1, t - 1] = a
    if states.min() < 1 or actions.min() < 1:
        raise OutOfRangeError("state and action ids must be >= 1")
    return Panel(states, actions, support)


def write_panel(panel: Panel) -> bytes:
    """Canonical CSV encoding, sorted by market then period."""
    lines = [",".join(HEADER)]
    for i in range(panel.n):
        for t in range(panel.T):
            lines.append(f"{i + 1},{t + 1},{panel.states[i, t]},{panel.actions[i, t]}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def discretize_capacity(
    values: Iterable[float], bin_width: float = 250.0, num_bins: int = 50
) -> list[int]:
    """Map capacities to equal-width bins ``[0, w) -> 1, [w, 2w) -> 2, ...``.

    Values beyond the last bin are absorbed into bin ``num_bins``.
    """
    if bin_width <= 0 or num_bins < 1:
        raise ValueError("bin_width must be positive and num_bins >= 1")
    out = []
    for v in values:
        v = float(v)
        if not v >= 0:
            raise NegativeValueError(f"capacity must be nonnegative, got {v}")
        out.append(min(math.floor(v / bin_width) + 1, num_bins))
    return out


def random_panel(
    rng: np.random.Generator, n: int, T: int, state_count: int, action_count: int
) -> Panel:
    """Panel with i.i.d. uniform ids; used by tests and the CLI demos."""
    return Panel(
        rng.integers(1, state_count + 1, size=(n, T)),
        rng.integers(1, action_count + 1, size=(n, T)),
        SupportSpec(state_count, action_count),
    )

