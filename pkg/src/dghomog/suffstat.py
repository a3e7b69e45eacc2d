"""The sufficient statistic of a panel and membership in the resampling sets.

Under homogeneity the likelihood depends on the data only through the
initial states, the pooled ``(s, a, s')`` transition counts and the pooled
terminal ``(s, a)`` counts. The state set of a market pair keeps initial
states, the per-market transition counts of every other market, and the
pooled transition counts of the pair. The action set keeps the pooled
triple and terminal counts.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .euler import TooLargeError
from .panel import Panel

DENSE_CELL_LIMIT = 2**20


class ShapeMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SufficientStat:
    """Initial states, pooled triple counts and pooled terminal counts.

    ``triple_counts[s-1, a-1, s'-1]`` and ``terminal_counts[s-1, a-1]`` when
    the table is small; for large supports ``triple_counts`` is a dict keyed
    by 1-based ``(s, a, s')``.
    """

    initial_states: np.ndarray
    triple_counts: np.ndarray | dict
    terminal_counts: np.ndarray

    def triples(self) -> dict[tuple[int, int, int], int]:
        if isinstance(self.triple_counts, dict):
            return dict(self.triple_counts)
        idx = np.argwhere(self.triple_counts)
        return {tuple(int(v) + 1 for v in ix): int(self.triple_counts[tuple(ix)]) for ix in idx}

    def terminals(self) -> dict[tuple[int, int], int]:
        idx = np.argwhere(self.terminal_counts)
        return {(int(s) + 1, int(a) + 1): int(self.terminal_counts[s, a]) for s, a in idx}

    def __eq__(self, other):
        if not isinstance(other, SufficientStat):
            return NotImplemented
        return (
            np.array_equal(self.initial_states, other.initial_states)
            and self.triples() == other.triples()
            and self.terminals() == other.terminals()
        )


def sufficient_stat(panel: Panel) -> SufficientStat:
    S, A = panel.states, panel.actions
    m, k = panel.support.state_count, panel.support.action_count
    s, a, s2 = S[:, :-1].ravel() - 1, A[:, :-1].ravel() - 1, S[:, 1:].ravel() - 1
    if m * k * m < DENSE_CELL_LIMIT:
        triples = np.zeros((m, k, m), dtype=np.int64)
        np.add.at(triples, (s, a, s2), 1)
    else:
        triples = dict(Counter(zip((s + 1).tolist(), (a + 1).tolist(), (s2 + 1).tolist())))
    terminal = np.zeros((m, k), dtype=np.int64)
    np.add.at(terminal, (S[:, -1] - 1, A[:, -1] - 1), 1)
    return SufficientStat(S[:, 0].copy(), triples, terminal)


def market_transition_counts(S: np.ndarray, state_count: int | None = None) -> np.ndarray:
    """Per-market ``(s, s')`` counts, shape ``(n, m, m)``, 1-based ids shifted."""
    S = np.asarray(S)
    m = int(S.max()) if state_count is None else state_count
    n = S.shape[0]
    counts = np.zeros((n, m, m), dtype=np.int64)
    rows = np.repeat(np.arange(n), S.shape[1] - 1)
    np.add.at(counts, (rows, S[:, :-1].ravel() - 1, S[:, 1:].ravel() - 1), 1)
    return counts


def _members(pair) -> list[int]:
    # pair entries are 1-based market ids; order and duplicates do not matter
    return sorted({int(pair[0]) - 1, int(pair[1]) - 1})


def _check_shapes(*grids):
    shapes = {np.shape(g) for g in grids}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"grid shapes differ: {sorted(shapes)}")


def in_RS(pair, S_old, S_new) -> bool:
    S_old, S_new = np.asarray(S_old), np.asarray(S_new)
    _check_shapes(S_old, S_new)
    if not np.array_equal(S_old[:, 0], S_new[:, 0]):
        return False
    m = int(max(S_old.max(), S_new.max()))
    old = market_transition_counts(S_old, m)
    new = market_transition_counts(S_new, m)
    inside = _members(pair)
    outside = np.setdiff1d(np.arange(S_old.shape[0]), inside)
    if not np.array_equal(old[outside], new[outside]):
        return False
    return bool(np.array_equal(old[inside].sum(axis=0), new[inside].sum(axis=0)))


def in_RA(S_new, X_old: Panel, A_new) -> bool:
    S_new, A_new = np.asarray(S_new), np.asarray(A_new)
    _check_shapes(S_new, A_new, X_old.states)
    m = int(max(S_new.max(), X_old.states.max()))
    k = int(max(A_new.max(), X_old.actions.max()))

    def counts(S, A):
        triples = np.zeros((m, k, m), dtype=np.int64)
        np.add.at(triples, (S[:, :-1] - 1, A[:, :-1] - 1, S[:, 1:] - 1), 1)
        terminal = np.zeros((m, k), dtype=np.int64)
        np.add.at(terminal, (S[:, -1] - 1, A[:, -1] - 1), 1)
        return triples, terminal

    t_old, e_old = counts(X_old.states, X_old.actions)
    t_new, e_new = counts(S_new, A_new)
    return bool(np.array_equal(t_old, t_new) and np.array_equal(e_old, e_new))


def check_terminal_lemma(pair, S_old, S_new) -> bool:
    """Whether the pair's pooled terminal states agree between the grids.

    Holds whenever the pair's initial states and pooled transition counts
    agree, so a ``False`` here flags a broken state step.
    """
    S_old, S_new = np.asarray(S_old), np.asarray(S_new)
    inside = _members(pair)
    return sorted(S_old[inside, -1].tolist()) == sorted(S_new[inside, -1].tolist())


def _all_grids(shape, count, limit) -> Iterator[np.ndarray]:
    cells = shape[0] * shape[1]
    if count**cells > limit:
        raise TooLargeError(f"{count}^{cells} grids exceeds limit {limit}")
    for flat in itertools.product(range(1, count + 1), repeat=cells):
        yield np.array(flat, dtype=np.int64).reshape(shape)


def enumerate_RS(pair, S, state_count: int, limit: int = 10**6) -> list[np.ndarray]:
    """Brute force: every grid over ``1..state_count`` passing :func:`in_RS`."""
    S = np.asarray(S)
    return [G for G in _all_grids(S.shape, state_count, limit) if in_RS(pair, S, G)]


def enumerate_RA(S_new, X_old: Panel, limit: int = 10**6) -> list[np.ndarray]:
    """Brute force: every action grid passing :func:`in_RA`."""
    k = X_old.support.action_count
    return [G for G in _all_grids(np.shape(S_new), k, limit) if in_RA(S_new, X_old, G)]
