"""Empirical conditional choice probabilities and the two test statistics.

``tau1`` is a visit-weighted chi-square distance between each market's
empirical choice probabilities and the pooled ones; ``tau2`` is the
corresponding likelihood-ratio (G) statistic. Both use ``0/0 = 0`` and
``0 log 0 = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .panel import Panel

Statistic = Callable[[Panel], float]


@dataclass(frozen=True, eq=False)
class CCPTable:
    """``probs[a-1, s-1]`` is the empirical probability of action a in state s."""

    probs: np.ndarray
    state_visit_counts: np.ndarray

    def prob(self, a: int, s: int) -> float:
        return float(self.probs[a - 1, s - 1])

    def visits(self, s: int) -> int:
        return int(self.state_visit_counts[s - 1])


def _ccp(S, A, m, k) -> CCPTable:
    counts = np.zeros((k, m), dtype=np.int64)
    np.add.at(counts, (A.ravel() - 1, S.ravel() - 1), 1)
    visits = counts.sum(axis=0)
    probs = np.divide(counts, visits, out=np.zeros((k, m)), where=visits > 0)
    return CCPTable(probs, visits)


def ccp_market(panel: Panel, i: int) -> CCPTable:
    if not 1 <= i <= panel.n:
        raise IndexError(f"market {i} outside 1..{panel.n}")
    return _ccp(
        panel.states[i - 1], panel.actions[i - 1],
        panel.support.state_count, panel.support.action_count,
    )


def ccp_pooled(panel: Panel) -> CCPTable:
    return _ccp(panel.states, panel.actions, panel.support.state_count, panel.support.action_count)


def _both(panel: Panel) -> np.ndarray:
    out = np.empty(2)
    _kernels.taus(
        np.ascontiguousarray(panel.states), np.ascontiguousarray(panel.actions),
        panel.support.state_count, panel.support.action_count, out,
    )
    return out


def tau1(panel: Panel) -> float:
    return float(_both(panel)[0])


def tau2(panel: Panel) -> float:
    return float(_both(panel)[1])


STATISTICS: dict[str, Statistic] = {"tau1": tau1, "tau2": tau2}

# position of each builtin in the compiled kernel's output
BUILTIN_INDEX = {"tau1": 0, "tau2": 1}


def get_statistic(name: str) -> Statistic:
    try:
        return STATISTICS[name]
    except KeyError:
        raise ValueError(f"unknown statistic {name!r}; choose from {sorted(STATISTICS)}") from None
