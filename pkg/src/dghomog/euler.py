"""Uniform resampling of one sequence with fixed start and fixed transitions.

An augmented sequence runs over ``{0, 1, ..., state_count}`` where 0 is the
separator used to glue two market paths together. Two sequences are
equivalent when they share the first element and the multiset of
consecutive pairs ``(x[v], x[v+1])`` for ``v = 1..V-1``; the final element
is then forced as well.
"""
from __future__ import annotations

from collections import Counter

import numpy as np

from . import _kernels
from .rng import kernel_seed


class LengthMismatchError(ValueError):
    pass


class TooLargeError(RuntimeError):
    """Raised by exhaustive enumerators when an instance is out of reach."""


def _as_seq(seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=np.int64)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise ValueError("sequence must be 1-d with at least two elements")
    if arr.min() < 0:
        raise ValueError("sequence symbols must be >= 0")
    return arr


def transition_counts(seq) -> Counter:
    """Multiset of consecutive pairs, wrap edge excluded."""
    seq = list(np.asarray(seq).tolist())
    return Counter(zip(seq[:-1], seq[1:]))


def in_RS0(a, b) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise LengthMismatchError(f"lengths differ: {a.shape} vs {b.shape}")
    return bool(a[0] == b[0]) and transition_counts(a) == transition_counts(b)


def euler_resample(seq, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw uniformly from the equivalence class of ``seq``.

    With ``size`` set, returns a ``(size, V)`` array of independent draws.
    """
    arr = _as_seq(seq)
    alphabet = int(arr.max()) + 1
    draws = _kernels.euler_batch(arr, alphabet, 1 if size is None else int(size), kernel_seed(rng))
    return draws[0] if size is None else draws


def enumerate_RS0(seq, limit: int = 10**7) -> set[tuple[int, ...]]:
    """All sequences equivalent to ``seq``, by depth-first search over
    orderings of its transition multiset.

    ``limit`` bounds the number of search nodes; exceeding it raises
    :class:`TooLargeError`.
    """
    arr = _as_seq(seq)
    V = arr.shape[0]
    remaining = transition_counts(arr)
    out_edges: dict[int, list[int]] = {}
    for (s, t) in remaining:
        out_edges.setdefault(s, []).append(t)
    result: set[tuple[int, ...]] = set()
    path = [int(arr[0])]
    visited = 0

    def dfs():
        nonlocal visited
        visited += 1
        if visited > limit:
            raise TooLargeError(f"more than {limit} search nodes")
        if len(path) == V:
            result.add(tuple(path))
            return
        s = path[-1]
        for t in out_edges.get(s, ()):
            if remaining[(s, t)] > 0:
                remaining[(s, t)] -= 1
                path.append(t)
                dfs()
                path.pop()
                remaining[(s, t)] += 1

    dfs()
    return result
