"""The data-transformation Markov chain.

Each step draws an ordered market pair uniformly from the ``n**2`` choices,
redraws the state grid uniformly among grids that keep every initial
state, every other market's transition counts and the pair's pooled
transition counts, then redraws actions uniformly among grids that keep
the pooled ``(s, a, s')`` and terminal ``(s, a)`` counts.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .euler import TooLargeError
from .panel import Panel
from .rng import kernel_seed, seed_to_kernel
from .stats import BUILTIN_INDEX, STATISTICS, Statistic
from .suffstat import enumerate_RA, enumerate_RS, sufficient_stat

log = logging.getLogger(__name__)

DEFAULT_REJECTION_CAP = 10**6
ENUMERATION_LIMIT = 10**6


class RejectionCapExceeded(RuntimeError):
    pass


class ClassCardinalityMismatch(ValueError):
    pass


class SufficientStatViolation(AssertionError):
    pass


class MarketPair(NamedTuple):
    """Ordered pair of 1-based market ids; ``i1 == i2`` is allowed."""

    i1: int
    i2: int


@dataclass(frozen=True)
class ChainConfig:
    K: int
    seed: int = 0
    rejection_cap: int = DEFAULT_REJECTION_CAP

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.rejection_cap < 1:
            raise ValueError("rejection_cap must be >= 1")


@dataclass(frozen=True)
class ChainState:
    x: Panel
    k: int


def _raise_status(status: int, cap: int):
    if status == _kernels.REJECTION_CAP:
        raise RejectionCapExceeded(f"no accepted pair arrangement in {cap} tries")
    if status == _kernels.CLASS_MISMATCH:
        raise ClassCardinalityMismatch(
            "transition classes of old and new state grids differ in size"
        )


def draw_market_pair(n: int, rng: np.random.Generator) -> MarketPair:
    if n < 1:
        raise ValueError("n must be >= 1")
    i1, i2 = rng.integers(1, n + 1, size=2)
    return MarketPair(int(i1), int(i2))


def resample_states(
    S_prev, pair: MarketPair, rng: np.random.Generator,
    rejection_cap: int = DEFAULT_REJECTION_CAP, state_count: int | None = None,
) -> np.ndarray:
    S_prev = np.ascontiguousarray(S_prev, dtype=np.int64)
    n = S_prev.shape[0]
    i1, i2 = int(pair[0]), int(pair[1])
    if not (1 <= i1 <= n and 1 <= i2 <= n):
        raise IndexError(f"pair {pair} outside 1..{n}")
    m = int(S_prev.max()) if state_count is None else state_count
    S_new, status = _kernels.seeded_states(
        S_prev, i1 - 1, i2 - 1, m, rejection_cap, kernel_seed(rng)
    )
    _raise_status(status, rejection_cap)
    return S_new


def resample_actions(S_new, X_prev: Panel, rng: np.random.Generator) -> np.ndarray:
    S_new = np.ascontiguousarray(S_new, dtype=np.int64)
    if S_new.shape != X_prev.states.shape:
        raise ClassCardinalityMismatch("state grid shape differs from the panel")
    m = max(X_prev.support.state_count, int(S_new.max()))
    A_new, status = _kernels.seeded_actions(
        np.ascontiguousarray(X_prev.states), np.ascontiguousarray(X_prev.actions),
        S_new, m, kernel_seed(rng),
    )
    _raise_status(status, 0)
    return A_new


def step(panel: Panel, rng: np.random.Generator, rejection_cap: int = DEFAULT_REJECTION_CAP) -> Panel:
    """One transition of the chain from ``panel``."""
    S = np.array(panel.states)
    A = np.array(panel.actions)
    status = _kernels.seeded_step(S, A, panel.support.state_count, rejection_cap, kernel_seed(rng))
    _raise_status(status, rejection_cap)
    return Panel._trusted(S, A, panel.support)


def iterate_chain(panel: Panel, config: ChainConfig) -> Iterator[ChainState]:
    """Yield the K chain states, starting with ``panel`` itself."""
    S = np.array(panel.states)
    A = np.array(panel.actions)
    S_tmp, A_tmp = np.empty_like(S), np.empty_like(A)
    m = panel.support.state_count
    _kernels.seed(seed_to_kernel(config.seed))
    yield ChainState(panel, 1)
    for k in range(2, config.K + 1):
        status = _kernels.step(S, A, S_tmp, A_tmp, m, config.rejection_cap)
        _raise_status(status, config.rejection_cap)
        yield ChainState(Panel._trusted(S, A, panel.support), k)


def _builtin_name(stat) -> str | None:
    if isinstance(stat, str):
        if stat not in STATISTICS:
            raise ValueError(f"unknown statistic {stat!r}")
        return stat
    for name, fn in STATISTICS.items():
        if stat is fn:
            return name
    return None


def run_chain_multi(
    panel: Panel, config: ChainConfig, stats: Sequence[str | Statistic],
    check: bool = False, keep_draws: bool = False,
):
    """Statistic values along one chain, shape ``(K, len(stats))``.

    Builtin statistics run entirely in compiled code. Any other callable
    forces a Python-level loop over the same compiled step, which draws
    the identical chain for the same seed. ``check`` asserts that every
    chain state keeps the sufficient statistic of ``panel``; with
    ``keep_draws`` the chain states are also returned.
    """
    names = [_builtin_name(s) for s in stats]
    if all(names) and not check and not keep_draws:
        which = np.array([BUILTIN_INDEX[n] for n in names], dtype=np.int64)
        values, status = _kernels.run_chain(
            np.ascontiguousarray(panel.states), np.ascontiguousarray(panel.actions),
            panel.support.state_count, panel.support.action_count,
            config.K, config.rejection_cap, seed_to_kernel(config.seed), which,
        )
        _raise_status(status, config.rejection_cap)
        return values

    fns = [STATISTICS[n] if n else s for n, s in zip(names, stats)]
    target = sufficient_stat(panel) if check else None
    values = np.empty((config.K, len(fns)))
    draws = [] if keep_draws else None
    for state in iterate_chain(panel, config):
        x = state.x
        if check and sufficient_stat(x) != target:
            raise SufficientStatViolation(f"sufficient statistic changed at step {state.k}")
        values[state.k - 1] = [f(x) for f in fns]
        if keep_draws:
            draws.append(x)
    return (values, draws) if keep_draws else values


def run_chain(panel: Panel, config: ChainConfig, stat: str | Statistic, **kwargs):
    out = run_chain_multi(panel, config, [stat], **kwargs)
    if isinstance(out, tuple):
        return out[0][:, 0], out[1]
    return out[:, 0]


# Exact kernel on enumerable instances.

def _check_enumerable(x: Panel):
    m, k = x.support.state_count, x.support.action_count
    if (m * k) ** (x.n * x.T) > ENUMERATION_LIMIT:
        raise TooLargeError(
            f"|S|^(nT) |A|^(nT) = {(m * k) ** (x.n * x.T)} exceeds {ENUMERATION_LIMIT}"
        )


@lru_cache(maxsize=4096)
def _rs(pair: MarketPair, s_key: bytes, shape: tuple, m: int) -> tuple[bytes, ...]:
    S = np.frombuffer(s_key, dtype=np.int64).reshape(shape)
    return tuple(G.tobytes() for G in enumerate_RS(pair, S, m))


@lru_cache(maxsize=65536)
def _ra(s_new_key: bytes, x: Panel) -> tuple[bytes, ...]:
    S_new = np.frombuffer(s_new_key, dtype=np.int64).reshape(x.states.shape)
    return tuple(G.tobytes() for G in enumerate_RA(S_new, x))


def kernel_row(x: Panel, ra_offset: int = 0) -> dict[Panel, Fraction]:
    """Exact one-step transition probabilities out of ``x``.

    Sums ``1 / (n^2 |R_S| |R_A|)`` over market pairs and over members of
    the two sets, both obtained by brute-force filtering. ``ra_offset`` is
    added to ``|R_A|`` and exists only to test the verifiers.
    """
    _check_enumerable(x)
    n = x.n
    shape = x.states.shape
    row: dict[Panel, Fraction] = {}
    for i1 in range(1, n + 1):
        for i2 in range(1, n + 1):
            rs = _rs(MarketPair(i1, i2), x.states.tobytes(), shape, x.support.state_count)
            for s_key in rs:
                ra = _ra(s_key, x)
                weight = Fraction(1, n * n * len(rs) * (len(ra) + ra_offset))
                S_new = np.frombuffer(s_key, dtype=np.int64).reshape(shape)
                for a_key in ra:
                    A_new = np.frombuffer(a_key, dtype=np.int64).reshape(shape)
                    y = Panel._trusted(S_new, A_new, x.support)
                    row[y] = row.get(y, Fraction(0)) + weight
    return row


def kernel_prob(x_from: Panel, x_to: Panel, ra_offset: int = 0) -> Fraction:
    return _cached_row(x_from, ra_offset).get(x_to, Fraction(0))


@lru_cache(maxsize=1024)
def _cached_row(x: Panel, ra_offset: int) -> dict[Panel, Fraction]:
    return kernel_row(x, ra_offset)
