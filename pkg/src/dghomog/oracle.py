"""Brute-force ground truth on tiny panels.

The reachable set (orbit) of a panel under positive-probability chain
steps is enumerated exactly, the transition kernel restricted to it is
computed in exact rationals, and the real sampler is checked to visit the
orbit uniformly.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .mcmc import ChainConfig, iterate_chain, kernel_prob, kernel_row
from .panel import Panel, SupportSpec
from .suffstat import sufficient_stat

Kernel = Callable[[Panel, Panel], Fraction]


@dataclass(frozen=True)
class Orbit:
    members: tuple[Panel, ...]
    index: dict

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.index


def orbit_bfs(x: Panel) -> Orbit:
    """Closure of ``{x}`` under one-step transitions of positive probability."""
    seen = {x: 0}
    order = [x]
    queue = deque([x])
    while queue:
        y = queue.popleft()
        for z in kernel_row(y):
            if z not in seen:
                seen[z] = len(order)
                order.append(z)
                queue.append(z)
    return Orbit(tuple(order), seen)


def same_stat_count(x: Panel) -> int:
    """Number of panels on the same support sharing the sufficient statistic of ``x``."""
    target = sufficient_stat(x)
    m, k = x.support.state_count, x.support.action_count
    cells = x.n * x.T
    shape = x.states.shape
    # initial states are fixed, so only the later columns vary
    count = 0
    fixed = x.states[:, 0]
    free = [(i, t) for i in range(x.n) for t in range(1, x.T)]
    S = np.empty(shape, dtype=np.int64)
    S[:, 0] = fixed
    for svals in itertools.product(range(1, m + 1), repeat=len(free)):
        for (i, t), v in zip(free, svals):
            S[i, t] = v
        for avals in itertools.product(range(1, k + 1), repeat=cells):
            y = Panel._trusted(S, np.array(avals).reshape(shape), x.support)
            if sufficient_stat(y) == target:
                count += 1
    return count


def visit_frequencies(x: Panel, orbit: Orbit, steps: int, seed: int = 0) -> np.ndarray:
    counts = np.zeros(len(orbit))
    for state in iterate_chain(x, ChainConfig(K=steps, seed=seed)):
        pos = orbit.index.get(state.x)
        if pos is None:
            raise AssertionError(f"chain left the orbit at step {state.k}")
        counts[pos] += 1
    return counts / steps


def verify_uniform_stationarity(
    x: Panel, steps: int, seed: int = 0, orbit: Orbit | None = None
) -> float:
    """Total-variation distance between the chain's visit frequencies over
    ``steps`` states and the uniform distribution on the orbit."""
    orbit = orbit_bfs(x) if orbit is None else orbit
    freq = visit_frequencies(x, orbit, steps, seed)
    return 0.5 * float(np.abs(freq - 1.0 / len(orbit)).sum())


def exact_symmetry_check(
    x: Panel, kernel: Kernel = kernel_prob, orbit: Orbit | None = None
) -> bool:
    """Exact check that the kernel is symmetric on the orbit and that every
    row sums to one."""
    orbit = orbit_bfs(x) if orbit is None else orbit
    members = orbit.members
    matrix = [[kernel(a, b) for b in members] for a in members]
    for i, row in enumerate(matrix):
        if sum(row, Fraction(0)) != 1:
            return False
        for j in range(i + 1, len(members)):
            if row[j] != matrix[j][i]:
                return False
    return True


def corrupted_kernel(a: Panel, b: Panel) -> Fraction:
    """Kernel with ``|R_A|`` off by one, for mutation-testing the verifiers."""
    return kernel_prob(a, b, ra_offset=1)


@dataclass(frozen=True)
class Report:
    name: str
    orbit_size: int
    same_stat_size: int
    symmetric: bool
    tv: float
    tv_threshold: float

    @property
    def ok(self) -> bool:
        return self.symmetric and self.tv < self.tv_threshold

    def lines(self) -> list[str]:
        return [
            f"preset {self.name}",
            f"  orbit size           {self.orbit_size}",
            f"  same-statistic size  {self.same_stat_size}",
            f"  kernel symmetric     {self.symmetric}",
            f"  TV to uniform        {self.tv:.5f} (threshold {self.tv_threshold})",
            f"  verdict              {'PASS' if self.ok else 'FAIL'}",
        ]


def run_report(
    name: str, x: Panel, steps: int = 200_000, seed: int = 0,
    kernel: Kernel = kernel_prob, tv_threshold: float = 0.02,
) -> Report:
    orbit = orbit_bfs(x)
    return Report(
        name=name,
        orbit_size=len(orbit),
        same_stat_size=same_stat_count(x),
        symmetric=exact_symmetry_check(x, kernel, orbit),
        tv=verify_uniform_stationarity(x, steps, seed, orbit),
        tv_threshold=tv_threshold,
    )


# Named tiny instances for the verify command, all n=2, T=3 on binary
# state and action supports. tiny1 is constant, so every resampling set is
# a singleton; tiny2 and tiny4 move state paths between the two markets;
# tiny3 and tiny5 only permute actions.
PRESETS: dict[str, tuple[list, list]] = {
    "tiny1": ([[1, 1, 1], [1, 1, 1]], [[1, 1, 1], [1, 1, 1]]),
    "tiny2": ([[2, 2, 1], [2, 1, 1]], [[1, 1, 1], [2, 2, 2]]),
    "tiny3": ([[1, 1, 1], [1, 1, 1]], [[1, 1, 1], [2, 2, 2]]),
    "tiny4": ([[1, 1, 2], [1, 2, 2]], [[2, 1, 2], [2, 1, 1]]),
    "tiny5": ([[2, 2, 2], [2, 2, 2]], [[1, 2, 2], [2, 1, 1]]),
}
PRESET_SUPPORT = SupportSpec(2, 2)


def preset(name: str) -> Panel:
    try:
        states, actions = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return Panel(states, actions, PRESET_SUPPORT)
