"""Simulated entry-game panels from two equilibrium choice rules.

Four actions (no entry, firm 2 only, firm 1 only, both) and the state is
last period's action. Market ``i`` follows the first equilibrium when
``i / n <= lambda`` and the second otherwise, so ``lambda`` in ``{0, 1}``
gives homogeneous data.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .panel import Panel, SupportSpec
from .rng import derive

# entry (a, s) is the probability of action a in state s
_DGP1 = (
    (0.19, 0.30, 0.12, 0.18),
    (0.08, 0.09, 0.08, 0.07),
    (0.53, 0.48, 0.46, 0.53),
    (0.20, 0.13, 0.34, 0.22),
)
_DGP2 = (
    (0.18, 0.48, 0.03, 0.16),
    (0.20, 0.21, 0.14, 0.23),
    (0.29, 0.22, 0.13, 0.26),
    (0.33, 0.09, 0.70, 0.35),
)
SUPPORT = SupportSpec(4, 4)


@dataclass(frozen=True, eq=False)
class DGPSpec:
    ccp: np.ndarray

    def __post_init__(self):
        ccp = np.asarray(self.ccp, dtype=float)
        if ccp.ndim != 2 or ccp.shape[0] != ccp.shape[1]:
            raise ValueError("ccp must be a square matrix")
        if (ccp < 0).any() or (ccp > 1).any():
            raise ValueError("ccp entries must lie in [0, 1]")
        if not np.allclose(ccp.sum(axis=0), 1.0, rtol=0, atol=1e-12):
            raise ValueError("every ccp column must sum to 1")
        ccp.flags.writeable = False
        object.__setattr__(self, "ccp", ccp)

    def prob(self, a: int, s: int) -> float:
        return float(self.ccp[a - 1, s - 1])


def dgp1() -> DGPSpec:
    return DGPSpec(np.array(_DGP1))


def dgp2() -> DGPSpec:
    return DGPSpec(np.array(_DGP2))


@dataclass(frozen=True)
class SimConfig:
    n: int
    T: int
    lam: float
    burn_in: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.T < 2:
            raise ValueError("need n >= 1 and T >= 2")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


def uses_dgp1(i: int, n: int, lam: float) -> bool:
    return i / n <= lam


def market_rng(seed: int, i: int) -> np.random.Generator:
    """Stream for market ``i`` (1-based), independent of all other markets."""
    return np.random.default_rng(derive(seed, i))


def simulate_market(dgp: DGPSpec, T: int, burn_in: int, rng: np.random.Generator):
    """States and actions of one market over ``T`` retained periods.

    The chain starts in state 1; the last burn-in action becomes the first
    retained state.
    """
    cum = np.cumsum(dgp.ccp, axis=0)
    total = burn_in + T
    u = rng.random(total)
    states = np.empty(total, dtype=np.int64)
    actions = np.empty(total, dtype=np.int64)
    s = 1
    last = cum.shape[0] - 1
    for t in range(total):
        a = min(int(np.searchsorted(cum[:, s - 1], u[t], side="right")), last) + 1
        states[t] = s
        actions[t] = a
        s = a
    return states[burn_in:], actions[burn_in:]


def simulate_panel(config: SimConfig) -> Panel:
    first, second = dgp1(), dgp2()
    states = np.empty((config.n, config.T), dtype=np.int64)
    actions = np.empty((config.n, config.T), dtype=np.int64)
    for i in range(1, config.n + 1):
        dgp = first if uses_dgp1(i, config.n, config.lam) else second
        states[i - 1], actions[i - 1] = simulate_market(
            dgp, config.T, config.burn_in, market_rng(config.seed, i)
        )
    return Panel(states, actions, SUPPORT)
