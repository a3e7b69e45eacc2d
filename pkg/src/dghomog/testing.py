"""Monte Carlo p-value and the reject/accept decision."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .mcmc import ChainConfig, run_chain_multi
from .panel import Panel
from .stats import get_statistic


class EmptyDrawsError(ValueError):
    pass


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # keep pytest from collecting this class

    tau_observed: float
    p_value: float
    K: int
    alpha: float
    reject: bool
    stat: str
    seed: int
    elapsed_ms: int = field(default=0, compare=False)

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def p_value(tau_obs: float, tau_draws: Sequence[float]) -> float:
    """Share of chain states whose statistic is at least ``tau_obs``.

    The first draw must be the observed panel itself, so the result is
    never below ``1/K``. Comparisons are exact; ties count.
    """
    draws = np.asarray(tau_draws, dtype=float)
    if draws.size == 0:
        raise EmptyDrawsError("no draws")
    if draws[0] != tau_obs:
        raise ValueError("the first draw must be the statistic of the observed panel")
    return float(np.count_nonzero(draws >= tau_obs)) / draws.size


def run_tests(
    panel: Panel, config: ChainConfig, stat_names: Sequence[str], alpha: float
) -> dict[str, TestResult]:
    """Test with several statistics evaluated along one shared chain."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    for name in stat_names:
        get_statistic(name)
    start = time.perf_counter()
    values = run_chain_multi(panel, config, list(stat_names))
    elapsed = int(round((time.perf_counter() - start) * 1000))
    results = {}
    for j, name in enumerate(stat_names):
        obs = float(values[0, j])
        p = p_value(obs, values[:, j])
        results[name] = TestResult(
            tau_observed=obs, p_value=p, K=config.K, alpha=alpha,
            reject=p <= alpha, stat=name, seed=config.seed, elapsed_ms=elapsed,
        )
    return results


def run_test(panel: Panel, config: ChainConfig, stat_name: str, alpha: float) -> TestResult:
    return run_tests(panel, config, [stat_name], alpha)[stat_name]
