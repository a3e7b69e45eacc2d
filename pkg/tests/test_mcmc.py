from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from dghomog import _kernels
from dghomog.mcmc import (
    ChainConfig,
    ClassCardinalityMismatch,
    MarketPair,
    RejectionCapExceeded,
    draw_market_pair,
    iterate_chain,
    kernel_prob,
    kernel_row,
    resample_actions,
    resample_states,
    run_chain,
    run_chain_multi,
    step,
)
from dghomog.panel import Panel, SupportSpec
from dghomog.stats import tau1, tau2
from dghomog.suffstat import enumerate_RS, in_RA, in_RS, sufficient_stat

from conftest import random_panel

BINARY = SupportSpec(2, 2)


def test_pair_single_market(rng):
    assert {draw_market_pair(1, rng) for _ in range(50)} == {MarketPair(1, 1)}


def test_pair_frequencies(rng):
    counts = Counter(draw_market_pair(2, rng) for _ in range(100_000))
    assert set(counts) == {(1, 1), (1, 2), (2, 1), (2, 2)}
    for c in counts.values():
        assert abs(c / 100_000 - 0.25) < 0.01


def test_pair_deterministic():
    a = [draw_market_pair(7, np.random.default_rng(3)) for _ in range(3)]
    b = [draw_market_pair(7, np.random.default_rng(3)) for _ in range(3)]
    assert a == b


def test_states_constant_single_market(rng):
    S = np.ones((1, 6), int)
    assert np.array_equal(resample_states(S, MarketPair(1, 1), rng), S)


def test_states_stay_in_set(rng):
    for _ in range(10_000):
        S = rng.integers(1, 4, (3, 4))
        pair = draw_market_pair(3, rng)
        out = resample_states(S, pair, rng, state_count=3)
        assert in_RS(pair, S, out)


@pytest.mark.parametrize("S, pair", [
    ([[1, 2, 2], [1, 1, 2]], (1, 2)),
    ([[1, 2, 2], [1, 1, 2]], (2, 1)),
    ([[2, 1, 2], [1, 2, 1]], (1, 2)),
    ([[1, 2, 1], [1, 1, 2]], (2, 2)),
])
def test_states_uniform_on_tiny_instance(S, pair, rng):
    S = np.array(S)
    members = enumerate_RS(pair, S, 2)
    keys = [G.tobytes() for G in members]
    counts = Counter()
    draws = 200_000
    seeds = rng.integers(0, 2**32, draws)
    for s in seeds:
        out, status = _kernels.seeded_states(S, pair[0] - 1, pair[1] - 1, 2, 10**6, int(s))
        assert status == _kernels.OK
        counts[out.tobytes()] += 1
    assert set(counts) <= set(keys)
    freq = np.array([counts[k] for k in keys]) / draws
    tv = 0.5 * np.abs(freq - 1 / len(keys)).sum()
    assert tv < 0.02


def test_rejection_cap():
    # the separator rarely lands right after the first path here
    S = np.array([[1, 1, 1, 1, 1, 1, 2, 1], [1, 2, 1, 2, 1, 2, 2, 2]])
    rng = np.random.default_rng(0)
    with pytest.raises(RejectionCapExceeded):
        for _ in range(200):
            resample_states(S, MarketPair(1, 2), rng, rejection_cap=1)


def test_actions_singleton_classes(rng):
    X = Panel([[1, 2, 3, 4]], [[2, 1, 2, 1]])
    for _ in range(20):
        assert np.array_equal(resample_actions(X.states, X, rng), X.actions)


def test_actions_stay_in_set(rng):
    for _ in range(10_000):
        X = random_panel(rng, 3, 4, 3, 3)
        pair = draw_market_pair(3, rng)
        S_new = resample_states(X.states, pair, rng, state_count=3)
        A_new = resample_actions(S_new, X, rng)
        assert in_RA(S_new, X, A_new)


def test_terminal_actions_swap_evenly(rng):
    X = Panel([[1, 2], [1, 2]], [[1, 1], [1, 2]], SupportSpec(2, 2))
    first = [resample_actions(X.states, X, rng)[0, 1] for _ in range(10_000)]
    share = np.mean(np.array(first) == 1)
    assert abs(share - 0.5) < 0.02


def test_actions_class_mismatch(rng):
    X = Panel([[1, 2, 1]], [[1, 1, 1]])
    with pytest.raises(ClassCardinalityMismatch):
        resample_actions(np.array([[1, 1, 1]]), X, rng)


def test_chain_single_state():
    X = Panel([[1, 2, 1]], [[1, 2, 1]])
    assert run_chain(X, ChainConfig(K=1, seed=5), "tau1").tolist() == [tau1(X)]


def test_chain_constant_panel():
    X = Panel(np.ones((3, 4), int), np.ones((3, 4), int))
    values, draws = run_chain(X, ChainConfig(K=50, seed=1), tau2, keep_draws=True)
    assert all(d == X for d in draws)
    assert np.all(values == values[0])


def test_chain_preserves_sufficient_stat(rng):
    steps = 0
    for j in range(20):
        X = random_panel(rng, int(rng.integers(1, 11)), int(rng.integers(2, 11)), 4, 4)
        target = sufficient_stat(X)
        for state in iterate_chain(X, ChainConfig(K=500, seed=j)):
            assert sufficient_stat(state.x) == target
            steps += 1
    assert steps == 10_000


def test_compiled_and_python_paths_agree(rng):
    X = random_panel(rng, 6, 7, 3, 3)
    cfg = ChainConfig(K=300, seed=11)
    fast = run_chain_multi(X, cfg, ["tau1", "tau2"])
    slow = run_chain_multi(X, cfg, [lambda p: tau1(p), lambda p: tau2(p)], check=True)
    assert np.array_equal(fast, slow)
    assert fast[0, 0] == tau1(X) and fast[0, 1] == tau2(X)


def test_chain_deterministic(rng):
    X = random_panel(rng, 5, 6, 4, 4)
    cfg = ChainConfig(K=200, seed=2**40 + 3)
    assert np.array_equal(run_chain(X, cfg, "tau2"), run_chain(X, cfg, "tau2"))
    assert not np.array_equal(run_chain(X, cfg, "tau2"), run_chain(X, ChainConfig(K=200, seed=4), "tau2"))


def test_chain_config_validation():
    with pytest.raises(ValueError):
        ChainConfig(K=0)
    with pytest.raises(ValueError):
        ChainConfig(K=5, rejection_cap=0)


def test_kernel_constant_panel():
    X = Panel(np.ones((2, 3), int), np.ones((2, 3), int), BINARY)
    assert kernel_prob(X, X) == 1


TINY = [
    ([[2, 2, 1], [2, 1, 1]], [[1, 1, 1], [2, 2, 2]]),
    ([[1, 1, 2], [1, 2, 2]], [[2, 1, 2], [2, 1, 1]]),
    ([[1, 1, 1], [1, 1, 1]], [[1, 1, 1], [2, 2, 2]]),
]


@pytest.mark.parametrize("S, A", TINY)
def test_kernel_rows_and_symmetry(S, A):
    X = Panel(S, A, BINARY)
    row = kernel_row(X)
    assert sum(row.values(), Fraction(0)) == 1
    for Y, p in row.items():
        assert sum(kernel_row(Y).values(), Fraction(0)) == 1
        assert kernel_prob(Y, X) == p


@pytest.mark.parametrize("S, A", TINY)
def test_one_step_matches_exact_kernel(S, A, rng):
    X = Panel(S, A, BINARY)
    row = kernel_row(X)
    targets = list(row)
    assert len(targets) > 1
    counts = Counter(step(X, rng) for _ in range(40_000))
    assert set(counts) <= set(row)
    observed = np.array([counts[t] for t in targets])
    expected = np.array([float(row[t]) for t in targets]) * observed.sum()
    assert stats.chisquare(observed, expected).pvalue > 0.001
