import math

import numpy as np
import pytest

from dghomog.simgen import (
    DGPSpec, SimConfig, dgp1, dgp2, market_rng, simulate_market, simulate_panel, uses_dgp1,
)

# transcribed row by row: rows are actions, columns are states
DGP1_TEXT = """
0.19 0.30 0.12 0.18
0.08 0.09 0.08 0.07
0.53 0.48 0.46 0.53
0.20 0.13 0.34 0.22
"""
DGP2_TEXT = """
0.18 0.48 0.03 0.16
0.20 0.21 0.14 0.23
0.29 0.22 0.13 0.26
0.33 0.09 0.70 0.35
"""


def parse(text):
    return [[float(tok) for tok in line.split()] for line in text.strip().splitlines()]


@pytest.mark.parametrize("make, text", [(dgp1, DGP1_TEXT), (dgp2, DGP2_TEXT)])
def test_constants_byte_match(make, text):
    expected = np.array(parse(text))
    got = make().ccp
    assert got.shape == (4, 4)
    assert got.tobytes() == expected.tobytes()


def test_named_entries():
    assert dgp1().prob(3, 1) == 0.53
    assert dgp2().prob(4, 3) == 0.70


@pytest.mark.parametrize("make", [dgp1, dgp2])
def test_columns_sum_to_one(make):
    ccp = make().ccp
    for s in range(4):
        assert math.fsum(ccp[:, s]) == 1.0


def test_dgp_validation():
    with pytest.raises(ValueError):
        DGPSpec(np.full((2, 2), 0.4))
    with pytest.raises(ValueError):
        DGPSpec(np.array([[1.5, 0.0], [-0.5, 1.0]]))
    with pytest.raises(ValueError):
        DGPSpec(np.ones((2, 3)) / 2)


def test_mixture_split():
    assert sum(uses_dgp1(i, 160, 0.9) for i in range(1, 161)) == 144
    assert sum(uses_dgp1(i, 20, 0.5) for i in range(1, 21)) == 10
    assert all(uses_dgp1(i, 7, 1.0) for i in range(1, 8))
    assert not any(uses_dgp1(i, 7, 0.0) for i in range(1, 8))


def test_config_validation():
    for bad in [dict(n=0, T=5, lam=1), dict(n=2, T=1, lam=1), dict(n=2, T=5, lam=1.2),
                dict(n=2, T=5, lam=0.5, burn_in=-1)]:
        with pytest.raises(ValueError):
            SimConfig(**bad)


@pytest.mark.parametrize("lam", [0.0, 0.5, 0.9, 1.0])
def test_transition_identity(lam):
    p = simulate_panel(SimConfig(n=12, T=15, lam=lam, seed=4))
    assert p.support.state_count == 4 and p.support.action_count == 4
    assert np.array_equal(p.states[:, 1:], p.actions[:, :-1])


def test_burn_in_seam():
    dgp = dgp1()
    s_full, a_full = simulate_market(dgp, 30, 0, market_rng(11, 1))
    s_cut, a_cut = simulate_market(dgp, 20, 10, market_rng(11, 1))
    assert s_full[0] == 1
    assert np.array_equal(s_cut, s_full[10:]) and np.array_equal(a_cut, a_full[10:])
    assert s_cut[0] == a_full[9]


def test_boundary_lambdas_match_single_dgp():
    n, T, seed = 5, 12, 2
    for lam, dgp in [(1.0, dgp1()), (0.0, dgp2())]:
        p = simulate_panel(SimConfig(n, T, lam, seed=seed))
        for i in range(1, n + 1):
            s, a = simulate_market(dgp, T, 100, market_rng(seed, i))
            assert np.array_equal(p.states[i - 1], s) and np.array_equal(p.actions[i - 1], a)


def test_markets_on_expected_dgp():
    n, T, seed = 20, 8, 6
    p = simulate_panel(SimConfig(n, T, 0.5, seed=seed))
    for i in range(1, n + 1):
        dgp = dgp1() if i <= 10 else dgp2()
        _, a = simulate_market(dgp, T, 100, market_rng(seed, i))
        assert np.array_equal(p.actions[i - 1], a)


def test_long_run_ccp_converges():
    # 20 markets of 10^4 periods each; a single market leaves rarely visited
    # states with standard errors close to the tolerance
    for lam, dgp in [(1.0, dgp1()), (0.0, dgp2())]:
        p = simulate_panel(SimConfig(20, 10_000, lam, seed=8))
        s, a = p.states.ravel(), p.actions.ravel()
        for state in range(1, 5):
            mask = s == state
            emp = np.bincount(a[mask], minlength=5)[1:] / mask.sum()
            assert np.abs(emp - dgp.ccp[:, state - 1]).max() < 0.02


def test_market_streams_independent():
    a = simulate_panel(SimConfig(6, 10, 1.0, seed=1))
    b = simulate_panel(SimConfig(6, 10, 1.0, seed=2))
    # swapping one market's stream leaves the others untouched
    s, act = simulate_market(dgp1(), 10, 100, market_rng(2, 3))
    states = a.states.copy()
    actions = a.actions.copy()
    states[2], actions[2] = s, act
    assert np.array_equal(states[2], b.states[2])
    assert np.array_equal(np.delete(states, 2, 0), np.delete(a.states, 2, 0))
    # a larger panel shares its first markets with a smaller one
    big = simulate_panel(SimConfig(9, 10, 1.0, seed=1))
    assert np.array_equal(big.states[:6], a.states)


def test_deterministic():
    cfg = SimConfig(7, 9, 0.5, seed=123)
    assert simulate_panel(cfg) == simulate_panel(cfg)
    assert simulate_panel(cfg) != simulate_panel(SimConfig(7, 9, 0.5, seed=124))
