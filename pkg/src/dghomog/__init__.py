"""Randomization tests of market and time homogeneity in dynamic discrete games."""
from .euler import enumerate_RS0, euler_resample, in_RS0
from .mcmc import (
    ChainConfig,
    MarketPair,
    draw_market_pair,
    kernel_prob,
    resample_actions,
    resample_states,
    run_chain,
    run_chain_multi,
)
from .panel import Panel, SupportSpec, discretize_capacity, load_panel, write_panel
from .simgen import SimConfig, dgp1, dgp2, simulate_panel
from .stats import ccp_market, ccp_pooled, tau1, tau2
from .suffstat import check_terminal_lemma, in_RA, in_RS, sufficient_stat
from .testing import TestResult, p_value, run_test, run_tests

__all__ = [
    "ChainConfig", "MarketPair", "Panel", "SimConfig", "SupportSpec", "TestResult",
    "ccp_market", "ccp_pooled", "check_terminal_lemma", "dgp1", "dgp2",
    "discretize_capacity", "draw_market_pair", "enumerate_RS0", "euler_resample",
    "in_RA", "in_RS", "in_RS0", "kernel_prob", "load_panel", "p_value",
    "resample_actions", "resample_states", "run_chain", "run_chain_multi",
    "run_test", "run_tests", "simulate_panel", "sufficient_stat", "tau1", "tau2",
    "write_panel",
]
