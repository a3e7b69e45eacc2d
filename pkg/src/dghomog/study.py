"""Rejection-rate studies over a grid of simulation designs.

Replication ``r`` of cell ``(n, T, lambda)`` draws its data and its chain
from seeds derived from ``(master_seed, n, T, lambda, r)`` only, so a cell
or a single replication can be rerun alone and match a full run.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mcmc import ChainConfig
from .rng import derive
from .simgen import SimConfig, simulate_panel
from .stats import get_statistic
from .testing import run_tests


@dataclass(frozen=True)
class Cell:
    n: int
    T: int
    lam: float

    def key(self) -> tuple[int, int, int]:
        # lambda enters seeds in parts per million
        return (self.n, self.T, int(round(self.lam * 1_000_000)))


@dataclass(frozen=True)
class StudySpec:
    cells: tuple[Cell, ...]
    replications: int
    K: int = 2000
    alpha: float = 0.05
    stats: tuple[str, ...] = ("tau1", "tau2")
    master_seed: int = 0
    burn_in: int = 100

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.cells:
            raise ValueError("study needs at least one cell")
        for name in self.stats:
            get_statistic(name)

    @classmethod
    def from_dict(cls, d: dict) -> "StudySpec":
        """Build from the JSON study schema.

        Cells come either as an explicit ``"cells"`` list of
        ``{"n", "T", "lambda"}`` objects or as a ``"grid"`` of lists whose
        product is taken.
        """
        if "cells" in d:
            cells = [Cell(int(c["n"]), int(c["T"]), float(c["lambda"])) for c in d["cells"]]
        elif "grid" in d:
            g = d["grid"]
            cells = [
                Cell(int(n), int(T), float(lam))
                for n, T, lam in itertools.product(g["n"], g["T"], g["lambda"])
            ]
        else:
            raise ValueError("study spec needs 'cells' or 'grid'")
        return cls(
            cells=tuple(cells),
            replications=int(d["replications"]),
            K=int(d.get("K", 2000)),
            alpha=float(d.get("alpha", 0.05)),
            stats=tuple(d.get("stats", ("tau1", "tau2"))),
            master_seed=int(d.get("master_seed", 0)),
            burn_in=int(d.get("burn_in", 100)),
        )

    @classmethod
    def load(cls, path) -> "StudySpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class CellResult:
    cell: Cell
    stat: str
    rejections: int
    replications: int
    wall_seconds: float
    p_values: list[float] = field(default_factory=list, repr=False)

    @property
    def rate(self) -> float:
        return 100.0 * self.rejections / self.replications


def replication_seeds(master_seed: int, cell: Cell, rep: int) -> tuple[int, int]:
    """(simulation seed, chain seed) for one replication."""
    sim, chain = derive(master_seed, *cell.key(), rep).generate_state(2, np.uint64)
    return int(sim), int(chain)


def run_replication(spec: StudySpec, cell: Cell, rep: int) -> dict[str, float]:
    sim_seed, chain_seed = replication_seeds(spec.master_seed, cell, rep)
    panel = simulate_panel(SimConfig(cell.n, cell.T, cell.lam, spec.burn_in, sim_seed))
    results = run_tests(panel, ChainConfig(K=spec.K, seed=chain_seed), list(spec.stats), spec.alpha)
    return {name: r.p_value for name, r in results.items()}


def _job(args):
    spec, cell, rep = args
    start = time.perf_counter()
    out = run_replication(spec, cell, rep)
    return cell, rep, out, time.perf_counter() - start


def run_study(spec: StudySpec, jobs: int | None = None) -> list[CellResult]:
    """Run every replication of every cell; one result per (cell, stat)."""
    jobs = jobs or os.cpu_count() or 1
    tasks = [(spec, c, r) for c in spec.cells for r in range(spec.replications)]
    p_values = {(c, s): [None] * spec.replications for c in spec.cells for s in spec.stats}
    wall = {c: 0.0 for c in spec.cells}
    if jobs == 1:
        finished = map(_job, tasks)
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        finished = pool.map(_job, tasks, chunksize=max(1, len(tasks) // (8 * jobs)))
    try:
        for cell, rep, out, seconds in finished:
            wall[cell] += seconds
            for name, p in out.items():
                p_values[(cell, name)][rep] = p
    finally:
        if jobs != 1:
            pool.shutdown()
    results = []
    for c in spec.cells:
        for s in spec.stats:
            ps = p_values[(c, s)]
            results.append(CellResult(
                cell=c, stat=s, rejections=sum(p <= spec.alpha for p in ps),
                replications=spec.replications, wall_seconds=wall[c], p_values=ps,
            ))
    return results


CSV_FIELDS = ("n", "T", "lambda", "stat", "rejection_rate", "rejections", "replications", "wall_seconds")


def results_csv(results: list[CellResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in results:
        writer.writerow([
            r.cell.n, r.cell.T, r.cell.lam, r.stat, f"{r.rate:.1f}",
            r.rejections, r.replications, f"{r.wall_seconds:.2f}",
        ])
    return buf.getvalue()


def results_table(results: list[CellResult]) -> str:
    lines = [f"{'n':>5} {'T':>5} {'lambda':>7} {'stat':>5} {'rate %':>7} {'reps':>6} {'wall s':>8}"]
    for r in results:
        lines.append(
            f"{r.cell.n:>5} {r.cell.T:>5} {r.cell.lam:>7g} {r.stat:>5} "
            f"{r.rate:>7.1f} {r.replications:>6} {r.wall_seconds:>8.1f}"
        )
    return "\n".join(lines)
