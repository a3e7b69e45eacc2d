import json

import pytest

from dghomog.study import (
    Cell, CellResult, StudySpec, replication_seeds, results_csv, results_table,
    run_replication, run_study,
)


def small_spec(**kw):
    base = dict(cells=(Cell(4, 6, 1.0), Cell(4, 6, 0.5)), replications=3, K=50, master_seed=7)
    base.update(kw)
    return StudySpec(**base)


def test_single_replication_rate():
    spec = small_spec(replications=1)
    for r in run_study(spec, jobs=1):
        assert r.rate in (0.0, 100.0)


def test_cells_rerun_alone():
    spec = small_spec()
    full = run_study(spec, jobs=1)
    alone = run_study(small_spec(cells=(Cell(4, 6, 0.5),)), jobs=1)
    pick = [r for r in full if r.cell == Cell(4, 6, 0.5)]
    assert [r.p_values for r in pick] == [r.p_values for r in alone]
    rep = run_replication(spec, Cell(4, 6, 0.5), 2)
    assert rep["tau1"] == pick[0].p_values[2]


def test_parallel_matches_serial():
    spec = small_spec(replications=2)
    a = run_study(spec, jobs=1)
    b = run_study(spec, jobs=2)
    assert [r.p_values for r in a] == [r.p_values for r in b]


def test_seeds_differ_across_reps_and_cells():
    seen = {replication_seeds(0, c, r) for c in (Cell(4, 6, 1.0), Cell(4, 6, 0.5)) for r in range(5)}
    assert len(seen) == 10
    assert replication_seeds(0, Cell(4, 6, 1.0), 0) == replication_seeds(0, Cell(4, 6, 1.0), 0)


def test_spec_from_dict_forms():
    cells = StudySpec.from_dict({
        "cells": [{"n": 20, "T": 20, "lambda": 1}], "replications": 5, "K": 100,
    })
    assert cells.cells == (Cell(20, 20, 1.0),) and cells.K == 100
    grid = StudySpec.from_dict({
        "grid": {"n": [20, 40], "T": [5], "lambda": [0, 1]}, "replications": 2,
        "stats": ["tau2"],
    })
    assert len(grid.cells) == 4 and grid.stats == ("tau2",)


def test_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        small_spec(replications=0)
    with pytest.raises(ValueError):
        small_spec(stats=("tau9",))
    with pytest.raises(ValueError):
        StudySpec.from_dict({"replications": 1})
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"cells": [{"n": 2, "T": 3, "lambda": 0}], "replications": 1}))
    assert StudySpec.load(path).cells == (Cell(2, 3, 0.0),)


def test_outputs():
    results = [CellResult(Cell(20, 20, 1.0), "tau1", 3, 60, 1.25)]
    csv = results_csv(results).splitlines()
    assert csv[0] == "n,T,lambda,stat,rejection_rate,rejections,replications,wall_seconds"
    assert csv[1] == "20,20,1.0,tau1,5.0,3,60,1.25"
    assert "5.0" in results_table(results)
