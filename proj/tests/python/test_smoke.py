import json
from pathlib import Path

import pytest

import geoform

PROBLEMS = Path(__file__).resolve().parents[2] / "data" / "problems"


@pytest.fixture(scope="module")
def solver():
    return geoform.Solver()


def problem(pid):
    return geoform.load_problem(PROBLEMS / f"{pid}.json")


def test_theorems_loaded(solver):
    assert "vertical_angle" in solver.theorems


def test_check_replays(solver):
    r = solver.check(problem("p01"))
    assert r["ok"] and r["answer"] == "80"


@pytest.mark.parametrize("method,strategy", [("fw", "bfs"), ("fw", "rs"), ("bw", "bfs")])
def test_solve_and_replay(solver, method, strategy):
    p = problem("p04")
    r = solver.solve(p, method=method, strategy=strategy, timeout=20)
    assert r["outcome"] == "solved"
    assert solver.replay_solves(p, r["theorem_seqs"])


def test_session_apply_undo(solver):
    s = solver.session(problem("p01"))
    before = s.hypertree()
    out = s.apply("triangle_property_angle_sum(ABC)")
    assert out["goal_solved"] and s.solved
    assert len(s.hypertree()["edges"]) == len(before["edges"]) + 1
    s.undo()
    assert s.hypertree() == before
    with pytest.raises(IndexError):
        s.undo()


def test_errors_surface_as_value_errors(solver):
    bad = problem("p01")
    bad["text_cdl"] = ["Equal(LengthOfLine(AZ),3)"]
    with pytest.raises(ValueError):
        solver.session(bad)
    s = solver.session(problem("p01"))
    with pytest.raises(ValueError):
        s.apply("no_such_theorem")
    with pytest.raises(ValueError):
        solver.solve(problem("p01"), method="sideways")


def test_augment(solver):
    derived = solver.augment(problem("p17"))
    assert derived
    for d in derived:
        assert solver.replay_solves(d, d["theorem_seqs"])
    json.dumps(derived)
