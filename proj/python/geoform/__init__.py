"""Formal plane geometry reasoning engine.

Problems are plain dicts in the bundled problem-file layout. Results come
back as dicts decoded from the engine's JSON.
"""

import json
import os
from pathlib import Path

from ._geoform import Engine as _Engine
from ._geoform import ParseError, ProblemError
from ._geoform import State as _State
from ._geoform import __version__

__all__ = ["Solver", "Session", "ParseError", "ProblemError", "default_kb", "load_problem", "__version__"]


def default_kb():
    """Knowledge base shipped with the package, or GEOFORM_KB if set."""
    env = os.environ.get("GEOFORM_KB")
    if env:
        return Path(env)
    here = Path(__file__).resolve().parent
    for candidate in (here / "data" / "kb", here.parents[1] / "data" / "kb"):
        if candidate.is_dir():
            return candidate
    raise FileNotFoundError("no knowledge base found; set GEOFORM_KB")


def load_problem(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


class Solver:
    def __init__(self, kb=None):
        self._engine = _Engine(str(kb or default_kb()))

    @property
    def theorems(self):
        return self._engine.theorems()

    def check(self, problem):
        return json.loads(self._engine.check(json.dumps(problem)))

    def solve(self, problem, method="fw", strategy="bfs", timeout=30.0, depth=15, beam=20, seed=0):
        raw = self._engine.solve(json.dumps(problem), method, strategy, timeout, depth, beam, seed)
        return json.loads(raw)

    def replay_solves(self, problem, theorem_seqs):
        return self._engine.replay_solves(json.dumps(problem), list(theorem_seqs))

    def augment(self, problem):
        return [json.loads(d) for d in self._engine.augment(json.dumps(problem))]

    def session(self, problem):
        return Session(self, problem)


class Session:
    """Step-by-step application of theorems, with undo."""

    def __init__(self, solver, problem):
        self._state = _State(solver._engine, json.dumps(problem))
        self._marks = []

    def apply(self, theorem):
        self._marks.append(len(self._state))
        try:
            return json.loads(self._state.apply(theorem))
        except Exception:
            self._state.truncate(self._marks.pop())
            raise

    def undo(self):
        if not self._marks:
            raise IndexError("nothing to undo")
        self._state.truncate(self._marks.pop())

    @property
    def solved(self):
        return self._state.solved

    def applicable(self):
        return self._state.applicable()

    def hypertree(self):
        return json.loads(self._state.hypertree())
