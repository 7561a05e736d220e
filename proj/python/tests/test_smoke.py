import json
import math

import numpy as np
import pytest

import hjlq


def test_scalar_closed_form():
    sol = hjlq.solve_backward(hjlq.scalar_example(), 200)
    p0 = sol.P(1, 0.0)[0, 0]
    assert abs(p0 - (1 + math.sqrt(2) * math.tanh(math.sqrt(2)))) < 1e-8
    assert hjlq.scalar_riccati_oracle(1.0) == 1.0


def test_value_and_rollout_agree():
    sol = hjlq.solve_backward(hjlq.constant_example(16), threads=2)
    x0 = np.zeros(16)
    x0[0] = 1.5
    v = hjlq.value_at(sol, 0.0, x0)
    tr = hjlq.rollout(sol, 0.0, x0)
    assert v["piece"] == 2
    assert tr["piece"] == 2
    assert abs(v["value"] - tr["total_cost"]) < 1e-5
    assert tr["x"].shape == (201, 16)
    assert tr["u"].shape == (201, 16)
    assert len(v["per_piece"]) == 2


def test_terminal_slice_is_terminal_cost():
    problem = hjlq.timedep_example(16)
    sol = hjlq.solve_backward(problem, 20)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.uniform(-2, 2, 16)
        value, piece = problem.terminal_cost(x)
        v = hjlq.value_at(sol, 1.0, x)
        assert v["value"] == value
        assert v["piece"] == piece


def test_residual_small():
    sol = hjlq.solve_backward(hjlq.constant_example(16), 200)
    xs = [np.concatenate([[a, b], np.zeros(14)]) for a in (-2, 0, 2) for b in (-2, 2)]
    for piece in (1, 2):
        assert max(abs(r) for r in hjlq.residual(sol, piece, 0.5, xs)) < 1e-6


def test_json_round_trip():
    problem = hjlq.newton_example(2)
    text = problem.to_json()
    again = hjlq.load_problem(text)
    assert again.to_json() == text
    assert again.tracking and again.n == 4


def test_errors_map_to_python_exceptions():
    with pytest.raises(hjlq.ParseError):
        hjlq.load_problem(json.dumps({"builtin": "const-16d", "colour": 1}))
    bad = {"n": 1, "l": 1, "T": 1, "A": [1], "B": [1], "Mxx": [1], "Muu": [-1],
           "terminal": [{"P": [1]}]}
    with pytest.raises(ValueError, match="Muu"):
        hjlq.load_problem(json.dumps(bad))
    sol = hjlq.solve_backward(hjlq.scalar_example(), 10)
    with pytest.raises(hjlq.ValidationError):
        hjlq.feedback(sol, 2, 0.0, np.ones(1))
    escape = {"n": 1, "l": 1, "T": 2, "A": [2], "B": [1], "Mxx": [1], "Muu": [1],
              "Mxu": [2], "terminal": [{"P": [1]}]}
    with pytest.raises(hjlq.NumericError):
        hjlq.solve_backward(hjlq.load_problem(json.dumps(escape)), 100)


def test_quick_acceptance():
    checks = hjlq.acceptance_suite("quick", threads=2)
    assert checks and all(c["passed"] for c in checks), [c["id"] for c in checks if not c["passed"]]
