import numpy as np
import pytest

from fairbound import Alphabet, Channel, JointDistribution, Quantities, oracle_grid, oracle_optimize, theorem2_bounds
from fairbound.oracle import _Problem, best_deterministic, project_simplex
from fairbound.info import compose, mutual_information

from conftest import random_joint


def test_project_simplex(rng):
    v = rng.normal(size=(20, 5)) * 3
    p = project_simplex(v)
    assert np.all(p >= 0)
    np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-12)
    q = rng.dirichlet(np.ones(5), size=4)
    np.testing.assert_allclose(project_simplex(q), q, atol=1e-15)


def test_batched_values_match_library(rng):
    j = random_joint(rng)
    prob = _Problem(j, ("S", "X", "T"))
    q = rng.dirichlet(np.ones(4), size=(prob.na, 3))         # (A, R, Y)
    it, is_, ix = prob.values(q)
    for k in range(3):
        table = q[:, k, :].reshape(2, 3, 3, 4)
        jj = compose(j, Channel(tuple(j.variables), Alphabet.range("Y", 4), table))
        assert it[k] == pytest.approx(mutual_information(jj, "Y", "T"), abs=1e-12)
        assert is_[k] == pytest.approx(mutual_information(jj, "Y", "S"), abs=1e-12)
        assert ix[k] == pytest.approx(mutual_information(jj, "Y", "X"), abs=1e-12)


def test_result_is_feasible_and_below_upper(rng):
    j = random_joint(rng, (2, 2, 2))
    q = Quantities.from_joint(j)
    r, eps = 0.5 * q.H_X, 0.3 * q.H_S
    res = oracle_optimize(j, r, eps, restarts=8, iters=150)
    assert res.feasible
    assert res.leakage <= eps + 1e-12 and res.rate <= r + 1e-12
    assert res.utility <= theorem2_bounds(j, r, eps).best_upper + 1e-6
    jj = compose(j, res.channel)
    assert mutual_information(jj, "Y", "T") == pytest.approx(res.utility, abs=1e-9)


def test_oracle_beats_deterministic_search(rng):
    j = random_joint(rng, (2, 2, 2))
    q = Quantities.from_joint(j)
    r, eps = 0.7 * q.H_X, 0.5 * q.H_S
    det = best_deterministic(j, r, eps, y_card=2)
    res = oracle_optimize(j, r, eps, restarts=16, iters=300)
    assert res.utility >= det - 1e-3


def test_identity_target_at_zero_leakage():
    p = np.zeros((2, 2, 2))
    p[0, 0, 0] = p[1, 1, 1] = 0.3
    p[0, 1, 0] = p[1, 0, 1] = 0.2
    j = JointDistribution([Alphabet.range(n, 2) for n in "SXT"], p)
    res = oracle_optimize(j, 1.0, 0.0, restarts=8, iters=150)
    assert res.utility <= 1e-6


def test_deterministic_given_seed(rng):
    j = random_joint(rng, (2, 2, 2))
    a = oracle_grid(j, [(0.3, 0.2), (0.6, 0.1)], restarts=6, iters=80, seed=3)
    b = oracle_grid(j, [(0.6, 0.1)], restarts=6, iters=80, seed=3)
    assert a[1].utility == b[0].utility
    np.testing.assert_array_equal(a[1].channel.table, b[0].channel.table)


def test_markov_restricted_channel(rng):
    j = random_joint(rng, (2, 2, 2))
    res = oracle_optimize(j, 1.0, 1.0, restarts=4, iters=50, markov_input="X")
    assert res.channel.input_names == ("X",)


def test_rejects_negative_budget(rng):
    with pytest.raises(ValueError):
        oracle_optimize(random_joint(rng), -0.1, 0.1, restarts=2, iters=2)
