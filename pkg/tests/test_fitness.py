import mpmath
import numpy as np
import pytest

from devineq.bipartite import BinaryMatrix
from devineq.errors import DegenerateMatrix, NoConvergence, NumericUnderflow
from devineq.fitness import (
    FitnessState,
    SolverConfig,
    initialize,
    randomized_state,
    rank,
    solve,
    step,
)
from devineq.synthetic import random_binary_matrix, staircase_matrix


def as_binary(entries, year=1998):
    entries = np.asarray(entries, dtype=np.uint8)
    regions = tuple(f"r{i}" for i in range(entries.shape[0]))
    sectors = tuple(f"s{j}" for j in range(entries.shape[1]))
    return BinaryMatrix(entries, regions, sectors, year)


def mpmath_fixed_point(entries, iterations, dps=60):
    """Independent high-precision oracle for the coupled map."""
    mpmath.mp.dps = dps
    n_r, n_s = entries.shape
    f = [mpmath.mpf(1)] * n_r
    q = [mpmath.mpf(1)] * n_s
    for _ in range(iterations):
        f_new = [sum(q[s] for s in range(n_s) if entries[r, s]) for r in range(n_r)]
        q_new = [
            1 / sum(1 / f[r] for r in range(n_r) if entries[r, s]) for s in range(n_s)
        ]
        f_mean = sum(f_new) / n_r
        q_mean = sum(q_new) / n_s
        f = [v / f_mean for v in f_new]
        q = [v / q_mean for v in q_new]
    return f, q


class TestInitialize:
    def test_uniform_start(self):
        state = initialize(as_binary(np.ones((3, 2))))
        assert np.array_equal(state.f, [1.0, 1.0, 1.0])
        assert np.array_equal(state.q, [1.0, 1.0])
        assert state.iteration == 0

    def test_empty_matrix_rejected(self):
        with pytest.raises(DegenerateMatrix):
            as_binary(np.zeros((2, 2)))

    def test_single_cell_is_fixed_point(self):
        m = as_binary([[1]])
        result = solve(m)
        assert result.converged_values and result.iterations_used == 1
        assert result.final_state.f[0] == 1.0 and result.final_state.q[0] == 1.0


class TestStep:
    def test_all_ones_matrix_is_fixed(self):
        m = as_binary(np.ones((2, 2)))
        state = step(m, initialize(m))
        assert np.allclose(state.f, 1.0) and np.allclose(state.q, 1.0)
        assert state.iteration == 1

    def test_one_step_hand_oracle(self):
        # M = [[1,1],[0,1]] from the uniform start, simultaneous update:
        #   raw f = (2, 1)            -> mean 3/2 -> f = (4/3, 2/3)
        #   raw q = (1/(1/1), 1/(1+1)) = (1, 1/2) -> mean 3/4 -> q = (4/3, 2/3)
        m = as_binary([[1, 1], [0, 1]])
        state = step(m, initialize(m))
        assert np.allclose(state.f, [4 / 3, 2 / 3], rtol=1e-15)
        assert np.allclose(state.q, [4 / 3, 2 / 3], rtol=1e-15)

    def test_matches_high_precision_oracle(self):
        entries = random_binary_matrix(8, 5, density=0.5, seed=10)
        m = as_binary(entries)
        state = initialize(m)
        for _ in range(25):
            state = step(m, state)
        f_ref, q_ref = mpmath_fixed_point(entries, 25)
        assert np.allclose(state.f, [float(v) for v in f_ref], rtol=1e-12)
        assert np.allclose(state.q, [float(v) for v in q_ref], rtol=1e-12)

    def test_normalization_preserved(self):
        m = as_binary(random_binary_matrix(12, 9, density=0.4, seed=3))
        state = initialize(m)
        for _ in range(50):
            state = step(m, state)
            assert abs(state.f.mean() - 1.0) < 1e-12
            assert abs(state.q.mean() - 1.0) < 1e-12

    def test_log_domain_fallback_matches_oracle(self):
        # a state already deep into value decay: naive 1/f would overflow
        m = as_binary([[1, 1], [0, 1]])
        tiny = 1e-310
        state = FitnessState(f=np.array([2.0 - tiny, tiny]), q=np.array([1.0, 1.0]), iteration=0)
        out = step(m, state)
        assert np.isfinite(out.q).all() and (out.q > 0).all()
        mpmath.mp.dps = 400
        f0, f1 = mpmath.mpf(2.0 - tiny), mpmath.mpf(tiny)
        q_raw = [1 / (1 / f0), 1 / (1 / f0 + 1 / f1)]
        q_mean = sum(q_raw) / 2
        expected = [float(v / q_mean) for v in q_raw]
        assert np.allclose(out.q, expected, rtol=1e-10)

    def test_underflow_reported_with_sector(self):
        m = as_binary([[1, 1], [0, 1]])
        state = FitnessState(f=np.array([2.0, 0.0]), q=np.array([1.0, 1.0]), iteration=0)
        with pytest.raises(NumericUnderflow, match="sector"):
            step(m, state)


class TestRank:
    def test_descending_with_ids(self):
        ranking = rank([3.0, 1.0, 2.0], ["a", "b", "c"])
        assert ranking.ids == ("a", "c", "b")
        assert ranking.ranks == {"a": 1, "c": 2, "b": 3}

    def test_ties_follow_id_order(self):
        ranking = rank([2.0, 2.0, 2.0], ["z", "m", "a"])
        assert ranking.ids == ("a", "m", "z")

    def test_scaling_leaves_ranking_unchanged(self):
        values = [0.5, 4.0, 2.0, 1.0]
        ids = ["a", "b", "c", "d"]
        assert rank(values, ids).ids == rank([7.3 * v for v in values], ids).ids

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            rank([1.0, 0.0], ["a", "b"])


class TestSolve:
    def test_all_ones_converges_at_iteration_one(self):
        m = as_binary(np.ones((4, 4)))
        result = solve(m)
        assert result.iterations_used == 1
        assert result.converged_values and result.converged_ranks
        assert np.allclose(result.final_state.f, 1.0)
        assert np.allclose(result.final_state.q, 1.0)
        post = step(m, result.final_state)
        assert np.abs(post.f - result.final_state.f).max() <= 1e-13
        assert np.abs(post.q - result.final_state.q).max() <= 1e-13

    def test_staircase_ranking_is_diversification(self):
        entries = staircase_matrix(30, 12)
        m = as_binary(entries)
        result = solve(m)
        row_sums = entries.sum(axis=1)
        expected = [
            rid for _, rid in sorted(zip(-row_sums, m.regions), key=lambda t: (t[0], t[1]))
        ]
        assert list(result.region_ranking.ids) == expected

    def test_staircase_ranking_matches_high_precision_oracle(self):
        entries = staircase_matrix(9, 6)
        m = as_binary(entries)
        result = solve(m)
        f_ref, _ = mpmath_fixed_point(entries, 200, dps=200)
        order = sorted(range(9), key=lambda i: (-f_ref[i], m.regions[i]))
        assert list(result.region_ranking.ids) == [m.regions[i] for i in order]

    def test_rank_convergence_with_value_decay(self):
        # strongly triangular matrices: values decay, rankings settle
        m = as_binary(staircase_matrix(40, 20))
        result = solve(m)
        assert result.converged_ranks
        assert not result.converged_values
        assert result.value_residual > 0
        # the smallest fitness keeps decaying toward zero after rank freeze
        decayed = result.final_state
        assert decayed.f.min() < 1e-3
        for _ in range(150):
            decayed = step(m, decayed)
        assert decayed.f.min() < result.final_state.f.min() * 1e-3

    def test_no_convergence_raises(self):
        m = as_binary(staircase_matrix(20, 10))
        with pytest.raises(NoConvergence):
            solve(m, SolverConfig(value_tol=1e-13, rank_patience=50, max_iterations=5))

    def test_permutation_equivariance(self):
        entries = random_binary_matrix(10, 7, density=0.5, seed=8)
        m = as_binary(entries)
        result = solve(m)
        perm_r = np.random.default_rng(1).permutation(10)
        perm_s = np.random.default_rng(2).permutation(7)
        permuted = BinaryMatrix(
            entries[np.ix_(perm_r, perm_s)],
            tuple(m.regions[i] for i in perm_r),
            tuple(m.sectors[j] for j in perm_s),
            1998,
        )
        result_p = solve(permuted)
        assert result.region_ranking.ids == result_p.region_ranking.ids
        assert result.sector_ranking.ids == result_p.sector_ranking.ids
        values = result.region_values()
        values_p = result_p.region_values()
        assert all(np.isclose(values[r], values_p[r], rtol=1e-12) for r in m.regions)

    def test_monotone_dominance(self):
        # region r1's sectors strictly contain r3's
        entries = np.array([
            [1, 1, 1, 1],
            [1, 1, 1, 0],
            [1, 1, 0, 0],
            [1, 0, 0, 0],
            [0, 1, 1, 0],
        ])
        m = as_binary(entries)
        result = solve(m)
        ranks = result.region_ranking.ranks
        assert ranks["r0"] < ranks["r1"] < ranks["r2"] < ranks["r3"]

    def test_initial_condition_independence(self):
        entries = random_binary_matrix(15, 10, density=0.45, seed=77)
        m = as_binary(entries)
        baseline = solve(m)
        for seed in range(5):
            result = solve(m, start=randomized_state(m, seed))
            assert result.region_ranking.ids == baseline.region_ranking.ids
            assert result.sector_ranking.ids == baseline.sector_ranking.ids

    def test_history_records_every_iteration(self):
        m = as_binary(random_binary_matrix(10, 6, density=0.5, seed=2))
        result = solve(m)
        assert len(result.history) == result.iterations_used
        iterations, residuals, stables = zip(*result.history)
        assert list(iterations) == list(range(1, result.iterations_used + 1))
        assert all(r >= 0 for r in residuals)
        assert stables[-1] or result.converged_values

    def test_fixed_point_residual_small_after_value_convergence(self):
        m = as_binary(random_binary_matrix(12, 8, density=0.6, seed=5))
        result = solve(m)
        if result.converged_values:
            post = step(m, result.final_state)
            rel_f = np.abs(post.f - result.final_state.f) / result.final_state.f
            rel_q = np.abs(post.q - result.final_state.q) / result.final_state.q
            assert max(rel_f.max(), rel_q.max()) <= 1e-12
