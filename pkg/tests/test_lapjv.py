import math

import numpy as np
import pytest

from fdcoop.lapjv import (EPS, CostMatrix, brute_force_assignment,
                          read_matrix_file, solve_rectangular, solve_square)

REF3 = [[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]]


def test_cost_matrix_validation():
    with pytest.raises(ValueError):
        CostMatrix(costs=np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        CostMatrix(costs=np.array([[np.inf, 1.0], [0.0, 2.0]]))
    with pytest.raises(ValueError):
        CostMatrix(costs=np.zeros((0, 3)))


def test_solve_square_reference_matrix():
    # brute force over all 6 permutations gives 5 via rows->cols (1, 0, 2)
    result = solve_square(CostMatrix(costs=np.array(REF3)))
    assert result.total_cost == pytest.approx(5.0, abs=1e-12)
    assert list(result.row_to_col) == [1, 0, 2]


def test_solve_square_degenerate_ties():
    for n in (1, 2, 5):
        result = solve_square(CostMatrix(costs=np.full((n, n), 3.5)))
        assert result.total_cost == pytest.approx(3.5 * n, abs=1e-12)
        assert sorted(result.row_to_col) == list(range(n))


def test_solve_square_diagonal():
    c = np.ones((4, 4)) + np.random.default_rng(0).uniform(0.1, 1.0, (4, 4))
    np.fill_diagonal(c, 0.0)
    result = solve_square(CostMatrix(costs=c))
    assert result.total_cost == pytest.approx(0.0, abs=1e-12)
    assert list(result.row_to_col) == [0, 1, 2, 3]


def test_solve_square_rejects_rectangular():
    with pytest.raises(ValueError):
        solve_square(CostMatrix(costs=np.zeros((2, 3))))


def test_solve_rectangular_single_row():
    result = solve_rectangular(CostMatrix(costs=np.array([[5.0, 2.0, 7.0]])))
    assert list(result.row_to_col) == [1]
    assert result.total_cost == pytest.approx(2.0, abs=1e-12)


def test_solve_rectangular_two_by_three():
    # all 6 injections enumerate to a minimum of 9 at {0->0, 1->2}
    result = solve_rectangular(CostMatrix(costs=np.array([[1.0, 9.0, 9.0],
                                                          [1.0, 9.0, 8.0]])))
    assert list(result.row_to_col) == [0, 2]
    assert result.total_cost == pytest.approx(9.0, abs=1e-12)


def test_solve_rectangular_transpose_symmetry():
    rng = np.random.default_rng(3)
    wide = rng.uniform(0.0, 1.0, size=(3, 6))
    tall = solve_rectangular(CostMatrix(costs=wide.T))
    direct = solve_rectangular(CostMatrix(costs=wide))
    assert tall.total_cost == pytest.approx(direct.total_cost, abs=1e-9)
    pairs = [(i, int(j)) for i, j in enumerate(tall.row_to_col) if j >= 0]
    assert len(pairs) == 3  # only as many rows as columns can be served
    assert tall.total_cost == pytest.approx(sum(wide.T[i, j] for i, j in pairs), abs=1e-9)


def test_brute_force_reference_points():
    assert brute_force_assignment(CostMatrix(costs=np.array([[2.5]]))).total_cost == 2.5
    assert brute_force_assignment(CostMatrix(costs=np.array(REF3))).total_cost \
        == pytest.approx(5.0, abs=1e-12)
    with pytest.raises(ValueError, match="too large"):
        brute_force_assignment(CostMatrix(costs=np.zeros((9, 9))))


def test_solver_matches_brute_force_on_random_5x5():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        c = rng.uniform(0.0, 1.0, size=(5, 5))
        solver = solve_square(CostMatrix(costs=c))
        oracle = brute_force_assignment(CostMatrix(costs=c))
        a = math.fsum(c[i, j] for i, j in enumerate(solver.row_to_col))
        b = math.fsum(c[i, j] for i, j in enumerate(oracle.row_to_col))
        assert a == b


def test_solver_matches_brute_force_rectangular():
    rng = np.random.default_rng(8)
    for _ in range(300):
        rows = int(rng.integers(1, 5))
        cols = int(rng.integers(rows, 8))
        c = rng.uniform(-2.0, 2.0, size=(rows, cols))
        solver = solve_rectangular(CostMatrix(costs=c))
        oracle = brute_force_assignment(CostMatrix(costs=c))
        assert solver.total_cost == pytest.approx(oracle.total_cost, abs=1e-9)


def test_negative_costs_supported():
    rng = np.random.default_rng(9)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        c = rng.uniform(-5.0, 0.0, size=(n, n))
        solver = solve_square(CostMatrix(costs=c))
        oracle = brute_force_assignment(CostMatrix(costs=c))
        assert solver.total_cost == pytest.approx(oracle.total_cost, abs=1e-9)


def test_dual_feasibility_and_complementary_slackness():
    rng = np.random.default_rng(10)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        c = rng.uniform(0.0, 1.0, size=(n, n))
        result = solve_square(CostMatrix(costs=c))
        reduced = c - result.u[:, None] - result.v[None, :]
        assert reduced.min() >= -EPS
        for i, j in enumerate(result.row_to_col):
            assert abs(reduced[i, j]) <= EPS


def test_row_shift_invariance():
    rng = np.random.default_rng(11)
    c = rng.uniform(0.0, 1.0, size=(6, 6))
    base = solve_square(CostMatrix(costs=c))
    shifted = c.copy()
    shifted[2] += 10.0
    moved = solve_square(CostMatrix(costs=shifted))
    assert moved.total_cost == pytest.approx(base.total_cost + 10.0, abs=1e-9)
    # the original optimum stays optimal for the shifted instance
    manual = sum(shifted[i, j] for i, j in enumerate(base.row_to_col))
    assert manual == pytest.approx(moved.total_cost, abs=1e-9)


def test_against_scipy_on_larger_instances():
    scipy_opt = pytest.importorskip("scipy.optimize")
    rng = np.random.default_rng(12)
    for _ in range(50):
        n = int(rng.integers(10, 41))
        c = rng.uniform(-1.0, 1.0, size=(n, n))
        mine = solve_square(CostMatrix(costs=c))
        rows, cols = scipy_opt.linear_sum_assignment(c)
        assert mine.total_cost == pytest.approx(c[rows, cols].sum(), abs=1e-9)


def test_integer_cost_ties():
    rng = np.random.default_rng(13)
    for _ in range(300):
        n = int(rng.integers(2, 7))
        c = rng.integers(0, 10, size=(n, n)).astype(float)
        solver = solve_square(CostMatrix(costs=c))
        oracle = brute_force_assignment(CostMatrix(costs=c))
        assert solver.total_cost == oracle.total_cost


def test_read_matrix_file(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("2 3\n1 9 9\n1 9 8\n")
    m = read_matrix_file(str(path))
    assert m.rows == 2 and m.cols == 3
    assert m.costs[1, 2] == 8.0
    bad = tmp_path / "bad.txt"
    bad.write_text("2 3\n1 2 3\n")
    with pytest.raises(ValueError, match="expected 6 entries"):
        read_matrix_file(str(bad))
