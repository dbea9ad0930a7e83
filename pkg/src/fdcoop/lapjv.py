# Dense linear assignment: Jonker-Volgenant solver plus a brute-force oracle.
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

EPS = 1e-9
UNASSIGNED = -1


@dataclass(frozen=True)
class CostMatrix:
    """A finite real cost matrix for the (rectangular) assignment problem."""

    costs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.costs, dtype=float))
        if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
            raise ValueError("cost matrix must be 2-D with at least one row and column")
        if not np.all(np.isfinite(c)):
            raise ValueError("cost matrix entries must be finite")
        object.__setattr__(self, "costs", c)

    @property
    def rows(self) -> int:
        return self.costs.shape[0]

    @property
    def cols(self) -> int:
        return self.costs.shape[1]


@dataclass(frozen=True)
class Assignment:
    """row_to_col[i] is the column of row i (UNASSIGNED for rows left out)."""

    row_to_col: np.ndarray
    total_cost: float
    u: Optional[np.ndarray] = None  # row duals, when the solver exposes them
    v: Optional[np.ndarray] = None  # column duals


def _jv(c: np.ndarray):
    """Core Jonker-Volgenant on a square matrix: returns (row_to_col, u, v).

    Three phases: column reduction (with reduction transfer), augmenting row
    reduction, and shortest augmenting paths with dual updates. Ties are broken
    toward the lowest column index throughout.
    """
    n = c.shape[0]
    v = np.zeros(n)
    x = np.full(n, UNASSIGNED, dtype=int)  # row -> col
    y = np.full(n, UNASSIGNED, dtype=int)  # col -> row

    # --- column reduction: v[j] = column minimum, assign where the argmin row is free
    matches = np.zeros(n, dtype=int)
    for j in range(n - 1, -1, -1):
        i = int(np.argmin(c[:, j]))
        v[j] = c[i, j]
        matches[i] += 1
        if matches[i] == 1:
            x[i] = j
            y[j] = i

    # --- reduction transfer: rows matched once donate slack to their column dual
    free_rows = [i for i in range(n) if matches[i] == 0]
    if n > 1:
        for i in range(n):
            if matches[i] == 1:
                j1 = x[i]
                red = c[i] - v
                red[j1] = np.inf
                v[j1] -= red.min()

    # --- augmenting row reduction, two sweeps over the unassigned rows
    for _ in range(2):
        lst = list(free_rows)
        free_rows = []
        k = 0
        guard = 0
        while k < len(lst):
            guard += 1
            if guard > 8 * n * n + 64:
                # pathological tie cycling; leave the rest to augmentation
                free_rows.extend(lst[k:])
                break
            i = lst[k]
            k += 1
            red = c[i] - v
            j1 = int(np.argmin(red))
            u1 = red[j1]
            red[j1] = np.inf
            if n > 1:
                j2 = int(np.argmin(red))
                u2 = red[j2]
            else:
                j2, u2 = j1, u1
            i1 = int(y[j1])
            if u1 < u2:
                v[j1] -= u2 - u1
            elif i1 != UNASSIGNED:
                j1 = j2
                i1 = int(y[j1])
            x[i] = j1
            y[j1] = i
            if i1 != UNASSIGNED:
                x[i1] = UNASSIGNED
                if u1 < u2:
                    k -= 1
                    lst[k] = i1  # reprocess the displaced row immediately
                else:
                    free_rows.append(i1)

    # --- shortest augmenting paths for the remaining free rows
    for f in free_rows:
        d = c[f] - v
        pred = np.full(n, f, dtype=int)
        todo = np.ones(n, dtype=bool)
        scanned: list[int] = []
        while True:
            remaining = np.flatnonzero(todo)
            dr = d[remaining]
            mind = dr.min()
            j = int(remaining[int(np.argmin(dr))])  # lowest index among minima
            todo[j] = False
            if y[j] == UNASSIGNED:
                endofpath = j
                break
            scanned.append(j)
            i = int(y[j])
            base = d[j] - (c[i, j] - v[j])
            rest = np.flatnonzero(todo)
            alt = base + c[i, rest] - v[rest]
            better = alt < d[rest]
            idx = rest[better]
            d[idx] = alt[better]
            pred[idx] = i
        mind = d[endofpath]
        for js in scanned:
            v[js] += d[js] - mind
        # augment along the alternating path back to row f
        j = endofpath
        while True:
            i = int(pred[j])
            y[j] = i
            j, x[i] = x[i], j
            if i == f:
                break

    u = c[np.arange(n), x] - v[x]
    return x, u, v


def solve_square(m: CostMatrix) -> Assignment:
    """Minimum-cost perfect assignment of a square matrix."""
    if m.rows != m.cols:
        raise ValueError(f"square solver requires rows == cols, got {m.rows}x{m.cols}")
    x, u, v = _jv(m.costs)
    total = float(m.costs[np.arange(m.rows), x].sum())
    return Assignment(row_to_col=x, total_cost=total, u=u, v=v)


def solve_rectangular(m: CostMatrix) -> Assignment:
    """Min-cost assignment covering each row at most once, each column at most once.

    With rows <= cols every row is assigned; otherwise the matrix is transposed
    internally and the surplus rows come back unassigned. Internally pads to a
    square instance with a constant exceeding every real entry, so padding never
    displaces a real pair that has a strictly better alternative.
    """
    c = m.costs
    if c.shape[0] > c.shape[1]:
        sub = solve_rectangular(CostMatrix(costs=c.T))
        row_to_col = np.full(c.shape[0], UNASSIGNED, dtype=int)
        for j, i in enumerate(sub.row_to_col):
            row_to_col[int(i)] = j
        return Assignment(row_to_col=row_to_col, total_cost=sub.total_cost)
    rows, cols = c.shape
    if rows == cols:
        return solve_square(m)
    pad = float(c.max()) + 1.0
    padded = np.full((cols, cols), pad)
    padded[:rows, :] = c
    x, _, _ = _jv(padded)
    row_to_col = x[:rows].copy()
    total = float(c[np.arange(rows), row_to_col].sum())
    return Assignment(row_to_col=row_to_col, total_cost=total)


def brute_force_assignment(m: CostMatrix) -> Assignment:
    """Exact optimum by enumeration; the independent oracle for the solver.

    Only feasible for small instances (min(rows, cols) <= 8).
    """
    c = m.costs
    if c.shape[0] > c.shape[1]:
        sub = brute_force_assignment(CostMatrix(costs=c.T))
        row_to_col = np.full(c.shape[0], UNASSIGNED, dtype=int)
        for j, i in enumerate(sub.row_to_col):
            row_to_col[int(i)] = j
        return Assignment(row_to_col=row_to_col, total_cost=sub.total_cost)
    rows, cols = c.shape
    if rows > 8:
        raise ValueError(f"instance too large for brute force: {rows} rows")
    rows_c = c.tolist()
    best_cost = np.inf
    best_perm = None
    for perm in itertools.permutations(range(cols), rows):
        cost = 0.0
        for row, j in zip(rows_c, perm):
            cost += row[j]
        if cost < best_cost:
            best_cost = cost
            best_perm = perm
    return Assignment(row_to_col=np.array(best_perm, dtype=int), total_cost=float(best_cost))


def read_matrix_file(path: str) -> CostMatrix:
    """Parse a whitespace-delimited matrix file: first line 'rows cols', then entries."""
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ValueError("matrix file must start with 'rows cols'")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
        entries = [float(t) for t in tokens[2:]]
    except ValueError as exc:
        raise ValueError(f"malformed matrix file: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be at least 1x1")
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(entries)}")
    return CostMatrix(costs=np.array(entries).reshape(rows, cols))
