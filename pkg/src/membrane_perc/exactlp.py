"""Exact rational LP support for small feasibility programs.

Implements a dense tableau simplex over ``fractions.Fraction`` with
Bland's rule, for problems of the form

    maximize c.x  subject to  A x <= b,  x free,  b >= 0

(b >= 0 makes the slack basis feasible, so no phase-I is needed). Float
inputs are converted exactly; the returned optimum, solution, and row
duals are exact rationals. Intended for re-verifying margin-feasibility
verdicts and producing Farkas certificates on small instances.
"""
from __future__ import annotations

from fractions import Fraction

_MAX_ITER = 200_000


def solve_max(c, a_ub, b_ub):
    """Exact optimum of max c.x s.t. A x <= b with free x and b >= 0.

    Returns (objective, x, y) where y are the nonnegative row duals
    (A^T y = c and b.y = objective at optimality). Raises ValueError on
    negative entries of b and AssertionError if the problem is unbounded,
    which callers must rule out structurally.
    """
    a = [[Fraction(v) for v in row] for row in a_ub]
    b = [Fraction(v) for v in b_ub]
    cc = [Fraction(v) for v in c]
    m = len(a)
    nx = len(cc)
    if any(len(row) != nx for row in a):
        raise ValueError("ragged constraint matrix")
    if any(v < 0 for v in b):
        raise ValueError("b >= 0 required")

    # Columns: x+ (nx), x- (nx), slacks (m); free x = x+ - x-.
    ncols = 2 * nx + m
    obj = [Fraction(0)] * ncols
    for j in range(nx):
        obj[j] = cc[j]
        obj[nx + j] = -cc[j]
    tab = []
    for i in range(m):
        row = [Fraction(0)] * (ncols + 1)
        for j in range(nx):
            row[j] = a[i][j]
            row[nx + j] = -a[i][j]
        row[2 * nx + i] = Fraction(1)
        row[ncols] = b[i]
        tab.append(row)
    basis = [2 * nx + i for i in range(m)]

    # Reduced-cost row: z[j] = obj[j] - sum_i obj[basis[i]] * tab[i][j];
    # slack basis has zero cost, so initially z = obj.
    z = obj[:] + [Fraction(0)]

    for _ in range(_MAX_ITER):
        enter = next((j for j in range(ncols) if z[j] > 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][ncols] / tab[i][enter]
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leave])
                ):
                    best = ratio
                    leave = i
        assert leave is not None, "LP unbounded; caller must cap the objective"
        piv = tab[leave][enter]
        tab[leave] = [v / piv for v in tab[leave]]
        for i in range(m):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [vi - f * vl for vi, vl in zip(tab[i], tab[leave])]
        if z[enter] != 0:
            f = z[enter]
            z = [vz - f * vl for vz, vl in zip(z, tab[leave])]
        basis[leave] = enter
    else:
        raise AssertionError("simplex iteration cap exceeded")

    xpm = [Fraction(0)] * ncols
    for i, bi in enumerate(basis):
        xpm[bi] = tab[i][ncols]
    x = [xpm[j] - xpm[nx + j] for j in range(nx)]
    objective = sum(cj * xj for cj, xj in zip(cc, x))
    # Row duals are the negated reduced costs under the slack columns.
    y = [-z[2 * nx + i] for i in range(m)]
    return objective, x, y


def margin_feasibility(a_rows):
    """Exact verdict for {x : A x >= 1 componentwise}.

    Solves max t s.t. A x >= t, t <= 1. Returns (t_star, x, farkas) with
    farkas None when t_star > 0 (then x / t_star satisfies A x >= 1) or
    an exact witness y >= 0, A^T y = 0, sum(y) = 1 when t_star == 0.
    """
    m = len(a_rows)
    nx = len(a_rows[0]) if m else 0
    # Variables (x, t): rows -A x + t <= 0 and t <= 1.
    a_ub = [[-Fraction(v) for v in row] + [Fraction(1)] for row in a_rows]
    a_ub.append([Fraction(0)] * nx + [Fraction(1)])
    b_ub = [Fraction(0)] * m + [Fraction(1)]
    c = [Fraction(0)] * nx + [Fraction(1)]
    objective, sol, duals = solve_max(c, a_ub, b_ub)
    t_star = objective
    x = sol[:nx]
    if t_star > 0:
        return t_star, [v / t_star for v in x], None
    y = duals[:m]
    assert all(v >= 0 for v in y)
    assert sum(y) == 1
    for j in range(nx):
        assert sum(Fraction(a_rows[i][j]) * y[i] for i in range(m)) == 0
    return t_star, None, y
