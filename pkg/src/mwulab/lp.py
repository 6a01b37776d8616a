"""Dense two-phase simplex for the tiny linear programs used in game analysis.

Problems here have at most a few dozen variables and a few hundred rows
(triviality distance over payoff matrices, minimax value of small zero-sum
games), so a plain tableau method with Bland's rule is exact enough and keeps
the package free of external solver dependencies.
"""

from __future__ import annotations

import numpy as np

_TOL = 1e-9


class LpError(Exception):
    pass


class LpInfeasible(LpError):
    pass


class LpUnbounded(LpError):
    pass


def _pivot(tableau, cost, basis, enter, leave_row):
    piv = tableau[leave_row, enter]
    tableau[leave_row] /= piv
    for i in range(tableau.shape[0]):
        if i != leave_row and abs(tableau[i, enter]) > 0.0:
            tableau[i] -= tableau[i, enter] * tableau[leave_row]
    if abs(cost[enter]) > 0.0:
        cost -= cost[enter] * tableau[leave_row]
    basis[leave_row] = enter


def _reduced_costs(tableau, basis, c_full):
    """Cost row for the current canonical tableau, with -objective in the last slot."""
    cost = np.zeros(tableau.shape[1])
    cost[: len(c_full)] = c_full
    for i, bi in enumerate(basis):
        if abs(cost[bi]) > 0.0:
            cost -= cost[bi] * tableau[i]
    return cost


def _simplex_iterate(tableau, cost, basis):
    n_cols = tableau.shape[1] - 1
    while True:
        enter = -1
        for j in range(n_cols):  # Bland: smallest eligible index
            if cost[j] < -_TOL:
                enter = j
                break
        if enter < 0:
            return
        col = tableau[:, enter]
        best_ratio = None
        leave = -1
        for i in range(tableau.shape[0]):
            if col[i] > _TOL:
                ratio = max(tableau[i, -1], 0.0) / col[i]
                if (
                    best_ratio is None
                    or ratio < best_ratio - _TOL
                    or (abs(ratio - best_ratio) <= _TOL and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise LpUnbounded("objective unbounded below")
        _pivot(tableau, cost, basis, enter, leave)


def solve_lp(c, a_ub=None, b_ub=None, a_eq=None, b_eq=None):
    """Minimize ``c @ z`` over free variables ``z``.

    Subject to ``a_ub @ z <= b_ub`` and ``a_eq @ z = b_eq``.  Free variables
    are split into positive/negative parts internally.  Returns
    ``(z, objective)``.  Raises LpInfeasible / LpUnbounded.
    """
    c = np.asarray(c, dtype=float)
    nf = c.size
    rows = []
    rhs = []
    kinds = []  # "ub" or "eq"
    if a_ub is not None:
        a_ub = np.asarray(a_ub, dtype=float)
        b_ub = np.asarray(b_ub, dtype=float)
        for i in range(a_ub.shape[0]):
            rows.append(a_ub[i])
            rhs.append(b_ub[i])
            kinds.append("ub")
    if a_eq is not None:
        a_eq = np.asarray(a_eq, dtype=float)
        b_eq = np.asarray(b_eq, dtype=float)
        for i in range(a_eq.shape[0]):
            rows.append(a_eq[i])
            rhs.append(b_eq[i])
            kinds.append("eq")
    if not rows:
        raise LpError("no constraints given")

    m = len(rows)
    n_slack = sum(1 for k in kinds if k == "ub")
    n_real = 2 * nf + n_slack

    # Build [A, -A, slacks | rhs]; flip rows to make rhs nonnegative.
    body = np.zeros((m, n_real + 1))
    slack_idx = 0
    needs_artificial = []
    for i, (row, b, kind) in enumerate(zip(rows, rhs, kinds)):
        body[i, :nf] = row
        body[i, nf : 2 * nf] = -row
        if kind == "ub":
            body[i, 2 * nf + slack_idx] = 1.0
            slack_col = 2 * nf + slack_idx
            slack_idx += 1
        else:
            slack_col = -1
        body[i, -1] = b
        if body[i, -1] < 0.0:
            body[i] = -body[i]
        if kind == "eq" or (slack_col >= 0 and body[i, slack_col] < 0.0):
            needs_artificial.append((i, None))
        else:
            needs_artificial.append((i, slack_col))

    art_cols = [i for i, (_, sc) in enumerate(needs_artificial) if sc is None]
    n_art = len(art_cols)
    tableau = np.zeros((m, n_real + n_art + 1))
    tableau[:, :n_real] = body[:, :n_real]
    tableau[:, -1] = body[:, -1]
    basis = [0] * m
    art_at = {}
    k = 0
    for i, (_, sc) in enumerate(needs_artificial):
        if sc is None:
            col = n_real + k
            tableau[i, col] = 1.0
            basis[i] = col
            art_at[i] = col
            k += 1
        else:
            basis[i] = sc

    if n_art > 0:
        c_phase1 = np.zeros(n_real + n_art)
        c_phase1[n_real:] = 1.0
        cost = _reduced_costs(tableau, basis, c_phase1)
        _simplex_iterate(tableau, cost, basis)
        phase1_obj = -cost[-1]
        if phase1_obj > 1e-7:
            raise LpInfeasible(f"phase-1 objective {phase1_obj:.3e} > 0")
        # Drive remaining artificials out of the basis, dropping redundant rows.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n_real:
                piv_col = -1
                for j in range(n_real):
                    if abs(tableau[i, j]) > _TOL:
                        piv_col = j
                        break
                if piv_col >= 0:
                    _pivot(tableau, cost, basis, piv_col, i)
                else:
                    keep[i] = False
        tableau = tableau[keep][:, list(range(n_real)) + [-1]]
        basis = [b for b, kflag in zip(basis, keep) if kflag]

    c_full = np.concatenate([c, -c, np.zeros(n_slack)])
    cost = _reduced_costs(tableau, basis, c_full)
    _simplex_iterate(tableau, cost, basis)

    z_split = np.zeros(n_real)
    for i, bi in enumerate(basis):
        z_split[bi] = tableau[i, -1]
    z = z_split[:nf] - z_split[nf : 2 * nf]
    return z, float(c @ z)
