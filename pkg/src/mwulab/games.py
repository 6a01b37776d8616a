"""Bimatrix games, builtin instances, and the regularity constants of the payoff matrix.

Payoffs are always bounded in [-1, 1].  A game carries the matrix pair (A, B)
plus a structural tag: "zero-sum" requires B == -A exactly, "coordination"
requires B == A exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .lp import solve_lp

KINDS = ("zero-sum", "coordination", "general")

_RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])
_MATCHING_PENNIES = np.array([[1.0, -1.0], [-1.0, 1.0]])

MAX_VALUE_SIZE = 10  # game_value is a desk-scale exact computation


@dataclass(frozen=True)
class BimatrixGame:
    """Payoff pair (A, B) with a structural tag; A pays player 1, B pays player 2."""

    A: np.ndarray
    B: np.ndarray
    kind: str = "general"

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        if A.ndim != 2 or A.shape != B.shape:
            raise ValueError(f"payoff matrices must share a 2-D shape, got {A.shape} and {B.shape}")
        if A.shape[0] < 2 or A.shape[1] < 2:
            raise ValueError("each player needs at least 2 strategies")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise ValueError("payoffs must be finite")
        if np.max(np.abs(A)) > 1.0 + 1e-15 or np.max(np.abs(B)) > 1.0 + 1e-15:
            raise ValueError("payoff entries must lie in [-1, 1]")
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "zero-sum" and not np.array_equal(B, -A):
            raise ValueError("zero-sum requires B == -A exactly")
        if self.kind == "coordination" and not np.array_equal(B, A):
            raise ValueError("coordination requires B == A exactly")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]

    @property
    def N(self) -> int:
        return max(self.n, self.m)


def zero_sum(A) -> BimatrixGame:
    A = np.asarray(A, dtype=float)
    return BimatrixGame(A, -A, "zero-sum")


def coordination(A) -> BimatrixGame:
    A = np.asarray(A, dtype=float)
    return BimatrixGame(A, A, "coordination")


def builtin_game(name: str, **params) -> BimatrixGame:
    """Construct a named game.

    Recognized names: "rps", "matching_pennies", "identity_coordination" (n),
    "diagonal_coordination" (diag, offdiag), "random" (seed, n, m, kind).
    """
    if name == "rps":
        return zero_sum(_RPS)
    if name == "matching_pennies":
        return zero_sum(_MATCHING_PENNIES)
    if name == "identity_coordination":
        n = int(params.get("n", 2))
        if n < 2:
            raise ValueError("identity_coordination needs n >= 2")
        return coordination(np.eye(n))
    if name == "diagonal_coordination":
        diag = np.asarray(params["diag"], dtype=float)
        offdiag = float(params.get("offdiag", 0.0))
        if diag.ndim != 1 or diag.size < 2:
            raise ValueError("diag must be a vector of length >= 2")
        if np.any(diag <= 0.0) or np.any(diag > 1.0) or not (0.0 <= offdiag <= 1.0):
            raise ValueError("need diagonal gains in (0, 1] and off-diagonal loss in [0, 1]")
        A = np.full((diag.size, diag.size), -offdiag)
        np.fill_diagonal(A, diag)
        return coordination(A)
    if name == "random":
        seed = int(params.get("seed", 0))
        n = int(params.get("n", 3))
        m = int(params.get("m", 3))
        kind = params.get("kind", "zero-sum")
        rng = np.random.default_rng(seed)
        A = rng.uniform(-1.0, 1.0, size=(n, m))
        if kind == "zero-sum":
            return zero_sum(A)
        if kind == "coordination":
            return coordination(A)
        if kind == "general":
            B = rng.uniform(-1.0, 1.0, size=(n, m))
            return BimatrixGame(A, B, "general")
        raise ValueError(f"unknown kind {kind!r}")
    raise ValueError(f"unknown builtin game {name!r}")


def diagonal_coordination_mixed_ne(diag, offdiag: float) -> np.ndarray:
    """Fully mixed equilibrium of the diagonal coordination game: weights 1/(A_i + Z), normalized."""
    diag = np.asarray(diag, dtype=float)
    w = 1.0 / (diag + float(offdiag))
    return w / w.sum()


# --- triviality distance and regularity constants ---


def triviality_distance(M) -> float:
    """Smallest payoff range of M - a_j - b_k over additive normalizations (a, b).

    Zero means the matrix is additively separable, i.e. both players have
    dominant strategies.  Solved exactly as a small LP: minimize u - l
    subject to l <= M_jk - a_j - b_k <= u.
    """
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    if M.ndim != 2:
        raise ValueError("need a 2-D matrix")
    n, m = M.shape
    if n == 1 or m == 1:
        return 0.0
    nv = n + m + 2  # variables: a (n), b (m), u, l
    iu, il = n + m, n + m + 1
    c = np.zeros(nv)
    c[iu] = 1.0
    c[il] = -1.0
    a_ub = np.zeros((2 * n * m, nv))
    b_ub = np.zeros(2 * n * m)
    r = 0
    for j in range(n):
        for k in range(m):
            # M_jk - a_j - b_k <= u
            a_ub[r, j] = -1.0
            a_ub[r, n + k] = -1.0
            a_ub[r, iu] = -1.0
            b_ub[r] = -M[j, k]
            r += 1
            # l <= M_jk - a_j - b_k
            a_ub[r, j] = 1.0
            a_ub[r, n + k] = 1.0
            a_ub[r, il] = 1.0
            b_ub[r] = M[j, k]
            r += 1
    _, val = solve_lp(c, a_ub=a_ub, b_ub=b_ub)
    return max(val, 0.0)


def triviality_distance_2x2(M) -> float:
    """Closed form for 2x2 matrices: |M11 - M12 - M21 + M22| / 2."""
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ValueError("need a 2x2 matrix")
    return abs(M[0, 0] - M[0, 1] - M[1, 0] + M[1, 1]) / 2.0


def alpha1(g: BimatrixGame) -> float:
    """Minimum triviality distance over all 2x2 submatrices of A."""
    A = g.A
    best = np.inf
    for j1, j2 in combinations(range(g.n), 2):
        for k1, k2 in combinations(range(g.m), 2):
            d = abs(A[j1, k1] - A[j1, k2] - A[j2, k1] + A[j2, k2]) / 2.0
            if d < best:
                best = d
    return float(best)


def alpha2(g: BimatrixGame) -> float:
    """Minimum absolute difference between two entries of A sharing a row or column."""
    A = g.A
    best = np.inf
    for j in range(g.n):
        for k1, k2 in combinations(range(g.m), 2):
            best = min(best, abs(A[j, k1] - A[j, k2]))
    for k in range(g.m):
        for j1, j2 in combinations(range(g.n), 2):
            best = min(best, abs(A[j1, k] - A[j2, k]))
    return float(best)


def game_value(g: BimatrixGame) -> float:
    """Minimax value of a zero-sum game, by exact LP.  Sizes above 10x10 are rejected."""
    if g.kind != "zero-sum":
        raise ValueError("game value is defined here for zero-sum games only")
    n, m = g.n, g.m
    if n > MAX_VALUE_SIZE or m > MAX_VALUE_SIZE:
        raise ValueError(f"game_value supports sizes up to {MAX_VALUE_SIZE}")
    A = g.A
    # variables: x (n), v; maximize v s.t. (A^T x)_k >= v, sum x = 1, x >= 0
    nv = n + 1
    c = np.zeros(nv)
    c[n] = -1.0
    a_ub = np.zeros((m + n, nv))
    b_ub = np.zeros(m + n)
    for k in range(m):
        a_ub[k, :n] = -A[:, k]
        a_ub[k, n] = 1.0
    for j in range(n):
        a_ub[m + j, j] = -1.0
    a_eq = np.zeros((1, nv))
    a_eq[0, :n] = 1.0
    b_eq = np.array([1.0])
    z, _ = solve_lp(c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
    return float(z[n])


@dataclass(frozen=True)
class GameConstants:
    """Derived regularity constants of a game."""

    c_A: float
    alpha1: float
    alpha2: float
    game_value: float | None = None
    r_margin: float | None = None


def game_constants(g: BimatrixGame, include_value: bool | None = None) -> GameConstants:
    """Bundle triviality distance, the 2x2 submatrix minimum, the entry-gap
    minimum, and (for small zero-sum games) the minimax value with its payoff margin."""
    if include_value is None:
        include_value = g.kind == "zero-sum" and g.n <= MAX_VALUE_SIZE and g.m <= MAX_VALUE_SIZE
    v = None
    r = None
    if include_value:
        v = game_value(g)
        r = float(np.min(np.abs(g.A - v)))
    return GameConstants(
        c_A=triviality_distance(g.A),
        alpha1=alpha1(g),
        alpha2=alpha2(g),
        game_value=v,
        r_margin=r,
    )


# --- JSON game files ---


def game_from_dict(d: dict) -> BimatrixGame:
    kind = d.get("kind", "general")
    A = np.asarray(d["A"], dtype=float)
    if "B" in d and d["B"] is not None:
        B = np.asarray(d["B"], dtype=float)
    elif kind == "zero-sum":
        B = -A
    elif kind == "coordination":
        B = A.copy()
    else:
        raise ValueError("B may be omitted only for zero-sum or coordination games")
    return BimatrixGame(A, B, kind)


def game_to_dict(g: BimatrixGame) -> dict:
    return {"A": g.A.tolist(), "B": g.B.tolist(), "kind": g.kind}


def load_game(path) -> BimatrixGame:
    with open(path) as f:
        return game_from_dict(json.load(f))


def save_game(g: BimatrixGame, path) -> None:
    with open(path, "w") as f:
        json.dump(game_to_dict(g), f, indent=2)
