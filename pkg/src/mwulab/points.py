"""Dual-space and primal-space points, the softmax conversion between them,
and the region predicates used by the volume experiments.

The dual space is R^n x R^m of step-size-scaled cumulative payoffs; the primal
space is the product of the two strategy simplices.  The conversion G is a
per-player softmax and is invariant to constant shifts of p or q, so dual
points form fibers over primal points.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

SIMPLEX_TOL = 1e-12


def _as_vector(v, name):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"{name} must be a 1-D vector")
    return v


@dataclass(frozen=True)
class DualPoint:
    """Cumulative-payoff pair (p, q); entries must be finite."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = _as_vector(self.p, "p")
        q = _as_vector(self.q, "q")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise ValueError("dual coordinates must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.p.size

    @property
    def m(self) -> int:
        return self.q.size


@dataclass(frozen=True)
class PrimalPoint:
    """Mixed-strategy pair (x, y); each vector is a probability distribution."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = _as_vector(self.x, "x")
        y = _as_vector(self.y, "y")
        for v, name in ((x, "x"), (y, "y")):
            if np.any(v < 0.0):
                raise ValueError(f"{name} has negative entries")
            if abs(v.sum() - 1.0) > SIMPLEX_TOL:
                raise ValueError(f"{name} sums to {v.sum()!r}, not 1")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def m(self) -> int:
        return self.y.size


def softmax(v: np.ndarray) -> np.ndarray:
    """Numerically stable softmax (max is subtracted before exponentiating)."""
    e = np.exp(v - np.max(v))
    return e / e.sum()


def to_primal(d: DualPoint) -> PrimalPoint:
    """Convert a dual point to its mixed-strategy pair via per-player softmax."""
    return PrimalPoint(softmax(d.p), softmax(d.q))


def shift_equivalent(d1: DualPoint, d2: DualPoint, tol: float = 1e-9) -> bool:
    """True iff d1 and d2 differ by per-player constant shifts, within tol.

    Tests membership in the same fiber of the dual-to-primal map.
    """
    if d1.n != d2.n or d1.m != d2.m:
        raise ValueError("dimension mismatch")
    dp = d1.p - d2.p
    dq = d1.q - d2.q
    return float(dp.max() - dp.min()) <= tol and float(dq.max() - dq.min()) <= tol


def reduced_coords(d: DualPoint) -> np.ndarray:
    """Shift-invariant coordinates (p_j - p_n for j < n, q_k - q_m for k < m).

    Used for 2-D plotting of dual-space sets; shift-equivalent dual points map
    to identical reduced coordinates.
    """
    return np.concatenate([d.p[:-1] - d.p[-1], d.q[:-1] - d.q[-1]])


def dual_from_reduced(r: np.ndarray, n: int, m: int) -> DualPoint:
    """Lift reduced coordinates back to a dual point with last coordinates zero."""
    r = np.asarray(r, dtype=float)
    if r.size != (n - 1) + (m - 1):
        raise ValueError(f"expected {(n - 1) + (m - 1)} reduced coordinates, got {r.size}")
    p = np.concatenate([r[: n - 1], [0.0]])
    q = np.concatenate([r[n - 1 :], [0.0]])
    return DualPoint(p, q)


# --- region predicates ---


def in_region_E(pt: PrimalPoint, delta: float, a: int, b: int) -> bool:
    """True iff at least ``a`` entries of x and ``b`` entries of y are strictly above delta.

    Entries exactly equal to delta do not count.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return int(np.sum(pt.x > delta)) >= a and int(np.sum(pt.y > delta)) >= b


def in_extremal_domain(pt: PrimalPoint, delta: float) -> bool:
    """True iff each of x and y has exactly one entry of mass at least 1 - delta."""
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    thr = 1.0 - delta
    return int(np.sum(pt.x >= thr)) == 1 and int(np.sum(pt.y >= thr)) == 1


def in_region_E_rps(pt: PrimalPoint, kappa: float) -> bool:
    """Region predicate tailored to 3x3 cyclic games.

    With Q_i the strategies of player i holding mass strictly above kappa, the
    point is inside iff both Q_i have size >= 2 and some 2-subsets of Q_1 and
    Q_2 overlap in exactly one strategy.  This excludes the configuration
    where both players spread over the same two strategies.
    """
    if not 0.0 < kappa < 1.0 / 3.0:
        raise ValueError("kappa must lie in (0, 1/3)")
    q1 = [j for j in range(pt.n) if pt.x[j] > kappa]
    q2 = [k for k in range(pt.m) if pt.y[k] > kappa]
    if len(q1) < 2 or len(q2) < 2:
        return False
    for s1 in combinations(q1, 2):
        for s2 in combinations(q2, 2):
            if len(set(s1) & set(s2)) == 1:
                return True
    return False
