"""Discrete update rules in dual and primal coordinates, the continuous-time
analogue of the optimistic rule, and the trajectory runner.

The canonical state is the dual point: all volume bookkeeping happens there.
Primal stepping exists for the dual/primal equivalence contract and for the
single-agent experiments.  Dual coordinates drift linearly with time and are
never re-centered (re-centering would silently change dual-space volume).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .games import BimatrixGame
from .points import DualPoint, PrimalPoint, reduced_coords, softmax

DEFAULT_MAX_EPS = 0.25  # injectivity regime of the one-step dual map

RULES = K.RULES

OBSERVABLES = ("primal", "reduced", "extremal", "purity", "volmult")


class NumericalAbort(RuntimeError):
    """Raised when a trajectory hits a non-finite state."""

    def __init__(self, step: int):
        super().__init__(f"non-finite state at step {step}")
        self.step = step


@dataclass(frozen=True)
class StepSize:
    """Learning step-size; values above 1/4 need an explicit override."""

    eps: float
    allow_large: bool = False

    def __post_init__(self):
        if not (self.eps > 0.0 and math.isfinite(self.eps)):
            raise ValueError("step-size must be positive and finite")
        if self.eps > DEFAULT_MAX_EPS and not self.allow_large:
            raise ValueError(
                f"step-size {self.eps} exceeds {DEFAULT_MAX_EPS}; pass allow_large=True to override"
            )


def _eps_value(eps) -> float:
    if isinstance(eps, StepSize):
        return eps.eps
    return StepSize(float(eps)).eps


@dataclass(frozen=True)
class OMWUState:
    """Two consecutive dual points; the optimistic update is second-order in time."""

    curr: DualPoint
    prev: DualPoint
    t: int = 1

    def __post_init__(self):
        if self.curr.n != self.prev.n or self.curr.m != self.prev.m:
            raise ValueError("curr and prev must have matching dimensions")
        if self.t < 1:
            raise ValueError("step counter starts at 1")
        if self.t == 1 and not (
            np.array_equal(self.curr.p, self.prev.p) and np.array_equal(self.curr.q, self.prev.q)
        ):
            raise ValueError("at t = 1 the two history points must coincide")

    @classmethod
    def start(cls, d: DualPoint) -> "OMWUState":
        return cls(curr=d, prev=d, t=1)


def mwu_step_dual(g: BimatrixGame, d: DualPoint, eps) -> DualPoint:
    """One multiplicative-weights step in dual coordinates: p += eps*A y, q += eps*B^T x."""
    e = _eps_value(eps)
    p, q = K.step_mwu(g.A, g.B, d.p, d.q, e)
    return DualPoint(p, q)


def mwu_step_primal(g: BimatrixGame, pt: PrimalPoint, eps) -> PrimalPoint:
    """One multiplicative-weights step on strictly interior mixed strategies."""
    if np.any(pt.x <= 0.0) or np.any(pt.y <= 0.0):
        raise ValueError("primal stepping requires a strictly interior point")
    e = _eps_value(eps)
    u = g.A @ pt.y
    w = g.B.T @ pt.x
    x = pt.x * np.exp(e * u)
    y = pt.y * np.exp(e * w)
    return PrimalPoint(x / x.sum(), y / y.sum())


def omwu_step_dual(g: BimatrixGame, s: OMWUState, eps) -> OMWUState:
    """One optimistic step: the latest payoff vector is double-weighted, the
    one before subtracted.  The first step (coinciding history) is a plain
    multiplicative-weights step."""
    e = _eps_value(eps)
    u_now = g.A @ softmax(s.curr.q)
    w_now = g.B.T @ softmax(s.curr.p)
    u_prev = g.A @ softmax(s.prev.q)
    w_prev = g.B.T @ softmax(s.prev.p)
    p = s.curr.p + e * (2.0 * u_now - u_prev)
    q = s.curr.q + e * (2.0 * w_now - w_prev)
    return OMWUState(curr=DualPoint(p, q), prev=s.curr, t=s.t + 1)


def omwu_surrogate_step(g: BimatrixGame, d: DualPoint, eps) -> DualPoint:
    """One-point second-order surrogate of the optimistic rule.

    The history term is replaced by its leading expansion along the flow:
    p_j gains eps*u_j plus eps^2 * sum_k y_k (A_jk - u_j) w_k, and
    symmetrically for q.  Third-order terms are dropped.
    """
    e = _eps_value(eps)
    p, q = K.step_surrogate(g.A, g.B, d.p, d.q, e)
    return DualPoint(p, q)


def mwu_single_step(y: np.ndarray, payoff: np.ndarray, eps: float) -> np.ndarray:
    """Multiplicative-weights step for one agent with an exogenous payoff vector."""
    if np.any(y <= 0.0):
        raise ValueError("requires a strictly interior distribution")
    z = y * np.exp(eps * np.asarray(payoff, dtype=float))
    return z / z.sum()


# --- continuous-time analogue ---


@dataclass(frozen=True)
class OdeField:
    """Vector field (I - eps*M(p,q))^{-1} v(p,q) on the dual space.

    eps here is a model parameter: zero recovers the replicator dual field,
    and negative values are legal.  The resolvent form requires
    |eps| < 1/(2 sqrt(n+m)).
    """

    game: BimatrixGame
    eps: float = 0.0

    def max_abs_eps(self) -> float:
        return 1.0 / (2.0 * math.sqrt(self.game.n + self.game.m))


def ode_rhs(f: OdeField, d: DualPoint) -> np.ndarray:
    """Right-hand side of the continuous system at a dual point, by dense solve."""
    if abs(f.eps) >= f.max_abs_eps():
        raise ValueError(
            f"|eps| = {abs(f.eps)} outside the resolvent validity bound {f.max_abs_eps()}"
        )
    A, B = f.game.A, f.game.B
    x, y, u, w = K.primal_parts(A, B, d.p, d.q)
    v = np.concatenate([u, w])
    if f.eps == 0.0:
        return v
    M = K.resolvent_matrix(A, B, x, y, u, w)
    try:
        return np.linalg.solve(np.eye(M.shape[0]) - f.eps * M, v)
    except np.linalg.LinAlgError as exc:  # unreachable under the eps bound, guarded anyway
        raise ValueError("resolvent system singular") from exc


def euler_integrate(f: OdeField, d0: DualPoint, dt: float, steps: int) -> list[DualPoint]:
    """Explicit Euler trajectory of the field, start included (steps+1 points)."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    out = [d0]
    d = d0
    n = d0.n
    for _ in range(steps):
        rhs = ode_rhs(f, d)
        d = DualPoint(d.p + dt * rhs[:n], d.q + dt * rhs[n:])
        out.append(d)
    return out


def online_euler_error_probe(u, udot, eps: float, t: float) -> float:
    """Sup-norm gap between the backward-difference update increment and the
    exact first-order increment, for an analytically supplied payoff curve.

    Returns ||eps*u(t) + eps*(u(t) - u(t-eps)) - eps*(u(t) + eps*udot(t))||_inf,
    which vanishes for constant and linear u and scales cubically in eps for
    smooth u.
    """
    ut = np.asarray(u(t), dtype=float)
    return float(
        np.max(
            np.abs(
                eps * ut
                + eps * (ut - np.asarray(u(t - eps), dtype=float))
                - eps * (ut + eps * np.asarray(udot(t), dtype=float))
            )
        )
    )


# --- trajectory runner ---

DEFAULT_MAX_STORED = 100_000


@dataclass
class TrajectoryRecord:
    """Observable samples along a single trajectory."""

    rule: str
    eps: float
    T: int
    stride: int
    steps: np.ndarray
    columns: dict = field(default_factory=dict)
    final: DualPoint | None = None

    def column_names(self) -> list[str]:
        return list(self.columns.keys())


def _observer_columns(observers, n, m, extremal_delta):
    cols = []
    for name in observers:
        if name == "primal":
            cols += [f"x{j}" for j in range(n)] + [f"y{k}" for k in range(m)]
        elif name == "reduced":
            cols += [f"r{i}" for i in range(n + m - 2)]
        elif name == "extremal":
            if not 0.0 < extremal_delta < 0.5:
                raise ValueError("extremal observer needs delta in (0, 1/2)")
            cols.append("extremal")
        elif name == "purity":
            cols.append("purity")
        elif name == "volmult":
            cols.append("volmult")
        else:
            raise ValueError(f"unknown observable {name!r}")
    return cols


def run_trajectory(
    rule: str,
    g: BimatrixGame,
    start: DualPoint,
    eps,
    T: int,
    observers=("primal",),
    stride: int | None = None,
    extremal_delta: float = 0.005,
    max_stored: int = DEFAULT_MAX_STORED,
) -> TrajectoryRecord:
    """Iterate the chosen rule T steps and record observables every ``stride`` steps.

    Samples are taken at visited states (step indices 0, stride, 2*stride, ...,
    and always the final step).  The volmult observable is defined for the
    one-point rules ("mwu", "surrogate") only.  Deterministic given inputs;
    a non-finite state raises NumericalAbort with the offending step index.
    """
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; choose from {RULES}")
    if T < 0:
        raise ValueError("T must be nonnegative")
    e = _eps_value(eps)
    if "volmult" in observers and rule not in K.JACOBIAN_RULES:
        raise ValueError("volmult observable requires rule 'mwu' or 'surrogate'")
    if stride is None:
        stride = max(1, -(-(T + 1) // max_stored))
    A, B = g.A, g.B
    n, m = g.n, g.m
    names = _observer_columns(observers, n, m, extremal_delta)
    data = {c: [] for c in names}
    steps_out = []

    p = start.p.copy()
    q = start.q.copy()
    p_prev = p.copy()
    q_prev = q.copy()
    field_ = OdeField(g, e) if rule == "ode" else None

    def record(t):
        steps_out.append(t)
        x = K.softmax(p)
        y = K.softmax(q)
        i = 0
        for name in observers:
            if name == "primal":
                for j in range(n):
                    data[names[i + j]].append(x[j])
                for k in range(m):
                    data[names[i + n + k]].append(y[k])
                i += n + m
            elif name == "reduced":
                r = np.concatenate([p[:-1] - p[-1], q[:-1] - q[-1]])
                for j, v in enumerate(r):
                    data[names[i + j]].append(v)
                i += n + m - 2
            elif name == "extremal":
                thr = 1.0 - extremal_delta
                data["extremal"].append(float(x.max() >= thr and y.max() >= thr))
                i += 1
            elif name == "purity":
                data["purity"].append(float(np.sum(x**4) + np.sum(y**4)))
                i += 1
            elif name == "volmult":
                data["volmult"].append(K.integrand(A, B, p, q, e, rule))
                i += 1

    record(0)
    for t in range(1, T + 1):
        if rule == "mwu":
            p, q = K.step_mwu(A, B, p, q, e)
        elif rule == "surrogate":
            p, q = K.step_surrogate(A, B, p, q, e)
        elif rule == "omwu":
            u_now = A @ K.softmax(q)
            w_now = B.T @ K.softmax(p)
            u_prev = A @ K.softmax(q_prev)
            w_prev = B.T @ K.softmax(p_prev)
            p_prev, q_prev = p, q
            p = p + e * (2.0 * u_now - u_prev)
            q = q + e * (2.0 * w_now - w_prev)
        else:  # ode, explicit Euler with dt = eps
            rhs = ode_rhs(field_, DualPoint(p, q))
            p = p + e * rhs[:n]
            q = q + e * rhs[n:]
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise NumericalAbort(t)
        if t % stride == 0 or t == T:
            record(t)

    return TrajectoryRecord(
        rule=rule,
        eps=e,
        T=T,
        stride=stride,
        steps=np.asarray(steps_out, dtype=int),
        columns={c: np.asarray(v, dtype=float) for c, v in data.items()},
        final=DualPoint(p, q),
    )
