"""Volume analysis in the dual space: the quadratic integrand coefficient,
analytic Jacobians of the one-point update maps, Liouville products along
trajectories and over point clouds, region infima, and the escape-time and
diameter bounds.

The per-step volume multiplier is det(I + eps*J) evaluated at each visited
dual point; its eps^2 coefficient (the C value below) decides expansion
versus contraction when the step-size is small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import _kernels as K
from .games import BimatrixGame
from .parallel import deterministic_map
from .points import DualPoint, PrimalPoint, dual_from_reduced, to_primal

JACOBIAN_RULES = ("mwu", "surrogate")


def canonical_rule(rule: str) -> str:
    r = rule.replace("-", "_")
    if r == "omwu_surrogate":
        return "surrogate"
    return r


def _primal_of(pt) -> PrimalPoint:
    if isinstance(pt, DualPoint):
        return to_primal(pt)
    return pt


def c_function(g: BimatrixGame, pt) -> float:
    """Quadratic coefficient of the volume integrand at a point.

    C = -sum_jk x_j y_k (A_jk - [Ay]_j)(B_jk - [B^T x]_k).  Depends only on
    the primal image, so both primal and dual points are accepted.
    Nonnegative in zero-sum games, nonpositive in coordination games.
    """
    pr = _primal_of(pt)
    x, y = pr.x, pr.y
    u = g.A @ y
    w = g.B.T @ x
    return K.c_value(g.A, g.B, x, y, u, w)


def c_variance_oracle(g: BimatrixGame, pt) -> float:
    """Variance of the payoff deviation A_jk - [Ay]_j - [A^T x]_k under (x tensor y).

    Independent enumeration over all n*m outcomes; for zero-sum games this
    equals c_function.
    """
    if g.kind != "zero-sum":
        raise ValueError("the variance identity holds for zero-sum games")
    pr = _primal_of(pt)
    x, y = pr.x, pr.y
    A = g.A
    u = A @ y
    v = A.T @ x
    mean = 0.0
    for j in range(g.n):
        for k in range(g.m):
            mean += x[j] * y[k] * (A[j, k] - u[j] - v[k])
    var = 0.0
    for j in range(g.n):
        for k in range(g.m):
            dev = A[j, k] - u[j] - v[k] - mean
            var += x[j] * y[k] * dev * dev
    return float(var)


@dataclass(frozen=True)
class JacobianMatrix:
    """eps-scaled Jacobian of a one-point update map (derivative minus identity)."""

    entries: np.ndarray
    basepoint: DualPoint
    rule: str


def jacobian_analytic(g: BimatrixGame, d: DualPoint, eps: float, rule: str) -> JacobianMatrix:
    """Exact derivative of the one-step map minus identity.

    For "mwu" the diagonal blocks vanish (each player's dual update depends
    only on the opponent's coordinates).  For "surrogate" this differentiates
    the implemented truncated map exactly, so finite differences agree to
    rounding and the eps^2 determinant coefficient equals -C.
    """
    rule = canonical_rule(rule)
    if rule not in JACOBIAN_RULES:
        raise ValueError(f"rule {rule!r} has no one-point Jacobian")
    E = K.jacobian_scaled(g.A, g.B, d.p, d.q, float(eps), rule)
    return JacobianMatrix(entries=E, basepoint=d, rule=rule)


def volume_integrand(g: BimatrixGame, d: DualPoint, eps: float, rule: str) -> float:
    """det(I + eps*J) at a dual point, via LU factorization.

    A matrix within 1e-14 of identity short-circuits to exactly 1.
    """
    return K.integrand(g.A, g.B, d.p, d.q, float(eps), canonical_rule(rule))


# --- trajectory and point-cloud volume ---


@dataclass
class VolumeTrace:
    """Per-step multipliers det(I + eps*J) along one trajectory."""

    multipliers: np.ndarray
    cum_log_volume: np.ndarray
    region_flags: np.ndarray | None = None


def trajectory_volume(
    rule: str, g: BimatrixGame, start: DualPoint, eps: float, T: int, region=None
) -> VolumeTrace:
    """Run the dynamics T steps recording the multiplier at each visited point.

    cum_log_volume[t] is the log of the local volume multiplier accumulated
    through step t.  ``region`` is an optional PrimalPoint predicate sampled
    at the same points.
    """
    rule = canonical_rule(rule)
    if rule not in JACOBIAN_RULES:
        raise ValueError("trajectory volume is defined for the one-point rules")
    eps = float(eps)
    A, B = g.A, g.B
    p, q = start.p.copy(), start.q.copy()
    mults = np.empty(T)
    flags = np.empty(T, dtype=bool) if region is not None else None
    for t in range(T):
        mults[t] = K.integrand(A, B, p, q, eps, rule)
        if region is not None:
            flags[t] = bool(region(to_primal(DualPoint(p, q))))
        if rule == "mwu":
            p, q = K.step_mwu(A, B, p, q, eps)
        else:
            p, q = K.step_surrogate(A, B, p, q, eps)
    return VolumeTrace(
        multipliers=mults, cum_log_volume=np.cumsum(np.log(mults)), region_flags=flags
    )


@dataclass(frozen=True)
class PointCloud:
    """I.i.d. uniform sample of an axis-aligned box in the dual space."""

    P: np.ndarray
    Q: np.ndarray
    base_volume: float
    seed: int
    center: np.ndarray
    sides: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.P.shape[0]

    @property
    def samples(self) -> list[DualPoint]:
        return [DualPoint(self.P[i], self.Q[i]) for i in range(self.n_samples)]

    @classmethod
    def box(cls, center: DualPoint, sides, n_samples: int, seed: int) -> "PointCloud":
        n, m = center.n, center.m
        d = n + m
        sides = np.broadcast_to(np.asarray(sides, dtype=float), (d,)).copy()
        if np.any(sides <= 0.0):
            raise ValueError("box sides must be positive")
        cvec = np.concatenate([center.p, center.q])
        rng = np.random.default_rng(seed)
        pts = cvec[None, :] + (rng.random((n_samples, d)) - 0.5) * sides[None, :]
        return cls(
            P=pts[:, :n],
            Q=pts[:, n:],
            base_volume=float(np.prod(sides)),
            seed=int(seed),
            center=cvec,
            sides=sides,
        )


@dataclass
class VolumeEstimate:
    estimate: float
    std_error: float
    base_volume: float
    T: int
    eps: float
    rule: str
    seed: int
    n_samples: int


_CHUNK = 512


def _liouville_cumlog(args):
    A, B, P, Q, eps, T, rule = args
    cum = np.zeros(P.shape[0])
    for _ in range(T):
        cum += np.log(K.batch_integrands(A, B, P, Q, eps, rule))
        if rule == "mwu":
            P, Q = K.batch_step_mwu(A, B, P, Q, eps)
        else:
            P, Q = K.batch_step_surrogate(A, B, P, Q, eps)
    return cum


def set_volume_liouville(
    rule: str, g: BimatrixGame, cloud: PointCloud, eps: float, T: int, jobs: int = 1
) -> VolumeEstimate:
    """Monte-Carlo estimate of the evolved set volume after T steps.

    base_volume times the sample mean of the per-trajectory Liouville product
    of det(I + eps*J).  Sample chunking is fixed, so the result is identical
    for any worker count.
    """
    rule = canonical_rule(rule)
    if rule not in JACOBIAN_RULES:
        raise ValueError("set volume is defined for the one-point rules")
    if cloud.n_samples == 0 or cloud.base_volume <= 0.0:
        raise ValueError("degenerate point cloud")
    eps = float(eps)
    chunks = [
        (g.A, g.B, cloud.P[i : i + _CHUNK], cloud.Q[i : i + _CHUNK], eps, int(T), rule)
        for i in range(0, cloud.n_samples, _CHUNK)
    ]
    cum = np.concatenate(deterministic_map(_liouville_cumlog, chunks, jobs))
    growth = np.exp(cum)
    est = cloud.base_volume * float(growth.mean())
    if cloud.n_samples > 1:
        se = cloud.base_volume * float(growth.std(ddof=1)) / math.sqrt(cloud.n_samples)
    else:
        se = float("nan")
    return VolumeEstimate(
        estimate=est,
        std_error=se,
        base_volume=cloud.base_volume,
        T=int(T),
        eps=eps,
        rule=rule,
        seed=cloud.seed,
        n_samples=cloud.n_samples,
    )


# --- direct 2-D area tracking for 2x2 games ---


def shoelace_area(vertices: np.ndarray) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _segments_intersect(a, b, c, d):
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return (o1 * o2 < 0.0) and (o3 * o4 < 0.0)


def polygon_self_intersects(vertices: np.ndarray) -> bool:
    v = np.asarray(vertices, dtype=float)
    nv = v.shape[0]
    for i in range(nv):
        a, b = v[i], v[(i + 1) % nv]
        for j in range(i + 2, nv):
            if i == 0 and j == nv - 1:
                continue  # adjacent around the wrap
            c, d = v[j], v[(j + 1) % nv]
            if _segments_intersect(a, b, c, d):
                return True
    return False


def densify_polygon(vertices, points_per_edge: int = 64) -> np.ndarray:
    v = np.asarray(vertices, dtype=float)
    out = []
    nv = v.shape[0]
    for i in range(nv):
        a, b = v[i], v[(i + 1) % nv]
        ts = np.linspace(0.0, 1.0, points_per_edge, endpoint=False)
        out.append(a[None, :] + ts[:, None] * (b - a)[None, :])
    return np.concatenate(out, axis=0)


@dataclass
class Direct2DResult:
    area: float
    boundary: np.ndarray
    self_intersecting: bool


def _evolve_reduced_2x2(rule, g, R, eps, T):
    """Push reduced-coordinate points of a 2x2 game through the dynamics."""
    A, B = g.A, g.B
    P = np.stack([R[:, 0], np.zeros(R.shape[0])], axis=1)
    Q = np.stack([R[:, 1], np.zeros(R.shape[0])], axis=1)
    P_prev, Q_prev = P.copy(), Q.copy()
    for t in range(T):
        if rule == "mwu":
            P, Q = K.batch_step_mwu(A, B, P, Q, eps)
        elif rule == "surrogate":
            P, Q = K.batch_step_surrogate(A, B, P, Q, eps)
        elif rule == "omwu":
            _, _, U, W = K.batch_parts(A, B, P, Q)
            _, _, Up, Wp = K.batch_parts(A, B, P_prev, Q_prev)
            P_prev, Q_prev = P, Q
            P = P + eps * (2.0 * U - Up)
            Q = Q + eps * (2.0 * W - Wp)
        else:
            raise ValueError(f"unsupported rule {rule!r} for 2-D tracking")
    return np.stack([P[:, 0] - P[:, 1], Q[:, 0] - Q[:, 1]], axis=1)


def set_volume_direct_2d(
    rule: str,
    g: BimatrixGame,
    polygon,
    eps: float,
    T: int,
    points_per_edge: int = 64,
) -> Direct2DResult:
    """Area of a polygon pushed through the reduced-coordinate dynamics of a 2x2 game.

    An independent, mesh-based check of 2-D area behavior; also the data
    source for set-evolution figures.  A self-intersecting image is flagged
    but its shoelace area is still returned.
    """
    rule = canonical_rule(rule)
    if g.n != 2 or g.m != 2:
        raise ValueError("direct area tracking needs a 2x2 game")
    boundary = densify_polygon(polygon, points_per_edge)
    image = _evolve_reduced_2x2(rule, g, boundary, float(eps), int(T))
    return Direct2DResult(
        area=shoelace_area(image),
        boundary=image,
        self_intersecting=polygon_self_intersects(image),
    )


# --- region infimum search ---


@dataclass
class RegionInfResult:
    value: float
    point: PrimalPoint
    uncertainty: float
    n_feasible: int


def _reduced_to_primal(z, n, m):
    return to_primal(dual_from_reduced(z, n, m))


def region_inf_C(
    g: BimatrixGame,
    region,
    sampler,
    budget: int = 4096,
    starts: int = 64,
    iters: int = 200,
    seed: int = 0,
) -> RegionInfResult:
    """Search minimum of c_function over a primal region.

    ``region`` is a PrimalPoint predicate; ``sampler`` draws candidate
    PrimalPoints given an rng.  The best sampled points seed Nelder-Mead
    refinement in shift-free coordinates, with points outside the region
    scored +inf.  The result is an upper bound on the true infimum; the
    uncertainty is the gap between the two halves of the multistart.
    """
    rng = np.random.default_rng(seed)
    n, m = g.n, g.m
    feasible = []
    for _ in range(budget):
        pt = sampler(rng)
        if region(pt):
            feasible.append(pt)
    if not feasible:
        raise ValueError("no sampled point satisfied the region predicate")
    values = np.array([c_function(g, pt) for pt in feasible])
    order = np.argsort(values)

    def objective(z):
        pt = _reduced_to_primal(z, n, m)
        if not region(pt):
            return float("inf")
        return c_function(g, pt)

    best_val = float(values[order[0]])
    best_pt = feasible[order[0]]
    half_best = [best_val, best_val]
    for rank, idx in enumerate(order[: min(starts, len(feasible))]):
        pt = feasible[idx]
        z0 = np.concatenate([np.log(pt.x[:-1] / pt.x[-1]), np.log(pt.y[:-1] / pt.y[-1])])
        res = minimize(objective, z0, method="Nelder-Mead", options={"maxiter": iters})
        val = float(res.fun)
        if math.isfinite(val):
            half = rank % 2
            half_best[half] = min(half_best[half], val)
            if val < best_val:
                best_val = val
                best_pt = _reduced_to_primal(res.x, n, m)
    return RegionInfResult(
        value=best_val,
        point=best_pt,
        uncertainty=abs(half_best[0] - half_best[1]),
        n_feasible=len(feasible),
    )


def product_dirichlet_sampler(n: int, m: int):
    """Uniform sampler over the product of the two strategy simplices."""

    def sample(rng) -> PrimalPoint:
        x = rng.dirichlet(np.ones(n))
        y = rng.dirichlet(np.ones(m))
        return PrimalPoint(x, y)

    return sample


# --- closed-form bounds ---


def escape_time_bound(vol_S: float, d_S: float, C_bar: float, eps: float, n: int, m: int) -> float:
    """Worst-case number of steps until an expanding set must poke out of its region.

    max of: the time for the coordinate ranges to matter, the horizon where
    exponential growth beats the polynomial hypercube bound, and the time to
    grow a small set to unit volume.
    """
    if not vol_S > 0.0:
        raise ValueError("vol_S must be positive")
    if not (C_bar > eps > 0.0):
        raise ValueError("need C_bar > eps > 0")
    growth = (C_bar - eps) * eps * eps
    t1 = d_S / (2.0 * eps)
    t2 = (8.0 * (n + m) / growth) * math.log(4.0 * (n + m) / growth)
    t3 = (4.0 / growth) * math.log(1.0 / vol_S)
    return max(t1, t2, t3)


def diameter_lower_bound(vol: float, R_j: float, R_k: float, kappa: float, n: int, m: int) -> float:
    """Primal-diameter floor implied by dual volume against two bounded coordinates."""
    if min(vol, R_j, R_k, kappa) <= 0.0:
        raise ValueError("all arguments must be positive")
    if n + m <= 2:
        raise ValueError("need n + m > 2")
    expo = (vol / (R_j * R_k)) ** (1.0 / (n + m - 2))
    return (1.0 - math.exp(-0.25 * expo)) * kappa


def lyapunov_time_estimate(beta: float, dim: int) -> float:
    """Order-of-magnitude horizon dim / beta for per-step volume growth rate beta.

    The proportionality constant is not pinned down by the theory; treat the
    value as an order estimate.
    """
    if not beta > 0.0:
        raise ValueError("growth rate beta must be positive")
    return dim / beta


# --- counterexample families: volume against diameter ---

COUNTEREXAMPLE_FAMILIES = ("A_contract_unstable", "B_expand_stable", "B_reduced")


@dataclass
class CounterexampleSet:
    family: str
    z: float
    dual_volume: float
    primal_diameter_estimate: float


def _pairwise_diameter(pts: np.ndarray) -> float:
    d = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((d * d).sum(axis=2)).max())


def counterexample_set(
    family: str, z: float, n_samples: int = 512, seed: int = 0
) -> CounterexampleSet:
    """Parametrized 2x2-dual sets showing volume and diameter can move oppositely.

    Family A: a thin-but-long box whose volume 1/z shrinks while its primal
    image stretches toward two opposite corners.  Family B: a corner wedge
    whose volume 4z^4 grows while its primal image collapses to one corner.
    The reduced-coordinate variant B_reduced (volume z^4) does the same in
    shift-free coordinates of a 3-strategy game.
    """
    if z < 1.0:
        raise ValueError("z must be >= 1")
    rng = np.random.default_rng(seed)
    if family == "A_contract_unstable":
        half = np.array([0.5 / z, 0.5 * math.sqrt(z)])
        pts = rng.uniform(-1.0, 1.0, size=(n_samples, 4)) * np.concatenate([half, half])
        vol = 1.0 / z
        P, Q = pts[:, :2], pts[:, 2:]
    elif family == "B_expand_stable":
        P = _sample_wedge(rng, z, n_samples)
        Q = _sample_wedge(rng, z, n_samples)
        vol = 4.0 * z**4
    elif family == "B_reduced":
        r1 = rng.uniform(z, 2.0 * z, size=(n_samples, 2))
        r2 = rng.uniform(-2.0 * z, -1.0 * z, size=(n_samples, 2))
        vol = float(z) ** 4
        P = np.column_stack([r1[:, 0], r2[:, 0], np.zeros(n_samples)])
        Q = np.column_stack([r1[:, 1], r2[:, 1], np.zeros(n_samples)])
    else:
        raise ValueError(f"unknown family {family!r}; choose from {COUNTEREXAMPLE_FAMILIES}")
    X = K.softmax_rows(P)
    Y = K.softmax_rows(Q)
    diam = _pairwise_diameter(np.concatenate([X, Y], axis=1))
    return CounterexampleSet(
        family=family, z=float(z), dual_volume=vol, primal_diameter_estimate=diam
    )


def _sample_wedge(rng, z, n_samples):
    """Uniform points of {0 <= p1, p2 <= 3z, p2 >= p1 + z} by rejection."""
    out = np.empty((n_samples, 2))
    filled = 0
    while filled < n_samples:
        cand = rng.uniform(0.0, 3.0 * z, size=(4 * (n_samples - filled), 2))
        good = cand[cand[:, 1] >= cand[:, 0] + z]
        take = min(good.shape[0], n_samples - filled)
        out[filled : filled + take] = good[:take]
        filled += take
    return out
