"""Array-level kernels shared by the dynamics and volume modules.

Everything here works on raw numpy arrays; the public modules wrap these in
the value types.  Batched variants carry a leading sample axis and are used
for point-cloud evolution.
"""

from __future__ import annotations

import numpy as np

RULES = ("mwu", "omwu", "surrogate", "ode")
JACOBIAN_RULES = ("mwu", "surrogate")

IDENTITY_SHORTCIRCUIT = 1e-14


def softmax(v):
    e = np.exp(v - np.max(v))
    return e / e.sum()


def softmax_rows(V):
    e = np.exp(V - V.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def primal_parts(A, B, p, q):
    """Return (x, y, u, w): strategies and payoff vectors u = A y, w = B^T x."""
    x = softmax(p)
    y = softmax(q)
    return x, y, A @ y, B.T @ x


def m_blocks(A, B, x, y, u, w):
    """Payoff-sensitivity blocks M1[j,k] = y_k (A_jk - u_j), M2[k,j] = x_j (B_jk - w_k)."""
    M1 = (A - u[:, None]) * y[None, :]
    M2 = ((B - w[None, :]) * x[:, None]).T
    return M1, M2


def c_value(A, B, x, y, u, w):
    """Quadratic volume coefficient: -sum_jk x_j y_k (A_jk - u_j)(B_jk - w_k)."""
    return float(-np.einsum("j,k,jk,jk->", x, y, A - u[:, None], B - w[None, :]))


def mwu_jacobian_scaled(A, B, x, y, u, w, eps):
    """Derivative of the one-step MWU dual map minus identity (the eps-scaled Jacobian)."""
    n, m = A.shape
    M1, M2 = m_blocks(A, B, x, y, u, w)
    E = np.zeros((n + m, n + m))
    E[:n, n:] = eps * M1
    E[n:, :n] = eps * M2
    return E


def surrogate_jacobian_scaled(A, B, x, y, u, w, eps):
    """Exact derivative of the implemented one-point second-order map minus identity."""
    n, m = A.shape
    M1, M2 = m_blocks(A, B, x, y, u, w)
    g1 = M1 @ w
    g2 = M2 @ u
    yw = float(y @ w)
    xu = float(x @ u)
    t1 = M1 * w[None, :] - np.outer(g1, y) - yw * M1
    t2 = M2 * u[None, :] - np.outer(g2, x) - xu * M2
    E = np.empty((n + m, n + m))
    E[:n, :n] = eps * eps * (M1 @ M2)
    E[n:, n:] = eps * eps * (M2 @ M1)
    E[:n, n:] = eps * M1 + eps * eps * t1
    E[n:, :n] = eps * M2 + eps * eps * t2
    return E


def jacobian_scaled(A, B, p, q, eps, rule):
    x, y, u, w = primal_parts(A, B, p, q)
    if rule == "mwu":
        return mwu_jacobian_scaled(A, B, x, y, u, w, eps)
    if rule == "surrogate":
        return surrogate_jacobian_scaled(A, B, x, y, u, w, eps)
    raise ValueError(f"no one-point Jacobian for rule {rule!r}")


def integrand(A, B, p, q, eps, rule):
    """det(I + eps J) at a dual point, for the given one-point rule."""
    E = jacobian_scaled(A, B, p, q, eps, rule)
    if np.max(np.abs(E)) <= IDENTITY_SHORTCIRCUIT:
        return 1.0
    return float(np.linalg.det(np.eye(E.shape[0]) + E))


def step_mwu(A, B, p, q, eps):
    x, y, u, w = primal_parts(A, B, p, q)
    return p + eps * u, q + eps * w


def step_surrogate(A, B, p, q, eps):
    x, y, u, w = primal_parts(A, B, p, q)
    M1, M2 = m_blocks(A, B, x, y, u, w)
    return p + eps * u + eps * eps * (M1 @ w), q + eps * w + eps * eps * (M2 @ u)


def resolvent_matrix(A, B, x, y, u, w):
    """Block matrix M with zero diagonal blocks, M1 upper right, M2 lower left."""
    n, m = A.shape
    M1, M2 = m_blocks(A, B, x, y, u, w)
    M = np.zeros((n + m, n + m))
    M[:n, n:] = M1
    M[n:, :n] = M2
    return M


# --- batched variants (leading sample axis) ---


def batch_parts(A, B, P, Q):
    X = softmax_rows(P)
    Y = softmax_rows(Q)
    return X, Y, Y @ A.T, X @ B


def batch_m_blocks(A, B, X, Y, U, W):
    M1 = (A[None, :, :] - U[:, :, None]) * Y[:, None, :]
    M2 = ((B[None, :, :] - W[:, None, :]) * X[:, :, None]).transpose(0, 2, 1)
    return M1, M2


def batch_c(A, B, X, Y, U, W):
    return -np.einsum(
        "nj,nk,njk,njk->n", X, Y, A[None, :, :] - U[:, :, None], B[None, :, :] - W[:, None, :]
    )


def batch_step_mwu(A, B, P, Q, eps):
    _, _, U, W = batch_parts(A, B, P, Q)
    return P + eps * U, Q + eps * W


def batch_step_surrogate(A, B, P, Q, eps):
    X, Y, U, W = batch_parts(A, B, P, Q)
    M1, M2 = batch_m_blocks(A, B, X, Y, U, W)
    G1 = np.einsum("njk,nk->nj", M1, W)
    G2 = np.einsum("nkj,nj->nk", M2, U)
    return P + eps * U + eps * eps * G1, Q + eps * W + eps * eps * G2


def batch_jacobian_scaled(A, B, X, Y, U, W, eps, rule):
    n, m = A.shape
    N = X.shape[0]
    M1, M2 = batch_m_blocks(A, B, X, Y, U, W)
    E = np.zeros((N, n + m, n + m))
    if rule == "mwu":
        E[:, :n, n:] = eps * M1
        E[:, n:, :n] = eps * M2
        return E
    if rule != "surrogate":
        raise ValueError(f"no one-point Jacobian for rule {rule!r}")
    G1 = np.einsum("njk,nk->nj", M1, W)
    G2 = np.einsum("nkj,nj->nk", M2, U)
    yw = np.einsum("nk,nk->n", Y, W)
    xu = np.einsum("nj,nj->n", X, U)
    T1 = M1 * W[:, None, :] - G1[:, :, None] * Y[:, None, :] - yw[:, None, None] * M1
    T2 = M2 * U[:, None, :] - G2[:, :, None] * X[:, None, :] - xu[:, None, None] * M2
    E[:, :n, :n] = eps * eps * np.matmul(M1, M2)
    E[:, n:, n:] = eps * eps * np.matmul(M2, M1)
    E[:, :n, n:] = eps * M1 + eps * eps * T1
    E[:, n:, :n] = eps * M2 + eps * eps * T2
    return E


def batch_integrands(A, B, P, Q, eps, rule):
    X, Y, U, W = batch_parts(A, B, P, Q)
    E = batch_jacobian_scaled(A, B, X, Y, U, W, eps, rule)
    dets = np.linalg.det(np.eye(E.shape[1])[None, :, :] + E)
    tiny = np.max(np.abs(E), axis=(1, 2)) <= IDENTITY_SHORTCIRCUIT
    if np.any(tiny):
        dets = np.where(tiny, 1.0, dets)
    return dets


def batch_in_region_E(X, Y, delta, a, b):
    return ((X > delta).sum(axis=1) >= a) & ((Y > delta).sum(axis=1) >= b)


def batch_in_extremal(X, Y, delta):
    # delta < 1/2, so at most one entry can reach 1 - delta and max() decides it
    thr = 1.0 - delta
    return (X.max(axis=1) >= thr) & (Y.max(axis=1) >= thr)
