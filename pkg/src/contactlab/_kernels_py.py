"""Pure-numpy implementations of the hot numeric kernels.

Fallback backend for :mod:`contactlab._backend`; the compiled module
``contactlab._kernels_cy`` exposes the same functions with identical
semantics.  All array arguments are float64 and C-contiguous.

Shapes
------
X       (N, n)   input vectors
C, S    (M, n)   per-rule Gaussian centers / widths
Wbar    (N, M)   normalized firing strengths
F       (N, M)   per-rule consequent values
W       (Q, d)   SOM weight vectors, Q = nx*ny neurons
Z       (N, n)   standardized feature vectors
"""

import numpy as np


def firing_exponents(X, C, S):
    """Log firing strength of every rule at every sample.

    Returns E with E[i, k] = -sum_j (X[i,j]-C[k,j])^2 / (2*S[k,j]^2).
    """
    d = X[:, None, :] - C[None, :, :]
    return -np.sum(d * d / (2.0 * S * S)[None, :, :], axis=2)


def premise_grad_sums(X, C, S, Wbar, F, Y, R):
    """Accumulated output gradients w.r.t. Gaussian centers and widths.

    Gc[k,j] = sum_i R[i] * Wbar[i,k]*(F[i,k]-Y[i]) * (X[i,j]-C[k,j])/S[k,j]^2
    Gs[k,j] = sum_i R[i] * Wbar[i,k]*(F[i,k]-Y[i]) * (X[i,j]-C[k,j])^2/S[k,j]^3

    With R[i] = 1 and a single row this is the per-sample dy/dc, dy/dsigma;
    with R[i] = 2*(Y[i]-T[i])/N it is the batch MSE gradient.
    """
    a = (R[:, None] * Wbar * (F - Y[:, None]))  # (N, M)
    d = X[:, None, :] - C[None, :, :]           # (N, M, n)
    gc = np.einsum("im,imj->mj", a, d) / (S * S)
    gs = np.einsum("im,imj->mj", a, d * d) / (S * S * S)
    return gc, gs


def batch_winner(W, X):
    """Index of the closest weight vector for each sample (first on ties)."""
    d = X[:, None, :] - W[None, :, :]
    return np.argmin(np.sum(d * d, axis=2), axis=1).astype(np.int64)


def som_train(W, X, orders, lrs, radii, gi, gj):
    """Run the full competitive-learning loop, mutating W in place.

    orders[e] is the presentation order of epoch e; lrs[e]/radii[e] the
    epoch-constant learning rate and neighborhood radius; gi/gj the grid
    coordinates of each neuron row in W.
    """
    for e in range(orders.shape[0]):
        lr = lrs[e]
        r2 = 2.0 * radii[e] * radii[e]
        for idx in orders[e]:
            x = X[idx]
            diff = x[None, :] - W
            q = int(np.argmin(np.sum(diff * diff, axis=1)))
            gd2 = (gi - gi[q]) ** 2 + (gj - gj[q]) ** 2
            h = np.exp(-gd2 / r2)
            W += (lr * h)[:, None] * diff


def subclust_potentials(Z, alpha):
    """Initial Chiu potential of every point: P[i] = sum_j exp(-alpha*|zi-zj|^2).

    Row-wise to keep memory O(N*n) and the distance arithmetic identical
    to the compiled backend (plain squared differences, no Gram trick).
    """
    n_pts = Z.shape[0]
    out = np.empty(n_pts)
    for i in range(n_pts):
        d = Z - Z[i]
        out[i] = np.sum(np.exp(-alpha * np.sum(d * d, axis=1)))
    return out
