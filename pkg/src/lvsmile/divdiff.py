"""Divided differences of z -> e^{t z} over complex node sets.

The divided difference over z_0..z_n equals the pole sum

    sum_k e^{t z_k} / prod_{j != k} (z_k - z_j)

for distinct nodes and stays finite when nodes merge.  Evaluation goes
through the bidiagonal (Opitz) matrix W = diag(z) + superdiag(1), whose
exponential exp(t W) carries the divided difference over z_i..z_j in entry
(i, j).  exp(t W) is built by a Taylor series in complete homogeneous
symmetric polynomials after centring the nodes and scaling t by 2^-s, then
squared s times.  No subtraction of nearly equal exponentials ever happens,
so confluent and near-confluent node sets need no special casing.
"""

from __future__ import annotations

import math

import numpy as np

# scaled spread t * max|z - mean| kept at or below this before squaring
SCALE_THETA = 1.0
TAYLOR_TERMS = 24

_INV_FACT = np.array([1.0 / math.factorial(m) for m in range(TAYLOR_TERMS + 40)])


def _first_row(u, tau):
    """Row 0 of exp(tau W): divided differences over u_0..u_j for every j."""
    m, n1 = u.shape
    dist = np.arange(n1)
    tau_pow = float(tau) ** dist
    h = np.ones((m, n1), dtype=complex)
    out = h * (_INV_FACT[dist] * tau_pow)
    for q in range(1, TAYLOR_TERMS):
        h = np.cumsum(u * h, axis=1)
        out += h * (_INV_FACT[dist + q] * tau_pow)
    return out


def _taylor_table(u, tau):
    """exp(tau W) for centred, pre-scaled nodes u = tau * w; shape (M, n+1, n+1)."""
    m, n1 = u.shape
    d = np.arange(n1)
    # dist[i, j] = j - i on and above the diagonal
    dist = d[None, :] - d[:, None]
    upper = dist >= 0
    dist_c = np.where(upper, dist, 0)
    tau_pow = np.where(upper, float(tau) ** dist_c, 0.0)

    h = np.broadcast_to(upper, (m, n1, n1)).astype(complex)  # h_0 = 1
    out = h * (_INV_FACT[dist_c] * tau_pow)[None]
    mask = upper.astype(float)[None]
    for q in range(1, TAYLOR_TERMS):
        # h_q(u_i..u_j) = sum_{l=i}^{j} u_l h_{q-1}(u_i..u_l)
        h = np.cumsum(u[:, None, :] * h, axis=2) * mask
        out += h * (_INV_FACT[dist_c + q] * tau_pow)[None]
    return out


def dd_exp_rows(t, base, offsets):
    """Divided differences of e^{t z} over the leading node prefixes.

    Nodes are base[:, None] + offsets, so a large common part can be kept
    out of the differences.  Returns an (M, n+1) array whose column j is the
    divided difference over nodes 0..j of each row.
    """
    offsets = np.atleast_2d(np.asarray(offsets, dtype=complex))
    base = np.broadcast_to(np.asarray(base, dtype=complex), offsets.shape[:1])
    m, n1 = offsets.shape
    shift = offsets.mean(axis=1)
    w = offsets - shift[:, None]
    centre = base + shift
    scale = np.exp(t * centre)
    if n1 == 1:
        return scale[:, None].copy()

    spread = t * np.abs(w).max(axis=1)
    with np.errstate(divide="ignore"):
        s_all = np.where(
            spread > SCALE_THETA, np.ceil(np.log2(spread / SCALE_THETA)), 0
        ).astype(int)

    out = np.empty((m, n1), dtype=complex)
    for s in np.unique(s_all):
        rows = np.nonzero(s_all == s)[0]
        tau = t / 2.0**s
        if s == 0:
            out[rows] = _first_row(tau * w[rows], tau)
            continue
        g = _taylor_table(tau * w[rows], tau)
        for _ in range(s):
            g = g @ g
        out[rows] = g[:, 0, :]
    return out * scale[:, None]


def dd_exp_pair(t, z0, z1):
    """Two-node divided difference e^{t m} t sinh(h)/h, m the midpoint, h = t (z0 - z1)/2."""
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    h = 0.5 * t * (z0 - z1)
    small = np.abs(h) < 1e-3
    h_safe = np.where(small, 1.0, h)
    h2 = h * h
    shc = np.where(small, 1.0 + h2 / 6.0 + h2 * h2 / 120.0, np.sinh(h_safe) / h_safe)
    return t * np.exp(0.5 * t * (z0 + z1)) * shc


def divided_diff_exp(t, nodes):
    """Divided difference of z -> e^{t z} over the node multiset."""
    nodes = np.asarray(nodes, dtype=complex).ravel()
    if nodes.size == 0:
        raise ValueError("need at least one node")
    z0 = nodes[0]
    return complex(dd_exp_rows(t, np.array([z0]), (nodes - z0)[None, :])[0, -1])


def pole_sum(t, nodes):
    """Direct evaluation of sum_k e^{t z_k} / prod_{j != k}(z_k - z_j).

    Requires distinct nodes; loses accuracy as gaps shrink.
    """
    nodes = np.asarray(nodes, dtype=complex).ravel()
    total = 0j
    for k, zk in enumerate(nodes):
        others = np.delete(nodes, k)
        total += np.exp(t * zk) / np.prod(zk - others)
    return complex(total)
