"""Brute-force reference computations used by the tests.

Everything here is written from the definitions with plain loops, sharing
no code with the package beyond the channel arrays themselves.
"""

import itertools
import math

import numpy as np


def mat_bits(rows):
    return np.array([[int(c) for c in r] for r in rows], dtype=np.int64)


def info_z(p0, p1):
    """Symmetric capacity and Bhattacharyya parameter by direct summation."""
    I = 0.0
    for a, b in zip(p0, p1):
        q = 0.5 * (a + b)
        if a > 0:
            I += 0.5 * a * math.log2(a / q)
        if b > 0:
            I += 0.5 * b * math.log2(b / q)
    Z = sum(math.sqrt(a * b) for a, b in zip(p0, p1))
    return I, Z


def joint_split(p0, p1, G, i):
    """``W^(i)(y, u_1..u_{i-1} | u_i)`` as two flat lists, outputs in loop order."""
    ell = len(G)
    m = len(p0)
    W = (p0, p1)
    out = {0: [], 1: []}
    for ui in (0, 1):
        for prefix in itertools.product((0, 1), repeat=i - 1):
            for ys in itertools.product(range(m), repeat=ell):
                total = 0.0
                for suffix in itertools.product((0, 1), repeat=ell - i):
                    u = list(prefix) + [ui] + list(suffix)
                    x = [sum(u[r] * G[r][c] for r in range(ell)) % 2 for c in range(ell)]
                    pr = 1.0
                    for c in range(ell):
                        pr *= W[x[c]][ys[c]]
                    total += pr
                out[ui].append(total / 2 ** (ell - 1))
    return out[0], out[1]


def product_info(p0, p1, k):
    """``I`` of ``k`` independent uses by enumeration."""
    m = len(p0)
    q0, q1 = [], []
    for ys in itertools.product(range(m), repeat=k):
        q0.append(math.prod(p0[y] for y in ys))
        q1.append(math.prod(p1[y] for y in ys))
    return info_z(q0, q1)


def bec_subchannel_erasure(G, i, eps):
    """Erasure probability of ``u_i`` by enumerating erasure patterns and
    solving for ``u_i`` with explicit Gaussian elimination mod 2."""
    ell = len(G)
    total = 0.0
    for pattern in itertools.product((0, 1), repeat=ell):  # 1 = erased
        kept = [c for c in range(ell) if not pattern[c]]
        # unknowns u_i..u_ell; equations x_c = sum_r u_r G[r][c] for kept c
        rows = [[G[r][c] for r in range(i - 1, ell)] for c in kept]
        if not _determines_first(rows, ell - i + 1):
            w = sum(pattern)
            total += eps**w * (1 - eps) ** (ell - w)
    return total


def _determines_first(rows, nvars):
    """Whether e_1 lies in the row space of ``rows`` over GF(2)."""
    basis = []
    for r in rows:
        v = list(r)
        for b in basis:
            piv = next(k for k in range(nvars) if b[k])
            if v[piv]:
                v = [(x + y) % 2 for x, y in zip(v, b)]
        if any(v):
            basis.append(v)
    target = [1] + [0] * (nvars - 1)
    for b in basis:
        piv = next(k for k in range(nvars) if b[k])
        if target[piv]:
            target = [(x + y) % 2 for x, y in zip(target, b)]
    return not any(target)


def kron_explicit(mats):
    M = np.array([[1]], dtype=np.int64)
    for G in mats:
        M = np.kron(M, np.asarray(G, dtype=np.int64))
    return M % 2


def encode_explicit(mats, u):
    return (np.asarray(u, dtype=np.int64) @ kron_explicit(mats)) % 2


def sc_g2_classic(L, frozen, frozen_values):
    """Textbook probability-domain SC decoder for ``G_2``-powers (f/g updates)."""
    L = np.asarray(L, dtype=float)
    P = L / L.sum(axis=1, keepdims=True)
    N = len(P)
    u = np.zeros(N, dtype=np.int64)

    def rec(P, off):
        n = len(P)
        if n == 1:
            if frozen[off]:
                u[off] = frozen_values[off]
            else:
                u[off] = 1 if P[0, 1] > P[0, 0] else 0
            return np.array([u[off]])
        h = n // 2
        P1, P2 = P[:h], P[h:]
        f = np.stack([P1[:, 0] * P2[:, 0] + P1[:, 1] * P2[:, 1], P1[:, 1] * P2[:, 0] + P1[:, 0] * P2[:, 1]], axis=1)
        f = f / f.sum(axis=1, keepdims=True)
        xa = rec(f, off)
        g = np.stack([P1[np.arange(h), xa] * P2[:, 0], P1[np.arange(h), xa ^ 1] * P2[:, 1]], axis=1)
        s = g.sum(axis=1, keepdims=True)
        g = np.where(s > 0, g / np.where(s > 0, s, 1), 0.5)
        xb = rec(g, off + h)
        return np.concatenate([xa ^ xb, xb])

    rec(P, 0)
    return u
