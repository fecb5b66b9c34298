"""Pure Python/numpy versions of the compiled kernels in ``_core.pyx``.

Both modules expose the same functions with the same arithmetic order, so
decoding results are bit-identical whichever backend is loaded.
"""

import numpy as np


def unrecoverable_weight_counts(row_words, ell):
    """Count erasure patterns that leave each ``u_i`` undetermined.

    Returns an ``(ell, ell + 1)`` int64 array whose entry ``[i, w]`` is the
    number of patterns with ``w`` erased outputs for which ``u_{i+1}`` is not
    determined by the unerased outputs and ``u_1..u_i``.
    """
    counts = np.zeros((ell, ell + 1), dtype=np.int64)
    full = (1 << ell) - 1
    for i in range(ell):
        # column j restricted to rows i..ell-1, bit 0 = row i
        cols = []
        for j in range(ell):
            w = 0
            for r in range(i, ell):
                if (row_words[r] >> j) & 1:
                    w |= 1 << (r - i)
            cols.append(w)
        for unerased in range(1 << ell):
            basis = {}
            for j in range(ell):
                if (unerased >> j) & 1:
                    v = cols[j]
                    while v:
                        top = v.bit_length() - 1
                        if top not in basis:
                            basis[top] = v
                            break
                        v ^= basis[top]
            t = 1
            while t:
                top = t.bit_length() - 1
                if top not in basis:
                    break
                t ^= basis[top]
            if t:
                counts[i, bin(full & ~unerased).count("1")] += 1
    return counts


def sc_decode_batch(level_rows, L, frozen, frozen_values, genie=None):
    """Successive-cancellation decoding of a batch of frames.

    Parameters
    ----------
    level_rows : list of tuple of int
        Kernel row words per level, outermost level first.
    L : ndarray, shape (B, N, 2)
        Likelihood pairs ``(W(y|0), W(y|1))`` per code bit.
    frozen, frozen_values : ndarray of uint8, shape (N,)
    genie : ndarray of uint8, shape (B, N), optional
        True input bits; when given, each decision is replaced by the true bit
        after recording the first index where the decoder would have erred.

    Returns
    -------
    u_hat : ndarray of uint8, shape (B, N)
    first_error : ndarray of int64, shape (B,)
        ``-1`` when no error was made (genie mode only).
    ops : int
        Likelihood products evaluated per frame.
    """
    L = np.asarray(L, dtype=np.float64)
    B, N, _ = L.shape
    n = len(level_rows)
    tot = L[:, :, 0] + L[:, :, 1]
    safe = np.where(tot > 0, tot, 1.0)
    P = np.where((tot > 0)[:, :, None], L / safe[:, :, None], 0.5)
    u_hat = np.zeros((B, N), dtype=np.uint8)
    first_error = np.full(B, -1, dtype=np.int64)
    ops = [0]
    frozen = np.asarray(frozen, dtype=np.uint8)
    frozen_values = np.asarray(frozen_values, dtype=np.uint8)

    def node(t, P, u_off):
        if t == n:
            dec = (P[:, 0, 1] > P[:, 0, 0]).astype(np.uint8)
            if frozen[u_off]:
                dec[:] = frozen_values[u_off]
            elif genie is not None:
                truth = genie[:, u_off]
                wrong = (dec != truth) & (first_error < 0)
                first_error[wrong] = u_off
                dec = truth.astype(np.uint8)
            u_hat[:, u_off] = dec
            return dec[:, None].astype(np.int64)
        rows = level_rows[t]
        ell = len(rows)
        M = P.shape[1] // ell
        Pc = P.reshape(B, ell, M, 2)
        S = np.zeros((B, M), dtype=np.int64)
        for d in range(ell):
            acc = [np.zeros((B, M)), np.zeros((B, M))]
            for a in range(1 << (ell - d)):
                cm = 0
                for j in range(ell - d):
                    if (a >> j) & 1:
                        cm ^= rows[d + j]
                x = S ^ cm
                prod = np.where(x & 1, Pc[:, 0, :, 1], Pc[:, 0, :, 0])
                for c in range(1, ell):
                    prod = prod * np.where((x >> c) & 1, Pc[:, c, :, 1], Pc[:, c, :, 0])
                acc[a & 1] = acc[a & 1] + prod
                ops[0] += ell * M
            s = acc[0] + acc[1]
            ok = s > 0
            s = np.where(ok, s, 1.0)
            Q = np.stack([np.where(ok, acc[0] / s, 0.5), np.where(ok, acc[1] / s, 0.5)], axis=-1)
            v = node(t + 1, Q, u_off + d * M)
            S ^= v * rows[d]
        x = np.concatenate([(S >> c) & 1 for c in range(ell)], axis=1)
        return x

    node(0, P, 0)
    return u_hat, first_error, ops[0]
