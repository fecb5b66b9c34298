# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: erasure-pattern enumeration and batched SC decoding.

Semantics and floating-point operation order match ``_fallback.py``.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t, uint64_t

cnp.import_array()

cdef enum:
    MAX_LEVELS = 64
    MAX_ELL = 24


cdef inline int _popcount(uint64_t v) noexcept nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


cdef inline int _top_bit(uint64_t v) noexcept nogil:
    cdef int t = -1
    while v:
        v >>= 1
        t += 1
    return t


def unrecoverable_weight_counts(row_words, int ell):
    if ell < 1 or ell > MAX_ELL:
        raise ValueError(f"kernel size {ell} outside 1..{MAX_ELL}")
    cdef uint64_t rows[MAX_ELL]
    cdef uint64_t cols[MAX_ELL]
    cdef uint64_t basis[MAX_ELL]
    cdef int i, j, r, top
    cdef uint64_t unerased, v, t, full = (<uint64_t>1 << ell) - 1
    counts = np.zeros((ell, ell + 1), dtype=np.int64)
    cdef int64_t[:, ::1] cv = counts
    for r in range(ell):
        rows[r] = <uint64_t>row_words[r]
    with nogil:
        for i in range(ell):
            for j in range(ell):
                v = 0
                for r in range(i, ell):
                    if (rows[r] >> j) & 1:
                        v |= (<uint64_t>1) << (r - i)
                cols[j] = v
            for unerased in range(<uint64_t>1 << ell):
                for r in range(ell):
                    basis[r] = 0
                for j in range(ell):
                    if (unerased >> j) & 1:
                        v = cols[j]
                        while v:
                            top = _top_bit(v)
                            if basis[top] == 0:
                                basis[top] = v
                                break
                            v ^= basis[top]
                t = 1
                while t:
                    top = _top_bit(t)
                    if basis[top] == 0:
                        break
                    t ^= basis[top]
                if t:
                    cv[i, _popcount(full & ~unerased)] += 1
    return counts


cdef class _SCState:
    cdef int n
    cdef int ells[MAX_LEVELS]
    cdef int sizes[MAX_LEVELS + 1]
    cdef int64_t rows[MAX_LEVELS][MAX_ELL]
    cdef double* P[MAX_LEVELS + 1]
    cdef uint8_t* V[MAX_LEVELS]
    cdef int64_t* S[MAX_LEVELS]
    cdef const uint8_t* frozen
    cdef const uint8_t* fvals
    cdef uint8_t* uhat
    cdef const uint8_t* genie
    cdef int64_t first_error
    cdef int64_t ops
    cdef object keep

    cdef void node(self, int t, int u_off, uint8_t* dst) noexcept nogil:
        cdef int ell, M, d, a, j, c, r, v, dec
        cdef int64_t cm, x
        cdef double prod, s
        cdef double* P
        cdef double* Q
        cdef uint8_t* Vt
        cdef int64_t* St
        if t == self.n:
            P = self.P[t]
            dec = 1 if P[1] > P[0] else 0
            if self.frozen[u_off]:
                dec = self.fvals[u_off]
            elif self.genie != NULL:
                if dec != self.genie[u_off] and self.first_error < 0:
                    self.first_error = u_off
                dec = self.genie[u_off]
            self.uhat[u_off] = <uint8_t>dec
            dst[0] = <uint8_t>dec
            return
        ell = self.ells[t]
        M = self.sizes[t + 1]
        P = self.P[t]
        Q = self.P[t + 1]
        Vt = self.V[t]
        St = self.S[t]
        for r in range(M):
            St[r] = 0
        for d in range(ell):
            for r in range(2 * M):
                Q[r] = 0.0
            for a in range(1 << (ell - d)):
                cm = 0
                for j in range(ell - d):
                    if (a >> j) & 1:
                        cm ^= self.rows[t][d + j]
                v = a & 1
                for r in range(M):
                    x = St[r] ^ cm
                    prod = P[2 * r + (x & 1)]
                    for c in range(1, ell):
                        prod = prod * P[2 * (c * M + r) + ((x >> c) & 1)]
                    Q[2 * r + v] = Q[2 * r + v] + prod
                self.ops += ell * M
            for r in range(M):
                s = Q[2 * r] + Q[2 * r + 1]
                if s > 0:
                    Q[2 * r] = Q[2 * r] / s
                    Q[2 * r + 1] = Q[2 * r + 1] / s
                else:
                    Q[2 * r] = 0.5
                    Q[2 * r + 1] = 0.5
            self.node(t + 1, u_off + d * M, Vt + d * M)
            for r in range(M):
                if Vt[d * M + r]:
                    St[r] ^= self.rows[t][d]
        for c in range(ell):
            for r in range(M):
                dst[c * M + r] = <uint8_t>((St[r] >> c) & 1)


def sc_decode_batch(level_rows, L, frozen, frozen_values, genie=None):
    cdef cnp.ndarray[double, ndim=3, mode="c"] Lc = np.ascontiguousarray(L, dtype=np.float64)
    cdef int B = Lc.shape[0]
    cdef int N = Lc.shape[1]
    cdef int n = len(level_rows)
    if n > MAX_LEVELS:
        raise ValueError("too many levels")
    cdef _SCState st = _SCState()
    st.n = n
    st.sizes[0] = N
    cdef int t, j
    for t in range(n):
        rows = level_rows[t]
        if len(rows) > MAX_ELL:
            raise ValueError("kernel too large for the compiled decoder")
        st.ells[t] = len(rows)
        st.sizes[t + 1] = st.sizes[t] // st.ells[t]
        for j in range(len(rows)):
            st.rows[t][j] = rows[j]
    keep = []
    cdef cnp.ndarray[double, ndim=1, mode="c"] pbuf
    cdef cnp.ndarray[uint8_t, ndim=1, mode="c"] vbuf
    cdef cnp.ndarray[int64_t, ndim=1, mode="c"] sbuf
    for t in range(n + 1):
        pbuf = np.zeros(2 * st.sizes[t], dtype=np.float64)
        keep.append(pbuf)
        st.P[t] = &pbuf[0]
    for t in range(n):
        vbuf = np.zeros(st.sizes[t], dtype=np.uint8)
        sbuf = np.zeros(st.sizes[t + 1], dtype=np.int64)
        keep.extend((vbuf, sbuf))
        st.V[t] = &vbuf[0]
        st.S[t] = &sbuf[0]
    cdef cnp.ndarray[uint8_t, ndim=1, mode="c"] fz = np.ascontiguousarray(frozen, dtype=np.uint8)
    cdef cnp.ndarray[uint8_t, ndim=1, mode="c"] fv = np.ascontiguousarray(frozen_values, dtype=np.uint8)
    u_hat = np.zeros((B, N), dtype=np.uint8)
    first_error = np.full(B, -1, dtype=np.int64)
    cdef uint8_t[:, ::1] uh = u_hat
    cdef int64_t[::1] fe = first_error
    cdef cnp.ndarray[uint8_t, ndim=2, mode="c"] gn
    cdef bint has_genie = genie is not None
    if has_genie:
        gn = np.ascontiguousarray(genie, dtype=np.uint8)
    xtop = np.zeros(N, dtype=np.uint8)
    cdef uint8_t[::1] xt = xtop
    st.keep = keep
    st.frozen = &fz[0]
    st.fvals = &fv[0]
    cdef int b, y
    cdef double l0, l1, tot
    cdef double* P0 = st.P[0]
    cdef int64_t ops = 0
    for b in range(B):
        for y in range(N):
            l0 = Lc[b, y, 0]
            l1 = Lc[b, y, 1]
            tot = l0 + l1
            if tot > 0:
                P0[2 * y] = l0 / tot
                P0[2 * y + 1] = l1 / tot
            else:
                P0[2 * y] = 0.5
                P0[2 * y + 1] = 0.5
        st.uhat = &uh[b, 0]
        st.genie = &gn[b, 0] if has_genie else NULL
        st.first_error = -1
        st.ops = 0
        with nogil:
            st.node(0, 0, &xt[0])
        fe[b] = st.first_error
        ops = st.ops
    return u_hat, first_error, int(ops)
