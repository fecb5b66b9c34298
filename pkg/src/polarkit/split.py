"""Exact one-level channel splitting under an ℓ×ℓ kernel.

For a kernel ``G`` and channel ``W`` the transform sends ``u`` through
``x = u G`` and ``ℓ`` independent uses of ``W``.  The ``i``-th synthesized
channel sees ``u_i`` with the earlier inputs known and the later ones
uniform.  Everything here is computed by enumeration over ``Y^ℓ`` and
merged to a sufficient statistic afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    ALPHABET_CAP,
    BinaryChannel,
    CapacityError,
    ChannelError,
    InfoPair,
    check_alphabet,
    finalize_channel,
    merge_equivalent_outputs,
)
from .gf2 import BitMatrix, KernelError, is_invertible, unit_diagonalize


@dataclass(frozen=True)
class SplitResult:
    subchannels: tuple
    info: tuple
    permutation: tuple

    @property
    def mutual_infos(self) -> np.ndarray:
        return np.array([p.mutual_info for p in self.info])

    @property
    def bhattacharyyas(self) -> np.ndarray:
        return np.array([p.bhattacharyya for p in self.info])


def _check_kernel(G: BitMatrix, i: int) -> None:
    if not is_invertible(G):
        raise KernelError("kernel must be square and invertible over GF(2)")
    if not 1 <= i <= G.rows:
        raise IndexError(f"sub-channel index {i} outside 1..{G.rows}")


def _require_symmetric(W: BinaryChannel) -> None:
    if W.symmetry_perm is None:
        raise ChannelError("this construction needs a symmetric channel (attach a symmetry witness)")


def _codeword_likelihood(W: BinaryChannel, x) -> np.ndarray:
    """``prod_j W(y_j | x_j)`` over ``Y^ℓ`` in row-major order."""
    rows = (W.p0, W.p1)
    out = rows[x[0]]
    for b in x[1:]:
        out = np.multiply.outer(out, rows[b]).ravel()
    return out


def _compensated_sum(terms) -> np.ndarray:
    """Elementwise Neumaier summation in a fixed order."""
    total = None
    comp = None
    for v in terms:
        if total is None:
            total = v.copy()
            comp = np.zeros_like(v)
            continue
        t = total + v
        comp += np.where(np.abs(total) >= np.abs(v), (total - t) + v, (v - t) + total)
        total = t
    return total + comp


def _marginal(W: BinaryChannel, G: BitMatrix, prefix: int, i: int, ui: int) -> np.ndarray:
    """Sum of ``W_ℓ(y | u)`` over ``u_{i+1..ℓ}`` for fixed ``u_1..u_i``.

    ``prefix`` packs ``u_1..u_{i-1}`` with bit ``r`` holding ``u_{r+1}``.
    """
    ell = G.rows
    words = G.row_words
    base = 0
    for r in range(i - 1):
        if (prefix >> r) & 1:
            base ^= words[r]
    if ui:
        base ^= words[i - 1]

    def terms():
        for tail in range(1 << (ell - i)):
            x = base
            for j in range(ell - i):
                if (tail >> j) & 1:
                    x ^= words[i + j]
            yield _codeword_likelihood(W, [(x >> c) & 1 for c in range(ell)])

    return _compensated_sum(terms())


def split_tilde(W: BinaryChannel, G: BitMatrix, i: int, cap: int = ALPHABET_CAP) -> BinaryChannel:
    """Sub-channel ``i`` (1-based) with ``u_1..u_{i-1}`` pinned to zero.

    Valid as a stand-in for the full synthesized channel only for symmetric
    ``W``; the result is merged and carries a symmetry witness.
    """
    _check_kernel(G, i)
    _require_symmetric(W)
    ell = G.rows
    check_alphabet(W.output_count**ell, cap)
    Gs = G.permute_columns(unit_diagonalize(G))
    scale = 1.0 / 2 ** (ell - i)
    p0 = _marginal(W, Gs, 0, i, 0) * scale
    p1 = _marginal(W, Gs, 0, i, 1) * scale
    return merge_equivalent_outputs(finalize_channel(p0, p1, True))


def split_joint(W: BinaryChannel, G: BitMatrix, i: int, cap: int = ALPHABET_CAP) -> BinaryChannel:
    """Full sub-channel ``i`` with output ``(y_1..y_ℓ, u_1..u_{i-1})``.

    Does not need symmetry.  Outputs are grouped by prefix, prefix-major.
    """
    _check_kernel(G, i)
    ell = G.rows
    check_alphabet(W.output_count**ell * 2 ** (i - 1), cap)
    Gs = G.permute_columns(unit_diagonalize(G))
    scale = 1.0 / 2 ** (ell - 1)
    blocks0, blocks1 = [], []
    for prefix in range(1 << (i - 1)):
        blocks0.append(_marginal(W, Gs, prefix, i, 0) * scale)
        blocks1.append(_marginal(W, Gs, prefix, i, 1) * scale)
    p0 = np.concatenate(blocks0)
    p1 = np.concatenate(blocks1)
    return merge_equivalent_outputs(finalize_channel(p0, p1, W.symmetry_perm is not None))


def split_all(W: BinaryChannel, G: BitMatrix, cap: int = ALPHABET_CAP) -> SplitResult:
    subs = tuple(split_tilde(W, G, i, cap) for i in range(1, G.rows + 1))
    info = tuple(s.info() for s in subs)
    base = W.info().mutual_info
    mean = math.fsum(p.mutual_info for p in info) / G.rows
    if abs(mean - base) > 1e-9:
        raise ArithmeticError(f"chain rule violated: mean {mean!r} vs I(W) {base!r}")
    return SplitResult(subs, info, unit_diagonalize(G))


def _as_levels(G, n):
    if isinstance(G, BitMatrix):
        return [G] * n
    kernels = list(G)
    if n is not None and n != len(kernels):
        raise ValueError("n disagrees with the number of kernels")
    return kernels


def recursive_polarize(W: BinaryChannel, G, n: int | None = None, cap: int = ALPHABET_CAP) -> list:
    """``(I, Z)`` of all leaves after ``n`` levels of splitting.

    ``G`` is one kernel (used at every level) or a per-level sequence,
    outermost first.  Leaves are listed in path order: the leaf with digits
    ``d_1..d_n`` sits at index ``d_1 ℓ^{n-1} + ... + d_n``.
    """
    kernels = _as_levels(G, n)
    level = [W]
    for depth, K in enumerate(kernels):
        nxt = []
        for ch in level:
            try:
                nxt.extend(split_all(ch, K, cap).subchannels)
            except CapacityError as exc:
                raise CapacityError(f"{exc} (reached level {depth} of {len(kernels)})") from exc
        level = nxt
    return [ch.info() for ch in level]
