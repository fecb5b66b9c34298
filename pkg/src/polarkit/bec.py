"""Exact polarization of the binary erasure channel.

Every sub-channel of an erasure channel is again an erasure channel: given
the unerased outputs and the earlier inputs, ``u_i`` is either determined or
uniformly uncertain.  Its erasure probability is therefore a polynomial in
``eps`` whose coefficients count undetermined erasure patterns by weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .gf2 import BitMatrix, KernelError, is_invertible

LEAF_CAP = 10**7


@dataclass(frozen=True)
class ErasureVector:
    """Erasure probabilities of all leaves after ``level`` splits.

    ``sizes`` lists the kernel size used at each level, outermost first; leaf
    ``k`` has mixed-radix digits of ``k`` (most significant first) as its path.
    """

    level: int
    eps: np.ndarray
    sizes: tuple = ()

    @property
    def blocklength(self) -> int:
        return int(self.eps.size)

    @property
    def mutual_info(self) -> np.ndarray:
        return 1.0 - self.eps

    def path_digits(self, leaf: int) -> tuple:
        digits = []
        for ell in reversed(self.sizes):
            leaf, d = divmod(leaf, ell)
            digits.append(d)
        return tuple(reversed(digits))


@lru_cache(maxsize=256)
def _weight_table(G: BitMatrix) -> np.ndarray:
    if not is_invertible(G):
        raise KernelError("kernel must be square and invertible over GF(2)")
    table = _kernels.unrecoverable_weight_counts(G.row_words, G.rows)
    table.setflags(write=False)
    return table


def erasure_polynomials(G: BitMatrix) -> np.ndarray:
    """``[i, w]``: erasure patterns of weight ``w`` leaving ``u_{i+1}`` undetermined."""
    return _weight_table(G)


def _evaluate(table: np.ndarray, eps: np.ndarray) -> np.ndarray:
    """Child erasure probabilities, shape ``eps.shape + (ell,)``."""
    ell = table.shape[1] - 1
    eps = np.asarray(eps, dtype=np.float64)[..., None]
    w = np.arange(ell + 1)
    basis = eps**w * (1.0 - eps) ** (ell - w)
    return np.clip(basis @ table.T.astype(np.float64), 0.0, 1.0)


def bec_split_one(G: BitMatrix, i: int, eps: float) -> float:
    """Erasure probability of sub-channel ``i`` (1-based) of BEC(eps)."""
    table = _weight_table(G)
    if not 1 <= i <= G.rows:
        raise IndexError(f"sub-channel index {i} outside 1..{G.rows}")
    return float(_evaluate(table[i - 1:i], eps)[0])


def bec_split_all(G: BitMatrix, eps) -> np.ndarray:
    return _evaluate(_weight_table(G), eps)


def _levels(G, n):
    if isinstance(G, BitMatrix):
        if n is None:
            raise ValueError("number of levels required for a single kernel")
        return [G] * n
    kernels = list(G)
    if n is not None and n != len(kernels):
        raise ValueError("n disagrees with the number of kernels")
    return kernels


def bec_polarize(G, eps0: float, n: int | None = None, cap: int = LEAF_CAP) -> ErasureVector:
    """Leaf erasure probabilities after ``n`` levels under ``G`` (or per-level kernels)."""
    kernels = _levels(G, n)
    if not 0.0 <= eps0 <= 1.0:
        raise ValueError("erasure probability must lie in [0, 1]")
    sizes = tuple(K.rows for K in kernels)
    total = int(np.prod(sizes)) if sizes else 1
    if total > cap:
        raise OverflowError(f"{total} leaves exceeds the cap of {cap}")
    eps = np.array([eps0], dtype=np.float64)
    for K in kernels:
        eps = bec_split_all(K, eps).ravel()
    return ErasureVector(len(kernels), eps, sizes)


def bec_levels(G, eps0: float, n: int | None = None, cap: int = LEAF_CAP) -> list:
    """Erasure vectors for every level ``0..n``."""
    kernels = _levels(G, n)
    return [bec_polarize(kernels[:t], eps0, cap=cap) for t in range(len(kernels) + 1)]


def polarization_fraction(v: ErasureVector, delta: float) -> float:
    """Fraction of leaves whose capacity lies strictly inside ``(delta, 1 - delta)``."""
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    I = 1.0 - v.eps
    return float(np.mean((I > delta) & (I < 1.0 - delta)))


def rate_threshold(v: ErasureVector, beta: float) -> float:
    """``2 ** -(N ** beta)`` for the vector's blocklength ``N``."""
    return float(2.0 ** -(float(v.blocklength) ** beta))


def rate_statistic(v: ErasureVector, beta: float) -> float:
    """Fraction of leaves with erasure probability at most ``2 ** -(N ** beta)``."""
    return float(np.mean(v.eps <= rate_threshold(v, beta)))
