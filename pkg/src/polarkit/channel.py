"""Finite binary-input channels and their information measures.

A channel is stored as two probability rows ``p0[y] = W(y|0)`` and
``p1[y] = W(y|1)`` over an indexed output alphabet.  Symmetric channels
carry an involutive output permutation ``perm`` with
``p0[y] == p1[perm[y]]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

PROB_TOL = 1e-12
SYMMETRY_TOL = 1e-12
MERGE_RTOL = 1e-12
ALPHABET_CAP = 10**6


class ChannelError(ValueError):
    """Invalid channel data or a precondition on the channel failed."""


class CapacityError(RuntimeError):
    """An operation would produce an output alphabet above the cap."""


@dataclass(frozen=True, eq=False)
class InfoPair:
    mutual_info: float
    bhattacharyya: float

    def satisfies_bounds(self, tol: float = 1e-9) -> bool:
        i, z = self.mutual_info, self.bhattacharyya
        return i * i + z * z <= 1 + tol and i + z >= 1 - tol

    def __iter__(self):
        yield self.mutual_info
        yield self.bhattacharyya


class BinaryChannel:
    """Binary-input channel over a finite output alphabet.

    Parameters
    ----------
    p0, p1 : array_like
        Output distributions given input 0 and input 1.
    symmetry_perm : array_like of int, optional
        Involution ``pi`` with ``p0[y] == p1[pi[y]]`` exactly.
    """

    __slots__ = ("p0", "p1", "symmetry_perm")

    def __init__(self, p0, p1, symmetry_perm=None):
        p0 = np.array(p0, dtype=np.float64)
        p1 = np.array(p1, dtype=np.float64)
        if p0.ndim != 1 or p0.shape != p1.shape or p0.size == 0:
            raise ChannelError("p0 and p1 must be non-empty vectors of equal length")
        if not (np.all(np.isfinite(p0)) and np.all(np.isfinite(p1))):
            raise ChannelError("probabilities must be finite")
        if p0.min() < 0 or p1.min() < 0:
            raise ChannelError("probabilities must be nonnegative")
        for name, row in (("p0", p0), ("p1", p1)):
            if abs(math.fsum(row) - 1.0) > PROB_TOL:
                raise ChannelError(f"{name} sums to {math.fsum(row)!r}, not 1")
        if symmetry_perm is not None:
            perm = np.array(symmetry_perm, dtype=np.int64)
            m = p0.size
            if perm.shape != (m,) or not np.array_equal(np.sort(perm), np.arange(m)):
                raise ChannelError("symmetry_perm must be a permutation of the outputs")
            if not np.array_equal(perm[perm], np.arange(m)):
                raise ChannelError("symmetry_perm must be an involution")
            if not np.array_equal(p0, p1[perm]):
                raise ChannelError("symmetry_perm does not map p0 onto p1")
            perm.setflags(write=False)
            symmetry_perm = perm
        p0.setflags(write=False)
        p1.setflags(write=False)
        self.p0 = p0
        self.p1 = p1
        self.symmetry_perm = symmetry_perm

    @classmethod
    def symmetrized(cls, p0, p1, perm) -> "BinaryChannel":
        """Build a channel whose rows are projected onto exact ``perm``-symmetry.

        Used for derived channels, whose rows agree with the witness only up
        to rounding.
        """
        p0 = np.asarray(p0, dtype=np.float64)
        p1 = np.asarray(p1, dtype=np.float64)
        perm = np.asarray(perm, dtype=np.int64)
        a = 0.5 * (p0 + p1[perm])
        a = a / math.fsum(a)
        return cls(a, a[perm], perm)

    @property
    def output_count(self) -> int:
        return int(self.p0.size)

    def __len__(self) -> int:
        return self.output_count

    def __repr__(self) -> str:
        sym = "" if self.symmetry_perm is None else ", symmetric"
        return f"BinaryChannel(outputs={self.output_count}{sym})"

    def info(self) -> InfoPair:
        return InfoPair(symmetric_capacity(self), bhattacharyya(self))

    def to_dict(self) -> dict:
        d = {"outputs": self.output_count, "p0": self.p0.tolist(), "p1": self.p1.tolist()}
        if self.symmetry_perm is not None:
            d["symmetry"] = self.symmetry_perm.tolist()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BinaryChannel":
        try:
            p0, p1 = d["p0"], d["p1"]
        except (KeyError, TypeError) as exc:
            raise ChannelError("channel JSON needs 'p0' and 'p1'") from exc
        if "outputs" in d and int(d["outputs"]) != len(p0):
            raise ChannelError("'outputs' disagrees with the length of 'p0'")
        return cls(p0, p1, d.get("symmetry"))

    @classmethod
    def from_json(cls, text: str) -> "BinaryChannel":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def make_bsc(epsilon: float) -> BinaryChannel:
    if not 0.0 <= epsilon <= 0.5:
        raise ChannelError(f"BSC crossover must lie in [0, 1/2], got {epsilon}")
    return BinaryChannel([1 - epsilon, epsilon], [epsilon, 1 - epsilon], [1, 0])


def make_bec(epsilon: float) -> BinaryChannel:
    """Erasure channel with outputs ordered ``(0, erasure, 1)``."""
    if not 0.0 <= epsilon <= 1.0:
        raise ChannelError(f"BEC erasure probability must lie in [0, 1], got {epsilon}")
    return BinaryChannel([1 - epsilon, epsilon, 0.0], [0.0, epsilon, 1 - epsilon], [2, 1, 0])


def random_symmetric_channel(seed: int, subchannel_count: int) -> BinaryChannel:
    """Random mixture of BSCs; output ``2*j + b`` is bit ``b`` of sub-channel ``j``.

    Mixture weights are uniform on the simplex and crossovers uniform on
    ``[0, 1/2]``, drawn from a Philox stream keyed by ``seed``.
    """
    if subchannel_count < 1:
        raise ChannelError("subchannel_count must be positive")
    rng = np.random.Generator(np.random.Philox(key=int(seed) & (2**64 - 1)))
    weights = rng.dirichlet(np.ones(subchannel_count)) if subchannel_count > 1 else np.ones(1)
    eps = rng.uniform(0.0, 0.5, size=subchannel_count)
    p0 = np.empty(2 * subchannel_count)
    p0[0::2] = weights * (1 - eps)
    p0[1::2] = weights * eps
    p0 /= math.fsum(p0)
    perm = np.arange(2 * subchannel_count) ^ 1
    return BinaryChannel(p0, p0[perm], perm)


# ---------------------------------------------------------------------------
# information measures
# ---------------------------------------------------------------------------

def symmetric_capacity(W: BinaryChannel) -> float:
    """Mutual information in bits under a uniform input."""
    p0, p1 = W.p0, W.p1
    mid = 0.5 * (p0 + p1)
    total = 0.0
    for row in (p0, p1):
        nz = row > 0
        total += float(np.sum(row[nz] * np.log2(row[nz] / mid[nz])))
    return min(max(0.5 * total, 0.0), 1.0)


def bhattacharyya(W: BinaryChannel) -> float:
    return min(float(np.sum(np.sqrt(W.p0 * W.p1))), 1.0)


def binary_entropy(p):
    """``h(p)`` in bits; accepts scalars or arrays."""
    arr = np.asarray(p, dtype=np.float64)
    if np.any((arr < 0) | (arr > 1)):
        raise ValueError("binary_entropy argument must lie in [0, 1]")
    with np.errstate(divide="ignore", invalid="ignore"):
        q = 1.0 - arr
        h = -np.where(arr > 0, arr * np.log2(arr), 0.0) - np.where(q > 0, q * np.log2(q), 0.0)
    return float(h) if h.ndim == 0 else h


def inverse_binary_entropy(t: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Unique ``p`` in ``[0, 1/2]`` with ``h(p) == t``, by bisection."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("inverse_binary_entropy argument must lie in [0, 1]")
    if t == 0.0:
        return 0.0
    if t == 1.0:
        return 0.5
    lo, hi = 0.0, 0.5
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < t:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def bsc_pair_capacity(epsilon: float) -> float:
    """Capacity of two independent looks through BSC(epsilon)."""
    if not 0.0 <= epsilon <= 0.5:
        raise ValueError("epsilon must lie in [0, 1/2]")
    return 1.0 + binary_entropy(2 * epsilon * (1 - epsilon)) - 2 * binary_entropy(epsilon)


def capacity_gap_lower_bound(I: float) -> float:
    """Guaranteed gain ``I(W^k) - I(W)`` for symmetric W with capacity ``I``, k >= 2."""
    if not 0.0 < I < 1.0:
        raise ValueError("capacity must lie strictly between 0 and 1")
    eps = inverse_binary_entropy(1.0 - I)
    return binary_entropy(2 * eps * (1 - eps)) - binary_entropy(eps)


# ---------------------------------------------------------------------------
# structural operations
# ---------------------------------------------------------------------------

def is_symmetric(W: BinaryChannel, tol: float = SYMMETRY_TOL) -> Optional[np.ndarray]:
    """Return an involution ``pi`` with ``p0[y] ~= p1[pi[y]]``, or None.

    Outputs leaning towards 0 are paired with outputs leaning towards 1
    after sorting both groups by their likelihood columns; balanced outputs
    are fixed points.
    """
    p0, p1 = W.p0, W.p1
    idx = np.arange(p0.size)
    balanced = np.abs(p0 - p1) <= tol
    lean0 = idx[(p0 > p1) & ~balanced]
    lean1 = idx[(p1 > p0) & ~balanced]
    if lean0.size != lean1.size:
        return None
    a = lean0[np.lexsort((p1[lean0], p0[lean0]))]
    b = lean1[np.lexsort((p0[lean1], p1[lean1]))]
    if np.any(np.abs(p0[a] - p1[b]) > tol) or np.any(np.abs(p1[a] - p0[b]) > tol):
        return None
    perm = idx.copy()
    perm[a] = b
    perm[b] = a
    return perm


def _group_by_ratio(ratio: np.ndarray, rtol: float) -> np.ndarray:
    """Group labels for ``ratio``; a new group starts where the sorted gap exceeds ``rtol``."""
    order = np.argsort(ratio, kind="stable")
    r = ratio[order]
    gaps = np.diff(r) > rtol * np.maximum(np.abs(r[1:]), np.abs(r[:-1]))
    labels = np.empty(r.size, dtype=np.int64)
    labels[order] = np.cumsum(np.concatenate(([True], gaps))) - 1
    return labels


def likelihood_classes(p0: np.ndarray, p1: np.ndarray, rtol: float = MERGE_RTOL) -> np.ndarray:
    """Label outputs by likelihood class.

    The key is the side the output leans to plus the ratio ``min/max`` of its
    two likelihoods, so the grouping commutes with swapping the inputs.
    """
    side = np.sign(p0 - p1).astype(np.int64)
    rho = np.minimum(p0, p1) / np.maximum(p0, p1)
    labels = np.empty(p0.size, dtype=np.int64)
    offset = 0
    for s in (1, 0, -1):
        sel = np.flatnonzero(side == s)
        if sel.size == 0:
            continue
        key = rho[sel] if s >= 0 else -rho[sel]
        lab = _group_by_ratio(key, rtol)
        labels[sel] = lab + offset
        offset += int(lab.max()) + 1
    return labels


def merge_equivalent_outputs(W: BinaryChannel, rtol: float = MERGE_RTOL) -> BinaryChannel:
    """Merge outputs with proportional likelihood pairs; drop null outputs.

    The merge is lossless for mutual information and the Bhattacharyya
    parameter.  A symmetry witness on ``W`` is carried over to the result.
    """
    p0, p1 = W.p0, W.p1
    keep = (p0 + p1) > 0
    p0, p1 = p0[keep], p1[keep]
    labels = likelihood_classes(p0, p1, rtol)
    count = int(labels.max()) + 1
    if count == W.output_count:
        return W
    q0 = np.bincount(labels, weights=p0, minlength=count)
    q1 = np.bincount(labels, weights=p1, minlength=count)
    return finalize_channel(q0, q1, W.symmetry_perm is not None)


def finalize_channel(p0, p1, symmetric: bool) -> BinaryChannel:
    """Normalize derived rows and attach a symmetry witness when requested."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    p0 = p0 / math.fsum(p0)
    p1 = p1 / math.fsum(p1)
    if not symmetric:
        return BinaryChannel(p0, p1)
    perm = is_symmetric(BinaryChannel(p0, p1))
    if perm is None:
        raise ChannelError("derived channel lost its symmetry")
    return BinaryChannel.symmetrized(p0, p1, perm)


def check_alphabet(size: int, cap: int = ALPHABET_CAP) -> None:
    if size > cap:
        raise CapacityError(f"output alphabet of size {size} exceeds the cap of {cap}")


def product_channel(W: BinaryChannel, k: int, cap: int = ALPHABET_CAP) -> BinaryChannel:
    """``k`` independent looks at the same input, outputs indexed row-major."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return W
    m = W.output_count
    check_alphabet(m**k, cap)
    p0, p1 = W.p0, W.p1
    perm = W.symmetry_perm
    for _ in range(k - 1):
        p0 = np.multiply.outer(p0, W.p0).ravel()
        p1 = np.multiply.outer(p1, W.p1).ravel()
        if W.symmetry_perm is not None:
            perm = np.add.outer(perm * m, W.symmetry_perm).ravel()
    if perm is None:
        return finalize_channel(p0, p1, False)
    return BinaryChannel.symmetrized(p0 / math.fsum(p0), p1 / math.fsum(p1), perm)
