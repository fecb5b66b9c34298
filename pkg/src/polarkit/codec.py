"""Polar codes over products of arbitrary kernels.

The transform is ``x = u (G_1 ⊗ G_2 ⊗ ... ⊗ G_n)`` with ``G_1`` acting on the
most significant digit of the index, so input index ``i`` has the tree path
given by its mixed-radix digits.  Information positions are the ``K`` indices
with the smallest design Bhattacharyya parameter.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .bec import bec_polarize
from .channel import BinaryChannel
from .gf2 import BitMatrix, KernelError, is_invertible, kron_encode

DEFAULT_CHUNK = 500


class CodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PolarCode:
    kernels: tuple
    frozen_mask: np.ndarray
    frozen_values: np.ndarray
    design_z: np.ndarray
    design: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return int(self.frozen_mask.size)

    @property
    def K(self) -> int:
        return int(self.N - self.frozen_mask.sum())

    @property
    def info_positions(self) -> np.ndarray:
        return np.flatnonzero(self.frozen_mask == 0)

    @property
    def level_rows(self) -> list:
        return [K.row_words for K in self.kernels]

    def to_dict(self) -> dict:
        mask = 0
        for i in np.flatnonzero(self.frozen_mask):
            mask |= 1 << int(i)
        return {
            "kernels": [K.row_strings() for K in self.kernels],
            "N": self.N,
            "K": self.K,
            "frozen_mask": format(mask, "x"),
            "design": dict(self.design),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PolarCode":
        """Rebuild a code; the frozen set is taken from ``frozen_mask`` verbatim."""
        try:
            kernels = tuple(BitMatrix.from_rows(rows) for rows in d["kernels"])
            N, K = int(d["N"]), int(d["K"])
            mask_int = int(d["frozen_mask"], 16)
            design = dict(d.get("design", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise CodeError(f"bad code descriptor: {exc}") from exc
        _check_kernels(kernels)
        if int(np.prod([k.rows for k in kernels])) != N:
            raise CodeError("N disagrees with the kernel sizes")
        if mask_int >> N:
            raise CodeError("frozen_mask has bits beyond N")
        mask = np.array([(mask_int >> i) & 1 for i in range(N)], dtype=np.uint8)
        if N - int(mask.sum()) != K:
            raise CodeError("K disagrees with frozen_mask")
        z = _design_z(kernels, design)
        return cls(kernels, mask, np.zeros(N, dtype=np.uint8), z, design)

    @classmethod
    def from_json(cls, text: str) -> "PolarCode":
        return cls.from_dict(json.loads(text))


@dataclass
class DecodeResult:
    u_hat: np.ndarray
    message: np.ndarray
    genie_first_error: Optional[int] = None


def _check_kernels(kernels):
    if not kernels:
        raise CodeError("at least one kernel is required")
    for K in kernels:
        if not is_invertible(K):
            raise KernelError("every kernel must be invertible over GF(2)")


def _design_z(kernels, design: dict) -> np.ndarray:
    kind = design.get("type", "bec")
    N = int(np.prod([k.rows for k in kernels]))
    if kind == "bec":
        return bec_polarize(list(kernels), float(design["eps"])).eps
    if kind == "z":
        z = np.asarray(design["z"], dtype=np.float64)
        if z.shape != (N,):
            raise CodeError(f"explicit design vector must have length {N}")
        return z
    raise CodeError(f"unknown design type {kind!r}")


def construct(kernels: Sequence[BitMatrix], design, K: int) -> PolarCode:
    """Freeze the ``N - K`` least reliable indices.

    ``design`` is a BEC erasure probability (float) or an explicit length-N
    vector of Bhattacharyya parameters.  Ties freeze the larger index.
    """
    kernels = tuple(kernels)
    _check_kernels(kernels)
    N = int(np.prod([k.rows for k in kernels]))
    if not 0 <= K <= N:
        raise CodeError(f"K={K} outside 0..{N}")
    if np.ndim(design) == 0:
        design_spec = {"type": "bec", "eps": float(design)}
    else:
        design_spec = {"type": "z", "z": [float(v) for v in design]}
    z = _design_z(kernels, design_spec)
    # most reliable first: ascending z, then ascending index
    order = np.lexsort((np.arange(N), z))
    mask = np.ones(N, dtype=np.uint8)
    mask[order[:K]] = 0
    return PolarCode(kernels, mask, np.zeros(N, dtype=np.uint8), z, design_spec)


def encode(code: PolarCode, message, stats: dict | None = None) -> np.ndarray:
    """Codeword(s) for ``message``; leading batch dimensions are allowed."""
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape[-1] != code.K:
        raise CodeError(f"message length {msg.shape[-1]} != K={code.K}")
    u = np.broadcast_to(code.frozen_values, msg.shape[:-1] + (code.N,)).copy()
    u[..., code.info_positions] = msg
    return kron_encode(list(code.kernels), u, stats=stats)


def _likelihood_array(channel_likelihoods, N: int) -> np.ndarray:
    L = np.asarray(channel_likelihoods, dtype=np.float64)
    if L.ndim == 2:
        L = L[None]
    if L.ndim != 3 or L.shape[1:] != (N, 2):
        raise CodeError(f"likelihoods must have shape (N, 2) or (B, N, 2) with N={N}")
    if not np.all(np.isfinite(L)) or np.any(L < 0):
        raise CodeError("likelihoods must be finite and nonnegative")
    if np.any(L.sum(axis=-1) <= 0):
        raise CodeError("likelihood pair (0, 0) is not allowed")
    return L


def sc_decode_batch(code: PolarCode, likelihoods, genie=None, backend: str | None = None):
    """Decode a ``(B, N, 2)`` batch; returns ``(u_hat, first_error, ops)``."""
    L = _likelihood_array(likelihoods, code.N)
    impl = _kernels if backend is None else _kernels.BACKENDS[backend]
    g = None if genie is None else np.ascontiguousarray(genie, dtype=np.uint8).reshape(L.shape[0], code.N)
    return impl.sc_decode_batch(code.level_rows, L, code.frozen_mask, code.frozen_values, g)


def sc_decode(code: PolarCode, channel_likelihoods, genie_u=None, backend: str | None = None) -> DecodeResult:
    """Successive-cancellation decoding of one frame.

    ``channel_likelihoods`` holds ``(P(y|x=0), P(y|x=1))`` per code bit.
    With ``genie_u`` the decoder proceeds on the true inputs and reports the
    first index where its own decision was wrong.
    """
    u_hat, first, _ = sc_decode_batch(code, channel_likelihoods, genie_u, backend)
    u = u_hat[0]
    fe = int(first[0]) if genie_u is not None and first[0] >= 0 else None
    return DecodeResult(u, u[code.info_positions], fe)


def union_bound(code: PolarCode) -> float:
    return float(math.fsum(code.design_z[code.info_positions]))


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


def _transmit(code: PolarCode, channel: BinaryChannel, seed: int, trials: range):
    """Messages, inputs and likelihoods for a block of trials."""
    B = len(trials)
    msgs = np.empty((B, code.K), dtype=np.uint8)
    cdf0 = np.cumsum(channel.p0)
    cdf1 = np.cumsum(channel.p1)
    draws = np.empty((B, code.N))
    for b, t in enumerate(trials):
        rng = _trial_rng(seed, t)
        msgs[b] = rng.integers(0, 2, size=code.K, dtype=np.uint8)
        draws[b] = rng.random(code.N)
    u = np.broadcast_to(code.frozen_values, (B, code.N)).copy()
    u[:, code.info_positions] = msgs
    x = kron_encode(list(code.kernels), u)
    m = channel.output_count
    ys0 = np.minimum(np.searchsorted(cdf0, draws, side="right"), m - 1)
    ys1 = np.minimum(np.searchsorted(cdf1, draws, side="right"), m - 1)
    ys = np.where(x == 1, ys1, ys0)
    L = np.stack([channel.p0[ys], channel.p1[ys]], axis=-1)
    return msgs, u, L


@dataclass
class SimulationResult:
    trials: int
    frame_errors: int
    bit_errors: int
    K: int
    per_trial_errors: np.ndarray
    first_error_histogram: Optional[dict] = None
    union_bound: float = float("nan")

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.trials * self.K) if self.K else 0.0

    @property
    def stderr(self) -> float:
        p = self.fer
        return math.sqrt(p * (1 - p) / self.trials)

    def summary(self) -> dict:
        d = {
            "trials": self.trials,
            "frame_errors": self.frame_errors,
            "bit_errors": self.bit_errors,
            "fer": self.fer,
            "ber": self.ber,
            "stderr": self.stderr,
            "union_bound": self.union_bound,
            "union_bound_check": "pass" if self.fer <= self.union_bound + 3 * self.stderr else "fail",
        }
        if self.first_error_histogram is not None:
            d["first_error_histogram"] = {str(k): v for k, v in sorted(self.first_error_histogram.items())}
        return d


def _thread_count() -> int:
    env = os.environ.get("POLARKIT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def simulate_fer(
    code: PolarCode,
    channel: BinaryChannel,
    trials: int,
    seed: int,
    genie: bool = False,
    chunk: int = DEFAULT_CHUNK,
    backend: str | None = None,
) -> SimulationResult:
    """Monte Carlo frame and bit error rates under SC decoding.

    Trial ``t`` draws its message and channel noise from its own stream
    keyed by ``(seed, t)``, so results do not depend on chunking or threads.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    errors = np.zeros(trials, dtype=np.int64)
    firsts = np.full(trials, -1, dtype=np.int64)
    blocks = [range(s, min(s + chunk, trials)) for s in range(0, trials, chunk)]

    def run(block):
        if code.K == 0:
            return block, np.zeros(len(block), dtype=np.int64), np.full(len(block), -1)
        msgs, u, L = _transmit(code, channel, seed, block)
        u_hat, first, _ = sc_decode_batch(code, L, None, backend)
        errs = np.count_nonzero(u_hat[:, code.info_positions] != msgs, axis=1)
        if genie:
            _, first, _ = sc_decode_batch(code, L, u, backend)
        return block, errs, first

    workers = min(_thread_count(), len(blocks))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(b) for b in blocks]
    for block, errs, first in results:
        errors[block.start:block.stop] = errs
        firsts[block.start:block.stop] = first
    hist = None
    if genie:
        idx, counts = np.unique(firsts[firsts >= 0], return_counts=True)
        hist = {int(i): int(c) for i, c in zip(idx, counts)}
    return SimulationResult(
        trials=trials,
        frame_errors=int(np.count_nonzero(errors)),
        bit_errors=int(errors.sum()),
        K=code.K,
        per_trial_errors=errors,
        first_error_histogram=hist,
        union_bound=union_bound(code),
    )
