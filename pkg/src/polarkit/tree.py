"""The random tree process ``W_{n+1} = W_n^{(B_{n+1})}`` with uniform branches.

General channels are split exactly along the sampled path.  Erasure
channels take the closed-form route through :mod:`polarkit.bec`, which
makes deep paths cheap and exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bec import bec_levels, bec_split_all
from .channel import BinaryChannel, CapacityError, InfoPair, merge_equivalent_outputs
from .gf2 import BitMatrix
from .split import split_all, split_tilde

SQUARING_SLACK = 1e-12
BOUND_SLACK = 1e-9


@dataclass(frozen=True)
class PathTrace:
    branches: tuple
    info_trace: tuple
    seed: int

    @property
    def depth(self) -> int:
        return len(self.branches)

    @property
    def mutual_infos(self) -> np.ndarray:
        return np.array([p.mutual_info for p in self.info_trace])

    @property
    def bhattacharyyas(self) -> np.ndarray:
        return np.array([p.bhattacharyya for p in self.info_trace])


@dataclass
class ZBoundReport:
    violations: list = field(default_factory=list)
    squaring_steps: list = field(default_factory=list)
    steps: int = 0

    @property
    def squaring_frequency(self) -> float:
        return len(self.squaring_steps) / self.steps if self.steps else float("nan")

    @property
    def ok(self) -> bool:
        return not self.violations


def path_rng(seed: int, path: int = 0) -> np.random.Generator:
    """Philox stream for path ``path`` of an ensemble keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(path)])))


def bec_erasure(W: BinaryChannel):
    """Erasure probability if ``W`` is (equivalent to) an erasure channel, else None."""
    W = merge_equivalent_outputs(W)
    mass = W.p0 + W.p1
    ratio = W.p0 / mass
    erased = np.isclose(ratio, 0.5, rtol=0, atol=1e-12)
    clear = (ratio <= 1e-12) | (ratio >= 1 - 1e-12)
    if not np.all(erased | clear):
        return None
    return float(0.5 * mass[erased].sum())


def _levels(G, n):
    if isinstance(G, BitMatrix):
        return [G] * n
    kernels = list(G)
    if n is not None and n != len(kernels):
        raise ValueError("n disagrees with the number of kernels")
    return kernels


def sample_path(W: BinaryChannel, G, n: int | None, seed: int, path: int = 0) -> PathTrace:
    """One realization of the tree process, split exactly along the way.

    ``G`` may be a single kernel or a per-level sequence.  Branches are
    1-based.  A ``CapacityError`` raised mid-path names the depth reached.
    """
    kernels = _levels(G, n)
    rng = path_rng(seed, path)
    branches = tuple(int(rng.integers(K.rows)) + 1 for K in kernels)
    eps = bec_erasure(W)
    if eps is not None:
        trace = [InfoPair(1.0 - eps, eps)]
        for K, b in zip(kernels, branches):
            eps = float(bec_split_all(K, eps)[b - 1])
            trace.append(InfoPair(1.0 - eps, eps))
        return PathTrace(branches, tuple(trace), seed)
    trace = [W.info()]
    ch = W
    for depth, (K, b) in enumerate(zip(kernels, branches)):
        try:
            ch = split_tilde(ch, K, b)
        except CapacityError as exc:
            raise CapacityError(f"{exc} (path stopped at depth {depth})") from exc
        trace.append(ch.info())
    return PathTrace(branches, tuple(trace), seed)


def sample_paths(W, G, n, paths: int, seed: int) -> list:
    return [sample_path(W, G, n, seed, p) for p in range(paths)]


def ensemble_stats(W: BinaryChannel, G, n: int | None, paths: int, seed: int, delta: float = 0.1) -> dict:
    """Summary statistics of ``paths`` independent traces.

    Per-level lists cover depths ``0..n``; increments cover steps ``1..n``.
    For erasure channels the exact leaf distribution is reported as well.
    """
    kernels = _levels(G, n)
    traces = sample_paths(W, kernels, None, paths, seed)
    I = np.array([t.mutual_infos for t in traces])  # (paths, n+1)
    final = I[:, -1]
    summary = {
        "paths": paths,
        "levels": len(kernels),
        "seed": seed,
        "delta": delta,
        "I_W": float(I[0, 0]),
        "mean_I": float(final.mean()),
        "stderr_I": float(final.std(ddof=1) / math.sqrt(paths)) if paths > 1 else float("nan"),
        "frac_high": float(np.mean(final > 1 - delta)),
        "frac_low": float(np.mean(final < delta)),
        "frac_mid": float(np.mean((final >= delta) & (final <= 1 - delta))),
        "mean_I_per_level": I.mean(axis=0).tolist(),
        "var_I_per_level": I.var(axis=0).tolist(),
        "mid_fraction_per_level": np.mean((I >= delta) & (I <= 1 - delta), axis=0).tolist(),
        "mean_abs_increment": np.abs(np.diff(I, axis=1)).mean(axis=0).tolist(),
        "final_I_histogram": np.histogram(final, bins=10, range=(0.0, 1.0))[0].tolist(),
    }
    eps = bec_erasure(W)
    if eps is not None:
        exact = bec_levels(kernels, eps)
        summary["exact"] = {
            "frac_high": float(np.mean(1 - exact[-1].eps > 1 - delta)),
            "frac_mid": [float(np.mean((1 - v.eps >= delta) & (1 - v.eps <= 1 - delta))) for v in exact],
            "var_I": [float(np.var(1 - v.eps)) for v in exact],
        }
    return summary


def martingale_residual(W: BinaryChannel, G: BitMatrix) -> float:
    """``|mean_i I(W^(i)) - I(W)|`` from one exact split."""
    res = split_all(W, G)
    return abs(math.fsum(p.mutual_info for p in res.info) / G.rows - W.info().mutual_info)


def z_bound_check(trace: PathTrace, ell: int) -> ZBoundReport:
    """Check ``Z_{t+1} <= ell * Z_t`` at each step and flag squaring steps."""
    z = trace.bhattacharyyas
    report = ZBoundReport(steps=len(z) - 1)
    for t in range(len(z) - 1):
        if z[t + 1] > ell * z[t] + BOUND_SLACK:
            report.violations.append(t + 1)
        if z[t + 1] <= z[t] ** 2 + SQUARING_SLACK:
            report.squaring_steps.append(t + 1)
    return report
