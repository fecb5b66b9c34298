"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--frames 2000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from polarkit import BitMatrix, construct, is_invertible, make_bec
from polarkit._kernels import BACKENDS
from polarkit.codec import _transmit, sc_decode_batch
from polarkit.gf2 import invertible_matrices

G2 = BitMatrix.from_rows(["10", "11"])
G3 = BitMatrix.from_rows(["100", "110", "101"])


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def bench_decode(frames, repeat):
    cases = [("G2^8, N=256", [G2] * 8, 128), ("G3^5, N=243", [G3] * 5, 120), ("G2G3G2G3G3, N=108", [G2, G3, G2, G3, G3], 54)]
    for label, kernels, K in cases:
        code = construct(kernels, 0.5, K)
        _, _, L = _transmit(code, make_bec(0.5), 1, range(frames))
        row = [f"decode {label:<20} {frames} frames"]
        ref = None
        for name in BACKENDS:
            t, out = best_of(lambda: sc_decode_batch(code, L, None, backend=name), repeat)
            ref = out[0] if ref is None else ref
            assert np.array_equal(out[0], ref)
            row.append(f"{name} {t * 1e3:9.1f} ms")
        print("  ".join(row))


def bench_weight_table(repeat):
    for ell in (4, 5, 8):
        if ell <= 4:
            kernels = list(invertible_matrices(ell))[:200]
        else:
            rng = np.random.default_rng(ell)
            kernels = []
            while len(kernels) < 20:
                words = [int(w) for w in rng.integers(1, 1 << ell, ell)]
                G = BitMatrix.from_row_words(words, ell)
                if is_invertible(G):
                    kernels.append(G)
        row = [f"weight table l={ell} x{len(kernels):<4}"]
        for name, mod in BACKENDS.items():
            t, _ = best_of(lambda: [mod.unrecoverable_weight_counts(G.row_words, ell) for G in kernels], repeat)
            row.append(f"{name} {t * 1e3:9.1f} ms")
        print("  ".join(row))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frames", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print("backends:", ", ".join(BACKENDS))
    bench_decode(args.frames, args.repeat)
    bench_weight_table(args.repeat)


if __name__ == "__main__":
    main()
