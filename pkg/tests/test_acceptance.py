"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polarkit import (  # noqa: E402
    BitMatrix,
    bec_levels,
    bec_polarize,
    bec_split_one,
    bsc_pair_capacity,
    capacity_gap_lower_bound,
    construct,
    encode,
    inverse_binary_entropy,
    is_polarizing,
    last_reduction_weight,
    make_bec,
    make_bsc,
    polarization_fraction,
    product_channel,
    random_symmetric_channel,
    rate_statistic,
    recursive_polarize,
    sc_decode,
    simulate_fer,
    split_joint,
    split_tilde,
    symmetric_capacity,
    union_bound,
)
from polarkit.gf2 import column_classes, invertible_matrices  # noqa: E402

from conftest import G2, G3, channel_corpus  # noqa: E402
from oracles import encode_explicit, product_info  # noqa: E402

RESULTS = []
KERNELS = column_classes(2) + column_classes(3)
CORPUS = channel_corpus()


def record(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_1():
    worst = 0.0
    for _, W in CORPUS:
        base = symmetric_capacity(W)
        for G in KERNELS:
            infos = [split_joint(W, G, i).info().mutual_info for i in range(1, G.rows + 1)]
            worst = max(worst, abs(math.fsum(infos) / G.rows - base))
    return record(1, "chain rule", worst <= 1e-9, f"max |mean I - I(W)| = {worst:.2e} (tol 1e-9) over {len(KERNELS)} kernels x {len(CORPUS)} channels")


def criterion_2():
    flat = power_z = power_i = 0.0
    for _, W in CORPUS:
        base = W.info()
        for G in KERNELS:
            if not is_polarizing(G):
                for i in range(1, G.rows + 1):
                    flat = max(flat, abs(split_joint(W, G, i).info().mutual_info - base.mutual_info))
            else:
                i, k = last_reduction_weight(G)
                sub = split_joint(W, G, i).info()
                power_z = max(power_z, abs(sub.bhattacharyya - base.bhattacharyya**k))
                target = product_info(W.p0, W.p1, k)[0]
                power_i = max(power_i, abs(sub.mutual_info - target))
    ok = flat <= 1e-10 and power_z <= 1e-9 and power_i <= 1e-9
    return record(2, "polarizing dichotomy", ok, f"non-polarizing max dev {flat:.2e} (1e-10); Z^k dev {power_z:.2e}, I(W^k) dev {power_i:.2e} (1e-9)")


def criterion_3():
    worst = 0.0
    for _, W in CORPUS:
        for G in KERNELS:
            for i in range(1, G.rows + 1):
                a, b = split_joint(W, G, i).info(), split_tilde(W, G, i).info()
                worst = max(worst, abs(a.mutual_info - b.mutual_info), abs(a.bhattacharyya - b.bhattacharyya))
    return record(3, "joint vs prefix-zero split", worst <= 1e-10, f"max |dI|, |dZ| = {worst:.2e} (tol 1e-10)")


def criterion_4():
    worst = 0.0
    count = 0
    for ell in (2, 3, 4):
        for G in column_classes(ell):
            for eps in (0.1, 0.3, 0.5, 0.7, 0.9):
                W = make_bec(eps)
                for i in range(1, ell + 1):
                    z = split_tilde(W, G, i).info().bhattacharyya
                    worst = max(worst, abs(bec_split_one(G, i, eps) - z))
                    count += 1
    return record(4, "erasure closed form vs exact split", worst <= 1e-10, f"max dev {worst:.2e} (tol 1e-10) over {count} cases")


def criterion_5():
    parts = []
    ok = True
    for name, G in (("G2", G2), ("G3", G3)):
        vs = bec_levels(G, 0.5, 10)
        frac = [polarization_fraction(vs[n], 0.1) for n in (4, 6, 8, 10)]
        decreasing = all(a > b for a, b in zip(frac, frac[1:]))
        good = float(np.mean(1.0 - vs[10].eps >= 0.9))
        this = decreasing and frac[-1] <= 0.25 and abs(good - 0.5) <= 0.07
        ok &= this
        parts.append(f"{name} mid={['%.4f' % f for f in frac]} I>=0.9 frac={good:.4f}")
    return record(5, "polarization at desk scale", ok, "; ".join(parts))


def criterion_6():
    stats = {n: rate_statistic(bec_polarize(G3, 0.5, n), 0.25) for n in (6, 8, 10, 12)}
    vals = [stats[n] for n in (6, 8, 10, 12)]
    monotone = all(a <= b for a, b in zip(vals, vals[1:]))
    close = abs(stats[12] - 0.5) <= 0.1
    detail = f"rate_stat(n=6..12) = {['%.4f' % v for v in vals]}; |stat(12) - 0.5| = {abs(stats[12] - 0.5):.4f} (tol 0.1); monotone={monotone}"
    return record(6, "rate statistic, l=3", monotone and close, detail)


def criterion_7():
    violations = 0
    no_square = 0
    parents = 0
    for G in KERNELS:
        ell = G.rows
        polar = is_polarizing(G)
        for eps in (0.3, 0.5):
            vs = bec_levels(G, eps, 6)
            for t in range(6):
                parent = vs[t].eps
                child = vs[t + 1].eps.reshape(parent.size, ell)
                violations += int(np.sum(child > ell * parent[:, None] + 1e-9))
                if polar:
                    parents += parent.size
                    no_square += int(np.sum(~np.any(child <= parent[:, None] ** 2 + 1e-12, axis=1)))
    for _, W in CORPUS:
        z = W.info().bhattacharyya
        for G in KERNELS:
            zs = np.array([split_tilde(W, G, i).info().bhattacharyya for i in range(1, G.rows + 1)])
            violations += int(np.sum(zs > G.rows * z + 1e-9))
            if is_polarizing(G):
                parents += 1
                no_square += int(not np.any(zs <= z * z + 1e-12))
    ok = violations == 0 and no_square == 0
    return record(7, "Z bounds", ok, f"{violations} l-factor violations; {no_square} of {parents} polarizing parents without a squaring child")


def criterion_8():
    grid = np.linspace(0.005, 0.495, 99)
    pair = max(abs(bsc_pair_capacity(e) - symmetric_capacity(product_channel(make_bsc(e), 2))) for e in grid)
    thm = gap = math.inf
    for s in range(50):
        W = random_symmetric_channel(1000 + s, 1 + s % 5)
        I = symmetric_capacity(W)
        I2 = symmetric_capacity(product_channel(W, 2))
        thm = min(thm, I2 - bsc_pair_capacity(inverse_binary_entropy(1.0 - I)))
        gap = min(gap, (I2 - I) - capacity_gap_lower_bound(I))
    ok = pair <= 1e-10 and thm >= -1e-9 and gap >= -1e-9
    return record(8, "two-look bounds", ok, f"pair-capacity dev {pair:.2e} (1e-10); min margins {thm:.2e}, {gap:.2e} (>= -1e-9)")


def _codec_checks(kernels, K, eps, trials, seed, rng, encode_codes=20):
    code = construct(kernels, eps, K)
    res = simulate_fer(code, make_bec(eps), trials, seed)
    ub_ok = res.fer <= res.union_bound + 3 * res.stderr
    mats = [k.bits for k in kernels]
    enc_ok = True
    for _ in range(encode_codes):
        u = rng.integers(0, 2, code.N).astype(np.uint8)
        full = construct(kernels, eps, code.N)
        enc_ok &= np.array_equal(encode(full, u), encode_explicit(mats, u))
    return code, res, ub_ok, enc_ok


def _random_code(rng, inv):
    while True:
        sizes = [int(rng.choice([2, 3])) for _ in range(int(rng.integers(1, 6)))]
        if np.prod(sizes) <= 243:
            break
    kernels = [inv[s][int(rng.integers(len(inv[s])))] for s in sizes]
    N = int(np.prod(sizes))
    return construct(kernels, float(rng.uniform(0.1, 0.9)), int(rng.integers(0, N + 1)))


def criterion_9():
    rng = np.random.default_rng(9)
    code, res, ub_ok, _ = _codec_checks([G2] * 8, 64, 0.5, 5000, 2024, rng, encode_codes=0)
    inv = {2: list(invertible_matrices(2)), 3: list(invertible_matrices(3))}
    noiseless_ok = True
    for _ in range(100):
        c = _random_code(rng, inv)
        msg = rng.integers(0, 2, c.K).astype(np.uint8)
        x = encode(c, msg)
        noiseless_ok &= np.array_equal(sc_decode(c, np.stack([1.0 - x, x], axis=-1)).message, msg)
    enc_ok = True
    for sizes in [(2,) * 7, (3,) * 5, (2, 3, 3, 3), (3, 2, 2, 2, 3)]:
        for _ in range(5):
            kernels = [inv[s][int(rng.integers(len(inv[s])))] for s in sizes]
            N = int(np.prod(sizes))
            u = rng.integers(0, 2, (4, N)).astype(np.uint8)
            enc_ok &= np.array_equal(encode(construct(kernels, 0.5, N), u), encode_explicit([k.bits for k in kernels], u))
    ok = ub_ok and noiseless_ok and enc_ok
    detail = (f"FER={res.fer:.4f} <= UB {res.union_bound:.4f} + 3se {3 * res.stderr:.4f}: {ub_ok}; "
              f"noiseless x100: {noiseless_ok}; explicit-matrix encode: {enc_ok}")
    return record(9, "codec", ok, detail)


def criterion_10():
    mixed12 = [G2, G3, G2]
    chain = 0.0
    for _, W in CORPUS:
        leaves = recursive_polarize(W, mixed12, cap=4 * 10**6)
        chain = max(chain, abs(math.fsum(p.mutual_info for p in leaves) / len(leaves) - symmetric_capacity(W)))
    bec_dev = float(np.max(np.abs(
        np.array([p.bhattacharyya for p in recursive_polarize(make_bec(0.5), mixed12)]) - bec_polarize(mixed12, 0.5).eps
    )))
    rng = np.random.default_rng(10)
    _, r12, ub12, enc12 = _codec_checks(mixed12, 6, 0.5, 5000, 12, rng)
    mixed108 = [G2, G3, G2, G3, G3]
    _, r108, ub108, enc108 = _codec_checks(mixed108, 27, 0.5, 5000, 108, rng)
    ok = chain <= 1e-9 and bec_dev <= 1e-10 and ub12 and enc12 and ub108 and enc108
    detail = (f"N=12 chain-rule dev {chain:.2e} (1e-9), erasure route dev {bec_dev:.2e}; "
              f"N=12 FER {r12.fer:.4f} vs UB {r12.union_bound:.4f}+{3 * r12.stderr:.4f}; "
              f"N=108 FER {r108.fer:.4f} vs UB {r108.union_bound:.4f}+{3 * r108.stderr:.4f}; encode oracle {enc12 and enc108}")
    return record(10, "mixed kernels", ok, detail)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.acceptance
@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{k + 1}" for k in range(len(CRITERIA))])
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    failed = 0
    for check in CRITERIA:
        t = time.time()
        failed += not check()
        print(f"    ({time.time() - t:.1f} s)")
    sys.exit(1 if failed else 0)
