import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarkit import (
    BitMatrix,
    KernelError,
    gf2_rank,
    in_span,
    is_invertible,
    is_polarizing,
    kron_encode,
    kron_matrix,
    kron_power,
    last_reduction_weight,
    parse_kernel,
    unit_diagonalize,
)
from polarkit.gf2 import (
    column_classes,
    gf2_inverse,
    gf2_matmul,
    invertible_matrices,
    is_recoverable,
    is_upper_triangular,
    unit_diagonal_matching,
)

from oracles import encode_explicit, kron_explicit


def test_rank_basics():
    assert gf2_rank(BitMatrix.identity(3)) == 3
    assert is_invertible(BitMatrix.identity(3))
    assert is_invertible(BitMatrix.from_rows(["10", "11"]))
    ones = BitMatrix.from_rows(["11", "11"])
    assert gf2_rank(ones) == 1 and not is_invertible(ones)


def test_invertible_counts():
    # |GL(n, 2)|: 6 for n = 2, 168 for n = 3
    assert sum(1 for _ in invertible_matrices(2)) == 6
    assert sum(1 for _ in invertible_matrices(3)) == 168
    assert len(column_classes(2)) == 3
    assert len(column_classes(3)) == 28


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.lists(st.integers(0, 2**n - 1), min_size=n, max_size=n).map(lambda w: (n, w))))
def test_rank_matches_float_elimination(nw):
    n, words = nw
    M = BitMatrix.from_row_words(words, n)
    A = M.bits.astype(np.int64).copy()
    # independent elimination mod 2 on the dense array
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, n) if A[k, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        for k in range(n):
            if k != r and A[k, c]:
                A[k] ^= A[r]
        r += 1
    assert gf2_rank(M) == r
    if r == n:
        inv = gf2_inverse(M)
        assert gf2_matmul(M, inv) == BitMatrix.identity(n)


def test_in_span():
    assert in_span([0b011, 0b110], 0b101)
    assert not in_span([0b011, 0b110], 0b001)
    assert in_span([], 0)


def test_parse_forms():
    G = parse_kernel("1 0\n1 1\n")
    assert G == parse_kernel("10  # first row\n11") == parse_kernel(json.dumps({"l": 2, "rows": ["10", "11"]}))
    assert parse_kernel(G.to_json()) == G
    with pytest.raises(KernelError):
        parse_kernel("101\n11\n")
    with pytest.raises(KernelError):
        parse_kernel("1x\n11")


def test_unit_diagonalize_examples():
    assert unit_diagonalize(BitMatrix.from_rows(["10", "11"])) == (0, 1)
    assert unit_diagonalize(BitMatrix.from_rows(["01", "10"])) == (1, 0)
    # singular over GF(2) (rows sum to zero), so only the matching step applies
    G = BitMatrix.from_rows(["011", "101", "110"])
    assert not is_invertible(G)
    sigma = unit_diagonal_matching(G.bits)
    assert np.all(np.diag(G.permute_columns(sigma).bits) == 1)
    valid = [p for p in itertools.permutations(range(3)) if all(G.bits[r, p[r]] for r in range(3))]
    assert sigma == min(valid)


def test_unit_diagonalize_lexicographic_ell3():
    for G in invertible_matrices(3):
        valid = [p for p in itertools.permutations(range(3)) if all(G.bits[r, p[r]] for r in range(3))]
        assert unit_diagonalize(G) == min(valid)


def test_unit_diagonalize_all_ell3():
    for G in invertible_matrices(3):
        assert np.all(np.diag(G.permute_columns(unit_diagonalize(G)).bits) == 1)


def test_unit_diagonalize_singular():
    with pytest.raises(KernelError):
        unit_diagonalize(BitMatrix.from_rows(["11", "11"]))


def test_polarizing_examples():
    assert is_polarizing(BitMatrix.from_rows(["10", "11"]))
    assert not is_polarizing(BitMatrix.identity(3))
    assert not is_polarizing(BitMatrix.from_rows(["111", "011", "001"]))
    assert is_polarizing(BitMatrix.from_rows(["01", "11"]))


@pytest.mark.parametrize(
    "rows,expected",
    [(["10", "11"], (2, 2)), (["100", "110", "101"], (3, 2)), (["100", "010", "111"], (3, 3))],
)
def test_last_reduction_weight(rows, expected):
    assert last_reduction_weight(BitMatrix.from_rows(rows)) == expected


def test_last_reduction_weight_rejects_non_polarizing():
    with pytest.raises(KernelError):
        last_reduction_weight(BitMatrix.identity(2))


def test_polarizing_iff_no_triangular_column_order():
    # brute force over column permutations for every invertible 3x3 matrix
    for G in invertible_matrices(3):
        triangular = any(is_upper_triangular(G.permute_columns(p)) for p in itertools.permutations(range(3)))
        assert is_polarizing(G) == (not triangular)


def test_kron_power_examples():
    G2 = BitMatrix.from_rows(["10", "11"])
    assert kron_power(G2, 1) == G2
    assert kron_power(G2, 2).row_strings() == ["1000", "1100", "1010", "1111"]
    G3 = BitMatrix.from_rows(["100", "110", "101"])
    assert is_invertible(kron_power(G3, 2))


def test_kron_encode_trivial(rng):
    G2 = BitMatrix.from_rows(["10", "11"])
    u = rng.integers(0, 2, 5).astype(np.uint8)
    assert np.array_equal(kron_encode(G2, 0, u[:1]), u[:1])
    assert kron_encode(G2, 1, np.array([1, 0], dtype=np.uint8)).tolist() == [1, 0]


@pytest.mark.parametrize("sizes", [(2, 2), (2, 3, 2), (3, 3), (2, 2, 2, 2, 2), (3, 2, 3, 2)])
def test_kron_encode_matches_explicit(sizes, rng):
    mats = [BitMatrix.from_row_words(list(rng.permutation(list(invertible_matrices(s)))[0].row_words), s) for s in sizes]
    N = int(np.prod(sizes))
    u = rng.integers(0, 2, (7, N)).astype(np.uint8)
    x = kron_encode(mats, u)
    ref = encode_explicit([m.bits for m in mats], u)
    assert np.array_equal(x, ref)
    assert np.array_equal(kron_matrix(mats).bits, kron_explicit([m.bits for m in mats]))


def test_kron_encode_op_count():
    G2 = BitMatrix.from_rows(["10", "11"])
    stats = {}
    kron_encode(G2, 6, np.zeros(64, dtype=np.uint8), stats=stats)
    assert stats["encode_ops"] == 64 * 2 * 6


def test_recoverability_examples():
    G2 = BitMatrix.from_rows(["10", "11"])
    assert is_recoverable(G2, 1, [1, 2]) and is_recoverable(G2, 2, [1, 2])
    assert not any(is_recoverable(G2, i, []) for i in (1, 2))
    assert is_recoverable(G2, 2, [2])
    assert not is_recoverable(G2, 1, [2])
