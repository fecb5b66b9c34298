"""GF(2) matrices for polarization kernels.

Rows are kept as packed integers (bit ``j`` of a row word is column ``j``)
for elimination and span tests, and as a read-only ``uint8`` array for
anything vectorized.
"""

from __future__ import annotations

import itertools
import json
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

KRON_POWER_CAP = 4096


class KernelError(ValueError):
    """Malformed kernel, or a kernel precondition (e.g. invertibility) failed."""


class BitMatrix:
    """Dense matrix over GF(2)."""

    def __init__(self, bits):
        arr = np.array(bits, dtype=np.uint8)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise KernelError("a bit matrix needs positive dimensions")
        if np.any(arr > 1):
            raise KernelError("entries must be 0 or 1")
        arr.setflags(write=False)
        self.bits = arr

    @classmethod
    def from_rows(cls, rows: Iterable[str]) -> "BitMatrix":
        rows = [r.strip() for r in rows if r.strip()]
        if not rows or any(set(r) - {"0", "1"} for r in rows):
            raise KernelError("rows must be non-empty strings over {0,1}")
        if len({len(r) for r in rows}) != 1:
            raise KernelError("rows have unequal lengths")
        return cls([[int(c) for c in r] for r in rows])

    @classmethod
    def identity(cls, ell: int) -> "BitMatrix":
        return cls(np.eye(ell, dtype=np.uint8))

    @classmethod
    def from_row_words(cls, words: Sequence[int], cols: int) -> "BitMatrix":
        return cls([[(w >> j) & 1 for j in range(cols)] for w in words])

    @property
    def rows(self) -> int:
        return self.bits.shape[0]

    @property
    def cols(self) -> int:
        return self.bits.shape[1]

    @property
    def shape(self):
        return self.bits.shape

    @cached_property
    def row_words(self) -> tuple:
        return tuple(sum(int(b) << j for j, b in enumerate(row)) for row in self.bits)

    def row_strings(self) -> list:
        return ["".join(str(int(b)) for b in row) for row in self.bits]

    def permute_columns(self, perm: Sequence[int]) -> "BitMatrix":
        """Matrix whose column ``j`` is column ``perm[j]`` of this one."""
        return BitMatrix(self.bits[:, list(perm)])

    def __eq__(self, other) -> bool:
        return isinstance(other, BitMatrix) and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.shape, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.row_strings()})"

    def to_text(self) -> str:
        return "\n".join(self.row_strings()) + "\n"

    def to_json(self) -> str:
        return json.dumps({"l": self.rows, "rows": self.row_strings()})


def parse_kernel(text: str) -> BitMatrix:
    """Parse the plain ``0/1`` line format or the JSON ``{"l", "rows"}`` form."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            d = json.loads(stripped)
            rows = d["rows"]
        except (ValueError, KeyError, TypeError) as exc:
            raise KernelError(f"bad kernel JSON: {exc}") from exc
        G = BitMatrix.from_rows(rows)
        if "l" in d and int(d["l"]) != G.rows:
            raise KernelError("'l' disagrees with the number of rows")
    else:
        lines = (line.split("#", 1)[0] for line in stripped.splitlines())
        G = BitMatrix.from_rows("".join(line.split()) for line in lines)
    if G.rows != G.cols:
        raise KernelError(f"kernel must be square, got {G.rows}x{G.cols}")
    return G


def load_kernel(path, require_invertible: bool = True) -> BitMatrix:
    with open(path) as fh:
        G = parse_kernel(fh.read())
    if require_invertible and not is_invertible(G):
        raise KernelError(f"kernel in {path} is singular over GF(2)")
    return G


# ---------------------------------------------------------------------------
# elimination
# ---------------------------------------------------------------------------

def _reduce(basis: dict, v: int) -> int:
    """Reduce ``v`` against a basis keyed by leading bit."""
    while v:
        top = v.bit_length() - 1
        if top not in basis:
            return v
        v ^= basis[top]
    return 0


def _insert(basis: dict, v: int) -> bool:
    v = _reduce(basis, v)
    if v:
        basis[v.bit_length() - 1] = v
        return True
    return False


def rank_of_words(words: Iterable[int]) -> int:
    basis: dict = {}
    return sum(_insert(basis, w) for w in words)


def gf2_rank(M: BitMatrix) -> int:
    return rank_of_words(M.row_words)


def is_invertible(M: BitMatrix) -> bool:
    return M.rows == M.cols and gf2_rank(M) == M.rows


def in_span(vectors: Iterable[int], target: int) -> bool:
    basis: dict = {}
    for v in vectors:
        _insert(basis, v)
    return _reduce(basis, target) == 0


def gf2_inverse(M: BitMatrix) -> BitMatrix:
    """Inverse by Gauss-Jordan elimination on ``[M | I]``."""
    if not is_invertible(M):
        raise KernelError("matrix is singular over GF(2)")
    n = M.rows
    aug = [w | (1 << (n + r)) for r, w in enumerate(M.row_words)]
    for col in range(n):
        piv = next(r for r in range(col, n) if (aug[r] >> col) & 1)
        aug[col], aug[piv] = aug[piv], aug[col]
        for r in range(n):
            if r != col and (aug[r] >> col) & 1:
                aug[r] ^= aug[col]
    return BitMatrix.from_row_words([w >> n for w in aug], n)


def gf2_matmul(A: BitMatrix, B: BitMatrix) -> BitMatrix:
    return BitMatrix((A.bits.astype(np.int64) @ B.bits.astype(np.int64)) & 1)


# ---------------------------------------------------------------------------
# kernel analysis
# ---------------------------------------------------------------------------

def _require_square_invertible(G: BitMatrix) -> None:
    if not is_invertible(G):
        raise KernelError("kernel must be square and invertible over GF(2)")


def _has_matching(G: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> bool:
    """Whether ``rows`` can be matched into ``cols`` through 1-entries (Kuhn)."""
    cols = list(cols)
    match: dict = {}

    def augment(r, seen):
        for c in cols:
            if G[r, c] and c not in seen:
                seen.add(c)
                if c not in match or augment(match[c], seen):
                    match[c] = r
                    return True
        return False

    return all(augment(r, set()) for r in rows)


def unit_diagonal_matching(bits) -> tuple:
    """Lexicographically smallest ``sigma`` with ``bits[r, sigma[r]] == 1`` for all ``r``.

    Works on any square 0/1 array; raises ``KernelError`` when no perfect
    matching of rows to columns through 1-entries exists.
    """
    bits = np.asarray(bits)
    ell = bits.shape[0]
    sigma = []
    free = set(range(ell))
    for r in range(ell):
        for c in sorted(free):
            if bits[r, c] and _has_matching(bits, range(r + 1, ell), free - {c}):
                sigma.append(c)
                free.discard(c)
                break
        else:
            raise KernelError("no unit-diagonal column permutation exists")
    return tuple(sigma)


def unit_diagonalize(G: BitMatrix) -> tuple:
    """Lexicographically smallest column permutation giving a unit diagonal.

    Returns ``sigma`` with ``G.permute_columns(sigma)`` having ones on its
    diagonal.  One exists for every invertible ``G`` (a nonzero term of the
    determinant is a perfect matching).
    """
    _require_square_invertible(G)
    return unit_diagonal_matching(G.bits)


def _reduction(G: BitMatrix):
    """Yield ``(index, weight)`` for each residual last row, strip by strip.

    Index is 1-based.  Weight-1 rows are removed together with the column of
    their single one; the walk stops at the first row of weight >= 2.
    """
    _require_square_invertible(G)
    words = list(G.row_words)
    alive = (1 << G.cols) - 1
    for r in range(G.rows - 1, -1, -1):
        row = words[r] & alive
        weight = bin(row).count("1")
        yield r + 1, weight
        if weight >= 2:
            return
        alive &= ~row


def is_polarizing(G: BitMatrix) -> bool:
    """Whether no column permutation makes ``G`` upper triangular."""
    G = G.permute_columns(unit_diagonalize(G))
    return any(k >= 2 for _, k in _reduction(G))


def last_reduction_weight(G: BitMatrix) -> tuple:
    """``(i, k)``: the first sub-channel index whose residual row has weight ``k >= 2``.

    For that index the synthesized channel is equivalent to ``k`` independent
    looks at the input, so its Bhattacharyya parameter is ``Z(W)**k``.
    """
    for i, k in _reduction(G):
        if k >= 2:
            return i, k
    raise KernelError("kernel is not polarizing")


def is_upper_triangular(G: BitMatrix) -> bool:
    return not np.any(np.tril(G.bits, -1))


# ---------------------------------------------------------------------------
# Kronecker structure
# ---------------------------------------------------------------------------

def kron_power(G: BitMatrix, n: int, cap: int = KRON_POWER_CAP) -> BitMatrix:
    return kron_matrix([G] * n, cap=cap)


def kron_matrix(kernels: Sequence[BitMatrix], cap: int = KRON_POWER_CAP) -> BitMatrix:
    """Explicit ``kernels[0] ⊗ kernels[1] ⊗ ...`` (1x1 identity when empty)."""
    size = int(np.prod([K.rows for K in kernels])) if kernels else 1
    if size > cap:
        raise KernelError(f"explicit Kronecker matrix of size {size} exceeds {cap}")
    out = np.ones((1, 1), dtype=np.uint8)
    for K in kernels:
        out = np.kron(out, K.bits)
    return BitMatrix(out)


def kron_encode(kernels, n=None, u=None, stats: dict | None = None) -> np.ndarray:
    """Compute ``u · (G_1 ⊗ ... ⊗ G_n)`` over GF(2) without forming the matrix.

    ``kernels`` is a single :class:`BitMatrix` (then ``n`` gives the number of
    levels) or a sequence of per-level kernels, outermost first.  The index of
    ``u`` is read in mixed radix with the first level as most significant
    digit.  ``u`` may carry leading batch dimensions.

    If ``stats`` is given, ``stats["encode_ops"]`` is incremented by the
    number of bit accumulations performed.
    """
    if isinstance(kernels, BitMatrix):
        kernels = [kernels] * (0 if n is None else n)
    elif u is None:
        u, n = n, None
    kernels = list(kernels)
    u = np.asarray(u, dtype=np.uint8)
    sizes = [K.rows for K in kernels]
    N = int(np.prod(sizes)) if sizes else 1
    if u.shape[-1] != N:
        raise ValueError(f"input length {u.shape[-1]} does not match blocklength {N}")
    batch = u.shape[:-1]
    x = u.reshape(batch + tuple(sizes)).astype(np.int64)
    nb = len(batch)
    for t, K in enumerate(kernels):
        # contract digit axis t against the kernel rows
        x = np.moveaxis(np.tensordot(x, K.bits.astype(np.int64), axes=([nb + t], [0])), -1, nb + t) & 1
        if stats is not None:
            stats["encode_ops"] = stats.get("encode_ops", 0) + N * K.rows
    return x.reshape(batch + (N,)).astype(np.uint8)


# ---------------------------------------------------------------------------
# erasure recoverability
# ---------------------------------------------------------------------------

def recoverable_columns(G: BitMatrix, i: int) -> list:
    """Column ``j`` restricted to rows ``i..ell`` as words; bit 0 is row ``i``."""
    ell = G.rows
    if not 1 <= i <= ell:
        raise IndexError(f"channel index {i} outside 1..{ell}")
    bits = G.bits[i - 1:, :]
    return [sum(int(b) << r for r, b in enumerate(bits[:, j])) for j in range(ell)]


def is_recoverable(G: BitMatrix, i: int, unerased: Iterable[int]) -> bool:
    """Whether ``u_i`` follows from ``u_1..u_{i-1}`` and the unerased outputs.

    ``unerased`` holds 1-based column indices.
    """
    cols = recoverable_columns(G, i)
    return in_span((cols[j - 1] for j in unerased), 1)


def invertible_matrices(ell: int):
    """All invertible ``ell x ell`` matrices, in row-word order."""
    for words in itertools.product(range(1, 1 << ell), repeat=ell):
        if rank_of_words(words) == ell:
            yield BitMatrix.from_row_words(words, ell)


def column_classes(ell: int) -> list:
    """One representative per column-permutation class of invertible matrices."""
    seen = set()
    reps = []
    for G in invertible_matrices(ell):
        key = tuple(sorted(map(tuple, G.bits.T.tolist())))
        if key not in seen:
            seen.add(key)
            reps.append(G)
    return reps
