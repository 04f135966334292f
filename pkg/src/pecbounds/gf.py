"""Table-based arithmetic over GF(2^m) and Gaussian elimination.

Used to decode random linear combinations: the decoder's question is always
"does this coefficient matrix have full column rank, and if so what is the
solution". Row operations are vectorized with numpy over exp/log tables.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

# primitive polynomials (with alpha = 2 a generator) per field size
_PRIMITIVE_POLY = {
    4: 0x7, 8: 0xB, 16: 0x13, 32: 0x25, 64: 0x43, 128: 0x83, 256: 0x11D,
}


class GaloisField:
    """GF(2^m) with exp/log tables, m in 2..8."""

    def __init__(self, size: int):
        if size not in _PRIMITIVE_POLY:
            raise InputError(f"unsupported field size {size}; choose from {sorted(_PRIMITIVE_POLY)}")
        self.size = size
        poly = _PRIMITIVE_POLY[size]
        exp = np.zeros(2 * (size - 1), dtype=np.int16)
        log = np.zeros(size, dtype=np.int16)
        x = 1
        for i in range(size - 1):
            exp[i] = x
            log[x] = i
            x <<= 1
            if x & size:
                x ^= poly
        exp[size - 1:] = exp[: size - 1]
        self.exp = exp
        self.log = log

    def mul(self, a, b):
        """Elementwise product of arrays (or scalars) in the field."""
        a = np.asarray(a, dtype=np.int16)
        b = np.asarray(b, dtype=np.int16)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), np.int16(0), out)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("no inverse of 0")
        return int(self.exp[self.size - 1 - self.log[a]])

    def random_matrix(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        return rng.integers(0, self.size, size=(rows, cols), dtype=np.int16)


def gf_solve(field: GaloisField, matrix, rhs=None):
    """Row-reduce over the field; returns (rank, solution).

    Forward elimination with normalized pivot rows, stopping early once
    every column carries a pivot; the solution (when the matrix has full
    column rank and the system is consistent) comes from back substitution.
    """
    a = np.array(matrix, dtype=np.int16)
    if a.ndim != 2:
        raise InputError("matrix must be two-dimensional")
    if np.any((a < 0) | (a >= field.size)):
        raise InputError("matrix entries outside the field")
    m, n = a.shape
    b = None
    if rhs is not None:
        b = np.array(rhs, dtype=np.int16).reshape(m)
        if np.any((b < 0) | (b >= field.size)):
            raise InputError("rhs entries outside the field")
    rank = 0
    pivot_cols = []
    for col in range(n):
        if rank == m:
            break
        nz = np.nonzero(a[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
            if b is not None:
                b[[rank, piv]] = b[[piv, rank]]
        inv = field.inv(int(a[rank, col]))
        a[rank] = field.mul(a[rank], inv)
        if b is not None:
            b[rank] = field.mul(b[rank], inv)
        below = a[rank + 1:, col]
        hit = rank + 1 + np.nonzero(below)[0]
        if hit.size:
            factors = a[hit, col].copy()
            a[hit] ^= field.mul(factors[:, None], a[rank][None, :])
            if b is not None:
                b[hit] ^= field.mul(factors, b[rank])
        pivot_cols.append(col)
        rank += 1
    solution = None
    if b is not None and rank == n:
        if not np.any(b[rank:]):
            solution = np.zeros(n, dtype=np.int16)
            for i in range(rank - 1, -1, -1):
                acc = int(np.bitwise_xor.reduce(field.mul(a[i], solution)))
                solution[pivot_cols[i]] = b[i] ^ acc
            solution = solution.astype(np.int64)
    return rank, solution
