import math

import numpy as np
import pytest

from pecbounds.channels import trial_rng
from pecbounds.errors import InputError
from pecbounds.gf import GaloisField, gf_solve


def full_rank_probability(q, n):
    """P(an n x n matrix with uniform entries over GF(q) is invertible)."""
    p = 1.0
    for i in range(1, n + 1):
        p *= 1 - q ** (-i)
    return p


def test_identity_solve():
    gf = GaloisField(256)
    rank, sol = gf_solve(gf, np.eye(6, dtype=int), [3, 1, 4, 1, 5, 9])
    assert rank == 6
    assert list(sol) == [3, 1, 4, 1, 5, 9]


def test_duplicate_row_rank_deficit():
    gf = GaloisField(256)
    rank, sol = gf_solve(gf, [[1, 2, 3], [1, 2, 3], [0, 1, 7]])
    assert rank == 2 and sol is None


@pytest.mark.parametrize("size", [4, 8, 16, 32, 64, 128, 256])
def test_field_axioms_spot_checks(size):
    gf = GaloisField(size)
    rng = trial_rng(size)
    vals = rng.integers(1, size, 30)
    for a in vals:
        assert int(gf.mul(int(a), gf.inv(int(a)))) == 1
    a, b, c = (rng.integers(0, size, 50) for _ in range(3))
    assert np.array_equal(gf.mul(a, b), gf.mul(b, a))
    assert np.array_equal(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)))
    # distributivity over xor
    assert np.array_equal(gf.mul(a, b ^ c), gf.mul(a, b) ^ gf.mul(a, c))


def test_exp_log_cycle_covers_field():
    for size in (16, 256):
        gf = GaloisField(size)
        assert sorted(gf.exp[: size - 1]) == list(range(1, size))


def test_solution_satisfies_system():
    gf = GaloisField(16)
    rng = trial_rng(99)
    for _ in range(20):
        n = int(rng.integers(1, 8))
        a = gf.random_matrix(rng, n + 2, n)
        x = rng.integers(0, 16, n)
        b = np.zeros(n + 2, dtype=np.int64)
        for i in range(n + 2):
            b[i] = int(np.bitwise_xor.reduce(gf.mul(a[i], x)))
        rank, sol = gf_solve(gf, a, b)
        if rank == n:
            for i in range(n + 2):
                assert int(np.bitwise_xor.reduce(gf.mul(a[i], sol))) == b[i]


def test_random_square_matrix_full_rank_statistics():
    # 50 x 50 over GF(256): full rank except with probability ~ 1/q;
    # the failure rate must sit far below the coarse n/q union bound
    gf = GaloisField(256)
    rng = trial_rng(2024)
    trials, n = 300, 50
    failures = sum(gf_solve(gf, gf.random_matrix(rng, n, n))[0] < n
                   for _ in range(trials))
    bound = n / 256
    se = math.sqrt(bound * (1 - bound) / trials)
    assert failures / trials <= bound + 3 * se
    expected = 1 - full_rank_probability(256, n)
    assert failures / trials <= expected + 4 * math.sqrt(expected / trials) + 0.02


def test_bad_inputs():
    gf = GaloisField(256)
    with pytest.raises(InputError):
        GaloisField(10)
    with pytest.raises(InputError):
        gf_solve(gf, [[300]])
    with pytest.raises(ZeroDivisionError):
        gf.inv(0)
