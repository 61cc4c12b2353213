import random
from fractions import Fraction

from cuspidal import linalg


def F(a, b=1):
    return Fraction(a, b)


def random_matrix(rng, nrows, ncols):
    return [
        [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(ncols)]
        for _ in range(nrows)
    ]


def test_nullspace_matches_plain_gauss_oracle():
    rng = random.Random(7)
    for _ in range(300):
        nrows, ncols = rng.randint(1, 6), rng.randint(1, 6)
        m = random_matrix(rng, nrows, ncols)
        fast = linalg.nullspace(m)
        plain = linalg.nullspace_plain(m)
        assert len(fast) == len(plain)
        # Same canonicalization on both paths: bases must agree exactly.
        assert sorted(fast) == sorted(plain)
        for v in fast:
            for row in m:
                assert sum(a * b for a, b in zip(row, v)) == 0


def test_rank_row_echelon_consistency():
    rng = random.Random(8)
    for _ in range(200):
        nrows, ncols = rng.randint(1, 6), rng.randint(1, 6)
        m = random_matrix(rng, nrows, ncols)
        r = linalg.rank(m)
        assert r == linalg.rank_field(m)
        assert r + len(linalg.nullspace(m)) == ncols


def test_nullspace_of_zero_and_empty():
    z = [[F(0), F(0)], [F(0), F(0)]]
    basis = linalg.nullspace(z)
    assert len(basis) == 2
    empty = linalg.nullspace([], ncols=3)
    assert len(empty) == 3


def test_in_span():
    v1 = [F(1), F(0), F(2)]
    v2 = [F(0), F(1), F(-1)]
    assert linalg.in_span([v1, v2], [F(2), F(3), F(1)])
    assert not linalg.in_span([v1, v2], [F(0), F(0), F(1)])


def test_solve_consistent_and_inconsistent():
    rows = [[F(1), F(2)], [F(3), F(4)], [F(4), F(6)]]
    rhs = [F(5), F(6), F(11)]
    x = linalg.solve(rows, rhs)
    assert x is not None
    for row, b in zip(rows, rhs):
        assert sum(a * xi for a, xi in zip(row, x)) == b
    assert linalg.solve(rows, [F(5), F(6), F(12)]) is None
