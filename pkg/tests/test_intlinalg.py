import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricquot.intlinalg import (
    cokernel,
    determinant,
    hermite_normal_form,
    integer_kernel,
    integer_solve,
    matmul,
    rank,
    rational_nullspace,
    saturated_basis,
    smith_normal_form,
    subgroup_generates,
)


def matrices(max_rows=5, max_cols=5, bound=20):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                               min_size=m, max_size=m)))


def check_snf(A):
    snf = smith_normal_form(A)
    assert matmul(matmul(snf.U, A), snf.V) == snf.D
    assert abs(determinant(snf.U)) == 1
    assert abs(determinant(snf.V)) == 1
    d = snf.diagonal
    for i in range(len(snf.D)):
        for j in range(len(snf.D[0])):
            if i != j:
                assert snf.D[i][j] == 0
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[:len(nz)] == nz
    for a, b in zip(nz, nz[1:]):
        assert b % a == 0


def test_snf_known():
    snf = smith_normal_form([[2, 0], [0, 3]])
    assert snf.diagonal == [1, 6]
    snf = smith_normal_form([[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]])
    assert snf.diagonal == [1, 10, 30, 0]
    assert smith_normal_form([[2, 4]]).diagonal == [2]


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_snf_properties(A):
    check_snf(A)


def test_snf_zero_and_empty():
    check_snf([[0, 0], [0, 0]])
    snf = smith_normal_form([], 3)
    assert snf.rank == 0 and len(snf.V) == 3


@settings(max_examples=100, deadline=None)
@given(matrices(4, 4, 10))
def test_hnf(A):
    H, U = hermite_normal_form(A)
    assert matmul(U, A) == H
    assert abs(determinant(U)) == 1


def test_rank_and_nullspace():
    A = [[1, 2, 3], [2, 4, 6]]
    assert rank(A) == 1
    ns = rational_nullspace(A, 3)
    assert len(ns) == 2
    for v in ns:
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in A)


@settings(max_examples=100, deadline=None)
@given(matrices(3, 5, 6))
def test_integer_kernel_is_saturated_basis(A):
    n = len(A[0])
    K = integer_kernel(A, n)
    assert len(K) == n - rank(A, n)
    for v in K:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in A)
    # saturation: small kernel vectors are integer combinations of K
    for v in itertools.product(range(-1, 2), repeat=n):
        if any(v) and all(sum(a * b for a, b in zip(row, v)) == 0 for row in A):
            assert integer_solve([list(c) for c in zip(*K)], list(v), len(K)) is not None


def test_integer_solve():
    assert integer_solve([[2, 0], [0, 3]], [4, 9], 2) == [2, 3]
    assert integer_solve([[2, 0], [0, 3]], [1, 0], 2) is None


def test_saturated_basis():
    basis, comp = saturated_basis([(1, 1)], 2)
    assert len(basis) == 1 and len(comp) == 1
    assert abs(determinant(basis + comp)) == 1
    basis, comp = saturated_basis([(2, 0, 0), (0, 2, 0)], 3)
    assert abs(determinant(basis + comp)) == 1
    assert sorted(map(abs, comp[0])) == [0, 0, 1]


def _in_row_lattice(A, v):
    """v in the row lattice of a nonsingular square A, via an exact rational solve."""
    from toricquot.intlinalg import rational_solve

    At = [list(c) for c in zip(*A)]
    x = rational_solve(At, v, len(A))
    return x is not None and all(c.denominator == 1 for c in x)


@pytest.mark.parametrize("seed", range(40))
def test_cokernel_against_brute_force(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 3)
    while True:
        A = [[rng.randint(-3, 3) for _ in range(m)] for _ in range(m)]
        det = abs(determinant(A))
        if 0 < det <= 24:
            break
    G = cokernel(A, m)
    assert G.order == det
    box = list(itertools.product(range(det), repeat=m)) if det ** m <= 600 else \
        [tuple(rng.randrange(det) for _ in range(m)) for _ in range(300)]
    classes = []
    for y in box:
        if not any(_in_row_lattice(A, [a - b for a, b in zip(y, z)]) for z in classes):
            classes.append(y)
    if det ** m <= 600:
        assert len(classes) == det
    for y, z in itertools.combinations(box[:60], 2):
        same = _in_row_lattice(A, [a - b for a, b in zip(y, z)])
        assert same == (G.image(y) == G.image(z))


def test_cokernel_names():
    assert str(cokernel([[2, 0], [0, 3]])) == "Z/6"
    assert str(cokernel([[1, 1]], 2)) == "Z^1"
    assert str(cokernel([], 2)) == "Z^2"
    assert str(cokernel([[1, 0], [0, 1]])) == "0"
    assert str(cokernel([[2, 0]], 2)) == "Z^1 + Z/2"


def test_subgroup_generates():
    G = cokernel([[2, 0], [0, 2]])
    assert subgroup_generates([[1, 0], [0, 1]], G)
    assert not subgroup_generates([[1, 1]], G)
    assert not subgroup_generates([], G)
    assert subgroup_generates([], cokernel([[1]]))
