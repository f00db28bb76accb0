import itertools
import random
from fractions import Fraction

import pytest

from mmrank.bilinear import compile_program, naive_matmul
from mmrank.fields import F2, PrimeField, Q
from mmrank.proof import rank7_symmetric_form
from mmrank.symmetry import flatten
from mmrank.tensors import (
    Decomposition,
    Matrix,
    standard_decomposition,
)

F101 = PrimeField(101)


def rand_matrix(field, n, rnd):
    if field is Q:
        return Matrix(field, n, [Fraction(rnd.randint(-9, 9)) for _ in range(n * n)])
    return Matrix(field, n, [rnd.randrange(field.p) for _ in range(n * n)])


def strassen_like(field):
    return compile_program(flatten(rank7_symmetric_form(field)))


def test_naive_matmul_examples():
    A = Matrix.from_rows(Q, [[1, 2], [3, 4]])
    B = Matrix.from_rows(Q, [[5, 6], [7, 8]])
    assert naive_matmul(A, B) == Matrix.from_rows(Q, [[19, 22], [43, 50]])
    I = Matrix.identity(Q, 2)
    assert naive_matmul(I, B) == B
    P = Matrix.from_rows(Q, [[0, 1], [1, 0]])
    assert naive_matmul(P, P) == I


def test_compile_standard_program():
    prog = compile_program(standard_decomposition(2, Q))
    assert prog.r == 8
    rnd = random.Random(1)
    for _ in range(50):
        A, B = rand_matrix(Q, 2, rnd), rand_matrix(Q, 2, rnd)
        assert prog.apply(A, B) == naive_matmul(A, B)


def test_compile_refuses_unverified_decomposition():
    bad = Decomposition(2, Q, standard_decomposition(2, Q).terms[:6])
    with pytest.raises(ValueError):
        compile_program(bad)


def test_scalar_program():
    prog = compile_program(standard_decomposition(1, Q))
    A = Matrix(Q, 1, [3])
    B = Matrix(Q, 1, [5])
    assert prog.apply(A, B) == Matrix(Q, 1, [15])
    assert prog.r == 1


def test_seven_product_program_exhaustive_over_f2():
    prog = strassen_like(F2)
    assert prog.r == 7
    mats = [Matrix(F2, 2, bits) for bits in itertools.product((0, 1), repeat=4)]
    for A in mats:
        for B in mats:
            assert prog.apply(A, B) == naive_matmul(A, B)


@pytest.mark.parametrize("field", [F2, F101, Q], ids=lambda f: f.name)
def test_program_matches_naive_on_random_inputs(field):
    prog = strassen_like(field)
    rnd = random.Random(9)
    for _ in range(1000):
        A, B = rand_matrix(field, 2, rnd), rand_matrix(field, 2, rnd)
        assert prog.apply(A, B) == naive_matmul(A, B)


def test_apply_identity_and_zero():
    prog = strassen_like(Q)
    rnd = random.Random(2)
    B = rand_matrix(Q, 2, rnd)
    assert prog.apply(Matrix.identity(Q, 2), B) == B
    assert prog.apply(Matrix.zero(Q, 2), B).is_zero


def test_apply_rejects_mismatched_operands():
    prog = strassen_like(Q)
    with pytest.raises(ValueError):
        prog.apply(Matrix.zero(Q, 3), Matrix.zero(Q, 3))
    with pytest.raises(ValueError):
        prog.apply(Matrix.zero(F2, 2), Matrix.zero(F2, 2))


@pytest.mark.parametrize("depth", [0, 1, 2, 3])
def test_recursive_application_matches_naive(depth):
    prog = strassen_like(F101)
    rnd = random.Random(depth)
    side = 2**depth
    A, B = rand_matrix(F101, side, rnd), rand_matrix(F101, side, rnd)
    assert prog.apply_recursive(A, B, depth) == naive_matmul(A, B)


def test_recursive_application_over_rationals():
    prog = strassen_like(Q)
    rnd = random.Random(8)
    A = Matrix(Q, 4, [Fraction(rnd.randint(-5, 5), rnd.randint(1, 5)) for _ in range(16)])
    B = Matrix(Q, 4, [Fraction(rnd.randint(-5, 5), rnd.randint(1, 5)) for _ in range(16)])
    assert prog.apply_recursive(A, B, 2) == naive_matmul(A, B)


def test_recursive_depth_one_equals_apply():
    prog = strassen_like(Q)
    rnd = random.Random(4)
    A, B = rand_matrix(Q, 2, rnd), rand_matrix(Q, 2, rnd)
    assert prog.apply_recursive(A, B, 1) == prog.apply(A, B)


def test_recursive_rejects_wrong_side():
    prog = strassen_like(Q)
    with pytest.raises(ValueError):
        prog.apply_recursive(Matrix.zero(Q, 3), Matrix.zero(Q, 3), 2)


def test_multiplication_count_law():
    seven = strassen_like(Q)
    eight = compile_program(standard_decomposition(2, Q))
    for d in range(5):
        assert seven.count_ops(d).multiplications == 7**d
        assert eight.count_ops(d).multiplications == 8**d
    assert seven.count_ops(3).multiplications == 343
    assert eight.count_ops(3).multiplications == 512


def test_count_ops_base_cases():
    prog = strassen_like(Q)
    c0 = prog.count_ops(0)
    assert (c0.multiplications, c0.additions, c0.depth) == (1, 0, 0)
    c1 = compile_program(standard_decomposition(2, Q)).count_ops(1)
    assert c1.multiplications == 8
    assert c1.scalar_multiplications == 0


def test_additions_recurrence_is_exact():
    prog = strassen_like(Q)
    per_level = prog.count_ops(1).additions
    expected, block = 0, 1
    for _ in range(3):
        expected = 7 * expected + per_level * block
        block *= 4
    assert prog.count_ops(3).additions == expected
