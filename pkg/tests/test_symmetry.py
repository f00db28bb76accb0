import random
from fractions import Fraction

import pytest

from mmrank.fields import F2, PrimeField, Q
from mmrank.symmetry import (
    GROUP,
    IDENTITY,
    GroupElement,
    OrbitTerm,
    StabilizerTag,
    SymmetricDecomposition,
    apply_group,
    apply_group_tensor,
    expand_symmetric,
    flatten,
    invert_term,
    orbit,
    orbit_sum,
    parse_group_element,
    rotate_term,
    stabilizer,
)
from mmrank.tensors import (
    Matrix,
    RankOneTerm,
    expand_decomposition,
    expand_term,
    matmul_tensor,
    standard_decomposition,
)

F3 = PrimeField(3)


def basis2(field):
    return {(i, j): Matrix.basis(field, 2, i, j) for i in (0, 1) for j in (0, 1)}


def rand_term(field, n, rnd):
    def m():
        if field is Q:
            return Matrix(field, n, [Fraction(rnd.randint(-3, 3)) for _ in range(n * n)])
        return Matrix(field, n, [rnd.randrange(field.p) for _ in range(n * n)])

    return RankOneTerm(m(), m(), m())


def test_group_composition_table():
    assert len(GROUP) == 6
    for g in GROUP:
        for h in GROUP:
            gh = g.compose(h)
            assert gh in GROUP
            assert gh == h.compose(g)  # abelian
        assert g.compose(g.inverse()) == IDENTITY


def test_group_element_serialization():
    for g in GROUP:
        assert parse_group_element(str(g)) == g
    with pytest.raises(ValueError):
        parse_group_element("sigma^1")
    with pytest.raises(ValueError):
        GroupElement(3, 0)


def test_rotation_and_inversion_examples():
    e = basis2(Q)
    t = RankOneTerm(e[0, 1], e[1, 1], e[0, 0])
    assert rotate_term(t) == RankOneTerm(e[0, 0], e[0, 1], e[1, 1])
    assert invert_term(t) == RankOneTerm(e[1, 0], e[0, 0], e[1, 1])
    d = e[0, 0] + e[1, 1]
    fixed = RankOneTerm(d, d, d)
    assert rotate_term(fixed) == fixed
    assert invert_term(fixed) == fixed


def test_generator_orders_and_commutation():
    rnd = random.Random(5)
    for _ in range(50):
        t = rand_term(F3, 2, rnd)
        assert rotate_term(rotate_term(rotate_term(t))) == t
        assert invert_term(invert_term(t)) == t
        assert rotate_term(invert_term(t)) == invert_term(rotate_term(t))


def test_group_action_law_on_random_terms():
    rnd = random.Random(6)
    for _ in range(20):
        t = rand_term(Q, 2, rnd)
        for g in GROUP:
            for h in GROUP:
                assert apply_group(g, apply_group(h, t)) == apply_group(g.compose(h), t)
        assert apply_group(IDENTITY, t) == t


@pytest.mark.parametrize("n", [2, 3, 4])
def test_multiplication_tensor_is_invariant(n):
    for field in (Q, F2):
        mn = matmul_tensor(n, field)
        for g in GROUP:
            assert apply_group_tensor(g, mn) == mn


def test_tensor_action_is_coefficient_permutation():
    rnd = random.Random(8)
    t = expand_term(rand_term(F3, 2, rnd))
    for g in GROUP:
        moved = apply_group_tensor(g, t)
        assert sorted(moved.coeffs) == sorted(t.coeffs)
        back = apply_group_tensor(g.inverse(), moved)
        assert back == t


def test_tensor_action_is_linear():
    rnd = random.Random(9)
    a = expand_term(rand_term(Q, 2, rnd))
    b = expand_term(rand_term(Q, 2, rnd))
    for g in GROUP:
        assert apply_group_tensor(g, a + b) == apply_group_tensor(g, a) + apply_group_tensor(g, b)


def test_equivariance_expand_commutes_with_action():
    rnd = random.Random(10)
    for field in (Q, F2, F3):
        for _ in range(30):
            t = rand_term(field, 2, rnd)
            for g in GROUP:
                assert expand_term(apply_group(g, t)) == apply_group_tensor(g, expand_term(t))


def test_orbit_of_off_diagonal_basis_term():
    e = basis2(Q)
    t = RankOneTerm(e[1, 0], e[0, 1], e[1, 1])
    images = orbit(t)
    assert len(images) == 6
    std = set(standard_decomposition(2, Q).terms)
    diag = {
        RankOneTerm(e[0, 0], e[0, 0], e[0, 0]),
        RankOneTerm(e[1, 1], e[1, 1], e[1, 1]),
    }
    assert set(images) == std - diag


def test_orbit_sizes():
    e = basis2(Q)
    d = e[0, 0] + e[1, 1]
    assert len(orbit(RankOneTerm(d, d, d))) == 1
    assert len(orbit(RankOneTerm(e[0, 0], e[0, 0], e[1, 1]))) == 6
    assert len(orbit(RankOneTerm(e[0, 0], e[0, 0], e[0, 0]))) == 2


def test_stabilizers():
    e = basis2(Q)
    d = e[0, 0] + e[1, 1]
    assert stabilizer(RankOneTerm(d, d, d)) == list(GROUP)
    assert stabilizer(RankOneTerm(e[1, 0], e[0, 1], e[1, 1])) == [IDENTITY]
    cube00 = RankOneTerm(e[0, 0], e[0, 0], e[0, 0])
    assert stabilizer(cube00) == [GroupElement(0, 0), GroupElement(1, 0), GroupElement(2, 0)]


def test_orbit_sum_identities():
    # both rewriting identities, over every tested field
    for field in (Q, F2, F3, PrimeField(101)):
        e = basis2(field)
        t = RankOneTerm(e[0, 1], e[1, 1], e[0, 0])
        assert orbit_sum(t) == orbit_sum(RankOneTerm(e[1, 0], e[0, 0], e[1, 1]))
        assert orbit_sum(t) == orbit_sum(RankOneTerm(e[0, 0], e[0, 1], e[1, 1]))


def test_orbit_sum_properties():
    rnd = random.Random(11)
    for _ in range(10):
        t = rand_term(F3, 2, rnd)
        s = orbit_sum(t)
        for g in GROUP:
            assert apply_group_tensor(g, s) == s
            assert orbit_sum(apply_group(g, t)) == s
    z = RankOneTerm(Matrix.zero(Q, 2), Matrix.zero(Q, 2), Matrix.zero(Q, 2))
    assert orbit_sum(z).is_zero


def test_orbit_sum_counts_multiplicity_for_fixed_terms():
    e = basis2(Q)
    d = e[0, 0] + e[1, 1]
    cube = RankOneTerm(d, d, d)
    assert orbit_sum(cube) == expand_term(cube).scale(6)


def test_orbit_term_validation():
    e = basis2(Q)
    d = e[0, 0] + e[1, 1]
    cube = RankOneTerm(d, d, d)
    free = RankOneTerm(e[1, 0], e[0, 1], e[1, 1])
    OrbitTerm(cube, StabilizerTag.FULL)
    OrbitTerm(free, StabilizerTag.TRIVIAL)
    with pytest.raises(ValueError):
        OrbitTerm(cube, StabilizerTag.TRIVIAL)
    with pytest.raises(ValueError):
        OrbitTerm(free, StabilizerTag.FULL)
    # orbit size 2: rejected entirely
    with pytest.raises(ValueError):
        OrbitTerm.for_rep(RankOneTerm(e[0, 0], e[0, 0], e[0, 0]))
    assert OrbitTerm.for_rep(cube).tag is StabilizerTag.FULL
    assert OrbitTerm.for_rep(free).orbit_size == 6


def test_expand_symmetric_and_flatten():
    for field in (Q, F2):
        e = basis2(field)
        d = e[0, 0] + e[1, 1]
        cube = OrbitTerm(RankOneTerm(d, d, d), StabilizerTag.FULL)
        free = OrbitTerm(
            RankOneTerm(e[1, 0] + e[0, 0], e[0, 1] - e[0, 0], e[1, 1]),
            StabilizerTag.TRIVIAL,
        )
        sd = SymmetricDecomposition(2, field, (cube, free))
        assert sd.rank_bound == 7
        m2 = matmul_tensor(2, field)
        assert expand_symmetric(sd) == m2
        flat = flatten(sd)
        assert flat.rank_bound == 7
        assert expand_decomposition(flat) == expand_symmetric(sd)

    empty = SymmetricDecomposition(2, Q, ())
    assert expand_symmetric(empty).is_zero
    assert empty.rank_bound == 0

    dq = Matrix.basis(Q, 2, 0, 0) + Matrix.basis(Q, 2, 1, 1)
    single = SymmetricDecomposition(
        2, Q, (OrbitTerm(RankOneTerm(dq, dq, dq), StabilizerTag.FULL),)
    )
    assert len(flatten(single).terms) == 1
