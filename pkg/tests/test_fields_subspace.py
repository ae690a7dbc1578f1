import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from epwgm.fields import QQ, GF, FieldMismatchError, field_from_json, parse_field, same_field
from epwgm.subspace import (
    Subspace, annihilator, bareiss_det, canonicalize, corank, det, form_kernel, intersect,
    inverse, matmul, nullspace, rank, rref, solve, subspace_sum,
)
from conftest import rand_invertible, rand_vec


def test_prime_field_arithmetic():
    F = GF(7)
    assert F(10) == 3
    assert F(3) * F.inv(3) % 7 == 1
    assert F.decode(F.encode(5)) == 5
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_field_json_and_parsing():
    assert field_from_json("Q") == QQ
    assert field_from_json({"p": 11}) == GF(11)
    assert parse_field("Q") == QQ and parse_field("13") == GF(13)
    with pytest.raises(ValueError):
        parse_field("12")
    with pytest.raises(FieldMismatchError):
        same_field(QQ, GF(5))


def test_rational_decode_roundtrip():
    x = Fraction(-7, 3)
    assert QQ.decode(QQ.encode(x)) == x


def test_canonicalize_examples():
    U = canonicalize([[2, 0], [0, 2]], QQ)
    assert U.rows() == [[1, 0], [0, 1]]
    U = canonicalize([[1, 1], [2, 2]], QQ)
    assert U.rows() == [[1, 1]]


def test_intersection_examples():
    e1 = canonicalize([[1, 0, 0]], QQ)
    e2 = canonicalize([[0, 1, 0]], QQ)
    assert intersect(e1, e1) == e1
    assert intersect(e1, e2).dim == 0


def test_annihilator_extremes(field):
    ident = [[field(int(i == j)) for j in range(4)] for i in range(4)]
    assert annihilator(Subspace.full(4, field), ident).dim == 0
    assert annihilator(Subspace.zero(4, field), ident).dim == 4


def test_identity_form_has_no_kernel():
    ident = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    assert corank(ident, Subspace.full(3, QQ)) == 0


def test_bareiss_matches_field_determinant():
    rng = random.Random(1)
    for _ in range(30):
        M = [[rng.randint(-5, 5) for _ in range(5)] for _ in range(5)]
        assert bareiss_det(M) == det([[Fraction(x) for x in r] for r in M], QQ)


def test_inverse_and_solve(field):
    rng = random.Random(2)
    M = rand_invertible(rng, field, 5)
    Mi = inverse(M, field)
    I = matmul(M, Mi, field)
    assert all(I[i][j] == field(int(i == j)) for i in range(5) for j in range(5))
    b = rand_vec(rng, field, 5)
    x = solve(M, b, field)
    assert [field.norm(sum(M[i][j] * x[j] for j in range(5))) for i in range(5)] == [field(c) for c in b]
    assert solve([[1, 0], [1, 0]], [0, 1], QQ) is None


def _mix(rng, field, U):
    k = U.dim
    T = rand_invertible(rng, field, k)
    return matmul(T, U.rows(), field)


@given(st.integers(0, 10**6))
def test_canonicalize_idempotent_and_span_invariant(seed):
    for field in (QQ, GF(7)):
        rng = random.Random(seed)
        rows = [rand_vec(rng, field, 6) for _ in range(rng.randint(1, 5))]
        U = canonicalize(rows, field, 6)
        assert canonicalize(U.rows(), field, 6) == U
        if U.dim:
            assert canonicalize(_mix(rng, field, U), field, 6) == U


def test_modular_law_1000_pairs():
    rng = random.Random(3)
    for t in range(1000):
        field = QQ if t % 2 else GF(5)
        n = 6
        U1 = canonicalize([rand_vec(rng, field, n, 2) for _ in range(rng.randint(0, 5))], field, n)
        U2 = canonicalize([rand_vec(rng, field, n, 2) for _ in range(rng.randint(0, 5))], field, n)
        assert subspace_sum(U1, U2).dim + intersect(U1, U2).dim == U1.dim + U2.dim


@given(st.integers(0, 10**6))
def test_double_annihilator(seed):
    rng = random.Random(seed)
    for field in (QQ, GF(11)):
        P = rand_invertible(rng, field, 5)
        U = canonicalize([rand_vec(rng, field, 5) for _ in range(rng.randint(0, 4))], field, 5)
        Pt = [list(r) for r in zip(*P)]
        # ann w.r.t. P, then w.r.t. the transposed pairing, returns U
        assert annihilator(annihilator(U, P), Pt) == U


@given(st.integers(0, 10**6))
def test_form_kernel_vectors_are_null(seed):
    rng = random.Random(seed)
    field = QQ
    B = [rand_vec(rng, field, 5, 2) for _ in range(3)]
    G = [[sum(B[k][i] * B[k][j] for k in range(3)) for j in range(5)] for i in range(5)]
    K = form_kernel(G, Subspace.full(5, field))
    for v in K.rows():
        assert all(sum(G[i][j] * v[j] for j in range(5)) == 0 for i in range(5))
    assert K.dim == 5 - rank(G, field)


def test_nullspace_and_rref(field):
    M = [[field(1), field(2), field(3)], [field(2), field(4), field(6)]]
    N = nullspace(M, field, 3)
    assert len(N) == 2
    R, piv = rref(M, field, 3)
    assert piv == [0]
