import random

import pytest

from epwgm.exterior import Multivector, V6, basis, e
from epwgm.fields import QQ, GF
from epwgm.gmdata import gm_to_lagrangian, random_gm, random_gm_surface
from epwgm.lagrangian import (
    FrameDegenerateError, LagrangianData, NotAutomorphismError, IncompletePointListError,
    SexticPolynomial, apply_gl, canonical_chart, decomposable_search, decomposable_witness_check,
    dual_stratum_dim, F_of, is_automorphism, is_lagrangian, perp, permutation_order,
    projective_order, sextic_polynomial, sextic_value, strata_permutation, stratum_dim,
    stratum_dim_by_intersection, swap_symmetric_lagrangian,
)
from epwgm.subspace import annihilator, canonicalize, intersect
from conftest import rand_invertible, rand_vec


def _span_triples(triples, field=QQ):
    idx = {T: i for i, T in enumerate(basis(V6, 3))}
    rows = []
    for T in triples:
        r = [field(0)] * 20
        r[idx[tuple(i - 1 for i in T)]] = field(1)
        rows.append(r)
    return canonicalize(rows, field, 20)


def _e6(field=QQ):
    return tuple(field(int(i == 5)) for i in range(6))


def _hyperplane_datum(field=QQ):
    from itertools import combinations
    A = _span_triples([T for T in combinations(range(1, 6), 3)], field)
    return LagrangianData.canonical(A)


def _gm_lagrangian(seed, field=QQ):
    return gm_to_lagrangian(random_gm_surface(seed, field))


def _nonzero(rng, field, n=6):
    while True:
        v = rand_vec(rng, field, n)
        if any(not field.is_zero(c) for c in v):
            return v


# -- Lagrangian test and fibres ---------------------------------------------

def test_fibre_is_lagrangian_example():
    assert is_lagrangian(F_of(e(1)))


def test_index_one_triples_plus_one_more_is_not_lagrangian():
    from itertools import combinations
    with1 = [T for T in combinations(range(1, 7), 3) if 1 in T]
    assert len(with1) == 10
    assert not is_lagrangian(_span_triples(with1 + [(2, 3, 4)]))


def test_hyperplane_cube_is_lagrangian():
    assert is_lagrangian(_hyperplane_datum().A)


def test_fibre_examples():
    from itertools import combinations
    assert F_of(e(6)) == _span_triples([T for T in combinations(range(1, 7), 3) if 6 in T])
    assert intersect(F_of(e(1)), F_of(e(2))).dim == 4


@pytest.mark.parametrize("field", [QQ, GF(7)], ids=["Q", "F7"])
def test_random_fibres_are_lagrangian(field):
    rng = random.Random(11)
    for _ in range(100):
        assert is_lagrangian(F_of(_nonzero(rng, field), field))


# -- strata -----------------------------------------------------------------

def test_stratum_examples():
    L = LagrangianData.canonical(F_of(e(6)))
    assert stratum_dim(L, e(6)) == 10
    assert stratum_dim(L, e(1)) == 4


def test_random_point_on_gm_lagrangian_has_stratum_zero():
    L = _gm_lagrangian(0)
    v = [3, -1, 2, 5, 1, 7]
    assert stratum_dim(L, v) == 0 == stratum_dim_by_intersection(L, v)


@pytest.mark.parametrize("field", [QQ, GF(5), GF(7)], ids=["Q", "F5", "F7"])
def test_stratum_agrees_with_intersection_oracle(field):
    rng = random.Random(12)
    for seed in range(4):
        L = _gm_lagrangian(seed, field)
        pts = [_nonzero(rng, field) for _ in range(15)]
        pts += [[field(int(i == j)) for i in range(6)] for j in range(6)]
        for v in pts:
            assert stratum_dim(L, v) == stratum_dim_by_intersection(L, v)


def test_dual_stratum_examples():
    assert dual_stratum_dim(_hyperplane_datum(), _e6()) == 10
    L = _gm_lagrangian(1)
    assert dual_stratum_dim(L, L.V5cov) == 3
    G = random_gm(2, QQ, dim_w=10)
    L10 = gm_to_lagrangian(G)
    assert dual_stratum_dim(L10, L10.V5cov) == 0


@pytest.mark.parametrize("field", [QQ, GF(7)], ids=["Q", "F7"])
def test_perp_is_involution(field):
    for seed in range(100 if field == GF(7) else 20):
        L = _gm_lagrangian(seed % 10, field) if seed < 10 else apply_gl(
            rand_invertible(random.Random(seed), field, 6), _gm_lagrangian(seed % 10, field))
        assert perp(perp(L)) == L


def test_perp_of_fibre_is_annihilator():
    A = F_of(e(2))
    L = LagrangianData.canonical(A)
    P = perp(L).A
    # the perp is the annihilator of A under the standard dual pairing of triples
    ident = [[QQ(int(i == j)) for j in range(20)] for i in range(20)]
    assert P == annihilator(A, ident)


@pytest.mark.parametrize("field", [QQ, GF(7)], ids=["Q", "F7"])
def test_dual_stratum_equals_stratum_of_perp(field):
    rng = random.Random(13)
    for seed in range(3):
        L = _gm_lagrangian(seed, field)
        Lp = perp(L)
        pts = [_nonzero(rng, field) for _ in range(10)] + [list(L.V5cov)]
        for c in pts:
            assert dual_stratum_dim(L, c) == stratum_dim(Lp, c)


# -- the sextic --------------------------------------------------------------

def test_sextic_value_homogeneity_and_vanishing():
    L = _gm_lagrangian(0)
    v = [1, 2, -1, 3, 1, 2]
    lam = 3
    assert sextic_value(L, [lam * c for c in v]) == lam ** 10 * sextic_value(L, v)
    assert sextic_value(L, v) != 0 and stratum_dim(L, v) == 0
    with pytest.raises(FrameDegenerateError):
        sextic_value(L, [1, 0, 0, 0, 0, 0])


def test_sextic_polynomial_over_q():
    L = _gm_lagrangian(3)
    S = sextic_polynomial(L)
    assert S.total_degree() == 6
    assert all(sum(m) == 6 for m in S.as_dict())
    rng = random.Random(14)
    for _ in range(5):
        v = rand_vec(rng, QQ, 6)
        v[5] = QQ(rng.choice([1, 2, -1]))
        # chart determinant = c * t^4 * f6
        assert (sextic_value(L, v) == 0) == (S(v) == 0)
    ratio = {sextic_value(L, v) / (v[5] ** 4 * S(v)) for v in ([1, 2, 3, 4, 5, 1], [2, -1, 0, 3, 1, 2])}
    assert len(ratio) == 1
    S2 = SexticPolynomial.from_json(S.to_json(), QQ)
    assert S2 == S


def test_sextic_threads_agree():
    L = _gm_lagrangian(4, GF(11))
    assert sextic_polynomial(L, workers=1) == sextic_polynomial(L, workers=4)


def test_sextic_partials():
    S = SexticPolynomial.from_dict({(6, 0, 0, 0, 0, 0): 1, (1, 1, 1, 1, 1, 1): 2}, QQ)
    assert S.partial(0).as_dict() == {(5, 0, 0, 0, 0, 0): 6, (0, 1, 1, 1, 1, 1): 2}
    assert S.gradient([1, 1, 1, 1, 1, 1]) == [8, 2, 2, 2, 2, 2]


# -- decomposables ----------------------------------------------------------

def test_decomposable_witness_examples():
    L = LagrangianData.canonical(F_of(e(6)))
    assert decomposable_witness_check(L, e(1, 2, 6))
    assert not decomposable_witness_check(L, e(1, 2, 3) + e(4, 5, 6))
    with pytest.raises(ValueError):
        decomposable_witness_check(L, Multivector.zero(6, 3))


def test_decomposable_search_finds_witnesses():
    for L in (LagrangianData.canonical(F_of(e(6))), _hyperplane_datum()):
        w = decomposable_search(L, 5, seed=0)
        assert w is not None and decomposable_witness_check(L, w)


def test_decomposable_search_on_gm_lagrangian():
    L = _gm_lagrangian(0)
    assert decomposable_search(L, 200, seed=1) is None


# -- GL action --------------------------------------------------------------

def _ident(field=QQ):
    return [[field(int(i == j)) for j in range(6)] for i in range(6)]


def test_apply_gl_identity_and_scalars():
    L = _gm_lagrangian(0)
    assert apply_gl(_ident(), L) == L
    assert apply_gl([[3 * int(i == j) for j in range(6)] for i in range(6)], L).A == L.A


@pytest.mark.parametrize("field", [QQ, GF(7)], ids=["Q", "F7"])
def test_apply_gl_equivariance(field):
    rng = random.Random(15)
    for seed in range(3):
        L = _gm_lagrangian(seed, field)
        phi = rand_invertible(rng, field, 6)
        L2 = apply_gl(phi, L)
        assert is_lagrangian(L2.A)
        from epwgm.subspace import inverse
        phinv = inverse(phi, field)
        for _ in range(6):
            v = _nonzero(rng, field)
            img = [field.norm(sum(phi[i][j] * v[j] for j in range(6))) for i in range(6)]
            assert stratum_dim(L2, img) == stratum_dim(L, v)
            c = _nonzero(rng, field)
            cimg = [field.norm(sum(c[i] * phinv[i][j] for i in range(6))) for j in range(6)]
            assert dual_stratum_dim(L2, cimg) == dual_stratum_dim(L, c)


def test_automorphism_examples():
    L = _hyperplane_datum()
    assert is_automorphism(_ident(), _gm_lagrangian(0))
    swap12 = [row[:] for row in _ident()]
    swap12[0], swap12[1] = swap12[1], swap12[0]
    assert is_automorphism(swap12, L)
    with pytest.raises(ValueError):
        is_automorphism([[0] * 6 for _ in range(6)], L)


def test_strata_permutation_identity_and_errors():
    L, phi = swap_symmetric_lagrangian(0, GF(7))
    pts = [(0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 1, 0)]
    assert strata_permutation(_ident(GF(7)), L, pts) == (0, 1)
    assert strata_permutation(phi, L, pts) == (1, 0)
    with pytest.raises(IncompletePointListError):
        strata_permutation(phi, L, pts[:1])
    rng = random.Random(16)
    with pytest.raises(NotAutomorphismError):
        strata_permutation(rand_invertible(rng, GF(7), 6), L, pts)


def test_permutation_order_divides_projective_order():
    for field in (QQ, GF(7)):
        L, phi = swap_symmetric_lagrangian(1, field)
        perm = strata_permutation(phi, L, [_e6(field), tuple(field(int(i == 4)) for i in range(6))])
        assert projective_order(phi, field) % permutation_order(perm) == 0


def test_canonical_chart_moves_to_standard_position():
    rng = random.Random(17)
    L = _gm_lagrangian(0)
    phi = rand_invertible(rng, QQ, 6)
    L2 = apply_gl(phi, L)
    L3, psi = canonical_chart(L2)
    assert L3.is_canonical_chart() and is_lagrangian(L3.A)
    assert dual_stratum_dim(L3, L3.V5cov) == dual_stratum_dim(L, L.V5cov)


def test_json_roundtrip():
    L = _gm_lagrangian(5, GF(31))
    assert LagrangianData.from_json(L.to_json()) == L


def test_sextic_of_hyperplane_cube_is_a_sixfold_hyperplane():
    # every v in V5 meets Λ³V5 and no v outside does, so Y_A = 6 * {x6 = 0}
    S = sextic_polynomial(_hyperplane_datum(GF(7)))
    assert S.normalized().as_dict() == {(0, 0, 0, 0, 0, 6): 1}


def test_sextic_rejects_identically_zero_determinant():
    from epwgm.lagrangian import DegenerateLagrangianError
    with pytest.raises(DegenerateLagrangianError):
        sextic_polynomial(LagrangianData.canonical(F_of(e(6))))
