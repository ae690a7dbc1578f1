import random

import pytest

from epwgm.exterior import V5, basis, e, volume5, wedge, wedge_all, Multivector
from epwgm.fields import QQ, GF
from epwgm.gmdata import (
    GMData, check_sign_convention, gm_to_lagrangian, hull_kernel, hull_line_test, lagrangian_to_gm,
    line_instance, line_test, make_gm, pencil_flag, pencil_instance, plucker_point,
    quadric_diagnostics, random_gm, random_gm_surface, symmetric_gm_surface,
)
from epwgm.lagrangian import (
    ChartError, InvariantError, apply_gl, dual_stratum_dim, is_automorphism, is_lagrangian,
    stratum_dim,
)
from epwgm.exterior import lambda3_vec, v5_part_vec
from conftest import rand_invertible, rand_vec

FIELDS = [QQ, GF(5), GF(31)]
IDS = ["Q", "F5", "F31"]


def _pair_mv(w, field):
    return Multivector.from_vector(V5, 2, w, field)


@pytest.mark.parametrize("field", FIELDS, ids=IDS)
def test_roundtrip_and_dimensions(field):
    for seed in range(25):
        G = random_gm_surface(seed, field)
        L = gm_to_lagrangian(G)
        assert is_lagrangian(L.A)
        assert dual_stratum_dim(L, L.V5cov) == 10 - G.W.dim == 3
        assert lagrangian_to_gm(L) == G


@pytest.mark.parametrize("dim_w", [6, 8, 9, 10])
def test_roundtrip_other_dimensions(dim_w):
    G = random_gm(dim_w, GF(7), dim_w)
    L = gm_to_lagrangian(G)
    assert dual_stratum_dim(L, L.V5cov) == 10 - dim_w
    assert lagrangian_to_gm(L) == G


@pytest.mark.parametrize("field", FIELDS, ids=IDS)
def test_qmap_on_v5_is_the_volume_pairing(field):
    G = random_gm_surface(3, field)
    Wr = G.W.rows()
    for i in range(1, 6):
        q = G.qmap([field(int(k == i - 1)) for k in range(6)])
        for a, w1 in enumerate(Wr):
            for b, w2 in enumerate(Wr):
                vol = volume5(wedge_all(e(i, space=V5, field=field), _pair_mv(w1, field), _pair_mv(w2, field)))
                assert q.gram[a][b] == vol


def test_qmap_of_e1_is_restricted_pfaffian():
    from epwgm.exterior import pfaffian_form
    G = random_gm_surface(0, QQ)
    assert G.qmap([1, 0, 0, 0, 0, 0]) == pfaffian_form(e(1, space=V5)).restrict(G.W.rows())


@pytest.mark.parametrize("field", [QQ, GF(7)], ids=["Q", "F7"])
def test_qx_is_independent_of_the_lift(field):
    rng = random.Random(1)
    G = random_gm_surface(5, field)
    L = gm_to_lagrangian(G)
    A = L.A.rows()
    from epwgm.subspace import nullspace, solve, transpose
    lam = [lambda3_vec(a, field) for a in A]
    kernel = nullspace(transpose(lam), field, 10)  # combinations of A rows inside Λ³V5
    assert len(kernel) == 3
    for a, w in enumerate(G.W.rows()):
        y = solve(transpose(lam), w, field)
        z = rand_vec(rng, field, 3)
        y2 = [field.norm(y[k] + sum(z[t] * kernel[t][k] for t in range(3))) for k in range(10)]
        lifts = []
        for coeffs in (y, y2):
            vec = [field.norm(sum(c * A[k][j] for k, c in enumerate(coeffs))) for j in range(20)]
            lifts.append(Multivector.from_vector(V5, 3, v5_part_vec(vec, field), field))
        assert lifts[0] != lifts[1]
        for b, u in enumerate(G.W.rows()):
            vals = {volume5(wedge(eta, _pair_mv(u, field))) for eta in lifts}
            assert vals == {field.norm(-G.qx[a][b])}


def test_isotropic_vector_of_qx_iff_lift_wedge_vanishes():
    # q(e6)(w, w) = 0 exactly when eta ^ w = 0 for a lift eta + e6^w
    G = line_instance(0, QQ)
    L = gm_to_lagrangian(G)
    idx = {P: i for i, P in enumerate(basis(V5, 2))}
    w = [0] * 10
    w[idx[(0, 1)]] = 1
    a = G.W.coordinates(w)
    assert sum(a[i] * G.qx[i][j] * a[j] for i in range(7) for j in range(7)) == 0
    for row in L.A.rows():
        if lambda3_vec(row, QQ) == w:
            eta = Multivector.from_vector(V5, 3, v5_part_vec(row, QQ), QQ)
            assert volume5(wedge(eta, _pair_mv(w, QQ))) == 0


def test_lagrangian_to_gm_needs_canonical_chart():
    L = gm_to_lagrangian(random_gm_surface(0, QQ))
    phi = rand_invertible(random.Random(2), QQ, 6)
    with pytest.raises(ChartError):
        lagrangian_to_gm(apply_gl(phi, L))


def test_generic_quadric_coranks():
    G = random_gm_surface(1, GF(7))
    rng = random.Random(3)
    for _ in range(30):
        v = rand_vec(rng, GF(7), 5) + [0]
        if not any(v):
            continue
        d = quadric_diagnostics(G, v)
        assert 1 <= d.corank <= 2
        assert d.kernel == hull_kernel(G, v[:5])


def test_generic_point_in_v5_has_corank_one_over_q():
    G = random_gm_surface(2, QQ)
    assert quadric_diagnostics(G, [1, 2, 3, -1, 4, 0]).corank == 1


def test_pencil_instance():
    for field in (QQ, GF(7)):
        G = pencil_instance(0, field)
        e6 = [field(int(i == 5)) for i in range(6)]
        assert quadric_diagnostics(G, e6).corank == 3
        assert pencil_flag(G, e6)
        assert stratum_dim(gm_to_lagrangian(G), e6) == 3
        with pytest.raises(ValueError):
            pencil_flag(G, [1, 0, 0, 0, 0, 0])


def test_generic_instance_has_no_pencil_at_e6():
    assert not pencil_flag(random_gm_surface(0, QQ), [0, 0, 0, 0, 0, 1])


def test_line_instance_both_clauses():
    for field in (QQ, GF(7)):
        G = line_instance(0, field)
        v = [1, 0, 0, 0, 0]
        K = hull_kernel(G, v)
        assert K.dim == 2 and hull_line_test(G, v)
        # q(e6) vanishes on K, checked directly in W coordinates
        C = [G.W.coordinates(r) for r in K.rows()]
        assert all(field.is_zero(sum(a[i] * G.qx[i][j] * b[j] for i in range(7) for j in range(7)))
                   for a in C for b in C)
        assert line_test(G, v)
        assert stratum_dim(gm_to_lagrangian(G), v + [0]) == 3


def test_line_test_rejects_wrong_dimension():
    G = random_gm(0, QQ, 8)
    with pytest.raises(InvariantError):
        line_test(G, [1, 0, 0, 0, 0])


def test_plucker_point():
    G = random_gm_surface(4, QQ)
    L = gm_to_lagrangian(G)
    c = plucker_point(G)
    assert c == (0, 0, 0, 0, 0, 1)
    assert dual_stratum_dim(L, c) == 10 - G.W.dim


def test_symmetric_surface_is_invariant():
    for field in (QQ, GF(7)):
        G, phi = symmetric_gm_surface(0, field)
        L = gm_to_lagrangian(G)
        assert is_automorphism(phi, L)


def test_generators_are_deterministic():
    assert random_gm_surface(9, QQ) == random_gm_surface(9, QQ)
    assert random_gm_surface(9, QQ) != random_gm_surface(10, QQ)


@pytest.mark.parametrize("field", [QQ, GF(7), GF(11)], ids=["Q", "F7", "F11"])
def test_sign_convention_self_test(field):
    check_sign_convention(field, seed=0)


def test_sign_convention_self_test_is_not_vacuous():
    # on points of the sextic, negating q(e6) breaks corank q(v) = stratum of v
    from epwgm.census import projective_points, strata_of_points
    F = GF(7)
    G = pencil_instance(0, F)
    right = gm_to_lagrangian(G)
    flipped = gm_to_lagrangian(GMData(G.W, tuple(tuple(F.norm(-c) for c in r) for r in G.qx)))
    P = projective_points(6, 7)
    P = P[P[:, 5] == 1]
    s = strata_of_points(right, P)
    hits = [list(map(int, p)) for p in P[s >= 1][:40]]
    assert hits
    agree = [quadric_diagnostics(G, v).corank == stratum_dim(right, v) for v in hits]
    wrong = [quadric_diagnostics(G, v).corank == stratum_dim(flipped, v) for v in hits]
    assert all(agree)
    assert not all(wrong)


def test_json_roundtrip_with_non_canonical_basis():
    G = random_gm_surface(6, GF(31))
    assert GMData.from_json(G.to_json()) == G
    rng = random.Random(4)
    M = rand_invertible(rng, GF(31), 7)
    from epwgm.subspace import matmul, transpose
    rows = matmul(M, G.W.rows(), GF(31))
    q = matmul(matmul(M, [list(r) for r in G.qx], GF(31)), transpose(M), GF(31))
    assert make_gm(rows, q, GF(31)) == G
    obj = G.to_json()
    obj["W"]["basis"] = [[GF(31).encode(c) for c in r] for r in rows]
    obj["qx"] = [[GF(31).encode(c) for c in r] for r in q]
    assert GMData.from_json(obj) == G


def test_invalid_gm_data():
    G = random_gm_surface(0, QQ)
    with pytest.raises(InvariantError):
        GMData(G.W, tuple(tuple(r) for r in G.qx[:6]))
    bad = [list(r) for r in G.qx]
    bad[0][1] += 1
    with pytest.raises(InvariantError):
        GMData(G.W, tuple(tuple(r) for r in bad))
