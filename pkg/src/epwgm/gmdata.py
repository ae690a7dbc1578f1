"""Gushel–Mukai data and the two-way conversion with Lagrangian data.

A GM datum is stored as a subspace W of Λ²V5 (sorted-pair coordinates) and
the symmetric matrix of q(e6) in the canonical basis of W.  For v in V5 the
quadric q(v) is the Pfaffian quadric P_v restricted to W and is never
stored.

Convention for the e6 part: if eta + e6^w lies in A then
q(e6)(w, u) = -vol5(eta ^ u) for u in W.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exterior import (
    V5,
    SymBilinearForm,
    assemble_vec,
    basis_index,
    dual_pairing_matrix,
    lambda3_vec,
    pfaffian_gram,
    v5_part_vec,
)
from .fields import QQ, Field, PrimeField, field_from_json
from .lagrangian import (
    ChartError,
    InvariantError,
    LagrangianData,
    coords,
    is_lagrangian,
    stratum_dim,
)
from .subspace import (
    Subspace,
    canonicalize,
    intersect,
    inverse,
    matmul,
    nullspace,
    rank,
    solve,
    transpose,
)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class QuadricDiagnostics:
    corank: int
    kernel: Subspace  # inside Λ²V5, contained in W

    def __post_init__(self):
        if self.kernel.dim != self.corank:
            raise InvariantError("kernel dimension differs from corank")


@dataclass(frozen=True)
class GMData:
    W: Subspace
    qx: tuple  # symmetric dim W x dim W matrix of q(e6) in the basis W.basis

    def __post_init__(self):
        if self.W.ambient != 10:
            raise InvariantError("W must be a subspace of the 10-dimensional Λ²V5")
        if not 6 <= self.W.dim <= 10:
            raise InvariantError(f"dim W = {self.W.dim} outside 6..10")
        d = self.W.dim
        if len(self.qx) != d or any(len(r) != d for r in self.qx):
            raise InvariantError("q(e6) must be a dim W x dim W matrix")
        f = self.field
        if any(not f.is_zero(self.qx[i][j] - self.qx[j][i]) for i in range(d) for j in range(d)):
            raise InvariantError("q(e6) is not symmetric")

    @property
    def field(self) -> Field:
        return self.W.field

    @property
    def n(self) -> int:
        """Dimension of the associated GM variety."""
        return self.W.dim - 5

    def pfaffian_on_W(self, u) -> list[list]:
        f = self.field
        P = pfaffian_gram([f(c) for c in u], f)
        return SymBilinearForm(tuple(tuple(r) for r in P), f).restrict(self.W.rows()).gram

    def qmap(self, v) -> SymBilinearForm:
        """q(v) on W, in W-basis coordinates, for v in V6."""
        f = self.field
        v = coords(v, 6, f)
        P = self.pfaffian_on_W(v[:5])
        d = self.W.dim
        G = tuple(tuple(f.norm(P[i][j] + v[5] * self.qx[i][j]) for j in range(d)) for i in range(d))
        return SymBilinearForm(G, f)

    def to_json(self) -> dict:
        f = self.field
        return {"schema_version": SCHEMA_VERSION, "kind": "gm", "field": f.to_json(),
                "W": self.W.to_json(),
                "qx": [[f.encode(c) for c in r] for r in self.qx]}

    @classmethod
    def from_json(cls, obj: dict) -> "GMData":
        f = field_from_json(obj["field"])
        W = Subspace.from_json(obj["W"], f)
        if W.ambient != 10:
            raise InvariantError("W must live in Λ²V5")
        raw = [list(map(f.decode, r)) for r in obj["qx"]]
        given = [list(r) for r in obj["W"]["basis"]]
        if [[f.decode(c) for c in r] for r in given] != W.rows():
            # basis in the file is not canonical: rewrite q(e6) in the canonical basis
            raw = _change_basis(raw, [[f.decode(c) for c in r] for r in given], W, f)
        return cls(W, tuple(tuple(r) for r in raw))


def _change_basis(q, old_rows, W: Subspace, field: Field):
    # old_rows = M . W.rows, so q_new = M^-1 q_old M^-T
    if len(old_rows) != W.dim:
        raise InvariantError("W basis in file is not linearly independent")
    M = [W.coordinates(r) for r in old_rows]
    Mi = inverse(M, field)
    return matmul(matmul(Mi, q, field), transpose(Mi), field)


def make_gm(W_rows, qx, field: Field = QQ) -> GMData:
    """GMData from any basis of W and q(e6) in that basis."""
    rows = [[field(c) for c in r] for r in W_rows]
    W = canonicalize(rows, field, 10)
    q = [[field(c) for c in r] for r in qx]
    if len(rows) != W.dim:
        raise InvariantError("W rows are linearly dependent")
    if rows != W.rows():
        q = _change_basis(q, rows, W, field)
    return GMData(W, tuple(tuple(r) for r in q))


# ---------------------------------------------------------------------------
# conversions


def lagrangian_to_gm(L: LagrangianData) -> GMData:
    """W = λ3(A); q(e6)(w, u) = -vol5(eta ^ u) for a lift eta + e6^w in A."""
    if not L.is_canonical_chart():
        raise ChartError("datum is not in the canonical chart; apply canonical_chart first")
    f = L.field
    A_rows = [list(a) for a in L.A.basis]
    lam = [lambda3_vec(a, f) for a in A_rows]
    W = canonicalize(lam, f, 10)
    if not 6 <= W.dim:
        raise InvariantError(f"dim W = {W.dim}: A meets Λ³V5 in more than 4 dimensions")
    D = dual_pairing_matrix(f)
    lamT = transpose(lam)
    q = []
    for w in W.rows():
        y = solve(lamT, w, f)
        lift = [f.norm(sum(y[k] * A_rows[k][j] for k in range(10))) for j in range(20)]
        eta = v5_part_vec(lift, f)
        # covector u -> vol5(eta ^ u) on Λ²V5
        cov = [f.norm(sum(eta[i] * D[i][j] for i in range(10))) for j in range(10)]
        q.append([f.norm(-sum(c * x for c, x in zip(cov, u))) for u in W.rows()])
    return GMData(W, tuple(tuple(r) for r in q))


def gm_to_lagrangian(G: GMData) -> LagrangianData:
    """A(Z) = W-perp (inside Λ³V5) plus the graph {eta_w + e6^w}."""
    f = G.field
    D = dual_pairing_matrix(f)
    Wr = G.W.rows()
    # vol5(eta ^ u) for eta in coordinates: (D u)_i
    DW = [[f.norm(sum(D[i][j] * u[j] for j in range(10))) for i in range(10)] for u in Wr]
    rows = []
    for xi in nullspace(DW, f, 10):
        rows.append(assemble_vec(xi, [f(0)] * 10, f))
    for a, w in enumerate(Wr):
        rhs = [f.norm(-G.qx[a][b]) for b in range(G.W.dim)]
        eta = solve(DW, rhs, f)
        if eta is None:
            raise InvariantError("no lift solves the pairing equations")
        rows.append(assemble_vec(eta, w, f))
    A = canonicalize(rows, f, 20)
    e6 = tuple(f(int(i == 5)) for i in range(6))
    L = LagrangianData(A, e6, e6)
    if A.dim != 10 or not is_lagrangian(A):
        raise InvariantError("constructed A is not Lagrangian")
    return L


# ---------------------------------------------------------------------------
# quadrics, lines and pencils


def kernel_of_pfaffian(v, field: Field) -> Subspace:
    """ker P_v = v ^ V5 inside Λ²V5."""
    idx = basis_index(V5, 2)
    rows = []
    for k in range(5):
        r = [field(0)] * 10
        for i in range(5):
            if i == k or field.is_zero(v[i]):
                continue
            if i < k:
                r[idx[(i, k)]] = field.norm(r[idx[(i, k)]] + v[i])
            else:
                r[idx[(k, i)]] = field.norm(r[idx[(k, i)]] - v[i])
        rows.append(r)
    return canonicalize(rows, field, 10)


def _v5_vector(G: GMData, v) -> list:
    f = G.field
    if hasattr(v, "space") and v.space == V5:
        v = list(v.coeffs)
    v = [f(c) for c in v]
    if len(v) == 6:
        if not f.is_zero(v[5]):
            raise ValueError("v does not lie in V5")
        v = v[:5]
    if len(v) != 5:
        raise ValueError("expected a vector of V5")
    if all(f.is_zero(c) for c in v):
        raise ValueError("zero vector")
    return v


def quadric_diagnostics(G: GMData, v) -> QuadricDiagnostics:
    f = G.field
    v = coords(v, 6, f)
    if all(f.is_zero(c) for c in v):
        raise ValueError("zero vector")
    q = G.qmap(v)
    ker = nullspace([list(r) for r in q.gram], f, G.W.dim)
    Wr = G.W.rows()
    rows = [[f.norm(sum(y[k] * Wr[k][j] for k in range(len(Wr)))) for j in range(10)] for y in ker]
    K = canonicalize(rows, f, 10)
    return QuadricDiagnostics(len(ker), K)


def _need_surface(G: GMData):
    if G.W.dim != 7:
        raise InvariantError(f"expected a GM surface (dim W = 7), got dim W = {G.W.dim}")


def hull_kernel(G: GMData, v) -> Subspace:
    """ker(P_v) ∩ W."""
    v = _v5_vector(G, v)
    return intersect(kernel_of_pfaffian(v, G.field), G.W)


def hull_line_test(G: GMData, v) -> bool:
    """The hull-only clause: dim(ker P_v ∩ W) = 2."""
    _need_surface(G)
    return hull_kernel(G, v).dim == 2


def _qx_on(G: GMData, rows) -> list[list]:
    f = G.field
    C = [G.W.coordinates(r) for r in rows]
    d = G.W.dim
    return [[f.norm(sum(a[i] * G.qx[i][j] * b[j] for i in range(d) for j in range(d)))
             for b in C] for a in C]


def line_test(G: GMData, v) -> bool:
    """dim(ker P_v ∩ W) = 2 and q(e6) vanishes identically on it."""
    _need_surface(G)
    K = hull_kernel(G, v)
    if K.dim != 2:
        return False
    f = G.field
    return all(f.is_zero(c) for r in _qx_on(G, K.rows()) for c in r)


def pencil_flag(G: GMData, v) -> bool:
    """corank q(v) = 3 for v outside V5."""
    _need_surface(G)
    f = G.field
    v = coords(v, 6, f)
    if f.is_zero(v[5]):
        raise ValueError("v lies in V5")
    return quadric_diagnostics(G, v).corank == 3


def plucker_point(G: GMData) -> tuple:
    f = G.field
    return tuple(f(int(i == 5)) for i in range(6))


# ---------------------------------------------------------------------------
# generators


def _rand_entry(rng: random.Random, field: Field, box: int = 3):
    if isinstance(field, PrimeField):
        return rng.randrange(field.p)
    return Fraction(rng.randint(-box, box))


def _random_full_rank(rng, field: Field, r: int, n: int, fixed=()):
    while True:
        rows = [list(map(field, x)) for x in fixed]
        rows += [[_rand_entry(rng, field) for _ in range(n)] for _ in range(r - len(fixed))]
        if rank(rows, field) == r:
            return rows


def _random_symmetric(rng, field: Field, d: int) -> list[list]:
    q = [[field(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            q[i][j] = q[j][i] = field(_rand_entry(rng, field))
    return q


def random_gm(seed: int, field: Field = QQ, dim_w: int = 7) -> GMData:
    """Pseudo-random GM datum; the same seed always gives the same datum."""
    rng = random.Random(seed)
    rows = _random_full_rank(rng, field, dim_w, 10)
    W = canonicalize(rows, field, 10)
    q = _random_symmetric(rng, field, dim_w)
    return GMData(W, tuple(tuple(r) for r in q))


def random_gm_surface(seed: int, field: Field = QQ) -> GMData:
    return random_gm(seed, field, 7)


def line_instance(seed: int, field: Field = QQ) -> GMData:
    """Surface datum with W ⊃ e1 ^ span(e2, e3) and q(e6) zero there: a line at v = e1."""
    rng = random.Random(seed)
    idx = basis_index(V5, 2)
    while True:
        fixed = []
        for pair in ((0, 1), (0, 2)):
            r = [0] * 10
            r[idx[pair]] = 1
            fixed.append(r)
        rows = _random_full_rank(rng, field, 7, 10, fixed)
        q = _random_symmetric(rng, field, 7)
        for i in range(2):
            for j in range(2):
                q[i][j] = field(0)
        G = make_gm(rows, q, field)
        if hull_kernel(G, [1, 0, 0, 0, 0]).dim == 2:
            return G


def pencil_instance(seed: int, field: Field = QQ) -> GMData:
    """Surface datum whose q(e6) has rank 4 (a 3-dimensional radical)."""
    rng = random.Random(seed)
    rows = _random_full_rank(rng, field, 7, 10)
    W = canonicalize(rows, field, 10)
    while True:
        M = [[_rand_entry(rng, field) for _ in range(7)] for _ in range(4)]
        s = [field(rng.choice((1, 2, 3, 5))) for _ in range(4)]
        q = [[field.norm(sum(M[k][i] * s[k] * M[k][j] for k in range(4))) for j in range(7)]
             for i in range(7)]
        if rank(q, field) == 4:
            return GMData(W, tuple(tuple(r) for r in q))


# ---------------------------------------------------------------------------
# self-test of the sign convention


def check_sign_convention(field: Field = QQ, seed: int = 0) -> None:
    """corank q(e6 + u) must equal dim(F_{e6+u} ∩ A(Z)); raises if the convention is off.

    Uses a datum with a rank-4 q(e6) so that the strata along e6 + t*u are not all 0.
    """
    G = pencil_instance(seed, field)
    L = gm_to_lagrangian(G)
    rng = random.Random(seed + 1)
    for _ in range(6):
        u = [_rand_entry(rng, field) for _ in range(5)]
        v = [field(c) for c in u] + [field(1)]
        c = quadric_diagnostics(G, v).corank
        s = stratum_dim(L, v)
        if c != s:
            raise AssertionError(f"sign convention broken: corank {c} vs stratum {s} at {v}")
    if lagrangian_to_gm(L) != G:
        raise AssertionError("conversions are not mutually inverse")


def symmetric_gm_surface(seed: int, field: Field = QQ) -> tuple[GMData, list[list]]:
    """Surface datum invariant under phi = (e1 e2)(e3 e4), with e5 and e6 fixed.

    W is spanned by 3 vectors of the +1 eigenspace of Λ²phi and 4 of the -1
    eigenspace, and q(e6) is block diagonal in that basis.  Since phi has
    determinant 1 on V5, Λ³phi preserves A(Z).  Returns the datum and phi.
    """
    if field.characteristic == 2:
        raise ValueError("needs characteristic different from 2")
    rng = random.Random(seed)
    idx = basis_index(V5, 2)

    def vec(*terms):
        r = [field(0)] * 10
        for s, pair in terms:
            r[idx[pair]] = field(s)
        return r

    plus = [vec((1, (0, 2)), (1, (1, 3))), vec((1, (0, 3)), (1, (1, 2))),
            vec((1, (0, 4)), (1, (1, 4))), vec((1, (2, 4)), (1, (3, 4)))]
    minus = [vec((1, (0, 1))), vec((1, (2, 3))),
             vec((1, (0, 2)), (-1, (1, 3))), vec((1, (0, 3)), (-1, (1, 2))),
             vec((1, (0, 4)), (-1, (1, 4))), vec((1, (2, 4)), (-1, (3, 4)))]

    def combos(space, k):
        while True:
            C = [[_rand_entry(rng, field) for _ in space] for _ in range(k)]
            rows = [[field.norm(sum(c * v[j] for c, v in zip(row, space))) for j in range(10)] for row in C]
            if rank(rows, field) == k:
                return rows

    rows = combos(plus, 3) + combos(minus, 4)
    qp = _random_symmetric(rng, field, 3)
    qm = _random_symmetric(rng, field, 4)
    q = [[field(0)] * 7 for _ in range(7)]
    for i in range(3):
        for j in range(3):
            q[i][j] = qp[i][j]
    for i in range(4):
        for j in range(4):
            q[3 + i][3 + j] = qm[i][j]
    phi = [[field(0)] * 6 for _ in range(6)]
    for a, b in ((0, 1), (1, 0), (2, 3), (3, 2), (4, 4), (5, 5)):
        phi[a][b] = field(1)
    return make_gm(rows, q, field), phi
