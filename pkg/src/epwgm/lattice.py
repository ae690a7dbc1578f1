"""Integral lattices: Smith normal form, discriminant forms, overlattices.

Vectors of L ⊗ Q are written in the coordinates of the given basis of L,
so the dual lattice is G^-1 Z^n for the Gram matrix G.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from math import gcd, prod

DEFAULT_BOUND = 10_000


class BoundExceededError(RuntimeError):
    pass


class OddLatticeError(ValueError):
    pass


def _det(M) -> int:
    from .subspace import bareiss_det
    return bareiss_det([list(r) for r in M]) if M else 1


@dataclass(frozen=True)
class IntegralLattice:
    gram: tuple

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in r) for r in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(r) != n for r in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise ValueError("Gram matrix must be symmetric")
        if n and _det(g) == 0:
            raise ValueError("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return _det(self.gram)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    def inner(self, x, y):
        G = self.gram
        return sum(x[i] * G[i][j] * y[j] for i in range(self.rank) for j in range(self.rank))

    def norm(self, x):
        return self.inner(x, x)

    def to_json(self) -> dict:
        return {"gram": [list(r) for r in self.gram]}

    @classmethod
    def from_json(cls, obj: dict) -> "IntegralLattice":
        g = obj["gram"]
        if not isinstance(g, list) or not all(isinstance(r, list) and all(isinstance(x, int) for x in r) for r in g):
            raise ValueError("gram must be a list of integer rows")
        return cls(tuple(tuple(r) for r in g))


# ---------------------------------------------------------------------------
# Smith normal form


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M):
    """Return (U, D, V) with U·M·V = D diagonal, d1 | d2 | ..., U and V unimodular."""
    A = [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in A:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    def add_row(dst, src, c):  # row dst += c * row src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        for R in A:
            R[dst] += c * R[src]
        for R in V:
            R[dst] += c * R[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // A[t][t]
                if q:
                    add_row(i, t, -q)
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // A[t][t]
                if q:
                    add_col(j, t, -q)
                if A[t][j]:
                    done = False
            if not done:
                continue
            # divisibility: the pivot must divide the remaining block
            bad = [(i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % A[t][t]]
            if bad:
                add_row(t, bad[0][0], 1)
                continue
            break
        if t < m and t < n and A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return U, A, V


def invariant_factors(M) -> list[int]:
    _, D, _ = smith_normal_form(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def _inverse_q(M):
    from .fields import QQ
    from .subspace import inverse
    return inverse([[Fraction(x) for x in r] for r in M], QQ)


def _unimodular_inverse(M):
    return [[int(x) for x in r] for r in _inverse_q(M)]


# ---------------------------------------------------------------------------
# discriminant forms


@dataclass(frozen=True)
class FiniteQuadraticForm:
    """The discriminant group L^∨/L = ⊕ Z/d_i with generators g_i in L ⊗ Q."""

    lattice: IntegralLattice
    orders: tuple
    generators: tuple  # rational vectors in lattice coordinates
    U: tuple = dc_field(repr=False, default=())  # from the SNF of the Gram matrix
    even: bool = True

    @property
    def order(self) -> int:
        return prod(self.orders)

    def elements(self):
        return list(product(*[range(d) for d in self.orders]))

    def vector(self, a) -> list:
        n = self.lattice.rank
        return [sum(Fraction(c) * g[k] for c, g in zip(a, self.generators)) for k in range(n)]

    def q(self, a) -> Fraction:
        """Quadratic value mod 2Z (defined for even lattices)."""
        if not self.even:
            raise OddLatticeError("q is only defined mod 2Z for even lattices")
        x = self.vector(a)
        return self.lattice.norm(x) % 2

    def b(self, a, c) -> Fraction:
        return self.lattice.inner(self.vector(a), self.vector(c)) % 1

    def add(self, a, c):
        return tuple((x + y) % d for x, y, d in zip(a, c, self.orders))

    def scale(self, k, a):
        return tuple((k * x) % d for x, d in zip(a, self.orders))

    def element_of(self, x) -> tuple:
        """Group coordinates of a dual vector x (rational, in lattice coordinates)."""
        G = self.lattice.gram
        n = self.lattice.rank
        y = [sum(G[i][j] * Fraction(x[j]) for j in range(n)) for i in range(n)]
        if any(c.denominator != 1 for c in y):
            raise ValueError("vector is not in the dual lattice")
        z = [sum(self.U[i][j] * int(y[j]) for j in range(n)) for i in range(n)]
        shift = n - len(self.orders)
        return tuple(z[shift + i] % d for i, d in enumerate(self.orders))

    def zero(self):
        return tuple(0 for _ in self.orders)


def discriminant_form(L: IntegralLattice) -> FiniteQuadraticForm:
    G = [list(r) for r in L.gram]
    n = L.rank
    U, D, V = smith_normal_form(G)
    # G = U^-1 D V^-1; the class of y ∈ Z^n is U y mod D, dual vector G^-1 y
    Ui = _unimodular_inverse(U) if n else []
    Gi = _inverse_q(G) if n else []
    orders, gens = [], []
    first = n
    for i in range(n):
        if abs(D[i][i]) > 1:
            first = i
            break
    for i in range(first, n):
        col = [Ui[r][i] for r in range(n)]
        gens.append(tuple(sum(Gi[k][r] * col[r] for r in range(n)) for k in range(n)))
        orders.append(abs(D[i][i]))
    return FiniteQuadraticForm(L, tuple(orders), tuple(gens), tuple(tuple(r) for r in U), L.is_even())


def _span(F: FiniteQuadraticForm, gens) -> frozenset:
    H = {F.zero()}
    frontier = list(H)
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                s = F.add(h, g)
                if s not in H:
                    H.add(s)
                    nxt.append(s)
        frontier = nxt
    return frozenset(H)


def _subgroup_key(H):
    return (len(H), sorted(H))


def isotropic_subgroups(F: FiniteQuadraticForm, bound: int = DEFAULT_BOUND) -> list[frozenset]:
    """All subgroups on which q vanishes mod 2Z, sorted by order then elements."""
    if not F.even:
        raise OddLatticeError("isotropic subgroups need an even lattice")
    if F.order > bound:
        raise BoundExceededError(f"discriminant group of order {F.order} exceeds bound {bound}")
    iso = [a for a in F.elements() if F.q(a) == 0]
    seen = {frozenset({F.zero()})}
    frontier = list(seen)
    while frontier:
        nxt = []
        for H in frontier:
            for g in iso:
                if g in H or any(F.b(g, h) for h in H):
                    continue
                H2 = _span(F, list(H) + [g])
                if H2 not in seen and all(F.q(h) == 0 for h in H2):
                    seen.add(H2)
                    nxt.append(H2)
            if len(seen) > bound:
                raise BoundExceededError("too many isotropic subgroups")
        frontier = nxt
    return sorted(seen, key=_subgroup_key)


def lattice_basis(rows) -> list[list[Fraction]]:
    """A Z-basis of the lattice spanned by rational row vectors."""
    den = 1
    for r in rows:
        for x in r:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    ints = [[int(Fraction(x) * den) for x in r] for r in rows]
    U, D, V = smith_normal_form(ints)
    Vi = _unimodular_inverse(V)
    n = len(ints[0])
    out = []
    for i in range(min(len(ints), n)):
        if D[i][i]:
            out.append([Fraction(D[i][i] * Vi[i][k], den) for k in range(n)])
    return out


@dataclass(frozen=True)
class Overlattice:
    lattice: IntegralLattice
    basis: tuple  # rows in coordinates of the original lattice
    subgroup: frozenset
    index: int


def overlattice_from_subgroup(L: IntegralLattice, F: FiniteQuadraticForm, H) -> Overlattice:
    n = L.rank
    rows = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    rows += [F.vector(h) for h in sorted(H)]
    B = lattice_basis(rows)
    G = [[L.inner(a, b) for b in B] for a in B]
    if any(Fraction(x).denominator != 1 for r in G for x in r):
        raise ValueError("subgroup is not isotropic for b")
    return Overlattice(IntegralLattice(tuple(tuple(int(x) for x in r) for r in G)),
                       tuple(tuple(r) for r in B), H, len(H))


def overlattices(L: IntegralLattice, bound: int = DEFAULT_BOUND) -> list[Overlattice]:
    """Even overlattices from the nontrivial isotropic subgroups (as sublattices of L ⊗ Q)."""
    if not L.is_even():
        raise OddLatticeError("overlattice enumeration needs an even lattice")
    F = discriminant_form(L)
    return [overlattice_from_subgroup(L, F, H) for H in isotropic_subgroups(F, bound) if len(H) > 1]


# ---------------------------------------------------------------------------
# bounded isometry search


def _box(n: int, r: int):
    return product(range(-r, r + 1), repeat=n)


def isometries(L: IntegralLattice, box: int = 6, limit: int = 10_000) -> list[tuple]:
    """Isometries of L whose matrices have entries in [-box, box].

    A matrix M (columns = images of the basis vectors) is returned as a tuple
    of rows.  The identity is always included.
    """
    n = L.rank
    G = L.gram
    by_norm = {}
    for v in _box(n, box):
        by_norm.setdefault(L.norm(v), []).append(v)
    cols = [by_norm.get(G[i][i], []) for i in range(n)]
    out = []

    def extend(chosen):
        k = len(chosen)
        if k == n:
            M = tuple(tuple(chosen[j][i] for j in range(n)) for i in range(n))
            if abs(_det(M)) == 1:
                out.append(M)
            return
        for v in cols[k]:
            if all(L.inner(v, chosen[j]) == G[k][j] for j in range(k)):
                extend(chosen + [v])
                if len(out) >= limit:
                    return

    extend([])
    return sorted(out)


def _act(M, x):
    n = len(M)
    return [sum(M[i][j] * x[j] for j in range(n)) for i in range(n)]


def overlattice_classes(L: IntegralLattice, bound: int = DEFAULT_BOUND, box: int = 6) -> list[Overlattice]:
    """Overlattices up to the isometries of L found by the bounded search.

    Subgroups related by a found isometry are merged; with an incomplete
    search this can only over-count, never under-count.
    """
    F = discriminant_form(L)
    subs = [H for H in isotropic_subgroups(F, bound) if len(H) > 1]
    isos = isometries(L, box)
    reps = []
    covered = set()
    for H in subs:
        if H in covered:
            continue
        reps.append(H)
        for M in isos:
            covered.add(frozenset(F.element_of(_act(M, F.vector(h))) for h in H))
    return [overlattice_from_subgroup(L, F, H) for H in reps]


def find_isotropic_vector(L: IntegralLattice, box: int = 10):
    for r in range(1, box + 1):
        for v in _box(L.rank, r):
            if max(map(abs, v)) == r and L.norm(v) == 0:
                return v
    return None


def is_isometric_to_U(L: IntegralLattice, box: int = 10) -> bool:
    """Certified by: even, rank 2, det -1, and an isotropic vector exists."""
    return (L.rank == 2 and L.is_even() and L.det == -1
            and find_isotropic_vector(L, box) is not None)


# ---------------------------------------------------------------------------
# primitive sublattices and the divisors D_{x,y}


def primitive_closure(sub) -> list[list[int]]:
    """Saturation (sub ⊗ Q) ∩ Z^n of the row lattice ``sub``."""
    rows = [list(map(int, r)) for r in sub]
    U, D, V = smith_normal_form(rows)
    r = len(rows)
    diag = [D[i][i] for i in range(min(r, len(rows[0])))]
    if len(diag) < r or any(d == 0 for d in diag):
        raise ValueError("rows are linearly dependent")
    Vi = _unimodular_inverse(V)
    return [Vi[i] for i in range(r)]


def saturation_index(sub) -> int:
    """[sat(sub) : sub], the product of the invariant factors."""
    rows = [list(map(int, r)) for r in sub]
    f = invariant_factors(rows)
    if len(f) < len(rows) or 0 in f:
        raise ValueError("rows are linearly dependent")
    return prod(f)


def is_primitive(sub) -> bool:
    return saturation_index(sub) == 1


def divisor_membership(ns: IntegralLattice, H_index: int, x: int, y: int, bound: int):
    """Search D with (H, D) = x, (D, D) = y and ZH + ZD primitive, |coefficients| <= bound.

    Returns D or None; None only means nothing was found in the box.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    n = ns.rank
    H = [int(i == H_index) for i in range(n)]
    if ns.norm(H) != 10:
        raise ValueError("the distinguished vector must have square 10")
    if n < 2:
        return None
    for r in range(1, bound + 1):
        for D in _box(n, r):
            if max(map(abs, D)) != r:
                continue
            if ns.inner(H, D) != x or ns.norm(D) != y:
                continue
            try:
                if is_primitive([H, list(D)]):
                    return list(D)
            except ValueError:
                continue
    return None
