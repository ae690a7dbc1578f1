"""Exterior algebra of V6 = span(e1..e6) and of the hyperplane V5 = span(e1..e5).

Basis vectors of the k-th exterior power are the sorted k-subsets of
``range(dim)`` in lexicographic order (indices are 0-based internally;
``e(1)`` is the first basis vector).  Volume forms are normalised by
vol(e1^...^e6) = 1 and vol5(e1^...^e5) = 1.

The canonical chart is V5 = span(e1..e5) with distinguished vector x = e6.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from .fields import QQ, Field, field_from_json, same_field
from .subspace import Subspace, canonicalize, nullspace, rank

V5 = 5
V6 = 6


class DegreeError(ValueError):
    pass


class SpaceMismatchError(ValueError):
    pass


@lru_cache(maxsize=None)
def basis(dim: int, k: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(dim), k))


@lru_cache(maxsize=None)
def basis_index(dim: int, k: int) -> dict:
    return {I: n for n, I in enumerate(basis(dim, k))}


def merge_sign(I, J) -> int:
    """Sign of the permutation sorting the concatenation I + J (0 if they meet)."""
    inv = 0
    for i in I:
        for j in J:
            if i == j:
                return 0
            if i > j:
                inv += 1
    return -1 if inv & 1 else 1


def sort_sign(seq) -> tuple[int, tuple]:
    """Sign and sorted tuple for an arbitrary index list (sign 0 on repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0, ()
    inv = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return (-1 if inv & 1 else 1), tuple(sorted(seq))


@dataclass(frozen=True)
class Multivector:
    space: int
    degree: int
    coeffs: tuple
    field: Field = QQ

    def __post_init__(self):
        if self.space not in (V5, V6):
            raise ValueError(f"space must be 5 or 6, got {self.space}")
        if not 0 <= self.degree <= self.space:
            raise DegreeError(f"degree {self.degree} out of range for V{self.space}")
        if len(self.coeffs) != comb(self.space, self.degree):
            raise ValueError("coefficient vector has the wrong length")

    @classmethod
    def zero(cls, space: int, degree: int, field: Field = QQ) -> "Multivector":
        return cls(space, degree, (field(0),) * comb(space, degree), field)

    @classmethod
    def from_terms(cls, space: int, degree: int, terms: dict, field: Field = QQ) -> "Multivector":
        """``terms`` maps index tuples (any order, 0-based) to scalars."""
        c = [field(0)] * comb(space, degree)
        idx = basis_index(space, degree)
        for I, a in terms.items():
            if len(I) != degree:
                raise DegreeError("term has the wrong degree")
            s, J = sort_sign(I)
            if s == 0:
                continue
            if J and J[-1] >= space:
                raise SpaceMismatchError(f"index {J[-1] + 1} not in V{space}")
            c[idx[J]] = field.norm(c[idx[J]] + s * field(a))
        return cls(space, degree, tuple(c), field)

    @classmethod
    def from_vector(cls, space: int, degree: int, vec, field: Field = QQ) -> "Multivector":
        return cls(space, degree, tuple(field(x) for x in vec), field)

    def terms(self):
        for I, a in zip(basis(self.space, self.degree), self.coeffs):
            if not self.field.is_zero(a):
                yield I, a

    def is_zero(self) -> bool:
        return all(self.field.is_zero(a) for a in self.coeffs)

    def _check(self, other: "Multivector"):
        if self.space != other.space:
            raise SpaceMismatchError(f"V{self.space} vs V{other.space}")
        same_field(self.field, other.field)

    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree:
            raise DegreeError("cannot add multivectors of different degree")
        f = self.field
        return Multivector(self.space, self.degree,
                           tuple(f.norm(a + b) for a, b in zip(self.coeffs, other.coeffs)), f)

    def __neg__(self):
        f = self.field
        return Multivector(self.space, self.degree, tuple(f.norm(-a) for a in self.coeffs), f)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Multivector":
        f = self.field
        c = f(c)
        return Multivector(self.space, self.degree, tuple(f.norm(c * a) for a in self.coeffs), f)

    def __rmul__(self, c):
        return self.scale(c)

    def __xor__(self, other):
        return wedge(self, other)

    def to_json(self) -> dict:
        return {"space": f"V{self.space}", "degree": self.degree, "field": self.field.to_json(),
                "coeffs": [self.field.encode(a) for a in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "Multivector":
        field = field_from_json(obj["field"])
        space = {"V5": V5, "V6": V6}[obj["space"]]
        return cls(space, int(obj["degree"]), tuple(field.decode(a) for a in obj["coeffs"]), field)


def e(*indices: int, space: int = V6, field: Field = QQ) -> Multivector:
    """Basis multivector e_{i1}^...^e_{ik} from 1-based indices."""
    return Multivector.from_terms(space, len(indices), {tuple(i - 1 for i in indices): 1}, field)


def vector(coords, space: int | None = None, field: Field = QQ) -> Multivector:
    coords = list(coords)
    return Multivector.from_vector(space or len(coords), 1, coords, field)


def wedge(a: Multivector, b: Multivector) -> Multivector:
    a._check(b)
    k = a.degree + b.degree
    if k > a.space:
        raise DegreeError(f"degree {k} exceeds dimension {a.space}")
    f = a.field
    idx = basis_index(a.space, k)
    out = [0] * comb(a.space, k)
    for I, x in a.terms():
        for J, y in b.terms():
            s = merge_sign(I, J)
            if s:
                K = tuple(sorted(I + J))
                out[idx[K]] += s * x * y
    return Multivector(a.space, k, tuple(f.norm(f(0) + c) for c in out), f)


def wedge_all(*vs: Multivector) -> Multivector:
    out = vs[0]
    for v in vs[1:]:
        out = wedge(out, v)
    return out


def volume6(a: Multivector):
    if a.space != V6 or a.degree != 6:
        raise DegreeError("volume6 needs a 6-vector over V6")
    return a.coeffs[0]


def volume5(a: Multivector):
    if a.space != V5 or a.degree != 5:
        raise DegreeError("volume5 needs a 5-vector over V5")
    return a.coeffs[0]


def _need(a: Multivector, space: int, degree: int, what: str):
    if a.space != space or a.degree != degree:
        raise DegreeError(f"{what}: expected degree {degree} over V{space}, "
                          f"got degree {a.degree} over V{a.space}")


# ---------------------------------------------------------------------------
# symplectic form on the third exterior power of V6


@lru_cache(maxsize=None)
def _omega_pattern() -> tuple:
    # pattern[i] = (j, sign): the only nonzero entry of row i
    idx = basis_index(V6, 3)
    out = []
    for I in basis(V6, 3):
        J = tuple(k for k in range(V6) if k not in I)
        out.append((idx[J], merge_sign(I, J)))
    return tuple(out)


def symplectic_gram(field: Field = QQ) -> list[list]:
    """20x20 Gram matrix of omega(a, b) = vol(a ^ b) on sorted triples."""
    G = [[field(0)] * 20 for _ in range(20)]
    for i, (j, s) in enumerate(_omega_pattern()):
        G[i][j] = field(s)
    return G


def omega_vec(a, b, field: Field):
    """omega on raw 20-vectors of coordinates."""
    return field.norm(sum(s * a[i] * b[j] for i, (j, s) in enumerate(_omega_pattern())))


def omega_apply(a, field: Field) -> list:
    """The covector omega(a, -) as a 20-vector."""
    out = [field(0)] * 20
    for i, (j, s) in enumerate(_omega_pattern()):
        out[j] = field.norm(out[j] + s * a[i])
    return out


def symplectic_form(a: Multivector, b: Multivector):
    _need(a, V6, 3, "symplectic_form")
    _need(b, V6, 3, "symplectic_form")
    same_field(a.field, b.field)
    return omega_vec(a.coeffs, b.coeffs, a.field)


# ---------------------------------------------------------------------------
# the splitting Λ³V6 = Λ³V5 ⊕ e6 ∧ Λ²V5


@lru_cache(maxsize=None)
def _split_maps():
    idx6 = basis_index(V6, 3)
    pairs = basis(V5, 2)
    triples5 = basis(V5, 3)
    # e_i^e_j^e6 sits at idx6[(i, j, 5)]; no sign since 5 is the largest index
    lam = [idx6[(i, j, 5)] for (i, j) in pairs]
    inner = [idx6[T] for T in triples5]
    return tuple(lam), tuple(inner)


def lambda3_vec(a, field: Field) -> list:
    lam, _ = _split_maps()
    return [a[k] for k in lam]


def v5_part_vec(a, field: Field) -> list:
    """The Λ³V5 component of a 20-vector, in V5 triple coordinates."""
    _, inner = _split_maps()
    return [a[k] for k in inner]


def assemble_vec(eta, w, field: Field) -> list:
    """20-vector of eta + e6 ^ w for eta in Λ³V5, w in Λ²V5 (coordinates)."""
    lam, inner = _split_maps()
    out = [field(0)] * 20
    for k, c in zip(inner, eta):
        out[k] = c
    # e6^e_i^e_j = e_i^e_j^e6
    for k, c in zip(lam, w):
        out[k] = c
    return out


def lambda3(a: Multivector) -> Multivector:
    """Projection Λ³V6 -> Λ²V5 killing Λ³V5 and sending e_i^e_j^e6 to e_i^e_j."""
    _need(a, V6, 3, "lambda3")
    return Multivector(V5, 2, tuple(lambda3_vec(a.coeffs, a.field)), a.field)


def restrict_to_v5(a: Multivector) -> Multivector:
    """Reinterpret a multivector over V6 with no e6 component as one over V5."""
    if a.space != V6:
        raise SpaceMismatchError("expected a V6 multivector")
    terms = {}
    for I, c in a.terms():
        if 5 in I:
            raise SpaceMismatchError("multivector involves e6")
        terms[I] = c
    return Multivector.from_terms(V5, a.degree, terms, a.field)


def include_in_v6(a: Multivector) -> Multivector:
    if a.space != V5:
        raise SpaceMismatchError("expected a V5 multivector")
    return Multivector.from_terms(V6, a.degree, dict(a.terms()), a.field)


# ---------------------------------------------------------------------------
# Pfaffian quadrics and the duality Λ³V5 x Λ²V5 -> k


@dataclass(frozen=True)
class SymBilinearForm:
    gram: tuple
    field: Field = QQ

    @property
    def size(self) -> int:
        return len(self.gram)

    def __call__(self, x, y):
        f = self.field
        return f.norm(sum(self.gram[i][j] * x[i] * y[j]
                          for i in range(self.size) for j in range(self.size)))

    def restrict(self, rows) -> "SymBilinearForm":
        f = self.field
        G = self.gram
        n = self.size
        RG = [[f.norm(sum(r[k] * G[k][j] for k in range(n))) for j in range(n)] for r in rows]
        out = tuple(tuple(f.norm(sum(a * b for a, b in zip(RG[i], rows[j])))
                          for j in range(len(rows))) for i in range(len(rows)))
        return SymBilinearForm(out, f)

    def rank(self) -> int:
        return rank([list(r) for r in self.gram], self.field) if self.size else 0

    def is_symmetric(self) -> bool:
        return all(self.gram[i][j] == self.gram[j][i]
                   for i in range(self.size) for j in range(self.size))

    def __add__(self, other):
        f = same_field(self.field, other.field)
        return SymBilinearForm(tuple(tuple(f.norm(a + b) for a, b in zip(r, s))
                                     for r, s in zip(self.gram, other.gram)), f)

    def scale(self, c):
        f = self.field
        c = f(c)
        return SymBilinearForm(tuple(tuple(f.norm(c * a) for a in r) for r in self.gram), f)


@lru_cache(maxsize=None)
def _pfaffian_tensor():
    # T[l][i][j] = vol5(e_l ^ b_i ^ b_j) over the sorted-pair basis b of Λ²V5
    pairs = basis(V5, 2)
    T = []
    for l in range(V5):
        M = []
        for P in pairs:
            row = []
            for Q in pairs:
                s, K = sort_sign((l,) + P + Q)
                row.append(s)
            M.append(tuple(row))
        T.append(tuple(M))
    return tuple(T)


def pfaffian_gram(v, field: Field) -> list[list]:
    """Gram matrix of P_v from the 5 coordinates of v."""
    T = _pfaffian_tensor()
    return [[field.norm(sum(v[l] * T[l][i][j] for l in range(V5) if T[l][i][j]))
             for j in range(10)] for i in range(10)]


def pfaffian_form(v: Multivector) -> SymBilinearForm:
    """P_v(x, y) = vol5(v ^ x ^ y) on Λ²V5, for v a nonzero vector of V5."""
    _need(v, V5, 1, "pfaffian_form")
    if v.is_zero():
        raise ValueError("Pfaffian quadric of the zero vector")
    G = pfaffian_gram(v.coeffs, v.field)
    return SymBilinearForm(tuple(tuple(r) for r in G), v.field)


@lru_cache(maxsize=None)
def _dual_pattern():
    # row I (triple of V5) pairs only with the complementary pair
    idx2 = basis_index(V5, 2)
    out = []
    for I in basis(V5, 3):
        J = tuple(k for k in range(V5) if k not in I)
        out.append((idx2[J], merge_sign(I, J)))
    return tuple(out)


def dual_pairing_matrix(field: Field = QQ) -> list[list]:
    """10x10 matrix of vol5(eta_I ^ w_J), rows = triples, columns = pairs."""
    M = [[field(0)] * 10 for _ in range(10)]
    for i, (j, s) in enumerate(_dual_pattern()):
        M[i][j] = field(s)
    return M


def dual_pairing_vec(eta, w, field: Field):
    return field.norm(sum(s * eta[i] * w[j] for i, (j, s) in enumerate(_dual_pattern())))


def dual_pairing(eta: Multivector, w: Multivector):
    _need(eta, V5, 3, "dual_pairing")
    _need(w, V5, 2, "dual_pairing")
    same_field(eta.field, w.field)
    return dual_pairing_vec(eta.coeffs, w.coeffs, eta.field)


def solve_dual(covector, field: Field) -> list:
    """The eta in Λ³V5 with vol5(eta ^ b_J) = covector[J] for every pair J."""
    eta = [field(0)] * 10
    for i, (j, s) in enumerate(_dual_pattern()):
        eta[i] = field.norm(s * covector[j])
    return eta


# ---------------------------------------------------------------------------
# decomposability and the induced action of GL(V6)


def annihilator_space(a: Multivector) -> Subspace:
    """``{v : v ^ a = 0}`` as a subspace of V (coordinates)."""
    n = a.space
    f = a.field
    cols = []
    for i in range(n):
        cols.append(list(wedge(Multivector.from_terms(n, 1, {(i,): 1}, f), a).coeffs))
    mat = [list(r) for r in zip(*cols)]
    return canonicalize(nullspace(mat, f, n), f, n)


def is_decomposable(a: Multivector) -> bool:
    """True for a nonzero pure k-vector v1^...^vk (kernel of v -> v^a has dim k)."""
    if a.is_zero():
        return False
    if a.degree <= 1 or a.degree >= a.space - 1:
        return True
    return annihilator_space(a).dim == a.degree


def exterior_power_matrix(phi, k: int, field: Field) -> list[list]:
    """Matrix of Λ^k(phi) on sorted k-subsets (acts on column coordinate vectors)."""
    from .subspace import det
    n = len(phi)
    B = basis(n, k)
    return [[det([[phi[r][c] for c in J] for r in I], field) for J in B] for I in B]
