"""Exact linear algebra and canonical subspaces over Q or F_p.

Vectors are lists (or tuples) of field elements, matrices are lists of
rows.  A :class:`Subspace` is stored by its reduced row-echelon basis, so
two subspaces are equal exactly when their canonical matrices are.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .fields import QQ, Field, Rationals, same_field


class DimensionMismatchError(ValueError):
    pass


class SingularPairingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# matrix kernels


def _rref_rational(rows, ncols):
    # Fraction-free Gauss-Jordan on integer rows; contents are divided out
    # after every elimination step to keep entries small.
    M = []
    for r in rows:
        den = 1
        for x in r:
            den = lcm(den, Fraction(x).denominator)
        M.append([int(Fraction(x) * den) for x in r])
    pivots = []
    r = 0
    nrows = len(M)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        best = None
        for i in range(r, nrows):
            v = M[i][c]
            if v and (best is None or abs(v) < best):
                piv, best = i, abs(v)
                if best == 1:
                    break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        a = M[r][c]
        for i in range(nrows):
            if i == r:
                continue
            b = M[i][c]
            if not b:
                continue
            row = [a * x - b * y for x, y in zip(M[i], M[r])]
            g = 0
            for x in row:
                g = gcd(g, x)
                if g == 1:
                    break
            if g > 1:
                row = [x // g for x in row]
            M[i] = row
        pivots.append(c)
        r += 1
    out = []
    for i, c in enumerate(pivots):
        d = M[i][c]
        out.append([Fraction(x, d) for x in M[i]])
    return out, pivots


def _rref_mod_p(rows, ncols, p):
    M = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    nrows = len(M)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = pow(M[r][c], -1, p)
        if inv != 1:
            M[r] = [x * inv % p for x in M[r]]
        pr = M[r]
        for i in range(nrows):
            if i != r:
                b = M[i][c]
                if b:
                    M[i] = [(x - b * y) % p for x, y in zip(M[i], pr)]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def rref(rows: Sequence[Sequence], field: Field, ncols: int | None = None):
    """Reduced row-echelon form. Returns ``(nonzero_rows, pivot_columns)``."""
    rows = [list(r) for r in rows]
    if ncols is None:
        if not rows:
            raise ValueError("cannot infer column count of an empty matrix")
        ncols = len(rows[0])
    if isinstance(field, Rationals):
        return _rref_rational(rows, ncols)
    return _rref_mod_p(rows, ncols, field.p)


def rank(rows, field: Field) -> int:
    if not rows:
        return 0
    return len(rref(rows, field)[1])


def nullspace(mat, field: Field, ncols: int | None = None) -> list[list]:
    """Basis of ``{x : mat @ x = 0}``, one vector per free column."""
    if ncols is None:
        ncols = len(mat[0])
    if not mat:
        return [[field(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    R, pivots = rref(mat, field, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [field(0)] * ncols
        v[f] = field(1)
        for row, c in zip(R, pivots):
            v[c] = field.norm(-row[f])
        basis.append(v)
    return basis


def solve(mat, rhs, field: Field):
    """One solution of ``mat @ x = rhs`` (free variables set to zero), or None."""
    n = len(mat[0])
    aug = [list(r) + [b] for r, b in zip(mat, rhs)]
    R, pivots = rref(aug, field, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = [field(0)] * n
    for row, c in zip(R, pivots):
        x[c] = row[n]
    return x


def matmul(A, B, field: Field):
    Bt = list(zip(*B))
    return [[field.norm(sum(a * b for a, b in zip(row, col))) for col in Bt] for row in A]


def matvec(A, v, field: Field):
    return [field.norm(sum(a * b for a, b in zip(row, v))) for row in A]


def transpose(A):
    return [list(c) for c in zip(*A)]


def det(mat, field: Field):
    n = len(mat)
    if n == 0:
        return field(1)
    if isinstance(field, Rationals):
        den = 1
        for r in mat:
            for x in r:
                den = lcm(den, Fraction(x).denominator)
        M = [[int(Fraction(x) * den) for x in r] for r in mat]
        return Fraction(bareiss_det(M), den**n)
    p = field.p
    M = [[x % p for x in r] for r in mat]
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = -d
        d = d * M[c][c] % p
        inv = pow(M[c][c], -1, p)
        for i in range(c + 1, n):
            b = M[i][c] * inv % p
            if b:
                M[i] = [(x - b * y) % p for x, y in zip(M[i], M[c])]
    return d % p


def bareiss_det(M) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    M = [list(r) for r in M]
    n = len(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        akk = M[k][k]
        for i in range(k + 1, n):
            aik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * M[n - 1][n - 1] if n else 1


def inverse(mat, field: Field):
    n = len(mat)
    aug = [list(r) + [field(int(i == j)) for j in range(n)] for i, r in enumerate(mat)]
    R, pivots = rref(aug, field, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R[:n]]


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    ambient: int
    basis: tuple
    field: Field = QQ

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list[int]:
        out = []
        for row in self.basis:
            out.append(next(i for i, x in enumerate(row) if not self.field.is_zero(x)))
        return out

    def rows(self) -> list[list]:
        return [list(r) for r in self.basis]

    def contains(self, vec) -> bool:
        if len(vec) != self.ambient:
            raise DimensionMismatchError("vector length differs from ambient dimension")
        return rank(self.rows() + [list(vec)], self.field) == self.dim

    def coordinates(self, vec) -> list:
        """Coefficients expressing ``vec`` in the canonical basis."""
        coeffs = [vec[c] for c in self.pivots]
        recon = [self.field.norm(sum(a * row[j] for a, row in zip(coeffs, self.basis)))
                 for j in range(self.ambient)]
        if any(not self.field.is_zero(self.field.norm(x - y)) for x, y in zip(recon, vec)):
            raise ValueError("vector does not lie in the subspace")
        return coeffs

    def __le__(self, other: "Subspace") -> bool:
        return intersect(self, other).dim == self.dim

    def to_json(self) -> dict:
        return {"ambient": self.ambient,
                "basis": [[self.field.encode(x) for x in r] for r in self.basis]}

    @classmethod
    def from_json(cls, obj: dict, field: Field) -> "Subspace":
        n = obj["ambient"]
        rows = [[field.decode(x) for x in r] for r in obj["basis"]]
        for r in rows:
            if len(r) != n:
                raise DimensionMismatchError("basis row length differs from ambient")
        return canonicalize(rows, field, n)

    @classmethod
    def zero(cls, ambient: int, field: Field) -> "Subspace":
        return cls(ambient, (), field)

    @classmethod
    def full(cls, ambient: int, field: Field) -> "Subspace":
        return canonicalize([[field(int(i == j)) for j in range(ambient)] for i in range(ambient)],
                            field, ambient)


def canonicalize(rows, field: Field = QQ, ambient: int | None = None) -> Subspace:
    rows = [[field(x) for x in r] for r in rows]
    if ambient is None:
        if not rows:
            raise ValueError("empty ambient dimension")
        ambient = len(rows[0])
    if ambient <= 0:
        raise ValueError("empty ambient dimension")
    for r in rows:
        if len(r) != ambient:
            raise DimensionMismatchError("row length differs from ambient dimension")
    if not rows:
        return Subspace(ambient, (), field)
    R, _ = rref(rows, field, ambient)
    return Subspace(ambient, tuple(tuple(r) for r in R), field)


def _check_pair(U1: Subspace, U2: Subspace) -> Field:
    if U1.ambient != U2.ambient:
        raise DimensionMismatchError(f"ambient {U1.ambient} vs {U2.ambient}")
    return same_field(U1.field, U2.field)


def subspace_sum(U1: Subspace, U2: Subspace) -> Subspace:
    field = _check_pair(U1, U2)
    return canonicalize(U1.rows() + U2.rows(), field, U1.ambient)


def intersect(U1: Subspace, U2: Subspace) -> Subspace:
    """U1 ∩ U2 from the kernel of the stacked bases."""
    field = _check_pair(U1, U2)
    if U1.dim == 0 or U2.dim == 0:
        return Subspace.zero(U1.ambient, field)
    # columns: rows of U1 then negated rows of U2
    cols = U1.rows() + [[field.norm(-x) for x in r] for r in U2.rows()]
    mat = transpose(cols)
    ker = nullspace(mat, field, len(cols))
    vecs = []
    for k in ker:
        a = k[:U1.dim]
        vecs.append([field.norm(sum(c * row[j] for c, row in zip(a, U1.basis)))
                     for j in range(U1.ambient)])
    return canonicalize(vecs, field, U1.ambient)


def annihilator(U: Subspace, pairing) -> Subspace:
    """``{phi : <phi, u> = 0 for all u in U}`` in the dual ambient.

    ``pairing[i][j]`` is the value of the i-th dual basis vector on the
    j-th ambient basis vector.
    """
    field = U.field
    n = len(pairing)
    if any(len(r) != U.ambient for r in pairing) or n != U.ambient:
        raise DimensionMismatchError("pairing shape does not match ambient")
    if rank(pairing, field) != n:
        raise SingularPairingError("pairing matrix is singular")
    if U.dim == 0:
        return Subspace.full(n, field)
    # <phi, u> = sum_i phi_i * (pairing @ u)_i
    cond = [matvec(pairing, list(u), field) for u in U.basis]
    return canonicalize(nullspace(cond, field, n), field, n)


def _gram_of(form):
    return form.gram if hasattr(form, "gram") else form


def restricted_gram(form, restriction: Subspace):
    G = _gram_of(form)
    if len(G) != restriction.ambient:
        raise DimensionMismatchError("form and restriction live in different spaces")
    R = restriction.rows()
    return matmul(matmul(R, G, restriction.field), transpose(R), restriction.field)


def form_kernel(form, restriction: Subspace) -> Subspace:
    """Radical of ``form`` restricted to ``restriction`` (ambient coordinates)."""
    field = restriction.field
    if restriction.dim == 0:
        return Subspace.zero(restriction.ambient, field)
    H = restricted_gram(form, restriction)
    ker = nullspace(H, field, restriction.dim)
    vecs = [[field.norm(sum(c * row[j] for c, row in zip(k, restriction.basis)))
             for j in range(restriction.ambient)] for k in ker]
    return canonicalize(vecs, field, restriction.ambient)


def corank(form, restriction: Subspace) -> int:
    if restriction.dim == 0:
        return 0
    return restriction.dim - rank(restricted_gram(form, restriction), restriction.field)
