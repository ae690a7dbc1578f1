"""Lagrangian subspaces of Λ³V6: EPW strata, duality, the sextic, automorphisms.

A Lagrangian datum is stored as a canonical 10-dimensional subspace of the
20-dimensional space of 3-vectors (coordinates on sorted triples), a
covector cutting out the hyperplane V5, and a vector x off the hyperplane.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial, gcd, lcm

from .exterior import (
    V6,
    Multivector,
    basis,
    basis_index,
    exterior_power_matrix,
    is_decomposable,
    omega_apply,
    omega_vec,
    sort_sign,
)
from .fields import QQ, Field, PrimeField, Rationals, field_from_json
from .subspace import (
    Subspace,
    bareiss_det,
    canonicalize,
    det,
    intersect,
    inverse,
    matmul,
    matvec,
    nullspace,
    rank,
)


class InvariantError(ValueError):
    pass


class ChartError(ValueError):
    pass


class FrameDegenerateError(ValueError):
    """The affine frame used for the sextic is degenerate at the given point."""


class DegenerateLagrangianError(ValueError):
    """The chart determinant vanishes identically (Y_A is all of P(V6))."""


class NotAutomorphismError(ValueError):
    pass


class IncompletePointListError(ValueError):
    pass


def coords(v, n: int, field: Field) -> list:
    """Coordinates of a vector given as a Multivector or as a sequence."""
    if isinstance(v, Multivector):
        if v.degree != 1 or v.space != n:
            raise ValueError(f"expected a vector of V{n}")
        return list(v.coeffs)
    v = [field(x) for x in v]
    if len(v) != n:
        raise ValueError(f"expected {n} coordinates, got {len(v)}")
    return v


def projective_normalize(v, field: Field) -> tuple:
    """Scale so that the last nonzero coordinate is 1."""
    for c in reversed(v):
        if not field.is_zero(c):
            inv = field.inv(c)
            return tuple(field.norm(x * inv) for x in v)
    raise ValueError("zero vector has no projective class")


@dataclass(frozen=True)
class LagrangianData:
    A: Subspace
    V5cov: tuple
    x: tuple

    def __post_init__(self):
        if self.A.ambient != 20:
            raise InvariantError("A must live in the 20-dimensional space of 3-vectors")
        f = self.A.field
        if len(self.V5cov) != 6 or len(self.x) != 6:
            raise InvariantError("V5cov and x need 6 coordinates")
        if f.is_zero(sum(a * b for a, b in zip(self.V5cov, self.x))):
            raise InvariantError("x must lie off the hyperplane V5")

    @property
    def field(self) -> Field:
        return self.A.field

    @classmethod
    def canonical(cls, A: Subspace) -> "LagrangianData":
        f = A.field
        e6 = tuple(f(int(i == 5)) for i in range(6))
        return cls(A, e6, e6)

    def is_canonical_chart(self) -> bool:
        f = self.field
        return (all(f.is_zero(c) for c in self.V5cov[:5])
                and all(f.is_zero(c) for c in self.x[:5]))

    def validate(self) -> "LagrangianData":
        if not is_lagrangian(self.A):
            raise InvariantError("A is not Lagrangian")
        return self

    def to_json(self) -> dict:
        f = self.field
        return {"schema_version": 1, "kind": "lagrangian", "field": f.to_json(),
                "A": self.A.to_json(),
                "V5cov": [f.encode(c) for c in self.V5cov],
                "x": [f.encode(c) for c in self.x]}

    @classmethod
    def from_json(cls, obj: dict) -> "LagrangianData":
        f = field_from_json(obj["field"])
        A = Subspace.from_json(obj["A"], f)
        return cls(A, tuple(f.decode(c) for c in obj["V5cov"]), tuple(f.decode(c) for c in obj["x"]))


# ---------------------------------------------------------------------------
# Lagrangian test and the fibres F_v


def is_lagrangian(A: Subspace) -> bool:
    if A.ambient != 20:
        raise ValueError("ambient dimension must be 20")
    if A.dim != 10:
        return False
    f = A.field
    for i, a in enumerate(A.basis):
        for b in A.basis[i + 1:]:
            if not f.is_zero(omega_vec(a, b, f)):
                return False
    return True


def _pivot(v, field: Field) -> int:
    for i in range(len(v) - 1, -1, -1):
        if not field.is_zero(v[i]):
            return i
    raise ValueError("zero vector")


def frame_vectors(v, field: Field, pairs=None) -> list[list]:
    """v ^ e_i ^ e_j as 20-vectors, for the given index pairs.

    By default the pairs avoid the last nonzero coordinate of v, which
    gives a basis of F_v.
    """
    idx = basis_index(V6, 3)
    if pairs is None:
        m = _pivot(v, field)
        rest = [i for i in range(6) if i != m]
        pairs = [(rest[a], rest[b]) for a in range(5) for b in range(a + 1, 5)]
    out = []
    for i, j in pairs:
        vec = [field(0)] * 20
        for k in range(6):
            if field.is_zero(v[k]) or k == i or k == j:
                continue
            s, T = sort_sign((k, i, j))
            vec[idx[T]] = field.norm(vec[idx[T]] + s * v[k])
        out.append(vec)
    return out


def F_of(v, field: Field = None) -> Subspace:
    """F_v = v ^ Λ²V6."""
    if field is None:
        field = v.field if isinstance(v, Multivector) else QQ
    v = coords(v, 6, field)
    if all(field.is_zero(c) for c in v):
        raise ValueError("F_v needs a nonzero vector")
    return canonicalize(frame_vectors(v, field), field, 20)


def _pairing_matrix(rows, A: Subspace) -> list[list]:
    f = A.field
    return [[omega_vec(r, a, f) for a in A.basis] for r in rows]


def stratum_dim(L: LagrangianData, v) -> int:
    """dim(F_v ∩ A), computed as the corank of omega between F_v and A."""
    f = L.field
    v = coords(v, 6, f)
    if all(f.is_zero(c) for c in v):
        raise ValueError("stratum of the zero vector")
    return 10 - rank(_pairing_matrix(frame_vectors(v, f), L.A), f)


def stratum_dim_by_intersection(L: LagrangianData, v) -> int:
    return intersect(F_of(v, L.field), L.A).dim


def wedge3_of_hyperplane(c, field: Field) -> list[list]:
    """Basis of Λ³(ker c) as 20-vectors."""
    m = _pivot(c, field)
    inv = field.inv(c[m])
    rest = [i for i in range(6) if i != m]
    # f_i = e_i - (c_i / c_m) e_m spans ker c
    fs = []
    for i in rest:
        vec = [field(0)] * 6
        vec[i] = field(1)
        vec[m] = field.norm(-c[i] * inv)
        fs.append(vec)
    idx = basis_index(V6, 3)
    out = []
    for a, b, d in basis(5, 3):
        vec = [field(0)] * 20
        u, w, z = fs[a], fs[b], fs[d]
        for i in range(6):
            if field.is_zero(u[i]):
                continue
            for j in range(6):
                if field.is_zero(w[j]):
                    continue
                for k in range(6):
                    if field.is_zero(z[k]):
                        continue
                    s, T = sort_sign((i, j, k))
                    if s:
                        vec[idx[T]] = field.norm(vec[idx[T]] + s * u[i] * w[j] * z[k])
        out.append(vec)
    return out


def dual_stratum_dim(L: LagrangianData, V5cov) -> int:
    """dim(Λ³(ker V5cov) ∩ A): the stratum of [V5cov] for the dual sextic."""
    f = L.field
    c = coords(V5cov, 6, f)
    if all(f.is_zero(x) for x in c):
        raise ValueError("zero covector")
    return 10 - rank(_pairing_matrix(wedge3_of_hyperplane(c, f), L.A), f)


def perp(L: LagrangianData) -> LagrangianData:
    """A⊥ in the dual triple basis, with the roles of V5cov and x exchanged."""
    f = L.field
    rows = [omega_apply(a, f) for a in L.A.basis]
    return LagrangianData(canonicalize(rows, f, 20), tuple(L.x), tuple(L.V5cov))


# ---------------------------------------------------------------------------
# the sextic equation

CHART_DEGREE = 10  # homogeneity degree of the raw chart determinant
GRID_DEGREE = 6
_N_AFFINE = 5


def _chart_pairs():
    return [(i, j) for i in range(5) for j in range(i + 1, 5)]


def _chart_tensor(A_rows, field: Field):
    # C[l][p][k] = omega(e_l ^ e_i ^ e_j, a_k), pairs p = (i, j) inside V5
    C = []
    for l in range(6):
        e_l = [field(int(i == l)) for i in range(6)]
        frame = frame_vectors(e_l, field, _chart_pairs())
        C.append([[omega_vec(r, a, field) for a in A_rows] for r in frame])
    return C


def _chart_matrix(C, v, field: Field):
    return [[field.norm(sum(v[l] * C[l][p][k] for l in range(6) if v[l]))
             for k in range(10)] for p in range(10)]


def sextic_value(L: LagrangianData, v):
    """Determinant of omega(v ^ e_i ^ e_j, a_k), 1 <= i < j <= 5.

    Homogeneous of degree CHART_DEGREE in v; equals (e6-coordinate)^4 times
    the sextic equation up to a constant.  Raises FrameDegenerateError when
    v lies in the hyperplane e6* = 0.
    """
    f = L.field
    v = coords(v, 6, f)
    if f.is_zero(v[5]):
        raise FrameDegenerateError("chart frame needs a nonzero e6 coordinate")
    C = _chart_tensor([list(a) for a in L.A.basis], f)
    return det(_chart_matrix(C, v, f), f)


def _monomials(deg: int, nvars: int):
    if nvars == 1:
        yield (deg,)
        return
    for a in range(deg, -1, -1):
        for rest in _monomials(deg - a, nvars - 1):
            yield (a,) + rest


@dataclass(frozen=True)
class SexticPolynomial:
    """Homogeneous polynomial in 6 variables; ``coeffs`` maps exponents to scalars."""

    coeffs: tuple  # ((exponents, coeff), ...) in descending lex order, nonzero only
    field: Field = QQ
    degree: int = 6

    def __post_init__(self):
        for exps, _ in self.coeffs:
            if len(exps) != 6 or sum(exps) != self.degree:
                raise InvariantError(f"monomial {exps} is not of degree {self.degree}")

    @classmethod
    def from_dict(cls, d: dict, field: Field, degree: int = 6) -> "SexticPolynomial":
        items = sorted(((tuple(k), v) for k, v in d.items() if not field.is_zero(v)), reverse=True)
        return cls(tuple(items), field, degree)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def total_degree(self) -> int:
        return self.degree

    def __call__(self, v):
        f = self.field
        v = [f(x) for x in v]
        total = f(0)
        for exps, c in self.coeffs:
            term = c
            for x, a in zip(v, exps):
                if a:
                    term = term * x**a
            total = f.norm(total + term)
        return total

    def partial(self, i: int) -> "SexticPolynomial":
        f = self.field
        out = {}
        for exps, c in self.coeffs:
            if exps[i]:
                e2 = list(exps)
                e2[i] -= 1
                out[tuple(e2)] = f.norm(c * exps[i])
        return SexticPolynomial.from_dict(out, f, self.degree - 1)

    def gradient(self, v) -> list:
        return [self.partial(i)(v) for i in range(6)]

    def normalized(self) -> "SexticPolynomial":
        if not self.coeffs:
            return self
        f = self.field
        inv = f.inv(self.coeffs[0][1])
        return SexticPolynomial(tuple((e, f.norm(c * inv)) for e, c in self.coeffs), f, self.degree)

    def primitive(self) -> "SexticPolynomial":
        """Scalar multiple with coprime integer coefficients and positive leading term (over Q)."""
        if not isinstance(self.field, Rationals):
            raise ValueError("primitive form is only defined over Q")
        if not self.coeffs:
            return self
        den = lcm(*(Fraction(c).denominator for _, c in self.coeffs))
        ints = [int(Fraction(c) * den) for _, c in self.coeffs]
        g = gcd(*ints) * (1 if ints[0] > 0 else -1)
        return SexticPolynomial(tuple((e, Fraction(n // g)) for (e, _), n in zip(self.coeffs, ints)),
                                self.field, self.degree)

    def reduce_mod(self, p: int) -> "SexticPolynomial":
        """Reduction of the primitive integer form; the result is nonzero mod p."""
        if isinstance(self.field, PrimeField):
            if self.field.p != p:
                raise ValueError(f"polynomial lives over F_{self.field.p}")
            return self
        F = PrimeField(p)
        return SexticPolynomial.from_dict({e: F(c) for e, c in self.primitive().coeffs}, F, self.degree)

    def evaluate_mod_p(self, points, p: int):
        """Values mod p at the rows of an integer array, computed with numpy."""
        import numpy as np
        F = PrimeField(p)
        P = np.asarray(points, dtype=np.int64) % p
        total = np.zeros(len(P), dtype=np.int64)
        pw = [np.ones_like(P)]
        for _ in range(self.degree):
            pw.append(pw[-1] * P % p)
        for exps, c in self.coeffs:
            term = np.full(len(P), F(c), dtype=np.int64)
            for i, a in enumerate(exps):
                if a:
                    term = term * pw[a][:, i] % p
            total = (total + term) % p
        return total

    def to_json(self) -> list:
        return [{"exponents": list(e), "coeff": self.field.encode(c)} for e, c in self.coeffs]

    @classmethod
    def from_json(cls, obj: list, field: Field) -> "SexticPolynomial":
        d = {tuple(t["exponents"]): field.decode(t["coeff"]) for t in obj}
        degs = {sum(e) for e in d}
        return cls.from_dict(d, field, degs.pop() if len(degs) == 1 else 6)


def _newton_1d(vals, field: Field):
    d = len(vals) - 1
    for j in range(1, d + 1):
        for k in range(d, j - 1, -1):
            vals[k] = field.norm(vals[k] - vals[k - 1])
    return vals


def _falling_coeffs(a: int, field: Field) -> list:
    """Coefficients of binom(u, a) as a polynomial in u (index = power)."""
    poly = [field(1)]
    for k in range(a):
        nxt = [field(0)] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = field.norm(nxt[i + 1] + c)
            nxt[i] = field.norm(nxt[i] - k * c)
        poly = nxt
    inv = field.inv(field(factorial(a)))
    return [field.norm(c * inv) for c in poly]


def _grid():
    return [a for a in product(range(GRID_DEGREE + 1), repeat=_N_AFFINE) if sum(a) <= GRID_DEGREE]


def _integral_rows(rows):
    out = []
    for r in rows:
        den = 1
        for x in r:
            den = lcm(den, Fraction(x).denominator)
        out.append([int(Fraction(x) * den) for x in r])
    return out


def sextic_polynomial(L: LagrangianData, workers: int = 1) -> SexticPolynomial:
    """The EPW sextic of A, normalised so that its leading lex coefficient is 1.

    The chart determinant is interpolated on the simplex grid
    {u in N^5 : |u| <= 6} (at the points (u, 1)) by multivariate Newton
    differences, then homogenised with the e6 variable.  Over F_p this needs
    p >= 7.
    """
    f = L.field
    if isinstance(f, PrimeField) and f.p <= GRID_DEGREE:
        raise ValueError(f"interpolation needs p > {GRID_DEGREE}; compute over Q and reduce")
    if isinstance(f, Rationals):
        A_rows = _integral_rows(L.A.basis)
        C = _chart_tensor(A_rows, f)
        C = [[[int(x) for x in r] for r in m] for m in C]

        def evaluate(u):
            v = list(u) + [1]
            M = [[sum(v[l] * C[l][p][k] for l in range(6)) for k in range(10)] for p in range(10)]
            return Fraction(bareiss_det(M))
    else:
        A_rows = [list(a) for a in L.A.basis]
        C = _chart_tensor(A_rows, f)

        def evaluate(u):
            return det(_chart_matrix(C, list(u) + [1], f), f)

    grid = _grid()
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as ex:
            values = list(ex.map(evaluate, grid))
    else:
        values = [evaluate(u) for u in grid]
    T = {u: f(val) for u, val in zip(grid, values)}

    for axis in range(_N_AFFINE):
        for base in grid:
            if base[axis]:
                continue
            d = GRID_DEGREE - sum(base)
            line = []
            for k in range(d + 1):
                b = list(base)
                b[axis] = k
                line.append(tuple(b))
            vals = _newton_1d([T[q] for q in line], f)
            for q, val in zip(line, vals):
                T[q] = val

    falling = [_falling_coeffs(a, f) for a in range(GRID_DEGREE + 1)]
    affine = {}
    for alpha, c in T.items():
        if f.is_zero(c):
            continue
        for beta in product(*[range(a + 1) for a in alpha]):
            term = c
            for a, b in zip(alpha, beta):
                term = term * falling[a][b]
            term = f.norm(term)
            if not f.is_zero(term):
                affine[beta] = f.norm(affine.get(beta, f(0)) + term)
    if not any(not f.is_zero(c) for c in affine.values()):
        raise DegenerateLagrangianError("chart determinant vanishes identically")

    # check points off the grid: the chart determinant must agree with the
    # degree-6 interpolant, otherwise the frame is not of the expected form
    for u in ((7, 3, 11, 2, 5), (13, 1, 4, 9, 6), (2, 17, 5, 3, 8)):
        uu = [f(x) for x in u]
        val = f(0)
        for beta, c in affine.items():
            term = c
            for x, b in zip(uu, beta):
                if b:
                    term = term * x**b
            val = f.norm(val + term)
        if not f.is_zero(f.norm(val - f(evaluate(uu)))):
            raise DegenerateLagrangianError("chart determinant has degree > 6 on this A")

    homog = {beta + (GRID_DEGREE - sum(beta),): c for beta, c in affine.items()}
    return SexticPolynomial.from_dict(homog, f).normalized()


# ---------------------------------------------------------------------------
# decomposable vectors


def decomposable_witness_check(L: LagrangianData, eta) -> bool:
    """True iff eta is a nonzero decomposable 3-vector lying in A."""
    f = L.field
    if isinstance(eta, Multivector):
        if eta.space != V6 or eta.degree != 3:
            raise ValueError("expected a 3-vector over V6")
        vec = list(eta.coeffs)
    else:
        vec = [f(c) for c in eta]
        eta = Multivector(V6, 3, tuple(vec), f)
    if eta.is_zero():
        raise ValueError("zero 3-vector")
    return L.A.contains(vec) and is_decomposable(eta)


def _random_vector(rng: random.Random, field: Field, n: int, box: int = 3) -> list:
    while True:
        if isinstance(field, PrimeField):
            v = [rng.randrange(field.p) for _ in range(n)]
        else:
            v = [Fraction(rng.randint(-box, box)) for _ in range(n)]
        if any(v):
            return v


def decomposable_search(L: LagrangianData, trials: int, seed: int):
    """Search A for a decomposable 3-vector.

    Each trial picks a vector v (the basis vectors first, then random ones),
    intersects F_v with A and tests the basis of the intersection and a few
    random combinations.  Returns a verified witness or None; None is not a
    proof that A has no decomposable vectors.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    f = L.field
    rng = random.Random(seed)
    A_rows = [list(a) for a in L.A.basis]
    for t in range(trials):
        if t < 6:
            v = [f(int(i == t)) for i in range(6)]
        else:
            v = _random_vector(rng, f, 6)
        M = _pairing_matrix(frame_vectors(v, f), L.A)
        ker = nullspace(M, f, 10)
        if not ker:
            continue
        cands = [[f.norm(sum(y[k] * A_rows[k][j] for k in range(10))) for j in range(20)] for y in ker]
        if len(cands) > 1:
            for _ in range(4):
                w = _random_vector(rng, f, len(cands))
                cands.append([f.norm(sum(c * r[j] for c, r in zip(w, cands[:len(ker)])))
                              for j in range(20)])
        for vec in cands:
            mv = Multivector(V6, 3, tuple(vec), f)
            if not mv.is_zero() and is_decomposable(mv):
                return mv
    return None


# ---------------------------------------------------------------------------
# GL(V6) action and automorphisms


def _matrix(phi, field: Field) -> list[list]:
    M = [[field(x) for x in row] for row in phi]
    if len(M) != 6 or any(len(r) != 6 for r in M):
        raise ValueError("expected a 6x6 matrix")
    if field.is_zero(det(M, field)):
        raise ValueError("matrix is singular")
    return M


def wedge3_rows(phi_m, rows, field: Field) -> list[list]:
    M3 = exterior_power_matrix(phi_m, 3, field)
    return [matvec(M3, list(r), field) for r in rows]


def apply_gl(phi, L: LagrangianData) -> LagrangianData:
    """Transport the datum along phi: A -> Λ³phi(A), V5cov -> V5cov∘phi⁻¹, x -> phi(x)."""
    f = L.field
    M = _matrix(phi, f)
    Minv = inverse(M, f)
    A2 = canonicalize(wedge3_rows(M, L.A.basis, f), f, 20)
    cov = [f.norm(sum(L.V5cov[i] * Minv[i][j] for i in range(6))) for j in range(6)]
    x = matvec(M, list(L.x), f)
    return LagrangianData(A2, tuple(cov), tuple(x))


def is_automorphism(phi, L: LagrangianData) -> bool:
    """True iff Λ³phi maps A onto itself."""
    f = L.field
    M = _matrix(phi, f)
    return canonicalize(wedge3_rows(M, L.A.basis, f), f, 20) == L.A


def dual_action(phi, c, field: Field) -> tuple:
    """Image of the hyperplane class [c] under phi, normalised projectively."""
    M = _matrix(phi, field)
    Minv = inverse(M, field)
    img = [field.norm(sum(c[i] * Minv[i][j] for i in range(6))) for j in range(6)]
    return projective_normalize(img, field)


def strata_permutation(phi, L: LagrangianData, points) -> tuple[int, ...]:
    """Permutation of a list of dual stratum-3 points induced by phi.

    ``result[i]`` is the index of the image of ``points[i]``.
    """
    f = L.field
    if not is_automorphism(phi, L):
        raise NotAutomorphismError("Λ³phi does not preserve A")
    normed = [projective_normalize(coords(c, 6, f), f) for c in points]
    if len(set(normed)) != len(normed):
        raise ValueError("points must be pairwise distinct")
    for c in normed:
        if dual_stratum_dim(L, c) != 3:
            raise ValueError(f"point {c} is not in the dual third stratum")
    where = {c: i for i, c in enumerate(normed)}
    out = []
    for c in normed:
        img = dual_action(phi, c, f)
        if img not in where:
            raise IncompletePointListError(f"image of {c} is not in the list")
        out.append(where[img])
    return tuple(out)


def permutation_cycles(perm) -> list[tuple[int, ...]]:
    seen = set()
    cycles = []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        cycles.append(tuple(cyc))
    return cycles


def permutation_order(perm) -> int:
    out = 1
    for c in permutation_cycles(perm):
        out = lcm(out, len(c))
    return out


def projective_order(phi, field: Field, limit: int = 10_000) -> int | None:
    """Smallest n with phi^n scalar, or None if not found below ``limit``."""
    M = _matrix(phi, field)
    P = [row[:] for row in M]
    for n in range(1, limit + 1):
        d = P[0][0]
        if all(field.is_zero(P[i][j]) for i in range(6) for j in range(6) if i != j) and \
                all(P[i][i] == d for i in range(6)):
            return n
        P = matmul(P, M, field)
    return None


def canonical_chart(L: LagrangianData) -> tuple[LagrangianData, list[list]]:
    """Move the datum to V5 = span(e1..e5), x = e6 by a change of basis phi.

    Returns the transformed datum and phi.
    """
    f = L.field
    ker = nullspace([list(L.V5cov)], f, 6)
    B = [list(col) for col in zip(*(ker + [list(L.x)]))]  # columns: ker basis, then x
    phi = inverse(B, f)
    L2 = apply_gl(phi, L)
    e6 = tuple(f(int(i == 5)) for i in range(6))
    return LagrangianData(L2.A, e6, e6), phi


# ---------------------------------------------------------------------------
# an engineered instance with a coordinate symmetry


def _isotropic_extend(rows, space, field: Field, rng: random.Random, target: int) -> list[list]:
    """Grow an omega-isotropic family inside span(space) to ``target`` vectors."""
    rows = list(rows)
    while len(rows) < target:
        cond = [[omega_vec(s, r, field) for s in space] for r in rows]
        perp = nullspace(cond, field, len(space))
        y = _random_vector(rng, field, len(perp))
        c = [field.norm(sum(a * b[k] for a, b in zip(y, perp))) for k in range(len(space))]
        v = [field.norm(sum(a * s[j] for a, s in zip(c, space))) for j in range(20)]
        if rank(rows + [v], field) == len(rows) + 1:
            rows.append(v)
    return rows


def swap_matrix(field: Field = QQ) -> list[list]:
    """phi: e1 -> -e1, e5 <-> e6.  It has determinant 1, so Λ³phi preserves omega."""
    phi = [[field(int(r == c)) for c in range(6)] for r in range(6)]
    phi[0][0] = field(-1)
    phi[4][4] = phi[5][5] = field(0)
    phi[4][5] = phi[5][4] = field(1)
    return phi


def swap_symmetric_lagrangian(seed: int, field: Field = QQ) -> tuple[LagrangianData, list[list]]:
    """A Lagrangian in the canonical chart with Λ³phi(A) = A for phi = swap_matrix().

    Λ³phi is a symplectic involution, so A = L+ ⊕ L- with L± Lagrangian in
    its eigenspaces.  A 3-plane T = span(e1^e_i^e5 + noise), i = 2, 3, 4, with
    omega(T, phi T) = 0 is planted in A, which makes [e6*] a point of the
    third dual stratum; phi sends it to [e5*].  Returns the datum and phi.
    """
    if field.characteristic == 2:
        raise ValueError("needs characteristic different from 2")
    rng = random.Random(seed)
    phi = swap_matrix(field)
    sigma = exterior_power_matrix(phi, 3, field)
    idx = basis_index(V6, 3)

    def unit(T):
        return [field(int(k == idx[T])) for k in range(20)]

    eig = {s: nullspace([[field.norm(sigma[r][c] - s * (r == c)) for c in range(20)] for r in range(20)],
                        field, 20) for s in (1, -1)}
    radical = [unit(T) for T in basis(4, 3)]  # triples inside e1..e4
    e6 = [field(int(k == 5)) for k in range(6)]
    for _ in range(200):
        T = []
        for i in (1, 2, 3):
            noise = _random_vector(rng, field, 4)
            T.append([field.norm(a + sum(c * r[k] for c, r in zip(noise, radical)))
                      for k, a in enumerate(unit((0, i, 4)))])
        sT = [matvec(sigma, t, field) for t in T]
        halves = []
        for s in (1, -1):
            part = canonicalize([[field.norm(a + s * b) for a, b in zip(t, u)] for t, u in zip(T, sT)],
                                field, 20)
            halves += _isotropic_extend(part.rows(), eig[s], field, rng, len(eig[s]) // 2)
        A = canonicalize(halves, field, 20)
        if A.dim != 10:
            continue
        L = LagrangianData.canonical(A)
        if dual_stratum_dim(L, e6) == 3 and is_lagrangian(A):
            return L, phi
    raise RuntimeError("could not build a symmetric instance")
