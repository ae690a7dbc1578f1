"""Exhaustive scans of P(V6) and P(V6^∨) over small prime fields.

Points are normalised so that the last nonzero coordinate is 1 and are
visited in lexicographic order.  Ranks are computed in batches with numpy
(entries stay below p^2, so int64 never overflows).
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import combinations

import numpy as np

from .exterior import basis_index, omega_vec, sort_sign
from .fields import Field, PrimeField, QQ
from .gmdata import GMData, _qx_on, gm_to_lagrangian, hull_kernel
from .lagrangian import (
    InvariantError,
    LagrangianData,
    dual_stratum_dim,
    is_lagrangian,
    stratum_dim,
)
from .subspace import canonicalize, nullspace

SCHEMA_VERSION = 1
DEFAULT_POINT_BOUND = 1_000_000
DEFAULT_PRIMES = (5, 7, 11)
CHUNK = 4096


class BadPrimeError(ValueError):
    pass


class PointBoundError(RuntimeError):
    pass


def projective_size(n: int, p: int) -> int:
    return (p**n - 1) // (p - 1)


def reduce_mod_p(L: LagrangianData, p: int) -> LagrangianData:
    """Entrywise reduction of a rational datum; raises BadPrimeError when p is bad.

    p is bad if it divides a denominator, if rank or isotropy is lost, or if
    the intersection with Λ³V5 jumps.
    """
    if L.field != QQ:
        raise ValueError("reduction needs a datum over Q")
    F = PrimeField(p)
    for row in L.A.basis:
        for x in row:
            if Fraction(x).denominator % p == 0:
                raise BadPrimeError(f"{p} divides a denominator of A")
    for x in L.V5cov + L.x:
        if Fraction(x).denominator % p == 0:
            raise BadPrimeError(f"{p} divides a denominator of the chart")
    rows = [[F(x) for x in r] for r in L.A.basis]
    A = canonicalize(rows, F, 20)
    if A.dim != 10:
        raise BadPrimeError(f"rank of A drops mod {p}")
    if not is_lagrangian(A):
        raise BadPrimeError(f"isotropy fails mod {p}")
    try:
        Lp = LagrangianData(A, tuple(F(c) for c in L.V5cov), tuple(F(c) for c in L.x))
    except InvariantError as exc:
        raise BadPrimeError(str(exc)) from exc
    if dual_stratum_dim(Lp, Lp.V5cov) != dual_stratum_dim(L, L.V5cov):
        raise BadPrimeError(f"intersection with the chart hyperplane jumps mod {p}")
    return Lp


# ---------------------------------------------------------------------------
# batched linear algebra


def _eliminate(M: np.ndarray, p: int, full: bool):
    M = np.array(M, dtype=np.int64) % p
    N, n, m = M.shape
    inv = np.array([0] + [pow(x, -1, p) for x in range(1, p)], dtype=np.int64)
    r = np.zeros(N, dtype=np.int64)
    rows = np.arange(n)
    piv_row = np.full((N, m), -1, dtype=np.int64)
    for c in range(m):
        mask = (M[:, :, c] != 0) & (rows[None, :] >= r[:, None])
        has = mask.any(axis=1)
        if not has.any():
            continue
        idx = np.nonzero(has)[0]
        piv = mask[idx].argmax(axis=1)
        rr = r[idx]
        top = M[idx, rr].copy()
        M[idx, rr] = M[idx, piv]
        M[idx, piv] = top
        M[idx, rr] = M[idx, rr] * inv[M[idx, rr, c]][:, None] % p
        factor = M[idx, :, c].copy()
        # clear below the pivot only, unless a reduced form is wanted
        keep = (rows[None, :] == rr[:, None]) if full else (rows[None, :] <= rr[:, None])
        factor[keep] = 0
        M[idx] = (M[idx] - factor[:, :, None] * M[idx, rr][:, None, :]) % p
        piv_row[idx, c] = rr
        r[idx] += 1
    return M, piv_row, r


def batched_rank(M: np.ndarray, p: int) -> np.ndarray:
    """Ranks mod p of a stack of matrices of shape (N, rows, cols)."""
    return _eliminate(M, p, False)[2]


def batched_rref(M: np.ndarray, p: int):
    """Reduced row echelon forms mod p of a stack of matrices.

    Returns (R, pivot_row) where pivot_row[n, c] is the row holding the pivot
    of column c in matrix n, or -1 for a free column.
    """
    R, piv_row, _ = _eliminate(M, p, True)
    return R, piv_row


def corank_one_kernels(M: np.ndarray, p: int) -> np.ndarray:
    """Kernel vectors of a stack of matrices whose right kernels are 1-dimensional."""
    R, piv_row = batched_rref(M, p)
    N, n, m = R.shape
    free = piv_row < 0
    if not (free.sum(axis=1) == 1).all():
        raise ValueError("matrices must have corank exactly one")
    fcol = free.argmax(axis=1)
    x = np.zeros((N, m), dtype=np.int64)
    ar = np.arange(N)
    x[ar, fcol] = 1
    for c in range(m):
        sel = piv_row[:, c] >= 0
        x[sel, c] = (-R[sel, piv_row[sel, c], fcol[sel]]) % p
    return x


def projective_points(n: int, p: int) -> np.ndarray:
    """All normalised representatives of P^{n-1}(F_p), in lexicographic order."""
    blocks = []
    for m in range(n):
        k = p**m
        pts = np.zeros((k, n), dtype=np.int64)
        if m:
            grid = np.indices((p,) * m).reshape(m, -1).T
            pts[:, :m] = grid
        pts[:, m] = 1
        blocks.append(pts)
    P = np.concatenate(blocks)
    order = np.lexsort(P.T[::-1])
    return P[order]


def _pivots(P: np.ndarray) -> np.ndarray:
    n = P.shape[1]
    nz = P != 0
    return n - 1 - np.argmax(nz[:, ::-1], axis=1)


class _Tables:
    """Precomputed omega-pairings of F_v and Λ³(ker c) frames against A."""

    def __init__(self, L: LagrangianData):
        f = L.field
        self.p = f.p
        A = [list(a) for a in L.A.basis]
        idx3 = basis_index(6, 3)
        # omega(e_T, a_k) for every sorted triple T
        self.wA = np.zeros((20, 10), dtype=np.int64)
        for t in range(20):
            eT = [int(s == t) for s in range(20)]
            for k in range(10):
                self.wA[t, k] = omega_vec(eT, A[k], f)
        # primal: row(v) = sum_l v_l e_l ^ e_i ^ e_j for pairs avoiding the pivot
        self.primal = {}
        for m in range(6):
            rest = [i for i in range(6) if i != m]
            pairs = list(combinations(rest, 2))
            T = np.zeros((6, 10, 20), dtype=np.int64)
            for pi, (i, j) in enumerate(pairs):
                for l in range(6):
                    if l in (i, j):
                        continue
                    s, S = sort_sign((l, i, j))
                    T[l, pi, idx3[S]] = s
            self.primal[m] = np.einsum("lpt,tk->lpk", T, self.wA) % self.p
        # dual: f_i = e_i - c_i e_m, rows f_a ^ f_b ^ f_d
        self.dual = {}
        for m in range(6):
            rest = [i for i in range(6) if i != m]
            R0 = np.zeros((10, 20), dtype=np.int64)
            R = np.zeros((6, 10, 20), dtype=np.int64)
            for ti, tri in enumerate(combinations(rest, 3)):
                R0[ti, idx3[tri]] = 1
                for pos, l in enumerate(tri):
                    rep = list(tri)
                    rep[pos] = m
                    s, S = sort_sign(rep)
                    R[l, ti, idx3[S]] -= s
            self.dual[m] = (R0 @ self.wA % self.p, np.einsum("lts,sk->ltk", R, self.wA) % self.p)

    def primal_matrices(self, P: np.ndarray, m: int) -> np.ndarray:
        return np.einsum("nl,lpk->npk", P, self.primal[m]) % self.p

    def dual_matrices(self, C: np.ndarray, m: int) -> np.ndarray:
        R0, R = self.dual[m]
        return (R0[None] + np.einsum("nl,ltk->ntk", C, R)) % self.p


def _strata(tables: _Tables, P: np.ndarray, dual: bool) -> np.ndarray:
    out = np.zeros(len(P), dtype=np.int64)
    piv = _pivots(P)
    for m in range(6):
        sel = np.nonzero(piv == m)[0]
        if not len(sel):
            continue
        M = tables.dual_matrices(P[sel], m) if dual else tables.primal_matrices(P[sel], m)
        out[sel] = 10 - batched_rank(M, tables.p)
    return out


def strata_of_points(L: LagrangianData, P, dual: bool = False) -> np.ndarray:
    """Stratum (or dual stratum) dimension at each normalised row of P."""
    _need_prime(L.field)
    return _strata(_Tables(L), np.asarray(P, dtype=np.int64) % L.field.p, dual)


def _need_prime(f: Field) -> int:
    if not isinstance(f, PrimeField):
        raise ValueError("census scans need a datum over a prime field")
    return f.p


# ---------------------------------------------------------------------------
# reports


@dataclass
class CensusReport:
    p: int
    counts: dict
    dual_counts: dict
    witnesses: dict = dc_field(default_factory=dict)
    dual_witnesses: dict = dc_field(default_factory=dict)
    bad_prime: bool = False
    note: str = ""

    @property
    def total(self) -> int:
        return projective_size(6, self.p)

    def count_at_least(self, k: int, dual: bool = False) -> int:
        c = self.dual_counts if dual else self.counts
        return sum(v for s, v in c.items() if s >= k)

    def reverify(self, L: LagrangianData) -> bool:
        for k, pts in self.witnesses.items():
            if any(stratum_dim(L, v) != k for v in pts):
                return False
        for k, pts in self.dual_witnesses.items():
            if any(dual_stratum_dim(L, c) != k for c in pts):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "census",
            "prime": self.p,
            "bad_prime": self.bad_prime,
            "note": self.note,
            "points": self.total if not self.bad_prime else 0,
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "dual_counts": {str(k): v for k, v in sorted(self.dual_counts.items())},
            "witnesses": {str(k): v for k, v in sorted(self.witnesses.items())},
            "dual_witnesses": {str(k): v for k, v in sorted(self.dual_witnesses.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def bad(cls, p: int, reason: str) -> "CensusReport":
        return cls(p, {}, {}, bad_prime=True, note=reason)


def _scan_chunk(tables: _Tables, P: np.ndarray):
    return _strata(tables, P, False), _strata(tables, P, True)


def scan_strata(L: LagrangianData, threads: int = 1, point_bound: int = DEFAULT_POINT_BOUND,
                witness_min: int = 2) -> CensusReport:
    """Stratum histograms over all of P(V6)(F_p) and P(V6^∨)(F_p)."""
    p = _need_prime(L.field)
    if projective_size(6, p) > point_bound:
        raise PointBoundError(f"P^5(F_{p}) has {projective_size(6, p)} points, bound is {point_bound}")
    tables = _Tables(L)
    P = projective_points(6, p)
    chunks = [P[i:i + CHUNK] for i in range(0, len(P), CHUNK)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(lambda c: _scan_chunk(tables, c), chunks))
    else:
        results = [_scan_chunk(tables, c) for c in chunks]
    s = np.concatenate([r[0] for r in results])
    d = np.concatenate([r[1] for r in results])
    rep = CensusReport(p, _histogram(s), _histogram(d))
    rep.witnesses = _witnesses(P, s, witness_min)
    rep.dual_witnesses = _witnesses(P, d, witness_min)
    return rep


def _histogram(s: np.ndarray) -> dict:
    ks, cs = np.unique(s, return_counts=True)
    return {int(k): int(c) for k, c in zip(ks, cs)}


def _witnesses(P: np.ndarray, s: np.ndarray, kmin: int) -> dict:
    out = {}
    for k in sorted(set(int(x) for x in s)):
        if k >= kmin:
            out[k] = [[int(c) for c in row] for row in P[s == k]]
    return out


def census(L: LagrangianData, primes=DEFAULT_PRIMES, threads: int = 1,
           point_bound: int = DEFAULT_POINT_BOUND) -> list[CensusReport]:
    """One report per prime; a rational datum is reduced first, bad primes are flagged."""
    out = []
    for p in primes:
        if L.field == QQ:
            try:
                Lp = reduce_mod_p(L, p)
            except BadPrimeError as exc:
                out.append(CensusReport.bad(p, str(exc)))
                continue
        else:
            if L.field.p != p:
                raise ValueError(f"datum lives over F_{L.field.p}, not F_{p}")
            Lp = L
        out.append(scan_strata(Lp, threads, point_bound))
    return out


# ---------------------------------------------------------------------------
# lines on GM surfaces


def _hull_dims(G: GMData, P: np.ndarray) -> np.ndarray:
    """dim(ker P_v ∩ W) for rows v of P (points of P(V5)), batched."""
    p = G.field.p
    idx = basis_index(5, 2)
    # annihilator of W in the dual of Λ²V5
    ann = np.array(nullspace(G.W.rows(), G.field, 10), dtype=np.int64).reshape(-1, 10)
    out = np.zeros(len(P), dtype=np.int64)
    piv = _pivots(P)
    for m in range(5):
        sel = np.nonzero(piv == m)[0]
        if not len(sel):
            continue
        rest = [i for i in range(5) if i != m]
        # v ^ e_i = sum_l v_l e_l ^ e_i
        T = np.zeros((5, 4, 10), dtype=np.int64)
        for a, i in enumerate(rest):
            for l in range(5):
                if l == i:
                    continue
                s, S = sort_sign((l, i))
                T[l, a, idx[S]] = s
        rows = np.einsum("nl,lak->nak", P[sel], T) % p
        M = np.einsum("nak,bk->nab", rows, ann) % p
        out[sel] = 4 - batched_rank(M, p) if ann.size else 4
    return out


def _need_surface(G: GMData):
    if G.W.dim != 7:
        raise InvariantError(f"expected a GM surface (dim W = 7), got dim W = {G.W.dim}")


def scan_lines(G: GMData) -> list[tuple]:
    """All v in P(V5)(F_p) with dim(ker P_v ∩ W) = 2 and q(e6) vanishing there."""
    _need_surface(G)
    p = _need_prime(G.field)
    P = projective_points(5, p)
    hull = _hull_dims(G, P)
    out = []
    for row in P[hull == 2]:
        v = [int(c) for c in row]
        K = hull_kernel(G, v)
        if all(G.field.is_zero(c) for r in _qx_on(G, K.rows()) for c in r):
            out.append(tuple(v))
    return out


@dataclass
class EquivalenceReport:
    p: int
    points: int
    stratum3: int
    lines: int
    counterexamples: list
    hull_dims: dict
    max_stratum: int

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "kind": "line_equivalence", "prime": self.p,
                "points": self.points, "stratum3": self.stratum3, "lines": self.lines,
                "counterexamples": self.counterexamples,
                "hull_dims": {str(k): v for k, v in sorted(self.hull_dims.items())},
                "max_stratum": self.max_stratum}


def verify_equivalence(G: GMData) -> EquivalenceReport:
    """Check [stratum = 3] ⇔ [line through v] at every v in P(V5)(F_p)."""
    _need_surface(G)
    p = _need_prime(G.field)
    L = gm_to_lagrangian(G)
    P5 = projective_points(5, p)
    P = np.concatenate([P5, np.zeros((len(P5), 1), dtype=np.int64)], axis=1)
    s = strata_of_points(L, P)
    lines = set(scan_lines(G))
    bad = []
    for row, k in zip(P5, s):
        v = tuple(int(c) for c in row)
        if (int(k) == 3) != (v in lines):
            bad.append({"point": list(v), "stratum": int(k), "line": v in lines})
    return EquivalenceReport(p, len(P5), int((s == 3).sum()), len(lines), bad,
                             _histogram(_hull_dims(G, P5)), int(s.max()))


# ---------------------------------------------------------------------------
# decomposable vectors of A over F_p


def _wedge_with_vectors_tensor() -> np.ndarray:
    # Tw[u, T, Q] = sign with e_u ^ e_T = sign * e_Q (Q a sorted 4-subset)
    idx3 = basis_index(6, 3)
    idx4 = basis_index(6, 4)
    Tw = np.zeros((6, 20, 15), dtype=np.int64)
    for u in range(6):
        for T, t in idx3.items():
            if u in T:
                continue
            s, Q = sort_sign((u,) + T)
            Tw[u, t, idx4[Q]] = s
    return Tw


def decomposable_mask(etas: np.ndarray, p: int) -> np.ndarray:
    """Whether each nonzero row (a 3-vector) is decomposable: u -> u ^ eta has rank 3."""
    M = np.einsum("nt,utq->nuq", np.asarray(etas, dtype=np.int64) % p, _wedge_with_vectors_tensor()) % p
    return batched_rank(M, p) == 3


def decomposable_vectors(L: LagrangianData, point_bound: int = DEFAULT_POINT_BOUND) -> list[tuple]:
    """All decomposable vectors of A over F_p, up to scalars (exhaustive).

    A decomposable u1^u2^u3 in A lies in F_v ∩ A for every F_p-point v of
    span(u1, u2, u3), so scanning F_v ∩ A over P(V6)(F_p) finds all of them.
    At a point with dim(F_v ∩ A) = k the whole of P^{k-1}(F_p) is scanned;
    PointBoundError is raised if that exceeds ``point_bound``.
    """
    p = _need_prime(L.field)
    tables = _Tables(L)
    A = np.array([list(a) for a in L.A.basis], dtype=np.int64)
    P = projective_points(6, p)
    s = _strata(tables, P, False)
    if s.max() >= 2 and projective_size(int(s.max()), p) > point_bound:
        raise PointBoundError(f"F_v ∩ A has dimension {int(s.max())}; too many points to scan")
    piv = _pivots(P)
    found = set()

    def collect(etas):
        for i in range(0, len(etas), CHUNK):
            block = etas[i:i + CHUNK]
            for eta in block[decomposable_mask(block, p)]:
                found.add(_normalize_row(eta, p))

    for m in range(6):
        sel = np.nonzero((piv == m) & (s == 1))[0]
        if len(sel):
            # F_v ∩ A = A-combinations y with (pairing matrix) y = 0
            ker = corank_one_kernels(tables.primal_matrices(P[sel], m), p)
            collect(ker @ A % p)
        for i in np.nonzero((piv == m) & (s >= 2))[0]:
            M = tables.primal_matrices(P[i:i + 1], m)[0]
            ker = np.array(nullspace(M.tolist(), L.field, 10), dtype=np.int64)
            collect(projective_points(len(ker), p) @ ker @ A % p)
    return sorted(found)


def _normalize_row(v, p: int) -> tuple:
    v = [int(c) % p for c in v]
    for c in reversed(v):
        if c:
            inv = pow(c, -1, p)
            return tuple(x * inv % p for x in v)
    raise ValueError("zero vector")
