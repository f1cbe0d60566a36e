"""Exact integer-matrix algebra.

Smith and Hermite normal forms over Z, lattice saturation, integer kernels
and invariant factors of finitely generated abelian quotients.  Everything
runs on Python ints, so there is no overflow and no floating point.

Lattices are always given by *rows*: a matrix with ``n`` columns describes
the sublattice of Z^n spanned by its rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DimensionError, DomainError

__all__ = [
    "IntegerMatrix",
    "InvariantFactors",
    "SmithDecomposition",
    "smith_decomposition",
    "smith_invariants",
    "hermite_normal_form",
    "rank",
    "lattice_quotient_invariants",
    "saturate",
    "integer_kernel",
    "coordinates_in_basis",
    "relative_quotient_invariants",
]


@dataclass(frozen=True)
class IntegerMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: int | None = None) -> IntegerMatrix:
        data = [tuple(int(x) for x in r) for r in rows]
        if cols is None:
            if not data:
                raise DimensionError("column count required for a matrix with no rows")
            cols = len(data[0])
        for r in data:
            if len(r) != cols:
                raise DimensionError(f"row of length {len(r)} in a matrix with {cols} columns")
        return cls(len(data), cols, tuple(x for r in data for x in r))

    @classmethod
    def identity(cls, n: int) -> IntegerMatrix:
        return cls.from_rows(([int(i == j) for j in range(n)] for i in range(n)), n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntegerMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def T(self) -> IntegerMatrix:
        return IntegerMatrix.from_rows(
            ([self[i, j] for i in range(self.rows)] for j in range(self.cols)), self.rows
        )

    def __matmul__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = [other.entries[j::other.cols] for j in range(other.cols)] if other.cols else []
        out = []
        for i in range(self.rows):
            r = self.row(i)
            out.append([sum(a * b for a, b in zip(r, c)) for c in cols])
        return IntegerMatrix.from_rows(out, other.cols)

    def __sub__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return IntegerMatrix(self.rows, self.cols,
                             tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __add__(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return IntegerMatrix(self.rows, self.cols,
                             tuple(a + b for a, b in zip(self.entries, other.entries)))

    def vstack(self, other: IntegerMatrix) -> IntegerMatrix:
        if self.cols != other.cols:
            raise DimensionError("vstack needs equal column counts")
        return IntegerMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Matrix times column vector."""
        if len(vec) != self.cols:
            raise DimensionError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(self.row(i), vec)) for i in range(self.rows))

    def is_zero(self) -> bool:
        return not any(self.entries)


@dataclass(frozen=True)
class InvariantFactors:
    """Invariant factors of a finitely generated abelian group.

    ``factors`` holds the torsion invariants d_1 | d_2 | ... (each >= 2),
    ``free_rank`` the rank of the free part.  Empty factors with free rank
    0 is the trivial group.
    """

    factors: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self) -> None:
        if self.free_rank < 0:
            raise DomainError("negative free rank")
        for d in self.factors:
            if d < 2:
                raise DomainError(f"invariant factor {d} < 2")
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise DomainError(f"invariant factors {a}, {b} do not divide")

    @property
    def is_trivial(self) -> bool:
        return not self.factors and self.free_rank == 0

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        """Group order, or None when the free rank is positive."""
        if self.free_rank:
            return None
        out = 1
        for d in self.factors:
            out *= d
        return out

    @property
    def torsion(self) -> InvariantFactors:
        return InvariantFactors(self.factors, 0)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " x ".join(parts) if parts else "0"


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ M @ V == D`` with U, V unimodular and D diagonal.

    ``diagonal`` lists the nonzero diagonal entries d_1 | d_2 | ... | d_r.
    ``V_inv`` is the inverse of V; U is only present when requested.
    """

    diagonal: tuple[int, ...]
    V: IntegerMatrix | None
    V_inv: IntegerMatrix | None
    U: IntegerMatrix | None

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def _identity_rows(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _smallest_entry(A: list[list[int]], t: int, m: int, n: int):
    best = None
    best_abs = 0
    for i in range(t, m):
        row = A[i]
        for j in range(t, n):
            a = row[j]
            if a:
                aa = abs(a)
                if best is None or aa < best_abs:
                    best, best_abs = (i, j), aa
                    if aa == 1:
                        return best
    return best


class _Smith:
    # Mutable working state for one reduction; kept private so the public
    # functions stay pure.

    def __init__(self, rows: list[list[int]], m: int, n: int, track_u: bool, track_v: bool):
        self.A = rows
        self.m, self.n = m, n
        self.U = _identity_rows(m) if track_u else None
        self.V = _identity_rows(n) if track_v else None
        self.Vi = _identity_rows(n) if track_v else None

    def swap_rows(self, i: int, k: int) -> None:
        if i == k:
            return
        A = self.A
        A[i], A[k] = A[k], A[i]
        if self.U is not None:
            self.U[i], self.U[k] = self.U[k], self.U[i]

    def swap_cols(self, j: int, k: int) -> None:
        if j == k:
            return
        for row in self.A:
            row[j], row[k] = row[k], row[j]
        if self.V is not None:
            for row in self.V:
                row[j], row[k] = row[k], row[j]
            self.Vi[j], self.Vi[k] = self.Vi[k], self.Vi[j]

    def add_row(self, i: int, t: int, q: int, start: int) -> None:
        # row_i += q * row_t
        ri, rt = self.A[i], self.A[t]
        for j in range(start, self.n):
            if rt[j]:
                ri[j] += q * rt[j]
        if self.U is not None:
            ui, ut = self.U[i], self.U[t]
            for j in range(self.m):
                if ut[j]:
                    ui[j] += q * ut[j]

    def add_col(self, j: int, t: int, q: int, start: int) -> None:
        # col_j += q * col_t
        for i in range(start, self.m):
            row = self.A[i]
            if row[t]:
                row[j] += q * row[t]
        if self.V is not None:
            for row in self.V:
                if row[t]:
                    row[j] += q * row[t]
            # inverse: row_t -= q * row_j
            vt, vj = self.Vi[t], self.Vi[j]
            for k in range(self.n):
                if vj[k]:
                    vt[k] -= q * vj[k]

    def negate_row(self, t: int) -> None:
        row = self.A[t]
        for j in range(self.n):
            row[j] = -row[j]
        if self.U is not None:
            self.U[t] = [-x for x in self.U[t]]

    def run(self) -> list[int]:
        A, m, n = self.A, self.m, self.n
        diag: list[int] = []
        t = 0
        while t < min(m, n):
            piv = _smallest_entry(A, t, m, n)
            if piv is None:
                break
            self.swap_rows(t, piv[0])
            self.swap_cols(t, piv[1])
            while True:
                p = A[t][t]
                clean = True
                for i in range(t + 1, m):
                    a = A[i][t]
                    if a:
                        self.add_row(i, t, -(a // p), t)
                        if A[i][t]:
                            clean = False
                for j in range(t + 1, n):
                    a = A[t][j]
                    if a:
                        self.add_col(j, t, -(a // p), t)
                        if A[t][j]:
                            clean = False
                if not clean:
                    # a remainder smaller than the pivot appeared in row or column t
                    cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                    cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                    _, i, j = min(cand)
                    self.swap_rows(t, i)
                    self.swap_cols(t, j)
                    continue
                bad = None
                for i in range(t + 1, m):
                    row = A[i]
                    for j in range(t + 1, n):
                        if row[j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                self.add_row(t, bad, 1, t)
            if A[t][t] < 0:
                self.negate_row(t)
            diag.append(A[t][t])
            t += 1
        return diag


def _as_rows(M: IntegerMatrix) -> list[list[int]]:
    return [list(M.row(i)) for i in range(M.rows)]


def smith_decomposition(M: IntegerMatrix, *, with_u: bool = False,
                        with_v: bool = True) -> SmithDecomposition:
    """Smith normal form with transforms.

    Pivoting picks the smallest nonzero absolute value, ties broken by
    (row, col), so the transforms are deterministic for a given input.
    """
    s = _Smith(_as_rows(M), M.rows, M.cols, with_u, with_v)
    diag = s.run()
    V = IntegerMatrix.from_rows(s.V, M.cols) if with_v else None
    Vi = IntegerMatrix.from_rows(s.Vi, M.cols) if with_v else None
    U = IntegerMatrix.from_rows(s.U, M.rows) if with_u else None
    return SmithDecomposition(tuple(diag), V, Vi, U)


def smith_invariants(M: IntegerMatrix) -> tuple[int, ...]:
    """Nonzero Smith invariants d_1 | ... | d_r, 1-entries included."""
    return smith_decomposition(M, with_v=False).diagonal


def rank(M: IntegerMatrix) -> int:
    return len(smith_invariants(M))


def _check_ambient(M: IntegerMatrix, ambient_rank: int) -> None:
    if M.cols != ambient_rank:
        raise DimensionError(
            f"generators have {M.cols} columns but the ambient lattice has rank {ambient_rank}"
        )


def lattice_quotient_invariants(sub_generators: IntegerMatrix, ambient_rank: int) -> InvariantFactors:
    """Invariants of Z^ambient_rank modulo the row span of ``sub_generators``."""
    _check_ambient(sub_generators, ambient_rank)
    diag = smith_invariants(sub_generators)
    return InvariantFactors(tuple(d for d in diag if d > 1), ambient_rank - len(diag))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(M: IntegerMatrix) -> IntegerMatrix:
    """Row-style Hermite normal form, zero rows dropped.

    Pivots are positive and entries above each pivot lie in [0, pivot).
    Two matrices span the same lattice iff their HNFs are equal.
    """
    A = _as_rows(M)
    m, n = M.rows, M.cols
    r = 0
    for j in range(n):
        if r == m:
            break
        # fold every entry of column j below row r into row r
        for i in range(r + 1, m):
            b = A[i][j]
            if not b:
                continue
            a = A[r][j]
            if not a:
                A[r], A[i] = A[i], A[r]
                continue
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            ra, rb = A[r], A[i]
            A[r] = [x * u + y * w for u, w in zip(ra, rb)]
            A[i] = [-bg * u + ag * w for u, w in zip(ra, rb)]
        p = A[r][j]
        if not p:
            continue
        if p < 0:
            A[r] = [-u for u in A[r]]
            p = -p
        for i in range(r):
            q = A[i][j] // p
            if q:
                A[i] = [u - q * w for u, w in zip(A[i], A[r])]
        r += 1
    return IntegerMatrix.from_rows(A[:r], n)


def saturate(sub_generators: IntegerMatrix, ambient_rank: int) -> IntegerMatrix:
    """Basis (HNF rows) of (span_Q(rows) ∩ Z^n).

    From U M V = D the row space of M is spanned by d_i * w_i where w_i are
    the rows of V^-1; the first rank(M) rows of V^-1 span the saturation.
    """
    _check_ambient(sub_generators, ambient_rank)
    sd = smith_decomposition(sub_generators)
    basis = [sd.V_inv.row(i) for i in range(sd.rank)]
    return hermite_normal_form(IntegerMatrix.from_rows(basis, ambient_rank))


def integer_kernel(M: IntegerMatrix) -> IntegerMatrix:
    """Rows form a basis of {x in Z^cols : M x = 0}, in HNF."""
    sd = smith_decomposition(M)
    n = M.cols
    cols = [[sd.V[i, j] for i in range(n)] for j in range(sd.rank, n)]
    if not cols:
        return IntegerMatrix.zeros(0, n)
    return hermite_normal_form(IntegerMatrix.from_rows(cols, n))


def coordinates_in_basis(basis: IntegerMatrix, vectors: IntegerMatrix) -> IntegerMatrix:
    """Integer coordinates of each row of ``vectors`` w.r.t. the rows of ``basis``.

    ``basis`` must have independent rows.  Raises DomainError when a vector
    is not in the lattice spanned by ``basis``.
    """
    if basis.cols != vectors.cols:
        raise DimensionError("basis and vectors live in different ambient ranks")
    k = basis.rows
    sd = smith_decomposition(basis, with_u=True)
    if sd.rank != k:
        raise DomainError("basis rows are linearly dependent")
    # x = c B,  U B V = D  =>  x V = (c U^-1) D
    out = []
    for i in range(vectors.rows):
        xv = IntegerMatrix.from_rows([vectors.row(i)], vectors.cols) @ sd.V
        y = []
        for t in range(vectors.cols):
            val = xv[0, t]
            if t < k:
                d = sd.diagonal[t]
                if val % d:
                    raise DomainError(f"vector {vectors.row(i)} is not in the lattice")
                y.append(val // d)
            elif val:
                raise DomainError(f"vector {vectors.row(i)} is not in the rational span")
        c = IntegerMatrix.from_rows([y], k) @ sd.U
        out.append(c.row(0))
    return IntegerMatrix.from_rows(out, k)


def relative_quotient_invariants(sub: IntegerMatrix, sup: IntegerMatrix) -> InvariantFactors:
    """Invariants of span(sup)/span(sub) for lattices sub ⊆ sup (rows)."""
    basis = hermite_normal_form(sup)
    coords = coordinates_in_basis(basis, sub)
    return lattice_quotient_invariants(coords, basis.rows)
