"""Local invariants of tori from integral Galois actions.

Matrices act on *column* vectors (left modules).  Use
:func:`cmtori.reciprocity.cocharacter_action` to turn a signed permutation
acting on the right into such a matrix.

Group cohomology uses the inhomogeneous cochain complex

    (d0 m)(g)       = g m - m
    (d1 f)(g, h)    = g f(h) - f(gh) + f(g)
    (d2 c)(g, h, k) = g c(h, k) - c(gh, k) + c(g, hk) - c(g, h)

For a finite group H^k(G, M) is torsion when k >= 1, so the cocycles Z^k
are exactly the saturation of the coboundaries B^k and H^k is the torsion
of coker(d^{k-1}).  The default ``method="torsion"`` uses that; the
``"explicit"`` method computes ker(d^k) and expresses B^k in its basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath.ctx_mp import MPContext

from .arith import lambda_const
from .errors import (
    DimensionError,
    DomainError,
    PreconditionError,
    ResourceError,
    StructureError,
)
from .exactalg import (
    IntegerMatrix,
    InvariantFactors,
    integer_kernel,
    rank,
    relative_quotient_invariants,
    smith_invariants,
)

__all__ = [
    "LatticeAction",
    "RamificationFiltration",
    "ConductorValue",
    "QuasiDiscInputs",
    "QuasiDiscriminant",
    "TameConductorReport",
    "matrix_order",
    "invariant_rank",
    "artin_conductor",
    "h1_cyclic",
    "h1_general",
    "h2_general",
    "component_group_order",
    "quasi_discriminant",
    "tame_conductor_check",
    "H1_ORDER_CAP",
    "H2_ORDER_CAP",
]

H1_ORDER_CAP = 100
H2_ORDER_CAP = 24
MATRIX_ORDER_CAP = 10_000
ACTION_CLOSURE_CAP = 100_000


def _identity(d: int) -> IntegerMatrix:
    return IntegerMatrix.identity(d)


def matrix_order(M: IntegerMatrix, cap: int = MATRIX_ORDER_CAP) -> int:
    """Multiplicative order of a square integer matrix."""
    if M.rows != M.cols:
        raise DimensionError("matrix_order needs a square matrix")
    ident = _identity(M.rows)
    P = M
    for n in range(1, cap + 1):
        if P == ident:
            return n
        P = P @ M
    raise DomainError(f"matrix has no finite order <= {cap}")


@dataclass(frozen=True)
class LatticeAction:
    """A finite group of d x d integer matrices, listed with its identity."""

    dim: int
    matrices: tuple[IntegerMatrix, ...]

    def __post_init__(self) -> None:
        ident = _identity(self.dim)
        keys = {m.entries for m in self.matrices}
        for m in self.matrices:
            if m.shape != (self.dim, self.dim):
                raise DimensionError(f"matrix of shape {m.shape} in a rank-{self.dim} action")
        if ident.entries not in keys:
            raise StructureError("identity missing from the action")
        for a in self.matrices:
            for b in self.matrices:
                if (a @ b).entries not in keys:
                    raise StructureError("matrix set is not closed under multiplication")

    @property
    def order(self) -> int:
        return len(self.matrices)

    @classmethod
    def generate(cls, generators: Iterable[IntegerMatrix], dim: int,
                 cap: int = ACTION_CLOSURE_CAP) -> LatticeAction:
        gens = list(generators)
        for m in gens:
            if m.shape != (dim, dim):
                raise DimensionError(f"generator of shape {m.shape}, expected {dim}x{dim}")
            matrix_order(m)
        ident = _identity(dim)
        seen = {ident.entries: ident}
        todo = [ident]
        while todo:
            x = todo.pop()
            for s in gens:
                y = x @ s
                if y.entries not in seen:
                    seen[y.entries] = y
                    if len(seen) > cap:
                        raise ResourceError(f"action closure exceeds {cap} elements")
                    todo.append(y)
        return cls(dim, tuple(seen[k] for k in sorted(seen)))

    @classmethod
    def cyclic(cls, sigma: IntegerMatrix) -> LatticeAction:
        return cls.generate([sigma], sigma.rows)

    def keys(self) -> frozenset[tuple[int, ...]]:
        return frozenset(m.entries for m in self.matrices)

    def index_of(self) -> dict[tuple[int, ...], int]:
        return {m.entries: i for i, m in enumerate(self.matrices)}


def invariant_rank(matrices: Sequence[IntegerMatrix], dim: int) -> int:
    """Rank of the invariant sublattice: dim - rank of stacked (M - I)."""
    if not matrices:
        return dim
    ident = _identity(dim)
    stacked = matrices[0] - ident
    for m in matrices[1:]:
        stacked = stacked.vstack(m - ident)
    return dim - rank(stacked)


@dataclass(frozen=True)
class RamificationFiltration:
    """Decreasing chain Delta_0 ⊇ Delta_1 ⊇ ... of finite actions on Z^d."""

    levels: tuple[LatticeAction, ...]

    def __post_init__(self) -> None:
        if not self.levels:
            raise StructureError("a filtration needs at least the inertia level")
        d = self.levels[0].dim
        for i, (a, b) in enumerate(zip(self.levels, self.levels[1:]), start=1):
            if b.dim != d:
                raise DimensionError("filtration levels act on different ranks")
            if not b.keys() <= a.keys():
                raise StructureError(f"level {i} is not a subgroup of level {i - 1}")

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(level.order for level in self.levels)

    @property
    def dim(self) -> int:
        return self.levels[0].dim


@dataclass(frozen=True)
class ConductorValue:
    value: Fraction
    integral: bool


def artin_conductor(filtration: RamificationFiltration, module_dim: int | None = None) -> ConductorValue:
    """sum_i (g_i / g_0) * (d - rank of the Delta_i-invariants).

    The sum may be non-integral for a filtration that does not come from a
    local Galois extension; ``integral`` flags that case.
    """
    d = filtration.dim
    if module_dim is not None and module_dim != d:
        raise DimensionError(f"filtration acts on Z^{d}, not Z^{module_dim}")
    g0 = filtration.levels[0].order
    total = Fraction(0)
    for level in filtration.levels:
        total += Fraction(level.order, g0) * (d - invariant_rank(level.matrices, d))
    return ConductorValue(total, total.denominator == 1)


def _norm_matrix(sigma: IntegerMatrix, n: int) -> IntegerMatrix:
    total = IntegerMatrix.zeros(sigma.rows, sigma.cols)
    P = _identity(sigma.rows)
    for _ in range(n):
        total = total + P
        P = P @ sigma
    return total


def h1_cyclic(sigma: IntegerMatrix) -> InvariantFactors:
    """H^1(<sigma>, Z^d) = ker(N) / im(sigma - 1), N = 1 + sigma + ... + sigma^(n-1)."""
    n = matrix_order(sigma)
    d = sigma.rows
    kernel = integer_kernel(_norm_matrix(sigma, n))
    if kernel.rows == 0:
        return InvariantFactors()
    image = (sigma - _identity(d)).T  # rows = images of the basis vectors
    return _quotient(image, kernel)


def _quotient(image_rows: IntegerMatrix, kernel: IntegerMatrix) -> InvariantFactors:
    nonzero = [image_rows.row(i) for i in range(image_rows.rows) if any(image_rows.row(i))]
    if kernel.rows == 0:
        return InvariantFactors()
    if not nonzero:
        return InvariantFactors((), kernel.rows)
    return relative_quotient_invariants(IntegerMatrix.from_rows(nonzero, kernel.cols), kernel)


def _coboundary_0(action: LatticeAction) -> IntegerMatrix:
    d = action.dim
    ident = _identity(d)
    out = IntegerMatrix.zeros(0, d)
    for m in action.matrices:
        out = out.vstack(m - ident)
    return out


def _coboundary_1(action: LatticeAction) -> IntegerMatrix:
    d, G = action.dim, action.matrices
    n = len(G)
    idx = action.index_of()
    rows = []
    for gi, g in enumerate(G):
        for hi, h in enumerate(G):
            ghi = idx[(g @ h).entries]
            for r in range(d):
                row = [0] * (n * d)
                for c in range(d):
                    row[hi * d + c] += g[r, c]
                row[ghi * d + r] -= 1
                row[gi * d + r] += 1
                rows.append(row)
    return IntegerMatrix.from_rows(rows, n * d)


def _coboundary_2(action: LatticeAction) -> IntegerMatrix:
    d, G = action.dim, action.matrices
    n = len(G)
    idx = action.index_of()
    prod = [[idx[(a @ b).entries] for b in G] for a in G]
    rows = []
    for gi, g in enumerate(G):
        for hi in range(n):
            for ki in range(n):
                ghi, hki = prod[gi][hi], prod[hi][ki]
                for r in range(d):
                    row = [0] * (n * n * d)
                    for c in range(d):
                        row[(hi * n + ki) * d + c] += g[r, c]
                    row[(ghi * n + ki) * d + r] -= 1
                    row[(gi * n + hki) * d + r] += 1
                    row[(gi * n + hi) * d + r] -= 1
                    rows.append(row)
    return IntegerMatrix.from_rows(rows, n * n * d)


def _torsion_of_cokernel(M: IntegerMatrix) -> InvariantFactors:
    return InvariantFactors(tuple(x for x in smith_invariants(M) if x > 1))


def _check_method(method: str) -> None:
    if method not in ("torsion", "explicit"):
        raise DomainError(f"unknown cohomology method {method!r}")


def h1_general(action: LatticeAction, method: str = "torsion",
               order_cap: int = H1_ORDER_CAP) -> InvariantFactors:
    _check_method(method)
    if action.order > order_cap:
        raise ResourceError(f"|G| = {action.order} exceeds the H^1 cap {order_cap}")
    d0 = _coboundary_0(action)
    if method == "torsion":
        return _torsion_of_cokernel(d0)
    return _quotient(d0.T, integer_kernel(_coboundary_1(action)))


def h2_general(action: LatticeAction, method: str = "torsion",
               order_cap: int = H2_ORDER_CAP) -> InvariantFactors:
    _check_method(method)
    if action.order > order_cap:
        raise ResourceError(f"|G| = {action.order} exceeds the H^2 cap {order_cap}")
    d1 = _coboundary_1(action)
    if method == "torsion":
        return _torsion_of_cokernel(d1)
    return _quotient(d1.T, integer_kernel(_coboundary_2(action)))


def component_group_order(inertia: IntegerMatrix) -> int:
    """|H^1(I, X)| for cyclic inertia acting without nonzero invariants.

    In that (anisotropic, tame) situation this is the order of the group of
    components of the finite-type Neron model.
    """
    if invariant_rank([inertia], inertia.rows):
        raise PreconditionError(
            "inertia fixes a nonzero vector: split the maximal split subtorus off first"
        )
    return h1_cyclic(inertia).order


@dataclass(frozen=True)
class QuasiDiscInputs:
    """Inputs of the closed formula for the quasi-discriminant.

    ``a, b, c`` describe T_R = G_m^a x S^b x SO(2)^c, so dim T = a + 2b + c.
    """

    a_T: int
    a: int
    b: int
    c: int
    component_orders: tuple[int, ...] = ()
    dim: int | None = None

    def __post_init__(self) -> None:
        if self.a_T < 1:
            raise DomainError("the Artin conductor a(T) must be a positive integer")
        if min(self.a, self.b, self.c) < 0:
            raise DomainError("a, b, c must be nonnegative")
        if any(x < 1 for x in self.component_orders):
            raise DomainError("component group orders must be positive")
        if self.dim is not None and self.a + 2 * self.b + self.c != self.dim:
            raise DimensionError(
                f"a + 2b + c = {self.a + 2 * self.b + self.c} but dim T = {self.dim}"
            )


@dataclass(frozen=True)
class QuasiDiscriminant:
    """D_T = numerator / (denominator * (2 pi)^two_pi_power)."""

    numerator: int
    denominator: int
    two_pi_power: int
    value: object  # mpf at ``digits`` significant digits
    digits: int

    def symbolic(self) -> str:
        tail = f" * (2*pi)^{self.two_pi_power}" if self.two_pi_power else ""
        return f"{self.numerator} / ({self.denominator}{tail})"


def quasi_discriminant(inputs: QuasiDiscInputs, digits: int = 50) -> QuasiDiscriminant:
    """a(T) / (2^{2a} (2 pi)^{2b+2c} prod |phi_p|^2)."""
    den = 4 ** inputs.a
    for x in inputs.component_orders:
        den *= x * x
    power = 2 * inputs.b + 2 * inputs.c
    ctx = MPContext()
    ctx.dps = digits + 10
    val = ctx.mpf(inputs.a_T) / (den * (2 * ctx.pi) ** power)
    ctx.dps = digits
    return QuasiDiscriminant(inputs.a_T, den, power, +val, digits)


@dataclass(frozen=True)
class TameConductorReport:
    e: int
    d: int
    conductor: int
    lambda_d: Fraction
    lower_bound: Fraction
    holds: bool


def tame_conductor_check(sigma: IntegerMatrix, e: int | None = None) -> TameConductorReport:
    """Compare the tame conductor d - rank(invariants) with lambda(d) (e - 1)."""
    d = sigma.rows
    n = matrix_order(sigma)
    if e is None:
        e = n
    if n != e:
        raise PreconditionError(
            f"generator has order {n}, so Z/{e} does not act faithfully through it"
        )
    a = d - invariant_rank([sigma], d)
    lam = lambda_const(d)
    bound = lam * (e - 1)
    return TameConductorReport(e, d, a, lam, bound, a >= bound)
