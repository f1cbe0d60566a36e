"""Cocharacter lattices of reciprocity morphisms for CM tori.

With the CM type normalized to Sigma = {1..g}, the cocharacters of GU_E are
X = Z mu ⊕ Z e_1 ⊕ ... ⊕ Z e_g where mu = sum_i [alpha_i] and
e_i = [alpha_i] - [alpha_{-i}].  The reciprocity morphism sends the reflex
coset H'beta to sum_i [alpha_{i.beta}], which in the (mu, e) basis is

    v_beta = mu - sum_{k in F(beta)} e_k,   F(beta) = {|i.beta| : i in Sigma, i.beta < 0}

so mu minus the e_k for the coordinates that beta sends into -Sigma.  L_mu
is the span of the v_beta, L'_mu its saturation in X, and the kernel of the
reciprocity morphism is connected iff L_mu = L'_mu.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cmgroup import (
    CMGaloisGroup,
    CMType,
    SignedPermutation,
    full_cg,
    is_primitive,
    normalize_cm_type,
    reflex,
    sigma_stabilizer,
    validate_cm,
    DEFAULT_CLOSURE_CAP,
)
from .errors import DomainError, InvariantViolation, ParameterError, ResourceError
from .exactalg import (
    IntegerMatrix,
    InvariantFactors,
    lattice_quotient_invariants,
    relative_quotient_invariants,
    saturate,
)
from .subgroups import (
    MAX_ENUMERATION_DEGREE,
    IndexedCg,
    canonical_under,
    subgroups_containing_rho,
    unsigned_conjugation_tables,
)

__all__ = [
    "CocharLattice",
    "KernelReport",
    "reciprocity_vectors",
    "kernel_component_group",
    "make_family",
    "enumerate_cm_data",
    "cocharacter_action",
    "FAMILIES",
]

FAMILIES = ("full_cg", "klein_g4", "cyclic_2p")


@dataclass(frozen=True)
class CocharLattice:
    g: int
    generators: IntegerMatrix

    @property
    def basis_labels(self) -> tuple[str, ...]:
        return ("mu",) + tuple(f"e{i}" for i in range(1, self.g + 1))


@dataclass(frozen=True)
class KernelReport:
    g: int
    order: int
    v: int
    reflex_degree: int
    rank_L_mu: int
    invariant_factors: InvariantFactors
    connected: bool
    full_lattice: bool
    primitive: bool

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "order": self.order,
            "v": self.v,
            "reflex_degree": self.reflex_degree,
            "rank_L_mu": self.rank_L_mu,
            "invariant_factors": list(self.invariant_factors.factors),
            "connected": self.connected,
            "full_lattice": self.full_lattice,
            "primitive": self.primitive,
        }


def _require_normalized(group: CMGaloisGroup, cmtype: CMType) -> None:
    rep = validate_cm(group)
    if not rep.ok:
        raise DomainError(f"not a CM Galois group: {rep.failure}")
    if cmtype.g != group.g:
        raise DomainError("CM type and group have different g")
    if not cmtype.is_standard:
        raise DomainError("CM type must be normalized to {1..g}; use normalize_cm_type")


def _vector_r2g(beta: SignedPermutation) -> list[int]:
    # coordinates in X_*(R_E) = Z^{2g}, ordered [alpha_1..alpha_g, alpha_-1..alpha_-g]
    g = beta.g
    out = [0] * (2 * g)
    for i in range(1, g + 1):
        j = beta.act(i)
        out[j - 1 if j > 0 else g - j - 1] += 1
    return out


def _to_mu_e(vec: list[int], g: int) -> tuple[int, ...]:
    # n_i [a_i] + n_-i [a_-i] with n_i + n_-i = c  equals  c*mu - sum n_-i e_i
    c = vec[0] + vec[g]
    for i in range(g):
        if vec[i] + vec[g + i] != c:
            raise InvariantViolation(f"{vec} is not a cocharacter of GU_E")
    return (c,) + tuple(-vec[g + i] for i in range(g))


def reciprocity_vectors(group: CMGaloisGroup, cmtype: CMType) -> CocharLattice:
    """Rows v_beta, one per right coset H'beta, in the (mu, e) basis."""
    _require_normalized(group, cmtype)
    g = group.g
    h_prime = sigma_stabilizer(group, cmtype)
    seen: set[SignedPermutation] = set()
    rows = []
    for beta in group.elements:
        if beta in seen:
            continue
        coset = [h * beta for h in h_prime]
        seen.update(coset)
        v = _to_mu_e(_vector_r2g(beta), g)
        if len(coset) > 1 and _to_mu_e(_vector_r2g(coset[-1]), g) != v:
            raise InvariantViolation(f"v_beta depends on the coset representative of {beta}")
        if v[0] != 1 or any(x not in (0, -1) for x in v[1:]):
            raise InvariantViolation(f"unexpected reciprocity vector {v}")
        rows.append(v)
    if len(set(rows)) != len(rows):
        raise InvariantViolation("distinct reflex cosets gave equal vectors")
    return CocharLattice(g, IntegerMatrix.from_rows(sorted(rows, reverse=True), g + 1))


def kernel_component_group(group: CMGaloisGroup, cmtype: CMType) -> KernelReport:
    """Invariant factors of L'_mu / L_mu, the component group of ker(r)."""
    lat = reciprocity_vectors(group, cmtype)
    g = group.g
    gens = lat.generators
    sat = saturate(gens, g + 1)
    inv = relative_quotient_invariants(gens, sat)
    if not inv.is_finite:
        raise InvariantViolation("L_mu has smaller rank than its saturation")
    full = lattice_quotient_invariants(gens, g + 1).is_trivial
    refl = reflex(group, cmtype)
    return KernelReport(
        g=g,
        order=group.order,
        v=refl.v,
        reflex_degree=refl.reflex_degree,
        rank_L_mu=sat.rows,
        invariant_factors=inv,
        connected=inv.is_trivial,
        full_lattice=full,
        primitive=is_primitive(group, cmtype),
    )


def _plain_group(plain_gens: list[tuple[int, ...]], g: int) -> set[tuple[int, ...]]:
    ident = tuple(range(1, g + 1))
    seen = {ident}
    todo = [ident]
    while todo:
        x = todo.pop()
        for s in plain_gens:
            y = tuple(s[k - 1] for k in x)
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _split_family(g: int, plain_gens: list[tuple[int, ...]],
                  b_coord: int) -> tuple[CMGaloisGroup, CMType]:
    # {1, rho} x G_0 conjugated by the flip b at b_coord, so s(pi) = b * b∘pi.
    # Built directly rather than by closure so that g may exceed the closure guard.
    b = SignedPermutation.flip(g, [b_coord])
    rho = SignedPermutation.rho(g)
    elems = []
    for p in _plain_group(plain_gens, g):
        x = SignedPermutation(p)
        elems.append(b * x * b)
        elems.append(b * rho * x * b)
    return CMGaloisGroup.from_elements(g, elems), CMType.standard(g)


def _is_odd_prime(p: int) -> bool:
    return p > 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


def make_family(name: str, param: int | None = None,
                cap: int = DEFAULT_CLOSURE_CAP) -> tuple[CMGaloisGroup, CMType]:
    """Named CM data.

    ``full_cg``: C_g itself with Sigma = {1..g}.
    ``klein_g4``: g = 4, G_0 the Klein group of double transpositions,
    kernel {1, rho}, section b * b∘pi for b the flip at coordinate 1.
    ``cyclic_2p``: g = p, G_0 generated by the p-cycle, same recipe.
    """
    if name == "full_cg":
        if param is None or param < 1:
            raise ParameterError("full_cg needs g >= 1")
        return full_cg(param, cap), CMType.standard(param)
    if name == "klein_g4":
        klein = [(2, 1, 4, 3), (3, 4, 1, 2)]
        return _split_family(4, klein, 1)
    if name == "cyclic_2p":
        if param is None or not _is_odd_prime(param) or param > 23:
            raise ParameterError(f"cyclic_2p needs an odd prime p <= 23, got {param}")
        p = param
        cycle = tuple(range(2, p + 1)) + (1,)
        return _split_family(p, [cycle], 1)
    raise ParameterError(f"unknown family {name!r}; expected one of {FAMILIES}")


def enumerate_cm_data(g: int) -> list[tuple[CMGaloisGroup, CMType]]:
    """All transitive subgroups of C_g containing rho, with Sigma = {1..g}.

    Data are taken up to C_g-conjugacy with the CM type carried along and
    renormalized.  A conjugation preserving Sigma = {1..g} is an unsigned
    permutation, so this is conjugacy under S_g.  Each class is represented
    by its member with the smallest element bitmask.
    """
    if g < 1:
        raise DomainError("g must be positive")
    if g > MAX_ENUMERATION_DEGREE:
        raise ResourceError(f"enumeration is limited to g <= {MAX_ENUMERATION_DEGREE}")
    cg = IndexedCg.build(g)
    subs = subgroups_containing_rho(cg)
    tables = unsigned_conjugation_tables(cg)
    reps = set()
    for mask in subs:
        mem = cg.members(mask)
        if len({cg.elements[i].act(1) for i in mem}) != 2 * g:
            continue
        reps.add(canonical_under(tables, mem))
    out = []
    for mask in sorted(reps, key=lambda m: (bin(m).count("1"), m)):
        group = CMGaloisGroup.from_elements(g, (cg.elements[i] for i in cg.members(mask)))
        out.append((group, CMType.standard(g)))
    return out


def cocharacter_action(beta: SignedPermutation) -> IntegerMatrix:
    """Matrix of beta on X = Z mu ⊕ ⊕ Z e_k as a *left* module (columns).

    The right action on row vectors is x -> x R(beta) with mu.beta = v_beta
    and e_k.beta = sign * e_|k.beta|.  The left-module matrix is the
    transpose of R(beta^-1), so that M(x y) = M(x) M(y).
    """
    def right_matrix(x: SignedPermutation) -> list[list[int]]:
        g = x.g
        rows = [list(_to_mu_e(_vector_r2g(x), g))]
        for k in range(1, g + 1):
            r = [0] * (g + 1)
            j = x.act(k)
            r[abs(j)] = 1 if j > 0 else -1
            rows.append(r)
        return rows

    R = right_matrix(beta.inverse())
    return IntegerMatrix.from_rows(R, beta.g + 1).T


def analyze(group: CMGaloisGroup, cmtype: CMType) -> KernelReport:
    """Normalize the CM type if needed, then compute the kernel report."""
    ngroup, ntype = normalize_cm_type(group, cmtype)
    return kernel_component_group(ngroup, ntype)
