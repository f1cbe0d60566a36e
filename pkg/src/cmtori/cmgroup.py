"""Signed permutation groups modelling Galois groups of CM fields.

Conventions
-----------
The embeddings of a CM field of degree 2g are labelled J = {±1, ..., ±g}
with complex conjugation rho acting by k -> -k.  Galois groups act on J on
the *right*; a :class:`SignedPermutation` stores the images of 1..g, and
products compose left to right::

    act(p, x * y) == act(act(p, x), y)

Every element factors as ``x = s * P``: first the sign flip ``s`` (a vector
in {±1}^g) then the unsigned permutation ``P`` with ``act(k, P) = pi(k)``.
Then ``act(k, x) = s[k] * pi(k)``, so the sign vector of ``x`` is read off
its image signs and its permutation part is the tuple of absolute values.
Conjugating by a sign vector b changes the sign vector of ``s * P`` to
``s[k] * b[k] * b[pi(k)]``; this twisted product is what the cocycle
computations below use.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .errors import DomainError, InvariantViolation, ParameterError, ResourceError

__all__ = [
    "SignedPermutation",
    "CMGaloisGroup",
    "CMType",
    "ValidationReport",
    "DodsonData",
    "ReflexData",
    "DEFAULT_CLOSURE_CAP",
    "closure",
    "validate_cm",
    "dodson_decompose",
    "cocycle_splitting",
    "reflex",
    "is_primitive",
    "normalize_cm_type",
    "conjugate_group",
    "full_cg",
]

DEFAULT_CLOSURE_CAP = 10 ** 6
MAX_CLOSURE_DEGREE = 12
MAX_COCYCLE_DEGREE = 20

SignVector = tuple[int, ...]
Perm = tuple[int, ...]


@dataclass(frozen=True, order=True)
class SignedPermutation:
    """Element of C_g = (Z/2)^g ⋊ S_g, stored as the images of 1..g."""

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        g = len(self.image)
        if sorted(abs(x) for x in self.image) != list(range(1, g + 1)):
            raise DomainError(f"{self.image} is not a signed permutation of 1..{g}")

    @property
    def g(self) -> int:
        return len(self.image)

    @classmethod
    def identity(cls, g: int) -> SignedPermutation:
        return cls(tuple(range(1, g + 1)))

    @classmethod
    def rho(cls, g: int) -> SignedPermutation:
        return cls(tuple(-k for k in range(1, g + 1)))

    @classmethod
    def from_parts(cls, signs: Sequence[int], perm: Sequence[int]) -> SignedPermutation:
        """The element ``s * P`` with sign vector ``signs`` and permutation ``perm``."""
        return cls(tuple(s * p for s, p in zip(signs, perm)))

    @classmethod
    def flip(cls, g: int, coords: Iterable[int]) -> SignedPermutation:
        """Sign flip at the given (1-based) coordinates, e.g. the transposition (k,-k)."""
        c = set(coords)
        return cls(tuple(-k if k in c else k for k in range(1, g + 1)))

    def act(self, p: int) -> int:
        """Right action on a point of J."""
        x = self.image[abs(p) - 1]
        return x if p > 0 else -x

    def __mul__(self, other: SignedPermutation) -> SignedPermutation:
        oi = other.image
        return SignedPermutation(tuple(oi[x - 1] if x > 0 else -oi[-x - 1] for x in self.image))

    def inverse(self) -> SignedPermutation:
        out = [0] * self.g
        for k, x in enumerate(self.image, start=1):
            out[abs(x) - 1] = k if x > 0 else -k
        return SignedPermutation(tuple(out))

    @property
    def signs(self) -> SignVector:
        return tuple(1 if x > 0 else -1 for x in self.image)

    @property
    def perm(self) -> Perm:
        return tuple(abs(x) for x in self.image)

    def is_sign_vector(self) -> bool:
        return all(abs(x) == k for k, x in enumerate(self.image, start=1))

    def __repr__(self) -> str:
        return f"SignedPermutation({list(self.image)})"


@dataclass(frozen=True)
class CMGaloisGroup:
    """A finite subgroup of C_g given by its sorted element list.

    ``closure`` produces these; the constructor does not re-check closure,
    :func:`validate_cm` does the CM checks.
    """

    g: int
    elements: tuple[SignedPermutation, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def rho_index(self) -> int | None:
        r = SignedPermutation.rho(self.g)
        try:
            return self.elements.index(r)
        except ValueError:
            return None

    def __contains__(self, x: SignedPermutation) -> bool:
        return x in self._element_set

    @property
    def _element_set(self) -> frozenset[SignedPermutation]:
        cached = self.__dict__.get("_set")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_set", cached)
        return cached

    def orbit(self, p: int) -> set[int]:
        return {x.act(p) for x in self.elements}

    def point_stabilizer(self, p: int = 1) -> tuple[SignedPermutation, ...]:
        return tuple(x for x in self.elements if x.act(p) == p)

    @classmethod
    def from_elements(cls, g: int, elements: Iterable[SignedPermutation]) -> CMGaloisGroup:
        return cls(g, tuple(sorted(set(elements))))


@dataclass(frozen=True)
class CMType:
    g: int
    sigma: frozenset[int]

    def __post_init__(self) -> None:
        neg = {-k for k in self.sigma}
        full = set(range(1, self.g + 1)) | {-k for k in range(1, self.g + 1)}
        if len(self.sigma) != self.g or not self.sigma <= full:
            raise DomainError(f"CM type must pick {self.g} points of ±1..±{self.g}")
        if self.sigma & neg or (self.sigma | neg) != full:
            raise DomainError(f"{sorted(self.sigma)} does not pick one of each pair ±k")

    @classmethod
    def standard(cls, g: int) -> CMType:
        return cls(g, frozenset(range(1, g + 1)))

    @classmethod
    def of(cls, points: Iterable[int]) -> CMType:
        pts = frozenset(points)
        return cls(len(pts), pts)

    @property
    def is_standard(self) -> bool:
        return self.sigma == frozenset(range(1, self.g + 1))

    def sign_vector(self) -> SignVector:
        return tuple(1 if k in self.sigma else -1 for k in range(1, self.g + 1))


def closure(generators: Sequence[SignedPermutation], g: int,
            cap: int = DEFAULT_CLOSURE_CAP) -> CMGaloisGroup:
    """Subgroup of C_g generated by ``generators`` (breadth-first)."""
    if g < 1:
        raise DomainError("g must be positive")
    if g > MAX_CLOSURE_DEGREE:
        raise ResourceError(f"g = {g} exceeds the closure guard {MAX_CLOSURE_DEGREE}")
    for x in generators:
        if x.g != g:
            raise DomainError(f"generator {x} does not have degree {g}")
    e = SignedPermutation.identity(g)
    seen = {e}
    queue = deque([e])
    gens = list(dict.fromkeys(generators))
    while queue:
        x = queue.popleft()
        for s in gens:
            y = x * s
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise ResourceError(f"group order exceeds the closure cap {cap}")
                queue.append(y)
    return CMGaloisGroup.from_elements(g, seen)


def full_cg(g: int, cap: int = DEFAULT_CLOSURE_CAP) -> CMGaloisGroup:
    """The whole centralizer C_g of rho, of order 2^g * g!."""
    gens = [SignedPermutation.flip(g, [1])]
    if g > 1:
        gens.append(SignedPermutation(tuple(range(2, g + 1)) + (1,)))
        gens.append(SignedPermutation((2, 1) + tuple(range(3, g + 1))))
    return closure(gens, g, cap)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    failure: str | None = None


def validate_cm(group: CMGaloisGroup) -> ValidationReport:
    g = group.g
    if SignedPermutation.rho(g) not in group:
        return ValidationReport(False, "complex conjugation rho is not in the group")
    if len(group.orbit(1)) != 2 * g:
        return ValidationReport(False, f"action on the {2 * g} embeddings is not transitive")
    return ValidationReport(True)


def _require_cm(group: CMGaloisGroup) -> None:
    rep = validate_cm(group)
    if not rep.ok:
        raise DomainError(f"not a CM Galois group: {rep.failure}")


@dataclass(frozen=True)
class DodsonData:
    """Exact sequence 1 -> (Z/2)^v -> G -> G_0 -> 1 with a chosen section.

    ``section[pi]`` is the sign vector of the lexicographically smallest
    element of G over ``pi``.
    """

    g: int
    v: int
    g0_elements: tuple[Perm, ...]
    section: dict[Perm, SignVector]
    v_subgroup: frozenset[SignVector]

    def twisted(self, b: SignVector, pi: Perm) -> SignVector:
        """The coboundary term k -> b[k] * b[pi(k)]."""
        return tuple(b[k] * b[pi[k] - 1] for k in range(self.g))


def _mul_signs(a: SignVector, b: SignVector) -> SignVector:
    return tuple(x * y for x, y in zip(a, b))


def dodson_decompose(group: CMGaloisGroup) -> DodsonData:
    _require_cm(group)
    g = group.g
    ident = tuple(range(1, g + 1))
    section: dict[Perm, SignVector] = {}
    vsub = set()
    # elements are sorted, so the first lift seen is the smallest
    for x in group.elements:
        pi = x.perm
        if pi not in section:
            section[pi] = x.signs
        if pi == ident:
            vsub.add(x.signs)
    n = len(vsub)
    v = n.bit_length() - 1
    if n != 1 << v:
        raise InvariantViolation(f"kernel subgroup has order {n}, not a power of 2")
    g0 = tuple(sorted(section))
    if group.order != n * len(g0):
        raise InvariantViolation("|G| != 2^v * |G_0|")
    if tuple(-1 for _ in range(g)) not in vsub:
        raise InvariantViolation("rho is missing from the kernel subgroup")
    orbit = {pi[0] for pi in g0}
    if len(orbit) != g:
        raise InvariantViolation("G_0 is not transitive on 1..g")
    return DodsonData(g, v, g0, section, frozenset(vsub))


def cocycle_splitting(group: CMGaloisGroup, data: DodsonData | None = None) -> SignVector | None:
    """Sign vector b with s(pi) * b * b∘pi in (Z/2)^v for every pi, or None.

    A witness means the cocycle js is a coboundary; conjugating the group by
    b then makes the section trivial.  Any witness found is re-verified by
    performing that conjugation.
    """
    g = group.g
    if g > MAX_COCYCLE_DEGREE:
        raise ResourceError(f"cocycle search over 2^{g} sign vectors is too large")
    data = data or dodson_decompose(group)
    vsub = data.v_subgroup
    items = list(data.section.items())
    for b in product((1, -1), repeat=g):
        if all(_mul_signs(s, data.twisted(b, pi)) in vsub for pi, s in items):
            conj = conjugate_group(group, SignedPermutation.from_parts(b, range(1, g + 1)))
            unsigned = {x.perm for x in conj.elements if all(y > 0 for y in x.image)}
            if unsigned != set(data.g0_elements):
                raise InvariantViolation(f"cocycle witness {b} failed the conjugation check")
            return b
    return None


def conjugate_group(group: CMGaloisGroup, c: SignedPermutation) -> CMGaloisGroup:
    """The group c^-1 * G * c."""
    ci = c.inverse()
    return CMGaloisGroup.from_elements(group.g, (ci * x * c for x in group.elements))


def normalize_cm_type(group: CMGaloisGroup, cmtype: CMType) -> tuple[CMGaloisGroup, CMType]:
    """Conjugate by the sign vector b carrying Sigma to {1..g}."""
    if cmtype.g != group.g:
        raise DomainError("CM type and group have different g")
    b = SignedPermutation.from_parts(cmtype.sign_vector(), range(1, group.g + 1))
    if cmtype.is_standard:
        return group, cmtype
    return conjugate_group(group, b), CMType.standard(group.g)


def sigma_stabilizer(group: CMGaloisGroup, cmtype: CMType) -> tuple[SignedPermutation, ...]:
    """Elements alpha with Sigma.alpha = Sigma.

    This is the right stabilizer of Sigma~ = {alpha : 1.alpha in Sigma},
    since (Sigma~ alpha) = Sigma~ iff alpha maps Sigma into itself.
    """
    sig = cmtype.sigma
    return tuple(x for x in group.elements if all(x.act(p) in sig for p in sig))


@dataclass(frozen=True)
class ReflexData:
    reflex_subgroup: tuple[SignedPermutation, ...]
    reflex_degree: int
    g0_order: int
    g_sigma: tuple[Perm, ...]
    v: int


def reflex(group: CMGaloisGroup, cmtype: CMType) -> ReflexData:
    """Reflex subgroup H' and degree 2g' = [G : H'].

    Cross-checks the degree against 2^v [G_0 : G_Sigma] computed on the
    normalized group, where G_Sigma = {pi : s(pi) in (Z/2)^v}.
    """
    _require_cm(group)
    h_prime = sigma_stabilizer(group, cmtype)
    degree, rem = divmod(group.order, len(h_prime))
    if rem:
        raise InvariantViolation("reflex subgroup order does not divide |G|")
    ngroup, _ = normalize_cm_type(group, cmtype)
    data = dodson_decompose(ngroup)
    g_sigma = tuple(pi for pi in data.g0_elements if data.section[pi] in data.v_subgroup)
    g0 = len(data.g0_elements)
    if (g0 % len(g_sigma)) or degree != (1 << data.v) * (g0 // len(g_sigma)):
        raise InvariantViolation(
            f"reflex degree {degree} != 2^{data.v} * [{g0} : {len(g_sigma)}]"
        )
    return ReflexData(h_prime, degree, g0, g_sigma, data.v)


def is_primitive(group: CMGaloisGroup, cmtype: CMType) -> bool:
    """True iff {alpha : alpha Sigma~ = Sigma~} equals the stabilizer of 1.

    alpha Sigma~ = Sigma~ depends only on j = 1.alpha: it holds iff j.x lies
    in Sigma for every x in Sigma~.  So it suffices to test the 2g points.
    """
    _require_cm(group)
    sig = cmtype.sigma
    tilde = [x for x in group.elements if x.act(1) in sig]
    good = {j for j in group.orbit(1) if all(x.act(j) in sig for x in tilde)}
    return good == {1}


def parse_group(g: int, generators: Sequence[Sequence[int]],
                cap: int = DEFAULT_CLOSURE_CAP) -> CMGaloisGroup:
    """Group from the JSON image-array description of its generators."""
    gens = []
    for gen in generators:
        if len(gen) != g:
            raise ParameterError(f"generator {list(gen)} does not have length g = {g}")
        gens.append(SignedPermutation(tuple(int(x) for x in gen)))
    return closure(gens, g, cap)
