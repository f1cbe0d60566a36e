"""Subgroup lattice of C_g for small g, on integer-indexed elements.

Elements of C_g are numbered in sorted order and subgroups are bitmasks
over those indices.  For g <= 4 the group C_g is solvable, so every subgroup
K containing rho has a chain <rho> = H_0 < H_1 < ... < H_r = K with each
H_i normal of prime index in H_{i+1}.  Extending every known subgroup by
every element of its normalizer therefore reaches all such K.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

from .cmgroup import SignedPermutation
from .errors import ResourceError

MAX_ENUMERATION_DEGREE = 4


@dataclass
class IndexedCg:
    g: int
    elements: list[SignedPermutation]
    mul: list[list[int]]
    inv: list[int]
    identity: int
    rho: int

    @classmethod
    def build(cls, g: int) -> IndexedCg:
        elems = sorted(
            SignedPermutation.from_parts(signs, perm)
            for perm in permutations(range(1, g + 1))
            for signs in product((1, -1), repeat=g)
        )
        idx = {x: i for i, x in enumerate(elems)}
        mul = [[idx[x * y] for y in elems] for x in elems]
        inv = [idx[x.inverse()] for x in elems]
        return cls(g, elems, mul, inv, idx[SignedPermutation.identity(g)],
                   idx[SignedPermutation.rho(g)])

    def members(self, mask: int) -> list[int]:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(i)
            mask >>= 1
            i += 1
        return out

    def normalizes(self, x: int, gens: list[int], mask: int) -> bool:
        xi, mul = self.inv[x], self.mul
        return all((mask >> mul[mul[xi][h]][x]) & 1 for h in gens)

    def extend(self, mask: int, members: list[int], x: int) -> int:
        """<H, x> = union of cosets H x^k, valid when x normalizes H."""
        mul = self.mul
        out = mask
        y = x
        while not (mask >> y) & 1:
            for h in members:
                out |= 1 << mul[h][y]
            y = mul[y][x]
        return out


def subgroups_containing_rho(cg: IndexedCg) -> dict[int, list[int]]:
    """All subgroups of C_g containing rho, mapped to a generating list."""
    if cg.g > MAX_ENUMERATION_DEGREE:
        raise ResourceError(f"subgroup enumeration is limited to g <= {MAX_ENUMERATION_DEGREE}")
    start = (1 << cg.identity) | (1 << cg.rho)
    known = {start: [cg.rho]}
    frontier = [start]
    n = len(cg.elements)
    while frontier:
        nxt = []
        for mask in frontier:
            gens = known[mask]
            mem = cg.members(mask)
            covered = mask
            for x in range(n):
                if (covered >> x) & 1 or not cg.normalizes(x, gens, mask):
                    continue
                k = cg.extend(mask, mem, x)
                # any y in the coset Hx generates the same extension
                for h in mem:
                    covered |= 1 << cg.mul[h][x]
                if k not in known:
                    known[k] = gens + [x]
                    nxt.append(k)
        frontier = nxt
    return known


def unsigned_conjugation_tables(cg: IndexedCg) -> list[list[int]]:
    """For each unsigned permutation c, the map i -> index of c^-1 x_i c."""
    idx = {x: i for i, x in enumerate(cg.elements)}
    tables = []
    for perm in permutations(range(1, cg.g + 1)):
        c = SignedPermutation(perm)
        ci = c.inverse()
        tables.append([idx[ci * x * c] for x in cg.elements])
    return tables


def canonical_under(tables: list[list[int]], members: list[int]) -> int:
    best = None
    for t in tables:
        m = 0
        for i in members:
            m |= 1 << t[i]
        if best is None or m < best:
            best = m
    return best
