"""Test helpers: random finite-order integer actions and brute-force oracles."""

from __future__ import annotations

import random
from math import gcd
from itertools import combinations

from cmtori.exactalg import IntegerMatrix


def naive_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def naive_factor(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while n > 1:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
        if d * d > n and n > 1:
            out[n] = out.get(n, 0) + 1
            break
    return out


def det(rows: list[list[int]]) -> int:
    """Integer determinant by cofactor expansion (small matrices only)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * det(minor)
    return total


def determinantal_invariants(rows: list[list[int]]) -> tuple[int, ...]:
    """Nonzero SNF diagonal from gcds of k x k minors."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    divs = [1]
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, det([[rows[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        divs.append(g)
    return tuple(divs[k] // divs[k - 1] for k in range(1, len(divs)))


def cyclotomic(m: int) -> list[int]:
    """Coefficients of Phi_m, lowest degree first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _polydiv(num, cyclotomic(d))
    return num


def _polydiv(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q = num[i + len(den) - 1] // den[-1]
        out[i] = q
        for j, c in enumerate(den):
            num[i + j] -= q * c
    assert not any(num), "inexact division"
    return out


def companion(m: int) -> list[list[int]]:
    """Companion matrix of Phi_m; it has exact order m."""
    coeffs = cyclotomic(m)
    k = len(coeffs) - 1
    M = [[0] * k for _ in range(k)]
    for i in range(1, k):
        M[i][i - 1] = 1
    for i in range(k):
        M[i][k - 1] = -coeffs[i]
    return M


def permutation_block(n: int) -> list[list[int]]:
    return [[1 if (i + 1) % n == j else 0 for j in range(n)] for i in range(n)]


def block_diag(blocks: list[list[list[int]]]) -> list[list[int]]:
    d = sum(len(b) for b in blocks)
    out = [[0] * d for _ in range(d)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            out[off + i][off:off + len(b)] = row
        off += len(b)
    return out


def random_unimodular(d: int, rng: random.Random, steps: int = 6) -> tuple[IntegerMatrix, IntegerMatrix]:
    """Random P in GL_d(Z) with its inverse, built from elementary moves."""
    P = [[int(i == j) for j in range(d)] for i in range(d)]
    Pi = [row[:] for row in P]
    for _ in range(steps):
        if d == 1:
            P[0][0] *= -1
            Pi[0][0] *= -1
            continue
        i, j = rng.sample(range(d), 2)
        c = rng.choice([-2, -1, 1, 2])
        # P <- P E where E adds c * column i to column j; Pi <- E^-1 Pi
        for r in range(d):
            P[r][j] += c * P[r][i]
        for k in range(d):
            Pi[i][k] -= c * Pi[j][k]
    return IntegerMatrix.from_rows(P, d), IntegerMatrix.from_rows(Pi, d)


CYCLIC_ORDERS = [m for m in range(1, 13) if naive_phi(m) <= 6]


def random_cyclic_action(rng: random.Random, max_dim: int = 6, max_order: int = 12,
                         conjugate: bool = True) -> IntegerMatrix:
    """Block sum of cyclotomic companions and cyclic permutations, conjugated."""
    from math import lcm
    while True:
        blocks = []
        dim, order = 0, 1
        for _ in range(rng.randint(1, 3)):
            if rng.random() < 0.3:
                n = rng.randint(1, max_dim)
                block = permutation_block(n)
                m = n
            else:
                m = rng.choice(CYCLIC_ORDERS)
                block = companion(m)
            if dim + len(block) > max_dim or lcm(order, m) > max_order:
                continue
            blocks.append(block)
            dim += len(block)
            order = lcm(order, m)
        if blocks:
            break
    M = IntegerMatrix.from_rows(block_diag(blocks), dim)
    if conjugate:
        P, Pi = random_unimodular(dim, rng)
        M = Pi @ M @ P
    return M
