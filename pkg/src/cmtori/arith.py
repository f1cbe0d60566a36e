"""Elementary arithmetic constants for lower bounds on conductors.

For n = prod p^{n_p} the *weight* is ``sum_{p|n} phi(p^{n_p}) - eps(n)``
where eps(n) = 1 exactly when 2 || n and n != 2.  It bounds from below the
number of nontrivial characters of Z/n occurring in a faithful rational
representation, hence the dimension of such a representation.

psi(s) is the largest n of weight <= s and lambda(s) the minimum of
weight(n)/(n-1) over 2 <= n <= psi(s).  c(s) = prod_{p <= s+1} p^(-alpha(s)^2)
where alpha(s) bounds the order of finite subgroups of GL_s(Q).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd
from typing import Mapping

from .errors import DomainError

__all__ = [
    "WeightValue",
    "LambdaConstant",
    "AlphaTable",
    "factorize",
    "euler_phi",
    "primes_upto",
    "weight",
    "psi",
    "psi_search_bound",
    "lambda_const",
    "lambda_constant",
    "alpha",
    "c_const",
    "min_faithful_char_count",
]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (inputs here are small)."""
    if n < 1:
        raise DomainError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def euler_phi(n: int) -> int:
    out = n
    for p in factorize(n):
        out = out // p * (p - 1)
    return out


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i, b in enumerate(sieve) if b]


@dataclass(frozen=True)
class WeightValue:
    n: int
    totient_sum: int
    epsilon: int
    weight: int


def _epsilon(n: int, v2: int) -> int:
    return 1 if v2 == 1 and n != 2 else 0


def weight(n: int) -> WeightValue:
    if n < 1:
        raise DomainError(f"weight is defined for n >= 1, got {n}")
    fac = factorize(n)
    tot = sum((p - 1) * p ** (k - 1) for p, k in fac.items())
    eps = _epsilon(n, fac.get(2, 0))
    return WeightValue(n, tot, eps, tot - eps)


def _weight_table(limit: int) -> list[int]:
    """weight(n) for 0 <= n <= limit via a smallest-prime-factor sieve."""
    spf = list(range(limit + 1))
    for p in range(2, int(limit ** 0.5) + 1):
        if spf[p] == p:
            for q in range(p * p, limit + 1, p):
                if spf[q] == q:
                    spf[q] = p
    w = [0] * (limit + 1)
    for n in range(2, limit + 1):
        p = spf[n]
        m, pk = n, 1
        while m % p == 0:
            m //= p
            pk *= p
        # additive over coprime parts before the epsilon correction
        w[n] = w[m] + (pk - pk // p)
    for n in range(2, limit + 1, 4):  # n ≡ 2 mod 4, i.e. 2 || n
        if n != 2:
            w[n] -= 1
    return w


def psi_search_bound(s: int) -> int:
    """N(s) = prod_{p <= s+2} p^{k_p}, k_p maximal with phi(p^k) <= s+1.

    Every n with weight(n) <= s divides N(s).
    """
    out = 1
    for p, kmax in _prime_power_caps(s):
        out *= p ** kmax
    return out


def _prime_power_caps(s: int) -> list[tuple[int, int]]:
    caps = []
    for p in primes_upto(s + 2):
        k = 0
        while (p - 1) * p ** k <= s + 1:
            k += 1
        if k:
            caps.append((p, k))
    return caps


@lru_cache(maxsize=None)
def psi(s: int) -> int:
    """Largest n with weight(n) <= s.

    Depth-first search over the divisors of N(s), pruning on the totient sum
    (eps(n) can lower the weight by at most one).
    """
    if s < 1:
        raise DomainError(f"psi is defined for s >= 1, got {s}")
    caps = _prime_power_caps(s)
    best = 1

    def walk(idx: int, n: int, tot: int, v2: int) -> None:
        nonlocal best
        if idx == len(caps):
            if tot - _epsilon(n, v2) <= s and n > best:
                best = n
            return
        p, kmax = caps[idx]
        walk(idx + 1, n, tot, v2)
        pk = 1
        for k in range(1, kmax + 1):
            pk *= p
            t = tot + pk - pk // p
            if t - 1 > s:
                break
            walk(idx + 1, n * pk, t, k if p == 2 else v2)

    walk(0, 1, 0, 0)
    return best


@dataclass(frozen=True)
class LambdaConstant:
    s: int
    psi: int
    lambda_num: int
    lambda_den: int
    argmin: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.lambda_num, self.lambda_den)


@lru_cache(maxsize=None)
def lambda_constant(s: int) -> LambdaConstant:
    """lambda(s) with its provenance (psi(s) and the minimizing n).

    n = 1 is excluded from the minimum: its quotient has a zero denominator.
    Ties keep the smallest minimizing n.
    """
    bound = psi(s)
    w = _weight_table(bound)
    best = None
    arg = 0
    for n in range(2, bound + 1):
        q = Fraction(w[n], n - 1)
        if best is None or q < best:
            best, arg = q, n
    return LambdaConstant(s, bound, best.numerator, best.denominator, arg)


def lambda_const(s: int) -> Fraction:
    return lambda_constant(s).value


@dataclass(frozen=True)
class AlphaTable:
    """alpha(s) = max order of a finite subgroup of GL_s(Q).

    Defaults to the signed-permutation order 2^s * s!, which is a lower bound
    for the true maximum.  Exceptional values from the literature go in
    ``overrides``; an override below the default must be listed in
    ``literature`` or construction fails.
    """

    overrides: Mapping[int, int] = field(default_factory=dict)
    literature: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        for s, val in self.overrides.items():
            if s < 1 or val < 1:
                raise DomainError(f"bad alpha override {s} -> {val}")
            if val < default_alpha(s) and s not in self.literature:
                raise DomainError(
                    f"alpha({s}) override {val} is below 2^s*s! = {default_alpha(s)}; "
                    "flag it as a literature value to accept it"
                )

    def __call__(self, s: int) -> int:
        return self.overrides.get(s, default_alpha(s))


def default_alpha(s: int) -> int:
    return 2 ** s * factorial(s)


def alpha(s: int, table: AlphaTable | None = None) -> int:
    return (table or AlphaTable())(s)


def c_const(s: int, table: AlphaTable | None = None) -> Fraction:
    if s < 1:
        raise DomainError(f"c is defined for s >= 1, got {s}")
    a2 = alpha(s, table) ** 2
    den = 1
    for p in primes_upto(s + 1):
        den *= p ** a2
    return Fraction(1, den)


def _divisors(n: int) -> list[int]:
    divs = [1]
    for p, k in factorize(n).items():
        divs = [d * p ** e for d in divs for e in range(k + 1)]
    return sorted(divs)


def min_faithful_char_count(n: int) -> int:
    """Minimum of sum phi(d_i) over divisor sets {d_i > 1} with lcm n.

    This is the least number of nontrivial characters in a faithful rational
    representation of Z/n.  Dynamic programming over the divisor lattice,
    keyed on the lcm reached so far; each divisor is used at most once.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    divs = _divisors(n)
    best: dict[int, int] = {1: 0}
    for d in divs[1:]:
        ph = euler_phi(d)
        for l, cost in list(best.items()):
            m = l * d // gcd(l, d)
            c = cost + ph
            if c < best.get(m, c + 1):
                best[m] = c
    return best[n]
