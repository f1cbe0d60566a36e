"""Imaginary quadratic class numbers, two ways, and the orbit-bound evaluator.

This is the only module that works with real numbers.  Each call builds its
own mpmath context so precision never leaks between callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from mpmath.ctx_mp import MPContext

from .arith import factorize, lambda_const
from .errors import DomainError, ParameterError, PrecisionError

__all__ = [
    "FundamentalDiscriminant",
    "ShyrReport",
    "OrbitBound",
    "kronecker",
    "character_table",
    "character_sum",
    "dirichlet_L1",
    "reduced_form_count",
    "reduced_forms",
    "unit_count",
    "class_number_iq",
    "shyr_consistency",
    "fundamental_discriminants",
    "orbit_bound",
    "MAX_ABS_DISCRIMINANT",
]

MAX_ABS_DISCRIMINANT = 10 ** 7
ROUNDING_TOLERANCE = Fraction(1, 10 ** 10)
DEFAULT_DIGITS = 50


def _context(digits: int) -> MPContext:
    if digits < 30:
        raise ParameterError(f"precision must be at least 30 digits, got {digits}")
    ctx = MPContext()
    ctx.dps = digits + 10
    return ctx


def _squarefree(n: int) -> bool:
    return all(k == 1 for k in factorize(n).values())


@dataclass(frozen=True)
class FundamentalDiscriminant:
    D: int

    def __post_init__(self) -> None:
        D = self.D
        if D >= 0:
            raise DomainError(f"D must be negative, got {D}")
        if -D > MAX_ABS_DISCRIMINANT:
            raise DomainError(f"|D| = {-D} exceeds {MAX_ABS_DISCRIMINANT}")
        r = D % 4
        if r == 1:
            if not _squarefree(-D):
                raise DomainError(f"D = {D} is 1 mod 4 but not squarefree")
        elif r == 0:
            m = D // 4
            if m % 4 not in (2, 3):
                raise DomainError(f"D = {D}: D/4 = {m} is not 2 or 3 mod 4")
            if not _squarefree(-m):
                raise DomainError(f"D = {D}: D/4 = {m} is not squarefree")
        else:
            raise DomainError(f"D = {D} is not 0 or 1 mod 4")

    @property
    def abs(self) -> int:
        return -self.D


def fundamental_discriminants(lo: int, hi: int = -1) -> list[int]:
    """Fundamental discriminants D with lo <= D <= hi < 0, decreasing |D| last."""
    out = []
    for D in range(max(lo, -MAX_ABS_DISCRIMINANT), min(hi, -1) + 1):
        try:
            FundamentalDiscriminant(D)
        except DomainError:
            continue
        out.append(D)
    return sorted(out, reverse=True)


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a / n) for arbitrary integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -1
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a / n), n odd positive
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def character_table(D: FundamentalDiscriminant) -> list[int]:
    """chi_D(a) = (D / a) for 0 <= a < |D|, built multiplicatively."""
    N = D.abs
    spf = list(range(N))
    for p in range(2, isqrt(max(N - 1, 0)) + 1):
        if spf[p] == p:
            for q in range(p * p, N, p):
                if spf[q] == q:
                    spf[q] = p
    chi = [0] * N
    if N > 1:
        chi[1] = 1
    for a in range(2, N):
        p = spf[a]
        if p == a:
            chi[a] = kronecker(D.D, p)
        else:
            chi[a] = chi[p] * chi[a // p]
    return chi


def character_sum(D: FundamentalDiscriminant) -> int:
    """sum_{a=1}^{|D|-1} chi_D(a) * a, an exact negative integer."""
    return sum(c * a for a, c in enumerate(character_table(D)))


def dirichlet_L1(D: FundamentalDiscriminant | int, digits: int = DEFAULT_DIGITS):
    """L(1, chi_D) = -pi |D|^{-3/2} sum chi_D(a) a, as an mpf."""
    D = _fd(D)
    ctx = _context(digits)
    N = ctx.mpf(D.abs)
    return -ctx.pi * character_sum(D) / (N * ctx.sqrt(N))


def _fd(D: FundamentalDiscriminant | int) -> FundamentalDiscriminant:
    return D if isinstance(D, FundamentalDiscriminant) else FundamentalDiscriminant(D)


def reduced_forms(D: FundamentalDiscriminant | int) -> list[tuple[int, int, int]]:
    D = _fd(D)
    d = D.D
    out = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b - d) % 2:
                continue
            num = b * b - d
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or (a == c and b < 0):
                continue
            if gcd(gcd(a, b), c) == 1:
                out.append((a, b, c))
        a += 1
    return out


def reduced_form_count(D: FundamentalDiscriminant | int) -> int:
    return len(reduced_forms(D))


def unit_count(D: FundamentalDiscriminant | int) -> int:
    d = _fd(D).D
    return 6 if d == -3 else 4 if d == -4 else 2


def class_number_iq(D: FundamentalDiscriminant | int, digits: int = DEFAULT_DIGITS) -> int:
    """round(w sqrt|D| L(1, chi_D) / (2 pi)), checking the rounding residual."""
    D = _fd(D)
    return _round_class_number(D, dirichlet_L1(D, digits), digits)


def _round_class_number(D: FundamentalDiscriminant, L1, digits: int) -> int:
    ctx = _context(digits)
    val = unit_count(D) * ctx.sqrt(D.abs) * L1 / (2 * ctx.pi)
    h = int(ctx.nint(val))
    if abs(val - h) >= ctx.mpf(ROUNDING_TOLERANCE.numerator) / ROUNDING_TOLERANCE.denominator:
        raise PrecisionError(f"class number for D = {D.D} is not near an integer: {val}")
    return h


@dataclass(frozen=True)
class ShyrReport:
    """Class number formula for T = Res_{F/Q} G_m, F = Q(sqrt D).

    Tamagawa number and regulator are 1; the quasi-residue is L(1, chi_D)
    and D_T = |D| / (2 pi)^2.
    """

    D: int
    w: int
    L1: object
    h_dirichlet: int
    h_forms: int
    D_T_numerator: int
    D_T_two_pi_power: int
    D_T: object
    shyr_h: object
    residual: object
    consistent: bool

    def to_json(self, digits: int = 30) -> dict:
        from mpmath import nstr
        return {
            "D": self.D,
            "w": self.w,
            "L1": nstr(self.L1, digits),
            "h_dirichlet": self.h_dirichlet,
            "h_forms": self.h_forms,
            "D_T": {
                "numerator": self.D_T_numerator,
                "denominator": 1,
                "two_pi_power": self.D_T_two_pi_power,
                "value": nstr(self.D_T, digits),
            },
            "shyr_h": nstr(self.shyr_h, digits),
            "residual": nstr(self.residual, 5),
            "consistent": self.consistent,
        }


def shyr_consistency(D: FundamentalDiscriminant | int, digits: int = DEFAULT_DIGITS,
                     tolerance: Fraction = ROUNDING_TOLERANCE) -> ShyrReport:
    D = _fd(D)
    from .localinv import QuasiDiscInputs, quasi_discriminant

    ctx = _context(digits)
    qd = quasi_discriminant(QuasiDiscInputs(a_T=D.abs, a=0, b=1, c=0, dim=2), digits + 10)
    L1 = dirichlet_L1(D, digits)
    w = unit_count(D)
    shyr_h = w * L1 * ctx.sqrt(ctx.mpf(qd.value))
    h_forms = reduced_form_count(D)
    h_dir = _round_class_number(D, L1, digits)
    residual = abs(shyr_h - h_forms)
    tol = ctx.mpf(tolerance.numerator) / tolerance.denominator
    return ShyrReport(
        D=D.D,
        w=w,
        L1=L1,
        h_dirichlet=h_dir,
        h_forms=h_forms,
        D_T_numerator=qd.numerator,
        D_T_two_pi_power=qd.two_pi_power,
        D_T=qd.value,
        shyr_h=shyr_h,
        residual=residual,
        consistent=bool(residual < tol and h_dir == h_forms),
    )


@dataclass(frozen=True)
class OrbitBound:
    """c * B^i_T * index * D_L^(lambda(d)/2 - eps); conditional on c and B."""

    value: object
    exponent: Fraction
    lambda_d: Fraction
    vacuous: bool

    def to_json(self, digits: int = 30) -> dict:
        from mpmath import nstr
        return {
            "value": nstr(self.value, digits),
            "exponent": str(self.exponent),
            "lambda_d": str(self.lambda_d),
            "vacuous": self.vacuous,
            "conditional_on": ["B", "c"],
        }


def orbit_bound(d: int, D_L: int, eps: Fraction | str, i_T: int, index_ratio: int,
                B: str | float | Fraction, c: str | float | Fraction,
                digits: int = DEFAULT_DIGITS) -> OrbitBound:
    eps = Fraction(eps)
    if d < 1 or D_L < 1 or i_T < 0 or index_ratio < 1 or eps <= 0:
        raise ParameterError("need d >= 1, D_L >= 1, i_T >= 0, index >= 1 and eps > 0")
    ctx = _context(digits)

    def real(x):
        if isinstance(x, Fraction):
            return ctx.mpf(x.numerator) / x.denominator
        return ctx.mpf(x)

    Bv, cv = real(B), real(c)
    if Bv <= 0 or cv <= 0:
        raise ParameterError("B and c must be positive")
    lam = lambda_const(d)
    e = lam / 2 - eps
    val = cv * Bv ** i_T * index_ratio * ctx.power(D_L, real(e))
    return OrbitBound(val, e, lam, e <= 0)
