"""Exact rational arithmetic and the places of Q.

Rationals are :class:`fractions.Fraction` throughout. Every absolute value
``|r|_v`` of a rational is itself rational, so all inequality decisions made
elsewhere in the package are exact; logarithms only appear in reports.
"""

from __future__ import annotations

import math
import random
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering

import gmpy2
import mpmath

from .errors import BudgetExceeded, DomainError, ParseError

Rational = Fraction

TRIAL_DIVISION_LIMIT = 10**6
DEFAULT_FACTOR_BUDGET = 200_000
DEFAULT_SEED = 0

# mpmath precision is process-global; hold this while it is changed
_MP_LOCK = threading.RLock()

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text, location: str | None = None) -> Fraction:
    """Parse ``"-3/4"``, ``"7204"`` (or pass through an int/Fraction)."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string, got {text!r}", location)
    m = _RATIONAL_RE.match(text)
    if not m:
        raise ParseError(f"malformed rational literal {text!r}", location)
    num = str_to_int(m.group(1))
    den = str_to_int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}", location)
    return Fraction(num, den)


def format_rational(r: Fraction) -> str:
    r = Fraction(r)
    if r.denominator == 1:
        return int_to_str(r.numerator)
    return f"{int_to_str(r.numerator)}/{int_to_str(r.denominator)}"


# str <-> int beyond the interpreter's digit limit goes through GMP, which is
# not subject to that limit and converts in subquadratic time
_BIG_BITS = 12_000


def int_to_str(n: int) -> str:
    if n.bit_length() < _BIG_BITS:
        return str(n)
    return gmpy2.mpz(n).digits(10)


def str_to_int(text: str) -> int:
    text = text.strip()
    if len(text) < 3600:
        return int(text)
    return int(gmpy2.mpz(text, 10))


# ---------------------------------------------------------------- primality


@lru_cache(maxsize=1)
def small_primes(limit: int = TRIAL_DIVISION_LIMIT) -> tuple[int, ...]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i in range(limit + 1) if sieve[i])


_BLOCK = 256


@lru_cache(maxsize=1)
def _prime_blocks() -> tuple[tuple[int, tuple[int, ...]], ...]:
    """``(product, primes)`` for consecutive runs of the trial-division primes."""
    ps = small_primes()
    return tuple((math.prod(ps[i : i + _BLOCK]), ps[i : i + _BLOCK]) for i in range(0, len(ps), _BLOCK))


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# the 13 bases above are a deterministic witness set below this bound
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981


def _strong_probable_prime(n: int, a: int) -> bool:
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
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


def _strong_lucas_probable_prime(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    def half(x: int) -> int:
        x %= n
        return (x + n) // 2 % n if x & 1 else x // 2

    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = half(P * U + V), half(D * U + P * V)
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality test.

    Miller-Rabin with a proven witness set below ~3.3e24, Baillie-PSW above.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < _MR_DETERMINISTIC_BOUND:
        return all(_strong_probable_prime(n, a) for a in _MR_BASES)
    if not _strong_probable_prime(n, 2):
        return False
    r = math.isqrt(n)
    if r * r == n:
        return False
    return _strong_lucas_probable_prime(n)


# ---------------------------------------------------------------- factoring


def _pollard_brent(n: int, rng: random.Random, budget: list[int]) -> int | None:
    """Return a nontrivial factor of composite odd ``n`` or None on budget exhaustion.

    ``budget`` is a one-element list decremented in place so recursive calls share it.
    """
    while budget[0] > 0:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            budget[0] -= r
            if budget[0] <= 0 and g == 1:
                return None
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    return None


def factorint(n: int, budget: int = DEFAULT_FACTOR_BUDGET, seed: int = DEFAULT_SEED) -> dict[int, int]:
    """Prime factorisation of ``|n|`` as ``{p: e}``.

    Trial division up to 10**6, then Pollard-Brent under an iteration budget.
    Raises BudgetExceeded carrying the unfactored cofactor.
    """
    n = abs(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    factors: dict[int, int] = {}
    # one gcd per block of primes instead of one division per prime
    for prod, block in _prime_blocks():
        if block[0] * block[0] > n:
            break
        if math.gcd(n, prod) == 1:
            continue
        for p in block:
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                factors[p] = e
    if 1 < n < TRIAL_DIVISION_LIMIT**2:
        factors[n] = factors.get(n, 0) + 1
        return dict(sorted(factors.items()))
    if n == 1:
        return factors
    rng = random.Random(seed)
    remaining = [budget]
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _pollard_brent(m, rng, remaining)
        if d is None:
            raise BudgetExceeded(
                f"factoring budget exhausted; unfactored cofactor {m}",
                payload={"cofactor": m, "partial": dict(sorted(factors.items()))},
            )
        stack.extend((d, m // d))
    return dict(sorted(factors.items()))


# ---------------------------------------------------------------- places


@total_ordering
@dataclass(frozen=True)
class Place:
    """A place of Q: ``prime=None`` is the archimedean place."""

    prime: int | None = None

    def __post_init__(self):
        if self.prime is not None and not is_prime(self.prime):
            raise DomainError(f"{self.prime} is not prime")

    @property
    def is_archimedean(self) -> bool:
        return self.prime is None

    def _key(self):
        return (0, 0) if self.prime is None else (1, self.prime)

    def __lt__(self, other: "Place") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        return "inf" if self.prime is None else str(self.prime)


ARCHIMEDEAN = Place()


def finite_place(p: int) -> Place:
    return Place(p)


def parse_place(text, location: str | None = None) -> Place:
    if isinstance(text, Place):
        return text
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "oo", "archimedean"):
        return ARCHIMEDEAN
    try:
        return Place(int(s))
    except ValueError:
        raise ParseError(f"malformed place {text!r}", location) from None
    except DomainError as exc:
        raise ParseError(exc.message, location) from None


def _vp_int(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def valuation(r, p) -> int:
    """p-adic valuation of a nonzero rational."""
    r = Fraction(r)
    prime = p.prime if isinstance(p, Place) else p
    if prime is None or not is_prime(prime):
        raise DomainError(f"valuation needs a prime, got {p}")
    if r == 0:
        raise DomainError("valuation of 0 is undefined")
    return _vp_int(r.numerator, prime) - _vp_int(r.denominator, prime)


def abs_v(r, v: Place) -> Fraction:
    """Exact ``|r|_v``; the p-adic one is normalised so ``|p|_p = 1/p``."""
    r = Fraction(r)
    if v.is_archimedean:
        return abs(r)
    if r == 0:
        return Fraction(0)
    return Fraction(v.prime) ** (-valuation(r, v.prime))


def support_places(r, budget: int = DEFAULT_FACTOR_BUDGET, seed: int = DEFAULT_SEED) -> frozenset[Place]:
    """Finite places with ``|r|_v != 1``, i.e. primes dividing numerator or denominator."""
    r = Fraction(r)
    if r == 0:
        raise DomainError("support of 0 is undefined")
    primes = set(factorint(r.numerator, budget, seed)) | set(factorint(r.denominator, budget, seed))
    return frozenset(Place(p) for p in primes)


# ---------------------------------------------------------------- logarithms


@dataclass(frozen=True)
class LogApprox:
    """A real approximation ``value`` with ``|true - value| <= error``."""

    value: mpmath.mpf
    error: mpmath.mpf
    precision: int

    def __float__(self) -> float:
        return float(self.value)

    def text(self, digits: int | None = None) -> str:
        if digits is None:
            digits = max(6, int(self.precision * 0.30103))
        if self.value == 0:
            return "0"
        return mpmath.nstr(self.value, digits, min_fixed=-6, max_fixed=20)


def log_positive_rational(q, precision_bits: int = 53) -> LogApprox:
    """``log q`` for rational ``q > 0`` with relative error below ``2**-precision_bits``."""
    q = Fraction(q)
    if q <= 0:
        raise DomainError("log of a non-positive number")
    if precision_bits < 1:
        raise DomainError("precision_bits must be positive")
    if q == 1:
        return LogApprox(mpmath.mpf(0), mpmath.mpf(0), precision_bits)
    wp = precision_bits + 20
    with _MP_LOCK, mpmath.workprec(wp):
        num, den = q.numerator, q.denominator
        if Fraction(1, 2) <= q <= 2:
            # near 1: log1p of an exactly formed small difference keeps relative accuracy
            val = mpmath.log1p(mpmath.mpf(num - den) / den)
        else:
            val = _log_int(num) - _log_int(den)
    with _MP_LOCK, mpmath.workprec(precision_bits + 8):
        err = abs(val) * mpmath.mpf(2) ** (-precision_bits)
    return LogApprox(val, err, precision_bits)


def _log_int(n: int) -> mpmath.mpf:
    # n = mantissa * 2**shift + rest with the mantissa holding prec + 8 bits; the
    # dropped rest perturbs log n by less than 2**-(prec+7)
    shift = max(0, n.bit_length() - mpmath.mp.prec - 8)
    return mpmath.log(n >> shift) + shift * mpmath.ln2


def log_abs_v(r, v: Place, precision_bits: int = 53) -> LogApprox:
    """``log |r|_v`` for nonzero r, relative error below ``2**-precision_bits``."""
    r = Fraction(r)
    if r == 0:
        raise DomainError("log|0|_v is undefined")
    if v.is_archimedean:
        return log_positive_rational(abs(r), precision_bits)
    e = valuation(r, v.prime)
    if e == 0:
        return LogApprox(mpmath.mpf(0), mpmath.mpf(0), precision_bits)
    with _MP_LOCK, mpmath.workprec(precision_bits + 20):
        val = -e * mpmath.log(v.prime)
    with _MP_LOCK, mpmath.workprec(precision_bits + 8):
        err = abs(val) * mpmath.mpf(2) ** (-precision_bits)
    return LogApprox(val, err, precision_bits)


@dataclass(frozen=True)
class ExactLog:
    """The real number ``log(arg) / div`` with rational ``arg > 0`` and integer ``div >= 1``.

    Order comparisons are decided exactly through rational powers.
    """

    arg: Fraction
    div: int = 1

    def __post_init__(self):
        object.__setattr__(self, "arg", Fraction(self.arg))
        if self.arg <= 0 or self.div < 1:
            raise DomainError("ExactLog needs arg > 0 and div >= 1")

    def scaled(self, m: int) -> "ExactLog":
        """``m * self`` for a positive integer m."""
        g = math.gcd(m, self.div)
        return ExactLog(self.arg ** (m // g), self.div // g)

    def _powers(self, other: "ExactLog") -> tuple[Fraction, Fraction]:
        g = math.gcd(self.div, other.div)
        return self.arg ** (other.div // g), other.arg ** (self.div // g)

    def __lt__(self, other: "ExactLog") -> bool:
        a, b = self._powers(other)
        return a < b

    def __le__(self, other: "ExactLog") -> bool:
        a, b = self._powers(other)
        return a <= b

    def __gt__(self, other: "ExactLog") -> bool:
        return other < self

    def __ge__(self, other: "ExactLog") -> bool:
        return other <= self

    def sign(self) -> int:
        return (self.arg > 1) - (self.arg < 1)

    def approx(self, precision_bits: int = 53) -> LogApprox:
        la = log_positive_rational(self.arg, precision_bits)
        with _MP_LOCK, mpmath.workprec(precision_bits + 8):
            return LogApprox(la.value / self.div, la.error / self.div, precision_bits)

    def as_dict(self, precision_bits: int = 53) -> dict:
        return {"arg": format_rational(self.arg), "div": self.div, "approx": self.approx(precision_bits).text()}
