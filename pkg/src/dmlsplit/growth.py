"""Growth certificates for non-preperiodic orbits of a polynomial.

For ``f = a_d x^d + ... + a_0`` over Q, a certificate is a place v and an
index N such that either

* v is a bad place (archimedean, ``|a_d|_v != 1`` or some ``|a_i|_v > 1``) and
  ``|f^N(x0)|_v > C_v`` with ``C_v = (2/|a_d|_v)(1 + sum_{i<d} |a_i|_v) + 1``; or
* v is a good finite place and ``|f^N(x0)|_v > 1``.

From there ``log|f^n(x0)|_v`` grows like ``d^n`` with explicit two-sided
brackets. Every inequality below is decided on exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .affine import AffinePolyMap, rational_bitsize
from .errors import BudgetExceeded, DomainError
from .exact_arith import (
    ARCHIMEDEAN,
    DEFAULT_FACTOR_BUDGET,
    DEFAULT_SEED,
    ExactLog,
    Place,
    abs_v,
    factorint,
    format_rational,
    parse_place,
    parse_rational,
    support_places,
)
from .orbit import DEFAULT_BITSIZE_CAP


@dataclass(frozen=True)
class BadPlaceSet:
    places: tuple  # sorted, archimedean first
    thresholds: dict  # Place -> Fraction

    def __contains__(self, v: Place) -> bool:
        return v in self.thresholds

    def as_dict(self) -> dict:
        return {
            "places": [str(v) for v in self.places],
            "C_v": {str(v): format_rational(self.thresholds[v]) for v in self.places},
        }


def threshold(f: AffinePolyMap, v: Place) -> Fraction:
    lead = abs_v(f.leading, v)
    return 2 / lead * (1 + sum((abs_v(a, v) for a in f.coeffs[:-1]), Fraction(0))) + 1


def bad_places(f: AffinePolyMap, factor_budget: int = DEFAULT_FACTOR_BUDGET, seed: int = DEFAULT_SEED) -> BadPlaceSet:
    if f.degree < 2:
        raise DomainError("bad places are defined for degree >= 2")
    places = {ARCHIMEDEAN}
    try:
        places |= support_places(f.leading, factor_budget, seed)
        for a in f.coeffs[:-1]:
            if a.denominator != 1:
                places |= support_places(Fraction(a.denominator), factor_budget, seed)
    except BudgetExceeded as exc:
        raise BudgetExceeded(f"could not factor a coefficient of {f}: {exc.message}", payload=exc.payload) from None
    ordered = tuple(sorted(places))
    return BadPlaceSet(ordered, {v: threshold(f, v) for v in ordered})


@dataclass(frozen=True)
class GrowthCertificate:
    """Place v and index N with the escape condition, plus the bracket

    ``A1 d^(n-N) - B1 < log|f^n(x0)|_v < A2 d^(n-N) - B2`` for n > N and the
    statement form ``c1 d^n < log|f^n(x0)|_v < c2 d^n`` for n > N2.
    """

    place: Place
    N: int
    in_S: bool
    C_v: Fraction  # the threshold that was exceeded (1 off S)
    x_N: Fraction
    x_N_abs: Fraction
    lead_abs: Fraction
    degree: int
    A1: ExactLog
    B1: ExactLog
    A2: ExactLog
    B2: ExactLog
    c1: ExactLog
    c2: ExactLog
    N2: int

    def as_dict(self, precision_bits: int = 53) -> dict:
        return {
            "place": str(self.place),
            "N": self.N,
            "in_S": self.in_S,
            "C_v": format_rational(self.C_v),
            "x_N": format_rational(self.x_N),
            "x_N_abs": format_rational(self.x_N_abs),
            "A1": self.A1.as_dict(precision_bits),
            "B1": self.B1.as_dict(precision_bits),
            "A2": self.A2.as_dict(precision_bits),
            "B2": self.B2.as_dict(precision_bits),
            "c1": self.c1.as_dict(precision_bits),
            "c2": self.c2.as_dict(precision_bits),
            "N''": self.N2,
        }


@dataclass(frozen=True)
class NotFound:
    budget: int
    skipped: tuple = ()  # indices whose denominators could not be factored

    def as_dict(self) -> dict:
        return {"found": False, "budget": self.budget, "unfactored_indices": list(self.skipped)}


def _statement_threshold(X1: Fraction, Y1: Fraction, d: int, N: int) -> int:
    # smallest k >= 1 with A1 d^k / 2 > B1, i.e. X1^(d^k) > Y1^2 (X1 > 1 so it exists)
    if Y1 <= 1:
        return N
    k, P = 1, X1**d
    while P <= Y1 * Y1:
        k += 1
        P = P**d
    return N + k - 1


def build_certificate(f: AffinePolyMap, v: Place, N: int, x_N: Fraction, in_S: bool, C_v: Fraction) -> GrowthCertificate:
    d = f.degree
    lead = abs_v(f.leading, v)
    xa = abs_v(x_N, v)
    Y1 = lead / 2
    Y2 = 3 * lead / 2
    X1 = xa ** (d - 1) * Y1
    X2 = xa ** (d - 1) * Y2
    A1, B1 = ExactLog(X1, d - 1), ExactLog(Y1, d - 1)
    A2, B2 = ExactLog(X2, d - 1), ExactLog(Y2, d - 1)
    if in_S:
        c1 = ExactLog(X1, 2 * (d - 1) * d**N)
        # c2 = A2/d^N + max(0, -B2)/d^(N+1); the second term covers |a_d|_v < 2/3
        Z = max(Fraction(1), 1 / Y2)
        c2 = ExactLog(X2**d * Z, (d - 1) * d ** (N + 1))
        N2 = _statement_threshold(X1, Y1, d, N)
    else:
        # good place: log|f^n| = d^(n-N) log|f^N| exactly
        c1 = ExactLog(xa, 2 * d**N)
        c2 = ExactLog(xa * xa, d**N)
        N2 = N
    return GrowthCertificate(v, N, in_S, C_v, x_N, xa, lead, d, A1, B1, A2, B2, c1, c2, N2)


def find_certificate(
    f: AffinePolyMap,
    x0,
    search_budget: int,
    factor_budget: int = DEFAULT_FACTOR_BUDGET,
    seed: int = DEFAULT_SEED,
    bitsize_cap: int = DEFAULT_BITSIZE_CAP,
):
    """First (v, N) in scan order: bad places at each n, then a good prime of the denominator."""
    S = bad_places(f, factor_budget, seed)
    x = Fraction(x0)
    skipped = []
    for n in range(search_budget + 1):
        for v in S.places:
            if abs_v(x, v) > S.thresholds[v]:
                return build_certificate(f, v, n, x, True, S.thresholds[v])
        cof = x.denominator
        for v in S.places:
            if v.prime is not None:
                while cof % v.prime == 0:
                    cof //= v.prime
        if cof > 1:
            try:
                p = min(factorint(cof, factor_budget, seed))
            except BudgetExceeded as exc:
                partial = exc.payload.get("partial", {}) if exc.payload else {}
                p = min(partial) if partial else None
                if p is None:
                    skipped.append(n)
            if p is not None:
                return build_certificate(f, Place(p), n, x, False, Fraction(1))
        if n == search_budget:
            break
        x = f(x)
        if rational_bitsize(x) > bitsize_cap:
            break
    return NotFound(search_budget, tuple(skipped))


@dataclass(frozen=True)
class Check:
    n: int
    name: str
    passed: bool
    detail: str

    def as_dict(self) -> dict:
        return {"n": self.n, "check": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    certificate: GrowthCertificate
    n_hi: int
    checks: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, n: int, name: str, passed: bool, detail: str) -> None:
        self.checks.append(Check(n, name, bool(passed), detail))

    def as_dict(self) -> dict:
        return {
            "valid": self.valid,
            "n_hi": self.n_hi,
            "place": str(self.certificate.place),
            "N": self.certificate.N,
            "checks": [c.as_dict() for c in self.checks],
        }


def verify_certificate(
    f: AffinePolyMap, x0, cert: GrowthCertificate, n_hi: int, bitsize_cap: int = DEFAULT_BITSIZE_CAP
) -> VerificationReport:
    """Re-derive every inequality of the certificate on N..n_hi with exact arithmetic."""
    rep = VerificationReport(cert, n_hi)
    d, v, N = f.degree, cert.place, cert.N
    lead = abs_v(f.leading, v)
    S = bad_places(f)
    rep.add(N, "degree", d == cert.degree, f"deg f = {d}")
    if not cert.in_S:
        good = v not in S and lead == 1 and all(abs_v(a, v) <= 1 for a in f.coeffs[:-1])
        rep.add(N, "good_place", good, f"{v} not in S, |a_d|_v = 1, |a_i|_v <= 1")
    xs = [Fraction(x0)]
    for _ in range(n_hi + 1):
        xs.append(f(xs[-1]))
        if rational_bitsize(xs[-1]) > bitsize_cap:
            raise BudgetExceeded(f"orbit exceeded {bitsize_cap} bits during verification")
    rep.add(N, "x_N", xs[N] == cert.x_N, f"f^{N}(x0) = {format_rational(xs[N])}")
    Y1, Y2 = lead / 2, 3 * lead / 2
    X1 = abs_v(xs[N], v) ** (d - 1) * Y1
    X2 = abs_v(xs[N], v) ** (d - 1) * Y2
    for n in range(N, n_hi + 1):
        a, b = abs_v(xs[n], v), abs_v(xs[n + 1], v)
        if cert.in_S:
            rep.add(n, "threshold", a > cert.C_v, f"|f^n|_v = {format_rational(a)} > C_v = {format_rational(cert.C_v)}")
            ratio = b / a**d if a else None
            ok = ratio is not None and Y1 < ratio < Y2
            rep.add(
                n,
                "step_ratio",
                ok,
                f"{format_rational(Y1)} < {format_rational(ratio) if ratio is not None else 'undefined'} < {format_rational(Y2)}",
            )
        else:
            rep.add(n, "threshold", a > 1, f"|f^n|_v = {format_rational(a)} > 1")
            rep.add(n, "exact_power", b == a**d, f"|f^(n+1)|_v = |f^n|_v^{d}")
        if n > N:
            k = n - N
            val = ExactLog(a)
            lower = ExactLog(X1 ** (d**k) / Y1, d - 1)
            upper = ExactLog(X2 ** (d**k) / Y2, d - 1)
            rep.add(n, "bracket", lower < val < upper, f"A1 d^{k} - B1 < log|f^n|_v < A2 d^{k} - B2")
        if n > cert.N2:
            val = ExactLog(a)
            lo, hi = cert.c1.scaled(d**n), cert.c2.scaled(d**n)
            rep.add(n, "statement_form", lo < val < hi, f"c1 d^{n} < log|f^n|_v < c2 d^{n}")
    return rep


def certificate_from_dict(data: dict, f: AffinePolyMap) -> GrowthCertificate:
    """Rebuild a serialized certificate; constants are recomputed and must match."""
    v = parse_place(data["place"])
    N = int(data["N"])
    in_S = bool(data["in_S"])
    C_v = parse_rational(data["C_v"])
    x_N = parse_rational(data["x_N"]) if "x_N" in data else None
    if x_N is None:
        raise DomainError("serialized certificate lacks x_N")
    return build_certificate(f, v, N, x_N, in_S, C_v)
