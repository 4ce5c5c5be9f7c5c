"""Return sets of ``f x g`` on A^1 x P^1 against a plane curve.

A curve is a coefficient grid ``a[i][j]`` for ``phi = sum a_ij x^i y^j``; it is
evaluated in bihomogenized form ``Phi(x, U, W) = sum a_ij x^i U^j W^(n-j)``
with ``y = U/W``, the same chart convention as :class:`ProjPoint`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from . import affine, projective
from .affine import AffinePolyMap, iterate_map
from .errors import BudgetExceeded, DomainError, ParseError
from .exact_arith import format_rational, parse_rational
from .orbit import DEFAULT_BITSIZE_CAP
from .polys import (
    BinaryForm,
    MPoly,
    form_to_mpoly,
    integer_primitive,
    ptrim,
    rational_roots,
    univariate_to_mpoly,
)
from .projective import Mobius, ProjPoint, ProjRatMap, conjugate

DEFAULT_MAX_TERMS = 200_000
MIN_FIT_TERMS = 3


@dataclass(frozen=True)
class PlaneCurve:
    """``coeffs[i][j]`` multiplies ``x^i y^j``; the grid is (m+1) x (n+1) with exact bidegree."""

    coeffs: tuple

    def __post_init__(self):
        rows = tuple(tuple(Fraction(c) for c in row) for row in self.coeffs)
        object.__setattr__(self, "coeffs", rows)
        if not rows or not rows[0]:
            raise DomainError("empty coefficient grid")
        if len({len(r) for r in rows}) != 1:
            raise DomainError("ragged coefficient grid")
        if not any(rows[-1]):
            raise DomainError("declared x-degree is not exact (last row is zero)")
        if not any(r[-1] for r in rows):
            raise DomainError("declared y-degree is not exact (last column is zero)")

    @property
    def m(self) -> int:
        return len(self.coeffs) - 1

    @property
    def n(self) -> int:
        return len(self.coeffs[0]) - 1

    @classmethod
    def from_dict(cls, data: dict, location: str = "curve") -> "PlaneCurve":
        try:
            grid = data["coeffs"]
            rows = [[parse_rational(c, f"{location}.coeffs[{i}][{j}]") for j, c in enumerate(r)] for i, r in enumerate(grid)]
        except (KeyError, TypeError):
            raise ParseError("curve needs a 'coeffs' grid", location) from None
        if "m" in data and int(data["m"]) != len(rows) - 1:
            raise ParseError(f"m = {data['m']} does not match {len(rows)} rows", location)
        if "n" in data and rows and int(data["n"]) != len(rows[0]) - 1:
            raise ParseError(f"n = {data['n']} does not match row length {len(rows[0])}", location)
        try:
            return cls(tuple(map(tuple, rows)))
        except DomainError as exc:
            raise ParseError(exc.message, location) from None

    def as_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "coeffs": [[format_rational(c) for c in r] for r in self.coeffs]}

    def row_form(self, i: int) -> BinaryForm:
        """``sum_j a_ij U^j W^(n-j)``."""
        return BinaryForm(self.coeffs[i])

    def bihomogenized(self) -> MPoly:
        """Phi in variables (x, U, W)."""
        terms = {}
        n = self.n
        for i, row in enumerate(self.coeffs):
            for j, c in enumerate(row):
                if c:
                    terms[(i, j, n - j)] = c
        return MPoly(3, terms)


def curve_eval(phi: PlaneCurve, x, P: ProjPoint) -> Fraction:
    """``Phi(x, u, w)``; zero iff (x, P) lies on the closure of the curve."""
    x = Fraction(x)
    acc = Fraction(0)
    xp = Fraction(1)
    for i in range(phi.m + 1):
        row = phi.coeffs[i]
        if any(row):
            acc += xp * phi.row_form(i)(P.u, P.w)
        xp *= x
    return acc


# ---------------------------------------------------------------- certification


def certify_progression(
    f: AffinePolyMap,
    g: ProjRatMap,
    phi: PlaneCurve,
    m: int,
    max_degree: int = affine.DEFAULT_MAX_DEGREE,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> bool:
    """True when Phi divides ``Phi(f^m(x), g^m(U, W))``.

    Then ``n`` in the return set implies ``n + m`` in it. A False answer is
    conclusive only for irreducible phi.
    """
    if m < 1:
        raise DomainError("certify_progression needs m >= 1")
    Fm = iterate_map(f, m, max_degree)
    Gm = g.iterate(m, max_degree)
    X = univariate_to_mpoly(Fm.coeffs, 3, 0)
    U = form_to_mpoly(Gm.G1, 3, 1, 2)
    W = form_to_mpoly(Gm.G2, 3, 1, 2)
    n = phi.n
    Xp = [MPoly.const(3, 1)]
    Up = [MPoly.const(3, 1)]
    Wp = [MPoly.const(3, 1)]
    for _ in range(max(phi.m, n)):
        Xp.append(_bounded(Xp[-1] * X, max_terms))
        Up.append(_bounded(Up[-1] * U, max_terms))
        Wp.append(_bounded(Wp[-1] * W, max_terms))
    psi = MPoly(3)
    for i, row in enumerate(phi.coeffs):
        for j, c in enumerate(row):
            if c:
                psi = _bounded(psi + Xp[i] * (Up[j] * Wp[n - j]) * c, max_terms)
    _, rem = psi.divmod(phi.bihomogenized(), max_steps=50 * max_terms)
    return not rem


def _bounded(p: MPoly, max_terms: int) -> MPoly:
    if len(p.terms) > max_terms:
        raise BudgetExceeded(f"certification polynomial exceeded {max_terms} terms")
    return p


# ---------------------------------------------------------------- return sets


@dataclass(frozen=True)
class Progression:
    start: int
    period: int
    status: str  # "Observed", "CertifiedForward(m)" or "Exact"

    def as_dict(self) -> dict:
        return {"start": self.start, "period": self.period, "status": self.status}

    def contains(self, n: int) -> bool:
        return n >= self.start and (n - self.start) % self.period == 0


@dataclass(frozen=True)
class ReturnSetReport:
    observed: tuple
    finite_part: tuple
    progressions: tuple
    completeness: dict
    nmax: int
    notes: tuple = ()

    @property
    def complete(self) -> bool:
        return self.completeness["kind"] == "CompleteByPeriodicity"

    def contains(self, n: int) -> bool:
        """Membership according to the emitted description (exact only when complete)."""
        return n in self.finite_part or any(p.contains(n) for p in self.progressions)

    def as_dict(self) -> dict:
        return {
            "observed": list(self.observed),
            "finite_part": list(self.finite_part),
            "structure": [p.as_dict() for p in self.progressions],
            "completeness": self.completeness,
            "nmax": self.nmax,
            "notes": list(self.notes),
        }


def fit_progressions(observed: Sequence[int], n_hi: int, min_terms: int = MIN_FIT_TERMS) -> tuple[list, list]:
    """Greedy heuristic: repeatedly take the longest progression that runs to ``n_hi``.

    Returns ``(progressions as (start, period), leftover singletons)``.
    """
    remaining = set(observed)
    found = []
    while remaining:
        best = None
        for b in range(1, n_hi + 1):
            for a in sorted(remaining):
                if a + (min_terms - 1) * b > n_hi:
                    break
                terms = range(a, n_hi + 1, b)
                if all(t in remaining for t in terms):
                    key = (-len(terms), b, a)
                    if best is None or key < best[0]:
                        best = (key, a, b)
                    break
        if best is None:
            break
        _, a, b = best
        found.append((a, b))
        remaining -= set(range(a, n_hi + 1, b))
    return found, sorted(remaining)


def return_set(
    f: AffinePolyMap,
    g: ProjRatMap,
    x0,
    y0: ProjPoint,
    phi: PlaneCurve,
    nmax: int,
    bitsize_cap: int = DEFAULT_BITSIZE_CAP,
    certify: bool = True,
    max_degree: int = affine.DEFAULT_MAX_DEGREE,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> ReturnSetReport:
    """Exact enumeration of ``{n <= nmax : Phi(f^n(x0), g^n(y0)) = 0}``.

    Indices past the bit-size cap are still decided exactly when possible:
    membership by a certified forward period from an earlier member, and
    non-membership by a prime p with ``Phi(x_n, U_n, W_n) != 0 mod p``.
    Enumeration stops at the first index neither rule settles.
    """
    of = affine.orbit(f, x0, nmax, bitsize_cap)
    og = projective.orbit(g, y0, nmax, bitsize_cap)
    notes = []

    def member(n: int) -> bool:
        return curve_eval(phi, of.value_at(n), og.value_at(n)) == 0

    if of.cycle is not None and og.cycle is not None:
        (tf, pf), (tg, pg) = of.cycle, og.cycle
        T, L = max(tf, tg), math.lcm(pf, pg)
        pattern = [member(T + r) for r in range(L)]
        Lmin = next(q for q in range(1, L + 1) if L % q == 0 and all(pattern[r] == pattern[r % q] for r in range(L)))
        start = T
        while start > 0 and member(start - 1) == member(start - 1 + Lmin):
            start -= 1
        observed = tuple(n for n in range(nmax + 1) if member(n))
        finite = tuple(n for n in range(start) if member(n))
        progs = tuple(Progression(r, Lmin, "Exact") for r in range(start, start + Lmin) if member(r))
        completeness = {"kind": "CompleteByPeriodicity", "tail": T, "period": L, "x_cycle": [tf, pf], "y_cycle": [tg, pg]}
        return ReturnSetReport(observed, finite, progs, completeness, nmax, tuple(notes))

    certified: dict[int, bool] = {}

    def is_certified(b: int) -> bool:
        if not certify:
            return False
        if b not in certified:
            try:
                certified[b] = certify_progression(f, g, phi, b, max_degree, max_terms)
            except BudgetExceeded as exc:
                certified[b] = False
                notes.append(f"certification for period {b} skipped: {exc.message}")
        return certified[b]

    n_exact = min(_limit(of, nmax), _limit(og, nmax))
    members = {n for n in range(n_exact + 1) if member(n)}
    n_hi = n_exact
    if n_exact < nmax:
        fitted, _ = fit_progressions(sorted(members), n_exact)
        periods = sorted({b for _, b in fitted if is_certified(b)})
        witnesses = _modular_witnesses(f, x0, g, y0, phi, nmax)
        by_period = by_prime = 0
        for n in range(n_exact + 1, nmax + 1):
            if any(n - b in members for b in periods):
                members.add(n)
                by_period += 1
            elif any(w[n] for w in witnesses):
                by_prime += 1
            else:
                break
            n_hi = n
        notes.append(
            f"orbit bit-size cap reached at n = {n_exact + 1}; indices {n_exact + 1}..{n_hi} decided by "
            f"certified periods ({by_period}) and modular non-membership witnesses ({by_prime})"
        )
        if n_hi < nmax:
            notes.append(f"index {n_hi + 1} undecided; enumeration stops at n = {n_hi}")
    observed = tuple(sorted(members))
    fitted, leftover = fit_progressions(observed, n_hi)
    progs = []
    for a, b in fitted:
        status = f"CertifiedForward({b})" if is_certified(b) else "Observed"
        progs.append(Progression(a, b, status))
    completeness = {"kind": "TruncatedAt", "n": n_hi}
    return ReturnSetReport(observed, tuple(leftover), tuple(progs), completeness, nmax, tuple(notes))


WITNESS_PRIMES = (2**61 - 1, 1_000_000_007, 998_244_353, 2**31 - 1)


def _modular_witnesses(f: AffinePolyMap, x0, g: ProjRatMap, y0: ProjPoint, phi: PlaneCurve, nmax: int) -> list:
    """For each usable prime p, ``flags[n]`` is True when ``Phi(x_n, U_n, W_n) != 0 mod p``.

    ``(U_n, W_n)`` is the unnormalized integer orbit, a nonzero integer multiple
    of the primitive one, so a nonzero residue proves ``n`` is not a return.
    Once ``U = W = 0 mod p`` the prime says nothing further.
    """
    x0 = Fraction(x0)
    den = math.lcm(*(c.denominator for row in phi.coeffs for c in row))
    grid = [[int(c * den) for c in row] for row in phi.coeffs]
    g1, g2 = g.integer_coeffs
    out = []
    for p in WITNESS_PRIMES:
        dens = [c.denominator for c in f.coeffs] + [x0.denominator]
        if any(d % p == 0 for d in dens):
            continue
        fc = [c.numerator * pow(c.denominator, -1, p) % p for c in f.coeffs]
        x = x0.numerator * pow(x0.denominator, -1, p) % p
        U, W = y0.u % p, y0.w % p
        flags = []
        for n in range(nmax + 1):
            if U == 0 and W == 0:
                flags.extend([False] * (nmax + 1 - n))
                break
            flags.append(_phi_mod(grid, x, U, W, p) != 0)
            x = _horner_mod(fc, x, p)
            U, W = _form_mod(g1, U, W, p), _form_mod(g2, U, W, p)
        out.append(flags)
    return out


def _horner_mod(coeffs, x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def _form_mod(coeffs, u: int, w: int, p: int) -> int:
    d = len(coeffs) - 1
    return sum(c * pow(u, k, p) * pow(w, d - k, p) for k, c in enumerate(coeffs)) % p


def _phi_mod(grid, x: int, U: int, W: int, p: int) -> int:
    return sum(_form_mod(row, U, W, p) * pow(x, i, p) for i, row in enumerate(grid)) % p


def _limit(seg, nmax: int) -> int:
    if seg.cycle is not None:
        return nmax
    return min(nmax, len(seg.values) - 1)


# ---------------------------------------------------------------- behaviour at x = infinity


@dataclass(frozen=True)
class InfinityData:
    m: int
    phi_inf: tuple  # a_(m,0..n), ascending in y
    a_mn_nonzero: bool
    rational_roots: tuple  # (b_s, l_s)

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "phi_inf": [format_rational(c) for c in self.phi_inf],
            "a_mn_nonzero": self.a_mn_nonzero,
            "rational_roots": [{"b": format_rational(b), "multiplicity": l} for b, l in self.rational_roots],
        }


def curve_infinity_data(phi: PlaneCurve) -> InfinityData:
    row = phi.coeffs[phi.m]
    roots = tuple(rational_roots(ptrim(row))) if len(ptrim(row)) > 1 else ()
    return InfinityData(phi.m, row, row[phi.n] != 0, roots)


def transform_curve(phi: PlaneCurve, M: Mobius) -> PlaneCurve:
    """The curve ``{(x, M(y)) : (x, y) on phi}``: substitute ``(U, W) -> M^-1 (U, W)``."""
    inv = M.inverse()
    rows = [phi.row_form(i).linear_substitute(inv.a, inv.b, inv.c, inv.d).coeffs for i in range(phi.m + 1)]
    flat = integer_primitive([c for r in rows for c in r])
    n1 = phi.n + 1
    grid = [flat[i * n1 : (i + 1) * n1] for i in range(phi.m + 1)]
    return PlaneCurve(tuple(tuple(r) for r in grid))


@dataclass(frozen=True)
class NormalizedSystem:
    curve: PlaneCurve
    g: ProjRatMap
    y0: ProjPoint
    M: Mobius

    def as_dict(self) -> dict:
        return {"curve": self.curve.as_dict(), "g": str(self.g), "y0": str(self.y0), "mobius": self.M.matrix()}


def _candidate_mobius(max_height: int):
    yield Mobius.identity()
    for h in range(1, max_height + 1):
        rng = range(-h, h + 1)
        for a, b, c, d in product(rng, repeat=4):
            if max(abs(a), abs(b), abs(c), abs(d)) != h or a * d - b * c == 0:
                continue
            yield Mobius(a, b, c, d)


def normalize_at_infinity(
    phi: PlaneCurve, g: ProjRatMap, y0: ProjPoint, max_height: int = 2, max_tries: int = 10_000
) -> NormalizedSystem:
    """Small-height Möbius change of the y-coordinate making ``a_mn != 0``.

    Return sets are unchanged: the transformed curve evaluated at ``M(y)`` is a
    nonzero multiple of the original evaluated at ``y``.
    """
    for tries, M in enumerate(_candidate_mobius(max_height)):
        if tries >= max_tries:
            break
        try:
            C = transform_curve(phi, M)
        except DomainError:
            continue
        if C.coeffs[C.m][C.n] != 0:
            return NormalizedSystem(C, conjugate(g, M), M(y0), M)
    raise BudgetExceeded(f"no Möbius map of height <= {max_height} normalizes the curve at infinity")
