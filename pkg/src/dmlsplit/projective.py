"""Rational self-maps of P^1 over Q.

Points are ``[u:w]`` with coprime integers, ``z = u/w`` and infinity ``[1:0]``.
A map is a pair of integer binary forms ``(G1, G2)`` of common degree with
nonzero resultant, acting by ``[u:w] -> [G1(u,w) : G2(u,w)]``.

Totally invariant points are found without factoring anything of high
degree: the condition "``w*G1 - u*G2`` is a scalar multiple of
``(w*X - u*Y)**d``" is a rank-one condition on two coefficient vectors, and
the gcd of its 2x2 minors is a binary form in ``(u, w)`` whose roots are
exactly the totally invariant points. Its squarefree part has degree <= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .errors import BudgetExceeded, DomainError, ParseError
from .exact_arith import format_rational, int_to_str, parse_rational
from .orbit import DEFAULT_BITSIZE_CAP, OrbitSegment, run_orbit
from .polys import (
    BinaryForm,
    bezout_cofactors,
    form_gcd,
    form_resultant,
    form_squarefree,
    is_rational_square,
    pdeg,
    pmonic,
    primitive_integer_forms,
    ptrim,
)

DEFAULT_MAX_DEGREE = 4096


# ---------------------------------------------------------------- points


@dataclass(frozen=True, order=False)
class ProjPoint:
    u: int
    w: int

    def __post_init__(self):
        u, w = self.u, self.w
        if not isinstance(u, int) or not isinstance(w, int):
            raise TypeError("ProjPoint coordinates must be ints; use ProjPoint.of")
        if math.gcd(u, w) != 1 or w < 0 or (w == 0 and u != 1):
            raise ValueError(f"[{u}:{w}] is not in primitive form; use ProjPoint.of")

    @classmethod
    def of(cls, u, w) -> "ProjPoint":
        """Normalise any nonzero rational pair."""
        u, w = Fraction(u), Fraction(w)
        if u == 0 and w == 0:
            raise DomainError("[0:0] is not a point")
        den = math.lcm(u.denominator, w.denominator)
        U, W = int(u * den), int(w * den)
        g = math.gcd(U, W)
        U, W = U // g, W // g
        if W < 0 or (W == 0 and U < 0):
            U, W = -U, -W
        return cls(U, W)

    @classmethod
    def _unchecked(cls, u: int, w: int) -> "ProjPoint":
        # caller guarantees primitive, normalised coordinates
        P = object.__new__(cls)
        object.__setattr__(P, "u", u)
        object.__setattr__(P, "w", w)
        return P

    @classmethod
    def from_rational(cls, r) -> "ProjPoint":
        r = Fraction(r)
        return cls(r.numerator, r.denominator)

    @property
    def is_infinity(self) -> bool:
        return self.w == 0

    def affine(self) -> Fraction | None:
        return None if self.w == 0 else Fraction(self.u, self.w)

    def bitsize(self) -> int:
        return max(self.u.bit_length(), self.w.bit_length())

    def sort_key(self):
        return (1, Fraction(0)) if self.w == 0 else (0, Fraction(self.u, self.w))

    def __str__(self) -> str:
        return "inf" if self.w == 0 else f"{int_to_str(self.u)}:{int_to_str(self.w)}"


INFINITY = ProjPoint(1, 0)


def parse_point(text, location: str | None = None) -> ProjPoint:
    """``"u:w"``, ``"inf"`` or a rational literal."""
    if isinstance(text, ProjPoint):
        return text
    s = str(text).strip()
    if s.lower() in ("inf", "infinity", "oo"):
        return INFINITY
    try:
        if ":" in s:
            a, b = s.split(":")
            return ProjPoint.of(parse_rational(a.strip(), location), parse_rational(b.strip(), location))
        return ProjPoint.from_rational(parse_rational(s, location))
    except DomainError as exc:
        raise ParseError(exc.message, location) from None
    except ValueError:
        raise ParseError(f"malformed point {text!r}", location) from None


# ---------------------------------------------------------------- maps


@dataclass(frozen=True)
class ProjRatMap:
    G1: BinaryForm
    G2: BinaryForm

    @classmethod
    def from_forms(cls, G1: BinaryForm, G2: BinaryForm) -> "ProjRatMap":
        if G1.degree != G2.degree:
            raise DomainError("G1 and G2 must have the same degree")
        if G1.degree < 1:
            raise DomainError("map degree must be >= 1")
        if form_resultant(G1, G2) == 0:
            raise DomainError("degenerate map: G1 and G2 share a root (resultant 0)")
        H1, H2 = primitive_integer_forms((G1, G2))
        return cls(H1, H2)

    @classmethod
    def from_descending(cls, c1: Sequence, c2: Sequence) -> "ProjRatMap":
        return cls.from_forms(BinaryForm.from_descending(c1), BinaryForm.from_descending(c2))

    @property
    def degree(self) -> int:
        return self.G1.degree

    def __call__(self, P: ProjPoint) -> ProjPoint:
        return evaluate(self, P)

    def resultant(self) -> Fraction:
        return form_resultant(self.G1, self.G2)

    @cached_property
    def integer_coeffs(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return tuple(int(c) for c in self.G1.coeffs), tuple(int(c) for c in self.G2.coeffs)

    @cached_property
    def gcd_bound(self) -> int:
        """Positive K with ``gcd(G1(u,w), G2(u,w)) | K`` for every primitive (u, w).

        From ``A G1 + B G2 = R X^(2d-1)`` and ``R Y^(2d-1)``, cleared of denominators.
        """
        d = self.degree
        pairs = [bezout_cofactors(self.G1, self.G2, k) for k in (2 * d - 1, 0)]
        D = 1
        for A, B, _ in pairs:
            for c in A.coeffs + B.coeffs:
                D = math.lcm(D, Fraction(c).denominator)
        return abs(int(pairs[0][2] * D))

    def compose(self, other: "ProjRatMap") -> "ProjRatMap":
        """``self ∘ other``."""
        return ProjRatMap.from_forms(
            self.G1.compose(other.G1, other.G2), self.G2.compose(other.G1, other.G2)
        )

    def iterate(self, m: int, max_degree: int = DEFAULT_MAX_DEGREE) -> "ProjRatMap":
        if m < 1:
            raise DomainError("iterate needs m >= 1")
        if self.degree**m > max_degree:
            raise BudgetExceeded(f"g^{m} has degree {self.degree ** m} > {max_degree}")
        g = self
        for _ in range(m - 1):
            g = self.compose(g)
        return g

    def descending_lists(self) -> tuple[list[int], list[int]]:
        return [int(c) for c in self.G1.descending()], [int(c) for c in self.G2.descending()]

    def __str__(self) -> str:
        a, b = self.descending_lists()
        return ",".join(map(str, a)) + ";" + ",".join(map(str, b))


def parse_map(text, location: str | None = None) -> ProjRatMap:
    """``"c_d,...,c_0;c_d,...,c_0"`` or a pair of lists, both descending in X."""
    try:
        if isinstance(text, str):
            halves = text.split(";")
            if len(halves) != 2:
                raise ParseError(f"map needs two ';'-separated coefficient lists: {text!r}", location)
            lists = [[parse_rational(c.strip(), location) for c in h.split(",")] for h in halves]
        else:
            if len(text) != 2:
                raise ParseError("map needs two coefficient lists", location)
            lists = [[parse_rational(c, location) for c in h] for h in text]
    except TypeError:
        raise ParseError(f"malformed map {text!r}", location) from None
    return ProjRatMap.from_descending(*lists)


def evaluate(g: ProjRatMap, P: ProjPoint) -> ProjPoint:
    c1, c2 = g.integer_coeffs
    U, W = _eval_int(c1, P.u, P.w), _eval_int(c2, P.u, P.w)
    # gcd(U, W) divides the cofactor bound, so reduce there first
    K = g.gcd_bound
    c = math.gcd(U % K, W % K, K)
    if c > 1:
        U, W = U // c, W // c
    if W < 0 or (W == 0 and U < 0):
        U, W = -U, -W
    return ProjPoint._unchecked(U, W)


def _eval_int(coeffs: tuple, u: int, w: int) -> int:
    # homogeneous Horner: acc_k = sum_{j >= k} c_j u^(j-k) w^(d-j)
    d = len(coeffs) - 1
    acc, wp = coeffs[d], 1
    for k in range(d - 1, -1, -1):
        wp *= w
        acc = acc * u + coeffs[k] * wp
    return acc


def orbit(g: ProjRatMap, P: ProjPoint, nmax: int, bitsize_cap: int = DEFAULT_BITSIZE_CAP) -> OrbitSegment:
    return run_orbit(g, P, nmax, ProjPoint.bitsize, bitsize_cap)


# ---------------------------------------------------------------- Möbius


@dataclass(frozen=True)
class Mobius:
    """``z -> (a z + b) / (c z + d)``, i.e. ``[u:w] -> [a u + b w : c u + d w]``."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.det == 0:
            raise DomainError("singular Möbius matrix")

    @classmethod
    def identity(cls) -> "Mobius":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def __call__(self, P: ProjPoint) -> ProjPoint:
        return ProjPoint.of(self.a * P.u + self.b * P.w, self.c * P.u + self.d * P.w)

    def matrix(self) -> list[list[str]]:
        return [[format_rational(self.a), format_rational(self.b)], [format_rational(self.c), format_rational(self.d)]]


def conjugate(g: ProjRatMap, M: Mobius) -> ProjRatMap:
    """``M ∘ g ∘ M^-1``."""
    inv = M.inverse()
    H1 = g.G1.linear_substitute(inv.a, inv.b, inv.c, inv.d)
    H2 = g.G2.linear_substitute(inv.a, inv.b, inv.c, inv.d)
    return ProjRatMap.from_forms(H1.scale(M.a) + H2.scale(M.b), H1.scale(M.c) + H2.scale(M.d))


def conjugate_point(P: ProjPoint, M: Mobius) -> ProjPoint:
    return M(P)


# ---------------------------------------------------------------- fixed points


def fixed_point_form(g: ProjRatMap) -> BinaryForm:
    """``Y*G1 - X*G2``; its roots are the fixed points of g."""
    X = BinaryForm.monomial(1, 1)
    Y = BinaryForm.monomial(1, 0)
    F = Y * g.G1 - X * g.G2
    if F.is_zero():
        raise DomainError("g is the identity; every point is fixed")
    return primitive_integer_forms((F,))[0]


# ---------------------------------------------------------------- quadratic points


@dataclass(frozen=True)
class QuadElem:
    """``a + b*t`` in ``Q[t]/(t^2 + c1*t + c0)``."""

    a: Fraction
    b: Fraction
    c0: Fraction
    c1: Fraction

    def _lift(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            return other
        return QuadElem(Fraction(other), Fraction(0), self.c0, self.c1)

    def __add__(self, other):
        o = self._lift(other)
        return QuadElem(self.a + o.a, self.b + o.b, self.c0, self.c1)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.a, -self.b, self.c0, self.c1)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        # (a + b t)(a' + b' t) with t^2 = -c1 t - c0
        tt = self.b * o.b
        return QuadElem(self.a * o.a - tt * self.c0, self.a * o.b + self.b * o.a - tt * self.c1, self.c0, self.c1)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, QuadElem) else x == 0


@dataclass(frozen=True)
class QuadraticPoint:
    """The Galois-conjugate pair of points ``[t:1]``, t a root of the monic irreducible ``minpoly``.

    ``minpoly`` is ascending: ``(c0, c1, 1)`` means ``t^2 + c1 t + c0``.
    """

    minpoly: tuple

    def __post_init__(self):
        mp = tuple(Fraction(c) for c in self.minpoly)
        object.__setattr__(self, "minpoly", mp)
        if len(mp) != 3 or mp[2] != 1:
            raise DomainError("quadratic point needs a monic degree-2 minimal polynomial")
        c0, c1 = mp[0], mp[1]
        if is_rational_square(c1 * c1 - 4 * c0):
            raise DomainError("minimal polynomial is reducible over Q")

    def generator(self) -> QuadElem:
        return QuadElem(Fraction(0), Fraction(1), self.minpoly[0], self.minpoly[1])

    def __str__(self) -> str:
        from .polys import format_poly

        return format_poly(self.minpoly, "t")


def is_totally_invariant(g: ProjRatMap, P) -> bool:
    """True iff ``w*G1 - u*G2`` is a nonzero multiple of ``(w X - u Y)^d``.

    ``P`` is a :class:`ProjPoint` or a :class:`QuadraticPoint`; for the latter the
    identity is checked in ``Q[t]/(minpoly)``.
    """
    if isinstance(P, QuadraticPoint):
        u, w = P.generator(), 1
    else:
        u, w = P.u, P.w
    d = g.degree
    fiber = [w * g.G1.coeffs[k] - u * g.G2.coeffs[k] for k in range(d + 1)]
    target = [math.comb(d, k) * (-1) ** (d - k) * _power(u, d - k) * _power(w, k) for k in range(d + 1)]
    if all(_is_zero(c) for c in fiber):
        return False
    for j in range(d + 1):
        for k in range(j + 1, d + 1):
            if not _is_zero(fiber[j] * target[k] - fiber[k] * target[j]):
                return False
    return True


def _power(x, e: int):
    out = 1
    for _ in range(e):
        out = out * x
    return out


@dataclass(frozen=True)
class AlgebraicPointSet:
    rational_points: tuple = ()
    quadratic_pairs: tuple = ()  # QuadraticPoint

    @property
    def count(self) -> int:
        return len(self.rational_points) + 2 * len(self.quadratic_pairs)

    def is_empty(self) -> bool:
        return self.count == 0

    def as_dict(self) -> dict:
        return {
            "rational": [str(P) for P in self.rational_points],
            "quadratic": [str(Q) for Q in self.quadratic_pairs],
        }


def invariance_locus(g: ProjRatMap) -> BinaryForm:
    """Squarefree gcd of the rank-one minors, a form in (u, w) of degree <= 2."""
    d = g.degree
    fiber = [BinaryForm((g.G1.coeffs[k], -g.G2.coeffs[k])) for k in range(d + 1)]
    target = [BinaryForm.monomial(d, d - k, math.comb(d, k) * (-1) ** (d - k)) for k in range(d + 1)]
    minors = []
    for j in range(d + 1):
        for k in range(j + 1, d + 1):
            minors.append(fiber[j] * target[k] - fiber[k] * target[j])
    G = form_gcd(minors)
    if G is None:
        raise DomainError("every minor vanishes: map is degenerate")
    return form_squarefree(G)


def totally_invariant_points(g: ProjRatMap) -> AlgebraicPointSet:
    if g.degree < 2:
        raise DomainError("totally invariant points need degree >= 2")
    L = invariance_locus(g)
    if L.degree > 2:
        raise AssertionError(f"totally invariant locus of degree {L.degree} > 2 for {g}")
    rational: list[ProjPoint] = []
    quadratic: list[QuadraticPoint] = []
    if L.degree > 0 and L.infinity_order() > 0:
        rational.append(INFINITY)
    p = pmonic(L.dehomogenize())
    if pdeg(p) == 1:
        rational.append(ProjPoint.from_rational(-p[0]))
    elif pdeg(p) == 2:
        c0, c1 = p[0], p[1]
        disc = c1 * c1 - 4 * c0
        if is_rational_square(disc):
            s = Fraction(math.isqrt(disc.numerator), math.isqrt(disc.denominator))
            rational.extend(ProjPoint.from_rational((-c1 + e * s) / 2) for e in (-1, 1))
        else:
            quadratic.append(QuadraticPoint(p))
    for P in rational + quadratic:
        if not is_totally_invariant(g, P):
            raise AssertionError(f"candidate {P} failed the total-invariance identity")
    rational.sort(key=ProjPoint.sort_key)
    return AlgebraicPointSet(tuple(rational), tuple(quadratic))


def exceptional_set(g: ProjRatMap) -> AlgebraicPointSet:
    """Points with finite backward orbit: the totally invariant points of g∘g."""
    if g.degree < 2:
        raise DomainError("exceptional set needs degree >= 2")
    E = totally_invariant_points(g.compose(g))
    if E.count > 2:
        raise AssertionError("more than two exceptional points")
    return E


@dataclass(frozen=True)
class ConjugacyVerdict:
    """``kind`` is ``"GItself"``, ``"SquareOnly"`` or ``"NoIterate"``."""

    kind: str
    witness: object = None  # ProjPoint | QuadraticPoint | None

    def as_dict(self) -> dict:
        w = self.witness
        return {
            "verdict": self.kind,
            "witness": None if w is None else str(w),
            "witness_kind": None if w is None else ("quadratic" if isinstance(w, QuadraticPoint) else "rational"),
        }


def polynomial_conjugacy(g: ProjRatMap) -> ConjugacyVerdict:
    """Whether g, or only g∘g, is conjugate over Q-bar to a polynomial map.

    A totally invariant point of g can be moved to infinity; if g has none but
    g∘g does, the two exceptional points are swapped. E(g^k) = E(g), so an
    empty exceptional set rules out every iterate.
    """
    T = totally_invariant_points(g)
    if not T.is_empty():
        return ConjugacyVerdict("GItself", (T.rational_points + T.quadratic_pairs)[0])
    E = exceptional_set(g)
    if not E.is_empty():
        return ConjugacyVerdict("SquareOnly", (E.rational_points + E.quadratic_pairs)[0])
    return ConjugacyVerdict("NoIterate")
