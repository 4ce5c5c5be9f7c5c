"""Exact polynomial toolkit over Q.

Three representations:

* univariate polynomials as tuples of Fractions, ascending (``p[i]`` is the
  coefficient of ``x**i``), trailing zeros stripped;
* :class:`BinaryForm`, a homogeneous form ``sum a[k] X**k Y**(d-k)`` whose
  degree is explicit so that forms vanishing at infinity keep their degree;
* :class:`MPoly`, sparse multivariate polynomials keyed by exponent tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import BudgetExceeded, DomainError

Poly = tuple  # tuple[Fraction, ...]


# ---------------------------------------------------------------- univariate


def ptrim(p: Iterable) -> Poly:
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def pdeg(p: Poly) -> int:
    return len(p) - 1  # zero polynomial has degree -1


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return ptrim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, tuple(-c for c in b))


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def pscale(a: Poly, c) -> Poly:
    return ptrim(c * x for x in a)


def pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            a[k + i] -= c * y
        a = list(ptrim(a))
    return ptrim(q), ptrim(a)


def pmonic(p: Poly) -> Poly:
    return pscale(p, 1 / p[-1]) if p else p


def pgcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd (zero if both are zero)."""
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def pderiv(p: Poly) -> Poly:
    return ptrim(i * p[i] for i in range(1, len(p)))


def psquarefree(p: Poly) -> Poly:
    if pdeg(p) <= 0:
        return pmonic(p)
    return pmonic(pdivmod(p, pgcd(p, pderiv(p)))[0])


def peval(p: Poly, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def pcompose(p: Poly, q: Poly) -> Poly:
    """p(q(x))."""
    acc: Poly = ()
    for c in reversed(p):
        acc = padd(pmul(acc, q), (c,) if c else ())
    return acc


def ppow(p: Poly, e: int) -> Poly:
    out: Poly = (Fraction(1),)
    base = p
    while e:
        if e & 1:
            out = pmul(out, base)
        e >>= 1
        if e:
            base = pmul(base, base)
    return out


def integer_primitive(p: Sequence) -> tuple[int, ...]:
    """Scale rational coefficients to coprime integers (sign kept)."""
    p = [Fraction(c) for c in p]
    den = reduce(math.lcm, (c.denominator for c in p), 1)
    ints = [int(c * den) for c in p]
    g = reduce(math.gcd, ints, 0)
    return tuple(ints) if g in (0, 1) else tuple(c // g for c in ints)


def _divisors(n: int, factor) -> list[int]:
    divs = [1]
    for p, e in factor(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def rational_roots(p: Poly, factor=None) -> list[tuple[Fraction, int]]:
    """Rational roots with multiplicities, sorted ascending.

    Rational root theorem on the primitive integer form; ``factor`` maps an
    int to ``{prime: exp}`` (defaults to :func:`exact_arith.factorint`).
    """
    if factor is None:
        from .exact_arith import factorint as factor
    p = ptrim(p)
    if not p:
        raise DomainError("roots of the zero polynomial")
    roots: list[tuple[Fraction, int]] = []
    zero_mult = 0
    while p and p[0] == 0:
        p = p[1:]
        zero_mult += 1
    if zero_mult:
        roots.append((Fraction(0), zero_mult))
    if pdeg(p) >= 1:
        sq = integer_primitive(psquarefree(p))
        lead, const = abs(sq[-1]), abs(sq[0])
        cands = set()
        for a in _divisors(const, factor):
            for b in _divisors(lead, factor):
                if math.gcd(a, b) == 1:
                    cands.add(Fraction(a, b))
                    cands.add(Fraction(-a, b))
        for r in sorted(cands):
            if peval(sq, r) == 0:
                mult = 0
                q = p
                lin = (-r, Fraction(1))
                while True:
                    quo, rem = pdivmod(q, lin)
                    if rem:
                        break
                    mult += 1
                    q = quo
                roots.append((r, mult))
    return sorted(roots)


def is_rational_square(r: Fraction) -> bool:
    r = Fraction(r)
    if r < 0:
        return False
    a, b = math.isqrt(r.numerator), math.isqrt(r.denominator)
    return a * a == r.numerator and b * b == r.denominator


def format_poly(p: Poly, var: str = "t") -> str:
    """Human-readable, deterministic: ``t^2+1``, ``3*t-1/2``."""
    p = ptrim(p)
    if not p:
        return "0"
    parts = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        coef = str(a) if (a != 1 or i == 0) else ""
        term = coef + ("*" if coef and mono else "") + mono
        parts.append((sign, term))
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, term in parts[1:]:
        out += sign + term
    return out


# ---------------------------------------------------------------- binary forms


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous ``sum coeffs[k] * X**k * Y**(deg-k)``; ``len(coeffs) == deg + 1``."""

    coeffs: tuple

    @classmethod
    def from_descending(cls, coeffs: Sequence) -> "BinaryForm":
        return cls(tuple(reversed([Fraction(c) for c in coeffs])))

    @classmethod
    def zero(cls, deg: int) -> "BinaryForm":
        return cls((Fraction(0),) * (deg + 1))

    @classmethod
    def monomial(cls, deg: int, k: int, c=1) -> "BinaryForm":
        co = [Fraction(0)] * (deg + 1)
        co[k] = Fraction(c)
        return cls(tuple(co))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def descending(self) -> tuple:
        return tuple(reversed(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other: "BinaryForm") -> "BinaryForm":
        if other.degree != self.degree:
            raise ValueError("adding forms of different degree")
        return BinaryForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "BinaryForm") -> "BinaryForm":
        return self + other.scale(-1)

    def __mul__(self, other: "BinaryForm") -> "BinaryForm":
        out = [Fraction(0)] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return BinaryForm(tuple(out))

    def scale(self, c) -> "BinaryForm":
        return BinaryForm(tuple(c * a for a in self.coeffs))

    def pow(self, e: int) -> "BinaryForm":
        out = BinaryForm((Fraction(1),))
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def __call__(self, u, w):
        """Evaluate at (X, Y) = (u, w); works for any ring elements supporting + and *."""
        d = self.degree
        acc = None
        upow = [1]
        for _ in range(d):
            upow.append(upow[-1] * u)
        wpow = [1]
        for _ in range(d):
            wpow.append(wpow[-1] * w)
        for k, c in enumerate(self.coeffs):
            if c:
                term = upow[k] * wpow[d - k] * c
                acc = term if acc is None else acc + term
        return acc if acc is not None else 0 * u

    def compose(self, A: "BinaryForm", B: "BinaryForm") -> "BinaryForm":
        """``F(A(X,Y), B(X,Y))``; A and B share a degree."""
        if A.degree != B.degree:
            raise ValueError("compose needs equal-degree forms")
        d = self.degree
        Apow = [BinaryForm((Fraction(1),))]
        Bpow = [BinaryForm((Fraction(1),))]
        for _ in range(d):
            Apow.append(Apow[-1] * A)
            Bpow.append(Bpow[-1] * B)
        acc = BinaryForm.zero(d * A.degree)
        for k, c in enumerate(self.coeffs):
            if c:
                acc = acc + (Apow[k] * Bpow[d - k]).scale(c)
        return acc

    def linear_substitute(self, a, b, c, d) -> "BinaryForm":
        """``F(aX + bY, cX + dY)``."""
        return self.compose(BinaryForm((Fraction(b), Fraction(a))), BinaryForm((Fraction(d), Fraction(c))))

    def infinity_order(self) -> int:
        """Multiplicity of the root [1:0], i.e. of Y as a factor."""
        k = 0
        for c in reversed(self.coeffs):
            if c != 0:
                return k
            k += 1
        raise DomainError("zero form has no well-defined root multiplicity")

    def dehomogenize(self) -> Poly:
        """Set Y = 1."""
        return ptrim(self.coeffs)

    @classmethod
    def homogenize(cls, p: Poly, deg: int) -> "BinaryForm":
        p = ptrim(p)
        if pdeg(p) > deg:
            raise ValueError("degree too small to homogenize")
        return cls(tuple(p) + (Fraction(0),) * (deg + 1 - len(p)))

    def derivative_x(self) -> "BinaryForm":
        return BinaryForm(tuple(Fraction(k) * self.coeffs[k] for k in range(1, len(self.coeffs))))


def primitive_integer_forms(forms: Sequence[BinaryForm]) -> tuple[BinaryForm, ...]:
    """Jointly clear denominators and content; first nonzero descending coefficient made positive."""
    flat = [c for F in forms for c in F.coeffs]
    den = reduce(math.lcm, (Fraction(c).denominator for c in flat), 1)
    g = reduce(math.gcd, (int(c * den) for c in flat), 0)
    if g == 0:
        raise DomainError("all forms are zero")
    scale = Fraction(den, g)
    sign = 1
    for F in forms:
        lead = next((c for c in reversed(F.coeffs) if c != 0), None)
        if lead is not None:
            sign = 1 if lead > 0 else -1
            break
    return tuple(BinaryForm(tuple(Fraction(int(c * scale * sign)) for c in F.coeffs)) for F in forms)


def form_gcd(forms: Iterable[BinaryForm]) -> BinaryForm | None:
    """Monic gcd of nonzero binary forms as a form (None if every input is zero)."""
    forms = [F for F in forms if not F.is_zero()]
    if not forms:
        return None
    e = min(F.infinity_order() for F in forms)
    g: Poly = ()
    for F in forms:
        g = pgcd(g, F.dehomogenize())
    return BinaryForm.homogenize(g, pdeg(g) + e)


def form_squarefree(F: BinaryForm) -> BinaryForm:
    e = F.infinity_order()
    sq = psquarefree(F.dehomogenize())
    return BinaryForm.homogenize(sq, pdeg(sq) + min(e, 1))


def form_resultant(F: BinaryForm, G: BinaryForm) -> Fraction:
    """Homogeneous resultant: determinant of the Sylvester matrix of the full coefficient vectors."""
    return determinant(sylvester_matrix(F, G))


def sylvester_matrix(F: BinaryForm, G: BinaryForm) -> list[list[Fraction]]:
    m, n = F.degree, G.degree
    size = m + n
    f, g = F.descending(), G.descending()
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + list(f) + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + list(g) + [Fraction(0)] * (size - n - 1 - i))
    return rows


def bezout_cofactors(G1: BinaryForm, G2: BinaryForm, target_k: int) -> tuple[BinaryForm, BinaryForm, Fraction]:
    """Forms A, B of degree d-1 with ``A*G1 + B*G2 = R * X**k * Y**(2d-1-k)``, R the resultant.

    Solves the Sylvester linear system exactly; the result is verified before returning.
    """
    d = G1.degree
    if G2.degree != d:
        raise ValueError("cofactors need equal-degree forms")
    R = form_resultant(G1, G2)
    if R == 0:
        raise DomainError("forms share a root (resultant 0)")
    n = 2 * d
    # column j < d: X^j Y^(d-1-j) * G1; column d + j: same monomial times G2
    cols = []
    for G in (G1, G2):
        for j in range(d):
            cols.append((BinaryForm.monomial(d - 1, j) * G).coeffs)
    M = [[cols[c][r] for c in range(n)] for r in range(n)]
    rhs = [Fraction(0)] * n
    rhs[target_k] = R
    sol = solve_linear(M, rhs)
    A = BinaryForm(tuple(sol[:d]))
    B = BinaryForm(tuple(sol[d:]))
    lhs = A * G1 + B * G2
    if lhs != BinaryForm.monomial(2 * d - 1, target_k, R):
        raise AssertionError("cofactor identity failed")
    return A, B, R


# ---------------------------------------------------------------- linear algebra


def determinant(M: Sequence[Sequence]) -> Fraction:
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] / A[c][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return det


def solve_linear(M: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise DomainError("singular linear system")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [A[r][n] for r in range(n)]


# ---------------------------------------------------------------- multivariate


class MPoly:
    """Sparse polynomial in ``nvars`` variables with Fraction coefficients.

    Terms are ``{exponent_tuple: coefficient}``; division uses lex order on the
    variables as listed.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, nvars: int, c) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, MPoly) and self.terms == other.terms

    def __add__(self, other: "MPoly") -> "MPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return MPoly(self.nvars, out)

    def __neg__(self) -> "MPoly":
        return MPoly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            return MPoly(self.nvars, {k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return MPoly(self.nvars, out)

    __rmul__ = __mul__

    def pow(self, e: int, max_terms: int | None = None) -> "MPoly":
        out = MPoly.const(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
                _check_terms(out, max_terms)
            e >>= 1
            if e:
                base = base * base
                _check_terms(base, max_terms)
        return out

    def leading(self) -> tuple[tuple, Fraction]:
        k = max(self.terms)
        return k, self.terms[k]

    def divmod(self, divisor: "MPoly", max_steps: int | None = None) -> tuple["MPoly", "MPoly"]:
        """Lex-order division; remainder is zero iff ``divisor`` divides ``self``."""
        if not divisor:
            raise ZeroDivisionError("division by zero polynomial")
        lk, lc = divisor.leading()
        p = dict(self.terms)
        q: dict = {}
        r: dict = {}
        steps = 0
        while p:
            k = max(p)
            c = p[k]
            if all(a >= b for a, b in zip(k, lk)):
                mk = tuple(a - b for a, b in zip(k, lk))
                mc = c / lc
                q[mk] = q.get(mk, 0) + mc
                for dk, dc in divisor.terms.items():
                    kk = tuple(a + b for a, b in zip(mk, dk))
                    v = p.get(kk, 0) - mc * dc
                    if v:
                        p[kk] = v
                    else:
                        p.pop(kk, None)
            else:
                r[k] = c
                del p[k]
            steps += 1
            if max_steps is not None and steps > max_steps:
                raise BudgetExceeded("multivariate division step budget exceeded")
        return MPoly(self.nvars, q), MPoly(self.nvars, r)

    def evaluate(self, point: Sequence):
        acc = Fraction(0)
        for k, v in self.terms.items():
            t = v
            for x, e in zip(point, k):
                if e:
                    t *= x**e
            acc += t
        return acc

    def __repr__(self) -> str:
        return f"MPoly({self.nvars}, {dict(sorted(self.terms.items()))})"


def _check_terms(p: MPoly, max_terms: int | None) -> None:
    if max_terms is not None and len(p.terms) > max_terms:
        raise BudgetExceeded(f"polynomial exceeded {max_terms} terms")


def univariate_to_mpoly(p: Poly, nvars: int, i: int) -> MPoly:
    terms = {}
    for e, c in enumerate(p):
        k = [0] * nvars
        k[i] = e
        terms[tuple(k)] = c
    return MPoly(nvars, terms)


def form_to_mpoly(F: BinaryForm, nvars: int, ix: int, iy: int) -> MPoly:
    terms = {}
    d = F.degree
    for k, c in enumerate(F.coeffs):
        e = [0] * nvars
        e[ix] += k
        e[iy] += d - k
        terms[tuple(e)] = c
    return MPoly(nvars, terms)

