from fractions import Fraction

import mpmath
import sympy
from hypothesis import given
from hypothesis import strategies as st

from dmlsplit.polys import (
    BinaryForm,
    MPoly,
    bezout_cofactors,
    form_gcd,
    form_resultant,
    form_squarefree,
    format_poly,
    pcompose,
    pdivmod,
    pgcd,
    pmul,
    ptrim,
    rational_roots,
    solve_linear,
    determinant,
)

small = st.integers(-9, 9)
polys = st.lists(small, min_size=1, max_size=5).map(lambda c: ptrim(map(Fraction, c)))
forms = st.integers(1, 3).flatmap(lambda d: st.lists(small, min_size=d + 1, max_size=d + 1)).map(BinaryForm)

x = sympy.symbols("x")


def to_sympy(p):
    return sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(p))


@given(polys, polys.filter(lambda p: any(p)))
def test_divmod_identity(a, b):
    q, r = pdivmod(a, b)
    assert ptrim(map(Fraction, sympy.Poly(to_sympy(pmul(q, b)) + to_sympy(r), x).all_coeffs()[::-1])) == ptrim(a) or (
        not any(a) and not any(r)
    )
    assert len(ptrim(r)) < len(ptrim(b)) or not any(r)


@given(polys, polys)
def test_gcd_matches_sympy(a, b):
    g = pgcd(a, b)
    ref = sympy.gcd(to_sympy(a), to_sympy(b))
    if ref == 0:
        assert not any(g)
    else:
        assert sympy.simplify(to_sympy(g) / ref).is_constant()


def test_rational_roots():
    # (2x - 1)^2 (x + 3) (x^2 + 1)
    p = ptrim(map(Fraction, sympy.Poly((2 * x - 1) ** 2 * (x + 3) * (x**2 + 1), x).all_coeffs()[::-1]))
    assert rational_roots(p) == [(Fraction(-3), 1), (Fraction(1, 2), 2)]
    assert rational_roots((Fraction(-2), Fraction(0), Fraction(1))) == []


def test_compose_and_format():
    f = (Fraction(-1), Fraction(0), Fraction(1))
    assert format_poly(pcompose(f, f), "x") == "x^4-2*x^2"
    assert format_poly((Fraction(1), Fraction(0), Fraction(1))) == "t^2+1"


@given(forms, forms)
def test_resultant_matches_root_product(F, G):
    # Res = lc(F)^e * lc(G)^d * prod(alpha - beta) over the affine roots
    if F.coeffs[-1] == 0 or G.coeffs[-1] == 0:
        return
    d, e = F.degree, G.degree
    with mpmath.workdps(60):
        ra = mpmath.polyroots([int(c) for c in F.descending()], maxsteps=200, extraprec=200)
        rb = mpmath.polyroots([int(c) for c in G.descending()], maxsteps=200, extraprec=200)
        prod = mpmath.mpf(int(F.coeffs[-1])) ** e * mpmath.mpf(int(G.coeffs[-1])) ** d
        for a in ra:
            for b in rb:
                prod *= a - b
        assert abs(prod - form_resultant(F, G)) < 1e-20


def test_bezout_identity():
    G1 = BinaryForm.from_descending([1, 0, 1])
    G2 = BinaryForm.from_descending([0, 1, 0])
    for k in (3, 0):
        A, B, R = bezout_cofactors(G1, G2, k)
        assert (A * G1 + B * G2) == BinaryForm.monomial(3, k, R)
        assert R != 0


def test_form_gcd_and_squarefree():
    L = BinaryForm.from_descending([1, -1])  # X - Y
    M = BinaryForm.from_descending([1, 2])  # X + 2Y
    g = form_gcd([L * L * M, L * M * M])
    assert g.degree == 2
    assert form_squarefree(L * L * L * M).degree == 2


def test_linear_algebra():
    M = [[2, 1], [1, 3]]
    assert determinant(M) == 5
    assert solve_linear(M, [3, 5]) == [Fraction(4, 5), Fraction(7, 5)]


def test_mpoly_division():
    xv, yv = MPoly.var(2, 0), MPoly.var(2, 1)
    phi = xv - yv
    psi = xv * xv - yv * yv
    q, r = psi.divmod(phi)
    assert not r and q == xv + yv
    _, r2 = (xv * xv + MPoly.const(2, 1)).divmod(phi)
    assert r2
