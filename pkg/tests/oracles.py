"""Independent reference computations for the test-suite.

Nothing here calls the library's algorithms: orbits use naive Fraction
arithmetic on affine coordinates, fibers and fixed points go through sympy,
and large indices are checked with separately chosen primes.
"""

from __future__ import annotations

from fractions import Fraction

import sympy

X, Y, T = sympy.symbols("X Y t")

# primes disjoint from the library's witness primes
ORACLE_PRIMES = (1_000_000_021, 1_000_000_033, 4_294_967_291)


def naive_poly(coeffs_ascending, x):
    return sum(Fraction(c) * Fraction(x) ** i for i, c in enumerate(coeffs_ascending))


def naive_affine_orbit(coeffs_ascending, x0, n):
    out = [Fraction(x0)]
    for _ in range(n):
        out.append(naive_poly(coeffs_ascending, out[-1]))
    return out


def naive_rational_map(desc1, desc2, y):
    """Affine-chart evaluation of z -> G1(z,1)/G2(z,1); ``None`` is infinity."""
    d = len(desc1) - 1
    if y is None:
        a, b = Fraction(desc1[0]), Fraction(desc2[0])
        return None if b == 0 else a / b
    num = sum(Fraction(c) * y ** (d - k) for k, c in enumerate(desc1))
    den = sum(Fraction(c) * y ** (d - k) for k, c in enumerate(desc2))
    return None if den == 0 else num / den


def naive_rational_orbit(desc1, desc2, y0, n):
    out = [y0]
    for _ in range(n):
        out.append(naive_rational_map(desc1, desc2, out[-1]))
    return out


def naive_curve(grid, x, y):
    """phi(x, y) on the affine chart; at y = inf, the top y-degree coefficient polynomial in x."""
    if y is None:
        n = len(grid[0]) - 1
        return sum(Fraction(row[n]) * Fraction(x) ** i for i, row in enumerate(grid))
    return sum(Fraction(c) * Fraction(x) ** i * y**j for i, row in enumerate(grid) for j, c in enumerate(row))


def brute_return_set(f_asc, g_desc, x0, y0, grid, nmax):
    xs = naive_affine_orbit(f_asc, x0, nmax)
    ys = naive_rational_orbit(g_desc[0], g_desc[1], y0, nmax)
    return [n for n in range(nmax + 1) if naive_curve(grid, xs[n], ys[n]) == 0]


def modular_residues(f_asc, g_desc, x0, y0_uw, grid, nmax, p):
    """Residues of the bihomogenized curve on unnormalized orbits mod p, computed from scratch."""
    def inv(a):
        return pow(a % p, p - 2, p)

    fc = [Fraction(c).numerator * inv(Fraction(c).denominator) % p for c in f_asc]
    x = Fraction(x0).numerator * inv(Fraction(x0).denominator) % p
    u, w = y0_uw[0] % p, y0_uw[1] % p
    d = len(g_desc[0]) - 1
    n_y = len(grid[0]) - 1
    out = []
    for _ in range(nmax + 1):
        val = 0
        for i, row in enumerate(grid):
            for j, c in enumerate(row):
                c = Fraction(c)
                val += c.numerator * inv(c.denominator) * pow(x, i, p) * pow(u, j, p) * pow(w, n_y - j, p)
        out.append(val % p)
        x = sum(c * pow(x, i, p) for i, c in enumerate(fc)) % p
        u, w = (
            sum(int(c) * pow(u, d - k, p) * pow(w, k, p) for k, c in enumerate(g_desc[0])) % p,
            sum(int(c) * pow(u, d - k, p) * pow(w, k, p) for k, c in enumerate(g_desc[1])) % p,
        )
    return out


# ---------------------------------------------------------------- fibers via sympy


def sym_forms(desc1, desc2):
    d = len(desc1) - 1
    G1 = sum(sympy.Rational(str(c)) * X ** (d - k) * Y**k for k, c in enumerate(desc1))
    G2 = sum(sympy.Rational(str(c)) * X ** (d - k) * Y**k for k, c in enumerate(desc2))
    return sympy.expand(G1), sympy.expand(G2), d


def sym_compose(desc1, desc2):
    G1, G2, d = sym_forms(desc1, desc2)
    H1 = sympy.expand(G1.subs({X: G1, Y: G2}, simultaneous=True))
    H2 = sympy.expand(G2.subs({X: G1, Y: G2}, simultaneous=True))
    return H1, H2, d * d


def fixed_points(G1, G2):
    """Fixed points of [G1:G2] of degree <= 2 over Q, with sympy.oo for infinity.

    Totally invariant sets are Galois-stable with at most two points, so
    higher-degree factors of the fixed-point polynomial never contribute.
    """
    F = sympy.expand(Y * G1 - X * G2)
    pts = []
    if sympy.expand(F.subs(Y, 0)) == 0:
        pts.append(sympy.oo)
    _, factors = sympy.factor_list(F.subs(Y, 1), X)
    for fac, _ in factors:
        if 1 <= sympy.degree(fac, X) <= 2:
            pts.extend(sympy.roots(sympy.Poly(fac, X), multiple=True))
    return pts


def fiber_is_single(G1, G2, d, p) -> bool:
    """The fiber of [G1:G2] over p is {p} with multiplicity d."""
    if p is sympy.oo:
        # fiber over infinity: roots of G2; must be d-fold infinity, i.e. G2 = c*Y^d
        return sympy.expand(G2 - G2.coeff(Y, d) * Y**d) == 0 and G2.coeff(Y, d) != 0
    q = sympy.expand((G1 - p * G2).subs(Y, 1))
    poly = sympy.Poly(q, X, extension=True) if not p.is_Rational else sympy.Poly(q, X)
    if poly.degree() != d:
        return False
    lead = poly.LC()
    return sympy.expand(q - lead * (X - p) ** d) == 0


def totally_invariant_oracle(desc1, desc2):
    G1, G2, d = sym_forms(desc1, desc2)
    return sorted((p for p in fixed_points(G1, G2) if fiber_is_single(G1, G2, d, p)), key=str)


def exceptional_oracle(desc1, desc2):
    H1, H2, d2 = sym_compose(desc1, desc2)
    return sorted((p for p in fixed_points(H1, H2) if fiber_is_single(H1, H2, d2, p)), key=str)


def sym_point(P):
    """Library ProjPoint -> sympy number (oo for infinity)."""
    return sympy.oo if P.w == 0 else sympy.Rational(P.u, P.w)


def quadratic_roots(q_ascending):
    return sorted(sympy.roots(sympy.Poly(list(reversed([sympy.Rational(str(c)) for c in q_ascending])), T)), key=str)


def c_v_by_hand(coeffs_ascending, place):
    """The threshold formula evaluated directly from coefficients, with |.|_v computed via sympy factorization."""
    def absv(r):
        r = sympy.Rational(str(r))
        if r == 0:
            return sympy.Integer(0)
        if place == "inf":
            return abs(r)
        e = sympy.multiplicity(place, r.p) - sympy.multiplicity(place, r.q)
        return sympy.Rational(1, place**e) if e >= 0 else sympy.Integer(place ** (-e))

    lead = absv(coeffs_ascending[-1])
    return 2 / lead * (1 + sum(absv(c) for c in coeffs_ascending[:-1])) + 1
