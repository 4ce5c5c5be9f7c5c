from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import rationals
from dmlsplit.errors import DomainError
from dmlsplit.polys import BinaryForm
from dmlsplit.projective import (
    INFINITY,
    Mobius,
    ProjPoint,
    ProjRatMap,
    QuadraticPoint,
    conjugate,
    conjugate_point,
    exceptional_set,
    fixed_point_form,
    is_totally_invariant,
    orbit,
    parse_map,
    parse_point,
    polynomial_conjugacy,
    totally_invariant_points,
)
from oracles import exceptional_oracle, naive_rational_orbit, quadratic_roots, sym_point, totally_invariant_oracle

SQUARE = ProjRatMap.from_descending([1, 0, 0], [0, 0, 1])
Z_PLUS_INV = ProjRatMap.from_descending([1, 0, 1], [0, 1, 0])  # z + 1/z
NEWTON_ONE = ProjRatMap.from_descending([1, 0, 1], [0, 2, 0])  # Newton map of z^2 - 1
NEWTON_I = ProjRatMap.from_descending([1, 0, -1], [0, 2, 0])  # Newton map of z^2 + 1
CHEB2 = ProjRatMap.from_descending([1, 0, -2], [0, 0, 1])  # z^2 - 2
Z4 = ProjRatMap.from_descending([1, 0, 0, 0, 0], [0, 0, 0, 0, 1])

# small nondegenerate maps of degree 2 for property tests
coeff = st.integers(-3, 3)
deg2_maps = st.tuples(st.lists(coeff, min_size=3, max_size=3), st.lists(coeff, min_size=3, max_size=3)).filter(
    lambda p: BinaryForm.from_descending(p[0]).degree == 2
).map(lambda p: _try_map(*p)).filter(lambda g: g is not None)
mobius = st.tuples(coeff, coeff, coeff, coeff).filter(lambda m: m[0] * m[3] != m[1] * m[2]).map(lambda m: Mobius(*m))


def _try_map(a, b):
    try:
        return ProjRatMap.from_descending(a, b)
    except DomainError:
        return None


def pt(u, w=1):
    return ProjPoint.of(u, w)


def test_point_normal_form():
    assert ProjPoint.of(-4, -6) == ProjPoint(2, 3)
    assert ProjPoint.of(-3, 0) == INFINITY
    assert parse_point("inf") == INFINITY and parse_point("3/6") == pt(1, 2) and parse_point("4:-2") == pt(-2)
    with pytest.raises(DomainError):
        ProjPoint.of(0, 0)


def test_map_construction():
    assert parse_map("1,0,1;0,1,0") == Z_PLUS_INV
    with pytest.raises(DomainError):
        ProjRatMap.from_descending([1, -1, 0], [1, 0, -1])  # shared root z = 1
    with pytest.raises(DomainError):
        ProjRatMap.from_descending([1, 0], [0, 0, 1])


def test_eval_examples():
    assert Z_PLUS_INV(pt(2)) == pt(5, 2)
    assert Z_PLUS_INV(INFINITY) == INFINITY
    assert SQUARE(pt(2, 3)) == pt(4, 9)


def test_orbit_examples():
    seg = orbit(Z_PLUS_INV, pt(1), 3)
    assert list(seg.values) == [pt(1), pt(2), pt(5, 2), pt(29, 10)]
    assert orbit(SQUARE, pt(1), 5).cycle == (0, 1)
    seg0 = orbit(SQUARE, pt(0), 5)
    assert seg0.cycle == (0, 1) and seg0.values[0] == pt(0)


def test_orbit_matches_naive():
    ys = naive_rational_orbit([1, 0, 1], [0, 1, 0], Fraction(3), 6)
    seg = orbit(Z_PLUS_INV, pt(3), 6)
    assert [P.affine() for P in seg.values] == ys


def test_conjugate_examples():
    assert conjugate(Z_PLUS_INV, Mobius.identity()) == Z_PLUS_INV
    swap = Mobius(0, 1, 1, 0)
    assert conjugate(SQUARE, swap) == SQUARE


def test_singular_mobius():
    with pytest.raises(DomainError):
        Mobius(1, 2, 2, 4)


@given(deg2_maps, mobius, rationals(max_num=20, max_den=20))
def test_conjugate_orbit_equivariance(g, M, x):
    P = ProjPoint.from_rational(x)
    h = conjugate(g, M)
    assert h.degree == g.degree
    assert h(conjugate_point(P, M)) == conjugate_point(g(P), M)


def test_fixed_point_form_examples():
    X, Y = sympy.symbols("X Y")

    def sym(F):
        return sympy.expand(sum(sympy.Rational(str(c)) * X**k * Y ** (F.degree - k) for k, c in enumerate(F.coeffs)))

    assert sympy.factor(sym(fixed_point_form(SQUARE))) in (X * Y * (X - Y), -X * Y * (X - Y))
    assert sym(fixed_point_form(Z_PLUS_INV)) in (Y**3, -(Y**3))
    F = sym(fixed_point_form(NEWTON_ONE))
    assert sympy.expand(F - Y * (Y**2 - X**2)) == 0 or sympy.expand(F + Y * (Y**2 - X**2)) == 0


def test_is_totally_invariant_examples():
    assert is_totally_invariant(SQUARE, pt(0))
    # (X^2 - Y^2) - i*2XY = (X - iY)^2
    assert is_totally_invariant(NEWTON_I, QuadraticPoint((1, 0, 1)))
    assert not is_totally_invariant(NEWTON_ONE, QuadraticPoint((1, 0, 1)))
    assert is_totally_invariant(NEWTON_ONE, pt(1)) and is_totally_invariant(NEWTON_ONE, pt(-1))
    assert not is_totally_invariant(Z_PLUS_INV, INFINITY)


def test_totally_invariant_examples():
    T = totally_invariant_points(Z4)
    assert T.rational_points == (pt(0), INFINITY) and not T.quadratic_pairs
    assert totally_invariant_points(Z_PLUS_INV).is_empty()
    Ti = totally_invariant_points(NEWTON_I)
    assert [str(q) for q in Ti.quadratic_pairs] == ["t^2+1"] and not Ti.rational_points
    assert totally_invariant_points(NEWTON_ONE).rational_points == (pt(-1), pt(1))


def test_exceptional_examples():
    assert exceptional_set(SQUARE).rational_points == (pt(0), INFINITY)
    assert exceptional_set(Z_PLUS_INV).is_empty()
    assert [str(q) for q in exceptional_set(NEWTON_I).quadratic_pairs] == ["t^2+1"]
    assert exceptional_set(NEWTON_ONE).as_dict() == {"rational": ["-1:1", "1:1"], "quadratic": []}
    # z -> 1/z^2 swaps 0 and infinity: exceptional but not totally invariant
    inv_sq = ProjRatMap.from_descending([0, 0, 1], [1, 0, 0])
    assert totally_invariant_points(inv_sq).is_empty()
    assert exceptional_set(inv_sq).rational_points == (pt(0), INFINITY)


def _library_points(S):
    pts = [sym_point(P) for P in S.rational_points]
    for q in S.quadratic_pairs:
        pts.extend(quadratic_roots(q.minpoly))
    return sorted(pts, key=str)


@pytest.mark.parametrize("g", [SQUARE, Z_PLUS_INV, NEWTON_ONE, NEWTON_I, CHEB2, Z4], ids=str)
def test_fiber_oracle(g):
    d1, d2 = g.descending_lists()
    assert _library_points(totally_invariant_points(g)) == totally_invariant_oracle(d1, d2)
    assert _library_points(exceptional_set(g)) == exceptional_oracle(d1, d2)


@given(deg2_maps)
def test_fiber_oracle_random(g):
    d1, d2 = g.descending_lists()
    assert _library_points(totally_invariant_points(g)) == totally_invariant_oracle(d1, d2)


@given(deg2_maps)
def test_exceptional_set_stable_under_iteration(g):
    E = exceptional_set(g)
    assert E.count <= 2
    assert exceptional_set(g.compose(g)) == E


@given(deg2_maps, mobius)
def test_totally_invariant_equivariance(g, M):
    T = totally_invariant_points(g)
    Tc = totally_invariant_points(conjugate(g, M))
    assert sorted(Tc.rational_points, key=ProjPoint.sort_key) == sorted(
        (M(P) for P in T.rational_points), key=ProjPoint.sort_key
    )
    assert len(Tc.quadratic_pairs) == len(T.quadratic_pairs)


def test_polynomial_conjugacy_examples():
    v = polynomial_conjugacy(CHEB2)
    assert v.kind == "GItself" and v.witness == INFINITY
    vi = polynomial_conjugacy(NEWTON_I)
    assert vi.as_dict() == {"verdict": "GItself", "witness": "t^2+1", "witness_kind": "quadratic"}
    assert polynomial_conjugacy(Z_PLUS_INV).kind == "NoIterate"
    inv_sq = ProjRatMap.from_descending([0, 0, 1], [1, 0, 0])
    assert polynomial_conjugacy(inv_sq).kind == "SquareOnly"


def test_degree_one_rejected():
    g = ProjRatMap.from_descending([1, 1], [0, 1])
    with pytest.raises(DomainError):
        totally_invariant_points(g)
