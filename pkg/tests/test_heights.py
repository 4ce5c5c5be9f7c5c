import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dmlsplit.affine import AffinePolyMap
from dmlsplit.errors import BudgetExceeded, DomainError
from dmlsplit.heights import (
    NonPreperiodic,
    Preperiodic,
    Unknown,
    canonical_height,
    height_comparison_constant,
    is_preperiodic,
    weil_height,
)
from dmlsplit.projective import ProjPoint, ProjRatMap

SQUARE = ProjRatMap.from_descending([1, 0, 0], [0, 0, 1])
NEWTON_ONE = ProjRatMap.from_descending([1, 0, 1], [0, 2, 0])  # (z^2+1)/(2z)
Z_PLUS_INV = ProjRatMap.from_descending([1, 0, 1], [0, 1, 0])


def test_weil_height_examples():
    assert weil_height(ProjPoint.of(1, 1)).exact_arg == 1
    x = 1
    for _ in range(3):
        x = 3 * x * x + 1
    h = weil_height(ProjPoint.of(x, 1))
    assert h.exact_arg == 7204 and abs(h.approx.value - mpmath.log(7204)) <= h.approx.error
    assert weil_height(ProjPoint.of(5, 2)).exact_arg == 5


def _sampled_inequality_holds(g, rng, samples=1000):
    """|h(gP) - d h(P)| <= C, checked as H(gP) * C >= H(P)^d and H(gP) <= C * H(P)^d."""
    C = height_comparison_constant(g).arg
    d = g.degree
    for _ in range(samples):
        bits = rng.randrange(1, 200)
        P = ProjPoint.of(rng.randrange(-(2**bits), 2**bits), rng.randrange(1, 2**bits))
        Hp = max(abs(P.u), abs(P.w))
        Q = g(P)
        Hq = max(abs(Q.u), abs(Q.w))
        if not (Hq <= C * Hp**d and Hq * C >= Hp**d):
            return False, P
    return True, None


@pytest.mark.parametrize("g", [SQUARE, NEWTON_ONE, Z_PLUS_INV], ids=str)
def test_height_constant_sampled_1000(g):
    ok, bad = _sampled_inequality_holds(g, random.Random(11))
    assert ok, f"inequality failed at {bad}"


def test_height_constant_squaring_is_tight():
    assert height_comparison_constant(SQUARE).arg == 1


def test_height_constant_errors():
    with pytest.raises(DomainError):
        height_comparison_constant(ProjRatMap.from_descending([1, 1], [0, 1]))


coeff = st.integers(-5, 5)


@given(st.lists(coeff, min_size=3, max_size=3), st.lists(coeff, min_size=3, max_size=3), st.randoms(use_true_random=False))
def test_height_constant_sampled_random_maps(a, b, rng):
    try:
        g = ProjRatMap.from_descending(a, b)
    except DomainError:
        return
    if g.degree < 2:
        return
    ok, bad = _sampled_inequality_holds(g, rng, samples=50)
    assert ok, f"{g} at {bad}"


def test_canonical_height_examples():
    for n in (0, 1, 5):
        est = canonical_height(SQUARE, ProjPoint.of(2, 1), n)
        assert est.estimate == pytest.approx(float(mpmath.log(2)), rel=1e-15)
    assert canonical_height(SQUARE, ProjPoint.of(1, 1), 4).estimate == 0
    a = canonical_height(Z_PLUS_INV, ProjPoint.of(2, 1), 10)
    b = canonical_height(Z_PLUS_INV, ProjPoint.of(2, 1), 14)
    assert abs(a.estimate - b.estimate) <= a.error_bound


def test_canonical_height_budget():
    with pytest.raises(BudgetExceeded):
        canonical_height(SQUARE, ProjPoint.of(2, 1), 30, bitsize_cap=10_000)


@pytest.mark.parametrize("d", [2, 3])
def test_squaring_estimate_equals_weil_height(d):
    g = ProjRatMap.from_descending([1] + [0] * d, [0] * d + [1])
    P = ProjPoint.of(7, 3)
    for n in range(5):
        # exact: H(g^n P) = H(P)^(d^n)
        assert canonical_height(g, P, n).height_arg == 7 ** (d**n)


def test_telescoping_exact():
    # |h(g^n P)/d^n - h(g^m P)/d^m| <= C/(d^n (d-1)), as H_n^(d^(m-n)) vs H_m with factor C^(d^(m-n)/(d-1))
    g, P = Z_PLUS_INV, ProjPoint.of(2, 1)
    C = height_comparison_constant(g).arg
    d = g.degree
    Hs = []
    x = P
    for _ in range(9):
        Hs.append(max(abs(x.u), abs(x.w)))
        x = g(x)
    for n in range(len(Hs)):
        for m in range(n + 1, len(Hs)):
            k = d ** (m - n)
            lhs_a, lhs_b = Hs[n] ** k, Hs[m]
            # (d-1) * |log lhs_b - log lhs_a| <= k log C
            hi, lo = max(lhs_a, lhs_b), min(lhs_a, lhs_b)
            assert hi ** (d - 1) <= lo ** (d - 1) * C**k


def test_preperiodic_examples():
    assert is_preperiodic(AffinePolyMap((-1, 0, 1)), 0, 10) == Preperiodic(0, 2)
    v = is_preperiodic(SQUARE, ProjPoint.of(2, 1), 10)
    assert isinstance(v, NonPreperiodic) and v.holds()
    w = is_preperiodic(AffinePolyMap((1, 0, 3)), 1, 10)
    assert isinstance(w, NonPreperiodic) and w.witness_index <= 3


def test_preperiodic_degree_one_only_cycles():
    f = AffinePolyMap((1, 1))  # x + 1
    assert is_preperiodic(f, 0, 20) == Unknown(20)
    assert is_preperiodic(AffinePolyMap((0, -1)), 3, 5) == Preperiodic(0, 2)


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=4).filter(lambda c: c[-1] != 0), st.integers(-4, 4))
def test_budget_only_refines_unknown(c, x0):
    f = AffinePolyMap(tuple(c))
    verdicts = [is_preperiodic(f, x0, b, bitsize_cap=4096) for b in (0, 1, 3, 8, 16)]
    kinds = {type(v) for v in verdicts} - {Unknown}
    assert len(kinds) <= 1
    for a, b in zip(verdicts, verdicts[1:]):
        if not isinstance(a, Unknown):
            assert b == a
