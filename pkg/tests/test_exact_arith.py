import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rationals
from dmlsplit.errors import BudgetExceeded, DomainError, ParseError
from dmlsplit.exact_arith import (
    ARCHIMEDEAN,
    ExactLog,
    Place,
    abs_v,
    factorint,
    finite_place,
    format_rational,
    int_to_str,
    is_prime,
    log_abs_v,
    log_positive_rational,
    parse_place,
    parse_rational,
    str_to_int,
    support_places,
    valuation,
)


def test_valuation_examples():
    assert valuation(12, 2) == 2
    assert valuation(Fraction(1, 9), 3) == -2
    # 7204 = f^3(1) for 3x^2+1, recomputed by hand here
    x = 1
    for _ in range(3):
        x = 3 * x * x + 1
    assert x == 7204 and 7204 % 3 != 0
    assert valuation(Fraction(7204), 3) == 0


def test_valuation_errors():
    with pytest.raises(DomainError):
        valuation(0, 5)
    with pytest.raises(DomainError):
        valuation(12, 4)


def test_abs_v_examples():
    assert abs_v(Fraction(-3, 4), ARCHIMEDEAN) == Fraction(3, 4)
    assert abs_v(3, Place(3)) == Fraction(1, 3)
    assert abs_v(0, Place(5)) == 0


def test_place_requires_prime():
    with pytest.raises(DomainError):
        Place(9)
    assert finite_place(7) == Place(7)
    assert parse_place("inf") == ARCHIMEDEAN and parse_place("13") == Place(13)
    assert sorted([Place(5), ARCHIMEDEAN, Place(2)]) == [ARCHIMEDEAN, Place(2), Place(5)]


def test_support_places_examples():
    assert support_places(Fraction(12, 5)) == {Place(2), Place(3), Place(5)}
    assert support_places(1) == frozenset()
    # 7204 = 4 * 1801 by trial division
    assert 7204 == 4 * 1801 and all(1801 % p for p in range(2, 43))
    assert support_places(7204) == {Place(2), Place(1801)}


def test_factor_large_semiprime_and_budget():
    p, q = 1_000_000_007, 998_244_353
    assert factorint(p * q) == {p: 1, q: 1}
    assert factorint(2**10 * 3**4 * p) == {2: 10, 3: 4, p: 1}
    with pytest.raises(BudgetExceeded) as exc:
        factorint((2**61 - 1) * (2**89 - 1), budget=5)
    assert exc.value.payload["cofactor"] > 1


def test_is_prime_matches_sympy():
    import sympy

    rng = random.Random(7)
    for _ in range(300):
        n = rng.randrange(2, 2**80)
        assert is_prime(n) == sympy.isprime(n)
    assert is_prime(2**127 - 1) and not is_prime(2**127 + 1)


def test_product_formula_1000_random():
    rng = random.Random(2024)
    for _ in range(1000):
        r = Fraction(rng.randrange(1, 2**64) * rng.choice((1, -1)), rng.randrange(1, 2**64))
        prod = abs_v(r, ARCHIMEDEAN)
        for v in support_places(r):
            prod *= abs_v(r, v)
        assert prod == 1


@given(rationals(nonzero=True), rationals(nonzero=True), st.sampled_from([2, 3, 5, 7, 101]))
def test_multiplicative(r, s, p):
    for v in (ARCHIMEDEAN, Place(p)):
        assert abs_v(r * s, v) == abs_v(r, v) * abs_v(s, v)


@given(rationals(), rationals(), st.sampled_from([2, 3, 5, 7]))
def test_ultrametric(r, s, p):
    v = Place(p)
    a, b, c = abs_v(r, v), abs_v(s, v), abs_v(r + s, v)
    assert c <= max(a, b)
    if a != b:
        assert c == max(a, b)


def test_log_examples():
    la = log_abs_v(4, ARCHIMEDEAN, 40)
    assert abs(la.value - mpmath.log(4)) <= la.error
    # |1/8|_2 = 2^3 under |2|_2 = 1/2, so the log is +3 log 2
    lb = log_abs_v(Fraction(1, 8), Place(2), 40)
    assert abs_v(Fraction(1, 8), Place(2)) == 8
    assert abs(lb.value - 3 * mpmath.log(2)) <= lb.error + mpmath.mpf(2) ** -60
    big = log_abs_v(2 ** (2**10), ARCHIMEDEAN, 40)
    # bit-length cross-check: log(2^1024) = 1024 log 2
    assert (2 ** (2**10)).bit_length() == 1025
    assert abs(big.value - 1024 * mpmath.log(2)) <= big.error
    with pytest.raises(DomainError):
        log_abs_v(0, ARCHIMEDEAN, 40)


@given(rationals(max_num=10**40, max_den=10**30, nonzero=True), st.sampled_from([24, 53, 100, 200]))
def test_log_error_bound_against_4x_oracle(r, prec):
    r = abs(r)
    la = log_positive_rational(r, prec)
    with mpmath.workprec(4 * prec + 40):
        ref = mpmath.log(mpmath.mpf(r.numerator)) - mpmath.log(mpmath.mpf(r.denominator))
        assert abs(la.value - ref) <= la.error + abs(ref) * mpmath.mpf(2) ** (-4 * prec)


def test_log_near_one_keeps_relative_accuracy():
    q = Fraction(10**30 + 1, 10**30)
    la = log_positive_rational(q, 53)
    with mpmath.workprec(300):
        ref = mpmath.log1p(mpmath.mpf(1) / 10**30)
    assert abs(la.value - ref) <= la.error


def test_parse_and_format_roundtrip():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational("7204") == 7204
    for bad in ("3/0", "1.5", "x", "--2"):
        with pytest.raises(ParseError):
            parse_rational(bad)
    for q in (Fraction(0), Fraction(-7, 3), Fraction(3**9000, 2**20001 + 1)):
        assert parse_rational(format_rational(q)) == q


def test_big_integer_strings():
    n = -(7**40000)
    assert str_to_int(int_to_str(n)) == n


def test_exact_log_comparisons():
    a, b = ExactLog(8, 3), ExactLog(2)
    assert not a < b and not a > b and a <= b and a >= b
    assert ExactLog(3) > ExactLog(8, 2)  # log 3 > log(8)/2 = log(2.83)
    assert ExactLog(2).scaled(3) == ExactLog(8)
    assert ExactLog(5, 4).scaled(2) == ExactLog(5, 2)
    assert ExactLog(Fraction(1, 2)).sign() == -1


@given(st.integers(1, 10**6), st.integers(1, 20), st.integers(1, 10**6), st.integers(1, 20))
def test_exact_log_order_matches_floats(a, i, b, j):
    x, y = math.log(a) / i, math.log(b) / j
    if abs(x - y) > 1e-9:
        assert (ExactLog(a, i) < ExactLog(b, j)) == (x < y)


@given(st.one_of(st.integers(1, 10**13), st.integers(1, 2**72), st.builds(lambda a, b: a * a * b, st.integers(1, 2 * 10**6), st.integers(1, 10**6))))
def test_factorint_matches_sympy(n):
    import sympy

    assert factorint(n) == dict(sorted(sympy.factorint(n).items()))
