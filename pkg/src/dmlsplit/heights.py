"""Weil and canonical heights on P^1(Q) and rigorous preperiodicity decisions.

For a degree-d map g there is an explicit C with ``|h(gP) - d h(P)| <= C`` for
all P. Telescoping gives ``hhat(P) >= h(P) - C/(d-1)``, so a single orbit point
with ``h > C/(d-1)`` certifies that the canonical height is positive, i.e. the
point is not preperiodic. C is kept as ``log`` of an explicit rational so the
escape test is an exact integer comparison.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
import math

from .affine import AffinePolyMap, homogenize
from .errors import BudgetExceeded, DomainError
from .exact_arith import LogApprox, format_rational, log_positive_rational
from .orbit import DEFAULT_BITSIZE_CAP
from .polys import BinaryForm, bezout_cofactors
from .projective import ProjPoint, ProjRatMap


@dataclass(frozen=True)
class HeightValue:
    exact_arg: int  # the height is log(exact_arg)
    approx: LogApprox

    def as_dict(self) -> dict:
        return {"arg": format_rational(self.exact_arg), "approx": self.approx.text(), "error": float(self.approx.error)}


def weil_height(P: ProjPoint, precision_bits: int = 53) -> HeightValue:
    M = max(abs(P.u), abs(P.w))
    return HeightValue(M, log_positive_rational(M, precision_bits))


def _l1(F: BinaryForm) -> Fraction:
    return sum((abs(c) for c in F.coeffs), Fraction(0))


@dataclass(frozen=True)
class HeightConstant:
    """``C = log(arg)``: ``|h(gP) - d h(P)| <= C`` for every P in P^1(Q).

    ``upper_arg`` bounds ``h(gP) - d h(P)`` from above (coefficient sizes);
    ``lower_arg`` bounds ``d h(P) - h(gP)`` via the resultant cofactor identities.
    """

    arg: Fraction
    upper_arg: Fraction
    lower_arg: Fraction
    resultant: Fraction
    degree: int

    def approx(self, precision_bits: int = 53) -> LogApprox:
        return log_positive_rational(self.arg, precision_bits)

    def as_dict(self) -> dict:
        return {
            "C_arg": format_rational(self.arg),
            "C_approx": self.approx().text(),
            "upper_arg": format_rational(self.upper_arg),
            "lower_arg": format_rational(self.lower_arg),
            "resultant": format_rational(self.resultant),
        }


def height_comparison_constant(g: ProjRatMap) -> HeightConstant:
    d = g.degree
    if d < 2:
        raise DomainError("height comparison constant needs degree >= 2")
    upper = max(_l1(g.G1), _l1(g.G2))
    # A*G1 + B*G2 = R * X^(2d-1) and R * Y^(2d-1); scaling both by the common
    # denominator D, gcd(G1(u,w), G2(u,w)) divides D*R while
    # max|G_i(u,w)| >= |D*R| * M^d / (D * (|A|_1 + |B|_1))
    pairs = [bezout_cofactors(g.G1, g.G2, k) for k in (2 * d - 1, 0)]
    R = pairs[0][2]
    D = reduce(math.lcm, (Fraction(c).denominator for A, B, _ in pairs for c in A.coeffs + B.coeffs), 1)
    lower = max(Fraction(1), *((_l1(A) + _l1(B)) * D for A, B, _ in pairs))
    return HeightConstant(max(upper, lower), upper, lower, R, d)


@dataclass(frozen=True)
class CanonicalHeightEstimate:
    """``estimate = h(g^n P) / d^n``; ``|hhat(P) - estimate| <= error_bound``."""

    estimate: float
    error_bound: float
    n_iter: int
    height_arg: int  # h(g^n P) = log(height_arg)
    degree: int
    constant: HeightConstant

    def as_dict(self) -> dict:
        return {
            "estimate": repr(self.estimate),
            "error_bound": repr(self.error_bound),
            "n_iter": self.n_iter,
            "height_arg_bits": self.height_arg.bit_length(),
            "C_arg": format_rational(self.constant.arg),
        }


def canonical_height(
    g: ProjRatMap, P: ProjPoint, n_iter: int, bitsize_cap: int = DEFAULT_BITSIZE_CAP
) -> CanonicalHeightEstimate:
    d = g.degree
    if d < 2:
        raise DomainError("canonical height needs degree >= 2")
    C = height_comparison_constant(g)
    x = P
    for _ in range(n_iter):
        x = g(x)
        if x.bitsize() > bitsize_cap:
            raise BudgetExceeded(f"orbit coordinate exceeded {bitsize_cap} bits", payload={"n_iter": n_iter})
    M = max(abs(x.u), abs(x.w))
    est = float(log_positive_rational(M, 60).value) / d**n_iter
    err = float(C.approx(60).value) / (d**n_iter * (d - 1))
    return CanonicalHeightEstimate(est, err, n_iter, M, d, C)


# ---------------------------------------------------------------- preperiodicity


@dataclass(frozen=True)
class Preperiodic:
    tail_length: int
    period: int

    def as_dict(self) -> dict:
        return {"verdict": "Preperiodic", "tail_length": self.tail_length, "period": self.period}


@dataclass(frozen=True)
class NonPreperiodic:
    """``h(orbit[witness_index]) = log(height_arg) > log(bound_arg)/(d-1)``,
    decided as ``height_arg**(d-1) > bound_arg``."""

    witness_index: int
    height_arg: int
    bound_arg: Fraction
    degree: int

    def holds(self) -> bool:
        return self.height_arg ** (self.degree - 1) > self.bound_arg

    def as_dict(self) -> dict:
        return {
            "verdict": "NonPreperiodic",
            "witness_index": self.witness_index,
            "height_arg": format_rational(self.height_arg),
            "C_arg": format_rational(self.bound_arg),
            "inequality": f"{format_rational(self.height_arg)}^{self.degree - 1} > {format_rational(self.bound_arg)}",
        }


@dataclass(frozen=True)
class Unknown:
    budget_spent: int
    reason: str = "budget"

    def as_dict(self) -> dict:
        return {"verdict": "Unknown", "budget_spent": self.budget_spent, "reason": self.reason}


def is_preperiodic(map_, point, budget: int, bitsize_cap: int = DEFAULT_BITSIZE_CAP):
    """Exact cycle detection plus the height-escape certificate (degree >= 2).

    Affine maps are homogenized first, so orbit indices are the same for both.
    """
    if isinstance(map_, AffinePolyMap):
        g = homogenize(map_)
        P = ProjPoint.from_rational(point)
    else:
        g = map_
        P = point
    d = g.degree
    bound = height_comparison_constant(g).arg if d >= 2 else None
    seen = {P: 0}
    x = P
    for n in range(budget + 1):
        if bound is not None:
            M = max(abs(x.u), abs(x.w))
            if M ** (d - 1) > bound:
                return NonPreperiodic(n, M, bound, d)
        if n == budget:
            break
        x = g(x)
        if x in seen:
            return Preperiodic(seen[x], n + 1 - seen[x])
        if x.bitsize() > bitsize_cap:
            return Unknown(n + 1, "bitsize cap")
        seen[x] = n + 1
    return Unknown(budget)
