"""Polynomial self-maps of the affine line over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BudgetExceeded, DomainError
from .orbit import DEFAULT_BITSIZE_CAP, OrbitSegment, run_orbit
from .polys import BinaryForm, pcompose, ptrim

DEFAULT_MAX_DEGREE = 4096


def rational_bitsize(r: Fraction) -> int:
    return max(r.numerator.bit_length(), r.denominator.bit_length())


@dataclass(frozen=True)
class AffinePolyMap:
    """``f(x) = sum coeffs[i] * x**i`` with ``coeffs[-1] != 0`` and degree >= 1."""

    coeffs: tuple

    def __post_init__(self):
        co = tuple(Fraction(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", co)
        if len(co) < 2 or co[-1] == 0:
            raise DomainError("affine map needs degree >= 1 with nonzero leading coefficient")

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "AffinePolyMap":
        return cls(ptrim(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    def __str__(self) -> str:
        from .polys import format_poly

        return format_poly(self.coeffs, "x")


def evaluate(f: AffinePolyMap, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(f.coeffs):
        acc = acc * x + c
    return acc


def orbit(f: AffinePolyMap, x0, nmax: int, bitsize_cap: int = DEFAULT_BITSIZE_CAP) -> OrbitSegment:
    return run_orbit(f, Fraction(x0), nmax, rational_bitsize, bitsize_cap)


def iterate_map(f: AffinePolyMap, m: int, max_degree: int = DEFAULT_MAX_DEGREE) -> AffinePolyMap:
    """The m-fold composition f∘...∘f."""
    if m < 1:
        raise DomainError("iterate_map needs m >= 1")
    if f.degree**m > max_degree:
        raise BudgetExceeded(f"f^{m} has degree {f.degree ** m} > {max_degree}")
    p = f.coeffs
    for _ in range(m - 1):
        p = pcompose(f.coeffs, p)
    return AffinePolyMap(p)


def homogenize(f: AffinePolyMap):
    """``[sum a_i X^i Y^(d-i) : Y^d]`` as an integer, content-free ProjRatMap."""
    from .projective import ProjRatMap

    d = f.degree
    return ProjRatMap.from_forms(BinaryForm(f.coeffs), BinaryForm.monomial(d, 0))
