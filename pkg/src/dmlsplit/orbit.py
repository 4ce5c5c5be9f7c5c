"""Exact orbit enumeration with cycle detection, shared by affine and projective maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Generic, Hashable, TypeVar

T = TypeVar("T", bound=Hashable)

DEFAULT_BITSIZE_CAP = 2**22


@dataclass(frozen=True)
class OrbitSegment(Generic[T]):
    """``values[k]`` is the k-th iterate of ``start``.

    ``cycle = (tail, period)`` when an exact repeat was found, in which case
    ``values[tail] == values[tail + period]`` is the last stored value.
    ``truncated`` is set when the bit-size cap stopped the enumeration.
    """

    start: T
    values: tuple
    cycle: tuple[int, int] | None = None
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int):
        return self.values[n]

    def value_at(self, n: int):
        """Iterate n, read off the cycle when n lies past the stored values."""
        if n < len(self.values):
            return self.values[n]
        if self.cycle is None:
            raise IndexError(n)
        tail, period = self.cycle
        return self.values[tail + (n - tail) % period]


def run_orbit(
    step: Callable[[T], T],
    start: T,
    nmax: int,
    bitsize: Callable[[T], int],
    bitsize_cap: int = DEFAULT_BITSIZE_CAP,
) -> OrbitSegment[T]:
    seen: dict = {start: 0}
    values = [start]
    x = start
    if bitsize(start) > bitsize_cap:
        return OrbitSegment(start, (), None, True)
    for n in range(1, nmax + 1):
        x = step(x)
        if bitsize(x) > bitsize_cap:
            return OrbitSegment(start, tuple(values), None, True)
        values.append(x)
        if x in seen:
            tail = seen[x]
            return OrbitSegment(start, tuple(values), (tail, n - tail), False)
        seen[x] = n
    return OrbitSegment(start, tuple(values), None, False)
