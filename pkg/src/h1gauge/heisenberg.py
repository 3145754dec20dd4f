"""The first Heisenberg group: points, symplectic area, group law."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class H1Point:
    """Group element with horizontal part (x1, x2) and vertical part xbar."""

    x1: float
    x2: float
    xbar: float

    def __post_init__(self):
        # no NaN/infinity admitted into any operation
        for c in (self.x1, self.x2, self.xbar):
            if not math.isfinite(c):
                raise ValueError(f"non-finite component {c!r} in H1Point")

    @property
    def horizontal(self) -> tuple[float, float]:
        return (self.x1, self.x2)

    def horizontal_norm(self) -> float:
        return math.hypot(self.x1, self.x2)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x1, self.x2, self.xbar)


IDENTITY = H1Point(0.0, 0.0, 0.0)


def identity() -> H1Point:
    return IDENTITY


def point(x1: float, x2: float, xbar: float) -> H1Point:
    return H1Point(float(x1), float(x2), float(xbar))


def symplectic_area(a, b) -> float:
    """Signed area a1*b2 - a2*b1 of two planar vectors."""
    return a[0] * b[1] - a[1] * b[0]


def mul(p: H1Point, q: H1Point) -> H1Point:
    """Group product: horizontals add, verticals add plus twice the symplectic area."""
    return H1Point(
        p.x1 + q.x1,
        p.x2 + q.x2,
        p.xbar + q.xbar + 2.0 * symplectic_area(p.horizontal, q.horizontal),
    )


def inv(p: H1Point) -> H1Point:
    return H1Point(-p.x1, -p.x2, -p.xbar)


def point_diff(p: H1Point, q: H1Point) -> float:
    """Max componentwise absolute difference."""
    return max(abs(p.x1 - q.x1), abs(p.x2 - q.x2), abs(p.xbar - q.xbar))


def point_scale(*points: H1Point) -> float:
    """Normalization max(1, |components|) for scaled comparisons."""
    mags = [1.0]
    for p in points:
        mags.extend((abs(p.x1), abs(p.x2), abs(p.xbar)))
    return max(mags)


def point_close(p: H1Point, q: H1Point, tol: float) -> bool:
    return point_diff(p, q) <= tol * point_scale(p, q)
