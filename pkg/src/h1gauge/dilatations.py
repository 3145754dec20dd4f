"""Dilatation families on H(1), the rescaled product, and the flattening map.

Three one-parameter families act on the group: the intrinsic dilatation
(horizontal by eps, vertical by eps^2), the gauge dilatation (vertical moves
along the gauge profile), and the euclidean dilatation (every component by
eps).  The flattening map reparametrizes the vertical axis by g, conjugating
the gauge dilatation into the euclidean one and transporting the group law.
"""

from __future__ import annotations

import math

from .gauges import Gauge, g_eval, g_inverse_eval, require_verified
from .heisenberg import H1Point, inv, mul


def sgn(x: float) -> float:
    """Sign with sgn(0) = 0."""
    return float((x > 0.0) - (x < 0.0))


def _check_eps(eps: float) -> None:
    if not (math.isfinite(eps) and eps > 0.0):
        raise ValueError(f"dilatation scale must be positive and finite, got {eps!r}")


def dilate(eps: float, p: H1Point) -> H1Point:
    """Intrinsic dilatation: (eps * x, eps^2 * xbar).  A group automorphism."""
    _check_eps(eps)
    return H1Point(eps * p.x1, eps * p.x2, eps * eps * p.xbar)


def euclidean_dilate(eps: float, p: H1Point) -> H1Point:
    """Componentwise scaling (eps * x, eps * xbar)."""
    _check_eps(eps)
    return H1Point(eps * p.x1, eps * p.x2, eps * p.xbar)


def gauge_dilate(gauge: Gauge, eps: float, p: H1Point) -> H1Point:
    """Gauge dilatation: vertical part sgn(xbar) * G(eps * g(|xbar|))."""
    _check_eps(eps)
    require_verified(gauge)
    if p.xbar == 0.0:
        vert = 0.0
    else:
        vert = sgn(p.xbar) * g_inverse_eval(gauge, eps * g_eval(gauge, abs(p.xbar)))
    return H1Point(eps * p.x1, eps * p.x2, vert)


def gauge_dilate_at(gauge: Gauge, eps: float, base: H1Point, q: H1Point) -> H1Point:
    """Gauge dilatation centered at base, conjugated by left translation."""
    return mul(base, gauge_dilate(gauge, eps, mul(inv(base), q)))


def rescaled_product(gauge: Gauge, eps: float, p: H1Point, q: H1Point) -> H1Point:
    """Dilate both points by eps, multiply, undilate the product by 1/eps."""
    _check_eps(eps)
    return gauge_dilate(
        gauge, 1.0 / eps, mul(gauge_dilate(gauge, eps, p), gauge_dilate(gauge, eps, q))
    )


def flatten(gauge: Gauge, p: H1Point) -> H1Point:
    """Vertical reparametrization (x, xbar) -> (x, sgn(xbar) * g(|xbar|))."""
    require_verified(gauge)
    if p.xbar == 0.0:
        return H1Point(p.x1, p.x2, 0.0)
    return H1Point(p.x1, p.x2, sgn(p.xbar) * g_eval(gauge, abs(p.xbar)))


def unflatten(gauge: Gauge, p: H1Point) -> H1Point:
    """Inverse reparametrization (x, t) -> (x, sgn(t) * (t^2 + k(|t|)))."""
    require_verified(gauge)
    if p.xbar == 0.0:
        return H1Point(p.x1, p.x2, 0.0)
    return H1Point(p.x1, p.x2, sgn(p.xbar) * g_inverse_eval(gauge, abs(p.xbar)))


def transported_mul(gauge: Gauge, p: H1Point, q: H1Point) -> H1Point:
    """Group product transported through the flattening map."""
    return flatten(gauge, mul(unflatten(gauge, p), unflatten(gauge, q)))


def transported_inv(p: H1Point) -> H1Point:
    """Inverse for the transported product; closed form (-x, -xbar)."""
    return inv(p)


def conjugation_residual(gauge: Gauge, eps: float, p: H1Point) -> float:
    """Max componentwise gap between the gauge dilatation and its conjugated
    form unflatten(euclidean_dilate(flatten(p)))."""
    direct = gauge_dilate(gauge, eps, p)
    conjugated = unflatten(gauge, euclidean_dilate(eps, flatten(gauge, p)))
    return max(
        abs(direct.x1 - conjugated.x1),
        abs(direct.x2 - conjugated.x2),
        abs(direct.xbar - conjugated.xbar),
    )
