"""Distances on H(1) and the randomized property samplers.

Three left-invariant distances: the intrinsic max-distance
max(|x|, sqrt(|xbar|)), the gauge-deformed distance max(|x|, g(|xbar|)), and
the flat distance max(|x|, |xbar|) taken in the transported group.  The
samplers draw seeded points from a box and report worst-case violations of
the triangle inequality, 1-Lipschitzness of the identity, left invariance,
the flattening isometry, and the dilatation identities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dilatations import (
    dilate,
    euclidean_dilate,
    flatten,
    gauge_dilate,
    rescaled_product,
    transported_inv,
    transported_mul,
    conjugation_residual,
)
from .gauges import Gauge, g_eval, require_verified
from .heisenberg import H1Point, identity, inv, mul, point_diff, point_scale
from .report import TOL_ALGEBRA, TOL_GAUGE, PropertyCheck, violation_scale


def intrinsic_norm(p: H1Point) -> float:
    """max of the horizontal norm and the square root of the vertical part."""
    return max(p.horizontal_norm(), math.sqrt(abs(p.xbar)))


def intrinsic_dist(p: H1Point, q: H1Point) -> float:
    return intrinsic_norm(mul(inv(p), q))


def gauge_norm(gauge: Gauge, p: H1Point) -> float:
    """max of the horizontal norm and g of the vertical part."""
    require_verified(gauge)
    return max(p.horizontal_norm(), g_eval(gauge, abs(p.xbar)))


def gauge_dist(gauge: Gauge, p: H1Point, q: H1Point) -> float:
    return gauge_norm(gauge, mul(inv(p), q))


def flat_norm(p: H1Point) -> float:
    """max of the horizontal norm and the plain vertical magnitude."""
    return max(p.horizontal_norm(), abs(p.xbar))


def flat_dist(gauge: Gauge, p: H1Point, q: H1Point) -> float:
    """Distance in the transported group; isometric image of gauge_dist."""
    return flat_norm(transported_mul(gauge, transported_inv(p), q))


@dataclass(frozen=True)
class SampleBox:
    """Sampling domain: horizontal components uniform in [-horizontal,
    horizontal], vertical uniform in [-vertical, vertical]."""

    horizontal: float = 2.0
    vertical: float = 4.0

    def __post_init__(self):
        if not (self.horizontal > 0 and self.vertical > 0):
            raise ValueError("box half-widths must be positive")

    def draw(self, rng: np.random.Generator) -> H1Point:
        return H1Point(
            float(rng.uniform(-self.horizontal, self.horizontal)),
            float(rng.uniform(-self.horizontal, self.horizontal)),
            float(rng.uniform(-self.vertical, self.vertical)),
        )


@dataclass
class MetricSampleReport:
    """Worst observed violation over a sampled property, with its witness.

    Violations are scaled by max(1, magnitudes) of the compared quantities, so
    tolerance is a flat number.  The witness holds the sample (as tuples) that
    produced worst_violation; re-evaluating the property there reproduces the
    number exactly.  Reports merge by max violation (samples add), so a
    sharded run aggregates to the same verdict.
    """

    name: str
    samples: int
    worst_violation: float
    tolerance: float
    witness: tuple | None = None
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.worst_violation <= self.tolerance

    def as_check(self) -> PropertyCheck:
        return PropertyCheck(
            name=self.name,
            passed=self.passed,
            worst_violation=self.worst_violation,
            tolerance=self.tolerance,
            witness=self.witness,
            details=self.details or f"{self.samples} samples",
        )

    @staticmethod
    def merge(a: "MetricSampleReport", b: "MetricSampleReport") -> "MetricSampleReport":
        if a.name != b.name or a.tolerance != b.tolerance:
            raise ValueError("can only merge reports of the same property")
        keep = a if a.worst_violation >= b.worst_violation else b
        return MetricSampleReport(
            name=a.name,
            samples=a.samples + b.samples,
            worst_violation=keep.worst_violation,
            tolerance=a.tolerance,
            witness=keep.witness,
            details=keep.details,
        )


def _scan(name, n, tolerance, gen, details=""):
    """Track the max scaled violation over n generated (violation, witness) pairs."""
    worst = -math.inf
    witness = None
    for _ in range(n):
        v, w = gen()
        if v > worst:
            worst, witness = v, w
    return MetricSampleReport(name, n, worst, tolerance, witness, details)


def sample_triangle(dist, name: str, n: int, seed: int, box: SampleBox = SampleBox()):
    """Triangle inequality dist(p,r) <= dist(p,q) + dist(q,r) on random triples."""
    rng = np.random.default_rng(seed)

    def gen():
        p, q, r = box.draw(rng), box.draw(rng), box.draw(rng)
        via = dist(p, q) + dist(q, r)
        direct = dist(p, r)
        v = (direct - via) / violation_scale(direct, via)
        return v, (p.as_tuple(), q.as_tuple(), r.as_tuple())

    return _scan(name, n, TOL_ALGEBRA, gen)


def sample_lipschitz_id(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """The identity map is 1-Lipschitz from the intrinsic to the gauge distance."""
    rng = np.random.default_rng(seed)

    def gen():
        p, q = box.draw(rng), box.draw(rng)
        gd, dd = gauge_dist(gauge, p, q), intrinsic_dist(p, q)
        return (gd - dd) / violation_scale(gd, dd), (p.as_tuple(), q.as_tuple())

    return _scan("lipschitz-id", n, TOL_ALGEBRA, gen)


def sample_left_invariance(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    rng = np.random.default_rng(seed)

    def gen():
        z, p, q = box.draw(rng), box.draw(rng), box.draw(rng)
        a = gauge_dist(gauge, mul(z, p), mul(z, q))
        b = gauge_dist(gauge, p, q)
        return abs(a - b) / violation_scale(a, b), (z.as_tuple(), p.as_tuple(), q.as_tuple())

    return _scan("left-invariance", n, TOL_ALGEBRA, gen)


def sample_isometry(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """flat_dist(flatten(p), flatten(q)) equals gauge_dist(p, q)."""
    rng = np.random.default_rng(seed)

    def gen():
        p, q = box.draw(rng), box.draw(rng)
        a = flat_dist(gauge, flatten(gauge, p), flatten(gauge, q))
        b = gauge_dist(gauge, p, q)
        return abs(a - b) / violation_scale(a, b), (p.as_tuple(), q.as_tuple())

    return _scan("flatten-isometry", n, TOL_GAUGE, gen)


def sample_group_axioms(n: int, seed: int, box: SampleBox = SampleBox()):
    """Associativity, identity, inverse on random triples; three reports."""
    rng = np.random.default_rng(seed)
    e = identity()

    def gen_assoc():
        p, q, r = box.draw(rng), box.draw(rng), box.draw(rng)
        a, b = mul(mul(p, q), r), mul(p, mul(q, r))
        return point_diff(a, b) / point_scale(a, b), (
            p.as_tuple(),
            q.as_tuple(),
            r.as_tuple(),
        )

    def gen_identity():
        p = box.draw(rng)
        v = max(point_diff(mul(p, e), p), point_diff(mul(e, p), p))
        return v / point_scale(p), (p.as_tuple(),)

    def gen_inverse():
        p = box.draw(rng)
        v = max(point_diff(mul(p, inv(p)), e), point_diff(mul(inv(p), p), e))
        return v / point_scale(p), (p.as_tuple(),)

    return [
        _scan("group-associativity", n, TOL_ALGEBRA, gen_assoc),
        _scan("group-identity", n, TOL_ALGEBRA, gen_identity),
        _scan("group-inverse", n, TOL_ALGEBRA, gen_inverse),
    ]


def dyadic_scales(low: int = -10, high: int = 10) -> tuple[float, ...]:
    return tuple(2.0**j for j in range(low, high + 1))


def sample_semigroup(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """gauge_dilate(eps) o gauge_dilate(mu) = gauge_dilate(eps * mu) over the
    dyadic scale grid 2^-10 .. 2^10, cycling scale pairs across n samples."""
    rng = np.random.default_rng(seed)
    scales = dyadic_scales()
    pairs = [(a, b) for a in scales for b in scales]

    state = {"i": 0}

    def gen():
        eps, mu = pairs[state["i"] % len(pairs)]
        state["i"] += 1
        p = box.draw(rng)
        a = gauge_dilate(gauge, eps, gauge_dilate(gauge, mu, p))
        b = gauge_dilate(gauge, eps * mu, p)
        return point_diff(a, b) / point_scale(a, b), (eps, mu, p.as_tuple())

    return _scan("dilatation-semigroup", max(n, len(pairs)), TOL_GAUGE, gen)


def sample_homogeneity(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """gauge_norm(gauge_dilate(eps, p)) = eps * gauge_norm(p), eps in [1e-6, 1e3]."""
    rng = np.random.default_rng(seed)

    def gen():
        eps = float(10.0 ** rng.uniform(-6.0, 3.0))
        p = box.draw(rng)
        a = gauge_norm(gauge, gauge_dilate(gauge, eps, p))
        b = eps * gauge_norm(gauge, p)
        return abs(a - b) / violation_scale(a, b), (eps, p.as_tuple())

    return _scan("dilatation-homogeneity", n, TOL_GAUGE, gen)


def sample_rescale_identity(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """(1/eps) * gauge_dist(gauge_dilate(eps,p), gauge_dilate(eps,q)) equals
    gauge_norm(rescaled_product(eps, inv(p), q)); eps cycles over 2^0..2^-20."""
    rng = np.random.default_rng(seed)
    scales = tuple(2.0**j for j in range(0, -21, -4))
    state = {"i": 0}

    def gen():
        eps = scales[state["i"] % len(scales)]
        state["i"] += 1
        p, q = box.draw(rng), box.draw(rng)
        a = gauge_dist(gauge, gauge_dilate(gauge, eps, p), gauge_dilate(gauge, eps, q)) / eps
        b = gauge_norm(gauge, rescaled_product(gauge, eps, inv(p), q))
        return abs(a - b) / violation_scale(a, b), (eps, p.as_tuple(), q.as_tuple())

    return _scan("rescaled-distance-identity", n, TOL_GAUGE, gen)


def sample_conjugation(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """Residual of gauge_dilate = unflatten o euclidean_dilate o flatten."""
    rng = np.random.default_rng(seed)

    def gen():
        eps = float(10.0 ** rng.uniform(-6.0, 3.0))
        p = box.draw(rng)
        direct = gauge_dilate(gauge, eps, p)
        v = conjugation_residual(gauge, eps, p) / point_scale(direct, p)
        return v, (eps, p.as_tuple())

    return _scan("conjugation", n, TOL_GAUGE, gen)


def sample_flatten_homomorphism(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """flatten(p * q) equals the transported product of the flattened points."""
    rng = np.random.default_rng(seed)

    def gen():
        p, q = box.draw(rng), box.draw(rng)
        a = flatten(gauge, mul(p, q))
        b = transported_mul(gauge, flatten(gauge, p), flatten(gauge, q))
        return point_diff(a, b) / point_scale(a, b), (p.as_tuple(), q.as_tuple())

    return _scan("flatten-homomorphism", n, TOL_GAUGE, gen)


def sample_transported_axioms(gauge: Gauge, n: int, seed: int, box: SampleBox = SampleBox()):
    """Associativity / identity / inverse for the transported product, plus
    homogeneity of the transported norm under the euclidean dilatation.

    The euclidean dilatation is deliberately NOT checked as an automorphism
    of the transported product: it is not one.  Conjugating that claim back
    through the flattening map would make the gauge dilatation an
    automorphism of the group itself, which already fails for the linear
    gauge on horizontal points (and would force the rescaled product to
    collapse to the plain product, emptying the whole limit question).  What
    does hold exactly is norm homogeneity, checked here.
    """
    rng = np.random.default_rng(seed)
    e = identity()

    def gen_assoc():
        p, q, r = box.draw(rng), box.draw(rng), box.draw(rng)
        a = transported_mul(gauge, transported_mul(gauge, p, q), r)
        b = transported_mul(gauge, p, transported_mul(gauge, q, r))
        return point_diff(a, b) / point_scale(a, b), (
            p.as_tuple(),
            q.as_tuple(),
            r.as_tuple(),
        )

    def gen_unit_inv():
        p = box.draw(rng)
        v = max(
            point_diff(transported_mul(gauge, p, e), p),
            point_diff(transported_mul(gauge, e, p), p),
            point_diff(transported_mul(gauge, p, transported_inv(p)), e),
        )
        return v / point_scale(p), (p.as_tuple(),)

    def gen_norm_homogeneity():
        eps = float(10.0 ** rng.uniform(-3.0, 3.0))
        p = box.draw(rng)
        a = flat_norm(euclidean_dilate(eps, p))
        b = eps * flat_norm(p)
        return abs(a - b) / violation_scale(a, b), (eps, p.as_tuple())

    return [
        _scan("transported-associativity", n, TOL_GAUGE, gen_assoc),
        _scan("transported-unit-inverse", n, TOL_GAUGE, gen_unit_inv),
        _scan("transported-norm-homogeneity", n, TOL_ALGEBRA, gen_norm_homogeneity),
    ]


def sample_intrinsic_dilation(n: int, seed: int, box: SampleBox = SampleBox()):
    """The intrinsic dilatation is a group automorphism scaling intrinsic_dist."""
    rng = np.random.default_rng(seed)

    def gen():
        eps = float(10.0 ** rng.uniform(-3.0, 3.0))
        p, q = box.draw(rng), box.draw(rng)
        a = intrinsic_dist(dilate(eps, p), dilate(eps, q))
        b = eps * intrinsic_dist(p, q)
        return abs(a - b) / violation_scale(a, b), (eps, p.as_tuple(), q.as_tuple())

    return _scan("intrinsic-dilation-scaling", n, TOL_ALGEBRA, gen)
