"""Geometric eps-grids, tail classification of traces, and the limit probes.

Every probe walks a geometric grid eps_j = eps0 * ratio^j and records a trace;
classification looks only at the tail (the last two windows of length
`window`).  A trace is *diverging* when some tail value escapes the bound,
*converged* when the last window is flat within atol and the shift between
the two window means is explained by the previous window's own spread (this
admits traces still descending linearly toward their limit while rejecting
level shifts), and *oscillating* otherwise — oscillation observed in one
window alone never suffices, it must leave its mark on both.  liminf/limsup
estimates are the tail min/max; the reported limit is the last window's mean.

The probes themselves: the scalar vertical response g(eps^2 |ubar|)/eps, the
rescaled product of two points, derivability of the identity map between the
intrinsic and gauge dilatation structures, and the metric-differentiability
test of the identity map at a base point.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from statistics import fmean

from .dilatations import dilate, gauge_dilate, rescaled_product, sgn
from .gauges import Gauge, g_eval, g_inverse_eval, require_verified
from .heisenberg import H1Point, identity, mul, point_diff, point_scale, symplectic_area
from .metrics import gauge_dist
from .report import PropertyCheck, VerificationReport, violation_scale

DEFAULT_EPS0 = 1.0
DEFAULT_RATIO = 0.5
DEFAULT_COUNT = 24
DEFAULT_WINDOW = 6
DEFAULT_ATOL = 1e-4
DEFAULT_DIVERGENCE_BOUND = 1e6
CLOSED_FORM_TOL = 1e-9

# Squared scales fed to g must stay clear of the subnormal range.
UNDERFLOW_FLOOR = 1e3 * sys.float_info.min


class NonConvergentLimitError(ArithmeticError):
    """A limit value was requested from a trace that does not converge."""


@dataclass(frozen=True)
class EpsGrid:
    """Geometric scale grid eps_j = eps0 * ratio^j, j = 0..count-1."""

    eps0: float = DEFAULT_EPS0
    ratio: float = DEFAULT_RATIO
    count: int = DEFAULT_COUNT

    def __post_init__(self):
        if not (math.isfinite(self.eps0) and self.eps0 > 0.0):
            raise ValueError(f"eps0 must be positive and finite, got {self.eps0!r}")
        if not (0.0 < self.ratio < 1.0):
            raise ValueError(f"ratio must lie in (0, 1), got {self.ratio!r}")
        if not isinstance(self.count, int) or self.count < 2:
            raise ValueError(f"count must be an integer >= 2, got {self.count!r}")
        smallest = self.eps0 * self.ratio ** (self.count - 1)
        if smallest * smallest < UNDERFLOW_FLOOR:
            raise ValueError(
                f"grid underflow: eps[{self.count - 1}] = {smallest!r} has square "
                f"below the floor {UNDERFLOW_FLOOR!r}"
            )

    def values(self) -> tuple[float, ...]:
        return tuple(self.eps0 * self.ratio**j for j in range(self.count))


@dataclass(frozen=True)
class Classification:
    kind: str  # "converged" | "oscillating" | "diverging"
    limit: float | None = None
    liminf: float | None = None
    limsup: float | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "limit": self.limit,
            "liminf": self.liminf,
            "limsup": self.limsup,
        }


@dataclass(frozen=True)
class PointClassification:
    """Componentwise classification of a point-valued trace.

    diverging if any component diverges, converged only if all three are,
    oscillating otherwise.
    """

    kind: str
    components: tuple[Classification, Classification, Classification]
    limit: H1Point | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "limit": None if self.limit is None else list(self.limit.as_tuple()),
            "components": [c.to_dict() for c in self.components],
        }


def classify_limit(
    values,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> Classification:
    """Classify the tail (last 2*window values) of a scalar trace.

    Scale-equivariant: multiplying values, atol and divergence_bound by c > 0
    classifies identically with limit estimates scaled by c.
    """
    vals = [float(v) for v in values]
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window!r}")
    if len(vals) < 2 * window:
        raise ValueError(
            f"need at least {2 * window} trace values to classify, got {len(vals)}"
        )
    if not (atol > 0.0 and divergence_bound > 0.0):
        raise ValueError("atol and divergence_bound must be positive")
    tail = vals[-2 * window :]
    if any(abs(v) > divergence_bound for v in tail):
        return Classification("diverging")
    prev, last = tail[:window], tail[window:]
    spread_last = max(last) - min(last)
    spread_prev = max(prev) - min(prev)
    if spread_last <= atol and abs(fmean(last) - fmean(prev)) <= max(atol, spread_prev):
        return Classification("converged", limit=fmean(last))
    return Classification("oscillating", liminf=min(tail), limsup=max(tail))


def classify_point_trace(
    points,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> PointClassification:
    comps = tuple(
        classify_limit([getattr(p, name) for p in points], window, atol, divergence_bound)
        for name in ("x1", "x2", "xbar")
    )
    kinds = {c.kind for c in comps}
    if "diverging" in kinds:
        kind = "diverging"
    elif kinds == {"converged"}:
        kind = "converged"
    else:
        kind = "oscillating"
    limit = H1Point(*(c.limit for c in comps)) if kind == "converged" else None
    return PointClassification(kind, comps, limit)


@dataclass(frozen=True)
class ConvergenceTrace:
    """A probe trace over an eps-grid together with its tail classification."""

    name: str
    grid: EpsGrid
    values: tuple  # floats, or H1Points for point-valued probes
    classification: Classification | PointClassification
    window: int
    atol: float
    divergence_bound: float
    meta: dict = field(default_factory=dict)

    @property
    def point_valued(self) -> bool:
        return bool(self.values) and isinstance(self.values[0], H1Point)

    def header(self) -> str:
        return "epsilon,x1,x2,xbar" if self.point_valued else "epsilon,value"

    def rows(self):
        for eps, v in zip(self.grid.values(), self.values):
            if isinstance(v, H1Point):
                yield (eps, v.x1, v.x2, v.xbar)
            else:
                yield (eps, v)

    def to_csv(self) -> str:
        lines = [self.header()]
        for row in self.rows():
            lines.append(",".join(repr(c) for c in row))
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "gauge": self.meta.get("gauge"),
            "probe": self.name,
            "classification": self.classification.to_dict(),
            "parameters": {
                "eps0": self.grid.eps0,
                "ratio": self.grid.ratio,
                "count": self.grid.count,
                "window": self.window,
                "atol": self.atol,
                "divergence_bound": self.divergence_bound,
                **{k: v for k, v in self.meta.items() if k != "gauge"},
            },
        }


def _resolve_grid(grid: EpsGrid | None) -> EpsGrid:
    return grid if grid is not None else EpsGrid()


def _underflow_check(grid: EpsGrid, magnitude: float) -> None:
    if magnitude == 0.0:
        return
    eps_min = grid.eps0 * grid.ratio ** (grid.count - 1)
    if eps_min * eps_min * magnitude < UNDERFLOW_FLOOR:
        raise ValueError(
            f"eps = {eps_min!r} drives eps^2 * {magnitude!r} below the underflow "
            f"floor {UNDERFLOW_FLOOR!r}; shorten the grid or rescale"
        )


def vertical_response(gauge: Gauge, eps: float, ubar: float) -> float:
    """Rescaled profile response g(eps^2 * |ubar|) / eps."""
    return g_eval(gauge, eps * eps * abs(ubar)) / eps


def vertical_limit_probe(
    gauge: Gauge,
    ubar: float,
    grid: EpsGrid | None = None,
    *,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> ConvergenceTrace:
    """Trace eps -> g(eps^2 |ubar|)/eps, the scalar limit behind both the
    derivability of the identity map and the metric differential."""
    require_verified(gauge)
    if not math.isfinite(ubar):
        raise ValueError(f"ubar must be finite, got {ubar!r}")
    grid = _resolve_grid(grid)
    _underflow_check(grid, abs(ubar))
    values = tuple(vertical_response(gauge, e, ubar) for e in grid.values())
    cls = classify_limit(values, window, atol, divergence_bound)
    return ConvergenceTrace(
        "vertical-limit",
        grid,
        values,
        cls,
        window,
        atol,
        divergence_bound,
        meta={"gauge": gauge.label, "ubar": ubar},
    )


def rescaled_product_probe(
    gauge: Gauge,
    p: H1Point,
    q: H1Point,
    grid: EpsGrid | None = None,
    *,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> ConvergenceTrace:
    """Trace eps -> rescaled_product(eps, p, q), classified componentwise."""
    require_verified(gauge)
    grid = _resolve_grid(grid)
    area = symplectic_area(p.horizontal, q.horizontal)
    _underflow_check(grid, max(abs(p.xbar), abs(q.xbar), 2.0 * abs(area)))
    values = tuple(rescaled_product(gauge, e, p, q) for e in grid.values())
    cls = classify_point_trace(values, window, atol, divergence_bound)
    return ConvergenceTrace(
        "rescaled-product",
        grid,
        values,
        cls,
        window,
        atol,
        divergence_bound,
        meta={"gauge": gauge.label, "p": p.as_tuple(), "q": q.as_tuple()},
    )


def id_derivability_probe(
    gauge: Gauge,
    u: H1Point,
    grid: EpsGrid | None = None,
    *,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> ConvergenceTrace:
    """Trace eps -> gauge_dilate(1/eps, dilate(eps, u)).

    Whether this converges is exactly derivability of the identity map from
    the intrinsic to the gauge dilatation structure.  Every trace point is
    cross-checked against the closed form (u_h, sgn(ubar) * G(g(eps^2
    |ubar|)/eps)) — agreement is an algebraic identity through one profile
    round-trip, enforced at CLOSED_FORM_TOL; the max residual is recorded in
    meta["closed_form_residual"].
    """
    require_verified(gauge)
    grid = _resolve_grid(grid)
    _underflow_check(grid, abs(u.xbar))
    values = []
    worst_residual = 0.0
    for e in grid.values():
        val = gauge_dilate(gauge, 1.0 / e, dilate(e, u))
        if u.xbar == 0.0:
            ref_vert = 0.0
        else:
            ref_vert = sgn(u.xbar) * g_inverse_eval(
                gauge, vertical_response(gauge, e, u.xbar)
            )
        ref = H1Point(u.x1, u.x2, ref_vert)
        residual = point_diff(val, ref) / point_scale(val, ref)
        if residual > worst_residual:
            worst_residual = residual
        if residual > CLOSED_FORM_TOL:
            raise ArithmeticError(
                f"derivability trace at eps={e!r} deviates from its closed form "
                f"by {residual!r} (> {CLOSED_FORM_TOL!r})"
            )
        values.append(val)
    values = tuple(values)
    cls = classify_point_trace(values, window, atol, divergence_bound)
    return ConvergenceTrace(
        "id-derivability",
        grid,
        values,
        cls,
        window,
        atol,
        divergence_bound,
        meta={"gauge": gauge.label, "u": u.as_tuple(), "closed_form_residual": worst_residual},
    )


def metric_differential(
    gauge: Gauge,
    v: H1Point,
    grid: EpsGrid | None = None,
    *,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> float:
    """max(horizontal norm, vertical limit) — defined only when the vertical
    limit exists; raises NonConvergentLimitError otherwise."""
    trace = vertical_limit_probe(
        gauge, v.xbar, grid, window=window, atol=atol, divergence_bound=divergence_bound
    )
    c = trace.classification
    if c.kind != "converged":
        raise NonConvergentLimitError(
            f"vertical limit at ubar={v.xbar!r} is {c.kind}; the metric "
            f"differential does not exist for gauge {gauge.label!r}"
        )
    return max(v.horizontal_norm(), c.limit)


def uniform_probe(
    probe,
    points,
    grid: EpsGrid | None = None,
    *,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> VerificationReport:
    """Uniform convergence of a pointwise probe over a finite sample of a
    compact set.

    probe(point, grid) must return a scalar-valued ConvergenceTrace.  Two
    checks: every pointwise trace converges, and the sup over points of the
    deviation |trace - tail mean| converges (to ~0) as well.
    """
    grid = _resolve_grid(grid)
    points = list(points)
    if not points:
        raise ValueError("need at least one probe point")
    traces = [probe(pt, grid) for pt in points]
    report = VerificationReport("uniform-probe")

    worst_osc = -math.inf
    worst_point = None
    all_converged = True
    for pt, tr in zip(points, traces):
        tail = [float(v) for v in tr.values[-2 * window :]]
        osc = max(tail) - min(tail)
        if osc > worst_osc:
            worst_osc, worst_point = osc, pt
        if tr.classification.kind != "converged":
            all_converged = False
    witness = worst_point.as_tuple() if isinstance(worst_point, H1Point) else worst_point
    report.add(
        PropertyCheck(
            name="pointwise-convergence",
            passed=all_converged,
            worst_violation=worst_osc,
            tolerance=atol,
            witness=witness,
            details=f"{len(points)} probe points; violation is the worst tail spread",
        )
    )

    tail_means = [fmean([float(v) for v in tr.values[-window:]]) for tr in traces]
    sup_trace = [
        max(abs(float(tr.values[j]) - m) for tr, m in zip(traces, tail_means))
        for j in range(grid.count)
    ]
    sup_cls = classify_limit(sup_trace, window, atol, divergence_bound)
    sup_ok = sup_cls.kind == "converged" and abs(sup_cls.limit) <= atol
    report.add(
        PropertyCheck(
            name="uniform-sup-convergence",
            passed=sup_ok,
            worst_violation=(abs(sup_cls.limit) if sup_cls.kind == "converged" else math.inf),
            tolerance=atol,
            witness=witness,
            details=f"sup-deviation trace classified {sup_cls.kind}",
        )
    )
    return report


def default_direction_grid() -> tuple[H1Point, ...]:
    """Compact direction set for the differentiability test: horizontal,
    vertical, and mixed points."""
    data = [
        (1.0, 0.0, 0.0),
        (0.0, 1.0, 0.0),
        (-1.0, 0.0, 0.0),
        (0.5, -0.5, 0.0),
        (0.0, 0.0, 1.0),
        (0.0, 0.0, -1.0),
        (0.0, 0.0, 2.0),
        (0.0, 0.0, -0.5),
        (1.0, 0.0, 1.0),
        (0.0, 1.0, -1.0),
        (0.25, 0.25, 2.0),
        (-0.5, 0.5, 1.0),
        (2.0, 0.0, 0.5),
    ]
    return tuple(H1Point(*row) for row in data)


@dataclass
class MetricDiffReport:
    """Outcome of the metric-differentiability test of the identity map."""

    base: H1Point
    directions: tuple[H1Point, ...]
    differentiable: bool
    eta: tuple[float, ...] | None  # seminorm estimates, aligned with directions
    witness: H1Point | None  # a non-converging direction when not differentiable
    sup_classification: Classification
    per_direction: tuple[Classification, ...]
    seminorm_checks: list[PropertyCheck]
    traces: tuple[ConvergenceTrace, ...]

    def to_dict(self) -> dict:
        return {
            "base": list(self.base.as_tuple()),
            "differentiable": self.differentiable,
            "directions": [list(v.as_tuple()) for v in self.directions],
            "eta": None if self.eta is None else list(self.eta),
            "witness": None if self.witness is None else list(self.witness.as_tuple()),
            "sup_classification": self.sup_classification.to_dict(),
            "per_direction": [c.to_dict() for c in self.per_direction],
            "seminorm_checks": [c.to_dict() for c in self.seminorm_checks],
        }


def _direction_trace(gauge, base, v, grid, window, atol, divergence_bound, name):
    values = tuple(
        gauge_dist(gauge, base, mul(base, dilate(e, v))) / e for e in grid.values()
    )
    cls = classify_limit(values, window, atol, divergence_bound)
    return ConvergenceTrace(
        name,
        grid,
        values,
        cls,
        window,
        atol,
        divergence_bound,
        meta={"gauge": gauge.label, "base": base.as_tuple(), "direction": v.as_tuple()},
    )


def _tail_mean(trace: ConvergenceTrace) -> float:
    return fmean([float(v) for v in trace.values[-trace.window :]])


def metric_diff_probe(
    gauge: Gauge,
    base: H1Point = identity(),
    directions=None,
    grid: EpsGrid | None = None,
    *,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> MetricDiffReport:
    """Differentiability test: for each direction v trace the rescaled gauge
    distance (1/eps) * gauge_dist(base, base * dilate(eps, v)).

    Differentiable iff every direction's trace converges and the sup over
    directions of deviations from the per-direction tail means converges.
    The trace is independent of base by left invariance; base is accepted and
    reported, never asserted against.  On success eta(v) is the tail mean and
    the seminorm laws are verified on the direction set: scaling equivariance
    eta(dilate(lam, v)) = lam * eta(v) and subadditivity
    eta(v * w) <= eta(v) + eta(w), both within atol (scaled).
    """
    require_verified(gauge)
    grid = _resolve_grid(grid)
    dirs = tuple(directions) if directions is not None else default_direction_grid()
    if not dirs:
        raise ValueError("need at least one direction")
    _underflow_check(grid, max(abs(v.xbar) for v in dirs))

    traces = tuple(
        _direction_trace(gauge, base, v, grid, window, atol, divergence_bound, "metric-diff")
        for v in dirs
    )
    per_dir = tuple(tr.classification for tr in traces)

    tail_means = [_tail_mean(tr) for tr in traces]
    sup_trace = [
        max(abs(float(tr.values[j]) - m) for tr, m in zip(traces, tail_means))
        for j in range(grid.count)
    ]
    sup_cls = classify_limit(sup_trace, window, atol, divergence_bound)
    differentiable = (
        all(c.kind == "converged" for c in per_dir)
        and sup_cls.kind == "converged"
        and abs(sup_cls.limit) <= atol
    )

    if differentiable:
        eta = tuple(tail_means)
        witness = None
    else:
        eta = None
        worst = max(
            range(len(dirs)),
            key=lambda i: (
                max(float(v) for v in traces[i].values[-2 * window :])
                - min(float(v) for v in traces[i].values[-2 * window :])
            ),
        )
        witness = dirs[worst]

    seminorm_checks: list[PropertyCheck] = []
    if differentiable:

        def eta_at(v: H1Point) -> float:
            return _tail_mean(
                _direction_trace(
                    gauge, base, v, grid, window, atol, divergence_bound, "metric-diff"
                )
            )

        worst_scale = -math.inf
        scale_witness = None
        for v, ev in zip(dirs, eta):
            for lam in (0.5, 0.25, 2.0):
                got = eta_at(dilate(lam, v))
                want = lam * ev
                viol = abs(got - want) / violation_scale(got, want)
                if viol > worst_scale:
                    worst_scale, scale_witness = viol, (lam, list(v.as_tuple()))
        seminorm_checks.append(
            PropertyCheck(
                name="seminorm-scaling",
                passed=worst_scale <= atol,
                worst_violation=worst_scale,
                tolerance=atol,
                witness=scale_witness,
            )
        )

        worst_sub = -math.inf
        sub_witness = None
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                got = eta_at(mul(dirs[i], dirs[j]))
                bound = eta[i] + eta[j]
                viol = (got - bound) / violation_scale(got, bound)
                if viol > worst_sub:
                    worst_sub = viol
                    sub_witness = (list(dirs[i].as_tuple()), list(dirs[j].as_tuple()))
        seminorm_checks.append(
            PropertyCheck(
                name="seminorm-subadditivity",
                passed=worst_sub <= atol,
                worst_violation=worst_sub,
                tolerance=atol,
                witness=sub_witness,
            )
        )

    return MetricDiffReport(
        base=base,
        directions=dirs,
        differentiable=differentiable,
        eta=eta,
        witness=witness,
        sup_classification=sup_cls,
        per_direction=per_dir,
        seminorm_checks=seminorm_checks,
        traces=traces,
    )


def limit_equivalence_check(
    gauge: Gauge,
    samples,
    grid: EpsGrid | None = None,
    *,
    window: int = DEFAULT_WINDOW,
    atol: float = DEFAULT_ATOL,
    divergence_bound: float = DEFAULT_DIVERGENCE_BOUND,
) -> VerificationReport:
    """Agreement between rescaled-product convergence and the scalar vertical
    limit on purely horizontal pairs.

    For p = (x, 0), q = (y, 0) the rescaled product's vertical trace is the
    profile transport of the scalar response at ubar = area/2 (any positive
    multiple classifies identically, since the response at c^2*u equals c
    times the response at u evaluated at c*eps).  Disagreements are reported
    as findings, not raised.
    """
    grid = _resolve_grid(grid)
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample pair")
    report = VerificationReport("limit-equivalence")
    for i, (p, q) in enumerate(samples):
        if p.xbar != 0.0 or q.xbar != 0.0:
            raise ValueError(
                f"sample {i}: pairs must be horizontal (zero vertical part), "
                f"got {p.as_tuple()}, {q.as_tuple()}"
            )
        area = symplectic_area(p.horizontal, q.horizontal)
        if area == 0.0:
            raise ValueError(f"sample {i}: symplectic area is zero; pair carries no twist")
        prod_kind = rescaled_product_probe(
            gauge, p, q, grid, window=window, atol=atol, divergence_bound=divergence_bound
        ).classification.kind
        scalar_kind = vertical_limit_probe(
            gauge,
            0.5 * area,
            grid,
            window=window,
            atol=atol,
            divergence_bound=divergence_bound,
        ).classification.kind
        agree = (prod_kind == "converged") == (scalar_kind == "converged")
        report.add(
            PropertyCheck(
                name=f"agreement[{i}]",
                passed=agree,
                worst_violation=0.0 if agree else 1.0,
                tolerance=0.0,
                witness={
                    "p": list(p.as_tuple()),
                    "q": list(q.as_tuple()),
                    "rescaled_product": prod_kind,
                    "scalar_vertical": scalar_kind,
                },
            )
        )
    return report
