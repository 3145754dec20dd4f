"""Gauge-deformed metrics and dilatation limits on the first Heisenberg group.

Group arithmetic lives in heisenberg, convex gauges and their profile inverse
in gauges, the three distances and randomized property samplers in metrics,
the dilatation families and the flattening conjugation in dilatations, limit
probes and trace classification in limits, and the command-line front end in
cli.
"""

from .dilatations import (
    dilate,
    euclidean_dilate,
    flatten,
    gauge_dilate,
    gauge_dilate_at,
    rescaled_product,
    transported_inv,
    transported_mul,
    unflatten,
)
from .gauges import (
    Gauge,
    GaugeConstructionError,
    check_gauge,
    gauge_from_spec,
    gauge_to_spec,
    g_eval,
    g_inverse_eval,
    invert_g,
    linear_gauge,
    load_gauge,
    oscillatory_gauge,
    piecewise_gauge,
    verified_gauge,
)
from .heisenberg import H1Point, identity, inv, mul, point, symplectic_area
from .limits import (
    Classification,
    ConvergenceTrace,
    EpsGrid,
    MetricDiffReport,
    NonConvergentLimitError,
    PointClassification,
    classify_limit,
    default_direction_grid,
    id_derivability_probe,
    limit_equivalence_check,
    metric_diff_probe,
    metric_differential,
    rescaled_product_probe,
    uniform_probe,
    vertical_limit_probe,
    vertical_response,
)
from .metrics import (
    SampleBox,
    flat_dist,
    flat_norm,
    gauge_dist,
    gauge_norm,
    intrinsic_dist,
    intrinsic_norm,
)
from .report import PropertyCheck, VerificationReport

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "ConvergenceTrace",
    "EpsGrid",
    "Gauge",
    "GaugeConstructionError",
    "H1Point",
    "MetricDiffReport",
    "NonConvergentLimitError",
    "PointClassification",
    "PropertyCheck",
    "SampleBox",
    "VerificationReport",
    "check_gauge",
    "classify_limit",
    "default_direction_grid",
    "dilate",
    "euclidean_dilate",
    "flat_dist",
    "flat_norm",
    "flatten",
    "g_eval",
    "g_inverse_eval",
    "gauge_dilate",
    "gauge_dilate_at",
    "gauge_dist",
    "gauge_from_spec",
    "gauge_norm",
    "gauge_to_spec",
    "identity",
    "id_derivability_probe",
    "intrinsic_dist",
    "intrinsic_norm",
    "inv",
    "invert_g",
    "limit_equivalence_check",
    "linear_gauge",
    "load_gauge",
    "metric_diff_probe",
    "metric_differential",
    "mul",
    "oscillatory_gauge",
    "piecewise_gauge",
    "point",
    "rescaled_product",
    "rescaled_product_probe",
    "symplectic_area",
    "transported_inv",
    "transported_mul",
    "unflatten",
    "uniform_probe",
    "verified_gauge",
    "vertical_limit_probe",
    "vertical_response",
]
