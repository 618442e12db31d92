"""Tropical curves, metric graphs, divisors and Jacobians."""

from .divisors import (
    Divisor,
    EdgePiece,
    GraphPoint,
    NotEquivalent,
    PLFunction,
    linear_equivalence,
    principal_divisor,
)
from .graph import (
    BalanceReport,
    CurveMap,
    Cylinder,
    Edge,
    MetricGraph,
    Plane,
    balancing_check,
)
from .jacobian import (
    JacClass,
    abel_jacobi,
    divide_class,
    fundamental_cycles,
    inertia,
    jacobi_inversion,
    period_matrix,
    spanning_tree,
)
from .surgery import effective_balance_check, normalize_mixed_vertices, pullback_curve

__all__ = [
    "BalanceReport",
    "CurveMap",
    "Cylinder",
    "Divisor",
    "Edge",
    "EdgePiece",
    "GraphPoint",
    "JacClass",
    "MetricGraph",
    "NotEquivalent",
    "PLFunction",
    "Plane",
    "abel_jacobi",
    "balancing_check",
    "divide_class",
    "effective_balance_check",
    "fundamental_cycles",
    "inertia",
    "jacobi_inversion",
    "linear_equivalence",
    "normalize_mixed_vertices",
    "period_matrix",
    "principal_divisor",
    "pullback_curve",
    "spanning_tree",
]
