"""Ricci flow, curvature and phase-space dynamics on three-summand flag manifolds."""
from .spaces import FlagSpace, Metric3, SimplexPoint, lift, project, submersion_metric
from .curvature import ricci_components, scalar_curvature, sectional_table, signature
from .flow import integrate, projected_field
from .dynamics import find_equilibria

__version__ = "0.1.0"

__all__ = [
    "FlagSpace", "Metric3", "SimplexPoint", "lift", "project", "submersion_metric",
    "ricci_components", "scalar_curvature", "sectional_table", "signature",
    "integrate", "projected_field", "find_equilibria",
]
