"""Independent verification engines.

Nothing in this package may depend on the analytic solution modules; the
architecture tests enforce it.
"""

from __future__ import annotations

from movingwell.oracle.finite_difference import (
    PDEKind,
    ResidualReport,
    StepPolicy,
    fd_residual,
    observed_order,
    partial_derivatives,
)
from movingwell.oracle.grids import SpacetimeGrid
from movingwell.oracle.schrodinger import schrodinger_well_oracle

__all__ = [
    "PDEKind",
    "ResidualReport",
    "SpacetimeGrid",
    "StepPolicy",
    "fd_residual",
    "observed_order",
    "partial_derivatives",
    "schrodinger_well_oracle",
]
