"""Survey planning and fleet execution."""

from .fleet import (
    AuvState,
    AuvStatus,
    ChargingStation,
    CoverageGrid,
    FleetController,
    coverage_fraction,
    return_trip_feasible,
)
from .planning import (
    AreaSpec,
    AssignmentError,
    Constraint,
    ConstraintKind,
    PlanKind,
    PlanningError,
    Strip,
    TransectPlan,
    assign_transects,
    plan_3d_grid,
    plan_belt_transects,
)

__all__ = [
    "AreaSpec",
    "AssignmentError",
    "AuvState",
    "AuvStatus",
    "ChargingStation",
    "Constraint",
    "ConstraintKind",
    "CoverageGrid",
    "FleetController",
    "PlanKind",
    "PlanningError",
    "Strip",
    "TransectPlan",
    "assign_transects",
    "coverage_fraction",
    "plan_3d_grid",
    "plan_belt_transects",
    "return_trip_feasible",
]
