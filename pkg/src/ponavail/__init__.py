"""Service availability of tree PONs whose ONUs may get service from other operators."""

from .analytic import analytic_mean_sa_no_ic, expected_onu_count, expected_stage_counts
from .engine import (
    SharedSegment,
    all_onu_availabilities,
    annual_downtime_hours,
    mean_onu_availability,
    service_availability,
    shared_segment,
)
from .generator import GeneratorParams, Scenario, generate, onu_census
from .model import (
    TABLE_I,
    AvailabilityTable,
    Fiber,
    FiberRole,
    Node,
    NodeKind,
    PonTree,
    component_availability,
    fiber_availability_from_length,
    validate,
)
from .montecarlo import (
    PopulationSpec,
    SampleStats,
    evaluate_population,
    q_grid,
    r_grid,
    relative_standard_error,
    sweep_scenario1,
    sweep_scenario2,
)

__version__ = "0.1.0"
