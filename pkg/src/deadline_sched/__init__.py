"""Energy-efficient packet scheduling for a common deadline, with and without energy harvesting."""
from ._backend import BACKEND
from .adversary import SearchConfig, project_to_decreasing, unknown_p_lower_bound, worst_case_search
from .energy import (
    ArrivalError,
    ArrivalSequence,
    DomainError,
    LinkParams,
    ProblemInstance,
    SaturationError,
    Schedule,
    ScheduleError,
    energy,
    total_energy,
    validate_arrivals,
)
from .harvest import (
    EnergyLedger,
    HarvestProfile,
    eh_assumption_margin,
    eh_nondegeneracy_check,
    eh_on_schedule,
    grid_cr_surrogate,
)
from .offline import GroupBoundary, opt_groups, opt_oracle, opt_schedule, opt_transform
from .online import competitive_ratio, on_closed_form_decreasing, on_schedule, ratio_bound
from .workload import WorkloadSpec, gen_arrivals, gen_harvest

__version__ = "0.1.0"
