"""Dynamic server provisioning: offline-optimal on/off schedules,
last-empty-server-first dispatching, and future-aware ski-rental policies
with provable competitive ratios."""

from .cost import CostBreakdown, CostModel, StepSchedule, evaluate, integrate, static_benchmark, toggle_costs
from .engine import (
    Assignment,
    Decision,
    DelayedOffDispatcher,
    LesfDispatcher,
    LookaheadConfig,
    PolicySpec,
    SimResult,
    a3_density_mass,
    a3_zero_probability,
    analytic_expected_ratio,
    lesf_will_receive,
    monte_carlo_ratio,
    run,
    run_discrete,
    sample_wait_time,
    slotted_will_receive,
    wait_time_quantile,
)
from .errors import (
    CapExceeded,
    FleetExhausted,
    Infeasible,
    InvalidRange,
    InvalidTarget,
    MalformedTrace,
    NotACriticalSegment,
    PowerProvError,
    SimultaneousEvents,
    UnknownJob,
    Unreachable,
    ZeroMean,
)
from .offline import OptimalSchedule, construct_optimal, dp_oracle, fluid_dp_oracle, lower_bound
from .ratio import SlottedRatio, closed_form, limit_ratio, verify_feasible, verify_tight
from .segments import (
    CriticalDecomposition,
    EpochPairing,
    Segment,
    SegmentType,
    classify,
    decompose,
    pair_epochs,
)
from .trace import (
    CountFunction,
    Event,
    EventTrace,
    FluidTrace,
    count_function,
    fluid_count_function,
    parse_event_trace,
    parse_fluid_trace,
    pmr,
    rescale_pmr,
    serialize_event_trace,
    serialize_fluid_trace,
    synth_event_trace,
    synth_fluid_trace,
    synth_trace,
)

__version__ = "0.1.0"
