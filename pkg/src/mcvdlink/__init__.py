"""Relay-assisted molecular-communication link evaluation and optimization."""

from .ber import BerResult, direct_ber, relay_ber, success_probability
from .channel import (
    ArrivalTable,
    ChannelParams,
    SphereReceiver,
    Vec3,
    arrival_table,
    pdf_at_point,
    presence_probability,
    presence_probability_raw,
    second_hop_params,
)
from .energy import (
    EnergyBreakdown,
    EnergyParams,
    subslot_energy,
    total_energy,
    vesicle_capacity,
    vesicle_radius,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    InfeasibleBudgetError,
    NoThresholdError,
    ThresholdUnsetError,
)
from .modulation import PulseShape, ShapeFamily, make_pulse, scale_to_energy
from .montecarlo import (
    McEstimate,
    RngConfig,
    mc_count_moments,
    mc_link_ber,
    mc_presence_probability,
    quadrature_presence_probability,
)
from .optimizer import (
    Optimum,
    OptimizerConfig,
    bisection_optimize,
    derivative_sign_scan,
    feasibility,
    golden_section_maximize,
    objective,
)
from .reception import (
    LinkStats,
    NoiseParams,
    Priors,
    detection_probabilities,
    isi_moments,
    link_stats,
    map_threshold,
    solve_threshold,
)
from .scenario import LinkEvaluation, Scenario, evaluate_link, hop_channels, resolve_pulse

__version__ = "0.1.0"
