"""Pattern-domain pilot design and random-access simulation for massive MIMO.

Subpackages:
    zc        Zadoff-Chu sequences, cyclic shifts, correlation primitives
    pool      combinatorial pattern pool over shift subsets
    analytic  closed-form success-probability model
    geometry  cell layout, UE drops, channel correlation models
    simulate  Monte-Carlo access-opportunity engine
    bench     experiment specs, presets, CSV campaigns, CLI entry point
"""

from .analytic import (
    AnalyticParams,
    CollisionEventProbs,
    asymptotic_sinr,
    collision_event_probs,
    db_to_linear,
    linear_to_db,
    p_k_other_roots,
    p_no_pattern_collision,
    p_no_pattern_collision_binomial,
    sinr_limited_k_cap,
    success_probability_conventional,
    success_probability_pdra,
    success_probability_random_activity,
)
from .geometry import (
    CellLayout,
    ChannelModelSpec,
    UePlacement,
    correlation_factor,
    correlation_matrix,
    drop_ue,
    pathloss_db,
    sample_channel,
    shadow_fading_db,
)
from .pool import (
    Pattern,
    PilotPool,
    build_pattern,
    build_pool,
    expansion_factor,
    rank_combination,
    sample_pattern,
    unrank_combination,
)
from .simulate import (
    FixedActivity,
    RandomActivity,
    ScenarioConfig,
    SweepResult,
    TrialOutcome,
    analytic_reference,
    apply_overrides,
    build_received_pilot,
    classify_tagged_collision,
    detect_data_symbol,
    mf_channel_estimate,
    mf_sinr,
    run_campaign,
    run_forced_interference_trial,
    run_point,
    run_trial,
    wilson_interval,
)
from .zc import (
    ShiftPlan,
    ZcConfig,
    ZcSequence,
    compute_ncs,
    correlation_profile,
    cyclic_shift,
    default_roots,
    generate_root_sequence,
    make_shift_plan,
    periodic_crosscorrelation,
    plan_from_subset_size,
)

__version__ = "0.1.0"
