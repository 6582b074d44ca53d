"""Kinematic pursuit-evasion simulator for a delivery rover under drone threat.

A risk engine scores the threat from windowed gradients of sensed cues
(inverse distance, sound pressure, approach velocity) plus battery
depletion, and triggers self-preservation behaviors (fleeing, protean
fleeing, refuge seeking) against escalating thresholds. A seeded Monte
Carlo harness runs the scenario x configuration x pursuit-mode matrix
and aggregates outcome and trigger tables.
"""

from .behaviors import (
    PERSISTENT,
    DroneMode,
    DronePhase,
    DroneState,
    ProteanParams,
    RoverBehaviorState,
    RoverMode,
    apply_behavior_transition,
    drone_step,
    protean_subgoal,
    rover_step,
)
from .config import ArenaParams, RunConfig, episode_config, load_run_config, parse_run_config
from .episode import (
    EpisodeConfig,
    EpisodeOutcome,
    EpisodeRecord,
    Scenario,
    check_termination,
    episode_rng,
    generate_scenario,
    run_episode,
)
from .errors import ConfigError, ContractViolation, GenerationError, RecordFormatError
from .harness import (
    OutcomeClass,
    RunMatrix,
    SummaryTable,
    TriggerTable,
    aggregate,
    classify,
    derive_scenario_seed,
    export_trajectory,
    read_records,
    record_payload,
    render_summary,
    render_triggers,
    run_batch,
    tables_to_dict,
    write_records,
)
from .model import (
    BatteryModel,
    Pose2,
    Position3,
    SimParams,
    WorldState,
    angle_wrap,
    euclidean_distance,
    heading_to,
    horizontal_distance,
    integrate_unicycle,
)
from .risk import (
    THRESHOLD_PROFILES,
    BehaviorCommand,
    RiskBreakdown,
    RiskCoefficients,
    RiskEngine,
    RiskProfile,
    RiskThresholds,
    SampleWindow,
    SlopeMode,
    battery_depletion,
    battery_risk,
    distance_score,
    rectified_risk,
    relative_velocity,
    select_response,
    sound_pressure,
    total_risk,
    window_slope,
)

__version__ = "0.1.0"
