//! Energy model and bandwidth optimizer for UAV-mounted base stations.
//!
//! A hovering rotor craft serves ground users with three service classes:
//! a shared control channel sized by a latency budget, per-group
//! non-real-time data channels, and Erlang-B-dimensioned real-time call
//! channels. The library computes expected air-to-ground channel gains,
//! rotor-craft propulsion power, and the convex split of one bandwidth
//! budget across all channels that minimizes total energy, for one UAV or
//! for two UAVs sharing the load. A sweep harness compares optimized
//! against conventional allocations and one against two UAVs over user
//! count and altitude, with seeded, reproducible replication.

// Validation uses `!(x > 0.0)` so NaN fails the check; `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod optimizer;
pub mod propulsion;
pub mod scenario;
pub mod traffic;

pub use assignment::{
    assign_two_uavs, baseline_even_grouping, group_users_by_gain, single_uav_grouping,
    two_uav_grouping, GroupingPlan,
};
pub use channel::{
    bandwidth_energy_term, expected_gain, free_space_path_loss_db, p_los, required_power_w,
    LinkBudget, SPEED_OF_LIGHT_M_S,
};
pub use error::{Error, Result};
pub use experiments::{
    compare_uavs, emit_results, find_crossover, run_sweep, to_csv, to_json, EmitFormat,
    ScenarioOverrides, SweepResult, SweepRow, SweepSpec, SweepVariable, UavComparison, CSV_HEADER,
};
pub use optimizer::{
    channel_energy_derivative, channel_energy_w, communication_energy_w, reduce_rates,
    solve_bandwidths, solve_double_uav, solve_single_uav, total_energy, AllocationPlan,
    AllocationProblem, ChannelClass, ChannelSpec, EnergyReport, SolveOutcome,
};
pub use propulsion::{
    forward_power_w, hover_power_w, induced_velocity, rotor_solidity, RotorCraft, RotorCraftConfig,
};
pub use scenario::{
    default_k_n, generate_users, place_uavs, Environment, EnvironmentLabel, Region, Scenario,
    ScenarioFile, ServiceConfig, ServiceParams, UavPlacement, User, DEFAULT_ALTITUDE_M,
    DEFAULT_MIN_SEPARATION_M, DEFAULT_REGION_SIDE_M, DEFAULT_TOTAL_BANDWIDTH_HZ,
};
pub use traffic::{
    control_rate_min, csma_cd_required_rate, derive_demands, erlang_b, min_channels,
    service_energy_weights, traffic_load, ServiceDemands,
};
