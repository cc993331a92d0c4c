//! Convex bandwidth allocation across the control, non-real-time, and
//! real-time channels of one or two UAVs.
//!
//! Rates are eliminated first: every energy term grows with its rate, so
//! the rate floors bind at any optimum. What remains is a separable convex
//! problem in the bandwidths under one budget, solved by dual bisection:
//! the budget binds because each term strictly decreases in bandwidth, and
//! at the optimum all channels share one marginal energy value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::assignment::{
    baseline_even_grouping, single_uav_grouping, two_uav_grouping, GroupingPlan,
};
use crate::channel::{bandwidth_energy_term, expected_gain, LinkBudget};
use crate::error::{Error, Result};
use crate::propulsion::hover_power_w;
use crate::scenario::Scenario;
use crate::traffic::{derive_demands, ServiceDemands};

const LN2: f64 = std::f64::consts::LN_2;
/// Salt mixed into the scenario seed for the baseline's random grouping so
/// it never reuses the user-placement stream.
const BASELINE_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Service class of an RF channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelClass {
    /// Shared control channel; duty scales inversely with its rate.
    Control,
    /// Non-real-time data channel for one user group (group index).
    NonRealTime(usize),
    /// Real-time call channels; all share one bandwidth variable.
    RealTime,
}

/// One bandwidth variable of the allocation problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub class: ChannelClass,
    /// Per-channel energy weight: sum over served users of duty * N0 / gain.
    /// For the control channel the 1/C_c part of the duty is not baked in;
    /// see `rate_inverse_duty`.
    pub weight: f64,
    /// Minimum rate this channel must carry, bps.
    pub rate_floor_bps: f64,
    /// How many physical channels share this variable (budget multiplier).
    pub multiplicity: f64,
    /// When set, the effective weight is `weight / rate`: transmit duty
    /// falls as the channel gets faster.
    pub rate_inverse_duty: bool,
}

impl ChannelSpec {
    fn effective_weight(&self, rate_bps: f64) -> f64 {
        if self.rate_inverse_duty {
            self.weight / rate_bps
        } else {
            self.weight
        }
    }
}

/// Bandwidth allocation problem: a set of channels sharing one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationProblem {
    pub channels: Vec<ChannelSpec>,
    pub total_bandwidth_hz: f64,
}

impl AllocationProblem {
    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::InvalidProblem("no channels to allocate".to_string()));
        }
        if !(self.total_bandwidth_hz > 0.0) || !self.total_bandwidth_hz.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "total bandwidth must be positive, got {}",
                self.total_bandwidth_hz
            )));
        }
        let mut control = 0;
        let mut realtime = 0;
        for spec in &self.channels {
            if !(spec.weight > 0.0) || !spec.weight.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "channel weight must be positive and finite, got {}",
                    spec.weight
                )));
            }
            if !(spec.rate_floor_bps > 0.0) || !spec.rate_floor_bps.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "rate floor must be positive, got {}",
                    spec.rate_floor_bps
                )));
            }
            if !(spec.multiplicity >= 1.0) || !spec.multiplicity.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "channel multiplicity must be at least 1, got {}",
                    spec.multiplicity
                )));
            }
            match spec.class {
                ChannelClass::Control => control += 1,
                ChannelClass::RealTime => realtime += 1,
                ChannelClass::NonRealTime(_) => {}
            }
        }
        if control > 1 || realtime > 1 {
            return Err(Error::InvalidProblem(
                "at most one control and one real-time variable allowed".to_string(),
            ));
        }
        Ok(())
    }

    fn multiplicity_sum(&self) -> f64 {
        self.channels.iter().map(|c| c.multiplicity).sum()
    }
}

/// Solved bandwidth and rate assignment. Fields for classes absent from
/// the problem stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationPlan {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_c: Option<f64>,
    pub b_xi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_c: Option<f64>,
    pub c_xi: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_r: Option<f64>,
    pub feasible: bool,
    /// Dual multiplier of the bandwidth budget.
    pub kkt_multiplier: f64,
}

impl AllocationPlan {
    /// Empty plan for a system with nothing to allocate.
    pub fn empty() -> Self {
        AllocationPlan {
            b_c: None,
            b_xi: Vec::new(),
            b_r: None,
            c_c: None,
            c_xi: Vec::new(),
            c_r: None,
            feasible: true,
            kkt_multiplier: 0.0,
        }
    }

    /// Bandwidths aligned with `problem.channels`.
    pub fn aligned_bandwidths(&self, problem: &AllocationProblem) -> Result<Vec<f64>> {
        self.aligned(problem, &self.b_c, &self.b_xi, &self.b_r, "bandwidth")
    }

    /// Rates aligned with `problem.channels`.
    pub fn aligned_rates(&self, problem: &AllocationProblem) -> Result<Vec<f64>> {
        self.aligned(problem, &self.c_c, &self.c_xi, &self.c_r, "rate")
    }

    fn aligned(
        &self,
        problem: &AllocationProblem,
        control: &Option<f64>,
        nonrealtime: &[f64],
        realtime: &Option<f64>,
        what: &str,
    ) -> Result<Vec<f64>> {
        let mut nrt = nonrealtime.iter();
        let mut out = Vec::with_capacity(problem.channels.len());
        for spec in &problem.channels {
            let value = match spec.class {
                ChannelClass::Control => control
                    .ok_or_else(|| Error::InvalidProblem(format!("plan lacks a control {what}")))?,
                ChannelClass::RealTime => realtime.ok_or_else(|| {
                    Error::InvalidProblem(format!("plan lacks a real-time {what}"))
                })?,
                ChannelClass::NonRealTime(_) => *nrt.next().ok_or_else(|| {
                    Error::InvalidProblem(format!("plan has too few non-real-time {what} entries"))
                })?,
            };
            out.push(value);
        }
        if nrt.next().is_some() {
            return Err(Error::InvalidProblem(format!(
                "plan has more non-real-time {what} entries than the problem"
            )));
        }
        Ok(out)
    }
}

/// Per-second energy breakdown of a solved system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub e_control: f64,
    pub e_nonrealtime: f64,
    pub e_realtime: f64,
    pub e_propulsion: f64,
    pub e_total: f64,
    /// Total of the conventional scheme: even bandwidth split over randomly
    /// grouped users, rates at floors.
    pub baseline_total: f64,
    /// Fraction of communication energy saved versus the conventional scheme.
    /// Propulsion is the same under both schemes and stays out of the ratio.
    pub save_rate: f64,
}

impl EnergyReport {
    fn with_baseline(mut self, baseline_total: f64) -> Self {
        self.baseline_total = baseline_total;
        let baseline_comm = baseline_total - self.e_propulsion;
        let optimized_comm = self.e_total - self.e_propulsion;
        self.save_rate = if baseline_comm > 0.0 {
            (baseline_comm - optimized_comm) / baseline_comm
        } else {
            0.0
        };
        self
    }
}

/// Everything produced by one end-to-end solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub plan: AllocationPlan,
    pub report: EnergyReport,
    pub grouping: GroupingPlan,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demands: Option<ServiceDemands>,
    pub problem: AllocationProblem,
}

/// Energy of one channel variable at the given rate and bandwidth, W.
pub fn channel_energy_w(spec: &ChannelSpec, rate_bps: f64, bandwidth_hz: f64) -> Result<f64> {
    if rate_bps == 0.0 {
        return Ok(0.0);
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::InfeasibleLink { rate_bps });
    }
    Ok(spec.multiplicity
        * spec.effective_weight(rate_bps)
        * bandwidth_energy_term(rate_bps, bandwidth_hz))
}

/// Derivative of one physical channel's energy with respect to its
/// bandwidth. Negative everywhere, rising toward zero.
pub fn channel_energy_derivative(spec: &ChannelSpec, rate_bps: f64, bandwidth_hz: f64) -> f64 {
    -spec.effective_weight(rate_bps) * phi(rate_bps * LN2 / bandwidth_hz)
}

/// `phi(y) = e^y (y - 1) + 1`, written with expm1 so small `y` keep full
/// precision. Strictly increasing from 0 with `phi(y) -> inf`.
fn phi(y: f64) -> f64 {
    f64::exp_m1(y) * (y - 1.0) + y
}

/// Total communication energy at aligned rates and bandwidths, W.
pub fn communication_energy_w(
    problem: &AllocationProblem,
    rates: &[f64],
    bandwidths: &[f64],
) -> Result<f64> {
    if rates.len() != problem.channels.len() || bandwidths.len() != problem.channels.len() {
        return Err(Error::InvalidProblem(
            "rate or bandwidth vector length mismatch".to_string(),
        ));
    }
    let mut total = 0.0;
    for ((spec, &rate), &bw) in problem.channels.iter().zip(rates).zip(bandwidths) {
        total += channel_energy_w(spec, rate, bw)?;
    }
    Ok(total)
}

/// Rate floors, aligned with the problem's channels. Every channel's energy
/// strictly increases in its rate, so the floors bind at any optimum.
pub fn reduce_rates(problem: &AllocationProblem) -> Vec<f64> {
    problem.channels.iter().map(|c| c.rate_floor_bps).collect()
}

/// Inverts `phi(y) = target` by bisection; `phi` is strictly increasing.
fn invert_phi(target: f64) -> f64 {
    debug_assert!(target > 0.0);
    let mut hi = 1.0f64;
    while phi(hi) < target {
        hi *= 2.0;
        if hi > 1.0e4 {
            break;
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..250 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bandwidth at which a channel's marginal energy equals `-mu`.
fn bandwidth_at_marginal(spec: &ChannelSpec, rate_bps: f64, mu: f64) -> f64 {
    let y = invert_phi(mu / spec.effective_weight(rate_bps));
    rate_bps * LN2 / y
}

/// Minimizes total communication energy over the bandwidths with rates at
/// their floors and the budget binding.
pub fn solve_bandwidths(problem: &AllocationProblem) -> Result<AllocationPlan> {
    problem.validate()?;
    let rates = reduce_rates(problem);
    let budget = problem.total_bandwidth_hz;
    let m_sum = problem.multiplicity_sum();
    let even = budget / m_sum;

    // Marginal energies at the even split bracket the optimal dual value:
    // pushing mu to the smallest marginal grows every channel, to the
    // largest shrinks every channel.
    let marginals: Vec<f64> = problem
        .channels
        .iter()
        .zip(&rates)
        .map(|(spec, &rate)| {
            let m = -channel_energy_derivative(spec, rate, even);
            if m.is_finite() {
                m
            } else {
                f64::MAX / 1e6
            }
        })
        .collect();
    let mut mu_lo = marginals.iter().copied().fold(f64::INFINITY, f64::min);
    let mut mu_hi = marginals.iter().copied().fold(0.0f64, f64::max);

    let allocate = |mu: f64| -> Vec<f64> {
        problem
            .channels
            .iter()
            .zip(&rates)
            .map(|(spec, &rate)| bandwidth_at_marginal(spec, rate, mu))
            .collect()
    };
    let used = |bws: &[f64]| -> f64 {
        problem
            .channels
            .iter()
            .zip(bws)
            .map(|(spec, &b)| spec.multiplicity * b)
            .sum()
    };

    let mut bandwidths;
    let mut mu;
    if mu_lo == mu_hi {
        // All marginals already equal: the even split is optimal and exact.
        bandwidths = vec![even; problem.channels.len()];
        mu = mu_lo;
    } else {
        // Guard the bracket against inner-bisection noise.
        for _ in 0..64 {
            if used(&allocate(mu_lo)) >= budget {
                break;
            }
            mu_lo *= 0.5;
        }
        for _ in 0..64 {
            if used(&allocate(mu_hi)) <= budget {
                break;
            }
            mu_hi *= 2.0;
        }
        mu = 0.5 * (mu_lo + mu_hi);
        bandwidths = allocate(mu);
        for _ in 0..300 {
            let residual = used(&bandwidths) - budget;
            if residual.abs() <= 1e-13 * budget || (mu_hi - mu_lo) <= 1e-16 * mu_hi {
                break;
            }
            if residual > 0.0 {
                mu_lo = mu;
            } else {
                mu_hi = mu;
            }
            mu = 0.5 * (mu_lo + mu_hi);
            bandwidths = allocate(mu);
        }
        // Land the budget exactly up to rounding.
        let scale = budget / used(&bandwidths);
        for b in &mut bandwidths {
            *b *= scale;
        }
    }

    let mut plan = AllocationPlan::empty();
    plan.kkt_multiplier = mu;
    for ((spec, &b), &rate) in problem.channels.iter().zip(&bandwidths).zip(&rates) {
        match spec.class {
            ChannelClass::Control => {
                plan.b_c = Some(b);
                plan.c_c = Some(rate);
            }
            ChannelClass::NonRealTime(_) => {
                plan.b_xi.push(b);
                plan.c_xi.push(rate);
            }
            ChannelClass::RealTime => {
                plan.b_r = Some(b);
                plan.c_r = Some(rate);
            }
        }
    }
    Ok(plan)
}

/// Energy report for a plan: per-class communication energy plus the given
/// propulsion power. The baseline fields compare the plan against itself
/// until a baseline total is attached.
pub fn total_energy(
    plan: &AllocationPlan,
    problem: &AllocationProblem,
    propulsion_w: f64,
) -> Result<EnergyReport> {
    let rates = plan.aligned_rates(problem)?;
    let bandwidths = plan.aligned_bandwidths(problem)?;
    let mut e_control = 0.0;
    let mut e_nonrealtime = 0.0;
    let mut e_realtime = 0.0;
    for ((spec, &rate), &bw) in problem.channels.iter().zip(&rates).zip(&bandwidths) {
        let e = channel_energy_w(spec, rate, bw)?;
        match spec.class {
            ChannelClass::Control => e_control += e,
            ChannelClass::NonRealTime(_) => e_nonrealtime += e,
            ChannelClass::RealTime => e_realtime += e,
        }
    }
    let e_total = e_control + e_nonrealtime + e_realtime + propulsion_w;
    Ok(EnergyReport {
        e_control,
        e_nonrealtime,
        e_realtime,
        e_propulsion: propulsion_w,
        e_total,
        baseline_total: e_total,
        save_rate: 0.0,
    })
}

fn propulsion_only_outcome(propulsion_w: f64) -> SolveOutcome {
    let report = EnergyReport {
        e_control: 0.0,
        e_nonrealtime: 0.0,
        e_realtime: 0.0,
        e_propulsion: propulsion_w,
        e_total: propulsion_w,
        baseline_total: propulsion_w,
        save_rate: 0.0,
    };
    SolveOutcome {
        plan: AllocationPlan::empty(),
        report,
        grouping: GroupingPlan {
            groups: Vec::new(),
            uav_of_user: BTreeMap::new(),
        },
        demands: None,
        problem: AllocationProblem {
            channels: Vec::new(),
            total_bandwidth_hz: 0.0,
        },
    }
}

/// Builds the channel set from a grouping and each user's serving-link
/// inverse gain.
fn build_problem(
    scenario: &Scenario,
    demands: &ServiceDemands,
    groups: &[Vec<usize>],
    inv_gain: &BTreeMap<usize, f64>,
) -> Result<AllocationProblem> {
    let service = &scenario.service;
    let n0 = service.n0_w_per_hz;
    let total_inv: f64 = inv_gain.values().sum();
    let extra_n = if service.control_energy_extra_n {
        scenario.n_users() as f64
    } else {
        1.0
    };
    let mut channels = Vec::with_capacity(groups.len() + 2);
    channels.push(ChannelSpec {
        class: ChannelClass::Control,
        weight: n0 * service.packet_len_bits * service.lambda_per_s * total_inv * extra_n,
        rate_floor_bps: demands.c_req_bps,
        multiplicity: 1.0,
        rate_inverse_duty: true,
    });
    for (index, group) in groups.iter().enumerate() {
        let sum: f64 = group
            .iter()
            .map(|id| {
                inv_gain.get(id).copied().ok_or_else(|| {
                    Error::InvalidProblem(format!("group references unknown user {id}"))
                })
            })
            .sum::<Result<f64>>()?;
        channels.push(ChannelSpec {
            class: ChannelClass::NonRealTime(index),
            weight: n0 * sum,
            rate_floor_bps: service.r_n_bps,
            multiplicity: 1.0,
            rate_inverse_duty: false,
        });
    }
    let k_r = demands.k_r as f64;
    channels.push(ChannelSpec {
        class: ChannelClass::RealTime,
        weight: n0 * demands.duty_realtime * total_inv / k_r,
        rate_floor_bps: service.burst_rate_bps,
        multiplicity: k_r,
        rate_inverse_duty: false,
    });
    let problem = AllocationProblem {
        channels,
        total_bandwidth_hz: service.total_bandwidth_hz,
    };
    problem.validate()?;
    Ok(problem)
}

/// Baseline plan: the whole budget split evenly over every physical channel,
/// rates at floors.
fn even_split_plan(problem: &AllocationProblem) -> AllocationPlan {
    let even = problem.total_bandwidth_hz / problem.multiplicity_sum();
    let mut plan = AllocationPlan::empty();
    for spec in &problem.channels {
        match spec.class {
            ChannelClass::Control => {
                plan.b_c = Some(even);
                plan.c_c = Some(spec.rate_floor_bps);
            }
            ChannelClass::NonRealTime(_) => {
                plan.b_xi.push(even);
                plan.c_xi.push(spec.rate_floor_bps);
            }
            ChannelClass::RealTime => {
                plan.b_r = Some(even);
                plan.c_r = Some(spec.rate_floor_bps);
            }
        }
    }
    plan
}

fn baseline_total_w(
    scenario: &Scenario,
    demands: &ServiceDemands,
    baseline_groups: &[Vec<usize>],
    inv_gain: &BTreeMap<usize, f64>,
    propulsion_w: f64,
) -> Result<f64> {
    let problem = build_problem(scenario, demands, baseline_groups, inv_gain)?;
    let plan = even_split_plan(&problem);
    Ok(total_energy(&plan, &problem, propulsion_w)?.e_total)
}

/// Full single-UAV pipeline: links, demands, gain-sorted grouping, convex
/// bandwidth split, and the baseline comparison.
pub fn solve_single_uav(scenario: &Scenario) -> Result<SolveOutcome> {
    scenario.validate()?;
    if scenario.uav_count() != 1 {
        return Err(Error::UnsupportedUavCount(scenario.uav_count()));
    }
    let propulsion = hover_power_w(&scenario.propulsion);
    if scenario.users.is_empty() {
        return Ok(propulsion_only_outcome(propulsion));
    }
    let links = scenario
        .users
        .iter()
        .map(|u| {
            expected_gain(
                u,
                &scenario.uavs[0],
                0,
                &scenario.env,
                scenario.service.carrier_hz,
            )
        })
        .collect::<Result<Vec<LinkBudget>>>()?;
    let demands = derive_demands(&scenario.service, scenario.n_users())?;
    let grouping = single_uav_grouping(&links, scenario.service.k_n)?;
    let inv_gain: BTreeMap<usize, f64> = links
        .iter()
        .map(|l| (l.user_id, 1.0 / l.gain_linear))
        .collect();
    let problem = build_problem(scenario, &demands, &grouping.groups, &inv_gain)?;
    let plan = solve_bandwidths(&problem)?;
    let report = total_energy(&plan, &problem, propulsion)?;
    let baseline_groups = baseline_even_grouping(
        &scenario.users,
        scenario.service.k_n,
        scenario.rng_seed ^ BASELINE_SEED_SALT,
    )?;
    let baseline = baseline_total_w(scenario, &demands, &baseline_groups, &inv_gain, propulsion)?;
    Ok(SolveOutcome {
        plan,
        report: report.with_baseline(baseline),
        grouping,
        demands: Some(demands),
        problem,
    })
}

/// Full two-UAV pipeline: half-split user assignment, per-UAV grouping,
/// shared-budget solve, doubled propulsion.
pub fn solve_double_uav(scenario: &Scenario) -> Result<SolveOutcome> {
    scenario.validate()?;
    if scenario.uav_count() != 2 {
        return Err(Error::UnsupportedUavCount(scenario.uav_count()));
    }
    let propulsion = 2.0 * hover_power_w(&scenario.propulsion);
    if scenario.users.is_empty() {
        return Ok(propulsion_only_outcome(propulsion));
    }
    let link_set = |uav_index: usize| -> Result<Vec<LinkBudget>> {
        scenario
            .users
            .iter()
            .map(|u| {
                expected_gain(
                    u,
                    &scenario.uavs[uav_index],
                    uav_index,
                    &scenario.env,
                    scenario.service.carrier_hz,
                )
            })
            .collect()
    };
    let links1 = link_set(0)?;
    let links2 = link_set(1)?;
    let demands = derive_demands(&scenario.service, scenario.n_users())?;
    let grouping = two_uav_grouping(&links1, &links2, scenario.service.k_n)?;
    // Each user's energy weight uses the gain to the UAV that serves it.
    let mut inv_gain = BTreeMap::new();
    for links in [&links1, &links2] {
        for link in links.iter() {
            if grouping.uav_of_user.get(&link.user_id) == Some(&link.uav_index) {
                inv_gain.insert(link.user_id, 1.0 / link.gain_linear);
            }
        }
    }
    let problem = build_problem(scenario, &demands, &grouping.groups, &inv_gain)?;
    let plan = solve_bandwidths(&problem)?;
    let report = total_energy(&plan, &problem, propulsion)?;
    let half_users = |uav: usize| -> Vec<crate::scenario::User> {
        scenario
            .users
            .iter()
            .filter(|u| grouping.uav_of_user.get(&u.id) == Some(&uav))
            .copied()
            .collect()
    };
    let half_k = scenario.service.k_n / 2;
    let mut baseline_groups = baseline_even_grouping(
        &half_users(0),
        half_k,
        scenario.rng_seed ^ BASELINE_SEED_SALT,
    )?;
    baseline_groups.extend(baseline_even_grouping(
        &half_users(1),
        half_k,
        scenario.rng_seed ^ BASELINE_SEED_SALT ^ 1,
    )?);
    let baseline = baseline_total_w(scenario, &demands, &baseline_groups, &inv_gain, propulsion)?;
    Ok(SolveOutcome {
        plan,
        report: report.with_baseline(baseline),
        grouping,
        demands: Some(demands),
        problem,
    })
}
