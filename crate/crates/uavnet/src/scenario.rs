//! Input data model: region, users, UAV placement, environment, service
//! parameters, and seeded random instance generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propulsion::{RotorCraft, RotorCraftConfig};

/// Default UAV altitude in meters when a scenario does not pin one.
pub const DEFAULT_ALTITUDE_M: f64 = 500.0;
/// Default side length of the square deployment region, meters.
pub const DEFAULT_REGION_SIDE_M: f64 = 2000.0;
/// Default minimum pairwise UAV separation (collision avoidance), meters.
pub const DEFAULT_MIN_SEPARATION_M: f64 = 100.0;
/// Default total system bandwidth in Hz. Not tied to any published value;
/// chosen so the desk-scale experiments sit in the regime where grouping
/// and UAV-count effects are visible. Override via `service.total_bandwidth_hz`.
pub const DEFAULT_TOTAL_BANDWIDTH_HZ: f64 = 2.5e7;

/// Square deployment region; users live in `[0, side]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub side_length_m: f64,
}

impl Region {
    pub fn new(side_length_m: f64) -> Result<Self> {
        if !(side_length_m > 0.0) || !side_length_m.is_finite() {
            return Err(Error::Domain(format!(
                "region side length must be positive, got {side_length_m}"
            )));
        }
        Ok(Region { side_length_m })
    }

    pub fn contains(&self, x_m: f64, y_m: f64) -> bool {
        (0.0..=self.side_length_m).contains(&x_m) && (0.0..=self.side_length_m).contains(&y_m)
    }
}

impl Default for Region {
    fn default() -> Self {
        Region {
            side_length_m: DEFAULT_REGION_SIDE_M,
        }
    }
}

/// A ground user at a fixed horizontal position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct User {
    pub id: usize,
    pub x_m: f64,
    pub y_m: f64,
}

/// A hovering UAV base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavPlacement {
    pub x_m: f64,
    pub y_m: f64,
    pub altitude_m: f64,
}

impl UavPlacement {
    pub fn horizontal_distance_to(&self, x_m: f64, y_m: f64) -> f64 {
        (self.x_m - x_m).hypot(self.y_m - y_m)
    }

    pub fn distance_to(&self, other: &UavPlacement) -> f64 {
        let dh = self.horizontal_distance_to(other.x_m, other.y_m);
        dh.hypot(self.altitude_m - other.altitude_m)
    }
}

/// Named propagation environment class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvironmentLabel {
    Suburban,
    Urban,
    DenseUrban,
    Custom,
}

impl std::fmt::Display for EnvironmentLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            EnvironmentLabel::Suburban => "suburban",
            EnvironmentLabel::Urban => "urban",
            EnvironmentLabel::DenseUrban => "dense-urban",
            EnvironmentLabel::Custom => "custom",
        };
        f.write_str(s)
    }
}

/// Propagation environment: sigmoid LoS-probability parameters and the
/// excess losses of the LoS / NLoS branches.
///
/// The named presets carry commonly used air-to-ground values from the
/// channel-modeling literature. They are reasonable defaults, not measured
/// constants of any particular deployment; outputs that used a preset say so.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub a: f64,
    pub b: f64,
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
    pub label: EnvironmentLabel,
}

impl Environment {
    pub fn suburban() -> Self {
        Environment {
            a: 4.88,
            b: 0.43,
            eta_los_db: 0.1,
            eta_nlos_db: 21.0,
            label: EnvironmentLabel::Suburban,
        }
    }

    pub fn urban() -> Self {
        Environment {
            a: 9.61,
            b: 0.16,
            eta_los_db: 1.0,
            eta_nlos_db: 20.0,
            label: EnvironmentLabel::Urban,
        }
    }

    pub fn dense_urban() -> Self {
        Environment {
            a: 12.08,
            b: 0.11,
            eta_los_db: 1.6,
            eta_nlos_db: 23.0,
            label: EnvironmentLabel::DenseUrban,
        }
    }

    pub fn custom(a: f64, b: f64, eta_los_db: f64, eta_nlos_db: f64) -> Result<Self> {
        let env = Environment {
            a,
            b,
            eta_los_db,
            eta_nlos_db,
            label: EnvironmentLabel::Custom,
        };
        env.validate()?;
        Ok(env)
    }

    /// Looks up a preset by its kebab-case name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "suburban" => Ok(Self::suburban()),
            "urban" => Ok(Self::urban()),
            "dense-urban" | "dense_urban" => Ok(Self::dense_urban()),
            other => Err(Error::InvalidScenario(format!(
                "unknown environment preset '{other}' (expected suburban, urban, or dense-urban)"
            ))),
        }
    }

    /// True when the parameter values came from a named preset rather than
    /// the scenario author.
    pub fn is_preset(&self) -> bool {
        self.label != EnvironmentLabel::Custom
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0) || !(self.b > 0.0) {
            return Err(Error::Domain(format!(
                "environment sigmoid parameters must be positive, got a={}, b={}",
                self.a, self.b
            )));
        }
        if !(self.eta_los_db >= 0.0) || !(self.eta_nlos_db >= self.eta_los_db) {
            return Err(Error::Domain(format!(
                "excess losses must satisfy 0 <= eta_los <= eta_nlos, got {} and {}",
                self.eta_los_db, self.eta_nlos_db
            )));
        }
        Ok(())
    }
}

/// Per-service traffic and radio parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceParams {
    /// Control packet arrival rate per user, packets per second.
    pub lambda_per_s: f64,
    /// Mean control packet length, bits.
    pub packet_len_bits: f64,
    /// Maximum allowed control-message latency, seconds.
    pub t_req_s: f64,
    /// Minimum rate of each non-real-time RF channel, bps.
    pub r_n_bps: f64,
    /// Number of non-real-time RF channels.
    pub k_n: usize,
    /// Average calls per user per hour.
    pub call_rate_per_hour: f64,
    /// Average call duration, minutes.
    pub call_duration_min: f64,
    /// Traffic accounting window, minutes.
    pub unit_time_min: f64,
    /// Grade-of-service target: maximum call blocking probability.
    pub max_block_prob: f64,
    /// Burst rate of a real-time subframe channel, bps.
    pub burst_rate_bps: f64,
    /// AWGN noise spectral density, W/Hz.
    pub n0_w_per_hz: f64,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Total system bandwidth budget, Hz.
    pub total_bandwidth_hz: f64,
    /// Scales the per-user control duty by the user count, reproducing a
    /// published total-energy expression whose control term carries an
    /// extra factor n. Off by default.
    #[serde(default)]
    pub control_energy_extra_n: bool,
}

impl ServiceParams {
    /// Reference workload: 10 control packets/s of 200 bits at 1 ms latency,
    /// 1 Mbps non-real-time floors, 10 calls/hr of 2 min at 2% blocking,
    /// 270.8 kbps bursts, N0 = 1e-16 W/Hz, 1 GHz carrier.
    pub fn reference(k_n: usize) -> Self {
        ServiceParams {
            lambda_per_s: 10.0,
            packet_len_bits: 200.0,
            t_req_s: 1.0e-3,
            r_n_bps: 1.0e6,
            k_n,
            call_rate_per_hour: 10.0,
            call_duration_min: 2.0,
            unit_time_min: 60.0,
            max_block_prob: 0.02,
            burst_rate_bps: 270_800.0,
            n0_w_per_hz: 1.0e-16,
            carrier_hz: 1.0e9,
            total_bandwidth_hz: DEFAULT_TOTAL_BANDWIDTH_HZ,
            control_energy_extra_n: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positives = [
            ("lambda_per_s", self.lambda_per_s),
            ("packet_len_bits", self.packet_len_bits),
            ("t_req_s", self.t_req_s),
            ("r_n_bps", self.r_n_bps),
            ("call_rate_per_hour", self.call_rate_per_hour),
            ("call_duration_min", self.call_duration_min),
            ("unit_time_min", self.unit_time_min),
            ("burst_rate_bps", self.burst_rate_bps),
            ("n0_w_per_hz", self.n0_w_per_hz),
            ("carrier_hz", self.carrier_hz),
            ("total_bandwidth_hz", self.total_bandwidth_hz),
        ];
        for (name, value) in positives {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "service parameter {name} must be positive, got {value}"
                )));
            }
        }
        if !(self.max_block_prob > 0.0 && self.max_block_prob < 1.0) {
            return Err(Error::InvalidScenario(format!(
                "max_block_prob must lie in (0, 1), got {}",
                self.max_block_prob
            )));
        }
        if self.k_n == 0 {
            return Err(Error::InvalidScenario("k_n must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// Default non-real-time channel count for `n` users: one channel per 20
/// users, rounded up to an even count, never below 2, never above `n`.
/// Even so the same grouping works for one- and two-UAV deployments.
pub fn default_k_n(n_users: usize) -> usize {
    if n_users == 0 {
        return 2;
    }
    let k = n_users.div_ceil(20).max(2);
    let k = k + (k % 2);
    k.min(n_users)
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub region: Region,
    pub users: Vec<User>,
    pub uavs: Vec<UavPlacement>,
    pub env: Environment,
    pub service: ServiceParams,
    pub propulsion: RotorCraft,
    pub min_separation_m: f64,
    pub rng_seed: u64,
}

impl Scenario {
    /// Builds a seeded instance with generated users and default placements.
    pub fn generated(
        region: Region,
        n_users: usize,
        uav_count: usize,
        altitude_m: f64,
        env: Environment,
        seed: u64,
    ) -> Result<Self> {
        let users = if n_users == 0 {
            Vec::new()
        } else {
            generate_users(region, n_users, seed)?
        };
        let uavs = place_uavs(region, uav_count, altitude_m)?;
        let scenario = Scenario {
            region,
            users,
            uavs,
            env,
            service: ServiceParams::reference(default_k_n(n_users)),
            propulsion: RotorCraft::default(),
            min_separation_m: DEFAULT_MIN_SEPARATION_M,
            rng_seed: seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn uav_count(&self) -> usize {
        self.uavs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.uavs.is_empty() || self.uavs.len() > 2 {
            return Err(Error::UnsupportedUavCount(self.uavs.len()));
        }
        for uav in &self.uavs {
            if !(uav.altitude_m > 0.0) || !uav.altitude_m.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "UAV altitude must be positive, got {}",
                    uav.altitude_m
                )));
            }
        }
        if self.uavs.len() == 2 {
            let dist = self.uavs[0].distance_to(&self.uavs[1]);
            if dist < self.min_separation_m {
                return Err(Error::UavSeparation {
                    required_m: self.min_separation_m,
                    actual_m: dist,
                });
            }
        }
        let mut ids: Vec<usize> = self.users.iter().map(|u| u.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.users.len() {
            return Err(Error::InvalidScenario(
                "duplicate user ids in scenario".to_string(),
            ));
        }
        for user in &self.users {
            if !self.region.contains(user.x_m, user.y_m) {
                return Err(Error::InvalidScenario(format!(
                    "user {} at ({}, {}) lies outside the region",
                    user.id, user.x_m, user.y_m
                )));
            }
        }
        self.env.validate()?;
        self.service.validate()?;
        self.propulsion.validate()?;
        Ok(())
    }
}

/// Draws `n` users uniformly over the region. Deterministic for a fixed seed.
pub fn generate_users(region: Region, n: usize, seed: u64) -> Result<Vec<User>> {
    if n == 0 {
        return Err(Error::EmptyScenario);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = region.side_length_m;
    Ok((0..n)
        .map(|id| User {
            id,
            x_m: rng.random::<f64>() * side,
            y_m: rng.random::<f64>() * side,
        })
        .collect())
}

/// Places UAVs at coverage centers: one UAV at the region center, two UAVs
/// at the centers of the left and right half-squares.
pub fn place_uavs(region: Region, count: usize, altitude_m: f64) -> Result<Vec<UavPlacement>> {
    if !(altitude_m > 0.0) || !altitude_m.is_finite() {
        return Err(Error::Domain(format!(
            "altitude must be positive, got {altitude_m}"
        )));
    }
    let r = region.side_length_m;
    match count {
        1 => Ok(vec![UavPlacement {
            x_m: r / 2.0,
            y_m: r / 2.0,
            altitude_m,
        }]),
        2 => Ok(vec![
            UavPlacement {
                x_m: r / 4.0,
                y_m: r / 2.0,
                altitude_m,
            },
            UavPlacement {
                x_m: 3.0 * r / 4.0,
                y_m: r / 2.0,
                altitude_m,
            },
        ]),
        other => Err(Error::UnsupportedUavCount(other)),
    }
}

/// On-disk scenario document. Every section except `region` and `uavs` is
/// optional and falls back to reference defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioFile {
    #[serde(default)]
    pub region: Option<Region>,
    /// Explicit user list; generated from `n_users` and `seed` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub users: Option<Vec<User>>,
    /// User count for generated placement; ignored when `users` is present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_users: Option<usize>,
    pub uavs: UavSpec,
    #[serde(default)]
    pub environment: Option<EnvironmentSpec>,
    #[serde(default)]
    pub service: Option<ServiceConfig>,
    #[serde(default)]
    pub propulsion: Option<RotorCraftConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_separation_m: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// UAV section: either explicit placements or a bare count placed at
/// coverage centers with the default altitude.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UavSpec {
    Count(usize),
    Placements(Vec<UavPlacement>),
}

/// Environment section: a preset name or explicit parameters. An object
/// may name a preset and override individual fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentSpec {
    Preset(String),
    Config(EnvironmentConfig),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EnvironmentConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default)]
    pub eta_los_db: Option<f64>,
    #[serde(default)]
    pub eta_nlos_db: Option<f64>,
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<Environment> {
        match self {
            EnvironmentSpec::Preset(name) => Environment::preset(name),
            EnvironmentSpec::Config(cfg) => {
                let mut env = match &cfg.preset {
                    Some(name) => Environment::preset(name)?,
                    None => {
                        let missing = [
                            ("a", cfg.a),
                            ("b", cfg.b),
                            ("eta_los_db", cfg.eta_los_db),
                            ("eta_nlos_db", cfg.eta_nlos_db),
                        ]
                        .iter()
                        .filter(|(_, v)| v.is_none())
                        .map(|(n, _)| *n)
                        .collect::<Vec<_>>();
                        if !missing.is_empty() {
                            return Err(Error::InvalidScenario(format!(
                                "environment without a preset must set {}",
                                missing.join(", ")
                            )));
                        }
                        Environment::custom(
                            cfg.a.unwrap(),
                            cfg.b.unwrap(),
                            cfg.eta_los_db.unwrap(),
                            cfg.eta_nlos_db.unwrap(),
                        )?
                    }
                };
                let mut touched = false;
                if let Some(a) = cfg.a {
                    env.a = a;
                    touched = cfg.preset.is_some();
                }
                if let Some(b) = cfg.b {
                    env.b = b;
                    touched |= cfg.preset.is_some();
                }
                if let Some(eta) = cfg.eta_los_db {
                    env.eta_los_db = eta;
                    touched |= cfg.preset.is_some();
                }
                if let Some(eta) = cfg.eta_nlos_db {
                    env.eta_nlos_db = eta;
                    touched |= cfg.preset.is_some();
                }
                if touched {
                    env.label = EnvironmentLabel::Custom;
                }
                env.validate()?;
                Ok(env)
            }
        }
    }
}

/// Service section with every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    #[serde(default)]
    pub lambda_per_s: Option<f64>,
    #[serde(default)]
    pub packet_len_bits: Option<f64>,
    #[serde(default)]
    pub t_req_s: Option<f64>,
    #[serde(default)]
    pub r_n_bps: Option<f64>,
    #[serde(default)]
    pub k_n: Option<usize>,
    #[serde(default)]
    pub call_rate_per_hour: Option<f64>,
    #[serde(default)]
    pub call_duration_min: Option<f64>,
    #[serde(default)]
    pub unit_time_min: Option<f64>,
    #[serde(default)]
    pub max_block_prob: Option<f64>,
    #[serde(default)]
    pub burst_rate_bps: Option<f64>,
    #[serde(default)]
    pub n0_w_per_hz: Option<f64>,
    #[serde(default)]
    pub carrier_hz: Option<f64>,
    #[serde(default)]
    pub total_bandwidth_hz: Option<f64>,
    #[serde(default)]
    pub control_energy_extra_n: Option<bool>,
}

impl ServiceConfig {
    pub fn build(&self, n_users: usize) -> Result<ServiceParams> {
        let defaults = ServiceParams::reference(self.k_n.unwrap_or_else(|| default_k_n(n_users)));
        let params = ServiceParams {
            lambda_per_s: self.lambda_per_s.unwrap_or(defaults.lambda_per_s),
            packet_len_bits: self.packet_len_bits.unwrap_or(defaults.packet_len_bits),
            t_req_s: self.t_req_s.unwrap_or(defaults.t_req_s),
            r_n_bps: self.r_n_bps.unwrap_or(defaults.r_n_bps),
            k_n: defaults.k_n,
            call_rate_per_hour: self
                .call_rate_per_hour
                .unwrap_or(defaults.call_rate_per_hour),
            call_duration_min: self.call_duration_min.unwrap_or(defaults.call_duration_min),
            unit_time_min: self.unit_time_min.unwrap_or(defaults.unit_time_min),
            max_block_prob: self.max_block_prob.unwrap_or(defaults.max_block_prob),
            burst_rate_bps: self.burst_rate_bps.unwrap_or(defaults.burst_rate_bps),
            n0_w_per_hz: self.n0_w_per_hz.unwrap_or(defaults.n0_w_per_hz),
            carrier_hz: self.carrier_hz.unwrap_or(defaults.carrier_hz),
            total_bandwidth_hz: self
                .total_bandwidth_hz
                .unwrap_or(defaults.total_bandwidth_hz),
            control_energy_extra_n: self.control_energy_extra_n.unwrap_or(false),
        };
        params.validate()?;
        Ok(params)
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Resolves the document into a validated [`Scenario`].
    pub fn resolve(&self) -> Result<Scenario> {
        let region = self.region.unwrap_or_default();
        let seed = self.seed.unwrap_or(0);
        let users = match (&self.users, self.n_users) {
            (Some(users), _) => users.clone(),
            (None, Some(0)) => Vec::new(),
            (None, Some(n)) => generate_users(region, n, seed)?,
            (None, None) => {
                return Err(Error::InvalidScenario(
                    "scenario needs either a users list or n_users".to_string(),
                ))
            }
        };
        let uavs = match &self.uavs {
            UavSpec::Count(count) => place_uavs(region, *count, DEFAULT_ALTITUDE_M)?,
            UavSpec::Placements(list) => list.clone(),
        };
        let env = match &self.environment {
            Some(spec) => spec.build()?,
            None => Environment::urban(),
        };
        let service = self
            .service
            .clone()
            .unwrap_or_default()
            .build(users.len())?;
        let propulsion = self.propulsion.clone().unwrap_or_default().build()?;
        let scenario = Scenario {
            region,
            users,
            uavs,
            env,
            service,
            propulsion,
            min_separation_m: self.min_separation_m.unwrap_or(DEFAULT_MIN_SEPARATION_M),
            rng_seed: seed,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
