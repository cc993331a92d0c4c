//! Seeded Monte Carlo sweeps comparing optimized against baseline energy
//! and single- against double-UAV deployments, with CSV/JSON emission.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimizer::{solve_double_uav, solve_single_uav, SolveOutcome};
use crate::propulsion::RotorCraftConfig;
use crate::scenario::{
    place_uavs, Environment, Region, Scenario, ServiceConfig, DEFAULT_ALTITUDE_M,
};

/// Quantity swept across rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "altitude")]
    Altitude,
    #[serde(rename = "n_users")]
    NUsers,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Altitude => "altitude",
            SweepVariable::NUsers => "n_users",
        }
    }
}

/// Scenario fields a sweep may pin besides the swept variable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOverrides {
    #[serde(default)]
    pub region: Option<Region>,
    /// User count for altitude sweeps.
    #[serde(default)]
    pub n_users: Option<usize>,
    /// UAV altitude for user-count sweeps.
    #[serde(default)]
    pub altitude_m: Option<f64>,
    #[serde(default)]
    pub service: Option<ServiceConfig>,
    #[serde(default)]
    pub propulsion: Option<RotorCraftConfig>,
    #[serde(default)]
    pub min_separation_m: Option<f64>,
}

/// A sweep: one variable, a value list, an environment preset, and seeded
/// replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Environment preset name: suburban, urban, or dense-urban.
    pub environment: String,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub base_scenario: Option<ScenarioOverrides>,
}

fn default_replications() -> usize {
    1
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidScenario(
                "sweep needs at least one value".to_string(),
            ));
        }
        if self.replications == 0 {
            return Err(Error::InvalidScenario(
                "sweep needs at least one replication".to_string(),
            ));
        }
        Environment::preset(&self.environment)?;
        for &value in &self.values {
            match self.variable {
                SweepVariable::Altitude => {
                    if !(value > 0.0) || !value.is_finite() {
                        return Err(Error::InvalidScenario(format!(
                            "altitude values must be positive, got {value}"
                        )));
                    }
                }
                SweepVariable::NUsers => {
                    if !(value >= 0.0) || value.fract() != 0.0 || !value.is_finite() {
                        return Err(Error::InvalidScenario(format!(
                            "user counts must be nonnegative integers, got {value}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Aggregated statistics of one swept value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    /// Single-UAV save rate versus the conventional baseline.
    pub save_rate_mean: f64,
    pub save_rate_std: f64,
    pub e_single_mean: f64,
    pub e_double_mean: f64,
    /// True when two UAVs beat one on mean total energy at this value.
    pub crossover: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub rows: Vec<SweepRow>,
}

/// Paired one- and two-UAV solves of the same users.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UavComparison {
    pub single: SolveOutcome,
    pub double: SolveOutcome,
    pub double_better: bool,
}

/// Solves the scenario's users under one and under two UAVs at the same
/// altitude and reports which deployment spends less total energy.
pub fn compare_uavs(scenario: &Scenario) -> Result<UavComparison> {
    scenario.validate()?;
    let altitude = scenario.uavs[0].altitude_m;
    let mut single_scenario = scenario.clone();
    single_scenario.uavs = place_uavs(scenario.region, 1, altitude)?;
    let mut double_scenario = scenario.clone();
    double_scenario.uavs = place_uavs(scenario.region, 2, altitude)?;
    let single = solve_single_uav(&single_scenario)?;
    let double = solve_double_uav(&double_scenario)?;
    let double_better = double.report.e_total < single.report.e_total;
    Ok(UavComparison {
        single,
        double,
        double_better,
    })
}

fn scenario_for(spec: &SweepSpec, value: f64, rep_seed: u64) -> Result<Scenario> {
    let overrides = spec.base_scenario.clone().unwrap_or_default();
    let region = overrides.region.unwrap_or_default();
    let (n_users, altitude) = match spec.variable {
        SweepVariable::Altitude => (overrides.n_users.unwrap_or(200), value),
        SweepVariable::NUsers => (
            value as usize,
            overrides.altitude_m.unwrap_or(DEFAULT_ALTITUDE_M),
        ),
    };
    let env = Environment::preset(&spec.environment)?;
    let mut scenario = Scenario::generated(region, n_users, 1, altitude, env, rep_seed)?;
    if let Some(service) = &overrides.service {
        scenario.service = service.build(n_users)?;
    }
    if let Some(propulsion) = &overrides.propulsion {
        scenario.propulsion = propulsion.build()?;
    }
    if let Some(sep) = overrides.min_separation_m {
        scenario.min_separation_m = sep;
    }
    scenario.validate()?;
    Ok(scenario)
}

/// Rounds to 9 significant digits; emitted numbers carry exactly the
/// precision they print with, so serialized results reload identically.
fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}")
        .parse()
        .expect("formatted float reparses")
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every (value, replication) pair: fresh users per replication seed,
/// one- and two-UAV solves of the same users, aggregated per value.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(spec.values.len());
    for &value in &spec.values {
        let mut save_rates = Vec::with_capacity(spec.replications);
        let mut singles = Vec::with_capacity(spec.replications);
        let mut doubles = Vec::with_capacity(spec.replications);
        for rep in 0..spec.replications {
            let rep_seed = spec.seed.wrapping_add(rep as u64);
            let mut run = || -> Result<()> {
                let scenario = scenario_for(spec, value, rep_seed)?;
                let comparison = compare_uavs(&scenario)?;
                save_rates.push(comparison.single.report.save_rate);
                singles.push(comparison.single.report.e_total);
                doubles.push(comparison.double.report.e_total);
                Ok(())
            };
            run().map_err(|source| Error::SweepPoint {
                value,
                replication: rep,
                source: Box::new(source),
            })?;
        }
        let (save_mean, save_std) = mean_std(&save_rates);
        let (e_single_mean, _) = mean_std(&singles);
        let (e_double_mean, _) = mean_std(&doubles);
        rows.push(SweepRow {
            value: round_sig9(value),
            save_rate_mean: round_sig9(save_mean),
            save_rate_std: round_sig9(save_std),
            e_single_mean: round_sig9(e_single_mean),
            e_double_mean: round_sig9(e_double_mean),
            crossover: e_double_mean < e_single_mean,
        });
    }
    Ok(SweepResult {
        variable: spec.variable,
        rows,
    })
}

/// Smallest swept user count where two UAVs beat one on mean total energy.
pub fn find_crossover(result: &SweepResult) -> Result<Option<f64>> {
    if result.variable != SweepVariable::NUsers {
        return Err(Error::InvalidProblem(
            "crossover search needs an n_users sweep".to_string(),
        ));
    }
    let mut best: Option<f64> = None;
    for row in &result.rows {
        if row.crossover && best.is_none_or(|b| row.value < b) {
            best = Some(row.value);
        }
    }
    Ok(best)
}

pub const CSV_HEADER: &str =
    "variable,value,save_rate_mean,save_rate_std,e_single_mean,e_double_mean,crossover";

fn fmt_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Renders the result as CSV with 9-significant-digit numbers.
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            result.variable.name(),
            fmt_sig9(row.value),
            fmt_sig9(row.save_rate_mean),
            fmt_sig9(row.save_rate_std),
            fmt_sig9(row.e_single_mean),
            fmt_sig9(row.e_double_mean),
            row.crossover,
        ));
    }
    out
}

pub fn to_json(result: &SweepResult) -> String {
    serde_json::to_string_pretty(result).expect("sweep result serializes")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

/// Writes the result to `path` in the chosen format.
pub fn emit_results(result: &SweepResult, format: EmitFormat, path: &Path) -> Result<()> {
    let text = match format {
        EmitFormat::Csv => to_csv(result),
        EmitFormat::Json => to_json(result),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> SweepSpec {
        SweepSpec {
            variable: SweepVariable::NUsers,
            values: vec![20.0, 40.0],
            environment: "urban".to_string(),
            replications: 2,
            seed: 11,
            base_scenario: None,
        }
    }

    #[test]
    fn sweep_is_deterministic_and_well_formed() {
        let spec = small_spec();
        let a = run_sweep(&spec).unwrap();
        let b = run_sweep(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(to_csv(&a), to_csv(&b));
        assert_eq!(a.rows.len(), 2);
        for row in &a.rows {
            assert!(row.save_rate_mean >= 0.0 && row.save_rate_mean < 1.0);
            assert!(row.save_rate_std >= 0.0);
            assert!(row.e_single_mean > 0.0);
            assert!(row.e_double_mean > 0.0);
            assert_eq!(row.crossover, row.e_double_mean < row.e_single_mean);
        }
    }

    #[test]
    fn csv_shape_and_9_digit_numbers() {
        let result = run_sweep(&small_spec()).unwrap();
        let csv = to_csv(&result);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), result.rows.len() + 1);
        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 7);
            assert_eq!(fields[0], "n_users");
            for field in &fields[1..6] {
                let mantissa = field.split('e').next().unwrap();
                let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
                assert_eq!(digits, 9, "field {field}");
            }
        }
    }

    #[test]
    fn json_round_trips_exactly() {
        let result = run_sweep(&small_spec()).unwrap();
        let text = to_json(&result);
        let back: SweepResult = serde_json::from_str(&text).unwrap();
        assert_eq!(result, back);
    }

    #[test]
    fn emit_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let result = run_sweep(&small_spec()).unwrap();
        let csv_path = dir.path().join("out.csv");
        let json_path = dir.path().join("out.json");
        emit_results(&result, EmitFormat::Csv, &csv_path).unwrap();
        emit_results(&result, EmitFormat::Json, &json_path).unwrap();
        assert_eq!(std::fs::read_to_string(&csv_path).unwrap(), to_csv(&result));
        let reparsed: SweepResult =
            serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(reparsed, result);
    }

    #[test]
    fn crossover_picks_smallest_flagged_value() {
        let rows = |flags: &[bool]| -> Vec<SweepRow> {
            flags
                .iter()
                .enumerate()
                .map(|(i, &c)| SweepRow {
                    value: 100.0 * (i + 1) as f64,
                    save_rate_mean: 0.1,
                    save_rate_std: 0.0,
                    e_single_mean: 100.0,
                    e_double_mean: if c { 90.0 } else { 110.0 },
                    crossover: c,
                })
                .collect()
        };
        let result = SweepResult {
            variable: SweepVariable::NUsers,
            rows: rows(&[false, true, false, true]),
        };
        assert_eq!(find_crossover(&result).unwrap(), Some(200.0));
        let none = SweepResult {
            variable: SweepVariable::NUsers,
            rows: rows(&[false, false]),
        };
        assert_eq!(find_crossover(&none).unwrap(), None);
        let wrong = SweepResult {
            variable: SweepVariable::Altitude,
            rows: vec![],
        };
        assert!(find_crossover(&wrong).is_err());
    }

    #[test]
    fn sweep_spec_validation() {
        let mut spec = small_spec();
        spec.values.clear();
        assert!(spec.validate().is_err());

        let mut spec = small_spec();
        spec.replications = 0;
        assert!(spec.validate().is_err());

        let mut spec = small_spec();
        spec.environment = "lunar".to_string();
        assert!(spec.validate().is_err());

        let mut spec = small_spec();
        spec.values = vec![10.5];
        assert!(spec.validate().is_err());

        let mut spec = small_spec();
        spec.variable = SweepVariable::Altitude;
        spec.values = vec![-10.0];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn sweep_errors_carry_the_offending_point() {
        let spec = SweepSpec {
            variable: SweepVariable::NUsers,
            values: vec![20.0],
            environment: "urban".to_string(),
            replications: 1,
            seed: 0,
            base_scenario: Some(ScenarioOverrides {
                service: Some(ServiceConfig {
                    k_n: Some(21),
                    ..Default::default()
                }),
                ..Default::default()
            }),
        };
        match run_sweep(&spec) {
            Err(Error::SweepPoint {
                value,
                replication,
                source,
            }) => {
                assert_eq!(value, 20.0);
                assert_eq!(replication, 0);
                assert!(matches!(*source, Error::TooManyGroups { .. }));
            }
            other => panic!("expected a sweep point error, got {other:?}"),
        }
    }

    #[test]
    fn spec_parses_from_json() {
        let text = r#"{
            "variable": "altitude",
            "values": [300, 500, 700],
            "environment": "dense-urban",
            "replications": 3,
            "seed": 42,
            "base_scenario": {"n_users": 50}
        }"#;
        let spec = SweepSpec::from_json(text).unwrap();
        assert_eq!(spec.variable, SweepVariable::Altitude);
        assert_eq!(spec.values.len(), 3);
        assert_eq!(spec.base_scenario.unwrap().n_users, Some(50));
    }

    #[test]
    fn compare_uavs_replaces_deployments() {
        let scenario =
            Scenario::generated(Region::default(), 30, 1, 400.0, Environment::urban(), 5).unwrap();
        let cmp = compare_uavs(&scenario).unwrap();
        assert_eq!(cmp.single.grouping.uav_of_user.len(), 30);
        assert_eq!(
            cmp.double.report.e_propulsion,
            2.0 * cmp.single.report.e_propulsion
        );
        assert_eq!(
            cmp.double_better,
            cmp.double.report.e_total < cmp.single.report.e_total
        );
    }

    #[test]
    fn altitude_sweep_reuses_users_across_values() {
        let spec = SweepSpec {
            variable: SweepVariable::Altitude,
            values: vec![300.0, 900.0],
            environment: "suburban".to_string(),
            replications: 1,
            seed: 7,
            base_scenario: Some(ScenarioOverrides {
                n_users: Some(30),
                ..Default::default()
            }),
        };
        let a = scenario_for(&spec, 300.0, 7).unwrap();
        let b = scenario_for(&spec, 900.0, 7).unwrap();
        assert_eq!(a.users, b.users);
        assert_ne!(a.uavs[0].altitude_m, b.uavs[0].altitude_m);
    }
}
