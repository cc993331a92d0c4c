//! Command-line front end: solve a scenario, sweep a variable, compare
//! one against two UAVs, or size Erlang-B channels.
//!
//! Exit codes: 0 on success, 2 on invalid or infeasible input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use uavnet::{
    compare_uavs, emit_results, erlang_b, min_channels, place_uavs, run_sweep, solve_double_uav,
    solve_single_uav, AllocationPlan, EmitFormat, EnergyReport, Environment, Scenario,
    ScenarioFile, ServiceDemands, SolveOutcome, SweepSpec, DEFAULT_ALTITUDE_M,
};

#[derive(Parser)]
#[command(
    name = "uavnet",
    version,
    about = "Energy-optimal bandwidth allocation for UAV base stations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and print the allocation and energy report.
    Solve(SolveArgs),
    /// Run a seeded sweep from a spec file and write a results table.
    Sweep(SweepArgs),
    /// Solve the same users under one and two UAVs and compare totals.
    CompareUavs(CompareArgs),
    /// Evaluate Erlang-B blocking or size a channel count.
    Erlang(ErlangArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Re-place the deployment with this many UAVs at coverage centers.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    uavs: Option<u8>,
    /// Emit a one-row CSV summary instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep spec JSON file.
    #[arg(long)]
    spec: PathBuf,
    /// Output path; a .json suffix selects JSON, anything else CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("query").required(true).multiple(false)
    .args(["channels", "gos"]))]
struct ErlangArgs {
    /// Offered traffic in Erlang.
    #[arg(long, allow_negative_numbers = true)]
    load: f64,
    /// Print the blocking probability of this many channels.
    #[arg(long)]
    channels: Option<usize>,
    /// Print the minimal channel count meeting this blocking target.
    #[arg(long)]
    gos: Option<f64>,
}

#[derive(Serialize)]
struct EnvironmentMeta {
    label: String,
    a: f64,
    b: f64,
    eta_los_db: f64,
    eta_nlos_db: f64,
    /// "builtin-preset" parameters are representative literature values,
    /// not measurements of a specific deployment.
    source: &'static str,
}

#[derive(Serialize)]
struct SolveMeta {
    n_users: usize,
    uavs: usize,
    altitude_m: f64,
    environment: EnvironmentMeta,
    k_n: usize,
    total_bandwidth_hz: f64,
    seed: u64,
}

#[derive(Serialize)]
struct SolveOutput {
    meta: SolveMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    demands: Option<ServiceDemands>,
    plan: AllocationPlan,
    report: EnergyReport,
}

fn environment_meta(env: &Environment) -> EnvironmentMeta {
    EnvironmentMeta {
        label: env.label.to_string(),
        a: env.a,
        b: env.b,
        eta_los_db: env.eta_los_db,
        eta_nlos_db: env.eta_nlos_db,
        source: if env.is_preset() {
            "builtin-preset"
        } else {
            "custom"
        },
    }
}

fn solve_meta(scenario: &Scenario) -> SolveMeta {
    SolveMeta {
        n_users: scenario.n_users(),
        uavs: scenario.uav_count(),
        altitude_m: scenario.uavs[0].altitude_m,
        environment: environment_meta(&scenario.env),
        k_n: scenario.service.k_n,
        total_bandwidth_hz: scenario.service.total_bandwidth_hz,
        seed: scenario.rng_seed,
    }
}

fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn solve_csv_row(scenario: &Scenario, outcome: &SolveOutcome) -> String {
    let r = &outcome.report;
    let header = "uavs,n_users,environment,altitude_m,k_n,e_control,e_nonrealtime,e_realtime,\
                  e_propulsion,e_total,baseline_total,save_rate";
    let row = format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        scenario.uav_count(),
        scenario.n_users(),
        scenario.env.label,
        sig9(scenario.uavs[0].altitude_m),
        scenario.service.k_n,
        sig9(r.e_control),
        sig9(r.e_nonrealtime),
        sig9(r.e_realtime),
        sig9(r.e_propulsion),
        sig9(r.e_total),
        sig9(r.baseline_total),
        sig9(r.save_rate),
    );
    format!("{header}\n{row}\n")
}

fn cmd_solve(args: &SolveArgs) -> uavnet::Result<()> {
    let mut scenario = ScenarioFile::load(&args.scenario)?.resolve()?;
    if let Some(count) = args.uavs {
        let altitude = scenario
            .uavs
            .first()
            .map(|u| u.altitude_m)
            .unwrap_or(DEFAULT_ALTITUDE_M);
        scenario.uavs = place_uavs(scenario.region, count as usize, altitude)?;
        scenario.validate()?;
    }
    let outcome = match scenario.uav_count() {
        1 => solve_single_uav(&scenario)?,
        _ => solve_double_uav(&scenario)?,
    };
    if args.csv {
        print!("{}", solve_csv_row(&scenario, &outcome));
    } else {
        let output = SolveOutput {
            meta: solve_meta(&scenario),
            demands: outcome.demands,
            plan: outcome.plan,
            report: outcome.report,
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&output).expect("output serializes")
        );
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> uavnet::Result<()> {
    let spec = SweepSpec::load(&args.spec)?;
    let result = run_sweep(&spec)?;
    let format = match args.out.extension().and_then(|e| e.to_str()) {
        Some("json") => EmitFormat::Json,
        _ => EmitFormat::Csv,
    };
    emit_results(&result, format, &args.out)?;
    eprintln!("wrote {} rows to {}", result.rows.len(), args.out.display());
    Ok(())
}

#[derive(Serialize)]
struct CompareOutput {
    meta: SolveMeta,
    e_single_total: f64,
    e_double_total: f64,
    single_save_rate: f64,
    double_save_rate: f64,
    double_better: bool,
    single_report: EnergyReport,
    double_report: EnergyReport,
}

fn cmd_compare(args: &CompareArgs) -> uavnet::Result<()> {
    let scenario = ScenarioFile::load(&args.scenario)?.resolve()?;
    let comparison = compare_uavs(&scenario)?;
    let output = CompareOutput {
        meta: solve_meta(&scenario),
        e_single_total: comparison.single.report.e_total,
        e_double_total: comparison.double.report.e_total,
        single_save_rate: comparison.single.report.save_rate,
        double_save_rate: comparison.double.report.save_rate,
        double_better: comparison.double_better,
        single_report: comparison.single.report,
        double_report: comparison.double.report,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&output).expect("output serializes")
    );
    Ok(())
}

fn cmd_erlang(args: &ErlangArgs) -> uavnet::Result<()> {
    if let Some(channels) = args.channels {
        let b = erlang_b(args.load, channels)?;
        println!("{}", sig9(b));
    } else if let Some(gos) = args.gos {
        let n = min_channels(args.load, gos)?;
        println!("{n}");
    }
    Ok(())
}

fn run(cli: &Cli) -> uavnet::Result<()> {
    match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::CompareUavs(args) => cmd_compare(args),
        Command::Erlang(args) => cmd_erlang(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
