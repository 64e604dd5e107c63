//! Command-line surface for generating, auditing and sweeping binary
//! sequences under interval forecasting systems.
//!
//! Exit codes: 0 success / no evidence, 2 usage error, 3 randomness
//! rejected at the Ville threshold, 4 internal contract violation.

mod manifest;
mod sysspec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use imprand_core::audit::{
    audit, church_check, default_battery, sweep_constant_intervals, AuditConfig, ChurchCheck,
    SweepConfig,
};
use imprand_core::gen::{sample_path, RealityPolicy};
use imprand_core::report::{sweep_csv, trajectories_csv};
use imprand_core::strategy::{HellingerHalf, HellingerNearHalf};
use imprand_core::tree::{capital_from_multiplier, ville_threshold_verdict, VilleVerdict};
use imprand_core::{
    finite_horizon_lower_expectation, finite_horizon_upper_expectation, format_bits, parse_bits,
    FiniteGamble, ForecastingSystem, IntervalForecast, Outcome, SelectionProcess, Verdict,
};

use manifest::{to_json, RunManifest};
use sysspec::SystemArgs;

#[derive(Parser)]
#[command(
    name = "imprand",
    version,
    about = "Martingale-theoretic randomness auditing under interval forecasts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a bit sequence with Reality playing inside a forecasting system.
    Generate(GenerateArgs),
    /// Audit a bit file against a forecasting system with the default battery.
    Audit(AuditArgs),
    /// Sweep all stationary interval forecasts on a grid and estimate the
    /// surviving filter.
    Sweep(SweepArgs),
    /// Finite-horizon lower/upper expectation of a tabulated gamble.
    Expect(ExpectArgs),
    /// Selected relative frequencies checked against an interval.
    Frequency(FrequencyArgs),
    /// Run the near-half showcase: the Hellinger pair on a near-half path.
    DemoNearHalf(DemoArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Reality policy: midpoint | lower | upper | uniform | alternating.
    #[arg(long, default_value = "midpoint")]
    policy: String,
    #[arg(long)]
    seed: u64,
    /// Number of outcomes to sample.
    #[arg(long)]
    n: usize,
    /// Output bit file (ASCII '0'/'1').
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Input bit file.
    #[arg(long)]
    bits: PathBuf,
    /// Steps to audit; defaults to the whole file.
    #[arg(long)]
    horizon: Option<usize>,
    /// Ville threshold K; rejection is at level 1/K.
    #[arg(long, default_value_t = 100.0)]
    threshold: f64,
    /// Directory for audit.json and trajectories.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// Disable the rayon fan-out.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Input bit file.
    #[arg(long)]
    bits: PathBuf,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = 100.0)]
    threshold: f64,
    /// Grid step in [0.01, 0.25].
    #[arg(long, default_value_t = 0.05)]
    grid_step: f64,
    /// Directory for sweep.json and sweep.csv.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct ExpectArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// JSON gamble file: {"depth": n, "values": [...]} with 2^n values,
    /// indexed by the leaf bits read as a binary number (x1 most
    /// significant).
    #[arg(long)]
    gamble: PathBuf,
    /// Which bound to report: lower | upper | both.
    #[arg(long, default_value = "both")]
    bound: String,
    /// Write the JSON report here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FrequencyArgs {
    /// Input bit file.
    #[arg(long)]
    bits: PathBuf,
    #[arg(long)]
    horizon: Option<usize>,
    /// Selection presets (repeatable): all | even | odd | every-k | after-ones.
    #[arg(long = "selection", value_name = "NAME")]
    selections: Vec<String>,
    /// Modulus for the every-k selection.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Interval lower bound to check against.
    #[arg(long)]
    lower: f64,
    /// Interval upper bound to check against.
    #[arg(long)]
    upper: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 100.0)]
    threshold: f64,
    /// Directory for demo.json and trajectories.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

/// Errors that should exit 4 rather than 2.
#[derive(Debug)]
struct InternalError(anyhow::Error);

impl std::fmt::Display for InternalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for InternalError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(error) => match error.downcast::<InternalError>() {
            Ok(internal) => {
                eprintln!("internal error: {:#}", internal.0);
                ExitCode::from(4)
            }
            Err(error) => {
                eprintln!("error: {error:#}");
                ExitCode::from(2)
            }
        },
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Expect(args) => cmd_expect(args),
        Command::Frequency(args) => cmd_frequency(args),
        Command::DemoNearHalf(args) => cmd_demo_near_half(args),
    }
}

fn read_bits(path: &Path, horizon: Option<usize>) -> anyhow::Result<(Vec<Outcome>, usize, String)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading bit file {}", path.display()))?;
    let bits = parse_bits(&text)?;
    let horizon = horizon.unwrap_or(bits.len());
    if horizon > bits.len() {
        bail!(
            "horizon {} exceeds the {} bits in {}",
            horizon,
            bits.len(),
            path.display()
        );
    }
    Ok((bits, horizon, text))
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_generate(args: GenerateArgs) -> anyhow::Result<u8> {
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    let policy: RealityPolicy = args.policy.parse().map_err(|e: String| anyhow!(e))?;
    let manifest = RunManifest::new("generate")
        .param("policy", policy)
        .param("n", args.n)
        .param("output", args.output.display())
        .seed(args.seed);
    let (system, manifest) = args.system.resolve(manifest)?;
    let path = sample_path(&system, policy, args.seed, args.n);
    write_file(&args.output, &format_bits(&path))?;
    print!("{}", to_json(manifest, serde_json::json!({ "bits_written": args.n }))?);
    Ok(0)
}

fn cmd_audit(args: AuditArgs) -> anyhow::Result<u8> {
    let (bits, horizon, text) = read_bits(&args.bits, args.horizon)?;
    let manifest = RunManifest::new("audit")
        .param("bits", args.bits.display())
        .param("horizon", horizon)
        .param("threshold", args.threshold)
        .param("sequential", args.sequential)
        .input(&args.bits, text.as_bytes());
    let (system, manifest) = args.system.resolve(manifest)?;

    let battery = default_battery(&system);
    let mut config = AuditConfig::new(horizon, args.threshold);
    config.parallel = !args.sequential;
    let report = audit(&bits, &system, &battery, &config)?;

    let mut trajectories = Vec::with_capacity(battery.len());
    for entry in &battery {
        if let Ok(traj) = entry.log_trajectory(&bits, horizon) {
            trajectories.push((entry.name(), traj));
        }
    }
    write_file(
        &args.out_dir.join("trajectories.csv"),
        &trajectories_csv(&trajectories),
    )?;

    let overall = report.overall;
    let has_errors = report.has_errors();
    let json = to_json(manifest, &report)?;
    write_file(&args.out_dir.join("audit.json"), &json)?;
    print!("{json}");

    if has_errors {
        return Err(anyhow::Error::new(InternalError(anyhow!(
            "one or more battery strategies violated their contract; see audit.json"
        ))));
    }
    Ok(match overall {
        Verdict::Reject => 3,
        Verdict::NoEvidence => 0,
    })
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<u8> {
    let (bits, horizon, text) = read_bits(&args.bits, args.horizon)?;
    let manifest = RunManifest::new("sweep")
        .param("bits", args.bits.display())
        .param("horizon", horizon)
        .param("threshold", args.threshold)
        .param("grid-step", args.grid_step)
        .param("sequential", args.sequential)
        .input(&args.bits, text.as_bytes());

    let mut config = SweepConfig::new(horizon, args.grid_step);
    config.threshold = args.threshold;
    config.parallel = !args.sequential;
    let report = sweep_constant_intervals(&bits, &config)?;

    write_file(&args.out_dir.join("sweep.csv"), &sweep_csv(&report))?;
    let json = to_json(manifest, &report)?;
    write_file(&args.out_dir.join("sweep.json"), &json)?;
    print!("{json}");
    Ok(0)
}

#[derive(Deserialize)]
struct GambleFile {
    depth: usize,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct ExpectReport {
    depth: usize,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn cmd_expect(args: ExpectArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.gamble)
        .with_context(|| format!("reading gamble file {}", args.gamble.display()))?;
    let parsed: GambleFile = serde_json::from_str(&text).context("parsing gamble file")?;
    let gamble = FiniteGamble::from_values(parsed.depth, parsed.values)?;

    let manifest = RunManifest::new("expect")
        .param("gamble", args.gamble.display())
        .param("bound", &args.bound)
        .input(&args.gamble, text.as_bytes());
    let (system, manifest) = args.system.resolve(manifest)?;

    let (lower, upper) = match args.bound.as_str() {
        "lower" => (
            Some(finite_horizon_lower_expectation(&system, &gamble)?),
            None,
        ),
        "upper" => (
            None,
            Some(finite_horizon_upper_expectation(&system, &gamble)?),
        ),
        "both" => (
            Some(finite_horizon_lower_expectation(&system, &gamble)?),
            Some(finite_horizon_upper_expectation(&system, &gamble)?),
        ),
        other => bail!("unknown bound '{other}' (expected lower|upper|both)"),
    };
    let json = to_json(
        manifest,
        ExpectReport {
            depth: gamble.depth(),
            lower,
            upper,
        },
    )?;
    if let Some(path) = &args.output {
        write_file(path, &json)?;
    }
    print!("{json}");
    Ok(0)
}

fn parse_selection(name: &str, k: u32) -> anyhow::Result<SelectionProcess> {
    Ok(match name {
        "all" => SelectionProcess::All,
        "even" => SelectionProcess::EvenSteps,
        "odd" => SelectionProcess::OddSteps,
        "every-k" => SelectionProcess::every_k(k)
            .ok_or_else(|| anyhow!("--k must be at least 1 for every-k"))?,
        "after-ones" => SelectionProcess::AfterOnes,
        other => bail!("unknown selection '{other}' (expected all|even|odd|every-k|after-ones)"),
    })
}

#[derive(Serialize)]
struct FrequencyReport {
    horizon: usize,
    checks: Vec<NamedCheck>,
}

#[derive(Serialize)]
struct NamedCheck {
    selection: String,
    #[serde(flatten)]
    check: ChurchCheck,
}

fn cmd_frequency(args: FrequencyArgs) -> anyhow::Result<u8> {
    let (bits, horizon, text) = read_bits(&args.bits, args.horizon)?;
    let interval = IntervalForecast::new(args.lower, args.upper)?;
    let names = if args.selections.is_empty() {
        vec!["all".to_string(), "even".to_string(), "odd".to_string()]
    } else {
        args.selections.clone()
    };
    let manifest = RunManifest::new("frequency")
        .param("bits", args.bits.display())
        .param("horizon", horizon)
        .param("lower", args.lower)
        .param("upper", args.upper)
        .param("selections", names.join(","))
        .input(&args.bits, text.as_bytes());

    let mut checks = Vec::new();
    for name in &names {
        let selection = parse_selection(name, args.k)?;
        checks.push(NamedCheck {
            selection: selection.to_string(),
            check: church_check(&bits[..horizon], &selection, interval),
        });
    }
    let json = to_json(manifest, FrequencyReport { horizon, checks })?;
    if let Some(path) = &args.output {
        write_file(path, &json)?;
    }
    print!("{json}");
    Ok(0)
}

#[derive(Serialize)]
struct DemoReport {
    horizon: usize,
    threshold: f64,
    /// The harmonic tail `sum_{k==1..n} 1/(k+1)`: the deterministic joint
    /// log capital of the Hellinger pair at the horizon.
    harmonic_sum: f64,
    /// Max deviation of the per-step joint log capital from that sum.
    identity_max_abs_error: f64,
    fair_coin: VilleVerdict,
    near_half: VilleVerdict,
    /// `harmonic_sum - ln K`: the fair-coin capital must reach this
    /// whenever the near-half capital stays below K.
    rejection_floor_log_capital: f64,
    floor_holds_when_near_half_bounded: bool,
}

fn cmd_demo_near_half(args: DemoArgs) -> anyhow::Result<u8> {
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    let manifest = RunManifest::new("demo-near-half")
        .param("n", args.n)
        .param("threshold", args.threshold)
        .seed(args.seed);

    let system = ForecastingSystem::near_half();
    let path = sample_path(&system, RealityPolicy::Midpoint, args.seed, args.n);
    let fair = capital_from_multiplier(&HellingerHalf, &path, args.n)?;
    let near = capital_from_multiplier(&HellingerNearHalf, &path, args.n)?;

    let mut harmonic = 0.0f64;
    let mut identity_max_abs_error = 0.0f64;
    for k in 1..=args.n {
        harmonic += 1.0 / (k as f64 + 1.0);
        let err = (fair.log_at(k) + near.log_at(k) - harmonic).abs();
        identity_max_abs_error = identity_max_abs_error.max(err);
    }

    let fair_verdict = ville_threshold_verdict(&fair, args.threshold)?;
    let near_verdict = ville_threshold_verdict(&near, args.threshold)?;
    let floor = harmonic - args.threshold.ln();
    let floor_holds = near_verdict.verdict == Verdict::Reject
        || fair_verdict.max_log_capital >= floor;

    write_file(
        &args.out_dir.join("trajectories.csv"),
        &trajectories_csv(&[
            ("hellinger-half".to_string(), fair),
            ("hellinger-near-half".to_string(), near),
        ]),
    )?;
    let json = to_json(
        manifest,
        DemoReport {
            horizon: args.n,
            threshold: args.threshold,
            harmonic_sum: harmonic,
            identity_max_abs_error,
            fair_coin: fair_verdict,
            near_half: near_verdict,
            rejection_floor_log_capital: floor,
            floor_holds_when_near_half_bounded: floor_holds,
        },
    )?;
    write_file(&args.out_dir.join("demo.json"), &json)?;
    print!("{json}");
    Ok(0)
}

