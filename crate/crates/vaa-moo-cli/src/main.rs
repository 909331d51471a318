//! Experiment orchestration for the vaa-moo toolkit: scenario generation,
//! seeded optimizer batches, strategy comparisons, and front exports.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for infeasible
//! scenario geometry. `VAA_MOO_THREADS` caps worker threads; seeds of a
//! batch run concurrently and results are independent of the thread count.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use vaa_moo::baselines::{run_mopso, run_mssa, run_random_laa, MopsoParams, MssaParams};
use vaa_moo::emssa::{run as run_emssa, EmssaParams};
use vaa_moo::prelude::*;
use vaa_moo::report;
use vaa_moo::runner::{RunError, RunResult};
use vaa_moo::scenario::ScenarioError;
use vaa_moo::strategies::StrategyError;

#[derive(Parser)]
#[command(name = "vaa-moo", version, about = "UAV-swarm beamforming mission planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PresetArg {
    #[value(name = "small-los")]
    SmallLos,
    #[value(name = "small-plos")]
    SmallPlos,
    #[value(name = "large-los")]
    LargeLos,
    #[value(name = "large-plos")]
    LargePlos,
    #[value(name = "desk")]
    Desk,
}

impl From<PresetArg> for ScenarioPreset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::SmallLos => ScenarioPreset::SmallLos,
            PresetArg::SmallPlos => ScenarioPreset::SmallPlos,
            PresetArg::LargeLos => ScenarioPreset::LargeLos,
            PresetArg::LargePlos => ScenarioPreset::LargePlos,
            PresetArg::Desk => ScenarioPreset::Desk,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgoArg {
    Emssa,
    Mssa,
    Mopso,
    #[value(name = "random-laa")]
    RandomLaa,
}

impl fmt::Display for AlgoArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            AlgoArg::Emssa => "emssa",
            AlgoArg::Mssa => "mssa",
            AlgoArg::Mopso => "mopso",
            AlgoArg::RandomLaa => "random-laa",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Multihop,
    Flybetween,
    Cb,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario file from a named preset.
    GenScenario {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Override the per-cluster data volume, megabits.
        #[arg(long)]
        data_mbits: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an optimizer (or the random reference) over a batch of seeds.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        /// Seed list: `7`, `1,5,9`, or the inclusive range `1..10`.
        #[arg(long, default_value = "1")]
        seed: String,
        #[arg(long, default_value_t = 30)]
        pop: usize,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 100)]
        archive_cap: usize,
        /// Angular step of the directivity quadrature, degrees.
        #[arg(long, default_value_t = 1.0)]
        quadrature_deg: f64,
        /// Override the per-cluster data volume, megabits.
        #[arg(long)]
        data_mbits: Option<f64>,
        /// Output directory for result files and summary.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Price the reference strategies and tabulate them against an optimized
    /// beamforming result.
    CompareStrategies {
        #[arg(long)]
        scenario: PathBuf,
        /// summary.csv of an `optimize` run providing the beamforming row.
        #[arg(long)]
        cb_summary: PathBuf,
        /// Rows to emit; defaults to all three.
        #[arg(long, value_enum, num_args = 1..)]
        strategy: Option<Vec<StrategyArg>>,
        #[arg(long, default_value_t = 10.0)]
        cruise_speed: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Merge the final fronts of result files into one long-format CSV.
    ExportFront {
        /// Result JSON files or directories containing them.
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Infeasible(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) | CliError::Infeasible(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::InfeasibleGeometry { .. } => CliError::Infeasible(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

fn main() -> ExitCode {
    vaa_moo::init_thread_cap_from_env();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::GenScenario { preset, seed, data_mbits, out } => {
            cmd_gen_scenario(preset, seed, data_mbits, &out)
        }
        Command::Optimize {
            scenario,
            algo,
            seed,
            pop,
            iters,
            archive_cap,
            quadrature_deg,
            data_mbits,
            out,
        } => cmd_optimize(&scenario, algo, &seed, pop, iters, archive_cap, quadrature_deg, data_mbits, &out),
        Command::CompareStrategies { scenario, cb_summary, strategy, cruise_speed, out } => {
            cmd_compare_strategies(&scenario, &cb_summary, strategy, cruise_speed, &out)
        }
        Command::ExportFront { runs, out } => cmd_export_front(&runs, &out),
    }
}

fn cmd_gen_scenario(
    preset: PresetArg,
    seed: u64,
    data_mbits: Option<f64>,
    out: &Path,
) -> Result<(), CliError> {
    let mut config = ScenarioPreset::from(preset).config();
    if let Some(mbits) = data_mbits {
        config.data_volume_bits = mbits * 1e6;
    }
    let scenario = generate_scenario(&config, seed)?;
    save_scenario(&scenario, out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>, CliError> {
    let bad = |s: &str| CliError::Config(format!("cannot parse seed spec `{s}`"));
    if let Some((a, b)) = spec.split_once("..") {
        let lo: u64 = a.trim().parse().map_err(|_| bad(spec))?;
        let hi: u64 = b.trim().parse().map_err(|_| bad(spec))?;
        if hi < lo {
            return Err(bad(spec));
        }
        return Ok((lo..=hi).collect());
    }
    spec.split(',')
        .map(|part| part.trim().parse().map_err(|_| bad(spec)))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    scenario_path: &Path,
    algo: AlgoArg,
    seed_spec: &str,
    pop: usize,
    iters: usize,
    archive_cap: usize,
    quadrature_deg: f64,
    data_mbits: Option<f64>,
    out: &Path,
) -> Result<(), CliError> {
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(mbits) = data_mbits {
        for cluster in &mut scenario.clusters {
            cluster.data_volume_bits = mbits * 1e6;
        }
    }
    let seeds = parse_seeds(seed_spec)?;
    if seeds.is_empty() {
        return Err(CliError::Config("seed list is empty".into()));
    }
    fs::create_dir_all(out)?;

    let run_config = |seed: u64| RunConfig {
        pop_size: pop,
        max_iters: iters,
        archive_capacity: archive_cap,
        rng_seed: seed,
        eval: EvalConfig { quadrature_step_deg: quadrature_deg, ..EvalConfig::default() },
        ..RunConfig::default()
    };

    let results: Vec<Result<RunResult, CliError>> = seeds
        .par_iter()
        .map(|&seed| -> Result<RunResult, CliError> {
            let result = match algo {
                AlgoArg::Emssa => run_emssa(
                    &scenario,
                    &EmssaParams { run: run_config(seed), ..EmssaParams::default() },
                )?,
                AlgoArg::Mssa => run_mssa(
                    &scenario,
                    &MssaParams { run: run_config(seed), ..MssaParams::default() },
                )?,
                AlgoArg::Mopso => run_mopso(
                    &scenario,
                    &MopsoParams { run: run_config(seed), ..MopsoParams::default() },
                )?,
                AlgoArg::RandomLaa => run_random_laa(&scenario, &run_config(seed))?,
            };
            Ok(result)
        })
        .collect();

    let mut rows = Vec::with_capacity(seeds.len());
    let mut total_wall = 0.0;
    for result in results {
        let result = result?;
        let stem = format!("{}-seed{}", result.algo, result.seed);
        fs::write(out.join(format!("{stem}.json")), result.to_json())?;
        fs::write(out.join(format!("{stem}-archive.csv")), report::archive_csv(&result))?;
        fs::write(out.join(format!("{stem}-solutions.json")), report::solutions_json(&result))?;
        total_wall += result.wall_clock_s;
        rows.push(report::SummaryRow::of(&result));
    }
    rows.sort_by_key(|r| r.seed);
    fs::write(out.join("summary.csv"), report::summary_csv(&rows))?;
    println!(
        "{algo}: {} seed(s), {:.1}s optimizer time, results in {}",
        seeds.len(),
        total_wall,
        out.display()
    );
    Ok(())
}

/// Reads the beamforming row from an optimize summary: the best-`f1` seed's
/// `f1` and its `f3`.
fn read_cb_row(summary_path: &Path) -> Result<(f64, f64), CliError> {
    let text = fs::read_to_string(summary_path).map_err(|_| {
        CliError::Config(format!(
            "missing beamforming result `{}`; run `vaa-moo optimize` first",
            summary_path.display()
        ))
    })?;
    let mut best: Option<(f64, f64)> = None;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 4 {
            continue;
        }
        let f1: f64 = fields[1].parse().map_err(|_| {
            CliError::Config(format!("bad summary line in {}: {line}", summary_path.display()))
        })?;
        let f3: f64 = fields[3].parse().map_err(|_| {
            CliError::Config(format!("bad summary line in {}: {line}", summary_path.display()))
        })?;
        if best.map_or(true, |(b, _)| f1 < b) {
            best = Some((f1, f3));
        }
    }
    best.ok_or_else(|| {
        CliError::Config(format!(
            "no rows in `{}`; run `vaa-moo optimize` first",
            summary_path.display()
        ))
    })
}

fn cmd_compare_strategies(
    scenario_path: &Path,
    cb_summary: &Path,
    strategy: Option<Vec<StrategyArg>>,
    cruise_speed: f64,
    out: &Path,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    let wanted = strategy
        .unwrap_or_else(|| vec![StrategyArg::Multihop, StrategyArg::Flybetween, StrategyArg::Cb]);
    let config = StrategyConfig { cruise_speed_ms: cruise_speed, ..StrategyConfig::default() };
    let (cb_f1, cb_f3) = read_cb_row(cb_summary)?;

    let mut rows = Vec::new();
    for s in &wanted {
        match s {
            StrategyArg::Multihop => rows.push(report::StrategyRow::of(
                "multihop",
                &strategy_multihop(&scenario, &config)?,
            )),
            StrategyArg::Flybetween => rows.push(report::StrategyRow::of(
                "flybetween",
                &strategy_flybetween(&scenario, &config)?,
            )),
            StrategyArg::Cb => {
                rows.push(report::StrategyRow { strategy: "cb".into(), f1_s: cb_f1, f3_j: cb_f3 })
            }
        }
    }

    fs::create_dir_all(out)?;
    fs::write(out.join("strategies.csv"), report::strategies_csv(&rows))?;
    print!("{}", report::strategies_summary(&rows, cb_f1));
    println!("wrote {}", out.join("strategies.csv").display());
    Ok(())
}

fn cmd_export_front(runs: &[PathBuf], out: &Path) -> Result<(), CliError> {
    let mut files: Vec<PathBuf> = Vec::new();
    for path in runs {
        if path.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(path)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(path.clone());
        }
    }

    let mut results: Vec<RunResult> = Vec::new();
    for file in files {
        match fs::read_to_string(&file).ok().and_then(|text| RunResult::from_json(&text).ok()) {
            Some(result) => results.push(result),
            None => eprintln!("skipping {} (not a run result)", file.display()),
        }
    }
    results.sort_by(|a, b| a.algo.cmp(&b.algo).then(a.seed.cmp(&b.seed)));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(out, report::front_csv(results.iter()))?;
    println!("wrote {} ({} runs)", out.display(), results.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_specs_parse() {
        assert_eq!(parse_seeds("7").unwrap(), vec![7]);
        assert_eq!(parse_seeds("1,5,9").unwrap(), vec![1, 5, 9]);
        assert_eq!(parse_seeds("1..10").unwrap(), (1..=10).collect::<Vec<_>>());
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds("9..1").is_err());
    }
}
