//! Result emission: archive history CSV, per-seed summaries, merged front
//! exports, and the strategy comparison table. All output is UTF-8,
//! comma-delimited with a header row and `.` decimal points; floats print in
//! shortest round-trip form so reruns are byte-identical.

use std::fmt::Write as _;

use crate::runner::RunResult;
use crate::strategies::StrategyResult;

fn f2_db(f2: f64) -> f64 {
    20.0 * f2.log10()
}

/// Full archive history of one run: one row per archive member per iteration.
pub fn archive_csv(result: &RunResult) -> String {
    let mut out = String::from("iter,f1_s,f2_raw,f2_db,f3_j,solution_id\n");
    for snap in &result.snapshots {
        for row in &snap.entries {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                snap.iter,
                row.f1_s,
                row.f2,
                f2_db(row.f2),
                row.f3_j,
                row.id
            )
            .expect("string write");
        }
    }
    out
}

/// Solutions of the final archive as a JSON sidecar keyed by the ids used in
/// the archive CSV.
pub fn solutions_json(result: &RunResult) -> String {
    serde_json::to_string_pretty(&result.final_entries).expect("entries serialize")
}

/// Per-seed summary line of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub seed: u64,
    pub best_f1_s: f64,
    /// `f2`/`f3` of the best-`f1` member (the conventional single pick).
    pub f2_db_at_best_f1: f64,
    pub f3_j_at_best_f1: f64,
    pub best_f2_db: f64,
    pub best_f3_j: f64,
    pub evals: u64,
}

impl SummaryRow {
    pub fn of(result: &RunResult) -> Self {
        let best = result.best_by_f1();
        Self {
            seed: result.seed,
            best_f1_s: best.map_or(f64::INFINITY, |e| e.objectives.f1_s),
            f2_db_at_best_f1: best.map_or(f64::INFINITY, |e| e.objectives.f2_db()),
            f3_j_at_best_f1: best.map_or(f64::INFINITY, |e| e.objectives.f3_j),
            best_f2_db: result
                .final_entries
                .iter()
                .map(|e| e.objectives.f2_db())
                .fold(f64::INFINITY, f64::min),
            best_f3_j: result.best_f3(),
            evals: result.eval_count,
        }
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out =
        String::from("seed,best_f1_s,f2_db_at_best_f1,f3_j_at_best_f1,best_f2_db,best_f3_j,evals\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.seed, r.best_f1_s, r.f2_db_at_best_f1, r.f3_j_at_best_f1, r.best_f2_db, r.best_f3_j, r.evals
        )
        .expect("string write");
    }
    out
}

/// Long-format merge of final fronts across runs, for external plotting.
pub fn front_csv<'a, I: IntoIterator<Item = &'a RunResult>>(results: I) -> String {
    let mut out = String::from("algo,seed,f1,f2_db,f3\n");
    for result in results {
        for e in &result.final_entries {
            writeln!(
                out,
                "{},{},{},{},{}",
                result.algo,
                result.seed,
                e.objectives.f1_s,
                e.objectives.f2_db(),
                e.objectives.f3_j
            )
            .expect("string write");
        }
    }
    out
}

/// One row of the strategy comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyRow {
    pub strategy: String,
    pub f1_s: f64,
    pub f3_j: f64,
}

impl StrategyRow {
    pub fn of(strategy: &str, result: &StrategyResult) -> Self {
        Self { strategy: strategy.into(), f1_s: result.mission_time_s, f3_j: result.energy_j }
    }
}

pub fn strategies_csv(rows: &[StrategyRow]) -> String {
    let mut out = String::from("strategy,f1_s,f3_j\n");
    for r in rows {
        writeln!(out, "{},{},{}", r.strategy, r.f1_s, r.f3_j).expect("string write");
    }
    out
}

/// Human-readable comparison with the beamforming method's time savings over
/// each reference strategy.
pub fn strategies_summary(rows: &[StrategyRow], cb_f1_s: f64) -> String {
    let mut out = String::new();
    writeln!(out, "{:<24} {:>14} {:>16}", "strategy", "f1 [s]", "f3 [J]").expect("string write");
    for r in rows {
        writeln!(out, "{:<24} {:>14.2} {:>16.2}", r.strategy, r.f1_s, r.f3_j).expect("string write");
    }
    for r in rows {
        if r.strategy != "cb" && r.f1_s.is_finite() && r.f1_s > 0.0 {
            let savings = 100.0 * (1.0 - cb_f1_s / r.f1_s);
            writeln!(out, "time savings of cb vs {}: {savings:.1}%", r.strategy)
                .expect("string write");
        }
    }
    out
}
