//! Flat-table renderings of audit artifacts for external plotting tools.
//!
//! Column schemas:
//! - trajectories: `step,strategy,log_capital`
//! - sweep matrix: `lower,upper,verdict,max_log_capital,rejected_by`

use std::fmt::Write;

use crate::audit::SweepReport;
use crate::tree::CapitalTrajectory;

/// Long-format CSV of one or more named capital trajectories.
pub fn trajectories_csv(entries: &[(String, CapitalTrajectory)]) -> String {
    let mut out = String::from("step,strategy,log_capital\n");
    for (name, trajectory) in entries {
        for (step, log) in trajectory.log_values().iter().enumerate() {
            writeln!(out, "{step},{name},{log}").expect("string writes are infallible");
        }
    }
    out
}

/// The sweep verdict matrix as CSV.
pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("lower,upper,verdict,max_log_capital,rejected_by\n");
    for cell in &report.cells {
        writeln!(
            out,
            "{},{},{},{},{}",
            cell.lower,
            cell.upper,
            cell.verdict,
            cell.max_log_capital,
            cell.rejected_by.as_deref().unwrap_or("")
        )
        .expect("string writes are infallible");
    }
    out
}
