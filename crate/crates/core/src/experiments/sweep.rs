//! Parameter sweeps over the power-family speed profile.
//!
//! The grid runs in row-major order (amplitudes outer, exponents inner).
//! Cells are independent and may run in parallel; per-cell CSV files are
//! written atomically and the summary table is assembled in grid order, so
//! the output is identical at any thread count. A failing cell is recorded
//! in the summary without aborting the sweep.

use crate::coefficients::CoefficientProfile;
use crate::experiments::config::Scenario;
use crate::experiments::report::{format_f64, write_csv_atomic, RunReport};
use crate::experiments::runner::{run_scenario, RunError};
use crate::par;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Sweep summary CSV header.
pub const SWEEP_HEADER: &str = "a,p,drift_kind,D_final,witness_sup";

/// Outcome of one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub amplitude: f64,
    pub exponent: f64,
    pub report: Option<RunReport>,
    pub error: Option<String>,
}

/// Full sweep outcome: one cell per grid point, in grid order, plus the path
/// of the emitted phase-table CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub cells: Vec<SweepCell>,
    pub csv_path: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("scenario has no sweep grid")]
    MissingGrid,
    #[error("sweep requires a power-family speed profile")]
    NotPowerFamily,
    #[error("cannot write artifacts: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs the scenario's grid and writes `<name>_sweep.csv` into `out_dir`.
pub fn sweep(scenario: &Scenario, out_dir: &Path) -> Result<SweepSummary, SweepError> {
    let grid = scenario.sweep.as_ref().ok_or(SweepError::MissingGrid)?;
    let c_inf = match &scenario.speed {
        CoefficientProfile::PowerPerturbation { c_inf, .. } => *c_inf,
        _ => return Err(SweepError::NotPowerFamily),
    };

    let n_p = grid.exponents.len();
    let n_cells = grid.amplitudes.len() * n_p;
    let out_dir_owned = out_dir.to_path_buf();
    let outcomes: Vec<(f64, f64, Result<RunReport, String>)> =
        par::map_indexed(n_cells, |flat| {
            let amplitude = grid.amplitudes[flat / n_p];
            let exponent = grid.exponents[flat % n_p];
            let outcome = run_cell(scenario, c_inf, amplitude, exponent, &out_dir_owned);
            (amplitude, exponent, outcome)
        });

    std::fs::create_dir_all(out_dir)?;
    let mut rows = Vec::with_capacity(n_cells);
    let mut cells = Vec::with_capacity(n_cells);
    for (amplitude, exponent, outcome) in outcomes {
        let row = match &outcome {
            Ok(report) => {
                let d_final = report
                    .discrepancy_at
                    .last()
                    .map(|v| v.value)
                    .unwrap_or(0.0);
                let witness = report.scalar("witness_supremum").unwrap_or(0.0);
                format!(
                    "{},{},{},{},{}",
                    format_f64(amplitude),
                    format_f64(exponent),
                    report.drift.kind.label(),
                    format_f64(d_final),
                    format_f64(witness),
                )
            }
            Err(message) => {
                let _ = message;
                format!("{},{},error,,", format_f64(amplitude), format_f64(exponent))
            }
        };
        rows.push(row);
        let (report, error) = match outcome {
            Ok(report) => (Some(report), None),
            Err(message) => (None, Some(message)),
        };
        cells.push(SweepCell {
            amplitude,
            exponent,
            report,
            error,
        });
    }

    let csv_path = out_dir.join(format!("{}_sweep.csv", scenario.name));
    write_csv_atomic(&csv_path, SWEEP_HEADER, &rows)?;
    Ok(SweepSummary {
        scenario: scenario.name.clone(),
        cells,
        csv_path: csv_path.to_string_lossy().into_owned(),
    })
}

fn run_cell(
    base: &Scenario,
    c_inf: f64,
    amplitude: f64,
    exponent: f64,
    out_dir: &Path,
) -> Result<RunReport, String> {
    let speed = CoefficientProfile::power(c_inf, amplitude, exponent)
        .map_err(|e| e.to_string())?;
    speed.validate_speed().map_err(|e| e.to_string())?;
    let mut cell = base.clone();
    cell.speed = speed;
    cell.sweep = None;
    cell.name = format!(
        "{}_a{}_p{}",
        base.name,
        format_f64(amplitude),
        format_f64(exponent)
    );
    run_scenario(&cell, out_dir).map_err(|e: RunError| e.to_string())
}
