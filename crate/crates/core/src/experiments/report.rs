//! Run reports and CSV emission.
//!
//! CSV numbers are printed with Rust's shortest round-trip `f64` formatting,
//! so replaying a file reproduces the bits. Files are written to a temporary
//! sibling and renamed into place, which keeps concurrent sweep cells from
//! observing partial output.

use crate::coefficients::DriftClassification;
use crate::experiments::config::ExperimentKind;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

/// One named scalar in a report. Reported values must be finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedScalar {
    pub name: String,
    pub value: f64,
}

/// A scalar attached to a sample time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedValue {
    pub t: f64,
    pub value: f64,
}

/// Pass/fail outcome of one invariant check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFlag {
    pub name: String,
    pub passed: bool,
}

/// Summary of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub kind: ExperimentKind,
    /// Seed of the random initial data, when the scenario drew it.
    pub seed: Option<u64>,
    pub drift: DriftClassification,
    /// Discrepancy against the comparison free wave at selected times.
    pub discrepancy_at: Vec<TimedValue>,
    pub scalars: Vec<NamedScalar>,
    pub flags: Vec<CheckFlag>,
    pub csv_paths: Vec<String>,
}

impl RunReport {
    pub fn all_flags_pass(&self) -> bool {
        self.flags.iter().all(|flag| flag.passed)
    }

    pub fn scalar(&self, name: &str) -> Option<f64> {
        self.scalars
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.value)
    }

    /// Every reported scalar must be finite; called before serialization.
    pub fn assert_finite(&self) {
        for scalar in &self.scalars {
            assert!(
                scalar.value.is_finite(),
                "report scalar {} is not finite",
                scalar.name
            );
        }
        for timed in &self.discrepancy_at {
            assert!(timed.t.is_finite() && timed.value.is_finite());
        }
    }
}

/// Shortest round-trip decimal for a CSV cell.
pub fn format_f64(value: f64) -> String {
    format!("{value}")
}

/// Writes a CSV atomically: content goes to `<path>.tmp` first and is then
/// renamed over the target.
pub fn write_csv_atomic(
    path: &Path,
    header: &str,
    rows: &[String],
) -> std::io::Result<()> {
    let mut tmp: PathBuf = path.to_path_buf();
    let mut file_name = tmp
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    file_name.push(".tmp");
    tmp.set_file_name(file_name);

    {
        let mut file = std::fs::File::create(&tmp)?;
        writeln!(file, "{header}")?;
        for row in rows {
            writeln!(file, "{row}")?;
        }
        file.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::DriftKind;

    #[test]
    fn report_round_trips_through_json() {
        let report = RunReport {
            scenario: "demo".to_string(),
            kind: ExperimentKind::Sufficiency,
            seed: Some(42),
            drift: DriftClassification {
                kind: DriftKind::Convergent { f_inf: 1.0 },
                certificate: "closed form".to_string(),
            },
            discrepancy_at: vec![TimedValue {
                t: 10.0,
                value: 0.012345678901234567,
            }],
            scalars: vec![NamedScalar {
                name: "wave_speed_estimate".to_string(),
                value: 1.0000001234,
            }],
            flags: vec![CheckFlag {
                name: "discrepancy_decays".to_string(),
                passed: true,
            }],
            csv_paths: vec!["out/demo.csv".to_string()],
        };
        report.assert_finite();
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn format_round_trips_f64() {
        for &v in &[0.0, 1.0 / 3.0, 1e-300, 123456.789, -0.1, 2.5e17] {
            let text = format_f64(v);
            let back: f64 = text.parse().unwrap();
            assert_eq!(v, back, "formatting {v} as {text} lost bits");
        }
    }

    #[test]
    fn csv_writer_is_atomic_and_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.csv");
        write_csv_atomic(&path, "t,D", &["0,1".to_string(), "1,0.5".to_string()]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "t,D\n0,1\n1,0.5\n");
        assert!(!dir.path().join("series.csv.tmp").exists());
    }
}
