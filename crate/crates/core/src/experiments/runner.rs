//! Deterministic scenario runner.
//!
//! One run integrates the system over a union grid that covers the CSV
//! sample times, the report's selected times, and (for necessity-style
//! witness checks) a dense window between the anchor time and the antiphase
//! horizon. Everything derived from the run is a pure function of the
//! scenario and its seed, and per-mode results are assembled in mode order,
//! so repeated runs produce byte-identical CSV output at any thread count.

use crate::coefficients::CoefficientProfile;
use crate::dynamics::{self, DynamicsError, Trajectory};
use crate::experiments::config::{ExperimentKind, Scenario};
use crate::experiments::report::{
    format_f64, write_csv_atomic, CheckFlag, NamedScalar, RunReport, TimedValue,
};
use crate::scattering::{
    self, FreeSolution, ScatterError, ScatteringProfile,
};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error("cannot write artifacts: {0}")]
    Io(#[from] std::io::Error),
}

/// Time-series CSV header; one row per configured sample.
pub const SERIES_HEADER: &str = "t,D,F,y_gap,c_est";

/// Uniform grid `0 = t_0 < ... < t_{n-1} = t_max` with exact endpoints.
pub fn linspace(t_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i == n - 1 {
                t_max
            } else {
                t_max * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn sanitize_name(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn union_sorted(mut times: Vec<f64>) -> Vec<f64> {
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    times
}

fn index_of(times: &[f64], t: f64) -> usize {
    times
        .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        .expect("time is on the union grid")
}

/// Everything the runner computes before flags and CSV are assembled.
struct RunData {
    trajectory: Trajectory,
    profile: ScatteringProfile,
    comparison: FreeSolution,
    discrepancy: Vec<f64>,
    energy: Vec<f64>,
    y_gap: Vec<f64>,
    c_est: Vec<f64>,
    witness_sup: f64,
    witness_covers_horizon: bool,
}

fn compute_run(scenario: &Scenario, union_times: &[f64]) -> Result<RunData, RunError> {
    let initial = scenario.resolve_initial();
    let spectrum = &scenario.spectrum;
    let speed = &scenario.speed;
    let damping = &scenario.damping;
    let c_inf = speed.limit_value();

    let trajectory = dynamics::evolve(
        spectrum,
        &initial,
        speed,
        damping,
        union_times,
        &scenario.integrator,
    )?;
    let profile = scattering::extract_profile(
        spectrum,
        &initial,
        speed,
        damping,
        scenario.profile_tol,
        &scenario.integrator,
    )?;

    let drift_class = speed.classify_drift();
    let anchor = scenario.anchor_time;
    let anchor_index = index_of(union_times, anchor);
    let candidate =
        scattering::best_free_fit(trajectory.state(anchor_index), anchor, c_inf, spectrum);
    let comparison = if drift_class.is_convergent() {
        scattering::reconstruct_free(&profile, &drift_class, c_inf, spectrum)?
    } else {
        candidate.clone()
    };

    let horizon = scattering::necessity_horizon(speed, anchor, spectrum);
    let witness_end = horizon.unwrap_or(scenario.t_max).min(scenario.t_max);
    let witness_covers_horizon = horizon.map(|h| h <= scenario.t_max).unwrap_or(false);

    let mut discrepancy = Vec::with_capacity(union_times.len());
    let mut energy = Vec::with_capacity(union_times.len());
    let mut y_gap = Vec::with_capacity(union_times.len());
    let mut c_est = Vec::with_capacity(union_times.len());
    let mut witness_sup: f64 = 0.0;
    let mut int_w = 0.0;
    let mut int_z = 0.0;
    let mut prev = (0.0, 0.0, 0.0); // (t, ||w||^2, ||z||^2)
    for (i, &t) in union_times.iter().enumerate() {
        let state = trajectory.state(i);
        discrepancy.push(scattering::discrepancy(state, &comparison, t, spectrum));
        energy.push(dynamics::energy(
            state,
            speed.eval(t).expect("sample times are non-negative"),
        ));
        let y = scattering::diagonalize(state, t, speed, spectrum);
        y_gap.push(y.sub(profile.state()).norm());

        let w_sq = state.first_norm().powi(2);
        let z_sq = state.second_norm().powi(2);
        if i == 0 {
            c_est.push(0.0);
        } else {
            let dt = t - prev.0;
            int_w += 0.5 * (prev.1 + w_sq) * dt;
            int_z += 0.5 * (prev.2 + z_sq) * dt;
            c_est.push(if int_w > 0.0 { (int_z / int_w).sqrt() } else { 0.0 });
        }
        prev = (t, w_sq, z_sq);

        if t >= anchor && t <= witness_end {
            let gap = scattering::discrepancy(state, &candidate, t, spectrum);
            if gap > witness_sup {
                witness_sup = gap;
            }
        }
    }

    Ok(RunData {
        trajectory,
        profile,
        comparison,
        discrepancy,
        energy,
        y_gap,
        c_est,
        witness_sup,
        witness_covers_horizon,
    })
}

/// Builds the union grid for a scenario: CSV sample times, report times,
/// anchor, and a dense witness window up to the antiphase horizon (capped at
/// `t_max`).
fn build_grids(scenario: &Scenario) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let csv_times = linspace(scenario.t_max, scenario.samples);
    let selected = vec![
        scenario.t_max / 100.0,
        scenario.t_max / 10.0,
        scenario.t_max,
    ];
    let mut all = csv_times.clone();
    all.extend_from_slice(&selected);
    all.push(scenario.anchor_time);
    let horizon = scattering::necessity_horizon(&scenario.speed, scenario.anchor_time, &scenario.spectrum);
    let witness_end = horizon.unwrap_or(scenario.t_max).min(scenario.t_max);
    if witness_end > scenario.anchor_time {
        let width = witness_end - scenario.anchor_time;
        for i in 0..=2000 {
            all.push(scenario.anchor_time + width * i as f64 / 2000.0);
        }
    }
    (union_sorted(all), csv_times, selected)
}

/// Runs a scenario and writes its time-series CSV into `out_dir`.
///
/// Deterministic given the scenario and seed: reruns produce byte-identical
/// CSV at any thread count.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> Result<RunReport, RunError> {
    let (union_times, csv_times, selected) = build_grids(scenario);
    let data = compute_run(scenario, &union_times)?;
    let spectrum = &scenario.spectrum;
    let speed = &scenario.speed;
    let damping = &scenario.damping;
    let c_inf = speed.limit_value();
    let drift_class = speed.classify_drift();
    let initial = scenario.resolve_initial();

    // CSV rows at the configured sample times only.
    std::fs::create_dir_all(out_dir)?;
    let csv_name = format!("{}.csv", sanitize_name(&scenario.name));
    let csv_path = out_dir.join(&csv_name);
    let rows: Vec<String> = csv_times
        .iter()
        .map(|&t| {
            let i = index_of(&union_times, t);
            format!(
                "{},{},{},{},{}",
                format_f64(t),
                format_f64(data.discrepancy[i]),
                format_f64(data.energy[i]),
                format_f64(data.y_gap[i]),
                format_f64(data.c_est[i]),
            )
        })
        .collect();
    write_csv_atomic(&csv_path, SERIES_HEADER, &rows)?;

    let discrepancy_at: Vec<TimedValue> = selected
        .iter()
        .map(|&t| TimedValue {
            t,
            value: data.discrepancy[index_of(&union_times, t)],
        })
        .collect();

    // Scalars.
    let mut scalars = Vec::new();
    let profile_norm = data.profile.norm();
    scalars.push(NamedScalar {
        name: "profile_norm".to_string(),
        value: profile_norm,
    });
    scalars.push(NamedScalar {
        name: "tail_certificate".to_string(),
        value: data.profile.eps_tail(),
    });
    scalars.push(NamedScalar {
        name: "truncation_time".to_string(),
        value: data.profile.t_trunc(),
    });
    scalars.push(NamedScalar {
        name: "witness_supremum".to_string(),
        value: data.witness_sup,
    });
    let norm_lower_bound = scattering::profile_norm_lower_bound(&initial, speed, damping);
    scalars.push(NamedScalar {
        name: "profile_norm_lower_bound".to_string(),
        value: norm_lower_bound,
    });
    scalars.push(NamedScalar {
        name: "equipartition_defect_at_t_max".to_string(),
        value: scattering::equipartition_defect(&data.comparison, scenario.t_max, spectrum),
    });
    scalars.push(NamedScalar {
        name: "equipartition_bound_constant".to_string(),
        value: scattering::equipartition_bound_constant(&data.comparison, spectrum),
    });
    let min_energy = data.energy.iter().copied().fold(f64::INFINITY, f64::min);
    scalars.push(NamedScalar {
        name: "min_energy".to_string(),
        value: min_energy,
    });
    let initial_energy = data.energy[0];
    let energy_bound = if initial_energy > 0.0 {
        dynamics::energy_lower_bound(initial_energy, speed, damping)
    } else {
        0.0
    };
    scalars.push(NamedScalar {
        name: "energy_lower_bound".to_string(),
        value: energy_bound,
    });
    if drift_class.is_convergent() {
        let certificate = scattering::free_approach_certificate(
            &data.profile,
            speed,
            damping,
            spectrum,
            scenario.t_max,
        )?;
        scalars.push(NamedScalar {
            name: "approach_certificate_at_t_max".to_string(),
            value: certificate,
        });
    }

    // Wave-speed estimates: the coarse union grid gives the CSV column; the
    // reported estimate uses a grid fine enough to resolve the cross terms.
    let trivial = initial.is_zero();
    let (estimate, estimate_tenth) = if trivial {
        (0.0, 0.0)
    } else if scenario.kind == ExperimentKind::WaveSpeed {
        let fine = fine_estimate_times(scenario);
        let fine_traj = dynamics::evolve(
            spectrum,
            &initial,
            speed,
            damping,
            &fine,
            &scenario.integrator,
        )?;
        (
            scattering::estimate_wave_speed(&fine_traj, scenario.t_max)?,
            scattering::estimate_wave_speed(&fine_traj, scenario.t_max / 10.0)?,
        )
    } else {
        (
            scattering::estimate_wave_speed(&data.trajectory, scenario.t_max)?,
            scattering::estimate_wave_speed(&data.trajectory, scenario.t_max / 10.0)?,
        )
    };
    scalars.push(NamedScalar {
        name: "wave_speed_estimate".to_string(),
        value: estimate,
    });

    // Flags.
    let mut flags = Vec::new();
    flags.push(CheckFlag {
        name: "profile_nontrivial_above_bound".to_string(),
        passed: profile_norm + data.profile.eps_tail() + 1e-12 >= norm_lower_bound,
    });
    match scenario.kind {
        ExperimentKind::Sufficiency => {
            let d_early = discrepancy_at[0].value;
            let d_final = discrepancy_at[2].value;
            flags.push(CheckFlag {
                name: "discrepancy_decays_fivefold".to_string(),
                passed: d_final <= d_early / 5.0,
            });
            let certificate = scalars
                .iter()
                .find(|s| s.name == "approach_certificate_at_t_max")
                .map(|s| s.value)
                .unwrap_or(f64::INFINITY);
            flags.push(CheckFlag {
                name: "discrepancy_within_certificate".to_string(),
                passed: d_final <= certificate + 1e-9,
            });
        }
        ExperimentKind::Necessity => {
            flags.push(CheckFlag {
                name: "drift_divergent".to_string(),
                passed: !drift_class.is_convergent(),
            });
            flags.push(CheckFlag {
                name: "witness_window_covers_horizon".to_string(),
                passed: data.witness_covers_horizon,
            });
            flags.push(CheckFlag {
                name: "witness_reaches_profile_norm".to_string(),
                passed: data.witness_sup >= 0.9 * profile_norm,
            });
        }
        ExperimentKind::WaveSpeed => {
            let err_final = (estimate - c_inf).abs();
            let err_tenth = (estimate_tenth - c_inf).abs();
            flags.push(CheckFlag {
                name: "wave_speed_within_tolerance".to_string(),
                passed: !trivial && err_final <= 1e-2,
            });
            flags.push(CheckFlag {
                name: "wave_speed_error_shrinks".to_string(),
                passed: !trivial && err_final <= err_tenth + 1e-12,
            });
        }
        ExperimentKind::Verify => {
            let constant_free = matches!(speed, CoefficientProfile::Constant { .. })
                && damping.l1_norm(0.0, f64::INFINITY).unwrap_or(f64::INFINITY) == 0.0;
            if constant_free {
                let y0 = scattering::diagonalize(data.trajectory.state(0), 0.0, speed, spectrum);
                let max_drift = union_times
                    .iter()
                    .enumerate()
                    .map(|(i, &t)| {
                        let y =
                            scattering::diagonalize(data.trajectory.state(i), t, speed, spectrum);
                        y.sub(&y0).norm()
                    })
                    .fold(0.0, f64::max);
                flags.push(CheckFlag {
                    name: "freeze_profile_constant".to_string(),
                    passed: max_drift <= 1e-8,
                });
            }
            if initial_energy > 0.0 {
                flags.push(CheckFlag {
                    name: "energy_above_lower_bound".to_string(),
                    passed: min_energy >= energy_bound * (1.0 - 1e-8),
                });
            }
            if matches!(speed, CoefficientProfile::Constant { .. }) && damping.infimum() >= 0.0 {
                let budget = 1e-10 * initial_energy.max(1.0);
                let monotone = data
                    .energy
                    .windows(2)
                    .all(|pair| pair[1] <= pair[0] + budget);
                flags.push(CheckFlag {
                    name: "energy_non_increasing".to_string(),
                    passed: monotone,
                });
            }
            let y0_norm = data.profile.initial_y_norm();
            let budget = 1e-8 * y0_norm.max(1.0);
            let mut gronwall_ok = true;
            for (si, ti) in [(0usize, 2usize), (1, 5), (2, 9), (0, 9)] {
                let pick = |frac: usize| {
                    let idx = (union_times.len() - 1) * frac / 9;
                    (union_times[idx], idx)
                };
                let (s, s_idx) = pick(si);
                let (t, t_idx) = pick(ti);
                if t <= s {
                    continue;
                }
                let ys = scattering::diagonalize(data.trajectory.state(s_idx), s, speed, spectrum);
                let yt = scattering::diagonalize(data.trajectory.state(t_idx), t, speed, spectrum);
                let bound = dynamics::gronwall_tail_bound(y0_norm, speed, damping, s, t);
                if yt.sub(&ys).norm() > bound + budget {
                    gronwall_ok = false;
                }
            }
            flags.push(CheckFlag {
                name: "gronwall_bound_holds".to_string(),
                passed: gronwall_ok,
            });
        }
        ExperimentKind::Profile => {
            flags.push(CheckFlag {
                name: "tail_certificate_within_tolerance".to_string(),
                passed: data.profile.eps_tail() <= scenario.profile_tol,
            });
        }
    }

    let report = RunReport {
        scenario: scenario.name.clone(),
        kind: scenario.kind,
        seed: scenario.initial.seed(),
        drift: drift_class,
        discrepancy_at,
        scalars,
        flags,
        csv_paths: vec![csv_path.to_string_lossy().into_owned()],
    };
    report.assert_finite();
    Ok(report)
}

/// Sample times for the dedicated wave-speed estimation run: spacing at most
/// `min(0.05, period/20)` of the fastest mode, with the decade point
/// `t_max/10` on the grid.
fn fine_estimate_times(scenario: &Scenario) -> Vec<f64> {
    let omega = scenario.speed.supremum() * scenario.spectrum.max_eigenvalue().sqrt();
    let period = 2.0 * std::f64::consts::PI / omega;
    let spacing = (period / 20.0).min(0.05);
    let blocks = ((scenario.t_max / spacing / 10.0).ceil() as usize).max(1);
    linspace(scenario.t_max, 10 * blocks + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::parse_scenario;

    fn demo_scenario(kind: &str) -> Scenario {
        let text = format!(
            r#"{{
            "name": "runner_demo",
            "kind": "{kind}",
            "spectrum": {{"type": "explicit", "eigenvalues": [1.0, 2.0, 3.0]}},
            "speed": {{"family": "power", "c_inf": 1.0, "amplitude": 1.0, "exponent": 2.0}},
            "damping": {{"family": "power", "c_inf": 0.0, "amplitude": 1.0, "exponent": 2.0}},
            "initial": {{"type": "random", "seed": 5}},
            "t_max": 100.0,
            "samples": 41,
            "profile_tol": 0.5,
            "anchor_time": 1.0
        }}"#
        );
        parse_scenario(&text).unwrap()
    }

    #[test]
    fn run_writes_csv_with_configured_row_count() {
        let dir = tempfile::tempdir().unwrap();
        let scenario = demo_scenario("sufficiency");
        let report = run_scenario(&scenario, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("runner_demo.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SERIES_HEADER);
        assert_eq!(lines.count(), 41);
        assert_eq!(report.seed, Some(5));
        assert!(report.scalar("wave_speed_estimate").is_some());
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let scenario = demo_scenario("profile");
        run_scenario(&scenario, dir_a.path()).unwrap();
        run_scenario(&scenario, dir_b.path()).unwrap();
        let a = std::fs::read(dir_a.path().join("runner_demo.csv")).unwrap();
        let b = std::fs::read(dir_b.path().join("runner_demo.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn verify_kind_flags_pass_for_constant_free_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"{
            "name": "verify_demo",
            "kind": "verify",
            "spectrum": {"type": "explicit", "eigenvalues": [1.0, 4.0, 9.0]},
            "speed": {"family": "constant", "value": 2.0},
            "damping": {"family": "constant", "value": 0.0},
            "initial": {"type": "random", "seed": 19},
            "t_max": 100.0,
            "samples": 21,
            "profile_tol": 0.1,
            "anchor_time": 1.0,
            "integrator": {"rel_tol": 1e-12, "abs_tol": 1e-14}
        }"#;
        let scenario = parse_scenario(text).unwrap();
        let report = run_scenario(&scenario, dir.path()).unwrap();
        let names: Vec<&str> = report.flags.iter().map(|f| f.name.as_str()).collect();
        assert!(names.contains(&"freeze_profile_constant"));
        assert!(names.contains(&"energy_above_lower_bound"));
        assert!(names.contains(&"energy_non_increasing"));
        assert!(names.contains(&"gronwall_bound_holds"));
        assert!(report.all_flags_pass(), "flags: {:?}", report.flags);
    }

    #[test]
    fn zero_amplitude_behaves_like_constant_speed() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"{
            "name": "zero_amp",
            "kind": "sufficiency",
            "spectrum": {"type": "explicit", "eigenvalues": [1.0, 4.0]},
            "speed": {"family": "power", "c_inf": 1.0, "amplitude": 0.0, "exponent": 2.0},
            "damping": {"family": "constant", "value": 0.0},
            "initial": {"type": "random", "seed": 9},
            "t_max": 50.0,
            "samples": 26,
            "anchor_time": 1.0,
            "integrator": {"rel_tol": 1e-12, "abs_tol": 1e-14}
        }"#;
        let scenario = parse_scenario(text).unwrap();
        let report = run_scenario(&scenario, dir.path()).unwrap();
        let d_final = report.discrepancy_at.last().unwrap().value;
        assert!(d_final <= 1e-10, "constant speed should be exactly free, D = {d_final}");
    }
}
