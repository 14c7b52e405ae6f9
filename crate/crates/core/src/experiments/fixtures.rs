//! Built-in scenarios exercising both directions of the freeness criterion,
//! wave-speed identification on every coefficient family, and the runtime
//! invariant checks. The verification harness and the acceptance suite run
//! these; they also serve as config examples.

use crate::experiments::config::{ExperimentKind, InitialData, Scenario};
use crate::coefficients::CoefficientProfile;
use crate::dynamics::IntegratorConfig;
use crate::spectrum::SpectrumModel;

/// Five incommensurate eigenvalues; square roots with irrational ratios keep
/// mode phases from realigning simultaneously.
fn standard_spectrum() -> SpectrumModel {
    SpectrumModel::new(vec![1.0, 2.0, 3.0, 5.0, 7.0]).expect("valid spectrum")
}

#[allow(clippy::too_many_arguments)]
fn scenario(
    name: &str,
    kind: ExperimentKind,
    spectrum: SpectrumModel,
    speed: CoefficientProfile,
    damping: CoefficientProfile,
    seed: u64,
    t_max: f64,
    samples: usize,
    profile_tol: f64,
    anchor_time: f64,
) -> Scenario {
    speed.validate_speed().expect("fixture speed is valid");
    damping.validate_damping().expect("fixture damping is valid");
    Scenario {
        name: name.to_string(),
        kind,
        spectrum,
        speed,
        damping,
        initial: InitialData::Random { seed },
        t_max,
        samples,
        profile_tol,
        anchor_time,
        integrator: IntegratorConfig::tight(),
        sweep: None,
    }
}

/// The built-in scenario set.
pub fn builtin_scenarios() -> Vec<Scenario> {
    vec![
        // Convergent drift with integrable damping: the solution approaches
        // the reconstructed free wave.
        scenario(
            "sufficiency_power",
            ExperimentKind::Sufficiency,
            standard_spectrum(),
            CoefficientProfile::power(1.0, 1.0, 2.0).unwrap(),
            CoefficientProfile::power(0.0, 1.0, 2.0).unwrap(),
            11,
            1000.0,
            501,
            0.1,
            10.0,
        ),
        // Log-divergent drift: every candidate fitted at the anchor is
        // defeated within one antiphase passage of the slowest mode.
        scenario(
            "necessity_power",
            ExperimentKind::Necessity,
            standard_spectrum(),
            CoefficientProfile::power(1.0, 1.0, 1.0).unwrap(),
            CoefficientProfile::constant(0.0).unwrap(),
            13,
            260.0,
            521,
            0.5,
            10.0,
        ),
        // Exponentially settling speed.
        scenario(
            "wavespeed_exp",
            ExperimentKind::WaveSpeed,
            standard_spectrum(),
            CoefficientProfile::exp(1.5, 0.5, 0.5).unwrap(),
            CoefficientProfile::constant(0.0).unwrap(),
            17,
            1000.0,
            501,
            0.1,
            10.0,
        ),
        // Constant speed, no damping: the diagonalized state freezes.
        scenario(
            "verify_constant",
            ExperimentKind::Verify,
            SpectrumModel::new(vec![1.0, 4.0, 9.0]).unwrap(),
            CoefficientProfile::constant(2.0).unwrap(),
            CoefficientProfile::constant(0.0).unwrap(),
            19,
            1000.0,
            201,
            0.1,
            10.0,
        ),
        // Constant speed with exponential damping: energy decays
        // monotonically but stays above the closed-form floor.
        scenario(
            "damped_energy",
            ExperimentKind::Verify,
            SpectrumModel::new(vec![1.0, 2.5, 6.0]).unwrap(),
            CoefficientProfile::constant(1.0).unwrap(),
            CoefficientProfile::exp(0.0, 1.0, 1.0).unwrap(),
            23,
            50.0,
            201,
            0.1,
            1.0,
        ),
        // Jumping speed: breakpoint splitting keeps the integrator exact
        // across the discontinuities.
        scenario(
            "wavespeed_step",
            ExperimentKind::WaveSpeed,
            SpectrumModel::new(vec![1.0, 3.0, 5.0]).unwrap(),
            CoefficientProfile::step(vec![0.0, 2.0, 5.0], vec![1.2, 0.8, 1.0]).unwrap(),
            CoefficientProfile::constant(0.0).unwrap(),
            29,
            1000.0,
            501,
            0.1,
            10.0,
        ),
        // Piecewise-linear ramp settling to a plateau.
        scenario(
            "wavespeed_ramp",
            ExperimentKind::WaveSpeed,
            SpectrumModel::new(vec![1.0, 3.0, 5.0]).unwrap(),
            CoefficientProfile::piecewise_linear(vec![0.0, 3.0, 6.0], vec![1.5, 0.9, 1.2])
                .unwrap(),
            CoefficientProfile::constant(0.0).unwrap(),
            31,
            1000.0,
            501,
            0.1,
            10.0,
        ),
    ]
}

/// Built-in scenarios whose drift converges; the wave-speed identification
/// criteria quantify over exactly these.
pub fn convergent_scenarios() -> Vec<Scenario> {
    builtin_scenarios()
        .into_iter()
        .filter(|s| s.speed.classify_drift().is_convergent())
        .collect()
}
