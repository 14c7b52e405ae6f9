//! Time integration of the decoupled per-mode first-order system, energy
//! functionals, and the a-priori bounds used as runtime certificates.
//!
//! In the eigenbasis the evolution decouples into one complex 2x2 system per
//! mode,
//!
//! ```text
//! w_k' = sqrt(lambda_k) z_k
//! z_k' = -c(t)^2 sqrt(lambda_k) w_k - b(t) z_k
//! ```
//!
//! integrated by an embedded Dormand-Prince 5(4) pair with adaptive steps.
//! Integration spans are split at every coefficient breakpoint so the
//! integrand is smooth on each step; bounded-variation coefficients lose no
//! order this way and the mollified approximants are never needed for the
//! dynamics. Modes integrate independently (in parallel when the `parallel`
//! feature is on) and trajectory assembly preserves mode order, so results
//! are scheduler-independent.

mod rk;

use crate::coefficients::CoefficientProfile;
use crate::par;
use crate::spectrum::{SpectrumModel, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("sample times must start at 0 and increase strictly")]
    InvalidSampleTimes,
    #[error("trajectory must contain one state per sample time")]
    SampleStateMismatch,
    #[error("mode {mode} (lambda = {lambda}): {source}")]
    Mode {
        mode: usize,
        lambda: f64,
        #[source]
        source: Box<DynamicsError>,
    },
}

/// Adaptive integrator settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub breakpoint_splitting: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.1,
            breakpoint_splitting: true,
        }
    }
}

impl IntegratorConfig {
    /// Tightened tolerances for long-horizon phase-sensitive runs.
    pub fn tight() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..Self::default()
        }
    }

    fn assert_valid(&self) {
        assert!(
            self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.max_step > 0.0,
            "integrator tolerances and max_step must be positive"
        );
    }
}

/// Sampled solution of the first-order system: one state per sample time,
/// together with the spectrum and coefficient profiles that produced it.
#[derive(Debug, Clone)]
pub struct Trajectory {
    spectrum: SpectrumModel,
    times: Vec<f64>,
    states: Vec<StateVector>,
    speed: CoefficientProfile,
    damping: CoefficientProfile,
}

impl Trajectory {
    /// Assembles a trajectory from raw parts, validating the invariants:
    /// at least one sample, strictly increasing times, one finite state per
    /// time with the spectrum's mode count.
    pub fn new(
        spectrum: SpectrumModel,
        times: Vec<f64>,
        states: Vec<StateVector>,
        speed: CoefficientProfile,
        damping: CoefficientProfile,
    ) -> Result<Self, DynamicsError> {
        if times.is_empty() || times.len() != states.len() {
            return Err(DynamicsError::SampleStateMismatch);
        }
        if !times[0].is_finite() {
            return Err(DynamicsError::InvalidSampleTimes);
        }
        for pair in times.windows(2) {
            if !(pair[1].is_finite() && pair[1] > pair[0]) {
                return Err(DynamicsError::InvalidSampleTimes);
            }
        }
        for state in &states {
            if state.mode_count() != spectrum.mode_count() {
                return Err(DynamicsError::SampleStateMismatch);
            }
        }
        Ok(Self {
            spectrum,
            times,
            states,
            speed,
            damping,
        })
    }

    pub fn spectrum(&self) -> &SpectrumModel {
        &self.spectrum
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, index: usize) -> &StateVector {
        &self.states[index]
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn speed(&self) -> &CoefficientProfile {
        &self.speed
    }

    pub fn damping(&self) -> &CoefficientProfile {
        &self.damping
    }
}

/// Merged breakpoints of both coefficient profiles inside `(t0, t1)`.
fn interior_breakpoints(
    c: &CoefficientProfile,
    b: &CoefficientProfile,
    t0: f64,
    t1: f64,
) -> Vec<f64> {
    let mut cuts: Vec<f64> = c
        .breakpoints()
        .iter()
        .chain(b.breakpoints().iter())
        .copied()
        .filter(|&bp| bp > t0 && bp < t1)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    cuts
}

/// Per-mode integrator that carries its adaptive step-size hint across
/// successive advance calls, so chained sampling stays cheap.
struct ModeIntegrator<'a> {
    sqrt_lambda: f64,
    speed: &'a CoefficientProfile,
    damping: &'a CoefficientProfile,
    config: &'a IntegratorConfig,
    h_hint: f64,
}

impl<'a> ModeIntegrator<'a> {
    fn new(
        lambda: f64,
        speed: &'a CoefficientProfile,
        damping: &'a CoefficientProfile,
        config: &'a IntegratorConfig,
    ) -> Self {
        Self {
            sqrt_lambda: lambda.sqrt(),
            speed,
            damping,
            config,
            h_hint: config.max_step,
        }
    }

    fn advance(
        &mut self,
        mut state: rk::Pair,
        t0: f64,
        t1: f64,
    ) -> Result<rk::Pair, DynamicsError> {
        let mut spans = vec![t0];
        if self.config.breakpoint_splitting {
            spans.extend(interior_breakpoints(self.speed, self.damping, t0, t1));
        }
        spans.push(t1);
        for pair in spans.windows(2) {
            let (a, end) = (pair[0], pair[1]);
            let speed = self.speed;
            let damping = self.damping;
            let c_at = move |t: f64| {
                if t >= end {
                    speed.eval_left(end)
                } else {
                    speed.eval_unchecked(t)
                }
            };
            let b_at = move |t: f64| {
                if t >= end {
                    damping.eval_left(end)
                } else {
                    damping.eval_unchecked(t)
                }
            };
            let (next, hint) = rk::integrate_span(
                self.sqrt_lambda,
                &c_at,
                &b_at,
                state,
                a,
                end,
                self.config,
                self.h_hint,
            )?;
            state = next;
            self.h_hint = hint;
        }
        Ok(state)
    }
}

/// Integrates one mode from `(w0, z0)` at `t0` to `t1`. Intervals are split
/// at every profile breakpoint when `breakpoint_splitting` is on.
#[allow(clippy::too_many_arguments)]
pub fn evolve_mode(
    lambda: f64,
    w0: Complex64,
    z0: Complex64,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
    t0: f64,
    t1: f64,
    config: &IntegratorConfig,
) -> Result<(Complex64, Complex64), DynamicsError> {
    assert!(lambda > 0.0, "eigenvalue must be positive");
    assert!(t0 <= t1, "t0 must not exceed t1");
    config.assert_valid();
    ModeIntegrator::new(lambda, c, b, config).advance((w0, z0), t0, t1)
}

/// Integrates every mode of `initial` independently over the sample grid.
/// Sample times must start at 0 and increase strictly; the returned
/// trajectory holds one state per sample. Mode independence is exact, and
/// per-mode results are collected in ascending mode order, so the output does
/// not depend on the thread count.
pub fn evolve(
    spectrum: &SpectrumModel,
    initial: &StateVector,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
    sample_times: &[f64],
    config: &IntegratorConfig,
) -> Result<Trajectory, DynamicsError> {
    config.assert_valid();
    assert_eq!(
        initial.mode_count(),
        spectrum.mode_count(),
        "initial state mode count must match the spectrum"
    );
    if sample_times.is_empty() || sample_times[0] != 0.0 {
        return Err(DynamicsError::InvalidSampleTimes);
    }
    for pair in sample_times.windows(2) {
        if !(pair[1].is_finite() && pair[1] > pair[0]) {
            return Err(DynamicsError::InvalidSampleTimes);
        }
    }

    let n_modes = spectrum.mode_count();
    let per_mode: Vec<Result<Vec<rk::Pair>, DynamicsError>> = par::map_indexed(n_modes, |k| {
        let lambda = spectrum.eigenvalue(k);
        let mut integrator = ModeIntegrator::new(lambda, c, b, config);
        let mut state = initial.amplitude(k);
        let mut samples = Vec::with_capacity(sample_times.len());
        samples.push(state);
        for pair in sample_times.windows(2) {
            state = integrator.advance(state, pair[0], pair[1])?;
            samples.push(state);
        }
        Ok(samples)
    });

    // Surface the lowest failing mode index for deterministic reporting.
    let mut columns = Vec::with_capacity(n_modes);
    for (mode, result) in per_mode.into_iter().enumerate() {
        match result {
            Ok(samples) => columns.push(samples),
            Err(source) => {
                return Err(DynamicsError::Mode {
                    mode,
                    lambda: spectrum.eigenvalue(mode),
                    source: Box::new(source),
                })
            }
        }
    }

    let states = (0..sample_times.len())
        .map(|i| {
            StateVector::new(columns.iter().map(|column| column[i]).collect())
                .map_err(|_| DynamicsError::NonFiniteState { t: sample_times[i] })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Trajectory::new(
        spectrum.clone(),
        sample_times.to_vec(),
        states,
        c.clone(),
        b.clone(),
    )
}

/// Analytic per-mode solution for constant speed `c0` and zero damping:
///
/// ```text
/// w(t) =  w0 cos(c0 sqrt(lambda) t) + (z0/c0) sin(c0 sqrt(lambda) t)
/// z(t) = -c0 w0 sin(c0 sqrt(lambda) t) + z0 cos(c0 sqrt(lambda) t)
/// ```
pub fn closed_form_constant(
    lambda: f64,
    w0: Complex64,
    z0: Complex64,
    c0: f64,
    t: f64,
) -> (Complex64, Complex64) {
    assert!(c0 > 0.0, "constant speed must be positive");
    assert!(lambda > 0.0, "eigenvalue must be positive");
    let theta = c0 * lambda.sqrt() * t;
    let (sin, cos) = theta.sin_cos();
    (
        w0 * cos + z0 / c0 * sin,
        -w0 * c0 * sin + z0 * cos,
    )
}

/// Energy functional `F = (1/2) sum |z_k|^2 + (1/2) c^2 sum |w_k|^2`
/// evaluated at a frozen speed value.
pub fn energy(state: &StateVector, c_value: f64) -> f64 {
    assert!(c_value > 0.0, "speed value must be positive");
    let mut kinetic = 0.0;
    let mut potential = 0.0;
    for (w, z) in state.amplitudes() {
        kinetic += z.norm_sqr();
        potential += w.norm_sqr();
    }
    0.5 * kinetic + 0.5 * c_value * c_value * potential
}

/// Lower bound on the energy along any solution:
///
/// ```text
/// F(t) >= F(S) exp( -2 ||b||_L1(0,inf) - (2/c0) Var(c; [0,inf)) ),  c0 = inf c.
/// ```
///
/// Smooth decay costs at most `exp(-2 integral |b| - (2/c0) integral |c'|)`
/// and a speed jump rescales `F` by at least `(c+/c-)^2 >= exp(-2|dc|/c0)`,
/// so the closed-form right-hand side is a true bound for every profile
/// family here (see `docs/gronwall_constant.md`).
pub fn energy_lower_bound(
    f_at_s: f64,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
) -> f64 {
    assert!(f_at_s > 0.0, "energy at the anchor time must be positive");
    let c0 = c.infimum();
    assert!(c0 > 0.0, "speed profile must satisfy inf c > 0");
    let b_l1 = b
        .l1_norm(0.0, f64::INFINITY)
        .expect("damping profile must be integrable");
    let var = c
        .total_variation(0.0, f64::INFINITY)
        .expect("total variation of a profile family is finite");
    f_at_s * (-2.0 * b_l1 - 2.0 / c0 * var).exp()
}

/// The stability constant `K1` entering the diagonalized Gronwall bound:
/// `K1 = ||Y|| ||Y^-1|| max(C_max, 1/c0, 1/c0^2)` with the closed-form
/// operator-norm bounds `||Y|| <= sqrt(2) max(1, C_max)` and
/// `||Y^-1|| <= (sqrt(2)/2) max(1, 1/c0)`. The derivation and validity proof
/// live in `docs/gronwall_constant.md`.
pub fn gronwall_constant(c: &CoefficientProfile) -> f64 {
    let c0 = c.infimum();
    assert!(c0 > 0.0, "speed profile must satisfy inf c > 0");
    let c_max = c.supremum();
    let y_norm = 2.0f64.sqrt() * c_max.max(1.0);
    let y_inv_norm = 2.0f64.sqrt() / 2.0 * (1.0 / c0).max(1.0);
    y_norm * y_inv_norm * c_max.max(1.0 / c0).max(1.0 / (c0 * c0))
}

/// A-priori bound on the drift of the diagonalized state between `s` and `t`
/// (`t` may be infinite):
///
/// ```text
/// ||y(t) - y(s)|| <= K1 (Var(c;[s,t]) + ||b||_L1(s,t))
///                    * exp( K1 Var(c;[0,inf)) + ||b||_L1(0,inf) ) * ||y(0)||.
/// ```
///
/// Used by the scattering module to certify profile truncation.
pub fn gronwall_tail_bound(
    y_norm_at_0: f64,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
    s: f64,
    t: f64,
) -> f64 {
    assert!(s <= t, "interval must satisfy s <= t");
    assert!(y_norm_at_0 >= 0.0, "norm must be non-negative");
    let k1 = gronwall_constant(c);
    let var_window = c
        .total_variation(s, t)
        .expect("total variation of a profile family is finite");
    let b_window = b
        .l1_norm(s, t)
        .expect("damping profile must be integrable");
    let var_total = c
        .total_variation(0.0, f64::INFINITY)
        .expect("total variation of a profile family is finite");
    let b_total = b
        .l1_norm(0.0, f64::INFINITY)
        .expect("damping profile must be integrable");
    k1 * (var_window + b_window) * (k1 * var_total + b_total).exp() * y_norm_at_0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero_damping() -> CoefficientProfile {
        CoefficientProfile::constant(0.0).unwrap()
    }

    #[test]
    fn closed_form_identity_and_quarter_period() {
        let (w0, z0) = (c64(0.4, -0.2), c64(1.1, 0.6));
        let (w, z) = closed_form_constant(2.5, w0, z0, 1.3, 0.0);
        assert_eq!((w, z), (w0, z0));

        // Quarter period: cos -> 0, sin -> 1.
        let (c0, lambda): (f64, f64) = (2.0, 4.0);
        let quarter = std::f64::consts::FRAC_PI_2 / (c0 * lambda.sqrt());
        let (w, z) = closed_form_constant(lambda, w0, z0, c0, quarter);
        assert_relative_eq!(w.re, (z0 / c0).re, max_relative = 1e-12);
        assert_relative_eq!(w.im, (z0 / c0).im, max_relative = 1e-12);
        assert_relative_eq!(z.re, (-w0 * c0).re, max_relative = 1e-12);
        assert_relative_eq!(z.im, (-w0 * c0).im, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_satisfies_the_mode_ode() {
        // Finite-difference oracle at h = 1e-6.
        let (lambda, c0) = (3.0, 1.7);
        let (w0, z0) = (c64(0.8, 0.1), c64(-0.3, 0.9));
        let h = 1e-6;
        for &t in &[0.3, 1.9, 7.4] {
            let (w_minus, z_minus) = closed_form_constant(lambda, w0, z0, c0, t - h);
            let (w, z) = closed_form_constant(lambda, w0, z0, c0, t);
            let (w_plus, z_plus) = closed_form_constant(lambda, w0, z0, c0, t + h);
            let dw = (w_plus - w_minus) / (2.0 * h);
            let dz = (z_plus - z_minus) / (2.0 * h);
            let rhs_w = lambda.sqrt() * z;
            let rhs_z = -c0 * c0 * lambda.sqrt() * w;
            assert!((dw - rhs_w).norm() < 1e-7);
            assert!((dz - rhs_z).norm() < 1e-7);
        }
    }

    #[test]
    fn evolve_mode_matches_constant_oracle() {
        // c = 2, b = 0, lambda = 1, (1, 0), t = pi/2: phase c sqrt(lambda) t = pi.
        let c = CoefficientProfile::constant(2.0).unwrap();
        let b = zero_damping();
        let config = IntegratorConfig::default();
        let (w, z) = evolve_mode(
            1.0,
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            &c,
            &b,
            0.0,
            std::f64::consts::FRAC_PI_2,
            &config,
        )
        .unwrap();
        assert_relative_eq!(w.re, -1.0, max_relative = 1e-9);
        assert!(w.im.abs() < 1e-10);
        assert!(z.norm() < 1e-8);
    }

    #[test]
    fn evolve_mode_zero_data_stays_zero() {
        let c = CoefficientProfile::power(1.0, 0.5, 2.0).unwrap();
        let b = CoefficientProfile::exp(0.0, 0.3, 1.0).unwrap();
        let (w, z) = evolve_mode(
            2.0,
            Complex64::ZERO,
            Complex64::ZERO,
            &c,
            &b,
            0.0,
            5.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert_eq!((w, z), (Complex64::ZERO, Complex64::ZERO));
    }

    #[test]
    fn evolve_mode_self_convergence() {
        // Reference at rel_tol 1e-13 stands in for a half-step Richardson run.
        let c = CoefficientProfile::power(1.0, 1.0, 2.0).unwrap();
        let b = zero_damping();
        let coarse = evolve_mode(
            1.0,
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            &c,
            &b,
            0.0,
            10.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let reference_config = IntegratorConfig {
            rel_tol: 1e-13,
            abs_tol: 1e-14,
            ..IntegratorConfig::default()
        };
        let reference = evolve_mode(
            1.0,
            c64(1.0, 0.0),
            c64(0.0, 0.0),
            &c,
            &b,
            0.0,
            10.0,
            &reference_config,
        )
        .unwrap();
        assert!((coarse.0 - reference.0).norm() < 1e-9);
        assert!((coarse.1 - reference.1).norm() < 1e-9);
    }

    #[test]
    fn evolve_single_mode_agrees_with_evolve_mode_bitwise() {
        let spectrum = SpectrumModel::new(vec![2.0]).unwrap();
        let initial = StateVector::new(vec![(c64(0.7, -0.4), c64(0.2, 1.0))]).unwrap();
        let c = CoefficientProfile::exp(1.0, 0.5, 1.0).unwrap();
        let b = CoefficientProfile::exp(0.0, 0.2, 1.0).unwrap();
        let config = IntegratorConfig::default();
        let trajectory = evolve(&spectrum, &initial, &c, &b, &[0.0, 3.0], &config).unwrap();
        let direct = evolve_mode(
            2.0,
            c64(0.7, -0.4),
            c64(0.2, 1.0),
            &c,
            &b,
            0.0,
            3.0,
            &config,
        )
        .unwrap();
        assert_eq!(trajectory.state(1).amplitude(0), direct);
    }

    #[test]
    fn evolve_decouples_modes_bitwise() {
        let spectrum = SpectrumModel::new(vec![1.0, 3.0, 7.5]).unwrap();
        let amps = vec![
            (c64(1.0, 0.2), c64(0.0, -0.5)),
            (c64(-0.3, 0.8), c64(0.6, 0.1)),
            (c64(0.05, -1.2), c64(0.9, 0.4)),
        ];
        let initial = StateVector::new(amps.clone()).unwrap();
        let c = CoefficientProfile::step(vec![0.0, 1.0, 2.5], vec![1.5, 0.9, 1.2]).unwrap();
        let b = zero_damping();
        let config = IntegratorConfig::default();
        let times = [0.0, 0.7, 2.0, 4.0];
        let joint = evolve(&spectrum, &initial, &c, &b, &times, &config).unwrap();
        for (k, &(w0, z0)) in amps.iter().enumerate() {
            let single = SpectrumModel::new(vec![spectrum.eigenvalue(k)]).unwrap();
            let single_initial = StateVector::new(vec![(w0, z0)]).unwrap();
            let solo = evolve(&single, &single_initial, &c, &b, &times, &config).unwrap();
            for i in 0..times.len() {
                assert_eq!(joint.state(i).amplitude(k), solo.state(i).amplitude(0));
            }
        }
    }

    #[test]
    fn evolve_is_homogeneous_in_initial_data() {
        // Scaling by a power of two with a negligible absolute tolerance
        // leaves the step-size decisions unchanged, so the trajectories
        // scale to rounding accuracy.
        let spectrum = SpectrumModel::new(vec![1.0, 4.0]).unwrap();
        let initial = StateVector::new(vec![
            (c64(0.9, -0.1), c64(0.3, 0.2)),
            (c64(-0.5, 0.6), c64(1.1, -0.7)),
        ])
        .unwrap();
        let alpha = 4.0;
        let scaled = initial.scale(c64(alpha, 0.0));
        let c = CoefficientProfile::power(1.0, 1.0, 2.0).unwrap();
        let b = CoefficientProfile::power(0.0, 1.0, 2.0).unwrap();
        let config = IntegratorConfig {
            abs_tol: 1e-300,
            ..IntegratorConfig::default()
        };
        let times = [0.0, 1.0, 5.0, 20.0];
        let base = evolve(&spectrum, &initial, &c, &b, &times, &config).unwrap();
        let big = evolve(&spectrum, &scaled, &c, &b, &times, &config).unwrap();
        for i in 0..times.len() {
            let expected = base.state(i).scale(c64(alpha, 0.0));
            let gap = big.state(i).sub(&expected).norm();
            assert!(
                gap <= 1e-12 * expected.norm().max(1.0),
                "homogeneity defect {gap} at sample {i}"
            );
        }
    }

    #[test]
    fn evolve_rejects_bad_sample_times() {
        let spectrum = SpectrumModel::new(vec![1.0]).unwrap();
        let initial = StateVector::zero(1);
        let c = CoefficientProfile::constant(1.0).unwrap();
        let b = zero_damping();
        let config = IntegratorConfig::default();
        assert_eq!(
            evolve(&spectrum, &initial, &c, &b, &[], &config).unwrap_err(),
            DynamicsError::InvalidSampleTimes
        );
        assert_eq!(
            evolve(&spectrum, &initial, &c, &b, &[0.5, 1.0], &config).unwrap_err(),
            DynamicsError::InvalidSampleTimes
        );
        assert_eq!(
            evolve(&spectrum, &initial, &c, &b, &[0.0, 1.0, 1.0], &config).unwrap_err(),
            DynamicsError::InvalidSampleTimes
        );
    }

    #[test]
    fn evolve_reports_non_finite_blowup_with_mode_tag() {
        let spectrum = SpectrumModel::new(vec![1.0, 100.0]).unwrap();
        let initial = StateVector::new(vec![
            (c64(1.0, 0.0), c64(0.0, 0.0)),
            (c64(1e308, 0.0), c64(0.0, 0.0)),
        ])
        .unwrap();
        let c = CoefficientProfile::constant(10.0).unwrap();
        let b = zero_damping();
        let err = evolve(
            &spectrum,
            &initial,
            &c,
            &b,
            &[0.0, 1.0],
            &IntegratorConfig::default(),
        )
        .unwrap_err();
        match err {
            DynamicsError::Mode { mode, source, .. } => {
                assert_eq!(mode, 1);
                assert!(matches!(*source, DynamicsError::NonFiniteState { .. }));
            }
            other => panic!("expected mode-tagged error, got {other:?}"),
        }
    }

    #[test]
    fn energy_closed_forms() {
        assert_eq!(energy(&StateVector::zero(3), 1.0), 0.0);
        let state = StateVector::new(vec![(c64(1.0, 0.0), c64(0.0, 0.0))]).unwrap();
        assert_eq!(energy(&state, 2.0), 2.0);
    }

    #[test]
    fn energy_is_conserved_along_the_free_closed_form() {
        let (lambda, c0) = (4.0, 1.5);
        let (w0, z0) = (c64(0.6, -0.8), c64(1.2, 0.3));
        let f0 = 0.5 * z0.norm_sqr() + 0.5 * c0 * c0 * w0.norm_sqr();
        for step in 1..=50 {
            let t = step as f64 * 0.37;
            let (w, z) = closed_form_constant(lambda, w0, z0, c0, t);
            let f = 0.5 * z.norm_sqr() + 0.5 * c0 * c0 * w.norm_sqr();
            assert_relative_eq!(f, f0, max_relative = 1e-10);
        }
    }

    #[test]
    fn energy_lower_bound_closed_forms() {
        let c = CoefficientProfile::constant(2.0).unwrap();
        assert_eq!(energy_lower_bound(3.0, &c, &zero_damping()), 3.0);

        let c_unit = CoefficientProfile::constant(1.0).unwrap();
        let b = CoefficientProfile::exp(0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            energy_lower_bound(1.0, &c_unit, &b),
            (-2.0f64).exp(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn gronwall_bound_vanishes_for_constant_free_coefficients() {
        let c = CoefficientProfile::constant(1.0).unwrap();
        let b = zero_damping();
        for &(s, t) in &[(0.0, 1.0), (2.0, 50.0), (0.0, f64::INFINITY)] {
            assert_eq!(gronwall_tail_bound(1.0, &c, &b, s, t), 0.0);
        }
    }

    #[test]
    fn gronwall_bound_is_monotone_in_the_interval() {
        let c = CoefficientProfile::power(1.0, 0.5, 2.0).unwrap();
        let b = CoefficientProfile::exp(0.0, 0.4, 0.5).unwrap();
        let narrow = gronwall_tail_bound(2.0, &c, &b, 1.0, 3.0);
        let wide = gronwall_tail_bound(2.0, &c, &b, 1.0, 8.0);
        assert!(wide >= narrow);
        let tail = gronwall_tail_bound(2.0, &c, &b, 1.0, f64::INFINITY);
        assert!(tail >= wide);
    }
}
