//! Scattering constructions: diagonalization, asymptotic profiles, free-wave
//! reconstruction, discrepancies, and wave-speed identification.
//!
//! With `tau(t) = integral_0^t c` and phases `e^{+-i tau(t) sqrt(lambda)}`,
//! the change of variables `y = Y(t)^{-1} x` splits each mode into a forward
//! and a backward rotating component. Along any solution, `y(t)` converges to
//! a limit profile `y_inf`; its truncation error is certified a priori by the
//! Gronwall tail bound. When the drift `f(t) = tau(t) - c_inf t` converges,
//! phase-correcting the profile by `f_inf` produces the unique free wave that
//! the solution approaches; when the drift diverges, the rotating phases
//! defeat every fixed candidate, which is what the necessity witness checks.

use crate::coefficients::{CoefficientProfile, DriftClassification};
use crate::dynamics::{
    self, energy_lower_bound, evolve, gronwall_tail_bound, DynamicsError, IntegratorConfig,
    Trajectory,
};
use crate::spectrum::{SpectrumModel, StateVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error("tail bound cannot reach tolerance {tol}")]
    ToleranceUnreachable { tol: f64 },
    #[error("drift does not converge; no limiting free wave exists")]
    DriftNotConvergent,
    #[error("wave-speed estimation needs a non-trivial trajectory")]
    TrivialTrajectory,
    #[error("trajectory does not cover the requested horizon {t}")]
    HorizonNotCovered { t: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// Per-mode limits `(y1_inf, y2_inf)` of the diagonalized state, with the
/// truncation time and the a-priori certificate
/// `||y(t) - profile|| <= eps_tail` for every `t >= t_trunc`.
#[derive(Debug, Clone)]
pub struct ScatteringProfile {
    profile: StateVector,
    t_trunc: f64,
    eps_tail: f64,
    initial_y_norm: f64,
}

impl ScatteringProfile {
    pub fn state(&self) -> &StateVector {
        &self.profile
    }

    pub fn t_trunc(&self) -> f64 {
        self.t_trunc
    }

    pub fn eps_tail(&self) -> f64 {
        self.eps_tail
    }

    /// `||y(0)||`, recorded at extraction time; feeds later tail bounds.
    pub fn initial_y_norm(&self) -> f64 {
        self.initial_y_norm
    }

    pub fn norm(&self) -> f64 {
        self.profile.norm()
    }
}

/// Wave speed and per-mode amplitudes `(phi_k, psi_k)` of a free wave
///
/// ```text
/// w_k(t) = e^{i c* t sqrt(lambda_k)} phi_k + e^{-i c* t sqrt(lambda_k)} psi_k
/// z_k(t) = i c* ( e^{i c* t sqrt(lambda_k)} phi_k - e^{-i c* t sqrt(lambda_k)} psi_k )
/// ```
#[derive(Debug, Clone)]
pub struct FreeSolution {
    c_star: f64,
    amplitudes: StateVector,
}

impl FreeSolution {
    pub fn new(c_star: f64, amplitudes: StateVector) -> Self {
        assert!(c_star > 0.0, "wave speed must be positive");
        Self { c_star, amplitudes }
    }

    pub fn c_star(&self) -> f64 {
        self.c_star
    }

    /// Per-mode pairs `(phi_k, psi_k)`.
    pub fn amplitudes(&self) -> &StateVector {
        &self.amplitudes
    }
}

/// Transforms a physical state into diagonalized coordinates at time `t`:
/// per mode, with `theta = tau(t) sqrt(lambda)` and `cv = c(t)`,
///
/// ```text
/// y1 = (1/2) e^{-i theta} (w - i z / cv)
/// y2 = (1/2) e^{ i theta} (w + i z / cv)
/// ```
pub fn diagonalize(
    state: &StateVector,
    t: f64,
    c: &CoefficientProfile,
    spectrum: &SpectrumModel,
) -> StateVector {
    assert_eq!(state.mode_count(), spectrum.mode_count(), "mode mismatch");
    let tau = c.antiderivative(t).expect("t must be non-negative");
    let cv = c.eval(t).expect("t must be non-negative");
    let i = Complex64::I;
    let amplitudes = state
        .amplitudes()
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&(w, z), &lambda)| {
            let phase = Complex64::from_polar(1.0, tau * lambda.sqrt());
            let minus = 0.5 * (w - i * z / cv) / phase;
            let plus = 0.5 * (w + i * z / cv) * phase;
            (minus, plus)
        })
        .collect();
    StateVector::new(amplitudes).expect("diagonalized state is finite")
}

/// Inverse of [`diagonalize`] at the same `(t, c)`:
///
/// ```text
/// w = e^{i theta} y1 + e^{-i theta} y2
/// z = i cv ( e^{i theta} y1 - e^{-i theta} y2 )
/// ```
pub fn undiagonalize(
    y: &StateVector,
    t: f64,
    c: &CoefficientProfile,
    spectrum: &SpectrumModel,
) -> StateVector {
    assert_eq!(y.mode_count(), spectrum.mode_count(), "mode mismatch");
    let tau = c.antiderivative(t).expect("t must be non-negative");
    let cv = c.eval(t).expect("t must be non-negative");
    let i = Complex64::I;
    let amplitudes = y
        .amplitudes()
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&(y1, y2), &lambda)| {
            let phase = Complex64::from_polar(1.0, tau * lambda.sqrt());
            let w = phase * y1 + y2 / phase;
            let z = i * cv * (phase * y1 - y2 / phase);
            (w, z)
        })
        .collect();
    StateVector::new(amplitudes).expect("physical state is finite")
}

/// Extracts the asymptotic profile `y_inf` with certified truncation error:
/// picks the smallest horizon `t_trunc` (by bisection on the closed-form tail
/// bound) such that the remaining drift of `y` beyond `t_trunc` is at most
/// `tol`, integrates up to it, and returns `y(t_trunc)` with the certificate.
pub fn extract_profile(
    spectrum: &SpectrumModel,
    initial: &StateVector,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
    tol: f64,
    config: &IntegratorConfig,
) -> Result<ScatteringProfile, ScatterError> {
    assert!(tol > 0.0, "tolerance must be positive");
    let y0 = diagonalize(initial, 0.0, c, spectrum);
    let y0_norm = y0.norm();
    let tail = |t: f64| gronwall_tail_bound(y0_norm, c, b, t, f64::INFINITY);

    let t_trunc = if tail(0.0) <= tol {
        0.0
    } else {
        let mut hi = 1.0;
        let mut doublings = 0;
        while tail(hi) > tol {
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 {
                return Err(ScatterError::ToleranceUnreachable { tol });
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tail(mid) <= tol {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    let profile = if t_trunc == 0.0 {
        y0
    } else {
        let trajectory = evolve(spectrum, initial, c, b, &[0.0, t_trunc], config)?;
        diagonalize(trajectory.state(1), t_trunc, c, spectrum)
    };

    Ok(ScatteringProfile {
        profile,
        t_trunc,
        eps_tail: tail(t_trunc),
        initial_y_norm: y0_norm,
    })
}

/// Builds the limiting free wave from a profile when the drift converges:
/// `phi = e^{i f_inf sqrt(lambda)} y1_inf`, `psi = e^{-i f_inf sqrt(lambda)}
/// y2_inf`, wave speed `c_inf`. A divergent drift is an error: no free wave
/// approximates the solution in that regime.
pub fn reconstruct_free(
    profile: &ScatteringProfile,
    drift: &DriftClassification,
    c_inf: f64,
    spectrum: &SpectrumModel,
) -> Result<FreeSolution, ScatterError> {
    let f_inf = drift.f_inf().ok_or(ScatterError::DriftNotConvergent)?;
    assert!(c_inf > 0.0, "limit speed must be positive");
    let amplitudes = profile
        .state()
        .amplitudes()
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&(y1, y2), &lambda)| {
            let phase = Complex64::from_polar(1.0, f_inf * lambda.sqrt());
            (phase * y1, y2 / phase)
        })
        .collect();
    Ok(FreeSolution::new(
        c_inf,
        StateVector::new(amplitudes).expect("free amplitudes are finite"),
    ))
}

/// State of the free wave at time `t`.
pub fn free_state(free: &FreeSolution, t: f64, spectrum: &SpectrumModel) -> StateVector {
    assert_eq!(
        free.amplitudes.mode_count(),
        spectrum.mode_count(),
        "mode mismatch"
    );
    let c_star = free.c_star;
    let i = Complex64::I;
    let amplitudes = free
        .amplitudes
        .amplitudes()
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&(phi, psi), &lambda)| {
            let phase = Complex64::from_polar(1.0, c_star * t * lambda.sqrt());
            let w = phase * phi + psi / phase;
            let z = i * c_star * (phase * phi - psi / phase);
            (w, z)
        })
        .collect();
    StateVector::new(amplitudes).expect("free state is finite")
}

/// Energy-norm gap `D(t) = ||w_u - w_v|| + ||z_u - z_v||` between a state and
/// the free wave at time `t`.
pub fn discrepancy(
    u_state: &StateVector,
    free: &FreeSolution,
    t: f64,
    spectrum: &SpectrumModel,
) -> f64 {
    let v_state = free_state(free, t, spectrum);
    let gap = u_state.sub(&v_state);
    gap.first_norm() + gap.second_norm()
}

/// The unique free wave with speed `c_star` whose state equals `u_state` at
/// `t0`: per mode, with `theta = c_star t0 sqrt(lambda)`,
///
/// ```text
/// phi = (1/2) e^{-i theta} (w - i z / c_star)
/// psi = (1/2) e^{ i theta} (w + i z / c_star)
/// ```
pub fn best_free_fit(
    u_state: &StateVector,
    t0: f64,
    c_star: f64,
    spectrum: &SpectrumModel,
) -> FreeSolution {
    assert!(t0 >= 0.0, "anchor time must be non-negative");
    assert!(c_star > 0.0, "wave speed must be positive");
    assert_eq!(u_state.mode_count(), spectrum.mode_count(), "mode mismatch");
    let i = Complex64::I;
    let amplitudes = u_state
        .amplitudes()
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&(w, z), &lambda)| {
            let phase = Complex64::from_polar(1.0, c_star * t0 * lambda.sqrt());
            let phi = 0.5 * (w - i * z / c_star) / phase;
            let psi = 0.5 * (w + i * z / c_star) * phase;
            (phi, psi)
        })
        .collect();
    FreeSolution::new(
        c_star,
        StateVector::new(amplitudes).expect("fitted amplitudes are finite"),
    )
}

/// Closed-form time average of the cross term of a free wave:
///
/// ```text
/// (1/T) integral_0^T (e^{2 i c* t A^{1/2}} phi, psi) dt
///   = sum_k phi_k conj(psi_k) (e^{2 i c* T sqrt(lambda_k)} - 1)
///     / (2 i c* T sqrt(lambda_k))
/// ```
pub fn time_average_cross(free: &FreeSolution, t_avg: f64, spectrum: &SpectrumModel) -> Complex64 {
    assert!(t_avg > 0.0, "averaging horizon must be positive");
    assert_eq!(
        free.amplitudes.mode_count(),
        spectrum.mode_count(),
        "mode mismatch"
    );
    let c_star = free.c_star;
    let i = Complex64::I;
    free.amplitudes
        .amplitudes()
        .iter()
        .zip(spectrum.eigenvalues())
        .fold(Complex64::ZERO, |acc, (&(phi, psi), &lambda)| {
            let omega = 2.0 * c_star * lambda.sqrt();
            let rotation = Complex64::from_polar(1.0, omega * t_avg) - 1.0;
            acc + phi * psi.conj() * rotation / (i * omega * t_avg)
        })
}

/// Closed-form constant `sum_k |phi_k psi_k| / (c* sqrt(lambda_k))` bounding
/// `|time_average_cross(T)| * T` for every `T > 0`.
pub fn cross_average_bound(free: &FreeSolution, spectrum: &SpectrumModel) -> f64 {
    free.amplitudes
        .amplitudes()
        .iter()
        .zip(spectrum.eigenvalues())
        .fold(0.0, |acc, (&(phi, psi), &lambda)| {
            acc + (phi * psi.conj()).norm() / (free.c_star * lambda.sqrt())
        })
}

/// Equipartition defect of a free wave: the gap between the time-averaged
/// potential energy (scaled by `c*^2`) and kinetic energy over `[0, T]`,
///
/// ```text
/// defect(T) = | c*^2 (1/T) int ||w_v||^2 - (1/T) int ||z_v||^2 |
///           = 4 c*^2 | Re time_average_cross(T) |.
/// ```
pub fn equipartition_defect(free: &FreeSolution, t_avg: f64, spectrum: &SpectrumModel) -> f64 {
    4.0 * free.c_star * free.c_star * time_average_cross(free, t_avg, spectrum).re.abs()
}

/// Closed-form constant bounding `equipartition_defect(T) * T` uniformly:
/// `4 c* sum_k |phi_k psi_k| / sqrt(lambda_k)`.
pub fn equipartition_bound_constant(free: &FreeSolution, spectrum: &SpectrumModel) -> f64 {
    4.0 * free.c_star * free.c_star * cross_average_bound(free, spectrum)
}

/// Wave-speed estimate from the time-averaged energy ratio over `[0, T]`:
///
/// ```text
/// c_est(T) = sqrt( int_0^T ||z(t)||^2 dt / int_0^T ||w(t)||^2 dt )
/// ```
///
/// with trapezoid integrals over the trajectory samples. For resolved cross
/// terms the samples should be no coarser than `min(0.05, period/20)` of the
/// fastest mode. The estimate is invariant under scaling the initial data and
/// converges to `c_inf` at rate `O(1/T)`.
pub fn estimate_wave_speed(trajectory: &Trajectory, t_max: f64) -> Result<f64, ScatterError> {
    assert!(t_max > 0.0, "averaging horizon must be positive");
    let times = trajectory.times();
    let cover = *times.last().expect("trajectory is non-empty");
    if cover < t_max * (1.0 - 1e-12) {
        return Err(ScatterError::HorizonNotCovered { t: t_max });
    }
    let mut int_w = 0.0;
    let mut int_z = 0.0;
    let mut prev_t = times[0];
    let mut prev_w = trajectory.state(0).first_norm().powi(2);
    let mut prev_z = trajectory.state(0).second_norm().powi(2);
    for (&t, state) in times.iter().zip(trajectory.states()).skip(1) {
        if t > t_max * (1.0 + 1e-12) {
            break;
        }
        let w = state.first_norm().powi(2);
        let z = state.second_norm().powi(2);
        let dt = t - prev_t;
        int_w += 0.5 * (prev_w + w) * dt;
        int_z += 0.5 * (prev_z + z) * dt;
        prev_t = t;
        prev_w = w;
        prev_z = z;
    }
    if int_w <= 0.0 {
        return Err(ScatterError::TrivialTrajectory);
    }
    Ok((int_z / int_w).sqrt())
}

/// Phase-corrected distance between a profile and free-wave amplitudes:
///
/// ```text
/// || e^{i d sqrt(lambda)} y1_inf - phi || + || e^{-i d sqrt(lambda)} y2_inf - psi ||
/// ```
///
/// With `d = f(t)` and `c(t) = c_inf` this is the diagonalized-frame
/// discrepancy, so it vanishes exactly when the phase-corrected profile
/// converges to the free amplitudes.
pub fn phase_profile_error(
    profile: &ScatteringProfile,
    free: &FreeSolution,
    drift_value: f64,
    spectrum: &SpectrumModel,
) -> f64 {
    let mut first_sq = 0.0;
    let mut second_sq = 0.0;
    for ((&(y1, y2), &(phi, psi)), &lambda) in profile
        .state()
        .amplitudes()
        .iter()
        .zip(free.amplitudes.amplitudes())
        .zip(spectrum.eigenvalues())
    {
        let phase = Complex64::from_polar(1.0, drift_value * lambda.sqrt());
        first_sq += (phase * y1 - phi).norm_sqr();
        second_sq += (y2 / phase - psi).norm_sqr();
    }
    first_sq.sqrt() + second_sq.sqrt()
}

/// Closed-form upper bound on the discrepancy `D(T)` between the solution and
/// the free wave reconstructed from `profile`, valid for every `T >= 0`:
///
/// ```text
/// D(T) <= sqrt(2) (1 + C_max) eps(T)
///         + (1 + c_inf) (A1 + A2)
///         + |c(T) - c_inf| (||y1_inf|| + ||y2_inf||)
/// ```
///
/// where `eps(T)` is the Gronwall bound on `||y(T) - y(t_trunc)||`, and
/// `A1, A2` are the exact norms of `(e^{+-i (f(T) - f_inf) sqrt(lambda)} - 1)`
/// applied to the profile components (the phase tail). Every term is closed
/// form; the bound certifies the approach to the free wave without further
/// simulation.
pub fn free_approach_certificate(
    profile: &ScatteringProfile,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
    spectrum: &SpectrumModel,
    t: f64,
) -> Result<f64, ScatterError> {
    let drift_class = c.classify_drift();
    let f_inf = drift_class.f_inf().ok_or(ScatterError::DriftNotConvergent)?;
    let c_inf = c.limit_value();
    let c_max = c.supremum();

    let lo = t.min(profile.t_trunc());
    let hi = t.max(profile.t_trunc());
    let eps = gronwall_tail_bound(profile.initial_y_norm(), c, b, lo, hi);

    let delta_f = c.drift(t).expect("t must be non-negative") - f_inf;
    let mut phase_first_sq = 0.0;
    let mut phase_second_sq = 0.0;
    for (&(y1, y2), &lambda) in profile.state().amplitudes().iter().zip(spectrum.eigenvalues())
    {
        let gap = 2.0 * (0.5 * delta_f * lambda.sqrt()).sin().abs();
        phase_first_sq += gap * gap * y1.norm_sqr();
        phase_second_sq += gap * gap * y2.norm_sqr();
    }
    let phase_tail = phase_first_sq.sqrt() + phase_second_sq.sqrt();

    let speed_gap = (c.eval(t).expect("t must be non-negative") - c_inf).abs();
    let amplitude_sum = profile.state().first_norm() + profile.state().second_norm();

    Ok(2.0f64.sqrt() * (1.0 + c_max) * eps
        + (1.0 + c_inf) * phase_tail
        + speed_gap * amplitude_sum)
}

/// Positive lower bound on the profile norm from the energy lower bound:
/// `||y(t)||^2 = F(t) / c(t)^2 >= F_lb / C_max^2`, so a non-trivial initial
/// state forces a non-trivial scattering profile.
pub fn profile_norm_lower_bound(
    initial: &StateVector,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
) -> f64 {
    let f0 = dynamics::energy(initial, c.eval(0.0).expect("profile evaluates at 0"));
    if f0 == 0.0 {
        return 0.0;
    }
    energy_lower_bound(f0, c, b).sqrt() / c.supremum()
}

/// Horizon `T*` at which the drift has advanced by a half turn of the slowest
/// mode past the anchor: solves `f(T*) - f(t0) = pi / sqrt(lambda_min)`.
/// Returns `None` when the drift never advances that far (convergent or
/// downward drift).
///
/// The witness built on this horizon defeats any single candidate fitted at
/// the anchor: by the intermediate value theorem every mode passes through
/// antiphase somewhere in `[t0, T*]`. A finite run can only ever defeat the
/// candidates it constructs, not quantify over all free waves at once; the
/// anchored candidate is the checkable shadow of the full statement.
pub fn necessity_horizon(
    c: &CoefficientProfile,
    t0: f64,
    spectrum: &SpectrumModel,
) -> Option<f64> {
    let target = c.drift(t0).expect("anchor time must be non-negative")
        + std::f64::consts::PI / spectrum.min_eigenvalue().sqrt();
    let mut hi = t0.max(1.0);
    let mut doublings = 0;
    while c.drift(hi).expect("horizon is non-negative") < target {
        hi *= 2.0;
        doublings += 1;
        if doublings > 400 {
            return None;
        }
    }
    let mut lo = t0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if c.drift(mid).expect("midpoint is non-negative") < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}
