//! Shared test-side oracles, independent of the library implementation paths
//! they check: an adaptive Simpson integrator, a fixed-step RK4 stepper, and
//! a seeded random-scenario generator.

#![allow(dead_code)]

use num_complex::Complex64;
use scatwave_core::coefficients::CoefficientProfile;
use scatwave_core::experiments::rng;
use scatwave_core::spectrum::{SpectrumModel, StateVector};

/// Adaptive Simpson quadrature with Richardson correction (test oracle).
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn go(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let refined = left + right;
        if depth == 0 || (refined - whole).abs() <= 15.0 * tol {
            return refined + (refined - whole) / 15.0;
        }
        go(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + go(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    go(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 60)
}

/// Adaptive Simpson with explicit interior split points.
pub fn integrate_with_splits(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    splits: &[f64],
    tol: f64,
) -> f64 {
    let mut points: Vec<f64> = splits.iter().copied().filter(|&s| s > a && s < b).collect();
    points.push(a);
    points.push(b);
    points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    points.dedup();
    let pieces = (points.len() - 1).max(1) as f64;
    points
        .windows(2)
        .map(|pair| integrate(f, pair[0], pair[1], tol / pieces))
        .sum()
}

/// Fixed-step classical RK4 for one mode of the first-order system
/// `w' = sqrt(lambda) z`, `z' = -c(t)^2 sqrt(lambda) w - b(t) z`.
/// Completely independent of the library's adaptive stepper.
#[allow(clippy::too_many_arguments)]
pub fn rk4_mode(
    lambda: f64,
    mut w: Complex64,
    mut z: Complex64,
    c: &CoefficientProfile,
    b: &CoefficientProfile,
    t0: f64,
    t1: f64,
    steps: usize,
) -> (Complex64, Complex64) {
    let root = lambda.sqrt();
    let h = (t1 - t0) / steps as f64;
    let rhs = |t: f64, w: Complex64, z: Complex64| {
        let cv = c.eval(t).unwrap();
        let bv = b.eval(t).unwrap();
        (root * z, -cv * cv * root * w - bv * z)
    };
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let (k1w, k1z) = rhs(t, w, z);
        let (k2w, k2z) = rhs(t + 0.5 * h, w + 0.5 * h * k1w, z + 0.5 * h * k1z);
        let (k3w, k3z) = rhs(t + 0.5 * h, w + 0.5 * h * k2w, z + 0.5 * h * k2z);
        let (k4w, k4z) = rhs(t + h, w + h * k3w, z + h * k3z);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    }
    (w, z)
}

/// Seeded random scenario: spectrum of up to six modes, a speed profile from
/// any family (inf c > 0), an integrable damping, and Gaussian data.
pub fn random_scenario(
    seed: u64,
) -> (
    SpectrumModel,
    StateVector,
    CoefficientProfile,
    CoefficientProfile,
) {
    let mut stream = rng::stream(seed);
    let mode_count = 1 + (rng::uniform_in(&mut stream, 0.0, 5.0) as usize).min(5);
    let mut modes = Vec::with_capacity(mode_count);
    let mut lambda = rng::uniform_in(&mut stream, 0.3, 1.5);
    for _ in 0..mode_count {
        modes.push(lambda);
        lambda += rng::uniform_in(&mut stream, 0.2, 2.0);
    }
    let spectrum = SpectrumModel::new(modes).unwrap();

    let speed = match rng::uniform_in(&mut stream, 0.0, 5.0) as usize {
        0 => CoefficientProfile::constant(rng::uniform_in(&mut stream, 0.6, 2.0)).unwrap(),
        1 => {
            let c_inf = rng::uniform_in(&mut stream, 0.7, 1.8);
            let amplitude = rng::uniform_in(&mut stream, -(c_inf - 0.1), 1.0);
            let exponent = rng::uniform_in(&mut stream, 0.4, 3.0);
            CoefficientProfile::power(c_inf, amplitude, exponent).unwrap()
        }
        2 => {
            let c_inf = rng::uniform_in(&mut stream, 0.7, 1.8);
            let amplitude = rng::uniform_in(&mut stream, -(c_inf - 0.1), 1.0);
            let rate = rng::uniform_in(&mut stream, 0.3, 2.0);
            CoefficientProfile::exp(c_inf, amplitude, rate).unwrap()
        }
        3 => {
            let t1 = rng::uniform_in(&mut stream, 0.5, 3.0);
            let t2 = t1 + rng::uniform_in(&mut stream, 0.5, 4.0);
            let values = vec![
                rng::uniform_in(&mut stream, 0.5, 2.0),
                rng::uniform_in(&mut stream, 0.5, 2.0),
                rng::uniform_in(&mut stream, 0.5, 2.0),
            ];
            CoefficientProfile::piecewise_linear(vec![0.0, t1, t2], values).unwrap()
        }
        _ => {
            let t1 = rng::uniform_in(&mut stream, 0.5, 3.0);
            let t2 = t1 + rng::uniform_in(&mut stream, 0.5, 4.0);
            let values = vec![
                rng::uniform_in(&mut stream, 0.5, 2.0),
                rng::uniform_in(&mut stream, 0.5, 2.0),
                rng::uniform_in(&mut stream, 0.5, 2.0),
            ];
            CoefficientProfile::step(vec![0.0, t1, t2], values).unwrap()
        }
    };
    speed.validate_speed().unwrap();

    let damping = match rng::uniform_in(&mut stream, 0.0, 3.0) as usize {
        0 => CoefficientProfile::constant(0.0).unwrap(),
        1 => CoefficientProfile::exp(
            0.0,
            rng::uniform_in(&mut stream, -0.3, 0.8),
            rng::uniform_in(&mut stream, 0.3, 2.0),
        )
        .unwrap(),
        _ => CoefficientProfile::power(
            0.0,
            rng::uniform_in(&mut stream, -0.3, 0.8),
            rng::uniform_in(&mut stream, 1.5, 3.0),
        )
        .unwrap(),
    };

    let initial = rng::gaussian_state(seed ^ 0x9e37_79b9_7f4a_7c15, mode_count);
    (spectrum, initial, speed, damping)
}
