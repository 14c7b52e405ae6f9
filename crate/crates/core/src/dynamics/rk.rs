//! Embedded Dormand-Prince 5(4) stepper for the per-mode system
//!
//! ```text
//! w' = sqrt(lambda) z,    z' = -c(t)^2 sqrt(lambda) w - b(t) z
//! ```
//!
//! with adaptive step control on the complex pair (w, z). Integration spans
//! are split by the caller at coefficient breakpoints, and the coefficient
//! closures evaluate left limits at the span's right endpoint, so the stepper
//! only ever sees a smooth coefficient.

use super::{DynamicsError, IntegratorConfig};
use num_complex::Complex64;

pub(crate) type Pair = (Complex64, Complex64);

// Dormand-Prince coefficients. The embedded-error weights are formed as
// differences of the fifth- and fourth-order weights at runtime.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const SHRINK_LIMIT: f64 = 0.2;
const GROW_LIMIT: f64 = 5.0;

fn axpy(y: Pair, h: f64, terms: &[(f64, Pair)]) -> Pair {
    let mut w = y.0;
    let mut z = y.1;
    for &(coeff, (kw, kz)) in terms {
        w += h * coeff * kw;
        z += h * coeff * kz;
    }
    (w, z)
}

/// Integrates one smooth span `[t0, t1]`, returning the final state and the
/// updated step-size hint. `c_at` and `b_at` must be smooth on the closed
/// span (the caller substitutes left limits at `t1`).
#[allow(clippy::too_many_arguments)]
pub(crate) fn integrate_span(
    sqrt_lambda: f64,
    c_at: &impl Fn(f64) -> f64,
    b_at: &impl Fn(f64) -> f64,
    state: Pair,
    t0: f64,
    t1: f64,
    config: &IntegratorConfig,
    h_hint: f64,
) -> Result<(Pair, f64), DynamicsError> {
    debug_assert!(t1 >= t0);
    let derivative = |t: f64, (w, z): Pair| -> Pair {
        let cv = c_at(t);
        let bv = b_at(t);
        (
            sqrt_lambda * z,
            -cv * cv * sqrt_lambda * w - bv * z,
        )
    };

    let eps = f64::EPSILON;
    let mut t = t0;
    let mut y = state;
    let mut hint = h_hint;
    loop {
        let remaining = t1 - t;
        if remaining <= 4.0 * eps * t.abs().max(1.0) {
            return Ok((y, hint));
        }
        let mut h = hint.min(config.max_step).min(remaining);
        loop {
            let (y_new, err) = dp45_step(&derivative, t, h, y, config);
            if !(y_new.0.re.is_finite()
                && y_new.0.im.is_finite()
                && y_new.1.re.is_finite()
                && y_new.1.im.is_finite())
            {
                return Err(DynamicsError::NonFiniteState { t });
            }
            if err <= 1.0 {
                let factor = (SAFETY * err.powf(-0.2)).clamp(SHRINK_LIMIT, GROW_LIMIT);
                hint = (h * factor).min(config.max_step);
                t += h;
                y = y_new;
                break;
            }
            let factor = (SAFETY * err.powf(-0.2)).clamp(SHRINK_LIMIT, 1.0);
            h *= factor;
            if h < 16.0 * eps * t.abs().max(1.0) {
                return Err(DynamicsError::StepSizeUnderflow { t });
            }
        }
    }
}

fn dp45_step(
    derivative: &impl Fn(f64, Pair) -> Pair,
    t: f64,
    h: f64,
    y: Pair,
    config: &IntegratorConfig,
) -> (Pair, f64) {
    let k1 = derivative(t, y);
    let k2 = derivative(t + C2 * h, axpy(y, h, &[(A21, k1)]));
    let k3 = derivative(t + C3 * h, axpy(y, h, &[(A31, k1), (A32, k2)]));
    let k4 = derivative(t + C4 * h, axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
    let k5 = derivative(
        t + C5 * h,
        axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]),
    );
    let k6 = derivative(
        t + h,
        axpy(
            y,
            h,
            &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)],
        ),
    );
    let y_new = axpy(
        y,
        h,
        &[
            (B5[0], k1),
            (B5[2], k3),
            (B5[3], k4),
            (B5[4], k5),
            (B5[5], k6),
        ],
    );
    let k7 = derivative(t + h, y_new);

    let ks = [k1, k2, k3, k4, k5, k6, k7];
    let mut err_w = Complex64::ZERO;
    let mut err_z = Complex64::ZERO;
    for (i, k) in ks.iter().enumerate() {
        let weight = B5[i] - B4[i];
        err_w += weight * k.0;
        err_z += weight * k.1;
    }
    err_w *= h;
    err_z *= h;

    let old_norm = (y.0.norm_sqr() + y.1.norm_sqr()).sqrt();
    let new_norm = (y_new.0.norm_sqr() + y_new.1.norm_sqr()).sqrt();
    let scale = config.abs_tol + config.rel_tol * old_norm.max(new_norm);
    let err = (err_w.norm_sqr() + err_z.norm_sqr()).sqrt() / scale;
    (y_new, err)
}
