//! Mollification of coefficient profiles against a fixed polynomial bump.
//!
//! The kernel is `rho(u) = (15/16)(1 - u^2)^2` on `[-1, 1]`, zero outside:
//! non-negative, unit mass, and C^1. With `rho_delta(x) = rho(x/delta)/delta`
//! and the extension `c~(t) = c(0)` for `t < 0`,
//!
//! ```text
//! c_delta(t)  = integral rho(u) c~(t + delta u) du          over [-1, 1]
//! c_delta'(t) = integral (15/4)(u - u^3)/delta c~(t + delta u) du
//! ```
//!
//! Both integrands are the polynomial kernel times a family expression that
//! is smooth between breakpoints, so each smooth piece is integrated with a
//! fixed-order Gauss-Legendre rule: exact for the piecewise-linear and step
//! families (polynomial integrands of degree <= 5) and accurate to near
//! machine precision for the power and exponential tails.
//!
//! The mollified profile satisfies the two variation bounds
//!
//! ```text
//! integral_S^T |c - c_delta|  <= delta * Var(c; [max(S - delta, 0), T + delta])
//! integral_S^T |c_delta'|     <=         Var(c; [max(S - delta, 0), T + delta])
//! ```
//!
//! which the verification harness checks by quadrature. The time integrator
//! never uses mollified coefficients; it splits integration spans at the
//! breakpoints instead.

use super::CoefficientProfile;
use std::sync::OnceLock;

const GAUSS_ORDER: usize = 32;

/// Smooth approximation handle produced by
/// [`CoefficientProfile::mollify`].
#[derive(Debug, Clone)]
pub struct MollifiedProfile {
    base: CoefficientProfile,
    delta: f64,
}

impl MollifiedProfile {
    pub(crate) fn new(base: CoefficientProfile, delta: f64) -> Self {
        Self { base, delta }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn base(&self) -> &CoefficientProfile {
        &self.base
    }

    /// Pointwise value `c_delta(t)`. Defined for every finite `t`; the
    /// extension by `c(0)` covers kernel support reaching below zero.
    pub fn eval(&self, t: f64) -> f64 {
        self.convolve(t, |u| {
            let s = 1.0 - u * u;
            15.0 / 16.0 * s * s
        })
    }

    /// Pointwise derivative `c_delta'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        let delta = self.delta;
        self.convolve(t, |u| 15.0 / 4.0 * (u - u * u * u) / delta)
    }

    fn extended_eval(&self, sigma: f64) -> f64 {
        if sigma < 0.0 {
            self.base.eval_unchecked(0.0)
        } else {
            self.base.eval_unchecked(sigma)
        }
    }

    fn convolve(&self, t: f64, kernel: impl Fn(f64) -> f64) -> f64 {
        assert!(t.is_finite(), "mollified profile evaluated at non-finite t");
        // Split [-1, 1] where sigma = t + delta*u crosses 0 or a breakpoint,
        // so every Gauss-Legendre panel sees a smooth integrand.
        let mut cuts = vec![-1.0, 1.0];
        let mut push_sigma_cut = |sigma: f64| {
            let u = (sigma - t) / self.delta;
            if u > -1.0 && u < 1.0 {
                cuts.push(u);
            }
        };
        push_sigma_cut(0.0);
        for &bp in self.base.breakpoints() {
            push_sigma_cut(bp);
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let rule = gauss_legendre();
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            if hi <= lo {
                continue;
            }
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            let mut panel = 0.0;
            for &(node, weight) in rule.iter() {
                let u = mid + half * node;
                panel += weight * kernel(u) * self.extended_eval(t + self.delta * u);
            }
            total += half * panel;
        }
        total
    }
}

/// Nodes and weights of the Gauss-Legendre rule on [-1, 1], computed once by
/// Newton iteration on the Legendre recurrence.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            let weight = 2.0 / ((1.0 - x * x) * dp * dp);
            rule.push((x, weight));
        }
        rule
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let derivative = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, derivative)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_rule_integrates_polynomials_exactly() {
        let rule = gauss_legendre();
        // integral of u^2 over [-1, 1] is 2/3; of u^6 is 2/7.
        let quadratic: f64 = rule.iter().map(|&(x, w)| w * x * x).sum();
        let sextic: f64 = rule.iter().map(|&(x, w)| w * x.powi(6)).sum();
        assert_relative_eq!(quadratic, 2.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(sextic, 2.0 / 7.0, max_relative = 1e-14);
        let mass: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert_relative_eq!(mass, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn constant_profile_mollifies_to_itself() {
        let profile = CoefficientProfile::constant(2.0).unwrap();
        for &delta in &[1.0, 0.1, 0.01] {
            let smooth = profile.mollify(delta).unwrap();
            for &t in &[0.0, 0.3, 1.0, 7.0] {
                assert_relative_eq!(smooth.eval(t), 2.0, max_relative = 1e-14);
                assert!(smooth.derivative(t).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn linear_region_is_reproduced_exactly() {
        // Slope-one ramp; kernel moments make c_delta = c and c_delta' = 1
        // wherever the support stays inside the linear region.
        let profile =
            CoefficientProfile::piecewise_linear(vec![0.0, 2.0], vec![1.0, 3.0]).unwrap();
        let smooth = profile.mollify(0.5).unwrap();
        assert_relative_eq!(smooth.eval(1.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(smooth.derivative(1.0), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn step_midpoint_and_plateaus() {
        let profile = CoefficientProfile::step(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        let smooth = profile.mollify(0.25).unwrap();
        // Plateaus away from the jump are untouched.
        assert_relative_eq!(smooth.eval(0.5), 1.0, max_relative = 1e-14);
        assert_relative_eq!(smooth.eval(2.0), 2.0, max_relative = 1e-14);
        // The even kernel splits the jump evenly at the jump point.
        assert_relative_eq!(smooth.eval(1.0), 1.5, max_relative = 1e-13);
        // Monotone between the plateaus, so the derivative is non-negative.
        assert!(smooth.derivative(0.9) > 0.0);
        assert!(smooth.derivative(1.1) > 0.0);
    }

    #[test]
    fn derivative_integral_recovers_the_jump_height() {
        // c_delta' >= 0 for an upward step, so its integral over a window
        // containing the smeared jump telescopes to the jump height.
        let profile = CoefficientProfile::step(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        let smooth = profile.mollify(0.25).unwrap();
        let integral = crate::quad::adaptive_simpson_split(
            &|x| smooth.derivative(x).abs(),
            0.0,
            2.0,
            &[0.75, 1.0, 1.25],
            1e-10,
        );
        assert_relative_eq!(integral, 1.0, epsilon = 1e-8);
        // Which is exactly c_delta(2) - c_delta(0).
        assert_relative_eq!(smooth.eval(2.0) - smooth.eval(0.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mollify_rejects_bad_delta() {
        let profile = CoefficientProfile::constant(1.0).unwrap();
        assert!(profile.mollify(0.0).is_err());
        assert!(profile.mollify(-0.5).is_err());
        assert!(profile.mollify(f64::NAN).is_err());
    }
}
