//! Closed-form coefficient profiles for the propagation speed `c(t)` and the
//! damping `b(t)`.
//!
//! Profiles are closed-form families rather than arbitrary callables, so
//! total variation, integrals, and drift classification are exact. Arbitrary
//! tabulated inputs are supported as the piecewise-linear family.
//!
//! Conventions shared by the piecewise families: the value extends as a
//! constant before the first breakpoint and after the last one, and step
//! functions are right-continuous. The limit value `c_inf` of a piecewise
//! family is its constant-extension value after the last breakpoint.

mod mollify;

pub use mollify::MollifiedProfile;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoefficientError {
    #[error("time must be non-negative, got {t}")]
    NegativeTime { t: f64 },
    #[error("invalid interval [{s}, {t}]: need 0 <= s <= t")]
    InvalidInterval { s: f64, t: f64 },
    #[error("piecewise profile needs at least one breakpoint")]
    EmptyBreakpoints,
    #[error("breakpoints must be finite, non-negative, strictly increasing (index {index})")]
    BadBreakpoint { index: usize },
    #[error("{breakpoints} breakpoints but {values} values")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("parameter {name} must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("speed profile must satisfy inf c > 0, closed-form infimum is {infimum}")]
    NonPositiveSpeed { infimum: f64 },
    #[error("profile is not integrable on an unbounded interval")]
    NonIntegrableTail,
    #[error("mollifier width must be positive, got {delta}")]
    NonPositiveDelta { delta: f64 },
}

/// Evaluable representation of a speed or damping coefficient with exact
/// variation, integrals, and tail classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefficientProfile {
    /// `c(t) = value`.
    Constant { value: f64 },
    /// Linear interpolation through `(breakpoints[i], values[i])`, constant
    /// before the first breakpoint and after the last.
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// `c(t) = c_inf + amplitude * (1 + t)^{-exponent}` with `exponent > 0`.
    #[serde(rename = "power")]
    PowerPerturbation {
        c_inf: f64,
        amplitude: f64,
        exponent: f64,
    },
    /// `c(t) = c_inf + amplitude * exp(-rate * t)` with `rate > 0`.
    #[serde(rename = "exp")]
    ExpPerturbation { c_inf: f64, amplitude: f64, rate: f64 },
    /// Right-continuous step function: `c(t) = values[i]` on
    /// `[breakpoints[i], breakpoints[i+1])`, `values[0]` before the first
    /// breakpoint, `values[last]` after the last.
    #[serde(rename = "step")]
    StepFunction {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

/// Convergence status of the drift `f(t) = integral_0^t (c(s) - c_inf) ds`,
/// with a textual certificate describing the closed-form evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftClassification {
    #[serde(flatten)]
    pub kind: DriftKind,
    pub certificate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriftKind {
    Convergent { f_inf: f64 },
    DivergentToInfinity,
    DivergentToMinusInfinity,
    /// Reserved for oscillatory families where the improper integral has no
    /// closed-form verdict; never produced by the built-in families.
    Indeterminate,
}

impl DriftKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Convergent { .. } => "convergent",
            Self::DivergentToInfinity => "divergent_to_infinity",
            Self::DivergentToMinusInfinity => "divergent_to_minus_infinity",
            Self::Indeterminate => "indeterminate",
        }
    }
}

impl DriftClassification {
    pub fn f_inf(&self) -> Option<f64> {
        match self.kind {
            DriftKind::Convergent { f_inf } => Some(f_inf),
            _ => None,
        }
    }

    pub fn is_convergent(&self) -> bool {
        matches!(self.kind, DriftKind::Convergent { .. })
    }
}

fn check_piecewise(breakpoints: &[f64], values: &[f64]) -> Result<(), CoefficientError> {
    if breakpoints.is_empty() {
        return Err(CoefficientError::EmptyBreakpoints);
    }
    if breakpoints.len() != values.len() {
        return Err(CoefficientError::LengthMismatch {
            breakpoints: breakpoints.len(),
            values: values.len(),
        });
    }
    for (index, &t) in breakpoints.iter().enumerate() {
        if !t.is_finite() || t < 0.0 || (index > 0 && breakpoints[index - 1] >= t) {
            return Err(CoefficientError::BadBreakpoint { index });
        }
    }
    for &v in values {
        if !v.is_finite() {
            return Err(CoefficientError::NonFiniteParameter {
                name: "values",
                value: v,
            });
        }
    }
    Ok(())
}

fn check_finite(name: &'static str, value: f64) -> Result<(), CoefficientError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(CoefficientError::NonFiniteParameter { name, value })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), CoefficientError> {
    check_finite(name, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(CoefficientError::NonPositiveParameter { name, value })
    }
}

impl CoefficientProfile {
    pub fn constant(value: f64) -> Result<Self, CoefficientError> {
        check_finite("value", value)?;
        Ok(Self::Constant { value })
    }

    pub fn piecewise_linear(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self, CoefficientError> {
        check_piecewise(&breakpoints, &values)?;
        Ok(Self::PiecewiseLinear {
            breakpoints,
            values,
        })
    }

    pub fn power(c_inf: f64, amplitude: f64, exponent: f64) -> Result<Self, CoefficientError> {
        check_finite("c_inf", c_inf)?;
        check_finite("amplitude", amplitude)?;
        check_positive("exponent", exponent)?;
        Ok(Self::PowerPerturbation {
            c_inf,
            amplitude,
            exponent,
        })
    }

    pub fn exp(c_inf: f64, amplitude: f64, rate: f64) -> Result<Self, CoefficientError> {
        check_finite("c_inf", c_inf)?;
        check_finite("amplitude", amplitude)?;
        check_positive("rate", rate)?;
        Ok(Self::ExpPerturbation {
            c_inf,
            amplitude,
            rate,
        })
    }

    pub fn step(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, CoefficientError> {
        check_piecewise(&breakpoints, &values)?;
        Ok(Self::StepFunction {
            breakpoints,
            values,
        })
    }

    /// Validates the structural invariants of an already-built profile.
    /// Deserialized configs go through this before use.
    pub fn validate(&self) -> Result<(), CoefficientError> {
        match self {
            Self::Constant { value } => check_finite("value", *value),
            Self::PiecewiseLinear {
                breakpoints,
                values,
            }
            | Self::StepFunction {
                breakpoints,
                values,
            } => check_piecewise(breakpoints, values),
            Self::PowerPerturbation {
                c_inf,
                amplitude,
                exponent,
            } => {
                check_finite("c_inf", *c_inf)?;
                check_finite("amplitude", *amplitude)?;
                check_positive("exponent", *exponent)
            }
            Self::ExpPerturbation {
                c_inf,
                amplitude,
                rate,
            } => {
                check_finite("c_inf", *c_inf)?;
                check_finite("amplitude", *amplitude)?;
                check_positive("rate", *rate)
            }
        }
    }

    /// Checks the speed-profile requirement `inf_{t >= 0} c(t) > 0` via the
    /// closed-form infimum of the family.
    pub fn validate_speed(&self) -> Result<(), CoefficientError> {
        self.validate()?;
        let infimum = self.infimum();
        if infimum > 0.0 {
            Ok(())
        } else {
            Err(CoefficientError::NonPositiveSpeed { infimum })
        }
    }

    /// Checks that `|profile|` is integrable on `[0, infinity)`, which the
    /// damping coefficient must satisfy.
    pub fn validate_damping(&self) -> Result<(), CoefficientError> {
        self.validate()?;
        if self.has_integrable_tail() {
            Ok(())
        } else {
            Err(CoefficientError::NonIntegrableTail)
        }
    }

    /// Exact value of the family at `t >= 0`.
    pub fn eval(&self, t: f64) -> Result<f64, CoefficientError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CoefficientError::NegativeTime { t });
        }
        Ok(self.eval_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::PiecewiseLinear {
                breakpoints,
                values,
            } => {
                if t <= breakpoints[0] {
                    values[0]
                } else if t >= *breakpoints.last().unwrap() {
                    *values.last().unwrap()
                } else {
                    let idx = match breakpoints.binary_search_by(|bp| bp.partial_cmp(&t).unwrap())
                    {
                        Ok(exact) => return values[exact],
                        Err(right) => right,
                    };
                    let (t0, t1) = (breakpoints[idx - 1], breakpoints[idx]);
                    let (v0, v1) = (values[idx - 1], values[idx]);
                    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
                }
            }
            Self::PowerPerturbation {
                c_inf,
                amplitude,
                exponent,
            } => c_inf + amplitude * (1.0 + t).powf(-exponent),
            Self::ExpPerturbation {
                c_inf,
                amplitude,
                rate,
            } => c_inf + amplitude * (-rate * t).exp(),
            Self::StepFunction {
                breakpoints,
                values,
            } => {
                if t < breakpoints[0] {
                    values[0]
                } else {
                    let idx = match breakpoints.binary_search_by(|bp| bp.partial_cmp(&t).unwrap())
                    {
                        Ok(exact) => exact,
                        Err(right) => right - 1,
                    };
                    values[idx]
                }
            }
        }
    }

    /// Left limit at `t`; differs from [`eval`](Self::eval) only at the jump
    /// points of a step function. The integrator uses this at the right
    /// endpoint of a span that ends on a breakpoint, so each integration span
    /// sees a smooth coefficient.
    pub(crate) fn eval_left(&self, t: f64) -> f64 {
        match self {
            Self::StepFunction {
                breakpoints,
                values,
            } => {
                if t <= breakpoints[0] {
                    values[0]
                } else {
                    let idx = match breakpoints.binary_search_by(|bp| bp.partial_cmp(&t).unwrap())
                    {
                        Ok(exact) => exact - 1,
                        Err(right) => right - 1,
                    };
                    values[idx]
                }
            }
            _ => self.eval_unchecked(t),
        }
    }

    /// Interior breakpoints of the family, empty for the smooth families.
    pub fn breakpoints(&self) -> &[f64] {
        match self {
            Self::PiecewiseLinear { breakpoints, .. } | Self::StepFunction { breakpoints, .. } => {
                breakpoints
            }
            _ => &[],
        }
    }

    /// The limit `c_inf = lim_{t -> infinity} c(t)`, which exists for every
    /// family: the perturbation families carry it as a parameter and the
    /// piecewise families use their constant-extension value.
    pub fn limit_value(&self) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::PiecewiseLinear { values, .. } | Self::StepFunction { values, .. } => {
                *values.last().unwrap()
            }
            Self::PowerPerturbation { c_inf, .. } | Self::ExpPerturbation { c_inf, .. } => *c_inf,
        }
    }

    /// Closed-form infimum over `[0, infinity)`.
    pub fn infimum(&self) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::PiecewiseLinear { values, .. } | Self::StepFunction { values, .. } => values
                .iter()
                .fold(f64::INFINITY, |acc, &v| acc.min(v)),
            Self::PowerPerturbation {
                c_inf, amplitude, ..
            }
            | Self::ExpPerturbation {
                c_inf, amplitude, ..
            } => c_inf.min(c_inf + amplitude),
        }
    }

    /// Closed-form supremum over `[0, infinity)`.
    pub fn supremum(&self) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::PiecewiseLinear { values, .. } | Self::StepFunction { values, .. } => values
                .iter()
                .fold(f64::NEG_INFINITY, |acc, &v| acc.max(v)),
            Self::PowerPerturbation {
                c_inf, amplitude, ..
            }
            | Self::ExpPerturbation {
                c_inf, amplitude, ..
            } => c_inf.max(c_inf + amplitude),
        }
    }

    /// Exact total variation of the restriction to `[s, t]`; `t` may be
    /// `f64::INFINITY`. Monotone tails use `|c(s) - c(t)|`, piecewise
    /// families sum the absolute increments of the restriction.
    pub fn total_variation(&self, s: f64, t: f64) -> Result<f64, CoefficientError> {
        if !(s.is_finite() && s >= 0.0 && t >= s) {
            return Err(CoefficientError::InvalidInterval { s, t });
        }
        Ok(match self {
            Self::Constant { .. } => 0.0,
            Self::PowerPerturbation { .. } | Self::ExpPerturbation { .. } => {
                let end = if t.is_finite() {
                    self.eval_unchecked(t)
                } else {
                    self.limit_value()
                };
                (self.eval_unchecked(s) - end).abs()
            }
            Self::PiecewiseLinear { breakpoints, .. } => {
                let t_eff = if t.is_finite() {
                    t
                } else {
                    breakpoints.last().unwrap().max(s)
                };
                let mut var = 0.0;
                let mut prev = self.eval_unchecked(s);
                for &bp in breakpoints.iter() {
                    if bp > s && bp < t_eff {
                        let here = self.eval_unchecked(bp);
                        var += (here - prev).abs();
                        prev = here;
                    }
                }
                var += (self.eval_unchecked(t_eff) - prev).abs();
                var
            }
            Self::StepFunction {
                breakpoints,
                values,
            } => {
                let mut var = 0.0;
                for (index, &bp) in breakpoints.iter().enumerate().skip(1) {
                    if bp > s && bp <= t {
                        var += (values[index] - values[index - 1]).abs();
                    }
                }
                var
            }
        })
    }

    /// Antiderivative `tau(t) = integral_0^t c(s) ds`, by closed form.
    /// Strictly increasing in `t` whenever `inf c > 0`.
    pub fn antiderivative(&self, t: f64) -> Result<f64, CoefficientError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CoefficientError::NegativeTime { t });
        }
        Ok(self.limit_value() * t + self.drift_unchecked(t))
    }

    /// Drift `f(t) = tau(t) - c_inf t = integral_0^t (c(s) - c_inf) ds`,
    /// computed cancellation-free per family.
    pub fn drift(&self, t: f64) -> Result<f64, CoefficientError> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CoefficientError::NegativeTime { t });
        }
        Ok(self.drift_unchecked(t))
    }

    fn drift_unchecked(&self, t: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::PowerPerturbation {
                amplitude,
                exponent,
                ..
            } => amplitude * power_primitive(t, *exponent),
            Self::ExpPerturbation {
                amplitude, rate, ..
            } => amplitude / rate * (1.0 - (-rate * t).exp()),
            Self::PiecewiseLinear { .. } | Self::StepFunction { .. } => {
                // The deviation c - c_inf vanishes beyond the last breakpoint,
                // so integrating only up to there keeps large t cancellation-free.
                let c_inf = self.limit_value();
                let t_eff = t.min(*self.breakpoints().last().unwrap());
                let mut nodes: Vec<f64> = vec![0.0];
                for &bp in self.breakpoints() {
                    if bp > 0.0 && bp < t_eff {
                        nodes.push(bp);
                    }
                }
                nodes.push(t_eff.max(0.0));
                let mut total = 0.0;
                for pair in nodes.windows(2) {
                    let (u, v) = (pair[0], pair[1]);
                    total += (self.piece_mean(u, v) - c_inf) * (v - u);
                }
                total
            }
        }
    }

    /// Mean value of the profile on `[u, v]`, assuming no interior
    /// breakpoint: constant pieces return the plateau value, linear pieces
    /// the midpoint value.
    fn piece_mean(&self, u: f64, v: f64) -> f64 {
        match self {
            Self::StepFunction { .. } => self.eval_unchecked(u),
            Self::PiecewiseLinear { .. } => {
                0.5 * (self.eval_unchecked(u) + self.eval_unchecked(v))
            }
            _ => unreachable!("piece_mean is only used by the piecewise families"),
        }
    }

    /// Classifies the convergence of `f(t)` as `t -> infinity`, by closed
    /// form per family.
    pub fn classify_drift(&self) -> DriftClassification {
        match self {
            Self::Constant { .. } => DriftClassification {
                kind: DriftKind::Convergent { f_inf: 0.0 },
                certificate: "constant profile: c - c_inf vanishes identically".to_string(),
            },
            Self::ExpPerturbation {
                amplitude, rate, ..
            } => DriftClassification {
                kind: DriftKind::Convergent {
                    f_inf: amplitude / rate,
                },
                certificate: format!(
                    "closed form: integral of a e^(-r t) over [0, inf) = a/r = {}",
                    amplitude / rate
                ),
            },
            Self::PowerPerturbation {
                amplitude,
                exponent,
                ..
            } => {
                if *amplitude == 0.0 {
                    DriftClassification {
                        kind: DriftKind::Convergent { f_inf: 0.0 },
                        certificate: "zero amplitude: c - c_inf vanishes identically".to_string(),
                    }
                } else if *exponent > 1.0 {
                    let f_inf = amplitude / (exponent - 1.0);
                    DriftClassification {
                        kind: DriftKind::Convergent { f_inf },
                        certificate: format!(
                            "closed form: integral of a (1+t)^(-p) with p = {exponent} > 1 \
                             converges to a/(p-1) = {f_inf}"
                        ),
                    }
                } else {
                    let kind = if *amplitude > 0.0 {
                        DriftKind::DivergentToInfinity
                    } else {
                        DriftKind::DivergentToMinusInfinity
                    };
                    DriftClassification {
                        kind,
                        certificate: format!(
                            "closed form: integral of a (1+t)^(-p) with p = {exponent} <= 1 \
                             diverges with the sign of a = {amplitude}"
                        ),
                    }
                }
            }
            Self::PiecewiseLinear { breakpoints, .. } | Self::StepFunction { breakpoints, .. } => {
                let last = *breakpoints.last().unwrap();
                let f_inf = self.drift_unchecked(last);
                DriftClassification {
                    kind: DriftKind::Convergent { f_inf },
                    certificate: format!(
                        "piecewise profile constant beyond t = {last}: \
                         f_inf equals the closed-form area {f_inf} over [0, {last}]"
                    ),
                }
            }
        }
    }

    /// `integral_s^t |profile|`, by closed form per family; `t` may be
    /// `f64::INFINITY` when the tail is integrable.
    pub fn l1_norm(&self, s: f64, t: f64) -> Result<f64, CoefficientError> {
        if !(s.is_finite() && s >= 0.0 && t >= s) {
            return Err(CoefficientError::InvalidInterval { s, t });
        }
        if t.is_finite() {
            return Ok(self.l1_finite(s, t));
        }
        if !self.has_integrable_tail() {
            return Err(CoefficientError::NonIntegrableTail);
        }
        Ok(match self {
            Self::Constant { .. } => 0.0,
            Self::PowerPerturbation {
                amplitude,
                exponent,
                ..
            } => {
                // integrable tail means c_inf = 0 here, and p > 1 or a = 0
                if *amplitude == 0.0 {
                    0.0
                } else {
                    amplitude.abs() * (1.0 + s).powf(1.0 - exponent) / (exponent - 1.0)
                }
            }
            Self::ExpPerturbation {
                amplitude, rate, ..
            } => amplitude.abs() / rate * (-rate * s).exp(),
            Self::PiecewiseLinear { breakpoints, .. } | Self::StepFunction { breakpoints, .. } => {
                let last = breakpoints.last().unwrap().max(s);
                self.l1_finite(s, last)
            }
        })
    }

    /// Whether `|profile|` has finite integral over `[T, infinity)`.
    pub fn has_integrable_tail(&self) -> bool {
        match self {
            Self::Constant { value } => *value == 0.0,
            Self::PowerPerturbation {
                c_inf,
                amplitude,
                exponent,
            } => *c_inf == 0.0 && (*amplitude == 0.0 || *exponent > 1.0),
            Self::ExpPerturbation { c_inf, .. } => *c_inf == 0.0,
            Self::PiecewiseLinear { values, .. } | Self::StepFunction { values, .. } => {
                *values.last().unwrap() == 0.0
            }
        }
    }

    fn l1_finite(&self, s: f64, t: f64) -> f64 {
        if t <= s {
            return 0.0;
        }
        // Split [s, t] at family breakpoints so each piece is smooth, then
        // split each piece at its sign change (at most one: pieces are
        // monotone or constant) and sum absolute signed integrals.
        let mut nodes: Vec<f64> = vec![s];
        for &bp in self.breakpoints() {
            if bp > s && bp < t {
                nodes.push(bp);
            }
        }
        nodes.push(t);
        let mut total = 0.0;
        for pair in nodes.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            let mut splits = vec![u, v];
            if let Some(root) = self.piece_root(u, v) {
                splits.insert(1, root);
            }
            for sub in splits.windows(2) {
                total += self.piece_signed_integral(sub[0], sub[1]).abs();
            }
        }
        total
    }

    /// Signed integral over a breakpoint-free piece `[u, v]`.
    fn piece_signed_integral(&self, u: f64, v: f64) -> f64 {
        match self {
            Self::Constant { value } => value * (v - u),
            Self::StepFunction { .. } => self.eval_unchecked(u) * (v - u),
            Self::PiecewiseLinear { .. } => {
                0.5 * (self.eval_unchecked(u) + self.eval_unchecked(v)) * (v - u)
            }
            Self::PowerPerturbation {
                c_inf,
                amplitude,
                exponent,
            } => {
                c_inf * (v - u)
                    + amplitude * (power_primitive(v, *exponent) - power_primitive(u, *exponent))
            }
            Self::ExpPerturbation {
                c_inf,
                amplitude,
                rate,
            } => c_inf * (v - u) + amplitude / rate * ((-rate * u).exp() - (-rate * v).exp()),
        }
    }

    /// Interior sign change of a breakpoint-free piece, when one exists.
    fn piece_root(&self, u: f64, v: f64) -> Option<f64> {
        let (a, b) = (self.eval_unchecked(u), self.eval_unchecked(v));
        if a == 0.0 || b == 0.0 || a.signum() == b.signum() {
            return None;
        }
        let root = match self {
            Self::Constant { .. } | Self::StepFunction { .. } => return None,
            Self::PiecewiseLinear { .. } => u + (v - u) * a / (a - b),
            Self::PowerPerturbation {
                c_inf,
                amplitude,
                exponent,
            } => (-amplitude / c_inf).powf(1.0 / exponent) - 1.0,
            Self::ExpPerturbation {
                c_inf,
                amplitude,
                rate,
            } => (-amplitude / c_inf).ln() / rate,
        };
        (root > u && root < v).then_some(root)
    }

    /// Returns the same-family profile shifted by the limit value, i.e. the
    /// deviation `c(t) - c_inf`. Its signed and absolute integrals feed the
    /// drift and the drift tail bound.
    pub fn deviation_from_limit(&self) -> CoefficientProfile {
        match self.clone() {
            Self::Constant { .. } => Self::Constant { value: 0.0 },
            Self::PiecewiseLinear {
                breakpoints,
                mut values,
            } => {
                let last = *values.last().unwrap();
                for v in &mut values {
                    *v -= last;
                }
                Self::PiecewiseLinear {
                    breakpoints,
                    values,
                }
            }
            Self::StepFunction {
                breakpoints,
                mut values,
            } => {
                let last = *values.last().unwrap();
                for v in &mut values {
                    *v -= last;
                }
                Self::StepFunction {
                    breakpoints,
                    values,
                }
            }
            Self::PowerPerturbation {
                amplitude,
                exponent,
                ..
            } => Self::PowerPerturbation {
                c_inf: 0.0,
                amplitude,
                exponent,
            },
            Self::ExpPerturbation {
                amplitude, rate, ..
            } => Self::ExpPerturbation {
                c_inf: 0.0,
                amplitude,
                rate,
            },
        }
    }

    /// `integral_t^infinity |c(s) - c_inf| ds` when finite. Bounds the drift
    /// tail: `|f(t) - f_inf| <= abs_deviation_tail(t)`.
    pub fn abs_deviation_tail(&self, t: f64) -> Result<f64, CoefficientError> {
        self.deviation_from_limit().l1_norm(t, f64::INFINITY)
    }

    /// Mollification `c_delta = c~ * rho_delta` against the fixed polynomial
    /// bump `rho(u) = (15/16)(1-u^2)^2` on `[-1, 1]`, where `c~` extends the
    /// profile by `c(0)` for negative times. The handle evaluates both
    /// `c_delta` and its derivative.
    pub fn mollify(&self, delta: f64) -> Result<MollifiedProfile, CoefficientError> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(CoefficientError::NonPositiveDelta { delta });
        }
        Ok(MollifiedProfile::new(self.clone(), delta))
    }
}

/// `integral_0^t (1+s)^{-p} ds`.
fn power_primitive(t: f64, p: f64) -> f64 {
    if p == 1.0 {
        (1.0 + t).ln()
    } else {
        ((1.0 + t).powf(1.0 - p) - 1.0) / (1.0 - p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{adaptive_simpson, adaptive_simpson_split};
    use approx::assert_relative_eq;

    fn power_112() -> CoefficientProfile {
        CoefficientProfile::power(1.0, 1.0, 2.0).unwrap()
    }

    fn ramp_profile() -> CoefficientProfile {
        CoefficientProfile::piecewise_linear(vec![0.0, 1.0, 2.0], vec![2.0, 3.0, 2.0]).unwrap()
    }

    #[test]
    fn eval_closed_forms() {
        assert_eq!(CoefficientProfile::constant(2.0).unwrap().eval(7.0).unwrap(), 2.0);
        assert_eq!(power_112().eval(0.0).unwrap(), 2.0);
        assert_eq!(power_112().eval(1.0).unwrap(), 1.25);
        assert!(matches!(
            power_112().eval(-0.1),
            Err(CoefficientError::NegativeTime { .. })
        ));
    }

    #[test]
    fn eval_piecewise_families() {
        let ramp = ramp_profile();
        assert_eq!(ramp.eval(0.0).unwrap(), 2.0);
        assert_eq!(ramp.eval(0.5).unwrap(), 2.5);
        assert_eq!(ramp.eval(1.0).unwrap(), 3.0);
        assert_eq!(ramp.eval(1.5).unwrap(), 2.5);
        assert_eq!(ramp.eval(10.0).unwrap(), 2.0);

        let step = CoefficientProfile::step(vec![0.0, 1.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(step.eval(0.5).unwrap(), 1.0);
        assert_eq!(step.eval(1.0).unwrap(), 2.0); // right-continuous
        assert_eq!(step.eval(5.0).unwrap(), 2.0);
        assert_eq!(step.eval_left(1.0), 1.0);
        assert_eq!(step.eval_left(0.5), 1.0);
        assert_eq!(step.eval_left(2.0), 2.0);
    }

    #[test]
    fn construction_rejects_bad_piecewise_data() {
        assert!(matches!(
            CoefficientProfile::piecewise_linear(vec![], vec![]),
            Err(CoefficientError::EmptyBreakpoints)
        ));
        assert!(matches!(
            CoefficientProfile::piecewise_linear(vec![0.0, 0.0], vec![1.0, 2.0]),
            Err(CoefficientError::BadBreakpoint { index: 1 })
        ));
        assert!(matches!(
            CoefficientProfile::step(vec![0.0, 1.0], vec![1.0]),
            Err(CoefficientError::LengthMismatch { .. })
        ));
        assert!(matches!(
            CoefficientProfile::power(1.0, 1.0, 0.0),
            Err(CoefficientError::NonPositiveParameter { .. })
        ));
    }

    #[test]
    fn speed_validation_uses_closed_form_infimum() {
        assert!(power_112().validate_speed().is_ok());
        // c(t) = 1 - (1+t)^{-2} has infimum c(0) = 0.
        assert!(matches!(
            CoefficientProfile::power(1.0, -1.0, 2.0).unwrap().validate_speed(),
            Err(CoefficientError::NonPositiveSpeed { .. })
        ));
        assert!(CoefficientProfile::power(1.0, -0.5, 2.0)
            .unwrap()
            .validate_speed()
            .is_ok());
    }

    #[test]
    fn total_variation_closed_forms() {
        let constant = CoefficientProfile::constant(3.0).unwrap();
        assert_eq!(constant.total_variation(0.0, 100.0).unwrap(), 0.0);
        assert_eq!(constant.total_variation(2.0, f64::INFINITY).unwrap(), 0.0);

        // Monotone tail: Var on [0, inf) is c(0) - c_inf = 1.
        assert_relative_eq!(
            power_112().total_variation(0.0, f64::INFINITY).unwrap(),
            1.0,
            max_relative = 1e-15
        );

        assert!(matches!(
            power_112().total_variation(3.0, 1.0),
            Err(CoefficientError::InvalidInterval { .. })
        ));
    }

    #[test]
    fn total_variation_piecewise_matches_grid_partition_oracle() {
        // Brute-force partition sum on a 1e-3 grid over [0, 2].
        let ramp = ramp_profile();
        let closed = ramp.total_variation(0.0, 2.0).unwrap();
        let n = 2000;
        let mut grid_sum = 0.0;
        for i in 0..n {
            let t0 = 2.0 * i as f64 / n as f64;
            let t1 = 2.0 * (i + 1) as f64 / n as f64;
            grid_sum += (ramp.eval(t1).unwrap() - ramp.eval(t0).unwrap()).abs();
        }
        assert_relative_eq!(closed, 2.0, max_relative = 1e-15);
        assert_relative_eq!(closed, grid_sum, max_relative = 1e-9);
    }

    #[test]
    fn total_variation_step_counts_jumps_in_half_open_interval() {
        let step =
            CoefficientProfile::step(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 0.5]).unwrap();
        assert_eq!(step.total_variation(0.0, f64::INFINITY).unwrap(), 2.5);
        // The restriction to [1, 2] starts at the post-jump value, so only
        // the jump at t = 2 contributes.
        assert_eq!(step.total_variation(1.0, 2.0).unwrap(), 1.5);
        assert_eq!(step.total_variation(1.5, 1.9).unwrap(), 0.0);
    }

    #[test]
    fn total_variation_superadditivity_and_lower_bound() {
        let profiles = [
            power_112(),
            CoefficientProfile::exp(1.0, -0.5, 0.7).unwrap(),
            CoefficientProfile::power(2.0, 1.5, 0.5).unwrap(),
        ];
        for profile in &profiles {
            let (s, t, u) = (0.3, 2.7, 11.0);
            let var_su = profile.total_variation(s, u).unwrap();
            let var_st = profile.total_variation(s, t).unwrap();
            let var_tu = profile.total_variation(t, u).unwrap();
            assert_relative_eq!(var_su, var_st + var_tu, max_relative = 1e-13);
            let gap = (profile.eval(u).unwrap() - profile.eval(s).unwrap()).abs();
            assert!(var_su >= gap - 1e-15);
        }
        let ramp = ramp_profile();
        let gap = (ramp.eval(1.7).unwrap() - ramp.eval(0.2).unwrap()).abs();
        assert!(ramp.total_variation(0.2, 1.7).unwrap() >= gap - 1e-15);
    }

    #[test]
    fn antiderivative_closed_forms() {
        assert_eq!(
            CoefficientProfile::constant(2.0).unwrap().antiderivative(5.0).unwrap(),
            10.0
        );
        assert_relative_eq!(power_112().antiderivative(1.0).unwrap(), 1.5, max_relative = 1e-15);
        assert_eq!(power_112().antiderivative(0.0).unwrap(), 0.0);
    }

    #[test]
    fn antiderivative_matches_adaptive_simpson_oracle() {
        let profile = CoefficientProfile::exp(1.0, 1.0, 1.0).unwrap();
        for &t in &[0.5, 3.0, 17.0] {
            let oracle = adaptive_simpson(&|s| profile.eval(s).unwrap(), 0.0, t, 1e-12);
            assert_relative_eq!(profile.antiderivative(t).unwrap(), oracle, epsilon = 1e-10);
        }
        // Piecewise families against the same oracle.
        let ramp = ramp_profile();
        let oracle = adaptive_simpson_split(&|s| ramp.eval(s).unwrap(), 0.0, 5.0, &[1.0, 2.0], 1e-12);
        assert_relative_eq!(ramp.antiderivative(5.0).unwrap(), oracle, epsilon = 1e-10);
    }

    #[test]
    fn drift_closed_forms() {
        let constant = CoefficientProfile::constant(4.0).unwrap();
        for &t in &[0.0, 1.0, 50.0] {
            assert_eq!(constant.drift(t).unwrap(), 0.0);
        }
        // log drift: f(e - 1) = 1 for c = 1 + (1+t)^{-1}
        let log_family = CoefficientProfile::power(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            log_family.drift(std::f64::consts::E - 1.0).unwrap(),
            1.0,
            max_relative = 1e-14
        );
        // f(t) -> 1 for the p = 2 family
        assert_relative_eq!(power_112().drift(1e9).unwrap(), 1.0, max_relative = 1e-8);
    }

    #[test]
    fn classify_drift_built_in_families() {
        assert_eq!(
            power_112().classify_drift().kind,
            DriftKind::Convergent { f_inf: 1.0 }
        );
        assert_eq!(
            CoefficientProfile::power(1.0, 1.0, 1.0).unwrap().classify_drift().kind,
            DriftKind::DivergentToInfinity
        );
        assert_eq!(
            CoefficientProfile::power(2.0, -1.0, 0.5).unwrap().classify_drift().kind,
            DriftKind::DivergentToMinusInfinity
        );
        assert_eq!(
            CoefficientProfile::exp(1.0, 3.0, 2.0).unwrap().classify_drift().kind,
            DriftKind::Convergent { f_inf: 1.5 }
        );
    }

    #[test]
    fn classify_drift_piecewise_matches_quadrature_oracle() {
        let ramp = ramp_profile();
        let classification = ramp.classify_drift();
        let f_inf = classification.f_inf().expect("piecewise drift converges");
        let c_inf = ramp.limit_value();
        let oracle = adaptive_simpson_split(
            &|s| ramp.eval(s).unwrap() - c_inf,
            0.0,
            2.0,
            &[1.0],
            1e-12,
        );
        assert_relative_eq!(f_inf, oracle, epsilon = 1e-10);
        assert_relative_eq!(f_inf, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn drift_tail_bound() {
        // |f(t) - f_inf| <= integral_t^inf |c - c_inf|, closed form both sides.
        let profiles = [
            power_112(),
            CoefficientProfile::exp(1.0, -0.4, 0.3).unwrap(),
            ramp_profile(),
        ];
        for profile in &profiles {
            let f_inf = profile.classify_drift().f_inf().unwrap();
            for &t in &[0.0, 0.7, 4.2, 40.0] {
                let gap = (profile.drift(t).unwrap() - f_inf).abs();
                let tail = profile.abs_deviation_tail(t).unwrap();
                assert!(
                    gap <= tail + 1e-14,
                    "gap {gap} exceeds tail bound {tail} at t = {t}"
                );
            }
        }
    }

    #[test]
    fn l1_norm_closed_forms() {
        let zero = CoefficientProfile::constant(0.0).unwrap();
        assert_eq!(zero.l1_norm(0.0, f64::INFINITY).unwrap(), 0.0);

        let exp_damping = CoefficientProfile::exp(0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(
            exp_damping.l1_norm(0.0, f64::INFINITY).unwrap(),
            1.0,
            max_relative = 1e-15
        );

        let power_damping = CoefficientProfile::power(0.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(
            power_damping.l1_norm(0.0, f64::INFINITY).unwrap(),
            1.0,
            max_relative = 1e-15
        );

        assert!(matches!(
            CoefficientProfile::constant(1.0).unwrap().l1_norm(0.0, f64::INFINITY),
            Err(CoefficientError::NonIntegrableTail)
        ));
        assert!(matches!(
            CoefficientProfile::power(0.0, 1.0, 0.5).unwrap().l1_norm(0.0, f64::INFINITY),
            Err(CoefficientError::NonIntegrableTail)
        ));
    }

    #[test]
    fn l1_norm_handles_sign_changes() {
        // Linear ramp crossing zero at t = 1: integral of |b| over [0, 2] is 1.
        let ramp = CoefficientProfile::piecewise_linear(vec![0.0, 2.0], vec![-1.0, 1.0]).unwrap();
        assert_relative_eq!(ramp.l1_norm(0.0, 2.0).unwrap(), 1.0, max_relative = 1e-14);

        // Exponential family crossing zero: oracle by split quadrature.
        let crossing = CoefficientProfile::exp(1.0, -2.0, 1.0).unwrap();
        let root = 2.0f64.ln();
        let oracle = adaptive_simpson_split(
            &|s| crossing.eval(s).unwrap().abs(),
            0.0,
            3.0,
            &[root],
            1e-12,
        );
        assert_relative_eq!(crossing.l1_norm(0.0, 3.0).unwrap(), oracle, epsilon = 1e-10);

        // Power family crossing zero on a finite window.
        let power_crossing = CoefficientProfile::power(-0.25, 1.0, 2.0).unwrap();
        let proot = 2.0 - 1.0;
        let oracle = adaptive_simpson_split(
            &|s| power_crossing.eval(s).unwrap().abs(),
            0.0,
            5.0,
            &[proot],
            1e-12,
        );
        assert_relative_eq!(power_crossing.l1_norm(0.0, 5.0).unwrap(), oracle, epsilon = 1e-10);
    }

    #[test]
    fn deviation_from_limit_matches_pointwise_difference() {
        let profiles = [
            power_112(),
            CoefficientProfile::exp(1.5, -0.3, 0.9).unwrap(),
            ramp_profile(),
            CoefficientProfile::step(vec![0.0, 1.0, 2.5], vec![1.0, 2.0, 1.2]).unwrap(),
        ];
        for profile in &profiles {
            let deviation = profile.deviation_from_limit();
            let c_inf = profile.limit_value();
            for &t in &[0.0, 0.4, 1.0, 2.2, 9.0] {
                assert_relative_eq!(
                    deviation.eval(t).unwrap(),
                    profile.eval(t).unwrap() - c_inf,
                    epsilon = 1e-14
                );
            }
        }
    }
}
