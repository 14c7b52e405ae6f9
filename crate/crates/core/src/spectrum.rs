//! Finite spectral model of the non-negative injective self-adjoint operator.
//!
//! The operator is represented by finitely many simple eigenvalues
//! `0 < lambda_1 < lambda_2 < ...`. A state carries one complex pair
//! `(w_k, z_k)` per mode, where `w_k` is the mode coefficient of `A^{1/2} u`
//! and `z_k` the coefficient of `u'`. Everything acting on states here is
//! diagonal in the eigenbasis: the unitary group `e^{i s A^{1/2}}`, spectral
//! projections, and weighted norms.
//!
//! Summations over modes run in ascending mode-index order always, so norms
//! and inner products are bit-reproducible across runs and thread counts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectrumError {
    #[error("spectrum must contain at least one mode")]
    Empty,
    #[error("eigenvalue at index {index} is {value}, expected a positive finite value")]
    NonPositiveEigenvalue { index: usize, value: f64 },
    #[error("eigenvalues must be strictly increasing, violated at index {index}")]
    NotStrictlyIncreasing { index: usize },
    #[error("state has {state_modes} modes but spectrum has {spectrum_modes}")]
    ModeCountMismatch {
        state_modes: usize,
        spectrum_modes: usize,
    },
    #[error("amplitude at mode {index} is not finite")]
    NonFiniteAmplitude { index: usize },
    #[error("norm order must be non-negative, got {order}")]
    NegativeOrder { order: f64 },
    #[error("dirichlet_interval requires count >= 1 and length > 0, got count {count}, length {length}")]
    InvalidGenerator { count: usize, length: f64 },
}

/// Ordered list of positive eigenvalues standing in for the spectral family
/// of the operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumModel {
    modes: Vec<f64>,
}

impl SpectrumModel {
    /// Builds a spectrum from explicit eigenvalues. They must be positive,
    /// finite, and strictly increasing; multiplicity is modeled by repeating
    /// amplitudes across distinct close eigenvalues, not by a field here.
    pub fn new(modes: Vec<f64>) -> Result<Self, SpectrumError> {
        if modes.is_empty() {
            return Err(SpectrumError::Empty);
        }
        for (index, &value) in modes.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(SpectrumError::NonPositiveEigenvalue { index, value });
            }
            if index > 0 && modes[index - 1] >= value {
                return Err(SpectrumError::NotStrictlyIncreasing { index });
            }
        }
        Ok(Self { modes })
    }

    /// Dirichlet eigenvalues of an interval of length `length`:
    /// `lambda_k = (k pi / length)^2` for `k = 1..=count`.
    pub fn dirichlet_interval(count: usize, length: f64) -> Result<Self, SpectrumError> {
        if count == 0 || !(length.is_finite() && length > 0.0) {
            return Err(SpectrumError::InvalidGenerator { count, length });
        }
        let modes = (1..=count)
            .map(|k| {
                let root = k as f64 * std::f64::consts::PI / length;
                root * root
            })
            .collect();
        Self::new(modes)
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.modes
    }

    pub fn eigenvalue(&self, index: usize) -> f64 {
        self.modes[index]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.modes[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.modes.last().expect("spectrum is non-empty")
    }

    fn check_state(&self, state: &StateVector) -> Result<(), SpectrumError> {
        if state.mode_count() != self.mode_count() {
            return Err(SpectrumError::ModeCountMismatch {
                state_modes: state.mode_count(),
                spectrum_modes: self.mode_count(),
            });
        }
        Ok(())
    }
}

/// Which complex component of a state an operation acts on.
///
/// `First` selects `w` (the `A^{1/2} u` coefficients; the forward-rotating
/// component in diagonalized coordinates), `Second` selects `z` (the `u'`
/// coefficients; the backward-rotating component).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    First,
    Second,
}

/// Per-mode complex pair `(w_k, z_k)` attached to a [`SpectrumModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    amplitudes: Vec<(Complex64, Complex64)>,
}

impl StateVector {
    /// Builds a state from per-mode pairs, rejecting non-finite entries.
    pub fn new(amplitudes: Vec<(Complex64, Complex64)>) -> Result<Self, SpectrumError> {
        for (index, (w, z)) in amplitudes.iter().enumerate() {
            if !(w.re.is_finite() && w.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
                return Err(SpectrumError::NonFiniteAmplitude { index });
            }
        }
        Ok(Self { amplitudes })
    }

    pub fn zero(mode_count: usize) -> Self {
        Self {
            amplitudes: vec![(Complex64::ZERO, Complex64::ZERO); mode_count],
        }
    }

    pub fn mode_count(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[(Complex64, Complex64)] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> (Complex64, Complex64) {
        self.amplitudes[index]
    }

    /// Plain state norm `(sum_k |w_k|^2 + |z_k|^2)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `sum_k |w_k|^2 + |z_k|^2`, summed in ascending mode order.
    pub fn norm_sq(&self) -> f64 {
        self.amplitudes
            .iter()
            .fold(0.0, |acc, (w, z)| acc + w.norm_sqr() + z.norm_sqr())
    }

    /// Euclidean norm of the first components only.
    pub fn first_norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .fold(0.0, |acc, (w, _)| acc + w.norm_sqr())
            .sqrt()
    }

    /// Euclidean norm of the second components only.
    pub fn second_norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .fold(0.0, |acc, (_, z)| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|(w, z)| w.norm_sqr() == 0.0 && z.norm_sqr() == 0.0)
    }

    /// Componentwise difference; the states must have equal mode counts.
    pub fn sub(&self, other: &StateVector) -> StateVector {
        assert_eq!(
            self.mode_count(),
            other.mode_count(),
            "state mode counts differ"
        );
        StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|((w0, z0), (w1, z1))| (w0 - w1, z0 - z1))
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> StateVector {
        StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(w, z)| (factor * w, factor * z))
                .collect(),
        }
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        assert_eq!(
            self.mode_count(),
            other.mode_count(),
            "state mode counts differ"
        );
        StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|((w0, z0), (w1, z1))| (w0 + w1, z0 + z1))
                .collect(),
        }
    }
}

/// Applies the unitary group `e^{i s A^{1/2}}` to one component of a state:
/// per mode, the selected component is multiplied by `e^{i s sqrt(lambda_k)}`
/// and the other component is left untouched. The Euclidean norm of the
/// selected component vector is preserved up to rounding.
pub fn unitary_shift(
    state: &StateVector,
    component: Component,
    s: f64,
    spectrum: &SpectrumModel,
) -> Result<StateVector, SpectrumError> {
    assert!(s.is_finite(), "shift parameter must be finite");
    spectrum.check_state(state)?;
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&(w, z), &lambda)| {
            let phase = Complex64::from_polar(1.0, s * lambda.sqrt());
            match component {
                Component::First => (phase * w, z),
                Component::Second => (w, phase * z),
            }
        })
        .collect();
    Ok(StateVector { amplitudes })
}

/// Weighted spectral norm `( sum_k (1 + lambda_k^J) (|w_k|^2 + |z_k|^2) )^{1/2}`
/// for `J > 0`.
///
/// At `J = 0` the general weight would degenerate to the constant 2; by
/// convention order zero returns the plain state norm
/// `(sum_k |w_k|^2 + |z_k|^2)^{1/2}` instead, without the doubling, so that it
/// coincides with [`StateVector::norm`].
pub fn weighted_norm(
    state: &StateVector,
    spectrum: &SpectrumModel,
    order: f64,
) -> Result<f64, SpectrumError> {
    if !(order.is_finite() && order >= 0.0) {
        return Err(SpectrumError::NegativeOrder { order });
    }
    spectrum.check_state(state)?;
    if order == 0.0 {
        return Ok(state.norm());
    }
    let sum = state
        .amplitudes
        .iter()
        .zip(spectrum.eigenvalues())
        .fold(0.0, |acc, (&(w, z), &lambda)| {
            acc + (1.0 + lambda.powf(order)) * (w.norm_sqr() + z.norm_sqr())
        });
    Ok(sum.sqrt())
}

/// Spectral projection below `cutoff`: zeroes both components of every mode
/// with `lambda_k >= cutoff`. Idempotent, and commutes bitwise with
/// [`unitary_shift`] since both are diagonal per mode.
pub fn spectral_project(
    state: &StateVector,
    spectrum: &SpectrumModel,
    cutoff: f64,
) -> Result<StateVector, SpectrumError> {
    assert!(cutoff > 0.0, "cutoff must be positive");
    spectrum.check_state(state)?;
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(spectrum.eigenvalues())
        .map(|(&(w, z), &lambda)| {
            if lambda >= cutoff {
                (Complex64::ZERO, Complex64::ZERO)
            } else {
                (w, z)
            }
        })
        .collect();
    Ok(StateVector { amplitudes })
}
