//! Scenario configuration: strict JSON schema with field-path validation.
//!
//! Unknown fields are rejected and semantic errors carry the offending field
//! path, so typos in parameter names fail loudly instead of running the
//! wrong experiment.

use crate::coefficients::CoefficientProfile;
use crate::dynamics::IntegratorConfig;
use crate::experiments::rng;
use crate::spectrum::{SpectrumModel, StateVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config error at {path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Which experiment the runner performs on the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Sufficiency,
    Necessity,
    WaveSpeed,
    Verify,
    Profile,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Sufficiency => "sufficiency",
            Self::Necessity => "necessity",
            Self::WaveSpeed => "wave_speed",
            Self::Verify => "verify",
            Self::Profile => "profile",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDto {
    name: String,
    kind: ExperimentKind,
    spectrum: SpectrumDto,
    speed: ProfileDto,
    damping: ProfileDto,
    initial: InitialDto,
    t_max: f64,
    samples: usize,
    #[serde(default)]
    profile_tol: Option<f64>,
    #[serde(default)]
    anchor_time: Option<f64>,
    #[serde(default)]
    integrator: Option<IntegratorConfig>,
    #[serde(default)]
    sweep: Option<SweepDto>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumDto {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    eigenvalues: Option<Vec<f64>>,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    length: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDto {
    family: String,
    #[serde(default)]
    value: Option<f64>,
    #[serde(default)]
    breakpoints: Option<Vec<f64>>,
    #[serde(default)]
    values: Option<Vec<f64>>,
    #[serde(default)]
    c_inf: Option<f64>,
    #[serde(default)]
    amplitude: Option<f64>,
    #[serde(default)]
    exponent: Option<f64>,
    #[serde(default)]
    rate: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialDto {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    modes: Option<Vec<ModePairDto>>,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModePairDto {
    w: [f64; 2],
    z: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDto {
    amplitudes: Vec<f64>,
    exponents: Vec<f64>,
}

/// Grid of power-family speed parameters swept by the sweep runner, in
/// row-major order: amplitudes outer, exponents inner.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub amplitudes: Vec<f64>,
    pub exponents: Vec<f64>,
}

/// Initial data: explicit per-mode pairs, or seeded random complex Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Explicit(StateVector),
    Random { seed: u64 },
}

impl InitialData {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Random { seed } => Some(*seed),
            Self::Explicit(_) => None,
        }
    }
}

/// A validated scenario ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub kind: ExperimentKind,
    pub spectrum: SpectrumModel,
    pub speed: CoefficientProfile,
    pub damping: CoefficientProfile,
    pub initial: InitialData,
    pub t_max: f64,
    pub samples: usize,
    pub profile_tol: f64,
    pub anchor_time: f64,
    pub integrator: IntegratorConfig,
    pub sweep: Option<SweepGrid>,
}

impl Scenario {
    /// Materializes the initial state (drawing the seeded Gaussians when the
    /// data is random).
    pub fn resolve_initial(&self) -> StateVector {
        match &self.initial {
            InitialData::Explicit(state) => state.clone(),
            InitialData::Random { seed } => {
                rng::gaussian_state(*seed, self.spectrum.mode_count())
            }
        }
    }
}

/// Loads and validates a scenario config from a JSON file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

/// Parses and validates a scenario config from JSON text.
pub fn parse_scenario(text: &str) -> Result<Scenario, ConfigError> {
    let dto: ScenarioDto = serde_json::from_str(text)?;
    validate_scenario(dto)
}

fn validate_scenario(dto: ScenarioDto) -> Result<Scenario, ConfigError> {
    if dto.name.is_empty() {
        return Err(invalid("name", "must be non-empty"));
    }
    let spectrum = build_spectrum(&dto.spectrum)?;
    let speed = build_profile(&dto.speed, "speed")?;
    speed
        .validate_speed()
        .map_err(|e| invalid("speed", e.to_string()))?;
    let damping = build_profile(&dto.damping, "damping")?;
    damping
        .validate_damping()
        .map_err(|e| invalid("damping", e.to_string()))?;
    let initial = build_initial(&dto.initial, spectrum.mode_count())?;

    if !(dto.t_max.is_finite() && dto.t_max > 0.0) {
        return Err(invalid("t_max", "must be positive and finite"));
    }
    if dto.samples < 2 {
        return Err(invalid("samples", "must be at least 2"));
    }
    let profile_tol = dto.profile_tol.unwrap_or(1e-3);
    if !(profile_tol.is_finite() && profile_tol > 0.0) {
        return Err(invalid("profile_tol", "must be positive and finite"));
    }
    let anchor_time = dto.anchor_time.unwrap_or((dto.t_max / 100.0).max(1.0));
    if !(anchor_time.is_finite() && anchor_time >= 0.0 && anchor_time < dto.t_max) {
        return Err(invalid("anchor_time", "must lie in [0, t_max)"));
    }
    let integrator = dto.integrator.unwrap_or_default();
    if !(integrator.rel_tol > 0.0 && integrator.abs_tol > 0.0 && integrator.max_step > 0.0) {
        return Err(invalid(
            "integrator",
            "tolerances and max_step must be positive",
        ));
    }

    let sweep = match dto.sweep {
        None => None,
        Some(grid) => {
            if grid.amplitudes.is_empty() {
                return Err(invalid("sweep.amplitudes", "must be non-empty"));
            }
            if grid.exponents.is_empty() {
                return Err(invalid("sweep.exponents", "must be non-empty"));
            }
            for (i, a) in grid.amplitudes.iter().enumerate() {
                if !a.is_finite() {
                    return Err(invalid(&format!("sweep.amplitudes[{i}]"), "must be finite"));
                }
            }
            for (i, p) in grid.exponents.iter().enumerate() {
                if !(p.is_finite() && *p > 0.0) {
                    return Err(invalid(
                        &format!("sweep.exponents[{i}]"),
                        "must be positive and finite",
                    ));
                }
            }
            if !matches!(speed, CoefficientProfile::PowerPerturbation { .. }) {
                return Err(invalid(
                    "sweep",
                    "sweeps vary the power family; speed.family must be \"power\"",
                ));
            }
            Some(SweepGrid {
                amplitudes: grid.amplitudes,
                exponents: grid.exponents,
            })
        }
    };

    Ok(Scenario {
        name: dto.name,
        kind: dto.kind,
        spectrum,
        speed,
        damping,
        initial,
        t_max: dto.t_max,
        samples: dto.samples,
        profile_tol,
        anchor_time,
        integrator,
        sweep,
    })
}

fn build_spectrum(dto: &SpectrumDto) -> Result<SpectrumModel, ConfigError> {
    match dto.kind.as_str() {
        "explicit" => {
            let eigenvalues = dto
                .eigenvalues
                .clone()
                .ok_or_else(|| invalid("spectrum.eigenvalues", "required for type \"explicit\""))?;
            if dto.count.is_some() || dto.length.is_some() {
                return Err(invalid(
                    "spectrum",
                    "count/length are not fields of type \"explicit\"",
                ));
            }
            SpectrumModel::new(eigenvalues).map_err(|e| invalid("spectrum.eigenvalues", e.to_string()))
        }
        "dirichlet_interval" => {
            let count = dto
                .count
                .ok_or_else(|| invalid("spectrum.count", "required for type \"dirichlet_interval\""))?;
            let length = dto
                .length
                .ok_or_else(|| invalid("spectrum.length", "required for type \"dirichlet_interval\""))?;
            if dto.eigenvalues.is_some() {
                return Err(invalid(
                    "spectrum",
                    "eigenvalues is not a field of type \"dirichlet_interval\"",
                ));
            }
            SpectrumModel::dirichlet_interval(count, length)
                .map_err(|e| invalid("spectrum", e.to_string()))
        }
        other => Err(invalid(
            "spectrum.type",
            format!("unknown type \"{other}\" (expected \"explicit\" or \"dirichlet_interval\")"),
        )),
    }
}

fn require(field: Option<f64>, path: String) -> Result<f64, ConfigError> {
    field.ok_or(ConfigError::Invalid {
        message: "required for this family".to_string(),
        path,
    })
}

fn reject_extras(
    dto: &ProfileDto,
    prefix: &str,
    allowed: &[&str],
) -> Result<(), ConfigError> {
    let fields: [(&str, bool); 7] = [
        ("value", dto.value.is_some()),
        ("breakpoints", dto.breakpoints.is_some()),
        ("values", dto.values.is_some()),
        ("c_inf", dto.c_inf.is_some()),
        ("amplitude", dto.amplitude.is_some()),
        ("exponent", dto.exponent.is_some()),
        ("rate", dto.rate.is_some()),
    ];
    for (name, present) in fields {
        if present && !allowed.contains(&name) {
            return Err(invalid(
                &format!("{prefix}.{name}"),
                format!("not a field of family \"{}\"", dto.family),
            ));
        }
    }
    Ok(())
}

fn build_profile(dto: &ProfileDto, prefix: &str) -> Result<CoefficientProfile, ConfigError> {
    let profile = match dto.family.as_str() {
        "constant" => {
            reject_extras(dto, prefix, &["value"])?;
            CoefficientProfile::constant(require(dto.value, format!("{prefix}.value"))?)
        }
        "power" => {
            reject_extras(dto, prefix, &["c_inf", "amplitude", "exponent"])?;
            CoefficientProfile::power(
                require(dto.c_inf, format!("{prefix}.c_inf"))?,
                require(dto.amplitude, format!("{prefix}.amplitude"))?,
                require(dto.exponent, format!("{prefix}.exponent"))?,
            )
        }
        "exp" => {
            reject_extras(dto, prefix, &["c_inf", "amplitude", "rate"])?;
            CoefficientProfile::exp(
                require(dto.c_inf, format!("{prefix}.c_inf"))?,
                require(dto.amplitude, format!("{prefix}.amplitude"))?,
                require(dto.rate, format!("{prefix}.rate"))?,
            )
        }
        "piecewise_linear" | "step" => {
            reject_extras(dto, prefix, &["breakpoints", "values"])?;
            let breakpoints = dto
                .breakpoints
                .clone()
                .ok_or_else(|| invalid(&format!("{prefix}.breakpoints"), "required"))?;
            let values = dto
                .values
                .clone()
                .ok_or_else(|| invalid(&format!("{prefix}.values"), "required"))?;
            if dto.family == "step" {
                CoefficientProfile::step(breakpoints, values)
            } else {
                CoefficientProfile::piecewise_linear(breakpoints, values)
            }
        }
        other => {
            return Err(invalid(
                &format!("{prefix}.family"),
                format!(
                    "unknown family \"{other}\" (expected constant, piecewise_linear, power, exp, step)"
                ),
            ))
        }
    };
    profile.map_err(|e| invalid(prefix, e.to_string()))
}

fn build_initial(dto: &InitialDto, mode_count: usize) -> Result<InitialData, ConfigError> {
    match dto.kind.as_str() {
        "explicit" => {
            if dto.seed.is_some() {
                return Err(invalid(
                    "initial.seed",
                    "not a field of type \"explicit\"",
                ));
            }
            let modes = dto
                .modes
                .as_ref()
                .ok_or_else(|| invalid("initial.modes", "required for type \"explicit\""))?;
            if modes.len() != mode_count {
                return Err(invalid(
                    "initial.modes",
                    format!("{} entries but the spectrum has {mode_count} modes", modes.len()),
                ));
            }
            let amplitudes = modes
                .iter()
                .map(|m| {
                    (
                        Complex64::new(m.w[0], m.w[1]),
                        Complex64::new(m.z[0], m.z[1]),
                    )
                })
                .collect();
            let state = StateVector::new(amplitudes)
                .map_err(|e| invalid("initial.modes", e.to_string()))?;
            Ok(InitialData::Explicit(state))
        }
        "random" => {
            if dto.modes.is_some() {
                return Err(invalid("initial.modes", "not a field of type \"random\""));
            }
            let seed = dto
                .seed
                .ok_or_else(|| invalid("initial.seed", "required for type \"random\""))?;
            Ok(InitialData::Random { seed })
        }
        other => Err(invalid(
            "initial.type",
            format!("unknown type \"{other}\" (expected \"explicit\" or \"random\")"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "demo",
        "kind": "sufficiency",
        "spectrum": {"type": "explicit", "eigenvalues": [1.0, 4.0]},
        "speed": {"family": "power", "c_inf": 1.0, "amplitude": 1.0, "exponent": 2.0},
        "damping": {"family": "constant", "value": 0.0},
        "initial": {"type": "random", "seed": 7},
        "t_max": 100.0,
        "samples": 11
    }"#;

    #[test]
    fn parses_minimal_scenario() {
        let scenario = parse_scenario(MINIMAL).unwrap();
        assert_eq!(scenario.name, "demo");
        assert_eq!(scenario.kind, ExperimentKind::Sufficiency);
        assert_eq!(scenario.spectrum.mode_count(), 2);
        assert_eq!(scenario.initial.seed(), Some(7));
        assert_eq!(scenario.samples, 11);
    }

    #[test]
    fn rejects_unknown_fields() {
        let text = MINIMAL.replace("\"samples\": 11", "\"samples\": 11, \"tyop\": 1");
        assert!(matches!(
            parse_scenario(&text).unwrap_err(),
            ConfigError::Parse(_)
        ));
    }

    #[test]
    fn rejects_cross_family_fields_with_path() {
        let text = MINIMAL.replace(
            r#""family": "constant", "value": 0.0"#,
            r#""family": "constant", "value": 0.0, "rate": 1.0"#,
        );
        match parse_scenario(&text).unwrap_err() {
            ConfigError::Invalid { path, .. } => assert_eq!(path, "damping.rate"),
            other => panic!("expected invalid-field error, got {other}"),
        }
    }

    #[test]
    fn rejects_missing_seed() {
        let text = MINIMAL.replace(r#""type": "random", "seed": 7"#, r#""type": "random""#);
        match parse_scenario(&text).unwrap_err() {
            ConfigError::Invalid { path, .. } => assert_eq!(path, "initial.seed"),
            other => panic!("expected invalid-field error, got {other}"),
        }
    }

    #[test]
    fn rejects_non_speed_profile() {
        let text = MINIMAL.replace(
            r#""speed": {"family": "power", "c_inf": 1.0, "amplitude": 1.0, "exponent": 2.0}"#,
            r#""speed": {"family": "power", "c_inf": 1.0, "amplitude": -1.0, "exponent": 2.0}"#,
        );
        match parse_scenario(&text).unwrap_err() {
            ConfigError::Invalid { path, .. } => assert_eq!(path, "speed"),
            other => panic!("expected speed validation error, got {other}"),
        }
    }

    #[test]
    fn rejects_non_integrable_damping() {
        let text = MINIMAL.replace(
            r#""damping": {"family": "constant", "value": 0.0}"#,
            r#""damping": {"family": "constant", "value": 0.5}"#,
        );
        match parse_scenario(&text).unwrap_err() {
            ConfigError::Invalid { path, .. } => assert_eq!(path, "damping"),
            other => panic!("expected damping validation error, got {other}"),
        }
    }

    #[test]
    fn dirichlet_spectrum_config() {
        let text = MINIMAL.replace(
            r#"{"type": "explicit", "eigenvalues": [1.0, 4.0]}"#,
            r#"{"type": "dirichlet_interval", "count": 3, "length": 3.141592653589793}"#,
        );
        let scenario = parse_scenario(&text).unwrap();
        assert_eq!(scenario.spectrum.mode_count(), 3);
        let text = MINIMAL.replace(
            r#"{"type": "explicit", "eigenvalues": [1.0, 4.0]}"#,
            r#"{"type": "dirichlet_interval", "count": 3}"#,
        );
        match parse_scenario(&text).unwrap_err() {
            ConfigError::Invalid { path, .. } => assert_eq!(path, "spectrum.length"),
            other => panic!("expected missing-length error, got {other}"),
        }
    }
}
