//! Scenario files: Riemann data, source and output resolution.

use crate::error::CliError;
use deltashock::model::{validate, Problem, RiemannData, SourceSpec};
use serde::Deserialize;
use std::path::Path;

pub const DEFAULT_T_MAX: f64 = 2.0;
pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_FAN_CURVES: usize = 12;
/// Fan step as a fraction of `t_max`.
pub const DEFAULT_FAN_STEPS: f64 = 2000.0;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanSettings {
    pub curves: Option<usize>,
    pub dt: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    rho_minus: f64,
    u_minus: f64,
    rho_plus: f64,
    u_plus: f64,
    source: serde_json::Value,
    t_max: Option<f64>,
    fan: Option<FanSettings>,
    samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// File stem; prefixes every output file.
    pub name: String,
    pub problem: Problem,
    pub t_max: f64,
    /// Trajectory rows are written at `t_max k / samples`.
    pub samples: usize,
    /// Curves per side.
    pub fan_curves: usize,
    pub fan_dt: f64,
}

impl Scenario {
    pub fn parse(name: &str, text: &str) -> Result<Self, CliError> {
        let raw: RawScenario =
            serde_json::from_str(text).map_err(|e| CliError::validation("InvalidScenario", e.to_string()))?;
        let data = RiemannData::new(raw.rho_minus, raw.u_minus, raw.rho_plus, raw.u_plus)?;
        let source = SourceSpec::deserialize(&raw.source)
            .map_err(|e| CliError::validation("UnsupportedSource", e.to_string()))?;
        let problem = validate(data, source)?;

        let t_max = raw.t_max.unwrap_or(DEFAULT_T_MAX);
        if !(t_max > 0.0 && t_max.is_finite()) {
            return Err(CliError::validation(
                "InvalidScenario",
                format!("t_max must be positive, got {t_max}"),
            ));
        }
        let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
        let fan = raw.fan.unwrap_or(FanSettings { curves: None, dt: None });
        let fan_curves = fan.curves.unwrap_or(DEFAULT_FAN_CURVES);
        let fan_dt = fan.dt.unwrap_or(t_max / DEFAULT_FAN_STEPS);
        if samples == 0 || fan_curves == 0 || !(fan_dt > 0.0 && fan_dt.is_finite()) {
            return Err(CliError::validation(
                "InvalidScenario",
                "samples, fan.curves and fan.dt must be positive",
            ));
        }
        Ok(Scenario {
            name: name.to_string(),
            problem,
            t_max,
            samples,
            fan_curves,
            fan_dt,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&stem(path), &text)
    }
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string())
}
