//! Run configuration: JSON file values, overridden by command-line flags,
//! completed with the documented defaults.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use travelwave_core::models::make_model;
use travelwave_core::{defaults, Branch, ModelKind, ModelSpec, RawParams, SpeedRequest};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Profile,
    Phase,
    Action,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// `v` as given by the user: a number or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpeedSetting {
    Value(f64),
    Auto(Auto),
}

impl SpeedSetting {
    pub fn request(self) -> SpeedRequest {
        match self {
            SpeedSetting::Value(v) => SpeedRequest::Value(v),
            SpeedSetting::Auto(_) => SpeedRequest::Auto,
        }
    }
}

impl std::str::FromStr for SpeedSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SpeedSetting::Auto(Auto::Auto));
        }
        s.parse()
            .map(SpeedSetting::Value)
            .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
    }
}

/// Every setting a run can take. Unknown keys in a config file are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<SpeedSetting>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<f64>,
    /// Profile sampling `"start:end:step"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_tol: Option<f64>,
    /// Number of fan orbits in a phase portrait.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub force_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        RunConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let err = |reason: String| CliError::Config {
            path: path.to_path_buf(),
            reason,
        };
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| err(e.to_string()))
    }

    /// `top` wins wherever it is set.
    pub fn overlay(self, top: RunConfig) -> RunConfig {
        let base = self;
        overlay!(base, top; command, model, a, d, k, u1, u2, v, branch, z0, range, out, rtol,
            atol, quad_tol, fan, dx, dt, t, half_width, snapshots, force_v, sweep)
    }

    fn raw_params(&self) -> RawParams {
        RawParams {
            nonlinearity: self.a,
            diffusion: self.d,
            growth: self.k,
            right_state: self.u1,
            left_state: self.u2,
        }
    }
}

/// A configuration checked against the model and completed with defaults.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub model: ModelSpec,
    pub speed: SpeedRequest,
    pub branch: Option<Branch>,
    pub z0: f64,
    /// What was actually run, for the manifest.
    pub effective: RunConfig,
}

pub fn parse_kind(name: &str) -> Result<ModelKind, CliError> {
    name.parse().map_err(|_| {
        CliError::Usage(format!(
            "unknown model {name:?}; expected one of kdv, sg, kpp, burgers"
        ))
    })
}

/// Fills model defaults, rejects parameters the model does not take and
/// builds the model.
pub fn resolve(command: Command, cfg: &RunConfig, kind: ModelKind) -> Result<Resolved, CliError> {
    if let Some(c) = cfg.command {
        if c != command {
            return Err(CliError::Usage(format!(
                "config is for the {c:?} command, not {command:?}"
            )));
        }
    }
    let mut eff = cfg.clone();
    eff.command = Some(command);
    eff.model = Some(kind.name().to_owned());

    let foreign: &[(&str, bool)] = match kind {
        ModelKind::Kdv => &[
            ("D", eff.d.is_some()),
            ("k", eff.k.is_some()),
            ("u1", eff.u1.is_some()),
            ("u2", eff.u2.is_some()),
        ],
        ModelKind::SineGordon => &[
            ("A", eff.a.is_some()),
            ("D", eff.d.is_some()),
            ("k", eff.k.is_some()),
            ("u1", eff.u1.is_some()),
            ("u2", eff.u2.is_some()),
        ],
        ModelKind::FisherKpp => &[
            ("A", eff.a.is_some()),
            ("u1", eff.u1.is_some()),
            ("u2", eff.u2.is_some()),
        ],
        ModelKind::Burgers => &[("A", eff.a.is_some()), ("k", eff.k.is_some())],
    };
    if !eff.sweep.unwrap_or(false) {
        if let Some((name, _)) = foreign.iter().find(|(_, set)| *set) {
            return Err(CliError::Usage(format!(
                "parameter {name} does not apply to model {}",
                kind.name()
            )));
        }
    }
    match kind {
        ModelKind::Kdv => {
            eff.a.get_or_insert(1.0);
            eff.v
                .get_or_insert(SpeedSetting::Value(defaults::KDV_SPEED));
        }
        ModelKind::SineGordon => {
            let v = if command == Command::Verify {
                defaults::SINE_GORDON_VERIFY_SPEED
            } else {
                defaults::SINE_GORDON_SPEED
            };
            eff.v.get_or_insert(SpeedSetting::Value(v));
        }
        ModelKind::FisherKpp => {
            eff.d.get_or_insert(1.0);
            eff.k.get_or_insert(6.0);
            eff.v.get_or_insert(SpeedSetting::Auto(Auto::Auto));
        }
        ModelKind::Burgers => {
            eff.d.get_or_insert(1.0);
            eff.u1.get_or_insert(0.0);
            eff.u2.get_or_insert(1.0);
            eff.v.get_or_insert(SpeedSetting::Auto(Auto::Auto));
        }
    }
    // keep only the parameters this model takes
    let mut params = eff.raw_params();
    match kind {
        ModelKind::Kdv => {
            params = RawParams {
                nonlinearity: params.nonlinearity,
                ..RawParams::default()
            };
        }
        ModelKind::SineGordon => params = RawParams::default(),
        ModelKind::FisherKpp => {
            params = RawParams {
                diffusion: params.diffusion,
                growth: params.growth,
                ..RawParams::default()
            };
        }
        ModelKind::Burgers => {
            params = RawParams {
                growth: None,
                nonlinearity: None,
                ..params
            };
        }
    }
    eff.a = params.nonlinearity;
    eff.d = params.diffusion;
    eff.k = params.growth;
    eff.u1 = params.right_state;
    eff.u2 = params.left_state;
    eff.sweep = None;

    let model = make_model(kind, &params)?;
    let branch = match &eff.branch {
        Some(b) => Some(
            b.parse::<Branch>()
                .map_err(|_| CliError::Usage(format!("unknown branch {b:?}")))?,
        ),
        None => None,
    };
    let z0 = *eff.z0.get_or_insert(0.0);
    let speed = eff
        .v
        .map(SpeedSetting::request)
        .unwrap_or(SpeedRequest::Auto);
    Ok(Resolved {
        model,
        speed,
        branch,
        z0,
        effective: eff,
    })
}

/// Parses `"start:end:step"`.
pub fn parse_range(s: &str) -> Result<(f64, f64, f64), CliError> {
    let bad = || {
        CliError::Usage(format!(
            "range {s:?} must be start:end:step with start < end, step > 0"
        ))
    };
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, h] = parts.as_slice() else {
        return Err(bad());
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
    let (a, b, h) = (num(a)?, num(b)?, num(h)?);
    if !(a.is_finite() && b.is_finite() && a < b && h > 0.0 && h.is_finite()) {
        return Err(bad());
    }
    Ok((a, b, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let e = serde_json::from_str::<RunConfig>(r#"{"model": "kdv", "bogus": 1}"#);
        assert!(e.is_err());
        let c: RunConfig =
            serde_json::from_str(r#"{"model": "kpp", "v": "auto", "D": 2}"#).unwrap();
        assert_eq!(c.v, Some(SpeedSetting::Auto(Auto::Auto)));
        assert_eq!(c.d, Some(2.0));
    }

    #[test]
    fn flags_override_file() {
        let file = RunConfig {
            model: Some("kdv".into()),
            a: Some(2.0),
            v: Some(SpeedSetting::Value(3.0)),
            ..RunConfig::default()
        };
        let flags = RunConfig {
            v: Some(SpeedSetting::Value(1.5)),
            ..RunConfig::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.a, Some(2.0));
        assert_eq!(merged.v, Some(SpeedSetting::Value(1.5)));
    }

    #[test]
    fn defaults_and_foreign_parameters() {
        let r = resolve(Command::Action, &RunConfig::default(), ModelKind::FisherKpp).unwrap();
        assert_eq!(r.model, ModelSpec::fisher_kpp(1.0, 6.0).unwrap());
        assert_eq!(r.speed, SpeedRequest::Auto);
        let r = resolve(
            Command::Verify,
            &RunConfig::default(),
            ModelKind::SineGordon,
        )
        .unwrap();
        assert_eq!(r.speed, SpeedRequest::Value(0.5));
        let cfg = RunConfig {
            k: Some(2.0),
            ..RunConfig::default()
        };
        assert!(matches!(
            resolve(Command::Profile, &cfg, ModelKind::Kdv),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-20:20:0.01").unwrap(), (-20.0, 20.0, 0.01));
        assert!(parse_range("1:0:0.1").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:-1").is_err());
    }
}
