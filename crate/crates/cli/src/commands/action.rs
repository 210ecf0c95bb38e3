use serde::Serialize;
use travelwave_core::action::{action_profile, action_reference, QuadratureOptions};
use travelwave_core::{ModelKind, TravelingWave};

use super::{write_manifest, Params};
use crate::config::{resolve, Command, RunConfig, SpeedSetting};
use crate::error::CliError;
use crate::output::{stdout, to_json, Sink};

#[derive(Serialize)]
struct ActionReport {
    model: &'static str,
    params: Params,
    v: f64,
    #[serde(rename = "I_numeric")]
    i_numeric: f64,
    #[serde(rename = "I_reference")]
    i_reference: f64,
    /// Quadrature error estimate (discretisation plus truncation).
    abs_error: f64,
    /// `|I_numeric - I_reference|`.
    discrepancy: f64,
    relative_discrepancy: f64,
    #[serde(rename = "L")]
    l: f64,
    nodes: usize,
}

pub fn run(cfg: &RunConfig, kind: ModelKind) -> Result<(), CliError> {
    let mut r = resolve(Command::Action, cfg, kind)?;
    let wave = TravelingWave::new(r.model, r.speed, r.z0, r.branch)?;
    r.effective.v = Some(SpeedSetting::Value(wave.speed()));

    let mut opts = QuadratureOptions::default();
    if let Some(tol) = r.effective.quad_tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::Usage("quad_tol must be > 0".into()));
        }
        opts.abs_tol = tol;
    }
    let est = action_profile(&wave, &opts)?;
    let reference = action_reference(&r.model, wave.speed())?;
    let discrepancy = (est.value - reference).abs();
    let report = ActionReport {
        model: kind.name(),
        params: Params::from(&r.model),
        v: wave.speed(),
        i_numeric: est.value,
        i_reference: reference,
        abs_error: est.abs_error_estimate,
        discrepancy,
        relative_discrepancy: discrepancy / reference.abs(),
        l: est.half_width,
        nodes: est.nodes,
    };
    let json = to_json(&report)?;
    let sink = Sink::new(r.effective.out.clone())?;
    sink.file("action.json", &json)?;
    write_manifest(&sink, &r.effective, &["action.json".to_owned()], ())?;
    stdout(&json)
}
