mod action;
mod phase;
mod profile;
mod verify;

use serde::Serialize;
use travelwave_core::{ModelKind, ModelSpec};

use crate::args::Cli;
use crate::config::{parse_kind, Command, RunConfig};
use crate::error::CliError;
use crate::output::{to_json, Sink};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let command = cli.command.command();
    let file = match cli.command.config_path() {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = file.overlay(cli.command.flags());
    if command == Command::Verify && cfg.sweep.unwrap_or(false) {
        return verify::sweep(&cfg);
    }
    let kind = model_kind(&cfg)?;
    match command {
        Command::Profile => profile::run(&cfg, kind),
        Command::Phase => phase::run(&cfg, kind),
        Command::Action => action::run(&cfg, kind),
        Command::Verify => verify::run(&cfg, kind),
    }
}

fn model_kind(cfg: &RunConfig) -> Result<ModelKind, CliError> {
    let name = cfg
        .model
        .as_deref()
        .ok_or_else(|| CliError::Usage("--model is required (kdv, sg, kpp or burgers)".into()))?;
    parse_kind(name)
}

/// Model parameters as they appear in reports.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Params {
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u2: Option<f64>,
}

impl From<&ModelSpec> for Params {
    fn from(model: &ModelSpec) -> Self {
        let raw = model.params();
        Params {
            a: raw.nonlinearity,
            d: raw.diffusion,
            k: raw.growth,
            u1: raw.right_state,
            u2: raw.left_state,
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a, E: Serialize> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    files: &'a [String],
    #[serde(flatten)]
    extra: E,
}

/// Writes `manifest.json` listing `files` and echoing the effective config.
fn write_manifest<E: Serialize>(
    sink: &Sink,
    config: &RunConfig,
    files: &[String],
    extra: E,
) -> Result<(), CliError> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config,
        files,
        extra,
    };
    sink.file("manifest.json", &to_json(&manifest)?)
}
