use serde::Serialize;
use travelwave_core::pde::{verify as verify_wave, Field1D, VerifyConfig, VerifyReport};
use travelwave_core::{ModelKind, TravelingWave};

use super::{write_manifest, Params};
use crate::config::{resolve, Command, RunConfig, SpeedSetting};
use crate::error::{error_json, CliError};
use crate::output::{stdout, to_csv, to_json, Sink};

#[derive(Serialize)]
struct Thresholds {
    speed: f64,
    drift: f64,
    residual: f64,
}

#[derive(Serialize)]
struct Report {
    model: &'static str,
    params: Params,
    branch: &'static str,
    v_claimed: f64,
    v_measured: f64,
    speed_error: f64,
    speed_method: &'static str,
    fit_residual: f64,
    action_initial: f64,
    action_reference: f64,
    action_drift: f64,
    residual_max: f64,
    translation_error: f64,
    thresholds: Thresholds,
    passed: bool,
    dx: f64,
    dt: f64,
    #[serde(rename = "T")]
    duration: f64,
    half_width: f64,
    start: f64,
    grid_points: usize,
    steps: usize,
    snapshots: usize,
}

#[derive(Serialize)]
struct SnapshotManifest<'a> {
    model: &'static str,
    params: Params,
    v: f64,
    dx: f64,
    dt: f64,
    times: &'a [f64],
}

fn build_config(cfg: &RunConfig, explicit_z0: Option<f64>) -> Result<VerifyConfig, CliError> {
    let mut vc = VerifyConfig {
        dx: cfg.dx,
        dt: cfg.dt,
        duration: cfg.t,
        half_width: cfg.half_width,
        start: explicit_z0,
        claimed_speed: cfg.force_v,
        ..VerifyConfig::default()
    };
    if let Some(n) = cfg.snapshots {
        if n < 3 {
            return Err(CliError::Usage("snapshots must be at least 3".into()));
        }
        vc.snapshots = n;
    }
    Ok(vc)
}

/// Runs one verification and writes its files into `sink`.
fn run_one(cfg: &RunConfig, kind: ModelKind, sink: &Sink) -> Result<Report, CliError> {
    let mut r = resolve(Command::Verify, cfg, kind)?;
    let wave = TravelingWave::new(r.model, r.speed, 0.0, r.branch)?;
    let vc = build_config(&r.effective, cfg.z0)?;
    let run = verify_wave(&wave, &vc)?;
    let rep: VerifyReport = run.report;

    r.effective.v = Some(SpeedSetting::Value(wave.speed()));
    r.effective.branch = Some(wave.branch().name().to_owned());
    r.effective.dx = Some(rep.dx);
    r.effective.dt = Some(rep.dt);
    r.effective.t = Some(rep.duration);
    r.effective.half_width = Some(rep.half_width);
    r.effective.z0 = Some(rep.start);
    r.effective.snapshots = Some(run.evolution.snapshots.len());

    let report = Report {
        model: kind.name(),
        params: Params::from(&r.model),
        branch: wave.branch().name(),
        v_claimed: rep.v_claimed,
        v_measured: rep.v_measured,
        speed_error: rep.speed_error,
        speed_method: rep.method.name(),
        fit_residual: rep.fit_residual,
        action_initial: rep.action_initial,
        action_reference: rep.action_reference,
        action_drift: rep.action_drift,
        residual_max: rep.residual_max,
        translation_error: rep.translation_error,
        thresholds: Thresholds {
            speed: vc.speed_tol,
            drift: vc.drift_tol,
            residual: vc.residual_tol,
        },
        passed: rep.passed,
        dx: rep.dx,
        dt: rep.dt,
        duration: rep.duration,
        half_width: rep.half_width,
        start: rep.start,
        grid_points: rep.grid_points,
        steps: rep.steps,
        snapshots: run.evolution.snapshots.len(),
    };

    if sink.dir().is_some() {
        let mut files = vec!["report.json".to_owned()];
        sink.file("report.json", &to_json(&report)?)?;
        for (i, snap) in run.evolution.snapshots.iter().enumerate() {
            let name = format!("snapshot_{i:03}.csv");
            sink.file(&name, &snapshot_csv(snap)?)?;
            files.push(name);
        }
        let times = run.evolution.times();
        let extra = SnapshotManifest {
            model: kind.name(),
            params: Params::from(&r.model),
            v: wave.speed(),
            dx: rep.dx,
            dt: rep.dt,
            times: &times,
        };
        write_manifest(sink, &r.effective, &files, extra)?;
    }
    Ok(report)
}

fn snapshot_csv(field: &Field1D) -> Result<String, CliError> {
    let u = field.samples();
    match field.velocity() {
        Some(w) => {
            let rows: Vec<[f64; 3]> = (0..u.len()).map(|i| [field.x(i), u[i], w[i]]).collect();
            to_csv(&["x", "u", "u_t"], rows.iter().map(|r| r.as_slice()))
        }
        None => {
            let rows: Vec<[f64; 2]> = (0..u.len()).map(|i| [field.x(i), u[i]]).collect();
            to_csv(&["x", "u"], rows.iter().map(|r| r.as_slice()))
        }
    }
}

pub fn run(cfg: &RunConfig, kind: ModelKind) -> Result<(), CliError> {
    let sink = Sink::new(cfg.out.clone())?;
    let report = run_one(cfg, kind, &sink)?;
    stdout(&to_json(&report)?)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed(kind.name().to_owned()))
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum SweepEntry {
    Report(Box<Report>),
    Failed {
        model: &'static str,
        error: serde_json::Value,
    },
}

/// Every model at its defaults, run concurrently and reported in model-name
/// order.
pub fn sweep(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.v.is_some() || cfg.branch.is_some() || cfg.force_v.is_some() || cfg.model.is_some() {
        return Err(CliError::Usage(
            "--sweep runs every model at its own speed; drop model, v, branch and force-v".into(),
        ));
    }
    let sink = Sink::new(cfg.out.clone())?;
    let mut kinds = ModelKind::ALL.to_vec();
    kinds.sort_by_key(|k| k.name());
    let sinks = kinds
        .iter()
        .map(|k| sink.subdir(k.name()))
        .collect::<Result<Vec<_>, _>>()?;

    let results: Vec<Result<Report, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = kinds
            .iter()
            .zip(&sinks)
            .map(|(&kind, sink)| s.spawn(move || run_one(cfg, kind, sink)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });

    let mut all_passed = true;
    let mut entries = Vec::with_capacity(results.len());
    for (kind, result) in kinds.iter().zip(results) {
        match result {
            Ok(report) => {
                all_passed &= report.passed;
                entries.push(SweepEntry::Report(Box::new(report)));
            }
            Err(e) if e.exit_code() == 1 => return Err(e),
            Err(e) => {
                all_passed = false;
                let body: serde_json::Value =
                    serde_json::from_str(&error_json(e.kind(), e.to_string()))?;
                entries.push(SweepEntry::Failed {
                    model: kind.name(),
                    error: body["error"].clone(),
                });
            }
        }
    }
    let json = to_json(&entries)?;
    sink.file("sweep.json", &json)?;
    if sink.dir().is_some() {
        let mut eff = cfg.clone();
        eff.command = Some(Command::Verify);
        let files: Vec<String> = kinds
            .iter()
            .map(|k| format!("{}/manifest.json", k.name()))
            .chain(["sweep.json".to_owned()])
            .collect();
        write_manifest(&sink, &eff, &files, ())?;
    }
    stdout(&json)?;
    if all_passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed("sweep".into()))
    }
}
