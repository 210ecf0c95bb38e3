use travelwave_core::{ModelKind, TravelingWave};

use super::write_manifest;
use crate::config::{parse_range, resolve, Command, RunConfig};
use crate::error::CliError;
use crate::output::{stdout, to_csv, Sink};

/// Default sampling: 20 decay lengths either side, 100 points per length.
const HALF_SPAN: f64 = 20.0;
const POINTS_PER_LENGTH: f64 = 100.0;
const MAX_ROWS: usize = 10_000_000;

pub fn run(cfg: &RunConfig, kind: ModelKind) -> Result<(), CliError> {
    let mut r = resolve(Command::Profile, cfg, kind)?;
    let wave = TravelingWave::new(r.model, r.speed, r.z0, r.branch)?;
    let ell = wave.decay_length();
    let (a, b, h) = match &r.effective.range {
        Some(s) => parse_range(s)?,
        None => (
            r.z0 - HALF_SPAN * ell,
            r.z0 + HALF_SPAN * ell,
            ell / POINTS_PER_LENGTH,
        ),
    };
    r.effective.range = Some(format!("{a}:{b}:{h}"));
    r.effective.v = Some(crate::config::SpeedSetting::Value(wave.speed()));
    r.effective.branch = Some(wave.branch().name().to_owned());

    let steps = ((b - a) / h + 1e-9).floor();
    if steps + 1.0 > MAX_ROWS as f64 {
        return Err(CliError::Usage(format!(
            "range yields more than {MAX_ROWS} rows"
        )));
    }
    let n = steps as usize + 1;
    // Exact multiples of the step when the range divides evenly.
    let even = ((n - 1) as f64 * h - (b - a)).abs() <= 1e-9 * (b - a);
    let rows: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let z = if even && n > 1 {
                a + (b - a) * i as f64 / (n - 1) as f64
            } else {
                a + h * i as f64
            };
            let (u, du) = wave.eval(z);
            [z, u, du]
        })
        .collect();
    let csv = to_csv(&["z", "u", "du_dz"], rows.iter().map(|r| r.as_slice()))?;

    let sink = Sink::new(r.effective.out.clone())?;
    if sink.dir().is_some() {
        sink.file("profile.csv", &csv)?;
        write_manifest(&sink, &r.effective, &["profile.csv".to_owned()], ())?;
    } else {
        stdout(&csv)?;
    }
    Ok(())
}
