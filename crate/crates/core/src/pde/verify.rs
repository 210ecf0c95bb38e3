//! End-to-end verification run: evolve the closed form, then compare.

use alloc::format;

#[allow(unused_imports)] // see the crate root
use num_traits::Float;

use super::{
    action_timeseries, evolve, measure_speed, residual_at_speed, stability_limit, Evolution,
    Field1D, ResidualGrid, SpeedMethod,
};
use crate::action::action_reference;
use crate::defaults::{self, GridDefaults};
use crate::models::{ModelKind, TravelingWave};
use crate::{Error, Result};

/// Minimum distance, in decay lengths, between the wave and a clamped edge.
const EDGE_CLEARANCE: f64 = 10.0;

/// Overrides for a verification run; `None` picks the default derived from
/// the wave's decay length `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Grid spacing; default `ℓ / resolution`.
    pub dx: Option<f64>,
    /// Upper bound on the time step; default 0.8 × the stability limit.
    pub dt: Option<f64>,
    /// Run length; default the time to travel 5 ℓ.
    pub duration: Option<f64>,
    /// Domain is `[-half_width, half_width]`; default per model.
    pub half_width: Option<f64>,
    /// Initial wave position; default centres the path on 0.
    pub start: Option<f64>,
    pub snapshots: usize,
    /// Speed the wave is claimed to move at; default its own speed.
    pub claimed_speed: Option<f64>,
    pub speed_tol: f64,
    pub drift_tol: f64,
    pub residual_tol: f64,
    pub residual_points: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            dx: None,
            dt: None,
            duration: None,
            half_width: None,
            start: None,
            snapshots: defaults::SNAPSHOTS,
            claimed_speed: None,
            speed_tol: defaults::SPEED_TOL,
            drift_tol: defaults::DRIFT_TOL,
            residual_tol: defaults::RESIDUAL_TOL,
            residual_points: defaults::RESIDUAL_POINTS,
        }
    }
}

pub fn grid_defaults(kind: ModelKind) -> GridDefaults {
    match kind {
        ModelKind::Kdv => defaults::KDV_GRID,
        ModelKind::SineGordon => defaults::SINE_GORDON_GRID,
        ModelKind::FisherKpp => defaults::KPP_GRID,
        ModelKind::Burgers => defaults::BURGERS_GRID,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub v_claimed: f64,
    pub v_measured: f64,
    /// Relative to `|v_claimed|`, absolute when the claimed speed is 0.
    pub speed_error: f64,
    pub method: SpeedMethod,
    pub fit_residual: f64,
    pub action_initial: f64,
    pub action_reference: f64,
    pub action_drift: f64,
    pub residual_max: f64,
    /// Max-norm distance of the final field from the translated closed form,
    /// relative to the wave's amplitude range.
    pub translation_error: f64,
    pub passed: bool,
    pub dx: f64,
    pub dt: f64,
    pub duration: f64,
    pub half_width: f64,
    pub start: f64,
    pub grid_points: usize,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub report: VerifyReport,
    pub evolution: Evolution,
}

/// Evolves `wave` under its own PDE and checks speed, action drift and the
/// exact-solution residual against the configured thresholds.
pub fn verify(wave: &TravelingWave, cfg: &VerifyConfig) -> Result<Verification> {
    let model = wave.model();
    let kind = model.kind();
    let v = wave.speed();
    let ell = wave.decay_length();
    let grid = grid_defaults(kind);
    let periodic = kind == ModelKind::Kdv;

    let positive = |name: &'static str, x: Option<f64>| match x {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::InvalidParameter {
            name,
            requirement: "> 0",
        }),
        _ => Ok(()),
    };
    positive("dx", cfg.dx)?;
    positive("dt", cfg.dt)?;
    positive("T", cfg.duration)?;
    positive("half_width", cfg.half_width)?;

    let travel = defaults::TRAVEL_DECAY_LENGTHS * ell;
    let duration = cfg
        .duration
        .unwrap_or(if v == 0.0 { travel } else { travel / v.abs() });
    let start = cfg.start.unwrap_or(-0.5 * v * duration);
    let half = cfg.half_width.unwrap_or(grid.half_width * ell);
    let end = start + v * duration;
    if !periodic {
        let clearance = half - start.abs().max(end.abs());
        if clearance < EDGE_CLEARANCE * ell {
            return Err(Error::InvalidField(format!(
                "wave comes within {clearance:.3} of a clamped edge; {:.3} needed",
                EDGE_CLEARANCE * ell
            )));
        }
    }

    let requested_dx = cfg.dx.unwrap_or(ell / grid.resolution);
    let cells = (2.0 * half / requested_dx).round().max(1.0) as usize;
    let (n, dx) = if periodic {
        (cells, 2.0 * half / cells as f64)
    } else {
        (cells + 1, 2.0 * half / cells as f64)
    };
    let wave0 = wave.with_offset(start);
    let field = Field1D::from_wave(&wave0, -half, dx, n, 0.0, periodic)?;
    let dt = cfg
        .dt
        .unwrap_or(defaults::DT_SAFETY * stability_limit(&model, &field));
    let evolution = evolve(&model, &field, dt, duration, cfg.snapshots)?;

    let speed = measure_speed(&evolution.snapshots, &model)?;
    let actions = action_timeseries(&evolution.snapshots);
    let v_claimed = cfg.claimed_speed.unwrap_or(v);
    let speed_error = if v_claimed != 0.0 {
        (speed.v_measured - v_claimed).abs() / v_claimed.abs()
    } else {
        speed.v_measured.abs()
    };
    let residual_max = residual_at_speed(
        &wave0,
        v_claimed,
        ResidualGrid {
            x: (-half, half),
            t: (0.0, duration),
            points: cfg.residual_points,
        }
        .points(),
    );

    let last = evolution.last();
    let center = start + v * last.t();
    let mut worst: f64 = 0.0;
    for (i, &u) in last.samples().iter().enumerate() {
        let mut z = last.x(i) - center;
        if let Some(p) = last.period() {
            z -= p * (z / p).round();
        }
        worst = worst.max((u - wave.eval(z + wave.offset()).0).abs());
    }
    let translation_error = worst / wave.amplitude_range();

    let passed = speed_error <= cfg.speed_tol
        && actions.drift <= cfg.drift_tol
        && residual_max <= cfg.residual_tol;
    let report = VerifyReport {
        v_claimed,
        v_measured: speed.v_measured,
        speed_error,
        method: speed.method,
        fit_residual: speed.fit_residual,
        action_initial: actions.values[0].1,
        action_reference: action_reference(&model, v)?,
        action_drift: actions.drift,
        residual_max,
        translation_error,
        passed,
        dx,
        dt: evolution.dt,
        duration,
        half_width: half,
        start,
        grid_points: n,
        steps: evolution.steps,
    };
    Ok(Verification { report, evolution })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelSpec, SpeedRequest};

    #[test]
    fn narrow_domain_rejected() {
        let w = TravelingWave::new(
            ModelSpec::burgers(1.0, 0.0, 1.0).unwrap(),
            SpeedRequest::Auto,
            0.0,
            None,
        )
        .unwrap();
        let cfg = VerifyConfig {
            half_width: Some(20.0),
            ..VerifyConfig::default()
        };
        assert!(matches!(verify(&w, &cfg), Err(Error::InvalidField(_))));
    }

    #[test]
    fn oversized_dt_rejected() {
        let w = TravelingWave::new(
            ModelSpec::fisher_kpp(1.0, 6.0).unwrap(),
            SpeedRequest::Auto,
            0.0,
            None,
        )
        .unwrap();
        let cfg = VerifyConfig {
            dt: Some(0.01),
            ..VerifyConfig::default()
        };
        assert!(matches!(
            verify(&w, &cfg),
            Err(Error::StabilityViolation { .. })
        ));
    }
}
