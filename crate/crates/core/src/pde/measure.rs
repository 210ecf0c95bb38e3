//! Speed, action and residual measurements.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // see the crate root
use num_traits::Float;

use super::{Boundary, Field1D};
use crate::models::{ModelSpec, TravelingWave};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedMethod {
    /// Where `u` crosses the mid-level between the edge values.
    LevelCrossing,
    /// Centroid of `(u - u∞)²`.
    EnergyCentroid,
}

impl SpeedMethod {
    pub fn name(self) -> &'static str {
        match self {
            SpeedMethod::LevelCrossing => "level-crossing",
            SpeedMethod::EnergyCentroid => "energy-centroid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedMeasurement {
    pub v_measured: f64,
    pub method: SpeedMethod,
    /// RMS distance of the tracked positions from the fitted line.
    pub fit_residual: f64,
    pub positions: Vec<(f64, f64)>,
}

/// Fits a line through the tracked wave position of each snapshot.
pub fn measure_speed(snapshots: &[Field1D], model: &ModelSpec) -> Result<SpeedMeasurement> {
    if snapshots.len() < 3 {
        return Err(Error::Untrackable("fewer than 3 snapshots"));
    }
    let method = match model {
        ModelSpec::Kdv { .. } => SpeedMethod::EnergyCentroid,
        _ => SpeedMethod::LevelCrossing,
    };
    let mut positions: Vec<(f64, f64)> = Vec::with_capacity(snapshots.len());
    for field in snapshots {
        let mut x = match method {
            SpeedMethod::EnergyCentroid => centroid(field)?,
            SpeedMethod::LevelCrossing => crossing(field)?,
        };
        if let (Some(period), Some(&(_, prev))) = (field.period(), positions.last()) {
            x += period * ((prev - x) / period).round();
        }
        positions.push((field.t(), x));
    }

    let n = positions.len() as f64;
    let tm = positions.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = positions.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = positions.iter().map(|p| (p.0 - tm).powi(2)).sum();
    if stt == 0.0 {
        return Err(Error::Untrackable("snapshots share one time"));
    }
    let stx: f64 = positions.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    let slope = stx / stt;
    let rss: f64 = positions
        .iter()
        .map(|p| (p.1 - xm - slope * (p.0 - tm)).powi(2))
        .sum();
    Ok(SpeedMeasurement {
        v_measured: slope,
        method,
        fit_residual: (rss / n).sqrt(),
        positions,
    })
}

fn centroid(field: &Field1D) -> Result<f64> {
    let u = field.samples();
    let peak = (0..u.len())
        .max_by(|&a, &b| u[a].abs().total_cmp(&u[b].abs()))
        .unwrap_or(0);
    let xp = field.x(peak);
    let period = field.period();
    let (mut w, mut wx) = (0.0, 0.0);
    for (i, &ui) in u.iter().enumerate() {
        let mut d = field.x(i) - xp;
        if let Some(p) = period {
            d -= p * (d / p).round();
        }
        let e = ui * ui;
        w += e;
        wx += e * d;
    }
    if w == 0.0 {
        return Err(Error::Untrackable("flat field"));
    }
    Ok(xp + wx / w)
}

fn crossing(field: &Field1D) -> Result<f64> {
    let u = field.samples();
    let (left, right) = (u[0], u[u.len() - 1]);
    if (left - right).abs() <= 1e-12 * left.abs().max(right.abs()).max(1.0) {
        return Err(Error::Untrackable("flat field"));
    }
    let level = 0.5 * (left + right);
    // The steepest crossing wins if noise produces several.
    let mut best: Option<(f64, f64)> = None;
    for i in 0..u.len() - 1 {
        let (a, b) = (u[i] - level, u[i + 1] - level);
        if a == 0.0 || (a < 0.0) != (b < 0.0) {
            let jump = (u[i + 1] - u[i]).abs();
            let x = if a == 0.0 {
                field.x(i)
            } else {
                field.x(i) + field.dx() * a / (a - b)
            };
            if best.is_none_or(|(j, _)| jump > j) {
                best = Some((jump, x));
            }
        }
    }
    best.map(|(_, x)| x)
        .ok_or(Error::Untrackable("no level crossing"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSeries {
    /// `(t, I(t))` per snapshot.
    pub values: Vec<(f64, f64)>,
    /// `max |I(t) - I(0)| / I(0)`, or the absolute change when `I(0) = 0`.
    pub drift: f64,
    pub relative: bool,
}

/// `I(t) = (1/2π) Σ (central-difference slope)² dx` per snapshot; clamped
/// edge samples are left out.
pub fn action_timeseries(snapshots: &[Field1D]) -> ActionSeries {
    let values: Vec<(f64, f64)> = snapshots
        .iter()
        .map(|f| (f.t(), discrete_action(f)))
        .collect();
    let i0 = values.first().map_or(0.0, |v| v.1);
    let change = values.iter().fold(0.0, |m: f64, v| m.max((v.1 - i0).abs()));
    let relative = i0 != 0.0;
    ActionSeries {
        values,
        drift: if relative { change / i0.abs() } else { change },
        relative,
    }
}

fn discrete_action(field: &Field1D) -> f64 {
    let u = field.samples();
    let n = u.len();
    let inv = 0.5 / field.dx();
    let slope = |i: usize| match field.bc() {
        Boundary::Periodic => (u[(i + 1) % n] - u[(i + n - 1) % n]) * inv,
        Boundary::Clamped { .. } => (u[i + 1] - u[i - 1]) * inv,
    };
    let range = match field.bc() {
        Boundary::Periodic => 0..n,
        Boundary::Clamped { .. } => 1..n - 1,
    };
    range.map(|i| slope(i).powi(2)).sum::<f64>() * field.dx() / (2.0 * PI)
}

/// Points `(x, t)` for residual checks: a low-discrepancy (R2) sequence
/// filling a rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualGrid {
    pub x: (f64, f64),
    pub t: (f64, f64),
    pub points: usize,
}

impl ResidualGrid {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        const A1: f64 = 0.754_877_666_246_692_7;
        const A2: f64 = 0.569_840_290_998_053_2;
        (0..self.points).map(move |j| {
            let s = (0.5 + A1 * j as f64).fract();
            let r = (0.5 + A2 * j as f64).fract();
            (
                self.x.0 + (self.x.1 - self.x.0) * s,
                self.t.0 + (self.t.1 - self.t.0) * r,
            )
        })
    }
}

/// Largest `|PDE left-hand side|` of the wave's closed form, evaluated with
/// analytic derivatives and time derivative `-v_claimed u'`.
pub fn residual_at_speed(
    wave: &TravelingWave,
    v_claimed: f64,
    points: impl IntoIterator<Item = (f64, f64)>,
) -> f64 {
    let v = wave.speed();
    let mut worst: f64 = 0.0;
    for (x, t) in points {
        let j = wave.jet(x - v * t);
        let r = match wave.model() {
            ModelSpec::Kdv { nonlinearity } => {
                -v_claimed * j.du + nonlinearity * j.u * j.du + j.d3u
            }
            ModelSpec::SineGordon => (v_claimed * v_claimed - 1.0) * j.d2u + j.u.sin(),
            ModelSpec::FisherKpp { diffusion, growth } => {
                -v_claimed * j.du - diffusion * j.d2u - growth * j.u * (1.0 - j.u)
            }
            ModelSpec::Burgers { viscosity, .. } => {
                -v_claimed * j.du + j.u * j.du - viscosity * j.d2u
            }
        };
        worst = worst.max(r.abs());
    }
    worst
}

/// [`residual_at_speed`] at the wave's own speed.
pub fn residual_check(wave: &TravelingWave, grid: &ResidualGrid) -> f64 {
    residual_at_speed(wave, wave.speed(), grid.points())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SpeedRequest;
    use alloc::vec;

    fn wave(model: ModelSpec, v: SpeedRequest) -> TravelingWave {
        TravelingWave::new(model, v, 0.0, None).unwrap()
    }

    fn grid(w: &TravelingWave) -> ResidualGrid {
        let l = w.decay_length();
        ResidualGrid {
            x: (-20.0 * l, 20.0 * l),
            t: (-5.0, 5.0),
            points: 1000,
        }
    }

    #[test]
    fn exact_waves_have_tiny_residuals() {
        for w in [
            wave(ModelSpec::kdv(1.0).unwrap(), SpeedRequest::Value(1.0)),
            wave(ModelSpec::SineGordon, SpeedRequest::Value(0.5)),
            wave(ModelSpec::fisher_kpp(1.0, 6.0).unwrap(), SpeedRequest::Auto),
            wave(
                ModelSpec::burgers(1.0, 0.0, 1.0).unwrap(),
                SpeedRequest::Auto,
            ),
        ] {
            assert!(residual_check(&w, &grid(&w)) <= 1e-9, "{:?}", w.model());
        }
    }

    #[test]
    fn wrong_speed_is_caught() {
        let w = wave(ModelSpec::fisher_kpp(1.0, 6.0).unwrap(), SpeedRequest::Auto);
        let r = residual_at_speed(&w, 4.0, grid(&w).points());
        // the residual is -u' whose peak is 8/27
        assert!((r - 8.0 / 27.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn grid_points_stay_inside() {
        let g = ResidualGrid {
            x: (-1.0, 1.0),
            t: (2.0, 3.0),
            points: 500,
        };
        assert!(g
            .points()
            .all(|(x, t)| (-1.0..=1.0).contains(&x) && (2.0..=3.0).contains(&t)));
        assert_eq!(g.points().count(), 500);
    }

    #[test]
    fn constant_field_has_zero_action() {
        let f = Field1D::new(0.0, 0.1, 0.0, vec![0.3; 32], Boundary::Periodic).unwrap();
        let series = action_timeseries(&[f.clone(), f]);
        assert!(series.values.iter().all(|v| v.1 == 0.0));
        assert_eq!(series.drift, 0.0);
        assert!(!series.relative);
        assert!(matches!(
            measure_speed(&[], &ModelSpec::SineGordon),
            Err(Error::Untrackable(_))
        ));
    }

    #[test]
    fn tracks_a_sampled_front() {
        let w = wave(
            ModelSpec::burgers(1.0, 0.0, 2.0).unwrap(),
            SpeedRequest::Auto,
        );
        let snaps: Vec<Field1D> = (0..5)
            .map(|k| Field1D::from_wave(&w, -30.0, 0.05, 1201, k as f64, false).unwrap())
            .collect();
        let m = measure_speed(&snaps, &w.model()).unwrap();
        assert_eq!(m.method, SpeedMethod::LevelCrossing);
        assert!((m.v_measured - 1.0).abs() < 1e-6);
        let series = action_timeseries(&snaps);
        assert!(series.drift < 1e-6);
    }

    #[test]
    fn centroid_unwraps_periodic_motion() {
        let w = wave(ModelSpec::kdv(1.0).unwrap(), SpeedRequest::Value(1.0));
        // positions 8, 14, 20 -> wrap to -20 on a period-40 grid
        let snaps: Vec<Field1D> = (0..3)
            .map(|k| {
                let t = 8.0 + 6.0 * k as f64;
                let samples = (0..800)
                    .map(|i| {
                        let x = -20.0 + 0.05 * i as f64;
                        let mut z = x - t;
                        z -= 40.0 * (z / 40.0).round();
                        w.eval(z).0
                    })
                    .collect();
                Field1D::new(-20.0, 0.05, t, samples, Boundary::Periodic).unwrap()
            })
            .collect();
        let m = measure_speed(&snaps, &w.model()).unwrap();
        assert!((m.v_measured - 1.0).abs() < 1e-6, "{}", m.v_measured);
        assert!(m.fit_residual < 1e-6);
    }
}
