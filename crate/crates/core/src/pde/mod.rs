//! Full PDE evolution of the closed-form waves and the measurements used to
//! check them: propagation speed, action drift and exact-solution residuals.
//!
//! | model | equation | scheme | boundary |
//! |---|---|---|---|
//! | KdV | `u_t + A u u_x + u_xxx = 0` | 4th-order central, flux form, RK4 | periodic |
//! | sine-Gordon | `u_tt - u_xx + sin u = 0` | leapfrog | clamped |
//! | Fisher–KPP | `u_t = D u_xx + k u (1 - u)` | 2nd-order central, RK4 | clamped |
//! | Burgers | `u_t + u u_x = D u_xx` | 2nd-order central, flux form, RK4 | clamped |

mod measure;
mod scheme;
mod verify;

use alloc::format;
use alloc::vec::Vec;

use crate::models::{ModelKind, TravelingWave};
use crate::{Error, Result};

pub use measure::{
    action_timeseries, measure_speed, residual_at_speed, residual_check, ActionSeries,
    ResidualGrid, SpeedMeasurement, SpeedMethod,
};
pub use scheme::{evolve, stability_limit, Evolution};
pub use verify::{verify, Verification, VerifyConfig, VerifyReport};

/// Fields need at least this many samples.
pub const MIN_SAMPLES: usize = 16;
/// Clamped edges must equal the boundary limits to this tolerance.
pub const EDGE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// `u(x0 + n dx) = u(x0)`; the last sample sits one step before the wrap.
    Periodic,
    /// Edge samples held at fixed values.
    Clamped { left: f64, right: f64 },
}

/// Samples of `u(x, t)` on a uniform grid, plus `u_t` for the
/// second-order-in-time sine-Gordon equation.
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    x0: f64,
    dx: f64,
    t: f64,
    bc: Boundary,
    samples: Vec<f64>,
    velocity: Option<Vec<f64>>,
}

impl Field1D {
    pub fn new(x0: f64, dx: f64, t: f64, samples: Vec<f64>, bc: Boundary) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::InvalidField(format!(
                "{} samples, at least {MIN_SAMPLES} needed",
                samples.len()
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) || !x0.is_finite() || !t.is_finite() {
            return Err(Error::InvalidField(format!(
                "bad grid: x0 = {x0}, dx = {dx}, t = {t}"
            )));
        }
        if let Some(i) = samples.iter().position(|u| !u.is_finite()) {
            return Err(Error::InvalidField(format!("sample {i} is not finite")));
        }
        if let Boundary::Clamped { left, right } = bc {
            let (first, last) = (samples[0], samples[samples.len() - 1]);
            if (first - left).abs() > EDGE_TOL || (last - right).abs() > EDGE_TOL {
                return Err(Error::InvalidField(format!(
                    "clamped edges ({first}, {last}) differ from limits ({left}, {right})"
                )));
            }
        }
        Ok(Field1D {
            x0,
            dx,
            t,
            bc,
            samples,
            velocity: None,
        })
    }

    /// Attaches time-derivative samples.
    pub fn with_velocity(mut self, velocity: Vec<f64>) -> Result<Self> {
        if velocity.len() != self.samples.len() {
            return Err(Error::InvalidField(format!(
                "{} velocity samples for {} field samples",
                velocity.len(),
                self.samples.len()
            )));
        }
        if velocity.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidField("velocity is not finite".into()));
        }
        self.velocity = Some(velocity);
        Ok(self)
    }

    /// Samples `wave` at time `t` on `n` points starting at `x0`.
    ///
    /// Clamped grids take the wave's boundary limits as edge values; periodic
    /// grids need equal limits. Sine-Gordon fields carry `u_t = -v u'`.
    pub fn from_wave(
        wave: &TravelingWave,
        x0: f64,
        dx: f64,
        n: usize,
        t: f64,
        periodic: bool,
    ) -> Result<Self> {
        let v = wave.speed();
        let (left, right) = wave.boundary_limits();
        let mut samples = Vec::with_capacity(n);
        let mut velocity = Vec::with_capacity(n);
        for i in 0..n {
            let (u, du) = wave.eval(x0 + dx * i as f64 - v * t);
            samples.push(u);
            velocity.push(-v * du);
        }
        let bc = if periodic {
            if left != right {
                return Err(Error::InvalidField(format!(
                    "periodic grid needs equal limits, got ({left}, {right})"
                )));
            }
            Boundary::Periodic
        } else {
            if n >= 2 {
                samples[0] = left;
                samples[n - 1] = right;
                velocity[0] = 0.0;
                velocity[n - 1] = 0.0;
            }
            Boundary::Clamped { left, right }
        };
        let field = Field1D::new(x0, dx, t, samples, bc)?;
        if wave.model().kind() == ModelKind::SineGordon {
            field.with_velocity(velocity)
        } else {
            Ok(field)
        }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn bc(&self) -> Boundary {
        self.bc
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + self.dx * i as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn velocity(&self) -> Option<&[f64]> {
        self.velocity.as_deref()
    }

    /// Domain length for periodic grids.
    pub fn period(&self) -> Option<f64> {
        match self.bc {
            Boundary::Periodic => Some(self.dx * self.samples.len() as f64),
            Boundary::Clamped { .. } => None,
        }
    }

    /// `Σ u dx` (trapezoid weights on clamped grids).
    pub fn mass(&self) -> f64 {
        let sum: f64 = self.samples.iter().sum();
        match self.bc {
            Boundary::Periodic => sum * self.dx,
            Boundary::Clamped { .. } => {
                (sum - 0.5 * (self.samples[0] + self.samples[self.len() - 1])) * self.dx
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, u| m.max(u.abs()))
    }

    /// `max u - min u`.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| {
                (lo.min(u), hi.max(u))
            });
        hi - lo
    }

    pub(crate) fn evolved(&self, t: f64, samples: Vec<f64>, velocity: Option<Vec<f64>>) -> Self {
        Field1D {
            x0: self.x0,
            dx: self.dx,
            t,
            bc: self.bc,
            samples,
            velocity,
        }
    }
}
