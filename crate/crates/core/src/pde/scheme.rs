//! Time stepping.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // see the crate root
use num_traits::Float;

use super::{Boundary, Field1D};
use crate::defaults::INSTABILITY_FACTOR;
use crate::models::ModelSpec;
use crate::{Error, Result};

const GHOST: usize = 3;
/// RK4 stability interval on the imaginary and negative real axes.
const RK4_IMAG: f64 = 2.828_427_124_746_19;
const RK4_REAL: f64 = 2.785_293_563_405_282;
/// Largest symbol magnitudes of the 4th-order central `d³/dx³` and `d/dx`
/// stencils, times `dx³` and `dx` respectively (rounded up).
const D3_SYMBOL: f64 = 4.608_75;
const D1_SYMBOL: f64 = 1.372_23;

/// Snapshots of one run, the first being the initial field.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolution {
    pub snapshots: Vec<Field1D>,
    /// Step actually used; it divides the snapshot interval exactly.
    pub dt: f64,
    pub steps: usize,
}

impl Evolution {
    pub fn last(&self) -> &Field1D {
        &self.snapshots[self.snapshots.len() - 1]
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(Field1D::t).collect()
    }
}

/// Largest stable time step of the scheme used for `model` on `field`.
pub fn stability_limit(model: &ModelSpec, field: &Field1D) -> f64 {
    let dx = field.dx();
    let umax = field.max_abs();
    match *model {
        ModelSpec::Kdv { nonlinearity } => {
            RK4_IMAG / (D3_SYMBOL / dx.powi(3) + D1_SYMBOL * nonlinearity.abs() * umax / dx)
        }
        // Leapfrog on u_tt = u_xx - u: dt² (4/dx² + 1) ≤ 4.
        ModelSpec::SineGordon => dx / (1.0 + 0.25 * dx * dx).sqrt(),
        ModelSpec::FisherKpp { diffusion, growth } => {
            let diffusive = dx * dx / (2.0 * diffusion);
            diffusive.min(RK4_REAL / (4.0 * diffusion / (dx * dx) + growth))
        }
        ModelSpec::Burgers { viscosity, .. } => {
            let diffusive = dx * dx / (2.0 * viscosity);
            if umax > 0.0 {
                diffusive.min(2.0 * dx / umax)
            } else {
                diffusive
            }
        }
    }
}

/// Evolves `field` under `model` for `duration`, recording `snapshot_count`
/// evenly spaced snapshots (initial and final included).
///
/// `dt` is an upper bound: the step is shrunk so that it divides the snapshot
/// interval. Steps above the stability limit are rejected up front, and the
/// run aborts once `max |u|` exceeds ten times the initial scale.
pub fn evolve(
    model: &ModelSpec,
    field: &Field1D,
    dt: f64,
    duration: f64,
    snapshot_count: usize,
) -> Result<Evolution> {
    model.validate()?;
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "T",
            requirement: "finite and >= 0",
        });
    }
    if snapshot_count < 2 {
        return Err(Error::InvalidParameter {
            name: "snapshots",
            requirement: ">= 2",
        });
    }
    let limit = stability_limit(model, field);
    if dt.is_nan() || dt <= 0.0 || dt > limit {
        return Err(Error::StabilityViolation { dt, limit });
    }
    if matches!(model, ModelSpec::SineGordon) && field.velocity().is_none() {
        return Err(Error::InvalidField("sine-Gordon needs u_t samples".into()));
    }

    let interval = duration / (snapshot_count - 1) as f64;
    let per_snapshot = if interval > 0.0 {
        (interval / dt).ceil() as usize
    } else {
        0
    };
    let h = if per_snapshot > 0 {
        interval / per_snapshot as f64
    } else {
        dt
    };
    let bound = INSTABILITY_FACTOR * field.range().max(field.max_abs());

    let mut stepper = Stepper::new(*model, field, h);
    let mut snapshots = Vec::with_capacity(snapshot_count);
    snapshots.push(field.clone());
    let t0 = field.t();
    let mut steps = 0;
    for s in 1..snapshot_count {
        for _ in 0..per_snapshot {
            stepper.step();
            steps += 1;
            let t = t0 + h * steps as f64;
            stepper.check(t, bound)?;
        }
        let t = t0 + interval * s as f64;
        let (u, w) = stepper.snapshot();
        snapshots.push(field.evolved(t, u, w));
    }
    Ok(Evolution {
        snapshots,
        dt: h,
        steps,
    })
}

struct Stepper {
    model: ModelSpec,
    bc: Boundary,
    dx: f64,
    h: f64,
    u: Vec<f64>,
    /// Sine-Gordon: the previous time level.
    prev: Vec<f64>,
    pad: Vec<f64>,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Stepper {
    fn new(model: ModelSpec, field: &Field1D, h: f64) -> Self {
        let n = field.len();
        let mut s = Stepper {
            model,
            bc: field.bc(),
            dx: field.dx(),
            h,
            u: field.samples().to_vec(),
            prev: Vec::new(),
            pad: vec![0.0; n + 2 * GHOST],
            k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            tmp: vec![0.0; n],
        };
        if let (ModelSpec::SineGordon, Some(w)) = (model, field.velocity()) {
            s.start_leapfrog(w);
        }
        s
    }

    /// Third-order Taylor start: `u(-h)` from `u`, `u_t`, `u_tt` and `u_ttt`.
    fn start_leapfrog(&mut self, w: &[f64]) {
        let n = self.u.len();
        let h = self.h;
        let mut acc = vec![0.0; n];
        let mut lap_w = vec![0.0; n];
        let u = core::mem::take(&mut self.u);
        self.sg_accel(&u, &mut acc);
        self.laplacian(w, &mut lap_w);
        self.prev = (0..n)
            .map(|i| {
                let jerk = lap_w[i] - u[i].cos() * w[i];
                u[i] - h * w[i] + 0.5 * h * h * acc[i] - h * h * h / 6.0 * jerk
            })
            .collect();
        if let Boundary::Clamped { .. } = self.bc {
            self.prev[0] = u[0];
            self.prev[n - 1] = u[n - 1];
        }
        self.u = u;
    }

    fn step(&mut self) {
        match self.model {
            ModelSpec::SineGordon => self.leapfrog_step(),
            _ => self.rk4_step(),
        }
    }

    fn leapfrog_step(&mut self) {
        let h2 = self.h * self.h;
        let mut acc = core::mem::take(&mut self.tmp);
        let u = core::mem::take(&mut self.u);
        self.sg_accel(&u, &mut acc);
        for i in 0..u.len() {
            self.prev[i] = 2.0 * u[i] - self.prev[i] + h2 * acc[i];
        }
        // prev now holds the new level
        self.u = core::mem::replace(&mut self.prev, u);
        self.tmp = acc;
    }

    fn rk4_step(&mut self) {
        let h = self.h;
        let n = self.u.len();
        let mut k = core::mem::take(&mut self.k);
        let mut tmp = core::mem::take(&mut self.tmp);
        let u = core::mem::take(&mut self.u);

        self.rhs(&u, &mut k[0]);
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * h * k[0][i];
        }
        self.rhs(&tmp, &mut k[1]);
        for i in 0..n {
            tmp[i] = u[i] + 0.5 * h * k[1][i];
        }
        self.rhs(&tmp, &mut k[2]);
        for i in 0..n {
            tmp[i] = u[i] + h * k[2][i];
        }
        self.rhs(&tmp, &mut k[3]);
        let mut next = u;
        for i in 0..n {
            next[i] += h / 6.0 * (k[0][i] + 2.0 * (k[1][i] + k[2][i]) + k[3][i]);
        }
        self.u = next;
        self.k = k;
        self.tmp = tmp;
    }

    /// Copies `u` into the ghost-padded buffer.
    fn fill_pad(&mut self, u: &[f64]) {
        let n = u.len();
        self.pad[GHOST..GHOST + n].copy_from_slice(u);
        for g in 0..GHOST {
            let (lo, hi) = match self.bc {
                Boundary::Periodic => (u[n - GHOST + g], u[g]),
                Boundary::Clamped { left, right } => (left, right),
            };
            self.pad[g] = lo;
            self.pad[GHOST + n + g] = hi;
        }
    }

    /// Indices that evolve; clamped edges stay put.
    fn active(&self, n: usize) -> core::ops::Range<usize> {
        match self.bc {
            Boundary::Periodic => 0..n,
            Boundary::Clamped { .. } => 1..n - 1,
        }
    }

    fn rhs(&mut self, u: &[f64], out: &mut [f64]) {
        self.fill_pad(u);
        let n = u.len();
        let p = &self.pad;
        let dx = self.dx;
        out.fill(0.0);
        let range = self.active(n);
        match self.model {
            ModelSpec::Kdv { nonlinearity } => {
                let c1 = 1.0 / (12.0 * dx);
                let c3 = 1.0 / (8.0 * dx * dx * dx);
                let flux = |j: usize| 0.5 * nonlinearity * p[j] * p[j];
                for i in range {
                    let j = i + GHOST;
                    let fx =
                        c1 * (-flux(j + 2) + 8.0 * flux(j + 1) - 8.0 * flux(j - 1) + flux(j - 2));
                    let uxxx = c3
                        * (-p[j + 3] + 8.0 * p[j + 2] - 13.0 * p[j + 1] + 13.0 * p[j - 1]
                            - 8.0 * p[j - 2]
                            + p[j - 3]);
                    out[i] = -fx - uxxx;
                }
            }
            ModelSpec::FisherKpp { diffusion, growth } => {
                let c = diffusion / (dx * dx);
                for i in range {
                    let j = i + GHOST;
                    out[i] = c * (p[j + 1] - 2.0 * p[j] + p[j - 1]) + growth * p[j] * (1.0 - p[j]);
                }
            }
            ModelSpec::Burgers { viscosity, .. } => {
                let c = viscosity / (dx * dx);
                let c1 = 0.25 / dx;
                for i in range {
                    let j = i + GHOST;
                    out[i] = c * (p[j + 1] - 2.0 * p[j] + p[j - 1])
                        - c1 * (p[j + 1] * p[j + 1] - p[j - 1] * p[j - 1]);
                }
            }
            ModelSpec::SineGordon => unreachable!("sine-Gordon uses leapfrog"),
        }
    }

    fn laplacian(&mut self, u: &[f64], out: &mut [f64]) {
        self.fill_pad(u);
        let c = 1.0 / (self.dx * self.dx);
        out.fill(0.0);
        for i in self.active(u.len()) {
            let j = i + GHOST;
            out[i] = c * (self.pad[j + 1] - 2.0 * self.pad[j] + self.pad[j - 1]);
        }
    }

    /// `u_tt = u_xx - sin u`.
    fn sg_accel(&mut self, u: &[f64], out: &mut [f64]) {
        self.laplacian(u, out);
        for i in self.active(u.len()) {
            out[i] -= u[i].sin();
        }
    }

    fn check(&self, t: f64, bound: f64) -> Result<()> {
        let mut max_abs: f64 = 0.0;
        for &u in &self.u {
            if !u.is_finite() {
                return Err(Error::Unstable {
                    t,
                    max_abs: f64::INFINITY,
                    bound,
                });
            }
            max_abs = max_abs.max(u.abs());
        }
        if max_abs > bound {
            return Err(Error::Unstable { t, max_abs, bound });
        }
        Ok(())
    }

    /// Current samples, and for sine-Gordon `u_t ≈ (u - u_prev)/h + h/2 u_tt`.
    fn snapshot(&mut self) -> (Vec<f64>, Option<Vec<f64>>) {
        let u = self.u.clone();
        if !matches!(self.model, ModelSpec::SineGordon) {
            return (u, None);
        }
        let mut acc = vec![0.0; u.len()];
        self.sg_accel(&u, &mut acc);
        let h = self.h;
        let mut w: Vec<f64> = (0..u.len())
            .map(|i| (u[i] - self.prev[i]) / h + 0.5 * h * acc[i])
            .collect();
        if let Boundary::Clamped { .. } = self.bc {
            let n = w.len();
            w[0] = 0.0;
            w[n - 1] = 0.0;
        }
        (u, Some(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{SpeedRequest, TravelingWave};

    fn kdv_field(dx: f64) -> (ModelSpec, TravelingWave, Field1D) {
        let model = ModelSpec::kdv(1.0).unwrap();
        let wave = TravelingWave::new(model, SpeedRequest::Value(1.0), -2.5, None).unwrap();
        let n = (80.0 / dx).round() as usize;
        let field = Field1D::from_wave(&wave, -40.0, dx, n, 0.0, true).unwrap();
        (model, wave, field)
    }

    fn translation_error(wave: &TravelingWave, field: &Field1D) -> f64 {
        let t = field.t();
        (0..field.len())
            .map(|i| (field.samples()[i] - wave.eval(field.x(i) - wave.speed() * t).0).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn kdv_soliton_translates_and_conserves_mass() {
        let (model, wave, field) = kdv_field(0.05);
        let dt = 0.8 * stability_limit(&model, &field);
        let run = evolve(&model, &field, dt, 5.0, 6).unwrap();
        let last = run.last();
        assert!((last.t() - 5.0).abs() < 1e-12);
        assert!(translation_error(&wave, last) <= 1e-2 * 3.0);
        let m0 = field.mass();
        for s in &run.snapshots {
            assert!((s.mass() - m0).abs() <= 1e-6 * m0);
        }
    }

    #[test]
    fn kdv_translation_error_converges() {
        let errors: Vec<f64> = [0.1, 0.05]
            .iter()
            .map(|&dx| {
                let (model, wave, field) = kdv_field(dx);
                let dt = 0.8 * stability_limit(&model, &field);
                let run = evolve(&model, &field, dt, 5.0, 2).unwrap();
                translation_error(&wave, run.last())
            })
            .collect();
        let order = (errors[0] / errors[1]).log2();
        assert!(order >= 1.5, "errors {errors:?}, order {order}");
    }

    #[test]
    fn zero_field_stays_zero() {
        let model = ModelSpec::kdv(1.0).unwrap();
        let field = Field1D::new(0.0, 0.1, 0.0, vec![0.0; 64], Boundary::Periodic).unwrap();
        let dt = stability_limit(&model, &field);
        let run = evolve(&model, &field, dt, 1.0, 3).unwrap();
        assert!(run.last().samples().iter().all(|&u| u == 0.0));
    }

    #[test]
    fn burgers_front_translates() {
        let model = ModelSpec::burgers(1.0, 0.0, 1.0).unwrap();
        let wave = TravelingWave::new(model, SpeedRequest::Auto, -2.5, None).unwrap();
        let dx = 0.05;
        let field = Field1D::from_wave(&wave, -60.0, dx, 2401, 0.0, false).unwrap();
        let dt = 0.8 * stability_limit(&model, &field);
        let run = evolve(&model, &field, dt, 10.0, 2).unwrap();
        let last = run.last();
        assert_eq!(last.samples()[0], 1.0);
        assert_eq!(last.samples()[2400], 0.0);
        assert!(translation_error(&wave, last) <= 1e-2);
    }

    #[test]
    fn sine_gordon_kink_translates() {
        let model = ModelSpec::SineGordon;
        let wave = TravelingWave::new(model, SpeedRequest::Value(0.5), -2.0, None).unwrap();
        let field = Field1D::from_wave(&wave, -30.0, 0.02, 3001, 0.0, false).unwrap();
        let dt = 0.8 * stability_limit(&model, &field);
        let run = evolve(&model, &field, dt, 8.0, 3).unwrap();
        let last = run.last();
        assert!(translation_error(&wave, last) <= 1e-3);
        let w = last.velocity().unwrap();
        let worst = (0..last.len())
            .map(|i| (w[i] + 0.5 * wave.eval(last.x(i) - 4.0).1).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-3, "velocity error {worst}");
    }

    #[test]
    fn cfl_violation_rejected() {
        let (model, _, field) = kdv_field(0.1);
        let limit = stability_limit(&model, &field);
        assert!(matches!(
            evolve(&model, &field, 1.01 * limit, 1.0, 2),
            Err(Error::StabilityViolation { .. })
        ));
    }

    #[test]
    fn blow_up_is_detected() {
        // KPP seeded above the stable state with negative values grows without
        // bound; a huge growth rate makes it quick.
        let model = ModelSpec::fisher_kpp(1.0, 1e3).unwrap();
        let mut s = vec![-1.0; 64];
        s[0] = 0.0;
        s[63] = 0.0;
        let field = Field1D::new(
            0.0,
            1.0,
            0.0,
            s,
            Boundary::Clamped {
                left: 0.0,
                right: 0.0,
            },
        )
        .unwrap();
        let dt = stability_limit(&model, &field);
        assert!(matches!(
            evolve(&model, &field, dt, 1.0, 2),
            Err(Error::Unstable { .. })
        ));
    }
}
