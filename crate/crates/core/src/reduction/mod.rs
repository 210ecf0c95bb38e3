//! Traveling-wave reductions as planar systems `u' = p`, `p' = f(u, p)`.
//!
//! Substituting `u(x, t) = u(z)`, `z = x - v t` gives
//!
//! * KdV: `u'' = v u - (A/2) u²` (the `A`-general form; Hamiltonian)
//! * sine-Gordon: `u'' = -sin u / (v² - 1)` (Hamiltonian)
//! * Fisher–KPP: `D u'' + v u' + k u (1 - u) = 0`
//! * Burgers: `D u'' = (u - v) u'`
//!
//! The solitary waves are the separatrices of these systems: a homoclinic
//! loop for KdV and heteroclinic halfloops for the other three.

mod integrator;

use alloc::vec::Vec;
use core::ops::ControlFlow;

use num_complex::Complex64;
#[allow(unused_imports)] // see the crate root
use num_traits::Float;

use crate::defaults;
use crate::models::{Branch, ModelSpec, SpeedRequest, TravelingWave};
use crate::{Error, Result};

use integrator::{integrate, DenseStep, State, StepControl};

/// A point `(u, p = du/dz)` of the phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint {
    pub u: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const fn new(u: f64, p: f64) -> Self {
        PhasePoint { u, p }
    }

    pub fn distance(&self, other: &PhasePoint) -> f64 {
        (self.u - other.u).hypot(self.p - other.p)
    }

    fn state(&self) -> State {
        [self.u, self.p]
    }

    fn from_state(s: State) -> Self {
        PhasePoint { u: s[0], p: s[1] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSample {
    pub z: f64,
    pub point: PhasePoint,
}

/// A sampled trajectory, `z` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    samples: Vec<OrbitSample>,
    closed: bool,
    escaped: bool,
    energy: Option<f64>,
}

impl Orbit {
    /// Wraps externally produced samples. The orbit counts as closed when its
    /// first and last points lie within `closure_tol` of each other.
    pub fn from_samples(samples: Vec<OrbitSample>, closure_tol: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidOrbit("no samples"));
        }
        if samples.windows(2).any(|w| w[1].z <= w[0].z) {
            return Err(Error::InvalidOrbit("z must be strictly increasing"));
        }
        if samples
            .iter()
            .any(|s| !(s.z.is_finite() && s.point.u.is_finite() && s.point.p.is_finite()))
        {
            return Err(Error::InvalidOrbit("non-finite sample"));
        }
        let closed = samples[0].point.distance(&samples[samples.len() - 1].point) <= closure_tol;
        Ok(Orbit {
            samples,
            closed,
            escaped: false,
            energy: None,
        })
    }

    pub fn samples(&self) -> &[OrbitSample] {
        &self.samples
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// The run was cut short because `|u|` or `|p|` left the escape bound.
    pub fn escaped(&self) -> bool {
        self.escaped
    }

    /// `H` at the starting point, for Hamiltonian reductions.
    pub fn energy(&self) -> Option<f64> {
        self.energy
    }

    pub fn first(&self) -> PhasePoint {
        self.samples[0].point
    }

    pub fn last(&self) -> PhasePoint {
        self.samples[self.samples.len() - 1].point
    }

    pub fn z_extent(&self) -> f64 {
        self.samples[self.samples.len() - 1].z - self.samples[0].z
    }

    pub fn max_u(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.point.u)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_u(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.point.u)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_p(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.point.p)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_p(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.point.p)
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquilibriumKind {
    Saddle,
    Center,
    /// Stable node or focus.
    Stable,
    /// Unstable node or focus.
    Unstable,
}

impl EquilibriumKind {
    pub fn name(self) -> &'static str {
        match self {
            EquilibriumKind::Saddle => "saddle",
            EquilibriumKind::Center => "center",
            EquilibriumKind::Stable => "stable-node/focus",
            EquilibriumKind::Unstable => "unstable-node/focus",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub point: PhasePoint,
    pub kind: EquilibriumKind,
    pub eigenvalues: [Complex64; 2],
}

/// Integration settings for [`Reduction::integrate_orbit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Uniform sample spacing via dense output; `None` keeps one sample per
    /// accepted step.
    pub sample_dz: Option<f64>,
    /// Bound on `|u|` and `|p|`; `None` uses 1e6 × the amplitude scale.
    pub escape_bound: Option<f64>,
    /// Stop after one circuit when the orbit returns to its start.
    pub stop_on_closure: bool,
    /// Closure tolerance, relative to `max(1, amplitude scale)`.
    pub closure_tol: f64,
    pub max_steps: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            rtol: defaults::ODE_RTOL,
            atol: defaults::ODE_ATOL,
            max_step: f64::INFINITY,
            sample_dz: None,
            escape_bound: None,
            stop_on_closure: false,
            closure_tol: defaults::CLOSURE_TOL,
            max_steps: defaults::ODE_MAX_STEPS,
        }
    }
}

impl OrbitOptions {
    fn control(&self, angle_period: Option<f64>) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step,
            max_steps: self.max_steps,
            angle_period,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparatrixOptions {
    /// Seed offset along the unstable eigenvector, times `max(1, |u_saddle|)`.
    pub seed_offset: f64,
    pub reconnect_radius: f64,
    pub budget_decay_lengths: f64,
    pub samples_per_decay_length: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for SeparatrixOptions {
    fn default() -> Self {
        SeparatrixOptions {
            seed_offset: defaults::SEPARATRIX_SEED_OFFSET,
            reconnect_radius: defaults::RECONNECT_RADIUS,
            budget_decay_lengths: defaults::SEPARATRIX_BUDGET_DECAY_LENGTHS,
            samples_per_decay_length: defaults::SEPARATRIX_SAMPLES_PER_DECAY_LENGTH,
            rtol: defaults::ODE_RTOL,
            atol: defaults::ODE_ATOL,
        }
    }
}

/// The traveling-wave ODE of one model at one admissible speed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    model: ModelSpec,
    speed: f64,
    wave: TravelingWave,
}

impl Reduction {
    pub fn new(model: ModelSpec, speed: f64) -> Result<Self> {
        let wave = TravelingWave::new(model, SpeedRequest::Value(speed), 0.0, None)?;
        Ok(Reduction {
            model,
            speed: wave.speed(),
            wave,
        })
    }

    pub fn from_wave(wave: &TravelingWave) -> Self {
        Reduction {
            model: wave.model(),
            speed: wave.speed(),
            wave: wave.with_offset(0.0),
        }
    }

    pub fn model(&self) -> ModelSpec {
        self.model
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    /// `p' = f(u, p)`.
    pub fn accel(&self, u: f64, p: f64) -> f64 {
        let v = self.speed;
        match self.model {
            ModelSpec::Kdv { nonlinearity } => v * u - 0.5 * nonlinearity * u * u,
            ModelSpec::SineGordon => -u.sin() / (v * v - 1.0),
            ModelSpec::FisherKpp { diffusion, growth } => {
                -(v * p + growth * u * (1.0 - u)) / diffusion
            }
            ModelSpec::Burgers { viscosity, .. } => (u - v) * p / viscosity,
        }
    }

    /// Right-hand side `(du/dz, dp/dz)`.
    pub fn rhs(&self, s: PhasePoint) -> (f64, f64) {
        (s.p, self.accel(s.u, s.p))
    }

    fn field(&self) -> impl Fn(&State) -> State + '_ {
        move |y| [y[1], self.accel(y[0], y[1])]
    }

    /// Conserved energy of the KdV and sine-Gordon reductions.
    pub fn hamiltonian(&self, s: PhasePoint) -> Result<f64> {
        let v = self.speed;
        match self.model {
            ModelSpec::Kdv { nonlinearity } => {
                Ok(0.5 * (s.p * s.p - v * s.u * s.u + nonlinearity * s.u.powi(3) / 3.0))
            }
            ModelSpec::SineGordon => Ok(0.5 * s.p * s.p - s.u.cos() / (v * v - 1.0)),
            ModelSpec::FisherKpp { .. } => Err(Error::NotHamiltonian("Fisher-KPP")),
            ModelSpec::Burgers { .. } => Err(Error::NotHamiltonian("Burgers")),
        }
    }

    pub fn is_hamiltonian(&self) -> bool {
        matches!(self.model, ModelSpec::Kdv { .. } | ModelSpec::SineGordon)
    }

    /// The sine-Gordon `u` is an angle.
    fn angle_period(&self) -> Option<f64> {
        match self.model {
            ModelSpec::SineGordon => Some(2.0 * core::f64::consts::PI),
            _ => None,
        }
    }

    /// Jacobian `[[0, 1], [∂f/∂u, ∂f/∂p]]` at `s`.
    pub fn jacobian(&self, s: PhasePoint) -> [[f64; 2]; 2] {
        let v = self.speed;
        let (fu, fp) = match self.model {
            ModelSpec::Kdv { nonlinearity } => (v - nonlinearity * s.u, 0.0),
            ModelSpec::SineGordon => (-s.u.cos() / (v * v - 1.0), 0.0),
            ModelSpec::FisherKpp { diffusion, growth } => {
                (-growth * (1.0 - 2.0 * s.u) / diffusion, -v / diffusion)
            }
            ModelSpec::Burgers { viscosity, .. } => (s.p / viscosity, (s.u - v) / viscosity),
        };
        [[0.0, 1.0], [fu, fp]]
    }

    /// Characteristic scale of `u` along the solitary wave.
    pub fn amplitude_scale(&self) -> f64 {
        match self.model {
            ModelSpec::Burgers {
                right_state,
                left_state,
                ..
            } => right_state
                .abs()
                .max(left_state.abs())
                .max(left_state - right_state),
            _ => self.wave.amplitude_range(),
        }
    }

    pub fn decay_length(&self) -> f64 {
        self.wave.decay_length()
    }

    /// Equilibria `(u*, 0)` with `u*` in `[lo, hi]`, sorted by `u*`.
    ///
    /// For Burgers every point of `p = 0` is stationary; the reported
    /// equilibria are the two end states `u1`, `u2`, the roots of the first
    /// integral `D u' = (u - u1)(u - u2) / 2`.
    pub fn equilibria(&self, window: (f64, f64)) -> Vec<Equilibrium> {
        let (lo, hi) = (window.0.min(window.1), window.0.max(window.1));
        let mut roots: Vec<f64> = match self.model {
            ModelSpec::Kdv { nonlinearity } => {
                alloc::vec![0.0, 2.0 * self.speed / nonlinearity]
            }
            ModelSpec::SineGordon => {
                let pi = core::f64::consts::PI;
                if !(lo.is_finite() && hi.is_finite()) {
                    Vec::new()
                } else {
                    let first = (lo / pi).ceil() as i64;
                    let last = (hi / pi).floor() as i64;
                    (first..=last).map(|n| n as f64 * pi).collect()
                }
            }
            ModelSpec::FisherKpp { .. } => alloc::vec![0.0, 1.0],
            ModelSpec::Burgers {
                right_state,
                left_state,
                ..
            } => alloc::vec![right_state, left_state],
        };
        roots.retain(|u| *u >= lo && *u <= hi);
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        roots
            .into_iter()
            .map(|u| self.classify(PhasePoint::new(u, 0.0)))
            .collect()
    }

    fn classify(&self, point: PhasePoint) -> Equilibrium {
        let j = self.jacobian(point);
        let trace = j[1][1];
        let det = -j[1][0];
        let disc = trace * trace - 4.0 * det;
        let eigenvalues = if disc >= 0.0 {
            let r = disc.sqrt();
            [
                Complex64::new(0.5 * (trace + r), 0.0),
                Complex64::new(0.5 * (trace - r), 0.0),
            ]
        } else {
            let im = 0.5 * (-disc).sqrt();
            [
                Complex64::new(0.5 * trace, im),
                Complex64::new(0.5 * trace, -im),
            ]
        };
        let re_max = eigenvalues[0].re.max(eigenvalues[1].re);
        let re_min = eigenvalues[0].re.min(eigenvalues[1].re);
        let kind = if re_max > 0.0 && re_min < 0.0 && disc >= 0.0 {
            EquilibriumKind::Saddle
        } else if disc < 0.0 && (0.5 * trace).abs() < defaults::CENTER_TIE {
            EquilibriumKind::Center
        } else if re_max > 0.0 {
            EquilibriumKind::Unstable
        } else if re_max < 0.0 {
            EquilibriumKind::Stable
        } else {
            // Degenerate linearisation; treat as neutral.
            EquilibriumKind::Center
        };
        Equilibrium {
            point,
            kind,
            eigenvalues,
        }
    }

    fn escape_bound(&self, opts: &OrbitOptions) -> f64 {
        opts.escape_bound
            .unwrap_or(defaults::ESCAPE_FACTOR * self.amplitude_scale().max(1.0))
    }

    /// Integrates the reduction from `start` over `z_span = (z_start, z_end)`.
    ///
    /// Samples come back in increasing `z` whatever the direction. An orbit
    /// leaving the escape bound is truncated and flagged
    /// [`Orbit::escaped`].
    pub fn integrate_orbit(
        &self,
        start: PhasePoint,
        z_span: (f64, f64),
        opts: &OrbitOptions,
    ) -> Result<Orbit> {
        if !(start.u.is_finite() && start.p.is_finite()) {
            return Err(Error::InvalidOrbit("non-finite start"));
        }
        let (z0, z1) = z_span;
        let energy = self.hamiltonian(start).ok();
        let bound = self.escape_bound(opts);
        let dir = if z1 >= z0 { 1.0 } else { -1.0 };
        let closure_tol = opts.closure_tol * self.amplitude_scale().max(1.0);

        let (du0, dp0) = self.rhs(start);
        let speed0 = du0.hypot(dp0);
        if opts.stop_on_closure && speed0 == 0.0 {
            return Ok(Orbit {
                samples: alloc::vec![OrbitSample {
                    z: z0,
                    point: start
                }],
                closed: true,
                escaped: false,
                energy,
            });
        }
        // Poincaré section through the start, normal to the initial flow.
        let normal = [dir * du0 / speed0, dir * dp0 / speed0];
        let section = |y: &State| (y[0] - start.u) * normal[0] + (y[1] - start.p) * normal[1];

        let mut samples = alloc::vec![OrbitSample {
            z: z0,
            point: start
        }];
        let mut next_sample = opts.sample_dz.map(|dz| z0 + dir * dz);
        let mut escaped = false;
        let mut closed = false;
        let out_of_bounds = |y: &State| !(y[0].abs() <= bound && y[1].abs() <= bound);

        let push = |samples: &mut Vec<OrbitSample>, z: f64, y: State| {
            if samples.last().is_none_or(|s| s.z != z) {
                samples.push(OrbitSample {
                    z,
                    point: PhasePoint::from_state(y),
                });
            }
        };

        integrate(
            self.field(),
            z0,
            start.state(),
            z1,
            &opts.control(self.angle_period()),
            |step: &DenseStep| {
                let crossing = if opts.stop_on_closure {
                    let g_old = section(&step.y_old);
                    let g_new = section(&step.y_new);
                    if g_old < 0.0 && g_new >= 0.0 {
                        let zc = bisect(|z| section(&step.eval(z)), step.z_old, step.z_new);
                        let yc = step.eval(zc);
                        let d = (yc[0] - start.u).hypot(yc[1] - start.p);
                        (d <= closure_tol).then_some((zc, yc))
                    } else {
                        None
                    }
                } else {
                    None
                };
                let z_stop = crossing.map_or(step.z_new, |(zc, _)| zc);

                if let (Some(dz), Some(zn)) = (opts.sample_dz, next_sample.as_mut()) {
                    while (*zn - z_stop) * dir < 0.0 {
                        let y = step.eval(*zn);
                        if out_of_bounds(&y) {
                            escaped = true;
                            return ControlFlow::Break(());
                        }
                        push(&mut samples, *zn, y);
                        *zn += dir * dz;
                    }
                }
                if let Some((zc, yc)) = crossing {
                    push(&mut samples, zc, yc);
                    closed = true;
                    return ControlFlow::Break(());
                }
                if out_of_bounds(&step.y_new) {
                    escaped = true;
                    return ControlFlow::Break(());
                }
                if opts.sample_dz.is_none() || step.z_new == z1 {
                    push(&mut samples, step.z_new, step.y_new);
                }
                ControlFlow::Continue(())
            },
        )?;

        if dir < 0.0 {
            samples.reverse();
        }
        Ok(Orbit {
            samples,
            closed,
            escaped,
            energy,
        })
    }

    /// Flow map: the state reached from `start` after `dz` (either sign).
    pub fn flow(&self, start: PhasePoint, dz: f64, opts: &OrbitOptions) -> Result<PhasePoint> {
        let (_, y) = integrate(
            self.field(),
            0.0,
            start.state(),
            dz,
            &opts.control(self.angle_period()),
            |_| ControlFlow::Continue(()),
        )?;
        Ok(PhasePoint::from_state(y))
    }

    /// Traces the separatrix that carries the solitary wave of `branch`
    /// (`None` = the model's default branch at this speed).
    ///
    /// The orbit is shot from the saddle along its unstable eigenvector and
    /// stops once it enters the reconnection ball of the target equilibrium:
    /// the saddle itself for the KdV loop, the opposite end state for the
    /// halfloops. The KPP `a < 0` front arrives at its saddle instead of
    /// leaving it, so it is shot backwards along the stable eigenvector and
    /// returned in increasing `z`.
    pub fn trace_separatrix(
        &self,
        branch: Option<Branch>,
        opts: &SeparatrixOptions,
    ) -> Result<Orbit> {
        let wave = TravelingWave::new(self.model, SpeedRequest::Value(self.speed), 0.0, branch)?;
        let (left, right) = wave.boundary_limits();
        // (saddle u, target u, direction of the first move in u, forward in z)
        let (source_u, target_u, u_sign, forward) = match wave.branch() {
            Branch::Soliton => {
                let sign = match self.model {
                    ModelSpec::Kdv { nonlinearity } => nonlinearity.signum(),
                    _ => 1.0,
                };
                (0.0, 0.0, sign, true)
            }
            Branch::KinkUp | Branch::KinkDown | Branch::FrontDecreasing => {
                (left, right, (right - left).signum(), true)
            }
            // Arrives at the saddle u = 1 from below; shoot back towards 0.
            Branch::FrontIncreasing => (right, left, -1.0, false),
        };

        let source = self.classify(PhasePoint::new(source_u, 0.0));
        let usable = match source.kind {
            EquilibriumKind::Saddle => true,
            // Burgers end state: zero eigenvalue along the line of rest
            // points, positive one across it.
            EquilibriumKind::Unstable => matches!(self.model, ModelSpec::Burgers { .. }),
            _ => false,
        };
        if !usable {
            return Err(Error::NoSaddle);
        }
        let lambda = if forward {
            source.eigenvalues[0].re.max(source.eigenvalues[1].re)
        } else {
            source.eigenvalues[0].re.min(source.eigenvalues[1].re)
        };
        if (forward && lambda <= 0.0) || (!forward && lambda >= 0.0) {
            return Err(Error::NoSaddle);
        }
        // Eigenvector of [[0,1],[fu,fp]] for λ is (1, λ).
        let norm = 1.0f64.hypot(lambda);
        let delta = opts.seed_offset * source_u.abs().max(1.0);
        let seed = PhasePoint::new(
            source_u + u_sign * delta / norm,
            u_sign * delta * lambda / norm,
        );

        let target = PhasePoint::new(target_u, 0.0);
        let homoclinic = source_u == target_u;
        let decay_length = wave.decay_length();
        let budget = opts.budget_decay_lengths * decay_length;
        let dz = decay_length / opts.samples_per_decay_length;
        let dir = if forward { 1.0 } else { -1.0 };
        let control = StepControl {
            rtol: opts.rtol,
            atol: opts.atol,
            max_step: dz,
            max_steps: defaults::ODE_MAX_STEPS,
            angle_period: self.angle_period(),
        };
        let bound = defaults::ESCAPE_FACTOR * self.amplitude_scale().max(1.0);
        let radius = opts.reconnect_radius;

        let mut samples = alloc::vec![OrbitSample {
            z: 0.0,
            point: seed
        }];
        let mut armed = !homoclinic;
        let mut arrived = false;
        let mut closest = f64::INFINITY;
        let mut next_sample = dir * dz;
        let (z_reached, _) = integrate(
            self.field(),
            0.0,
            seed.state(),
            dir * budget,
            &control,
            |step| {
                while (next_sample - step.z_new) * dir <= 0.0 {
                    let y = step.eval(next_sample);
                    let point = PhasePoint::from_state(y);
                    samples.push(OrbitSample {
                        z: next_sample,
                        point,
                    });
                    next_sample += dir * dz;
                    let d = point.distance(&target);
                    if !(y[0].abs() <= bound && y[1].abs() <= bound) {
                        return ControlFlow::Break(());
                    }
                    if !armed && d > 2.0 * radius {
                        armed = true;
                    }
                    if armed {
                        closest = closest.min(d);
                        if d <= radius {
                            arrived = true;
                            return ControlFlow::Break(());
                        }
                    }
                }
                ControlFlow::Continue(())
            },
        )?;
        if !arrived {
            return Err(Error::SeparatrixNotClosed {
                z_reached,
                closest_approach: closest,
                radius,
            });
        }
        if !forward {
            samples.reverse();
        }
        let closed = homoclinic
            && samples[0].point.distance(&samples[samples.len() - 1].point) <= 2.0 * radius;
        Ok(Orbit {
            samples,
            closed,
            escaped: false,
            energy: self.hamiltonian(seed).ok(),
        })
    }
}

/// Root of `g` on `[a, b]` given a sign change, to full precision.
fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let gm = g(m);
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn kdv(v: f64) -> Reduction {
        Reduction::new(ModelSpec::kdv(1.0).unwrap(), v).unwrap()
    }

    fn kpp() -> Reduction {
        Reduction::new(ModelSpec::fisher_kpp(1.0, 6.0).unwrap(), 5.0).unwrap()
    }

    #[test]
    fn rhs_vanishes_at_kdv_equilibria() {
        let r = kdv(1.0);
        assert_eq!(r.rhs(PhasePoint::new(0.0, 0.0)), (0.0, 0.0));
        // second root of v u - u²/2 is u = 2v/A
        assert_eq!(r.rhs(PhasePoint::new(2.0, 0.0)), (0.0, 0.0));
    }

    #[test]
    fn kpp_rhs_reproduces_profile_curvature() {
        let wave = TravelingWave::new(r_model_kpp(), SpeedRequest::Auto, 0.0, None).unwrap();
        let (u, p) = wave.eval(0.0);
        let h = 1e-4;
        let fd2 = (wave.eval(h).0 - 2.0 * u + wave.eval(-h).0) / (h * h);
        let (_, dp) = kpp().rhs(PhasePoint::new(u, p));
        assert!((dp - fd2).abs() < 1e-6, "{dp} vs {fd2}");
        assert!((dp - wave.jet(0.0).d2u).abs() < 1e-9);
    }

    fn r_model_kpp() -> ModelSpec {
        ModelSpec::fisher_kpp(1.0, 6.0).unwrap()
    }

    #[test]
    fn singular_sine_gordon_rejected() {
        assert!(matches!(
            Reduction::new(ModelSpec::SineGordon, 1.0),
            Err(Error::SingularReduction { .. })
        ));
    }

    #[test]
    fn hamiltonian_values() {
        let r = kdv(1.0);
        assert_eq!(r.hamiltonian(PhasePoint::new(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(r.hamiltonian(PhasePoint::new(3.0, 0.0)).unwrap(), 0.0);
        let b = Reduction::new(ModelSpec::burgers(1.0, 0.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(matches!(
            b.hamiltonian(PhasePoint::default()),
            Err(Error::NotHamiltonian(_))
        ));
        assert!(kpp().hamiltonian(PhasePoint::default()).is_err());
    }

    #[test]
    fn kdv_equilibria_classified() {
        let eq = kdv(1.0).equilibria((-1.0, 4.0));
        assert_eq!(eq.len(), 2);
        assert_eq!(eq[0].kind, EquilibriumKind::Saddle);
        assert_eq!(eq[0].point, PhasePoint::new(0.0, 0.0));
        assert_eq!(eq[0].eigenvalues[0], Complex64::new(1.0, 0.0));
        assert_eq!(eq[0].eigenvalues[1], Complex64::new(-1.0, 0.0));
        assert_eq!(eq[1].kind, EquilibriumKind::Center);
        assert_eq!(eq[1].point.u, 2.0);
        assert!((eq[1].eigenvalues[0].im.abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_gordon_equilibria_classified() {
        let r = Reduction::new(ModelSpec::SineGordon, 0.0).unwrap();
        let eq = r.equilibria((-1.0, 7.0));
        let kinds: Vec<_> = eq.iter().map(|e| (e.point.u, e.kind)).collect();
        assert_eq!(
            kinds,
            alloc::vec![
                (0.0, EquilibriumKind::Saddle),
                (PI, EquilibriumKind::Center),
                (2.0 * PI, EquilibriumKind::Saddle)
            ]
        );
        for e in &eq {
            assert!(r.accel(e.point.u, 0.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn kpp_equilibria_classified() {
        let eq = kpp().equilibria((-0.5, 1.5));
        assert_eq!(eq.len(), 2);
        assert_eq!(eq[0].kind, EquilibriumKind::Stable);
        let mut lam: Vec<f64> = eq[0].eigenvalues.iter().map(|c| c.re).collect();
        lam.sort_by(f64::total_cmp);
        assert_eq!(lam, alloc::vec![-3.0, -2.0]);
        assert_eq!(eq[1].kind, EquilibriumKind::Saddle);
        let mut lam: Vec<f64> = eq[1].eigenvalues.iter().map(|c| c.re).collect();
        lam.sort_by(f64::total_cmp);
        assert_eq!(lam, alloc::vec![-6.0, 1.0]);
    }

    #[test]
    fn empty_window_gives_no_equilibria() {
        assert!(kdv(1.0).equilibria((5.0, 6.0)).is_empty());
    }

    #[test]
    fn unstable_manifold_reaches_soliton_crest() {
        let r = kdv(1.0);
        let s = 1e-8 / 2f64.sqrt();
        let orbit = r
            .integrate_orbit(PhasePoint::new(s, s), (0.0, 25.0), &OrbitOptions::default())
            .unwrap();
        assert!((orbit.max_u() - 3.0).abs() < 1e-4, "{}", orbit.max_u());
    }

    #[test]
    fn center_stays_fixed() {
        let orbit = kdv(1.0)
            .integrate_orbit(
                PhasePoint::new(2.0, 0.0),
                (0.0, 40.0),
                &OrbitOptions::default(),
            )
            .unwrap();
        for s in orbit.samples() {
            assert!(s.point.distance(&PhasePoint::new(2.0, 0.0)) < 1e-10);
        }
    }

    #[test]
    fn escape_is_flagged() {
        let orbit = kdv(1.0)
            .integrate_orbit(
                PhasePoint::new(-0.5, 0.0),
                (0.0, 100.0),
                &OrbitOptions::default(),
            )
            .unwrap();
        assert!(orbit.escaped());
        assert!(orbit.z_extent() < 100.0);
    }

    #[test]
    fn rotating_sine_gordon_orbit_keeps_energy() {
        // u winds through dozens of periods; the error weight must not grow with it.
        let r = Reduction::new(ModelSpec::SineGordon, 0.5).unwrap();
        let start = PhasePoint::new(0.5, 3.0);
        let h0 = r.hamiltonian(start).unwrap();
        let orbit = r
            .integrate_orbit(start, (0.0, 100.0), &OrbitOptions::default())
            .unwrap();
        assert!(orbit.max_u() > 20.0 * PI);
        for s in orbit.samples() {
            assert!((r.hamiltonian(s.point).unwrap() - h0).abs() <= 1e-8);
        }
    }

    #[test]
    fn closed_orbit_detected_after_one_circuit() {
        let opts = OrbitOptions {
            stop_on_closure: true,
            sample_dz: Some(1e-3),
            ..OrbitOptions::default()
        };
        let orbit = kdv(1.0)
            .integrate_orbit(PhasePoint::new(1.99, 0.0), (0.0, 100.0), &opts)
            .unwrap();
        assert!(orbit.is_closed());
        assert!((orbit.z_extent() - 2.0 * PI).abs() < 1e-3);
        assert!(orbit.first().distance(&orbit.last()) < 1e-8);
    }

    #[test]
    fn backward_orbit_is_increasing_in_z() {
        let orbit = kdv(1.0)
            .integrate_orbit(
                PhasePoint::new(1.0, 0.0),
                (0.0, -5.0),
                &OrbitOptions::default(),
            )
            .unwrap();
        assert!(orbit.samples().windows(2).all(|w| w[1].z > w[0].z));
        assert_eq!(orbit.last(), PhasePoint::new(1.0, 0.0));
    }

    #[test]
    fn kdv_separatrix_loop() {
        let orbit = kdv(1.0)
            .trace_separatrix(None, &SeparatrixOptions::default())
            .unwrap();
        assert!(orbit.is_closed());
        assert!((orbit.max_u() - 3.0).abs() < 1e-3);
    }

    #[test]
    fn sine_gordon_halfloops() {
        let r = Reduction::new(ModelSpec::SineGordon, 0.0).unwrap();
        let top = r
            .trace_separatrix(None, &SeparatrixOptions::default())
            .unwrap();
        assert!(top.first().u < 1e-6 && (top.last().u - 2.0 * PI).abs() < 1e-5);
        assert!((top.max_p() - 2.0).abs() < 1e-3);
        let bottom = r
            .trace_separatrix(Some(Branch::KinkDown), &SeparatrixOptions::default())
            .unwrap();
        assert!((bottom.first().u - 2.0 * PI).abs() < 1e-6 && bottom.last().u.abs() < 1e-5);
        assert!((bottom.min_p() + 2.0).abs() < 1e-3);
    }

    #[test]
    fn kpp_halfloops_both_branches() {
        let orbit = kpp()
            .trace_separatrix(None, &SeparatrixOptions::default())
            .unwrap();
        assert!((orbit.first().u - 1.0).abs() < 1e-6);
        assert!(orbit.last().distance(&PhasePoint::default()) <= 1e-5);
        assert!(orbit.min_u() >= 0.0 && orbit.max_u() <= 1.0);
        // agrees with the closed-form front on the (u, p) curve
        let wave = TravelingWave::new(r_model_kpp(), SpeedRequest::Auto, 0.0, None).unwrap();
        for s in orbit.samples().iter().step_by(97) {
            let z = bisect(|z| wave.eval(z).0 - s.point.u, -40.0, 40.0);
            assert!((wave.eval(z).1 - s.point.p).abs() < 1e-6);
        }

        let back = Reduction::new(r_model_kpp(), -5.0).unwrap();
        let orbit = back
            .trace_separatrix(None, &SeparatrixOptions::default())
            .unwrap();
        assert!(orbit.samples().windows(2).all(|w| w[1].z > w[0].z));
        assert!(orbit.first().distance(&PhasePoint::default()) <= 1e-5);
        assert!((orbit.last().u - 1.0).abs() < 1e-6);
        assert!(orbit.min_u() >= 0.0 && orbit.max_u() <= 1.0 + 1e-12);
    }

    #[test]
    fn burgers_halfloop() {
        let r = Reduction::new(ModelSpec::burgers(1.0, 0.0, 2.0).unwrap(), 1.0).unwrap();
        let orbit = r
            .trace_separatrix(None, &SeparatrixOptions::default())
            .unwrap();
        assert!((orbit.first().u - 2.0).abs() < 1e-6);
        assert!(orbit.last().u.abs() < 1e-5);
        // first integral D p = (u - u1)(u - u2) / 2
        for s in orbit.samples() {
            let u = s.point.u;
            assert!((s.point.p - 0.5 * u * (u - 2.0)).abs() < 1e-7);
        }
    }

    #[test]
    fn separatrix_energy_matches_saddle() {
        for r in [
            kdv(0.5),
            kdv(2.0),
            Reduction::new(ModelSpec::SineGordon, 0.5).unwrap(),
        ] {
            let orbit = r
                .trace_separatrix(None, &SeparatrixOptions::default())
                .unwrap();
            let h0 = r.hamiltonian(PhasePoint::default()).unwrap();
            for s in orbit.samples() {
                assert!((r.hamiltonian(s.point).unwrap() - h0).abs() <= 1e-6);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn energy_conserved_over_long_spans(u0 in 0.05f64..1.95, p0 in -0.2f64..0.2) {
            let r = kdv(1.0);
            let start = PhasePoint::new(u0, p0);
            let h0 = r.hamiltonian(start).unwrap();
            prop_assume!(h0 < -1e-3);
            let orbit = r.integrate_orbit(start, (0.0, 100.0), &OrbitOptions::default()).unwrap();
            prop_assert!(!orbit.escaped());
            for s in orbit.samples() {
                prop_assert!((r.hamiltonian(s.point).unwrap() - h0).abs() <= 1e-8);
            }
        }

        #[test]
        fn flow_is_reversible(u0 in -3.0f64..3.0, p0 in -1.5f64..1.5, dz in 0.5f64..10.0) {
            let r = Reduction::new(ModelSpec::SineGordon, 0.3).unwrap();
            let start = PhasePoint::new(u0, p0);
            let opts = OrbitOptions::default();
            let there = r.flow(start, dz, &opts).unwrap();
            let back = r.flow(there, -dz, &opts).unwrap();
            prop_assert!(back.distance(&start) <= 1e-8);
        }
    }
}
