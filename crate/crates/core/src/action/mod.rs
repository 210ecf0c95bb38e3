//! Action and angle of the solitary waves.
//!
//! For a closed phase-plane orbit the action is `I = (1/2π) ∮ p du`, and the
//! angle advances at the orbit frequency `ω₀ = 2π / T`. A solitary wave is
//! the limit of such orbits; its action is the profile integral
//! `I = (1/2π) ∫ (du/dz)² dz` and its angle advances linearly with the wave
//! speed, `dΘ/dz = v`, while `dI/dz = 0`.
//!
//! Closed forms of the profile integral:
//!
//! | model | `I` |
//! |---|---|
//! | KdV | `12 v^{5/2} / (5π A²)` |
//! | sine-Gordon | `4 / (π √(1 - v²))` |
//! | Fisher–KPP | `\|a\| / (10π)`, `a = √(k / 6D)` |
//! | Burgers | `(u2 - u1)³ / (24π D)` |

mod quadrature;

use core::f64::consts::PI;

#[allow(unused_imports)] // see the crate root
use num_traits::Float;

use crate::defaults;
use crate::models::{ModelSpec, SpeedRequest, TravelingWave};
use crate::reduction::Orbit;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// The neglected tails must stay below this fraction of the value.
    pub tail_rel: f64,
    pub max_panels: usize,
    pub initial_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            abs_tol: defaults::QUAD_ABS_TOL,
            rel_tol: defaults::QUAD_REL_TOL,
            tail_rel: defaults::QUAD_TAIL_REL,
            max_panels: defaults::QUAD_MAX_INTERVALS,
            initial_panels: defaults::QUAD_INITIAL_INTERVALS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    /// Discretisation plus truncation error bound.
    pub abs_error_estimate: f64,
    /// Truncation half width `L`; the integral runs over `[z0 - L, z0 + L]`.
    pub half_width: f64,
    pub nodes: usize,
}

/// `(1/2π) ∫ (du/dz)² dz` of a closed-form wave, by adaptive quadrature on
/// a window wide enough that the exponential tails are negligible.
pub fn action_profile(
    wave: &TravelingWave,
    opts: &QuadratureOptions,
) -> Result<QuadratureEstimate> {
    let rate = wave.decay_rate();
    let center = wave.offset();
    let slope_sq = |z: f64| {
        let du = wave.eval(z).1;
        du * du
    };
    // (u')² decays like exp(-2 rate |z|); its tail beyond L is about
    // f(L) / (2 rate). Twice that is the bound used.
    let tail = |half: f64| (slope_sq(center - half) + slope_sq(center + half)) / rate;

    let mut half = 10.0 / rate;
    let max_half = 2000.0 / rate;
    loop {
        let integral = quadrature::integrate(
            slope_sq,
            center - half,
            center + half,
            opts.initial_panels,
            opts.abs_tol * 2.0 * PI,
            opts.rel_tol,
            opts.max_panels,
        )?;
        let tail_bound = tail(half);
        if tail_bound <= opts.tail_rel * integral.value.abs() {
            return Ok(QuadratureEstimate {
                value: integral.value / (2.0 * PI),
                abs_error_estimate: (integral.error + tail_bound) / (2.0 * PI),
                half_width: half,
                nodes: integral.nodes,
            });
        }
        if half >= max_half {
            return Err(Error::QuadratureNotConverged {
                estimate: (integral.error + tail_bound) / (2.0 * PI),
                tolerance: opts.tail_rel * integral.value.abs() / (2.0 * PI),
                nodes: integral.nodes,
            });
        }
        half += 2.0 / rate;
    }
}

/// Closed-form action of the solitary wave of `model` at speed `v`.
pub fn action_reference(model: &ModelSpec, v: f64) -> Result<f64> {
    let v = model.admissible_speed(SpeedRequest::Value(v))?;
    Ok(match *model {
        ModelSpec::Kdv { nonlinearity } => {
            12.0 / (5.0 * PI) * v.powf(2.5) / (nonlinearity * nonlinearity)
        }
        ModelSpec::SineGordon => 4.0 / (PI * (1.0 - v * v).sqrt()),
        ModelSpec::FisherKpp { diffusion, growth } => {
            (growth / (6.0 * diffusion)).sqrt() / (10.0 * PI)
        }
        ModelSpec::Burgers {
            viscosity,
            right_state,
            left_state,
        } => (left_state - right_state).powi(3) / (24.0 * PI * viscosity),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedOrbitAction {
    /// `(1/2π) ∮ p du` as a line integral, `∫ p (du/dz) dz` along the samples.
    pub action: f64,
    /// `(1/2π)` × enclosed (shoelace) area.
    pub area_action: f64,
    /// `|action - area_action|`.
    pub discrepancy: f64,
    /// z extent of the circuit.
    pub period: f64,
    /// `2π / period`; `None` for a zero-extent orbit.
    pub omega0: Option<f64>,
}

/// Action, period and frequency of one closed circuit.
///
/// The line integral uses `du = p dz` along the trajectory, so it is
/// independent of the polygon the area is measured on.
pub fn action_closed_orbit(orbit: &Orbit) -> Result<ClosedOrbitAction> {
    if !orbit.is_closed() {
        return Err(Error::OrbitNotClosed);
    }
    let s = orbit.samples();
    let period = orbit.z_extent();
    if s.len() < 3 || period == 0.0 {
        return Ok(ClosedOrbitAction {
            action: 0.0,
            area_action: 0.0,
            discrepancy: 0.0,
            period,
            omega0: None,
        });
    }
    check_simple(orbit)?;

    let line: f64 = s
        .windows(2)
        .map(|w| 0.5 * (w[0].point.p.powi(2) + w[1].point.p.powi(2)) * (w[1].z - w[0].z))
        .sum();
    let n = s.len();
    let signed_area: f64 = 0.5
        * (0..n)
            .map(|i| {
                let a = s[i].point;
                let b = s[(i + 1) % n].point;
                a.u * b.p - b.u * a.p
            })
            .sum::<f64>();
    // Trajectories of u' = p run clockwise, so ∮ p du is minus the signed area.
    let action = line / (2.0 * PI);
    let area_action = -signed_area / (2.0 * PI);
    Ok(ClosedOrbitAction {
        action,
        area_action,
        discrepancy: (action - area_action).abs(),
        period,
        omega0: Some(2.0 * PI / period),
    })
}

/// Rejects sample polygons that cross themselves.
fn check_simple(orbit: &Orbit) -> Result<()> {
    let s = orbit.samples();
    let n = s.len();
    let (mut uc, mut pc) = (0.0, 0.0);
    for x in s {
        uc += x.point.u;
        pc += x.point.p;
    }
    uc /= n as f64;
    pc /= n as f64;

    // Fast path: angle about the centroid turns monotonically through one
    // full turn, so the polygon is star-shaped and simple.
    let angle = |i: usize| (s[i].point.p - pc).atan2(s[i].point.u - uc);
    let mut total = 0.0;
    let mut sign = 0.0;
    let mut monotone = true;
    for i in 0..n {
        let mut d = angle((i + 1) % n) - angle(i);
        if d > PI {
            d -= 2.0 * PI;
        } else if d <= -PI {
            d += 2.0 * PI;
        }
        if d == 0.0 {
            continue;
        }
        if sign == 0.0 {
            sign = d.signum();
        } else if d.signum() != sign {
            monotone = false;
            break;
        }
        total += d;
    }
    if monotone && (total.abs() - 2.0 * PI).abs() < 1e-6 {
        return Ok(());
    }

    let seg = |i: usize| (s[i].point, s[(i + 1) % n].point);
    for i in 0..n {
        let (a, b) = seg(i);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = seg(j);
            if segments_cross(a.u, a.p, b.u, b.p, c.u, c.p, d.u, d.p) {
                return Err(Error::SelfIntersecting(i, j));
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn segments_cross(ax: f64, ay: f64, bx: f64, by: f64, cx: f64, cy: f64, dx: f64, dy: f64) -> bool {
    let orient = |px: f64, py: f64, qx: f64, qy: f64, rx: f64, ry: f64| {
        (qx - px) * (ry - py) - (qy - py) * (rx - px)
    };
    let o1 = orient(ax, ay, bx, by, cx, cy);
    let o2 = orient(ax, ay, bx, by, dx, dy);
    let o3 = orient(cx, cy, dx, dy, ax, ay);
    let o4 = orient(cx, cy, dx, dy, bx, by);
    (o1 > 0.0) != (o2 > 0.0) && (o3 > 0.0) != (o4 > 0.0) && o1 != 0.0 && o2 != 0.0
}

/// Action–angle state of a traveling wave at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionAngle {
    pub action: f64,
    pub theta: f64,
    /// `dΘ/dz`, the wave speed.
    pub rate: f64,
}

impl ActionAngle {
    /// The state `dz` further along: `I` unchanged, `Θ` advanced by `rate·dz`.
    pub fn advance(&self, dz: f64) -> Self {
        ActionAngle {
            theta: self.theta + self.rate * dz,
            ..*self
        }
    }
}

/// Linear flow `dI/dz = 0`, `dΘ/dz = v`, with `Θ(z0) = 0`.
pub fn action_angle_flow(action: f64, v: f64, z0: f64, z: f64) -> ActionAngle {
    debug_assert!(action >= 0.0, "action must be non-negative");
    ActionAngle {
        action,
        theta: v * (z - z0),
        rate: v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Branch;
    use crate::reduction::{OrbitOptions, OrbitSample, PhasePoint, Reduction, SeparatrixOptions};
    use alloc::vec::Vec;

    fn wave(model: ModelSpec, v: SpeedRequest) -> TravelingWave {
        TravelingWave::new(model, v, 0.0, None).unwrap()
    }

    /// Brute-force trapezoid over a wide window, independent of the adaptive
    /// rule above.
    fn trapezoid_action(w: &TravelingWave, half: f64, n: usize) -> f64 {
        let h = 2.0 * half / (n - 1) as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let z = w.offset() - half + h * i as f64;
            let du = w.eval(z).1;
            let weight = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            sum += weight * du * du;
        }
        sum * h / (2.0 * PI)
    }

    #[test]
    fn profile_action_matches_frozen_oracles() {
        // frozen from 10^6-node trapezoid runs of the analytic derivative
        let cases = [
            (
                wave(ModelSpec::kdv(1.0).unwrap(), SpeedRequest::Value(1.0)),
                0.763_943_726_841_097_3,
            ),
            (
                wave(ModelSpec::SineGordon, SpeedRequest::Value(0.0)),
                1.273_239_544_735_162_8,
            ),
            (
                wave(ModelSpec::fisher_kpp(1.0, 6.0).unwrap(), SpeedRequest::Auto),
                0.031_830_988_618_379_07,
            ),
            (
                wave(
                    ModelSpec::burgers(1.0, 0.0, 1.0).unwrap(),
                    SpeedRequest::Auto,
                ),
                0.013_262_911_924_324_61,
            ),
        ];
        for (w, expected) in cases {
            let est = action_profile(&w, &QuadratureOptions::default()).unwrap();
            assert!(
                (est.value - expected).abs() <= 1e-10 * expected,
                "{:?}: {}",
                w.model(),
                est.value
            );
            assert!(est.abs_error_estimate >= 0.0 && est.abs_error_estimate.is_finite());
            assert!(est.nodes >= 2);
            let reference = action_reference(&w.model(), w.speed()).unwrap();
            assert!((est.value - reference).abs() <= 1e-12 * reference);
            let trap = trapezoid_action(&w, 40.0 / w.decay_rate(), 100_001);
            assert!((trap - reference).abs() <= 1e-10 * reference);
        }
    }

    #[test]
    fn reference_scalings() {
        let kdv = ModelSpec::kdv(1.0).unwrap();
        let ratio = action_reference(&kdv, 4.0).unwrap() / action_reference(&kdv, 1.0).unwrap();
        assert!((ratio - 32.0).abs() < 1e-12);
        let sg = action_reference(&ModelSpec::SineGordon, 0.6).unwrap();
        assert!((sg - 5.0 / PI).abs() < 1e-14);
        let b1 = action_reference(&ModelSpec::burgers(1.0, 0.0, 1.0).unwrap(), 0.5).unwrap();
        let b2 = action_reference(&ModelSpec::burgers(2.0, 0.0, 1.0).unwrap(), 0.5).unwrap();
        assert!((b2 - 0.5 * b1).abs() < 1e-16);
        assert!(action_reference(&ModelSpec::SineGordon, 1.0).is_err());
    }

    #[test]
    fn shift_invariance() {
        let w = wave(ModelSpec::kdv(2.0).unwrap(), SpeedRequest::Value(1.5));
        let a = action_profile(&w, &QuadratureOptions::default())
            .unwrap()
            .value;
        let b = action_profile(&w.with_offset(17.3), &QuadratureOptions::default())
            .unwrap()
            .value;
        assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn quadrature_budget_failure_surfaces() {
        let w = wave(ModelSpec::kdv(1.0).unwrap(), SpeedRequest::Value(1.0));
        let opts = QuadratureOptions {
            abs_tol: 0.0,
            rel_tol: 0.0,
            max_panels: 20,
            ..QuadratureOptions::default()
        };
        assert!(matches!(
            action_profile(&w, &opts),
            Err(Error::QuadratureNotConverged { .. })
        ));
    }

    fn small_orbit(eps: f64) -> Orbit {
        let r = Reduction::new(ModelSpec::kdv(1.0).unwrap(), 1.0).unwrap();
        let opts = OrbitOptions {
            stop_on_closure: true,
            sample_dz: Some(2.0 * PI / 20_000.0),
            ..OrbitOptions::default()
        };
        r.integrate_orbit(PhasePoint::new(2.0 + eps, 0.0), (0.0, 50.0), &opts)
            .unwrap()
    }

    #[test]
    fn small_orbit_is_harmonic() {
        let eps = 1e-2;
        let result = action_closed_orbit(&small_orbit(eps)).unwrap();
        assert!((result.action - eps * eps / 2.0).abs() < 5e-2 * eps * eps);
        assert!((result.omega0.unwrap() - 1.0).abs() < 1e-3);
        assert!(result.discrepancy <= 1e-6 * result.action);
    }

    #[test]
    fn degenerate_orbit_has_zero_action() {
        let p = PhasePoint::new(2.0, 0.0);
        let orbit =
            Orbit::from_samples(alloc::vec![OrbitSample { z: 0.0, point: p }], 1e-12).unwrap();
        let result = action_closed_orbit(&orbit).unwrap();
        assert_eq!(result.action, 0.0);
        assert_eq!(result.omega0, None);
    }

    #[test]
    fn open_orbit_rejected() {
        let samples = (0..10)
            .map(|i| OrbitSample {
                z: i as f64,
                point: PhasePoint::new(i as f64, 0.0),
            })
            .collect();
        let orbit = Orbit::from_samples(samples, 1e-6).unwrap();
        assert_eq!(action_closed_orbit(&orbit), Err(Error::OrbitNotClosed));
    }

    #[test]
    fn figure_eight_rejected() {
        let n = 400;
        let samples: Vec<_> = (0..=n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                OrbitSample {
                    z: t,
                    point: PhasePoint::new(t.sin(), (2.0 * t).sin()),
                }
            })
            .collect();
        let orbit = Orbit::from_samples(samples, 1e-9).unwrap();
        assert!(matches!(
            action_closed_orbit(&orbit),
            Err(Error::SelfIntersecting(..))
        ));
    }

    #[test]
    fn separatrix_loop_action_matches_profile() {
        let r = Reduction::new(ModelSpec::kdv(1.0).unwrap(), 1.0).unwrap();
        let orbit = r
            .trace_separatrix(Some(Branch::Soliton), &SeparatrixOptions::default())
            .unwrap();
        let loop_action = action_closed_orbit(&orbit).unwrap();
        let profile = action_profile(
            &wave(ModelSpec::kdv(1.0).unwrap(), SpeedRequest::Value(1.0)),
            &QuadratureOptions::default(),
        )
        .unwrap();
        assert!((loop_action.action - profile.value).abs() <= 1e-3 * profile.value);
        assert!((loop_action.area_action - profile.value).abs() <= 1e-3 * profile.value);
    }

    #[test]
    fn action_grows_with_energy_inside_separatrix() {
        let r = Reduction::new(ModelSpec::kdv(1.0).unwrap(), 1.0).unwrap();
        let opts = OrbitOptions {
            stop_on_closure: true,
            sample_dz: Some(1e-3),
            ..OrbitOptions::default()
        };
        let mut last = (f64::NEG_INFINITY, -1.0);
        for u0 in [1.9, 1.6, 1.2, 0.8, 0.4, 0.1] {
            let start = PhasePoint::new(u0, 0.0);
            let orbit = r.integrate_orbit(start, (0.0, 200.0), &opts).unwrap();
            let h = r.hamiltonian(start).unwrap();
            let i = action_closed_orbit(&orbit).unwrap().action;
            assert!(h > last.0 && i > last.1, "u0 = {u0}");
            last = (h, i);
        }
    }

    #[test]
    fn angle_flow_is_linear() {
        assert_eq!(action_angle_flow(0.7639, 1.0, 0.0, 10.0).theta, 10.0);
        assert_eq!(action_angle_flow(0.3, 0.0, 2.0, 99.0).theta, 0.0);
        let aa = action_angle_flow(0.5, 5.0, 0.0, 2.0);
        assert_eq!((aa.theta, aa.action, aa.rate), (10.0, 0.5, 5.0));
        assert_eq!(aa.advance(1.0).theta, 15.0);
    }
}
