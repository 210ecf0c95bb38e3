//! Dormand–Prince 5(4) with the standard 4th-order dense output, specialised
//! to planar systems.

use core::ops::ControlFlow;

#[allow(unused_imports)] // see the crate root
use num_traits::Float;

use crate::{Error, Result};

pub(crate) type State = [f64; 2];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Period of `y[0]` when it is an angle. Its error weight then stays at
    /// one period instead of growing with the winding number.
    pub angle_period: Option<f64>,
}

impl StepControl {
    fn weight(&self, i: usize, magnitude: f64) -> f64 {
        let m = match self.angle_period {
            Some(period) if i == 0 => magnitude.min(period),
            _ => magnitude,
        };
        self.atol + self.rtol * m
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DenseStep {
    pub z_old: f64,
    pub z_new: f64,
    pub y_old: State,
    pub y_new: State,
    cont: [State; 5],
}

impl DenseStep {
    pub fn eval(&self, z: f64) -> State {
        let h = self.z_new - self.z_old;
        let s = (z - self.z_old) / h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        core::array::from_fn(|i| {
            c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i])))
        })
    }
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        if *coef != 0.0 {
            out[0] += h * coef * k[0];
            out[1] += h * coef * k[1];
        }
    }
    out
}

/// Integrates `y' = f(y)` from `z0` towards `z_end` (either direction),
/// handing every accepted step to `observer` until it breaks or `z_end` is
/// reached. Returns the final `(z, y)`.
pub(crate) fn integrate<F, O>(
    f: F,
    z0: f64,
    y0: State,
    z_end: f64,
    control: &StepControl,
    mut observer: O,
) -> Result<(f64, State)>
where
    F: Fn(&State) -> State,
    O: FnMut(&DenseStep) -> ControlFlow<()>,
{
    let dir = if z_end >= z0 { 1.0 } else { -1.0 };
    let span = (z_end - z0).abs();
    if span == 0.0 {
        return Ok((z0, y0));
    }
    let max_step = control.max_step.min(span);
    let scale = |y: &State, i: usize| control.weight(i, y[i].abs());

    let mut z = z0;
    let mut y = y0;
    let mut k1 = f(&y);

    // Initial step from the Hairer–Wanner heuristic.
    let d0 = norm2(&y, &y, &scale);
    let d1 = norm2(&k1, &y, &scale);
    let mut h = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(max_step);
    let y1 = axpy(&y, dir * h, &[(1.0, &k1)]);
    let k1b = f(&y1);
    let d2 = {
        let diff = [k1b[0] - k1[0], k1b[1] - k1[1]];
        norm2(&diff, &y, &scale) / h
    };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    h = (100.0 * h).min(h1).min(max_step);

    let mut steps = 0usize;
    loop {
        if steps >= control.max_steps {
            return Err(Error::Integration {
                z,
                reason: "step budget exhausted",
            });
        }
        steps += 1;
        let remaining = (z_end - z) * dir;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        let k2 = f(&axpy(&y, hs, &[(A[1][0], &k1)]));
        let k3 = f(&axpy(&y, hs, &[(A[2][0], &k1), (A[2][1], &k2)]));
        let k4 = f(&axpy(
            &y,
            hs,
            &[(A[3][0], &k1), (A[3][1], &k2), (A[3][2], &k3)],
        ));
        let k5 = f(&axpy(
            &y,
            hs,
            &[
                (A[4][0], &k1),
                (A[4][1], &k2),
                (A[4][2], &k3),
                (A[4][3], &k4),
            ],
        ));
        let k6 = f(&axpy(
            &y,
            hs,
            &[
                (A[5][0], &k1),
                (A[5][1], &k2),
                (A[5][2], &k3),
                (A[5][3], &k4),
                (A[5][4], &k5),
            ],
        ));
        let y_new = axpy(
            &y,
            hs,
            &[
                (A[6][0], &k1),
                (A[6][2], &k3),
                (A[6][3], &k4),
                (A[6][4], &k5),
                (A[6][5], &k6),
            ],
        );
        let k7 = f(&y_new);
        let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &k7];

        let mut err = 0.0;
        for i in 0..2 {
            let e: f64 = hs * (0..7).map(|j| E[j] * ks[j][i]).sum::<f64>();
            let sc = control.weight(i, y[i].abs().max(y_new[i].abs()));
            err += (e / sc) * (e / sc);
        }
        let err = (err / 2.0).sqrt();
        if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
            h *= 0.1;
            if h < 1e-14 * z.abs().max(1.0) {
                return Err(Error::Integration {
                    z,
                    reason: "non-finite state",
                });
            }
            continue;
        }

        if err <= 1.0 {
            let z_new = if last { z_end } else { z + hs };
            let ydiff = [y_new[0] - y[0], y_new[1] - y[1]];
            let bspl = [hs * k1[0] - ydiff[0], hs * k1[1] - ydiff[1]];
            let cont = [
                y,
                ydiff,
                bspl,
                [
                    ydiff[0] - hs * k7[0] - bspl[0],
                    ydiff[1] - hs * k7[1] - bspl[1],
                ],
                core::array::from_fn(|i| hs * (0..7).map(|j| D[j] * ks[j][i]).sum::<f64>()),
            ];
            let step = DenseStep {
                z_old: z,
                z_new,
                y_old: y,
                y_new,
                cont,
            };
            z = z_new;
            y = y_new;
            k1 = k7;
            if observer(&step).is_break() || last {
                return Ok((z, y));
            }
            let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
            h = (h * fac).min(max_step);
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac;
            if h < 1e-14 * z.abs().max(1.0) {
                return Err(Error::Integration {
                    z,
                    reason: "step size underflow",
                });
            }
        }
    }
}

fn norm2(v: &State, y: &State, scale: &impl Fn(&State, usize) -> f64) -> f64 {
    let a = v[0] / scale(y, 0);
    let b = v[1] / scale(y, 1);
    ((a * a + b * b) / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn control() -> StepControl {
        StepControl {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
            angle_period: None,
        }
    }

    #[test]
    fn harmonic_oscillator_full_period() {
        let f = |y: &State| [y[1], -y[0]];
        let (z, y) = integrate(
            f,
            0.0,
            [1.0, 0.0],
            2.0 * core::f64::consts::PI,
            &control(),
            |_| ControlFlow::Continue(()),
        )
        .unwrap();
        assert!((z - 2.0 * core::f64::consts::PI).abs() < 1e-15);
        assert!((y[0] - 1.0).abs() < 1e-8 && y[1].abs() < 1e-8);
    }

    #[test]
    fn backward_and_dense_output() {
        let f = |y: &State| [y[0], 0.0];
        let mut worst: f64 = 0.0;
        let (_, y) = integrate(f, 1.0, [1.0, 0.0], -1.0, &control(), |step| {
            let zm = 0.5 * (step.z_old + step.z_new);
            let exact = (zm - 1.0).exp();
            worst = worst.max((step.eval(zm)[0] - exact).abs() / exact);
            ControlFlow::Continue(())
        })
        .unwrap();
        assert!((y[0] - (-2.0f64).exp()).abs() < 1e-10);
        assert!(worst < 1e-8, "dense output error {worst}");
    }
}
