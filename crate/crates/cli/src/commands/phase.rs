use serde::Serialize;
use travelwave_core::action::action_closed_orbit;
use travelwave_core::reduction::{Orbit, OrbitOptions, PhasePoint, Reduction, SeparatrixOptions};
use travelwave_core::{ModelKind, ModelSpec, TravelingWave};

use super::{write_manifest, Params};
use crate::config::{resolve, Command, RunConfig, SpeedSetting};
use crate::error::CliError;
use crate::output::{stdout, to_csv, to_json, Sink};

const DEFAULT_FAN: usize = 8;
const MAX_FAN: usize = 1000;
/// Fan orbits run for at most this many decay lengths.
const FAN_SPAN: f64 = 200.0;
const FAN_SAMPLES_PER_LENGTH: f64 = 20.0;

#[derive(Serialize)]
struct OrbitSummary {
    points: usize,
    closed: bool,
    escaped: bool,
    z_extent: f64,
    min_u: f64,
    max_u: f64,
    min_p: f64,
    max_p: f64,
    #[serde(rename = "H")]
    energy: Option<f64>,
}

impl From<&Orbit> for OrbitSummary {
    fn from(o: &Orbit) -> Self {
        OrbitSummary {
            points: o.samples().len(),
            closed: o.is_closed(),
            escaped: o.escaped(),
            z_extent: o.z_extent(),
            min_u: o.min_u(),
            max_u: o.max_u(),
            min_p: o.min_p(),
            max_p: o.max_p(),
            energy: o.energy(),
        }
    }
}

#[derive(Serialize)]
struct Eigenvalue {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct EquilibriumRecord {
    u: f64,
    p: f64,
    kind: &'static str,
    eigenvalues: [Eigenvalue; 2],
}

#[derive(Serialize)]
struct FanOrbit {
    index: usize,
    start_u: f64,
    start_p: f64,
    #[serde(flatten)]
    summary: OrbitSummary,
    #[serde(rename = "I")]
    action: Option<f64>,
    period: Option<f64>,
    omega0: Option<f64>,
}

#[derive(Serialize)]
struct PhaseReport<'a> {
    model: &'static str,
    params: Params,
    v: f64,
    branch: &'static str,
    separatrix: OrbitSummary,
    equilibria: &'a [EquilibriumRecord],
    orbits: Vec<FanOrbit>,
}

pub fn run(cfg: &RunConfig, kind: ModelKind) -> Result<(), CliError> {
    let mut r = resolve(Command::Phase, cfg, kind)?;
    let wave = TravelingWave::new(r.model, r.speed, r.z0, r.branch)?;
    r.effective.v = Some(SpeedSetting::Value(wave.speed()));
    r.effective.branch = Some(wave.branch().name().to_owned());
    let fan = *r.effective.fan.get_or_insert(DEFAULT_FAN);
    if fan > MAX_FAN {
        return Err(CliError::Usage(format!("fan must be at most {MAX_FAN}")));
    }
    let reduction = Reduction::from_wave(&wave);

    let mut sep_opts = SeparatrixOptions::default();
    let mut orbit_opts = OrbitOptions::default();
    if let Some(rtol) = r.effective.rtol {
        sep_opts.rtol = rtol;
        orbit_opts.rtol = rtol;
    }
    if let Some(atol) = r.effective.atol {
        sep_opts.atol = atol;
        orbit_opts.atol = atol;
    }
    let separatrix = reduction.trace_separatrix(Some(wave.branch()), &sep_opts)?;

    let (lo, hi) = u_window(&wave);
    let pad = 1e-9 * (hi - lo).max(1.0);
    let equilibria: Vec<EquilibriumRecord> = reduction
        .equilibria((lo - pad, hi + pad))
        .into_iter()
        .map(|e| EquilibriumRecord {
            u: e.point.u,
            p: e.point.p,
            kind: e.kind.name(),
            eigenvalues: e.eigenvalues.map(|z| Eigenvalue { re: z.re, im: z.im }),
        })
        .collect();

    let ell = wave.decay_length();
    orbit_opts.stop_on_closure = reduction.is_hamiltonian();
    orbit_opts.sample_dz = Some(ell / FAN_SAMPLES_PER_LENGTH);
    let mut orbits = Vec::with_capacity(fan);
    let mut summaries = Vec::with_capacity(fan);
    for (index, start) in fan_starts(&wave, fan).into_iter().enumerate() {
        let orbit = reduction.integrate_orbit(start, (0.0, FAN_SPAN * ell), &orbit_opts)?;
        let closed = if orbit.is_closed() {
            Some(action_closed_orbit(&orbit)?)
        } else {
            None
        };
        summaries.push(FanOrbit {
            index,
            start_u: start.u,
            start_p: start.p,
            summary: OrbitSummary::from(&orbit),
            action: closed.map(|c| c.action),
            period: closed.map(|c| c.period),
            omega0: closed.and_then(|c| c.omega0),
        });
        orbits.push(orbit);
    }

    let report = PhaseReport {
        model: kind.name(),
        params: Params::from(&r.model),
        v: wave.speed(),
        branch: wave.branch().name(),
        separatrix: OrbitSummary::from(&separatrix),
        equilibria: &equilibria,
        orbits: summaries,
    };
    let json = to_json(&report)?;

    let sink = Sink::new(r.effective.out.clone())?;
    if sink.dir().is_some() {
        let with_h = reduction.is_hamiltonian();
        let sep_rows: Vec<Vec<f64>> = separatrix
            .samples()
            .iter()
            .map(|s| {
                let mut row = vec![s.z, s.point.u, s.point.p];
                if with_h {
                    row.push(reduction.hamiltonian(s.point).unwrap_or(f64::NAN));
                }
                row
            })
            .collect();
        let header: &[&str] = if with_h {
            &["z", "u", "p", "H"]
        } else {
            &["z", "u", "p"]
        };
        sink.file(
            "separatrix.csv",
            &to_csv(header, sep_rows.iter().map(Vec::as_slice))?,
        )?;
        let fan_rows: Vec<[f64; 4]> = orbits
            .iter()
            .enumerate()
            .flat_map(|(i, o)| {
                o.samples()
                    .iter()
                    .map(move |s| [i as f64, s.z, s.point.u, s.point.p])
            })
            .collect();
        sink.file(
            "orbits.csv",
            &to_csv(
                &["orbit", "z", "u", "p"],
                fan_rows.iter().map(|r| r.as_slice()),
            )?,
        )?;
        sink.file("equilibria.json", &to_json(&equilibria)?)?;
        sink.file("phase.json", &json)?;
        let files = [
            "separatrix.csv",
            "orbits.csv",
            "equilibria.json",
            "phase.json",
        ]
        .map(String::from);
        write_manifest(&sink, &r.effective, &files, ())?;
    }
    stdout(&json)
}

/// Range of `u` spanned by the wave.
fn u_window(wave: &TravelingWave) -> (f64, f64) {
    let (l, rr) = wave.boundary_limits();
    let crest = match wave.model() {
        ModelSpec::Kdv { .. } => wave.eval(wave.offset()).0,
        _ => l,
    };
    let lo = l.min(rr).min(crest);
    let hi = l.max(rr).max(crest);
    (lo, hi)
}

/// Starting points: half inside the separatrix, half outside for the
/// Hamiltonian reductions; a spread of slopes through the mid-state for the
/// dissipative ones.
fn fan_starts(wave: &TravelingWave, count: usize) -> Vec<PhasePoint> {
    let inner = count.div_ceil(2);
    let outer = count - inner;
    match wave.model() {
        ModelSpec::Kdv { nonlinearity } => {
            let v = wave.speed();
            let center = 2.0 * v / nonlinearity;
            let crest = 3.0 * v / nonlinearity;
            let gap = crest - center;
            (0..inner)
                .map(|j| center + gap * (j + 1) as f64 / (inner + 1) as f64)
                .chain((0..outer).map(|j| crest + 0.25 * gap * (j + 1) as f64))
                .map(|u| PhasePoint::new(u, 0.0))
                .collect()
        }
        ModelSpec::SineGordon => {
            let top = 2.0 * wave.decay_rate();
            (0..inner)
                .map(|j| top * (j + 1) as f64 / (inner + 1) as f64)
                .chain((0..outer).map(|j| top * (1.0 + 0.25 * (j + 1) as f64)))
                .map(|p| PhasePoint::new(core::f64::consts::PI, p))
                .collect()
        }
        _ => {
            let (l, r) = wave.boundary_limits();
            let mid = 0.5 * (l + r);
            let slope = wave.eval(locate_mid(wave, mid)).1.abs().max(1e-12);
            (0..count)
                .map(|j| {
                    let s = if count == 1 {
                        0.5
                    } else {
                        j as f64 / (count - 1) as f64
                    };
                    PhasePoint::new(mid, slope * (4.0 * s - 2.0))
                })
                .collect()
        }
    }
}

/// `z` where a monotone front passes `level`, by bisection.
fn locate_mid(wave: &TravelingWave, level: f64) -> f64 {
    let ell = wave.decay_length();
    let (mut a, mut b) = (wave.offset() - 50.0 * ell, wave.offset() + 50.0 * ell);
    let fa = wave.eval(a).0 - level;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = wave.eval(m).0 - level;
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
