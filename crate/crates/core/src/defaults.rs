//! Every default tolerance, grid and threshold in one place.
//!
//! | quantity | value | used by |
//! |---|---|---|
//! | ODE relative / absolute tolerance | 1e-10 / 1e-12 | orbit integration |
//! | separatrix seed offset | 1e-8 × max(1, \|u_saddle\|) | separatrix tracing |
//! | reconnection radius | 1e-5 | separatrix tracing |
//! | separatrix z budget | 200 decay lengths | separatrix tracing |
//! | separatrix sample spacing | decay length / 200 | separatrix tracing |
//! | escape bound | 1e6 × amplitude scale | orbit integration |
//! | orbit closure tolerance | 1e-6 | closed-orbit detection |
//! | centre tie-break | \|Re λ\| < 1e-10 | equilibrium classification |
//! | quadrature absolute / relative tolerance | 1e-10 / 1e-12 | profile action |
//! | tail truncation | 1e-12 of running value | profile action |
//! | PDE travel | 5 decay lengths | verification runs |
//! | PDE snapshots | 21 | verification runs |
//! | PDE time step | 0.8 × stability limit | verification runs |
//! | speed / action-drift thresholds | 1% / 1% | verification runs |
//! | residual threshold | 1e-9 | verification runs |

pub const ODE_RTOL: f64 = 1e-10;
pub const ODE_ATOL: f64 = 1e-12;
pub const ODE_MAX_STEPS: usize = 2_000_000;

pub const SEPARATRIX_SEED_OFFSET: f64 = 1e-8;
pub const RECONNECT_RADIUS: f64 = 1e-5;
pub const SEPARATRIX_BUDGET_DECAY_LENGTHS: f64 = 200.0;
pub const SEPARATRIX_SAMPLES_PER_DECAY_LENGTH: f64 = 200.0;

pub const ESCAPE_FACTOR: f64 = 1e6;
pub const CLOSURE_TOL: f64 = 1e-6;
pub const CENTER_TIE: f64 = 1e-10;
pub const EQUILIBRIUM_RESIDUAL: f64 = 1e-12;

pub const QUAD_ABS_TOL: f64 = 1e-10;
pub const QUAD_REL_TOL: f64 = 1e-12;
pub const QUAD_TAIL_REL: f64 = 1e-12;
pub const QUAD_MAX_INTERVALS: usize = 4096;
pub const QUAD_INITIAL_INTERVALS: usize = 16;

/// Relative tolerance used to accept an explicitly requested speed that must
/// equal a model-forced value.
pub const FORCED_SPEED_REL: f64 = 1e-12;

pub const TRAVEL_DECAY_LENGTHS: f64 = 5.0;
pub const SNAPSHOTS: usize = 21;
pub const DT_SAFETY: f64 = 0.8;
pub const SPEED_TOL: f64 = 0.01;
pub const DRIFT_TOL: f64 = 0.01;
pub const RESIDUAL_TOL: f64 = 1e-9;
pub const RESIDUAL_POINTS: usize = 1000;
/// A run aborts once max |u| exceeds this multiple of the initial range.
pub const INSTABILITY_FACTOR: f64 = 10.0;

/// Default wave speed for the models whose speed is free.
pub const KDV_SPEED: f64 = 1.0;
pub const SINE_GORDON_SPEED: f64 = 0.0;
/// A static kink cannot test propagation, so verification runs move it.
pub const SINE_GORDON_VERIFY_SPEED: f64 = 0.5;

/// Grid layout of a verification run, in units of the wave's decay length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDefaults {
    /// Half width of the domain.
    pub half_width: f64,
    /// Samples per decay length.
    pub resolution: f64,
}

pub const KDV_GRID: GridDefaults = GridDefaults {
    half_width: 40.0,
    resolution: 20.0,
};
pub const SINE_GORDON_GRID: GridDefaults = GridDefaults {
    half_width: 30.0,
    resolution: 40.0,
};
pub const KPP_GRID: GridDefaults = GridDefaults {
    half_width: 30.0,
    resolution: 50.0,
};
pub const BURGERS_GRID: GridDefaults = GridDefaults {
    half_width: 30.0,
    resolution: 40.0,
};
