use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be {requirement}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
    },
    #[error("missing parameter {0}")]
    MissingParameter(&'static str),
    #[error("singular reduction: v^2 = {v_squared} must be < 1")]
    SingularReduction { v_squared: f64 },
    #[error("profile not real-valued: v = {0} must be > 0")]
    NonRealProfile(f64),
    #[error("speed must be given explicitly for this model")]
    SpeedRequired,
    #[error("speed is determined by parameters: requested {requested}, forced {forced}")]
    ForcedSpeed { requested: f64, forced: f64 },
    #[error("branch {branch} does not apply here: {reason}")]
    BranchMismatch {
        branch: &'static str,
        reason: &'static str,
    },
    #[error("not Hamiltonian: the {0} reduction carries a first-derivative term")]
    NotHamiltonian(&'static str),
    #[error("no saddle found for the requested separatrix")]
    NoSaddle,
    #[error("separatrix not closed: reached z = {z_reached}, closest approach {closest_approach} (needed {radius})")]
    SeparatrixNotClosed {
        z_reached: f64,
        closest_approach: f64,
        radius: f64,
    },
    #[error("integration failed at z = {z}: {reason}")]
    Integration { z: f64, reason: &'static str },
    #[error("quadrature did not converge: error estimate {estimate} above tolerance {tolerance} after {nodes} nodes")]
    QuadratureNotConverged {
        estimate: f64,
        tolerance: f64,
        nodes: usize,
    },
    #[error("orbit is not closed")]
    OrbitNotClosed,
    #[error("orbit polygon self-intersects at segments {0} and {1}")]
    SelfIntersecting(usize, usize),
    #[error("invalid orbit: {0}")]
    InvalidOrbit(&'static str),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("time step {dt} exceeds the stability limit {limit}")]
    StabilityViolation { dt: f64, limit: f64 },
    #[error("instability at t = {t}: max |u| = {max_abs} exceeds {bound}")]
    Unstable { t: f64, max_abs: f64, bound: f64 },
    #[error("feature not trackable: {0}")]
    Untrackable(&'static str),
}

impl Error {
    /// True for errors caused by inadmissible input rather than by a
    /// numerical procedure failing.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::MissingParameter(_)
                | Error::SingularReduction { .. }
                | Error::NonRealProfile(_)
                | Error::SpeedRequired
                | Error::ForcedSpeed { .. }
                | Error::BranchMismatch { .. }
                | Error::NotHamiltonian(_)
                | Error::InvalidOrbit(_)
                | Error::InvalidField(_)
                | Error::StabilityViolation { .. }
        )
    }
}
