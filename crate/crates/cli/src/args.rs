use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, RunConfig, SpeedSetting};

/// Solitary traveling waves: closed-form profiles, phase portraits,
/// actions and PDE verification runs.
#[derive(Debug, Parser)]
#[command(name = "travelwave", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Sample the closed-form profile: CSV of z, u, du/dz.
    Profile(Common),
    /// Separatrix, a fan of orbits and the equilibria of the reduced ODE.
    Phase {
        #[command(flatten)]
        common: Common,
        /// Number of fan orbits.
        #[arg(long)]
        fan: Option<usize>,
    },
    /// Action of the wave by quadrature and in closed form.
    Action(Common),
    /// Evolve the PDE from the profile and check speed, action and residual.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: GridArgs,
        /// Claimed speed to test instead of the wave's own.
        #[arg(long = "force-v", allow_negative_numbers = true)]
        force_v: Option<f64>,
        /// Verify all four models at their defaults (parameters given here
        /// apply to the models that take them).
        #[arg(long)]
        sweep: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// kdv, sg, kpp or burgers.
    #[arg(long)]
    pub model: Option<String>,
    /// KdV nonlinearity.
    #[arg(long = "A", allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Diffusion (KPP) or viscosity (Burgers).
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// KPP growth rate.
    #[arg(long)]
    pub k: Option<f64>,
    /// Burgers state as z → +∞.
    #[arg(long, allow_negative_numbers = true)]
    pub u1: Option<f64>,
    /// Burgers state as z → -∞.
    #[arg(long, allow_negative_numbers = true)]
    pub u2: Option<f64>,
    /// Wave speed, or "auto" where the model fixes it.
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<SpeedSetting>,
    /// soliton, kink-up, kink-down, front-decreasing or front-increasing.
    #[arg(long)]
    pub branch: Option<String>,
    /// Wave position.
    #[arg(long, allow_negative_numbers = true)]
    pub z0: Option<f64>,
    /// Profile sampling start:end:step.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for CSV/JSON files and the manifest.
    #[arg(long, env = "TRAVELWAVE_OUT_DIR")]
    pub out: Option<PathBuf>,
    /// ODE relative tolerance.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// ODE absolute tolerance.
    #[arg(long)]
    pub atol: Option<f64>,
    /// Quadrature absolute tolerance.
    #[arg(long = "quad-tol")]
    pub quad_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Run length.
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Domain half width.
    #[arg(long = "half-width")]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub snapshots: Option<usize>,
}

impl Cmd {
    pub fn command(&self) -> Command {
        match self {
            Cmd::Profile(_) => Command::Profile,
            Cmd::Phase { .. } => Command::Phase,
            Cmd::Action(_) => Command::Action,
            Cmd::Verify { .. } => Command::Verify,
        }
    }

    fn common(&self) -> &Common {
        match self {
            Cmd::Profile(c) | Cmd::Action(c) => c,
            Cmd::Phase { common, .. } | Cmd::Verify { common, .. } => common,
        }
    }

    pub fn config_path(&self) -> Option<&PathBuf> {
        self.common().config.as_ref()
    }

    /// The settings given as flags.
    pub fn flags(&self) -> RunConfig {
        let c = self.common();
        let mut cfg = RunConfig {
            model: c.model.clone(),
            a: c.a,
            d: c.d,
            k: c.k,
            u1: c.u1,
            u2: c.u2,
            v: c.v,
            branch: c.branch.clone(),
            z0: c.z0,
            range: c.range.clone(),
            out: c.out.clone(),
            rtol: c.rtol,
            atol: c.atol,
            quad_tol: c.quad_tol,
            ..RunConfig::default()
        };
        match self {
            Cmd::Phase { fan, .. } => cfg.fan = *fan,
            Cmd::Verify {
                grid,
                force_v,
                sweep,
                ..
            } => {
                cfg.dx = grid.dx;
                cfg.dt = grid.dt;
                cfg.t = grid.t;
                cfg.half_width = grid.half_width;
                cfg.snapshots = grid.snapshots;
                cfg.force_v = *force_v;
                cfg.sweep = sweep.then_some(true);
            }
            _ => {}
        }
        cfg
    }
}
