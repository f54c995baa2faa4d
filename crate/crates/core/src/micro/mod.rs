//! Direct Monte Carlo particle engine (one space dimension).

pub mod ensemble;
pub mod interaction;
pub mod sim;

pub use ensemble::{drift_step, init_ensemble, interaction_step, moments_on_grid, Ensemble, MicroCounters};
pub use interaction::{Agent, LeadershipRule};
pub use sim::{run_micro, run_micro_observed, MicroConfig, MicroReport};

#[derive(Debug, thiserror::Error)]
pub enum MicroError {
    #[error("particle runs are one-dimensional, scenario has dimension {0}")]
    UnsupportedDimension(usize),
    #[error("need at least 2 particles, got {0}")]
    TooFewParticles(usize),
    #[error("initial density unusable: {0}")]
    InvalidDensity(&'static str),
    #[error("time step {dt:e} exceeds the consistency bound {bound:e}")]
    Inconsistent { dt: f64, bound: f64 },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}
