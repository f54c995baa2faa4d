//! Domain types shared by the particle and continuum solvers.

pub mod config;
pub mod grid;
pub mod kernel;
pub mod params;
pub mod state;

pub use config::KeyValues;
pub use grid::Grid;
pub use kernel::{KernelForm, KernelSpec};
pub use params::{EffectiveParams, ModelParams, PARAM_KEYS};
pub use state::MacroState;

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("parameter {key} = {value}: {reason}")]
    InvalidParam {
        key: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("unsupported dimension {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("config: {0}")]
    Config(String),
}
