//! Finite-volume / finite-difference solver for the macroscopic system:
//! push-forward transport of the density, a Burgers-type momentum equation
//! with nonlocal sources and artificial diffusion, and a semi-Lagrangian
//! update of the mean leadership.

pub mod density;
pub mod leadership;
pub mod linear;
pub mod momentum;
pub mod solver;
pub mod sources;
pub mod stencil;

pub use density::{cfl_check, max_speed, step_density};
pub use leadership::{bilinear_interpolate, step_leadership};
pub use linear::{bicgstab, solve_tridiagonal, SolveStats};
pub use momentum::{step_momentum, MomentumMode, MomentumOptions};
pub use solver::{run_macro, run_macro_observed, snapshot_steps, MacroReport, SolverConfig};
pub use sources::{nonlocal_source_leadership, nonlocal_source_velocity, SourceEvaluator};
pub use stencil::Stencil;

/// Dirichlet data imposed on the outermost cell layer and used for
/// anything that enters from outside the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub rho: f64,
    pub u: [f64; 2],
    pub l: f64,
}

impl Default for BoundaryConditions {
    fn default() -> Self {
        Self {
            rho: 0.0,
            u: [0.0, 0.0],
            l: 0.0,
        }
    }
}

impl BoundaryConditions {
    /// Overwrites the boundary ring of `state` with the Dirichlet data.
    pub fn impose(&self, grid: &crate::model::Grid, state: &mut crate::model::MacroState) {
        let [n1, n2] = grid.cells();
        let mut set = |idx: usize| {
            state.rho[idx] = self.rho;
            state.u[0][idx] = self.u[0];
            if grid.dim() == 2 {
                state.u[1][idx] = self.u[1];
            }
            state.l[idx] = self.l;
        };
        if grid.dim() == 1 {
            set(0);
            set(n1 - 1);
            return;
        }
        for i in 0..n1 {
            set(grid.index(i, 0));
            set(grid.index(i, n2 - 1));
        }
        for j in 0..n2 {
            set(grid.index(0, j));
            set(grid.index(n1 - 1, j));
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HydroError {
    #[error("CFL violated at step {step}: dt·max|u| = {displacement:e} exceeds min Δx = {dx:e}")]
    Cfl {
        step: usize,
        displacement: f64,
        dx: f64,
    },
    #[error("linear solver did not reach tolerance {tol:e} within {iterations} iterations (residual {residual:e})")]
    LinearSolver {
        iterations: usize,
        residual: f64,
        tol: f64,
    },
    #[error("non-finite value in cell {cell} after step {step}")]
    NonFinite { step: usize, cell: usize },
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
}
