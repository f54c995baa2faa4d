//! Time loop of the macroscopic solver.

use super::density::{cfl_check, max_speed, step_density_into};
use super::leadership::step_leadership;
use super::momentum::{step_momentum, MomentumMode, MomentumOptions};
use super::sources::SourceEvaluator;
use super::{BoundaryConditions, HydroError};
use crate::model::{Grid, MacroState, ModelError, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub horizon: f64,
    pub mode: MomentumMode,
    pub linear_tol: f64,
    pub max_iterations: usize,
    /// Number of evenly spaced intervals between recorded states; the
    /// initial and final states are always kept.
    pub snapshots: usize,
}

impl SolverConfig {
    pub fn new(dt: f64, horizon: f64) -> Self {
        Self {
            dt,
            horizon,
            mode: MomentumMode::Implicit,
            linear_tol: 1e-10,
            max_iterations: 2000,
            snapshots: 10,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ModelError::InvalidParam {
                    key,
                    value: v,
                    reason: "must be positive and finite",
                })
            }
        };
        check("dt", self.dt)?;
        check("T", self.horizon)?;
        check("linear_tol", self.linear_tol)
    }

    pub fn step_count(&self) -> usize {
        (self.horizon / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

/// Steps at which states are recorded: `round(k·n/m)` for `k = 0..=m`.
pub fn snapshot_steps(steps: usize, intervals: usize) -> Vec<usize> {
    let m = intervals.max(1);
    let mut out: Vec<usize> = (0..=m)
        .map(|k| ((k * steps) as f64 / m as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

#[derive(Debug, Clone)]
pub struct MacroReport {
    /// `(step, state)` pairs in increasing step order.
    pub snapshots: Vec<(usize, MacroState)>,
    pub steps: usize,
    pub dt: f64,
    /// Largest distance of `l` outside `[0, 1]` seen during the run.
    pub leadership_excursion: f64,
}

impl MacroReport {
    pub fn final_state(&self) -> &MacroState {
        &self.snapshots.last().expect("at least the initial state").1
    }
}

/// Integrates the macroscopic system from `initial` to the horizon.
pub fn run_macro(
    grid: &Grid,
    params: &ModelParams,
    bc: &BoundaryConditions,
    initial: &MacroState,
    config: &SolverConfig,
) -> Result<MacroReport, HydroError> {
    run_macro_observed(grid, params, bc, initial, config, |_, _| {})
}

/// [`run_macro`] calling `observe(step, state)` after every step, including
/// step 0.
pub fn run_macro_observed<F>(
    grid: &Grid,
    params: &ModelParams,
    bc: &BoundaryConditions,
    initial: &MacroState,
    config: &SolverConfig,
    mut observe: F,
) -> Result<MacroReport, HydroError>
where
    F: FnMut(usize, &MacroState),
{
    config.validate()?;
    params.validate()?;
    if initial.len() != grid.len() {
        return Err(ModelError::InvalidGrid(format!(
            "state has {} cells, grid has {}",
            initial.len(),
            grid.len()
        ))
        .into());
    }
    let steps = config.step_count();
    let dt = config.dt;
    let record = snapshot_steps(steps, config.snapshots);
    let mut evaluator = SourceEvaluator::new(grid, params);
    let opts = MomentumOptions {
        mode: config.mode,
        diffusion: params.diffusion,
        linear_tol: config.linear_tol,
        max_iterations: config.max_iterations,
    };
    let n = grid.len();
    let mut gu = [vec![0.0; n], vec![0.0; n]];
    let mut gl = vec![0.0; n];
    let mut state = initial.clone();
    bc.impose(grid, &mut state);
    let mut snapshots = vec![(0, state.clone())];
    let mut excursion = range_excursion(&state.l);
    observe(0, &state);
    let mut warned = false;
    for step in 1..=steps {
        if !cfl_check(&state.u, grid, dt) {
            return Err(HydroError::Cfl {
                step,
                displacement: dt * max_speed(&state.u, grid),
                dx: grid.min_spacing(),
            });
        }
        evaluator.evaluate(&state, &mut gu, &mut gl);
        let mut rho = vec![0.0; n];
        step_density_into(&state.rho, &state.u, grid, dt, bc, &mut rho)?;
        let u = step_momentum(&state.u, &gu, grid, dt, bc, &opts)?;
        let l = step_leadership(&state.l, &state.u, &gl, grid, dt, bc.l);
        state = MacroState {
            time: step as f64 * dt,
            rho,
            u,
            l,
        };
        bc.impose(grid, &mut state);
        if let Some(cell) = state.first_non_finite() {
            return Err(HydroError::NonFinite { step, cell });
        }
        let e = range_excursion(&state.l);
        if e > 1e-8 && !warned {
            log::warn!("leadership left [0, 1] by {e:e} at step {step}");
            warned = true;
        }
        excursion = excursion.max(e);
        observe(step, &state);
        if record.binary_search(&step).is_ok() {
            snapshots.push((step, state.clone()));
        }
    }
    Ok(MacroReport {
        snapshots,
        steps,
        dt,
        leadership_excursion: excursion,
    })
}

fn range_excursion(l: &[f64]) -> f64 {
    l.iter()
        .map(|&v| (-v).max(v - 1.0).max(0.0))
        .fold(0.0, f64::max)
}
