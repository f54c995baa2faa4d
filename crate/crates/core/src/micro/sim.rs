//! Time loop of the particle engine.

use super::ensemble::{drift_step, init_ensemble, interaction_step, moments_on_grid, Ensemble, MicroCounters};
use super::interaction::LeadershipRule;
use super::MicroError;
use crate::harness::Scenario;
use crate::hydro::snapshot_steps;
use crate::model::{Grid, MacroState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroConfig {
    pub particles: usize,
    pub dt: f64,
    pub horizon: f64,
    pub rule: LeadershipRule,
    pub seed: u64,
    /// Number of evenly spaced intervals between binned snapshots.
    pub snapshots: usize,
}

impl MicroConfig {
    pub fn new(particles: usize, dt: f64, horizon: f64, seed: u64) -> Self {
        Self {
            particles,
            dt,
            horizon,
            rule: LeadershipRule::Generalized,
            seed,
            snapshots: 10,
        }
    }

    /// Number of steps; zero for a zero horizon.
    pub fn step_count(&self) -> usize {
        if self.horizon <= 0.0 {
            0
        } else {
            (self.horizon / self.dt * (1.0 - 1e-12)).ceil().max(1.0) as usize
        }
    }
}

#[derive(Debug, Clone)]
pub struct MicroReport {
    /// `(step, binned moments)` in increasing step order.
    pub snapshots: Vec<(usize, MacroState)>,
    pub steps: usize,
    pub counters: MicroCounters,
    pub final_particles: usize,
}

impl MicroReport {
    pub fn final_state(&self) -> &MacroState {
        &self.snapshots.last().expect("at least the initial state").1
    }
}

/// Runs the particle system from the scenario's initial data.
pub fn run_micro(scenario: &Scenario, grid: &Grid, config: &MicroConfig) -> Result<MicroReport, MicroError> {
    run_micro_observed(scenario, grid, config, |_, _| {})
}

/// [`run_micro`] calling `observe(step, ensemble)` after every step,
/// including step 0.
pub fn run_micro_observed<F>(
    scenario: &Scenario,
    grid: &Grid,
    config: &MicroConfig,
    mut observe: F,
) -> Result<MicroReport, MicroError>
where
    F: FnMut(usize, &Ensemble),
{
    scenario.params.validate()?;
    let eff = scenario.params.apply_scaling();
    let bound = eff.max_consistent_dt();
    if !(config.dt > 0.0) || config.dt > bound * (1.0 + 1e-12) {
        return Err(MicroError::Inconsistent { dt: config.dt, bound });
    }
    let mut ens = init_ensemble(scenario, config.particles, config.seed)?;
    let steps = config.step_count();
    let record = snapshot_steps(steps, config.snapshots);
    let absorbing = scenario.bc.rho == 0.0;
    let length = scenario.extent[0];
    let mut time = 0.0;
    let mut snapshots = vec![(0, with_time(moments_on_grid(&mut ens, grid), time))];
    observe(0, &ens);
    for step in 1..=steps {
        drift_step(&mut ens, config.dt);
        if absorbing {
            ens.remove_outside(0.0, length);
        }
        interaction_step(&mut ens, &eff, config.rule, config.dt);
        time = step as f64 * config.dt;
        observe(step, &ens);
        if record.binary_search(&step).is_ok() {
            snapshots.push((step, with_time(moments_on_grid(&mut ens, grid), time)));
        }
    }
    if ens.counters.clamped > 0 {
        log::info!("{} leadership values clamped to [0, 1]", ens.counters.clamped);
    }
    if ens.counters.coincident > 0 {
        log::warn!("{} coincident pairs skipped repulsion", ens.counters.coincident);
    }
    Ok(MicroReport {
        snapshots,
        steps,
        counters: ens.counters,
        final_particles: ens.len(),
    })
}

fn with_time(mut s: MacroState, t: f64) -> MacroState {
    s.time = t;
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::scenario::Profile;

    fn free_flow(velocity: f64) -> Scenario {
        let mut sc = Scenario::test1d(0.02, 1e-3);
        sc.params.mu = 0.0;
        sc.params.eta = 0.0;
        sc.u0[0] = Profile::Constant(velocity);
        sc.spacing = 0.5;
        sc
    }

    #[test]
    fn zero_horizon_gives_initial_binning() {
        let sc = free_flow(0.0);
        let g = sc.grid().unwrap();
        let cfg = MicroConfig::new(500, 0.1, 0.0, 1);
        let r = run_micro(&sc, &g, &cfg).unwrap();
        assert_eq!(r.snapshots.len(), 1);
        let mut e = init_ensemble(&sc, 500, 1).unwrap();
        assert_eq!(r.snapshots[0].1, moments_on_grid(&mut e, &g));
    }

    #[test]
    fn free_flow_shifts_the_mean() {
        let sc = free_flow(0.8);
        let g = sc.grid().unwrap();
        let cfg = MicroConfig::new(2000, 0.05, 2.0, 9);
        let e0 = init_ensemble(&sc, 2000, 9).unwrap();
        let mut last = None;
        run_micro_observed(&sc, &g, &cfg, |_, e| last = Some(e.mean_position())).unwrap();
        assert!((last.unwrap() - (e0.mean_position() + 1.6)).abs() < 1e-9);
    }

    #[test]
    fn rejects_inconsistent_step() {
        let sc = Scenario::test1d(0.02, 1e-3);
        let g = sc.grid().unwrap();
        let cfg = MicroConfig::new(100, 2e-3, 1.0, 0);
        assert!(matches!(run_micro(&sc, &g, &cfg), Err(MicroError::Inconsistent { .. })));
    }

    #[test]
    fn deterministic_and_in_range() {
        let sc = Scenario::test1d(0.02, 1e-2);
        let g = sc.grid().unwrap();
        let cfg = MicroConfig::new(2000, sc.dt, 0.5, 5);
        let mut ok = true;
        let a = run_micro_observed(&sc, &g, &cfg, |_, e| {
            ok &= e.lambda.iter().all(|l| (0.0..=1.0).contains(l));
        })
        .unwrap();
        let b = run_micro(&sc, &g, &cfg).unwrap();
        assert!(ok);
        assert_eq!(a.snapshots, b.snapshots);
        assert!(a.counters.velocity_events > 0);
    }
}
