//! Particle versus continuum comparison on the one-dimensional test.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::metrics::l2_distance;
use super::scenario::Scenario;
use super::HarnessError;
use crate::hydro::{run_macro, MomentumMode, SolverConfig};
use crate::micro::{run_micro, LeadershipRule, MicroConfig};
use crate::model::{Grid, MacroState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub rule: LeadershipRule,
    pub mode: MomentumMode,
    pub horizon: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            rule: LeadershipRule::Generalized,
            mode: MomentumMode::Implicit,
            horizon: 5.0,
        }
    }
}

/// Final-time distances between particle and continuum moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub radius: f64,
    pub epsilon: f64,
    pub particles: usize,
    pub seed: u64,
    pub l2_rho: f64,
    pub l2_rhou: f64,
    pub l2_rhol: f64,
    pub dx: f64,
    pub dt: f64,
}

pub const COMPARISON_HEADER: &str = "R,epsilon,N,seed,l2_rho,l2_rhou,l2_rhol,dx,dt";

impl ComparisonRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{:e},{:e},{},{},{:.16e},{:.16e},{:.16e},{:e},{:e}",
            self.radius,
            self.epsilon,
            self.particles,
            self.seed,
            self.l2_rho,
            self.l2_rhou,
            self.l2_rhol,
            self.dx,
            self.dt
        )
    }
}

pub fn write_comparison_csv(path: &Path, rows: &[ComparisonRow]) -> Result<(), HarnessError> {
    let mut text = String::from(COMPARISON_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r.csv_line());
        text.push('\n');
    }
    let mut f = fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| HarnessError::io(path, e))
}

/// Scenario used for a comparison at `(radius, epsilon)`.
pub fn comparison_scenario(radius: f64, epsilon: f64, opts: &CompareOptions) -> Scenario {
    let mut sc = Scenario::test1d(radius, epsilon);
    sc.horizon = opts.horizon;
    sc
}

/// Continuum reference for a comparison scenario.
pub fn macro_reference(sc: &Scenario, opts: &CompareOptions) -> Result<(Grid, MacroState), HarnessError> {
    let grid = sc.grid()?;
    let mut cfg = SolverConfig::new(sc.dt, sc.horizon);
    cfg.mode = opts.mode;
    cfg.snapshots = 1;
    let report = run_macro(&grid, &sc.params, &sc.bc, &sc.initial_state(&grid), &cfg)?;
    Ok((grid, report.final_state().clone()))
}

fn distances(
    sc: &Scenario,
    grid: &Grid,
    reference: &MacroState,
    particles: usize,
    seed: u64,
    opts: &CompareOptions,
) -> Result<ComparisonRow, HarnessError> {
    let mut cfg = MicroConfig::new(particles, sc.dt, sc.horizon, seed);
    cfg.rule = opts.rule;
    cfg.snapshots = 1;
    let micro = run_micro(sc, grid, &cfg)?;
    let m = micro.final_state();
    Ok(ComparisonRow {
        radius: sc.params.radius,
        epsilon: sc.params.epsilon,
        particles,
        seed,
        l2_rho: l2_distance(&m.rho, &reference.rho, grid)?,
        l2_rhou: l2_distance(&m.momentum(0), &reference.momentum(0), grid)?,
        l2_rhol: l2_distance(&m.leadership_density(), &reference.leadership_density(), grid)?,
        dx: grid.spacing()[0],
        dt: sc.dt,
    })
}

/// Runs particles and continuum to the horizon and measures the distances.
pub fn run_comparison_1d(
    radius: f64,
    epsilon: f64,
    particles: usize,
    seed: u64,
    opts: &CompareOptions,
) -> Result<ComparisonRow, HarnessError> {
    Ok(run_comparison_batch(radius, epsilon, particles, &[seed], opts)?.remove(0))
}

/// [`run_comparison_1d`] for several seeds sharing one continuum run.
pub fn run_comparison_batch(
    radius: f64,
    epsilon: f64,
    particles: usize,
    seeds: &[u64],
    opts: &CompareOptions,
) -> Result<Vec<ComparisonRow>, HarnessError> {
    let sc = comparison_scenario(radius, epsilon, opts);
    let (grid, reference) = macro_reference(&sc, opts)?;
    seeds
        .par_iter()
        .map(|&seed| distances(&sc, &grid, &reference, particles, seed, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_comparison_row_is_consistent() {
        let opts = CompareOptions {
            horizon: 0.05,
            ..Default::default()
        };
        let rows = run_comparison_batch(0.1, 1e-2, 5_000, &[1, 2], &opts).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!((r.radius, r.epsilon, r.particles), (0.1, 1e-2, 5_000));
            assert!((r.dx - 0.0125).abs() < 1e-15);
            assert!((r.dt - 1e-2).abs() < 1e-15);
            assert!(r.l2_rho > 0.0 && r.l2_rho.is_finite());
        }
        assert_ne!(rows[0].l2_rho, rows[1].l2_rho);
        let single = run_comparison_1d(0.1, 1e-2, 5_000, 2, &opts).unwrap();
        assert_eq!(single, rows[1]);
    }

    #[test]
    fn few_particles_are_noise_dominated() {
        let opts = CompareOptions {
            horizon: 0.05,
            ..Default::default()
        };
        let seeds = [1, 2, 3, 4];
        let mean = |n: usize| {
            let rows = run_comparison_batch(0.1, 1e-2, n, &seeds, &opts).unwrap();
            rows.iter().map(|r| r.l2_rho).sum::<f64>() / rows.len() as f64
        };
        let (small, large) = (mean(100), mean(10_000));
        assert!(small > 4.0 * large, "{small} vs {large}");
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let row = ComparisonRow {
            radius: 0.01,
            epsilon: 1e-4,
            particles: 100_000,
            seed: 42,
            l2_rho: 0.1,
            l2_rhou: 0.001,
            l2_rhol: 0.05,
            dx: 0.00125,
            dt: 1e-4,
        };
        let path = dir.path().join("comparison.csv");
        write_comparison_csv(&path, &[row, row]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], COMPARISON_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("1e-2,1e-4,100000,42,"));
    }
}
