//! One-dimensional particle ensemble: sampling, drift, random-pair
//! interactions and binning onto a grid.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::interaction::{leadership_update, velocity_update, Agent, LeadershipRule};
use super::MicroError;
use crate::harness::Scenario;
use crate::model::{EffectiveParams, Grid, MacroState};

/// Resolution of the tabulated inverse CDF used for sampling.
const CDF_TABLE: usize = 1 << 16;

/// Event counters accumulated over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MicroCounters {
    /// Accepted velocity interactions with coincident partners.
    pub coincident: u64,
    /// Leadership values clamped back into `[0, 1]`.
    pub clamped: u64,
    /// Particles removed after leaving the domain.
    pub removed: u64,
    /// Particles binned into the nearest boundary cell.
    pub out_of_grid: u64,
    pub velocity_events: u64,
    pub leadership_events: u64,
}

/// Particle positions, velocities and leadership degrees with the random
/// stream that drives them.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Number of particles at sampling time; densities are normalised by it
    /// so that absorbed mass stays accounted for.
    pub initial_count: usize,
    pub counters: MicroCounters,
    rng: Xoshiro256PlusPlus,
    order: Vec<usize>,
}

impl PartialEq for Ensemble {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x
            && self.v == other.v
            && self.lambda == other.lambda
            && self.initial_count == other.initial_count
    }
}

impl Ensemble {
    /// Builds an ensemble from explicit particle data.
    pub fn from_particles(x: Vec<f64>, v: Vec<f64>, lambda: Vec<f64>, seed: u64) -> Self {
        assert!(x.len() == v.len() && x.len() == lambda.len());
        let n = x.len();
        Self {
            x,
            v,
            lambda,
            initial_count: n,
            counters: MicroCounters::default(),
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            order: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn mean_position(&self) -> f64 {
        self.x.iter().sum::<f64>() / self.len() as f64
    }

    /// Removes particles outside `[lo, hi]` (order of the survivors may
    /// change deterministically).
    pub fn remove_outside(&mut self, lo: f64, hi: f64) {
        let mut k = 0;
        while k < self.x.len() {
            if self.x[k] < lo || self.x[k] > hi {
                self.x.swap_remove(k);
                self.v.swap_remove(k);
                self.lambda.swap_remove(k);
                self.counters.removed += 1;
            } else {
                k += 1;
            }
        }
    }
}

/// Samples `n` particles from the scenario's initial data.
///
/// Positions are i.i.d. from the normalised initial density (tabulated
/// inverse CDF); velocity and leadership take the initial fields at each
/// sampled position.
pub fn init_ensemble(scenario: &Scenario, n: usize, seed: u64) -> Result<Ensemble, MicroError> {
    if scenario.dim != 1 {
        return Err(MicroError::UnsupportedDimension(scenario.dim));
    }
    if n < 2 {
        return Err(MicroError::TooFewParticles(n));
    }
    let length = scenario.extent[0];
    let h = length / CDF_TABLE as f64;
    let mut cdf = Vec::with_capacity(CDF_TABLE + 1);
    cdf.push(0.0);
    let mut prev = scenario.rho0.eval([0.0, 0.0], 1);
    let mut total = 0.0;
    for k in 1..=CDF_TABLE {
        let next = scenario.rho0.eval([k as f64 * h, 0.0], 1);
        if prev < 0.0 || next < 0.0 || !next.is_finite() {
            return Err(MicroError::InvalidDensity("negative or non-finite initial density"));
        }
        total += 0.5 * (prev + next) * h;
        cdf.push(total);
        prev = next;
    }
    if !(total > 0.0) {
        return Err(MicroError::InvalidDensity("initial density has zero mass"));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let target = rng.random::<f64>() * total;
        let k = cdf.partition_point(|&c| c < target).clamp(1, CDF_TABLE);
        let (c0, c1) = (cdf[k - 1], cdf[k]);
        let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
        x.push(((k - 1) as f64 + frac) * h);
    }
    let v = x.iter().map(|&p| scenario.u0[0].eval([p, 0.0], 1)).collect();
    let lambda = x.iter().map(|&p| scenario.l0.eval([p, 0.0], 1)).collect();
    Ok(Ensemble {
        x,
        v,
        lambda,
        initial_count: n,
        counters: MicroCounters::default(),
        rng,
        order: Vec::with_capacity(n),
    })
}

/// Free transport `X ← X + V·dt`.
pub fn drift_step(ensemble: &mut Ensemble, dt: f64) {
    for (x, v) in ensemble.x.iter_mut().zip(&ensemble.v) {
        *x += v * dt;
    }
}

/// One round of binary interactions.
///
/// Particles are shuffled into disjoint pairs; each pair accepts a velocity
/// event with probability `μ_eff·B·dt` and, independently, a leadership event
/// with probability `η_eff·B·dt`. Pairs outside the kernel support have zero
/// probability and consume no random draws.
pub fn interaction_step(
    ensemble: &mut Ensemble,
    eff: &EffectiveParams,
    rule: LeadershipRule,
    dt: f64,
) {
    let n = ensemble.len();
    if n < 2 {
        return;
    }
    let pv = eff.velocity_rate() * dt;
    let pl = eff.leadership_rate() * dt;
    if pv == 0.0 && pl == 0.0 {
        return;
    }
    let kernel = eff.kernel();
    let Ensemble {
        x,
        v,
        lambda,
        counters,
        rng,
        order,
        ..
    } = ensemble;
    order.clear();
    order.extend(0..n);
    order.shuffle(rng);
    for pair in order.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        let b_val = kernel.at_distance((x[b] - x[a]).abs());
        if b_val == 0.0 {
            continue;
        }
        let theta = rng.random::<f64>() < pv * b_val;
        let sigma = rng.random::<f64>() < pl * b_val;
        if theta {
            let pa = Agent { x: [x[a]], v: [v[a]], lambda: lambda[a] };
            let pb = Agent { x: [x[b]], v: [v[b]], lambda: lambda[b] };
            let (va, vb, coincident) = velocity_update(&pa, &pb, eff);
            v[a] = va[0];
            v[b] = vb[0];
            counters.velocity_events += 1;
            if coincident {
                counters.coincident += 1;
            }
        }
        if sigma {
            let (la, lb) = leadership_update(rule, lambda[a], lambda[b], eff.nu(), eff.delta());
            for (k, new) in [(a, la), (b, lb)] {
                let c = new.clamp(0.0, 1.0);
                if c != new {
                    counters.clamped += 1;
                }
                lambda[k] = c;
            }
            counters.leadership_events += 1;
        }
    }
}

/// Bins the ensemble into macroscopic moments.
///
/// `ρ = count / (N₀·Δx)` with `N₀` the initial particle count; `u` and `l`
/// are cell means, and empty cells are all zero. Particles outside the grid
/// go to the nearest boundary cell and are counted.
pub fn moments_on_grid(ensemble: &mut Ensemble, grid: &Grid) -> MacroState {
    let n = grid.len();
    let [n1, _] = grid.cells();
    let dx = grid.spacing()[0];
    let mut count = vec![0u64; n];
    let mut vsum = vec![0.0; n];
    let mut lsum = vec![0.0; n];
    for k in 0..ensemble.len() {
        let p = ensemble.x[k];
        let cell = match grid.locate([p, 0.0]) {
            Some((i, _)) => i,
            None => {
                ensemble.counters.out_of_grid += 1;
                if p < 0.0 || p.is_nan() {
                    0
                } else {
                    n1 - 1
                }
            }
        };
        count[cell] += 1;
        vsum[cell] += ensemble.v[k];
        lsum[cell] += ensemble.lambda[k];
    }
    let mut s = MacroState::zeros(grid);
    let norm = 1.0 / (ensemble.initial_count as f64 * dx);
    for c in 0..n {
        if count[c] > 0 {
            let m = count[c] as f64;
            s.rho[c] = m * norm;
            s.u[0][c] = vsum[c] / m;
            s.l[c] = lsum[c] / m;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn unit_eff(alpha0: f64, beta0: f64, gamma0: f64, radius: f64) -> EffectiveParams {
        ModelParams {
            alpha0,
            beta0,
            gamma0,
            nu: 0.8,
            mu: 1.0,
            eta: 1.0,
            radius,
            epsilon: 1.0,
            diffusion: 0.0,
        }
        .apply_scaling()
    }

    #[test]
    fn sampled_mean_matches_centre() {
        let sc = Scenario::test1d(0.02, 1e-3);
        let n = 100_000;
        let e = init_ensemble(&sc, n, 7).unwrap();
        let tol = 3.0 * 5.0 / (n as f64).sqrt();
        assert!((e.mean_position() - 25.0).abs() < tol, "{}", e.mean_position());
        let var = e.x.iter().map(|x| (x - 25.0).powi(2)).sum::<f64>() / n as f64;
        assert!((var.sqrt() - 5.0).abs() < 0.05);
        assert!(e.v.iter().all(|&v| v == 0.0) && e.lambda.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let sc = Scenario::test1d(0.02, 1e-3);
        let a = init_ensemble(&sc, 1000, 42).unwrap();
        let b = init_ensemble(&sc, 1000, 42).unwrap();
        let c = init_ensemble(&sc, 1000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_inputs() {
        let sc = Scenario::test1d(0.02, 1e-3);
        assert!(matches!(init_ensemble(&sc, 1, 0), Err(MicroError::TooFewParticles(1))));
        let mut flat = sc.clone();
        flat.rho0 = crate::harness::scenario::Profile::Constant(0.0);
        assert!(init_ensemble(&flat, 10, 0).is_err());
        assert!(init_ensemble(&Scenario::test2db(), 10, 0).is_err());
    }

    #[test]
    fn drift_examples() {
        let mut e = Ensemble::from_particles(vec![1.0, 3.0], vec![2.0, 0.0], vec![0.0; 2], 0);
        drift_step(&mut e, 0.1);
        assert!((e.x[0] - 1.2).abs() < 1e-15);
        assert_eq!(e.x[1], 3.0);
        let mut halves = Ensemble::from_particles(vec![0.3], vec![0.7], vec![0.0], 0);
        let mut whole = halves.clone();
        drift_step(&mut halves, 0.05);
        drift_step(&mut halves, 0.05);
        drift_step(&mut whole, 0.1);
        assert!((halves.x[0] - whole.x[0]).abs() < 1e-15);
    }

    #[test]
    fn far_pairs_never_interact() {
        let eff = unit_eff(0.01, 0.5, 1.0, 0.1);
        let mut e = Ensemble::from_particles(vec![0.0, 5.0], vec![0.0, 1.0], vec![0.2, 0.9], 3);
        interaction_step(&mut e, &eff, LeadershipRule::Binary, 1.0);
        assert_eq!((e.v.clone(), e.lambda.clone()), (vec![0.0, 1.0], vec![0.2, 0.9]));
    }

    #[test]
    fn certain_events_apply_the_rules() {
        // μ_eff·B·dt = 1: every close pair interacts.
        let eff = unit_eff(0.01, 0.5, 1.0, 0.5);
        let mut e = Ensemble::from_particles(vec![0.0, 0.1], vec![0.0, 1.0], vec![0.0, 0.3], 11);
        interaction_step(&mut e, &eff, LeadershipRule::Binary, 1.0);
        // 1 + 0.01·(0.1/0.01) + 0.7·(0.5·(0 - 1) + 1·(-0.1))
        assert!((e.v[0] - 0.5).abs() < 1e-14 && (e.v[1] - 0.68).abs() < 1e-14, "{:?}", e.v);
        assert!((e.lambda[0] - 1.0).abs() < 1e-15 && (e.lambda[1] - 0.7).abs() < 1e-15);
        assert_eq!(e.counters.velocity_events, 1);
    }

    #[test]
    fn generalized_overshoot_is_clamped() {
        // δ = 2 sends λ = λ* = 1 to -1; rates 1/2 with dt = 2 make the event certain.
        let eff = ModelParams {
            epsilon: 2.0,
            radius: 0.5,
            ..ModelParams::default()
        }
        .apply_scaling();
        let mut e = Ensemble::from_particles(vec![0.0, 0.1], vec![0.0; 2], vec![1.0, 1.0], 1);
        interaction_step(&mut e, &eff, LeadershipRule::Generalized, 2.0);
        assert_eq!(e.lambda, vec![0.0, 0.0]);
        assert_eq!(e.counters.clamped, 2);
    }

    #[test]
    fn binning_conventions() {
        let g = Grid::new_1d(1.0, 4).unwrap();
        let mut e = Ensemble::from_particles(vec![0.1, 0.2, 0.6, 1.7], vec![0.2, 0.4, 1.0, 5.0], vec![0.0, 1.0, 0.5, 0.5], 0);
        let s = moments_on_grid(&mut e, &g);
        assert!((s.u[0][0] - 0.3).abs() < 1e-15);
        assert_eq!((s.rho[1], s.u[0][1], s.l[1]), (0.0, 0.0, 0.0));
        assert_eq!(e.counters.out_of_grid, 1);
        assert_eq!(s.rho[3], 1.0);
        let mut all = Ensemble::from_particles(vec![0.3; 10], vec![0.0; 10], vec![0.0; 10], 0);
        let s = moments_on_grid(&mut all, &g);
        assert_eq!(s.rho[1], 4.0);
        assert!((s.mass(&g) - 1.0).abs() < 1e-15);
    }
}
