//! Catalogue of built-in experiments and their initial data.

use std::f64::consts::PI;
use std::fmt;

use crate::hydro::BoundaryConditions;
use crate::model::{Grid, MacroState, ModelError, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioName {
    Test1d,
    Test2da,
    Test2db,
    Test2dbLbc1,
    Test2dc,
    Custom,
}

impl ScenarioName {
    pub const BUILT_IN: [ScenarioName; 5] = [
        ScenarioName::Test1d,
        ScenarioName::Test2da,
        ScenarioName::Test2db,
        ScenarioName::Test2dbLbc1,
        ScenarioName::Test2dc,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::Test1d => "test1d",
            ScenarioName::Test2da => "test2da",
            ScenarioName::Test2db => "test2db",
            ScenarioName::Test2dbLbc1 => "test2db_lbc1",
            ScenarioName::Test2dc => "test2dc",
            ScenarioName::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::BUILT_IN
            .iter()
            .chain(std::iter::once(&ScenarioName::Custom))
            .copied()
            .find(|n| n.as_str() == s)
    }

    pub fn valid_names() -> String {
        Self::BUILT_IN
            .iter()
            .map(|n| n.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Isotropic Gaussian bump `amplitude · exp(-|x - center|² / (2σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gaussian {
    pub amplitude: f64,
    pub center: [f64; 2],
    pub sigma: f64,
}

/// Analytic initial profile of a scalar field.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    Gaussians(Vec<Gaussian>),
}

impl Profile {
    pub fn eval(&self, x: [f64; 2], dim: usize) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Gaussians(list) => list
                .iter()
                .map(|g| {
                    let mut r2 = (x[0] - g.center[0]).powi(2);
                    if dim == 2 {
                        r2 += (x[1] - g.center[1]).powi(2);
                    }
                    g.amplitude * (-r2 / (2.0 * g.sigma * g.sigma)).exp()
                })
                .sum(),
        }
    }
}

/// Complete description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub dim: usize,
    pub extent: [f64; 2],
    pub horizon: f64,
    pub dt: f64,
    /// Target cell size; the grid divides the extent into whole cells.
    pub spacing: f64,
    pub params: ModelParams,
    pub bc: BoundaryConditions,
    pub rho0: Profile,
    pub u0: [Profile; 2],
    pub l0: Profile,
}

/// Default artificial diffusion for the 2D runs.
pub const DEFAULT_DIFFUSION_2D: f64 = 1e-3;

/// Builds a catalogue scenario by name.
pub fn build_scenario(name: &str) -> Result<Scenario, ModelError> {
    match ScenarioName::parse(name) {
        Some(ScenarioName::Test1d) => Ok(Scenario::test1d(0.01, 1e-4)),
        Some(ScenarioName::Test2da) => Ok(Scenario::test2da()),
        Some(ScenarioName::Test2db) => Ok(Scenario::test2db()),
        Some(ScenarioName::Test2dbLbc1) => Ok(Scenario::test2db_lbc1()),
        Some(ScenarioName::Test2dc) => Ok(Scenario::test2dc()),
        Some(ScenarioName::Custom) => Ok(Scenario::custom()),
        None => Err(ModelError::Config(format!(
            "unknown scenario `{name}`; valid names: {}, custom",
            ScenarioName::valid_names()
        ))),
    }
}

fn gauss2(amplitude: f64, center: [f64; 2], variance: f64) -> Gaussian {
    Gaussian {
        amplitude,
        center,
        sigma: variance.sqrt(),
    }
}

impl Scenario {
    /// One-dimensional comparison test on `[0, 1/R]`: normalised Gaussian
    /// centred at `1/(2R)` with `σ = 0.1/R`, agents at rest and all followers.
    ///
    /// The grid uses `Δx = R/8` and the time step is the largest one allowed
    /// by the particle consistency bound (the initial velocity is zero, so
    /// transport does not constrain it).
    pub fn test1d(radius: f64, epsilon: f64) -> Self {
        let params = ModelParams {
            alpha0: 0.01,
            beta0: 0.5,
            gamma0: 1.0,
            nu: 0.8,
            mu: 1.0,
            eta: 1.0,
            radius,
            epsilon,
            diffusion: 0.0,
        };
        let sigma = 0.1 / radius;
        let dt = params.apply_scaling().max_consistent_dt();
        Self {
            name: ScenarioName::Test1d,
            dim: 1,
            extent: [1.0 / radius, 1.0],
            horizon: 5.0,
            dt,
            spacing: radius / 8.0,
            params,
            bc: BoundaryConditions::default(),
            rho0: Profile::Gaussians(vec![Gaussian {
                amplitude: 1.0 / (2.0 * PI * sigma * sigma).sqrt(),
                center: [0.5 / radius, 0.0],
                sigma,
            }]),
            u0: [Profile::Constant(0.0), Profile::Constant(0.0)],
            l0: Profile::Constant(0.0),
        }
    }

    /// Turning and split of a single flock on `[0, 2]²`.
    pub fn test2da() -> Self {
        Self {
            name: ScenarioName::Test2da,
            dim: 2,
            extent: [2.0, 2.0],
            horizon: 300.0,
            dt: 0.1,
            spacing: 0.025,
            params: ModelParams {
                alpha0: 0.0225,
                beta0: 0.5,
                gamma0: 0.5,
                nu: 0.8,
                mu: 0.5,
                eta: 0.05,
                radius: 0.3,
                epsilon: 1e-3,
                diffusion: DEFAULT_DIFFUSION_2D,
            },
            bc: BoundaryConditions::default(),
            rho0: Profile::Gaussians(vec![gauss2(1.0, [1.0, 1.0], 0.03)]),
            u0: [Profile::Constant(0.0), Profile::Constant(0.0)],
            l0: Profile::Gaussians(vec![
                gauss2(0.9, [0.8, 0.8], 0.02),
                gauss2(0.8, [1.3, 1.3], 0.02),
            ]),
        }
    }

    /// Two all-follower groups on `[0, 1]²` that attract and merge.
    pub fn test2db() -> Self {
        Self {
            name: ScenarioName::Test2db,
            dim: 2,
            extent: [1.0, 1.0],
            horizon: 350.0,
            dt: 0.2,
            spacing: 0.01,
            params: ModelParams {
                alpha0: 0.01,
                beta0: 0.1,
                gamma0: 1.3,
                nu: 0.2,
                mu: 1.5,
                eta: 0.3,
                radius: 0.25,
                epsilon: 1e-3,
                diffusion: DEFAULT_DIFFUSION_2D,
            },
            bc: BoundaryConditions::default(),
            rho0: Profile::Gaussians(vec![
                gauss2(1.0, [0.4, 0.7], 0.004),
                gauss2(1.0, [0.6, 0.3], 0.004),
            ]),
            u0: [Profile::Constant(0.0), Profile::Constant(0.0)],
            l0: Profile::Constant(0.0),
        }
    }

    /// [`Scenario::test2db`] with leadership held at 1 on the border.
    pub fn test2db_lbc1() -> Self {
        let mut s = Self::test2db();
        s.name = ScenarioName::Test2dbLbc1;
        s.bc.l = 1.0;
        s
    }

    /// Same initial and boundary data as [`Scenario::test2db`] with faster
    /// leadership dynamics and weaker attraction; forms a ring.
    pub fn test2dc() -> Self {
        let mut s = Self::test2db();
        s.name = ScenarioName::Test2dc;
        s.horizon = 100.0;
        s.params = ModelParams {
            alpha0: 0.01,
            beta0: 1.0,
            gamma0: 0.4,
            nu: 1.0,
            mu: 3.0,
            eta: 2.0,
            radius: 0.4,
            epsilon: 1e-3,
            diffusion: DEFAULT_DIFFUSION_2D,
        };
        s
    }

    /// Starting point for user-defined runs: a resting unit Gaussian in 1D.
    pub fn custom() -> Self {
        Self {
            name: ScenarioName::Custom,
            dim: 1,
            extent: [1.0, 1.0],
            horizon: 1.0,
            dt: 1e-3,
            spacing: 0.01,
            params: ModelParams {
                radius: 0.05,
                epsilon: 1e-3,
                ..ModelParams::default()
            },
            bc: BoundaryConditions::default(),
            rho0: Profile::Gaussians(vec![Gaussian {
                amplitude: 1.0,
                center: [0.5, 0.5],
                sigma: 0.1,
            }]),
            u0: [Profile::Constant(0.0), Profile::Constant(0.0)],
            l0: Profile::Constant(0.0),
        }
    }

    pub fn grid(&self) -> Result<Grid, ModelError> {
        Grid::from_spacing(self.dim, self.extent, self.spacing)
    }

    /// Number of steps and the step actually used: `dt` is shrunk, if needed,
    /// so that the horizon is a whole number of steps.
    pub fn steps(&self) -> (usize, f64) {
        step_count(self.horizon, self.dt)
    }

    pub fn initial_velocity(&self, x: [f64; 2]) -> [f64; 2] {
        [self.u0[0].eval(x, self.dim), self.u0[1].eval(x, self.dim)]
    }

    /// Initial fields sampled at the cell centres (no boundary data applied).
    pub fn initial_state(&self, grid: &Grid) -> MacroState {
        MacroState::from_fn(
            grid,
            |x| self.rho0.eval(x, self.dim),
            |x| self.initial_velocity(x),
            |x| self.l0.eval(x, self.dim),
        )
    }
}

/// Splits `horizon` into whole steps no longer than `dt`.
pub fn step_count(horizon: f64, dt: f64) -> (usize, f64) {
    if horizon <= 0.0 {
        return (0, dt);
    }
    let n = (horizon / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    (n, horizon / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test1d_data() {
        let s = build_scenario("test1d").unwrap();
        assert_eq!(s.params.radius, 0.01);
        assert_eq!(s.extent[0], 100.0);
        assert_eq!(s.horizon, 5.0);
        let g = s.grid().unwrap();
        assert_eq!(g.cells()[0], 80_000);
        assert!((g.spacing()[0] - 0.00125).abs() < 1e-15);
        // x0 = 1/(2R) = 50, σ = 0.1/R = 10
        let peak = s.rho0.eval([50.0, 0.0], 1);
        assert!((peak - 1.0 / (2.0 * PI * 100.0).sqrt()).abs() < 1e-15);
        let p = s.params;
        assert_eq!(
            (p.alpha0, p.beta0, p.gamma0, p.eta, p.mu, p.nu),
            (0.01, 0.5, 1.0, 1.0, 1.0, 0.8)
        );
        assert!((s.dt - 1e-4).abs() < 1e-18);
        let s2 = Scenario::test1d(0.02, 1e-3);
        assert!((s2.rho0.eval([25.0, 0.0], 1) - 1.0 / (2.0 * PI * 25.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn test2da_data() {
        let s = build_scenario("test2da").unwrap();
        assert_eq!((s.extent, s.horizon, s.dt, s.spacing), ([2.0, 2.0], 300.0, 0.1, 0.025));
        let p = s.params;
        assert_eq!(
            (p.alpha0, p.beta0, p.gamma0, p.eta, p.mu, p.nu, p.radius),
            (0.0225, 0.5, 0.5, 0.05, 0.5, 0.8, 0.3)
        );
        assert_eq!(s.rho0.eval([1.0, 1.0], 2), 1.0);
        let l = s.l0.eval([0.8, 0.8], 2);
        let expected = 0.9 + 0.8 * (-(0.25f64 + 0.25) / (2.0 * 0.02)).exp();
        assert!((l - expected).abs() < 1e-15);
        // σ0 = √0.03
        let r = s.rho0.eval([1.0 + 0.03f64.sqrt(), 1.0], 2);
        assert!((r - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn test2db_data() {
        let s = build_scenario("test2db").unwrap();
        assert_eq!((s.extent, s.horizon, s.dt, s.spacing), ([1.0, 1.0], 350.0, 0.2, 0.01));
        let p = s.params;
        assert_eq!(
            (p.alpha0, p.beta0, p.gamma0, p.eta, p.mu, p.nu, p.radius),
            (0.01, 0.1, 1.3, 0.3, 1.5, 0.2, 0.25)
        );
        assert!((s.rho0.eval([0.4, 0.7], 2) - 1.0).abs() < 1e-6);
        assert_eq!(s.l0, Profile::Constant(0.0));
        assert_eq!(s.bc.l, 0.0);
        let b = build_scenario("test2db_lbc1").unwrap();
        assert_eq!(b.bc.l, 1.0);
        assert_eq!(b.params, s.params);
        assert_eq!(b.rho0, s.rho0);
    }

    #[test]
    fn test2dc_data() {
        let s = build_scenario("test2dc").unwrap();
        let p = s.params;
        assert_eq!(
            (p.alpha0, p.beta0, p.gamma0, p.eta, p.mu, p.nu, p.radius),
            (0.01, 1.0, 0.4, 2.0, 3.0, 1.0, 0.4)
        );
        assert_eq!(s.rho0, Scenario::test2db().rho0);
    }

    #[test]
    fn build_is_pure_and_rejects_unknown() {
        for n in ScenarioName::BUILT_IN {
            assert_eq!(build_scenario(n.as_str()).unwrap(), build_scenario(n.as_str()).unwrap());
        }
        let err = build_scenario("test3d").unwrap_err().to_string();
        assert!(err.contains("test2db_lbc1"), "{err}");
    }

    #[test]
    fn step_count_covers_horizon() {
        assert_eq!(step_count(5.0, 1e-3).0, 5000);
        assert_eq!(step_count(350.0, 0.2).0, 1750);
        let (n, dt) = step_count(1.0, 0.3);
        assert_eq!(n, 4);
        assert!((dt - 0.25).abs() < 1e-15);
        assert_eq!(step_count(0.0, 0.1).0, 0);
    }
}
