//! Model parameters and the hydrodynamic scaling that maps them onto the
//! coefficients used by the particle engine.

use std::fmt;

use super::kernel::KernelSpec;
use super::ModelError;

/// Keys of the flat parameter file, in canonical order.
pub const PARAM_KEYS: [&str; 9] = [
    "alpha0", "beta0", "gamma0", "nu", "mu", "eta", "R", "epsilon", "D",
];

/// Interaction strengths, rates, leadership imitation, kernel radius,
/// scaling parameter and artificial diffusion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Repulsion strength.
    pub alpha0: f64,
    /// Alignment strength.
    pub beta0: f64,
    /// Attraction strength.
    pub gamma0: f64,
    /// Leadership imitation rate.
    pub nu: f64,
    /// Velocity interaction rate.
    pub mu: f64,
    /// Leadership interaction rate.
    pub eta: f64,
    /// Interaction radius.
    pub radius: f64,
    /// Scaling parameter of the hydrodynamic regime.
    pub epsilon: f64,
    /// Artificial diffusion added to the momentum equation.
    pub diffusion: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha0: 0.01,
            beta0: 0.5,
            gamma0: 1.0,
            nu: 0.8,
            mu: 1.0,
            eta: 1.0,
            radius: 0.02,
            epsilon: 1e-4,
            diffusion: 0.0,
        }
    }
}

impl ModelParams {
    /// Checks the parameter invariants.
    ///
    /// Strengths and rates must be finite and non-negative; zero values are
    /// accepted so that individual mechanisms can be switched off. `nu = 1`
    /// is accepted with a warning.
    pub fn validate(&self) -> Result<(), ModelError> {
        for key in PARAM_KEYS {
            let value = self.get(key).expect("canonical key");
            if !value.is_finite() {
                return Err(ModelError::InvalidParam {
                    key,
                    value,
                    reason: "must be finite",
                });
            }
        }
        for key in ["alpha0", "beta0", "gamma0", "mu", "eta", "D"] {
            let value = self.get(key).expect("canonical key");
            if value < 0.0 {
                return Err(ModelError::InvalidParam {
                    key,
                    value,
                    reason: "must be non-negative",
                });
            }
        }
        if self.radius <= 0.0 {
            return Err(ModelError::InvalidParam {
                key: "R",
                value: self.radius,
                reason: "must be positive",
            });
        }
        if self.epsilon <= 0.0 {
            return Err(ModelError::InvalidParam {
                key: "epsilon",
                value: self.epsilon,
                reason: "must be positive",
            });
        }
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(ModelError::InvalidParam {
                key: "nu",
                value: self.nu,
                reason: "must lie in (0, 1]",
            });
        }
        if self.nu == 1.0 {
            log::warn!("nu = 1: leadership variance no longer relaxes to zero in the kinetic regime");
        }
        Ok(())
    }

    pub fn kernel(&self) -> KernelSpec {
        KernelSpec::indicator(self.radius)
    }

    /// Looks up a parameter by its file key.
    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "alpha0" => self.alpha0,
            "beta0" => self.beta0,
            "gamma0" => self.gamma0,
            "nu" => self.nu,
            "mu" => self.mu,
            "eta" => self.eta,
            "R" => self.radius,
            "epsilon" => self.epsilon,
            "D" => self.diffusion,
            _ => return None,
        })
    }

    /// Sets a parameter by its file key. Returns `false` for unknown keys.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        let slot = match key {
            "alpha0" => &mut self.alpha0,
            "beta0" => &mut self.beta0,
            "gamma0" => &mut self.gamma0,
            "nu" => &mut self.nu,
            "mu" => &mut self.mu,
            "eta" => &mut self.eta,
            "R" => &mut self.radius,
            "epsilon" => &mut self.epsilon,
            "D" => &mut self.diffusion,
            _ => return false,
        };
        *slot = value;
        true
    }

    /// Key/value pairs in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        PARAM_KEYS
            .iter()
            .map(move |&k| (k, self.get(k).expect("canonical key")))
    }

    /// Coefficients of the particle engine in the hydrodynamic scaling:
    /// strengths shrink by `epsilon` while rates grow by `1/epsilon`, and the
    /// non-conservative leadership step is `delta = epsilon`.
    pub fn apply_scaling(&self) -> EffectiveParams {
        let eps = self.epsilon;
        EffectiveParams {
            alpha: self.alpha0 * eps,
            beta: self.beta0 * eps,
            gamma: self.gamma0 * eps,
            nu: self.nu,
            velocity_rate: self.mu / eps,
            leadership_rate: self.eta / eps,
            delta: eps,
            kernel: self.kernel(),
        }
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in self.entries() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Scaled microscopic coefficients. Only obtainable through
/// [`ModelParams::apply_scaling`], so scaled and unscaled values cannot be
/// mixed by accident.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    nu: f64,
    velocity_rate: f64,
    leadership_rate: f64,
    delta: f64,
    kernel: KernelSpec,
}

impl EffectiveParams {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    /// Rate of velocity interactions (`mu / epsilon`).
    pub fn velocity_rate(&self) -> f64 {
        self.velocity_rate
    }
    /// Rate of leadership interactions (`eta / epsilon`).
    pub fn leadership_rate(&self) -> f64 {
        self.leadership_rate
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    /// Largest time step for which both Bernoulli acceptance probabilities
    /// stay in `[0, 1]`. Infinite when both rates vanish.
    pub fn max_consistent_dt(&self) -> f64 {
        let rate = self.velocity_rate.max(self.leadership_rate) * self.kernel.sup();
        if rate > 0.0 {
            1.0 / rate
        } else {
            f64::INFINITY
        }
    }
}
