//! Binary interaction rules for a pair of agents.
//!
//! Velocities follow the repulsion/alignment/attraction rule applied
//! symmetrically to both partners. Leadership either flips (`binary`) or
//! relaxes by imitation plus a small neutral/opposition correction
//! (`generalized`).

use crate::model::EffectiveParams;

/// Pair distances below this are treated as coincident and skip repulsion.
pub const COINCIDENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeadershipRule {
    /// `λ' = 1 - λ`.
    Binary,
    /// `λ' = λ + ν(λ* - λ) + δ(1 - 2λ + ν(λ - λ*))`.
    Generalized,
}

impl LeadershipRule {
    pub fn name(&self) -> &'static str {
        match self {
            LeadershipRule::Binary => "binary",
            LeadershipRule::Generalized => "generalized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "binary" => Some(LeadershipRule::Binary),
            "generalized" => Some(LeadershipRule::Generalized),
            _ => None,
        }
    }
}

/// State of one agent as seen by the interaction rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent<const D: usize> {
    pub x: [f64; D],
    pub v: [f64; D],
    pub lambda: f64,
}

/// Post-interaction velocities of both partners.
///
/// Returns `None` in the third slot unless the pair was coincident, in which
/// case repulsion was skipped.
pub fn velocity_update<const D: usize>(
    a: &Agent<D>,
    b: &Agent<D>,
    eff: &EffectiveParams,
) -> ([f64; D], [f64; D], bool) {
    let mut d = [0.0; D]; // x_b - x_a
    let mut dist2 = 0.0;
    for k in 0..D {
        d[k] = b.x[k] - a.x[k];
        dist2 += d[k] * d[k];
    }
    let coincident = dist2.sqrt() < COINCIDENT_EPS;
    let rep = if coincident { 0.0 } else { eff.alpha() / dist2 };
    let fa = 1.0 - a.lambda;
    let fb = 1.0 - b.lambda;
    let mut va = a.v;
    let mut vb = b.v;
    for k in 0..D {
        let dv = b.v[k] - a.v[k];
        va[k] += -rep * d[k] + fa * (eff.beta() * dv + eff.gamma() * d[k]);
        vb[k] += rep * d[k] + fb * (-eff.beta() * dv - eff.gamma() * d[k]);
    }
    (va, vb, coincident)
}

/// Momentum-conserving alignment core of the velocity rule.
pub fn conservative_velocity_core<const D: usize>(
    v: [f64; D],
    vs: [f64; D],
    lambda: f64,
    lambda_s: f64,
    beta: f64,
) -> ([f64; D], [f64; D]) {
    let w = (1.0 - 0.5 * (lambda + lambda_s)) * beta;
    let mut a = v;
    let mut b = vs;
    for k in 0..D {
        let exchange = w * (vs[k] - v[k]);
        a[k] += exchange;
        b[k] -= exchange;
    }
    (a, b)
}

/// Leadership-conserving imitation core of the generalized rule.
pub fn conservative_leadership_core(lambda: f64, lambda_s: f64, nu: f64) -> (f64, f64) {
    let exchange = nu * (lambda_s - lambda);
    (lambda + exchange, lambda_s - exchange)
}

/// Leadership of both partners after an accepted event, before clamping.
pub fn leadership_update(
    rule: LeadershipRule,
    lambda: f64,
    lambda_s: f64,
    nu: f64,
    delta: f64,
) -> (f64, f64) {
    match rule {
        LeadershipRule::Binary => (1.0 - lambda, 1.0 - lambda_s),
        LeadershipRule::Generalized => {
            let (a, b) = conservative_leadership_core(lambda, lambda_s, nu);
            (
                a + delta * (1.0 - 2.0 * lambda + nu * (lambda - lambda_s)),
                b + delta * (1.0 - 2.0 * lambda_s + nu * (lambda_s - lambda)),
            )
        }
    }
}
