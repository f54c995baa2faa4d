//! Momentum update: centred Burgers-type advection, nonlocal source and
//! artificial diffusion, stepped explicitly or with frozen coefficients.

use super::linear::bicgstab;
use super::{BoundaryConditions, HydroError};
use crate::model::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumMode {
    Explicit,
    /// Advecting velocity and source frozen at step `n`; derivative and
    /// diffusion terms taken at `n+1`. The components decouple.
    Implicit,
}

impl MomentumMode {
    pub fn name(&self) -> &'static str {
        match self {
            MomentumMode::Explicit => "explicit",
            MomentumMode::Implicit => "implicit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "explicit" => Some(MomentumMode::Explicit),
            "implicit" => Some(MomentumMode::Implicit),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumOptions {
    pub mode: MomentumMode,
    pub diffusion: f64,
    pub linear_tol: f64,
    pub max_iterations: usize,
}

impl Default for MomentumOptions {
    fn default() -> Self {
        Self {
            mode: MomentumMode::Implicit,
            diffusion: 0.0,
            linear_tol: 1e-10,
            max_iterations: 2000,
        }
    }
}

/// Per-cell stencil coefficients `(centre, east, west, north, south)`.
struct Coefficients {
    advect: [Vec<f64>; 2],
    diffuse: f64,
}

impl Coefficients {
    fn new(u: &[Vec<f64>; 2], grid: &Grid, dt: f64, diffusion: f64) -> Self {
        let [dx1, dx2] = grid.spacing();
        let two_d = grid.dim() == 2;
        let advect = [
            u[0].iter().map(|v| dt / (2.0 * dx1) * v).collect(),
            if two_d {
                u[1].iter().map(|v| dt / (2.0 * dx2) * v).collect()
            } else {
                vec![0.0; u[1].len()]
            },
        ];
        let diffuse = if two_d {
            diffusion * dt / (dx1 * dx2)
        } else {
            diffusion * dt / (dx1 * dx1)
        };
        Self { advect, diffuse }
    }
}

/// Advances both velocity components by one step.
///
/// Boundary-ring cells are set to the Dirichlet velocity.
pub fn step_momentum(
    u: &[Vec<f64>; 2],
    source: &[Vec<f64>; 2],
    grid: &Grid,
    dt: f64,
    bc: &BoundaryConditions,
    opts: &MomentumOptions,
) -> Result<[Vec<f64>; 2], HydroError> {
    if grid.dim() == 1 && opts.mode == MomentumMode::Implicit {
        let [dx, _] = grid.spacing();
        let x = implicit_1d(&u[0], &source[0], dt / (2.0 * dx), opts.diffusion * dt / (dx * dx), dt, bc.u[0]);
        return Ok([x, vec![0.0; grid.len()]]);
    }
    let coeff = Coefficients::new(u, grid, dt, opts.diffusion);
    let mut out = [vec![0.0; grid.len()], vec![0.0; grid.len()]];
    for k in 0..grid.dim() {
        out[k] = match opts.mode {
            MomentumMode::Explicit => explicit_component(&u[k], &source[k], grid, dt, bc.u[k], &coeff),
            MomentumMode::Implicit => {
                implicit_component(&u[k], &source[k], grid, dt, bc.u[k], &coeff, opts)?
            }
        };
    }
    Ok(out)
}

/// Thomas sweep for the 1D implicit step with coefficients formed on the fly;
/// the end cells are Dirichlet rows.
fn implicit_1d(w: &[f64], g: &[f64], a: f64, d: f64, dt: f64, boundary: f64) -> Vec<f64> {
    let n = w.len();
    let mut x = vec![boundary; n];
    if n < 3 {
        return x;
    }
    let mut c = vec![0.0; n];
    for i in 1..n - 1 {
        let adv = a * w[i];
        let (lower, upper) = (-adv - d, adv - d);
        let inv = 1.0 / (1.0 + 2.0 * d - lower * c[i - 1]);
        c[i] = upper * inv;
        x[i] = (w[i] + dt * g[i] - lower * x[i - 1]) * inv;
    }
    for i in (1..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

fn explicit_component(
    w: &[f64],
    g: &[f64],
    grid: &Grid,
    dt: f64,
    boundary: f64,
    c: &Coefficients,
) -> Vec<f64> {
    let [n1, _] = grid.cells();
    let two_d = grid.dim() == 2;
    let d = c.diffuse;
    (0..grid.len())
        .map(|idx| {
            let (i, j) = grid.coords(idx);
            if grid.is_boundary(i, j) {
                return boundary;
            }
            let (e, west) = (w[idx + 1], w[idx - 1]);
            let mut v = w[idx] - c.advect[0][idx] * (e - west) + dt * g[idx];
            let mut lap = e + west - 2.0 * w[idx];
            if two_d {
                let (n, s) = (w[idx + n1], w[idx - n1]);
                v -= c.advect[1][idx] * (n - s);
                lap += n + s - 2.0 * w[idx];
            }
            v + d * lap
        })
        .collect()
}

fn implicit_component(
    w: &[f64],
    g: &[f64],
    grid: &Grid,
    dt: f64,
    boundary: f64,
    c: &Coefficients,
    opts: &MomentumOptions,
) -> Result<Vec<f64>, HydroError> {
    let n = grid.len();
    let [n1, _] = grid.cells();
    let d = c.diffuse;
    let interior: Vec<bool> = (0..n)
        .map(|idx| {
            let (i, j) = grid.coords(idx);
            !grid.is_boundary(i, j)
        })
        .collect();
    let rhs: Vec<f64> = (0..n)
        .map(|idx| if interior[idx] { w[idx] + dt * g[idx] } else { boundary })
        .collect();
    let diag: Vec<f64> = interior
        .iter()
        .map(|&inner| if inner { 1.0 + 4.0 * d } else { 1.0 })
        .collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        for idx in 0..n {
            if !interior[idx] {
                out[idx] = x[idx];
                continue;
            }
            let (a1, a2) = (c.advect[0][idx], c.advect[1][idx]);
            out[idx] = (1.0 + 4.0 * d) * x[idx]
                + (a1 - d) * x[idx + 1]
                + (-a1 - d) * x[idx - 1]
                + (a2 - d) * x[idx + n1]
                + (-a2 - d) * x[idx - n1];
        }
    };
    let mut x = w.to_vec();
    for idx in 0..n {
        if !interior[idx] {
            x[idx] = boundary;
        }
    }
    bicgstab(apply, &diag, &rhs, &mut x, opts.linear_tol, opts.max_iterations)?;
    Ok(x)
}
