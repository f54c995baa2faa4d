//! Push-forward transport of the density.
//!
//! Each cell moves its mass rigidly by `X = dt·u`; the displaced cell
//! overlaps at most its neighbours, and the overlap lengths `Γ` split the
//! mass among them. Under the CFL bound every weight is non-negative and the
//! update is conservative.

use super::{BoundaryConditions, HydroError};
use crate::model::Grid;

/// Largest componentwise speed, `max max(|u¹|, |u²|)`.
pub fn max_speed(u: &[Vec<f64>; 2], grid: &Grid) -> f64 {
    let mut m = u[0].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if grid.dim() == 2 {
        m = u[1].iter().fold(m, |a, v| a.max(v.abs()));
    }
    m
}

/// Whether `dt·max|u| ≤ min Δx`.
pub fn cfl_check(u: &[Vec<f64>; 2], grid: &Grid, dt: f64) -> bool {
    dt * max_speed(u, grid) <= grid.min_spacing()
}

/// `(X⁻, Δx - |X|, X⁺) / Δx`: fractions sent to the left neighbour, kept,
/// and sent to the right neighbour.
#[inline]
fn gamma(x: f64, dx: f64) -> [f64; 3] {
    let c = x / dx;
    [(-c).max(0.0), 1.0 - c.abs(), c.max(0.0)]
}

/// Advances `rho` by one push-forward step.
///
/// Ghost cells just outside the domain carry the Dirichlet data and push
/// their own mass in; mass leaving the domain is lost.
pub fn step_density(
    rho: &[f64],
    u: &[Vec<f64>; 2],
    grid: &Grid,
    dt: f64,
    bc: &BoundaryConditions,
) -> Result<Vec<f64>, HydroError> {
    let mut out = vec![0.0; grid.len()];
    step_density_into(rho, u, grid, dt, bc, &mut out)?;
    Ok(out)
}

pub(crate) fn step_density_into(
    rho: &[f64],
    u: &[Vec<f64>; 2],
    grid: &Grid,
    dt: f64,
    bc: &BoundaryConditions,
    out: &mut [f64],
) -> Result<(), HydroError> {
    if !cfl_check(u, grid, dt) {
        return Err(HydroError::Cfl {
            step: 0,
            displacement: dt * max_speed(u, grid),
            dx: grid.min_spacing(),
        });
    }
    let [n1, n2] = grid.cells();
    let [dx1, dx2] = grid.spacing();
    let two_d = grid.dim() == 2;
    out.fill(0.0);
    if !two_d {
        let n = n1 as isize;
        for r in -1..=n {
            let (m, v) = if r >= 0 && r < n {
                (rho[r as usize], u[0][r as usize])
            } else {
                (bc.rho, bc.u[0])
            };
            if m == 0.0 {
                continue;
            }
            for (a, &w) in gamma(dt * v, dx1).iter().enumerate() {
                let i = r + a as isize - 1;
                if w != 0.0 && i >= 0 && i < n {
                    out[i as usize] += m * w;
                }
            }
        }
        return Ok(());
    }
    let (slo, shi) = if two_d { (-1, n2 as isize) } else { (0, 0) };
    for s in slo..=shi {
        for r in -1..=n1 as isize {
            let inside = r >= 0 && s >= 0 && (r as usize) < n1 && (s as usize) < n2;
            let (m, v) = if inside {
                let idx = grid.index(r as usize, s as usize);
                (rho[idx], [u[0][idx], u[1][idx]])
            } else {
                (bc.rho, bc.u)
            };
            if m == 0.0 {
                continue;
            }
            let g1 = gamma(dt * v[0], dx1);
            let g2 = if two_d { gamma(dt * v[1], dx2) } else { [0.0, 1.0, 0.0] };
            for (b, &w2) in g2.iter().enumerate() {
                let j = s + b as isize - 1;
                if w2 == 0.0 || j < 0 || j as usize >= n2 {
                    continue;
                }
                for (a, &w1) in g1.iter().enumerate() {
                    let i = r + a as isize - 1;
                    if w1 == 0.0 || i < 0 || i as usize >= n1 {
                        continue;
                    }
                    out[grid.index(i as usize, j as usize)] += m * w1 * w2;
                }
            }
        }
    }
    Ok(())
}
