//! Linear solvers for the implicit momentum step.

use super::HydroError;

/// Solves a tridiagonal system in place by the Thomas algorithm.
///
/// `lower[i]` multiplies `x[i-1]` and `upper[i]` multiplies `x[i+1]`; the
/// first entry of `lower` and the last of `upper` are ignored. `rhs` is
/// overwritten with the solution.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    let mut c = vec![0.0; n];
    let mut inv = 1.0 / diag[0];
    c[0] = if n > 1 { upper[0] * inv } else { 0.0 };
    rhs[0] *= inv;
    for i in 1..n {
        inv = 1.0 / (diag[i] - lower[i] * c[i - 1]);
        if i + 1 < n {
            c[i] = upper[i] * inv;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) * inv;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    /// Final residual relative to `‖b‖`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGSTAB for `A x = b`, with `A` given as a
/// matrix-free product `apply(v, out)` and its diagonal.
///
/// `x` holds the initial guess on entry. Converges when `‖b - Ax‖ ≤ tol·‖b‖`.
pub fn bicgstab<F>(
    apply: F,
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveStats, HydroError>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return Ok(SolveStats {
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut r = vec![0.0; n];
    apply(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut rel = norm(&r) / bnorm;
    if rel <= tol {
        return Ok(SolveStats {
            iterations: 0,
            residual: rel,
        });
    }
    let r0 = r.clone();
    let mut p = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut t = vec![0.0; n];
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    for it in 1..=max_iter {
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 || omega == 0.0 {
            break;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for k in 0..n {
            p[k] = r[k] + beta * (p[k] - omega * v[k]);
            y[k] = p[k] / diag[k];
        }
        apply(&y, &mut v);
        alpha = rho / dot(&r0, &v);
        // r becomes s
        for k in 0..n {
            r[k] -= alpha * v[k];
        }
        if norm(&r) / bnorm <= tol {
            for k in 0..n {
                x[k] += alpha * y[k];
            }
            return Ok(SolveStats {
                iterations: it,
                residual: norm(&r) / bnorm,
            });
        }
        for k in 0..n {
            z[k] = r[k] / diag[k];
        }
        apply(&z, &mut t);
        let tt = dot(&t, &t);
        omega = if tt > 0.0 { dot(&t, &r) / tt } else { 0.0 };
        for k in 0..n {
            x[k] += alpha * y[k] + omega * z[k];
            r[k] -= omega * t[k];
        }
        rel = norm(&r) / bnorm;
        if rel <= tol {
            return Ok(SolveStats {
                iterations: it,
                residual: rel,
            });
        }
    }
    Err(HydroError::LinearSolver {
        iterations: max_iter,
        residual: rel,
        tol,
    })
}
