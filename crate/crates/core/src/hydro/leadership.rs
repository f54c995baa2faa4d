//! Semi-Lagrangian update of the mean leadership.

use crate::model::Grid;

/// Bilinear interpolation of a cell-centred field.
///
/// Interpolation nodes are the cell centres plus one ring of ghost nodes just
/// outside the domain that carry `bc_value`; points outside the domain
/// return `bc_value`. In 1D this reduces to linear interpolation.
pub fn bilinear_interpolate(field: &[f64], point: [f64; 2], grid: &Grid, bc_value: f64) -> f64 {
    if !grid.contains(point) {
        return bc_value;
    }
    let [dx1, dx2] = grid.spacing();
    interpolate_at_index(field, [point[0] / dx1 - 0.5, point[1] / dx2 - 0.5], grid, bc_value)
}

/// Interpolation at fractional node coordinates (`ξ = i` is the centre of
/// cell `i`). The caller guarantees the point lies in the domain.
fn interpolate_at_index(field: &[f64], xi: [f64; 2], grid: &Grid, bc_value: f64) -> f64 {
    let [n1, n2] = grid.cells();
    let bracket = |x: f64, n: usize| -> (isize, f64) {
        let i0 = (x.floor() as isize).clamp(-1, n as isize - 1);
        (i0, x - i0 as f64)
    };
    let node = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i as usize >= n1 || j as usize >= n2 {
            bc_value
        } else {
            field[grid.index(i as usize, j as usize)]
        }
    };
    let (i0, t) = bracket(xi[0], n1);
    if grid.dim() == 1 {
        if t == 0.0 {
            return node(i0, 0);
        }
        return (1.0 - t) * node(i0, 0) + t * node(i0 + 1, 0);
    }
    let (j0, s) = bracket(xi[1], n2);
    if t == 0.0 && s == 0.0 {
        return node(i0, j0);
    }
    (1.0 - t) * (1.0 - s) * node(i0, j0)
        + t * (1.0 - s) * node(i0 + 1, j0)
        + (1.0 - t) * s * node(i0, j0 + 1)
        + t * s * node(i0 + 1, j0 + 1)
}

/// `l⁺(x) = I[l](x - dt·u(x)) + dt·G_l(x)` at every cell centre.
///
/// The departure point is formed in cell units, so a zero velocity lands
/// exactly on the node.
pub fn step_leadership(
    l: &[f64],
    u: &[Vec<f64>; 2],
    source: &[f64],
    grid: &Grid,
    dt: f64,
    bc_value: f64,
) -> Vec<f64> {
    let [n1, n2] = grid.cells();
    let [dx1, dx2] = grid.spacing();
    let two_d = grid.dim() == 2;
    if !two_d {
        let hi = n1 as f64 - 0.5;
        let node = |i: isize| if i < 0 || i as usize >= n1 { bc_value } else { l[i as usize] };
        return (0..n1)
            .map(|i| {
                let xi = i as f64 - dt * u[0][i] / dx1;
                let value = if (-0.5..=hi).contains(&xi) {
                    let i0 = (xi.floor() as isize).clamp(-1, n1 as isize - 1);
                    let t = xi - i0 as f64;
                    if t == 0.0 {
                        node(i0)
                    } else {
                        (1.0 - t) * node(i0) + t * node(i0 + 1)
                    }
                } else {
                    bc_value
                };
                value + dt * source[i]
            })
            .collect();
    }
    (0..grid.len())
        .map(|idx| {
            let (i, j) = grid.coords(idx);
            let xi = i as f64 - dt * u[0][idx] / dx1;
            let xj = if two_d { j as f64 - dt * u[1][idx] / dx2 } else { 0.0 };
            let inside = (-0.5..=n1 as f64 - 0.5).contains(&xi)
                && (!two_d || (-0.5..=n2 as f64 - 0.5).contains(&xj));
            let value = if inside {
                interpolate_at_index(l, [xi, xj], grid, bc_value)
            } else {
                bc_value
            };
            value + dt * source[idx]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn affine(g: &Grid) -> Vec<f64> {
        (0..g.len())
            .map(|k| {
                let x = g.center_of(k);
                0.3 + 1.7 * x[0] - 0.9 * x[1]
            })
            .collect()
    }

    #[test]
    fn nodes_and_cell_corners() {
        let g = Grid::new_2d([1.0, 1.0], [4, 4]).unwrap();
        let f: Vec<f64> = (0..16).map(|k| (k * k) as f64).collect();
        assert_eq!(bilinear_interpolate(&f, g.center(2, 1), &g, -1.0), f[g.index(2, 1)]);
        let corner = bilinear_interpolate(&f, [0.5, 0.5], &g, -1.0);
        let mean = (f[g.index(1, 1)] + f[g.index(2, 1)] + f[g.index(1, 2)] + f[g.index(2, 2)]) / 4.0;
        assert!((corner - mean).abs() < 1e-13);
        assert_eq!(bilinear_interpolate(&f, [1.2, 0.5], &g, -1.0), -1.0);
    }

    #[test]
    fn constant_reproduced_everywhere_inside() {
        let g = Grid::new_2d([2.0, 1.0], [8, 5]).unwrap();
        let f = vec![0.42; g.len()];
        for p in [[0.01, 0.01], [1.99, 0.5], [1.0, 0.99], [0.7, 0.33]] {
            assert!((bilinear_interpolate(&f, p, &g, 0.42) - 0.42).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_field_advected_exactly() {
        let g = Grid::new_2d([1.0, 1.0], [20, 20]).unwrap();
        let n = g.len();
        let l: Vec<f64> = (0..n).map(|k| g.center_of(k)[0]).collect();
        let u = [vec![0.13; n], vec![-0.07; n]];
        let dt = 0.1;
        let out = step_leadership(&l, &u, &vec![0.0; n], &g, dt, 0.0);
        for i in 1..19 {
            for j in 1..19 {
                let idx = g.index(i, j);
                assert!((out[idx] - (g.center(i, j)[0] - dt * 0.13)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn zero_velocity_and_source_is_identity() {
        let g = Grid::new_1d(1.0, 30).unwrap();
        let l: Vec<f64> = (0..30).map(|k| (k as f64 * 0.2).cos().abs()).collect();
        let out = step_leadership(&l, &[vec![0.0; 30], vec![0.0; 30]], &[0.0; 30], &g, 0.3, 1.0);
        assert_eq!(out, l);
    }

    proptest! {
        #[test]
        fn affine_fields_interpolated_exactly(px in 0.5f64..9.5, py in 0.5f64..5.5) {
            let g = Grid::new_2d([10.0, 6.0], [10, 6]).unwrap();
            let f = affine(&g);
            let want = 0.3 + 1.7 * px - 0.9 * py;
            prop_assert!((bilinear_interpolate(&f, [px, py], &g, 0.0) - want).abs() < 1e-13);
        }

        #[test]
        fn max_principle(seed in 0u64..1000, dt in 0.0f64..0.05) {
            let g = Grid::new_2d([1.0, 1.0], [12, 12]).unwrap();
            let n = g.len();
            let h = |k: usize, m: u64| (((k as u64 + 1) * (seed + m) * 2654435761) % 1000) as f64 / 1000.0;
            let l: Vec<f64> = (0..n).map(|k| h(k, 1)).collect();
            let u = [(0..n).map(|k| h(k, 2) - 0.5).collect(), (0..n).map(|k| h(k, 3) - 0.5).collect()];
            let bc = 0.5;
            let lo = l.iter().copied().fold(bc, f64::min);
            let hi = l.iter().copied().fold(bc, f64::max);
            let out = step_leadership(&l, &u, &vec![0.0; n], &g, dt, bc);
            prop_assert!(out.iter().all(|&v| v >= lo - 1e-15 && v <= hi + 1e-15));
        }
    }
}
