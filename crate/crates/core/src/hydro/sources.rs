//! Nonlocal interaction sources of the momentum and leadership equations.
//!
//! [`nonlocal_source_velocity`] and [`nonlocal_source_leadership`] sum the
//! stencil directly. [`SourceEvaluator`] computes the same quadrature with
//! row prefix sums for the bilinear terms and paired taps for the odd ones,
//! which is what the time loop uses.

use rayon::prelude::*;

use super::stencil::Stencil;
use crate::model::{Grid, MacroState, ModelParams};

fn neighbour(grid: &Grid, i: usize, j: usize, offset: [isize; 2]) -> Option<usize> {
    let [n1, n2] = grid.cells();
    let ii = i as isize + offset[0];
    let jj = j as isize + offset[1];
    (ii >= 0 && jj >= 0 && (ii as usize) < n1 && (jj as usize) < n2)
        .then(|| grid.index(ii as usize, jj as usize))
}

/// Velocity source `G_u`, one vector per cell.
///
/// The self cell is skipped for the repulsion term only; cells outside the
/// domain carry no mass.
pub fn nonlocal_source_velocity(
    state: &MacroState,
    params: &ModelParams,
    grid: &Grid,
    stencil: &Stencil,
) -> [Vec<f64>; 2] {
    let n = grid.len();
    let mut out = [vec![0.0; n], vec![0.0; n]];
    let dim = grid.dim();
    for idx in 0..n {
        let (i, j) = grid.coords(idx);
        let l = state.l[idx];
        let u = [state.u[0][idx], state.u[1][idx]];
        let mut acc = [0.0; 2];
        for e in stencil.entries() {
            let Some(s) = neighbour(grid, i, j, e.offset) else {
                continue;
            };
            let rho = state.rho[s];
            if rho == 0.0 {
                continue;
            }
            let d = e.displacement;
            let d2 = d[0] * d[0] + d[1] * d[1];
            let self_cell = e.offset == [0, 0];
            for k in 0..dim {
                let align = 0.5 * (state.l[s] - l) * params.beta0 * (state.u[k][s] - u[k]);
                let rep = if self_cell { 0.0 } else { -params.alpha0 * d[k] / d2 };
                let attr = params.gamma0 * (1.0 - l) * d[k];
                acc[k] += e.weight * rho * (align + rep + attr);
            }
        }
        for k in 0..dim {
            out[k][idx] = params.mu * acc[k];
        }
    }
    out
}

/// Leadership source `G_l`, one scalar per cell.
pub fn nonlocal_source_leadership(
    state: &MacroState,
    params: &ModelParams,
    grid: &Grid,
    stencil: &Stencil,
) -> Vec<f64> {
    let n = grid.len();
    let mut out = vec![0.0; n];
    for (idx, o) in out.iter_mut().enumerate() {
        let (i, j) = grid.coords(idx);
        let l = state.l[idx];
        let mut acc = 0.0;
        for e in stencil.entries() {
            if let Some(s) = neighbour(grid, i, j, e.offset) {
                acc += e.weight * state.rho[s] * (1.0 - 2.0 * l + params.nu * (l - state.l[s]));
            }
        }
        *o = params.eta * acc;
    }
    out
}

/// One half-stencil tap: flat offset in the padded layout and the
/// coefficients of `ρ(x+d) - ρ(x-d)` in the repulsion and attraction sums.
#[derive(Debug, Clone, Copy)]
struct Tap {
    offset: usize,
    rep: [f64; 2],
    attr: [f64; 2],
}

/// Reusable fast evaluator of both sources on a fixed grid.
///
/// Fields are copied into zero-padded buffers so that every stencil access
/// stays in bounds; row prefix sums of the padded fields give the box sums
/// over each stencil row in constant time.
#[derive(Debug, Clone)]
pub struct SourceEvaluator {
    grid: Grid,
    params: ModelParams,
    stencil: Stencil,
    pad: [usize; 2],
    width: usize,
    height: usize,
    taps: Vec<Tap>,
    /// Padded `ρ`.
    rho: Vec<f64>,
    /// Row prefix sums of `ρ, ρl, ρu₁, ρu₂, ρlu₁, ρlu₂`, `width + 1` per row.
    prefix: Vec<[f64; 6]>,
    weight: Option<f64>,
}

impl SourceEvaluator {
    pub fn new(grid: &Grid, params: &ModelParams) -> Self {
        let stencil = Stencil::new(grid, &params.kernel());
        let mut pad = [0usize; 2];
        for e in stencil.entries() {
            pad[0] = pad[0].max(e.offset[0].unsigned_abs());
            pad[1] = pad[1].max(e.offset[1].unsigned_abs());
        }
        let [n1, n2] = grid.cells();
        let width = n1 + 2 * pad[0];
        let height = n2 + 2 * pad[1];
        let taps = stencil
            .half()
            .map(|e| {
                let d = e.displacement;
                let d2 = d[0] * d[0] + d[1] * d[1];
                let w = e.weight;
                Tap {
                    offset: (e.offset[1] * width as isize + e.offset[0]) as usize,
                    rep: [-w * d[0] / d2, -w * d[1] / d2],
                    attr: [w * d[0], w * d[1]],
                }
            })
            .collect();
        let weight = stencil.uniform_weight();
        let plen = height * (width + 1);
        Self {
            grid: *grid,
            params: *params,
            stencil,
            pad,
            width,
            height,
            taps,
            rho: vec![0.0; width * height],
            prefix: vec![[0.0; 6]; plen],
            weight,
        }
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Writes `G_u` into `gu` and `G_l` into `gl`.
    pub fn evaluate(&mut self, state: &MacroState, gu: &mut [Vec<f64>; 2], gl: &mut [f64]) {
        let Some(w) = self.weight else {
            *gu = nonlocal_source_velocity(state, &self.params, &self.grid, &self.stencil);
            gl.copy_from_slice(&nonlocal_source_leadership(
                state,
                &self.params,
                &self.grid,
                &self.stencil,
            ));
            return;
        };
        self.load(state);
        let [n1, _] = self.grid.cells();
        let dim = self.grid.dim();
        let p = self.params;
        if dim == 1 {
            self.evaluate_1d(state, w, &mut gu[0], gl);
            gu[1].fill(0.0);
            return;
        }
        let this = &*self;
        let [gu0, gu1] = gu;
        gu0.par_chunks_mut(n1)
            .zip(gu1.par_chunks_mut(n1))
            .zip(gl.par_chunks_mut(n1))
            .enumerate()
            .for_each(|(j, ((g0, g1), gl_row))| {
                let mut sums = [0.0; 6];
                for i in 0..n1 {
                    let idx = j * n1 + i;
                    this.box_sums(i, j, &mut sums);
                    for s in sums.iter_mut() {
                        *s *= w;
                    }
                    let [s_rho, s_rl, s_ru0, s_ru1, s_rlu0, s_rlu1] = sums;
                    let l = state.l[idx];
                    let u = [state.u[0][idx], state.u[1][idx]];
                    let (rep, attr) = this.odd_sums(i, j);
                    let align = |k: usize, s_ru: f64, s_rlu: f64| {
                        0.5 * p.beta0 * ((s_rlu - l * s_ru) + u[k] * (l * s_rho - s_rl))
                    };
                    g0[i] = p.mu
                        * (align(0, s_ru0, s_rlu0)
                            + p.alpha0 * rep[0]
                            + p.gamma0 * (1.0 - l) * attr[0]);
                    g1[i] = if dim == 2 {
                        p.mu * (align(1, s_ru1, s_rlu1)
                            + p.alpha0 * rep[1]
                            + p.gamma0 * (1.0 - l) * attr[1])
                    } else {
                        0.0
                    };
                    gl_row[i] =
                        p.eta * ((1.0 - 2.0 * l + p.nu * l) * s_rho - p.nu * s_rl);
                }
            });
    }

    fn evaluate_1d(&self, state: &MacroState, w: f64, gu: &mut [f64], gl: &mut [f64]) {
        let p = self.params;
        let pad = self.pad[0];
        let m = self.stencil.rows()[0].1 as usize;
        let taps: Vec<(usize, f64, f64)> = self.taps.iter().map(|t| (t.offset, t.rep[0], t.attr[0])).collect();
        for i in 0..gu.len() {
            let ip = i + pad;
            let (a, b) = (&self.prefix[ip + m + 1], &self.prefix[ip - m]);
            let s_rho = w * (a[0] - b[0]);
            let s_rl = w * (a[1] - b[1]);
            let s_ru = w * (a[2] - b[2]);
            let s_rlu = w * (a[4] - b[4]);
            let (mut rep, mut attr) = (0.0, 0.0);
            for &(off, r, at) in &taps {
                let diff = self.rho[ip + off] - self.rho[ip - off];
                rep += r * diff;
                attr += at * diff;
            }
            let l = state.l[i];
            let u = state.u[0][i];
            let align = 0.5 * p.beta0 * ((s_rlu - l * s_ru) + u * (l * s_rho - s_rl));
            gu[i] = p.mu * (align + p.alpha0 * rep + p.gamma0 * (1.0 - l) * attr);
            gl[i] = p.eta * ((1.0 - 2.0 * l + p.nu * l) * s_rho - p.nu * s_rl);
        }
    }

    fn load(&mut self, state: &MacroState) {
        let [n1, n2] = self.grid.cells();
        let (w, pad) = (self.width, self.pad);
        self.rho.fill(0.0);
        for jp in 0..self.height {
            let base = jp * (w + 1);
            let row = &mut self.prefix[base..base + w + 1];
            row[0] = [0.0; 6];
            let mut run = [0.0; 6];
            let inside = jp >= pad[1] && jp < pad[1] + n2;
            if inside {
                let start = (jp - pad[1]) * n1;
                let rho = &state.rho[start..start + n1];
                let l = &state.l[start..start + n1];
                let u0 = &state.u[0][start..start + n1];
                let u1 = &state.u[1][start..start + n1];
                self.rho[jp * w + pad[0]..jp * w + pad[0] + n1].copy_from_slice(rho);
                for i in 0..n1 {
                    let r = rho[i];
                    let rl = r * l[i];
                    run[0] += r;
                    run[1] += rl;
                    run[2] += r * u0[i];
                    run[3] += r * u1[i];
                    run[4] += rl * u0[i];
                    run[5] += rl * u1[i];
                    row[pad[0] + i + 1] = run;
                }
            }
            for ip in 0..pad[0] {
                row[ip + 1] = [0.0; 6];
                row[pad[0] + n1 + ip + 1] = run;
            }
            if !inside {
                row[pad[0] + 1..pad[0] + n1 + 1].fill([0.0; 6]);
            }
        }
    }

    /// Unweighted sums of the six products over the stencil around `(i, j)`.
    #[inline]
    fn box_sums(&self, i: usize, j: usize, out: &mut [f64; 6]) {
        *out = [0.0; 6];
        let ip = i + self.pad[0];
        for &(s, m) in self.stencil.rows() {
            let jp = (j + self.pad[1]) as isize + s;
            let base = jp as usize * (self.width + 1);
            let lo = base + ip - m as usize;
            let hi = base + ip + m as usize + 1;
            let (a, b) = (&self.prefix[hi], &self.prefix[lo]);
            for f in 0..6 {
                out[f] += a[f] - b[f];
            }
        }
    }

    /// Weighted repulsion and attraction sums over the paired taps.
    #[inline]
    fn odd_sums(&self, i: usize, j: usize) -> ([f64; 2], [f64; 2]) {
        let c = (j + self.pad[1]) * self.width + i + self.pad[0];
        let mut rep = [0.0; 2];
        let mut attr = [0.0; 2];
        for t in &self.taps {
            let diff = self.rho[c + t.offset] - self.rho[c - t.offset];
            if diff != 0.0 {
                rep[0] += t.rep[0] * diff;
                rep[1] += t.rep[1] * diff;
                attr[0] += t.attr[0] * diff;
                attr[1] += t.attr[1] * diff;
            }
        }
        (rep, attr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::KernelSpec;

    fn params_1d() -> ModelParams {
        ModelParams {
            alpha0: 0.01,
            beta0: 0.5,
            gamma0: 1.0,
            nu: 0.8,
            mu: 1.0,
            eta: 1.0,
            radius: 0.02,
            epsilon: 1e-3,
            diffusion: 0.0,
        }
    }

    #[test]
    fn single_neighbour_hand_quadrature() {
        let g = Grid::new_1d(1.0, 100).unwrap();
        let p = ModelParams {
            radius: 0.015,
            ..params_1d()
        };
        let st = Stencil::new(&g, &p.kernel());
        let mut s = MacroState::zeros(&g);
        s.rho[51] = 1.0;
        let gu = nonlocal_source_velocity(&s, &p, &g, &st);
        assert!((gu[0][50] + 0.0099).abs() < 1e-15, "{}", gu[0][50]);
        let mut ev = SourceEvaluator::new(&g, &p);
        let mut fast = [vec![0.0; 100], vec![0.0; 100]];
        let mut gl = vec![0.0; 100];
        ev.evaluate(&s, &mut fast, &mut gl);
        assert!((fast[0][50] + 0.0099).abs() < 1e-15, "{}", fast[0][50]);
    }

    #[test]
    fn follower_leadership_source_on_uniform_density() {
        let g = Grid::new_1d(1.0, 400).unwrap();
        let p = params_1d();
        let st = Stencil::new(&g, &p.kernel());
        let s = MacroState::from_fn(&g, |_| 1.0, |_| [0.0; 2], |_| 0.0);
        let gl = nonlocal_source_leadership(&s, &p, &g, &st);
        assert!((gl[200] - 0.04).abs() <= g.spacing()[0] * (1.0 + 1e-9), "{}", gl[200]);
        assert!((gl[200] - st.total_weight()).abs() < 1e-15);
    }

    #[test]
    fn fixed_points_and_vacuum() {
        let g = Grid::new_2d([1.0, 1.0], [30, 30]).unwrap();
        let p = ModelParams {
            radius: 0.12,
            ..params_1d()
        };
        let st = Stencil::new(&g, &p.kernel());
        let blob = |x: [f64; 2]| (-((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)) / 0.02).exp();
        let half = MacroState::from_fn(&g, blob, |x| [x[1], -x[0]], |_| 0.5);
        assert!(nonlocal_source_leadership(&half, &p, &g, &st).iter().all(|&v| v == 0.0));
        let vac = MacroState::from_fn(&g, |_| 0.0, |x| [x[0], 1.0], |x| x[1]);
        assert!(nonlocal_source_leadership(&vac, &p, &g, &st).iter().all(|&v| v == 0.0));

        // l ≡ 1 with u constant and no repulsion leaves nothing.
        let leaders = MacroState::from_fn(&g, blob, |_| [0.3, -0.2], |_| 1.0);
        let q = ModelParams { alpha0: 0.0, ..p };
        let gu = nonlocal_source_velocity(&leaders, &q, &g, &st);
        assert!(gu.iter().flatten().all(|&v| v == 0.0));
        let mut ev = SourceEvaluator::new(&g, &q);
        let mut fast = [vec![1.0; g.len()], vec![1.0; g.len()]];
        let mut gl = vec![0.0; g.len()];
        ev.evaluate(&leaders, &mut fast, &mut gl);
        assert!(fast.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_state_on_interior_stencil_has_no_velocity_source() {
        let g = Grid::new_2d([1.0, 1.0], [40, 40]).unwrap();
        let p = ModelParams {
            radius: 0.1,
            ..params_1d()
        };
        let st = Stencil::new(&g, &KernelSpec::indicator(0.1));
        let s = MacroState::from_fn(&g, |_| 0.7, |_| [0.2, -0.4], |_| 0.3);
        let gu = nonlocal_source_velocity(&s, &p, &g, &st);
        let idx = g.index(20, 20);
        assert!(gu[0][idx].abs() < 1e-12 && gu[1][idx].abs() < 1e-12);
    }

    #[test]
    fn fast_matches_direct() {
        for (g, radius) in [
            (Grid::new_1d(1.0, 120).unwrap(), 0.05),
            (Grid::new_2d([1.0, 1.0], [36, 36]).unwrap(), 0.17),
            (Grid::new_2d([2.0, 1.0], [40, 25]).unwrap(), 0.21),
        ] {
            let p = ModelParams {
                radius,
                ..params_1d()
            };
            let s = MacroState::from_fn(
                &g,
                |x| 1.0 + (3.0 * x[0]).sin() * (2.0 * x[1]).cos(),
                |x| [x[0] * x[1] - 0.3, (x[0] - x[1]).sin()],
                |x| 0.5 + 0.4 * (5.0 * x[0] + x[1]).cos(),
            );
            let st = Stencil::new(&g, &p.kernel());
            let gu = nonlocal_source_velocity(&s, &p, &g, &st);
            let gl = nonlocal_source_leadership(&s, &p, &g, &st);
            let mut ev = SourceEvaluator::new(&g, &p);
            let mut fu = [vec![0.0; g.len()], vec![0.0; g.len()]];
            let mut fl = vec![0.0; g.len()];
            ev.evaluate(&s, &mut fu, &mut fl);
            for idx in 0..g.len() {
                for k in 0..2 {
                    assert!((gu[k][idx] - fu[k][idx]).abs() < 1e-10, "{k} {idx}");
                }
                assert!((gl[idx] - fl[idx]).abs() < 1e-12, "{idx}");
            }
        }
    }

    #[test]
    fn odd_terms_cancel_for_symmetric_density() {
        let g = Grid::new_2d([1.0, 1.0], [41, 41]).unwrap();
        let p = ModelParams {
            radius: 0.1,
            beta0: 0.0,
            ..params_1d()
        };
        let st = Stencil::new(&g, &p.kernel());
        let s = MacroState::from_fn(
            &g,
            |x| (-((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)) / 0.01).exp(),
            |_| [0.0; 2],
            |_| 0.25,
        );
        let gu = nonlocal_source_velocity(&s, &p, &g, &st);
        let c = g.index(20, 20);
        assert!(gu[0][c].abs() <= 1e-12 && gu[1][c].abs() <= 1e-12);
    }
}
