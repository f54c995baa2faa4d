use super::grid::Grid;

/// Macroscopic fields collocated at cell centres.
///
/// `rho` is a cell mean, `u[k]` the k-th velocity component and `l` the mean
/// degree of leadership. In 1D `u[1]` is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroState {
    pub time: f64,
    pub rho: Vec<f64>,
    pub u: [Vec<f64>; 2],
    pub l: Vec<f64>,
}

impl MacroState {
    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.len();
        Self {
            time: 0.0,
            rho: vec![0.0; n],
            u: [vec![0.0; n], vec![0.0; n]],
            l: vec![0.0; n],
        }
    }

    /// Samples the three fields at the cell centres.
    pub fn from_fn<R, U, L>(grid: &Grid, rho: R, u: U, l: L) -> Self
    where
        R: Fn([f64; 2]) -> f64,
        U: Fn([f64; 2]) -> [f64; 2],
        L: Fn([f64; 2]) -> f64,
    {
        let mut s = Self::zeros(grid);
        for idx in 0..grid.len() {
            let x = grid.center_of(idx);
            s.rho[idx] = rho(x);
            let v = u(x);
            s.u[0][idx] = v[0];
            s.u[1][idx] = if grid.dim() == 2 { v[1] } else { 0.0 };
            s.l[idx] = l(x);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Index of the first non-finite entry in any field.
    pub fn first_non_finite(&self) -> Option<usize> {
        let bad = |v: &Vec<f64>| v.iter().position(|x| !x.is_finite());
        [&self.rho, &self.u[0], &self.u[1], &self.l]
            .into_iter()
            .filter_map(bad)
            .min()
    }

    pub fn min_density(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Discrete mass `Σ ρ · cell area`.
    pub fn mass(&self, grid: &Grid) -> f64 {
        self.rho.iter().sum::<f64>() * grid.cell_area()
    }

    /// Momentum density `ρ u_k`.
    pub fn momentum(&self, axis: usize) -> Vec<f64> {
        self.rho.iter().zip(&self.u[axis]).map(|(r, u)| r * u).collect()
    }

    /// Leadership density `ρ l`.
    pub fn leadership_density(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.l).map(|(r, l)| r * l).collect()
    }

    /// Number of cells whose leadership leaves `[-tol, 1 + tol]`.
    pub fn leadership_out_of_range(&self, tol: f64) -> usize {
        self.l
            .iter()
            .filter(|&&l| l < -tol || l > 1.0 + tol)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_and_moments() {
        let g = Grid::new_1d(1.0, 4).unwrap();
        let s = MacroState::from_fn(&g, |x| x[0], |_| [2.0, 7.0], |_| 0.5);
        assert_eq!(s.rho, vec![0.125, 0.375, 0.625, 0.875]);
        assert!(s.u[1].iter().all(|&v| v == 0.0));
        assert_eq!(s.momentum(0)[1], 0.75);
        assert_eq!(s.leadership_density()[3], 0.4375);
        assert!((s.mass(&g) - 0.5).abs() < 1e-15);
        assert_eq!(s.first_non_finite(), None);
        let mut t = s.clone();
        t.l[2] = f64::NAN;
        assert_eq!(t.first_non_finite(), Some(2));
        t.l[2] = 1.5;
        assert_eq!(t.leadership_out_of_range(1e-6), 1);
    }
}
