//! Precomputed quadrature stencil for the nonlocal integrals.
//!
//! Each entry is a cell offset whose centre lies within the kernel radius,
//! weighted by the full cell area (first-order quadrature; cells cut by the
//! ball boundary are not trimmed).

use crate::model::{Grid, KernelSpec};

/// Relative slack on the radius test so that offsets lying on the circle up
/// to rounding are kept.
const RADIUS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilEntry {
    /// Cell offset `(r, s)`.
    pub offset: [isize; 2],
    /// `x* - x` for this offset.
    pub displacement: [f64; 2],
    /// `B(|x* - x|) · cell area`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    entries: Vec<StencilEntry>,
    /// `(s, m)`: row offset `s` covers `r ∈ [-m, m]`.
    rows: Vec<(isize, isize)>,
    /// Indices of entries with a strictly positive offset in lexicographic
    /// order; with their negations they tile the stencil minus the origin.
    half: Vec<usize>,
}

impl Stencil {
    pub fn new(grid: &Grid, kernel: &KernelSpec) -> Self {
        let [dx1, dx2] = grid.spacing();
        let limit = kernel.radius * (1.0 + RADIUS_SLACK);
        let reach1 = (limit / dx1).floor() as isize;
        let reach2 = if grid.dim() == 2 {
            (limit / dx2).floor() as isize
        } else {
            0
        };
        let area = grid.cell_area();
        let mut entries = Vec::new();
        let mut rows = Vec::new();
        for s in -reach2..=reach2 {
            let mut row_max = -1;
            for r in -reach1..=reach1 {
                let d = [r as f64 * dx1, if grid.dim() == 2 { s as f64 * dx2 } else { 0.0 }];
                let dist = (d[0] * d[0] + d[1] * d[1]).sqrt();
                if dist > limit {
                    continue;
                }
                row_max = row_max.max(r);
                entries.push(StencilEntry {
                    offset: [r, s],
                    displacement: d,
                    weight: kernel.at_distance(dist.min(kernel.radius)) * area,
                });
            }
            if row_max >= 0 {
                rows.push((s, row_max));
            }
        }
        let half = entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.offset[1] > 0 || (e.offset[1] == 0 && e.offset[0] > 0))
            .map(|(k, _)| k)
            .collect();
        Self {
            entries,
            rows,
            half,
        }
    }

    pub fn entries(&self) -> &[StencilEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn rows(&self) -> &[(isize, isize)] {
        &self.rows
    }

    pub(crate) fn half(&self) -> impl Iterator<Item = &StencilEntry> {
        self.half.iter().map(|&k| &self.entries[k])
    }

    /// Whether every entry carries the same weight, which lets the solver use
    /// row prefix sums.
    pub(crate) fn uniform_weight(&self) -> Option<f64> {
        let w = self.entries.first()?.weight;
        self.entries.iter().all(|e| e.weight == w).then_some(w)
    }

    /// Quadrature of the kernel itself, `Σ weights ≈ ∫ B`.
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_span() {
        let g = Grid::new_1d(50.0, 20_000).unwrap();
        let st = Stencil::new(&g, &KernelSpec::indicator(0.02));
        assert_eq!(st.len(), 17);
        assert_eq!(st.half().count(), 8);
        assert!((st.total_weight() - 17.0 * 0.0025).abs() < 1e-15);
    }

    #[test]
    fn contains_origin_and_is_symmetric() {
        for (extent, cells, r) in [
            ([2.0, 2.0], [80, 80], 0.3),
            ([1.0, 1.0], [50, 50], 0.25),
            ([1.0, 0.5], [40, 25], 0.13),
        ] {
            let g = Grid::new_2d(extent, cells).unwrap();
            let st = Stencil::new(&g, &KernelSpec::indicator(r));
            let offsets: Vec<_> = st.entries().iter().map(|e| e.offset).collect();
            assert!(offsets.contains(&[0, 0]));
            for o in &offsets {
                assert!(offsets.contains(&[-o[0], -o[1]]), "{o:?}");
            }
            assert_eq!(2 * st.half().count() + 1, st.len());
            let from_rows: isize = st.rows().iter().map(|&(_, m)| 2 * m + 1).sum();
            assert_eq!(from_rows as usize, st.len());
        }
    }

    #[test]
    fn boundary_offsets_on_the_circle_are_kept() {
        // R/Δx = 12 exactly in exact arithmetic, not in floating point.
        let g = Grid::new_2d([2.0, 2.0], [80, 80]).unwrap();
        let st = Stencil::new(&g, &KernelSpec::indicator(0.3));
        let offsets: Vec<_> = st.entries().iter().map(|e| e.offset).collect();
        assert!(offsets.contains(&[12, 0]) && offsets.contains(&[0, -12]));
    }

    #[test]
    fn zeroth_moment_within_boundary_cell_error() {
        for (dim, r, dx) in [(1, 0.02, 0.0025), (1, 0.3, 0.07), (2, 0.3, 0.025), (2, 0.25, 0.02), (2, 0.4, 0.01)] {
            let g = Grid::from_spacing(dim, [4.0, 4.0], dx).unwrap();
            let k = KernelSpec::indicator(r);
            let st = Stencil::new(&g, &k);
            let exact = k.moment(0, dim).unwrap();
            let rel = (st.total_weight() - exact).abs() / exact;
            assert!(rel <= 2.0 * dx / r, "dim {dim} r {r} dx {dx}: rel {rel}");
        }
    }
}
