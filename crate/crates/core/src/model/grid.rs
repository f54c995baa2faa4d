//! Uniform rectangular grids with cell-centred collocation.

use super::ModelError;

/// Uniform 1D or 2D grid over `[0, L1] x [0, L2]`.
///
/// All fields live at cell centres `x_i = (i + 1/2) Δx`. In 1D the second
/// axis is degenerate: one cell of unit width, so that cell areas and flat
/// indices work the same in both dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    extent: [f64; 2],
    cells: [usize; 2],
    spacing: [f64; 2],
}

impl Grid {
    pub fn new_1d(length: f64, cells: usize) -> Result<Self, ModelError> {
        Self::build(1, [length, 1.0], [cells, 1])
    }

    pub fn new_2d(extent: [f64; 2], cells: [usize; 2]) -> Result<Self, ModelError> {
        Self::build(2, extent, cells)
    }

    /// Grid whose spacing is as close as possible to `dx` while dividing the
    /// extent into a whole number of cells.
    pub fn from_spacing(dim: usize, extent: [f64; 2], dx: f64) -> Result<Self, ModelError> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(ModelError::InvalidGrid(format!("spacing {dx} must be positive")));
        }
        let count = |len: f64| ((len / dx).round() as usize).max(1);
        match dim {
            1 => Self::new_1d(extent[0], count(extent[0])),
            2 => Self::new_2d(extent, [count(extent[0]), count(extent[1])]),
            d => Err(ModelError::UnsupportedDimension(d)),
        }
    }

    fn build(dim: usize, extent: [f64; 2], cells: [usize; 2]) -> Result<Self, ModelError> {
        for k in 0..dim {
            if !(extent[k] > 0.0 && extent[k].is_finite()) {
                return Err(ModelError::InvalidGrid(format!(
                    "extent along axis {} must be positive, got {}",
                    k + 1,
                    extent[k]
                )));
            }
            if cells[k] == 0 {
                return Err(ModelError::InvalidGrid(format!(
                    "axis {} needs at least one cell",
                    k + 1
                )));
            }
        }
        let spacing = [
            extent[0] / cells[0] as f64,
            extent[1] / cells[1] as f64,
        ];
        Ok(Self {
            dim,
            extent,
            cells,
            spacing,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extent(&self) -> [f64; 2] {
        self.extent
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn spacing(&self) -> [f64; 2] {
        self.spacing
    }

    pub fn min_spacing(&self) -> f64 {
        if self.dim == 1 {
            self.spacing[0]
        } else {
            self.spacing[0].min(self.spacing[1])
        }
    }

    /// Cell length in 1D, cell area in 2D.
    pub fn cell_area(&self) -> f64 {
        self.spacing[0] * self.spacing[1]
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index, first axis fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.cells[0] + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.cells[0], idx / self.cells[0])
    }

    #[inline]
    pub fn center_coord(&self, axis: usize, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing[axis]
    }

    /// Cell centre; the second component is 0 in 1D.
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        let x2 = if self.dim == 1 {
            0.0
        } else {
            self.center_coord(1, j)
        };
        [self.center_coord(0, i), x2]
    }

    pub fn center_of(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.coords(idx);
        self.center(i, j)
    }

    pub fn contains(&self, point: [f64; 2]) -> bool {
        let inside = |k: usize| point[k] >= 0.0 && point[k] <= self.extent[k];
        inside(0) && (self.dim == 1 || inside(1))
    }

    /// Cell containing `point`, if it lies in the domain. The upper domain
    /// edge belongs to the last cell.
    pub fn locate(&self, point: [f64; 2]) -> Option<(usize, usize)> {
        if !self.contains(point) {
            return None;
        }
        let axis = |k: usize| {
            let i = (point[k] / self.spacing[k]).floor() as usize;
            i.min(self.cells[k] - 1)
        };
        let j = if self.dim == 1 { 0 } else { axis(1) };
        Some((axis(0), j))
    }

    /// Whether a cell belongs to the outermost layer.
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        let edge = |k: usize, c: usize| c == 0 || c + 1 == self.cells[k];
        edge(0, i) || (self.dim == 2 && edge(1, j))
    }
}
