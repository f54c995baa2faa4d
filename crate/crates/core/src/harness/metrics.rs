//! Discrepancy and pattern metrics on grid fields.

use super::HarnessError;
use crate::model::{Grid, MacroState};

/// Cells with `ρ` at least this fraction of the maximum form the support.
pub const SUPPORT_FRACTION: f64 = 0.01;
/// Local maxima below this fraction of the global maximum are ignored.
pub const PEAK_FRACTION: f64 = 0.1;
/// Bins of the radial profile.
pub const RADIAL_BINS: usize = 32;
/// A ring is present when the radial profile peaks at or beyond this
/// fraction of the support radius.
pub const RING_FRACTION: f64 = 0.4;

/// `sqrt(Σ (a - b)² · cell area)`.
pub fn l2_distance(a: &[f64], b: &[f64], grid: &Grid) -> Result<f64, HarnessError> {
    if a.len() != grid.len() || b.len() != grid.len() {
        return Err(HarnessError::GridMismatch(format!(
            "fields of length {} and {} on a grid of {} cells",
            a.len(),
            b.len(),
            grid.len()
        )));
    }
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok((s * grid.cell_area()).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternMetrics {
    /// Density-weighted mean position.
    pub centroid: [f64; 2],
    /// Largest distance between two support cell centres.
    pub support_diameter: f64,
    /// Largest distance from the centroid to a support cell centre.
    pub support_radius: f64,
    /// Mean density per distance-to-centroid bin over `[0, support_radius]`.
    pub radial_profile: Vec<f64>,
    pub local_max_count: usize,
}

impl PatternMetrics {
    /// Centre radius of the radial profile's highest bin.
    pub fn radial_argmax(&self) -> f64 {
        let (k, _) = self
            .radial_profile
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
        (k as f64 + 0.5) * self.support_radius / self.radial_profile.len() as f64
    }

    pub fn has_ring(&self) -> bool {
        self.radial_argmax() >= RING_FRACTION * self.support_radius
    }
}

fn neighbours(grid: &Grid, idx: usize) -> impl Iterator<Item = usize> + '_ {
    let (i, j) = grid.coords(idx);
    let [n1, n2] = grid.cells();
    let dj: &[isize] = if grid.dim() == 2 { &[-1, 0, 1] } else { &[0] };
    dj.iter()
        .flat_map(|&b| [-1isize, 0, 1].into_iter().map(move |a| (a, b)))
        .filter(|&(a, b)| (a, b) != (0, 0))
        .filter_map(move |(a, b)| {
            let (ii, jj) = (i as isize + a, j as isize + b);
            (ii >= 0 && jj >= 0 && (ii as usize) < n1 && (jj as usize) < n2)
                .then(|| grid.index(ii as usize, jj as usize))
        })
}

/// Number of local density maxima above [`PEAK_FRACTION`] of the peak.
///
/// A cell qualifies when no neighbour (8-connected in 2D) is higher; a
/// connected plateau of qualifying cells counts once.
pub fn local_max_count(rho: &[f64], grid: &Grid) -> usize {
    let peak = rho.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return 0;
    }
    let floor = PEAK_FRACTION * peak;
    let candidate: Vec<bool> = (0..grid.len())
        .map(|k| rho[k] > floor && neighbours(grid, k).all(|m| rho[m] <= rho[k]))
        .collect();
    let mut seen = vec![false; grid.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..grid.len() {
        if !candidate[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(k) = stack.pop() {
            for m in neighbours(grid, k) {
                if candidate[m] && !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
    }
    count
}

pub fn pattern_metrics(state: &MacroState, grid: &Grid) -> Result<PatternMetrics, HarnessError> {
    let rho = &state.rho;
    let mass: f64 = rho.iter().sum();
    if !(mass > 0.0) {
        return Err(HarnessError::ZeroMass);
    }
    let mut centroid = [0.0; 2];
    for (k, &r) in rho.iter().enumerate() {
        let x = grid.center_of(k);
        centroid[0] += r * x[0];
        centroid[1] += r * x[1];
    }
    centroid[0] /= mass;
    centroid[1] /= mass;
    let peak = rho.iter().copied().fold(0.0, f64::max);
    let support: Vec<[f64; 2]> = (0..grid.len())
        .filter(|&k| rho[k] >= SUPPORT_FRACTION * peak)
        .map(|k| grid.center_of(k))
        .collect();
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let support_radius = support.iter().map(|&x| dist(x, centroid)).fold(0.0, f64::max);
    let support_diameter = if grid.dim() == 1 {
        let lo = support.iter().map(|x| x[0]).fold(f64::INFINITY, f64::min);
        let hi = support.iter().map(|x| x[0]).fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    } else {
        let mut d = 0.0f64;
        for (a, &p) in support.iter().enumerate() {
            for &q in &support[a + 1..] {
                d = d.max(dist(p, q));
            }
        }
        d
    };
    let mut sums = vec![0.0; RADIAL_BINS];
    let mut counts = vec![0usize; RADIAL_BINS];
    if support_radius > 0.0 {
        for (k, &r) in rho.iter().enumerate() {
            let d = dist(grid.center_of(k), centroid);
            if d <= support_radius {
                let b = ((d / support_radius * RADIAL_BINS as f64) as usize).min(RADIAL_BINS - 1);
                sums[b] += r;
                counts[b] += 1;
            }
        }
    }
    let radial_profile = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    Ok(PatternMetrics {
        centroid,
        support_diameter,
        support_radius,
        radial_profile,
        local_max_count: local_max_count(rho, grid),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gauss(x: [f64; 2], c: [f64; 2], s2: f64) -> f64 {
        (-((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)) / (2.0 * s2)).exp()
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn l2_examples() {
        let g = Grid::new_1d(50.0, 100).unwrap();
        let a = vec![0.3; 100];
        let b = vec![0.2; 100];
        assert!((l2_distance(&a, &b, &g).unwrap() - 0.70711).abs() < 1e-5);
        assert_eq!(l2_distance(&a, &a, &g).unwrap(), 0.0);
        assert!(matches!(l2_distance(&a, &b[..99], &g), Err(HarnessError::GridMismatch(_))));
    }

    proptest! {
        #[test]
        fn l2_is_a_homogeneous_metric(seed in 0u64..500, c in -3.0f64..3.0) {
            let g = Grid::new_2d([1.0, 2.0], [7, 5]).unwrap();
            let f = |m: u64| -> Vec<f64> {
                (0..35).map(|k| ((k as u64 * 7919 + seed * 31 + m) % 97) as f64 / 97.0).collect()
            };
            let (a, b, d) = (f(1), f(2), f(3));
            let ab = l2_distance(&a, &b, &g).unwrap();
            prop_assert!((ab - l2_distance(&b, &a, &g).unwrap()).abs() < 1e-15);
            prop_assert!(ab <= l2_distance(&a, &d, &g).unwrap() + l2_distance(&d, &b, &g).unwrap() + 1e-12);
            let ca: Vec<f64> = a.iter().map(|v| c * v).collect();
            let cb: Vec<f64> = b.iter().map(|v| c * v).collect();
            prop_assert!((l2_distance(&ca, &cb, &g).unwrap() - c.abs() * ab).abs() < 1e-12);
        }
    }

    #[test]
    fn single_gaussian() {
        let g = Grid::new_2d([1.0, 1.0], [50, 50]).unwrap();
        let s = MacroState::from_fn(&g, |x| gauss(x, [0.5, 0.5], 0.01), |_| [0.0; 2], |_| 0.0);
        let m = pattern_metrics(&s, &g).unwrap();
        assert_eq!(m.local_max_count, 1);
        assert!((m.centroid[0] - 0.5).abs() < 1e-12 && (m.centroid[1] - 0.5).abs() < 1e-12);
        assert!(!m.has_ring());
    }

    #[test]
    fn two_gaussians() {
        let g = Grid::new_2d([1.0, 1.0], [50, 50]).unwrap();
        let s = MacroState::from_fn(
            &g,
            |x| gauss(x, [0.4, 0.7], 0.004) + gauss(x, [0.6, 0.3], 0.004),
            |_| [0.0; 2],
            |_| 0.0,
        );
        assert_eq!(pattern_metrics(&s, &g).unwrap().local_max_count, 2);
    }

    #[test]
    fn annulus_peaks_away_from_centre() {
        let g = Grid::new_2d([1.0, 1.0], [60, 60]).unwrap();
        let s = MacroState::from_fn(
            &g,
            |x| {
                let r = ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt();
                (-(r - 0.25).powi(2) / 0.002).exp()
            },
            |_| [0.0; 2],
            |_| 0.0,
        );
        let m = pattern_metrics(&s, &g).unwrap();
        assert!(m.radial_argmax() > 0.0);
        assert!(m.has_ring());
    }

    #[test]
    fn zero_mass_is_an_error() {
        let g = Grid::new_1d(1.0, 10).unwrap();
        assert!(matches!(pattern_metrics(&MacroState::zeros(&g), &g), Err(HarnessError::ZeroMass)));
    }
}
