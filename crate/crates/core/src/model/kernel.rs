//! Radially symmetric interaction kernel.

use std::f64::consts::PI;

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelForm {
    /// `B(r) = 1` for `r <= R`, `0` otherwise. The boundary is included.
    Indicator,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub radius: f64,
    pub form: KernelForm,
}

impl KernelSpec {
    pub fn indicator(radius: f64) -> Self {
        Self {
            radius,
            form: KernelForm::Indicator,
        }
    }

    /// Kernel value at distance `r >= 0`.
    #[inline]
    pub fn at_distance(&self, r: f64) -> f64 {
        match self.form {
            KernelForm::Indicator => {
                if r <= self.radius {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Kernel value for an offset vector of any dimension.
    pub fn eval(&self, offset: &[f64]) -> f64 {
        let r = offset.iter().map(|c| c * c).sum::<f64>().sqrt();
        self.at_distance(r)
    }

    /// Supremum of the kernel over its support.
    pub fn sup(&self) -> f64 {
        match self.form {
            KernelForm::Indicator => 1.0,
        }
    }

    /// Exact moment `B_k = ∫ |x|^k B(|x|) dx` over `R^d`.
    pub fn moment(&self, k: u32, dim: usize) -> Result<f64, ModelError> {
        let kk = k as f64;
        let r = self.radius;
        match (self.form, dim) {
            (KernelForm::Indicator, 1) => Ok(2.0 * r.powf(kk + 1.0) / (kk + 1.0)),
            (KernelForm::Indicator, 2) => Ok(2.0 * PI * r.powf(kk + 2.0) / (kk + 2.0)),
            _ => Err(ModelError::UnsupportedDimension(dim)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indicator_values() {
        let b = KernelSpec::indicator(0.3);
        assert_eq!(b.eval(&[0.0]), 1.0);
        assert_eq!(b.eval(&[0.0, 0.0]), 1.0);
        assert_eq!(b.eval(&[0.3]), 1.0);
        assert_eq!(b.eval(&[-0.3]), 1.0);
        assert_eq!(b.eval(&[0.45]), 0.0);
        assert_eq!(b.eval(&[0.3, 0.0]), 1.0);
        assert_eq!(b.eval(&[0.3, 0.3]), 0.0);
    }

    #[test]
    fn moments_closed_form() {
        let b = KernelSpec::indicator(0.02);
        assert!((b.moment(0, 1).unwrap() - 0.04).abs() < 1e-15);
        let b = KernelSpec::indicator(0.3);
        assert!((b.moment(0, 2).unwrap() - PI * 0.09).abs() < 1e-15);
        assert!(b.moment(0, 3).is_err());
    }

    /// Independent oracle: midpoint rule in polar coordinates,
    /// `∫_0^{2π} ∫_0^R r^k B(r) r dr dθ`.
    fn polar_quadrature(spec: &KernelSpec, k: u32, nr: usize, ntheta: usize) -> f64 {
        let rmax = spec.radius * 1.5;
        let dr = rmax / nr as f64;
        let dth = 2.0 * PI / ntheta as f64;
        let mut acc = 0.0;
        for it in 0..ntheta {
            let th = (it as f64 + 0.5) * dth;
            for ir in 0..nr {
                let r = (ir as f64 + 0.5) * dr;
                let off = [r * th.cos(), r * th.sin()];
                acc += r.powi(k as i32) * spec.eval(&off) * r * dr * dth;
            }
        }
        acc
    }

    #[test]
    fn first_moment_2d_matches_quadrature() {
        let b = KernelSpec::indicator(1.0);
        let exact = b.moment(1, 2).unwrap();
        // 2π/3 to six digits
        assert!((exact - 2.094395).abs() < 1e-6);
        // nr multiple of 3 so that the support edge falls on a cell boundary
        let quad = polar_quadrature(&b, 1, 30_000, 8);
        assert!((quad - exact).abs() < 1e-6, "{quad} vs {exact}");
    }

    #[test]
    fn moments_1d_match_quadrature() {
        let b = KernelSpec::indicator(0.5);
        for k in 0..4 {
            let n = 300_000;
            let h = 1.5 / n as f64;
            let quad: f64 = (0..2 * n)
                .map(|i| {
                    let x = -1.5 + (i as f64 + 0.5) * h;
                    x.abs().powi(k) * b.eval(&[x]) * h
                })
                .sum();
            let exact = b.moment(k as u32, 1).unwrap();
            assert!((quad - exact).abs() < 1e-6 * exact.max(1e-3), "k={k}");
        }
    }

    proptest::proptest! {
        #[test]
        fn radially_symmetric(x in -1.0f64..1.0, y in -1.0f64..1.0, r in 0.01f64..1.0) {
            let b = KernelSpec::indicator(r);
            proptest::prop_assert_eq!(b.eval(&[x, y]), b.eval(&[-x, -y]));
            proptest::prop_assert_eq!(b.eval(&[x]), b.eval(&[-x]));
            proptest::prop_assert!(b.eval(&[x, y]) >= 0.0);
        }
    }
}
