//! Sample grids on the real line that stay clear of the zeros of `sn` and `cn`.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

/// Default exclusion radius around singular points, in y-units and x-units.
pub const DEFAULT_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Interval endpoints as multiples of `K`.
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    /// Exclusion radius around multiples of `K`, as a fraction of `K`.
    pub exclusion: f64,
}

impl GridSpec {
    /// 200 points on `(0.05 K, 0.95 K)`.
    pub const STANDARD: GridSpec = GridSpec {
        lo: 0.05,
        hi: 0.95,
        points: 200,
        exclusion: 0.02,
    };

    /// 200 points on `(0.05 K, 1.95 K)` for checks that cross `y = K`.
    pub const WIDE: GridSpec = GridSpec {
        lo: 0.05,
        hi: 1.95,
        points: 200,
        exclusion: 0.02,
    };

    pub fn with_points(self, points: usize) -> Self {
        GridSpec { points, ..self }
    }

    /// Uniform points (endpoints included), dropping those within the
    /// exclusion radius of a zero of `sn` (even multiples of `K`) or `cn`
    /// (odd multiples).
    pub fn build(&self, k: f64) -> Vec<f64> {
        let n = self.points.max(2);
        let step = (self.hi - self.lo) / (n - 1) as f64;
        (0..n)
            .map(|i| self.lo + step * i as f64)
            .filter(|u| (u - u.round()).abs() >= self.exclusion)
            .map(|u| u * k)
            .collect()
    }
}

/// Residual of a linear ODE at a point, with the scale used for the
/// relative verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: Complex64,
    /// Largest magnitude among the summands of the left-hand side.
    pub scale: f64,
}

impl Residual {
    pub fn from_terms(terms: &[Complex64]) -> Self {
        let value = terms.iter().sum();
        let scale = terms.iter().map(|z| z.norm()).fold(0.0, f64::max);
        Residual { value, scale }
    }

    /// As [`Residual::from_terms`], with the scale floored at `|u|`: when
    /// every summand vanishes (e.g. a constant solution with zero
    /// coefficients) the verdict is taken relative to the solution itself.
    pub fn with_floor(terms: &[Complex64], u: Complex64) -> Self {
        let mut r = Residual::from_terms(terms);
        r.scale = r.scale.max(u.norm());
        r
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.norm()
        } else {
            self.value.norm() / self.scale
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_grid_has_200_points_inside_quarter_period() {
        let g = GridSpec::STANDARD.build(2.0);
        assert_eq!(g.len(), 200);
        assert!(g.iter().all(|&y| y > 0.09 && y < 1.91));
    }

    #[test]
    fn wide_grid_skips_the_cn_zero() {
        let k = 1.7;
        let g = GridSpec::WIDE.build(k);
        assert!(g.iter().all(|&y| (y - k).abs() >= 0.02 * k - 1e-12));
        assert!(g.len() < 200 && g.len() > 190);
    }

    #[test]
    fn zero_residual_is_zero_relative() {
        let r = Residual::from_terms(&[Complex64::new(0.0, 0.0); 3]);
        assert_eq!(r.relative(), 0.0);
    }
}
