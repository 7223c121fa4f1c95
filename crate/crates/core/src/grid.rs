use crate::error::{Error, Result};

/// An ordered set of strictly positive sample points in `(0, r]`.
///
/// Hypothesis checks and Rayleigh-quotient scans all consume one of these.
/// The default layout mixes log-spaced points near the origin (where mean
/// curvatures have a `1/t` pole and sign decisions are made by the leading
/// coefficient) with a uniform section out to the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    /// Uniform grid of `n` points on `[a, b]`, endpoints included.
    /// Points at or below zero are dropped, so `uniform(0.0, r, n)` yields
    /// `n - 1` strictly positive points.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidParameter(format!(
                "uniform grid needs finite a < b, got [{a}, {b}]"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter("grid needs at least 2 points".into()));
        }
        let h = (b - a) / (n - 1) as f64;
        let points = (0..n)
            .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
            .filter(|&t| t > 0.0)
            .collect();
        Ok(Self { points })
    }

    /// Default hypothesis-check layout for a ball of radius `r`: a quarter of
    /// the points log-spaced on `[r·1e-6, r/10]`, the rest uniform on
    /// `(r/10, r]`. Total point count is `n` (minimum 16).
    pub fn log_uniform(r: f64, n: usize) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
        }
        let n = n.max(16);
        let n_log = n / 4;
        let n_lin = n - n_log;
        let t0 = r * 1e-6;
        let t1 = r / 10.0;
        let ratio = (t1 / t0).ln();
        let mut points: Vec<f64> = (0..n_log)
            .map(|i| t0 * (ratio * i as f64 / (n_log - 1) as f64).exp())
            .collect();
        let h = (r - t1) / n_lin as f64;
        points.extend((1..=n_lin).map(|i| if i == n_lin { r } else { t1 + h * i as f64 }));
        Ok(Self { points })
    }

    /// Wrap an explicit, strictly increasing, strictly positive point list.
    pub fn from_points(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        for w in points.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "grid points must be strictly increasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if points[0] <= 0.0 || !points[0].is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid points must be strictly positive, got {}",
                points[0]
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> f64 {
        *self.points.last().unwrap()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.points.iter()
    }

    /// Enforce a minimum sampling density of `min_per_unit` points per unit
    /// of radius; hypothesis scans refuse grids coarser than this.
    pub fn require_density(&self, r: f64, min_per_unit: f64) -> Result<()> {
        let needed = (r * min_per_unit).ceil() as usize;
        if self.points.len() < needed.max(2) {
            return Err(Error::InvalidParameter(format!(
                "grid too coarse: {} points for radius {r}, need at least {}",
                self.points.len(),
                needed.max(2)
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_includes_endpoint_and_drops_origin() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g.last(), 1.0);
        assert!(g.points()[0] > 0.0);
    }

    #[test]
    fn log_uniform_spans_six_decades() {
        let g = Grid::log_uniform(2.0, 1024).unwrap();
        assert_eq!(g.len(), 1024);
        assert!((g.points()[0] - 2e-6).abs() < 1e-18);
        assert_eq!(g.last(), 2.0);
        for w in g.points().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn density_check_rejects_coarse_grids() {
        let g = Grid::uniform(0.0, 4.0, 8).unwrap();
        assert!(g.require_density(4.0, 16.0).is_err());
        let g = Grid::uniform(0.0, 4.0, 256).unwrap();
        assert!(g.require_density(4.0, 16.0).is_ok());
    }
}
