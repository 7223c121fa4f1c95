//! Simply connected space forms of constant curvature κ.
//!
//! Everything downstream is phrased in terms of the generalized sine
//!
//! ```text
//!   S_κ(t) = sinh(√(-κ)·t)/√(-κ)   κ < 0
//!          = t                     κ = 0
//!          = sin(√κ·t)/√κ          κ > 0
//! ```
//!
//! and its derivative `C_κ = S_κ'`. `S_κ` solves `S'' + κS = 0` with
//! `S(0) = 0`, `S'(0) = 1`, and the pair satisfies `C_κ² + κ·S_κ² = 1`.
//! Near κ = 0 both branches lose digits to cancellation, so for
//! `|κ|·t² < 1e-6` we evaluate the power series instead; the switch is
//! continuous to machine precision.
//!
//! For κ > 0 the warping function degenerates at `t = π/√κ` (the antipode);
//! all radii live strictly inside that.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Threshold on `|κ|·t²` below which the power series is used.
const SERIES_THRESHOLD: f64 = 1e-6;

/// Generalized sine `S_κ(t)`. Valid for `t ≥ 0` and, when κ > 0,
/// `t < π/√κ`; the domain is *not* checked here (see [`SpaceForm`]).
pub fn s_kappa(kappa: f64, t: f64) -> f64 {
    let x = kappa * t * t;
    if x.abs() < SERIES_THRESHOLD {
        // t·(1 - x/6 + x²/120 - x³/5040), truncation below 1e-24 relative
        return t * (1.0 - x / 6.0 * (1.0 - x / 20.0 * (1.0 - x / 42.0)));
    }
    if kappa > 0.0 {
        let s = kappa.sqrt();
        (s * t).sin() / s
    } else {
        let s = (-kappa).sqrt();
        (s * t).sinh() / s
    }
}

/// `C_κ(t) = S_κ'(t)`: cosh, 1, or cos depending on the sign of κ.
pub fn c_kappa(kappa: f64, t: f64) -> f64 {
    let x = kappa * t * t;
    if x.abs() < SERIES_THRESHOLD {
        // 1 - x/2 + x²/24 - x³/720
        return 1.0 - x / 2.0 * (1.0 - x / 12.0 * (1.0 - x / 30.0));
    }
    if kappa > 0.0 {
        (kappa.sqrt() * t).cos()
    } else {
        ((-kappa).sqrt() * t).cosh()
    }
}

/// A model ball geometry: the simply connected space form of curvature
/// `kappa` in dimension `dim ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceForm {
    kappa: f64,
    dim: usize,
    /// Safety margin subtracted from the antipodal radius π/√κ when κ > 0.
    #[serde(default)]
    margin: f64,
}

impl SpaceForm {
    pub fn new(kappa: f64, dim: usize) -> Result<Self> {
        Self::with_margin(kappa, dim, 0.0)
    }

    /// Like [`SpaceForm::new`] but shrinking the admissible radius for κ > 0
    /// by `margin` (useful when a caller needs slack for quadrature points
    /// slightly beyond the nominal radius).
    pub fn with_margin(kappa: f64, dim: usize, margin: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "space form dimension must be at least 2, got {dim}"
            )));
        }
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("curvature must be finite, got {kappa}")));
        }
        if !(margin >= 0.0) {
            return Err(Error::InvalidParameter(format!("margin must be >= 0, got {margin}")));
        }
        Ok(Self { kappa, dim, margin })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest admissible radius: `π/√κ - margin` for κ > 0, infinite
    /// otherwise.
    pub fn max_radius(&self) -> f64 {
        if self.kappa > 0.0 {
            std::f64::consts::PI / self.kappa.sqrt() - self.margin
        } else {
            f64::INFINITY
        }
    }

    fn check_radius(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain { t, msg: "radius must be finite and non-negative".into() });
        }
        if t >= self.max_radius() {
            return Err(Error::Domain {
                t,
                msg: format!(
                    "radius reaches the conjugate locus (max {} for kappa = {})",
                    self.max_radius(),
                    self.kappa
                ),
            });
        }
        Ok(())
    }

    /// `S_κ(t)` with the domain guard applied.
    pub fn s(&self, t: f64) -> Result<f64> {
        self.check_radius(t)?;
        Ok(s_kappa(self.kappa, t))
    }

    /// `C_κ(t)` with the domain guard applied.
    pub fn c(&self, t: f64) -> Result<f64> {
        self.check_radius(t)?;
        Ok(c_kappa(self.kappa, t))
    }

    /// Mean curvature of the geodesic sphere of radius `t`:
    /// `H_κ(t) = (dim-1)·C_κ(t)/S_κ(t)`. Undefined at `t = 0`.
    pub fn mean_curvature(&self, t: f64) -> Result<f64> {
        self.check_radius(t)?;
        if t == 0.0 {
            return Err(Error::Domain { t, msg: "mean curvature has a pole at t = 0".into() });
        }
        Ok((self.dim - 1) as f64 * c_kappa(self.kappa, t) / s_kappa(self.kappa, t))
    }

    /// Fundamental tone of the whole space form, `(dim-1)²·|κ|/4`.
    /// Only meaningful for κ ≤ 0 (for κ > 0 the space is compact and the
    /// Dirichlet problem on the full space makes no sense).
    pub fn fundamental_tone(&self) -> Result<f64> {
        mckean_tone(self.dim, self.kappa)
    }
}

/// `(n-1)²·|κ|/4`, the greatest lower bound of the spectrum of the
/// n-dimensional space form of curvature κ ≤ 0. Errors for κ > 0.
pub fn mckean_tone(dim: usize, kappa: f64) -> Result<f64> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    if kappa > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "fundamental tone of the full space requires kappa <= 0, got {kappa}"
        )));
    }
    let nm1 = (dim - 1) as f64;
    Ok(nm1 * nm1 * kappa.abs() / 4.0)
}

/// Convenience: `(n-1)·C_κ(t)/S_κ(t)` without constructing a [`SpaceForm`].
/// No domain guard; the caller owns `0 < t < π/√κ`.
pub fn reference_mean_curvature(dim: usize, kappa: f64, t: f64) -> f64 {
    (dim - 1) as f64 * c_kappa(kappa, t) / s_kappa(kappa, t)
}
