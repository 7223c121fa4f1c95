//! Rotationally symmetric metrics `dt² + f(t)²·dθ²` and diagonal warped
//! metrics `dt² + Σ φᵢ(t)²·θᵢᵢ`, together with the algebra that feeds the
//! radial eigensolver:
//!
//! - radial (sectional) curvature `K = -f''/f` and sphere mean curvature
//!   `H = (n-1)·f'/f`;
//! - the curvature-shift function `ψ(t) = -f'·S_κ + f·C_κ`, which measures
//!   how a profile deviates from the space form `S_κ` (and satisfies
//!   `ψ' = S_κ·f·(K - κ)` and `H - H_κ = -(n-1)·ψ/(f·S_κ)`);
//! - reconstruction of a profile from a prescribed ψ by solving the linear
//!   ODE `-f'·S_κ + f·C_κ = ψ`, whose regular solution is
//!   `f = S_κ·(1 - ∫₀ᵗ ψ/S_κ² ds)`;
//! - a diagonal family sharing the volume density of the space form
//!   (`φ₂ = S_κ²/t`, `φ₃ = t`, `φᵢ = S_κ`), hence the same radial
//!   eigenvalues, while being pointwise non-isometric to it;
//! - JSON/CSV descriptions of profiles for the CLI.

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::radial_ode::{solve_first_eigenvalue, EigenSolution, RadialCoefficient, SolverOptions};
use crate::spaceform::{c_kappa, reference_mean_curvature, s_kappa, SpaceForm};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Serializable description of a profile or metric family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ProfileSpec {
    /// `f = S_κ`.
    Spaceform { kappa: f64 },
    /// Profile reconstructed from the shipped curvature-shift family
    /// `ψ_c(t) = -c·t²·e^{-2t}` on `[0, radius]`.
    Psi { kappa: f64, c: f64, radius: f64 },
    /// The shared-density diagonal family in dimension `dim`.
    Example43 { kappa: f64, dim: usize },
    /// Tabulated `(t, f, f', f'')` rows in a CSV file.
    Sampled { path: String },
}

/// A warping profile: `f: [0, R) -> [0, ∞)` with `f(0) = 0`, `f'(0) = 1`,
/// `f > 0` on `(0, R)`, carried together with its first two derivatives.
/// Immutable and cheap to clone; safe to share across threads.
#[derive(Clone)]
pub struct WarpingProfile {
    f: Fn1,
    df: Fn1,
    d2f: Fn1,
    max_radius: f64,
    descriptor: Option<ProfileSpec>,
}

impl std::fmt::Debug for WarpingProfile {
    fn fmt(&self, g: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        g.debug_struct("WarpingProfile")
            .field("max_radius", &self.max_radius)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl WarpingProfile {
    /// Wrap closures for `(f, f', f'')`. Certifies the origin data
    /// `f(0) = 0`, `f'(0) = 1` by sampling near zero.
    pub fn new<F, G, H>(
        f: F,
        df: G,
        d2f: H,
        max_radius: f64,
        descriptor: Option<ProfileSpec>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(max_radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "profile needs a positive max radius, got {max_radius}"
            )));
        }
        let p = Self { f: Arc::new(f), df: Arc::new(df), d2f: Arc::new(d2f), max_radius, descriptor };
        p.certify_origin()?;
        Ok(p)
    }

    fn certify_origin(&self) -> Result<()> {
        let f0 = (self.f)(0.0);
        if !(f0.abs() <= 1e-12) {
            return Err(Error::InvalidParameter(format!("f(0) = {f0:e}, expected 0")));
        }
        for eps in [1e-8, 1e-6] {
            let ratio = (self.f)(eps) / eps;
            if !ratio.is_finite() || (ratio - 1.0).abs() > 1e-4 {
                return Err(Error::InvalidParameter(format!(
                    "f(t)/t = {ratio} at t = {eps:e}, expected 1 (origin not smooth)"
                )));
            }
        }
        Ok(())
    }

    /// The space form profile `f = S_κ`.
    pub fn space_form(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("curvature must be finite, got {kappa}")));
        }
        let max_radius =
            if kappa > 0.0 { std::f64::consts::PI / kappa.sqrt() } else { f64::INFINITY };
        Self::new(
            move |t| s_kappa(kappa, t),
            move |t| c_kappa(kappa, t),
            move |t| -kappa * s_kappa(kappa, t),
            max_radius,
            Some(ProfileSpec::Spaceform { kappa }),
        )
    }

    /// Euclidean profile `f(t) = t`.
    pub fn flat() -> Self {
        Self::space_form(0.0).expect("flat profile is always valid")
    }

    /// Interpolating profile through tabulated `(t, f, f', f'')` rows
    /// (strictly increasing `t`, starting at `t = 0`). Evaluation uses
    /// cubic Hermite pieces for `f` and `f'` and linear pieces for `f''`.
    pub fn from_samples(rows: Vec<[f64; 4]>, descriptor: Option<ProfileSpec>) -> Result<Self> {
        if rows.len() < 4 {
            return Err(Error::InvalidParameter(format!(
                "sampled profile needs at least 4 rows, got {}",
                rows.len()
            )));
        }
        if rows[0][0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sampled profile must start at t = 0, got t = {}",
                rows[0][0]
            )));
        }
        for w in rows.windows(2) {
            if !(w[1][0] > w[0][0]) {
                return Err(Error::InvalidParameter(format!(
                    "sample abscissae must strictly increase ({} after {})",
                    w[1][0], w[0][0]
                )));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse { line: i + 2, msg: "non-finite sample".into() });
            }
        }
        let max_radius = rows.last().unwrap()[0];
        let data = Arc::new(rows);

        fn locate(data: &[[f64; 4]], t: f64) -> (usize, f64, f64) {
            let idx = data.partition_point(|r| r[0] < t).clamp(1, data.len() - 1);
            let (a, b) = (data[idx - 1], data[idx]);
            let h = b[0] - a[0];
            (idx - 1, h, (t - a[0]) / h)
        }
        fn hermite(y0: f64, m0: f64, y1: f64, m1: f64, h: f64, s: f64) -> f64 {
            let s2 = s * s;
            let s3 = s2 * s;
            (2.0 * s3 - 3.0 * s2 + 1.0) * y0
                + (s3 - 2.0 * s2 + s) * h * m0
                + (3.0 * s2 - 2.0 * s3) * y1
                + (s3 - s2) * h * m1
        }

        let d = data.clone();
        let f = move |t: f64| {
            let (i, h, s) = locate(&d, t);
            hermite(d[i][1], d[i][2], d[i + 1][1], d[i + 1][2], h, s)
        };
        let d = data.clone();
        let df = move |t: f64| {
            let (i, h, s) = locate(&d, t);
            hermite(d[i][2], d[i][3], d[i + 1][2], d[i + 1][3], h, s)
        };
        let d = data.clone();
        let d2f = move |t: f64| {
            let (i, _, s) = locate(&d, t);
            d[i][3] * (1.0 - s) + d[i + 1][3] * s
        };
        Self::new(f, df, d2f, max_radius, descriptor)
    }

    /// Largest radius the profile is defined for (may be infinite).
    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn descriptor(&self) -> Option<&ProfileSpec> {
        self.descriptor.as_ref()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() || t > self.max_radius {
            return Err(Error::Domain { t, msg: format!("outside [0, {}]", self.max_radius) });
        }
        Ok(())
    }

    pub fn f(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok((self.f)(t))
    }

    pub fn df(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok((self.df)(t))
    }

    pub fn d2f(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok((self.d2f)(t))
    }

    /// Radial sectional curvature `K(t) = -f''(t)/f(t)`, for `t ∈ (0, R)`.
    pub fn radial_curvature(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let ft = (self.f)(t);
        if !(ft > 0.0) {
            return Err(Error::Positivity { t, msg: format!("f(t) = {ft}, profile not positive") });
        }
        Ok(-(self.d2f)(t) / ft)
    }

    /// Mean curvature of the distance sphere in dimension `dim`:
    /// `H(t) = (dim-1)·f'(t)/f(t)`, for `t ∈ (0, R)`.
    pub fn mean_curvature(&self, dim: usize, t: f64) -> Result<f64> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        self.check_domain(t)?;
        let ft = (self.f)(t);
        if !(ft > 0.0) {
            return Err(Error::Positivity { t, msg: format!("f(t) = {ft}, profile not positive") });
        }
        Ok((dim - 1) as f64 * (self.df)(t) / ft)
    }

    /// Drift coefficient `(dim-1)·f'/f` for the radial eigenproblem.
    pub fn coefficient(&self, dim: usize) -> Result<RadialCoefficient> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        let f = self.f.clone();
        let df = self.df.clone();
        let nm1 = (dim - 1) as f64;
        RadialCoefficient::new(move |t| nm1 * df(t) / f(t), nm1)
    }
}

/// A curvature-shift generator `ψ` with its derivative and the base
/// curvature κ it is measured against. Regularity at the origin
/// (`ψ(0) = ψ'(0) = 0`) is certified at construction.
#[derive(Clone)]
pub struct PsiProfile {
    psi: Fn1,
    dpsi: Fn1,
    kappa: f64,
    /// Set when ψ belongs to the shipped family `-c·t²·e^{-2t}`.
    family_c: Option<f64>,
}

impl std::fmt::Debug for PsiProfile {
    fn fmt(&self, g: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        g.debug_struct("PsiProfile")
            .field("kappa", &self.kappa)
            .field("family_c", &self.family_c)
            .finish()
    }
}

impl PsiProfile {
    pub fn new<F, G>(psi: F, dpsi: G, kappa: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let p = Self { psi: Arc::new(psi), dpsi: Arc::new(dpsi), kappa, family_c: None };
        p.certify_origin()?;
        Ok(p)
    }

    fn certify_origin(&self) -> Result<()> {
        if !self.kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "curvature must be finite, got {}",
                self.kappa
            )));
        }
        let (p0, d0) = ((self.psi)(0.0), (self.dpsi)(0.0));
        if p0 != 0.0 || d0 != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "psi must vanish to second order at 0, got psi(0) = {p0:e}, psi'(0) = {d0:e}"
            )));
        }
        // second-order vanishing: psi(t)/t stays bounded as t -> 0
        for eps in [1e-6, 1e-8] {
            let r = (self.psi)(eps) / eps;
            if !r.is_finite() || r.abs() > 1e-3 {
                return Err(Error::InvalidParameter(format!(
                    "psi(t)/t = {r:e} at t = {eps:e}; psi must vanish to second order"
                )));
            }
        }
        Ok(())
    }

    /// The shipped family `ψ_c(t) = -c·t²·e^{-2t}` (non-positive for c > 0,
    /// with `ψ' > 0` exactly for t > 1).
    pub fn exponential_family(c: f64, kappa: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("c must be finite, got {c}")));
        }
        let mut p = Self::new(
            move |t| -c * t * t * (-2.0 * t).exp(),
            move |t| -2.0 * c * t * (1.0 - t) * (-2.0 * t).exp(),
            kappa,
        )?;
        p.family_c = Some(c);
        Ok(p)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn psi(&self, t: f64) -> f64 {
        (self.psi)(t)
    }

    pub fn dpsi(&self, t: f64) -> f64 {
        (self.dpsi)(t)
    }

    /// Supremum of `|ψ|` over a grid; zero means the profile is the space
    /// form itself.
    pub fn sup_abs_on(&self, grid: &crate::grid::Grid) -> f64 {
        grid.iter().map(|&t| self.psi(t).abs()).fold(0.0, f64::max)
    }

    /// True when `ψ ≤ tol` everywhere on the grid (the admissible family
    /// for mean-curvature domination).
    pub fn is_nonpositive_on(&self, grid: &crate::grid::Grid, tol: f64) -> bool {
        grid.iter().all(|&t| self.psi(t) <= tol)
    }
}

/// The curvature shift of an existing profile against curvature `kappa`:
/// `ψ = -f'·S_κ + f·C_κ`, with `ψ' = -f''·S_κ - κ·f·S_κ` (using
/// `S_κ'' = -κ·S_κ`).
pub fn psi_of_profile(profile: &WarpingProfile, kappa: f64) -> Result<PsiProfile> {
    let f = profile.f.clone();
    let df = profile.df.clone();
    let d2f = profile.d2f.clone();
    let g = profile.f.clone();
    PsiProfile::new(
        move |t| -df(t) * s_kappa(kappa, t) + f(t) * c_kappa(kappa, t),
        move |t| -d2f(t) * s_kappa(kappa, t) - kappa * g(t) * s_kappa(kappa, t),
        kappa,
    )
}

/// Cumulative integral `J(t) = ∫₀ᵗ ψ(s)/S_κ(s)² ds` tabulated on a uniform
/// grid with the exact integrand as Hermite slope data.
struct CumulativeShift {
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CumulativeShift {
    fn eval(&self, t: f64) -> f64 {
        let n = self.values.len() - 1;
        let x = (t / self.h).min(n as f64);
        let i = (x as usize).min(n - 1);
        let s = x - i as f64;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.values[i]
            + (s3 - 2.0 * s2 + s) * self.h * self.slopes[i]
            + (3.0 * s2 - 2.0 * s3) * self.values[i + 1]
            + (s3 - s2) * self.h * self.slopes[i + 1]
    }
}

/// Reconstruct the profile whose curvature shift against κ is the given ψ:
/// the regular solution of `-f'·S_κ + f·C_κ = ψ`, namely
///
/// ```text
///   f  = S_κ·(1 - J),          J(t) = ∫₀ᵗ ψ/S_κ² ds,
///   f' = C_κ·(1 - J) - ψ/S_κ,
///   f''= -κ·S_κ·(1 - J) - ψ'/S_κ,
/// ```
///
/// which satisfies `ψ' = S_κ·f·(K - κ)` identically and round-trips through
/// [`psi_of_profile`]. The integrand has a removable singularity at 0
/// (`ψ/S_κ² -> ψ''(0)/2`), handled by the series `ψ'(s)/(2s)` below a
/// cutoff. Requires finite `radius`, since `1 - J > 0` is validated on the
/// whole table during construction.
pub fn profile_from_psi(psi: &PsiProfile, kappa: f64, radius: f64) -> Result<WarpingProfile> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "reconstruction radius must be finite and positive, got {radius}"
        )));
    }
    if kappa != psi.kappa() {
        return Err(Error::InvalidParameter(format!(
            "psi was built against kappa = {}, asked to reconstruct at {kappa}",
            psi.kappa()
        )));
    }
    if kappa > 0.0 && radius >= std::f64::consts::PI / kappa.sqrt() {
        return Err(Error::Domain {
            t: radius,
            msg: format!("radius reaches the conjugate locus of kappa = {kappa}"),
        });
    }

    // ψ/S_κ² is a ratio of two clean O(s²) quantities; no cancellation,
    // so evaluate it directly everywhere. Only s = 0 itself is 0/0: the
    // integrand's limit ψ''(0)/2 is read just inside instead.
    let p = psi.clone();
    let integrand = move |s: f64| {
        let d = s.max(1e-8);
        let sk = s_kappa(kappa, d);
        p.psi(d) / (sk * sk)
    };

    let cells = ((radius * 512.0).ceil() as usize).clamp(512, 16384);
    let h = radius / cells as f64;
    let cell_tol = 1e-12 / cells as f64;
    let mut values = Vec::with_capacity(cells + 1);
    let mut slopes = Vec::with_capacity(cells + 1);
    values.push(0.0);
    slopes.push(integrand(0.0));
    let mut acc = 0.0;
    for i in 0..cells {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        acc += adaptive_simpson(&integrand, a, b, cell_tol)?;
        if !acc.is_finite() {
            return Err(Error::QuadratureFailure {
                a: 0.0,
                b,
                msg: "cumulative shift integral diverged".into(),
            });
        }
        if 1.0 - acc <= 0.0 {
            return Err(Error::Positivity {
                t: b,
                msg: format!("1 - ∫ψ/S² = {:e}; profile would close up", 1.0 - acc),
            });
        }
        values.push(acc);
        slopes.push(integrand(b));
    }
    let table = Arc::new(CumulativeShift { h, values, slopes });

    // ψ/S_κ ~ ψ''(0)·t/2 -> 0: again a clean ratio away from t = 0 itself
    let psi_ratio = {
        let p = psi.clone();
        move |t: f64| if t < 1e-12 { 0.0 } else { p.psi(t) / s_kappa(kappa, t) }
    };

    let tb = table.clone();
    let f = move |t: f64| s_kappa(kappa, t) * (1.0 - tb.eval(t));
    let tb = table.clone();
    let pr = psi_ratio.clone();
    let df = move |t: f64| c_kappa(kappa, t) * (1.0 - tb.eval(t)) - pr(t);
    let tb = table;
    let p = psi.clone();
    let d2f = move |t: f64| {
        // ψ'/S_κ has the finite limit ψ''(0) at 0
        let d = t.max(1e-8);
        let dpsi_ratio = p.dpsi(d) / s_kappa(kappa, d);
        -kappa * s_kappa(kappa, t) * (1.0 - tb.eval(t)) - dpsi_ratio
    };

    let descriptor = psi.family_c.map(|c| ProfileSpec::Psi { kappa, c, radius });
    WarpingProfile::new(f, df, d2f, radius, descriptor)
}

/// A diagonal metric `dt² + Σᵢ φᵢ(t)²·θᵢᵢ` given by `dim - 1` positive
/// radial profiles. The volume density is `∏ φᵢ` and the radial part of
/// the Laplacian is driven by `Σ φᵢ'/φᵢ`.
#[derive(Clone)]
pub struct DiagonalMetric {
    phis: Vec<(Fn1, Fn1, Fn1)>,
    dim: usize,
    max_radius: f64,
    descriptor: Option<ProfileSpec>,
}

impl std::fmt::Debug for DiagonalMetric {
    fn fmt(&self, g: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        g.debug_struct("DiagonalMetric")
            .field("dim", &self.dim)
            .field("max_radius", &self.max_radius)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl DiagonalMetric {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn descriptor(&self) -> Option<&ProfileSpec> {
        self.descriptor.as_ref()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(t > 0.0) || !t.is_finite() || t >= self.max_radius {
            return Err(Error::Domain { t, msg: format!("outside (0, {})", self.max_radius) });
        }
        Ok(())
    }

    /// Volume density `∏ᵢ φᵢ(t)`.
    pub fn density(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.phis.iter().map(|(f, _, _)| f(t)).product())
    }

    /// `Σᵢ φᵢ'(t)/φᵢ(t)`, the drift of the radial Laplacian (equals the
    /// mean curvature of the distance sphere).
    pub fn density_log_derivative(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let mut acc = 0.0;
        for (f, df, _) in &self.phis {
            let ft = f(t);
            if !(ft > 0.0) {
                return Err(Error::Positivity { t, msg: format!("diagonal entry = {ft}") });
            }
            acc += df(t) / ft;
        }
        Ok(acc)
    }

    /// Largest deviation of the per-axis radial curvatures from `kappa`:
    /// `maxᵢ |-φᵢ''/φᵢ - κ|`. Strictly positive at generic t certifies that
    /// the metric is not the space form, even when the spectra agree.
    pub fn nonisometry_witness(&self, kappa: f64, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let mut worst: f64 = 0.0;
        for (f, _, d2f) in &self.phis {
            let ft = f(t);
            if !(ft > 0.0) {
                return Err(Error::Positivity { t, msg: format!("diagonal entry = {ft}") });
            }
            worst = worst.max((-d2f(t) / ft - kappa).abs());
        }
        Ok(worst)
    }

    /// Drift coefficient for the radial eigenproblem (pole order `dim-1`).
    pub fn coefficient(&self) -> RadialCoefficient {
        let phis: Vec<(Fn1, Fn1)> =
            self.phis.iter().map(|(f, df, _)| (f.clone(), df.clone())).collect();
        RadialCoefficient::new(
            move |t| phis.iter().map(|(f, df)| df(t) / f(t)).sum(),
            (self.dim - 1) as f64,
        )
        .expect("dim >= 3 enforced at construction")
    }
}

/// The shared-density diagonal family: `φ₂ = S_κ²/t`, `φ₃ = t`,
/// `φᵢ = S_κ` for `4 ≤ i ≤ dim`. Needs `dim ≥ 3`. Its density is exactly
/// `S_κ^{dim-1}`, so the radial eigenproblem coincides with the space
/// form's, yet for κ ≠ 0 the per-axis curvatures differ from κ.
pub fn example43_metric(kappa: f64, dim: usize) -> Result<DiagonalMetric> {
    if dim < 3 {
        return Err(Error::InvalidParameter(format!(
            "the diagonal family needs dim >= 3, got {dim}"
        )));
    }
    if !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("curvature must be finite, got {kappa}")));
    }
    let max_radius = if kappa > 0.0 { std::f64::consts::PI / kappa.sqrt() } else { f64::INFINITY };

    // φ₂ = S_κ²/t and derivatives; power series below |κ·t²| = 1e-4 where
    // the closed forms lose digits to cancellation:
    //   φ₂ = t·(1 - x/3 + 2x²/45 - x³/315),  x = κt²
    let phi2 = move |t: f64| {
        let x = kappa * t * t;
        if x.abs() < 1e-4 {
            t * (1.0 - x / 3.0 + 2.0 * x * x / 45.0 - x * x * x / 315.0)
        } else {
            let s = s_kappa(kappa, t);
            s * s / t
        }
    };
    let dphi2 = move |t: f64| {
        let x = kappa * t * t;
        if x.abs() < 1e-4 {
            1.0 - x + 2.0 * x * x / 9.0 - x * x * x / 45.0
        } else {
            let s = s_kappa(kappa, t);
            let c = c_kappa(kappa, t);
            2.0 * s * c / t - s * s / (t * t)
        }
    };
    let d2phi2 = move |t: f64| {
        let x = kappa * t * t;
        if x.abs() < 1e-4 {
            (-2.0 * x + 8.0 * x * x / 9.0 - 2.0 * x * x * x / 15.0) / t
        } else {
            let s = s_kappa(kappa, t);
            let c = c_kappa(kappa, t);
            (2.0 * c * c - 2.0 * kappa * s * s) / t - 4.0 * s * c / (t * t)
                + 2.0 * s * s / (t * t * t)
        }
    };

    let mut phis: Vec<(Fn1, Fn1, Fn1)> = vec![
        (Arc::new(phi2), Arc::new(dphi2), Arc::new(d2phi2)),
        (Arc::new(|t| t), Arc::new(|_| 1.0), Arc::new(|_| 0.0)),
    ];
    for _ in 4..=dim {
        phis.push((
            Arc::new(move |t| s_kappa(kappa, t)),
            Arc::new(move |t| c_kappa(kappa, t)),
            Arc::new(move |t| -kappa * s_kappa(kappa, t)),
        ));
    }

    Ok(DiagonalMetric {
        phis,
        dim,
        max_radius,
        descriptor: Some(ProfileSpec::Example43 { kappa, dim }),
    })
}

/// `Σ φᵢ'/φᵢ` of a diagonal metric (free-function form of
/// [`DiagonalMetric::density_log_derivative`]).
pub fn diagonal_density_log_derivative(metric: &DiagonalMetric, t: f64) -> Result<f64> {
    metric.density_log_derivative(t)
}

/// Any of the ball geometries the solver understands, unified behind
/// dimension, domain, mean curvature and the radial drift coefficient.
#[derive(Debug, Clone)]
pub enum BallGeometry {
    SpaceForm(SpaceForm),
    Warped { profile: WarpingProfile, dim: usize },
    Diagonal(DiagonalMetric),
}

impl BallGeometry {
    pub fn space_form(kappa: f64, dim: usize) -> Result<Self> {
        Ok(Self::SpaceForm(SpaceForm::new(kappa, dim)?))
    }

    pub fn warped(profile: WarpingProfile, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        Ok(Self::Warped { profile, dim })
    }

    pub fn diagonal(metric: DiagonalMetric) -> Self {
        Self::Diagonal(metric)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::SpaceForm(s) => s.dim(),
            Self::Warped { dim, .. } => *dim,
            Self::Diagonal(d) => d.dim(),
        }
    }

    pub fn max_radius(&self) -> f64 {
        match self {
            Self::SpaceForm(s) => s.max_radius(),
            Self::Warped { profile, .. } => profile.max_radius(),
            Self::Diagonal(d) => d.max_radius(),
        }
    }

    /// Mean curvature of the distance sphere at radius `t` (equals the
    /// log-derivative of the volume density in every case).
    pub fn mean_curvature(&self, t: f64) -> Result<f64> {
        match self {
            Self::SpaceForm(s) => s.mean_curvature(t),
            Self::Warped { profile, dim } => profile.mean_curvature(*dim, t),
            Self::Diagonal(d) => d.density_log_derivative(t),
        }
    }

    /// Radial drift `a(t)` with pole order `dim - 1`.
    pub fn coefficient(&self) -> Result<RadialCoefficient> {
        match self {
            Self::SpaceForm(s) => {
                let (kappa, dim) = (s.kappa(), s.dim());
                RadialCoefficient::new(
                    move |t| reference_mean_curvature(dim, kappa, t),
                    (dim - 1) as f64,
                )
            }
            Self::Warped { profile, dim } => profile.coefficient(*dim),
            Self::Diagonal(d) => Ok(d.coefficient()),
        }
    }

    /// First Dirichlet eigenvalue of the ball of radius `r`.
    pub fn solve(&self, r: f64, opts: &SolverOptions) -> Result<EigenSolution> {
        if r >= self.max_radius() {
            return Err(Error::Domain {
                t: r,
                msg: format!("radius exceeds the geometry's domain (max {})", self.max_radius()),
            });
        }
        solve_first_eigenvalue(&self.coefficient()?, r, opts)
    }
}

impl ProfileSpec {
    /// Build the geometry this descriptor denotes. `dim` is used by the
    /// profile kinds; the diagonal kind carries its own dimension.
    pub fn realize(&self, dim: usize) -> Result<BallGeometry> {
        match self {
            Self::Spaceform { kappa } => BallGeometry::space_form(*kappa, dim),
            Self::Psi { kappa, c, radius } => {
                let psi = PsiProfile::exponential_family(*c, *kappa)?;
                BallGeometry::warped(profile_from_psi(&psi, *kappa, *radius)?, dim)
            }
            Self::Example43 { kappa, dim } => Ok(BallGeometry::diagonal(example43_metric(
                *kappa, *dim,
            )?)),
            Self::Sampled { path } => {
                BallGeometry::warped(read_profile_csv(std::path::Path::new(path))?, dim)
            }
        }
    }
}

/// Read a sampled profile from CSV with header `t,f,df,d2f`.
pub fn read_profile_csv(path: &std::path::Path) -> Result<WarpingProfile> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t,f,df,d2f" => {}
        other => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header 't,f,df,d2f', got {:?}", other.map(|(_, h)| h)),
            })
        }
    }
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = [0.0f64; 4];
        let mut fields = line.split(',');
        for slot in row.iter_mut() {
            let field = fields.next().ok_or(Error::Parse {
                line: i + 1,
                msg: "expected 4 comma-separated fields".into(),
            })?;
            *slot = field.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                msg: format!("bad float {field:?}: {e}"),
            })?;
        }
        if fields.next().is_some() {
            return Err(Error::Parse { line: i + 1, msg: "trailing fields".into() });
        }
        rows.push(row);
    }
    WarpingProfile::from_samples(rows, Some(ProfileSpec::Sampled { path: path.display().to_string() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    // Frozen from a high-precision evaluation of φ₂ = S_κ²/t before this
    // module was written: max_i |-φᵢ''/φᵢ - κ| at t = 1.
    const WITNESS_K_MINUS_1: f64 = 1.1959821799352957;
    const WITNESS_K_MINUS_025: f64 = 0.2634403609382789;

    #[test]
    fn space_form_profile_has_constant_curvature() {
        for kappa in [-1.0, -0.3, 0.0, 0.7] {
            let p = WarpingProfile::space_form(kappa).unwrap();
            for t in [0.3, 1.0, 2.0] {
                assert_relative_eq!(p.radial_curvature(t).unwrap(), kappa, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn psi_of_flat_profile_in_hyperbolic_background() {
        // f(t) = t against κ = -1: ψ = -sinh t + t·cosh t > 0 for t > 0
        let psi = psi_of_profile(&WarpingProfile::flat(), -1.0).unwrap();
        for t in [0.5f64, 1.0, 2.0] {
            let expect = -t.sinh() + t * t.cosh();
            assert_relative_eq!(psi.psi(t), expect, max_relative = 1e-14);
            assert!(psi.psi(t) > 0.0);
        }
        // derivative path agrees with a central difference
        let h = 1e-6;
        let fd = (psi.psi(1.0 + h) - psi.psi(1.0 - h)) / (2.0 * h);
        assert_relative_eq!(psi.dpsi(1.0), fd, max_relative = 1e-8);
    }

    #[test]
    fn reconstruction_round_trips_the_flat_profile() {
        // ψ of f(t) = t against κ = -1, fed back through the reconstruction,
        // must return f(t) = t. This pins the sign and the S_κ² denominator
        // of the cumulative integral.
        let psi = psi_of_profile(&WarpingProfile::flat(), -1.0).unwrap();
        let rebuilt = profile_from_psi(&psi, -1.0, 3.0).unwrap();
        for i in 1..=30 {
            let t = 0.1 * i as f64;
            assert_relative_eq!(rebuilt.f(t).unwrap(), t, max_relative = 1e-9);
            assert_relative_eq!(rebuilt.df(t).unwrap(), 1.0, max_relative = 1e-9);
            assert_abs_diff_eq!(rebuilt.d2f(t).unwrap(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_shift_reconstructs_the_space_form() {
        let psi = PsiProfile::exponential_family(0.0, -1.0).unwrap();
        let p = profile_from_psi(&psi, -1.0, 2.0).unwrap();
        for t in [0.25, 0.5, 1.0, 1.9] {
            assert_relative_eq!(p.f(t).unwrap(), t.sinh(), max_relative = 1e-12);
            assert_relative_eq!(p.df(t).unwrap(), t.cosh(), max_relative = 1e-12);
        }
    }

    #[test]
    fn family_round_trip_through_psi_of_profile() {
        let psi = PsiProfile::exponential_family(0.1, -1.0).unwrap();
        let p = profile_from_psi(&psi, -1.0, 3.0).unwrap();
        let back = psi_of_profile(&p, -1.0).unwrap();
        for i in 1..=29 {
            let t = 0.1 * i as f64;
            assert_abs_diff_eq!(back.psi(t), psi.psi(t), epsilon = 1e-9);
        }
    }

    proptest! {
        #[test]
        fn shift_derivative_identity(c in 0.0f64..0.3, kappa in -2.0f64..-0.1, t in 0.05f64..2.9) {
            // ψ' = S_κ·f·(K - κ) links the two derivative code paths
            let psi = PsiProfile::exponential_family(c, kappa).unwrap();
            let p = profile_from_psi(&psi, kappa, 3.0).unwrap();
            let k = p.radial_curvature(t).unwrap();
            let lhs = psi.dpsi(t);
            let rhs = s_kappa(kappa, t) * p.f(t).unwrap() * (k - kappa);
            prop_assert!((lhs - rhs).abs() < 1e-9, "lhs={lhs} rhs={rhs}");
        }

        #[test]
        fn mean_curvature_dominates_for_nonpositive_shift(
            c in 0.01f64..0.3, kappa in -2.0f64..-0.1, t in 0.05f64..2.9)
        {
            // H - H_κ = -(n-1)·ψ/(f·S_κ) ≥ 0 when ψ ≤ 0
            let n = 3;
            let psi = PsiProfile::exponential_family(c, kappa).unwrap();
            let p = profile_from_psi(&psi, kappa, 3.0).unwrap();
            let h = p.mean_curvature(n, t).unwrap();
            let h_ref = reference_mean_curvature(n, kappa, t);
            let gap = h - h_ref;
            let predicted = -((n - 1) as f64) * psi.psi(t) / (p.f(t).unwrap() * s_kappa(kappa, t));
            prop_assert!(gap >= 0.0);
            prop_assert!((gap - predicted).abs() < 1e-9, "gap={gap} predicted={predicted}");
        }
    }

    #[test]
    fn shift_family_sign_structure() {
        let psi = PsiProfile::exponential_family(0.1, -1.0).unwrap();
        let grid = Grid::uniform(0.0, 3.0, 128).unwrap();
        assert!(psi.is_nonpositive_on(&grid, 0.0));
        assert!(psi.sup_abs_on(&grid) > 0.0);
        // ψ' changes sign exactly at t = 1
        assert!(psi.dpsi(0.5) < 0.0);
        assert!(psi.dpsi(1.5) > 0.0);
        assert_abs_diff_eq!(psi.dpsi(1.0), 0.0, epsilon = 1e-18);
        // hence K > κ exactly for t > 1
        let p = profile_from_psi(&psi, -1.0, 3.0).unwrap();
        assert!(p.radial_curvature(1.5).unwrap() > -1.0);
        assert!(p.radial_curvature(0.5).unwrap() < -1.0);
    }

    #[test]
    fn small_t_mean_curvature_recovers_the_dimension() {
        let psi = PsiProfile::exponential_family(0.2, -0.5).unwrap();
        let p = profile_from_psi(&psi, -0.5, 2.0).unwrap();
        for n in [2usize, 3, 5] {
            // t·H(t) = (n-1)(1 + O(t)); cancel the linear term by extrapolation
            let t = 1e-5;
            let th = |t: f64| t * p.mean_curvature(n, t).unwrap();
            let extrapolated = 2.0 * th(t / 2.0) - th(t);
            assert_relative_eq!(extrapolated, (n - 1) as f64, max_relative = 1e-6);
        }
    }

    #[test]
    fn closing_profile_is_rejected() {
        // a strongly positive shift drives 1 - ∫ψ/S² through zero
        let psi = PsiProfile::exponential_family(-40.0, -1.0).unwrap();
        match profile_from_psi(&psi, -1.0, 20.0) {
            Err(Error::Positivity { t, .. }) => assert!(t > 0.0),
            other => panic!("expected positivity failure, got {other:?}"),
        }
    }

    #[test]
    fn psi_regularity_is_certified() {
        // psi(0) ≠ 0
        assert!(PsiProfile::new(|_| 1.0, |_| 0.0, -1.0).is_err());
        // psi'(0) ≠ 0 (linear leading term)
        assert!(PsiProfile::new(|t| t, |_| 1.0, -1.0).is_err());
        // quadratic leading term passes
        assert!(PsiProfile::new(|t| t * t, |t| 2.0 * t, -1.0).is_ok());
    }

    #[test]
    fn diagonal_density_matches_space_form_exactly() {
        for &kappa in &[-1.0, -0.25, 0.5] {
            for dim in 3..=6 {
                let m = example43_metric(kappa, dim).unwrap();
                let r_max = if kappa > 0.0 { 3.0 } else { 4.0 };
                for i in 1..=40 {
                    let t = r_max * i as f64 / 41.0;
                    let density = m.density(t).unwrap();
                    let reference = s_kappa(kappa, t).powi(dim as i32 - 1);
                    assert_relative_eq!(density, reference, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn diagonal_drift_matches_space_form() {
        for &kappa in &[-1.0, -0.25, 0.5] {
            for dim in [3usize, 4] {
                let m = example43_metric(kappa, dim).unwrap();
                for i in 1..=30 {
                    let t = 2.5 * i as f64 / 31.0;
                    assert_relative_eq!(
                        m.density_log_derivative(t).unwrap(),
                        reference_mean_curvature(dim, kappa, t),
                        max_relative = 1e-11
                    );
                }
            }
        }
    }

    #[test]
    fn diagonal_drift_is_stable_near_the_origin() {
        let m = example43_metric(-1.0, 4).unwrap();
        for t in [1e-6, 1e-4, 1e-2] {
            assert_relative_eq!(
                m.density_log_derivative(t).unwrap(),
                reference_mean_curvature(4, -1.0, t),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn nonisometry_witness_frozen_values() {
        let m = example43_metric(-1.0, 3).unwrap();
        assert_relative_eq!(
            m.nonisometry_witness(-1.0, 1.0).unwrap(),
            WITNESS_K_MINUS_1,
            max_relative = 1e-9
        );
        let m = example43_metric(-0.25, 4).unwrap();
        assert_relative_eq!(
            m.nonisometry_witness(-0.25, 1.0).unwrap(),
            WITNESS_K_MINUS_025,
            max_relative = 1e-9
        );
        // the flat diagonal family *is* the flat metric
        let m = example43_metric(0.0, 3).unwrap();
        assert_abs_diff_eq!(m.nonisometry_witness(0.0, 1.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn diagonal_dimension_guard() {
        assert!(example43_metric(-1.0, 2).is_err());
        assert!(example43_metric(f64::NAN, 3).is_err());
    }

    #[test]
    fn profile_spec_json_round_trip() {
        let specs = [
            ProfileSpec::Spaceform { kappa: -1.0 },
            ProfileSpec::Psi { kappa: -0.5, c: 0.1, radius: 2.0 },
            ProfileSpec::Example43 { kappa: -1.0, dim: 4 },
            ProfileSpec::Sampled { path: "profile.csv".into() },
        ];
        for spec in &specs {
            let json = serde_json::to_string(spec).unwrap();
            let back: ProfileSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(&back, spec);
        }
        let json = serde_json::to_string(&specs[0]).unwrap();
        assert!(json.contains("\"kind\":\"spaceform\""));
    }

    #[test]
    fn sampled_profile_round_trip() {
        use std::io::Write;
        let dir = std::env::temp_dir().join("warpspec-sampled-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("profile.csv");
        let mut file = std::fs::File::create(&path).unwrap();
        writeln!(file, "t,f,df,d2f").unwrap();
        let n = 400;
        for i in 0..=n {
            let t = 2.0 * i as f64 / n as f64;
            writeln!(file, "{:e},{:e},{:e},{:e}", t, t.sinh(), t.cosh(), t.sinh()).unwrap();
        }
        drop(file);
        let p = read_profile_csv(&path).unwrap();
        assert_eq!(p.max_radius(), 2.0);
        for t in [0.333, 1.0, 1.777] {
            assert_relative_eq!(p.f(t).unwrap(), t.sinh(), max_relative = 1e-9);
            assert_relative_eq!(p.df(t).unwrap(), t.cosh(), max_relative = 1e-9);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn malformed_sample_csv_is_rejected() {
        use std::io::Write;
        let dir = std::env::temp_dir().join("warpspec-bad-csv-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        let mut file = std::fs::File::create(&path).unwrap();
        writeln!(file, "time,f").unwrap();
        drop(file);
        assert!(matches!(read_profile_csv(&path), Err(Error::Parse { line: 1, .. })));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn geometry_facade_is_consistent() {
        let psi = PsiProfile::exponential_family(0.1, -1.0).unwrap();
        let profile = profile_from_psi(&psi, -1.0, 3.0).unwrap();
        let g = BallGeometry::warped(profile, 3).unwrap();
        assert_eq!(g.dim(), 3);
        assert_eq!(g.max_radius(), 3.0);
        let coeff = g.coefficient().unwrap();
        assert_eq!(coeff.pole_order(), 2.0);
        assert_relative_eq!(
            coeff.eval(1.0),
            g.mean_curvature(1.0).unwrap(),
            max_relative = 1e-14
        );
        // solving beyond the profile's domain fails
        assert!(g.solve(3.5, &SolverOptions::default()).is_err());
    }

    #[test]
    fn realize_builds_each_kind() {
        let g = ProfileSpec::Spaceform { kappa: -1.0 }.realize(3).unwrap();
        assert!(matches!(g, BallGeometry::SpaceForm(_)));
        let g = ProfileSpec::Psi { kappa: -1.0, c: 0.1, radius: 2.0 }.realize(3).unwrap();
        assert!(matches!(g, BallGeometry::Warped { .. }));
        let g = ProfileSpec::Example43 { kappa: -1.0, dim: 4 }.realize(4).unwrap();
        assert_eq!(g.dim(), 4);
    }
}
