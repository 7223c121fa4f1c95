//! First Dirichlet eigenvalue of the radial problem
//!
//! ```text
//!   u'' + a(t)·u' + λ·u = 0,   u(0) = 1, u'(0) = 0, u(r) = 0,
//! ```
//!
//! where `a(t)` is the log-derivative of the volume density of a
//! rotationally symmetric metric, with a `p/t` pole at the origin
//! (`p = n-1` for an n-dimensional ball).
//!
//! Strategy: shooting. For a trial λ the IVP is started just off the pole at
//! `ε = eps_factor·r` from the regular series
//! `u(ε) = 1 - λε²/(2(p+1))`, `u'(ε) = -λε/(p+1)`, then integrated to `r`
//! with an adaptive Dormand–Prince 5(4) pair. λ is bracketed by doubling
//! from zero until the solution crosses zero, then bisected; by Sturm
//! oscillation the infimum of the crossing set is the *first* eigenvalue,
//! and the returned solution is the last trial with a strictly positive
//! profile, so the ground-state invariants (no interior node, `u > 0` on
//! `[0, r)`) hold by construction and are re-checked.
//!
//! Deep hyperbolic problems (large `r·√|κ|`) decay like `e^{-(p√|κ|/2)t}`
//! to far below any absolute tolerance, so the integrator renormalizes the
//! state pair back to order one whenever it shrinks past a threshold and
//! carries the accumulated log-scale separately. Signs, node counts and
//! log-derivatives are scale-free; reported sample values are in true scale.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Radial drift coefficient `a(t)` with its pole order `p` at the origin:
/// `a(t) = p/t + O(t)` as `t -> 0`. Immutable and cheap to clone.
#[derive(Clone)]
pub struct RadialCoefficient {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pole_order: f64,
}

impl std::fmt::Debug for RadialCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialCoefficient").field("pole_order", &self.pole_order).finish()
    }
}

impl RadialCoefficient {
    /// Wrap a coefficient function valid on `(0, r]`. `pole_order >= 1`.
    pub fn new<F>(eval: F, pole_order: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(pole_order >= 1.0) || !pole_order.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pole order must be >= 1, got {pole_order}"
            )));
        }
        Ok(Self { eval: Arc::new(eval), pole_order })
    }

    /// Drift of the space form of curvature `kappa` in dimension `dim`:
    /// `(dim-1)·C_κ/S_κ`.
    pub fn space_form(kappa: f64, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension must be >= 2, got {dim}")));
        }
        let nm1 = (dim - 1) as f64;
        Self::new(
            move |t| nm1 * crate::spaceform::c_kappa(kappa, t) / crate::spaceform::s_kappa(kappa, t),
            nm1,
        )
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn pole_order(&self) -> f64 {
        self.pole_order
    }

    /// Numerical sanity check that `a(t) - p/t` stays bounded near the
    /// origin, i.e. the declared pole order matches the coefficient.
    pub fn validate_pole(&self, r: f64) -> Result<()> {
        for scale in [1e-6, 1e-7] {
            let t = r * scale;
            let g = self.eval(t) - self.pole_order / t;
            if !g.is_finite() || (g * t).abs() > 0.01 {
                return Err(Error::InvalidParameter(format!(
                    "coefficient does not match declared pole order {} near t = 0 \
                     (residual a(t) - p/t = {g:e} at t = {t:e})",
                    self.pole_order
                )));
            }
        }
        Ok(())
    }
}

/// Tunables for [`shoot`] and [`solve_first_eigenvalue`].
#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Relative width of the final λ bracket.
    pub tol: f64,
    /// Series start at `ε = eps_factor · r`.
    pub eps_factor: f64,
    /// Bracket doubling gives up at `λ = lambda_max_factor / r²`.
    pub lambda_max_factor: f64,
    /// Step-size cap `h ≤ max_step_fraction · r` (keeps dense output tight).
    pub max_step_fraction: f64,
    /// Accepted `|u(r)|` residual for a converged solution, in units of
    /// `u(0) = 1`.
    pub boundary_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            eps_factor: 1e-6,
            lambda_max_factor: 1e6,
            max_step_fraction: 1.0 / 64.0,
            boundary_tol: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn validate(&self, r: f64) -> Result<()> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
        }
        if !(self.tol > 1e-14 && self.tol < 1e-2) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must lie in (1e-14, 1e-2), got {}",
                self.tol
            )));
        }
        Ok(())
    }

    /// Local error tolerance handed to the ODE integrator.
    fn ode_tol(&self) -> f64 {
        self.tol / 100.0
    }
}

/// One accepted integration node, in the scale current at that node.
#[derive(Debug, Clone, Copy)]
struct TrajNode {
    t: f64,
    /// Scaled u, u' and u'' (u'' from the right-hand side, not differencing).
    u: f64,
    v: f64,
    w: f64,
    /// True value = stored value · exp(log_scale).
    log_scale: f64,
}

/// Dense-output record of one shot: accepted nodes plus enough data to
/// interpolate `u` and `u'` anywhere in `[0, r]` at integrator accuracy.
#[derive(Debug, Clone)]
pub struct Trajectory {
    nodes: Vec<TrajNode>,
    r: f64,
    lambda: f64,
    pole_order: f64,
    eps: f64,
}

fn hermite(y0: f64, m0: f64, y1: f64, m1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * m0
        + (3.0 * s2 - 2.0 * s3) * y1
        + (s3 - s2) * h * m1
}

impl Trajectory {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    /// Scaled `(u, u', log_scale)` at `t`; true values are
    /// `u·exp(log_scale)` etc. Inside `[0, ε]` the starting series is used.
    fn sample_scaled(&self, t: f64) -> Result<(f64, f64, f64)> {
        if !(0.0..=self.r * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::Domain { t, msg: format!("outside [0, {}]", self.r) });
        }
        let p1 = self.pole_order + 1.0;
        if t <= self.eps {
            let u = 1.0 - self.lambda * t * t / (2.0 * p1);
            let v = -self.lambda * t / p1;
            return Ok((u, v, 0.0));
        }
        // segment lookup: first node with node.t >= t
        let idx = self.nodes.partition_point(|n| n.t < t);
        if idx == 0 {
            let n = self.nodes[0];
            return Ok((n.u, n.v, n.log_scale));
        }
        if idx == self.nodes.len() {
            let n = *self.nodes.last().unwrap();
            return Ok((n.u, n.v, n.log_scale));
        }
        let a = self.nodes[idx - 1];
        let b = self.nodes[idx];
        // express the right endpoint in the left endpoint's scale
        let f = (b.log_scale - a.log_scale).exp();
        let (bu, bv, bw) = (b.u * f, b.v * f, b.w * f);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let u = hermite(a.u, a.v, bu, bv, h, s);
        let v = hermite(a.v, a.w, bv, bw, h, s);
        Ok((u, v, a.log_scale))
    }

    /// True-scale `(u(t), u'(t))`. May underflow to zero for extremely deep
    /// decay; use [`Trajectory::log_derivative`] for scale-free queries.
    pub fn sample(&self, t: f64) -> Result<(f64, f64)> {
        let (u, v, ls) = self.sample_scaled(t)?;
        let e = ls.exp();
        Ok((u * e, v * e))
    }

    /// `-u'(t)/u(t)`, evaluated scale-free. Zero at `t = 0` by symmetry.
    /// Errors within a relative sliver of the Dirichlet zero where the
    /// ratio is no longer resolved.
    pub fn log_derivative(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let (u, v, _) = self.sample_scaled(t)?;
        let scale = u.abs() + self.r * v.abs();
        // the lower bracket edge leaves u(r) positive but ~1e-10*scale, so
        // the guard band must sit above the bisection residual
        if u.abs() <= 1e-9 * scale {
            return Err(Error::Domain {
                t,
                msg: "u(t) below boundary tolerance; log-derivative unresolved".into(),
            });
        }
        Ok(-v / u)
    }
}

/// Outcome of integrating one trial λ across `[0, r]`.
#[derive(Debug, Clone)]
pub struct ShootResult {
    /// `u(r; λ)` in true scale (may underflow for deep decay).
    pub terminal_value: f64,
    /// `u'(r; λ)` in true scale.
    pub terminal_derivative: f64,
    /// Scaled terminal pair; the sign of `terminal_mantissa` is always valid.
    pub terminal_mantissa: f64,
    pub terminal_log_scale: f64,
    /// Number of interior zeros strictly inside `(0, r·(1 - 1e-8))`.
    pub node_count: usize,
    /// Refined positions of *all* detected zeros, including any within the
    /// terminal band.
    pub node_positions: Vec<f64>,
    pub trajectory: Trajectory,
}

impl ShootResult {
    /// True when the profile reached or crossed zero anywhere: the trial λ
    /// is at or above the first eigenvalue.
    pub fn crossed(&self) -> bool {
        self.terminal_mantissa <= 0.0 || !self.node_positions.is_empty()
    }
}

// Dormand–Prince 5(4) coefficients.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] =
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// b - b*: weights of the embedded error estimate (k7 included).
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Rescale the state back into this band whenever it decays below the floor.
const RENORM_FLOOR: f64 = 1e-2;
/// Interior dense samples per accepted step used for node detection.
const DENSE_SAMPLES: usize = 8;
/// Zeros beyond `r·(1 - TERMINAL_BAND)` are reported but not counted as
/// interior nodes (they are the Dirichlet zero itself, seen at finite
/// tolerance).
const TERMINAL_BAND: f64 = 1e-8;

/// Integrate the IVP for a trial `lambda` and report the terminal data,
/// node information and the dense trajectory.
pub fn shoot(
    coeff: &RadialCoefficient,
    r: f64,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<ShootResult> {
    opts.validate(r)?;
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let p1 = coeff.pole_order + 1.0;
    let eps = opts.eps_factor * r;
    let mut t = eps;
    let mut y = [1.0 - lambda * eps * eps / (2.0 * p1), -lambda * eps / p1];
    let mut log_scale = 0.0f64;

    let rhs = |t: f64, y: [f64; 2]| -> Result<[f64; 2]> {
        let a = coeff.eval(t);
        if !a.is_finite() {
            return Err(Error::StepFailure { t, msg: "coefficient not finite".into() });
        }
        Ok([y[1], -a * y[1] - lambda * y[0]])
    };

    let tol = opts.ode_tol();
    let h_max = r * opts.max_step_fraction;
    let mut h = (0.1 * eps).min(h_max);
    let mut k1 = rhs(t, y)?;
    let mut nodes = vec![TrajNode { t, u: y[0], v: y[1], w: k1[1], log_scale }];
    let mut crossings: Vec<f64> = Vec::new();
    let band_edge = r * (1.0 - TERMINAL_BAND);
    let mut steps = 0usize;

    while t < r {
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::StepFailure { t, msg: "step budget exhausted".into() });
        }
        if h < r * 1e-15 {
            return Err(Error::StepFailure { t, msg: format!("step size collapsed ({h:e})") });
        }
        let h_try = h.min(r - t);

        // stages
        let mut k = [[0.0f64; 2]; 7];
        k[0] = k1;
        let stage = |acc: &[f64], ks: &[[f64; 2]]| {
            let mut s = y;
            for (a, kk) in acc.iter().zip(ks) {
                s[0] += h_try * a * kk[0];
                s[1] += h_try * a * kk[1];
            }
            s
        };
        k[1] = rhs(t + h_try / 5.0, stage(&A2, &k[..1]))?;
        k[2] = rhs(t + 3.0 * h_try / 10.0, stage(&A3, &k[..2]))?;
        k[3] = rhs(t + 4.0 * h_try / 5.0, stage(&A4, &k[..3]))?;
        k[4] = rhs(t + 8.0 * h_try / 9.0, stage(&A5, &k[..4]))?;
        k[5] = rhs(t + h_try, stage(&A6, &k[..5]))?;
        let mut y5 = y;
        for (b, kk) in B.iter().zip(&k[..6]) {
            y5[0] += h_try * b * kk[0];
            y5[1] += h_try * b * kk[1];
        }
        k[6] = rhs(t + h_try, y5)?; // FSAL stage

        let mut err: f64 = 0.0;
        for i in 0..2 {
            let mut e = 0.0;
            for (w, kk) in E.iter().zip(&k) {
                e += w * kk[i];
            }
            e *= h_try;
            let sc = tol + tol * y[i].abs().max(y5[i].abs());
            err = err.max((e / sc).abs());
        }

        if err <= 1.0 {
            // accepted: count sign changes on the dense subdivision
            let u0 = y[0];
            let v0 = y[1];
            let (u1, v1) = (y5[0], y5[1]);
            let mut prev = u0;
            let mut prev_s = 0.0;
            for j in 1..=DENSE_SAMPLES + 1 {
                let s = j as f64 / (DENSE_SAMPLES + 1) as f64;
                let val =
                    if j == DENSE_SAMPLES + 1 { u1 } else { hermite(u0, v0, u1, v1, h_try, s) };
                if (prev > 0.0 && val < 0.0) || (prev < 0.0 && val > 0.0) || val == 0.0 && prev != 0.0 {
                    // refine the crossing on the cubic
                    let (mut lo, mut hi) = (prev_s, s);
                    let flo = prev;
                    for _ in 0..60 {
                        let m = 0.5 * (lo + hi);
                        let fm = hermite(u0, v0, u1, v1, h_try, m);
                        if (fm > 0.0) == (flo > 0.0) {
                            lo = m;
                        } else {
                            hi = m;
                        }
                    }
                    crossings.push(t + 0.5 * (lo + hi) * h_try);
                }
                prev = val;
                prev_s = s;
            }

            t += h_try;
            y = y5;
            k1 = k[6];
            // renormalize decayed states; the ODE is linear, so this is exact
            let m = y[0].abs().max(y[1].abs() * r.max(1.0));
            if m > 0.0 && m < RENORM_FLOOR {
                let f = 1.0 / m;
                y[0] *= f;
                y[1] *= f;
                k1[0] *= f;
                k1[1] *= f;
                log_scale += m.ln();
            }
            nodes.push(TrajNode { t, u: y[0], v: y[1], w: k1[1], log_scale });
        }

        // PI-free step controller with the usual safety clamp
        let fac = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h = (h_try * fac.clamp(0.2, 5.0)).min(h_max);
    }

    let node_count = crossings.iter().filter(|&&c| c < band_edge).count();
    let e = log_scale.exp();
    Ok(ShootResult {
        terminal_value: y[0] * e,
        terminal_derivative: y[1] * e,
        terminal_mantissa: y[0],
        terminal_log_scale: log_scale,
        node_count,
        node_positions: crossings,
        trajectory: Trajectory { nodes, r, lambda, pole_order: coeff.pole_order, eps },
    })
}

/// A converged first Dirichlet eigenpair on the ball of radius `r`.
///
/// `grid`/`u_samples`/`du_samples` are the accepted integration nodes in
/// true scale, prefixed by the origin `(0, 1, 0)`; arbitrary points are
/// available through [`EigenSolution::sample_at`].
#[derive(Debug, Clone)]
pub struct EigenSolution {
    lambda: f64,
    grid: Vec<f64>,
    u_samples: Vec<f64>,
    du_samples: Vec<f64>,
    node_count: usize,
    bracket_width: f64,
    tol: f64,
    boundary_residual: f64,
    pole_order: f64,
    trajectory: Trajectory,
}

impl EigenSolution {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn u_samples(&self) -> &[f64] {
        &self.u_samples
    }
    pub fn du_samples(&self) -> &[f64] {
        &self.du_samples
    }
    pub fn node_count(&self) -> usize {
        self.node_count
    }
    /// Absolute width of the final λ bracket.
    pub fn bracket_width(&self) -> f64 {
        self.bracket_width
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
    /// `|u(r)|` of the converged profile, in units of `u(0) = 1`.
    pub fn boundary_residual(&self) -> f64 {
        self.boundary_residual
    }
    pub fn radius(&self) -> f64 {
        self.trajectory.r
    }
    pub fn pole_order(&self) -> f64 {
        self.pole_order
    }
    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }

    /// `(u(t), u'(t))` in true scale, dense-output accurate.
    pub fn sample_at(&self, t: f64) -> Result<(f64, f64)> {
        self.trajectory.sample(t)
    }

    /// `-u'(t)/u(t)` for the converged eigenfunction.
    pub fn log_derivative(&self, t: f64) -> Result<f64> {
        self.trajectory.log_derivative(t)
    }
}

/// `-u'/u` of a converged eigenfunction; radial drift of the gradient flow
/// used by the vector-field bounds.
pub fn eigenfunction_log_derivative(sol: &EigenSolution, t: f64) -> Result<f64> {
    sol.log_derivative(t)
}

/// Find the first Dirichlet eigenvalue by bracketing and bisection.
///
/// The returned solution is evaluated at the lower bracket edge, the
/// largest trial λ whose profile stayed strictly positive, so `u > 0` on
/// `[0, r)` holds exactly; `lambda` is within `bracket_width` of the
/// Dirichlet point and `bracket_width <= tol·lambda`.
pub fn solve_first_eigenvalue(
    coeff: &RadialCoefficient,
    r: f64,
    opts: &SolverOptions,
) -> Result<EigenSolution> {
    opts.validate(r)?;
    coeff.validate_pole(r)?;

    let lambda_max = opts.lambda_max_factor / (r * r);
    let mut lo = 0.0f64;
    let mut hi = 1.0 / (r * r);
    loop {
        let s = shoot(coeff, r, hi, opts)?;
        if s.crossed() {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > lambda_max {
            return Err(Error::BracketNotFound { lambda_max });
        }
    }

    let mut iterations = 0usize;
    while hi - lo > opts.tol * hi {
        iterations += 1;
        if iterations > 200 {
            return Err(Error::Internal(format!(
                "bisection failed to converge: bracket [{lo}, {hi}]"
            )));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket at floating-point resolution
        }
        if shoot(coeff, r, mid, opts)?.crossed() {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    // evaluate at the positive edge of the bracket
    let fin = shoot(coeff, r, lo, opts)?;
    if fin.node_count > 0 {
        return Err(Error::Internal(format!(
            "converged ground state has {} interior node(s); first node at t = {:e}",
            fin.node_count, fin.node_positions[0]
        )));
    }
    let boundary_residual = fin.terminal_value.abs();
    if boundary_residual > opts.boundary_tol.max(1e-3) {
        return Err(Error::Internal(format!(
            "boundary residual |u(r)| = {boundary_residual:e} exceeds tolerance"
        )));
    }

    let mut grid = Vec::with_capacity(fin.trajectory.nodes.len() + 1);
    let mut u_samples = Vec::with_capacity(grid.capacity());
    let mut du_samples = Vec::with_capacity(grid.capacity());
    grid.push(0.0);
    u_samples.push(1.0);
    du_samples.push(0.0);
    for n in &fin.trajectory.nodes {
        let e = n.log_scale.exp();
        grid.push(n.t);
        u_samples.push(n.u * e);
        du_samples.push(n.v * e);
    }

    Ok(EigenSolution {
        lambda: lo,
        grid,
        u_samples,
        du_samples,
        node_count: 0,
        bracket_width: hi - lo,
        tol: opts.tol,
        boundary_residual,
        pole_order: coeff.pole_order,
        trajectory: fin.trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    // Frozen before the solver was written, from an independent
    // series-plus-bisection root finder for J0 (see tests/acceptance.rs for
    // the live oracle): j_{0,1}^2.
    const J01_SQ: f64 = 5.783185962946785;

    fn euclidean(dim: usize) -> RadialCoefficient {
        RadialCoefficient::space_form(0.0, dim).unwrap()
    }

    #[test]
    fn unit_ball_r3_is_pi_squared() {
        let sol =
            solve_first_eigenvalue(&euclidean(3), 1.0, &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.lambda(), PI * PI, max_relative = 1e-9);
        assert_eq!(sol.node_count(), 0);
        assert!(sol.boundary_residual() < 1e-6);
        // eigenfunction is sin(πt)/(πt)
        let (u, _) = sol.sample_at(0.5).unwrap();
        assert_relative_eq!(u, (PI * 0.5).sin() / (PI * 0.5), max_relative = 1e-7);
        // -u'/u at t = 1/2 equals 1/t - π·cot(πt) = 2
        assert_relative_eq!(sol.log_derivative(0.5).unwrap(), 2.0, max_relative = 1e-7);
    }

    #[test]
    fn unit_disk_r2_matches_bessel_oracle() {
        let sol =
            solve_first_eigenvalue(&euclidean(2), 1.0, &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.lambda(), J01_SQ, max_relative = 1e-8);
    }

    #[test]
    fn hemisphere_eigenvalue_is_three() {
        let coeff = RadialCoefficient::space_form(1.0, 3).unwrap();
        let sol = solve_first_eigenvalue(&coeff, PI / 2.0, &SolverOptions::default()).unwrap();
        assert_relative_eq!(sol.lambda(), 3.0, max_relative = 1e-9);
        // eigenfunction is cos(t)
        let (u, du) = sol.sample_at(1.0).unwrap();
        assert_relative_eq!(u, 1.0f64.cos(), max_relative = 1e-7);
        assert_relative_eq!(du, -1.0f64.sin(), max_relative = 1e-6);
    }

    #[test]
    fn shoot_at_the_eigenvalue_hits_zero() {
        let s = shoot(&euclidean(3), 1.0, PI * PI, &SolverOptions::default()).unwrap();
        assert_abs_diff_eq!(s.terminal_value, 0.0, epsilon = 1e-9);
        assert_eq!(s.node_count, 0);
    }

    #[test]
    fn shoot_above_second_eigenvalue_counts_a_node() {
        // u = sin(2πt)/(2πt) vanishes at t = 1/2 and t = 1
        let s = shoot(&euclidean(3), 1.0, 4.0 * PI * PI, &SolverOptions::default()).unwrap();
        assert_eq!(s.node_count, 1);
        assert_relative_eq!(s.node_positions[0], 0.5, max_relative = 1e-8);
    }

    #[test]
    fn terminal_value_strictly_decreasing_below_lambda1() {
        let opts = SolverOptions::default();
        let mut prev = f64::INFINITY;
        for i in 0..=8 {
            let lambda = PI * PI * i as f64 / 8.0;
            let s = shoot(&euclidean(3), 1.0, lambda, &opts).unwrap();
            assert!(s.terminal_value < prev, "not decreasing at lambda = {lambda}");
            prev = s.terminal_value;
        }
    }

    #[test]
    fn euclidean_scaling_invariance() {
        // λ₁(B(r))·r² is constant
        let opts = SolverOptions::default();
        let base = solve_first_eigenvalue(&euclidean(3), 1.0, &opts).unwrap().lambda();
        for r in [0.5, 2.0, 3.0] {
            let l = solve_first_eigenvalue(&euclidean(3), r, &opts).unwrap().lambda();
            assert_relative_eq!(l * r * r, base, max_relative = 1e-8);
        }
    }

    #[test]
    fn series_start_insensitive() {
        let opts = SolverOptions::default();
        let tight = SolverOptions { eps_factor: 1e-7, ..SolverOptions::default() };
        let a = solve_first_eigenvalue(&euclidean(3), 1.0, &opts).unwrap().lambda();
        let b = solve_first_eigenvalue(&euclidean(3), 1.0, &tight).unwrap().lambda();
        assert_relative_eq!(a, b, max_relative = 1e-9);
    }

    #[test]
    fn domain_monotonicity() {
        // larger ball, smaller tone
        let opts = SolverOptions::default();
        let small = solve_first_eigenvalue(&euclidean(3), 0.8, &opts).unwrap().lambda();
        let large = solve_first_eigenvalue(&euclidean(3), 1.2, &opts).unwrap().lambda();
        assert!(large < small);
    }

    #[test]
    fn hyperbolic_disk_approaches_mckean_constant() {
        // λ₁(B(r)) in H² decreases to 1/4 as r -> ∞
        let coeff = RadialCoefficient::space_form(-1.0, 2).unwrap();
        let opts = SolverOptions::default();
        let l20 = solve_first_eigenvalue(&coeff, 20.0, &opts).unwrap().lambda();
        assert!(l20 > 0.25 && l20 < 0.28, "lambda(20) = {l20}");
    }

    #[test]
    fn deep_decay_is_renormalized_not_lost() {
        // κ = -4, n = 3: tone of the full space is (n-1)²·|κ|/4 = 4, and the
        // true solution decays like e^{-2t}; at r = 30 the terminal scale is
        // ~1e-26, far below any absolute tolerance. The λ estimate only
        // stays correct because of state renormalization.
        let coeff = RadialCoefficient::space_form(-4.0, 3).unwrap();
        let sol = solve_first_eigenvalue(&coeff, 30.0, &SolverOptions::default()).unwrap();
        assert!(sol.lambda() > 4.0 && sol.lambda() < 4.1, "lambda = {}", sol.lambda());
    }

    #[test]
    fn pole_order_mismatch_is_rejected() {
        // claims p = 1 but behaves like 2/t
        let bad = RadialCoefficient::new(|t| 2.0 / t, 1.0).unwrap();
        assert!(solve_first_eigenvalue(&bad, 1.0, &SolverOptions::default()).is_err());
    }

    #[test]
    fn log_derivative_guards_the_boundary() {
        let sol =
            solve_first_eigenvalue(&euclidean(3), 1.0, &SolverOptions::default()).unwrap();
        assert!(sol.log_derivative(0.0).unwrap() == 0.0);
        assert!(sol.log_derivative(1.0).is_err()); // at the Dirichlet zero
        assert!(sol.log_derivative(1.5).is_err()); // outside the ball
    }

    #[test]
    fn eigenfunction_is_positive_and_decreasing() {
        let sol =
            solve_first_eigenvalue(&euclidean(3), 1.0, &SolverOptions::default()).unwrap();
        let u = sol.u_samples();
        for i in 0..u.len() - 1 {
            assert!(u[i] > 0.0);
            assert!(u[i + 1] <= u[i] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let opts = SolverOptions::default();
        assert!(solve_first_eigenvalue(&euclidean(3), -1.0, &opts).is_err());
        assert!(solve_first_eigenvalue(&euclidean(3), f64::INFINITY, &opts).is_err());
        assert!(shoot(&euclidean(3), 1.0, -1.0, &opts).is_err());
        let loose = SolverOptions { tol: 0.5, ..opts };
        assert!(solve_first_eigenvalue(&euclidean(3), 1.0, &loose).is_err());
        assert!(RadialCoefficient::new(|t| 1.0 / t, 0.5).is_err());
    }
}
