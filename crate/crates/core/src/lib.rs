//! Spectral geometry of geodesic balls in rotationally symmetric and
//! diagonal warped metrics: first Dirichlet eigenvalues by shooting,
//! mean-curvature comparison certificates, and fundamental-tone bounds
//! (Rayleigh-quotient brackets, vector-field, cone and warped-product).
//!
//! Modules, bottom to top:
//! - [`spaceform`]: constant-curvature primitives `S_κ`, `C_κ`.
//! - [`radial_ode`]: the shooting eigensolver.
//! - [`warped_metric`]: profile algebra (`ψ`-construction, diagonal
//!   families, serialization).
//! - [`comparison`]: eigenvalue comparison reports with hypothesis checks.
//! - [`bounds`]: certified lower/upper bounds for fundamental tones.

pub mod bounds;
pub mod comparison;
pub mod error;
pub mod grid;
pub mod quad;
pub mod radial_ode;
pub mod spaceform;
pub mod warped_metric;

pub use bounds::{
    barta_bracket, cone_tone_bound, cone_tone_bound_unbounded, divergence_identity_check,
    product_tone_bounds, product_tone_bounds_unbounded, vector_field_bound, BoundCertificate,
    ProductToneInput, RadialMap, TestFunction, TheoremTag,
};
pub use comparison::{
    check_mean_curvature_ordering, compare_eigenvalues, dimension_detect,
    ricci_from_mean_curvature, CompareOptions, ComparisonReport, OrderingReport,
    OrderingVerdict,
};
pub use error::{Error, Result};
pub use grid::Grid;
pub use radial_ode::{
    eigenfunction_log_derivative, shoot, solve_first_eigenvalue, EigenSolution,
    RadialCoefficient, ShootResult, SolverOptions, Trajectory,
};
pub use spaceform::{c_kappa, mckean_tone, reference_mean_curvature, s_kappa, SpaceForm};
pub use warped_metric::{
    diagonal_density_log_derivative, example43_metric, profile_from_psi, psi_of_profile,
    read_profile_csv, BallGeometry, DiagonalMetric, ProfileSpec, PsiProfile, WarpingProfile,
};
