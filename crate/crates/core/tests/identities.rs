//! End-to-end checks through the public re-export surface: geometry
//! construction from wire descriptors, eigenvalue scaling, bound
//! consistency, and the on-disk profile format, composed the way a
//! downstream consumer would.

use warpspec_core::{
    barta_bracket, cone_tone_bound, compare_eigenvalues, dimension_detect,
    divergence_identity_check, mckean_tone, profile_from_psi, read_profile_csv,
    vector_field_bound, BallGeometry, CompareOptions, Error, OrderingVerdict, ProfileSpec,
    PsiProfile, RadialMap, SolverOptions, TestFunction,
};

use approx::assert_relative_eq;

/// In flat space the tone scales like `1/r²`, so `λ₁(B_r)·r²` is the same
/// number (π² in dimension 3) at every radius.
#[test]
fn flat_tone_scales_inversely_with_the_squared_radius() {
    let opts = SolverOptions::default();
    let ball = BallGeometry::space_form(0.0, 3).unwrap();
    let pi2 = std::f64::consts::PI.powi(2);
    for r in [0.5, 1.0, 2.0] {
        let lambda = ball.solve(r, &opts).unwrap().lambda();
        assert_relative_eq!(lambda * r * r, pi2, max_relative = 1e-8);
    }
}

/// A descriptor parsed from JSON realizes into a solvable geometry, and
/// the curvature-shift family with `c > 0` dominates its space form: the
/// ordering scan says so and the eigenvalues agree.
#[test]
fn json_descriptor_realizes_into_a_dominating_geometry() {
    let spec: ProfileSpec =
        serde_json::from_str(r#"{"kind":"psi","kappa":-1.0,"c":0.1,"radius":2.0}"#).unwrap();
    let model = spec.realize(3).unwrap();
    let reference = BallGeometry::space_form(-1.0, 3).unwrap();

    let report = compare_eigenvalues(&model, &reference, 1.5, &CompareOptions::default()).unwrap();
    assert_eq!(report.verdict, OrderingVerdict::Dominates);
    assert!(report.lambda_gap > 0.0, "gap = {}", report.lambda_gap);
    assert!(!report.equality_detected);

    let diag: ProfileSpec =
        serde_json::from_str(r#"{"kind":"example43","kappa":-1.0,"dim":3}"#).unwrap();
    let detected = dimension_detect(&diag.realize(3).unwrap()).unwrap();
    assert_eq!(detected, 3);
}

/// The solved eigenfunction certifies its own eigenvalue: the quotient
/// bracket collapses onto λ from both sides, the vector-field bound
/// reproduces the same lower value, the divergence identity holds at
/// rounding level, and the curvature floor stays below everything.
#[test]
fn bounds_agree_on_the_solved_eigenfunction() {
    let opts = SolverOptions::default();
    let ball = BallGeometry::space_form(-1.0, 3).unwrap();
    let r = 1.2;
    let sol = ball.solve(r, &opts).unwrap();
    let lambda = sol.lambda();

    let coeff = ball.coefficient().unwrap();
    let u = TestFunction::from_eigen_solution(&sol, &coeff).unwrap();

    let bracket = barta_bracket(&coeff, &u, r, 1024).unwrap();
    let lower = bracket.lower.unwrap();
    let upper = bracket.upper.unwrap();
    assert!(lower <= lambda + 1e-9 && lambda <= upper + 1e-9);
    assert!(upper - lower < 1e-6 * lambda, "bracket width {}", upper - lower);

    let field = RadialMap::from_test_function(&u);
    let vf = vector_field_bound(&coeff, &field, r, 1024).unwrap();
    assert!((vf.lower.unwrap() - lower).abs() < 1e-9 * (1.0 + lambda));

    let reference = BallGeometry::space_form(-1.0, 3).unwrap().coefficient().unwrap();
    assert!(divergence_identity_check(&coeff, &reference, &u, 512).unwrap() < 1e-9);

    assert!(mckean_tone(3, -1.0).unwrap() < lambda);
}

/// A profile tabulated to CSV and read back through the public loader
/// solves to the same tone as the closed-form original.
#[test]
fn tabulated_profile_solves_like_its_closed_form() {
    use std::io::Write;
    let dir = std::env::temp_dir().join("warpspec-identities-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sinh.csv");
    let mut file = std::fs::File::create(&path).unwrap();
    writeln!(file, "t,f,df,d2f").unwrap();
    let n = 400;
    for i in 0..=n {
        let t = 2.0 * i as f64 / n as f64;
        writeln!(file, "{:e},{:e},{:e},{:e}", t, t.sinh(), t.cosh(), t.sinh()).unwrap();
    }
    drop(file);

    let profile = read_profile_csv(&path).unwrap();
    let tabulated = BallGeometry::warped(profile, 3).unwrap();
    let exact = BallGeometry::space_form(-1.0, 3).unwrap();

    let opts = SolverOptions::default();
    let lambda_tab = tabulated.solve(1.5, &opts).unwrap().lambda();
    let lambda_exact = exact.solve(1.5, &opts).unwrap().lambda();
    assert_relative_eq!(lambda_tab, lambda_exact, max_relative = 1e-7);

    std::fs::remove_file(&path).ok();
}

/// A cone whose warping slope drops below the reference slope is rejected
/// with the radius where the hypothesis first fails, strictly inside the
/// scanned interval.
#[test]
fn slope_violation_surfaces_an_interior_witness() {
    let psi = PsiProfile::exponential_family(-0.2, -1.0).unwrap();
    let f = profile_from_psi(&psi, -1.0, 1.5).unwrap();
    let g = warpspec_core::WarpingProfile::space_form(-1.0).unwrap();

    let err = cone_tone_bound(&f, 3, &g, 3, 1.0, 512, &SolverOptions::default()).unwrap_err();
    match err {
        Error::HypothesisViolated { witness, .. } => {
            assert!(witness > 0.0 && witness < 1.0, "witness = {witness}");
        }
        other => panic!("expected a hypothesis violation, got {other}"),
    }
}
