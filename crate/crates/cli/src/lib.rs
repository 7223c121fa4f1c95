//! Command-line front end for the warpspec toolkit: eigenvalue solves,
//! metric comparisons, profile construction, and tone-bound certificates,
//! with deterministic JSON reports and plot-ready curve files.
//!
//! Exit codes: `0` success, `2` theorem hypothesis violated by the input
//! (a valid mathematical outcome, reported with the witnessing radius),
//! `1` anything else. Curve and table artifacts are formatted with fixed
//! 17-significant-digit floats so golden files are byte-stable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use warpspec_core::{
    barta_bracket, check_mean_curvature_ordering, compare_eigenvalues, cone_tone_bound,
    cone_tone_bound_unbounded, example43_metric, product_tone_bounds,
    product_tone_bounds_unbounded, profile_from_psi, solve_first_eigenvalue, BallGeometry,
    BoundCertificate, CompareOptions, Error as CoreError, ProductToneInput, PsiProfile,
    RadialCoefficient, RadialMap, SolverOptions, TestFunction, WarpingProfile,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("failed to write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Parser, Debug)]
#[command(
    name = "warpspec",
    version,
    about = "First Dirichlet eigenvalues of geodesic balls in warped metrics: \
             solves, comparisons, and certified tone bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the first Dirichlet eigenvalue of a geodesic ball.
    Eigen(EigenArgs),
    /// Compare a model ball against the constant-curvature reference.
    Compare(CompareArgs),
    /// Build a warping profile from a shift family and emit its table.
    #[command(name = "construct-psi")]
    ConstructPsi(ConstructPsiArgs),
    /// Two-sided eigenvalue bracket from a positive test function.
    Barta(BartaArgs),
    /// Lower tone bound for a cone over a reference ball.
    Cone(ConeArgs),
    /// Tone bounds for a warped product over a ball.
    Product(ProductArgs),
    /// Diagonal metric with the density of the space form: solve both and
    /// report the non-isometry witness.
    Example43(Example43Args),
}

#[derive(Args, Debug, Clone)]
pub struct BallArgs {
    /// Sectional curvature of the space-form background.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Dimension of the ball (>= 2).
    #[arg(long)]
    pub dim: usize,
    /// Geodesic radius.
    #[arg(long)]
    pub radius: f64,
}

#[derive(Args, Debug, Clone)]
pub struct NumericArgs {
    /// Relative eigenvalue tolerance, strictly between 1e-14 and 1e-2.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Points for scans, curves, and tables (>= 64).
    #[arg(long, default_value_t = 1024)]
    pub grid_points: usize,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Format of curve/table artifacts (reports are always JSON).
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct EigenArgs {
    #[command(flatten)]
    pub ball: BallArgs,
    /// Shift-family coefficient; omitted means the plain space form.
    #[arg(long, allow_negative_numbers = true)]
    pub psi_c: Option<f64>,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Also write the eigenfunction samples (t, u) to this file.
    #[arg(long, value_name = "PATH")]
    pub curve: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Rotationally symmetric metric from the shift family.
    Psi,
    /// Diagonal metric sharing the reference density.
    Example43,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Model metric to compare against the space form.
    #[arg(long, value_enum, default_value_t = ModelKind::Psi)]
    pub model: ModelKind,
    /// Shift-family coefficient (0 reduces to the space form itself).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub psi_c: f64,
    #[command(flatten)]
    pub ball: BallArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Also write the mean-curvature margin curve to this file.
    #[arg(long, value_name = "PATH")]
    pub curve: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConstructPsiArgs {
    /// Background curvature of the shift family.
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: f64,
    /// Shift-family coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub psi_c: f64,
    /// Largest radius of the emitted table.
    #[arg(long)]
    pub radius: f64,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunctionKind {
    /// The cap 1 - (t/r)².
    Cap,
    /// The computed eigenfunction (collapses the bracket).
    Eigenfunction,
}

#[derive(Args, Debug)]
pub struct BartaArgs {
    #[command(flatten)]
    pub ball: BallArgs,
    /// Test function for the bracket.
    #[arg(long, value_enum, default_value_t = TestFunctionKind::Cap)]
    pub test_function: TestFunctionKind,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ConeArgs {
    #[command(flatten)]
    pub ball: BallArgs,
    /// Shift-family coefficient of the cone warping (0 means the cone over
    /// the reference link, the tight case).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub psi_c: f64,
    /// Certify the unbounded cone instead of the truncation at --radius.
    #[arg(long)]
    pub unbounded: bool,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ProductArgs {
    #[command(flatten)]
    pub ball: BallArgs,
    /// Shift-family coefficient of the base warping (0 means space form).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub psi_c: f64,
    /// Constant fiber warping g > 0.
    #[arg(long, default_value_t = 1.0)]
    pub g_const: f64,
    /// Dimension of the fiber factor.
    #[arg(long, default_value_t = 1)]
    pub fiber_dim: usize,
    /// First Dirichlet eigenvalue (or tone) of the fiber.
    #[arg(long)]
    pub lambda_fiber: f64,
    /// Use the whole-space reference tone; --radius becomes the scan horizon.
    #[arg(long)]
    pub unbounded: bool,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct Example43Args {
    #[command(flatten)]
    pub ball: BallArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Report emitted by `eigen`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EigenReport {
    pub kappa: f64,
    pub dim: usize,
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub psi_c: Option<f64>,
    pub lambda: f64,
    pub bracket_width: f64,
    pub node_count: usize,
    pub boundary_residual: f64,
    pub tol: f64,
}

/// Report emitted by `product`: either side may be absent.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProductReport {
    pub lower: Option<BoundCertificate>,
    pub upper: Option<BoundCertificate>,
}

/// Report emitted by `example43`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Example43Report {
    pub kappa: f64,
    pub dim: usize,
    pub radius: f64,
    pub lambda_diagonal: f64,
    pub lambda_reference: f64,
    pub lambda_gap: f64,
    pub witness_t: f64,
    pub nonisometry_witness: f64,
    pub tol: f64,
}

/// One sample of a curve artifact.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CurveRow {
    pub t: f64,
    pub value: f64,
}

/// One row of a profile table artifact.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProfileRow {
    pub t: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// Execute a parsed invocation and map the outcome to an exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Core(CoreError::HypothesisViolated { witness, msg })) => {
            // not a failure: the theorem simply does not cover this input,
            // and the witness says where
            let verdict = serde_json::json!({
                "outcome": "hypothesis_violated",
                "witness": witness,
                "message": msg,
            });
            match serde_json::to_string_pretty(&verdict) {
                Ok(text) => println!("{text}"),
                Err(e) => eprintln!("error: {e}"),
            }
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eigen(args) => run_eigen(args),
        Command::Compare(args) => run_compare(args),
        Command::ConstructPsi(args) => run_construct_psi(args),
        Command::Barta(args) => run_barta(args),
        Command::Cone(args) => run_cone(args),
        Command::Product(args) => run_product(args),
        Command::Example43(args) => run_example43(args),
    }
}

fn validate_numeric(numeric: &NumericArgs) -> Result<(), CliError> {
    if !(numeric.tol > 1e-14 && numeric.tol < 1e-2) {
        return Err(CliError::Usage(format!(
            "--tol must lie strictly between 1e-14 and 1e-2, got {}",
            numeric.tol
        )));
    }
    if numeric.grid_points < 64 {
        return Err(CliError::Usage(format!(
            "--grid-points must be at least 64, got {}",
            numeric.grid_points
        )));
    }
    Ok(())
}

fn validate_ball(kappa: f64, dim: Option<usize>, radius: f64) -> Result<(), CliError> {
    if !kappa.is_finite() {
        return Err(CliError::Usage(format!("--kappa must be finite, got {kappa}")));
    }
    if let Some(d) = dim {
        if d < 2 {
            return Err(CliError::Usage(format!("--dim must be at least 2, got {d}")));
        }
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(CliError::Usage(format!(
            "--radius must be positive and finite, got {radius}"
        )));
    }
    if kappa > 0.0 {
        let conjugate = std::f64::consts::PI / kappa.sqrt();
        if radius >= conjugate {
            return Err(CliError::Usage(format!(
                "the ball must stay inside the conjugate locus: \
                 --radius < pi/sqrt(kappa) = {conjugate}"
            )));
        }
    }
    Ok(())
}

/// Ball geometry for the shift family: `None` is the plain space form,
/// `Some(c)` builds the reconstructed profile (even for `c = 0`, so the
/// zero shift exercises the same path as every other coefficient).
fn geometry_for(
    kappa: f64,
    dim: usize,
    radius: f64,
    psi_c: Option<f64>,
) -> Result<BallGeometry, CliError> {
    let geo = match psi_c {
        None => BallGeometry::space_form(kappa, dim)?,
        Some(c) => {
            let psi = PsiProfile::exponential_family(c, kappa)?;
            let profile = profile_from_psi(&psi, kappa, 1.5 * radius)?;
            BallGeometry::warped(profile, dim)?
        }
    };
    Ok(geo)
}

/// Cone/product warping for the shift family; `c = 0` short-circuits to
/// the closed-form space form so the tight case is bit-exact.
fn profile_for(kappa: f64, radius: f64, psi_c: f64) -> Result<WarpingProfile, CliError> {
    if psi_c == 0.0 {
        return Ok(WarpingProfile::space_form(kappa)?);
    }
    let psi = PsiProfile::exponential_family(psi_c, kappa)?;
    Ok(profile_from_psi(&psi, kappa, 1.5 * radius)?)
}

fn run_eigen(args: EigenArgs) -> Result<(), CliError> {
    validate_numeric(&args.numeric)?;
    validate_ball(args.ball.kappa, Some(args.ball.dim), args.ball.radius)?;
    let geo = geometry_for(args.ball.kappa, args.ball.dim, args.ball.radius, args.psi_c)?;
    let sol = geo.solve(args.ball.radius, &SolverOptions::with_tol(args.numeric.tol))?;
    let report = EigenReport {
        kappa: args.ball.kappa,
        dim: args.ball.dim,
        radius: args.ball.radius,
        psi_c: args.psi_c,
        lambda: sol.lambda(),
        bracket_width: sol.bracket_width(),
        node_count: sol.node_count(),
        boundary_residual: sol.boundary_residual(),
        tol: args.numeric.tol,
    };
    emit_report(&report, &args.out)?;
    if let Some(path) = &args.curve {
        let n = args.numeric.grid_points;
        let mut rows = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = args.ball.radius * i as f64 / n as f64;
            rows.push(CurveRow { t, value: sol.sample_at(t)?.0 });
        }
        emit_curve(&rows, path, args.out.format)?;
    }
    Ok(())
}

fn run_compare(args: CompareArgs) -> Result<(), CliError> {
    validate_numeric(&args.numeric)?;
    validate_ball(args.ball.kappa, Some(args.ball.dim), args.ball.radius)?;
    let model = match args.model {
        ModelKind::Psi => {
            geometry_for(args.ball.kappa, args.ball.dim, args.ball.radius, Some(args.psi_c))?
        }
        ModelKind::Example43 => {
            BallGeometry::diagonal(example43_metric(args.ball.kappa, args.ball.dim)?)
        }
    };
    let reference = BallGeometry::space_form(args.ball.kappa, args.ball.dim)?;
    let mut opts = CompareOptions::with_tol(args.numeric.tol);
    opts.grid_points = args.numeric.grid_points;
    let report = compare_eigenvalues(&model, &reference, args.ball.radius, &opts)?;
    emit_report(&report, &args.out)?;
    if let Some(path) = &args.curve {
        let ordering = check_mean_curvature_ordering(&model, &reference, args.ball.radius, &opts)?;
        let rows: Vec<CurveRow> =
            ordering.margins.iter().map(|&(t, value)| CurveRow { t, value }).collect();
        emit_curve(&rows, path, args.out.format)?;
    }
    Ok(())
}

fn run_construct_psi(args: ConstructPsiArgs) -> Result<(), CliError> {
    validate_numeric(&args.numeric)?;
    validate_ball(args.kappa, None, args.radius)?;
    let psi = PsiProfile::exponential_family(args.psi_c, args.kappa)?;
    let profile = profile_from_psi(&psi, args.kappa, args.radius)?;
    let n = args.numeric.grid_points;
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = args.radius * i as f64 / n as f64;
        rows.push(ProfileRow { t, f: profile.f(t)?, df: profile.df(t)?, d2f: profile.d2f(t)? });
    }
    emit_table(&rows, &args.out)
}

fn run_barta(args: BartaArgs) -> Result<(), CliError> {
    validate_numeric(&args.numeric)?;
    validate_ball(args.ball.kappa, Some(args.ball.dim), args.ball.radius)?;
    let coeff = RadialCoefficient::space_form(args.ball.kappa, args.ball.dim)?;
    let u = match args.test_function {
        TestFunctionKind::Cap => TestFunction::polynomial_cap(args.ball.radius)?,
        TestFunctionKind::Eigenfunction => {
            let sol = solve_first_eigenvalue(
                &coeff,
                args.ball.radius,
                &SolverOptions::with_tol(args.numeric.tol),
            )?;
            TestFunction::from_eigen_solution(&sol, &coeff)?
        }
    };
    let cert = barta_bracket(&coeff, &u, args.ball.radius, args.numeric.grid_points)?;
    emit_report(&cert, &args.out)
}

fn run_cone(args: ConeArgs) -> Result<(), CliError> {
    validate_numeric(&args.numeric)?;
    validate_ball(args.ball.kappa, Some(args.ball.dim), args.ball.radius)?;
    let g = WarpingProfile::space_form(args.ball.kappa)?;
    let opts = SolverOptions::with_tol(args.numeric.tol);
    let cert = if args.unbounded {
        if args.psi_c != 0.0 {
            return Err(CliError::Usage(
                "the unbounded cone needs a warping on all of [0, inf); the shift \
                 family is built on a finite table -- drop --unbounded or set --psi-c 0"
                    .into(),
            ));
        }
        cone_tone_bound_unbounded(
            &g.clone(),
            args.ball.dim,
            &g,
            args.ball.dim,
            args.numeric.grid_points,
            &opts,
        )?
    } else {
        let f = profile_for(args.ball.kappa, args.ball.radius, args.psi_c)?;
        cone_tone_bound(
            &f,
            args.ball.dim,
            &g,
            args.ball.dim,
            args.ball.radius,
            args.numeric.grid_points,
            &opts,
        )?
    };
    emit_report(&cert, &args.out)
}

fn run_product(args: ProductArgs) -> Result<(), CliError> {
    validate_numeric(&args.numeric)?;
    validate_ball(args.ball.kappa, Some(args.ball.dim), args.ball.radius)?;
    if args.unbounded && args.psi_c != 0.0 {
        return Err(CliError::Usage(
            "the unbounded product compares against the whole space form; \
             drop --unbounded or set --psi-c 0"
                .into(),
        ));
    }
    let input = ProductToneInput {
        base_profile: profile_for(args.ball.kappa, args.ball.radius, args.psi_c)?,
        base_dim: args.ball.dim,
        fiber_warp: RadialMap::constant(args.g_const),
        fiber_dim: args.fiber_dim,
        kappa: args.ball.kappa,
        reference_dim: args.ball.dim,
        radius: args.ball.radius,
        lambda_fiber: args.lambda_fiber,
    };
    let report = if args.unbounded {
        let cert = product_tone_bounds_unbounded(&input, args.numeric.grid_points)?;
        ProductReport { lower: Some(cert), upper: None }
    } else {
        let opts = SolverOptions::with_tol(args.numeric.tol);
        let (lower, upper) = product_tone_bounds(&input, args.numeric.grid_points, &opts)?;
        ProductReport { lower, upper }
    };
    emit_report(&report, &args.out)
}

fn run_example43(args: Example43Args) -> Result<(), CliError> {
    validate_numeric(&args.numeric)?;
    validate_ball(args.ball.kappa, Some(args.ball.dim), args.ball.radius)?;
    let metric = example43_metric(args.ball.kappa, args.ball.dim)?;
    let witness_t = if metric.max_radius() > 1.0 { 1.0 } else { 0.5 * metric.max_radius() };
    let witness = metric.nonisometry_witness(args.ball.kappa, witness_t)?;
    let opts = SolverOptions::with_tol(args.numeric.tol);
    let lambda_diagonal = BallGeometry::diagonal(metric).solve(args.ball.radius, &opts)?.lambda();
    let lambda_reference = BallGeometry::space_form(args.ball.kappa, args.ball.dim)?
        .solve(args.ball.radius, &opts)?
        .lambda();
    let report = Example43Report {
        kappa: args.ball.kappa,
        dim: args.ball.dim,
        radius: args.ball.radius,
        lambda_diagonal,
        lambda_reference,
        lambda_gap: lambda_diagonal - lambda_reference,
        witness_t,
        nonisometry_witness: witness,
        tol: args.numeric.tol,
    };
    emit_report(&report, &args.out)
}

/// Fixed 17-significant-digit decimal, the artifact float format.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_artifact(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Reports are always JSON: pretty-printed, trailing newline, stdout
/// unless `--output` was given.
fn emit_report<T: Serialize>(report: &T, out: &OutputArgs) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match &out.output {
        Some(path) => write_artifact(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Write curve samples: CSV with header `t,value`, or a JSON array of
/// `{t, value}` rows. Refuses empty input without touching the file.
pub fn emit_curve(rows: &[CurveRow], path: &Path, format: OutputFormat) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Usage("refusing to write an empty curve".into()));
    }
    let mut body = String::new();
    match format {
        OutputFormat::Csv => {
            body.push_str("t,value\n");
            for row in rows {
                let _ = writeln!(body, "{},{}", fmt17(row.t), fmt17(row.value));
            }
        }
        OutputFormat::Json => {
            body.push_str("[\n");
            for (i, row) in rows.iter().enumerate() {
                let sep = if i + 1 == rows.len() { "" } else { "," };
                let _ = writeln!(
                    body,
                    "  {{\"t\":{},\"value\":{}}}{}",
                    fmt17(row.t),
                    fmt17(row.value),
                    sep
                );
            }
            body.push_str("]\n");
        }
    }
    write_artifact(path, &body)
}

/// Profile tables: CSV in the `t,f,df,d2f` sampled-profile layout (the
/// same one the `sampled` profile kind reads back), or a JSON row array.
fn emit_table(rows: &[ProfileRow], out: &OutputArgs) -> Result<(), CliError> {
    if rows.is_empty() {
        return Err(CliError::Usage("refusing to write an empty table".into()));
    }
    let mut body = String::new();
    match out.format {
        OutputFormat::Csv => {
            body.push_str("t,f,df,d2f\n");
            for row in rows {
                let _ = writeln!(
                    body,
                    "{},{},{},{}",
                    fmt17(row.t),
                    fmt17(row.f),
                    fmt17(row.df),
                    fmt17(row.d2f)
                );
            }
        }
        OutputFormat::Json => {
            body.push_str("[\n");
            for (i, row) in rows.iter().enumerate() {
                let sep = if i + 1 == rows.len() { "" } else { "," };
                let _ = writeln!(
                    body,
                    "  {{\"t\":{},\"f\":{},\"df\":{},\"d2f\":{}}}{}",
                    fmt17(row.t),
                    fmt17(row.f),
                    fmt17(row.df),
                    fmt17(row.d2f),
                    sep
                );
            }
            body.push_str("]\n");
        }
    }
    match &out.output {
        Some(path) => write_artifact(path, &body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
