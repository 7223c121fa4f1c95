//! End-to-end tests of the `warpspec` binary: golden artifacts stay
//! byte-identical, reports re-parse into their emitting types, exit codes
//! distinguish hypothesis violations from errors, and the numbers agree
//! with analytic oracles.

use std::path::Path;
use std::process::{Command, Output};

use approx::assert_relative_eq;
use warpspec_cli::{CurveRow, EigenReport, Example43Report, ProductReport};
use warpspec_core::{profile_from_psi, read_profile_csv, ComparisonReport, OrderingVerdict};
use warpspec_core::{BoundCertificate, PsiProfile};

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

fn warpspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpspec"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn stdout_of(args: &[&str]) -> String {
    let out = warpspec(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("golden {name}: {e}"))
}

#[test]
fn report_outputs_match_the_golden_bytes() {
    let cases: &[(&[&str], &str)] = &[
        (&["eigen", "--kappa", "0", "--dim", "3", "--radius", "1"], "eigen_flat3.json"),
        (
            &["compare", "--model", "psi", "--psi-c", "0", "--kappa", "-1", "--dim", "2",
              "--radius", "1"],
            "compare_equal_h2.json",
        ),
        (
            &["compare", "--model", "psi", "--psi-c", "0.1", "--kappa", "-1", "--dim", "3",
              "--radius", "1.5"],
            "compare_dominates_h3.json",
        ),
        (&["example43", "--kappa", "-1", "--dim", "3", "--radius", "1"], "example43_h3.json"),
        (&["barta", "--kappa", "0", "--dim", "3", "--radius", "1"], "barta_cap_flat3.json"),
        (&["cone", "--kappa", "-1", "--dim", "3", "--radius", "1.5"], "cone_tight_h3.json"),
        (
            &["product", "--kappa", "0", "--dim", "3", "--radius", "1", "--g-const", "2",
              "--lambda-fiber", "9.869604401089358"],
            "product_flat_g2.json",
        ),
        (
            &["construct-psi", "--kappa", "-1", "--psi-c", "0.1", "--radius", "2",
              "--grid-points", "64", "--format", "csv"],
            "construct_psi_h.csv",
        ),
    ];
    for (args, name) in cases {
        assert_eq!(stdout_of(args), golden(name), "golden drift in {name}");
    }
}

#[test]
fn curve_artifacts_match_the_golden_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for (format, name) in [("csv", "eigen_curve_flat3.csv"), ("json", "eigen_curve_flat3.json")] {
        let path = dir.path().join(name);
        let out = warpspec(&[
            "eigen", "--kappa", "0", "--dim", "3", "--radius", "1", "--grid-points", "64",
            "--curve", path.to_str().unwrap(), "--format", format,
        ]);
        assert!(out.status.success());
        assert_eq!(std::fs::read_to_string(&path).unwrap(), golden(name));
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["eigen", "--kappa", "-0.5", "--dim", "4", "--radius", "1.25", "--psi-c", "0.05"];
    assert_eq!(stdout_of(&args), stdout_of(&args));
}

#[test]
fn golden_reports_parse_round_trip_and_hit_the_oracles() {
    let eigen: EigenReport = serde_json::from_str(&golden("eigen_flat3.json")).unwrap();
    assert_relative_eq!(eigen.lambda, PI2, max_relative = 1e-8);
    assert_eq!(eigen.node_count, 0);
    let echo: EigenReport =
        serde_json::from_str(&serde_json::to_string(&eigen).unwrap()).unwrap();
    assert_eq!(echo, eigen);

    let equal: ComparisonReport = serde_json::from_str(&golden("compare_equal_h2.json")).unwrap();
    assert_eq!(equal.verdict, OrderingVerdict::Equal);
    assert!(equal.equality_detected);
    assert!(equal.lambda_gap.abs() < 1e-7);
    let echo: ComparisonReport =
        serde_json::from_str(&serde_json::to_string(&equal).unwrap()).unwrap();
    assert_eq!(echo, equal);

    let dominates: ComparisonReport =
        serde_json::from_str(&golden("compare_dominates_h3.json")).unwrap();
    assert_eq!(dominates.verdict, OrderingVerdict::Dominates);
    assert!(dominates.lambda_gap > 0.0);

    let barta: BoundCertificate = serde_json::from_str(&golden("barta_cap_flat3.json")).unwrap();
    let lower = barta.lower.expect("cap certifies a lower bound");
    assert_relative_eq!(lower, 6.0, max_relative = 1e-9);
    assert!(lower <= PI2);
    assert!(barta.upper.is_none(), "cap has unbounded quotient at the rim");
    let echo: BoundCertificate =
        serde_json::from_str(&serde_json::to_string(&barta).unwrap()).unwrap();
    assert_eq!(echo, barta);

    // tight cone: the certified value is exactly the reference ball tone,
    // which the dominates-report solved independently
    let cone: BoundCertificate = serde_json::from_str(&golden("cone_tight_h3.json")).unwrap();
    assert_eq!(cone.lower.unwrap(), dominates.lambda_reference);
    assert_eq!(cone.hypothesis_margin, 0.0);

    let product: ProductReport = serde_json::from_str(&golden("product_flat_g2.json")).unwrap();
    let lo = product.lower.as_ref().and_then(|c| c.lower).unwrap();
    let hi = product.upper.as_ref().and_then(|c| c.upper).unwrap();
    assert_eq!(lo, hi, "constant fiber collapses the bounds");
    assert_relative_eq!(lo, PI2 + PI2 / 4.0, max_relative = 1e-8);
    let echo: ProductReport =
        serde_json::from_str(&serde_json::to_string(&product).unwrap()).unwrap();
    assert_eq!(echo, product);

    let ex43: Example43Report = serde_json::from_str(&golden("example43_h3.json")).unwrap();
    assert!(ex43.lambda_gap.abs() < 1e-7);
    assert!(ex43.nonisometry_witness > 0.1);
    let echo: Example43Report =
        serde_json::from_str(&serde_json::to_string(&ex43).unwrap()).unwrap();
    assert_eq!(echo, ex43);
}

#[test]
fn golden_curve_hits_the_analytic_eigenfunction() {
    let rows: Vec<CurveRow> = serde_json::from_str(&golden("eigen_curve_flat3.json")).unwrap();
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0].t, 0.0);
    assert_eq!(rows[0].value, 1.0);
    // u(t) = sin(pi t)/(pi t) for the flat 3-ball
    let mid = rows.iter().find(|r| r.t == 0.5).expect("t = 0.5 is a sample");
    assert_relative_eq!(mid.value, 2.0 / std::f64::consts::PI, epsilon = 1e-9);
    let csv = golden("eigen_curve_flat3.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,value"));
    assert_eq!(csv.lines().count(), 66);
}

#[test]
fn construct_psi_output_feeds_back_as_a_sampled_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = warpspec(&[
        "construct-psi", "--kappa", "-1", "--psi-c", "0.1", "--radius", "2",
        "--grid-points", "256", "--format", "csv", "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let resampled = read_profile_csv(&path).unwrap();
    let psi = PsiProfile::exponential_family(0.1, -1.0).unwrap();
    let direct = profile_from_psi(&psi, -1.0, 2.0).unwrap();
    for t in [0.25, 1.0, 1.75] {
        assert_relative_eq!(resampled.f(t).unwrap(), direct.f(t).unwrap(), max_relative = 1e-9);
    }
}

#[test]
fn output_flag_writes_the_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = ["example43", "--kappa", "-0.25", "--dim", "4", "--radius", "0.5"];
    let stdout = stdout_of(&args);
    let out = warpspec(
        &[&args[..], &["--output", path.to_str().unwrap()]].concat(),
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "file output should not echo to stdout");
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout);
}

#[test]
fn hypothesis_violation_exits_two_with_a_witness() {
    let out = warpspec(&[
        "cone", "--kappa", "-1", "--dim", "3", "--radius", "1.5", "--psi-c", "-0.2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let verdict: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("witness report on stdout");
    assert_eq!(verdict["outcome"], "hypothesis_violated");
    let witness = verdict["witness"].as_f64().expect("numeric witness");
    assert!(witness > 0.0 && witness < 1.5);
}

#[test]
fn errors_exit_one_with_actionable_messages() {
    // malformed usage: missing required --radius
    let out = warpspec(&["eigen", "--kappa", "0", "--dim", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--radius"));

    // structurally valid, mathematically out of range
    let out = warpspec(&["eigen", "--kappa", "0", "--dim", "3", "--radius", "1", "--tol", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--tol"));

    // sphere cap past the conjugate locus
    let out = warpspec(&["eigen", "--kappa", "1", "--dim", "3", "--radius", "3.2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("conjugate"));

    let out = warpspec(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
