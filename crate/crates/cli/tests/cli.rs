use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sturm_cli::files::{
    read_json, write_json, Channels, DiagnosticsFile, ExpressionName, Params, ProblemFile, RoundTripFile, SigmaSpec,
    SpectralDataFile, SweepFile,
};
use tempfile::TempDir;

fn sturm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sturm")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const NEUMANN: &str = r#"{"sigma": {"kind": "expression", "name": "zero"}, "r1": [[1, 0]], "r2": [[0, 0]]}"#;
const LINEAR: &str = r#"{"sigma": {"kind": "expression", "name": "cosine", "params": {"amplitude": 0.1}},
    "r1": [[0.5, 0], [1, 0]], "r2": [[-0.1, 0], [0.3, 0]]}"#;

#[test]
fn forward_zero_model() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", NEUMANN);
    let out = dir.path().join("d.json");
    let csv = dir.path().join("d.csv");
    let o = sturm(&["forward", s(&p), "--n-max", "10", "--out", s(&out), "--delta-csv", s(&csv)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d = SpectralDataFile::read(&out).unwrap();
    assert_eq!(d.entries.len(), 10);
    for e in &d.entries {
        let n = e.n as f64;
        assert!(((e.rho[0] * e.rho[0]) - (n - 1.0) * (n - 1.0)).abs() < 1e-8);
        let alpha = if e.n == 1 { 1.0 / PI } else { 2.0 / PI };
        assert!((e.alpha[0] - alpha).abs() < 1e-7);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("lambda_re,lambda_im,delta_re,delta_im\n"));
    assert_eq!(text.lines().count(), 402);
}

#[test]
fn forward_validation() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", "{ not json");
    assert_eq!(code(&sturm(&["forward", s(&bad)])), 2);
    let p = write(&dir, "p.json", NEUMANN);
    assert_eq!(code(&sturm(&["forward", s(&p), "--n-max", "0"])), 2);
    let unmonic =
        write(&dir, "u.json", r#"{"sigma": {"kind": "expression", "name": "zero"}, "r1": [[2, 0]], "r2": [[0, 0]]}"#);
    assert_eq!(code(&sturm(&["forward", s(&unmonic)])), 2);
    let missing = write(
        &dir,
        "m.json",
        r#"{"sigma": {"kind": "expression", "name": "constant"}, "r1": [[1, 0]], "r2": [[0, 0]]}"#,
    );
    assert_eq!(code(&sturm(&["forward", s(&missing)])), 2);
    assert_eq!(code(&sturm(&["forward", s(&dir.path().join("absent.json"))])), 2);
}

#[test]
fn inverse_of_own_data() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", LINEAR);
    let d = dir.path().join("d.json");
    assert_eq!(code(&sturm(&["forward", s(&p), "--n-max", "20", "--grid-m", "1024", "--out", s(&d)])), 0);
    let r = dir.path().join("r.json");
    let o = sturm(&["inverse", s(&p), s(&d), "--K", "20", "--grid-m", "1024", "--out", s(&r)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let diag: DiagnosticsFile = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(diag.k, 20);
    let got = ProblemFile::read(&r).unwrap().to_problem(None).unwrap();
    let want = ProblemFile::read(&p).unwrap().to_problem(Some(1024)).unwrap();
    assert!(got.sigma().sub(want.sigma()).unwrap().sup_norm() < 1e-9);
    for (a, b) in got.polys().r2().iter().zip(want.polys().r2()) {
        assert!((a - b).norm() < 1e-9);
    }
}

#[test]
fn inverse_of_perturbed_neumann_data() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", NEUMANN);
    let d = dir.path().join("d.json");
    assert_eq!(code(&sturm(&["forward", s(&p), "--n-max", "20", "--grid-m", "1024", "--out", s(&d)])), 0);
    let mut data = SpectralDataFile::read(&d).unwrap();
    data.entries[0].rho[0] += 5e-3;
    data.entries[1].alpha[0] += 5e-3;
    write_json(&d, &data).unwrap();
    let r = dir.path().join("r.json");
    assert_eq!(code(&sturm(&["inverse", s(&p), s(&d), "--K", "20", "--grid-m", "1024", "--out", s(&r)])), 0);
    let back = dir.path().join("back.json");
    assert_eq!(code(&sturm(&["forward", s(&r), "--n-max", "20", "--out", s(&back)])), 0);
    let back = SpectralDataFile::read(&back).unwrap();
    for (a, b) in back.entries.iter().zip(&data.entries) {
        let lambda = |e: &sturm_cli::files::SpectralEntry| {
            (e.rho[0] * e.rho[0] - e.rho[1] * e.rho[1], 2.0 * e.rho[0] * e.rho[1])
        };
        let (la, lb) = (lambda(a), lambda(b));
        let err = (la.0 - lb.0).hypot(la.1 - lb.1) + (a.alpha[0] - b.alpha[0]).hypot(a.alpha[1] - b.alpha[1]);
        assert!(err < 1e-5, "n = {}: {err}", a.n);
    }
}

#[test]
fn oversized_perturbation_exits_4() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", NEUMANN);
    let d = dir.path().join("d.json");
    assert_eq!(code(&sturm(&["forward", s(&p), "--n-max", "10", "--grid-m", "512", "--out", s(&d)])), 0);
    let mut data = SpectralDataFile::read(&d).unwrap();
    data.entries[0].alpha[0] -= 1.0;
    write_json(&d, &data).unwrap();
    let r = dir.path().join("r.json");
    assert_eq!(code(&sturm(&["inverse", s(&p), s(&d), "--K", "10", "--grid-m", "512", "--out", s(&r)])), 4);
    assert_eq!(code(&sturm(&["roundtrip", s(&p), "--alpha", "1=-1", "--K", "10", "--grid-m", "512"])), 4);
}

#[test]
fn inverse_count_validation() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", NEUMANN);
    let d = dir.path().join("d.json");
    assert_eq!(code(&sturm(&["forward", s(&p), "--n-max", "5", "--grid-m", "256", "--out", s(&d)])), 0);
    let r = dir.path().join("r.json");
    assert_eq!(code(&sturm(&["inverse", s(&p), s(&d), "--K", "6", "--grid-m", "256", "--out", s(&r)])), 2);
    let mut data = SpectralDataFile::read(&d).unwrap();
    data.entries[2].n = 7;
    write_json(&d, &data).unwrap();
    assert_eq!(code(&sturm(&["inverse", s(&p), s(&d), "--K", "5", "--grid-m", "256", "--out", s(&r)])), 2);
}

#[test]
fn zero_perturbation_roundtrip_passes() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", LINEAR);
    let out = dir.path().join("rt.json");
    let o = sturm(&["roundtrip", s(&p), "--K", "10", "--grid-m", "512", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let log = String::from_utf8_lossy(&o.stderr);
    assert_eq!(log.lines().filter(|l| l.starts_with("PASS")).count(), 2, "{log}");
    let r: RoundTripFile = read_json(&out).unwrap();
    assert!(r.sigma_error_l2 <= 1e-9 && r.r1_error_sup <= 1e-9 && r.r2_error_sup <= 1e-9);
}

#[test]
fn roundtrip_fails_below_tolerance() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", NEUMANN);
    let o = sturm(&["roundtrip", s(&p), "--rho", "1=1e-2", "--K", "10", "--grid-m", "512", "--tol", "0"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL closure"));
    assert_eq!(code(&sturm(&["roundtrip", s(&p), "--rho", "0=1e-2"])), 2);
}

#[test]
fn seeded_random_roundtrip() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", LINEAR);
    let o = sturm(&[
        "roundtrip",
        s(&p),
        "--random",
        "4",
        "--seed",
        "9",
        "--random-delta",
        "1e-3",
        "--K",
        "12",
        "--grid-m",
        "512",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: RoundTripFile = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.seed, Some(9));
    assert!((r.delta_in - 1e-3).abs() < 1e-12);
}

#[test]
fn standard_sweep_passes() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", LINEAR);
    let o = sturm(&["sweep", s(&p), "--K", "20", "--grid-m", "1024"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let log = String::from_utf8_lossy(&o.stderr);
    assert_eq!(log.lines().filter(|l| l.starts_with("PASS") && l.contains("slope")).count(), 3, "{log}");
    let sweep: SweepFile = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(sweep.deltas, vec![4e-3, 2e-3, 1e-3, 5e-4]);
    assert!(sweep.constants.sigma.is_finite());
}

#[test]
fn sweep_rejects_non_decreasing_deltas() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", NEUMANN);
    assert_eq!(code(&sturm(&["sweep", s(&p), "--deltas", "1e-3,2e-3"])), 2);
    assert_eq!(code(&sturm(&["sweep", s(&p), "--deltas", "1e-3,1e-3"])), 2);
    assert_eq!(code(&sturm(&["sweep", s(&p), "--deltas", "0,0"])), 2);
}

#[test]
fn help_documents_csv_columns() {
    let o = sturm(&["forward", "--help"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("lambda_re, lambda_im, delta_re, delta_im"));
}

fn roundtrips<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug>(value: &T) {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("f.json");
    write_json(&p, value).unwrap();
    let back: T = read_json(&p).unwrap();
    assert_eq!(&back, value);
}

#[test]
fn files_roundtrip_exactly() {
    let awkward = [0.1 + 0.2, 1.0 / 3.0, -2.5e-300, 6.02214076e23, PI];
    roundtrips(&ProblemFile {
        sigma: SigmaSpec::Samples { values: awkward.iter().map(|&v| [v, -v]).collect() },
        r1: vec![[awkward[1], 0.0], [1.0, 0.0]],
        r2: vec![[awkward[0], awkward[2]]],
    });
    roundtrips(&ProblemFile {
        sigma: SigmaSpec::Expression {
            name: ExpressionName::PiecewiseLinear,
            params: Params { knots: Some(vec![[0.0, 0.1], [1.0, -0.2], [PI, 0.3]]), ..Params::default() },
        },
        r1: vec![[1.0, 0.0]],
        r2: vec![[0.0, 0.0]],
    });
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", NEUMANN);
    let d = dir.path().join("d.json");
    assert_eq!(code(&sturm(&["forward", s(&p), "--n-max", "6", "--grid-m", "256", "--out", s(&d)])), 0);
    let data = SpectralDataFile::read(&d).unwrap();
    roundtrips(&data);
    assert_eq!(SpectralDataFile::from_data(&data.to_data().unwrap(), &data.meta.source), data);
    roundtrips(&DiagnosticsFile {
        k: 40,
        n_prefix: 2,
        delta: awkward[0],
        condition_max: awkward[3],
        condition_argmax: 17,
        r1_residual: awkward[2],
        r2_residual: 0.0,
    });
    let rt = RoundTripFile {
        delta_in: awkward[0],
        sigma_error_l2: awkward[1],
        r1_error_sup: awkward[2],
        r2_error_sup: awkward[3],
        spectral_closure_error: awkward[4],
        condition_max: 1.0,
        k: 40,
        seed: Some(u64::MAX),
    };
    roundtrips(&rt);
    roundtrips(&SweepFile {
        deltas: vec![4e-3, 2e-3],
        errors: Channels { sigma: vec![awkward[0], awkward[1]], r1: vec![1.0, 0.5], r2: vec![2.0, 1.0] },
        slopes: Channels { sigma: 1.0, r1: 0.99, r2: 1.01 },
        intercepts: Channels { sigma: 0.1, r1: 0.2, r2: 0.3 },
        constants: Channels { sigma: 0.1f64.exp(), r1: 0.2f64.exp(), r2: 0.3f64.exp() },
        runs: vec![rt.clone(), rt],
        seed: None,
    });
}

#[test]
fn expressions_sample_as_documented() {
    let file: ProblemFile = serde_json::from_str(
        r#"{"sigma": {"kind": "expression", "name": "piecewise-linear", "params": {"knots": [[0, 0], [1, 0.5], [3.2, -0.5]]}},
            "r1": [[1, 0]], "r2": [[0, 0]]}"#,
    )
    .unwrap();
    let p = file.to_problem(Some(64)).unwrap();
    let g = p.grid().clone();
    for (j, &x) in g.points().iter().enumerate() {
        let want = if x <= 1.0 { 0.5 * x } else { 0.5 - (x - 1.0) / 2.2 };
        assert!((p.sigma().value(j).re - want).abs() < 1e-14);
    }
    let bad: Result<ProblemFile, _> = serde_json::from_str(
        r#"{"sigma": {"kind": "expression", "name": "zero"}, "r1": [[1, 0]], "r2": [[0, 0]], "extra": 1}"#,
    );
    assert!(bad.is_err());
    let samples = ProblemFile {
        sigma: SigmaSpec::Samples { values: vec![[0.0, 0.0]; 65] },
        r1: vec![[1.0, 0.0]],
        r2: vec![[0.0, 0.0]],
    };
    assert!(samples.to_problem(Some(64)).is_ok());
    assert!(samples.to_problem(Some(128)).is_err());
}
