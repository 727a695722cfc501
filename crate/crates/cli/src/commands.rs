use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use sturm_core::forward::{characteristic, find_eigenvalues_with, weight_numbers, EigenOptions};
use sturm_core::inverse::{inverse_solve, InverseOptions, DEFAULT_TRUNCATION};
use sturm_core::verify::{roundtrip, stability_sweep, Perturbation, Shift, SLOPE_WINDOW};
use sturm_core::{BoundaryProblem64, Complex64};

use crate::error::CliError;
use crate::files::{to_json, write_json, DiagnosticsFile, ProblemFile, RoundTripFile, SpectralDataFile, SweepFile};

/// Zero-perturbation round trips must reproduce the model this closely.
const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and weight numbers of a problem.
    ///
    /// The optional Δ CSV has the columns lambda_re, lambda_im, delta_re,
    /// delta_im, sampled on the real axis.
    Forward(ForwardArgs),
    /// Reconstruct a problem from spectral data, relative to a model problem.
    Inverse(InverseArgs),
    /// Perturb a model's data, reconstruct, and check closure.
    Roundtrip(RoundtripArgs),
    /// Round trips over decreasing deltas with log-log slope fits.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    /// Problem file (JSON).
    pub problem: PathBuf,
    #[arg(long = "n-max", default_value_t = 20)]
    pub n_max: usize,
    /// Grid intervals for expression-defined σ.
    #[arg(long = "grid-m")]
    pub grid_m: Option<usize>,
    /// Output path for the spectral data (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Accept multiple eigenvalues.
    #[arg(long = "allow-multiple")]
    pub allow_multiple: bool,
    /// Number of leading entries to declare as the unperturbed prefix.
    #[arg(long, default_value_t = 0)]
    pub prefix: usize,
    /// Write Δ(λ) samples to this CSV file.
    #[arg(long = "delta-csv")]
    pub delta_csv: Option<PathBuf>,
    /// Real-axis range for the Δ samples, as LO,HI (default: -10 to n_max²).
    #[arg(long = "delta-range", value_delimiter = ',', num_args = 2, allow_negative_numbers = true)]
    pub delta_range: Option<Vec<f64>>,
    #[arg(long = "delta-samples", default_value_t = 401)]
    pub delta_samples: usize,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    /// Model problem file.
    pub model: PathBuf,
    /// Target spectral data file.
    pub data: PathBuf,
    #[arg(long = "K", default_value_t = DEFAULT_TRUNCATION)]
    pub k: usize,
    #[arg(long = "grid-m")]
    pub grid_m: Option<usize>,
    /// Length of the unperturbed prefix (default: from the data file).
    #[arg(long = "skip-N")]
    pub skip_n: Option<usize>,
    /// Output path for the reconstructed problem; diagnostics go to stdout.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerturbationArgs {
    /// Shift ρ_n by VALUE, given as N=VALUE (one-based, repeatable).
    #[arg(long = "rho", value_name = "N=VALUE", allow_negative_numbers = true)]
    pub rho: Vec<String>,
    /// Shift α_n by VALUE, given as N=VALUE (one-based, repeatable).
    #[arg(long = "alpha", value_name = "N=VALUE", allow_negative_numbers = true)]
    pub alpha: Vec<String>,
    /// Random shifts on this many entries after the prefix (uses --seed).
    #[arg(long)]
    pub random: Option<usize>,
    /// Data distance of the random shifts.
    #[arg(long = "random-delta", default_value_t = 5e-3)]
    pub random_delta: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    /// Model problem file.
    pub model: PathBuf,
    #[command(flatten)]
    pub perturbation: PerturbationArgs,
    #[arg(long = "K", default_value_t = DEFAULT_TRUNCATION)]
    pub k: usize,
    #[arg(long = "grid-m")]
    pub grid_m: Option<usize>,
    #[arg(long = "skip-N")]
    pub skip_n: Option<usize>,
    /// Closure tolerance.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Output path for the report (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Model problem file.
    pub model: PathBuf,
    /// Direction of the sweep (default: ρ₁).
    #[command(flatten)]
    pub perturbation: PerturbationArgs,
    /// Strictly decreasing data distances.
    #[arg(long, value_delimiter = ',', default_value = "4e-3,2e-3,1e-3,5e-4", allow_negative_numbers = true)]
    pub deltas: Vec<f64>,
    #[arg(long = "K", default_value_t = DEFAULT_TRUNCATION)]
    pub k: usize,
    #[arg(long = "grid-m")]
    pub grid_m: Option<usize>,
    #[arg(long = "skip-N")]
    pub skip_n: Option<usize>,
    /// Accepted distance of each slope from 1.
    #[arg(long, default_value_t = (SLOPE_WINDOW.1 - SLOPE_WINDOW.0) / 2.0)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one command, writing results and PASS/FAIL lines to `log`.
pub fn run(command: &Command, log: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Forward(a) => forward(a),
        Command::Inverse(a) => inverse(a),
        Command::Roundtrip(a) => roundtrip_cmd(a, log),
        Command::Sweep(a) => sweep_cmd(a, log),
    }
}

fn emit(out: Option<&Path>, text: String) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, text + "\n").map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn forward(a: &ForwardArgs) -> Result<(), CliError> {
    if a.n_max == 0 {
        return Err(CliError::Validation("--n-max must be at least 1".into()));
    }
    let problem = ProblemFile::read(&a.problem)?.to_problem(a.grid_m)?;
    let eig = find_eigenvalues_with(&problem, a.n_max, &EigenOptions { allow_multiple: a.allow_multiple })?;
    let mut data = weight_numbers(&problem, &eig)?;
    if a.prefix > 0 {
        data = data.with_prefix(a.prefix)?;
    }
    let source = format!("forward {} (n-max {}, grid {})", a.problem.display(), a.n_max, problem.grid().intervals());
    emit(a.out.as_deref(), to_json(&SpectralDataFile::from_data(&data, &source)))?;
    if let Some(path) = &a.delta_csv {
        let (lo, hi) = match a.delta_range.as_deref() {
            Some([lo, hi]) if lo < hi => (*lo, *hi),
            Some(_) => return Err(CliError::Validation("--delta-range needs LO < HI".into())),
            None => (-10.0, (a.n_max * a.n_max) as f64),
        };
        write_delta_csv(&problem, path, lo, hi, a.delta_samples.max(2))?;
    }
    Ok(())
}

fn write_delta_csv(problem: &BoundaryProblem64, path: &Path, lo: f64, hi: f64, samples: usize) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io { path: path.display().to_string(), source: e.into() };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["lambda_re", "lambda_im", "delta_re", "delta_im"]).map_err(io)?;
    for s in 0..samples {
        let lambda = Complex64::new(lo + (hi - lo) * s as f64 / (samples - 1) as f64, 0.0);
        let d = characteristic(problem, lambda)?;
        w.serialize((lambda.re, lambda.im, d.re, d.im)).map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn inverse(a: &InverseArgs) -> Result<(), CliError> {
    let model = ProblemFile::read(&a.model)?.to_problem(a.grid_m)?;
    let target = SpectralDataFile::read(&a.data)?.to_data()?;
    if a.k == 0 || a.k > target.count() {
        return Err(CliError::Validation(format!("--K {} outside 1..={}", a.k, target.count())));
    }
    let r = inverse_solve(&model, &target, a.k, &InverseOptions { skip_n: a.skip_n, model_data: None })?;
    write_json(&a.out, &ProblemFile::from_problem(&r.problem()))?;
    let d = &r.diagnostics;
    println!(
        "{}",
        to_json(&DiagnosticsFile {
            k: d.truncation,
            n_prefix: d.skip,
            delta: d.delta,
            condition_max: d.condition_max,
            condition_argmax: d.condition_argmax,
            r1_residual: d.r1_residual,
            r2_residual: d.r2_residual,
        })
    );
    Ok(())
}

fn parse_shift(arg: &str) -> Result<(usize, f64), CliError> {
    let bad = || CliError::Validation(format!("expected N=VALUE with N >= 1, got `{arg}`"));
    let (n, v) = arg.split_once('=').ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    if n == 0 || !v.is_finite() {
        return Err(bad());
    }
    Ok((n - 1, v))
}

impl PerturbationArgs {
    fn build(&self, skip: usize) -> Result<(Perturbation<f64>, Option<u64>), CliError> {
        let mut p = Perturbation::none();
        for s in &self.rho {
            let (i, v) = parse_shift(s)?;
            p.shifts.push(Shift { index: i, drho: Complex64::new(v, 0.0), dalpha: Complex64::new(0.0, 0.0) });
        }
        for s in &self.alpha {
            let (i, v) = parse_shift(s)?;
            p.shifts.push(Shift { index: i, drho: Complex64::new(0.0, 0.0), dalpha: Complex64::new(v, 0.0) });
        }
        match self.random {
            Some(m) => Ok((p.and(Perturbation::random(self.seed, skip, m, self.random_delta)), Some(self.seed))),
            None => Ok((p, None)),
        }
    }
}

fn line(log: &mut dyn Write, pass: bool, what: String) -> bool {
    let _ = writeln!(log, "{} {what}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn roundtrip_cmd(a: &RoundtripArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let model = ProblemFile::read(&a.model)?.to_problem(a.grid_m)?;
    let (pert, seed) = a.perturbation.build(a.skip_n.unwrap_or(0))?;
    let report = roundtrip(&model, &pert, a.k, &InverseOptions { skip_n: a.skip_n, model_data: None })?;
    emit(a.out.as_deref(), to_json(&RoundTripFile::new(&report, seed)))?;
    let mut ok = line(
        log,
        report.spectral_closure_error <= a.tol,
        format!("closure {:.3e} <= {:.1e}", report.spectral_closure_error, a.tol),
    );
    if report.delta_in == 0.0 {
        let worst = report.sigma_error_l2.max(report.r1_error_sup).max(report.r2_error_sup);
        ok &= line(log, worst <= FIXED_POINT_TOL, format!("fixed point {worst:.3e} <= {FIXED_POINT_TOL:.0e}"));
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("roundtrip check failed".into()))
    }
}

fn sweep_cmd(a: &SweepArgs, log: &mut dyn Write) -> Result<(), CliError> {
    if a.deltas.len() < 2
        || a.deltas.windows(2).any(|w| w[1] >= w[0])
        || a.deltas.iter().any(|d| d.is_nan() || *d <= 0.0)
    {
        return Err(CliError::Validation("--deltas must be positive and strictly decreasing".into()));
    }
    let model = ProblemFile::read(&a.model)?.to_problem(a.grid_m)?;
    let (mut dir, seed) = a.perturbation.build(a.skip_n.unwrap_or(0))?;
    if dir.shifts.is_empty() {
        dir = Perturbation::rho(a.skip_n.unwrap_or(0), 1.0);
    }
    let report = stability_sweep(&model, &dir, &a.deltas, a.k, &InverseOptions { skip_n: a.skip_n, model_data: None })?;
    emit(a.out.as_deref(), to_json(&SweepFile::new(&report, seed)))?;
    let constants = report.constants();
    let mut ok = true;
    for (i, name) in ["sigma", "r1", "r2"].iter().enumerate() {
        let s = report.slopes[i];
        ok &= line(
            log,
            (s - 1.0).abs() <= a.tol,
            format!("{name} slope {s:.4} within 1 +/- {} (C = {:.4e})", a.tol, constants[i]),
        );
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("sweep slope outside the accepted window".into()))
    }
}
