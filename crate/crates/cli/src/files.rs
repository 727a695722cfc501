//! JSON file formats. Complex numbers are `[re, im]` pairs.

use std::f64::consts::PI;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sturm_core::verify::{RoundTripReport, SweepReport};
use sturm_core::{
    make_polynomial_pair, BoundaryProblem64, Complex64, Grid, SampledFunction, SpectralData64, DEFAULT_INTERVALS,
};

use crate::error::CliError;

pub type Pair = [f64; 2];

fn to_complex(p: &Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn to_pair(z: &Complex64) -> Pair {
    [z.re, z.im]
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("file types always serialize")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = to_json(value);
    text.push('\n');
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// A boundary problem: `σ` plus the coefficient lists of `r₁`, `r₂`
/// (constant term first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub sigma: SigmaSpec,
    pub r1: Vec<Pair>,
    pub r2: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SigmaSpec {
    /// Values at `x_j = jπ/m`, `j = 0..=m`.
    Samples { values: Vec<Pair> },
    Expression {
        name: ExpressionName,
        #[serde(default, skip_serializing_if = "Params::is_empty")]
        params: Params,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpressionName {
    /// `σ = 0`.
    Zero,
    /// `σ = value`.
    Constant,
    /// `σ = amplitude · cos(frequency · x)`.
    Cosine,
    /// Linear interpolation through `knots` (`[x, σ(x)]`, sorted, covering `[0, π]`).
    PiecewiseLinear,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<Pair>>,
}

impl Params {
    fn is_empty(&self) -> bool {
        *self == Params::default()
    }
}

fn need(v: Option<f64>, what: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Validation(format!("sigma expression needs parameter `{what}`")))
}

fn piecewise(knots: &[Pair], x: f64) -> f64 {
    let i = knots.partition_point(|k| k[0] < x).clamp(1, knots.len() - 1);
    let (a, b) = (knots[i - 1], knots[i]);
    a[1] + (b[1] - a[1]) * (x - a[0]) / (b[0] - a[0])
}

impl SigmaSpec {
    fn sample(&self, grid_m: Option<usize>) -> Result<SampledFunction<f64>, CliError> {
        match self {
            SigmaSpec::Samples { values } => {
                let m = values.len().saturating_sub(1);
                if let Some(g) = grid_m {
                    if g != m {
                        return Err(CliError::Validation(format!(
                            "sigma has {m} sample intervals but --grid-m is {g}"
                        )));
                    }
                }
                Ok(SampledFunction::new(Grid::new(m)?, values.iter().map(to_complex).collect())?)
            }
            SigmaSpec::Expression { name, params } => {
                let grid = Grid::new(grid_m.unwrap_or(DEFAULT_INTERVALS))?;
                let f: Box<dyn Fn(f64) -> f64> = match name {
                    ExpressionName::Zero => Box::new(|_| 0.0),
                    ExpressionName::Constant => {
                        let v = need(params.value, "value")?;
                        Box::new(move |_| v)
                    }
                    ExpressionName::Cosine => {
                        let a = need(params.amplitude, "amplitude")?;
                        let k = params.frequency.unwrap_or(1.0);
                        Box::new(move |x| a * (k * x).cos())
                    }
                    ExpressionName::PiecewiseLinear => {
                        let knots = params.knots.clone().unwrap_or_default();
                        let sorted = knots.windows(2).all(|w| w[0][0] < w[1][0]);
                        if knots.len() < 2 || !sorted || knots[0][0] > 0.0 || knots[knots.len() - 1][0] < PI {
                            return Err(CliError::Validation(
                                "piecewise-linear knots must be strictly increasing in x and cover [0, pi]".into(),
                            ));
                        }
                        Box::new(move |x| piecewise(&knots, x))
                    }
                };
                Ok(SampledFunction::from_fn(grid, |x| Complex64::new(f(x), 0.0))?)
            }
        }
    }
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    /// Builds the problem; `grid_m` sets the grid of an expression and must
    /// agree with the length of explicit samples.
    pub fn to_problem(&self, grid_m: Option<usize>) -> Result<BoundaryProblem64, CliError> {
        let sigma = self.sigma.sample(grid_m)?;
        let r1: Vec<_> = self.r1.iter().map(to_complex).collect();
        let r2: Vec<_> = self.r2.iter().map(to_complex).collect();
        Ok(BoundaryProblem64::new(sigma, make_polynomial_pair(&r1, &r2)?))
    }

    /// Sampled representation of `problem`.
    pub fn from_problem(problem: &BoundaryProblem64) -> Self {
        ProblemFile {
            sigma: SigmaSpec::Samples { values: problem.sigma().values().iter().map(to_pair).collect() },
            r1: problem.polys().r1().iter().map(to_pair).collect(),
            r2: problem.polys().r2().iter().map(to_pair).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralDataFile {
    pub entries: Vec<SpectralEntry>,
    pub meta: SpectralMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralEntry {
    /// One-based index.
    pub n: usize,
    pub rho: Pair,
    pub alpha: Pair,
    /// Size of the group of equal eigenvalues this entry belongs to.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralMeta {
    #[serde(rename = "M1")]
    pub m1: usize,
    #[serde(rename = "N_prefix", default)]
    pub n_prefix: usize,
    #[serde(default)]
    pub source: String,
}

impl SpectralDataFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        read_json(path)
    }

    pub fn from_data(data: &SpectralData64, source: &str) -> Self {
        let entries = (0..data.count())
            .map(|i| SpectralEntry {
                n: i + 1,
                rho: to_pair(&data.rho()[i]),
                alpha: to_pair(&data.alpha()[i]),
                multiplicity: data.multiplicity()[i],
            })
            .collect();
        SpectralDataFile {
            entries,
            meta: SpectralMeta { m1: data.m1(), n_prefix: data.prefix(), source: source.to_string() },
        }
    }

    pub fn to_data(&self) -> Result<SpectralData64, CliError> {
        for (i, e) in self.entries.iter().enumerate() {
            if e.n != i + 1 {
                return Err(CliError::Validation(format!("entry {} has n = {}, expected {}", i + 1, e.n, i + 1)));
            }
        }
        let rho = self.entries.iter().map(|e| to_complex(&e.rho)).collect();
        let alpha = self.entries.iter().map(|e| to_complex(&e.alpha)).collect();
        let mult = self.entries.iter().map(|e| e.multiplicity).collect();
        Ok(SpectralData64::from_parts(rho, alpha, mult, self.meta.n_prefix, self.meta.m1)?)
    }
}

/// Solver diagnostics written next to a reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsFile {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N_prefix")]
    pub n_prefix: usize,
    pub delta: f64,
    pub condition_max: f64,
    pub condition_argmax: usize,
    pub r1_residual: f64,
    pub r2_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripFile {
    pub delta_in: f64,
    #[serde(rename = "sigma_error_L2")]
    pub sigma_error_l2: f64,
    pub r1_error_sup: f64,
    pub r2_error_sup: f64,
    pub spectral_closure_error: f64,
    pub condition_max: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RoundTripFile {
    pub fn new(r: &RoundTripReport<f64>, seed: Option<u64>) -> Self {
        RoundTripFile {
            delta_in: r.delta_in,
            sigma_error_l2: r.sigma_error_l2,
            r1_error_sup: r.r1_error_sup,
            r2_error_sup: r.r2_error_sup,
            spectral_closure_error: r.spectral_closure_error,
            condition_max: r.condition_max,
            k: r.k,
            seed,
        }
    }
}

/// Per-channel values in the order `σ`, `r₁`, `r₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channels<T> {
    pub sigma: T,
    pub r1: T,
    pub r2: T,
}

impl<T: Clone> Channels<T> {
    fn from_array(a: &[T; 3]) -> Self {
        Channels { sigma: a[0].clone(), r1: a[1].clone(), r2: a[2].clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepFile {
    pub deltas: Vec<f64>,
    pub errors: Channels<Vec<f64>>,
    pub slopes: Channels<f64>,
    pub intercepts: Channels<f64>,
    /// `exp(intercept)`: the measured stability constants.
    pub constants: Channels<f64>,
    pub runs: Vec<RoundTripFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SweepFile {
    pub fn new(s: &SweepReport<f64>, seed: Option<u64>) -> Self {
        SweepFile {
            deltas: s.deltas.clone(),
            errors: Channels::from_array(&s.errors),
            slopes: Channels::from_array(&s.slopes),
            intercepts: Channels::from_array(&s.intercepts),
            constants: Channels::from_array(&s.constants()),
            runs: s.reports.iter().map(|r| RoundTripFile::new(r, seed)).collect(),
            seed,
        }
    }
}
