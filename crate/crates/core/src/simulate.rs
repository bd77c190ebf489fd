//! Seeded Monte Carlo sampling from copula/marginal models.
//!
//! Samples are produced in fixed-size blocks; block `b` draws from a
//! `ChaCha8Rng` seeded with `seed` on stream `purpose << 48 | b`, so the output
//! depends only on `(seed, n)` and never on thread scheduling.
//!
//! Samplers: Gaussian by a Cholesky-correlated normal pair; Clayton by gamma
//! frailty; Gumbel by positive-stable frailty (Kanter's representation);
//! Frank by inverting the conditional distribution `∂C/∂u`, which is
//! available in closed form.

use rand::distributions::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::copulas::{CopulaError, CopulaSpec};
use crate::exec::Execution;
use crate::fitting::{Label, ScoreDataset, ScoreRecord};
use crate::jointroc::{CurveKind, JointDiagnosticModel};
use crate::marginals::{standard_normal_cdf, MarginalModel};
use crate::{Error, Result};

/// Samples per deterministic block.
pub const BLOCK_SIZE: usize = 4096;

const STREAM_NON_DISEASED: u64 = 1;
const STREAM_DISEASED: u64 = 2;
const STREAM_LABELS: u64 = 3;
const STREAM_UNIFORM: u64 = 4;

/// Largest double below 1; keeps quantile transforms finite.
const ONE_MINUS: f64 = 1.0 - f64::EPSILON / 2.0;

fn block_rng(seed: u64, purpose: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((purpose << 48) | block as u64);
    rng
}

fn open01<R: Rng>(rng: &mut R) -> f64 {
    Open01.sample(rng)
}

fn unit(x: f64) -> f64 {
    x.clamp(f64::MIN_POSITIVE, ONE_MINUS)
}

/// One draw `(U, V)` from the copula.
fn draw<R: Rng>(copula: &CopulaSpec, rng: &mut R) -> (f64, f64) {
    match *copula {
        c if c.is_independence() => (open01(rng), open01(rng)),
        CopulaSpec::Gaussian { rho } => {
            let z1: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            let z2 = rho * z1 + (1.0 - rho * rho).sqrt() * e;
            (unit(standard_normal_cdf(z1)), unit(standard_normal_cdf(z2)))
        }
        CopulaSpec::Clayton { theta } => {
            let frailty: f64 = Gamma::new(1.0 / theta, 1.0).expect("validated theta").sample(rng);
            let e1: f64 = rng.sample(Exp1);
            let e2: f64 = rng.sample(Exp1);
            let u = |e: f64| (-(e / frailty).ln_1p() / theta).exp();
            (unit(u(e1)), unit(u(e2)))
        }
        CopulaSpec::Gumbel { theta } => {
            let s = positive_stable(1.0 / theta, rng);
            let e1: f64 = rng.sample(Exp1);
            let e2: f64 = rng.sample(Exp1);
            let alpha = 1.0 / theta;
            let u = |e: f64| (-(e / s).powf(alpha)).exp();
            (unit(u(e1)), unit(u(e2)))
        }
        CopulaSpec::Frank { theta } => {
            let u = open01(rng);
            let w = open01(rng);
            let a = (-theta * u).exp();
            let v = -(w * (-theta).exp_m1() / (w + (1.0 - w) * a)).ln_1p() / theta;
            (u, unit(v))
        }
        CopulaSpec::Independence => (open01(rng), open01(rng)),
    }
}

/// Positive stable variable with Laplace transform `exp(-s^alpha)`,
/// `0 < alpha <= 1`.
fn positive_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 1.0 {
        return 1.0;
    }
    let u = std::f64::consts::PI * open01(rng);
    let w: f64 = rng.sample(Exp1);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha);
    a * b
}

fn blocks<T, F>(n: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> Vec<T> + Sync + Send,
{
    let n_blocks = n.div_ceil(BLOCK_SIZE);
    exec.map_range(n_blocks, |b| f(b, BLOCK_SIZE.min(n - b * BLOCK_SIZE))).into_iter().flatten().collect()
}

fn uniform_pairs_on(copula: &CopulaSpec, n: usize, seed: u64, purpose: u64, exec: Execution) -> Vec<(f64, f64)> {
    blocks(n, exec, |b, len| {
        let mut rng = block_rng(seed, purpose, b);
        (0..len).map(|_| draw(copula, &mut rng)).collect()
    })
}

/// `n` draws of `(U, V)` from the copula.
pub fn sample_uniform_pairs(copula: &CopulaSpec, n: usize, seed: u64) -> Result<Vec<(f64, f64)>, CopulaError> {
    sample_uniform_pairs_with(copula, n, seed, Execution::default())
}

pub fn sample_uniform_pairs_with(
    copula: &CopulaSpec,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<(f64, f64)>, CopulaError> {
    copula.validate()?;
    Ok(uniform_pairs_on(copula, n, seed, STREAM_UNIFORM, exec))
}

fn transform(pairs: Vec<(f64, f64)>, mx: &MarginalModel, my: &MarginalModel) -> Vec<(f64, f64)> {
    pairs
        .into_iter()
        .map(|(u, v)| (mx.quantile(u).expect("u in (0,1)"), my.quantile(v).expect("v in (0,1)")))
        .collect()
}

/// `n` draws `(X, Y)` with marginals `marg_x`, `marg_y` coupled by `copula`.
pub fn sample_pairs(
    copula: &CopulaSpec,
    marg_x: &MarginalModel,
    marg_y: &MarginalModel,
    n: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    sample_pairs_with(copula, marg_x, marg_y, n, seed, Execution::default())
}

pub fn sample_pairs_with(
    copula: &CopulaSpec,
    marg_x: &MarginalModel,
    marg_y: &MarginalModel,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<(f64, f64)>> {
    marg_x.validate()?;
    marg_y.validate()?;
    let uv = sample_uniform_pairs_with(copula, n, seed, exec)?;
    Ok(transform(uv, marg_x, marg_y))
}

/// A Monte Carlo frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

impl OracleEstimate {
    pub fn from_count(count: usize, n: usize) -> Self {
        let p = count as f64 / n as f64;
        OracleEstimate { estimate: p, std_error: (p * (1.0 - p) / n as f64).sqrt(), n }
    }

    /// Standard error for judging `value`: the binomial SE at `value` itself,
    /// floored at one count so empty cells still get a band.
    pub fn std_error_at(&self, value: f64) -> f64 {
        (value * (1.0 - value) / self.n as f64).sqrt().max(1.0 / self.n as f64)
    }

    /// `|value - estimate| <= k` standard errors.
    pub fn agrees(&self, value: f64, k: f64) -> bool {
        (value - self.estimate).abs() <= k * self.std_error_at(value)
    }
}

/// Frequency of `{U > u, V > v}` among `n` copula samples.
pub fn oracle_survival(copula: &CopulaSpec, u: f64, v: f64, n: usize, seed: u64) -> Result<OracleEstimate, CopulaError> {
    copula.validate()?;
    let counts = Execution::default().map_range(n.div_ceil(BLOCK_SIZE), |b| {
        let mut rng = block_rng(seed, STREAM_UNIFORM, b);
        let len = BLOCK_SIZE.min(n - b * BLOCK_SIZE);
        (0..len).filter(|_| {
            let (x, y) = draw(copula, &mut rng);
            x > u && y > v
        }).count()
    });
    Ok(OracleEstimate::from_count(counts.into_iter().sum(), n))
}

/// Whether a case with scores `(a, b)` is called positive under `kind` at
/// Test-B threshold `x`.
pub fn decide(kind: CurveKind, model: &JointDiagnosticModel, a: f64, b: f64, x: f64) -> bool {
    let ro = model.t_a_ro.unwrap_or(f64::NEG_INFINITY);
    let ri = model.t_a_ri.unwrap_or(f64::INFINITY);
    match kind {
        CurveKind::TestA => a > x,
        CurveKind::TestB => b > x,
        CurveKind::RuleOut => a > ro && b > x,
        CurveKind::RuleIn => a > ri || b > x,
        CurveKind::Combined => a > ri || (a > ro && b > x),
    }
}

/// Sampled `(score_a, score_b)` pairs for one class of a model.
pub fn sample_class(model: &JointDiagnosticModel, label: Label, n: usize, seed: u64, exec: Execution) -> Result<Vec<(f64, f64)>> {
    model.validate()?;
    let (copula, ma, mb, purpose) = match label {
        Label::NonDiseased => (&model.copula_n, &model.marg_an, &model.marg_bn, STREAM_NON_DISEASED),
        Label::Diseased => (&model.copula_d, &model.marg_ad, &model.marg_bd, STREAM_DISEASED),
    };
    let uv = uniform_pairs_on(copula, n, seed, purpose, exec);
    Ok(transform(uv, ma, mb))
}

/// Simulated FPF and TPF of `kind` at each Test-B threshold in `xs`, from
/// `n` cases per class.
pub fn oracle_points(
    model: &JointDiagnosticModel,
    kind: CurveKind,
    xs: &[f64],
    n: usize,
    seed: u64,
) -> Result<Vec<(OracleEstimate, OracleEstimate)>> {
    let exec = Execution::default();
    let neg = sample_class(model, Label::NonDiseased, n, seed, exec)?;
    let pos = sample_class(model, Label::Diseased, n, seed, exec)?;
    let rate = |pairs: &[(f64, f64)], x: f64| {
        OracleEstimate::from_count(pairs.iter().filter(|&&(a, b)| decide(kind, model, a, b, x)).count(), pairs.len())
    };
    Ok(exec.map_slice(xs, |&x| (rate(&neg, x), rate(&pos, x))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub model: JointDiagnosticModel,
    pub n_per_class: usize,
    pub seed: u64,
    /// When set, a cohort of `2 · n_per_class` cases is drawn with each
    /// case diseased with this probability.
    #[serde(default)]
    pub prevalence: Option<f64>,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        let bad = |m: String| Error::Fit(crate::fitting::FitError::Config(m));
        if self.n_per_class == 0 {
            return Err(bad("n_per_class must be at least 1".into()));
        }
        if let Some(p) = self.prevalence {
            if !(0.0..=1.0).contains(&p) {
                return Err(bad(format!("prevalence {p} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Labelled synthetic dataset drawn from the model. Case ids are `case000001`,
/// ... in row order; balanced cohorts list non-diseased cases first.
pub fn synth_dataset(config: &SimulationConfig) -> Result<ScoreDataset> {
    synth_dataset_with(config, Execution::default())
}

pub fn synth_dataset_with(config: &SimulationConfig, exec: Execution) -> Result<ScoreDataset> {
    config.validate()?;
    let labels: Vec<Label> = match config.prevalence {
        None => std::iter::repeat(Label::NonDiseased)
            .take(config.n_per_class)
            .chain(std::iter::repeat(Label::Diseased).take(config.n_per_class))
            .collect(),
        Some(p) => blocks(2 * config.n_per_class, exec, |b, len| {
            let mut rng = block_rng(config.seed, STREAM_LABELS, b);
            (0..len).map(|_| if rng.gen::<f64>() < p { Label::Diseased } else { Label::NonDiseased }).collect()
        }),
    };
    let n_d = labels.iter().filter(|&&l| l == Label::Diseased).count();
    let mut neg = sample_class(&config.model, Label::NonDiseased, labels.len() - n_d, config.seed, exec)?.into_iter();
    let mut pos = sample_class(&config.model, Label::Diseased, n_d, config.seed, exec)?.into_iter();
    let records = labels
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            let (a, b) = match label {
                Label::NonDiseased => neg.next(),
                Label::Diseased => pos.next(),
            }
            .expect("class sample sized from labels");
            ScoreRecord::new(format!("case{:06}", i + 1), label, a, b)
        })
        .collect();
    Ok(ScoreDataset::new(records)?)
}
