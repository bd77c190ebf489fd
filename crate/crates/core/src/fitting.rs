//! Empirical side: score datasets, step ROC curves, binormal fits, projected
//! rule-out / rule-in operating points and the end-to-end [`analyze`] pipeline.
//!
//! Binormal convention: non-diseased scores follow `Normal(0, 1)` and
//! diseased scores `Normal(mu, sigma²)` on a latent scale, so an operating
//! point satisfies `Φ⁻¹(TPF) = (mu + Φ⁻¹(FPF)) / sigma`.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::copulas::{CopulaError, CopulaFamily, CopulaSpec};
use crate::dependence::{self, DependenceError, MeasureKind};
use crate::exec::Execution;
use crate::jointroc::{self, CurveKind, JointDiagnosticModel, OperatingPoint, RocCurve, RocError, RocKind};
use crate::marginals::{standard_normal_cdf, standard_normal_quantile, MarginalError, MarginalModel};

/// Admissible diseased-SD interval for single-point fits.
pub const SIGMA_BOUNDS: (f64, f64) = (0.05, 20.0);

const CSV_HEADER: [&str; 4] = ["case_id", "label", "score_a", "score_b"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error(transparent)]
    Roc(#[from] RocError),
    #[error(transparent)]
    Dependence(#[from] DependenceError),
    #[error(transparent)]
    Marginal(#[from] MarginalError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error("CSV line {line}{}: {message}", column.as_ref().map(|c| format!(", column '{c}'")).unwrap_or_default())]
    Csv { line: u64, column: Option<String>, message: String },
    #[error("I/O error: {0}")]
    Io(String),
    #[error("duplicate case_id '{0}'")]
    DuplicateCaseId(String),
    #[error("dataset has no {0} cases")]
    EmptyClass(&'static str),
    #[error("case '{case_id}' has no value for {column}")]
    MissingScore { case_id: String, column: &'static str },
    #[error("binormal fit needs at least 2 interior operating points (got {0})")]
    TooFewInteriorPoints(usize),
    #[error("operating points are degenerate: all transformed points coincide")]
    DegeneratePoints,
    #[error("fitted Deming slope {0} is not positive")]
    NonPositiveSlope(f64),
    #[error("mean-to-sigma ratio is undefined for sigma = {0}")]
    UndefinedRatio(f64),
    #[error("mean-to-sigma ratio must be finite and nonzero (got {0})")]
    InvalidRatio(f64),
    #[error("operating point ({fpf}, {tpf}) must be strictly inside the unit square")]
    InvalidOperatingPoint { fpf: f64, tpf: f64 },
    #[error("AUC {0} must lie strictly inside (0, 1)")]
    InvalidAuc(f64),
    #[error("no admissible sigma in ({lo}, {hi}): {reason}")]
    NoAdmissibleRoot { lo: f64, hi: f64, reason: String },
    #[error("rule-out threshold {rule_out} must be below rule-in threshold {rule_in}")]
    ThresholdOrder { rule_out: f64, rule_in: f64 },
    #[error("target FPF {0} must lie strictly inside (0, 1)")]
    InvalidTargetFpf(f64),
    #[error("no Test-A threshold gives an empirical FPF strictly inside (0, 1)")]
    NoInteriorThreshold,
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl FitError {
    pub fn is_numeric(&self) -> bool {
        match self {
            FitError::NoAdmissibleRoot { .. } => true,
            FitError::Roc(RocError::Copula(e)) | FitError::Copula(e) => e.is_numeric(),
            FitError::Dependence(e) => e.is_numeric(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NonDiseased,
    Diseased,
}

impl Label {
    fn name(self) -> &'static str {
        match self {
            Label::NonDiseased => "non-diseased",
            Label::Diseased => "diseased",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestId {
    A,
    B,
}

impl TestId {
    fn column(self) -> &'static str {
        match self {
            TestId::A => "score_a",
            TestId::B => "score_b",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub case_id: String,
    pub label: Label,
    pub score_a: Option<f64>,
    pub score_b: Option<f64>,
}

impl ScoreRecord {
    pub fn new(case_id: impl Into<String>, label: Label, score_a: f64, score_b: f64) -> Self {
        ScoreRecord { case_id: case_id.into(), label, score_a: Some(score_a), score_b: Some(score_b) }
    }

    fn score(&self, test: TestId) -> Result<f64, FitError> {
        let value = match test {
            TestId::A => self.score_a,
            TestId::B => self.score_b,
        };
        value.ok_or_else(|| FitError::MissingScore { case_id: self.case_id.clone(), column: test.column() })
    }
}

/// Per-case scores of both tests with disease labels. Case ids are unique.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScoreDataset {
    records: Vec<ScoreRecord>,
}

impl ScoreDataset {
    pub fn new(records: Vec<ScoreRecord>) -> Result<Self, FitError> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.case_id.as_str()) {
                return Err(FitError::DuplicateCaseId(r.case_id.clone()));
            }
        }
        Ok(ScoreDataset { records })
    }

    pub fn records(&self) -> &[ScoreRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.records.iter().filter(|r| r.label == label).count()
    }

    /// Fraction of diseased cases.
    pub fn prevalence(&self) -> f64 {
        self.count(Label::Diseased) as f64 / self.records.len() as f64
    }

    /// Both classes must be present.
    pub fn require_both_classes(&self) -> Result<(), FitError> {
        for label in [Label::NonDiseased, Label::Diseased] {
            if self.count(label) == 0 {
                return Err(FitError::EmptyClass(label.name()));
            }
        }
        Ok(())
    }

    /// Scores of one test for one class; missing values are an error.
    pub fn scores(&self, test: TestId, label: Label) -> Result<Vec<f64>, FitError> {
        self.records.iter().filter(|r| r.label == label).map(|r| r.score(test)).collect()
    }

    /// `(score_a, score_b)` pairs for one class.
    pub fn pairs(&self, label: Label) -> Result<Vec<(f64, f64)>, FitError> {
        self.records
            .iter()
            .filter(|r| r.label == label)
            .map(|r| Ok((r.score(TestId::A)?, r.score(TestId::B)?)))
            .collect()
    }

    /// Read the `case_id,label,score_a,score_b` CSV format.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, FitError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers().map_err(|e| csv_error(1, None, e.to_string()))?.clone();
        let names: Vec<&str> = header.iter().collect();
        if names != CSV_HEADER {
            return Err(csv_error(1, None, format!("header must be '{}' (got '{}')", CSV_HEADER.join(","), names.join(","))));
        }
        let mut records = Vec::new();
        for row in rdr.records() {
            let row = row.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                csv_error(line, None, e.to_string())
            })?;
            let line = row.position().map_or(0, |p| p.line());
            let case_id = row[0].to_string();
            if case_id.is_empty() {
                return Err(csv_error(line, Some("case_id"), "empty case_id".into()));
            }
            let label = match &row[1] {
                "0" => Label::NonDiseased,
                "1" => Label::Diseased,
                other => return Err(csv_error(line, Some("label"), format!("label must be 0 or 1 (got '{other}')"))),
            };
            let score = |idx: usize| -> Result<Option<f64>, FitError> {
                let field = &row[idx];
                if field.is_empty() {
                    return Ok(None);
                }
                match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(Some(v)),
                    _ => Err(csv_error(line, Some(CSV_HEADER[idx]), format!("'{field}' is not a finite number"))),
                }
            };
            records.push(ScoreRecord { case_id, label, score_a: score(2)?, score_b: score(3)? });
        }
        let dataset = ScoreDataset::new(records)?;
        Ok(dataset)
    }

    pub fn from_csv_str(text: &str) -> Result<Self, FitError> {
        Self::from_csv_reader(text.as_bytes())
    }

    /// Write CSV; scores carry 17 significant digits, missing scores are empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), FitError> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| FitError::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.records {
            let label = match r.label {
                Label::NonDiseased => "0",
                Label::Diseased => "1",
            };
            let fmt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
            w.write_record([r.case_id.as_str(), label, &fmt(r.score_a), &fmt(r.score_b)]).map_err(io)?;
        }
        w.flush().map_err(|e| FitError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String, FitError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| FitError::Io(e.to_string()))
    }
}

fn csv_error(line: u64, column: Option<&str>, message: String) -> FitError {
    FitError::Csv { line, column: column.map(str::to_string), message }
}

/// Scientific notation with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Descending decision thresholds over the distinct values of `scores`:
/// `+inf`, midpoints between neighbouring distinct values, `-inf`.
/// A case is positive when its score is strictly greater than the threshold.
pub fn midpoint_thresholds(scores: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut values: Vec<f64> = scores.into_iter().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup();
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(f64::INFINITY);
    for w in values.windows(2) {
        out.push(0.5 * (w[0] + w[1]));
    }
    if !values.is_empty() {
        out.push(f64::NEG_INFINITY);
    }
    out
}

fn count_above(sorted_ascending: &[f64], t: f64) -> usize {
    sorted_ascending.len() - sorted_ascending.partition_point(|&v| v <= t)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// `(threshold, point)` pairs of the step ROC curve of `neg` vs `pos`
/// scores, thresholds descending.
pub fn empirical_points(neg: &[f64], pos: &[f64]) -> Vec<(f64, OperatingPoint)> {
    let neg_sorted = sorted(neg.to_vec());
    let pos_sorted = sorted(pos.to_vec());
    let (nn, nd) = (neg.len() as f64, pos.len() as f64);
    midpoint_thresholds(neg.iter().chain(pos).copied())
        .into_iter()
        .map(|t| (t, OperatingPoint::new(count_above(&neg_sorted, t) as f64 / nn, count_above(&pos_sorted, t) as f64 / nd)))
        .collect()
}

/// Empirical (step) ROC curve of one test, from `(0,0)` to `(1,1)`.
pub fn empirical_roc(data: &ScoreDataset, test: TestId) -> Result<RocCurve, FitError> {
    data.require_both_classes()?;
    let neg = data.scores(test, Label::NonDiseased)?;
    let pos = data.scores(test, Label::Diseased)?;
    let points = empirical_points(&neg, &pos).into_iter().map(|(_, p)| p).collect();
    Ok(RocCurve::new(RocKind::Empirical, [0.0, 1.0], points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitSource {
    DemingFit,
    PointPlusRatio,
    AucPlusPoint,
}

/// Binormal ROC parameters on the `Normal(0,1)` vs `Normal(mu, sigma²)` scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinormalFit {
    pub mu: f64,
    pub sigma: f64,
    pub source: FitSource,
    /// Set when the fitted curve is the chance diagonal (AUC 0.5), which
    /// leaves sigma unidentified.
    #[serde(default)]
    pub degenerate: bool,
}

impl BinormalFit {
    pub fn auc(&self) -> f64 {
        standard_normal_cdf(self.mu / (1.0 + self.sigma * self.sigma).sqrt())
    }

    pub fn tpf_at(&self, fpf: f64) -> Result<f64, FitError> {
        let z = standard_normal_quantile(fpf)?;
        Ok(standard_normal_cdf((self.mu + z) / self.sigma))
    }

    pub fn non_diseased(&self) -> MarginalModel {
        MarginalModel::standard_normal()
    }

    pub fn diseased(&self) -> MarginalModel {
        MarginalModel::Normal { mu: self.mu, sigma: self.sigma }
    }

    pub fn curve(&self, n_points: usize, exec: Execution) -> Result<RocCurve, FitError> {
        Ok(jointroc::univariate_curve(&self.non_diseased(), &self.diseased(), n_points, exec)?)
    }
}

fn interior_z(points: &[OperatingPoint]) -> Vec<(f64, f64)> {
    points
        .iter()
        .filter(|p| p.fpf > 0.0 && p.fpf < 1.0 && p.tpf > 0.0 && p.tpf < 1.0)
        .map(|p| (crate::marginals::normal_quantile_unchecked(p.fpf), crate::marginals::normal_quantile_unchecked(p.tpf)))
        .collect()
}

/// Deming regression of `Φ⁻¹(TPF)` on `Φ⁻¹(FPF)`; `delta` is the ratio of
/// the y-error variance to the x-error variance (1 = orthogonal regression).
/// Points on the boundary of the unit square are dropped first.
pub fn fit_binormal_deming(points: &[OperatingPoint], delta: f64) -> Result<BinormalFit, FitError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(FitError::Config(format!("Deming delta must be positive (got {delta})")));
    }
    let z = interior_z(points);
    if z.len() < 2 {
        return Err(FitError::TooFewInteriorPoints(z.len()));
    }
    let n = z.len() as f64;
    let mx = z.iter().map(|p| p.0).sum::<f64>() / n;
    let my = z.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in &z {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 && syy == 0.0 {
        return Err(FitError::DegeneratePoints);
    }
    if !(sxy > 0.0) {
        return Err(FitError::NonPositiveSlope(if sxy == 0.0 { 0.0 } else { sxy.signum() }));
    }
    let d = syy - delta * sxx;
    let slope = (d + (d * d + 4.0 * delta * sxy * sxy).sqrt()) / (2.0 * sxy);
    let intercept = my - slope * mx;
    let sigma = 1.0 / slope;
    let mu = intercept * sigma;
    let mut fit = BinormalFit { mu, sigma, source: FitSource::DemingFit, degenerate: false };
    if (fit.auc() - 0.5).abs() < 1e-9 {
        fit = BinormalFit { mu: 0.0, sigma: 1.0, source: FitSource::DemingFit, degenerate: true };
    }
    Ok(fit)
}

/// `mu / (sigma - 1)`.
pub fn mean_to_sigma_ratio(fit: &BinormalFit) -> Result<f64, FitError> {
    if (fit.sigma - 1.0).abs() <= 1e-9 {
        return Err(FitError::UndefinedRatio(fit.sigma));
    }
    Ok(fit.mu / (fit.sigma - 1.0))
}

fn interior_point(op: OperatingPoint) -> Result<(f64, f64), FitError> {
    if !(op.fpf > 0.0 && op.fpf < 1.0 && op.tpf > 0.0 && op.tpf < 1.0) {
        return Err(FitError::InvalidOperatingPoint { fpf: op.fpf, tpf: op.tpf });
    }
    Ok((standard_normal_quantile(op.fpf)?, standard_normal_quantile(op.tpf)?))
}

/// Binormal curve through `op` whose mean-to-sigma ratio equals `ratio`.
///
/// The two conditions are linear in `(mu, sigma)`, giving
/// `sigma = (r - z_N) / (r - z_D)` and `mu = sigma·z_D - z_N`.
pub fn fit_from_point_and_ratio(op: OperatingPoint, ratio: f64) -> Result<BinormalFit, FitError> {
    if !ratio.is_finite() || ratio == 0.0 {
        return Err(FitError::InvalidRatio(ratio));
    }
    let (z_n, z_d) = interior_point(op)?;
    let (lo, hi) = SIGMA_BOUNDS;
    let denom = ratio - z_d;
    let sigma = (ratio - z_n) / denom;
    if denom == 0.0 || !(sigma > lo && sigma < hi) {
        return Err(FitError::NoAdmissibleRoot { lo, hi, reason: format!("ratio {ratio} implies sigma = {sigma}") });
    }
    Ok(BinormalFit { mu: sigma * z_d - z_n, sigma, source: FitSource::PointPlusRatio, degenerate: false })
}

/// Binormal curve through `op` with the given AUC. When several sigma values
/// qualify, the one closest to 1 (on a log scale) is returned.
pub fn fit_from_auc_and_point(auc: f64, op: OperatingPoint) -> Result<BinormalFit, FitError> {
    if !(auc > 0.0 && auc < 1.0) {
        return Err(FitError::InvalidAuc(auc));
    }
    let (z_n, z_d) = interior_point(op)?;
    let target = standard_normal_quantile(auc)?;
    let g = |s: f64| (s * z_d - z_n) / (1.0 + s * s).sqrt() - target;
    let (lo, hi) = SIGMA_BOUNDS;
    const STEPS: usize = 400;
    let grid: Vec<f64> = (0..=STEPS).map(|i| lo * (hi / lo).powf(i as f64 / STEPS as f64)).collect();
    let mut best: Option<f64> = None;
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut ga, gb) = (g(a), g(b));
        if ga == 0.0 || ga.signum() == gb.signum() {
            if ga != 0.0 {
                continue;
            }
            b = a;
        }
        while b - a > 1e-14 * b {
            let m = 0.5 * (a + b);
            let gm = g(m);
            if gm.signum() == ga.signum() {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        let root = 0.5 * (a + b);
        if best.is_none_or(|r: f64| root.ln().abs() < r.ln().abs()) {
            best = Some(root);
        }
    }
    let sigma = best.ok_or_else(|| FitError::NoAdmissibleRoot {
        lo,
        hi,
        reason: format!("no binormal curve through ({}, {}) has AUC {auc}", op.fpf, op.tpf),
    })?;
    Ok(BinormalFit { mu: sigma * z_d - z_n, sigma, source: FitSource::AucPlusPoint, degenerate: false })
}

fn check_order(t_a_ro: Option<f64>, t_a_ri: Option<f64>) -> Result<(), FitError> {
    if let (Some(ro), Some(ri)) = (t_a_ro, t_a_ri) {
        if !(ro < ri) {
            return Err(FitError::ThresholdOrder { rule_out: ro, rule_in: ri });
        }
    }
    Ok(())
}

/// Per-class counts for a projected decision rule.
struct ProjectedClass {
    total: usize,
    auto_positive: usize,
    eligible_b: Vec<f64>,
}

impl ProjectedClass {
    fn new(pairs: &[(f64, f64)], ro: f64, ri: f64) -> Self {
        let auto_positive = pairs.iter().filter(|p| p.0 > ri).count();
        let eligible_b = sorted(pairs.iter().filter(|p| p.0 > ro && p.0 <= ri).map(|p| p.1).collect());
        ProjectedClass { total: pairs.len(), auto_positive, eligible_b }
    }

    fn fraction(&self, t_b: f64) -> f64 {
        (self.auto_positive + count_above(&self.eligible_b, t_b)) as f64 / self.total as f64
    }
}

/// Projected operating points for every Test-B threshold, thresholds
/// descending. A case is called positive when
/// `score_a > t_a_ri` or (`score_a > t_a_ro` and `score_b > t_b`);
/// a missing threshold disables that side of the rule.
pub fn projected_points(
    data: &ScoreDataset,
    t_a_ro: Option<f64>,
    t_a_ri: Option<f64>,
) -> Result<Vec<(f64, OperatingPoint)>, FitError> {
    data.require_both_classes()?;
    check_order(t_a_ro, t_a_ri)?;
    let ro = t_a_ro.unwrap_or(f64::NEG_INFINITY);
    let ri = t_a_ri.unwrap_or(f64::INFINITY);
    let neg_pairs = data.pairs(Label::NonDiseased)?;
    let pos_pairs = data.pairs(Label::Diseased)?;
    let neg = ProjectedClass::new(&neg_pairs, ro, ri);
    let pos = ProjectedClass::new(&pos_pairs, ro, ri);
    let thresholds = midpoint_thresholds(neg_pairs.iter().chain(&pos_pairs).map(|p| p.1));
    Ok(thresholds.into_iter().map(|t| (t, OperatingPoint::new(neg.fraction(t), pos.fraction(t)))).collect())
}

/// Projected empirical curve (kind `Empirical`) over all Test-B thresholds.
pub fn project_operating_points(
    data: &ScoreDataset,
    t_a_ro: Option<f64>,
    t_a_ri: Option<f64>,
) -> Result<RocCurve, FitError> {
    let points = projected_points(data, t_a_ro, t_a_ri)?.into_iter().map(|(_, p)| p).collect();
    Ok(RocCurve::spanning(RocKind::Empirical, points))
}

/// Projected operating point at a single Test-B threshold.
pub fn project_point(
    data: &ScoreDataset,
    t_a_ro: Option<f64>,
    t_a_ri: Option<f64>,
    t_b: f64,
) -> Result<OperatingPoint, FitError> {
    data.require_both_classes()?;
    check_order(t_a_ro, t_a_ri)?;
    let ro = t_a_ro.unwrap_or(f64::NEG_INFINITY);
    let ri = t_a_ri.unwrap_or(f64::INFINITY);
    let neg = ProjectedClass::new(&data.pairs(Label::NonDiseased)?, ro, ri);
    let pos = ProjectedClass::new(&data.pairs(Label::Diseased)?, ro, ri);
    Ok(OperatingPoint::new(neg.fraction(t_b), pos.fraction(t_b)))
}

/// How the Gaussian copula's latent correlation is calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianCalibration {
    /// Sample Pearson correlation of the raw scores.
    #[default]
    Pearson,
    /// `sin(π τ / 2)` from Kendall's tau-b.
    Kendall,
}

/// Settings for [`analyze`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Copula families to model; independence is always added.
    pub families: Vec<CopulaFamily>,
    /// Target Test-A FPF for the rule-out threshold.
    pub rule_out_fpf: Option<f64>,
    /// Target Test-A FPF for the rule-in threshold.
    pub rule_in_fpf: Option<f64>,
    /// Raw Test-B threshold for the projected operating point. When absent
    /// the threshold maximising Youden's index of Test B alone is used.
    pub b_threshold: Option<f64>,
    pub deming_delta: f64,
    pub gaussian_calibration: GaussianCalibration,
    /// Prevalences for the workload table; the dataset prevalence when empty.
    pub prevalences: Vec<f64>,
    pub n_points: usize,
    pub seed: Option<u64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            families: vec![CopulaFamily::Gaussian, CopulaFamily::Frank, CopulaFamily::Clayton],
            rule_out_fpf: None,
            rule_in_fpf: None,
            b_threshold: None,
            deming_delta: 1.0,
            gaussian_calibration: GaussianCalibration::Pearson,
            prevalences: Vec::new(),
            n_points: jointroc::DEFAULT_CURVE_POINTS,
            seed: None,
        }
    }
}

impl AnalysisConfig {
    fn validate(&self) -> Result<(), FitError> {
        for (name, v) in [("rule_out_fpf", self.rule_out_fpf), ("rule_in_fpf", self.rule_in_fpf)] {
            if let Some(f) = v {
                if !(f > 0.0 && f < 1.0) {
                    return Err(FitError::Config(format!("{name} must lie strictly inside (0, 1) (got {f})")));
                }
            }
        }
        if let (Some(ro), Some(ri)) = (self.rule_out_fpf, self.rule_in_fpf) {
            if !(ri < ro) {
                return Err(FitError::Config(format!(
                    "rule_in_fpf ({ri}) must be below rule_out_fpf ({ro}) so that T_ro < T_ri"
                )));
            }
        }
        if let Some(p) = self.prevalences.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(FitError::Config(format!("prevalence {p} must lie in [0, 1]")));
        }
        if self.n_points < 2 {
            return Err(FitError::Config(format!("n_points must be at least 2 (got {})", self.n_points)));
        }
        Ok(())
    }

    /// Requested families with independence appended, duplicates removed.
    pub fn resolved_families(&self) -> Vec<CopulaFamily> {
        let mut out: Vec<CopulaFamily> = Vec::new();
        for &f in self.families.iter().chain(std::iter::once(&CopulaFamily::Independence)) {
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub input_sha256: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFit {
    pub fit: BinormalFit,
    pub fitted_auc: f64,
    pub empirical_auc: f64,
    pub empirical: RocCurve,
    pub fitted: RocCurve,
}

/// Class-conditional correlations of `(score_a, score_b)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub label: Label,
    pub n: usize,
    pub pearson: f64,
    pub kendall_tau_b: f64,
    pub spearman: f64,
    /// `sin(π τ / 2)`: the Gaussian latent correlation implied by Kendall's tau.
    pub latent_rho_from_kendall: f64,
}

/// Empirical Test-A threshold chosen for a target FPF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub target_fpf: f64,
    pub score: f64,
    pub empirical: OperatingPoint,
    /// The same FPF on the latent `Normal(0, 1)` scale.
    pub latent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaucEntry {
    pub kind: CurveKind,
    pub fpf_lo: f64,
    pub fpf_hi: f64,
    pub value: f64,
}

/// Model curves for one copula family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyModel {
    pub family: CopulaFamily,
    pub calibrated_from: Option<MeasureKind>,
    pub model: JointDiagnosticModel,
    pub curves: Vec<(CurveKind, RocCurve)>,
    pub pauc: Vec<PaucEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyTpf {
    pub family: CopulaFamily,
    pub tpf: Option<f64>,
}

/// Projected empirical operating point at the chosen Test-B threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub kind: CurveKind,
    pub b_threshold: f64,
    pub point: OperatingPoint,
    pub b_alone: OperatingPoint,
    pub model_tpf: Vec<FamilyTpf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedCurve {
    pub kind: CurveKind,
    pub curve: RocCurve,
    pub pauc: Option<PaucEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadRow {
    pub prevalence: f64,
    pub fpf_a: f64,
    pub tpf_a: f64,
    pub fraction_ruled_out: f64,
}

/// Everything [`analyze`] produces; round-trips through JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub config: AnalysisConfig,
    pub n_non_diseased: usize,
    pub n_diseased: usize,
    pub test_a: TestFit,
    pub test_b: TestFit,
    pub correlations: Vec<CorrelationRow>,
    pub rule_out: Option<ThresholdChoice>,
    pub rule_in: Option<ThresholdChoice>,
    pub models: Vec<FamilyModel>,
    pub projected: Vec<ProjectedCurve>,
    pub projected_points: Vec<ProjectedPoint>,
    pub workload: Vec<WorkloadRow>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    /// Flat `metric,value` rows for the human-readable table.
    pub fn metric_rows(&self) -> Vec<(String, f64)> {
        let mut rows = vec![
            ("n_non_diseased".to_string(), self.n_non_diseased as f64),
            ("n_diseased".to_string(), self.n_diseased as f64),
        ];
        for (name, t) in [("a", &self.test_a), ("b", &self.test_b)] {
            rows.push((format!("test_{name}.mu"), t.fit.mu));
            rows.push((format!("test_{name}.sigma"), t.fit.sigma));
            rows.push((format!("test_{name}.fitted_auc"), t.fitted_auc));
            rows.push((format!("test_{name}.empirical_auc"), t.empirical_auc));
        }
        for c in &self.correlations {
            let class = match c.label {
                Label::NonDiseased => "n",
                Label::Diseased => "d",
            };
            rows.push((format!("corr_{class}.pearson"), c.pearson));
            rows.push((format!("corr_{class}.kendall_tau_b"), c.kendall_tau_b));
            rows.push((format!("corr_{class}.spearman"), c.spearman));
        }
        for (name, t) in [("rule_out", &self.rule_out), ("rule_in", &self.rule_in)] {
            if let Some(t) = t {
                rows.push((format!("{name}.score_a"), t.score));
                rows.push((format!("{name}.fpf_a"), t.empirical.fpf));
                rows.push((format!("{name}.tpf_a"), t.empirical.tpf));
            }
        }
        for m in &self.models {
            if let Some(p) = m.model.copula_n.parameter() {
                rows.push((format!("{}.param_n", m.family), p));
            }
            if let Some(p) = m.model.copula_d.parameter() {
                rows.push((format!("{}.param_d", m.family), p));
            }
            for e in &m.pauc {
                rows.push((format!("{}.{}.pauc", m.family, kind_name(e.kind)), e.value));
            }
        }
        for p in &self.projected {
            if let Some(e) = &p.pauc {
                rows.push((format!("projected.{}.pauc", kind_name(p.kind)), e.value));
            }
        }
        for p in &self.projected_points {
            rows.push((format!("projected_point.{}.fpf", kind_name(p.kind)), p.point.fpf));
            rows.push((format!("projected_point.{}.tpf", kind_name(p.kind)), p.point.tpf));
        }
        for w in &self.workload {
            rows.push((format!("workload.p={}", w.prevalence), w.fraction_ruled_out));
        }
        rows
    }
}

pub fn kind_name(kind: CurveKind) -> &'static str {
    match kind {
        CurveKind::TestA => "test_a",
        CurveKind::TestB => "test_b",
        CurveKind::RuleOut => "rule_out",
        CurveKind::RuleIn => "rule_in",
        CurveKind::Combined => "combined",
    }
}

fn fit_test(
    data: &ScoreDataset,
    test: TestId,
    delta: f64,
    fallback_ratio: Option<f64>,
    n_points: usize,
    warnings: &mut Vec<String>,
) -> Result<TestFit, FitError> {
    let empirical = empirical_roc(data, test)?;
    let interior = interior_z(&empirical.points).len();
    let fit = if interior >= 2 || fallback_ratio.is_none() {
        fit_binormal_deming(&empirical.points, delta)?
    } else {
        let op = *empirical
            .points
            .iter()
            .find(|p| p.fpf > 0.0 && p.fpf < 1.0 && p.tpf > 0.0 && p.tpf < 1.0)
            .ok_or(FitError::TooFewInteriorPoints(0))?;
        warnings.push(format!(
            "test {test:?} has a single interior operating point; fitted through it with the Test-A mean-to-sigma ratio"
        ));
        match fallback_ratio {
            Some(r) if r.is_finite() && r != 0.0 => fit_from_point_and_ratio(op, r)?,
            _ => {
                let (z_n, z_d) = interior_point(op)?;
                warnings.push("Test-A curve has equal variances; Test-B fitted as equal-variance binormal".into());
                BinormalFit { mu: z_d - z_n, sigma: 1.0, source: FitSource::PointPlusRatio, degenerate: false }
            }
        }
    };
    if fit.degenerate {
        warnings.push(format!("test {test:?} fit is the chance diagonal; sigma fixed at 1"));
    }
    let empirical_auc = jointroc::auc(&empirical)?;
    Ok(TestFit { fit, fitted_auc: fit.auc(), empirical_auc, fitted: fit.curve(n_points, Execution::Parallel)?, empirical })
}

/// Pearson, Kendall tau-b and Spearman correlations of one class's score pairs.
pub fn correlation_row(data: &ScoreDataset, label: Label) -> Result<CorrelationRow, FitError> {
    let pairs = data.pairs(label)?;
    let kendall = dependence::sample_kendall(&pairs)?;
    Ok(CorrelationRow {
        label,
        n: pairs.len(),
        pearson: dependence::sample_pearson(&pairs)?,
        kendall_tau_b: kendall,
        spearman: dependence::sample_spearman(&pairs)?,
        latent_rho_from_kendall: (std::f64::consts::FRAC_PI_2 * kendall).sin(),
    })
}

/// Choose the finite midpoint threshold whose empirical FPF is closest to
/// `target` among those with FPF strictly inside (0, 1).
pub fn threshold_for_target_fpf(neg: &[f64], pos: &[f64], target: f64) -> Result<ThresholdChoice, FitError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(FitError::InvalidTargetFpf(target));
    }
    let (score, empirical) = empirical_points(neg, pos)
        .into_iter()
        .filter(|(t, p)| t.is_finite() && p.fpf > 0.0 && p.fpf < 1.0)
        .min_by(|a, b| (a.1.fpf - target).abs().total_cmp(&(b.1.fpf - target).abs()))
        .ok_or(FitError::NoInteriorThreshold)?;
    let latent = standard_normal_quantile(1.0 - empirical.fpf)?;
    Ok(ThresholdChoice { target_fpf: target, score, empirical, latent })
}

fn calibrate(
    family: CopulaFamily,
    row: &CorrelationRow,
    gaussian: GaussianCalibration,
    warnings: &mut Vec<String>,
) -> Result<(CopulaSpec, Option<MeasureKind>), FitError> {
    let class = row.label.name();
    match family {
        CopulaFamily::Independence => Ok((CopulaSpec::Independence, None)),
        CopulaFamily::Gaussian => {
            let (rho, kind) = match gaussian {
                GaussianCalibration::Pearson => (row.pearson, MeasureKind::PearsonRho),
                GaussianCalibration::Kendall => (row.latent_rho_from_kendall, MeasureKind::KendallTau),
            };
            Ok((CopulaSpec::new(family, rho)?, Some(kind)))
        }
        _ => {
            if row.kendall_tau_b <= 0.0 {
                warnings.push(format!(
                    "{family}: {class} Kendall tau {} is not positive; using the independence copula",
                    row.kendall_tau_b
                ));
                return Ok((CopulaSpec::Independence, None));
            }
            let theta = dependence::theta_from_tau(family, row.kendall_tau_b)?;
            Ok((CopulaSpec::new(family, theta)?, Some(MeasureKind::KendallTau)))
        }
    }
}

fn youden_threshold(data: &ScoreDataset) -> Result<f64, FitError> {
    let neg = data.scores(TestId::B, Label::NonDiseased)?;
    let pos = data.scores(TestId::B, Label::Diseased)?;
    empirical_points(&neg, &pos)
        .into_iter()
        .filter(|(t, _)| t.is_finite())
        .max_by(|a, b| (a.1.tpf - a.1.fpf).total_cmp(&(b.1.tpf - b.1.fpf)))
        .map(|(t, _)| t)
        .ok_or_else(|| FitError::Config("Test B has a single distinct score".into()))
}

/// The full empirical pipeline: fits, correlations, calibrated copula models
/// for each family, projected empirical curves and points, pAUC and
/// workload tables.
pub fn analyze(data: &ScoreDataset, config: &AnalysisConfig) -> Result<AnalysisReport, FitError> {
    config.validate()?;
    data.require_both_classes()?;
    let neg_pairs = data.pairs(Label::NonDiseased)?;
    let pos_pairs = data.pairs(Label::Diseased)?;
    let mut warnings = Vec::new();

    let test_a = fit_test(data, TestId::A, config.deming_delta, None, config.n_points, &mut warnings)?;
    let ratio = mean_to_sigma_ratio(&test_a.fit).ok();
    let test_b = fit_test(data, TestId::B, config.deming_delta, Some(ratio.unwrap_or(f64::NAN)), config.n_points, &mut warnings)?;

    let correlations = vec![correlation_row(data, Label::NonDiseased)?, correlation_row(data, Label::Diseased)?];

    let neg_a: Vec<f64> = neg_pairs.iter().map(|p| p.0).collect();
    let pos_a: Vec<f64> = pos_pairs.iter().map(|p| p.0).collect();
    let choose = |t: Option<f64>| t.map(|f| threshold_for_target_fpf(&neg_a, &pos_a, f)).transpose();
    let rule_out = choose(config.rule_out_fpf)?;
    let rule_in = choose(config.rule_in_fpf)?;
    if let (Some(ro), Some(ri)) = (&rule_out, &rule_in) {
        if !(ro.score < ri.score) {
            return Err(FitError::ThresholdOrder { rule_out: ro.score, rule_in: ri.score });
        }
    }

    let kinds: Vec<CurveKind> = [
        (CurveKind::RuleOut, rule_out.is_some()),
        (CurveKind::RuleIn, rule_in.is_some()),
        (CurveKind::Combined, rule_out.is_some() && rule_in.is_some()),
    ]
    .into_iter()
    .filter_map(|(k, on)| on.then_some(k))
    .collect();

    let mut models = Vec::new();
    for family in config.resolved_families() {
        let (copula_n, from_n) = calibrate(family, &correlations[0], config.gaussian_calibration, &mut warnings)?;
        let (copula_d, from_d) = calibrate(family, &correlations[1], config.gaussian_calibration, &mut warnings)?;
        let model = JointDiagnosticModel {
            marg_an: test_a.fit.non_diseased(),
            marg_ad: test_a.fit.diseased(),
            marg_bn: test_b.fit.non_diseased(),
            marg_bd: test_b.fit.diseased(),
            copula_n,
            copula_d,
            t_a_ro: rule_out.as_ref().map(|t| t.latent),
            t_a_ri: rule_in.as_ref().map(|t| t.latent),
        };
        let mut curves = Vec::new();
        let mut pauc = Vec::new();
        for &kind in &kinds {
            let curve = model.curve(kind, config.n_points, Execution::Parallel)?;
            let [lo, hi] = model.pauc_window(kind)?;
            pauc.push(PaucEntry { kind, fpf_lo: lo, fpf_hi: hi, value: jointroc::pauc(&curve, lo, hi)? });
            curves.push((kind, curve));
        }
        models.push(FamilyModel { family, calibrated_from: from_n.or(from_d), model, curves, pauc });
    }

    let score_of = |t: &Option<ThresholdChoice>| t.as_ref().map(|t| t.score);
    let thresholds_for = |kind: CurveKind| match kind {
        CurveKind::RuleOut => (score_of(&rule_out), None),
        CurveKind::RuleIn => (None, score_of(&rule_in)),
        _ => (score_of(&rule_out), score_of(&rule_in)),
    };

    let mut projected = Vec::new();
    for &kind in &kinds {
        let (ro, ri) = thresholds_for(kind);
        let curve = project_operating_points(data, ro, ri)?;
        let window = models.first().map(|m| m.model.pauc_window(kind)).transpose()?;
        let pauc = match window {
            Some([lo, hi]) => {
                let lo = lo.max(curve.fpf_range[0]);
                let hi = hi.min(curve.fpf_range[1]);
                (lo < hi).then(|| jointroc::pauc(&curve, lo, hi).map(|value| PaucEntry { kind, fpf_lo: lo, fpf_hi: hi, value })).transpose()?
            }
            None => None,
        };
        projected.push(ProjectedCurve { kind, curve, pauc });
    }

    let mut projected_points = Vec::new();
    if !kinds.is_empty() {
        let b_threshold = match config.b_threshold {
            Some(t) => t,
            None => youden_threshold(data)?,
        };
        let b_alone = project_point(data, None, None, b_threshold)?;
        for &kind in &kinds {
            let (ro, ri) = thresholds_for(kind);
            let point = project_point(data, ro, ri, b_threshold)?;
            let model_tpf = models
                .iter()
                .map(|m| FamilyTpf {
                    family: m.family,
                    tpf: m.curves.iter().find(|(k, _)| *k == kind).and_then(|(_, c)| c.tpf_at(point.fpf)),
                })
                .collect();
            projected_points.push(ProjectedPoint { kind, b_threshold, point, b_alone, model_tpf });
        }
    }

    let mut workload = Vec::new();
    if let Some(ro) = &rule_out {
        let prevalences = if config.prevalences.is_empty() { vec![data.prevalence()] } else { config.prevalences.clone() };
        for p in prevalences {
            workload.push(WorkloadRow {
                prevalence: p,
                fpf_a: ro.empirical.fpf,
                tpf_a: ro.empirical.tpf,
                fraction_ruled_out: jointroc::workload_ruled_out(p, ro.empirical.fpf, ro.empirical.tpf),
            });
        }
    }

    Ok(AnalysisReport {
        provenance: Provenance { tool_version: env!("CARGO_PKG_VERSION").to_string(), input_sha256: None, seed: config.seed },
        config: config.clone(),
        n_non_diseased: neg_pairs.len(),
        n_diseased: pos_pairs.len(),
        test_a,
        test_b,
        correlations,
        rule_out,
        rule_in,
        models,
        projected,
        projected_points,
        workload,
        warnings,
    })
}
