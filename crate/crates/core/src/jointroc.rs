//! Univariate, rule-out, rule-in and combined ROC curves of a joint
//! diagnostic model, with AUC, partial AUC and the workload metric.
//!
//! Test A runs first. Under rule-out a case is positive only if its Test-A
//! score exceeds `T_A^ro` *and* its Test-B score exceeds the swept threshold
//! `x`; under rule-in a case is positive if its Test-A score exceeds `T_A^ri`
//! *or* its Test-B score exceeds `x`. The combined strategy applies both with
//! `T_A^ro < T_A^ri`.
//!
//! Operating points follow from the class-conditional copulas:
//!
//! ```text
//! FPF_ro(x; T) = 1 - F_BN(x) - F_AN(T) + C_N(F_BN(x), F_AN(T))
//! FPF_ri(x; T) = (1 - F_BN(x)) + (1 - F_AN(T)) - FPF_ro(x; T)
//! FPF_comb(x)  = (1 - F_AN(T_ri)) + FPF_ro(x; T_ro) - FPF_ro(x; T_ri)
//! ```
//!
//! and likewise for TPF with the diseased marginals and `C_D`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::copulas::{clamp_probability, CopulaError, CopulaSpec};
use crate::exec::Execution;
use crate::marginals::{MarginalError, MarginalModel};

/// Number of interior Test-B thresholds in a default curve sweep.
pub const DEFAULT_CURVE_POINTS: usize = 512;

/// Slack allowed when checking a pAUC window against a curve's FPF range.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RocError {
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Marginal(#[from] MarginalError),
    #[error("model has no rule-out threshold T_A^ro")]
    MissingRuleOutThreshold,
    #[error("model has no rule-in threshold T_A^ri")]
    MissingRuleInThreshold,
    #[error("rule-out threshold {rule_out} must be below rule-in threshold {rule_in}")]
    ThresholdOrder { rule_out: f64, rule_in: f64 },
    #[error("a curve needs at least 2 points (got {0})")]
    TooFewPoints(usize),
    #[error("FPF window [{lo}, {hi}] is not inside the curve's range [{range_lo}, {range_hi}]")]
    RangeOutsideCurve { lo: f64, hi: f64, range_lo: f64, range_hi: f64 },
    #[error("target FPF {0} must lie in [0, 1]")]
    InvalidFpf(f64),
}

/// One `(FPF, TPF)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub fpf: f64,
    pub tpf: f64,
}

impl OperatingPoint {
    pub fn new(fpf: f64, tpf: f64) -> Self {
        OperatingPoint { fpf, tpf }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocKind {
    Univariate,
    RuleOut,
    RuleIn,
    Combined,
    Empirical,
}

/// Which model curve to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    TestA,
    TestB,
    RuleOut,
    RuleIn,
    Combined,
}

impl CurveKind {
    pub fn roc_kind(self) -> RocKind {
        match self {
            CurveKind::TestA | CurveKind::TestB => RocKind::Univariate,
            CurveKind::RuleOut => RocKind::RuleOut,
            CurveKind::RuleIn => RocKind::RuleIn,
            CurveKind::Combined => RocKind::Combined,
        }
    }
}

impl std::str::FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "test_a" | "a" => Ok(CurveKind::TestA),
            "test_b" | "b" => Ok(CurveKind::TestB),
            "ruleout" | "rule_out" => Ok(CurveKind::RuleOut),
            "rulein" | "rule_in" => Ok(CurveKind::RuleIn),
            "combined" => Ok(CurveKind::Combined),
            other => Err(format!("unknown curve kind '{other}'")),
        }
    }
}

/// An ordered ROC curve with its valid FPF range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub kind: RocKind,
    pub fpf_range: [f64; 2],
    pub points: Vec<OperatingPoint>,
}

impl RocCurve {
    /// Sort points by `(fpf, tpf)` and stamp the range.
    pub fn new(kind: RocKind, fpf_range: [f64; 2], mut points: Vec<OperatingPoint>) -> Self {
        points.sort_by(|a, b| a.fpf.total_cmp(&b.fpf).then(a.tpf.total_cmp(&b.tpf)));
        RocCurve { kind, fpf_range, points }
    }

    /// Range taken from the smallest and largest FPF present.
    pub fn spanning(kind: RocKind, points: Vec<OperatingPoint>) -> Self {
        let lo = points.iter().map(|p| p.fpf).fold(f64::INFINITY, f64::min);
        let hi = points.iter().map(|p| p.fpf).fold(f64::NEG_INFINITY, f64::max);
        RocCurve::new(kind, [lo, hi], points)
    }

    /// TPF never drops by more than `tol` as FPF grows.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.points.windows(2).all(|w| w[1].tpf >= w[0].tpf - tol && w[1].fpf >= w[0].fpf)
    }

    /// TPF at `fpf` by linear interpolation; at a vertical step the upper
    /// value is returned. `None` outside the points' FPF span.
    pub fn tpf_at(&self, fpf: f64) -> Option<f64> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        if fpf < first.fpf || fpf > last.fpf {
            return None;
        }
        let mut best: Option<f64> = None;
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            if fpf < a.fpf || fpf > b.fpf {
                continue;
            }
            let t = if b.fpf == a.fpf { a.tpf.max(b.tpf) } else { a.tpf + (b.tpf - a.tpf) * (fpf - a.fpf) / (b.fpf - a.fpf) };
            best = Some(best.map_or(t, |v: f64| v.max(t)));
        }
        best.or(if self.points.len() == 1 { Some(first.tpf) } else { None })
    }
}

/// Trapezoidal area under the curve over its whole FPF range.
pub fn auc(curve: &RocCurve) -> Result<f64, RocError> {
    pauc(curve, curve.fpf_range[0], curve.fpf_range[1])
}

/// Partial AUC `∫ TPF dFPF` over `[lo, hi]` by the trapezoid rule on the
/// curve's piecewise-linear interpolant.
pub fn pauc(curve: &RocCurve, lo: f64, hi: f64) -> Result<f64, RocError> {
    if curve.points.len() < 2 {
        return Err(RocError::TooFewPoints(curve.points.len()));
    }
    let [range_lo, range_hi] = curve.fpf_range;
    if !(lo <= hi) || lo < range_lo - RANGE_SLACK || hi > range_hi + RANGE_SLACK {
        return Err(RocError::RangeOutsideCurve { lo, hi, range_lo, range_hi });
    }
    let mut area = 0.0;
    for w in curve.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let left = a.fpf.max(lo);
        let right = b.fpf.min(hi);
        if right <= left || b.fpf <= a.fpf {
            continue;
        }
        let slope = (b.tpf - a.tpf) / (b.fpf - a.fpf);
        let t_left = a.tpf + slope * (left - a.fpf);
        let t_right = a.tpf + slope * (right - a.fpf);
        area += 0.5 * (right - left) * (t_left + t_right);
    }
    Ok(area)
}

/// Fraction of the cohort removed from review by a rule-out device that
/// operates at `(fpf_a, tpf_a)` with disease prevalence `prevalence`:
/// `(1 - p)(1 - FPF) + p(1 - TPF)`.
pub fn workload_ruled_out(prevalence: f64, fpf_a: f64, tpf_a: f64) -> f64 {
    (1.0 - prevalence) * (1.0 - fpf_a) + prevalence * (1.0 - tpf_a)
}

/// Two tests, two disease classes: four marginals, a copula per class and
/// the Test-A thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDiagnosticModel {
    pub marg_an: MarginalModel,
    pub marg_ad: MarginalModel,
    pub marg_bn: MarginalModel,
    pub marg_bd: MarginalModel,
    pub copula_n: CopulaSpec,
    pub copula_d: CopulaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_a_ro: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_a_ri: Option<f64>,
}

/// Test-A score whose FPF under `marg_an` equals `fpf`; `fpf = 1` maps to the
/// bottom of the support and `fpf = 0` to `+inf`.
pub fn threshold_for_fpf(marg_an: &MarginalModel, fpf: f64) -> Result<f64, RocError> {
    if !(0.0..=1.0).contains(&fpf) {
        return Err(RocError::InvalidFpf(fpf));
    }
    Ok(marg_an.quantile_closed(1.0 - fpf)?)
}

impl JointDiagnosticModel {
    pub fn validate(&self) -> Result<(), RocError> {
        for m in [&self.marg_an, &self.marg_ad, &self.marg_bn, &self.marg_bd] {
            m.validate()?;
        }
        self.copula_n.validate()?;
        self.copula_d.validate()?;
        if let (Some(ro), Some(ri)) = (self.t_a_ro, self.t_a_ri) {
            if !(ro < ri) {
                return Err(RocError::ThresholdOrder { rule_out: ro, rule_in: ri });
            }
        }
        Ok(())
    }

    pub fn with_copulas(mut self, copula_n: CopulaSpec, copula_d: CopulaSpec) -> Self {
        self.copula_n = copula_n;
        self.copula_d = copula_d;
        self
    }

    /// Test-A-alone operating point at Test-A threshold `t`.
    pub fn test_a_point(&self, t: f64) -> OperatingPoint {
        OperatingPoint::new(1.0 - self.marg_an.cdf(t), 1.0 - self.marg_ad.cdf(t))
    }

    /// Test-B-alone operating point at Test-B threshold `x`.
    pub fn test_b_point(&self, x: f64) -> OperatingPoint {
        OperatingPoint::new(1.0 - self.marg_bn.cdf(x), 1.0 - self.marg_bd.cdf(x))
    }

    fn rule_out_threshold(&self) -> Result<f64, RocError> {
        self.t_a_ro.ok_or(RocError::MissingRuleOutThreshold)
    }

    fn rule_in_threshold(&self) -> Result<f64, RocError> {
        self.t_a_ri.ok_or(RocError::MissingRuleInThreshold)
    }

    /// Joint survival of both tests at (Test-A threshold `t`, Test-B threshold `x`).
    fn both_positive(&self, x: f64, t: f64) -> Result<OperatingPoint, RocError> {
        let fpf = self.copula_n.joint_survival(self.marg_bn.cdf(x), self.marg_an.cdf(t))?;
        let tpf = self.copula_d.joint_survival(self.marg_bd.cdf(x), self.marg_ad.cdf(t))?;
        Ok(OperatingPoint::new(fpf, tpf))
    }

    fn either_positive(&self, x: f64, t: f64) -> Result<OperatingPoint, RocError> {
        let both = self.both_positive(x, t)?;
        let b = self.test_b_point(x);
        let a = self.test_a_point(t);
        Ok(OperatingPoint::new(
            clamp_probability(b.fpf + a.fpf - both.fpf)?,
            clamp_probability(b.tpf + a.tpf - both.tpf)?,
        ))
    }

    /// Rule-out ("believe the negative") operating point at Test-B threshold `x`.
    pub fn ruleout_point(&self, x: f64) -> Result<OperatingPoint, RocError> {
        self.both_positive(x, self.rule_out_threshold()?)
    }

    /// Rule-in ("believe the positive") operating point at Test-B threshold `x`.
    pub fn rulein_point(&self, x: f64) -> Result<OperatingPoint, RocError> {
        self.either_positive(x, self.rule_in_threshold()?)
    }

    /// Combined rule-out + rule-in operating point at Test-B threshold `x`.
    pub fn combined_point(&self, x: f64) -> Result<OperatingPoint, RocError> {
        let ro = self.rule_out_threshold()?;
        let ri = self.rule_in_threshold()?;
        if !(ro < ri) {
            return Err(RocError::ThresholdOrder { rule_out: ro, rule_in: ri });
        }
        let auto = self.test_a_point(ri);
        let low = self.both_positive(x, ro)?;
        let high = self.both_positive(x, ri)?;
        Ok(OperatingPoint::new(
            clamp_probability(auto.fpf + low.fpf - high.fpf)?,
            clamp_probability(auto.tpf + low.tpf - high.tpf)?,
        ))
    }

    pub fn point(&self, kind: CurveKind, x: f64) -> Result<OperatingPoint, RocError> {
        match kind {
            CurveKind::TestA => Ok(self.test_a_point(x)),
            CurveKind::TestB => Ok(self.test_b_point(x)),
            CurveKind::RuleOut => self.ruleout_point(x),
            CurveKind::RuleIn => self.rulein_point(x),
            CurveKind::Combined => self.combined_point(x),
        }
    }

    /// The FPF window a curve of this kind can occupy.
    pub fn fpf_range(&self, kind: CurveKind) -> Result<[f64; 2], RocError> {
        Ok(match kind {
            CurveKind::TestA | CurveKind::TestB => [0.0, 1.0],
            CurveKind::RuleOut => [0.0, self.test_a_point(self.rule_out_threshold()?).fpf],
            CurveKind::RuleIn => [self.test_a_point(self.rule_in_threshold()?).fpf, 1.0],
            CurveKind::Combined => {
                let ro = self.rule_out_threshold()?;
                let ri = self.rule_in_threshold()?;
                [self.test_a_point(ri).fpf, self.test_a_point(ro).fpf]
            }
        })
    }

    /// Default pAUC window: `[FPF_A(T_ri), FPF_A(T_ro)]` when both thresholds
    /// exist (rule-out and combined), otherwise the curve's own range.
    pub fn pauc_window(&self, kind: CurveKind) -> Result<[f64; 2], RocError> {
        match (kind, self.t_a_ro, self.t_a_ri) {
            (CurveKind::RuleOut, Some(ro), Some(ri)) => Ok([self.test_a_point(ri).fpf, self.test_a_point(ro).fpf]),
            _ => self.fpf_range(kind),
        }
    }

    /// Sweep the Test-B threshold (Test-A threshold for [`CurveKind::TestA`])
    /// and assemble a sorted, range-stamped curve.
    pub fn curve(&self, kind: CurveKind, n_points: usize, exec: Execution) -> Result<RocCurve, RocError> {
        self.validate()?;
        if kind == CurveKind::TestA {
            return univariate_curve(&self.marg_an, &self.marg_ad, n_points, exec);
        }
        if kind == CurveKind::TestB {
            return univariate_curve(&self.marg_bn, &self.marg_bd, n_points, exec);
        }
        let range = self.fpf_range(kind)?;
        let grid = threshold_grid(&self.marg_bn, &self.marg_bd, n_points);
        let mut points = exec.try_map_slice(&grid, |&x| self.point(kind, x))?;
        // Both fractions are non-decreasing as the threshold falls; a running
        // max removes rounding noise that would reorder points on flat or
        // vertical stretches.
        for i in 1..points.len() {
            let prev = points[i - 1];
            points[i].fpf = points[i].fpf.max(prev.fpf);
            points[i].tpf = points[i].tpf.max(prev.tpf);
        }
        Ok(RocCurve::new(kind.roc_kind(), range, points))
    }
}

/// Thresholds at `n` equally spaced quantiles `i/(n+1)` of the equal mixture
/// `½F_N + ½F_D`, plus `-inf` and `+inf`, in descending order.
pub fn threshold_grid(marg_n: &MarginalModel, marg_d: &MarginalModel, n: usize) -> Vec<f64> {
    let mut grid = Vec::with_capacity(n + 2);
    grid.push(f64::INFINITY);
    for i in (1..=n).rev() {
        grid.push(mixture_quantile(marg_n, marg_d, i as f64 / (n + 1) as f64));
    }
    grid.push(f64::NEG_INFINITY);
    grid
}

/// Quantile of `½F_N + ½F_D`; bracketed by the component quantiles.
pub fn mixture_quantile(marg_n: &MarginalModel, marg_d: &MarginalModel, p: f64) -> f64 {
    let qn = marg_n.quantile(p).unwrap_or(f64::NAN);
    let qd = marg_d.quantile(p).unwrap_or(f64::NAN);
    let (mut lo, mut hi) = (qn.min(qd), qn.max(qd));
    if lo == hi {
        return lo;
    }
    let mix = |x: f64| 0.5 * (marg_n.cdf(x) + marg_d.cdf(x));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mix(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// ROC curve of a single test from its non-diseased and diseased marginals.
pub fn univariate_curve(
    marg_n: &MarginalModel,
    marg_d: &MarginalModel,
    n_points: usize,
    exec: Execution,
) -> Result<RocCurve, RocError> {
    if n_points < 2 {
        return Err(RocError::TooFewPoints(n_points));
    }
    marg_n.validate()?;
    marg_d.validate()?;
    let grid = threshold_grid(marg_n, marg_d, n_points);
    let points = exec.map_slice(&grid, |&t| OperatingPoint::new(1.0 - marg_n.cdf(t), 1.0 - marg_d.cdf(t)));
    Ok(RocCurve::new(RocKind::Univariate, [0.0, 1.0], points))
}
