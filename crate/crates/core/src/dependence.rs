//! Dependence measures: copula parameter ↔ Kendall's tau conversions, the
//! Debye function behind the Frank relation, Spearman's rho of a copula, and
//! sample Pearson / Kendall (tau-b) / Spearman estimators.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::copulas::{CopulaError, CopulaFamily, CopulaSpec};
use crate::exec::Execution;
use crate::quadrature;

/// Nodes per axis of the tensor Gauss–Legendre rule used for Spearman's rho.
pub const SPEARMAN_NODES: usize = 128;

/// Bracket searched when inverting the Frank tau relation.
pub const FRANK_THETA_BRACKET: (f64, f64) = (1e-6, 100.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DependenceError {
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error("Kendall's tau {tau} is outside the supported range {range} for the {family} copula")]
    TauOutOfRange { family: CopulaFamily, tau: f64, range: String },
    #[error("the independence copula has no parameter to calibrate")]
    NoParameter,
    #[error("Debye function needs theta >= 0 (got {0})")]
    NegativeDebyeArgument(f64),
    #[error("correlation needs at least 2 pairs (got {0})")]
    TooFewPairs(usize),
    #[error("correlation undefined: {0} has zero variance")]
    ZeroVariance(&'static str),
    #[error("non-finite value in paired data at index {0}")]
    NonFinite(usize),
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl DependenceError {
    pub fn is_numeric(&self) -> bool {
        match self {
            DependenceError::Numeric(_) => true,
            DependenceError::Copula(e) => e.is_numeric(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    PearsonRho,
    KendallTau,
    SpearmanRho,
}

/// A dependence measure value in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DependenceMeasure {
    pub kind: MeasureKind,
    pub value: f64,
}

/// Kendall's tau implied by a copula parameter.
///
/// Gumbel `1 - 1/θ`; Clayton `θ/(θ+2)`; Frank `1 + 4(D₁(θ) - 1)/θ`;
/// Gaussian `(2/π) asin ρ`; independence 0.
pub fn tau_from_theta(family: CopulaFamily, theta: f64) -> Result<f64, DependenceError> {
    if family == CopulaFamily::Frank && theta == 0.0 {
        return Ok(0.0);
    }
    let spec = CopulaSpec::new(family, theta)?;
    Ok(match spec {
        CopulaSpec::Gaussian { rho } => 2.0 * rho.asin() / PI,
        CopulaSpec::Gumbel { theta } => 1.0 - 1.0 / theta,
        CopulaSpec::Clayton { theta } => theta / (theta + 2.0),
        CopulaSpec::Frank { theta } => {
            let t = frank_tau_positive(theta.abs());
            if theta < 0.0 {
                -t
            } else {
                t
            }
        }
        CopulaSpec::Independence => 0.0,
    })
}

/// Tau of the Frank copula for θ > 0, using `D₁(θ) - 1` computed directly so
/// small θ does not lose precision to cancellation.
fn frank_tau_positive(theta: f64) -> f64 {
    1.0 + 4.0 * debye1_minus_one(theta) / theta
}

/// Copula parameter that produces Kendall's tau `tau` in `(0, 1)`.
pub fn theta_from_tau(family: CopulaFamily, tau: f64) -> Result<f64, DependenceError> {
    let out_of_range = |range: &str| DependenceError::TauOutOfRange { family, tau, range: range.to_string() };
    if !(tau > 0.0 && tau < 1.0) {
        return Err(out_of_range("(0, 1)"));
    }
    match family {
        CopulaFamily::Gaussian => Ok((PI * tau / 2.0).sin()),
        CopulaFamily::Gumbel => Ok(1.0 / (1.0 - tau)),
        CopulaFamily::Clayton => Ok(2.0 * tau / (1.0 - tau)),
        CopulaFamily::Frank => {
            let (lo, hi) = FRANK_THETA_BRACKET;
            let tau_lo = frank_tau_positive(lo);
            let tau_hi = frank_tau_positive(hi);
            if tau <= tau_lo || tau >= tau_hi {
                return Err(out_of_range(&format!("({tau_lo:.3e}, {tau_hi:.6})")));
            }
            Ok(invert_frank_tau(tau, lo, hi))
        }
        CopulaFamily::Independence => Err(DependenceError::NoParameter),
    }
}

fn frank_tau_derivative(theta: f64) -> f64 {
    let d1 = 1.0 + debye1_minus_one(theta);
    4.0 / (theta * theta.exp_m1()) - 8.0 * d1 / (theta * theta) + 4.0 / (theta * theta)
}

fn invert_frank_tau(tau: f64, mut lo: f64, mut hi: f64) -> f64 {
    // Bisection to a narrow bracket, then safeguarded Newton.
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if frank_tau_positive(mid) < tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut theta = 0.5 * (lo + hi);
    for _ in 0..20 {
        let f = frank_tau_positive(theta) - tau;
        if f < 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        let next = theta - f / frank_tau_derivative(theta);
        let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
        if (next - theta).abs() <= 1e-15 * theta.max(1.0) {
            return next;
        }
        theta = next;
    }
    theta
}

/// Debye function `D₁(θ) = (1/θ) ∫₀^θ t/(eᵗ-1) dt` for θ ≥ 0, with `D₁(0) = 1`.
pub fn debye1(theta: f64) -> Result<f64, DependenceError> {
    if theta.is_nan() || theta < 0.0 {
        return Err(DependenceError::NegativeDebyeArgument(theta));
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 + debye1_minus_one(theta))
}

/// `D₁(θ) - 1 = (1/θ) ∫₀^θ (t/(eᵗ-1) - 1) dt`, integrated directly.
fn debye1_minus_one(theta: f64) -> f64 {
    let integrand = |t: f64| if t == 0.0 { 0.0 } else { t / t.exp_m1() - 1.0 };
    let r = quadrature::integrate(integrand, 0.0, theta, 1e-15 * theta.max(1.0));
    r.value / theta
}

/// Spearman's rho of a copula, `12 ∫∫ C(u, v) du dv - 3`, by a tensor-product
/// Gauss–Legendre rule with [`SPEARMAN_NODES`] nodes per axis.
pub fn spearman_from_copula(copula: &CopulaSpec) -> Result<f64, DependenceError> {
    spearman_from_copula_with(copula, Execution::default())
}

pub fn spearman_from_copula_with(copula: &CopulaSpec, exec: Execution) -> Result<f64, DependenceError> {
    copula.validate()?;
    if copula.is_independence() {
        return Ok(0.0);
    }
    let (nodes, weights) = quadrature::gauss_legendre_unit(SPEARMAN_NODES);
    let rows = exec.try_map_range(nodes.len(), |i| -> Result<f64, CopulaError> {
        let mut acc = 0.0;
        for (j, &v) in nodes.iter().enumerate() {
            acc += weights[j] * copula.cdf(nodes[i], v)?;
        }
        Ok(weights[i] * acc)
    })?;
    let integral: f64 = rows.iter().sum();
    Ok((12.0 * integral - 3.0).clamp(-1.0, 1.0))
}

fn check_pairs(pairs: &[(f64, f64)]) -> Result<(), DependenceError> {
    if pairs.len() < 2 {
        return Err(DependenceError::TooFewPairs(pairs.len()));
    }
    if let Some(i) = pairs.iter().position(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(DependenceError::NonFinite(i));
    }
    Ok(())
}

fn pearson_of(xs: &[f64], ys: &[f64]) -> Result<f64, DependenceError> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(DependenceError::ZeroVariance("first coordinate"));
    }
    if syy == 0.0 {
        return Err(DependenceError::ZeroVariance("second coordinate"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Sample Pearson product-moment correlation.
pub fn sample_pearson(pairs: &[(f64, f64)]) -> Result<f64, DependenceError> {
    check_pairs(pairs)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    pearson_of(&xs, &ys)
}

/// Mid-ranks (1-based); tied values share the mean of their rank positions.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = 0.5 * ((i + 1) + (j + 1)) as f64;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Sample Spearman rho: Pearson correlation of mid-ranks.
pub fn sample_spearman(pairs: &[(f64, f64)]) -> Result<f64, DependenceError> {
    check_pairs(pairs)?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
    pearson_of(&midranks(&xs), &midranks(&ys))
}

/// Number of tied pairs: Σ t(t-1)/2 over runs of equal consecutive items.
fn tied_pairs<T, F: Fn(&T, &T) -> bool>(sorted: &[T], eq: F) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if eq(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Merge sort on `y`, returning the number of inversions (swaps).
fn merge_count(ys: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = ys.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (left, right) = ys.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        merge_count(left, bl) + merge_count(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if ys[j] < ys[i] {
            buf[k] = ys[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = ys[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&ys[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&ys[j..n]);
    ys.copy_from_slice(&buf[..n]);
    swaps
}

fn tau_b_from_counts(n: usize, x_ties: u64, y_ties: u64, concordant_minus_discordant: f64) -> Result<f64, DependenceError> {
    let total = (n as u64) * (n as u64 - 1) / 2;
    if x_ties == total {
        return Err(DependenceError::ZeroVariance("first coordinate"));
    }
    if y_ties == total {
        return Err(DependenceError::ZeroVariance("second coordinate"));
    }
    let denom = ((total - x_ties) as f64).sqrt() * ((total - y_ties) as f64).sqrt();
    Ok((concordant_minus_discordant / denom).clamp(-1.0, 1.0))
}

/// Sample Kendall tau-b (tie-adjusted), O(n log n) via Knight's merge-count.
pub fn sample_kendall(pairs: &[(f64, f64)]) -> Result<f64, DependenceError> {
    check_pairs(pairs)?;
    let n = pairs.len();
    let mut sorted = pairs.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let x_ties = tied_pairs(&sorted, |a, b| a.0 == b.0);
    let joint_ties = tied_pairs(&sorted, |a, b| a.0 == b.0 && a.1 == b.1);
    let mut ys: Vec<f64> = sorted.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; n];
    let swaps = merge_count(&mut ys, &mut buf);
    let y_ties = tied_pairs(&ys, |a, b| a == b);
    let total = (n as u64) * (n as u64 - 1) / 2;
    // concordant - discordant = total - x_ties - y_ties + joint_ties - 2·swaps
    let s = total as i128 - x_ties as i128 - y_ties as i128 + joint_ties as i128 - 2 * swaps as i128;
    tau_b_from_counts(n, x_ties, y_ties, s as f64)
}

/// O(n²) reference tau-b, counting every pair.
pub fn sample_kendall_naive(pairs: &[(f64, f64)]) -> Result<f64, DependenceError> {
    check_pairs(pairs)?;
    let n = pairs.len();
    let (mut s, mut x_ties, mut y_ties) = (0i64, 0u64, 0u64);
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = pairs[i].0.partial_cmp(&pairs[j].0).unwrap_or(Ordering::Equal);
            let dy = pairs[i].1.partial_cmp(&pairs[j].1).unwrap_or(Ordering::Equal);
            match (dx, dy) {
                (Ordering::Equal, Ordering::Equal) => {
                    x_ties += 1;
                    y_ties += 1;
                }
                (Ordering::Equal, _) => x_ties += 1,
                (_, Ordering::Equal) => y_ties += 1,
                (a, b) if a == b => s += 1,
                _ => s -= 1,
            }
        }
    }
    tau_b_from_counts(n, x_ties, y_ties, s as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Exact Debye oracle: ∫_θ^∞ t/(eᵗ-1) dt = Σ_k e^{-kθ}(θ/k + 1/k²), so
    /// D₁(θ) = (π²/6 - Σ_k e^{-kθ}(θ/k + 1/k²)) / θ.
    fn debye_series(theta: f64) -> f64 {
        let mut tail = 0.0;
        for k in 1..20_000 {
            let kf = k as f64;
            let term = (-kf * theta).exp() * (theta / kf + 1.0 / (kf * kf));
            tail += term;
            if term < 1e-20 {
                break;
            }
        }
        (PI * PI / 6.0 - tail) / theta
    }

    /// Power series about 0 (Bernoulli numbers), valid for |θ| < 2π.
    fn debye_small(theta: f64) -> f64 {
        let b = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0];
        let mut sum = 1.0 - theta / 4.0;
        let mut fact = 1.0;
        for (k, &b2k) in b.iter().enumerate() {
            let n = 2 * (k + 1);
            fact *= ((n - 1) * n) as f64;
            sum += b2k * theta.powi(n as i32) / ((n + 1) as f64 * fact);
        }
        sum
    }

    #[test]
    fn debye_examples() {
        assert_eq!(debye1(0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(debye1(1e-9).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(debye1(1.0).unwrap(), debye_series(1.0), epsilon = 1e-13);
        assert_abs_diff_eq!(debye1(1.0).unwrap(), 0.77751, epsilon = 1e-5);
        assert_abs_diff_eq!(debye1(0.3).unwrap(), debye_small(0.3), epsilon = 1e-13);
        assert_abs_diff_eq!(debye1(100.0).unwrap(), PI * PI / 600.0, epsilon = 1e-12);
        assert!(debye1(-1.0).is_err());
        let mut prev = 1.0;
        for i in 1..200 {
            let d = debye1(i as f64 * 0.25).unwrap();
            assert!(d < prev);
            assert_abs_diff_eq!(d, debye_series(i as f64 * 0.25), epsilon = 1e-12);
            prev = d;
        }
    }

    #[test]
    fn tau_closed_forms() {
        assert_eq!(tau_from_theta(CopulaFamily::Gumbel, 2.0).unwrap(), 0.5);
        assert_eq!(tau_from_theta(CopulaFamily::Clayton, 2.0).unwrap(), 0.5);
        let frank5 = 1.0 + 4.0 / 5.0 * (debye_series(5.0) - 1.0);
        assert_abs_diff_eq!(tau_from_theta(CopulaFamily::Frank, 5.0).unwrap(), frank5, epsilon = 1e-13);
        assert_abs_diff_eq!(frank5, 0.4567, epsilon = 1e-4);
        assert_eq!(tau_from_theta(CopulaFamily::Frank, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(tau_from_theta(CopulaFamily::Frank, -5.0).unwrap(), -frank5, epsilon = 1e-13);
        assert!(tau_from_theta(CopulaFamily::Gumbel, 0.5).is_err());
        assert!(tau_from_theta(CopulaFamily::Clayton, -1.0).is_err());
    }

    #[test]
    fn theta_closed_forms() {
        assert_eq!(theta_from_tau(CopulaFamily::Gumbel, 0.5).unwrap(), 2.0);
        assert_eq!(theta_from_tau(CopulaFamily::Clayton, 0.5).unwrap(), 2.0);
        let frank5 = tau_from_theta(CopulaFamily::Frank, 5.0).unwrap();
        assert_abs_diff_eq!(theta_from_tau(CopulaFamily::Frank, frank5).unwrap(), 5.0, epsilon = 1e-9);
        for bad in [0.0, 1.0, -0.2, 1.3] {
            assert!(theta_from_tau(CopulaFamily::Gumbel, bad).is_err());
        }
        assert!(theta_from_tau(CopulaFamily::Frank, 0.97).is_err());
        assert!(theta_from_tau(CopulaFamily::Independence, 0.3).is_err());
    }

    #[test]
    fn frank_tau_strictly_increasing() {
        let mut prev = f64::NEG_INFINITY;
        for i in 1..=200 {
            let theta = 0.1 * i as f64;
            let t = tau_from_theta(CopulaFamily::Frank, theta).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn spearman_examples() {
        assert_abs_diff_eq!(spearman_from_copula(&CopulaSpec::Independence).unwrap(), 0.0, epsilon = 1e-12);
        // Product copula through the quadrature path as well.
        let clayton_tiny = CopulaSpec::Clayton { theta: 1e-9 };
        assert_abs_diff_eq!(spearman_from_copula(&clayton_tiny).unwrap(), 0.0, epsilon = 1e-6);
        let near = CopulaSpec::Gaussian { rho: 0.999_999 };
        assert_abs_diff_eq!(spearman_from_copula(&near).unwrap(), 1.0, epsilon = 1e-3);
        let g = spearman_from_copula(&CopulaSpec::Gaussian { rho: 0.5 }).unwrap();
        assert_abs_diff_eq!(g, 6.0 / PI * (0.25f64).asin(), epsilon = 1e-6);
        assert_abs_diff_eq!(g, 0.4826, epsilon = 1e-4);
    }

    #[test]
    fn spearman_frank_matches_debye_form() {
        // ρ_S(Frank) = 1 - 12 (D₁(θ) - D₂(θ)) / θ, D₂ by its own quadrature.
        let theta = 4.0f64;
        let d2 = quadrature::integrate(|t: f64| if t == 0.0 { 0.0 } else { t * t / t.exp_m1() }, 0.0, theta, 1e-14).value
            * 2.0
            / (theta * theta);
        let expect = 1.0 - 12.0 / theta * (debye_series(theta) - d2);
        let got = spearman_from_copula(&CopulaSpec::Frank { theta }).unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-8);
    }

    #[test]
    fn spearman_monotone_in_parameter() {
        for family in [CopulaFamily::Gaussian, CopulaFamily::Gumbel, CopulaFamily::Clayton, CopulaFamily::Frank] {
            let grid: Vec<f64> = match family {
                CopulaFamily::Gaussian => vec![-0.6, -0.2, 0.0, 0.3, 0.6, 0.9],
                CopulaFamily::Gumbel => vec![1.0, 1.5, 2.5, 5.0, 10.0],
                CopulaFamily::Clayton => vec![0.1, 0.5, 1.0, 3.0, 8.0],
                _ => vec![-5.0, -1.0, 1.0, 5.0, 15.0],
            };
            let vals: Vec<f64> =
                grid.iter().map(|&p| spearman_from_copula(&CopulaSpec::new(family, p).unwrap()).unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[1] >= w[0]), "{family}: {vals:?}");
        }
    }

    #[test]
    fn spearman_sequential_equals_parallel() {
        let c = CopulaSpec::Clayton { theta: 3.0 };
        let a = spearman_from_copula_with(&c, Execution::Sequential).unwrap();
        let b = spearman_from_copula_with(&c, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_estimator_examples() {
        let line: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, 3.0 * i as f64 - 7.0)).collect();
        assert_abs_diff_eq!(sample_pearson(&line).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sample_spearman(&line).unwrap(), 1.0, epsilon = 1e-15);
        let reversed: Vec<(f64, f64)> = (0..50).map(|i| (i as f64, -(i as f64).powi(3))).collect();
        assert_eq!(sample_kendall(&reversed).unwrap(), -1.0);
        assert_eq!(sample_kendall_naive(&reversed).unwrap(), -1.0);
    }

    #[test]
    fn sample_estimator_errors() {
        assert!(matches!(sample_pearson(&[(1.0, 2.0)]), Err(DependenceError::TooFewPairs(1))));
        let flat_x = [(1.0, 2.0), (1.0, 3.0), (1.0, 5.0)];
        assert!(matches!(sample_pearson(&flat_x), Err(DependenceError::ZeroVariance(_))));
        assert!(matches!(sample_kendall(&flat_x), Err(DependenceError::ZeroVariance(_))));
        assert!(matches!(sample_spearman(&flat_x), Err(DependenceError::ZeroVariance(_))));
        assert!(matches!(sample_kendall(&[(1.0, f64::NAN), (2.0, 1.0)]), Err(DependenceError::NonFinite(0))));
    }

    #[test]
    fn midranks_share_ties() {
        assert_eq!(midranks(&[10.0, 20.0, 10.0, 30.0, 10.0]), vec![2.0, 4.0, 2.0, 5.0, 2.0]);
    }

    fn tied_pairs_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0u8..6, 0u8..5).prop_map(|(a, b)| (a as f64, b as f64)), 3..120)
    }

    proptest! {
        #[test]
        fn kendall_fast_matches_naive(pairs in tied_pairs_strategy()) {
            let fast = sample_kendall(&pairs);
            let slow = sample_kendall_naive(&pairs);
            match (fast, slow) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() < 1e-12),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "mismatch {a:?} vs {b:?}"),
            }
        }

        #[test]
        fn theta_tau_round_trip(tau in 0.01..0.95f64) {
            for family in [CopulaFamily::Gumbel, CopulaFamily::Clayton, CopulaFamily::Frank] {
                let theta = theta_from_tau(family, tau).unwrap();
                let back = tau_from_theta(family, theta).unwrap();
                prop_assert!((back - tau).abs() < 1e-8, "{family} tau={tau} back={back}");
            }
        }

        #[test]
        fn estimators_bounded(pairs in prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 3..60)) {
            for r in [sample_pearson(&pairs), sample_spearman(&pairs), sample_kendall(&pairs)] {
                let v = r.unwrap();
                prop_assert!((-1.0..=1.0).contains(&v));
            }
        }
    }
}
