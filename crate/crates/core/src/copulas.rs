//! Bivariate copulas: Gaussian, Gumbel, Clayton, Frank and the independence
//! (product) copula, with CDF and joint survival evaluation.
//!
//! Every family here is exchangeable, so `C(u, v) = C(v, u)` and the argument
//! order used by callers carries no meaning.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::marginals::{normal_quantile_unchecked, standard_normal_cdf};
use crate::quadrature;

/// Absolute tolerance of the correlation-path integral behind the bivariate
/// normal CDF.
pub const BVN_TOLERANCE: f64 = 1e-12;

/// Largest tolerated excursion of a computed probability outside `[0, 1]`
/// before it is treated as a numerical failure instead of being clamped.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Below this `|theta|` the Frank copula is evaluated by its independence limit.
pub const FRANK_INDEPENDENCE_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CopulaError {
    #[error("{family} copula parameter {value} is outside its domain {domain}")]
    InvalidParameter { family: CopulaFamily, value: f64, domain: &'static str },
    #[error("copula arguments must lie in [0, 1] (got u={u}, v={v})")]
    ArgumentOutOfRange { u: f64, v: f64 },
    #[error("bivariate normal CDF requires |rho| < 1 (got {0})")]
    DegenerateCorrelation(f64),
    #[error("bivariate normal CDF got a NaN argument")]
    NanArgument,
    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl CopulaError {
    pub fn is_numeric(&self) -> bool {
        matches!(self, CopulaError::Numeric(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CopulaFamily {
    Gaussian,
    Gumbel,
    Clayton,
    Frank,
    Independence,
}

impl CopulaFamily {
    pub const ALL: [CopulaFamily; 5] = [
        CopulaFamily::Gaussian,
        CopulaFamily::Gumbel,
        CopulaFamily::Clayton,
        CopulaFamily::Frank,
        CopulaFamily::Independence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CopulaFamily::Gaussian => "gaussian",
            CopulaFamily::Gumbel => "gumbel",
            CopulaFamily::Clayton => "clayton",
            CopulaFamily::Frank => "frank",
            CopulaFamily::Independence => "independence",
        }
    }

    pub fn is_archimedean(self) -> bool {
        matches!(self, CopulaFamily::Gumbel | CopulaFamily::Clayton | CopulaFamily::Frank)
    }

    /// Parameter value at which the family reduces to the product copula.
    pub fn independence_parameter(self) -> f64 {
        match self {
            CopulaFamily::Gumbel => 1.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for CopulaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CopulaFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CopulaFamily::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown copula family '{s}'"))
    }
}

/// A copula family together with its dependence parameter.
///
/// JSON form: `{"family":"gaussian","rho":0.4}`, `{"family":"frank","theta":5.0}`,
/// `{"family":"independence"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields, try_from = "RawCopula")]
pub enum CopulaSpec {
    Gaussian { rho: f64 },
    Gumbel { theta: f64 },
    Clayton { theta: f64 },
    Frank { theta: f64 },
    Independence,
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum RawCopula {
    Gaussian { rho: f64 },
    Gumbel { theta: f64 },
    Clayton { theta: f64 },
    Frank { theta: f64 },
    Independence,
}

impl TryFrom<RawCopula> for CopulaSpec {
    type Error = CopulaError;

    fn try_from(raw: RawCopula) -> Result<Self, Self::Error> {
        let spec = match raw {
            RawCopula::Gaussian { rho } => CopulaSpec::Gaussian { rho },
            RawCopula::Gumbel { theta } => CopulaSpec::Gumbel { theta },
            RawCopula::Clayton { theta } => CopulaSpec::Clayton { theta },
            RawCopula::Frank { theta } => CopulaSpec::Frank { theta },
            RawCopula::Independence => CopulaSpec::Independence,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl CopulaSpec {
    /// Build a validated spec from a family and its parameter (ignored for
    /// the independence copula).
    pub fn new(family: CopulaFamily, param: f64) -> Result<Self, CopulaError> {
        let spec = match family {
            CopulaFamily::Gaussian => CopulaSpec::Gaussian { rho: param },
            CopulaFamily::Gumbel => CopulaSpec::Gumbel { theta: param },
            CopulaFamily::Clayton => CopulaSpec::Clayton { theta: param },
            CopulaFamily::Frank => CopulaSpec::Frank { theta: param },
            CopulaFamily::Independence => CopulaSpec::Independence,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn family(&self) -> CopulaFamily {
        match self {
            CopulaSpec::Gaussian { .. } => CopulaFamily::Gaussian,
            CopulaSpec::Gumbel { .. } => CopulaFamily::Gumbel,
            CopulaSpec::Clayton { .. } => CopulaFamily::Clayton,
            CopulaSpec::Frank { .. } => CopulaFamily::Frank,
            CopulaSpec::Independence => CopulaFamily::Independence,
        }
    }

    /// `rho` or `theta`; `None` for the independence copula.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            CopulaSpec::Gaussian { rho } => Some(rho),
            CopulaSpec::Gumbel { theta } | CopulaSpec::Clayton { theta } | CopulaSpec::Frank { theta } => Some(theta),
            CopulaSpec::Independence => None,
        }
    }

    pub fn validate(&self) -> Result<(), CopulaError> {
        let bad = |domain: &'static str, value: f64| {
            Err(CopulaError::InvalidParameter { family: self.family(), value, domain })
        };
        match *self {
            CopulaSpec::Gaussian { rho } if !(rho > -1.0 && rho < 1.0) => bad("(-1, 1)", rho),
            CopulaSpec::Gumbel { theta } if !(theta >= 1.0 && theta.is_finite()) => bad("[1, inf)", theta),
            CopulaSpec::Clayton { theta } if !(theta > 0.0 && theta.is_finite()) => bad("(0, inf)", theta),
            CopulaSpec::Frank { theta } if !theta.is_finite() || theta == 0.0 => bad("R \\ {0}", theta),
            _ => Ok(()),
        }
    }

    /// True when the spec is (numerically) the product copula.
    pub fn is_independence(&self) -> bool {
        match *self {
            CopulaSpec::Gaussian { rho } => rho == 0.0,
            CopulaSpec::Gumbel { theta } => theta == 1.0,
            CopulaSpec::Frank { theta } => theta.abs() < FRANK_INDEPENDENCE_CUTOFF,
            CopulaSpec::Clayton { .. } => false,
            CopulaSpec::Independence => true,
        }
    }

    /// `C(u, v)`.
    pub fn cdf(&self, u: f64, v: f64) -> Result<f64, CopulaError> {
        check_unit(u, v)?;
        self.validate()?;
        if u == 0.0 || v == 0.0 {
            return Ok(0.0);
        }
        if u == 1.0 {
            return Ok(v);
        }
        if v == 1.0 {
            return Ok(u);
        }
        if self.is_independence() {
            return Ok(u * v);
        }
        let value = match *self {
            CopulaSpec::Gaussian { rho } => {
                bivariate_normal_cdf(normal_quantile_unchecked(u), normal_quantile_unchecked(v), rho)?
            }
            CopulaSpec::Gumbel { theta } => gumbel_cdf(u, v, theta),
            CopulaSpec::Clayton { theta } => clayton_cdf(u, v, theta),
            CopulaSpec::Frank { theta } => frank_cdf(u, v, theta),
            CopulaSpec::Independence => u * v,
        };
        clamp_probability(value)
    }

    /// `P(U > u, V > v) = 1 - u - v + C(u, v)`.
    pub fn joint_survival(&self, u: f64, v: f64) -> Result<f64, CopulaError> {
        let c = self.cdf(u, v)?;
        clamp_probability(1.0 - u - v + c)
    }
}

fn check_unit(u: f64, v: f64) -> Result<(), CopulaError> {
    if (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(CopulaError::ArgumentOutOfRange { u, v })
    }
}

/// Clamp into `[0, 1]`, rejecting overshoot larger than [`PROBABILITY_SLACK`].
pub(crate) fn clamp_probability(p: f64) -> Result<f64, CopulaError> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(CopulaError::Numeric(format!("probability {p} outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

fn gumbel_cdf(u: f64, v: f64, theta: f64) -> f64 {
    // (a^θ + b^θ)^(1/θ) with a = -ln u, b = -ln v, in log space.
    let la = theta * (-u.ln()).ln();
    let lb = theta * (-v.ln()).ln();
    let s = (log_add_exp(la, lb) / theta).exp();
    (-s).exp()
}

fn clayton_cdf(u: f64, v: f64, theta: f64) -> f64 {
    // s = u^-θ + v^-θ - 1, with the max(s, 0) clamp; C = s^(-1/θ).
    let la = -theta * u.ln();
    let lb = -theta * v.ln();
    let m = la.max(lb);
    let inner = (la - m).exp() + (lb - m).exp() - (-m).exp();
    if inner <= 0.0 {
        return 0.0;
    }
    let log_s = m + inner.ln();
    (-log_s / theta).exp()
}

fn frank_cdf(u: f64, v: f64, theta: f64) -> f64 {
    // The direct form cancels when 1 + num/den is near e^(-θ); beyond |θ| = 1
    // the log-space form is the accurate one.
    if theta.abs() <= 1.0 {
        let num = (-theta * u).exp_m1() * (-theta * v).exp_m1();
        let den = (-theta).exp_m1();
        return -(num / den).ln_1p() / theta;
    }
    if theta < 0.0 {
        return u - frank_cdf(u, 1.0 - v, -theta);
    }
    // 1 + (a-1)(b-1)/(c-1) = ((a - c) + b(1 - a)) / (1 - c) with
    // a = e^(-θu), b = e^(-θv), c = e^(-θ); evaluated in log space.
    let ln_one_minus_exp = |x: f64| (-x.exp_m1()).ln();
    let lx = log_add_exp(-theta * u + ln_one_minus_exp(-theta * (1.0 - u)), -theta * v + ln_one_minus_exp(-theta * u));
    -(lx - ln_one_minus_exp(-theta)) / theta
}

/// Standard bivariate normal CDF `Ψ₂(x, y; ρ) = P(X ≤ x, Y ≤ y)`.
///
/// Evaluated through the correlation-path identity
/// `Ψ₂(x, y; ρ) = Ψ₁(x)Ψ₁(y) + (1/2π) ∫₀^ρ (1-t²)^(-1/2) exp(-(x² - 2txy + y²) / (2(1-t²))) dt`
/// with the substitution `t = sin s`, which removes the endpoint singularity,
/// and adaptive Gauss–Kronrod quadrature on `s ∈ [0, asin ρ]`.
pub fn bivariate_normal_cdf(x: f64, y: f64, rho: f64) -> Result<f64, CopulaError> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(CopulaError::DegenerateCorrelation(rho));
    }
    if x.is_nan() || y.is_nan() {
        return Err(CopulaError::NanArgument);
    }
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(standard_normal_cdf(y));
    }
    if y == f64::INFINITY {
        return Ok(standard_normal_cdf(x));
    }
    let product = standard_normal_cdf(x) * standard_normal_cdf(y);
    if rho == 0.0 {
        return Ok(product);
    }
    let sum_sq = x * x + y * y;
    let cross = 2.0 * x * y;
    let integrand = |s: f64| {
        let (sin, cos) = s.sin_cos();
        let c2 = cos * cos;
        (-(sum_sq - cross * sin) / (2.0 * c2)).exp()
    };
    let r = quadrature::integrate(integrand, 0.0, rho.asin(), BVN_TOLERANCE);
    if !r.converged {
        return Err(CopulaError::Numeric(format!(
            "bivariate normal quadrature did not converge at x={x}, y={y}, rho={rho}"
        )));
    }
    clamp_probability(product + r.value / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn specs() -> Vec<CopulaSpec> {
        vec![
            CopulaSpec::Independence,
            CopulaSpec::Gaussian { rho: 0.4 },
            CopulaSpec::Gaussian { rho: -0.7 },
            CopulaSpec::Gaussian { rho: 0.95 },
            CopulaSpec::Gumbel { theta: 1.0 },
            CopulaSpec::Gumbel { theta: 2.5 },
            CopulaSpec::Gumbel { theta: 15.0 },
            CopulaSpec::Clayton { theta: 0.3 },
            CopulaSpec::Clayton { theta: 8.0 },
            CopulaSpec::Frank { theta: -6.0 },
            CopulaSpec::Frank { theta: 5.0 },
            CopulaSpec::Frank { theta: 40.0 },
        ]
    }

    /// Independent oracle: tensor Simpson rule on the bivariate normal density
    /// over [-9, x] × [-9, y].
    fn bvn_brute_force(x: f64, y: f64, rho: f64) -> f64 {
        let n = 1200;
        let lo = -9.0;
        let hx = (x - lo) / n as f64;
        let hy = (y - lo) / n as f64;
        let det = 1.0 - rho * rho;
        let norm = 1.0 / (2.0 * PI * det.sqrt());
        let w = |i: usize| if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let mut total = 0.0;
        for i in 0..=n {
            let a = lo + i as f64 * hx;
            let mut row = 0.0;
            for j in 0..=n {
                let b = lo + j as f64 * hy;
                row += w(j) * (-(a * a - 2.0 * rho * a * b + b * b) / (2.0 * det)).exp();
            }
            total += w(i) * row;
        }
        total * norm * hx * hy / 9.0
    }

    #[test]
    fn bivariate_normal_examples() {
        assert_abs_diff_eq!(bivariate_normal_cdf(0.0, 0.0, 0.0).unwrap(), 0.25, epsilon = 1e-15);
        // Orthant identity 1/4 + asin(ρ)/(2π).
        assert_abs_diff_eq!(bivariate_normal_cdf(0.0, 0.0, 0.5).unwrap(), 1.0 / 3.0, epsilon = 1e-13);
        for rho in [-0.9f64, -0.3, 0.2, 0.7, 0.99] {
            let expect = 0.25 + rho.asin() / (2.0 * PI);
            assert_abs_diff_eq!(bivariate_normal_cdf(0.0, 0.0, rho).unwrap(), expect, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(bivariate_normal_cdf(0.0, 0.0, 1.0 - 1e-12).unwrap(), 0.5, epsilon = 1e-6);
        assert!(bivariate_normal_cdf(0.0, 0.0, 1.0).is_err());
        assert!(bivariate_normal_cdf(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn bivariate_normal_matches_brute_force() {
        for &(x, y, rho) in &[(0.3, -0.8, 0.4), (1.5, 1.2, -0.6), (-1.0, 2.0, 0.85), (0.5, 0.5, 0.95)] {
            let fast = bivariate_normal_cdf(x, y, rho).unwrap();
            let slow = bvn_brute_force(x, y, rho);
            assert_abs_diff_eq!(fast, slow, epsilon = 1e-9);
        }
    }

    #[test]
    fn bivariate_normal_independence_and_infinities() {
        for &(x, y) in &[(0.3, -1.2), (2.5, 0.1), (-4.0, -4.0)] {
            let expect = standard_normal_cdf(x) * standard_normal_cdf(y);
            assert_abs_diff_eq!(bivariate_normal_cdf(x, y, 0.0).unwrap(), expect, epsilon = 1e-12);
        }
        assert_eq!(bivariate_normal_cdf(f64::NEG_INFINITY, 1.0, 0.3).unwrap(), 0.0);
        assert_eq!(bivariate_normal_cdf(f64::INFINITY, 1.0, 0.3).unwrap(), standard_normal_cdf(1.0));
        assert!(bivariate_normal_cdf(f64::NAN, 1.0, 0.3).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_abs_diff_eq!(CopulaSpec::Independence.cdf(0.3, 0.7).unwrap(), 0.21, epsilon = 1e-15);
        assert_abs_diff_eq!(
            CopulaSpec::Clayton { theta: 2.0 }.cdf(0.5, 0.5).unwrap(),
            7f64.powf(-0.5),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(CopulaSpec::Clayton { theta: 2.0 }.cdf(0.5, 0.5).unwrap(), 0.377964, epsilon = 1e-6);
        assert_abs_diff_eq!(CopulaSpec::Gumbel { theta: 1.0 }.cdf(0.4, 0.9).unwrap(), 0.36, epsilon = 1e-15);
        assert_abs_diff_eq!(CopulaSpec::Gaussian { rho: 0.0 }.cdf(0.2, 0.5).unwrap(), 0.10, epsilon = 1e-15);
        // Gumbel θ → 1⁺ is continuous with independence.
        assert_abs_diff_eq!(CopulaSpec::Gumbel { theta: 1.0 + 1e-9 }.cdf(0.4, 0.9).unwrap(), 0.36, epsilon = 1e-9);
        // Frank near zero uses the independence limit.
        assert_eq!(CopulaSpec::Frank { theta: 1e-8 }.cdf(0.3, 0.6).unwrap(), 0.3 * 0.6);
        assert_abs_diff_eq!(CopulaSpec::Frank { theta: 2e-6 }.cdf(0.3, 0.6).unwrap(), 0.18, epsilon = 1e-6);
    }

    #[test]
    fn joint_survival_examples() {
        assert_abs_diff_eq!(CopulaSpec::Independence.joint_survival(0.2, 0.3).unwrap(), 0.56, epsilon = 1e-15);
        let near_comonotone = CopulaSpec::Gaussian { rho: 1.0 - 1e-10 };
        assert_abs_diff_eq!(near_comonotone.joint_survival(0.2, 0.3).unwrap(), 0.7, epsilon = 1e-4);
        assert_abs_diff_eq!(
            CopulaSpec::Clayton { theta: 2.0 }.joint_survival(0.5, 0.5).unwrap(),
            7f64.powf(-0.5),
            epsilon = 1e-15
        );
    }

    #[test]
    fn rejects_out_of_domain() {
        for bad in [
            CopulaSpec::Gaussian { rho: 1.0 },
            CopulaSpec::Gumbel { theta: 0.9 },
            CopulaSpec::Clayton { theta: 0.0 },
            CopulaSpec::Clayton { theta: -0.5 },
            CopulaSpec::Frank { theta: 0.0 },
            CopulaSpec::Frank { theta: f64::NAN },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
            assert!(bad.cdf(0.5, 0.5).is_err());
        }
        assert!(CopulaSpec::Independence.cdf(1.2, 0.5).is_err());
        assert!(CopulaSpec::Independence.cdf(0.2, -0.1).is_err());
    }

    #[test]
    fn boundary_conditions_on_grid() {
        for spec in specs() {
            for i in 0..=20 {
                let t = i as f64 / 20.0;
                assert_eq!(spec.cdf(t, 0.0).unwrap(), 0.0);
                assert_eq!(spec.cdf(0.0, t).unwrap(), 0.0);
                assert_abs_diff_eq!(spec.cdf(t, 1.0).unwrap(), t, epsilon = 1e-15);
                assert_abs_diff_eq!(spec.cdf(1.0, t).unwrap(), t, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn frank_large_theta_matches_high_precision_values() {
        // Reference values evaluated with 50-digit arithmetic.
        let cases = [
            (35.0, 0.5, 0.6, 0.499_149_988_766_782_018_7),
            (35.0, 0.3, 0.35, 0.295_422_283_608_111_398_5),
            (-35.0, 0.5, 0.6, 0.100_850_011_233_217_959_1),
            (-35.0, 0.05, 0.9, 0.003_833_162_417_239_799_1),
            (60.0, 0.1, 0.2, 0.099_958_840_731_684_733_1),
            (60.0, 0.05, 0.9, 0.050_000_000_000_000_002_8),
        ];
        for (theta, u, v, expect) in cases {
            let got = CopulaSpec::Frank { theta }.cdf(u, v).unwrap();
            assert_abs_diff_eq!(got, expect, epsilon = 1e-14);
        }
        // Moderate θ near the upper corner, where the direct form cancels.
        let moderate = [
            (20.8, 0.999999, 0.99, 0.989_999_187_791_377_158_2),
            (20.8, 0.97, 0.99, 0.964_385_099_433_933_885_4),
            (1.5, 0.5, 0.3, 0.188_343_841_097_581_876_9),
            (-12.0, 0.999, 0.995, 0.994_000_000_382_227_982_6),
            (1.0000001, 0.2, 0.7, 0.155_906_808_918_395_414_2),
            (0.9999999, 0.2, 0.7, 0.155_906_805_956_166_801_6),
        ];
        for (theta, u, v, expect) in moderate {
            let got = CopulaSpec::Frank { theta }.cdf(u, v).unwrap();
            assert_abs_diff_eq!(got, expect, epsilon = 1e-14);
        }
        let near_top = CopulaSpec::Frank { theta: 200.0 }.cdf(0.98, 0.985).unwrap();
        assert!(near_top <= 0.98 && near_top > 0.97);
    }

    #[test]
    fn frechet_bounds_and_two_increasing() {
        let n = 50;
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        for spec in specs() {
            let table: Vec<Vec<f64>> =
                grid.iter().map(|&u| grid.iter().map(|&v| spec.cdf(u, v).unwrap()).collect()).collect();
            for (i, &u) in grid.iter().enumerate() {
                for (j, &v) in grid.iter().enumerate() {
                    let c = table[i][j];
                    assert!(c >= (u + v - 1.0).max(0.0) - 1e-10, "{spec:?} lower bound at ({u},{v})");
                    assert!(c <= u.min(v) + 1e-10, "{spec:?} upper bound at ({u},{v})");
                    if i > 0 && j > 0 {
                        let mass = table[i][j] - table[i - 1][j] - table[i][j - 1] + table[i - 1][j - 1];
                        assert!(mass >= -1e-12, "{spec:?} negative mass {mass} at ({u},{v})");
                    }
                }
            }
        }
    }

    #[test]
    fn cdf_nondecreasing_in_parameter() {
        let pts = [(0.1, 0.2), (0.5, 0.5), (0.3, 0.9), (0.75, 0.6), (0.95, 0.05)];
        let sweep = |family: CopulaFamily, start: f64, end: f64| {
            let mut p = start;
            let mut prev: Option<Vec<f64>> = None;
            while p <= end + 1e-12 {
                let spec = CopulaSpec::new(family, p).unwrap();
                let vals: Vec<f64> = pts.iter().map(|&(u, v)| spec.cdf(u, v).unwrap()).collect();
                if let Some(prev) = &prev {
                    for (a, b) in prev.iter().zip(&vals) {
                        assert!(b >= &(a - 1e-12), "{family} not monotone at {p}");
                    }
                }
                prev = Some(vals);
                p += 0.05;
            }
        };
        sweep(CopulaFamily::Gaussian, -0.95, 0.95);
        sweep(CopulaFamily::Gumbel, 1.0, 10.0);
        sweep(CopulaFamily::Clayton, 0.05, 10.0);
        sweep(CopulaFamily::Frank, 0.05, 30.0);
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let g: CopulaSpec = serde_json::from_str(r#"{"family":"gaussian","rho":0.4}"#).unwrap();
        assert_eq!(g, CopulaSpec::Gaussian { rho: 0.4 });
        let f: CopulaSpec = serde_json::from_str(r#"{"family":"frank","theta":5.0}"#).unwrap();
        assert_eq!(f, CopulaSpec::Frank { theta: 5.0 });
        let i: CopulaSpec = serde_json::from_str(r#"{"family":"independence"}"#).unwrap();
        assert_eq!(serde_json::to_string(&i).unwrap(), r#"{"family":"independence"}"#);
        assert!(serde_json::from_str::<CopulaSpec>(r#"{"family":"gumbel","theta":0.5}"#).is_err());
        assert!(serde_json::from_str::<CopulaSpec>(r#"{"family":"gaussian","rho":0.4,"extra":1}"#).is_err());
        assert_eq!("Clayton".parse::<CopulaFamily>().unwrap(), CopulaFamily::Clayton);
    }

    proptest! {
        #[test]
        fn survival_is_complementary_probability(u in 0.0..=1.0f64, v in 0.0..=1.0f64, theta in 1.0..12.0f64) {
            for spec in [CopulaSpec::Gumbel { theta }, CopulaSpec::Clayton { theta }, CopulaSpec::Frank { theta },
                         CopulaSpec::Gaussian { rho: (theta - 6.5) / 6.0 }] {
                let s = spec.joint_survival(u, v).unwrap();
                prop_assert!((0.0..=1.0).contains(&s));
                prop_assert!(s <= (1.0 - u).min(1.0 - v) + 1e-10);
                // Exchangeability.
                prop_assert!((spec.cdf(u, v).unwrap() - spec.cdf(v, u).unwrap()).abs() < 1e-12);
            }
        }
    }
}
