//! Univariate score distributions used as the four marginals
//! `F_AN, F_AD, F_BN, F_BD` of a joint diagnostic model.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarginalError {
    #[error("normal marginal needs finite mu and sigma > 0 (got mu={mu}, sigma={sigma})")]
    InvalidNormal { mu: f64, sigma: f64 },
    #[error("exponential marginal needs a finite rate lambda > 0 (got {0})")]
    InvalidExponential(f64),
    #[error("quantile needs a probability strictly inside (0, 1) (got {0})")]
    ProbabilityOutOfRange(f64),
}

/// A univariate score distribution for one test on one disease class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields, try_from = "RawMarginal")]
pub enum MarginalModel {
    Normal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum RawMarginal {
    Normal { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
}

impl TryFrom<RawMarginal> for MarginalModel {
    type Error = MarginalError;

    fn try_from(raw: RawMarginal) -> Result<Self, Self::Error> {
        match raw {
            RawMarginal::Normal { mu, sigma } => MarginalModel::normal(mu, sigma),
            RawMarginal::Exponential { lambda } => MarginalModel::exponential(lambda),
        }
    }
}

impl MarginalModel {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self, MarginalError> {
        let m = MarginalModel::Normal { mu, sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn exponential(lambda: f64) -> Result<Self, MarginalError> {
        let m = MarginalModel::Exponential { lambda };
        m.validate()?;
        Ok(m)
    }

    pub fn standard_normal() -> Self {
        MarginalModel::Normal { mu: 0.0, sigma: 1.0 }
    }

    pub fn validate(&self) -> Result<(), MarginalError> {
        match *self {
            MarginalModel::Normal { mu, sigma } => {
                if mu.is_finite() && sigma.is_finite() && sigma > 0.0 {
                    Ok(())
                } else {
                    Err(MarginalError::InvalidNormal { mu, sigma })
                }
            }
            MarginalModel::Exponential { lambda } => {
                if lambda.is_finite() && lambda > 0.0 {
                    Ok(())
                } else {
                    Err(MarginalError::InvalidExponential(lambda))
                }
            }
        }
    }

    /// `F(x)`; total on the extended reals.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            MarginalModel::Normal { mu, sigma } => standard_normal_cdf((x - mu) / sigma),
            MarginalModel::Exponential { lambda } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-lambda * x).exp_m1()
                }
            }
        }
    }

    /// `1 - F(x)`, evaluated directly in the upper tail.
    pub fn survival(&self, x: f64) -> f64 {
        match *self {
            MarginalModel::Normal { mu, sigma } => standard_normal_cdf(-(x - mu) / sigma),
            MarginalModel::Exponential { lambda } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-lambda * x).exp()
                }
            }
        }
    }

    pub fn quantile(&self, p: f64) -> Result<f64, MarginalError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(MarginalError::ProbabilityOutOfRange(p));
        }
        Ok(match *self {
            MarginalModel::Normal { mu, sigma } => mu + sigma * normal_quantile_unchecked(p),
            MarginalModel::Exponential { lambda } => -(-p).ln_1p() / lambda,
        })
    }

    /// Quantile extended to the closed interval: `p = 0` maps to the lower end
    /// of the support and `p = 1` to `+inf`.
    pub fn quantile_closed(&self, p: f64) -> Result<f64, MarginalError> {
        match p {
            0.0 => Ok(match self {
                MarginalModel::Normal { .. } => f64::NEG_INFINITY,
                MarginalModel::Exponential { .. } => 0.0,
            }),
            1.0 => Ok(f64::INFINITY),
            p => self.quantile(p),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            MarginalModel::Normal { mu, .. } => mu,
            MarginalModel::Exponential { lambda } => 1.0 / lambda,
        }
    }
}

/// Standard normal CDF `Ψ₁(x)`, through the complementary error function so
/// both tails keep full relative accuracy.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn standard_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal quantile `Ψ₁⁻¹(p)` for `p` in `(0, 1)`.
pub fn standard_normal_quantile(p: f64) -> Result<f64, MarginalError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(MarginalError::ProbabilityOutOfRange(p));
    }
    Ok(normal_quantile_unchecked(p))
}

/// Wichura's AS241 (PPND16) followed by one Newton step on the lower-tail
/// probability. For `p > 0.5` the reflection `1 - p` is exact.
pub(crate) fn normal_quantile_unchecked(p: f64) -> f64 {
    let (q, upper) = if p > 0.5 { (1.0 - p, true) } else { (p, false) };
    let mut z = -as241(q).abs();
    let pdf = standard_normal_pdf(z);
    if pdf > 0.0 {
        z -= (standard_normal_cdf(z) - q) / pdf;
    }
    if upper {
        -z
    } else {
        z
    }
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn as241(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_608,
        1.331_416_678_917_843_774_5e2,
        1.971_590_950_306_551_442_7e3,
        1.373_169_376_550_946_112_5e4,
        4.592_195_393_154_987_145_7e4,
        6.726_577_092_700_870_085_3e4,
        3.343_057_558_358_812_810_5e4,
        2.509_080_928_730_122_672_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091_125_2e1,
        6.871_870_074_920_579_083e2,
        5.394_196_021_424_751_107_7e3,
        2.121_379_430_158_659_586_7e4,
        3.930_789_580_009_271_061e4,
        2.872_908_573_572_194_267_4e4,
        5.226_495_278_852_854_561e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_577_34,
        4.630_337_846_156_545_295_9,
        5.769_497_221_460_691_405_5,
        3.647_848_324_763_204_605_04,
        1.270_458_252_452_368_382_58,
        2.417_807_251_774_506_117_7e-1,
        2.272_384_498_926_918_458_33e-2,
        7.745_450_142_783_414_076_4e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_758_821_87,
        1.676_384_830_183_803_849_4,
        6.897_673_349_851_000_045_5e-1,
        1.481_039_764_274_800_745_9e-1,
        1.519_866_656_361_645_719_66e-2,
        5.475_938_084_995_344_946e-4,
        1.050_750_071_644_416_843_24e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103_777_2,
        5.463_784_911_164_114_369_9,
        1.784_826_539_917_291_335_8,
        2.965_605_718_285_048_912_3e-1,
        2.653_218_952_657_612_309_3e-2,
        1.242_660_947_388_078_438_6e-3,
        2.711_555_568_743_487_578_15e-5,
        2.010_334_399_292_288_132_65e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_879_376_9e-1,
        1.369_298_809_227_358_053_1e-1,
        1.487_536_129_085_061_485_25e-2,
        7.868_691_311_456_132_591e-4,
        1.846_318_317_510_054_681_8e-5,
        1.421_511_758_316_445_888_7e-7,
        2.044_263_103_389_939_785_64e-15,
    ];

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}
