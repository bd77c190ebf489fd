//! Model spec files: a joint model whose Test-A thresholds may be given as raw
//! scores or as target Test-A FPFs, plus an optional dependence sweep.

use std::path::Path;

use roc_copula::dependence::theta_from_tau;
use roc_copula::jointroc::threshold_for_fpf;
use roc_copula::{CopulaFamily, CopulaSpec, JointDiagnosticModel, MarginalModel};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A Test-A threshold: `{"score": 1.2}` or `{"fpf": 0.55}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Threshold {
    Score(f64),
    Fpf(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepClass {
    NonDiseased,
    Diseased,
}

/// Whether sweep grid values are copula parameters or Kendall taus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMeasure {
    #[default]
    Parameter,
    Tau,
}

/// Replace one class's copula by `family` at each grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub class: SweepClass,
    pub family: CopulaFamily,
    #[serde(default)]
    pub measure: SweepMeasure,
    pub grid: Vec<f64>,
}

impl Sweep {
    /// Copula at each grid value; the grid must be strictly increasing.
    pub fn copulas(&self) -> Result<Vec<CopulaSpec>, CliError> {
        if self.grid.len() < 2 {
            return Err(CliError::Validation(format!("sweep grid needs at least 2 values (got {})", self.grid.len())));
        }
        if let Some(w) = self.grid.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(CliError::Validation(format!("sweep grid must be strictly increasing ({} then {})", w[0], w[1])));
        }
        if self.family == CopulaFamily::Independence {
            return Err(CliError::Validation("cannot sweep the independence copula".into()));
        }
        self.grid
            .iter()
            .map(|&g| {
                let param = match self.measure {
                    SweepMeasure::Parameter => g,
                    SweepMeasure::Tau => theta_from_tau(self.family, g).map_err(CliError::from_lib)?,
                };
                CopulaSpec::new(self.family, param).map_err(CliError::from_lib)
            })
            .collect()
    }

    pub fn apply(&self, model: &JointDiagnosticModel, copula: CopulaSpec) -> JointDiagnosticModel {
        match self.class {
            SweepClass::NonDiseased => model.with_copulas(copula, model.copula_d),
            SweepClass::Diseased => model.with_copulas(model.copula_n, copula),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpecFile {
    pub marg_an: MarginalModel,
    pub marg_ad: MarginalModel,
    pub marg_bn: MarginalModel,
    pub marg_bd: MarginalModel,
    pub copula_n: CopulaSpec,
    pub copula_d: CopulaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_out: Option<Threshold>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_in: Option<Threshold>,
    /// Disease prevalence for the PPV/NPV reference lines of curve plots.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prevalence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl ModelSpecFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let spec: ModelSpecFile = serde_json::from_str(text).map_err(|e| CliError::Validation(e.to_string()))?;
        if let Some(p) = spec.prevalence {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Validation(format!("prevalence must lie in [0, 1] (got {p})")));
            }
        }
        spec.model()?;
        Ok(spec)
    }

    fn resolve(&self, t: Option<Threshold>) -> Result<Option<f64>, CliError> {
        match t {
            None => Ok(None),
            Some(Threshold::Score(s)) if s.is_nan() => Err(CliError::Validation("threshold score is NaN".into())),
            Some(Threshold::Score(s)) => Ok(Some(s)),
            Some(Threshold::Fpf(f)) if !(f > 0.0 && f < 1.0) => {
                Err(CliError::Validation(format!("threshold fpf must lie strictly inside (0, 1) (got {f})")))
            }
            Some(Threshold::Fpf(f)) => threshold_for_fpf(&self.marg_an, f).map(Some).map_err(CliError::from_lib),
        }
    }

    /// The joint model with thresholds resolved to scores; ordering checked.
    pub fn model(&self) -> Result<JointDiagnosticModel, CliError> {
        let model = JointDiagnosticModel {
            marg_an: self.marg_an,
            marg_ad: self.marg_ad,
            marg_bn: self.marg_bn,
            marg_bd: self.marg_bd,
            copula_n: self.copula_n,
            copula_d: self.copula_d,
            t_a_ro: self.resolve(self.rule_out)?,
            t_a_ri: self.resolve(self.rule_in)?,
        };
        model.validate().map_err(CliError::from_lib)?;
        Ok(model)
    }
}
