//! Joint ROC analysis for two correlated diagnostic tests.
//!
//! Test A (for example an AI device) is combined with Test B (for example a
//! radiologist) under three strategies:
//!
//! * **rule-out** ("believe the negative"): cases with a Test-A score at or below
//!   `T_A^ro` are called negative without consulting Test B;
//! * **rule-in** ("believe the positive"): cases with a Test-A score above
//!   `T_A^ri` are called positive without consulting Test B;
//! * **combined**: both at once, with Test B deciding the middle band.
//!
//! The joint score distribution of each disease class is built from arbitrary
//! marginals coupled by a bivariate copula (Gaussian, Gumbel, Clayton, Frank or
//! independence). The crate also ships an empirical pipeline that fits binormal
//! ROC models to score/label data and projects rule-out / rule-in operating
//! points, plus a seeded Monte Carlo sampler used as an independent oracle.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and fall back to plain iterators otherwise; see [`exec`].

pub mod copulas;
pub mod dependence;
pub mod exec;
pub mod fitting;
pub mod jointroc;
pub mod marginals;
pub mod quadrature;
pub mod simulate;

mod error;

pub use copulas::{CopulaFamily, CopulaSpec};
pub use error::{Error, Result};
pub use exec::Execution;
pub use jointroc::{JointDiagnosticModel, OperatingPoint, RocCurve, RocKind};
pub use marginals::MarginalModel;
