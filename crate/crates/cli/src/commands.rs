use std::path::Path;

use roc_copula::dependence::{spearman_from_copula, tau_from_theta, theta_from_tau};
use roc_copula::fitting::{self, kind_name, AnalysisConfig, AnalysisReport, Label, ScoreDataset};
use roc_copula::jointroc::{pauc, CurveKind};
use roc_copula::simulate::{synth_dataset, SimulationConfig};
use roc_copula::{CopulaFamily, CopulaSpec, Execution, JointDiagnosticModel, OperatingPoint, RocCurve, RocKind};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::modelspec::{ModelSpecFile, Sweep, SweepClass, SweepMeasure};
use crate::output::{self, csv_table, Cell, Output};
use crate::svg::{Marker, Plot, PredictiveLines, Series, Stroke};
use crate::{AnalyzeArgs, ClassArg, CliError, CurveArgs, DependenceArgs, Format, MeasureArg, SimulateArgs, TheoremArgs, Which};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Smallest pAUC step accepted as a strict move in the expected direction.
pub const THEOREM_MARGIN: f64 = 1e-4;

fn check_points(n: usize) -> Result<(), CliError> {
    if n < 2 {
        return Err(CliError::Validation(format!("--points must be at least 2 (got {n})")));
    }
    Ok(())
}

fn label(kind: CurveKind) -> &'static str {
    match kind {
        CurveKind::TestA => "Test A alone",
        CurveKind::TestB => "Test B alone",
        CurveKind::RuleOut => "rule-out",
        CurveKind::RuleIn => "rule-in",
        CurveKind::Combined => "combined",
    }
}

fn xy(points: &[OperatingPoint]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.fpf, p.tpf)).collect()
}

fn curve_csv(curve: &RocCurve) -> String {
    csv_table(&["fpf", "tpf"], curve.points.iter().map(|p| vec![Cell::Num(p.fpf), Cell::Num(p.tpf)]))
}

/// Every curve the model's thresholds allow, univariate first.
fn available_kinds(model: &JointDiagnosticModel) -> Vec<CurveKind> {
    let mut kinds = vec![CurveKind::TestA, CurveKind::TestB];
    if model.t_a_ro.is_some() {
        kinds.push(CurveKind::RuleOut);
    }
    if model.t_a_ri.is_some() {
        kinds.push(CurveKind::RuleIn);
    }
    if model.t_a_ro.is_some() && model.t_a_ri.is_some() {
        kinds.push(CurveKind::Combined);
    }
    kinds
}

fn threshold_markers(model: &JointDiagnosticModel) -> Vec<Marker> {
    [("T_A rule-out", model.t_a_ro), ("T_A rule-in", model.t_a_ri)]
        .into_iter()
        .filter_map(|(name, t)| t.map(|t| (name, model.test_a_point(t))))
        .map(|(name, p)| Marker { label: format!("{name} (FPF {:.3})", p.fpf), fpf: p.fpf, tpf: p.tpf })
        .collect()
}

/// Curve file: the curve plus the model that produced it.
#[derive(Debug, Serialize)]
struct CurveFile<'a> {
    tool_version: &'static str,
    curve: CurveKind,
    kind: RocKind,
    fpf_range: [f64; 2],
    pauc_window: [f64; 2],
    pauc: f64,
    points: &'a [OperatingPoint],
    model: &'a JointDiagnosticModel,
}

pub fn curve(a: &CurveArgs, requested: &[Format], out: &Output) -> Result<(), CliError> {
    let formats = output::formats(requested, &[Format::Csv], &[Format::Csv, Format::Json, Format::Svg], "curve")?;
    check_points(a.points)?;
    let spec = ModelSpecFile::load(&a.spec)?;
    let model = spec.model()?;
    let kinds = if a.kind.is_empty() { available_kinds(&model) } else { a.kind.clone() };
    let prevalence = a.prevalence.or(spec.prevalence);
    if let Some(p) = prevalence.filter(|p| !(0.0..=1.0).contains(p)) {
        return Err(CliError::Validation(format!("prevalence must lie in [0, 1] (got {p})")));
    }

    let mut built = Vec::new();
    for kind in kinds {
        let curve = model.curve(kind, a.points, Execution::Parallel).map_err(CliError::from_lib)?;
        let window = model.pauc_window(kind).map_err(CliError::from_lib)?;
        let value = pauc(&curve, window[0], window[1]).map_err(CliError::from_lib)?;
        out.say(&format!(
            "{}: fpf [{:.6}, {:.6}], pAUC over [{:.6}, {:.6}] = {value:.6}",
            kind_name(kind),
            curve.fpf_range[0],
            curve.fpf_range[1],
            window[0],
            window[1]
        ));
        built.push((kind, curve, window, value));
    }

    for format in formats {
        match format {
            Format::Csv => {
                for (kind, curve, _, _) in &built {
                    out.write(&format!("curve_{}.csv", kind_name(*kind)), &curve_csv(curve))?;
                }
            }
            Format::Json => {
                for (kind, curve, window, value) in &built {
                    let file = CurveFile {
                        tool_version: TOOL_VERSION,
                        curve: *kind,
                        kind: curve.kind,
                        fpf_range: curve.fpf_range,
                        pauc_window: *window,
                        pauc: *value,
                        points: &curve.points,
                        model: &model,
                    };
                    out.json(&format!("curve_{}.json", kind_name(*kind)), &file)?;
                }
            }
            Format::Svg => {
                let mut plot = Plot::new("Model ROC curves");
                for (kind, curve, _, _) in &built {
                    let stroke = if curve.kind == RocKind::Univariate { Stroke::Dashed } else { Stroke::Solid };
                    plot.series.push(Series { label: label(*kind).into(), points: xy(&curve.points), stroke });
                }
                plot.markers = threshold_markers(&model);
                plot.reference = prevalence.map(PredictiveLines::at);
                out.write("curves.svg", &plot.render())?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Direction in which the pAUC must move as the swept class's dependence grows.
pub fn expected_direction(which: Which, class: SweepClass) -> Direction {
    match (which, class) {
        (Which::Ruleout, SweepClass::Diseased) | (Which::Rulein, SweepClass::NonDiseased) => Direction::Increasing,
        (Which::Ruleout, SweepClass::NonDiseased) | (Which::Rulein, SweepClass::Diseased) => Direction::Decreasing,
    }
}

#[derive(Debug, Serialize)]
struct SweepRow {
    value: f64,
    copula: CopulaSpec,
    pauc: f64,
}

#[derive(Debug, Serialize)]
struct TheoremReport {
    tool_version: &'static str,
    which: Which,
    class: SweepClass,
    family: CopulaFamily,
    measure: SweepMeasure,
    pauc_window: [f64; 2],
    expected: Direction,
    margin: f64,
    rows: Vec<SweepRow>,
    min_step: f64,
    verdict: &'static str,
    model: JointDiagnosticModel,
}

fn merged_sweep(a: &TheoremArgs, from_spec: Option<Sweep>) -> Result<Sweep, CliError> {
    let class = a.class.map(|c| match c {
        ClassArg::NonDiseased => SweepClass::NonDiseased,
        ClassArg::Diseased => SweepClass::Diseased,
    });
    let measure = a.measure.map(|m| match m {
        MeasureArg::Parameter => SweepMeasure::Parameter,
        MeasureArg::Tau => SweepMeasure::Tau,
    });
    let grid = (!a.grid.is_empty()).then(|| a.grid.clone());
    match from_spec {
        Some(s) => Ok(Sweep {
            class: class.unwrap_or(s.class),
            family: a.family.unwrap_or(s.family),
            measure: measure.unwrap_or(s.measure),
            grid: grid.unwrap_or(s.grid),
        }),
        None => match (class, a.family, grid) {
            (Some(class), Some(family), Some(grid)) => Ok(Sweep { class, family, measure: measure.unwrap_or_default(), grid }),
            _ => Err(CliError::Validation(
                "no sweep: add a \"sweep\" block to the spec or pass --class, --family and --grid".into(),
            )),
        },
    }
}

pub fn theorem_check(a: &TheoremArgs, requested: &[Format], out: &Output) -> Result<(), CliError> {
    let formats = output::formats(requested, &[Format::Csv], &[Format::Csv, Format::Json, Format::Svg], "theorem-check")?;
    check_points(a.points)?;
    let spec = ModelSpecFile::load(&a.spec)?;
    let base = spec.model()?;
    let sweep = merged_sweep(a, spec.sweep.clone())?;
    let copulas = sweep.copulas()?;
    let kind = match a.which {
        Which::Ruleout => CurveKind::RuleOut,
        Which::Rulein => CurveKind::RuleIn,
    };
    let window = base.pauc_window(kind).map_err(CliError::from_lib)?;

    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for (&value, &copula) in sweep.grid.iter().zip(&copulas) {
        let model = sweep.apply(&base, copula);
        let curve = model.curve(kind, a.points, Execution::Parallel).map_err(CliError::from_lib)?;
        rows.push(SweepRow { value, copula, pauc: pauc(&curve, window[0], window[1]).map_err(CliError::from_lib)? });
        curves.push(curve);
    }
    let expected = expected_direction(a.which, sweep.class);
    let sign = if expected == Direction::Increasing { 1.0 } else { -1.0 };
    let min_step = rows.windows(2).map(|w| sign * (w[1].pauc - w[0].pauc)).fold(f64::INFINITY, f64::min);
    let pass = min_step > THEOREM_MARGIN;
    let verdict = if pass { "PASS" } else { "FAIL" };
    let stem = format!("theorem_{}", kind_name(kind));

    for format in formats {
        match format {
            Format::Csv => {
                let table = csv_table(&["value", "pauc"], rows.iter().map(|r| vec![Cell::Num(r.value), Cell::Num(r.pauc)]));
                out.write(&format!("{stem}.csv"), &table)?;
            }
            Format::Json => {
                let report = TheoremReport {
                    tool_version: TOOL_VERSION,
                    which: a.which,
                    class: sweep.class,
                    family: sweep.family,
                    measure: sweep.measure,
                    pauc_window: window,
                    expected,
                    margin: THEOREM_MARGIN,
                    rows: std::mem::take(&mut rows),
                    min_step,
                    verdict,
                    model: base,
                };
                out.json(&format!("{stem}.json"), &report)?;
                rows = report.rows;
            }
            Format::Svg => {
                let mut plot = Plot::new(format!("{} sweep of {} {:?}", label(kind), sweep.family, sweep.class));
                let a_alone = base.curve(CurveKind::TestA, a.points, Execution::Parallel).map_err(CliError::from_lib)?;
                plot.series.push(Series { label: "Test A alone".into(), points: xy(&a_alone.points), stroke: Stroke::Dashed });
                for (row, curve) in rows.iter().zip(&curves) {
                    plot.series.push(Series { label: format!("{:?} = {}", sweep.measure, row.value), points: xy(&curve.points), stroke: Stroke::Solid });
                }
                plot.markers = threshold_markers(&base);
                out.write(&format!("{stem}.svg"), &plot.render())?;
            }
        }
    }
    for r in &rows {
        out.say(&format!("{:?} {}: pAUC {:.6}", sweep.measure, r.value, r.pauc));
    }
    let summary = format!(
        "{verdict}: {} pAUC over [{:.6}, {:.6}] expected {:?} in {:?} dependence; smallest step {min_step:.3e} (margin {THEOREM_MARGIN:e})",
        label(kind),
        window[0],
        window[1],
        expected,
        sweep.class
    );
    out.say(&summary);
    if pass {
        Ok(())
    } else {
        Err(CliError::Failed(format!("smallest pAUC step {min_step:.3e} does not exceed {THEOREM_MARGIN:e}")))
    }
}

fn load_dataset(path: &Path) -> Result<(ScoreDataset, String), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let digest = format!("{:x}", Sha256::digest(&bytes));
    let data = ScoreDataset::from_csv_reader(bytes.as_slice()).map_err(|e| match CliError::from_lib(e) {
        CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((data, digest))
}

fn analysis_config(a: &AnalyzeArgs, seed: Option<u64>) -> Result<AnalysisConfig, CliError> {
    let mut config = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        }
        None => AnalysisConfig::default(),
    };
    if !a.families.is_empty() {
        config.families = a.families.clone();
    }
    if a.rule_out_fpf.is_some() {
        config.rule_out_fpf = a.rule_out_fpf;
    }
    if a.rule_in_fpf.is_some() {
        config.rule_in_fpf = a.rule_in_fpf;
    }
    if a.b_threshold.is_some() {
        config.b_threshold = a.b_threshold;
    }
    if !a.prevalence.is_empty() {
        config.prevalences = a.prevalence.clone();
    }
    if let Some(c) = a.calibration {
        config.gaussian_calibration = c;
    }
    if let Some(n) = a.points {
        config.n_points = n;
    }
    if seed.is_some() {
        config.seed = seed;
    }
    Ok(config)
}

fn analysis_plot(report: &AnalysisReport, kind: Option<CurveKind>, prevalence: f64) -> Plot {
    let title = kind.map_or("Empirical and fitted ROC curves".to_string(), |k| format!("{} models and projected empirical curve", label(k)));
    let mut plot = Plot::new(title);
    plot.series.push(Series { label: "Test A fitted".into(), points: xy(&report.test_a.fitted.points), stroke: Stroke::Dashed });
    plot.series.push(Series { label: "Test B fitted".into(), points: xy(&report.test_b.fitted.points), stroke: Stroke::Dashed });
    match kind {
        None => {
            plot.series.push(Series { label: "Test A empirical".into(), points: xy(&report.test_a.empirical.points), stroke: Stroke::Solid });
            plot.series.push(Series { label: "Test B empirical".into(), points: xy(&report.test_b.empirical.points), stroke: Stroke::Solid });
        }
        Some(kind) => {
            for m in &report.models {
                for (k, c) in &m.curves {
                    if *k == kind {
                        plot.series.push(Series { label: format!("{} model", m.family), points: xy(&c.points), stroke: Stroke::Solid });
                    }
                }
            }
            for p in report.projected.iter().filter(|p| p.kind == kind) {
                plot.series.push(Series { label: "projected empirical".into(), points: xy(&p.curve.points), stroke: Stroke::Dots });
            }
            for p in report.projected_points.iter().filter(|p| p.kind == kind) {
                plot.markers.push(Marker { label: format!("{} point", label(kind)), fpf: p.point.fpf, tpf: p.point.tpf });
                plot.markers.push(Marker { label: "Test B alone".into(), fpf: p.b_alone.fpf, tpf: p.b_alone.tpf });
            }
        }
    }
    plot.reference = Some(PredictiveLines::at(prevalence));
    plot
}

pub fn analyze(a: &AnalyzeArgs, requested: &[Format], seed: Option<u64>, out: &Output) -> Result<(), CliError> {
    let formats = output::formats(requested, &[Format::Json, Format::Csv], &[Format::Csv, Format::Json, Format::Svg], "analyze")?;
    let (data, digest) = load_dataset(&a.data)?;
    let config = analysis_config(a, seed)?;
    let mut report = fitting::analyze(&data, &config).map_err(CliError::from_lib)?;
    report.provenance.input_sha256 = Some(digest);
    for w in &report.warnings {
        eprintln!("roc-copula: warning: {w}");
    }

    for format in formats {
        match format {
            Format::Json => {
                out.json("report.json", &report)?;
            }
            Format::Csv => {
                let rows = report.metric_rows().into_iter().map(|(k, v)| vec![Cell::Text(k), Cell::Num(v)]);
                out.write("metrics.csv", &csv_table(&["metric", "value"], rows))?;
            }
            Format::Svg => {
                let prevalence = config.prevalences.first().copied().unwrap_or_else(|| data.prevalence());
                out.write("analysis.svg", &analysis_plot(&report, None, prevalence).render())?;
                let mut kinds: Vec<CurveKind> = report.projected.iter().map(|p| p.kind).collect();
                kinds.dedup();
                for kind in kinds {
                    out.write(&format!("analysis_{}.svg", kind_name(kind)), &analysis_plot(&report, Some(kind), prevalence).render())?;
                }
            }
        }
    }
    out.say(&format!(
        "{} non-diseased, {} diseased; AUC A {:.4} (empirical {:.4}), AUC B {:.4} (empirical {:.4})",
        report.n_non_diseased, report.n_diseased, report.test_a.fitted_auc, report.test_a.empirical_auc, report.test_b.fitted_auc, report.test_b.empirical_auc
    ));
    for p in &report.projected_points {
        out.say(&format!("{}: projected point (FPF {:.4}, TPF {:.4})", kind_name(p.kind), p.point.fpf, p.point.tpf));
    }
    Ok(())
}

pub fn simulate(a: &SimulateArgs, requested: &[Format], seed: u64, out: &Output) -> Result<(), CliError> {
    output::formats(requested, &[Format::Csv], &[Format::Csv], "simulate")?;
    let spec = ModelSpecFile::load(&a.spec)?;
    let config = SimulationConfig { model: spec.model()?, n_per_class: a.n, seed, prevalence: a.prevalence };
    let data = synth_dataset(&config).map_err(CliError::from_lib)?;
    out.write("dataset.csv", &data.to_csv_string().map_err(CliError::from_lib)?)?;
    out.say(&format!(
        "{} cases: {} non-diseased, {} diseased (seed {seed})",
        data.len(),
        data.count(Label::NonDiseased),
        data.count(Label::Diseased)
    ));
    Ok(())
}

#[derive(Debug, Serialize)]
struct DependenceSummary {
    copula: CopulaSpec,
    kendall_tau: f64,
    spearman_rho: f64,
}

pub fn dependence(a: &DependenceArgs, requested: &[Format], out: &Output) -> Result<(), CliError> {
    let formats = output::formats(requested, &[Format::Json], &[Format::Csv, Format::Json], "dependence")?;
    if let Some(path) = &a.data {
        let (data, _) = load_dataset(path)?;
        let rows = [Label::NonDiseased, Label::Diseased]
            .into_iter()
            .map(|l| fitting::correlation_row(&data, l))
            .collect::<Result<Vec<_>, _>>()
            .map_err(CliError::from_lib)?;
        for format in formats {
            match format {
                Format::Json => {
                    out.json("correlations.json", &rows)?;
                }
                _ => {
                    let header = ["label", "n", "pearson", "kendall_tau_b", "spearman", "latent_rho_from_kendall"];
                    let table = csv_table(
                        &header,
                        rows.iter().map(|r| {
                            let name = if r.label == Label::Diseased { "diseased" } else { "non_diseased" };
                            vec![
                                Cell::Text(name.into()),
                                Cell::Text(r.n.to_string()),
                                Cell::Num(r.pearson),
                                Cell::Num(r.kendall_tau_b),
                                Cell::Num(r.spearman),
                                Cell::Num(r.latent_rho_from_kendall),
                            ]
                        }),
                    );
                    out.write("correlations.csv", &table)?;
                }
            }
        }
        for r in &rows {
            out.say(&format!(
                "{:?} (n={}): pearson {:.4}, kendall tau-b {:.4}, spearman {:.4}",
                r.label, r.n, r.pearson, r.kendall_tau_b, r.spearman
            ));
        }
        return Ok(());
    }

    let family = a.family.ok_or_else(|| CliError::Validation("--family is required without --data".into()))?;
    let (copula, tau) = match (family, a.parameter, a.tau) {
        (CopulaFamily::Independence, None, None) => (CopulaSpec::Independence, 0.0),
        (CopulaFamily::Independence, _, _) => return Err(CliError::Validation("the independence copula has no parameter".into())),
        (_, Some(p), None) => (CopulaSpec::new(family, p).map_err(CliError::from_lib)?, tau_from_theta(family, p).map_err(CliError::from_lib)?),
        (_, None, Some(t)) => {
            let theta = theta_from_tau(family, t).map_err(CliError::from_lib)?;
            (CopulaSpec::new(family, theta).map_err(CliError::from_lib)?, t)
        }
        _ => return Err(CliError::Validation(format!("{family} needs --parameter or --tau"))),
    };
    let summary = DependenceSummary { copula, kendall_tau: tau, spearman_rho: spearman_from_copula(&copula).map_err(CliError::from_lib)? };
    for format in formats {
        match format {
            Format::Json => {
                out.json("dependence.json", &summary)?;
            }
            _ => {
                let row = vec![
                    Cell::Text(family.to_string()),
                    copula.parameter().map_or(Cell::Text(String::new()), Cell::Num),
                    Cell::Num(summary.kendall_tau),
                    Cell::Num(summary.spearman_rho),
                ];
                out.write("dependence.csv", &csv_table(&["family", "parameter", "kendall_tau", "spearman_rho"], [row]))?;
            }
        }
    }
    out.say(&format!(
        "{family} parameter {}: kendall tau {:.6}, spearman rho {:.6}",
        copula.parameter().map_or("-".to_string(), |p| p.to_string()),
        summary.kendall_tau,
        summary.spearman_rho
    ));
    Ok(())
}
