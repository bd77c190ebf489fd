//! Cross-module checks against independent oracles: Monte Carlo sampling,
//! closed forms and permutation nulls.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roc_copula::copulas::CopulaFamily;
use roc_copula::dependence::{sample_kendall, sample_pearson, tau_from_theta, theta_from_tau};
use roc_copula::fitting::{
    analyze, empirical_roc, project_operating_points, AnalysisConfig, AnalysisReport, FitError, Label, ScoreDataset, ScoreRecord,
    TestId,
};
use roc_copula::jointroc::{auc, mixture_quantile, threshold_for_fpf, threshold_grid, CurveKind};
use roc_copula::marginals::standard_normal_cdf;
use roc_copula::simulate::{oracle_points, oracle_survival, sample_uniform_pairs, synth_dataset, SimulationConfig};
use roc_copula::{CopulaSpec, Execution, JointDiagnosticModel, MarginalModel, RocKind};

fn normal(mu: f64, sigma: f64) -> MarginalModel {
    MarginalModel::Normal { mu, sigma }
}

fn exp(lambda: f64) -> MarginalModel {
    MarginalModel::Exponential { lambda }
}

fn binormal(copula_n: CopulaSpec, copula_d: CopulaSpec) -> JointDiagnosticModel {
    JointDiagnosticModel {
        marg_an: normal(0.0, 1.0),
        marg_ad: normal(1.3, 1.2),
        marg_bn: normal(0.0, 1.0),
        marg_bd: normal(1.6, 1.1),
        copula_n,
        copula_d,
        t_a_ro: None,
        t_a_ri: None,
    }
}

fn random_copula(rng: &mut ChaCha8Rng) -> CopulaSpec {
    match rng.gen_range(0..4) {
        0 => CopulaSpec::Gaussian { rho: rng.gen_range(-0.8..0.9) },
        1 => CopulaSpec::Gumbel { theta: rng.gen_range(1.0..5.0) },
        2 => CopulaSpec::Clayton { theta: rng.gen_range(0.1..6.0) },
        _ => CopulaSpec::Frank { theta: rng.gen_range(-10.0..15.0) },
    }
}

#[test]
fn joint_survival_matches_monte_carlo_for_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for i in 0..20 {
        let c = random_copula(&mut rng);
        let (u, v) = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
        let model = c.joint_survival(u, v).unwrap();
        let mc = oracle_survival(&c, u, v, 200_000, 3100 + i).unwrap();
        assert!(mc.agrees(model, 4.0), "{c:?} at ({u}, {v}): {model} vs {mc:?}");
    }
}

#[test]
fn orthant_and_clayton_survival_examples() {
    let clayton = oracle_survival(&CopulaSpec::Clayton { theta: 2.0 }, 0.5, 0.5, 1_000_000, 41).unwrap();
    assert!(clayton.agrees(7f64.powf(-0.5), 3.0), "{clayton:?}");
    let gauss = oracle_survival(&CopulaSpec::Gaussian { rho: 0.5 }, 0.5, 0.5, 1_000_000, 42).unwrap();
    assert!(gauss.agrees(1.0 / 3.0, 3.0), "{gauss:?}");
    let indep = oracle_survival(&CopulaSpec::Independence, 0.2, 0.3, 1_000_000, 43).unwrap();
    assert!(indep.agrees(0.56, 3.0), "{indep:?}");
}

#[test]
fn ruleout_point_matches_quadrant_frequency() {
    let g = CopulaSpec::Gaussian { rho: 0.4 };
    let model = JointDiagnosticModel {
        marg_an: exp(1.0),
        marg_ad: exp(0.23),
        marg_bn: exp(1.0),
        marg_bd: exp(0.17),
        copula_n: g,
        copula_d: g,
        t_a_ro: Some(threshold_for_fpf(&exp(1.0), 0.55).unwrap()),
        t_a_ri: None,
    };
    let x = 2f64.ln();
    let p = model.ruleout_point(x).unwrap();
    let mc = oracle_points(&model, CurveKind::RuleOut, &[x], 1_000_000, 44).unwrap();
    assert!((p.fpf - mc[0].0.estimate).abs() < 0.005);
    assert!((p.tpf - mc[0].1.estimate).abs() < 0.005);
}

#[test]
fn point_formulas_match_monte_carlo_for_every_family() {
    let families = [
        CopulaSpec::Gaussian { rho: 0.6 },
        CopulaSpec::Gumbel { theta: 2.5 },
        CopulaSpec::Clayton { theta: 3.0 },
        CopulaSpec::Frank { theta: -4.0 },
        CopulaSpec::Independence,
    ];
    for (i, &c) in families.iter().enumerate() {
        let mut model = binormal(c, families[(i + 1) % families.len()]);
        model.t_a_ro = Some(-0.3);
        model.t_a_ri = Some(1.4);
        let xs = [-1.0, 0.2, 0.9, 2.0];
        for kind in [CurveKind::RuleOut, CurveKind::RuleIn, CurveKind::Combined] {
            let mc = oracle_points(&model, kind, &xs, 200_000, 4500 + i as u64).unwrap();
            for (&x, (f, t)) in xs.iter().zip(&mc) {
                let p = model.point(kind, x).unwrap();
                assert!(f.agrees(p.fpf, 4.0) && t.agrees(p.tpf, 4.0), "{c:?} {kind:?} x={x}: {p:?} vs {f:?} {t:?}");
            }
        }
    }
}

#[test]
fn sample_dependence_converges_to_closed_forms() {
    for (i, family) in [CopulaFamily::Gumbel, CopulaFamily::Clayton, CopulaFamily::Frank, CopulaFamily::Gaussian].into_iter().enumerate() {
        let theta = theta_from_tau(family, 0.45).unwrap();
        let c = CopulaSpec::new(family, theta).unwrap();
        let pairs = sample_uniform_pairs(&c, 100_000, 50 + i as u64).unwrap();
        let tau = sample_kendall(&pairs).unwrap();
        assert!((tau - 0.45).abs() < 0.01, "{family}: {tau}");
    }
    let pairs = sample_uniform_pairs(&CopulaSpec::Independence, 100_000, 55).unwrap();
    assert!(sample_kendall(&pairs).unwrap().abs() < 3.0 / (100_000f64).sqrt());
}

#[test]
fn synthetic_class_correlations_match_the_model() {
    let model = binormal(CopulaSpec::Gaussian { rho: 0.3 }, CopulaSpec::Clayton { theta: 2.0 });
    let data = synth_dataset(&SimulationConfig { model, n_per_class: 100_000, seed: 61, prevalence: None }).unwrap();
    let neg = data.pairs(Label::NonDiseased).unwrap();
    let pos = data.pairs(Label::Diseased).unwrap();
    assert!((sample_pearson(&neg).unwrap() - 0.3).abs() < 0.02);
    let tau_d = tau_from_theta(CopulaFamily::Clayton, 2.0).unwrap();
    assert!((sample_kendall(&pos).unwrap() - tau_d).abs() < 0.02);
}

/// Hanley–McNeil standard error of the empirical AUC.
fn auc_se(a: f64, n_neg: f64, n_pos: f64) -> f64 {
    let q1 = a / (2.0 - a);
    let q2 = 2.0 * a * a / (1.0 + a);
    ((a * (1.0 - a) + (n_pos - 1.0) * (q1 - a * a) + (n_neg - 1.0) * (q2 - a * a)) / (n_neg * n_pos)).sqrt()
}

#[test]
fn empirical_auc_of_synthetic_data_matches_model_auc() {
    let model = binormal(CopulaSpec::Gaussian { rho: 0.3 }, CopulaSpec::Gaussian { rho: 0.5 });
    let truth = standard_normal_cdf(1.3 / (1.0f64 + 1.2 * 1.2).sqrt());
    let data = synth_dataset(&SimulationConfig { model, n_per_class: 5000, seed: 71, prevalence: None }).unwrap();
    let a = auc(&empirical_roc(&data, TestId::A).unwrap()).unwrap();
    assert!((a - truth).abs() < 3.0 * auc_se(truth, 5000.0, 5000.0), "{a} vs {truth}");
}

#[test]
fn shuffled_labels_give_chance_auc() {
    let model = binormal(CopulaSpec::Independence, CopulaSpec::Independence);
    let data = synth_dataset(&SimulationConfig { model, n_per_class: 3000, seed: 81, prevalence: None }).unwrap();
    let mut labels: Vec<Label> = data.records().iter().map(|r| r.label).collect();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(82));
    let records = data
        .records()
        .iter()
        .zip(labels)
        .map(|(r, l)| ScoreRecord { label: l, ..r.clone() })
        .collect();
    let shuffled = ScoreDataset::new(records).unwrap();
    let a = auc(&empirical_roc(&shuffled, TestId::A).unwrap()).unwrap();
    assert!((a - 0.5).abs() < 3.0 * auc_se(0.5, 3000.0, 3000.0), "{a}");
}

#[test]
fn projection_limits() {
    let model = binormal(CopulaSpec::Gaussian { rho: 0.3 }, CopulaSpec::Gaussian { rho: 0.5 });
    let data = synth_dataset(&SimulationConfig { model, n_per_class: 300, seed: 91, prevalence: None }).unwrap();
    let open = project_operating_points(&data, Some(f64::NEG_INFINITY), Some(f64::INFINITY)).unwrap();
    assert_eq!(open.points, empirical_roc(&data, TestId::B).unwrap().points);
    let closed = project_operating_points(&data, Some(f64::INFINITY), None).unwrap();
    assert!(closed.points.iter().all(|p| p.fpf == 0.0 && p.tpf == 0.0));
}

#[test]
fn analysis_always_includes_independence_and_round_trips() {
    let model = binormal(CopulaSpec::Gaussian { rho: 0.3 }, CopulaSpec::Gaussian { rho: 0.5 });
    let data = synth_dataset(&SimulationConfig { model, n_per_class: 400, seed: 101, prevalence: None }).unwrap();
    let config = AnalysisConfig {
        families: vec![CopulaFamily::Gaussian],
        rule_out_fpf: Some(0.5),
        rule_in_fpf: Some(0.05),
        n_points: 32,
        ..AnalysisConfig::default()
    };
    let report = analyze(&data, &config).unwrap();
    let families: Vec<CopulaFamily> = report.models.iter().map(|m| m.family).collect();
    assert_eq!(families, vec![CopulaFamily::Gaussian, CopulaFamily::Independence]);
    let indep = &report.models[1];
    assert_eq!((indep.model.copula_n, indep.model.copula_d), (CopulaSpec::Independence, CopulaSpec::Independence));
    assert_eq!(indep.curves.len(), 3);
    let text = serde_json::to_string(&report).unwrap();
    let back: AnalysisReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn analysis_rejects_an_empty_class() {
    let records = (0..10).map(|i| ScoreRecord::new(format!("c{i}"), Label::NonDiseased, i as f64, -(i as f64))).collect();
    let data = ScoreDataset::new(records).unwrap();
    let err = analyze(&data, &AnalysisConfig::default()).unwrap_err();
    assert!(matches!(err, FitError::EmptyClass(_)), "{err:?}");
}

fn arb_marginal() -> impl Strategy<Value = MarginalModel> {
    prop_oneof![
        (-1.0..2.0f64, 0.4..2.5f64).prop_map(|(mu, sigma)| MarginalModel::Normal { mu, sigma }),
        (0.1..3.0f64).prop_map(|lambda| MarginalModel::Exponential { lambda }),
    ]
}

fn arb_copula() -> impl Strategy<Value = CopulaSpec> {
    prop_oneof![
        (-0.95..0.95f64).prop_map(|rho| CopulaSpec::Gaussian { rho }),
        (1.0..8.0f64).prop_map(|theta| CopulaSpec::Gumbel { theta }),
        (0.05..8.0f64).prop_map(|theta| CopulaSpec::Clayton { theta }),
        prop_oneof![-20.0..-0.05f64, 0.05..40.0f64].prop_map(|theta| CopulaSpec::Frank { theta }),
        Just(CopulaSpec::Independence),
    ]
}

fn arb_model() -> impl Strategy<Value = JointDiagnosticModel> {
    (arb_marginal(), arb_marginal(), arb_marginal(), arb_marginal(), arb_copula(), arb_copula(), 0.2..0.95f64, 0.05..0.9f64).prop_map(
        |(an, ad, bn, bd, cn, cd, fpf_ro, frac)| JointDiagnosticModel {
            marg_an: an,
            marg_ad: ad,
            marg_bn: bn,
            marg_bd: bd,
            copula_n: cn,
            copula_d: cd,
            t_a_ro: Some(threshold_for_fpf(&an, fpf_ro).unwrap()),
            t_a_ri: Some(threshold_for_fpf(&an, fpf_ro * frac).unwrap()),
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curves_are_sorted_monotone_and_inside_their_ranges(model in arb_model()) {
        let fpf_ro = model.test_a_point(model.t_a_ro.unwrap()).fpf;
        let fpf_ri = model.test_a_point(model.t_a_ri.unwrap()).fpf;
        for kind in [CurveKind::TestA, CurveKind::TestB, CurveKind::RuleOut, CurveKind::RuleIn, CurveKind::Combined] {
            let curve = model.curve(kind, 64, Execution::Sequential).unwrap();
            let raw: Vec<_> = threshold_grid(&model.marg_bn, &model.marg_bd, 64).iter().map(|&x| model.point(kind, x).unwrap()).collect();
            for w in raw.windows(2) {
                prop_assert!(w[1].fpf >= w[0].fpf - 1e-10 && w[1].tpf >= w[0].tpf - 1e-10, "{:?} raw sweep {:?} -> {:?}", kind, w[0], w[1]);
            }
            prop_assert!(curve.is_monotone(1e-9), "{:?} not monotone", kind);
            let [lo, hi] = curve.fpf_range;
            for w in curve.points.windows(2) {
                prop_assert!(w[0].fpf <= w[1].fpf);
            }
            for p in &curve.points {
                prop_assert!(p.fpf >= lo - 1e-9 && p.fpf <= hi + 1e-9, "{:?} {:?} outside [{}, {}]", kind, p, lo, hi);
                prop_assert!((0.0..=1.0).contains(&p.tpf));
            }
            match curve.kind {
                RocKind::RuleOut => prop_assert!((hi - fpf_ro).abs() < 1e-9 && lo == 0.0),
                RocKind::RuleIn => prop_assert!((lo - fpf_ri).abs() < 1e-9 && hi == 1.0),
                RocKind::Combined => prop_assert!((lo - fpf_ri).abs() < 1e-9 && (hi - fpf_ro).abs() < 1e-9),
                _ => {}
            }
        }
    }

    #[test]
    fn joint_strategies_sit_between_the_single_test_rules(model in arb_model(), p in 0.01..0.99f64) {
        // Rule-out calls fewer positives than rule-in at the same thresholds,
        // and the combined rule sits between rule-out at T_ro and rule-in at T_ri.
        let x = mixture_quantile(&model.marg_bn, &model.marg_bd, p);
        let ro = model.ruleout_point(x).unwrap();
        let ri = model.rulein_point(x).unwrap();
        let comb = model.combined_point(x).unwrap();
        let b = model.test_b_point(x);
        prop_assert!(ro.fpf <= b.fpf + 1e-12 && ro.tpf <= b.tpf + 1e-12);
        prop_assert!(ri.fpf >= b.fpf - 1e-12 && ri.tpf >= b.tpf - 1e-12);
        prop_assert!(comb.fpf >= ro.fpf - 1e-12 && comb.fpf <= ri.fpf + 1e-12);
        prop_assert!(comb.tpf >= ro.tpf - 1e-12 && comb.tpf <= ri.tpf + 1e-12);
    }
}
