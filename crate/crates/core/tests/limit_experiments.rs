//! Driver-level behavior of the limit experiments beyond their default
//! happy path: the detectors must fire when fed setups that genuinely break
//! the limit comparison, pass in regimes the theory still covers, and stay
//! byte-deterministic across worker counts.

use snlab::config::{CommandParams, RunConfig};
use snlab::experiments::limits::{
    additive_limit_check, extremal_limit_check, gaussian_clt_check, joint_limit_check,
    AdditiveLimitConfig, ExtremalLimitConfig, GaussianCltConfig, JointLimitConfig,
};
use snlab::experiments::network::PercolationConfig;
use snlab::point_process::MarkDistribution;

const SEED: u64 = 7;

/// A coarse truncation budget shrinks the window until most of the field
/// mass is missing; the Laplace-transform bias check has to catch that.
#[test]
fn additive_check_flags_starved_truncation() {
    let cfg = AdditiveLimitConfig {
        lambda_list: vec![1e3],
        t_grid: vec![0.05, 0.2],
        n_reps: 2000,
        eps_rel: 0.5,
        ..AdditiveLimitConfig::default()
    };
    let out = additive_limit_check(&cfg, SEED).unwrap();
    assert!(!out.pass, "starved window must fail");
    let bias = out
        .checks
        .iter()
        .find(|c| c.name == "lt_bias_lambda_1e3")
        .unwrap();
    assert!(!bias.pass);
    assert!(bias.observed > 0.05, "bias excess {}", bias.observed);
}

/// Probes close together share almost every point, so the joint transform
/// cannot factorize; the gap check must fail.
#[test]
fn joint_check_flags_overlapping_probes() {
    let cfg = JointLimitConfig {
        probes: vec![vec![-0.05, 0.0], vec![0.05, 0.0]],
        lambda_list: vec![50.0],
        n_reps: 3000,
        ..JointLimitConfig::default()
    };
    let out = joint_limit_check(&cfg, SEED).unwrap();
    let gap = out
        .checks
        .iter()
        .find(|c| c.name == "factorization_gap_lambda_50")
        .unwrap();
    assert!(!gap.pass, "overlapping probes must show a gap, got {}", gap.observed);
}

/// An extremal run whose window holds about one point cannot reach the
/// Frechet law; the KS check must fail.
#[test]
fn extremal_check_flags_starved_truncation() {
    let cfg = ExtremalLimitConfig {
        probes: vec![vec![0.0, 0.0]],
        lambda: 1e3,
        n_reps: 2000,
        eps_rel: 0.9,
        ..ExtremalLimitConfig::default()
    };
    let out = extremal_limit_check(&cfg, SEED).unwrap();
    let ks = out.checks.iter().find(|c| c.name == "ks_probe_0").unwrap();
    assert!(!ks.pass, "starved extremal window must fail KS, got {}", ks.observed);
    assert!(ks.observed > 0.3);
}

/// Count moments are exact at every intensity, so the covariance check
/// holds even far below the heavy-tail desk scale.
#[test]
fn gaussian_clt_holds_at_low_intensity() {
    let cfg = GaussianCltConfig {
        lambda: 7.0,
        n_reps: 6000,
        ..GaussianCltConfig::default()
    };
    let out = gaussian_clt_check(&cfg, SEED).unwrap();
    assert!(out.pass, "checks: {:?}", out.checks);
}

/// Heavy-tailed Pareto marks with a finite fractional moment still satisfy
/// the additive limit at the default tolerances.
#[test]
fn additive_check_passes_with_pareto_marks() {
    let cfg = AdditiveLimitConfig {
        marks: MarkDistribution::Pareto { scale: 1.0, shape: 3.0 },
        lambda_list: vec![1e3],
        t_grid: vec![0.1, 0.5],
        n_reps: 4000,
        ..AdditiveLimitConfig::default()
    };
    let out = additive_limit_check(&cfg, SEED).unwrap();
    assert!(out.pass, "checks: {:?}", out.checks);
}

/// Custom joint thresholds are honored and reported.
#[test]
fn extremal_joint_thresholds_are_configurable() {
    let cfg = ExtremalLimitConfig {
        lambda: 1e3,
        n_reps: 3000,
        joint_t: Some(vec![2.0, 5.0]),
        ..ExtremalLimitConfig::default()
    };
    let out = extremal_limit_check(&cfg, SEED).unwrap();
    assert!(out.pass, "checks: {:?}", out.checks);
    let rows = out.rows_json.as_array().unwrap();
    assert_eq!(rows.len(), cfg.probes.len() + 1);
    // the joint row reports the probability at the custom thresholds
    let joint = rows.last().unwrap();
    assert!(joint["theoretical"].as_f64().unwrap() > 0.0);
}

/// Worker-count determinism for the remaining artifact-producing drivers
/// (the acceptance gate covers the additive, SIR, and chain summaries).
#[test]
fn summaries_are_worker_count_invariant() {
    let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let pool3 = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let configs = vec![
        CommandParams::JointLimit(JointLimitConfig {
            lambda_list: vec![40.0],
            n_reps: 400,
            ..JointLimitConfig::default()
        }),
        CommandParams::ExtremalLimit(ExtremalLimitConfig {
            lambda: 100.0,
            n_reps: 400,
            ks_tol: 1.0,
            ..ExtremalLimitConfig::default()
        }),
        CommandParams::GaussianClt(GaussianCltConfig {
            lambda: 25.0,
            n_reps: 500,
            ..GaussianCltConfig::default()
        }),
        CommandParams::Percolation(PercolationConfig {
            lattice_size: 12,
            lambda_list: vec![1.0, 4.0],
            n_reps: 50,
            ..PercolationConfig::default()
        }),
    ];
    for params in configs {
        let config = RunConfig { seed: SEED, out_dir: None, params };
        let summarize = |pool: &rayon::ThreadPool| {
            pool.install(|| snlab::runner::run(&config))
                .unwrap()
                .summary
                .to_json_pretty()
                .unwrap()
        };
        assert_eq!(
            summarize(&pool1),
            summarize(&pool3),
            "summary bytes differ for {}",
            config.command()
        );
    }
}
