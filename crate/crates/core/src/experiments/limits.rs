//! Drivers that verify the distributional limits of rescaled shot-noise
//! fields: marginal and joint Laplace transforms against the one-sided stable
//! law, extremal fields against the Fréchet law, and centered indicator
//! counts against the Gaussian covariance structure.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::par_replications;
use crate::experiments::report::{csv_float, csv_table, Check, ExperimentOutput};
use crate::field::{plan_truncation, sample_scaled_field, FieldKind};
use crate::limits::{FrechetLimit, StableLimit};
use crate::point_process::{sample_ppp, MarkDistribution, Window};
use crate::response::ResponseSpec;
use crate::stats::{
    covariance_se, empirical_joint_lt, empirical_lt, factorization_gap, ks_distance,
    sample_mean_cov, KsResult,
};

fn default_dim() -> usize {
    2
}

fn default_marks() -> MarkDistribution {
    MarkDistribution::Deterministic { p0: 1.0 }
}

fn default_response() -> ResponseSpec {
    ResponseSpec::pure_power(4.0).expect("valid default response")
}

fn default_lambda_list() -> Vec<f64> {
    vec![1e2, 1e3, 1e4]
}

fn default_t_grid() -> Vec<f64> {
    vec![0.05, 0.1, 0.2, 0.5, 1.0]
}

fn default_n_reps() -> usize {
    10_000
}

fn default_bias_tol() -> f64 {
    0.01
}

fn default_z_max() -> f64 {
    3.0
}

fn default_eps_rel() -> f64 {
    1e-3
}

fn default_probes() -> Vec<Vec<f64>> {
    vec![vec![-2.0, 0.0], vec![2.0, 0.0]]
}

fn default_t_vector() -> Vec<f64> {
    vec![0.1, 0.1]
}

fn default_single_lambda() -> f64 {
    1e4
}

fn default_ks_tol() -> f64 {
    0.02
}

fn default_clt_lambda() -> f64 {
    1e3
}

fn default_clt_probes() -> Vec<Vec<f64>> {
    vec![vec![0.0, 0.0], vec![1.0, 0.0]]
}

fn check_lambda_list(lambda_list: &[f64]) -> Result<()> {
    if lambda_list.is_empty() {
        return Err(Error::invalid("lambda_list", f64::NAN, "must be nonempty"));
    }
    for &l in lambda_list {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::invalid("lambda_list", l, "entries must be positive and finite"));
        }
    }
    Ok(())
}

fn check_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::invalid("t_grid", f64::NAN, "must be nonempty"));
    }
    for &t in t_grid {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid("t_grid", t, "entries must be finite and >= 0"));
        }
    }
    Ok(())
}

fn check_reps(n_reps: usize) -> Result<()> {
    if n_reps < 2 {
        return Err(Error::invalid("n_reps", n_reps as f64, "must be at least 2"));
    }
    Ok(())
}

fn probe_hull_radius(probes: &[Vec<f64>]) -> f64 {
    probes
        .iter()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Tag a lambda value for use in a check name, e.g. `1e4` or `250`.
fn lambda_tag(lambda: f64) -> String {
    let log = lambda.log10();
    if log.fract() == 0.0 && lambda >= 10.0 {
        format!("1e{}", log as i64)
    } else {
        format!("{lambda}")
    }
}

/// Marginal Laplace-transform comparison for the rescaled additive field.
///
/// For each intensity, the field is sampled at the origin, rescaled by
/// `lambda^{-beta/d}`, and its empirical Laplace transform on `t_grid` is
/// compared with `exp(-eta * t^alpha)`. The absolute deviation must stay
/// within `z_max` standard errors plus `bias_tol`, and the worst deviation
/// must not grow from the smallest to the largest intensity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveLimitConfig {
    #[serde(default = "default_dim")]
    pub d: usize,
    #[serde(default = "default_response")]
    pub response: ResponseSpec,
    #[serde(default = "default_marks")]
    pub marks: MarkDistribution,
    #[serde(default = "default_lambda_list")]
    pub lambda_list: Vec<f64>,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_bias_tol")]
    pub bias_tol: f64,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
}

impl Default for AdditiveLimitConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl AdditiveLimitConfig {
    pub fn validate(&self) -> Result<()> {
        self.response.validate_for_dim(self.d)?;
        self.marks.validate()?;
        check_lambda_list(&self.lambda_list)?;
        check_t_grid(&self.t_grid)?;
        check_reps(self.n_reps)?;
        if !(self.bias_tol >= 0.0) {
            return Err(Error::invalid("bias_tol", self.bias_tol, "must be >= 0"));
        }
        if !(self.z_max > 0.0) {
            return Err(Error::invalid("z_max", self.z_max, "must be positive"));
        }
        if !(self.eps_rel > 0.0) {
            return Err(Error::invalid("eps_rel", self.eps_rel, "must be positive"));
        }
        Ok(())
    }
}

pub fn additive_limit_check(cfg: &AdditiveLimitConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let limit = StableLimit::for_power_field(cfg.d, cfg.response.beta, &cfg.marks)?;
    let kappa = cfg.response.beta / cfg.d as f64;
    let probes = vec![vec![0.0; cfg.d]];

    let mut rows_json = Vec::new();
    let mut csv_rows = Vec::new();
    let mut checks = Vec::new();
    // worst deviation per lambda plus the standard error where it occurs,
    // used for the trend comparison between the first and last intensity
    let mut worst: Vec<(f64, f64)> = Vec::new();

    for (li, &lambda) in cfg.lambda_list.iter().enumerate() {
        let eps_abs = cfg.eps_rel * limit.scale() * lambda.powf(kappa);
        let plan = plan_truncation(lambda, cfg.marks.mean(), &cfg.response, cfg.d, 0.0, eps_abs)?;
        let samples: Vec<f64> = par_replications(
            seed,
            (li * cfg.n_reps) as u64,
            cfg.n_reps,
            |rng| -> Result<f64> {
                let field = sample_scaled_field(
                    lambda,
                    &cfg.response,
                    &cfg.marks,
                    &probes,
                    FieldKind::Additive,
                    &plan,
                    rng,
                )?;
                Ok(field.values[0])
            },
        )
        .into_iter()
        .collect::<Result<_>>()?;

        let est = empirical_lt(&samples, &cfg.t_grid)?;
        let mut lambda_worst = (0.0f64, 0.0f64);
        let mut excess = f64::NEG_INFINITY;
        for i in 0..est.t.len() {
            let theo = limit.lt(est.t[i]);
            let dev = (est.estimate[i] - theo).abs();
            rows_json.push(json!({
                "lambda": lambda,
                "t": est.t[i],
                "empirical": est.estimate[i],
                "theoretical": theo,
                "std_error": est.std_error[i],
            }));
            csv_rows.push(vec![
                csv_float(lambda),
                csv_float(est.t[i]),
                csv_float(est.estimate[i]),
                csv_float(theo),
                csv_float(est.std_error[i]),
                csv_float(dev),
            ]);
            if dev > lambda_worst.0 {
                lambda_worst = (dev, est.std_error[i]);
            }
            excess = excess.max(dev - cfg.z_max * est.std_error[i]);
        }
        // one check per intensity: worst (deviation - z_max * se) over the grid
        checks.push(Check::at_most(
            format!("lt_bias_lambda_{}", lambda_tag(lambda)),
            excess,
            cfg.bias_tol,
        ));
        worst.push(lambda_worst);
    }

    if cfg.lambda_list.len() >= 2 {
        let (dev_first, se_first) = worst[0];
        let (dev_last, se_last) = worst[worst.len() - 1];
        let slack = 2.0 * (se_first * se_first + se_last * se_last).sqrt();
        checks.push(Check::at_most("deviation_trend", dev_last - dev_first, slack));
    }

    let csv = csv_table(
        &["lambda", "t", "empirical", "theoretical", "std_error", "abs_dev"],
        &csv_rows,
    );
    Ok(ExperimentOutput::new("additive-limit", json!(rows_json), csv, checks))
}

/// Joint Laplace-transform and independence check for the rescaled additive
/// field at several probes: the joint transform must match the product form
/// `exp(-eta * sum_j t_j^alpha)` and the empirical factorization gap must be
/// statistically indistinguishable from zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointLimitConfig {
    #[serde(default = "default_dim")]
    pub d: usize,
    #[serde(default = "default_response")]
    pub response: ResponseSpec,
    #[serde(default = "default_marks")]
    pub marks: MarkDistribution,
    #[serde(default = "default_probes")]
    pub probes: Vec<Vec<f64>>,
    #[serde(default = "default_t_vector")]
    pub t_vector: Vec<f64>,
    #[serde(default = "default_lambda_list")]
    pub lambda_list: Vec<f64>,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_bias_tol")]
    pub bias_tol: f64,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
}

impl Default for JointLimitConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl JointLimitConfig {
    pub fn validate(&self) -> Result<()> {
        self.response.validate_for_dim(self.d)?;
        self.marks.validate()?;
        check_lambda_list(&self.lambda_list)?;
        check_reps(self.n_reps)?;
        if self.probes.len() < 2 {
            return Err(Error::invalid(
                "probes",
                self.probes.len() as f64,
                "joint check needs at least 2 probes",
            ));
        }
        if self.t_vector.len() != self.probes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probes.len(),
                got: self.t_vector.len(),
            });
        }
        check_t_grid(&self.t_vector)?;
        if !(self.bias_tol >= 0.0) {
            return Err(Error::invalid("bias_tol", self.bias_tol, "must be >= 0"));
        }
        if !(self.z_max > 0.0) {
            return Err(Error::invalid("z_max", self.z_max, "must be positive"));
        }
        if !(self.eps_rel > 0.0) {
            return Err(Error::invalid("eps_rel", self.eps_rel, "must be positive"));
        }
        Ok(())
    }
}

pub fn joint_limit_check(cfg: &JointLimitConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let limit = StableLimit::for_power_field(cfg.d, cfg.response.beta, &cfg.marks)?;
    let kappa = cfg.response.beta / cfg.d as f64;
    let hull = probe_hull_radius(&cfg.probes);
    let k = cfg.probes.len();

    let mut rows_json = Vec::new();
    let mut csv_rows = Vec::new();
    let mut checks = Vec::new();
    let mut gaps: Vec<(f64, f64)> = Vec::new();

    for (li, &lambda) in cfg.lambda_list.iter().enumerate() {
        let eps_abs = cfg.eps_rel * limit.scale() * lambda.powf(kappa);
        let plan = plan_truncation(lambda, cfg.marks.mean(), &cfg.response, cfg.d, hull, eps_abs)?;
        let vectors: Vec<Vec<f64>> = par_replications(
            seed,
            (li * cfg.n_reps) as u64,
            cfg.n_reps,
            |rng| -> Result<Vec<f64>> {
                let field = sample_scaled_field(
                    lambda,
                    &cfg.response,
                    &cfg.marks,
                    &cfg.probes,
                    FieldKind::Additive,
                    &plan,
                    rng,
                )?;
                Ok(field.values)
            },
        )
        .into_iter()
        .collect::<Result<_>>()?;

        let (joint, joint_se) = empirical_joint_lt(&vectors, &cfg.t_vector)?;
        let theo_joint: f64 = cfg.t_vector.iter().map(|&t| limit.lt(t)).product();
        let joint_dev = (joint - theo_joint).abs();
        rows_json.push(json!({
            "lambda": lambda,
            "kind": "joint",
            "probe": null,
            "t": null,
            "empirical": joint,
            "theoretical": theo_joint,
            "std_error": joint_se,
        }));
        csv_rows.push(vec![
            csv_float(lambda),
            "joint".to_string(),
            String::new(),
            String::new(),
            csv_float(joint),
            csv_float(theo_joint),
            csv_float(joint_se),
        ]);
        checks.push(Check::at_most(
            format!("joint_bias_lambda_{}", lambda_tag(lambda)),
            joint_dev - cfg.z_max * joint_se,
            cfg.bias_tol,
        ));

        for j in 0..k {
            let column: Vec<f64> = vectors.iter().map(|v| v[j]).collect();
            let est = empirical_lt(&column, &[cfg.t_vector[j]])?;
            let theo = limit.lt(est.t[0]);
            rows_json.push(json!({
                "lambda": lambda,
                "kind": "marginal",
                "probe": j,
                "t": est.t[0],
                "empirical": est.estimate[0],
                "theoretical": theo,
                "std_error": est.std_error[0],
            }));
            csv_rows.push(vec![
                csv_float(lambda),
                "marginal".to_string(),
                format!("{j}"),
                csv_float(est.t[0]),
                csv_float(est.estimate[0]),
                csv_float(theo),
                csv_float(est.std_error[0]),
            ]);
        }

        let (gap, gap_se) = factorization_gap(&vectors, &cfg.t_vector)?;
        rows_json.push(json!({
            "lambda": lambda,
            "kind": "gap",
            "probe": null,
            "t": null,
            "empirical": gap,
            "theoretical": 0.0,
            "std_error": gap_se,
        }));
        csv_rows.push(vec![
            csv_float(lambda),
            "gap".to_string(),
            String::new(),
            String::new(),
            csv_float(gap),
            csv_float(0.0),
            csv_float(gap_se),
        ]);
        checks.push(Check::at_most(
            format!("factorization_gap_lambda_{}", lambda_tag(lambda)),
            gap - cfg.z_max * gap_se,
            cfg.bias_tol,
        ));
        gaps.push((gap, gap_se));
    }

    if gaps.len() >= 2 {
        let (gap_first, se_first) = gaps[0];
        let (gap_last, se_last) = gaps[gaps.len() - 1];
        let slack = 2.0 * (se_first * se_first + se_last * se_last).sqrt();
        checks.push(Check::at_most("gap_trend", gap_last - gap_first, slack));
    }

    let csv = csv_table(
        &["lambda", "kind", "probe", "t", "empirical", "theoretical", "std_error"],
        &csv_rows,
    );
    Ok(ExperimentOutput::new("joint-limit", json!(rows_json), csv, checks))
}

/// Distributional check for the rescaled extremal field: per-probe
/// Kolmogorov-Smirnov distance against the Frechet law, plus a joint
/// factorization check at per-probe thresholds (default: the Frechet median).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalLimitConfig {
    #[serde(default = "default_dim")]
    pub d: usize,
    #[serde(default = "default_response")]
    pub response: ResponseSpec,
    #[serde(default = "default_marks")]
    pub marks: MarkDistribution,
    #[serde(default = "default_probes")]
    pub probes: Vec<Vec<f64>>,
    #[serde(default = "default_single_lambda")]
    pub lambda: f64,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    /// Joint-CDF thresholds per probe; `None` uses the Frechet median.
    #[serde(default)]
    pub joint_t: Option<Vec<f64>>,
    #[serde(default = "default_ks_tol")]
    pub ks_tol: f64,
    #[serde(default = "default_ks_tol")]
    pub bias_tol: f64,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
}

impl Default for ExtremalLimitConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl ExtremalLimitConfig {
    pub fn validate(&self) -> Result<()> {
        self.response.validate_for_dim(self.d)?;
        self.marks.validate()?;
        check_lambda_list(std::slice::from_ref(&self.lambda))?;
        check_reps(self.n_reps)?;
        if self.probes.is_empty() {
            return Err(Error::invalid("probes", 0.0, "must be nonempty"));
        }
        if let Some(t) = &self.joint_t {
            if t.len() != self.probes.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.probes.len(),
                    got: t.len(),
                });
            }
            for &tj in t {
                if !(tj > 0.0) || !tj.is_finite() {
                    return Err(Error::invalid("joint_t", tj, "entries must be positive and finite"));
                }
            }
        }
        if !(self.ks_tol >= 0.0) {
            return Err(Error::invalid("ks_tol", self.ks_tol, "must be >= 0"));
        }
        if !(self.bias_tol >= 0.0) {
            return Err(Error::invalid("bias_tol", self.bias_tol, "must be >= 0"));
        }
        if !(self.z_max > 0.0) {
            return Err(Error::invalid("z_max", self.z_max, "must be positive"));
        }
        if !(self.eps_rel > 0.0) {
            return Err(Error::invalid("eps_rel", self.eps_rel, "must be positive"));
        }
        Ok(())
    }
}

pub fn extremal_limit_check(cfg: &ExtremalLimitConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let limit = FrechetLimit::for_power_field(cfg.d, cfg.response.beta, &cfg.marks)?;
    let alpha = cfg.d as f64 / cfg.response.beta;
    let kappa = cfg.response.beta / cfg.d as f64;
    let hull = probe_hull_radius(&cfg.probes);
    let k = cfg.probes.len();

    // the absolute truncation budget reuses the additive-tail bound, which
    // also bounds the extremal contribution from beyond the horizon
    let eps_abs = cfg.eps_rel * limit.gamma.powf(1.0 / alpha) * cfg.lambda.powf(kappa);
    let plan = plan_truncation(cfg.lambda, cfg.marks.mean(), &cfg.response, cfg.d, hull, eps_abs)?;

    let vectors: Vec<Vec<f64>> = par_replications(seed, 0, cfg.n_reps, |rng| -> Result<Vec<f64>> {
        let field = sample_scaled_field(
            cfg.lambda,
            &cfg.response,
            &cfg.marks,
            &cfg.probes,
            FieldKind::Extremal,
            &plan,
            rng,
        )?;
        Ok(field.values)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut rows_json = Vec::new();
    let mut csv_rows = Vec::new();
    let mut checks = Vec::new();

    for j in 0..k {
        let column: Vec<f64> = vectors.iter().map(|v| v[j]).collect();
        let ks: KsResult = ks_distance(&column, |t| limit.cdf(t))?;
        rows_json.push(json!({
            "probe": j,
            "statistic": ks.statistic,
            "critical_1pct": ks.critical_1pct,
            "tolerance": cfg.ks_tol,
        }));
        csv_rows.push(vec![
            format!("{j}"),
            csv_float(ks.statistic),
            csv_float(ks.critical_1pct),
            csv_float(cfg.ks_tol),
        ]);
        checks.push(Check::at_most(
            format!("ks_probe_{j}"),
            ks.statistic,
            ks.critical_1pct + cfg.ks_tol,
        ));
    }

    let joint_t: Vec<f64> = match &cfg.joint_t {
        Some(t) => t.clone(),
        None => vec![limit.quantile(0.5); k],
    };
    let n = vectors.len() as f64;
    let joint_hits = vectors
        .iter()
        .filter(|v| v.iter().zip(&joint_t).all(|(x, t)| x <= t))
        .count() as f64;
    let joint = joint_hits / n;
    let joint_se = (joint * (1.0 - joint) / n).sqrt();
    let theo_joint: f64 = joint_t.iter().map(|&t| limit.cdf(t)).product();
    rows_json.push(json!({
        "probe": null,
        "statistic": joint,
        "critical_1pct": null,
        "tolerance": cfg.bias_tol,
        "theoretical": theo_joint,
        "std_error": joint_se,
    }));
    checks.push(Check::at_most(
        "joint_factorization",
        (joint - theo_joint).abs() - cfg.z_max * joint_se,
        cfg.bias_tol,
    ));

    let csv = csv_table(&["probe", "ks_statistic", "critical_1pct", "tolerance"], &csv_rows);
    Ok(ExperimentOutput::new("extremal-limit", json!(rows_json), csv, checks))
}

/// Covariance check for centered, scaled unit-ball indicator counts of a
/// Poisson process: `(N(B(z,1)) - lambda*pi) / sqrt(lambda)` at two probes
/// must have mean zero and covariance equal to the lens area of the two
/// unit balls, at any intensity (the count statistics are exact).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianCltConfig {
    #[serde(default = "default_clt_lambda")]
    pub lambda: f64,
    #[serde(default = "default_clt_probes")]
    pub probes: Vec<Vec<f64>>,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
}

impl Default for GaussianCltConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl GaussianCltConfig {
    pub fn validate(&self) -> Result<()> {
        check_lambda_list(std::slice::from_ref(&self.lambda))?;
        check_reps(self.n_reps)?;
        if self.probes.len() != 2 {
            return Err(Error::invalid(
                "probes",
                self.probes.len() as f64,
                "covariance check uses exactly 2 probes",
            ));
        }
        for p in &self.probes {
            if p.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid("probes", f64::NAN, "coordinates must be finite"));
            }
        }
        if !(self.z_max > 0.0) {
            return Err(Error::invalid("z_max", self.z_max, "must be positive"));
        }
        Ok(())
    }
}

/// Area of the intersection of two unit disks with centers `delta` apart.
pub fn unit_disk_lens_area(delta: f64) -> f64 {
    assert!(delta >= 0.0, "separation must be nonnegative");
    if delta >= 2.0 {
        return 0.0;
    }
    2.0 * (delta / 2.0).acos() - (delta / 2.0) * (4.0 - delta * delta).sqrt()
}

pub fn gaussian_clt_check(cfg: &GaussianCltConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let lambda = cfg.lambda;
    let p0 = &cfg.probes[0];
    let p1 = &cfg.probes[1];
    let delta = ((p0[0] - p1[0]).powi(2) + (p0[1] - p1[1]).powi(2)).sqrt();

    // every point that can fall in either unit disk lies in this window
    let mid = vec![(p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0];
    let window = Window::ball(mid, delta / 2.0 + 1.0)?;
    let sqrt_lambda = lambda.sqrt();
    let mean_count = lambda * std::f64::consts::PI;

    let centers = [[p0[0], p0[1]], [p1[0], p1[1]]];
    let vectors: Vec<Vec<f64>> = par_replications(seed, 0, cfg.n_reps, |rng| -> Result<Vec<f64>> {
        let points = sample_ppp(lambda, &window, rng)?;
        let mut counts = [0usize; 2];
        for i in 0..points.len() {
            let p = points.point(i);
            for (c, center) in centers.iter().enumerate() {
                let dx = p[0] - center[0];
                let dy = p[1] - center[1];
                if dx * dx + dy * dy <= 1.0 {
                    counts[c] += 1;
                }
            }
        }
        Ok(vec![
            (counts[0] as f64 - mean_count) / sqrt_lambda,
            (counts[1] as f64 - mean_count) / sqrt_lambda,
        ])
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let (means, cov) = sample_mean_cov(&vectors)?;
    let n = vectors.len() as f64;

    let mut rows_json = Vec::new();
    let mut csv_rows = Vec::new();
    let mut checks = Vec::new();

    for (idx, &m) in means.iter().enumerate() {
        let se = (cov[idx][idx] / n).sqrt();
        rows_json.push(json!({
            "statistic": format!("mean_{idx}"),
            "estimate": m,
            "target": 0.0,
            "std_error": se,
        }));
        csv_rows.push(vec![
            format!("mean_{idx}"),
            csv_float(m),
            csv_float(0.0),
            csv_float(se),
        ]);
        checks.push(Check::at_most(format!("mean_{idx}"), m.abs(), cfg.z_max * se));
    }

    let pairs = [(0usize, 0usize), (0, 1), (1, 1)];
    for &(i, j) in &pairs {
        let target = if i == j {
            unit_disk_lens_area(0.0)
        } else {
            unit_disk_lens_area(delta)
        };
        let estimate = cov[i][j];
        let se = covariance_se(&vectors, &means, i, j);
        rows_json.push(json!({
            "statistic": format!("cov_{i}{j}"),
            "estimate": estimate,
            "target": target,
            "std_error": se,
        }));
        csv_rows.push(vec![
            format!("cov_{i}{j}"),
            csv_float(estimate),
            csv_float(target),
            csv_float(se),
        ]);
        checks.push(Check::at_most(
            format!("cov_{i}{j}"),
            (estimate - target).abs(),
            cfg.z_max * se,
        ));
    }

    let csv = csv_table(&["statistic", "estimate", "target", "std_error"], &csv_rows);
    Ok(ExperimentOutput::new("gaussian-clt", json!(rows_json), csv, checks))
}
