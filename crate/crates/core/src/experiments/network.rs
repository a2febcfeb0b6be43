//! Wireless-network consequences of the stable interference limit: SIR tail
//! probabilities under the matched threshold scaling, joint SINR feasibility
//! along a relay chain with a product lower bound, and site percolation of a
//! lattice whose links must beat an SINR threshold.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::par_replications;
use crate::experiments::report::{csv_float, csv_table, Check, ExperimentOutput};
use crate::field::plan_truncation;
use crate::limits::{sample_one_sided_stable, StableLimit};
use crate::point_process::{sample_marks, sample_ppp, MarkDistribution, PointConfiguration, Window};
use crate::response::{ResponseKind, ResponseSpec};
use crate::rng::{substream, RngStream, PURPOSE_ORACLE};
use crate::stats::mean_and_se;
use crate::unionfind::UnionFind;

/// Receiver-side noise power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseDistribution {
    Zero,
    Deterministic { value: f64 },
    Exponential { mean: f64 },
}

impl NoiseDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseDistribution::Zero => Ok(()),
            NoiseDistribution::Deterministic { value } => {
                if !(value.is_finite() && value >= 0.0) {
                    return Err(Error::invalid("value", value, "must be finite and nonnegative"));
                }
                Ok(())
            }
            NoiseDistribution::Exponential { mean } => {
                if !(mean.is_finite() && mean > 0.0) {
                    return Err(Error::invalid("mean", mean, "must be finite and positive"));
                }
                Ok(())
            }
        }
    }

    /// P(W <= x).
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            NoiseDistribution::Zero => {
                if x >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            NoiseDistribution::Deterministic { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
            NoiseDistribution::Exponential { mean } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-x / mean).exp()
                }
            }
        }
    }

    /// Draw `n` i.i.d. noise values. The degenerate kinds consume no
    /// randomness, so stream layouts stay stable within a configuration.
    pub fn sample_many<R: rand::Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        match *self {
            NoiseDistribution::Zero => Ok(vec![0.0; n]),
            NoiseDistribution::Deterministic { value } => Ok(vec![value; n]),
            NoiseDistribution::Exponential { mean } => {
                sample_marks(&MarkDistribution::Exponential { mean }, n, rng)
            }
        }
    }
}

fn default_beta() -> f64 {
    4.0
}

fn default_unit_mark() -> MarkDistribution {
    MarkDistribution::Deterministic { p0: 1.0 }
}

fn default_exp_mark() -> MarkDistribution {
    MarkDistribution::Exponential { mean: 1.0 }
}

fn default_zero_noise() -> NoiseDistribution {
    NoiseDistribution::Zero
}

fn default_sir_c() -> f64 {
    0.01
}

fn default_sir_lambda_list() -> Vec<f64> {
    vec![1e2, 1e4]
}

fn default_n_reps() -> usize {
    10_000
}

fn default_oracle_draws() -> usize {
    200_000
}

fn default_network_bias_tol() -> f64 {
    0.02
}

fn default_z_max() -> f64 {
    3.0
}

fn default_eps_rel() -> f64 {
    1e-3
}

fn default_chain_k() -> usize {
    3
}

fn default_spacing() -> f64 {
    1.0
}

fn default_chain_lambda() -> f64 {
    1e3
}

fn default_c_list() -> Vec<f64> {
    vec![1.0, 0.1, 0.01, 1e-3, 1e-4]
}

fn default_final_target() -> f64 {
    0.9
}

fn default_lattice_size() -> usize {
    50
}

fn default_percolation_response() -> ResponseSpec {
    ResponseSpec::compact_power(4.0, 1.5).expect("valid default response")
}

fn default_percolation_lambda_list() -> Vec<f64> {
    vec![1.0, 4.0, 16.0]
}

fn default_percolation_c_list() -> Vec<f64> {
    vec![0.1, 0.01, 1e-3, 1e-4]
}

fn default_percolation_reps() -> usize {
    100
}

fn default_phase_high() -> f64 {
    0.8
}

fn default_phase_low() -> f64 {
    0.2
}

/// Tag a value for use in check names: exact powers of ten get scientific
/// form (`1e4`, `1e-3`), everything else prints plainly.
fn value_tag(x: f64) -> String {
    let log = x.log10();
    let rounded = log.round();
    if x > 0.0 && (log - rounded).abs() < 1e-9 && rounded.abs() >= 2.0 {
        format!("1e{}", rounded as i64)
    } else {
        format!("{x}")
    }
}

fn check_positive_list(field: &'static str, list: &[f64]) -> Result<()> {
    if list.is_empty() {
        return Err(Error::invalid(field, f64::NAN, "must be nonempty"));
    }
    for &x in list {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::invalid(field, x, "entries must be positive and finite"));
        }
    }
    Ok(())
}

fn check_strictly_decreasing(field: &'static str, list: &[f64]) -> Result<()> {
    for w in list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::invalid(field, w[1], "entries must be strictly decreasing"));
        }
    }
    Ok(())
}

/// Success probability of a single link at the matched threshold scaling.
///
/// A receiver at the origin listens to a transmitter at unit distance while
/// interferers form a Poisson process of intensity `lambda^2` with transmit
/// powers drawn from `fading`. The event `SIR >= c * lambda^{-beta}` equals
/// `F >= c * Ihat` where `Ihat` is the rescaled interference, so its
/// probability stabilizes as `lambda` grows; the stable-law prediction
/// `P(F >= c * xi)` is evaluated by an independent sampler of the limit law
/// and reported in the `bound` column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirConfig {
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Distribution of interferer powers and of the tagged-link gain.
    #[serde(default = "default_unit_mark")]
    pub fading: MarkDistribution,
    #[serde(default = "default_sir_c")]
    pub c: f64,
    /// Distance-scale parameters; interferer intensity is `lambda^2`.
    #[serde(default = "default_sir_lambda_list")]
    pub lambda_list: Vec<f64>,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_oracle_draws")]
    pub oracle_draws: usize,
    #[serde(default = "default_network_bias_tol")]
    pub bias_tol: f64,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
}

impl Default for SirConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl SirConfig {
    pub fn validate(&self) -> Result<()> {
        ResponseSpec::pure_power(self.beta)?.validate_for_dim(2)?;
        self.fading.validate()?;
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::invalid("c", self.c, "must be positive and finite"));
        }
        check_positive_list("lambda_list", &self.lambda_list)?;
        if self.n_reps < 2 {
            return Err(Error::invalid("n_reps", self.n_reps as f64, "must be at least 2"));
        }
        if self.oracle_draws < 2 {
            return Err(Error::invalid(
                "oracle_draws",
                self.oracle_draws as f64,
                "must be at least 2",
            ));
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

/// Stable-law prediction P(F >= c * xi) by direct sampling of the limit law.
fn sir_oracle(
    limit: &StableLimit,
    fading: &MarkDistribution,
    c: f64,
    draws: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut rng = RngStream::new(seed, substream(PURPOSE_ORACLE, 0));
    let mut hits = Vec::with_capacity(draws);
    for _ in 0..draws {
        let xi = sample_one_sided_stable(limit.alpha, limit.eta, &mut rng)?;
        let f = fading.sample_one(&mut rng)?;
        hits.push(if f >= c * xi { 1.0 } else { 0.0 });
    }
    Ok(mean_and_se(&hits))
}

pub fn sir_tail_check(cfg: &SirConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let response = ResponseSpec::pure_power(cfg.beta)?;
    let limit = StableLimit::for_power_field(2, cfg.beta, &cfg.fading)?;
    let kappa = cfg.beta / 2.0;
    let probes = vec![vec![0.0, 0.0]];

    let (oracle, oracle_se) = sir_oracle(&limit, &cfg.fading, cfg.c, cfg.oracle_draws, seed)?;

    let mut rows_json = Vec::new();
    let mut csv_rows = Vec::new();
    let mut checks = Vec::new();
    let mut estimates: Vec<(f64, f64)> = Vec::new();

    for (li, &lambda) in cfg.lambda_list.iter().enumerate() {
        let intensity = lambda * lambda;
        let eps_abs = cfg.eps_rel * limit.scale() * intensity.powf(kappa);
        let plan = plan_truncation(intensity, cfg.fading.mean(), &response, 2, 0.0, eps_abs)?;
        let hits: Vec<f64> = par_replications(
            seed,
            (li * cfg.n_reps) as u64,
            cfg.n_reps,
            |rng| -> Result<f64> {
                let field = crate::field::sample_scaled_field(
                    intensity,
                    &response,
                    &cfg.fading,
                    &probes,
                    crate::field::FieldKind::Additive,
                    &plan,
                    rng,
                )?;
                let gain = cfg.fading.sample_one(rng)?;
                Ok(if gain >= cfg.c * field.values[0] { 1.0 } else { 0.0 })
            },
        )
        .into_iter()
        .collect::<Result<_>>()?;

        let (est, se) = mean_and_se(&hits);
        rows_json.push(json!({
            "lambda": lambda,
            "c": cfg.c,
            "estimate": est,
            "se": se,
            "bound": oracle,
        }));
        csv_rows.push(vec![
            csv_float(lambda),
            csv_float(cfg.c),
            csv_float(est),
            csv_float(se),
            csv_float(oracle),
        ]);
        let comb = (se * se + oracle_se * oracle_se).sqrt();
        checks.push(Check::at_most(
            format!("oracle_match_lambda_{}", value_tag(lambda)),
            (est - oracle).abs(),
            cfg.z_max * comb + cfg.bias_tol,
        ));
        estimates.push((est, se));
    }

    if estimates.len() >= 2 {
        let (est_first, se_first) = estimates[0];
        let (est_last, se_last) = estimates[estimates.len() - 1];
        let comb = (se_first * se_first + se_last * se_last).sqrt();
        checks.push(Check::at_most(
            "stabilization",
            (est_last - est_first).abs(),
            cfg.z_max * comb + cfg.bias_tol,
        ));
    }

    let csv = csv_table(&["lambda", "c", "estimate", "se", "bound"], &csv_rows);
    Ok(ExperimentOutput::new("sir-tail", json!(rows_json), csv, checks))
}

/// Joint SINR feasibility along a relay chain of `k` nodes at fixed spacing,
/// swept over a strictly decreasing list of threshold factors `c`.
///
/// All receivers see the same interferer locations with fresh per-receiver
/// marks, marks, noise, and link gains drawn from one realization, so the
/// success curve is exactly monotone in `c`. The product bound
/// `[P(xi < gain/(2 sqrt(c))) P(F >= sqrt(c)) P(W <= lambda^kappa gain/(2 sqrt(c)))]^(k-1)`
/// must lie below the estimate, and the final sweep entry must reach
/// `final_target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Distribution of interferer marks and of the per-link gains.
    #[serde(default = "default_unit_mark")]
    pub fading: MarkDistribution,
    #[serde(default = "default_zero_noise")]
    pub noise: NoiseDistribution,
    /// Number of chain nodes; there are `k - 1` links.
    #[serde(default = "default_chain_k")]
    pub k: usize,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default = "default_chain_lambda")]
    pub lambda: f64,
    #[serde(default = "default_c_list")]
    pub c_list: Vec<f64>,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_oracle_draws")]
    pub oracle_draws: usize,
    #[serde(default = "default_final_target")]
    pub final_target: f64,
    #[serde(default = "default_network_bias_tol")]
    pub bias_tol: f64,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        ResponseSpec::pure_power(self.beta)?.validate_for_dim(2)?;
        self.fading.validate()?;
        self.noise.validate()?;
        if self.k < 2 {
            return Err(Error::invalid("k", self.k as f64, "a chain needs at least 2 nodes"));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::invalid("spacing", self.spacing, "must be positive and finite"));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid("lambda", self.lambda, "must be positive and finite"));
        }
        check_positive_list("c_list", &self.c_list)?;
        check_strictly_decreasing("c_list", &self.c_list)?;
        if self.n_reps < 2 {
            return Err(Error::invalid("n_reps", self.n_reps as f64, "must be at least 2"));
        }
        if self.oracle_draws < 2 {
            return Err(Error::invalid(
                "oracle_draws",
                self.oracle_draws as f64,
                "must be at least 2",
            ));
        }
        if !(0.0..=1.0).contains(&self.final_target) {
            return Err(Error::invalid("final_target", self.final_target, "must lie in [0, 1]"));
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

/// Per-link threshold factors `c*` of one chain realization: link `j`
/// succeeds at factor `c` iff `cstars[j] >= c`, and the chain succeeds iff
/// the minimum does.
fn chain_link_cstars(
    cfg: &ChainConfig,
    response: &ResponseSpec,
    probes: &[Vec<f64>],
    plan: &crate::field::TruncationPlan,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let links = cfg.k - 1;
    let window = Window::ball(vec![0.0, 0.0], plan.simulation_radius)?;
    let points = sample_ppp(cfg.lambda, &window, rng)?;
    let lam_neg_kappa = cfg.lambda.powf(-cfg.beta / 2.0);
    let ell_s = response.eval(cfg.spacing);

    // fresh marks per receiver over the shared locations
    let mut ihat = vec![0.0; links];
    for (j, probe) in probes.iter().enumerate() {
        let marks = sample_marks(&cfg.fading, points.len(), rng)?;
        let mut raw = 0.0;
        for (i, &m) in marks.iter().enumerate() {
            let p = points.point(i);
            let dx = p[0] - probe[0];
            let dy = p[1] - probe[1];
            raw += m * response.eval((dx * dx + dy * dy).sqrt());
        }
        ihat[j] = if raw == 0.0 { 0.0 } else { raw * lam_neg_kappa };
    }

    let noise = cfg.noise.sample_many(links, rng)?;
    let gains = sample_marks(&cfg.fading, links, rng)?;

    let mut cstars = Vec::with_capacity(links);
    for j in 0..links {
        let noise_term = if noise[j] == 0.0 { 0.0 } else { noise[j] * lam_neg_kappa };
        let denom = noise_term + ihat[j];
        cstars.push(if denom == 0.0 {
            f64::INFINITY
        } else {
            gains[j] * ell_s / denom
        });
    }
    Ok(cstars)
}

pub fn sinr_chain_check(cfg: &ChainConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let response = ResponseSpec::pure_power(cfg.beta)?;
    let limit = StableLimit::for_power_field(2, cfg.beta, &cfg.fading)?;
    let kappa = cfg.beta / 2.0;
    let links = cfg.k - 1;
    let ell_s = response.eval(cfg.spacing);

    // receivers sit at j * spacing for j = 1..k-1; recentering them around
    // their centroid shrinks the simulation window
    let center = cfg.spacing * cfg.k as f64 / 2.0;
    let probes: Vec<Vec<f64>> = (1..cfg.k)
        .map(|j| vec![j as f64 * cfg.spacing - center, 0.0])
        .collect();
    let hull = probes
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
        .fold(0.0, f64::max);

    let eps_abs = cfg.eps_rel * limit.scale() * cfg.lambda.powf(kappa);
    let plan = plan_truncation(cfg.lambda, cfg.fading.mean(), &response, 2, hull, eps_abs)?;

    let chain_cstars: Vec<f64> = par_replications(seed, 0, cfg.n_reps, |rng| -> Result<f64> {
        let cstars = chain_link_cstars(cfg, &response, &probes, &plan, rng)?;
        Ok(cstars.into_iter().fold(f64::INFINITY, f64::min))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    // limit-law draws shared across the sweep, so the bound is monotone too
    let mut oracle_rng = RngStream::new(seed, substream(PURPOSE_ORACLE, 0));
    let mut xi = Vec::with_capacity(cfg.oracle_draws);
    for _ in 0..cfg.oracle_draws {
        xi.push(sample_one_sided_stable(limit.alpha, limit.eta, &mut oracle_rng)?);
    }

    let n = chain_cstars.len() as f64;
    let draws = xi.len() as f64;
    let mut rows_json = Vec::new();
    let mut csv_rows = Vec::new();
    let mut checks = Vec::new();
    let mut estimates = Vec::new();

    for &c in &cfg.c_list {
        let hits = chain_cstars.iter().filter(|&&v| v >= c).count() as f64;
        let est = hits / n;
        let se = (est * (1.0 - est) / n).sqrt();

        let sqrt_c = c.sqrt();
        let xi_cut = ell_s / (2.0 * sqrt_c);
        let xi_frac = xi.iter().filter(|&&v| v < xi_cut).count() as f64 / draws;
        let xi_se = (xi_frac * (1.0 - xi_frac) / draws).sqrt();
        let surv = cfg.fading.survival_geq(sqrt_c);
        let wcdf = cfg.noise.cdf(cfg.lambda.powf(kappa) * xi_cut);
        let base = xi_frac * surv * wcdf;
        let bound = base.powi(links as i32);
        let bound_se = links as f64 * base.powi(links as i32 - 1).max(0.0) * surv * wcdf * xi_se;

        rows_json.push(json!({
            "lambda": cfg.lambda,
            "c": c,
            "estimate": est,
            "se": se,
            "bound": bound,
        }));
        csv_rows.push(vec![
            csv_float(cfg.lambda),
            csv_float(c),
            csv_float(est),
            csv_float(se),
            csv_float(bound),
        ]);
        let comb = (se * se + bound_se * bound_se).sqrt();
        checks.push(Check::at_most(
            format!("lower_bound_c_{}", value_tag(c)),
            bound - est,
            cfg.z_max * comb + cfg.bias_tol,
        ));
        estimates.push(est);
    }

    if estimates.len() >= 2 {
        let min_step = estimates
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::at_least("success_monotone", min_step, 0.0));
    }
    checks.push(Check::at_least(
        "final_success",
        *estimates.last().expect("nonempty c_list"),
        cfg.final_target,
    ));

    let csv = csv_table(&["lambda", "c", "estimate", "se", "bound"], &csv_rows);
    Ok(ExperimentOutput::new("sinr-chain", json!(rows_json), csv, checks))
}

/// Site percolation of an L x L unit lattice under an SINR rule: a site is
/// occupied at factor `c` when each of its four incident edge fadings `g`
/// satisfies `g * f(1) >= c * (lambda^{-kappa} W + Ihat)`. Interference
/// marks are shared across sites, edge fadings are shared by neighboring
/// sites, and the threshold sweep reuses one realization per replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PercolationConfig {
    #[serde(default = "default_lattice_size")]
    pub lattice_size: usize,
    /// Compactly supported response with `rho >= 1`, so unit edges have a
    /// positive gain and interference has finite range.
    #[serde(default = "default_percolation_response")]
    pub response: ResponseSpec,
    #[serde(default = "default_percolation_lambda_list")]
    pub lambda_list: Vec<f64>,
    #[serde(default = "default_percolation_c_list")]
    pub c_list: Vec<f64>,
    /// Edge-fading distribution.
    #[serde(default = "default_exp_mark")]
    pub fading: MarkDistribution,
    /// Interferer mark distribution; defaults to `fading`.
    #[serde(default)]
    pub marks: Option<MarkDistribution>,
    #[serde(default = "default_zero_noise")]
    pub noise: NoiseDistribution,
    #[serde(default = "default_percolation_reps")]
    pub n_reps: usize,
    #[serde(default = "default_phase_high")]
    pub phase_high: f64,
    #[serde(default = "default_phase_low")]
    pub phase_low: f64,
}

impl Default for PercolationConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl PercolationConfig {
    pub fn validate(&self) -> Result<()> {
        self.response.validate_for_dim(2)?;
        if self.response.kind != ResponseKind::CompactPower {
            return Err(Error::Domain {
                op: "percolation",
                detail: "requires a compactly supported response".into(),
            });
        }
        if self.response.rho < 1.0 {
            return Err(Error::invalid(
                "response.rho",
                self.response.rho,
                "must be >= 1 so unit edges lie inside the support",
            ));
        }
        if self.lattice_size < 1 {
            return Err(Error::invalid("lattice_size", 0.0, "must be at least 1"));
        }
        if self.lambda_list.is_empty() {
            return Err(Error::invalid("lambda_list", f64::NAN, "must be nonempty"));
        }
        for &l in &self.lambda_list {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::invalid("lambda_list", l, "entries must be finite and >= 0"));
            }
        }
        check_positive_list("c_list", &self.c_list)?;
        check_strictly_decreasing("c_list", &self.c_list)?;
        self.fading.validate()?;
        if let Some(m) = &self.marks {
            m.validate()?;
        }
        self.noise.validate()?;
        if self.n_reps < 2 {
            return Err(Error::invalid("n_reps", self.n_reps as f64, "must be at least 2"));
        }
        for (name, v) in [("phase_high", self.phase_high), ("phase_low", self.phase_low)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(name, v, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Per-site threshold factors of one lattice realization: site `idx` is
/// occupied at factor `c` iff `cstar[idx] >= c`.
#[derive(Debug, Clone, PartialEq)]
pub struct CstarGrid {
    pub lattice_size: usize,
    pub cstar: Vec<f64>,
}

/// Interference at every lattice site from a compactly supported response:
/// each point is scattered onto the sites within its support radius.
fn lattice_interference(
    points: &PointConfiguration,
    marks: &[f64],
    response: &ResponseSpec,
    l: usize,
) -> Vec<f64> {
    let rho = response.support_radius().expect("compact response");
    let last = (l - 1) as f64;
    let mut field = vec![0.0; l * l];
    for i in 0..points.len() {
        let p = points.point(i);
        let (x, y) = (p[0], p[1]);
        if x + rho < 0.0 || x - rho > last || y + rho < 0.0 || y - rho > last {
            continue;
        }
        let ix_lo = (x - rho).ceil().max(0.0) as usize;
        let ix_hi = (x + rho).floor().min(last) as usize;
        let iy_lo = (y - rho).ceil().max(0.0) as usize;
        let iy_hi = (y + rho).floor().min(last) as usize;
        for iy in iy_lo..=iy_hi {
            for ix in ix_lo..=ix_hi {
                let dx = x - ix as f64;
                let dy = y - iy as f64;
                let v = response.eval((dx * dx + dy * dy).sqrt());
                if v > 0.0 {
                    field[iy * l + ix] += marks[i] * v;
                }
            }
        }
    }
    field
}

/// Minimum incident edge fading per site. Horizontal edge `(iy, ex)` joins
/// sites `(ex-1, iy)` and `(ex, iy)` (boundary stubs included), vertical
/// edge `(ey, ix)` joins `(ix, ey-1)` and `(ix, ey)`, so neighbors share
/// the fading of their common edge.
fn site_min_fadings(h: &[f64], v: &[f64], l: usize) -> Vec<f64> {
    debug_assert_eq!(h.len(), l * (l + 1));
    debug_assert_eq!(v.len(), l * (l + 1));
    let mut min_g = vec![0.0; l * l];
    for iy in 0..l {
        for ix in 0..l {
            min_g[iy * l + ix] = h[iy * (l + 1) + ix]
                .min(h[iy * (l + 1) + ix + 1])
                .min(v[iy * l + ix])
                .min(v[(iy + 1) * l + ix]);
        }
    }
    min_g
}

/// One lattice realization. Draw order: interferer locations, their marks,
/// horizontal fadings, vertical fadings, per-site noise.
pub fn percolation_cstar_grid(
    cfg: &PercolationConfig,
    lambda: f64,
    rng: &mut RngStream,
) -> Result<CstarGrid> {
    let l = cfg.lattice_size;
    let rho = cfg.response.support_radius().ok_or(Error::Domain {
        op: "percolation",
        detail: "requires a compactly supported response".into(),
    })?;
    let lo = -rho;
    let hi = (l - 1) as f64 + rho;
    let window = Window::bounding_box(vec![lo, lo], vec![hi, hi])?;
    let points = sample_ppp(lambda, &window, rng)?;
    let marks_dist = cfg.marks.as_ref().unwrap_or(&cfg.fading);
    let marks = sample_marks(marks_dist, points.len(), rng)?;
    let interference = lattice_interference(&points, &marks, &cfg.response, l);

    let h = sample_marks(&cfg.fading, l * (l + 1), rng)?;
    let v = sample_marks(&cfg.fading, l * (l + 1), rng)?;
    let min_g = site_min_fadings(&h, &v, l);
    let noise = cfg.noise.sample_many(l * l, rng)?;

    let kappa = cfg.response.beta / 2.0;
    let lam_neg_kappa = lambda.powf(-kappa);
    let f1 = cfg.response.eval(1.0);
    let mut cstar = vec![0.0; l * l];
    for idx in 0..l * l {
        let noise_term = if noise[idx] == 0.0 { 0.0 } else { noise[idx] * lam_neg_kappa };
        let raw = interference[idx];
        let ihat = if raw == 0.0 { 0.0 } else { raw * lam_neg_kappa };
        let denom = noise_term + ihat;
        cstar[idx] = if denom == 0.0 {
            f64::INFINITY
        } else {
            f1 * min_g[idx] / denom
        };
    }
    Ok(CstarGrid { lattice_size: l, cstar })
}

pub fn occupied_from_cstar(grid: &CstarGrid, c: f64) -> Vec<bool> {
    grid.cstar.iter().map(|&v| v >= c).collect()
}

/// Connectivity summary of one occupied configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeClusters {
    pub occupied_count: usize,
    /// Some occupied cluster touches both the left and right columns.
    pub crossing: bool,
    /// Size of the cluster containing the center site (0 if unoccupied).
    pub origin_cluster_size: usize,
    /// The center cluster touches the lattice boundary.
    pub origin_touches_boundary: bool,
}

pub fn analyze_occupied(occupied: &[bool], l: usize) -> Result<LatticeClusters> {
    if occupied.len() != l * l {
        return Err(Error::DimensionMismatch {
            expected: l * l,
            got: occupied.len(),
        });
    }
    let mut uf = UnionFind::new(l * l);
    for iy in 0..l {
        for ix in 0..l {
            let idx = iy * l + ix;
            if !occupied[idx] {
                continue;
            }
            if ix + 1 < l && occupied[idx + 1] {
                uf.union(idx, idx + 1);
            }
            if iy + 1 < l && occupied[idx + l] {
                uf.union(idx, idx + l);
            }
        }
    }

    let mut left_roots = vec![false; l * l];
    for iy in 0..l {
        let idx = iy * l;
        if occupied[idx] {
            let root = uf.find(idx);
            left_roots[root] = true;
        }
    }
    let mut crossing = false;
    for iy in 0..l {
        let idx = iy * l + (l - 1);
        if occupied[idx] && left_roots[uf.find(idx)] {
            crossing = true;
            break;
        }
    }

    let center = (l / 2) * l + l / 2;
    let (origin_cluster_size, origin_touches_boundary) = if occupied[center] {
        let root = uf.find(center);
        let size = uf.component_size(center);
        let mut touches = false;
        'outer: for iy in 0..l {
            for ix in 0..l {
                if iy == 0 || iy == l - 1 || ix == 0 || ix == l - 1 {
                    let idx = iy * l + ix;
                    if occupied[idx] && uf.find(idx) == root {
                        touches = true;
                        break 'outer;
                    }
                }
            }
        }
        (size, touches)
    } else {
        (0, false)
    };

    Ok(LatticeClusters {
        occupied_count: occupied.iter().filter(|&&o| o).count(),
        crossing,
        origin_cluster_size,
        origin_touches_boundary,
    })
}

pub fn percolation_sweep(cfg: &PercolationConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let l = cfg.lattice_size;
    let sites = (l * l) as f64;

    let mut rows_json = Vec::new();
    let mut csv_rows = Vec::new();
    let mut checks = Vec::new();
    let mut all_crossing_freqs = Vec::new();

    for (li, &lambda) in cfg.lambda_list.iter().enumerate() {
        let grids: Vec<CstarGrid> = par_replications(
            seed,
            (li * cfg.n_reps) as u64,
            cfg.n_reps,
            |rng| percolation_cstar_grid(cfg, lambda, rng),
        )
        .into_iter()
        .collect::<Result<_>>()?;

        let mut occ_series = Vec::new();
        let mut crossing_series = Vec::new();
        for &c in &cfg.c_list {
            let mut fractions = Vec::with_capacity(grids.len());
            let mut crossings = 0usize;
            let mut origin_sizes = 0usize;
            for grid in &grids {
                let occupied = occupied_from_cstar(grid, c);
                let clusters = analyze_occupied(&occupied, l)?;
                fractions.push(clusters.occupied_count as f64 / sites);
                if clusters.crossing {
                    crossings += 1;
                }
                origin_sizes += clusters.origin_cluster_size;
            }
            let (p_hat, p_hat_se) = mean_and_se(&fractions);
            let crossing_freq = crossings as f64 / grids.len() as f64;
            let mean_origin_cluster = origin_sizes as f64 / grids.len() as f64;
            rows_json.push(json!({
                "lambda": lambda,
                "c": c,
                "p_hat": p_hat,
                "p_hat_se": p_hat_se,
                "crossing_freq": crossing_freq,
                "mean_origin_cluster": mean_origin_cluster,
            }));
            csv_rows.push(vec![
                csv_float(lambda),
                csv_float(c),
                csv_float(p_hat),
                csv_float(p_hat_se),
                csv_float(crossing_freq),
                csv_float(mean_origin_cluster),
            ]);
            occ_series.push(p_hat);
            crossing_series.push(crossing_freq);
            all_crossing_freqs.push(crossing_freq);
        }

        // one realization serves the whole sweep, so monotonicity in c is
        // exact, not statistical
        if occ_series.len() >= 2 {
            let min_occ_step = occ_series
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            checks.push(Check::at_least(
                format!("occupation_monotone_lambda_{}", value_tag(lambda)),
                min_occ_step,
                0.0,
            ));
            let min_cross_step = crossing_series
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            checks.push(Check::at_least(
                format!("crossing_monotone_lambda_{}", value_tag(lambda)),
                min_cross_step,
                0.0,
            ));
        }
    }

    let max_freq = all_crossing_freqs.iter().copied().fold(0.0, f64::max);
    let min_freq = all_crossing_freqs.iter().copied().fold(1.0, f64::min);
    checks.push(Check::at_least("crossing_phase_high", max_freq, cfg.phase_high));
    checks.push(Check::at_most("crossing_phase_low", min_freq, cfg.phase_low));

    let csv = csv_table(
        &["lambda", "c", "p_hat", "p_hat_se", "crossing_freq", "mean_origin_cluster"],
        &csv_rows,
    );
    Ok(ExperimentOutput::new("percolation", json!(rows_json), csv, checks))
}
