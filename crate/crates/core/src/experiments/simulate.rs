//! Plain field simulation: replicate the rescaled (or raw) field at a probe
//! set and dump every value, for exploration rather than verification.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::par_replications;
use crate::experiments::report::ExperimentOutput;
use crate::field::{plan_truncation, sample_scaled_field, write_field_csv, FieldKind, FieldSample};
use crate::limits::{FrechetLimit, StableLimit};
use crate::point_process::{sample_marked_ppp, MarkDistribution, Window};
use crate::response::ResponseSpec;
use crate::rng::{substream, RngStream, PURPOSE_REPLICATION};

fn default_dim() -> usize {
    2
}

fn default_response() -> ResponseSpec {
    ResponseSpec::pure_power(4.0).expect("valid default response")
}

fn default_marks() -> MarkDistribution {
    MarkDistribution::Deterministic { p0: 1.0 }
}

fn default_lambda() -> f64 {
    100.0
}

fn default_probes() -> Vec<Vec<f64>> {
    vec![vec![0.0, 0.0]]
}

fn default_kind() -> FieldKind {
    FieldKind::Additive
}

fn default_n_reps() -> usize {
    1000
}

fn default_eps_rel() -> f64 {
    1e-3
}

/// Replicated sampling of a shot-noise field. Rows are per-probe summaries;
/// the CSV holds every (replication, probe) value, and `dump_points` adds a
/// `points.csv` with the marked configuration of replication 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFieldConfig {
    #[serde(default = "default_dim")]
    pub d: usize,
    #[serde(default = "default_response")]
    pub response: ResponseSpec,
    #[serde(default = "default_marks")]
    pub marks: MarkDistribution,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_probes")]
    pub probes: Vec<Vec<f64>>,
    #[serde(default = "default_kind")]
    pub kind: FieldKind,
    #[serde(default = "default_n_reps")]
    pub n_reps: usize,
    #[serde(default = "default_eps_rel")]
    pub eps_rel: f64,
    #[serde(default)]
    pub dump_points: bool,
}

impl Default for SimulateFieldConfig {
    fn default() -> Self {
        serde_json::from_value(json!({})).expect("defaults are valid")
    }
}

impl SimulateFieldConfig {
    pub fn validate(&self) -> Result<()> {
        self.response.validate_for_dim(self.d)?;
        self.marks.validate()?;
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::invalid("lambda", self.lambda, "must be finite and nonnegative"));
        }
        if self.probes.is_empty() {
            return Err(Error::invalid("probes", 0.0, "must be nonempty"));
        }
        for p in &self.probes {
            if p.len() != self.d {
                return Err(Error::DimensionMismatch { expected: self.d, got: p.len() });
            }
        }
        if self.n_reps < 1 {
            return Err(Error::invalid("n_reps", 0.0, "must be at least 1"));
        }
        if !(self.eps_rel > 0.0) {
            return Err(Error::invalid("eps_rel", self.eps_rel, "must be positive"));
        }
        Ok(())
    }
}

pub fn simulate_field_run(cfg: &SimulateFieldConfig, seed: u64) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let kappa = cfg.response.beta / cfg.d as f64;
    // natural scale of the matching limit law, used for the tail budget
    let limit_scale = match cfg.kind {
        FieldKind::Additive => StableLimit::for_power_field(cfg.d, cfg.response.beta, &cfg.marks)?.scale(),
        FieldKind::Extremal => {
            let lim = FrechetLimit::for_power_field(cfg.d, cfg.response.beta, &cfg.marks)?;
            lim.gamma.powf(1.0 / lim.alpha)
        }
    };
    let eps_abs = cfg.eps_rel * limit_scale * cfg.lambda.max(1e-12).powf(kappa);
    let hull = cfg
        .probes
        .iter()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let plan = plan_truncation(cfg.lambda, cfg.marks.mean(), &cfg.response, cfg.d, hull, eps_abs)?;

    let samples: Vec<FieldSample> = par_replications(seed, 0, cfg.n_reps, |rng| {
        sample_scaled_field(cfg.lambda, &cfg.response, &cfg.marks, &cfg.probes, cfg.kind, &plan, rng)
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut rows_json = Vec::new();
    for (j, probe) in cfg.probes.iter().enumerate() {
        let mut finite_sum = 0.0;
        let mut finite_count = 0usize;
        let mut finite_max = f64::NEG_INFINITY;
        for s in &samples {
            let v = s.values[j];
            if v.is_finite() {
                finite_sum += v;
                finite_count += 1;
                finite_max = finite_max.max(v);
            }
        }
        rows_json.push(json!({
            "probe": j,
            "coordinates": probe,
            "replications": samples.len(),
            "finite_count": finite_count,
            "finite_mean": if finite_count > 0 { json!(finite_sum / finite_count as f64) } else { json!(null) },
            "finite_max": if finite_count > 0 { json!(finite_max) } else { json!(null) },
        }));
    }

    let mut csv = Vec::new();
    write_field_csv(&samples, &mut csv)?;
    let csv = String::from_utf8(csv).expect("csv is utf-8");

    let mut output = ExperimentOutput::new("simulate-field", json!(rows_json), csv, Vec::new());
    if cfg.dump_points {
        // replication 0 reuses its substream, so the dumped configuration is
        // exactly the one behind the first CSV rows
        let mut rng = RngStream::new(seed, substream(PURPOSE_REPLICATION, 0));
        let window = Window::ball(vec![0.0; cfg.d], plan.simulation_radius)?;
        let config = sample_marked_ppp(cfg.lambda, &window, &cfg.marks, &mut rng)?;
        let mut buf = Vec::new();
        config.write_points_csv(&mut buf)?;
        output
            .extra_files
            .push(("points.csv".to_string(), String::from_utf8(buf).expect("csv is utf-8")));
    }
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        SimulateFieldConfig::default().validate().unwrap();
    }

    #[test]
    fn small_run_produces_dump_and_summary() {
        let cfg = SimulateFieldConfig {
            lambda: 20.0,
            n_reps: 50,
            dump_points: true,
            ..SimulateFieldConfig::default()
        };
        let out = simulate_field_run(&cfg, 31).unwrap();
        assert!(out.pass, "no checks means pass");
        assert!(out.rows_csv.starts_with("replication,probe_index,value,scaled,kind\n"));
        assert_eq!(out.rows_csv.lines().count(), 51);
        assert_eq!(out.extra_files.len(), 1);
        assert_eq!(out.extra_files[0].0, "points.csv");
        assert!(out.extra_files[0].1.starts_with("x1,x2,mark\n"));

        let rows = out.rows_json.as_array().unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0]["replications"], 50);
    }

    #[test]
    fn point_dump_matches_first_replication() {
        // the additive field of the dumped configuration must equal the
        // first CSV value exactly
        let cfg = SimulateFieldConfig {
            lambda: 30.0,
            n_reps: 3,
            dump_points: true,
            ..SimulateFieldConfig::default()
        };
        let out = simulate_field_run(&cfg, 77).unwrap();
        let first_value: f64 = out
            .rows_csv
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(2)
            .unwrap()
            .parse()
            .unwrap();

        let mut rng = RngStream::new(77, substream(PURPOSE_REPLICATION, 0));
        let kappa = 2.0;
        let plan = plan_truncation(
            30.0,
            1.0,
            &cfg.response,
            2,
            0.0,
            cfg.eps_rel * StableLimit::for_power_field(2, 4.0, &cfg.marks).unwrap().scale() * 30.0f64.powf(kappa),
        )
        .unwrap();
        let field = sample_scaled_field(
            30.0,
            &cfg.response,
            &cfg.marks,
            &cfg.probes,
            FieldKind::Additive,
            &plan,
            &mut rng,
        )
        .unwrap();
        assert_eq!(field.values[0], first_value);
    }

    #[test]
    fn extremal_kind_runs() {
        let cfg = SimulateFieldConfig {
            kind: FieldKind::Extremal,
            lambda: 15.0,
            n_reps: 10,
            ..SimulateFieldConfig::default()
        };
        let out = simulate_field_run(&cfg, 5).unwrap();
        assert!(out.rows_csv.contains("extremal"));
    }
}
