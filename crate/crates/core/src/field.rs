//! Additive and extremal shot-noise fields over marked configurations, the
//! lambda^-kappa rescaling, and truncation planning for "infinite" windows.
//!
//! Truncation is budgeted in expectation: the simulation radius is the
//! smallest R whose omitted additive contribution at any probe is at most
//! eps_abs. The extremal field reuses the additive budget (Markov bounds the
//! chance an omitted point changes a maximum).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point_process::{sample_marked_ppp, MarkDistribution, MarkedConfiguration, Window};
use crate::response::{ResponseKind, ResponseSpec};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Additive,
    Extremal,
}

impl FieldKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FieldKind::Additive => "additive",
            FieldKind::Extremal => "extremal",
        }
    }
}

/// Field values at a set of probes for one realization. `kappa = beta/d`
/// is the scaling exponent; `scaled` records whether values carry the
/// lambda^-kappa factor already.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub probes: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub lambda: f64,
    pub kappa: f64,
    pub scaled: bool,
    pub kind: FieldKind,
}

fn check_probes(probes: &[Vec<f64>], dim: usize) -> Result<()> {
    if probes.is_empty() {
        return Err(Error::EmptySample("field evaluation probes"));
    }
    for p in probes {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
    }
    for i in 0..probes.len() {
        for j in i + 1..probes.len() {
            if probes[i] == probes[j] {
                return Err(Error::Domain {
                    op: "field evaluation",
                    detail: format!("duplicate probe at index {j}"),
                });
            }
        }
    }
    Ok(())
}

#[inline]
fn distance(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        s += d * d;
    }
    s.sqrt()
}

fn eval_field(
    config: &MarkedConfiguration,
    f: &ResponseSpec,
    probes: &[Vec<f64>],
    kind: FieldKind,
) -> Result<FieldSample> {
    let dim = config.points.dim();
    check_probes(probes, dim)?;
    f.validate_for_dim(dim)?;
    let mut values = Vec::with_capacity(probes.len());
    for probe in probes {
        let mut acc = 0.0f64;
        for i in 0..config.len() {
            let contribution = config.marks[i] * f.eval(distance(config.points.point(i), probe));
            match kind {
                FieldKind::Additive => acc += contribution,
                FieldKind::Extremal => acc = acc.max(contribution),
            }
        }
        values.push(acc);
    }
    Ok(FieldSample {
        probes: probes.to_vec(),
        values,
        lambda: config.intensity,
        kappa: f.beta / dim as f64,
        scaled: false,
        kind,
    })
}

/// Additive field: sum of mark * f(distance) over all points. Empty
/// configurations give 0; a point sitting exactly on a probe gives +inf.
pub fn additive_field(
    config: &MarkedConfiguration,
    f: &ResponseSpec,
    probes: &[Vec<f64>],
) -> Result<FieldSample> {
    eval_field(config, f, probes, FieldKind::Additive)
}

/// Extremal field: supremum of mark * f(distance) over all points.
pub fn extremal_field(
    config: &MarkedConfiguration,
    f: &ResponseSpec,
    probes: &[Vec<f64>],
) -> Result<FieldSample> {
    eval_field(config, f, probes, FieldKind::Extremal)
}

/// Apply the lambda^-kappa rescaling. Exact zeros stay zero so that empty
/// configurations behave correctly even at lambda = 0.
pub fn scale_field(mut sample: FieldSample) -> Result<FieldSample> {
    if sample.scaled {
        return Err(Error::AlreadyScaled);
    }
    let factor = sample.lambda.powf(-sample.kappa);
    for v in &mut sample.values {
        if *v != 0.0 {
            *v *= factor;
        }
    }
    sample.scaled = true;
    Ok(sample)
}

/// Simulation window plan: everything within `simulation_radius` of the
/// origin is sampled; all probes must lie within `probe_hull_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPlan {
    pub simulation_radius: f64,
    pub probe_hull_radius: f64,
    pub eps_abs: f64,
}

/// Smallest radius R with lambda * mean_mark * tail_mass(f, R - hull, d) <=
/// eps_abs, so the expected omitted additive contribution at any probe is
/// within budget. Compact responses need exactly hull + rho.
pub fn plan_truncation(
    lambda: f64,
    mean_mark: f64,
    f: &ResponseSpec,
    d: usize,
    probe_hull_radius: f64,
    eps_abs: f64,
) -> Result<TruncationPlan> {
    f.validate_for_dim(d)?;
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(Error::invalid("lambda", lambda, "must be finite and nonnegative"));
    }
    if !(mean_mark.is_finite() && mean_mark > 0.0) {
        return Err(Error::invalid("mean_mark", mean_mark, "must be finite and positive"));
    }
    if !(probe_hull_radius.is_finite() && probe_hull_radius >= 0.0) {
        return Err(Error::invalid(
            "probe_hull_radius",
            probe_hull_radius,
            "must be finite and nonnegative",
        ));
    }
    if !(eps_abs.is_finite() && eps_abs > 0.0) {
        return Err(Error::invalid("eps_abs", eps_abs, "must be finite and positive"));
    }
    let margin = match f.kind {
        ResponseKind::CompactPower => f.rho,
        ResponseKind::PurePower => {
            if lambda == 0.0 {
                1e-9
            } else {
                // Invert lambda * E_p * omega(d) x^(d-beta) / (beta-d) = eps.
                let dd = d as f64;
                let x = (lambda * mean_mark * crate::limits::omega(d)
                    / ((f.beta - dd) * eps_abs))
                    .powf(1.0 / (f.beta - dd));
                x.max(1e-9)
            }
        }
    };
    Ok(TruncationPlan {
        simulation_radius: probe_hull_radius + margin,
        probe_hull_radius,
        eps_abs,
    })
}

/// Draw one realization of the rescaled field: a marked process on
/// Ball(0, plan.simulation_radius), evaluated at the probes and scaled by
/// lambda^-kappa.
pub fn sample_scaled_field(
    lambda: f64,
    f: &ResponseSpec,
    dist: &MarkDistribution,
    probes: &[Vec<f64>],
    kind: FieldKind,
    plan: &TruncationPlan,
    rng: &mut RngStream,
) -> Result<FieldSample> {
    let dim = probes.first().map(|p| p.len()).unwrap_or(0);
    check_probes(probes, dim.max(1))?;
    for p in probes {
        let norm = distance(p, &vec![0.0; p.len()]);
        if norm > plan.probe_hull_radius + 1e-12 {
            return Err(Error::Domain {
                op: "sample_scaled_field",
                detail: format!(
                    "probe at distance {norm} lies outside the plan hull {}",
                    plan.probe_hull_radius
                ),
            });
        }
    }
    let window = Window::ball(vec![0.0; dim], plan.simulation_radius)?;
    let config = sample_marked_ppp(lambda, &window, dist, rng)?;
    let raw = eval_field(&config, f, probes, kind)?;
    scale_field(raw)
}

/// Replication dump, one row per (replication, probe):
/// `replication,probe_index,value,scaled,kind`. +inf renders as `inf`.
pub fn write_field_csv<W: Write>(samples: &[FieldSample], out: &mut W) -> Result<()> {
    writeln!(out, "replication,probe_index,value,scaled,kind")?;
    for (rep, sample) in samples.iter().enumerate() {
        for (j, v) in sample.values.iter().enumerate() {
            writeln!(
                out,
                "{rep},{j},{v},{},{}",
                sample.scaled,
                sample.kind.as_str()
            )?;
        }
    }
    Ok(())
}
