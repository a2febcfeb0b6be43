//! Limit laws for rescaled power-law shot noise: the one-sided stable law
//! that the additive field converges to, and the Frechet law that the
//! extremal field converges to.
//!
//! The stable constant is computed by quadrature of its defining integral
//! (series below the s = 1 split, adaptive Simpson above); the Gamma-function
//! closed form is asserted against it in tests rather than trusted outright.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::point_process::MarkDistribution;
use crate::quad;

/// Surface measure of the unit sphere in R^d: omega(d) = 2 pi^(d/2) / Gamma(d/2).
pub fn omega(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    let half = d as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

/// integral_0^1 (1 - e^-s) s^(-1-a) ds as an alternating series; the
/// singularity at 0 is integrable because 1 - e^-s ~ s.
fn lower_integral(alpha: f64) -> f64 {
    let mut sum = 0.0;
    let mut factorial = 1.0;
    for k in 1..60 {
        factorial *= k as f64;
        let term = if k % 2 == 1 { 1.0 } else { -1.0 } / (factorial * (k as f64 - alpha));
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// integral_1^inf (1 - e^-s) s^(-1-a) ds = 1/a - integral_1^inf e^-s s^(-1-a) ds.
fn upper_integral(alpha: f64) -> f64 {
    // e^-60 ~ 8.8e-27 bounds the discarded tail.
    let damped = quad::integrate(|s| (-s).exp() * s.powf(-1.0 - alpha), 1.0, 60.0, 1e-13);
    1.0 / alpha - damped
}

/// Stable-limit constant C(d, beta) = (omega(d)/beta) int_0^inf (1-e^-s) s^(-1-d/beta) ds,
/// for beta > d. Known special cases: C(2,4) = pi^(3/2), C(2,3) = pi Gamma(1/3).
pub fn stable_constant(d: usize, beta: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("d", 0.0, "dimension must be at least 1"));
    }
    if !(beta.is_finite() && beta > d as f64) {
        return Err(Error::invalid("beta", beta, format!("beta must exceed d = {d}")));
    }
    let alpha = d as f64 / beta;
    Ok(omega(d) / beta * (lower_integral(alpha) + upper_integral(alpha)))
}

/// Fractional moment E[p^a] for a in (0, 1].
pub fn fractional_moment(dist: &MarkDistribution, a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::invalid("a", a, "fractional order must lie in (0, 1]"));
    }
    dist.validate()?;
    match *dist {
        MarkDistribution::Deterministic { p0 } => Ok(p0.powf(a)),
        MarkDistribution::Exponential { mean } => Ok(mean.powf(a) * gamma(1.0 + a)),
        MarkDistribution::Pareto { scale, shape } => {
            if shape <= a {
                return Err(Error::Domain {
                    op: "fractional_moment",
                    detail: format!("pareto shape {shape} must exceed the order {a}"),
                });
            }
            Ok(shape * scale.powf(a) / (shape - a))
        }
    }
}

/// Frechet scale gamma(d, beta, F) = (omega(d)/d) E[p^(d/beta)] for the
/// extremal limit. Equals the tail integral (omega(d)/beta) int_0^inf
/// P(p > s) s^(d/beta - 1) ds, which tests verify by quadrature.
pub fn frechet_scale(d: usize, beta: f64, dist: &MarkDistribution) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("d", 0.0, "dimension must be at least 1"));
    }
    if !(beta.is_finite() && beta > d as f64) {
        return Err(Error::invalid("beta", beta, format!("beta must exceed d = {d}")));
    }
    Ok(omega(d) / d as f64 * fractional_moment(dist, d as f64 / beta)?)
}

/// One-sided alpha-stable limit of the rescaled additive field:
/// E[exp(-t X)] = exp(-eta t^alpha) with alpha = d/beta in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLimit {
    pub alpha: f64,
    pub eta: f64,
}

impl StableLimit {
    pub fn new(alpha: f64, eta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alpha", alpha, "must lie in (0, 1)"));
        }
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::invalid("eta", eta, "must be finite and positive"));
        }
        Ok(StableLimit { alpha, eta })
    }

    /// Limit of the rescaled additive power-law field: eta = E[p^alpha] C(d, beta).
    pub fn for_power_field(d: usize, beta: f64, marks: &MarkDistribution) -> Result<Self> {
        let alpha = d as f64 / beta;
        let eta = fractional_moment(marks, alpha)? * stable_constant(d, beta)?;
        StableLimit::new(alpha, eta)
    }

    /// Laplace transform exp(-eta t^alpha), t >= 0.
    pub fn lt(&self, t: f64) -> f64 {
        assert!(t >= 0.0, "laplace argument must be nonnegative");
        if t == 0.0 {
            1.0
        } else {
            (-self.eta * t.powf(self.alpha)).exp()
        }
    }

    /// Natural scale of the law: X =d scale * S where E[exp(-t S)] = exp(-t^alpha).
    pub fn scale(&self) -> f64 {
        self.eta.powf(1.0 / self.alpha)
    }
}

/// Laplace transform of a one-sided stable law: exp(-eta t^alpha).
pub fn stable_lt(limit: &StableLimit, t: f64) -> f64 {
    limit.lt(t)
}

/// Frechet limit of the rescaled extremal field:
/// P(M <= t) = exp(-gamma t^-alpha) for t > 0, 0 for t <= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetLimit {
    pub alpha: f64,
    pub gamma: f64,
}

impl FrechetLimit {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid("alpha", alpha, "must lie in (0, 1)"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("gamma", gamma, "must be finite and positive"));
        }
        Ok(FrechetLimit { alpha, gamma })
    }

    pub fn for_power_field(d: usize, beta: f64, marks: &MarkDistribution) -> Result<Self> {
        FrechetLimit::new(d as f64 / beta, frechet_scale(d, beta, marks)?)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-self.gamma * t.powf(-self.alpha)).exp()
        }
    }

    /// Quantile t with cdf(t) = q, for q in (0, 1).
    pub fn quantile(&self, q: f64) -> f64 {
        assert!(q > 0.0 && q < 1.0);
        (self.gamma / -q.ln()).powf(1.0 / self.alpha)
    }
}

/// Frechet CDF exp(-gamma t^-alpha).
pub fn frechet_cdf(limit: &FrechetLimit, t: f64) -> f64 {
    limit.cdf(t)
}

/// One draw of a one-sided alpha-stable variable with E[exp(-t X)] =
/// exp(-eta t^alpha), via Kanter's representation
///
///   S = sin(a T) sin((1-a) T)^((1-a)/a) / (sin(T)^(1/a) E^((1-a)/a)),
///
/// T uniform on (0, pi), E unit exponential, scaled by eta^(1/a).
/// For alpha = 1/2 this is the Levy law with CDF erfc(sqrt(1/(4s))),
/// which the tests use as an independent oracle.
pub fn sample_one_sided_stable<R: Rng + ?Sized>(alpha: f64, eta: f64, rng: &mut R) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", alpha, "must lie in (0, 1)"));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::invalid("eta", eta, "must be finite and positive"));
    }
    let theta = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u * std::f64::consts::PI;
        }
    };
    let e: f64 = loop {
        let e = Exp1.sample(rng);
        if e > 0.0 {
            break e;
        }
    };
    let ratio = (1.0 - alpha) / alpha;
    let s = (alpha * theta).sin() * ((1.0 - alpha) * theta).sin().powf(ratio)
        / (theta.sin().powf(1.0 / alpha) * e.powf(ratio));
    Ok(eta.powf(1.0 / alpha) * s)
}
