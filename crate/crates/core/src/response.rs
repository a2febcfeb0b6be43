//! Power-law response functions and the path-loss model.
//!
//! A response f(r) = r^-beta (optionally cut off beyond a support radius rho)
//! weights the contribution of a point at distance r. beta must strictly
//! exceed the ambient dimension for the rescaled field to have a limit;
//! f(0) = +inf is deliberate extended-real behavior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::omega;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseKind {
    PurePower,
    CompactPower,
}

/// Radial response r -> r^-beta, either on all of (0, inf) or truncated to
/// (0, rho]. For the pure power `rho` records the split radius used when the
/// response is treated as "power near 0 plus integrable tail" (default 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseSpec {
    pub kind: ResponseKind,
    pub beta: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

fn default_rho() -> f64 {
    1.0
}

impl ResponseSpec {
    pub fn pure_power(beta: f64) -> Result<Self> {
        let spec = ResponseSpec {
            kind: ResponseKind::PurePower,
            beta,
            rho: 1.0,
        };
        spec.validate_basic()?;
        Ok(spec)
    }

    pub fn compact_power(beta: f64, rho: f64) -> Result<Self> {
        let spec = ResponseSpec {
            kind: ResponseKind::CompactPower,
            beta,
            rho,
        };
        spec.validate_basic()?;
        Ok(spec)
    }

    /// Parameter sanity that does not need the ambient dimension.
    pub fn validate_basic(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::invalid("beta", self.beta, "must be finite and positive"));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::invalid("rho", self.rho, "must be finite and positive"));
        }
        Ok(())
    }

    /// Full contract: beta must strictly exceed the dimension.
    pub fn validate_for_dim(&self, d: usize) -> Result<()> {
        self.validate_basic()?;
        if d == 0 {
            return Err(Error::invalid("d", 0.0, "dimension must be at least 1"));
        }
        if self.beta <= d as f64 {
            return Err(Error::invalid(
                "beta",
                self.beta,
                format!("beta must exceed d = {d}"),
            ));
        }
        Ok(())
    }

    /// f(r) for r >= 0 without the nonnegativity check; callers pass norms.
    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0);
        match self.kind {
            ResponseKind::PurePower => r.powf(-self.beta),
            ResponseKind::CompactPower => {
                if r > self.rho {
                    0.0
                } else {
                    // r = 0 gives +inf, matching the pure power.
                    r.powf(-self.beta)
                }
            }
        }
    }

    /// Largest distance with a nonzero response, if the support is compact.
    pub fn support_radius(&self) -> Option<f64> {
        match self.kind {
            ResponseKind::PurePower => None,
            ResponseKind::CompactPower => Some(self.rho),
        }
    }
}

/// Checked evaluation of the response at distance r.
pub fn response_eval(f: &ResponseSpec, r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::Domain {
            op: "response_eval",
            detail: format!("distance must be nonnegative, got {r}"),
        });
    }
    Ok(f.eval(r))
}

/// Expected response mass beyond radius R per unit intensity and unit mean
/// mark: omega(d) int_R^inf r^(d-1) f(r) dr. Closed forms for both kinds;
/// R = 0 gives +inf because the power singularity is not integrable at 0.
pub fn tail_mass(f: &ResponseSpec, radius: f64, d: usize) -> Result<f64> {
    f.validate_for_dim(d)?;
    if radius < 0.0 || radius.is_nan() {
        return Err(Error::Domain {
            op: "tail_mass",
            detail: format!("radius must be nonnegative, got {radius}"),
        });
    }
    let dd = d as f64;
    let om = omega(d);
    let value = match f.kind {
        ResponseKind::PurePower => om * radius.powf(dd - f.beta) / (f.beta - dd),
        ResponseKind::CompactPower => {
            if radius >= f.rho {
                0.0
            } else {
                om * (radius.powf(dd - f.beta) - f.rho.powf(dd - f.beta)) / (f.beta - dd)
            }
        }
    };
    Ok(value)
}

/// Path-loss l(r) = r^beta on the plane; beta > 2 so interference integrals
/// converge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLoss {
    beta: f64,
}

impl PathLoss {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 2.0) {
            return Err(Error::invalid("beta", beta, "path-loss exponent must exceed 2"));
        }
        Ok(PathLoss { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// l(r) = r^beta for r > 0; a zero distance means transmitter and receiver
/// coincide and has no defined loss.
pub fn pathloss_eval(l: &PathLoss, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain {
            op: "pathloss_eval",
            detail: format!("distance must be positive, got {r}"),
        });
    }
    Ok(r.powf(l.beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn pure_power_values() {
        let f = ResponseSpec::pure_power(4.0).unwrap();
        assert!((f.eval(2.0) - 1.0 / 16.0).abs() < 1e-15);
        assert!((f.eval(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(f.eval(0.0), f64::INFINITY);
    }

    #[test]
    fn compact_power_values() {
        let f = ResponseSpec::compact_power(4.0, 1.0).unwrap();
        assert!((f.eval(0.5) - 16.0).abs() < 1e-12);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(2.0), 0.0);
        assert_eq!(f.eval(0.0), f64::INFINITY);
    }

    #[test]
    fn eval_rejects_negative_distance() {
        let f = ResponseSpec::pure_power(4.0).unwrap();
        assert!(response_eval(&f, -0.1).is_err());
        assert!(response_eval(&f, 0.0).is_ok());
    }

    #[test]
    fn tail_mass_closed_forms() {
        let f = ResponseSpec::pure_power(4.0).unwrap();
        // omega(2) R^-2 / 2 = pi at R = 1.
        assert!((tail_mass(&f, 1.0, 2).unwrap() - PI).abs() < 1e-12);
        assert_eq!(tail_mass(&f, 0.0, 2).unwrap(), f64::INFINITY);

        let g = ResponseSpec::compact_power(4.0, 1.0).unwrap();
        assert_eq!(tail_mass(&g, 1.0, 2).unwrap(), 0.0);
        assert_eq!(tail_mass(&g, 5.0, 2).unwrap(), 0.0);
        let inner = tail_mass(&g, 0.5, 2).unwrap();
        assert!((inner - PI * (4.0 - 1.0)).abs() < 1e-12, "{inner}");
    }

    #[test]
    fn tail_mass_matches_quadrature() {
        // Substituting u = 1/r maps int_R^inf r^(d-1-beta) dr onto a finite
        // interval, giving an oracle independent of the closed form.
        for &(d, beta, radius) in &[(2usize, 4.0, 1.0), (2, 3.0, 0.7), (3, 5.5, 2.0), (1, 2.5, 0.3)] {
            let f = ResponseSpec::pure_power(beta).unwrap();
            let numeric = omega(d)
                * quad::integrate(
                    |u: f64| u.powf(beta - d as f64 - 1.0),
                    0.0,
                    1.0 / radius,
                    1e-12,
                );
            let closed = tail_mass(&f, radius, d).unwrap();
            assert!(
                ((numeric - closed) / closed).abs() < 1e-9,
                "d={d} beta={beta} R={radius}: {numeric} vs {closed}"
            );
        }
        // Compact support: direct quadrature over [R, rho].
        let g = ResponseSpec::compact_power(4.0, 2.0).unwrap();
        let numeric = omega(2) * quad::integrate(|r: f64| r * r.powf(-4.0), 0.5, 2.0, 1e-12);
        let closed = tail_mass(&g, 0.5, 2).unwrap();
        assert!(((numeric - closed) / closed).abs() < 1e-9);
    }

    #[test]
    fn beta_must_exceed_dimension() {
        let f = ResponseSpec::pure_power(1.5).unwrap();
        let err = tail_mass(&f, 1.0, 2).unwrap_err();
        assert!(err.to_string().contains("beta must exceed d"), "{err}");
        assert!(f.validate_for_dim(1).is_ok());
    }

    #[test]
    fn pathloss_values_and_domain() {
        let l = PathLoss::new(4.0).unwrap();
        assert!((pathloss_eval(&l, 2.0).unwrap() - 16.0).abs() < 1e-12);
        assert!(pathloss_eval(&l, 0.0).is_err());
        assert!(PathLoss::new(2.0).is_err());
        assert!(PathLoss::new(1.5).is_err());
    }

    #[test]
    fn json_interface_round_trips() {
        let f = ResponseSpec::compact_power(4.0, 1.5).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"kind":"compact_power","beta":4.0,"rho":1.5}"#);
        assert_eq!(serde_json::from_str::<ResponseSpec>(&s).unwrap(), f);
        // rho defaults to 1 when omitted
        let f: ResponseSpec = serde_json::from_str(r#"{"kind":"pure_power","beta":4.0}"#).unwrap();
        assert_eq!(f.rho, 1.0);
    }

    proptest! {
        #[test]
        fn response_is_nonincreasing(
            beta in 2.1f64..8.0,
            rho in 0.5f64..4.0,
            r1 in 1e-6f64..10.0,
            scale in 1.0f64..5.0,
            compact in proptest::bool::ANY,
        ) {
            let f = if compact {
                ResponseSpec::compact_power(beta, rho).unwrap()
            } else {
                ResponseSpec::pure_power(beta).unwrap()
            };
            let r2 = r1 * scale;
            prop_assert!(f.eval(r1) >= f.eval(r2));
            // strictly decreasing inside the support interior
            if scale > 1.0 && f.support_radius().is_none_or(|s| r2 < s) {
                prop_assert!(f.eval(r1) > f.eval(r2));
            }
        }

        #[test]
        fn tail_mass_is_nonincreasing_in_radius(
            beta in 2.2f64..6.0,
            r1 in 0.05f64..5.0,
            scale in 1.0f64..4.0,
        ) {
            let f = ResponseSpec::pure_power(beta).unwrap();
            let m1 = tail_mass(&f, r1, 2).unwrap();
            let m2 = tail_mass(&f, r1 * scale, 2).unwrap();
            prop_assert!(m1 >= m2);
        }
    }
}
