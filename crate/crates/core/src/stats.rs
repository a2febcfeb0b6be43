//! Empirical Laplace transforms, Kolmogorov-Smirnov distances, and moment
//! estimators used by every experiment.
//!
//! Samples live on the extended nonnegative reals: exp(-t * inf) = 0 for
//! t > 0, and the t = 0 estimate is exactly 1 regardless of infinities.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asymptotic 1% critical value of sqrt(n) * D_n.
pub const KS_CRITICAL_1PCT: f64 = 1.628;

/// Pointwise empirical Laplace transform with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtEstimate {
    pub t: Vec<f64>,
    pub estimate: Vec<f64>,
    pub std_error: Vec<f64>,
    pub n: usize,
}

impl LtEstimate {
    /// `t,estimate,std_error,n` rows.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "t,estimate,std_error,n")?;
        for i in 0..self.t.len() {
            writeln!(
                out,
                "{},{},{},{}",
                self.t[i], self.estimate[i], self.std_error[i], self.n
            )?;
        }
        Ok(())
    }
}

fn check_samples(op: &'static str, samples: &[f64], min_n: usize) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySample(op));
    }
    if samples.len() < min_n {
        return Err(Error::SampleTooSmall {
            op,
            need: min_n,
            got: samples.len(),
        });
    }
    if samples.iter().any(|x| x.is_nan() || *x < 0.0) {
        return Err(Error::Domain {
            op,
            detail: "samples must be nonnegative (inf allowed, NaN not)".into(),
        });
    }
    Ok(())
}

#[inline]
fn lt_term(t: f64, x: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (-t * x).exp()
    }
}

/// Sample mean and its standard error (unbiased variance, n >= 2).
pub fn mean_and_se(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Empirical Laplace transform of nonnegative samples on a grid of t >= 0.
pub fn empirical_lt(samples: &[f64], t_grid: &[f64]) -> Result<LtEstimate> {
    check_samples("empirical_lt", samples, 2)?;
    if t_grid.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::Domain {
            op: "empirical_lt",
            detail: "t grid must be nonnegative".into(),
        });
    }
    let mut estimate = Vec::with_capacity(t_grid.len());
    let mut std_error = Vec::with_capacity(t_grid.len());
    let mut terms = vec![0.0; samples.len()];
    for &t in t_grid {
        for (term, &x) in terms.iter_mut().zip(samples) {
            *term = lt_term(t, x);
        }
        let (m, se) = mean_and_se(&terms);
        estimate.push(m);
        std_error.push(se);
    }
    Ok(LtEstimate {
        t: t_grid.to_vec(),
        estimate,
        std_error,
        n: samples.len(),
    })
}

fn check_vectors(op: &'static str, vectors: &[Vec<f64>], t: &[f64]) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::EmptySample(op));
    }
    if vectors.len() < 2 {
        return Err(Error::SampleTooSmall {
            op,
            need: 2,
            got: vectors.len(),
        });
    }
    for v in vectors {
        if v.len() != t.len() {
            return Err(Error::DimensionMismatch {
                expected: t.len(),
                got: v.len(),
            });
        }
        if v.iter().any(|x| x.is_nan() || *x < 0.0) {
            return Err(Error::Domain {
                op,
                detail: "samples must be nonnegative".into(),
            });
        }
    }
    if t.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::Domain {
            op,
            detail: "t vector must be nonnegative".into(),
        });
    }
    Ok(())
}

/// Empirical joint Laplace transform E[exp(-sum_j t_j X_j)] with its
/// standard error.
pub fn empirical_joint_lt(vectors: &[Vec<f64>], t: &[f64]) -> Result<(f64, f64)> {
    check_vectors("empirical_joint_lt", vectors, t)?;
    let terms: Vec<f64> = vectors
        .iter()
        .map(|v| {
            let mut expo = 0.0;
            for (&tj, &xj) in t.iter().zip(v) {
                if tj > 0.0 {
                    expo += tj * xj; // t_j = 0 contributes factor 1 even at x = inf
                }
            }
            (-expo).exp()
        })
        .collect();
    Ok(mean_and_se(&terms))
}

/// |joint LT - product of marginal LTs| at one t vector, with a propagated
/// standard error (delta method on the product plus the joint SE).
pub fn factorization_gap(vectors: &[Vec<f64>], t: &[f64]) -> Result<(f64, f64)> {
    check_vectors("factorization_gap", vectors, t)?;
    let (joint, joint_se) = empirical_joint_lt(vectors, t)?;
    let k = t.len();
    let mut marginals = Vec::with_capacity(k);
    let mut marginal_ses = Vec::with_capacity(k);
    for j in 0..k {
        let column: Vec<f64> = vectors.iter().map(|v| lt_term(t[j], v[j])).collect();
        let (m, se) = mean_and_se(&column);
        marginals.push(m);
        marginal_ses.push(se);
    }
    let product: f64 = marginals.iter().product();
    let mut var = joint_se * joint_se;
    for j in 0..k {
        let others: f64 = marginals
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != j)
            .map(|(_, m)| m)
            .product();
        var += (others * marginal_ses[j]).powi(2);
    }
    Ok(((joint - product).abs(), var.sqrt()))
}

/// Kolmogorov-Smirnov result against a reference CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub n: usize,
    pub critical_1pct: f64,
}

impl KsResult {
    pub fn passes_1pct(&self) -> bool {
        self.statistic < self.critical_1pct
    }
}

/// One-sample KS distance: D_n = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], reference_cdf: F) -> Result<KsResult> {
    if samples.is_empty() {
        return Err(Error::EmptySample("ks_distance"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain {
            op: "ks_distance",
            detail: "samples must not contain NaN".into(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = reference_cdf(x);
        d = d.max((i as f64 + 1.0) / nf - f).max(f - i as f64 / nf);
    }
    Ok(KsResult {
        statistic: d,
        n,
        critical_1pct: KS_CRITICAL_1PCT / nf.sqrt(),
    })
}

/// Sample mean vector and unbiased covariance matrix of row vectors.
pub fn sample_mean_cov(rows: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if rows.is_empty() {
        return Err(Error::EmptySample("sample_mean_cov"));
    }
    if rows.len() < 2 {
        return Err(Error::SampleTooSmall {
            op: "sample_mean_cov",
            need: 2,
            got: rows.len(),
        });
    }
    let k = rows[0].len();
    for r in rows {
        if r.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: r.len(),
            });
        }
    }
    let n = rows.len() as f64;
    let mut mean = vec![0.0; k];
    for r in rows {
        for (m, x) in mean.iter_mut().zip(r) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut cov = vec![vec![0.0; k]; k];
    for r in rows {
        for i in 0..k {
            let di = r[i] - mean[i];
            for j in i..k {
                cov[i][j] += di * (r[j] - mean[j]);
            }
        }
    }
    for i in 0..k {
        for j in i..k {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }
    Ok((mean, cov))
}

/// Standard error of the (i, j) sample-covariance entry, estimated from the
/// empirical variance of centered products.
pub fn covariance_se(rows: &[Vec<f64>], mean: &[f64], i: usize, j: usize) -> f64 {
    let products: Vec<f64> = rows
        .iter()
        .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
        .collect();
    let (_, se) = mean_and_se(&products);
    se
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn exponential_lt_known_value() {
        // LT of Exp(1) at t=1 is 1/2.
        let mut rng = RngStream::new(42, 0);
        let n = 100_000usize;
        let samples: Vec<f64> = (0..n)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let est = empirical_lt(&samples, &[0.0, 1.0]).unwrap();
        assert_eq!(est.estimate[0], 1.0);
        assert!(
            (est.estimate[1] - 0.5).abs() <= 3.0 * est.std_error[1],
            "{} vs 0.5",
            est.estimate[1]
        );
    }

    #[test]
    fn infinities_and_zeros_follow_conventions() {
        let samples = vec![f64::INFINITY, 0.0, 1.0];
        let est = empirical_lt(&samples, &[0.0, 2.0]).unwrap();
        assert_eq!(est.estimate[0], 1.0); // exp(-0*inf) = 1 convention
        let expected = (1.0 + (-2.0f64).exp()) / 3.0;
        assert!((est.estimate[1] - expected).abs() < 1e-15);

        let zeros = vec![0.0; 5];
        let est = empirical_lt(&zeros, &[0.5]).unwrap();
        assert_eq!(est.estimate[0], 1.0);
        assert_eq!(est.std_error[0], 0.0);
    }

    #[test]
    fn lt_rejects_bad_input() {
        assert!(empirical_lt(&[], &[1.0]).is_err());
        assert!(empirical_lt(&[1.0], &[1.0]).is_err(), "n = 1 disallowed");
        assert!(empirical_lt(&[1.0, -0.5], &[1.0]).is_err());
        assert!(empirical_lt(&[1.0, 2.0], &[-1.0]).is_err());
    }

    #[test]
    fn joint_lt_of_independent_exponentials() {
        let mut rng = RngStream::new(7, 0);
        let n = 100_000usize;
        let vectors: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let u1: f64 = rng.random();
                let u2: f64 = rng.random();
                vec![-(1.0 - u1).ln(), -(1.0 - u2).ln()]
            })
            .collect();
        let (joint, se) = empirical_joint_lt(&vectors, &[1.0, 1.0]).unwrap();
        assert!((joint - 0.25).abs() <= 3.0 * se, "{joint}");
        let (gap, gap_se) = factorization_gap(&vectors, &[1.0, 1.0]).unwrap();
        assert!(gap <= 3.0 * gap_se + 0.01, "gap {gap} se {gap_se}");
    }

    #[test]
    fn gap_is_zero_when_one_coordinate_carries_all_weight() {
        let vectors = vec![
            vec![0.3, 9.0],
            vec![1.7, 0.2],
            vec![0.9, f64::INFINITY],
            vec![2.2, 4.4],
        ];
        let (gap, _) = factorization_gap(&vectors, &[0.7, 0.0]).unwrap();
        assert_eq!(gap, 0.0);
    }

    #[test]
    fn ks_hand_examples() {
        // single sample at the median: D = 1/2
        let r = ks_distance(&[0.0], |_| 0.5).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
        // reference identically 0: D = 1
        let r = ks_distance(&[1.0, 2.0, 3.0], |_| 0.0).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-15);
        assert!((r.critical_1pct - KS_CRITICAL_1PCT / 3f64.sqrt()).abs() < 1e-15);
        assert!(ks_distance(&[], |_| 0.5).is_err());
    }

    #[test]
    fn ks_handles_infinite_samples() {
        // inf order statistics sit at the top; any cdf with limit 1 is fine
        let r = ks_distance(&[0.5, f64::INFINITY], |x| {
            if x.is_infinite() {
                1.0
            } else {
                1.0 - (-x).exp()
            }
        })
        .unwrap();
        assert!(r.statistic <= 1.0);
    }

    #[test]
    fn mean_cov_hand_example() {
        let rows = vec![vec![1.0, 2.0], vec![3.0, 6.0], vec![5.0, 10.0]];
        let (mean, cov) = sample_mean_cov(&rows).unwrap();
        assert_eq!(mean, vec![3.0, 6.0]);
        assert!((cov[0][0] - 4.0).abs() < 1e-12);
        assert!((cov[0][1] - 8.0).abs() < 1e-12);
        assert!((cov[1][1] - 16.0).abs() < 1e-12);
        assert_eq!(cov[0][1], cov[1][0]);
        assert!(sample_mean_cov(&rows[..1]).is_err());
    }

    #[test]
    fn csv_format_is_stable() {
        let est = LtEstimate {
            t: vec![0.0, 0.5],
            estimate: vec![1.0, 0.75],
            std_error: vec![0.0, 0.0125],
            n: 4,
        };
        let mut buf = Vec::new();
        est.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,estimate,std_error,n\n0,1,0,4\n0.5,0.75,0.0125,4\n"
        );
    }

    #[test]
    fn ks_json_interface() {
        let r = KsResult {
            statistic: 0.0123,
            n: 10_000,
            critical_1pct: 0.01628,
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"statistic":0.0123,"n":10000,"critical_1pct":0.01628}"#);
    }

    proptest! {
        // KS is invariant under strictly increasing transforms applied to
        // both the samples and the reference.
        #[test]
        fn ks_invariant_under_increasing_maps(
            mut xs in proptest::collection::vec(0.01f64..10.0, 3..40),
        ) {
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let cdf = |x: f64| 1.0 - (-x).exp();
            let d1 = ks_distance(&xs, cdf).unwrap().statistic;
            let ys: Vec<f64> = xs.iter().map(|x| x.powi(3)).collect();
            let d2 = ks_distance(&ys, |y: f64| cdf(y.cbrt())).unwrap().statistic;
            prop_assert!((d1 - d2).abs() < 1e-9);
        }

        // LT estimates live in [0,1] and are nonincreasing in t.
        #[test]
        fn lt_bounded_and_monotone(
            xs in proptest::collection::vec(0.0f64..50.0, 2..60),
            t1 in 0.0f64..4.0,
            dt in 0.0f64..4.0,
        ) {
            let est = empirical_lt(&xs, &[t1, t1 + dt]).unwrap();
            prop_assert!(est.estimate.iter().all(|e| (0.0..=1.0).contains(e)));
            prop_assert!(est.estimate[0] >= est.estimate[1] - 1e-12);
        }

        // The joint LT never exceeds any marginal evaluated alone.
        #[test]
        fn joint_below_marginals(
            rows in proptest::collection::vec((0.0f64..20.0, 0.0f64..20.0), 2..40),
            t1 in 0.01f64..2.0,
            t2 in 0.01f64..2.0,
        ) {
            let vectors: Vec<Vec<f64>> = rows.iter().map(|(a, b)| vec![*a, *b]).collect();
            let (joint, _) = empirical_joint_lt(&vectors, &[t1, t2]).unwrap();
            let (m1, _) = empirical_joint_lt(&vectors, &[t1, 0.0]).unwrap();
            let (m2, _) = empirical_joint_lt(&vectors, &[0.0, t2]).unwrap();
            prop_assert!(joint <= m1 + 1e-12);
            prop_assert!(joint <= m2 + 1e-12);
        }
    }
}
