//! Homogeneous, independently marked Poisson point processes on balls and
//! boxes.
//!
//! Counts are Poisson with mean `intensity * measure(window)`, point locations
//! are conditionally i.i.d. uniform given the count, and marks are i.i.d. and
//! independent of locations. Ball sampling uses radius inversion
//! (`r = R * U^(1/d)`) with a uniform direction from normalized Gaussians.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp, Pareto, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::omega;

/// Observation window for a point process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Window {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Window {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let w = Window::Ball { center, radius };
        w.validate()?;
        Ok(w)
    }

    pub fn bounding_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let w = Window::Box { lo, hi };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Window::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::invalid("center", 0.0, "dimension must be at least 1"));
                }
                if !center.iter().all(|x| x.is_finite()) {
                    return Err(Error::invalid("center", f64::NAN, "must be finite"));
                }
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid("radius", *radius, "must be finite and positive"));
                }
            }
            Window::Box { lo, hi } => {
                if lo.is_empty() {
                    return Err(Error::invalid("lo", 0.0, "dimension must be at least 1"));
                }
                if lo.len() != hi.len() {
                    return Err(Error::DimensionMismatch {
                        expected: lo.len(),
                        got: hi.len(),
                    });
                }
                for (l, h) in lo.iter().zip(hi) {
                    if !(l.is_finite() && h.is_finite()) {
                        return Err(Error::invalid("lo/hi", f64::NAN, "must be finite"));
                    }
                    if h <= l {
                        return Err(Error::invalid(
                            "hi",
                            *h,
                            format!("must exceed lo = {l} in every coordinate"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Window::Ball { center, .. } => center.len(),
            Window::Box { lo, .. } => lo.len(),
        }
    }

    /// Lebesgue measure of the window.
    pub fn measure(&self) -> f64 {
        match self {
            Window::Ball { center, radius } => {
                let d = center.len();
                omega(d) / d as f64 * radius.powi(d as i32)
            }
            Window::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| h - l).product(),
        }
    }
}

/// Lebesgue measure of a validated window.
pub fn window_measure(w: &Window) -> f64 {
    w.measure()
}

/// Mark distribution for an independently marked process. All marks are
/// strictly positive; Pareto requires shape > 1 so the mean is finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarkDistribution {
    Deterministic { p0: f64 },
    Exponential { mean: f64 },
    Pareto { scale: f64, shape: f64 },
}

impl MarkDistribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            MarkDistribution::Deterministic { p0 } => {
                if !(p0.is_finite() && p0 > 0.0) {
                    return Err(Error::invalid("p0", p0, "must be finite and positive"));
                }
            }
            MarkDistribution::Exponential { mean } => {
                if !(mean.is_finite() && mean > 0.0) {
                    return Err(Error::invalid("mean", mean, "must be finite and positive"));
                }
            }
            MarkDistribution::Pareto { scale, shape } => {
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::invalid("scale", scale, "must be finite and positive"));
                }
                if !(shape.is_finite() && shape > 1.0) {
                    return Err(Error::invalid(
                        "shape",
                        shape,
                        "must exceed 1 (finite mean required)",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            MarkDistribution::Deterministic { p0 } => p0,
            MarkDistribution::Exponential { mean } => mean,
            MarkDistribution::Pareto { scale, shape } => shape * scale / (shape - 1.0),
        }
    }

    /// Draw a single mark.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let mut one = sample_marks(self, 1, rng)?;
        Ok(one.pop().expect("one mark requested"))
    }

    /// P(mark >= x). Continuous tails make >= and > interchangeable here;
    /// the deterministic atom uses >= to match the event it bounds.
    pub fn survival_geq(&self, x: f64) -> f64 {
        match *self {
            MarkDistribution::Deterministic { p0 } => {
                if p0 >= x {
                    1.0
                } else {
                    0.0
                }
            }
            MarkDistribution::Exponential { mean } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-x / mean).exp()
                }
            }
            MarkDistribution::Pareto { scale, shape } => {
                if x <= scale {
                    1.0
                } else {
                    (scale / x).powf(shape)
                }
            }
        }
    }
}

/// Unmarked point configuration in flat row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    dim: usize,
    coords: Vec<f64>,
}

impl PointConfiguration {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", 0.0, "dimension must be at least 1"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len(),
            });
        }
        Ok(PointConfiguration { dim, coords })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Realization of an independently marked Poisson process.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedConfiguration {
    pub window: Window,
    pub intensity: f64,
    pub points: PointConfiguration,
    pub marks: Vec<f64>,
}

impl MarkedConfiguration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Debug dump, one row per point: `x1,...,xd,mark`.
    pub fn write_points_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        let d = self.points.dim();
        for j in 1..=d {
            write!(out, "x{j},")?;
        }
        writeln!(out, "mark")?;
        for i in 0..self.len() {
            for x in self.points.point(i) {
                write!(out, "{x},")?;
            }
            writeln!(out, "{}", self.marks[i])?;
        }
        Ok(())
    }
}

fn sample_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<usize> {
    if mean == 0.0 {
        return Ok(0);
    }
    let pois = Poisson::new(mean)
        .map_err(|e| Error::invalid("mean_count", mean, format!("poisson sampling: {e}")))?;
    let k: f64 = pois.sample(rng);
    Ok(k as usize)
}

fn push_uniform_point<R: Rng + ?Sized>(w: &Window, rng: &mut R, coords: &mut Vec<f64>) {
    match w {
        Window::Ball { center, radius } => {
            let d = center.len();
            // Uniform direction from normalized Gaussians; zero vectors are
            // rerolled (probability ~0, but powf would produce NaN).
            loop {
                let start = coords.len();
                let mut norm2 = 0.0;
                for _ in 0..d {
                    let g: f64 = StandardNormal.sample(rng);
                    norm2 += g * g;
                    coords.push(g);
                }
                if norm2 > 0.0 {
                    let u: f64 = rng.random();
                    let r = radius * u.powf(1.0 / d as f64) / norm2.sqrt();
                    for (j, c) in coords[start..].iter_mut().enumerate() {
                        *c = center[j] + *c * r;
                    }
                    return;
                }
                coords.truncate(start);
            }
        }
        Window::Box { lo, hi } => {
            for (l, h) in lo.iter().zip(hi) {
                let u: f64 = rng.random();
                coords.push(l + u * (h - l));
            }
        }
    }
}

/// Sample a homogeneous Poisson process of the given intensity on `window`.
pub fn sample_ppp<R: Rng + ?Sized>(
    intensity: f64,
    window: &Window,
    rng: &mut R,
) -> Result<PointConfiguration> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid(
            "intensity",
            intensity,
            "must be finite and nonnegative",
        ));
    }
    window.validate()?;
    let d = window.dim();
    let n = sample_count(intensity * window.measure(), rng)?;
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n {
        push_uniform_point(window, rng, &mut coords);
    }
    PointConfiguration::new(d, coords)
}

/// Draw `n` i.i.d. marks.
pub fn sample_marks<R: Rng + ?Sized>(
    dist: &MarkDistribution,
    n: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    dist.validate()?;
    let mut marks = Vec::with_capacity(n);
    match *dist {
        MarkDistribution::Deterministic { p0 } => marks.resize(n, p0),
        MarkDistribution::Exponential { mean } => {
            let exp = Exp::new(1.0 / mean)
                .map_err(|e| Error::invalid("mean", mean, format!("exp sampling: {e}")))?;
            marks.extend(exp.sample_iter(rng).take(n));
        }
        MarkDistribution::Pareto { scale, shape } => {
            let par = Pareto::new(scale, shape)
                .map_err(|e| Error::invalid("shape", shape, format!("pareto sampling: {e}")))?;
            marks.extend(par.sample_iter(rng).take(n));
        }
    }
    Ok(marks)
}

/// Sample an independently marked Poisson process: locations first, then
/// i.i.d. marks, so marks never depend on geometry.
pub fn sample_marked_ppp<R: Rng + ?Sized>(
    intensity: f64,
    window: &Window,
    dist: &MarkDistribution,
    rng: &mut R,
) -> Result<MarkedConfiguration> {
    let points = sample_ppp(intensity, window, rng)?;
    let marks = sample_marks(dist, points.len(), rng)?;
    Ok(MarkedConfiguration {
        window: window.clone(),
        intensity,
        points,
        marks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use std::f64::consts::PI;

    #[test]
    fn measures_match_closed_forms() {
        let b2 = Window::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert!((b2.measure() - PI).abs() < 1e-12);
        let b3 = Window::ball(vec![0.0, 0.0, 0.0], 2.0).unwrap();
        assert!((b3.measure() - 32.0 * PI / 3.0).abs() < 1e-10);
        let bx = Window::bounding_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!((bx.measure() - 1.0).abs() < 1e-15);
        let bx2 = Window::bounding_box(vec![-1.0, 0.0], vec![1.0, 3.0]).unwrap();
        assert!((bx2.measure() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_windows_rejected() {
        assert!(Window::ball(vec![0.0], 0.0).is_err());
        assert!(Window::ball(vec![0.0], -1.0).is_err());
        assert!(Window::ball(vec![], 1.0).is_err());
        assert!(Window::bounding_box(vec![0.0, 0.0], vec![1.0, 0.0]).is_err());
        assert!(Window::bounding_box(vec![0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn invalid_mark_distributions_rejected() {
        assert!(MarkDistribution::Deterministic { p0: 0.0 }.validate().is_err());
        assert!(MarkDistribution::Exponential { mean: -1.0 }.validate().is_err());
        // shape 0.9 has infinite mean and is out of contract
        assert!(MarkDistribution::Pareto { scale: 1.0, shape: 0.9 }
            .validate()
            .is_err());
        assert!(MarkDistribution::Pareto { scale: 1.0, shape: 1.0 }
            .validate()
            .is_err());
        assert!(MarkDistribution::Pareto { scale: 1.0, shape: 3.0 }
            .validate()
            .is_ok());
    }

    #[test]
    fn negative_intensity_rejected() {
        let w = Window::ball(vec![0.0, 0.0], 1.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        assert!(sample_ppp(-1.0, &w, &mut rng).is_err());
    }

    #[test]
    fn zero_intensity_gives_empty_configuration() {
        let w = Window::ball(vec![0.0, 0.0], 1.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        let cfg = sample_marked_ppp(0.0, &w, &MarkDistribution::Deterministic { p0: 1.0 }, &mut rng)
            .unwrap();
        assert!(cfg.is_empty());
    }

    #[test]
    fn mean_count_matches_intensity_times_measure() {
        // Ball d=2 r=1, lambda=5: mean count 5*pi.
        let w = Window::ball(vec![0.0, 0.0], 1.0).unwrap();
        let reps = 10_000usize;
        let mut total = 0usize;
        for i in 0..reps {
            let mut rng = RngStream::new(99, i as u64);
            total += sample_ppp(5.0, &w, &mut rng).unwrap().len();
        }
        let mean = total as f64 / reps as f64;
        let target = 5.0 * PI;
        let se = (target / reps as f64).sqrt();
        assert!(
            (mean - target).abs() <= 3.0 * se,
            "mean {mean} vs {target} (3se = {})",
            3.0 * se
        );
    }

    #[test]
    fn empty_probability_matches_poisson_atom() {
        // lambda * measure = 10: P(count = 0) = e^-10.
        let w = Window::bounding_box(vec![0.0, 0.0], vec![2.0, 5.0]).unwrap();
        let reps = 1_000_000usize;
        let mut empties = 0usize;
        let mut rng = RngStream::new(5, 0);
        for _ in 0..reps {
            if sample_count(1.0 * w.measure(), &mut rng).unwrap() == 0 {
                empties += 1;
            }
        }
        let p = empties as f64 / reps as f64;
        let target = (-10.0f64).exp();
        let se = (target * (1.0 - target) / reps as f64).sqrt();
        assert!(
            (p - target).abs() <= 4.0 * se,
            "p {p} vs {target} (4se = {})",
            4.0 * se
        );
    }

    #[test]
    fn points_stay_inside_window() {
        let w = Window::ball(vec![1.0, -2.0], 3.0).unwrap();
        let mut rng = RngStream::new(17, 0);
        let pts = sample_ppp(10.0, &w, &mut rng).unwrap();
        for i in 0..pts.len() {
            let p = pts.point(i);
            let r = ((p[0] - 1.0).powi(2) + (p[1] + 2.0).powi(2)).sqrt();
            assert!(r <= 3.0);
        }
        let bx = Window::bounding_box(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let pts = sample_ppp(50.0, &bx, &mut rng).unwrap();
        for i in 0..pts.len() {
            let p = pts.point(i);
            assert!((0.0..=1.0).contains(&p[0]) && (0.0..=2.0).contains(&p[1]));
        }
    }

    #[test]
    fn marks_are_positive_and_match_means() {
        let mut rng = RngStream::new(23, 0);
        let n = 100_000usize;

        let det = sample_marks(&MarkDistribution::Deterministic { p0: 2.5 }, 5, &mut rng).unwrap();
        assert_eq!(det, vec![2.5; 5]);

        let exp = sample_marks(&MarkDistribution::Exponential { mean: 2.0 }, n, &mut rng).unwrap();
        assert!(exp.iter().all(|&m| m > 0.0));
        let mean = exp.iter().sum::<f64>() / n as f64;
        let se = 2.0 / (n as f64).sqrt();
        assert!((mean - 2.0).abs() <= 3.0 * se, "exp mean {mean}");

        // Pareto(scale 1, shape 3): mean = 3/2, sd = sqrt(3)/2.
        let par = sample_marks(
            &MarkDistribution::Pareto { scale: 1.0, shape: 3.0 },
            n,
            &mut rng,
        )
        .unwrap();
        assert!(par.iter().all(|&m| m >= 1.0));
        let mean = par.iter().sum::<f64>() / n as f64;
        let se = 0.75f64.sqrt() / (n as f64).sqrt();
        assert!((mean - 1.5).abs() <= 3.0 * se, "pareto mean {mean}");
    }

    #[test]
    fn marked_sampling_is_reproducible() {
        let w = Window::ball(vec![0.0, 0.0], 2.0).unwrap();
        let dist = MarkDistribution::Exponential { mean: 1.0 };
        let a = sample_marked_ppp(20.0, &w, &dist, &mut RngStream::new(7, 3)).unwrap();
        let b = sample_marked_ppp(20.0, &w, &dist, &mut RngStream::new(7, 3)).unwrap();
        assert_eq!(a, b);
        let c = sample_marked_ppp(20.0, &w, &dist, &mut RngStream::new(7, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn survival_matches_closed_forms() {
        let det = MarkDistribution::Deterministic { p0: 1.0 };
        assert_eq!(det.survival_geq(0.5), 1.0);
        assert_eq!(det.survival_geq(1.0), 1.0);
        assert_eq!(det.survival_geq(1.5), 0.0);
        let exp = MarkDistribution::Exponential { mean: 2.0 };
        assert!((exp.survival_geq(2.0) - (-1.0f64).exp()).abs() < 1e-15);
        let par = MarkDistribution::Pareto { scale: 1.0, shape: 3.0 };
        assert_eq!(par.survival_geq(0.5), 1.0);
        assert!((par.survival_geq(2.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn csv_dump_has_one_row_per_point() {
        let points = PointConfiguration::new(2, vec![0.5, 1.0, -1.25, 2.0]).unwrap();
        let cfg = MarkedConfiguration {
            window: Window::ball(vec![0.0, 0.0], 3.0).unwrap(),
            intensity: 1.0,
            points,
            marks: vec![1.0, 0.5],
        };
        let mut buf = Vec::new();
        cfg.write_points_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x1,x2,mark\n0.5,1,1\n-1.25,2,0.5\n");
    }

    #[test]
    fn json_round_trip_for_window_and_marks() {
        let w = Window::ball(vec![0.0, 1.0], 2.0).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"kind":"ball","center":[0.0,1.0],"radius":2.0}"#);
        assert_eq!(serde_json::from_str::<Window>(&s).unwrap(), w);

        let d = MarkDistribution::Pareto { scale: 1.0, shape: 3.0 };
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<MarkDistribution>(&s).unwrap(), d);

        // unknown keys must be rejected
        let bad = r#"{"kind":"ball","center":[0.0],"radius":1.0,"extra":1}"#;
        assert!(serde_json::from_str::<Window>(bad).is_err());
    }
}
