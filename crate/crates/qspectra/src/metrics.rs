//! Distribution distances: Kolmogorov (sup-norm) and Levy.
//!
//! Both work on anything implementing [`Cdf`]; the implementations supplied
//! here are the empirical step function of a sorted sample and the
//! Marchenko-Pastur law. Sups are taken over the one-sided limits at every
//! critical point, which is exhaustive because both CDFs are monotone and
//! piecewise continuous between those points.

use crate::mp::MPLaw;
use crate::spectra::SpectralSample;

/// A cumulative distribution function with enumerable discontinuities.
pub trait Cdf {
    /// Right-continuous value `F(x)`.
    fn eval(&self, x: f64) -> f64;
    /// Left limit `F(x-)`.
    fn eval_left(&self, x: f64) -> f64;
    /// Jump locations and support endpoints; candidate points for sups.
    fn critical_points(&self) -> Vec<f64>;
}

/// Empirical CDF of a sorted sample: equal mass at every point.
#[derive(Debug, Clone)]
pub struct StepCdf {
    points: Vec<f64>,
}

impl StepCdf {
    pub fn new(mut points: Vec<f64>) -> Self {
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        StepCdf { points }
    }

    pub fn from_sample(s: &SpectralSample) -> Self {
        StepCdf {
            points: s.eigenvalues.clone(),
        }
    }
}

impl Cdf for StepCdf {
    fn eval(&self, x: f64) -> f64 {
        let count = self.points.partition_point(|&p| p <= x);
        count as f64 / self.points.len() as f64
    }

    fn eval_left(&self, x: f64) -> f64 {
        let count = self.points.partition_point(|&p| p < x);
        count as f64 / self.points.len() as f64
    }

    fn critical_points(&self) -> Vec<f64> {
        let mut pts = self.points.clone();
        pts.dedup();
        pts
    }
}

impl Cdf for MPLaw {
    fn eval(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    fn eval_left(&self, x: f64) -> f64 {
        if x == 0.0 {
            self.cdf(x) - self.atom_mass()
        } else {
            self.cdf(x)
        }
    }

    fn critical_points(&self) -> Vec<f64> {
        vec![0.0, self.a, self.b]
    }
}

/// Kolmogorov distance `sup_x |F(x) - G(x)|`, evaluating both one-sided
/// limits at every critical point of either argument.
pub fn kolmogorov_distance(f: &dyn Cdf, g: &dyn Cdf) -> f64 {
    let mut sup = 0.0f64;
    for x in f
        .critical_points()
        .into_iter()
        .chain(g.critical_points())
    {
        sup = sup.max((f.eval(x) - g.eval(x)).abs());
        sup = sup.max((f.eval_left(x) - g.eval_left(x)).abs());
    }
    sup
}

/// Largest violation of the Levy corridor
/// `F(x - eps) - eps <= G(x) <= F(x + eps) + eps` over all `x`;
/// nonpositive iff `eps` is feasible.
fn corridor_violation(f: &dyn Cdf, g: &dyn Cdf, eps: f64) -> f64 {
    let mut candidates: Vec<f64> = Vec::new();
    for s in f.critical_points() {
        candidates.extend([s - eps, s, s + eps]);
    }
    for t in g.critical_points() {
        candidates.extend([t - eps, t, t + eps]);
    }
    let mut worst = f64::NEG_INFINITY;
    for &x in &candidates {
        worst = worst.max(g.eval(x) - f.eval(x + eps) - eps);
        worst = worst.max(g.eval_left(x) - f.eval_left(x + eps) - eps);
        worst = worst.max(f.eval(x - eps) - eps - g.eval(x));
        worst = worst.max(f.eval_left(x - eps) - eps - g.eval_left(x));
    }
    worst
}

/// Levy distance, by bisection on the corridor width to absolute error
/// `1e-6`.
pub fn levy_distance(f: &dyn Cdf, g: &dyn Cdf) -> f64 {
    if corridor_violation(f, g, 0.0) <= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0f64; // infeasible
    let mut hi = 1.0f64; // always feasible for CDFs
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if corridor_violation(f, g, mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_step_functions() {
        let f = StepCdf::new(vec![0.0, 1.0, 2.0]);
        let g = StepCdf::new(vec![0.0, 1.0, 2.0]);
        assert_eq!(kolmogorov_distance(&f, &g), 0.0);
        assert_eq!(levy_distance(&f, &g), 0.0);
    }

    #[test]
    fn ks_of_shifted_atoms() {
        let f = StepCdf::new(vec![0.0, 0.0, 1.0, 1.0]);
        let g = StepCdf::new(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(kolmogorov_distance(&f, &g), 0.25);
    }

    #[test]
    fn levy_of_translated_unit_steps() {
        let f = StepCdf::new(vec![0.0]);
        let g = StepCdf::new(vec![0.3]);
        let l = levy_distance(&f, &g);
        assert!((l - 0.3).abs() <= 1e-6, "levy {l}");
        // Brute-force epsilon scan agrees.
        let mut brute = 1.0;
        let mut eps = 0.0;
        while eps <= 1.0 {
            if corridor_violation(&f, &g, eps) <= 0.0 {
                brute = eps;
                break;
            }
            eps += 1e-4;
        }
        assert!((l - brute).abs() <= 2e-4);
    }

    #[test]
    fn levy_never_exceeds_ks() {
        let f = StepCdf::new(vec![0.1, 0.4, 0.4, 2.0]);
        let g = StepCdf::new(vec![0.0, 0.3, 1.0, 1.5]);
        let ks = kolmogorov_distance(&f, &g);
        let l = levy_distance(&f, &g);
        assert!(l <= ks + 1e-6, "levy {l} > ks {ks}");
    }

    #[test]
    fn distances_to_mp_law_are_sane() {
        let law = MPLaw::new(0.5, 1.0).unwrap();
        // A crude three-point approximation of the law.
        let f = StepCdf::new(vec![0.2, 0.9, 2.2]);
        let ks = kolmogorov_distance(&f, &law);
        let l = levy_distance(&f, &law);
        assert!(ks > 0.0 && ks <= 1.0);
        assert!(l > 0.0 && l <= ks + 1e-6);
    }

    #[test]
    fn ks_against_law_with_atom() {
        let law = MPLaw::new(2.0, 1.0).unwrap();
        // Empirical distribution with exactly the right atom at zero and
        // quantile-spaced points through the continuous part.
        let mut pts = vec![0.0; 50];
        for i in 0..50 {
            let target = law.atom_mass() + 0.5 * (i as f64 + 0.5) / 50.0;
            let (mut lo, mut hi) = law.support();
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if law.cdf(mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            pts.push(0.5 * (lo + hi));
        }
        let f = StepCdf::new(pts);
        let ks = kolmogorov_distance(&f, &law);
        assert!(ks < 0.05, "ks {ks}");
    }
}
