//! Alpha-stable draws via the Chambers-Mallows-Stuck transform.
//!
//! Parameterization is `S(alpha, beta, scale, location)` with `alpha` in
//! `(1, 2]`, so the mean exists and equals `location`. At `alpha = 2` the law
//! is Gaussian with variance `2 scale^2`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Exp1, Open01};

/// Precomputed constants of the transform for one `(alpha, beta)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Cms {
    alpha: f64,
    shift: f64,
    factor: f64,
}

impl Cms {
    pub(crate) fn new(alpha: f64, beta: f64) -> Self {
        let t = beta * (PI * alpha / 2.0).tan();
        Self {
            alpha,
            shift: t.atan() / alpha,
            factor: (1.0 + t * t).powf(1.0 / (2.0 * alpha)),
        }
    }

    /// Standardized draw from a uniform angle `v` in `(-pi/2, pi/2)` and a
    /// unit exponential `w`.
    pub(crate) fn transform(&self, v: f64, w: f64) -> f64 {
        let a = self.alpha;
        let arg = a * (v + self.shift);
        self.factor * arg.sin() / v.cos().powf(1.0 / a) * ((v - arg).cos() / w).powf((1.0 - a) / a)
    }
}

/// One draw; consumes one uniform and one exponential.
pub(crate) fn draw<R: Rng + ?Sized>(rng: &mut R, cms: &Cms, scale: f64, location: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * u - FRAC_PI_2;
    let w: f64 = rng.sample(Exp1);
    location + scale * cms.transform(v, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_two_is_gaussian_with_double_variance() {
        // the transform collapses to 2 sin(v) sqrt(w) at alpha = 2
        let cms = Cms::new(2.0, 0.7);
        for &(v, w) in &[(0.3, 1.2), (-1.1, 0.4), (1.4, 2.5)] {
            let x: f64 = cms.transform(v, w);
            assert!((x - 2.0 * f64::sin(v) * f64::sqrt(w)).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_case_is_odd_in_the_angle() {
        let cms = Cms::new(1.7, 0.0);
        let a = cms.transform(0.5, 1.3);
        let b = cms.transform(-0.5, 1.3);
        assert!((a + b).abs() < 1e-12);
    }

    #[test]
    fn sample_median_and_mean_for_symmetric_law() {
        let cms = Cms::new(1.8, 0.0);
        let mut rng = crate::seed::rng(11);
        let mut xs: Vec<f64> = (0..200_000).map(|_| draw(&mut rng, &cms, 1.0, 0.5)).collect();
        xs.sort_by(f64::total_cmp);
        let median = xs[xs.len() / 2];
        assert!((median - 0.5).abs() < 0.02, "median {median}");
    }

    #[test]
    fn positive_beta_skews_right() {
        let cms = Cms::new(1.5, 1.0);
        let mut rng = crate::seed::rng(5);
        let xs: Vec<f64> = (0..50_000).map(|_| draw(&mut rng, &cms, 1.0, 0.0)).collect();
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // totally skewed to the right: the left tail is light
        assert!(hi > 10.0 * lo.abs());
    }
}
