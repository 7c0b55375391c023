//! Generalized extreme value family.
//!
//! `F(x) = exp(-(1 + k (x - location) / scale)^(-1/k))`, with the Gumbel law
//! at `k = 0`. Positive `k` gives a heavy right tail; skewness exists for
//! `k < 1/3` and increases monotonically in `k`.

use rand::Rng;
use rand_distr::Open01;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const ZETA3: f64 = 1.202_056_903_159_594_3;

/// Skewness of the Gumbel law, `12 sqrt(6) zeta(3) / pi^3`.
pub fn gumbel_skewness() -> f64 {
    12.0 * 6f64.sqrt() * ZETA3 / std::f64::consts::PI.powi(3)
}

/// Below this |k| the gamma-function moment formulas lose precision to
/// cancellation and the Gumbel limit is used instead.
const GUMBEL_BAND: f64 = 1e-3;

/// Shape bracket searched by the solver.
pub const SHAPE_MIN: f64 = -1.0 / 3.0;
pub const SHAPE_MAX: f64 = 1.0 / 3.0 - 1e-4;

const SKEW_TOLERANCE: f64 = 1e-10;

fn gammas(k: f64) -> (f64, f64, f64) {
    (
        libm::tgamma(1.0 - k),
        libm::tgamma(1.0 - 2.0 * k),
        libm::tgamma(1.0 - 3.0 * k),
    )
}

fn skewness_direct(k: f64) -> f64 {
    let (g1, g2, g3) = gammas(k);
    let num = g3 - 3.0 * g1 * g2 + 2.0 * g1.powi(3);
    let den = (g2 - g1 * g1).powf(1.5);
    num / den * k.signum()
}

/// Population skewness as a function of shape.
pub fn skewness(k: f64) -> f64 {
    if k.abs() < GUMBEL_BAND {
        // linear bridge through the Gumbel value
        let g0 = gumbel_skewness();
        let edge = if k >= 0.0 { GUMBEL_BAND } else { -GUMBEL_BAND };
        let ge = skewness_direct(edge);
        g0 + (ge - g0) * (k / edge)
    } else {
        skewness_direct(k)
    }
}

/// `(E[Y], sd[Y])` of the standardized variable `Y = (X - location) / scale`.
fn standard_mean_std(k: f64) -> (f64, f64) {
    if k.abs() < 1e-8 {
        return (EULER_GAMMA, std::f64::consts::PI / 6f64.sqrt());
    }
    let (g1, g2, _) = gammas(k);
    ((g1 - 1.0) / k, (g2 - g1 * g1).sqrt() / k.abs())
}

/// Population (mean, std, skewness); moments require `k < 1/3`.
pub fn population_moments(location: f64, scale: f64, k: f64) -> (f64, f64, f64) {
    let (m, s) = standard_mean_std(k);
    (location + scale * m, scale * s, skewness(k))
}

/// Bisection for the shape whose skewness equals `target`.
pub fn shape_for_skewness(target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (SHAPE_MIN, SHAPE_MAX);
    let (s_lo, s_hi) = (skewness(lo), skewness(hi));
    if !(target > s_lo && target < s_hi) {
        return Err(Error::InfeasibleTarget(format!(
            "GEV skewness {target} outside solvable range ({s_lo:.6}, {s_hi:.1})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = skewness(mid) - target;
        if r.abs() <= SKEW_TOLERANCE {
            return Ok(mid);
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    // the skewness curve is steep near 1/3; accept the floating-point limit
    if (skewness(mid) - target).abs() <= 1e-6 {
        Ok(mid)
    } else {
        Err(Error::InfeasibleTarget(format!(
            "GEV shape bisection did not converge for skewness {target}"
        )))
    }
}

/// Parameters `(location, scale, shape)` with the given mean, std and skewness.
pub fn solve(mean: f64, std: f64, skew: f64) -> Result<(f64, f64, f64)> {
    let k = shape_for_skewness(skew)?;
    let (m, s) = standard_mean_std(k);
    let scale = std / s;
    Ok((mean - scale * m, scale, k))
}

/// Inverse-CDF draw from one open-interval uniform.
pub(crate) fn draw<R: Rng + ?Sized>(rng: &mut R, location: f64, scale: f64, k: f64) -> f64 {
    let u: f64 = rng.sample(Open01);
    let e = -u.ln();
    if k.abs() < 1e-12 {
        location - scale * e.ln()
    } else {
        location + scale * (e.powf(-k) - 1.0) / k
    }
}
