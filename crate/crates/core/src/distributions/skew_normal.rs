//! Azzalini skew-normal: location `xi`, scale `omega`, shape `alpha`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Supremum of |skewness| over all shapes, approached as |shape| -> infinity.
pub const MAX_ABS_SKEWNESS: f64 = 0.995_271_746_431_156_2;

/// `delta = shape / sqrt(1 + shape^2)`.
pub fn delta(shape: f64) -> f64 {
    shape / (1.0 + shape * shape).sqrt()
}

pub fn skewness_from_delta(delta: f64) -> f64 {
    let b = delta * (2.0 / PI).sqrt();
    0.5 * (4.0 - PI) * b.powi(3) / (1.0 - b * b).powf(1.5)
}

/// Inverts [`skewness_from_delta`] in closed form.
pub fn delta_from_skewness(skewness: f64) -> Result<f64> {
    if !skewness.is_finite() || skewness.abs() >= MAX_ABS_SKEWNESS {
        return Err(Error::InfeasibleTarget(format!(
            "skew-normal skewness must satisfy |s| < {MAX_ABS_SKEWNESS}, got {skewness}"
        )));
    }
    // with b = delta*sqrt(2/pi): |s| = (4-pi)/2 * t^3 where t = b/sqrt(1-b^2)
    let t = (2.0 * skewness.abs() / (4.0 - PI)).cbrt();
    let b2 = t * t / (1.0 + t * t);
    let d = (b2 * PI / 2.0).sqrt();
    Ok(d.copysign(skewness))
}

pub fn shape_from_delta(delta: f64) -> f64 {
    delta / (1.0 - delta * delta).sqrt()
}

/// Population (mean, std, skewness).
pub fn population_moments(location: f64, scale: f64, shape: f64) -> (f64, f64, f64) {
    let d = delta(shape);
    let b = d * (2.0 / PI).sqrt();
    let mean = location + scale * b;
    let std = scale * (1.0 - b * b).sqrt();
    (mean, std, skewness_from_delta(d))
}

/// Parameters `(location, scale, shape)` with the given mean, std and skewness.
pub fn solve(mean: f64, std: f64, skewness: f64) -> Result<(f64, f64, f64)> {
    let d = delta_from_skewness(skewness)?;
    let b = d * (2.0 / PI).sqrt();
    let scale = std / (1.0 - b * b).sqrt();
    let location = mean - scale * b;
    Ok((location, scale, shape_from_delta(d)))
}

/// One draw; always consumes exactly two standard normals regardless of
/// parameters, so coupled lotteries stay aligned draw-for-draw.
pub(crate) fn draw<R: Rng + ?Sized>(rng: &mut R, location: f64, scale: f64, shape: f64) -> f64 {
    let d = delta(shape);
    let u0: f64 = rng.sample(StandardNormal);
    let u1: f64 = rng.sample(StandardNormal);
    location + scale * (d * u0.abs() + (1.0 - d * d).sqrt() * u1)
}
