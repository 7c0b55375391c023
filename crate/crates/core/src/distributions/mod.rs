//! Parametric families, sampling, moments and moment-matching solvers.

pub mod gev;
mod moments;
pub mod skew_normal;
pub mod stable;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Open01, StandardNormal};
use serde::{Deserialize, Serialize};

pub use moments::{moments, MomentSummary};
pub(crate) use moments::moments_of;

use crate::error::{Error, Result};
use crate::lottery::EmpiricalSample;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Normal,
    Laplace,
    #[serde(alias = "skewn", alias = "skew_normal")]
    SkewNormal,
    #[serde(alias = "extreme")]
    Gev,
    Stable,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Laplace => "laplace",
            Family::SkewNormal => "skewnormal",
            Family::Gev => "gev",
            Family::Stable => "stable",
        }
    }

    /// Normal and Laplace have zero skewness by construction.
    pub fn is_symmetric(self) -> bool {
        matches!(self, Family::Normal | Family::Laplace)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(Family::Normal),
            "laplace" => Ok(Family::Laplace),
            "skewnormal" | "skew_normal" | "skewn" => Ok(Family::SkewNormal),
            "gev" | "extreme" => Ok(Family::Gev),
            "stable" => Ok(Family::Stable),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

/// A fully specified member of one of the five families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyParams {
    Normal { mean: f64, std: f64 },
    Laplace { location: f64, scale: f64 },
    SkewNormal { location: f64, scale: f64, shape: f64 },
    Gev { location: f64, scale: f64, shape: f64 },
    Stable { stability: f64, skew: f64, scale: f64, location: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

impl FamilyParams {
    pub fn family(&self) -> Family {
        match self {
            FamilyParams::Normal { .. } => Family::Normal,
            FamilyParams::Laplace { .. } => Family::Laplace,
            FamilyParams::SkewNormal { .. } => Family::SkewNormal,
            FamilyParams::Gev { .. } => Family::Gev,
            FamilyParams::Stable { .. } => Family::Stable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilyParams::Normal { mean, std } => {
                finite("mean", mean)?;
                positive("std", std)
            }
            FamilyParams::Laplace { location, scale } => {
                finite("location", location)?;
                positive("scale", scale)
            }
            FamilyParams::SkewNormal { location, scale, shape } => {
                finite("location", location)?;
                finite("shape", shape)?;
                positive("scale", scale)
            }
            FamilyParams::Gev { location, scale, shape } => {
                finite("location", location)?;
                positive("scale", scale)?;
                if shape.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("GEV shape must be finite, got {shape}")))
                }
            }
            FamilyParams::Stable { stability, skew, scale, location } => {
                finite("location", location)?;
                positive("scale", scale)?;
                if !(stability > 1.0 && stability <= 2.0) {
                    return Err(Error::InvalidParameter(format!(
                        "stability must lie in (1, 2], got {stability}"
                    )));
                }
                if !(-1.0..=1.0).contains(&skew) {
                    return Err(Error::InvalidParameter(format!(
                        "stable skew must lie in [-1, 1], got {skew}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Population (mean, std, skewness) when all three exist.
    pub fn population_moments(&self) -> Option<(f64, f64, f64)> {
        match *self {
            FamilyParams::Normal { mean, std } => Some((mean, std, 0.0)),
            FamilyParams::Laplace { location, scale } => {
                Some((location, std::f64::consts::SQRT_2 * scale, 0.0))
            }
            FamilyParams::SkewNormal { location, scale, shape } => {
                Some(skew_normal::population_moments(location, scale, shape))
            }
            FamilyParams::Gev { location, scale, shape } if shape < 1.0 / 3.0 => {
                Some(gev::population_moments(location, scale, shape))
            }
            FamilyParams::Stable { stability, scale, location, .. } if stability == 2.0 => {
                Some((location, std::f64::consts::SQRT_2 * scale, 0.0))
            }
            _ => None,
        }
    }

    /// Fills `out` with draws from `rng`.
    ///
    /// Each family consumes the stream in a fixed pattern that does not depend
    /// on the parameter values, so two members of one family driven by equal
    /// seeds are coupled draw-for-draw.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match *self {
            FamilyParams::Normal { mean, std } => {
                for x in out.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *x = mean + std * z;
                }
            }
            FamilyParams::Laplace { location, scale } => {
                for x in out.iter_mut() {
                    let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
                    *x = location - scale * u.signum() * (-2.0 * u.abs()).ln_1p();
                }
            }
            FamilyParams::SkewNormal { location, scale, shape } => {
                for x in out.iter_mut() {
                    *x = skew_normal::draw(rng, location, scale, shape);
                }
            }
            FamilyParams::Gev { location, scale, shape } => {
                for x in out.iter_mut() {
                    *x = gev::draw(rng, location, scale, shape);
                }
            }
            FamilyParams::Stable { stability, skew, scale, location } => {
                let cms = stable::Cms::new(stability, skew);
                for x in out.iter_mut() {
                    *x = stable::draw(rng, &cms, scale, location);
                }
            }
        }
    }
}

/// Draws `n` values; identical `(params, n, seed)` give bit-identical output.
pub fn sample(params: &FamilyParams, n: usize, seed: u64) -> Result<EmpiricalSample> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let mut rng = seed::rng(seed);
    let mut values = vec![0.0; n];
    params.fill(&mut rng, &mut values);
    EmpiricalSample::new(values)
}

/// Target population moments for the solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTarget {
    pub mean: f64,
    pub std: f64,
    #[serde(default)]
    pub skewness: Option<f64>,
}

impl MomentTarget {
    pub fn new(mean: f64, std: f64, skewness: Option<f64>) -> Result<Self> {
        let t = Self { mean, std, skewness };
        t.validate()?;
        Ok(t)
    }

    pub fn symmetric(mean: f64, std: f64) -> Result<Self> {
        Self::new(mean, std, None)
    }

    pub fn validate(&self) -> Result<()> {
        finite("target mean", self.mean)?;
        positive("target std", self.std)?;
        if let Some(s) = self.skewness {
            finite("target skewness", s)?;
        }
        Ok(())
    }
}

/// Parameters of `family` whose population mean, std and (where applicable)
/// skewness equal `target`.
pub fn solve_params_for_moments(family: Family, target: MomentTarget) -> Result<FamilyParams> {
    target.validate()?;
    let MomentTarget { mean, std, skewness } = target;
    match family {
        Family::Normal | Family::Laplace => {
            if skewness.is_some_and(|s| s != 0.0) {
                return Err(Error::InfeasibleTarget(format!(
                    "{family} is symmetric; skewness target must be absent"
                )));
            }
            Ok(if family == Family::Normal {
                FamilyParams::Normal { mean, std }
            } else {
                FamilyParams::Laplace {
                    location: mean,
                    scale: std / std::f64::consts::SQRT_2,
                }
            })
        }
        Family::SkewNormal => {
            let (location, scale, shape) = skew_normal::solve(mean, std, skewness.unwrap_or(0.0))?;
            Ok(FamilyParams::SkewNormal { location, scale, shape })
        }
        Family::Gev => {
            let s = skewness.ok_or_else(|| {
                Error::InfeasibleTarget("GEV target requires a skewness".into())
            })?;
            let (location, scale, shape) = gev::solve(mean, std, s)?;
            Ok(FamilyParams::Gev { location, scale, shape })
        }
        Family::Stable => Err(Error::Unsupported(
            "stable laws with stability < 2 have no population variance; use sample-moment acceptance".into(),
        )),
    }
}

/// Coefficients of the location-scale representation `X = r + beta Y + gamma Z`
/// recovered from `E[X]`, `Var[X]`, the riskless rate and `E[Y]`.
pub fn gls_coefficients(mean_x: f64, var_x: f64, r: f64, mean_y: f64) -> Result<(f64, f64)> {
    if mean_y == 0.0 {
        return Err(Error::Domain("E[Y] must be non-zero".into()));
    }
    let beta = (mean_x - r) / mean_y;
    let radicand = var_x - beta * beta;
    if radicand < 0.0 {
        return Err(Error::InfeasibleTarget(format!(
            "variance {var_x} is smaller than beta^2 = {}",
            beta * beta
        )));
    }
    Ok((beta, radicand.sqrt()))
}
