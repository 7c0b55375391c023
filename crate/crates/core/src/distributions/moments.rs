use crate::error::Result;
use crate::lottery::EmpiricalSample;

/// First four moments of a sample or lottery.
///
/// Central moments are population (divide-by-n) moments; skewness and
/// kurtosis are standardized by the population standard deviation, kurtosis
/// is non-excess. A zero standard deviation reports skewness and kurtosis as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub mean: f64,
    pub std: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub n: usize,
}

impl MomentSummary {
    pub fn variance(&self) -> f64 {
        self.std * self.std
    }

    pub(crate) fn from_weighted(atoms: impl Iterator<Item = (f64, f64)> + Clone, n: usize) -> Self {
        let mean: f64 = atoms.clone().map(|(v, w)| v * w).sum();
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for (v, w) in atoms {
            let d = v - mean;
            let d2 = d * d;
            m2 += w * d2;
            m3 += w * d2 * d;
            m4 += w * d2 * d2;
        }
        Self::from_central(mean, m2, m3, m4, n)
    }

    fn from_central(mean: f64, m2: f64, m3: f64, m4: f64, n: usize) -> Self {
        let std = m2.max(0.0).sqrt();
        let (skewness, kurtosis) = if std > 0.0 {
            (m3 / (m2 * std), m4 / (m2 * m2))
        } else {
            (0.0, 0.0)
        };
        Self {
            mean,
            std,
            skewness,
            kurtosis,
            n,
        }
    }
}

/// Two-pass sample moments. Summation order is fixed, so the result is
/// bit-identical for identical input.
pub fn moments(sample: &EmpiricalSample) -> Result<MomentSummary> {
    Ok(moments_of(sample.values()))
}

pub(crate) fn moments_of(values: &[f64]) -> MomentSummary {
    debug_assert!(!values.is_empty());
    let n = values.len();
    let inv_n = 1.0 / n as f64;
    let mean = values.iter().sum::<f64>() * inv_n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    MomentSummary::from_central(mean, m2 * inv_n, m3 * inv_n, m4 * inv_n, n)
}
