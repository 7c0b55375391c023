use crate::distributions::moments_of;
use crate::error::{Error, Result};
use crate::lottery::{DiscreteLottery, EmpiricalSample};

/// Right-continuous step CDF over a finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    support: Vec<f64>,
    cdf: Vec<f64>,
    mean: f64,
    variance: f64,
    skewness: f64,
}

impl EmpiricalDistribution {
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// `F` at each support point.
    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn skewness(&self) -> f64 {
        self.skewness
    }

    pub fn min(&self) -> f64 {
        self.support[0]
    }

    pub fn max(&self) -> f64 {
        self.support[self.support.len() - 1]
    }

    /// `F(x)`: 0 below the support, 1 at and above its maximum.
    pub fn eval(&self, x: f64) -> f64 {
        // number of support points <= x
        let k = self.support.partition_point(|&s| s <= x);
        if k == 0 {
            0.0
        } else {
            self.cdf[k - 1]
        }
    }

    /// Probability mass at each support point.
    pub fn masses(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mut prev = 0.0;
        self.support.iter().zip(&self.cdf).map(move |(&x, &c)| {
            let m = c - prev;
            prev = c;
            (x, m)
        })
    }
}

impl From<&DiscreteLottery> for EmpiricalDistribution {
    fn from(lottery: &DiscreteLottery) -> Self {
        let outcomes = lottery.outcomes();
        let support: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let mut cdf = Vec::with_capacity(outcomes.len());
        let mut acc = 0.0;
        for &(_, p) in outcomes {
            acc += p;
            cdf.push(acc);
        }
        // probabilities sum to one within tolerance; pin the last step
        *cdf.last_mut().expect("non-empty lottery") = 1.0;
        let m = lottery.moments();
        Self {
            support,
            cdf,
            mean: m.mean,
            variance: m.variance(),
            skewness: m.skewness,
        }
    }
}

impl From<&EmpiricalSample> for EmpiricalDistribution {
    fn from(sample: &EmpiricalSample) -> Self {
        let mut sorted = sample.values().to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut support = Vec::new();
        let mut cdf = Vec::new();
        for (i, &x) in sorted.iter().enumerate() {
            if i + 1 == n || sorted[i + 1] != x {
                support.push(x);
                cdf.push((i + 1) as f64 / n as f64);
            }
        }
        let m = moments_of(sample.values());
        Self {
            support,
            cdf,
            mean: m.mean,
            variance: m.variance(),
            skewness: m.skewness,
        }
    }
}

/// Builds the step CDF of a lottery or sample.
pub fn ecdf<T>(input: &T) -> EmpiricalDistribution
where
    for<'a> &'a T: Into<EmpiricalDistribution>,
{
    input.into()
}

/// Step CDF of raw values; fails on empty or non-finite input.
pub fn ecdf_from_values(values: &[f64]) -> Result<EmpiricalDistribution> {
    if values.is_empty() {
        return Err(Error::Domain("cannot build a CDF from no values".into()));
    }
    let sample = EmpiricalSample::new(values.to_vec())?;
    Ok((&sample).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lottery_cdf_jumps_equal_probabilities() {
        let z1 = DiscreteLottery::new([(5.0, 0.4), (10.0, 0.6)]).unwrap();
        let f = ecdf(&z1);
        assert_eq!(f.eval(5.0), 0.4);
        assert_eq!(f.eval(10.0), 1.0);
        assert_eq!(f.eval(4.999), 0.0);
        assert_eq!(f.eval(7.0), 0.4);
        assert_eq!(f.eval(1e9), 1.0);
    }

    #[test]
    fn single_value_is_unit_step() {
        let f = ecdf(&DiscreteLottery::certain(2.5).unwrap());
        assert_eq!(f.support(), &[2.5]);
        assert_eq!(f.eval(2.4), 0.0);
        assert_eq!(f.eval(2.5), 1.0);
    }

    #[test]
    fn sample_counts_multiplicity() {
        let f = ecdf_from_values(&[1.0, 2.0, 1.0]).unwrap();
        assert_eq!(f.support(), &[1.0, 2.0]);
        assert!((f.eval(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(f.eval(2.0), 1.0);
        let masses: Vec<_> = f.masses().collect();
        assert!((masses[1].1 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_input_fails() {
        assert!(ecdf_from_values(&[]).is_err());
    }
}
