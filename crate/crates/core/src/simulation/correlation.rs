use crate::distributions::moments_of;
use crate::error::{Error, Result};
use crate::lottery::EmpiricalSample;
use crate::utility::{ExpansionPoint, Prospect, UtilitySpec};

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "one of the series has zero variance".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Correlation across lotteries between the exact expected utility and the
/// expected quadratic approximation built from each lottery's mean and
/// variance.
pub fn correlation_study(lotteries: &[EmpiricalSample], spec: &UtilitySpec, mode: ExpansionPoint) -> Result<f64> {
    if lotteries.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "correlation needs at least 3 lotteries, got {}",
            lotteries.len()
        )));
    }
    let mut exact = Vec::with_capacity(lotteries.len());
    let mut approx = Vec::with_capacity(lotteries.len());
    for z in lotteries {
        exact.push(z.expected_utility(spec)?);
        let m = moments_of(z.values());
        approx.push(spec.expected_quadratic(m.mean, m.variance(), mode)?);
    }
    pearson(&exact, &approx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Vec<f64> {
        (0..200).map(|i| ((i as f64) * 0.37).sin() * 0.1).collect()
    }

    #[test]
    fn shifted_lotteries_correlate_perfectly() {
        let lotteries: Vec<_> = (0..5)
            .map(|k| EmpiricalSample::new(base().iter().map(|x| x + 0.01 * k as f64).collect()).unwrap())
            .collect();
        let r = correlation_study(&lotteries, &UtilitySpec::log(1.0).unwrap(), ExpansionPoint::AroundMean).unwrap();
        assert!((r - 1.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn needs_three_lotteries() {
        let z = EmpiricalSample::new(base()).unwrap();
        let u = UtilitySpec::log(1.0).unwrap();
        assert!(correlation_study(&[z.clone(), z], &u, ExpansionPoint::AroundMean).is_err());
    }

    #[test]
    fn identical_lotteries_have_undefined_correlation() {
        let z = EmpiricalSample::new(base()).unwrap();
        let u = UtilitySpec::log(1.0).unwrap();
        let r = correlation_study(&[z.clone(), z.clone(), z], &u, ExpansionPoint::AroundMean);
        assert!(matches!(r, Err(Error::UndefinedCorrelation(_))));
    }
}
