//! Outcome containers: finite lotteries and empirical samples.

use std::path::Path;

use serde::Deserialize;

use crate::distributions::MomentSummary;
use crate::error::{Error, Result};

/// Probabilities must sum to one within this absolute tolerance.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// A finite lottery: distinct outcomes in increasing order with strictly
/// positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLottery {
    outcomes: Vec<(f64, f64)>,
}

impl DiscreteLottery {
    /// Builds a lottery from `(value, probability)` pairs. Duplicated values are
    /// merged and the result is sorted by value.
    pub fn new(outcomes: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = outcomes.into_iter().collect();
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("lottery has no outcomes".into()));
        }
        for &(v, p) in &atoms {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite outcome {v}")));
            }
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "probability {p} of outcome {v} must be positive"
                )));
            }
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        let total: f64 = merged.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { outcomes: merged })
    }

    /// A lottery paying `value` with certainty.
    pub fn certain(value: f64) -> Result<Self> {
        Self::new([(value, 1.0)])
    }

    pub fn outcomes(&self) -> &[(f64, f64)] {
        &self.outcomes
    }

    pub fn min(&self) -> f64 {
        self.outcomes[0].0
    }

    pub fn max(&self) -> f64 {
        self.outcomes[self.outcomes.len() - 1].0
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().map(|&(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.outcomes.iter().map(|&(v, p)| p * (v - m).powi(2)).sum()
    }

    /// Probability-weighted moments; `n` is the number of distinct outcomes.
    pub fn moments(&self) -> MomentSummary {
        MomentSummary::from_weighted(self.outcomes.iter().copied(), self.outcomes.len())
    }

    /// The same lottery with every outcome moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            outcomes: self.outcomes.iter().map(|&(v, p)| (v + delta, p)).collect(),
        }
    }

    /// Affine map `scale * x + offset` of every outcome; `scale` must be positive.
    pub fn affine(&self, scale: f64, offset: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("affine scale {scale} must be positive")));
        }
        Ok(Self {
            outcomes: self
                .outcomes
                .iter()
                .map(|&(v, p)| (scale * v + offset, p))
                .collect(),
        })
    }

    /// Reads a `value,probability` CSV file.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::ingestion(path, 0, e.to_string()))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::ingestion(path, 1, e.to_string()))?
            .clone();
        if headers.len() != 2 || &headers[0] != "value" || &headers[1] != "probability" {
            return Err(Error::ingestion(
                path,
                1,
                "expected header `value,probability`",
            ));
        }
        #[derive(Deserialize)]
        struct Row {
            value: f64,
            probability: f64,
        }
        let mut atoms = Vec::new();
        for (i, record) in reader.deserialize::<Row>().enumerate() {
            // header occupies line 1
            let row = i + 2;
            let r = record.map_err(|e| Error::ingestion(path, row, e.to_string()))?;
            if !(r.probability > 0.0) {
                return Err(Error::ingestion(path, row, "probability must be positive"));
            }
            atoms.push((r.value, r.probability));
        }
        Self::new(atoms).map_err(|e| Error::ingestion(path, 0, e.to_string()))
    }
}

/// An equally weighted collection of observed or simulated outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty sample".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample value {bad}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_duplicate_outcomes_and_sorts() {
        let l = DiscreteLottery::new([(10.0, 0.3), (5.0, 0.4), (10.0, 0.3)]).unwrap();
        assert_eq!(l.outcomes(), &[(5.0, 0.4), (10.0, 0.6)]);
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(DiscreteLottery::new([(1.0, 0.5), (2.0, 0.4)]).is_err());
        assert!(DiscreteLottery::new([(1.0, 1.2), (2.0, -0.2)]).is_err());
        assert!(DiscreteLottery::new(Vec::<(f64, f64)>::new()).is_err());
    }

    #[test]
    fn worked_example_moments() {
        let z1 = DiscreteLottery::new([(5.0, 0.4), (10.0, 0.6)]).unwrap();
        let z2 = DiscreteLottery::new([(10.0, 0.4), (20.0, 0.6)]).unwrap();
        assert!((z1.mean() - 8.0).abs() < 1e-12);
        assert!((z1.variance() - 6.0).abs() < 1e-12);
        assert!((z2.mean() - 16.0).abs() < 1e-12);
        assert!((z2.variance() - 24.0).abs() < 1e-12);
    }

    #[test]
    fn reads_csv_and_reports_row_on_error() {
        let dir = tempfile::tempdir().unwrap();
        let good = dir.path().join("good.csv");
        std::fs::write(&good, "value,probability\n5,0.8\n30,0.2\n").unwrap();
        let l = DiscreteLottery::from_csv_path(&good).unwrap();
        assert_eq!(l.outcomes().len(), 2);

        let bad = dir.path().join("bad.csv");
        std::fs::write(&bad, "value,probability\n5,0.8\nthirty,0.2\n").unwrap();
        match DiscreteLottery::from_csv_path(&bad) {
            Err(Error::Ingestion { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_sample_is_rejected() {
        assert!(EmpiricalSample::new(vec![]).is_err());
        assert!(EmpiricalSample::new(vec![1.0, f64::NAN]).is_err());
    }
}
