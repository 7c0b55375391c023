//! Utility families with closed-form derivatives, absolute risk aversion,
//! expected utility and second-order Taylor machinery.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lottery::{DiscreteLottery, EmpiricalSample};

/// Sample draws at or below a utility's domain edge are moved to
/// `edge + CLAMP_OFFSET`.
pub const CLAMP_OFFSET: f64 = 1e-6;

/// Largest tolerated fraction of clamped draws in one sample.
pub const CLAMP_BUDGET: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityFamily {
    /// `(1 + z)^a`, `0 < a < 1`
    Power,
    /// `ln(a + z)`, `a > 0`
    Log,
    /// `-exp(-a (1 + z))`, `a > 0`
    NegExp,
    /// `-(1 + z)^(-a)`, `a > 0`
    NegPower,
}

impl UtilityFamily {
    pub fn name(self) -> &'static str {
        match self {
            UtilityFamily::Power => "power",
            UtilityFamily::Log => "log",
            UtilityFamily::NegExp => "negexp",
            UtilityFamily::NegPower => "negpower",
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            UtilityFamily::Power => "(1+Z)^a",
            UtilityFamily::Log => "log(a+Z)",
            UtilityFamily::NegExp => "-exp(-a(1+Z))",
            UtilityFamily::NegPower => "-(1+Z)^(-a)",
        }
    }
}

impl std::str::FromStr for UtilityFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "power" | "pow" => Ok(UtilityFamily::Power),
            "log" | "ln" => Ok(UtilityFamily::Log),
            "negexp" | "exp" => Ok(UtilityFamily::NegExp),
            "negpower" | "negpow" => Ok(UtilityFamily::NegPower),
            other => Err(Error::InvalidParameter(format!("unknown utility family '{other}'"))),
        }
    }
}

/// A utility function in U_3: increasing, concave, with non-negative third
/// derivative on its domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilitySpec {
    family: UtilityFamily,
    a: f64,
}

impl fmt::Display for UtilitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(a={})", self.family.name(), self.a)
    }
}

impl UtilitySpec {
    pub fn new(family: UtilityFamily, a: f64) -> Result<Self> {
        let ok = a.is_finite()
            && match family {
                UtilityFamily::Power => a > 0.0 && a < 1.0,
                UtilityFamily::Log | UtilityFamily::NegExp | UtilityFamily::NegPower => a > 0.0,
            };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "parameter a={a} outside the admissible range for {}",
                family.formula()
            )));
        }
        let spec = Self { family, a };
        spec.check_class()?;
        Ok(spec)
    }

    pub fn power(a: f64) -> Result<Self> {
        Self::new(UtilityFamily::Power, a)
    }
    pub fn log(a: f64) -> Result<Self> {
        Self::new(UtilityFamily::Log, a)
    }
    pub fn neg_exp(a: f64) -> Result<Self> {
        Self::new(UtilityFamily::NegExp, a)
    }
    pub fn neg_power(a: f64) -> Result<Self> {
        Self::new(UtilityFamily::NegPower, a)
    }

    pub fn family(&self) -> UtilityFamily {
        self.family
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Stable identifier such as `negexp_a20`.
    pub fn id(&self) -> String {
        let a = format!("{}", self.a);
        // Keep ids short for parameters like 1/3.
        let a = if a.len() > 8 {
            format!("{:.4}", self.a).trim_end_matches('0').to_string()
        } else {
            a
        };
        format!("{}_a{}", self.family.name(), a)
    }

    /// Exclusive lower edge of the domain (`-inf` for the exponential family).
    pub fn domain_lower(&self) -> f64 {
        match self.family {
            UtilityFamily::Power | UtilityFamily::NegPower => -1.0,
            UtilityFamily::Log => -self.a,
            UtilityFamily::NegExp => f64::NEG_INFINITY,
        }
    }

    pub fn in_domain(&self, z: f64) -> bool {
        z.is_finite() && z > self.domain_lower()
    }

    fn check_domain(&self, z: f64) -> Result<()> {
        if self.in_domain(z) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{} is outside the domain of {} (z > {})",
                z,
                self,
                self.domain_lower()
            )))
        }
    }

    /// Evenly spaced interior points of the domain, used for class checks.
    pub fn domain_grid(&self, n: usize) -> Vec<f64> {
        let lower = match self.family {
            UtilityFamily::NegExp => -2.0,
            _ => self.domain_lower() + 0.05,
        };
        let upper = 2.0;
        (0..n)
            .map(|i| lower + (upper - lower) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn check_class(&self) -> Result<()> {
        for z in self.domain_grid(100) {
            let (u1, u2, u3) = self.derivatives_unchecked(z);
            if !(u1 > 0.0 && u2 < 0.0 && u3 >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{self} violates U'>0, U''<0, U'''>=0 at z={z}"
                )));
            }
        }
        Ok(())
    }

    fn value_unchecked(&self, z: f64) -> f64 {
        let a = self.a;
        match self.family {
            UtilityFamily::Power => (1.0 + z).powf(a),
            UtilityFamily::Log => (a + z).ln(),
            UtilityFamily::NegExp => -(-a * (1.0 + z)).exp(),
            UtilityFamily::NegPower => -(1.0 + z).powf(-a),
        }
    }

    fn derivatives_unchecked(&self, z: f64) -> (f64, f64, f64) {
        let a = self.a;
        match self.family {
            UtilityFamily::Power => {
                let x = 1.0 + z;
                let u1 = a * x.powf(a - 1.0);
                let u2 = u1 * (a - 1.0) / x;
                (u1, u2, u2 * (a - 2.0) / x)
            }
            UtilityFamily::Log => {
                let x = a + z;
                let u1 = 1.0 / x;
                let u2 = -u1 / x;
                (u1, u2, -2.0 * u2 / x)
            }
            UtilityFamily::NegExp => {
                let e = (-a * (1.0 + z)).exp();
                (a * e, -a * a * e, a * a * a * e)
            }
            UtilityFamily::NegPower => {
                let x = 1.0 + z;
                let u1 = a * x.powf(-a - 1.0);
                let u2 = -u1 * (a + 1.0) / x;
                (u1, u2, -u2 * (a + 2.0) / x)
            }
        }
    }

    pub fn value(&self, z: f64) -> Result<f64> {
        self.check_domain(z)?;
        Ok(self.value_unchecked(z))
    }

    /// `(U', U'', U''')` at `z`.
    pub fn derivatives(&self, z: f64) -> Result<(f64, f64, f64)> {
        self.check_domain(z)?;
        Ok(self.derivatives_unchecked(z))
    }

    /// Absolute risk aversion `-U''/U'`.
    pub fn ara(&self, z: f64) -> Result<f64> {
        self.check_domain(z)?;
        let a = self.a;
        Ok(match self.family {
            UtilityFamily::Power => (1.0 - a) / (1.0 + z),
            UtilityFamily::Log => 1.0 / (a + z),
            UtilityFamily::NegExp => a,
            UtilityFamily::NegPower => (1.0 + a) / (1.0 + z),
        })
    }

    /// Second-order Taylor polynomial around `center`.
    pub fn taylor2(&self, center: f64) -> Result<QuadraticApprox> {
        let c0 = self.value(center)?;
        let (u1, u2, _) = self.derivatives_unchecked(center);
        Ok(QuadraticApprox {
            center,
            c0,
            c1: u1,
            c2: 0.5 * u2,
        })
    }

    /// Table rows `(z, U(z), Q(z))` with `Q` expanded around 0.
    pub fn approx_table(&self, grid: &[f64]) -> Result<Vec<ApproxRow>> {
        let q = self.taylor2(0.0)?;
        grid.iter()
            .map(|&z| {
                Ok(ApproxRow {
                    z,
                    utility: self.value(z)?,
                    approx: q.eval(z),
                })
            })
            .collect()
    }

    /// Expected `Q_Z` from mean and variance alone.
    pub fn expected_quadratic(&self, mean: f64, var: f64, mode: ExpansionPoint) -> Result<f64> {
        if !(var >= 0.0) {
            return Err(Error::Domain(format!("variance {var} must be non-negative")));
        }
        match mode {
            ExpansionPoint::AroundMean => {
                let q = self.taylor2(mean)?;
                Ok(q.c0 + q.c2 * var)
            }
            ExpansionPoint::AroundZero => {
                let q = self.taylor2(0.0)?;
                Ok(q.c0 + q.c1 * mean + q.c2 * (mean * mean + var))
            }
        }
    }

    /// Utility of a sample draw after applying the clamping policy. Returns
    /// the value and whether the draw was clamped.
    #[inline]
    pub(crate) fn clamped_value(&self, z: f64) -> (f64, bool) {
        let lower = self.domain_lower();
        if z > lower {
            (self.value_unchecked(z), false)
        } else {
            (self.value_unchecked(lower + CLAMP_OFFSET), true)
        }
    }
}

/// The point a quadratic approximation is expanded around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionPoint {
    AroundMean,
    AroundZero,
}

/// `Q(z) = c0 + c1 (z - center) + c2 (z - center)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticApprox {
    pub center: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl QuadraticApprox {
    pub fn eval(&self, z: f64) -> f64 {
        let d = z - self.center;
        self.c0 + self.c1 * d + self.c2 * d * d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxRow {
    pub z: f64,
    pub utility: f64,
    pub approx: f64,
}

/// Anything expected utility can be taken over.
pub trait Prospect {
    /// Expected utility; fails if an outcome is outside the domain.
    fn expected_utility(&self, spec: &UtilitySpec) -> Result<f64>;
}

impl Prospect for DiscreteLottery {
    fn expected_utility(&self, spec: &UtilitySpec) -> Result<f64> {
        self.outcomes()
            .iter()
            .map(|&(v, p)| Ok(p * spec.value(v)?))
            .sum()
    }
}

impl Prospect for EmpiricalSample {
    /// Equal-weighted average under the clamping policy; fails when more than
    /// [`CLAMP_BUDGET`] of the draws needed clamping.
    fn expected_utility(&self, spec: &UtilitySpec) -> Result<f64> {
        sample_expected_utility(self.values(), spec).map(|e| e.value)
    }
}

pub fn expected_utility<P: Prospect + ?Sized>(prospect: &P, spec: &UtilitySpec) -> Result<f64> {
    prospect.expected_utility(spec)
}

/// Sample expected utility with clamping bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedExpectation {
    pub value: f64,
    pub clamped: usize,
}

impl ClampedExpectation {
    pub fn clamped_fraction(&self, n: usize) -> f64 {
        self.clamped as f64 / n as f64
    }
}

pub(crate) fn sample_expected_utility(values: &[f64], spec: &UtilitySpec) -> Result<ClampedExpectation> {
    let mut sum = 0.0;
    let mut clamped = 0usize;
    for &z in values {
        let (u, c) = spec.clamped_value(z);
        sum += u;
        clamped += usize::from(c);
    }
    if clamped as f64 > CLAMP_BUDGET * values.len() as f64 {
        return Err(Error::ClampBudget {
            utility: spec.to_string(),
            clamped,
            n: values.len(),
        });
    }
    Ok(ClampedExpectation {
        value: sum / values.len() as f64,
        clamped,
    })
}

/// The 24 utilities of the agreement study, in table order.
pub fn standard_panel() -> Vec<UtilitySpec> {
    const POWER: [f64; 4] = [0.01, 0.1, 0.5, 0.9];
    const LOG: [f64; 2] = [0.9, 1.0];
    const NEG_EXP: [f64; 8] = [0.7, 1.0, 3.0, 5.0, 8.0, 10.0, 15.0, 20.0];
    const NEG_POWER: [f64; 10] = [0.01, 0.3, 0.5, 1.0, 3.0, 5.0, 8.0, 10.0, 15.0, 20.0];
    let families = [
        (UtilityFamily::Power, &POWER[..]),
        (UtilityFamily::Log, &LOG[..]),
        (UtilityFamily::NegExp, &NEG_EXP[..]),
        (UtilityFamily::NegPower, &NEG_POWER[..]),
    ];
    families
        .iter()
        .flat_map(|&(family, params)| {
            params
                .iter()
                .map(move |&a| UtilitySpec::new(family, a).expect("panel members lie in U_3"))
        })
        .collect()
}

/// Grid of the classic approximation table: -60% to 100% in steps of 10%.
pub fn approx_table_grid() -> Vec<f64> {
    (-6..=10).map(|i| i as f64 / 10.0).collect()
}

/// `ln(1+z)`, `(1+z)^(1/2)` and `(1+z)^(1/3)`.
pub fn approx_table_utilities() -> [UtilitySpec; 3] {
    [
        UtilitySpec::log(1.0).unwrap(),
        UtilitySpec::power(0.5).unwrap(),
        UtilitySpec::power(1.0 / 3.0).unwrap(),
    ]
}

/// Round half away from zero to `decimals` places. A relative guard of a
/// few ulps keeps exact decimal ties like 0.655 from falling the wrong way.
pub fn round_half_away(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    let s = x * scale;
    let guarded = s + s.signum() * s.abs().max(1.0) * 1e-12;
    guarded.round() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn values_at_simple_points() {
        assert_eq!(UtilitySpec::log(1.0).unwrap().value(0.0).unwrap(), 0.0);
        assert_eq!(UtilitySpec::neg_exp(1.0).unwrap().value(-1.0).unwrap(), -1.0);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let log = UtilitySpec::log(1.0).unwrap();
        assert!(matches!(log.value(-1.0), Err(Error::Domain(_))));
        assert!(matches!(log.value(f64::NAN), Err(Error::Domain(_))));
        let p = UtilitySpec::neg_power(2.0).unwrap();
        assert!(p.derivatives(-1.5).is_err());
        assert!(p.ara(-1.0).is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(UtilitySpec::power(1.0).is_err());
        assert!(UtilitySpec::power(0.0).is_err());
        assert!(UtilitySpec::log(0.0).is_err());
        assert!(UtilitySpec::neg_exp(-1.0).is_err());
        assert!(UtilitySpec::neg_power(f64::INFINITY).is_err());
    }

    #[test]
    fn power_half_derivatives_at_zero() {
        let (u1, u2, u3) = UtilitySpec::power(0.5).unwrap().derivatives(0.0).unwrap();
        assert!(close(u1, 0.5, 1e-15));
        assert!(close(u2, -0.25, 1e-15));
        assert!(close(u3, 0.375, 1e-15));
    }

    #[test]
    fn neg_exp_first_derivative_at_minus_one() {
        let (u1, _, _) = UtilitySpec::neg_exp(3.0).unwrap().derivatives(-1.0).unwrap();
        assert_eq!(u1, 3.0);
    }

    #[test]
    fn ara_closed_forms() {
        assert_eq!(UtilitySpec::neg_exp(3.0).unwrap().ara(0.37).unwrap(), 3.0);
        assert_eq!(UtilitySpec::log(1.0).unwrap().ara(0.0).unwrap(), 1.0);
        assert_eq!(UtilitySpec::neg_power(1.0).unwrap().ara(0.0).unwrap(), 2.0);
    }

    #[test]
    fn taylor_of_log_matches_classic_row() {
        let q = UtilitySpec::log(1.0).unwrap().taylor2(0.0).unwrap();
        assert!(close(q.eval(-0.6), -0.78, 1e-12));
        let q = UtilitySpec::power(0.5).unwrap().taylor2(0.0).unwrap();
        assert!(close(q.eval(-0.6), 0.655, 1e-12));
    }

    #[test]
    fn taylor_reproduces_value_at_center() {
        for spec in standard_panel() {
            let q = spec.taylor2(0.1).unwrap();
            assert_eq!(q.eval(0.1), spec.value(0.1).unwrap());
            assert!(q.c1 > 0.0 && q.c2 < 0.0);
        }
    }

    #[test]
    fn expected_quadratic_examples() {
        let log = UtilitySpec::log(1.0).unwrap();
        let v = log.expected_quadratic(0.01, 0.0064, ExpansionPoint::AroundZero).unwrap();
        assert!(close(v, 0.00675, 1e-15));
        let u = log.expected_quadratic(0.2, 0.0, ExpansionPoint::AroundMean).unwrap();
        assert_eq!(u, log.value(0.2).unwrap());
        let lo = log.expected_quadratic(0.01, 0.01, ExpansionPoint::AroundMean).unwrap();
        let hi = log.expected_quadratic(0.01, 0.02, ExpansionPoint::AroundMean).unwrap();
        assert!(hi < lo);
        assert!(log.expected_quadratic(0.0, -1.0, ExpansionPoint::AroundMean).is_err());
    }

    #[test]
    fn lottery_expected_utility() {
        let l = DiscreteLottery::certain(0.3).unwrap();
        let spec = UtilitySpec::neg_power(3.0).unwrap();
        assert_eq!(expected_utility(&l, &spec).unwrap(), spec.value(0.3).unwrap());
        let bad = DiscreteLottery::certain(-2.0).unwrap();
        assert!(expected_utility(&bad, &UtilitySpec::log(1.0).unwrap()).is_err());
    }

    #[test]
    fn clamping_budget() {
        let log = UtilitySpec::log(1.0).unwrap();
        let mut v = vec![0.0; 20_000];
        v[0] = -1.5;
        v[1] = -1.0;
        let e = sample_expected_utility(&v, &log).unwrap();
        assert_eq!(e.clamped, 2);
        v[2] = -3.0;
        assert!(matches!(
            sample_expected_utility(&v, &log),
            Err(Error::ClampBudget { clamped: 3, .. })
        ));
    }

    #[test]
    fn panel_has_24_members() {
        let panel = standard_panel();
        assert_eq!(panel.len(), 24);
        assert_eq!(panel[0].id(), "power_a0.01");
        assert_eq!(panel[23].id(), "negpower_a20");
    }

    #[test]
    fn rounding_ties_go_away_from_zero() {
        assert_eq!(round_half_away(0.655, 2), 0.66);
        assert_eq!(round_half_away(-0.625, 2), -0.63);
        assert_eq!(round_half_away(0.255, 2), 0.26);
        assert_eq!(round_half_away(-0.345, 2), -0.35);
        assert_eq!(round_half_away(0.0, 2), 0.0);
    }
}
