//! Pairwise decision rules: stochastic dominance of orders one to three, the
//! mean-variance criterion, the quadratic-utility rule, and screens built
//! from necessary conditions.
//!
//! Every rule answers the same question about an ordered pair `(F, G)`: does
//! the first dominate the second, the second the first, neither, or are they
//! indistinguishable under the rule.

mod ecdf;

use std::fmt;

pub use ecdf::{ecdf, ecdf_from_values, EmpiricalDistribution};

use crate::distributions::MomentSummary;
use crate::error::{Error, Result};

/// Absolute tolerance for comparisons of CDF values; integral comparisons
/// scale it by the support width raised to the integration order.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    FirstDominates,
    SecondDominates,
    NoDominance,
    Indistinguishable,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::FirstDominates => "FirstDominates",
            Relation::SecondDominates => "SecondDominates",
            Relation::NoDominance => "NoDominance",
            Relation::Indistinguishable => "Indistinguishable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceVerdict {
    pub relation: Relation,
    /// At least one strict inequality was witnessed.
    pub strict: bool,
    /// A point certifying strictness (dominance) or failure (no dominance).
    pub witness: Option<f64>,
}

impl DominanceVerdict {
    fn indistinguishable() -> Self {
        Self {
            relation: Relation::Indistinguishable,
            strict: false,
            witness: None,
        }
    }

    pub fn first_dominates(&self) -> bool {
        self.relation == Relation::FirstDominates
    }

    pub fn second_dominates(&self) -> bool {
        self.relation == Relation::SecondDominates
    }

    /// The verdict for the swapped pair `(G, F)`.
    pub fn reversed(&self) -> Self {
        let relation = match self.relation {
            Relation::FirstDominates => Relation::SecondDominates,
            Relation::SecondDominates => Relation::FirstDominates,
            r => r,
        };
        Self { relation, ..*self }
    }
}

impl fmt::Display for DominanceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        if self.strict {
            write!(f, " (strict)")?;
        }
        Ok(())
    }
}

/// Classifies a set of `(position, value)` checks where `F` dominating `G`
/// requires every value to be non-negative.
fn classify(checks: &[(f64, f64)], tol: f64) -> DominanceVerdict {
    let argmax = checks.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1));
    let argmin = checks.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1));
    let (Some((x_hi, hi)), Some((x_lo, lo))) = (argmax, argmin) else {
        return DominanceVerdict::indistinguishable();
    };
    if hi <= tol && lo >= -tol {
        DominanceVerdict::indistinguishable()
    } else if lo >= -tol {
        DominanceVerdict {
            relation: Relation::FirstDominates,
            strict: true,
            witness: Some(x_hi),
        }
    } else if hi <= tol {
        DominanceVerdict {
            relation: Relation::SecondDominates,
            strict: true,
            witness: Some(x_lo),
        }
    } else {
        DominanceVerdict {
            relation: Relation::NoDominance,
            strict: false,
            witness: Some(x_lo),
        }
    }
}

/// Both CDFs evaluated on the union of their supports.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct MergedGrid {
    pub points: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl MergedGrid {
    pub(crate) fn new(f: &EmpiricalDistribution, g: &EmpiricalDistribution) -> Self {
        let (sf, sg) = (f.support(), g.support());
        let (cf, cg) = (f.cdf_values(), g.cdf_values());
        let cap = sf.len() + sg.len();
        let mut grid = Self {
            points: Vec::with_capacity(cap),
            f: Vec::with_capacity(cap),
            g: Vec::with_capacity(cap),
        };
        let (mut i, mut j) = (0, 0);
        let (mut fv, mut gv) = (0.0, 0.0);
        while i < sf.len() || j < sg.len() {
            let x = match (sf.get(i), sg.get(j)) {
                (Some(&a), Some(&b)) => a.min(b),
                (Some(&a), None) => a,
                (None, Some(&b)) => b,
                (None, None) => unreachable!(),
            };
            if sf.get(i) == Some(&x) {
                fv = cf[i];
                i += 1;
            }
            if sg.get(j) == Some(&x) {
                gv = cg[j];
                j += 1;
            }
            grid.points.push(x);
            grid.f.push(fv);
            grid.g.push(gv);
        }
        grid
    }

    fn span(&self) -> f64 {
        self.points[self.points.len() - 1] - self.points[0]
    }

    /// `(G - F)` on each piece `[x_i, x_{i+1})`.
    fn differences(&self) -> impl Iterator<Item = f64> + '_ {
        self.g.iter().zip(&self.f).map(|(g, f)| g - f)
    }

    /// Running integral of `G - F` at every grid point.
    pub(crate) fn first_integral(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        out.push(acc);
        for (w, d) in self.points.windows(2).zip(self.differences()) {
            acc += d * (w[1] - w[0]);
            out.push(acc);
        }
        out
    }

    /// Second integral of `G - F` at every grid point and at each interior
    /// stationary point (where the first integral crosses zero inside a piece).
    pub(crate) fn second_integral_checks(&self) -> Vec<(f64, f64)> {
        let first = self.first_integral();
        let mut checks = Vec::with_capacity(2 * self.points.len());
        let mut acc = 0.0;
        checks.push((self.points[0], acc));
        for (i, (w, d)) in self.points.windows(2).zip(self.differences()).enumerate() {
            let (x0, h, i0) = (w[0], w[1] - w[0], first[i]);
            if d != 0.0 {
                let tau = -i0 / d;
                if tau > 0.0 && tau < h {
                    checks.push((x0 + tau, acc - i0 * i0 / (2.0 * d)));
                }
            }
            acc += i0 * h + 0.5 * d * h * h;
            checks.push((w[1], acc));
        }
        checks
    }
}

fn fsd_on(grid: &MergedGrid) -> DominanceVerdict {
    let checks: Vec<(f64, f64)> = grid
        .points
        .iter()
        .copied()
        .zip(grid.differences())
        .collect();
    classify(&checks, TOLERANCE)
}

fn ssd_on(grid: &MergedGrid) -> DominanceVerdict {
    let checks: Vec<(f64, f64)> = grid
        .points
        .iter()
        .copied()
        .zip(grid.first_integral())
        .collect();
    classify(&checks, TOLERANCE * grid.span().max(1.0))
}

fn tsd_on(grid: &MergedGrid, mean_diff: f64, mean_scale: f64) -> DominanceVerdict {
    let span = grid.span().max(1.0);
    let tol = TOLERANCE * span * span;
    let mut checks = grid.second_integral_checks();
    // condition (ii), rescaled so one tolerance applies to every check
    let last = grid.points[grid.points.len() - 1];
    let mean_tol = TOLERANCE * mean_scale.max(1.0);
    let mean_check = if mean_diff.abs() <= mean_tol {
        0.0
    } else {
        mean_diff / mean_tol * tol
    };
    checks.push((last, mean_check));
    classify(&checks, tol)
}

/// First-order dominance: `F <= G` pointwise, strictly somewhere.
pub fn fsd_test(f: &EmpiricalDistribution, g: &EmpiricalDistribution) -> DominanceVerdict {
    fsd_on(&MergedGrid::new(f, g))
}

/// Second-order dominance: the running integral of `G - F` is non-negative
/// everywhere and positive somewhere.
pub fn ssd_test(f: &EmpiricalDistribution, g: &EmpiricalDistribution) -> DominanceVerdict {
    ssd_on(&MergedGrid::new(f, g))
}

/// Third-order dominance: the twice-integrated difference is non-negative
/// everywhere and the mean of `F` is at least that of `G`, with one strict.
pub fn tsd_test(f: &EmpiricalDistribution, g: &EmpiricalDistribution) -> DominanceVerdict {
    let scale = f.mean().abs().max(g.mean().abs());
    tsd_on(&MergedGrid::new(f, g), f.mean() - g.mean(), scale)
}

/// Whether equal moments count as mutual dominance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MvcForm {
    /// At least one of the two inequalities must be strict.
    #[default]
    Strict,
    /// Both inequalities weak; equal moments give a non-strict dominance.
    Weak,
}

/// Mean-variance criterion with at least one strict inequality.
pub fn mvc_test(m1: &MomentSummary, m2: &MomentSummary) -> DominanceVerdict {
    mvc_test_with(m1, m2, MvcForm::Strict)
}

pub fn mvc_test_with(m1: &MomentSummary, m2: &MomentSummary, form: MvcForm) -> DominanceVerdict {
    let first = m1.mean >= m2.mean && m1.std <= m2.std;
    let second = m2.mean >= m1.mean && m2.std <= m1.std;
    match (first, second) {
        (true, true) => match form {
            MvcForm::Strict => DominanceVerdict::indistinguishable(),
            MvcForm::Weak => DominanceVerdict {
                relation: Relation::FirstDominates,
                strict: false,
                witness: None,
            },
        },
        (true, false) => DominanceVerdict {
            relation: Relation::FirstDominates,
            strict: true,
            witness: None,
        },
        (false, true) => DominanceVerdict {
            relation: Relation::SecondDominates,
            strict: true,
            witness: None,
        },
        (false, false) => DominanceVerdict {
            relation: Relation::NoDominance,
            strict: false,
            witness: None,
        },
    }
}

/// Left-hand side of the quadratic rule, `2 dmu (K - mean_mu) - dvar`, which
/// equals the expected-utility gap under `U(x) = 2Kx - x^2`.
pub fn quadratic_gap(mean1: f64, var1: f64, mean2: f64, var2: f64, bound: f64) -> f64 {
    let dmu = mean1 - mean2;
    2.0 * dmu * (bound - 0.5 * (mean1 + mean2)) - (var1 - var2)
}

/// Quadratic-utility dominance from moments and a common upper support bound.
pub fn quadratic_dominance_from_moments(
    mean1: f64,
    var1: f64,
    mean2: f64,
    var2: f64,
    upper_bound: f64,
) -> Result<DominanceVerdict> {
    if !upper_bound.is_finite() {
        return Err(Error::Unsupported(
            "quadratic dominance needs bounded supports".into(),
        ));
    }
    let scale = upper_bound.abs().max(mean1.abs()).max(mean2.abs()).max(1.0);
    let tol = TOLERANCE * scale * scale;
    let dmu = mean1 - mean2;
    let gap = quadratic_gap(mean1, var1, mean2, var2, upper_bound);
    let mean_check = if dmu.abs() <= TOLERANCE * scale { 0.0 } else { dmu * scale };
    Ok(classify(&[(upper_bound, mean_check), (upper_bound, gap)], tol))
}

/// Quadratic-utility dominance with the bliss point replaced by the largest
/// outcome of either distribution.
pub fn quadratic_dominance_test(
    f: &EmpiricalDistribution,
    g: &EmpiricalDistribution,
) -> Result<DominanceVerdict> {
    if !(f.max().is_finite() && g.max().is_finite()) {
        return Err(Error::Unsupported(
            "quadratic dominance needs bounded supports".into(),
        ));
    }
    quadratic_dominance_from_moments(f.mean(), f.variance(), g.mean(), g.variance(), f.max().max(g.max()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    First,
    Second,
    Third,
}

impl std::str::FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "first" | "fsd" => Ok(Order::First),
            "2" | "second" | "ssd" => Ok(Order::Second),
            "3" | "third" | "tsd" => Ok(Order::Third),
            other => Err(Error::Usage(format!("unknown dominance order '{other}'"))),
        }
    }
}

/// Necessary conditions for "F dominates G".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NecessaryCondition {
    /// `E_F > E_G` (first order)
    MeanStrict,
    /// `E_F >= E_G` (second and third order)
    MeanWeak,
    /// `min F >= min G`: the left tail of `G` is thicker
    LeftTail,
    /// equal means imply `Var_F <= Var_G`
    VarianceUnderEqualMeans,
    /// equal means and variances imply `Skew_F > Skew_G`
    SkewnessUnderEqualMeanVariance,
}

impl NecessaryCondition {
    pub fn describe(self) -> &'static str {
        match self {
            NecessaryCondition::MeanStrict => "mean: E_F > E_G",
            NecessaryCondition::MeanWeak => "mean: E_F >= E_G",
            NecessaryCondition::LeftTail => "left tail: min_F >= min_G",
            NecessaryCondition::VarianceUnderEqualMeans => "variance: equal means require Var_F <= Var_G",
            NecessaryCondition::SkewnessUnderEqualMeanVariance => {
                "skewness: equal mean and variance require Skew_F > Skew_G"
            }
        }
    }
}

impl fmt::Display for NecessaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Necessary conditions for `F` dominating `G` at `order` that fail. An
/// empty result rules nothing out; it is not a dominance certificate.
pub fn necessary_screen(
    f: &EmpiricalDistribution,
    g: &EmpiricalDistribution,
    order: Order,
) -> Vec<NecessaryCondition> {
    let mut violated = Vec::new();
    let equal_means = nearly_equal(f.mean(), g.mean());
    match order {
        Order::First => {
            if !(f.mean() > g.mean()) || equal_means {
                violated.push(NecessaryCondition::MeanStrict);
            }
        }
        Order::Second | Order::Third => {
            if f.mean() < g.mean() && !equal_means {
                violated.push(NecessaryCondition::MeanWeak);
            }
        }
    }
    if f.min() < g.min() {
        violated.push(NecessaryCondition::LeftTail);
    }
    if matches!(order, Order::Second | Order::Third)
        && equal_means
        && f.variance() > g.variance()
        && !nearly_equal(f.variance(), g.variance())
    {
        violated.push(NecessaryCondition::VarianceUnderEqualMeans);
    }
    if order == Order::Third
        && equal_means
        && nearly_equal(f.variance(), g.variance())
        && !(f.skewness() > g.skewness() && !nearly_equal(f.skewness(), g.skewness()))
    {
        violated.push(NecessaryCondition::SkewnessUnderEqualMeanVariance);
    }
    violated
}
