//! Decision rules for pairs of risky prospects and the Monte Carlo and
//! empirical machinery for measuring how often the mean-variance criterion
//! agrees with expected-utility rankings.

pub mod distributions;
pub mod dominance;
pub mod empirical;
pub mod error;
pub mod lottery;
pub mod seed;
pub mod simulation;
pub mod utility;

pub use error::{Error, ErrorClass, Result};
pub use lottery::{DiscreteLottery, EmpiricalSample};
