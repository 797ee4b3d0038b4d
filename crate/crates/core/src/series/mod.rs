//! Exact coefficient rings and truncated formal series.
//!
//! Three rings are stacked on top of each other:
//!
//! * [`Rat`], arbitrary precision rationals,
//! * [`LaurentZ`], Laurent polynomials in `z = y^{1/2}` over [`Rat`],
//! * [`TruncSeries`], dense truncated series in one named variable over any
//!   [`Coefficient`] ring, including another `TruncSeries`.
//!
//! When series are nested the order is fixed: `u` (localization) outermost,
//! then `x` or `H`, then `w`/`Q`, and [`LaurentZ`] innermost. The D-series is
//! the one exception, stored as a `w`-series of `x`-series.

mod laurent;
mod rat;
mod special;
mod trunc;

pub use laurent::LaurentZ;
pub use rat::{parse_rat, rat, rat_to_string, Rat};
pub use special::{
    functional_inverse_wq, insertion_series, log_x_coefficients, x_series, x_series_in,
};
pub use trunc::TruncSeries;

use std::fmt;

use serde_json::Value;
use thiserror::Error;

/// Formal variable names used across the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    W,
    X,
    Q,
    U,
    H,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::W => "w",
            Var::X => "x",
            Var::Q => "Q",
            Var::U => "u",
            Var::H => "H",
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "w" => Some(Var::W),
            "x" => Some(Var::X),
            "Q" => Some(Var::Q),
            "u" => Some(Var::U),
            "H" => Some(Var::H),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("variable mismatch: {0} vs {1}")]
    VarMismatch(Var, Var),
    #[error("lowest-order coefficient is not invertible in its ring")]
    NotInvertible,
    #[error("exp requires a series with zero constant term")]
    NonzeroConstantTerm,
    #[error("log requires a series with constant term 1")]
    NotUnitConstantTerm,
    #[error("exponent {exponent} outside stored range [{low}, {order}]")]
    OutOfRange { exponent: i64, low: i64, order: i64 },
    #[error("substituting a series with nonzero constant term into truncated {0} needs infinitely many coefficients")]
    InfiniteSubstitution(Var),
    #[error("substituting into negative powers of {0} requires an invertible leading coefficient")]
    SingularSubstitution(Var),
    #[error("malformed series json: {0}")]
    Json(String),
}

/// A commutative ring with the handful of operations the series code needs.
///
/// Zeros and ones are produced from an existing element so that nested
/// series can carry their variable and truncation along.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale(&self, r: &Rat) -> Self;
    /// Multiplicative inverse, when it exists in the ring.
    fn try_inverse(&self) -> Option<Self>;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, SeriesError>;

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }
}
