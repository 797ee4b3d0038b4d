use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde_json::Value;

use super::{Coefficient, SeriesError};

/// Exact rational number, always in lowest terms with positive denominator.
pub type Rat = BigRational;

/// Shorthand for `num/den` as a [`Rat`].
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// `p/q`, or just `p` for integers.
pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

pub fn parse_rat(s: &str) -> Result<Rat, SeriesError> {
    let r = Rat::from_str(s.trim()).map_err(|_| SeriesError::Json(format!("bad rational {s:?}")))?;
    if r.denom().is_negative() {
        return Ok(Rat::new(-r.numer().clone(), -r.denom().clone()));
    }
    Ok(r)
}

impl Coefficient for Rat {
    fn zero_like(&self) -> Self {
        Rat::zero()
    }

    fn one_like(&self) -> Self {
        Rat::one()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn neg_ref(&self) -> Self {
        -self
    }

    fn scale(&self, r: &Rat) -> Self {
        self * r
    }

    fn try_inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn to_json(&self) -> Value {
        Value::String(rat_to_string(self))
    }

    fn from_json(v: &Value) -> Result<Self, SeriesError> {
        match v {
            Value::String(s) => parse_rat(s),
            Value::Number(n) if n.is_i64() => Ok(Rat::from_integer(BigInt::from(n.as_i64().unwrap()))),
            other => Err(SeriesError::Json(format!("expected rational string, got {other}"))),
        }
    }

    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}
