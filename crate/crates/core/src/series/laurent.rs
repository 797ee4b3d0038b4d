use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use super::{parse_rat, rat_to_string, Coefficient, Rat, SeriesError};

/// Laurent polynomial in `z = y^{1/2}` with rational coefficients.
///
/// Sparse: only nonzero coefficients are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentZ {
    terms: BTreeMap<i64, Rat>,
}

impl LaurentZ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in iter {
            out.add_term(k, &c);
        }
        out
    }

    /// `z`
    pub fn z() -> Self {
        Self::monomial(1, Rat::one())
    }

    /// `z + z^{-1}`, i.e. `y^{1/2} + y^{-1/2}`.
    pub fn z_plus_zinv() -> Self {
        Self::from_terms([(1, Rat::one()), (-1, Rat::one())])
    }

    /// `z^{-1} - z`, the factor `y^{-1/2} - y^{1/2}` that every refined
    /// expansion is normalized by.
    pub fn zinv_minus_z() -> Self {
        Self::from_terms([(-1, Rat::one()), (1, -Rat::one())])
    }

    fn add_term(&mut self, k: i64, c: &Rat) {
        if Zero::is_zero(c) {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(Rat::zero);
        *entry += c;
        if Zero::is_zero(entry) {
            self.terms.remove(&k);
        }
    }

    pub fn coeff(&self, k: i64) -> Rat {
        self.terms.get(&k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rat)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Value at `z = 1`, the `y = 1` specialization.
    pub fn eval_at_one(&self) -> Rat {
        self.terms.values().fold(Rat::zero(), |acc, c| acc + c)
    }

    /// `z -> z^{-1}`
    pub fn mirror(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, c)| (-k, c.clone())).collect(),
        }
    }

    /// Invariant under `y <-> 1/y`.
    pub fn is_palindromic(&self) -> bool {
        *self == self.mirror()
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if Zero::is_zero(r) {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, c)| (*k, c * r)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Render in powers of `y`, as `c*y^(k/2)` terms by decreasing exponent.
    pub fn to_y_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&format!("{}*y^({}/2)", rat_to_string(&c.abs()), k));
        }
        out
    }
}

impl fmt::Display for LaurentZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_y_string())
    }
}

impl Add for &LaurentZ {
    type Output = LaurentZ;

    fn add(self, rhs: &LaurentZ) -> LaurentZ {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c);
        }
        out
    }
}

impl Sub for &LaurentZ {
    type Output = LaurentZ;

    fn sub(self, rhs: &LaurentZ) -> LaurentZ {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, &-c);
        }
        out
    }
}

impl Mul for &LaurentZ {
    type Output = LaurentZ;

    fn mul(self, rhs: &LaurentZ) -> LaurentZ {
        let mut terms: BTreeMap<i64, Rat> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                *terms.entry(a + b).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !Zero::is_zero(c));
        LaurentZ { terms }
    }
}

impl Neg for &LaurentZ {
    type Output = LaurentZ;

    fn neg(self) -> LaurentZ {
        LaurentZ {
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Coefficient for LaurentZ {
    fn zero_like(&self) -> Self {
        Self::zero()
    }

    fn one_like(&self) -> Self {
        Self::one()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
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
        LaurentZ::scale(self, r)
    }

    /// Only monomials `c z^k` are units.
    fn try_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (k, c) = self.terms.iter().next().unwrap();
        Some(Self::monomial(-k, c.recip()))
    }

    fn to_json(&self) -> Value {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => {
                let coeffs: Vec<Value> = (lo..=hi)
                    .map(|k| Value::String(rat_to_string(&self.coeff(k))))
                    .collect();
                json!({"var": "z", "low": lo, "order": hi, "coeffs": coeffs})
            }
            _ => json!({"var": "z", "low": 0, "order": -1, "coeffs": []}),
        }
    }

    fn from_json(v: &Value) -> Result<Self, SeriesError> {
        let bad = |m: &str| SeriesError::Json(format!("laurent polynomial: {m}"));
        if v.get("var").and_then(Value::as_str) != Some("z") {
            return Err(bad("var must be \"z\""));
        }
        let low = v.get("low").and_then(Value::as_i64).ok_or_else(|| bad("missing low"))?;
        let order = v.get("order").and_then(Value::as_i64).ok_or_else(|| bad("missing order"))?;
        let coeffs = v.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing coeffs"))?;
        let expected = (order - low + 1).max(0) as usize;
        if coeffs.len() != expected {
            return Err(bad("coefficient count does not match [low, order]"));
        }
        let mut out = LaurentZ::zero();
        for (i, c) in coeffs.iter().enumerate() {
            let s = c.as_str().ok_or_else(|| bad("coefficient is not a string"))?;
            out.add_term(low + i as i64, &parse_rat(s)?);
        }
        Ok(out)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(*k, c);
        }
    }
}
