use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, One};
use serde_json::{json, Map, Value};

use super::{Coefficient, Rat, SeriesError, Var};

/// Dense truncated series `sum_{k=low}^{order} c_k v^k + O(v^{order+1})`.
///
/// Coefficients above `order` are unknown. Every operation propagates the
/// smallest order its inputs justify; nothing ever extends precision.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<C> {
    var: Var,
    low: i64,
    order: i64,
    coeffs: Vec<C>,
    zero: C,
}

fn dense_len(low: i64, order: i64) -> usize {
    (order - low + 1).max(0) as usize
}

impl<C: Coefficient> TruncSeries<C> {
    /// Builds a series from coefficients starting at `low`. Extra
    /// coefficients beyond `order` are dropped, missing ones are zero.
    pub fn new(var: Var, low: i64, order: i64, coeffs: Vec<C>, zero: C) -> Self {
        let mut coeffs = coeffs;
        coeffs.resize(dense_len(low, order), zero.clone());
        Self { var, low, order, coeffs, zero }
    }

    /// Power series with coefficients `c_0, c_1, ...` (needs at least one).
    pub fn from_coeffs(var: Var, coeffs: Vec<C>, order: i64) -> Self {
        let zero = coeffs.first().expect("from_coeffs needs a coefficient").zero_like();
        Self::new(var, 0, order, coeffs, zero)
    }

    pub fn zero(var: Var, order: i64, zero: C) -> Self {
        Self::new(var, 0, order, Vec::new(), zero)
    }

    pub fn constant(var: Var, c: C, order: i64) -> Self {
        let zero = c.zero_like();
        Self::new(var, 0, order, vec![c], zero)
    }

    pub fn monomial(var: Var, c: C, exp: i64, order: i64) -> Self {
        let zero = c.zero_like();
        let low = exp.min(0);
        let mut coeffs = vec![zero.clone(); dense_len(low, order)];
        if exp <= order {
            coeffs[(exp - low) as usize] = c;
        }
        Self { var, low, order, coeffs, zero }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn low(&self) -> i64 {
        self.low
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn zero_coeff(&self) -> &C {
        &self.zero
    }

    /// Stored coefficients, `coeffs()[i]` multiplies `v^{low + i}`.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Exact coefficient of `v^exponent`. Exponents below `low` are known
    /// zeros; exponents above `order` are unknown and rejected.
    pub fn coeff(&self, exponent: i64) -> Result<C, SeriesError> {
        if exponent > self.order {
            return Err(SeriesError::OutOfRange { exponent, low: self.low, order: self.order });
        }
        Ok(self.coeff_or_zero(exponent))
    }

    fn coeff_or_zero(&self, exponent: i64) -> C {
        if exponent < self.low || exponent > self.order {
            self.zero.clone()
        } else {
            self.coeffs[(exponent - self.low) as usize].clone()
        }
    }

    fn get(&self, exponent: i64) -> Option<&C> {
        if exponent < self.low || exponent > self.order {
            None
        } else {
            Some(&self.coeffs[(exponent - self.low) as usize])
        }
    }

    /// Exponent of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.low + i as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Drops coefficients above `order` (no-op when already lower).
    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(dense_len(self.low, order));
        Self::new(self.var, self.low, order, coeffs, self.zero.clone())
    }

    /// Removes stored leading zeros.
    pub fn normalized(&self) -> Self {
        match self.valuation() {
            Some(v) if v > self.low => {
                let skip = (v - self.low) as usize;
                Self::new(self.var, v, self.order, self.coeffs[skip..].to_vec(), self.zero.clone())
            }
            _ => self.clone(),
        }
    }

    /// Multiplication by `v^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { low: self.low + k, order: self.order + k, ..self.clone() }
    }

    pub fn map_coeffs<D: Coefficient>(&self, zero: D, f: impl Fn(&C) -> D) -> TruncSeries<D> {
        TruncSeries::new(self.var, self.low, self.order, self.coeffs.iter().map(f).collect(), zero)
    }

    /// Same coefficients under another variable name.
    pub fn rename(&self, var: Var) -> Self {
        Self { var, ..self.clone() }
    }

    fn check_var(&self, other: &Self) -> Result<(), SeriesError> {
        if self.var == other.var {
            Ok(())
        } else {
            Err(SeriesError::VarMismatch(self.var, other.var))
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        let low = self.low.min(other.low);
        let order = self.order.min(other.order);
        let coeffs = (low..=order)
            .map(|k| match (self.get(k), other.get(k)) {
                (Some(a), Some(b)) => a.add_ref(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => self.zero.clone(),
            })
            .collect();
        Ok(Self::new(self.var, low, order, coeffs, self.zero.clone()))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.try_add(&other.neg_series())
    }

    pub fn neg_series(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(C::neg_ref).collect(),
            ..self.clone()
        }
    }

    /// Scalar multiplication by a rational.
    pub fn scale_rat(&self, r: &Rat) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(),
            ..self.clone()
        }
    }

    /// Multiplication by a ring element.
    pub fn mul_coeff(&self, c: &C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
            ..self.clone()
        }
    }

    /// Exact product, valid up to `min(val(a) + ord(b), val(b) + ord(a))`.
    pub fn try_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_var(other)?;
        let va = self.valuation().unwrap_or(self.order + 1);
        let vb = other.valuation().unwrap_or(other.order + 1);
        let order = (va + other.order).min(vb + self.order);
        Ok(self.mul_to(other, order))
    }

    /// Product truncated at `order` (caller guarantees validity).
    fn mul_to(&self, other: &Self, order: i64) -> Self {
        let low = self.low + other.low;
        let mut coeffs = vec![self.zero.clone(); dense_len(low, order)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let ea = self.low + i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                let e = ea + other.low + j as i64;
                if e > order {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                coeffs[(e - low) as usize].add_assign_ref(&a.mul_ref(b));
            }
        }
        Self::new(self.var, low, order, coeffs, self.zero.clone())
    }

    /// Multiplicative inverse. The leading (lowest nonzero) coefficient must
    /// be a unit; the result is valid to `order - 2 * val`.
    pub fn try_invert(&self) -> Result<Self, SeriesError> {
        let v = self.valuation().ok_or(SeriesError::NotInvertible)?;
        let lead_inv = self.coeff_or_zero(v).try_inverse().ok_or(SeriesError::NotInvertible)?;
        let rel = self.order - v;
        let a: Vec<&C> = (0..=rel).map(|k| self.get(v + k).unwrap()).collect();
        let mut b: Vec<C> = Vec::with_capacity(rel as usize + 1);
        b.push(lead_inv.clone());
        for k in 1..=rel as usize {
            let mut acc = self.zero.clone();
            for j in 1..=k {
                if !a[j].is_zero() {
                    acc.add_assign_ref(&a[j].mul_ref(&b[k - j]));
                }
            }
            b.push(acc.mul_ref(&lead_inv).neg_ref());
        }
        Ok(Self::new(self.var, -v, rel - v, b, self.zero.clone()))
    }

    /// `sum a^k / k!`; the constant term (and anything below it) must vanish.
    pub fn try_exp(&self) -> Result<Self, SeriesError> {
        if (self.low..=self.order.min(0)).any(|k| !self.coeff_or_zero(k).is_zero()) {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let one = self.zero.one_like();
        let n = self.order.max(0) as usize;
        let g: Vec<C> = (0..=n as i64).map(|k| self.coeff_or_zero(k)).collect();
        let mut f: Vec<C> = Vec::with_capacity(n + 1);
        f.push(one);
        for m in 1..=n {
            let mut acc = self.zero.clone();
            for k in 1..=m {
                if !g[k].is_zero() {
                    acc.add_assign_ref(&g[k].mul_ref(&f[m - k]).scale(&Rat::from_integer(BigInt::from(k))));
                }
            }
            f.push(acc.scale(&Rat::new(BigInt::one(), BigInt::from(m))));
        }
        Ok(Self::new(self.var, 0, self.order, f, self.zero.clone()))
    }

    /// Logarithm of a series with constant term exactly 1.
    pub fn try_log(&self) -> Result<Self, SeriesError> {
        if (self.low..0).any(|k| !self.coeff_or_zero(k).is_zero()) || !self.coeff_or_zero(0).is_one() {
            return Err(SeriesError::NotUnitConstantTerm);
        }
        let n = self.order.max(0) as usize;
        let f: Vec<C> = (0..=n as i64).map(|k| self.coeff_or_zero(k)).collect();
        let mut g: Vec<C> = vec![self.zero.clone(); n + 1];
        for m in 1..=n {
            let mut acc = f[m].scale(&Rat::from_integer(BigInt::from(m)));
            for k in 1..m {
                if !g[k].is_zero() && !f[m - k].is_zero() {
                    acc = acc.sub_ref(&g[k].mul_ref(&f[m - k]).scale(&Rat::from_integer(BigInt::from(k))));
                }
            }
            g[m] = acc.scale(&Rat::new(BigInt::one(), BigInt::from(m)));
        }
        Ok(Self::new(self.var, 0, self.order, g, self.zero.clone()))
    }

    /// Integer power; negative exponents go through [`Self::try_invert`].
    pub fn try_pow(&self, n: i64) -> Result<Self, SeriesError> {
        if n == 0 {
            return Ok(Self::constant(self.var, self.zero.one_like(), self.order.max(0)));
        }
        let mut sq = if n < 0 { self.try_invert()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc: Option<Self> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.try_mul(&sq)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.try_mul(&sq)?;
        }
        Ok(acc.unwrap())
    }

    /// Composition: replaces this series' variable by `value`.
    ///
    /// `value` must have positive valuation unless this series is known
    /// exactly to a finite degree; negative powers additionally need an
    /// invertible leading coefficient. With `value = c v + O(v^2)` and this
    /// series known to order `n`, the result is valid to `v^n` (less when
    /// `value` itself is truncated).
    pub fn substitute(&self, variable: Var, value: &Self) -> Result<Self, SeriesError> {
        if variable != self.var {
            return Err(SeriesError::VarMismatch(self.var, variable));
        }
        let zero = self.zero.clone();
        let out_var = value.var;
        let host_nonzero: Vec<i64> = (self.low..=self.order)
            .filter(|k| !self.coeff_or_zero(*k).is_zero())
            .collect();
        let Some(v) = value.valuation() else {
            // value is zero to its precision: only the constant term survives
            if host_nonzero.iter().any(|k| *k < 0) {
                return Err(SeriesError::SingularSubstitution(self.var));
            }
            let order = (value.order + 1) * (self.order + 1) - 1;
            return Ok(TruncSeries::constant(out_var, self.coeff_or_zero(0), order.max(0)));
        };
        if v <= 0 {
            return Err(SeriesError::InfiniteSubstitution(self.var));
        }
        let rel = value.order - v;
        let order = host_nonzero
            .iter()
            .filter(|k| **k != 0)
            .map(|k| k * v + rel)
            .fold(v * (self.order + 1) - 1, i64::min);
        let mut result = TruncSeries::zero(out_var, order, zero.clone());
        if host_nonzero.iter().any(|k| *k < 0) {
            let inv = value.try_invert().map_err(|_| SeriesError::SingularSubstitution(self.var))?;
            let mut p = TruncSeries::constant(out_var, zero.one_like(), order.max(0));
            for k in (self.low..0).rev() {
                p = p.mul_to(&inv, order);
                let c = self.coeff_or_zero(k);
                if !c.is_zero() {
                    result = result.try_add(&p.mul_coeff(&c).truncate(order))?;
                }
            }
        }
        let c0 = self.coeff_or_zero(0);
        if !c0.is_zero() {
            result = result.try_add(&TruncSeries::constant(out_var, c0, order))?;
        }
        let mut p = TruncSeries::constant(out_var, zero.one_like(), order.max(0));
        for k in 1..=self.order {
            p = p.mul_to(value, order);
            let c = self.coeff_or_zero(k);
            if !c.is_zero() {
                result = result.try_add(&p.mul_coeff(&c))?;
            }
        }
        Ok(result.truncate(order))
    }
}

impl<C: Coefficient> Coefficient for TruncSeries<C> {
    fn zero_like(&self) -> Self {
        Self::zero(self.var, self.order, self.zero.clone())
    }

    fn one_like(&self) -> Self {
        Self::constant(self.var, self.zero.one_like(), self.order)
    }

    fn is_zero(&self) -> bool {
        TruncSeries::is_zero(self)
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.try_add(other).expect("series add")
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.try_sub(other).expect("series sub")
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.try_mul(other).expect("series mul")
    }

    fn neg_ref(&self) -> Self {
        self.neg_series()
    }

    fn scale(&self, r: &Rat) -> Self {
        self.scale_rat(r)
    }

    fn try_inverse(&self) -> Option<Self> {
        self.try_invert().ok()
    }

    fn is_one(&self) -> bool {
        self.valuation() == Some(0)
            && self.coeff_or_zero(0).is_one()
            && (1..=self.order).all(|k| self.coeff_or_zero(k).is_zero())
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("var".into(), json!(self.var.name()));
        m.insert("low".into(), json!(self.low));
        m.insert("order".into(), json!(self.order));
        m.insert("coeffs".into(), Value::Array(self.coeffs.iter().map(C::to_json).collect()));
        if self.coeffs.is_empty() {
            m.insert("zero".into(), self.zero.to_json());
        }
        Value::Object(m)
    }

    fn from_json(v: &Value) -> Result<Self, SeriesError> {
        let bad = |m: &str| SeriesError::Json(format!("series: {m}"));
        let var = v
            .get("var")
            .and_then(Value::as_str)
            .and_then(Var::from_name)
            .ok_or_else(|| bad("missing or unknown var"))?;
        let low = v.get("low").and_then(Value::as_i64).ok_or_else(|| bad("missing low"))?;
        let order = v.get("order").and_then(Value::as_i64).ok_or_else(|| bad("missing order"))?;
        let raw = v.get("coeffs").and_then(Value::as_array).ok_or_else(|| bad("missing coeffs"))?;
        if raw.len() != dense_len(low, order) {
            return Err(bad("coefficient count does not match [low, order]"));
        }
        let coeffs = raw.iter().map(C::from_json).collect::<Result<Vec<C>, _>>()?;
        let zero = match coeffs.first() {
            Some(c) => c.zero_like(),
            None => C::from_json(v.get("zero").ok_or_else(|| bad("empty series without zero"))?)?,
        };
        Ok(Self::new(var, low, order, coeffs, zero))
    }
}

impl<C: Coefficient> Add for &TruncSeries<C> {
    type Output = TruncSeries<C>;

    fn add(self, rhs: Self) -> TruncSeries<C> {
        self.try_add(rhs).expect("series add")
    }
}

impl<C: Coefficient> Sub for &TruncSeries<C> {
    type Output = TruncSeries<C>;

    fn sub(self, rhs: Self) -> TruncSeries<C> {
        self.try_sub(rhs).expect("series sub")
    }
}

impl<C: Coefficient> Mul for &TruncSeries<C> {
    type Output = TruncSeries<C>;

    fn mul(self, rhs: Self) -> TruncSeries<C> {
        self.try_mul(rhs).expect("series mul")
    }
}

impl<C: Coefficient> Neg for &TruncSeries<C> {
    type Output = TruncSeries<C>;

    fn neg(self) -> TruncSeries<C> {
        self.neg_series()
    }
}
