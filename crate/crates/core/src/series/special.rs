//! The fixed series every refined computation is built from.

use num::{BigInt, One};

use super::{LaurentZ, Rat, TruncSeries, Var};

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `(z^{-1} - z e^{-x e}) / e` with `e = z^{-1} - z`, i.e.
/// `1 + z (1 - e^{-x e}) / e`, expanded without dividing by `e`.
///
/// This is the point-insertion factor, and also the numerator of
/// `X_{-y}(x)` after cancelling `x e`.
pub fn insertion_series(var: Var, order: i64) -> TruncSeries<LaurentZ> {
    let eps = LaurentZ::zinv_minus_z();
    let z = LaurentZ::z();
    let mut coeffs = vec![LaurentZ::one()];
    let mut eps_pow = LaurentZ::one();
    for k in 1..=order.max(0) as u64 {
        let sign = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        let c = (&z * &eps_pow).scale(&Rat::new(sign, factorial(k)));
        coeffs.push(c);
        eps_pow = &eps_pow * &eps;
    }
    TruncSeries::from_coeffs(var, coeffs, order)
}

/// `(1 - e^{-x e}) / (x e)`, a unit power series.
fn todd_denominator(var: Var, order: i64) -> TruncSeries<LaurentZ> {
    let eps = LaurentZ::zinv_minus_z();
    let mut coeffs = Vec::new();
    let mut eps_pow = LaurentZ::one();
    for k in 0..=order.max(0) as u64 {
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        coeffs.push(eps_pow.scale(&Rat::new(sign, factorial(k + 1))));
        eps_pow = &eps_pow * &eps;
    }
    TruncSeries::from_coeffs(var, coeffs, order)
}

/// `X_{-y}(v) = v (z^{-1} - z e^{-v e}) / (1 - e^{-v e})` in the variable `var`.
///
/// Numerator and denominator both start with `v e`; the factor is cancelled
/// before dividing since `e` is not a unit in [`LaurentZ`].
pub fn x_series_in(var: Var, order: i64) -> TruncSeries<LaurentZ> {
    let den = todd_denominator(var, order)
        .try_invert()
        .expect("constant term is 1");
    &insertion_series(var, order) * &den
}

/// `X_{-y}(x)` to order `x^order`. Constant term 1, and `X = 1 + x` at `z = 1`.
pub fn x_series(order: i64) -> TruncSeries<LaurentZ> {
    x_series_in(Var::X, order)
}

/// Coefficients `l_0 = 0, l_1, ..., l_order` of `log X_{-y}(x)`.
pub fn log_x_coefficients(order: i64) -> Vec<LaurentZ> {
    x_series(order)
        .try_log()
        .expect("constant term is 1")
        .coeffs()
        .to_vec()
}

/// The series `w(Q)` solving `1/Q = w + 1/w - z - 1/z`, i.e.
/// `w = Q (1 + w^2 - (z + 1/z) w)`, to order `Q^order`.
///
/// Each fixed-point iteration fixes one more coefficient.
pub fn functional_inverse_wq(order: i64) -> TruncSeries<LaurentZ> {
    let order = order.max(1);
    let s = LaurentZ::z_plus_zinv();
    let q = TruncSeries::monomial(Var::Q, LaurentZ::one(), 1, order);
    let mut w = q.clone();
    for _ in 0..order {
        let w2 = &w * &w;
        let inner = &(&TruncSeries::constant(Var::Q, LaurentZ::one(), order) + &w2) - &w.mul_coeff(&s);
        let next = (&q * &inner).truncate(order);
        if next == w {
            break;
        }
        w = next;
    }
    w
}

