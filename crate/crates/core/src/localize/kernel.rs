use num::{BigInt, One};

use super::LocalizeError;
use crate::series::{insertion_series, log_x_coefficients, x_series_in, LaurentZ, Rat, TruncSeries, Var};
use crate::toric::EquivLineBundle;

/// The closed-form integrands the engine knows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Integrand {
    /// Equivariant Euler class of the tangent bundle.
    EulerTangent,
    /// `X_{-y}(T S^[n])`.
    ChiY,
    /// `X_{-y}(T) c_n(L^[n] e^x) / X_{-y}(L^[n] e^x)`.
    D,
    /// `c_n(L^[n](1)) c(T) c(O(1))^chi / c(L^[n](1)) H^m` on `S^[n] x P^{chi-1}`.
    ChernY1 { m: i64 },
    /// `c_n(L^[n](1)) X(T) X(O(1))^{delta+1} I(H)^m H^m / X(L^[n](1))`,
    /// `delta = chi - 1 - m`.
    Eq7 { m: i64 },
}

impl Integrand {
    pub fn label(&self) -> String {
        match self {
            Integrand::EulerTangent => "euler".into(),
            Integrand::ChiY => "chi_y".into(),
            Integrand::D => "d".into(),
            Integrand::ChernY1 { m } => format!("chern_y1:{m}"),
            Integrand::Eq7 { m } => format!("eq7:{m}"),
        }
    }
}

/// Fixed-point independent data of an integrand.
///
/// For a genus `f` on tangent roots and `g` on tautological roots shifted by
/// the variable `x` (or `H`), with `log g(t) = sum_k l_k t^k`,
///
/// ```text
///   sum_j log g(b_j u + x) = n log g(x) + sum_{a>=1} p_a(b) u^a A_a(x),
///   A_a(x) = sum_e l_{a+e} C(a+e, a) x^e.
/// ```
///
/// The `n log g(x)` part and any projective factors go into `prefactor`.
pub(super) struct Kernel {
    euler_only: bool,
    var: Var,
    order: i64,
    tangent_log: Vec<LaurentZ>,
    taut: Option<Vec<TruncSeries<LaurentZ>>>,
    n: usize,
    prefactor: Option<TruncSeries<LaurentZ>>,
}

fn log_one_plus(order: i64) -> Vec<LaurentZ> {
    let mut out = vec![LaurentZ::zero()];
    for k in 1..=order.max(0) {
        let sign = if k % 2 == 1 { BigInt::one() } else { -BigInt::one() };
        out.push(LaurentZ::constant(Rat::new(sign, BigInt::from(k))));
    }
    out
}

fn binomial(n: i64, k: i64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn taut_series(log: &[LaurentZ], var: Var, top: usize, order: i64) -> Vec<TruncSeries<LaurentZ>> {
    (0..=top as i64)
        .map(|a| {
            let coeffs = (0..=order)
                .map(|e| log[(a + e) as usize].scale(&Rat::from_integer(binomial(a + e, a))))
                .collect();
            TruncSeries::from_coeffs(var, coeffs, order)
        })
        .collect()
}

fn one_plus(var: Var, order: i64) -> TruncSeries<LaurentZ> {
    TruncSeries::from_coeffs(var, vec![LaurentZ::one(), LaurentZ::one()], order)
}

impl Kernel {
    pub(super) fn new(integrand: &Integrand, bundle: &EquivLineBundle, n: usize, order: i64) -> Result<Self, LocalizeError> {
        let top = 2 * n;
        let depth = top as i64 + order.max(0);
        let mut k = Kernel {
            euler_only: false,
            var: Var::X,
            order: 0,
            tangent_log: Vec::new(),
            taut: None,
            n,
            prefactor: None,
        };
        let h_monomial = |m: i64, order: i64| TruncSeries::monomial(Var::H, LaurentZ::one(), m, order);
        match integrand {
            Integrand::EulerTangent => k.euler_only = true,
            Integrand::ChiY => k.tangent_log = log_x_coefficients(top as i64),
            Integrand::D => {
                let log = log_x_coefficients(depth);
                k.order = order;
                k.taut = Some(taut_series(&log, Var::X, top, order));
                k.tangent_log = log;
                k.prefactor = Some(x_series_in(Var::X, order).try_pow(-(n as i64))?);
            }
            Integrand::ChernY1 { m } => {
                let chi = bundle.chi();
                let log = log_one_plus(depth);
                k.var = Var::H;
                k.order = order;
                k.taut = Some(taut_series(&log, Var::H, top, order));
                k.tangent_log = log;
                let p = one_plus(Var::H, order).try_pow(chi - n as i64)?;
                k.prefactor = Some(p.try_mul(&h_monomial(*m, order))?);
            }
            Integrand::Eq7 { m } => {
                let delta = bundle.chi() - 1 - m;
                let log = log_x_coefficients(depth);
                k.var = Var::H;
                k.order = order;
                k.taut = Some(taut_series(&log, Var::H, top, order));
                k.tangent_log = log;
                let x = x_series_in(Var::H, order).try_pow(delta + 1 - n as i64)?;
                let ins = insertion_series(Var::H, order).try_pow(*m)?;
                k.prefactor = Some(x.try_mul(&ins)?.try_mul(&h_monomial(*m, order))?);
            }
        }
        Ok(k)
    }

    fn zero_series(&self) -> TruncSeries<LaurentZ> {
        TruncSeries::zero(self.var, self.order, LaurentZ::zero())
    }

    fn constant(&self, c: LaurentZ) -> TruncSeries<LaurentZ> {
        TruncSeries::constant(self.var, c, self.order)
    }

    pub(super) fn zero_window(&self, top: usize) -> Vec<TruncSeries<LaurentZ>> {
        vec![self.zero_series(); top + 1]
    }

    /// `[u^0 .. u^top]` of the numerator at one fixed point, from power sums of
    /// tangent forms `pc`, of tautological forms `pb`, elementary symmetric
    /// functions `eb` of the latter, and the tangent Euler product.
    pub(super) fn numerator(
        &self,
        pc: &[Rat],
        pb: &[Rat],
        eb: &[Rat],
        euler: &Rat,
        top: usize,
    ) -> Result<Vec<TruncSeries<LaurentZ>>, LocalizeError> {
        let mut out = self.zero_window(top);
        if self.euler_only {
            out[top] = self.constant(LaurentZ::constant(euler.clone()));
            return Ok(out);
        }
        let mut exponent = self.zero_window(top);
        for k in 1..=top {
            let mut e = self.constant(self.tangent_log[k].scale(&pc[k]));
            if let Some(a) = &self.taut {
                e = e.try_sub(&a[k].scale_rat(&pb[k]))?;
            }
            exponent[k] = e;
        }
        let exponent = TruncSeries::new(Var::U, 0, top as i64, exponent, self.zero_series());
        let mut f = exponent.try_exp()?;
        if self.taut.is_some() {
            // prod_j (b_j u + x) = sum_k e_k(b) u^k x^{n-k}
            let poly: Vec<TruncSeries<LaurentZ>> = (0..=top)
                .map(|k| {
                    if k > self.n {
                        return self.zero_series();
                    }
                    TruncSeries::monomial(self.var, LaurentZ::constant(eb[k].clone()), (self.n - k) as i64, self.order)
                })
                .collect();
            let poly = TruncSeries::new(Var::U, 0, top as i64, poly, self.zero_series());
            f = f.try_mul(&poly)?;
        }
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = f.coeff(k as i64)?;
        }
        Ok(out)
    }

    /// Multiplies the summed `u^0` term by the fixed-point independent factor.
    pub(super) fn finish(&self, sum: TruncSeries<LaurentZ>) -> Result<TruncSeries<LaurentZ>, LocalizeError> {
        match &self.prefactor {
            Some(p) => Ok(sum.try_mul(p)?),
            None => Ok(sum),
        }
    }
}
