//! Atiyah-Bott localization on `S^[n]` (and `S^[n] x P^{chi-1}`).
//!
//! The two equivariant parameters are collapsed to one, `t1 = alpha u`,
//! `t2 = beta u`. A weight `W` then becomes the root `form(W) u`, the Euler
//! class of the tangent space at a fixed point is `prod c_i u^{2n}`, and the
//! integral of a class is the `u^0` coefficient of
//!
//! ```text
//!   sum_fp F_fp(u) / (prod_i c_i u^{2n}).
//! ```
//!
//! Each numerator `F_fp` is a product of multiplicative classes, formed
//! through its logarithm: for a genus `f` with `log f(t) = sum_k l_k t^k`,
//! `sum_i log f(c_i u) = sum_k l_k p_k(c) u^k` with power sums `p_k`, so one
//! series exponential per fixed point suffices. Every coefficient of a
//! negative power of `u` must cancel in the sum, and the whole computation is
//! repeated under independent specializations.

mod kernel;

pub use kernel::Integrand;

use std::sync::atomic::{AtomicUsize, Ordering};

use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::series::{LaurentZ, Rat, SeriesError, TruncSeries, Var};
use crate::toric::{enumerate_fixed_points, tangent_character, taut_character, EquivLineBundle, ToricSurfaceModel, Weight};

#[derive(Debug, Error)]
pub enum LocalizeError {
    #[error("specialization ({alpha}, {beta}) vanishes on weight {weight}")]
    DegenerateSpecialization { weight: Weight, alpha: Rat, beta: Rat },
    #[error("could not draw a valid specialization for {0}")]
    NoSpecialization(String),
    #[error("coefficient of u^{power} does not cancel after summing over fixed points")]
    NonCancellation { power: i64 },
    #[error("specializations disagree for {0}")]
    SpecializationMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `t1 = alpha u`, `t2 = beta u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialization {
    pub alpha: Rat,
    pub beta: Rat,
}

/// `weight . (alpha, beta)`, rejected when zero.
pub fn weight_form(weight: Weight, spec: &Specialization) -> Result<Rat, LocalizeError> {
    let v = weight.form(&spec.alpha, &spec.beta);
    if v.is_zero() {
        return Err(LocalizeError::DegenerateSpecialization {
            weight,
            alpha: spec.alpha.clone(),
            beta: spec.beta.clone(),
        });
    }
    Ok(v)
}

impl Specialization {
    pub fn new(alpha: Rat, beta: Rat) -> Self {
        Self { alpha, beta }
    }

    /// Checks every weight that can occur in the tangent space of a fixed
    /// point of `S^[k]`, `k <= n`: `(l+1) v - a w` and `-l v + (a+1) w` for
    /// `0 <= a, l < n`.
    pub fn validate(&self, surface: &ToricSurfaceModel, n: usize) -> Result<(), LocalizeError> {
        let n = n as i64;
        for c in &surface.charts {
            for a in 0..n {
                for l in 0..n {
                    weight_form(c.v.scale(l + 1) - c.w.scale(a), self)?;
                    weight_form(c.w.scale(a + 1) - c.v.scale(l), self)?;
                }
            }
        }
        Ok(())
    }

    /// Deterministic draw from `(seed, label)`: numerators and denominators
    /// up to 97 in absolute value, re-drawn until valid for `S^[n]`.
    pub fn draw(seed: u64, label: &str, surface: &ToricSurfaceModel, n: usize) -> Result<Self, LocalizeError> {
        let digest = Sha256::digest(format!("{seed}/{label}").as_bytes());
        let mut rng = ChaCha20Rng::from_seed(digest.into());
        let coord = |rng: &mut ChaCha20Rng| {
            let num: i64 = rng.gen_range(1..=97) * if rng.gen::<bool>() { 1 } else { -1 };
            let den: i64 = rng.gen_range(1..=97);
            Rat::new(BigInt::from(num), BigInt::from(den))
        };
        for _ in 0..1000 {
            let spec = Specialization::new(coord(&mut rng), coord(&mut rng));
            if spec.validate(surface, n).is_ok() {
                return Ok(spec);
            }
        }
        Err(LocalizeError::NoSpecialization(label.to_string()))
    }
}

/// How many independent specializations certify a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certify {
    pub seed: u64,
    pub paranoid: bool,
}

impl Default for Certify {
    fn default() -> Self {
        Self { seed: 0, paranoid: false }
    }
}

impl Certify {
    pub fn count(&self) -> usize {
        if self.paranoid { 3 } else { 2 }
    }

    /// Runs `f` under each specialization and requires identical results.
    pub fn run<T: PartialEq>(
        &self,
        label: &str,
        surface: &ToricSurfaceModel,
        n: usize,
        f: impl Fn(&Specialization) -> Result<T, LocalizeError>,
    ) -> Result<T, LocalizeError> {
        let mut first: Option<T> = None;
        for i in 0..self.count() {
            let spec = Specialization::draw(self.seed, &format!("{label}/{i}"), surface, n)?;
            log::debug!("{label}: specialization {i} = ({}, {})", spec.alpha, spec.beta);
            let v = f(&spec)?;
            match &first {
                None => first = Some(v),
                Some(prev) if *prev != v => return Err(LocalizeError::SpecializationMismatch(label.to_string())),
                Some(_) => {}
            }
        }
        Ok(first.expect("at least one specialization"))
    }
}

/// Power sums `p_1 .. p_k` of rational numbers.
fn power_sums(xs: &[Rat], k: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); k + 1];
    for x in xs {
        let mut p = Rat::one();
        for slot in out.iter_mut().skip(1) {
            p *= x;
            *slot += &p;
        }
    }
    out[0] = Rat::from_integer(BigInt::from(xs.len()));
    out
}

/// Elementary symmetric functions `e_0 .. e_n`.
fn elementary(xs: &[Rat]) -> Vec<Rat> {
    let mut e = vec![Rat::one()];
    for x in xs {
        e.push(Rat::zero());
        for j in (1..e.len()).rev() {
            let t = &e[j - 1] * x;
            e[j] += t;
        }
    }
    e
}

/// `[u^0 .. u^{2n}]` of `F_fp / prod c_i` summed over the fixed points; the
/// true integral is entry `2n`, all earlier entries must vanish.
fn localized_window(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n: usize,
    kernel: &kernel::Kernel,
    spec: &Specialization,
) -> Result<Vec<TruncSeries<LaurentZ>>, LocalizeError> {
    spec.validate(surface, n)?;
    let top = 2 * n;
    let zero = kernel.zero_window(top);
    let count = AtomicUsize::new(0);
    let sum = enumerate_fixed_points(surface, n)
        .par_bridge()
        .map(|fp| -> Result<Vec<TruncSeries<LaurentZ>>, LocalizeError> {
            count.fetch_add(1, Ordering::Relaxed);
            let c: Vec<Rat> = tangent_character(surface, &fp)
                .into_iter()
                .map(|t| weight_form(t, spec))
                .collect::<Result<_, _>>()?;
            let b: Vec<Rat> = taut_character(surface, bundle, &fp)
                .into_iter()
                .map(|t| t.form(&spec.alpha, &spec.beta))
                .collect();
            let euler = c.iter().fold(Rat::one(), |acc, x| acc * x);
            let num = kernel.numerator(&power_sums(&c, top), &power_sums(&b, top), &elementary(&b), &euler, top)?;
            let inv = euler.recip();
            Ok(num.into_iter().map(|s| s.scale_rat(&inv)).collect())
        })
        .try_reduce(
            || zero.clone(),
            |a, b| {
                a.iter()
                    .zip(&b)
                    .map(|(x, y)| x.try_add(y).map_err(LocalizeError::from))
                    .collect()
            },
        );
    log::info!("{} n={n}: {} fixed points", surface.name, count.into_inner());
    sum
}

/// Sums the window, checks cancellation and returns the `u^0` term.
fn localize_u0(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n: usize,
    kernel: &kernel::Kernel,
    spec: &Specialization,
) -> Result<TruncSeries<LaurentZ>, LocalizeError> {
    let mut window = localized_window(surface, bundle, n, kernel, spec)?;
    let top = window.len() - 1;
    for (k, s) in window.iter().enumerate().take(top) {
        if !s.is_zero() {
            return Err(LocalizeError::NonCancellation { power: k as i64 - top as i64 });
        }
    }
    Ok(window.swap_remove(top))
}

/// Localized integral over `S^[n]` under one specialization.
///
/// Returns a series in `x` (to `x_order`) for [`Integrand::D`], in `H` (to
/// `chi(L) - 1`, full `P^{chi-1}` factor included) for
/// [`Integrand::ChernY1`] and [`Integrand::Eq7`], and a constant `x`-series
/// otherwise.
pub fn integrate_hilb(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n: usize,
    integrand: &Integrand,
    x_order: i64,
    spec: &Specialization,
) -> Result<TruncSeries<LaurentZ>, LocalizeError> {
    let kernel = kernel::Kernel::new(integrand, bundle, n, x_order)?;
    let sum = localize_u0(surface, bundle, n, &kernel, spec)?;
    kernel.finish(sum)
}

/// [`integrate_hilb`] certified by agreement of independent specializations.
pub fn integrate_certified(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n: usize,
    integrand: &Integrand,
    x_order: i64,
    certify: &Certify,
) -> Result<TruncSeries<LaurentZ>, LocalizeError> {
    let label = format!("{}/{}/{n}/{}/{x_order}", surface.name, fmt_divisor(bundle), integrand.label());
    certify.run(&label, surface, n, |spec| integrate_hilb(surface, bundle, n, integrand, x_order, spec))
}

fn fmt_divisor(bundle: &EquivLineBundle) -> String {
    let chars: Vec<String> = bundle.characters.iter().map(|w| w.to_string()).collect();
    chars.join("")
}

/// `D^{S,L}(x, y, w) = sum_n w^n int_{S^[n]} X(T) c_n(L^[n] e^x) / X(L^[n] e^x)`
/// to `w^n_max`, `x^x_order`. Outer variable `w`, coefficients `x`-series.
pub fn d_series(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n_max: usize,
    x_order: i64,
    certify: &Certify,
) -> Result<TruncSeries<TruncSeries<LaurentZ>>, LocalizeError> {
    if x_order < 0 {
        return Err(LocalizeError::InvalidInput(format!("x_order must be >= 0, got {x_order}")));
    }
    let mut coeffs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        coeffs.push(integrate_certified(surface, bundle, n, &Integrand::D, x_order, certify)?);
    }
    Ok(TruncSeries::from_coeffs(Var::W, coeffs, n_max as i64))
}

fn check_m(bundle: &EquivLineBundle, m: i64) -> Result<i64, LocalizeError> {
    let chi = bundle.chi();
    if m < 0 || m > chi - 1 {
        return Err(LocalizeError::InvalidInput(format!("need 0 <= m <= chi(L) - 1 = {}, got m = {m}", chi - 1)));
    }
    Ok(chi)
}

/// `int_{S^[n] x P^{chi-1}} c_n(L^[n](1)) c(T S^[n]) c(O(1))^chi / c(L^[n](1)) H^m`.
pub fn chern_integral_y1(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n: usize,
    m: i64,
    certify: &Certify,
) -> Result<Rat, LocalizeError> {
    let chi = check_m(bundle, m)?;
    let h = integrate_certified(surface, bundle, n, &Integrand::ChernY1 { m }, chi - 1, certify)?;
    Ok(h.coeff(chi - 1)?.eval_at_one())
}

/// The `X_{-y}` integral over `[P]^red = c_n(L^[n](1)) [S^[n] x P^{chi-1}]`
/// with `delta + 1 = chi(L) - m` copies of `X(O(1))` and `m` point insertions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eq7Value {
    pub n: usize,
    pub m: i64,
    /// `n + chi(L) - 1`
    pub vd: i64,
    pub prefactor_free: LaurentZ,
    /// `(-1)^vd * prefactor_free`
    pub signed: LaurentZ,
}

pub fn eq7_direct(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n: usize,
    m: i64,
    certify: &Certify,
) -> Result<Eq7Value, LocalizeError> {
    let chi = check_m(bundle, m)?;
    let h = integrate_certified(surface, bundle, n, &Integrand::Eq7 { m }, chi - 1, certify)?;
    let value = h.coeff(chi - 1)?;
    let vd = n as i64 + chi - 1;
    let signed = if vd % 2 == 0 { value.clone() } else { -&value };
    Ok(Eq7Value { n, m, vd, prefactor_free: value, signed })
}

#[cfg(test)]
mod tests;
