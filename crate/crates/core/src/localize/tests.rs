use num::One;

use super::*;
use crate::series::{insertion_series, rat, x_series_in};
use crate::toric::{chi_y_bb, Weight};

fn spec(a: (i64, i64), b: (i64, i64)) -> Specialization {
    Specialization::new(rat(a.0, a.1), rat(b.0, b.1))
}

fn spec1() -> Specialization {
    spec((3, 7), (-11, 5))
}

fn spec2() -> Specialization {
    spec((-13, 2), (17, 19))
}

#[test]
fn weight_form_examples() {
    assert_eq!(weight_form(Weight(1, 0), &spec((1, 1), (2, 1))).unwrap(), rat(1, 1));
    assert!(matches!(
        weight_form(Weight(1, -1), &spec((1, 1), (1, 1))),
        Err(LocalizeError::DegenerateSpecialization { .. })
    ));
    assert_eq!(weight_form(Weight(2, 3), &spec((1, 2), (1, 3))).unwrap(), rat(2, 1));
}

#[test]
fn draws_are_deterministic_and_valid() {
    let (s, _) = ToricSurfaceModel::p2(1);
    let a = Specialization::draw(7, "label", &s, 4).unwrap();
    let b = Specialization::draw(7, "label", &s, 4).unwrap();
    let c = Specialization::draw(7, "other", &s, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    a.validate(&s, 4).unwrap();
    // alpha = beta kills v - w type weights
    assert!(spec((1, 1), (1, 1)).validate(&s, 2).is_err());
}

// ---- naive oracle: expand every root separately -------------------------

type S = TruncSeries<LaurentZ>;
type US = TruncSeries<S>;

/// `f(r u + x)` as a `u`-series over `var`-series, from the coefficients of `f`.
fn shifted(f: &[LaurentZ], r: &Rat, shift: bool, var: Var, top: i64, order: i64) -> US {
    let zero = S::zero(var, order, LaurentZ::zero());
    let lin = US::new(
        Var::U,
        0,
        top,
        vec![
            if shift { S::monomial(var, LaurentZ::one(), 1, order) } else { zero.clone() },
            S::constant(var, LaurentZ::constant(r.clone()), order),
        ],
        zero.clone(),
    );
    let mut out = US::zero(Var::U, top, zero.clone());
    let mut p = US::constant(Var::U, S::constant(var, LaurentZ::one(), order), top);
    for c in f {
        out = out.try_add(&p.mul_coeff(&S::constant(var, c.clone(), order))).unwrap();
        p = p.try_mul(&lin).unwrap();
    }
    out
}

fn one_plus_t(len: usize) -> Vec<LaurentZ> {
    let mut v = vec![LaurentZ::one(), LaurentZ::one()];
    v.resize(len.max(2), LaurentZ::zero());
    v
}

/// `sum_fp prod f(c_i u) prod (b_j u + x) / prod g(b_j u + x) / prod(c_i u)`,
/// `u^0` coefficient, without power sums or exponentials.
fn naive(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n: usize,
    f: &[LaurentZ],
    taut: Option<&[LaurentZ]>,
    var: Var,
    order: i64,
    sp: &Specialization,
) -> S {
    let top = 2 * n as i64;
    let zero = S::zero(var, order, LaurentZ::zero());
    let mut total = zero.clone();
    for fp in enumerate_fixed_points(surface, n) {
        let mut prod = US::constant(Var::U, S::constant(var, LaurentZ::one(), order), top);
        let mut euler = Rat::one();
        for t in tangent_character(surface, &fp) {
            let c = weight_form(t, sp).unwrap();
            prod = prod.try_mul(&shifted(f, &c, false, var, top, order)).unwrap();
            euler *= c;
        }
        if let Some(g) = taut {
            for t in taut_character(surface, bundle, &fp) {
                let b = t.form(&sp.alpha, &sp.beta);
                let lin = shifted(&one_plus_t(2)[..2], &b, true, var, top, order);
                // b u + x  =  (1 + b u + x) - 1
                let lin = lin.try_sub(&US::constant(Var::U, S::constant(var, LaurentZ::one(), order), top)).unwrap();
                let den = shifted(g, &b, true, var, top, order).try_invert().unwrap();
                prod = prod.try_mul(&lin).unwrap().try_mul(&den).unwrap();
            }
        }
        for k in 0..top {
            assert!(prod.coeff(k).is_ok());
        }
        total = total.try_add(&prod.coeff(top).unwrap().scale_rat(&euler.recip())).unwrap();
    }
    total
}

fn x_coeffs(var: Var, len: i64) -> Vec<LaurentZ> {
    x_series_in(var, len).coeffs().to_vec()
}

#[test]
fn d_kernel_matches_naive_product() {
    let sp = spec1();
    for (s, l) in [ToricSurfaceModel::p2(2), ToricSurfaceModel::p1xp1(1, 2), ToricSurfaceModel::hirzebruch(1, 1, 2)] {
        for n in 0..=2 {
            let order = 2;
            let len = 2 * n as i64 + order + 1;
            let naive_sum = naive(&s, &l, n, &x_coeffs(Var::X, len), Some(&x_coeffs(Var::X, len)), Var::X, order, &sp);
            // the naive sum already contains X(x)^{-n} through g(b u + x)
            let fast = integrate_hilb(&s, &l, n, &Integrand::D, order, &sp).unwrap();
            assert_eq!(fast, naive_sum, "{} n={n}", s.name);
        }
    }
}

#[test]
fn chern_and_eq7_kernels_match_naive_product() {
    let sp = spec2();
    let (s, l) = ToricSurfaceModel::p2(2);
    let chi = l.chi();
    let order = chi - 1;
    for n in 0..=2 {
        for m in [0, 2, chi - 1] {
            let len = 2 * n as i64 + order + 1;
            let h_m = S::monomial(Var::H, LaurentZ::one(), m, order);
            let chern = naive(&s, &l, n, &one_plus_t(2), Some(&one_plus_t(2)), Var::H, order, &sp);
            let proj = S::from_coeffs(Var::H, one_plus_t(2), order).try_pow(chi).unwrap();
            let expect = chern.try_mul(&proj).unwrap().try_mul(&h_m).unwrap();
            let got = integrate_hilb(&s, &l, n, &Integrand::ChernY1 { m }, order, &sp).unwrap();
            assert_eq!(got, expect, "chern n={n} m={m}");

            let x = x_coeffs(Var::H, len);
            let eq7 = naive(&s, &l, n, &x, Some(&x), Var::H, order, &sp);
            let delta = chi - 1 - m;
            let extra = x_series_in(Var::H, order)
                .try_pow(delta + 1)
                .unwrap()
                .try_mul(&insertion_series(Var::H, order).try_pow(m).unwrap())
                .unwrap()
                .try_mul(&h_m)
                .unwrap();
            let got = integrate_hilb(&s, &l, n, &Integrand::Eq7 { m }, order, &sp).unwrap();
            assert_eq!(got, eq7.try_mul(&extra).unwrap(), "eq7 n={n} m={m}");
        }
    }
}

#[test]
fn chi_y_integral_equals_bb_oracle() {
    for (s, l) in [ToricSurfaceModel::p2(1), ToricSurfaceModel::p1xp1(1, 1)] {
        for n in 0..=4 {
            let v = integrate_certified(&s, &l, n, &Integrand::ChiY, 0, &Certify::default()).unwrap();
            assert_eq!(v.coeff(0).unwrap(), chi_y_bb(&s, n), "{} n={n}", s.name);
        }
    }
}

#[test]
fn euler_class_counts_fixed_points() {
    let (s, l) = ToricSurfaceModel::p2(1);
    let v = integrate_hilb(&s, &l, 1, &Integrand::EulerTangent, 0, &spec1()).unwrap();
    assert_eq!(v.coeff(0).unwrap(), LaurentZ::constant(rat(3, 1)));
    for (s, l) in [ToricSurfaceModel::p2(1), ToricSurfaceModel::hirzebruch(2, 1, 3)] {
        for n in 0..=4 {
            let v = integrate_hilb(&s, &l, n, &Integrand::EulerTangent, 0, &spec2()).unwrap();
            let count = enumerate_fixed_points(&s, n).count() as i64;
            assert_eq!(v.coeff(0).unwrap(), LaurentZ::constant(rat(count, 1)));
        }
    }
}

#[test]
fn empty_hilbert_scheme_gives_one() {
    let (s, l) = ToricSurfaceModel::p2(1);
    for ig in [Integrand::EulerTangent, Integrand::ChiY, Integrand::D] {
        let v = integrate_hilb(&s, &l, 0, &ig, 2, &spec1()).unwrap();
        assert_eq!(v.coeff(0).unwrap(), LaurentZ::one(), "{ig:?}");
    }
    let c = Certify::default();
    // one line through two points
    assert_eq!(chern_integral_y1(&s, &l, 0, 2, &c).unwrap(), rat(1, 1));
    let (s2, l2) = ToricSurfaceModel::p2(2);
    assert_eq!(chern_integral_y1(&s2, &l2, 0, l2.chi() - 1, &c).unwrap(), rat(1, 1));
    let e = eq7_direct(&s2, &l2, 0, l2.chi() - 1, &c).unwrap();
    assert_eq!(e.prefactor_free, LaurentZ::one());
    assert_eq!(e.vd, 5);
    assert_eq!(e.signed, -&LaurentZ::one());
}

#[test]
fn d_series_low_coefficients() {
    let c = Certify::default();
    for d in 1..=4 {
        let (s, l) = ToricSurfaceModel::p2(d);
        let ds = d_series(&s, &l, 1, 2, &c).unwrap();
        let w0 = ds.coeff(0).unwrap();
        assert_eq!(w0.coeff(0).unwrap(), LaurentZ::one());
        assert!(w0.coeff(1).unwrap().is_empty() && w0.coeff(2).unwrap().is_empty());
        // int_S c(T) c1(L) / (1 + c1(L)) = c1(T) L - L^2
        let w1 = ds.coeff(1).unwrap();
        assert_eq!(w1.coeff(0).unwrap().eval_at_one(), rat(3 * d - d * d, 1), "d={d}");
        for k in 0..=2 {
            assert!(w1.coeff(k).unwrap().is_palindromic(), "d={d} x^{k}");
        }
    }
}

#[test]
fn d_series_at_y1_matches_chern_classes() {
    // at z = 1, X(t) = 1 + t and the w^1 coefficient is
    // int_S c(T) a/(1 + a), a = L + x, with a/(1+a) = sum_k (-1)^{k-1} a^k.
    //   x^0: L c1 - L^2
    //   x^1: c2 (k = 1) - 2 L c1 (k = 2) + 3 L^2 (k = 3)
    for (s, l) in [ToricSurfaceModel::p1xp1(2, 3), ToricSurfaceModel::hirzebruch(1, 2, 3), ToricSurfaceModel::p2(5)] {
        let ds = d_series(&s, &l, 1, 2, &Certify::default()).unwrap();
        let w1 = ds.coeff(1).unwrap();
        let (l2, lk, c2) = (l.l2, l.lk, s.c2);
        assert_eq!(w1.coeff(0).unwrap().eval_at_one(), rat(-lk - l2, 1), "{}", s.name);
        assert_eq!(w1.coeff(1).unwrap().eval_at_one(), rat(c2 + 2 * lk + 3 * l2, 1), "{}", s.name);
    }
}

#[test]
fn specializations_agree_and_bad_models_fail_cancellation() {
    let (s, l) = ToricSurfaceModel::p2(2);
    let a = integrate_hilb(&s, &l, 2, &Integrand::D, 2, &spec1()).unwrap();
    let b = integrate_hilb(&s, &l, 2, &Integrand::D, 2, &spec2()).unwrap();
    assert_eq!(a, b);
    let paranoid = Certify { seed: 3, paranoid: true };
    assert_eq!(integrate_certified(&s, &l, 2, &Integrand::D, 2, &paranoid).unwrap(), a);

    // characters not coming from a line bundle: negative u-powers survive
    let mut bad = l.clone();
    bad.characters[1] = bad.characters[1] + Weight(1, 0);
    let err = integrate_hilb(&s, &bad, 1, &Integrand::D, 1, &spec1()).unwrap_err();
    assert!(matches!(err, LocalizeError::NonCancellation { .. }), "{err:?}");
}

#[test]
fn m_out_of_range_is_rejected() {
    let (s, l) = ToricSurfaceModel::p2(1);
    assert!(chern_integral_y1(&s, &l, 1, 3, &Certify::default()).is_err());
    assert!(eq7_direct(&s, &l, 1, -1, &Certify::default()).is_err());
}

#[test]
fn eq7_at_y1_equals_chern_integral() {
    let c = Certify::default();
    for (s, l) in [ToricSurfaceModel::p2(2), ToricSurfaceModel::p1xp1(1, 1)] {
        let chi = l.chi();
        for n in 0..=2 {
            for m in 0..chi {
                let e = eq7_direct(&s, &l, n, m, &c).unwrap();
                let ch = chern_integral_y1(&s, &l, n, m, &c).unwrap();
                assert_eq!(e.prefactor_free.eval_at_one(), ch, "{} n={n} m={m}", s.name);
            }
        }
    }
}
