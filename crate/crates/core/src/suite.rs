//! The `core` check suite: exact comparisons against independent oracles,
//! printed one line per check. Output depends only on the seed.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::cache::{d_series_cached, Cache};
use crate::localize::{chern_integral_y1, integrate_certified, Certify, Integrand, LocalizeError};
use crate::refined::{
    check_proposition, extract_refined, p_series, required_truncation, universal_fit, DSeries, RefinedError,
    SurfaceGeometry,
};
use crate::series::{functional_inverse_wq, rat_to_string, LaurentZ, TruncSeries, Var};
use crate::toric::{chi_y_bb, enumerate_fixed_points, parse_preset, EquivLineBundle, ToricSurfaceModel, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `PASS name: detail` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {}: {}\n", c.name, c.detail));
        }
        out
    }
}

pub const SUITES: &[&str] = &["core"];

type Outcome = Result<String, String>;

fn preset(id: &str) -> (ToricSurfaceModel, EquivLineBundle) {
    parse_preset(id).expect("built-in preset")
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// D-series shared between checks, each computed once at the largest
/// truncation requested so far.
struct DStore<'a> {
    certify: &'a Certify,
    cache: &'a Cache,
    memo: Mutex<HashMap<String, DSeries>>,
}

fn truncated(d: &DSeries, n: usize, x: i64) -> DSeries {
    d.truncate(n as i64)
        .map_coeffs(TruncSeries::zero(Var::X, x, LaurentZ::zero()), |c| c.truncate(x))
}

impl DStore<'_> {
    fn get(&self, s: &ToricSurfaceModel, l: &EquivLineBundle, n: usize, x: i64) -> Result<DSeries, RefinedError> {
        let key = s.name.clone();
        let (n0, x0) = match self.memo.lock().expect("memo").get(&key) {
            Some(d) => {
                let (dn, dx) = (d.order() as usize, d.coeff(0)?.order());
                if dn >= n && dx >= x {
                    return Ok(truncated(d, n, x));
                }
                (dn, dx)
            }
            None => (0, 0),
        };
        let (n1, x1) = (n.max(n0), x.max(x0));
        let d = d_series_cached(s, l, n1, x1, self.certify, self.cache).map_err(|e| match e {
            crate::cache::CachedError::Localize(e) => RefinedError::from(e),
            other => RefinedError::InvalidInput(other.to_string()),
        })?;
        let out = truncated(&d, n, x);
        self.memo.lock().expect("memo").insert(key, d);
        Ok(out)
    }
}

/// Coefficients of `prod_{k>=1} (1 - q^k)^{-e}` through `q^n`.
fn euler_product(e: i64, n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n + 1];
    c[0] = 1;
    for _ in 0..e {
        for k in 1..=n {
            for i in k..=n {
                c[i] += c[i - k];
            }
        }
    }
    c
}

fn check_chi_y(certify: &Certify) -> Outcome {
    let mut count = 0;
    for id in ["p2:1", "p1xp1:1,1"] {
        let (s, l) = preset(id);
        for n in 0..=4 {
            let v = integrate_certified(&s, &l, n, &Integrand::ChiY, 0, certify).map_err(err)?;
            let v = v.coeff(0).map_err(err)?;
            let bb = chi_y_bb(&s, n);
            if v != bb {
                return Err(format!("{id} n={n}: localization {} vs BB {}", v.to_y_string(), bb.to_y_string()));
            }
            count += 1;
        }
    }
    Ok(format!("{count} integrals equal their Bialynicki-Birula polynomials"))
}

fn check_census() -> Outcome {
    let mut count = 0;
    for id in ["p2:1", "p1xp1:1,1", "hirzebruch:1:1,1", "hirzebruch:2:1,2"] {
        let (s, _) = preset(id);
        let expect = euler_product(s.c2, 6);
        for (n, e) in expect.iter().enumerate() {
            let got = enumerate_fixed_points(&s, n).count() as u64;
            if got != *e {
                return Err(format!("{id} n={n}: {got} fixed points, expected {e}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} fixed-point counts match the product formula"))
}

fn check_certification(certify: &Certify) -> Outcome {
    let (s, l) = preset("p1xp1:1,1");
    let two = Certify { paranoid: false, ..*certify };
    let three = Certify { paranoid: true, ..*certify };
    let a = integrate_certified(&s, &l, 3, &Integrand::D, 2, &two).map_err(err)?;
    let b = integrate_certified(&s, &l, 3, &Integrand::D, 2, &three).map_err(err)?;
    if a != b {
        return Err("paranoid value differs".into());
    }
    // an inconsistent character must leave uncancelled poles
    let mut bad = l.clone();
    bad.characters[1] = bad.characters[1] + Weight(1, 0);
    match integrate_certified(&s, &bad, 2, &Integrand::D, 1, &two) {
        Err(LocalizeError::NonCancellation { .. }) => {}
        other => return Err(format!("inconsistent bundle not rejected: {other:?}")),
    }
    Ok(format!("{} specializations agree; broken bundle rejected", three.count()))
}

fn check_pencil(store: &DStore) -> Outcome {
    let mut parts = Vec::new();
    for id in ["p2:2", "p2:3", "p2:4", "p1xp1:2,2"] {
        let (s, l) = preset(id);
        let geom = SurfaceGeometry::from_model(&s, &l).map_err(err)?;
        let (n, x) = required_truncation(1);
        let d = store.get(&s, &l, n as usize, x).map_err(err)?;
        let t = extract_refined(id, "L", &geom, &d, 1).map_err(err)?;
        let oracle = geom.c2 + 3 * geom.l2 + 2 * geom.lk;
        let got = t.y1_n(1);
        if got != crate::series::rat(oracle, 1) {
            return Err(format!("{id}: N^1(1) = {}, pencil count {oracle}", rat_to_string(&got)));
        }
        parts.push(format!("{id}={oracle}"));
    }
    Ok(format!("N^1 at y=1: {}", parts.join(" ")))
}

fn check_two_path(store: &DStore, certify: &Certify) -> Outcome {
    let mut count = 0;
    for id in ["p2:2", "p1xp1:1,1"] {
        let (s, l) = preset(id);
        let geom = SurfaceGeometry::from_model(&s, &l).map_err(err)?;
        let d = store.get(&s, &l, 3, geom.chi_l - 1).map_err(err)?;
        for m in 0..geom.chi_l {
            let p = p_series(&d, &geom, m).map_err(err)?;
            for n in 0..=3usize {
                let direct = chern_integral_y1(&s, &l, n, m, certify).map_err(err)?;
                let refined = p.coeff(n as i64).map_err(err)?.eval_at_one();
                if refined != direct {
                    return Err(format!(
                        "{id} n={n} m={m}: refined {} vs Chern {}",
                        rat_to_string(&refined),
                        rat_to_string(&direct)
                    ));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} values agree at y=1"))
}

fn check_tables(store: &DStore) -> Outcome {
    let mut count = 0;
    for id in ["p2:2", "p2:3", "p1xp1:1,1", "p1xp1:2,2", "hirzebruch:1:1,2"] {
        let (s, l) = preset(id);
        let geom = SurfaceGeometry::from_model(&s, &l).map_err(err)?;
        for delta in 0..=2.min(geom.chi_l - 1) {
            let (n, x) = required_truncation(delta);
            let d = store.get(&s, &l, n as usize, x).map_err(err)?;
            let t = extract_refined(id, "L", &geom, &d, delta).map_err(err)?;
            let report = check_proposition(&t);
            if let Some(c) = report.checks.iter().find(|c| !c.passed) {
                return Err(format!("{id} delta={delta}: {} ({})", c.name, c.detail));
            }
            count += 1;
        }
    }
    Ok(format!("{count} tables: vanishing, integrality, M^delta = N^delta, N^0"))
}

fn check_inversion() -> Outcome {
    let order = 12;
    let s = LaurentZ::z_plus_zinv();
    let w = functional_inverse_wq(order);
    let one = TruncSeries::constant(Var::Q, LaurentZ::one(), order);
    let q = TruncSeries::monomial(Var::Q, LaurentZ::one(), 1, order);
    let rhs = &q * &(&(&one + &(&w * &w)) - &w.mul_coeff(&s));
    if w != rhs {
        return Err("w != Q (1 - (z + 1/z) w + w^2)".into());
    }
    let lagrange = [LaurentZ::zero(), LaurentZ::one(), -&s, &LaurentZ::one() + &(&s * &s)];
    for (k, c) in lagrange.iter().enumerate() {
        if w.coeff(k as i64).map_err(err)? != *c {
            return Err(format!("coefficient of Q^{k} differs from Lagrange inversion"));
        }
    }
    Ok(format!("relation exact to Q^{order}; Q^1..Q^3 match Lagrange inversion"))
}

fn check_universal(store: &DStore) -> Outcome {
    let basis: Vec<_> = ["p2:1", "p2:2", "p1xp1:1,1", "hirzebruch:1:2,3"].iter().map(|id| preset(id)).collect();
    let held = preset("p1xp1:1,2");
    let fit = universal_fit(&basis, Some(&held), 4, 2, |s, l, n, x| store.get(s, l, n, x)).map_err(err)?;
    match (fit.residual_ok, fit.mismatch) {
        (Some(true), _) => Ok("held-out p1xp1:1,2 reproduced through w^4 x^2".into()),
        (_, Some((k, e))) => Err(format!("held-out differs at w^{k} x^{e}")),
        _ => Err("no held-out comparison".into()),
    }
}

/// Runs a named suite. Unknown names are an error.
pub fn run_suite(name: &str, certify: &Certify, cache: &Cache) -> Result<SuiteReport, String> {
    if name != "core" {
        return Err(format!("unknown suite {name:?}; available: {}", SUITES.join(", ")));
    }
    let store = DStore { certify, cache, memo: Mutex::new(HashMap::new()) };
    let checks: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("chi_y", Box::new(|| check_chi_y(certify))),
        ("census", Box::new(check_census)),
        ("certification", Box::new(|| check_certification(certify))),
        ("pencil", Box::new(|| check_pencil(&store))),
        ("two_path", Box::new(|| check_two_path(&store, certify))),
        ("tables", Box::new(|| check_tables(&store))),
        ("inversion", Box::new(check_inversion)),
        ("universal", Box::new(|| check_universal(&store))),
    ];
    let checks = checks
        .into_iter()
        .map(|(name, f)| {
            log::info!("suite check {name}");
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            SuiteCheck { name: name.to_string(), passed, detail }
        })
        .collect();
    Ok(SuiteReport { suite: name.to_string(), checks })
}
