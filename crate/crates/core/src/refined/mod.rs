//! Refined invariants `N^i(y)`, `M^i(y)` from the D-series.
//!
//! ```text
//!   Q_{S,L,delta}(w) = Coeff_{x^delta} [ D(x, y, w) X(x)^{delta+1} ]
//!   P_{S,L,m}(w)     = Coeff_{x^delta} [ D(x, y, w) X(x)^{delta+1} I(x)^m ],  delta = chi(L) - 1 - m
//! ```
//!
//! and the generating series are expanded as
//! `(w/Q)^{1-g} series(w) = sum_i N^i Q^i` with `Q = w / (1 - (z + 1/z) w + w^2)`.

mod render;
mod universal;

pub use render::{render_csv, render_table, table_to_json};
pub use universal::{universal_eval, universal_fit, BasisMember, UniversalFit};

use serde::Serialize;
use thiserror::Error;

use crate::localize::LocalizeError;
use crate::series::{functional_inverse_wq, insertion_series, x_series, LaurentZ, Rat, SeriesError, TruncSeries, Var};
use crate::toric::{EquivLineBundle, ToricSurfaceModel};

/// `D^{S,L}`: a `w`-series whose coefficients are `x`-series.
pub type DSeries = TruncSeries<TruncSeries<LaurentZ>>;

#[derive(Debug, Error)]
pub enum RefinedError {
    #[error("truncation underspecified: need n_max >= {need_n_max} and x_order >= {need_x_order}, got n_max = {n_max}, x_order = {x_order}")]
    Truncation { need_n_max: i64, need_x_order: i64, n_max: i64, x_order: i64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("fit basis has rank {0} < 4")]
    RankDeficient(usize),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Numerical invariants of `(S, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceGeometry {
    pub l2: i64,
    pub lk: i64,
    pub k2: i64,
    pub c2: i64,
    pub chi_o: i64,
    /// arithmetic genus of curves in `|L|`
    pub h: i64,
    pub chi_l: i64,
}

impl SurfaceGeometry {
    pub fn new(l2: i64, lk: i64, k2: i64, c2: i64, chi_o: i64) -> Result<Self, RefinedError> {
        if (l2 + lk) % 2 != 0 {
            return Err(RefinedError::InvalidInput(format!("L^2 + L.K = {} is odd", l2 + lk)));
        }
        if (k2 + c2) % 12 != 0 || (k2 + c2) / 12 != chi_o {
            return Err(RefinedError::InvalidInput(format!(
                "Noether: (K^2 + c2)/12 = ({k2} + {c2})/12 but chi(O_S) = {chi_o}"
            )));
        }
        Ok(Self { l2, lk, k2, c2, chi_o, h: (l2 + lk) / 2 + 1, chi_l: (l2 - lk) / 2 + chi_o })
    }

    pub fn from_model(surface: &ToricSurfaceModel, bundle: &EquivLineBundle) -> Result<Self, RefinedError> {
        Self::new(bundle.l2, bundle.lk, surface.k2, surface.c2, 1)
    }

    /// `(L^2, L.K, K^2, c2)`
    pub fn chern_vector(&self) -> [i64; 4] {
        [self.l2, self.lk, self.k2, self.c2]
    }

    /// `delta = chi(L) - 1 - m`.
    pub fn delta_for(&self, m: i64) -> Result<i64, RefinedError> {
        if m < 0 || m > self.chi_l - 1 {
            return Err(RefinedError::InvalidInput(format!("need 0 <= m <= chi(L) - 1 = {}, got {m}", self.chi_l - 1)));
        }
        Ok(self.chi_l - 1 - m)
    }
}

/// Smallest `(n_max, x_order)` that shows slots `0..=delta` of the table and
/// one slot past it.
pub fn required_truncation(delta: i64) -> (i64, i64) {
    (delta + 1, delta)
}

/// `Coeff_{x^delta}[D X^{delta+1} I^m]`, coefficientwise in `w`.
fn x_extract(d: &DSeries, delta: i64, m: i64) -> Result<TruncSeries<LaurentZ>, RefinedError> {
    if delta < 0 || m < 0 {
        return Err(RefinedError::InvalidInput(format!("need delta, m >= 0, got delta = {delta}, m = {m}")));
    }
    let x_order = d.coeff(0)?.order();
    if x_order < delta {
        return Err(RefinedError::Truncation {
            need_n_max: d.order(),
            need_x_order: delta,
            n_max: d.order(),
            x_order,
        });
    }
    let weight = x_series(delta)
        .try_pow(delta + 1)?
        .try_mul(&insertion_series(Var::X, delta).try_pow(m)?)?;
    let coeffs = (0..=d.order())
        .map(|k| Ok(d.coeff(k)?.truncate(delta).try_mul(&weight)?.coeff(delta)?))
        .collect::<Result<Vec<_>, RefinedError>>()?;
    Ok(TruncSeries::from_coeffs(Var::W, coeffs, d.order()))
}

/// `Q_{S,L,delta}(w) = Coeff_{x^delta}[D X^{delta+1}]`.
pub fn q_series(d: &DSeries, delta: i64) -> Result<TruncSeries<LaurentZ>, RefinedError> {
    x_extract(d, delta, 0)
}

/// `P_{S,L,m}(w) = Coeff_{x^delta}[D X^{delta+1} I^m]`, `delta = chi(L) - 1 - m`.
pub fn p_series(d: &DSeries, geom: &SurfaceGeometry, m: i64) -> Result<TruncSeries<LaurentZ>, RefinedError> {
    x_extract(d, geom.delta_for(m)?, m)
}

/// Coefficients of `Q^0 .. Q^{order}` in `(w/Q)^{1-g} series(w)` at `w = w(Q)`.
pub fn expand_in_q(series: &TruncSeries<LaurentZ>, g: i64) -> Result<Vec<LaurentZ>, RefinedError> {
    let order = series.order();
    let s = LaurentZ::z_plus_zinv();
    let w_over_q = TruncSeries::from_coeffs(Var::W, vec![LaurentZ::one(), -&s, LaurentZ::one()], order);
    let g_w = w_over_q.try_pow(1 - g)?.try_mul(series)?;
    let g_q = g_w.substitute(Var::W, &functional_inverse_wq(order))?;
    (0..=g_q.order()).map(|i| Ok(g_q.coeff(i)?)).collect()
}

/// The refined invariants of one `(S, L, delta)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinedTable {
    pub surface: String,
    pub bundle: String,
    pub geometry: SurfaceGeometry,
    pub delta: i64,
    /// insertions on the `M` side, `chi(L) - 1 - delta`
    pub m: i64,
    pub n_max: i64,
    pub x_order: i64,
    /// `N^i` for `i = 0 ..= n_max`
    pub entries_n: Vec<LaurentZ>,
    /// `M^i` for `i = 0 ..= n_max`
    pub entries_m: Vec<LaurentZ>,
}

impl RefinedTable {
    pub fn window(&self) -> i64 {
        self.entries_n.len() as i64 - 1
    }

    pub fn n(&self, i: i64) -> LaurentZ {
        usize::try_from(i).ok().and_then(|i| self.entries_n.get(i)).cloned().unwrap_or_default()
    }

    pub fn m_entry(&self, i: i64) -> LaurentZ {
        usize::try_from(i).ok().and_then(|i| self.entries_m.get(i)).cloned().unwrap_or_default()
    }

    /// `N^i` at `y = 1`.
    pub fn y1_n(&self, i: i64) -> Rat {
        self.n(i).eval_at_one()
    }
}

/// Builds the table for `delta` from a D-series known to `(n_max, x_order)`.
pub fn extract_refined(
    surface: &str,
    bundle: &str,
    geom: &SurfaceGeometry,
    d: &DSeries,
    delta: i64,
) -> Result<RefinedTable, RefinedError> {
    if delta < 0 || delta > geom.chi_l - 1 {
        return Err(RefinedError::InvalidInput(format!(
            "need 0 <= delta <= chi(L) - 1 = {}, got {delta}",
            geom.chi_l - 1
        )));
    }
    let (need_n, need_x) = required_truncation(delta);
    let n_max = d.order();
    let x_order = d.coeff(0)?.order();
    if n_max < need_n || x_order < need_x {
        return Err(RefinedError::Truncation { need_n_max: need_n, need_x_order: need_x, n_max, x_order });
    }
    let m = geom.chi_l - 1 - delta;
    let entries_n = expand_in_q(&q_series(d, delta)?, geom.h)?;
    let entries_m = expand_in_q(&p_series(d, geom, m)?, geom.h)?;
    Ok(RefinedTable {
        surface: surface.to_string(),
        bundle: bundle.to_string(),
        geometry: *geom,
        delta,
        m,
        n_max,
        x_order,
        entries_n,
        entries_m,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Structured outcome of the checks on one table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropositionReport {
    pub checks: Vec<CheckResult>,
    /// `N^delta(y) = N^delta(1/y)`; reported, not required.
    pub n_delta_palindromic: bool,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `Coeff_{x^delta} X^{delta+1}`, the normalized `chi_{-y}` of `P^delta`:
/// `sum_{j=0}^{delta} z^{2j - delta}`.
pub fn n0_closed_form(delta: i64) -> LaurentZ {
    LaurentZ::from_terms((0..=delta).map(|j| (2 * j - delta, Rat::from_integer(1.into()))))
}

/// Checks on a table:
/// 1. `N^i`, `M^i` vanish for `i < 0` and `delta < i <= window`;
/// 2. entries are Laurent polynomials with integer coefficients;
/// 3. `M^delta = N^delta`;
/// 4. `N^0` equals its closed form (`M^0` also carries the insertion factor).
pub fn check_proposition(table: &RefinedTable) -> PropositionReport {
    let d = table.delta;
    let mut checks = Vec::new();

    let offenders: Vec<String> = (d + 1..=table.window())
        .flat_map(|i| {
            let mut v = Vec::new();
            if !table.n(i).is_empty() {
                v.push(format!("N^{i}"));
            }
            if !table.m_entry(i).is_empty() {
                v.push(format!("M^{i}"));
            }
            v
        })
        .collect();
    checks.push(CheckResult {
        name: "vanishing outside 0..=delta".into(),
        passed: offenders.is_empty(),
        detail: if offenders.is_empty() {
            format!("window i in (delta, {}] is zero; i < 0 is zero by construction", table.window())
        } else {
            format!("nonzero: {}", offenders.join(", "))
        },
    });

    let non_integral: Vec<String> = table
        .entries_n
        .iter()
        .map(|e| ("N", e))
        .chain(table.entries_m.iter().map(|e| ("M", e)))
        .enumerate()
        .filter(|(_, (_, e))| e.terms().any(|(_, c)| !c.is_integer()))
        .map(|(k, (name, _))| format!("{name}^{}", k % table.entries_n.len()))
        .collect();
    checks.push(CheckResult {
        name: "Laurent polynomials".into(),
        passed: non_integral.is_empty(),
        detail: if non_integral.is_empty() {
            "finite support, integer coefficients".into()
        } else {
            format!("non-integral coefficients in {}", non_integral.join(", "))
        },
    });

    let eq = table.n(d) == table.m_entry(d);
    checks.push(CheckResult {
        name: "M^delta = N^delta".into(),
        passed: eq,
        detail: format!("N^{d} = {}, M^{d} = {}", table.n(d).to_y_string(), table.m_entry(d).to_y_string()),
    });

    let n0 = n0_closed_form(d);
    checks.push(CheckResult {
        name: "N^0 = chi_{-y}(P^delta)".into(),
        passed: table.n(0) == n0,
        detail: format!("N^0 = {}, expected {}", table.n(0).to_y_string(), n0.to_y_string()),
    });

    PropositionReport { checks, n_delta_palindromic: table.n(d).is_palindromic() }
}
