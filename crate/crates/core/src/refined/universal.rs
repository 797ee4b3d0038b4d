use num::{One, Zero};
use serde_json::{json, Value};

use super::{DSeries, RefinedError, SurfaceGeometry};
use crate::series::{Coefficient, Rat};
use crate::toric::{EquivLineBundle, ToricSurfaceModel};

#[derive(Clone, Debug, PartialEq)]
pub struct BasisMember {
    pub name: String,
    pub chern: [i64; 4],
}

/// `log D = L^2 log A1 + LK log A2 + K^2 log A3 + c2 log A4`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalFit {
    pub log_a: [DSeries; 4],
    pub basis: Vec<BasisMember>,
    pub held_out: Option<BasisMember>,
    /// `None` without a held-out pair; otherwise whether it was reproduced,
    /// and the first mismatching `(w, x)` coefficient if not.
    pub residual_ok: Option<bool>,
    pub mismatch: Option<(i64, i64)>,
    pub n_max: i64,
    pub x_order: i64,
}

/// Inverse of a square rational matrix; `Err(rank)` when singular.
pub(crate) fn invert(m: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>, usize> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..n).find(|r| !Zero::is_zero(&a[*r][col])) else { continue };
        a.swap(rank, p);
        let inv = a[rank][col].recip();
        for x in a[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != rank && !Zero::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                let pivot = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    if rank < n {
        return Err(rank);
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn linear_combination(series: &[DSeries], weights: &[Rat]) -> Result<DSeries, RefinedError> {
    let mut out = series[0].scale_rat(&weights[0]);
    for (s, w) in series.iter().zip(weights).skip(1) {
        out = out.try_add(&s.scale_rat(w))?;
    }
    Ok(out)
}

fn first_mismatch(a: &DSeries, b: &DSeries) -> Result<Option<(i64, i64)>, RefinedError> {
    for k in 0..=a.order().min(b.order()) {
        let (x, y) = (a.coeff(k)?, b.coeff(k)?);
        for e in 0..=x.order().min(y.order()) {
            if x.coeff(e)? != y.coeff(e)? {
                return Ok(Some((k, e)));
            }
        }
    }
    Ok(None)
}

fn member(surface: &ToricSurfaceModel, bundle: &EquivLineBundle) -> Result<BasisMember, RefinedError> {
    let geom = SurfaceGeometry::from_model(surface, bundle)?;
    Ok(BasisMember { name: surface.name.clone(), chern: geom.chern_vector() })
}

/// Solves for `log A_1 .. log A_4` from four `(S, L)` pairs and checks an
/// optional held-out pair. `d` supplies D-series to `(n_max, x_order)`,
/// e.g. [`crate::localize::d_series`] or a cached equivalent.
pub fn universal_fit<F>(
    basis: &[(ToricSurfaceModel, EquivLineBundle)],
    held_out: Option<&(ToricSurfaceModel, EquivLineBundle)>,
    n_max: usize,
    x_order: i64,
    d: F,
) -> Result<UniversalFit, RefinedError>
where
    F: Fn(&ToricSurfaceModel, &EquivLineBundle, usize, i64) -> Result<DSeries, RefinedError>,
{
    if basis.len() != 4 {
        return Err(RefinedError::InvalidInput(format!("need exactly 4 basis pairs, got {}", basis.len())));
    }
    let members: Vec<BasisMember> = basis.iter().map(|(s, l)| member(s, l)).collect::<Result<_, _>>()?;
    let matrix: Vec<Vec<Rat>> = members
        .iter()
        .map(|b| b.chern.iter().map(|c| Rat::from_integer((*c).into())).collect())
        .collect();
    let inv = invert(&matrix).map_err(RefinedError::RankDeficient)?;
    let logs: Vec<DSeries> = basis
        .iter()
        .map(|(s, l)| Ok(d(s, l, n_max, x_order)?.try_log()?))
        .collect::<Result<_, RefinedError>>()?;
    // log A_i = sum_j inv[i][j] log D_j
    let log_a: Vec<DSeries> = inv.iter().map(|row| linear_combination(&logs, row)).collect::<Result<_, _>>()?;
    let log_a: [DSeries; 4] = log_a.try_into().expect("four rows");
    let mut fit = UniversalFit {
        log_a,
        basis: members,
        held_out: None,
        residual_ok: None,
        mismatch: None,
        n_max: n_max as i64,
        x_order,
    };
    if let Some((s, l)) = held_out {
        let m = member(s, l)?;
        let predicted = universal_eval(&fit, m.chern)?;
        let actual = d(s, l, n_max, x_order)?;
        let mismatch = first_mismatch(&predicted, &actual)?;
        if let Some((k, e)) = mismatch {
            log::warn!("held-out {} differs at w^{k} x^{e}", m.name);
        }
        fit.residual_ok = Some(mismatch.is_none());
        fit.mismatch = mismatch;
        fit.held_out = Some(m);
    }
    Ok(fit)
}

/// `exp(sum_i chern_i log A_i)`.
pub fn universal_eval(fit: &UniversalFit, chern: [i64; 4]) -> Result<DSeries, RefinedError> {
    let weights: Vec<Rat> = chern.iter().map(|c| Rat::from_integer((*c).into())).collect();
    Ok(linear_combination(&fit.log_a, &weights)?.try_exp()?)
}

impl UniversalFit {
    pub fn to_json(&self) -> Value {
        let members = |b: &BasisMember| json!({"name": b.name, "chern": b.chern});
        json!({
            "log_a": self.log_a.iter().map(Coefficient::to_json).collect::<Vec<_>>(),
            "basis": self.basis.iter().map(members).collect::<Vec<_>>(),
            "held_out": self.held_out.as_ref().map(members),
            "residual_ok": self.residual_ok,
            "mismatch": self.mismatch.map(|(k, e)| json!({"w": k, "x": e})),
            "n_max": self.n_max,
            "x_order": self.x_order,
        })
    }
}
