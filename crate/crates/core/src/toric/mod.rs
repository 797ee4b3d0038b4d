//! Torus-fixed-point data for toric surfaces, equivariant line bundles and
//! the Hilbert schemes of points `S^[n]`.
//!
//! Conventions: a chart has tangent weights `(v, w)`. The monomial ideal of a
//! partition has quotient basis `x^r y^c` for its cells `(r, c)`, where the
//! coordinate functions `x, y` carry weights `-v, -w`. With that choice
//!
//! * the tangent space at a cell contributes `(l+1) v - a w` and
//!   `-l v + (a+1) w` (arm `a`, leg `l`),
//! * the fiber of `L^[n]` contributes `mu - r v - c w`, `mu` being the fiber
//!   character of `L` at the chart.
//!
//! The line-bundle characters satisfy `mu_p - mu_q = (L.C) t` for the
//! invariant curve `C` from `p` to `q` with tangent weight `t` at `p`, so that
//! localization integrals come out as the usual intersection numbers.

mod model;
mod partition;

pub use model::{
    load_surface, parse_preset, preset_fan, preset_with_divisor, EquivLineBundle, ModelFile, ToricSurfaceModel,
};
pub use partition::{partitions_of, Partition};

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{LaurentZ, Rat};

#[derive(Debug, Error)]
pub enum ToricError {
    #[error("unknown surface preset {0:?} (expected p2:d, p1xp1:a,b or hirzebruch:a:c1,c2)")]
    UnknownPreset(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("covector {0:?} vanishes on tangent weight {1}")]
    DegenerateCovector([i64; 2], Weight),
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

/// A character of the two-dimensional torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Weight(pub i64, pub i64);

impl Weight {
    pub fn scale(self, k: i64) -> Weight {
        Weight(self.0 * k, self.1 * k)
    }

    pub fn pair(self, covector: [i64; 2]) -> i64 {
        self.0 * covector[0] + self.1 * covector[1]
    }

    /// The linear form `a t1 + b t2` at `t1 = alpha u, t2 = beta u`, divided by `u`.
    pub fn form(self, alpha: &Rat, beta: &Rat) -> Rat {
        alpha * BigInt::from(self.0) + beta * BigInt::from(self.1)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0 && self.1 == 0
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, o: Weight) -> Weight {
        Weight(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for Weight {
    type Output = Weight;

    fn sub(self, o: Weight) -> Weight {
        Weight(self.0 - o.0, self.1 - o.1)
    }
}

impl Neg for Weight {
    type Output = Weight;

    fn neg(self) -> Weight {
        Weight(-self.0, -self.1)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// Tangent weights of one torus-fixed point of the surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub v: Weight,
    pub w: Weight,
}

/// A torus-fixed point of `S^[n]`: one monomial ideal per chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HilbFixedPoint {
    pub partitions: Vec<Partition>,
    pub n: usize,
}

impl HilbFixedPoint {
    pub fn new(partitions: Vec<Partition>) -> Self {
        let n = partitions.iter().map(Partition::size).sum();
        Self { partitions, n }
    }
}

/// Streams the fixed points of `S^[n]` in a deterministic order: by the
/// composition of `n` over charts, then odometer order over partitions.
pub struct FixedPoints {
    charts: usize,
    by_size: Vec<Vec<Partition>>,
    sizes: Option<Vec<usize>>,
    picks: Vec<usize>,
}

impl FixedPoints {
    fn new(charts: usize, n: usize) -> Self {
        let by_size = (0..=n).map(partitions_of).collect();
        let sizes = if charts == 0 {
            if n == 0 { Some(Vec::new()) } else { None }
        } else {
            let mut s = vec![0; charts];
            s[0] = n;
            Some(s)
        };
        Self { charts, by_size, sizes, picks: vec![0; charts] }
    }

    /// Next composition of `n` into `charts` parts (reverse lexicographic).
    fn next_sizes(&mut self) {
        let Some(s) = self.sizes.as_mut() else { return };
        let k = self.charts;
        // find rightmost position (excluding last) with a nonzero entry
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| s[i] > 0) else {
            self.sizes = None;
            return;
        };
        s[i] -= 1;
        let rest: usize = s[i + 1..].iter().sum::<usize>() + 1;
        for x in s[i + 1..].iter_mut() {
            *x = 0;
        }
        s[i + 1] = rest;
    }
}

impl Iterator for FixedPoints {
    type Item = HilbFixedPoint;

    fn next(&mut self) -> Option<HilbFixedPoint> {
        let sizes = self.sizes.clone()?;
        let fp = HilbFixedPoint::new(
            sizes
                .iter()
                .zip(&self.picks)
                .map(|(s, p)| self.by_size[*s][*p].clone())
                .collect(),
        );
        // advance the odometer over partition choices, then the composition
        let mut carried = true;
        for i in (0..self.charts).rev() {
            self.picks[i] += 1;
            if self.picks[i] < self.by_size[sizes[i]].len() {
                carried = false;
                break;
            }
            self.picks[i] = 0;
        }
        if carried {
            self.next_sizes();
        }
        Some(fp)
    }
}

/// All fixed points of `S^[n]`, streamed.
pub fn enumerate_fixed_points(surface: &ToricSurfaceModel, n: usize) -> FixedPoints {
    FixedPoints::new(surface.charts.len(), n)
}

/// Weights of the tangent space `T_Z S^[n]` at a fixed point (2n of them).
pub fn tangent_character(surface: &ToricSurfaceModel, fp: &HilbFixedPoint) -> Vec<Weight> {
    let mut out = Vec::with_capacity(2 * fp.n);
    for (chart, lambda) in surface.charts.iter().zip(&fp.partitions) {
        for (r, c) in lambda.cells() {
            let a = lambda.arm(r, c) as i64;
            let l = lambda.leg(r, c) as i64;
            out.push(chart.v.scale(l + 1) - chart.w.scale(a));
            out.push(chart.w.scale(a + 1) - chart.v.scale(l));
        }
    }
    out
}

/// Weights of the fiber of `L^[n]` at a fixed point (n of them).
pub fn taut_character(surface: &ToricSurfaceModel, bundle: &EquivLineBundle, fp: &HilbFixedPoint) -> Vec<Weight> {
    let mut out = Vec::with_capacity(fp.n);
    for ((chart, mu), lambda) in surface.charts.iter().zip(&bundle.characters).zip(&fp.partitions) {
        for (r, c) in lambda.cells() {
            out.push(*mu - chart.v.scale(r as i64) - chart.w.scale(c as i64));
        }
    }
    out
}

/// Bialynicki-Birula index: tangent weights with negative pairing.
pub fn bb_index(surface: &ToricSurfaceModel, fp: &HilbFixedPoint, covector: [i64; 2]) -> Result<usize, ToricError> {
    let mut index = 0;
    for t in tangent_character(surface, fp) {
        match t.pair(covector) {
            0 => return Err(ToricError::DegenerateCovector(covector, t)),
            p if p < 0 => index += 1,
            _ => {}
        }
    }
    Ok(index)
}

/// A covector nonzero on every tangent weight of every fixed point of `S^[n]`.
pub fn generic_covector(surface: &ToricSurfaceModel, n: usize) -> [i64; 2] {
    let bound = surface
        .charts
        .iter()
        .flat_map(|c| [c.v.0.abs() + c.w.0.abs(), c.v.1.abs() + c.w.1.abs()])
        .max()
        .unwrap_or(1);
    // |first component| of any tangent weight is at most (n+1) * bound
    [1, (n as i64 + 2) * bound + 1]
}

/// `y^{-n} sum_fp y^{index(fp)}` written in `z = y^{1/2}`.
pub fn chi_y_bb_with(surface: &ToricSurfaceModel, n: usize, covector: [i64; 2]) -> Result<LaurentZ, ToricError> {
    let mut out = LaurentZ::zero();
    for fp in enumerate_fixed_points(surface, n) {
        let idx = bb_index(surface, &fp, covector)? as i64;
        out = &out + &LaurentZ::monomial(2 * idx - 2 * n as i64, Rat::from_integer(1.into()));
    }
    Ok(out)
}

/// Normalized chi_{-y} genus of `S^[n]` from Bialynicki-Birula indices.
pub fn chi_y_bb(surface: &ToricSurfaceModel, n: usize) -> LaurentZ {
    chi_y_bb_with(surface, n, generic_covector(surface, n)).expect("generic covector")
}

/// Normalized chi_{-y} of the surface itself from its Hodge numbers
/// (rational surfaces: `h00 = h22 = 1`, `h11 = c2 - 2`).
pub fn chi_y_hodge(surface: &ToricSurfaceModel) -> LaurentZ {
    let one = Rat::from_integer(1.into());
    let mut out = LaurentZ::monomial(-2, one.clone());
    out = &out + &LaurentZ::monomial(2, one);
    let h11 = Rat::from_integer(BigInt::from(surface.c2 - 2));
    if !h11.is_zero() {
        out = &out + &LaurentZ::constant(h11);
    }
    out
}

#[cfg(test)]
mod tests;
