use std::path::Path;

use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};

use super::{Chart, ToricError, Weight};
use crate::series::Rat;

/// A smooth projective toric surface, described by its torus-fixed points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricSurfaceModel {
    pub name: String,
    pub charts: Vec<Chart>,
    /// `K^2`
    pub k2: i64,
    /// `c_2`, the Euler number; equals the number of charts.
    pub c2: i64,
}

/// An equivariant line bundle on a [`ToricSurfaceModel`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivLineBundle {
    /// Divisor coordinates the bundle was built from (empty for custom models).
    pub divisor: Vec<i64>,
    /// Fiber character at each chart, in chart order.
    pub characters: Vec<Weight>,
    /// `L^2`
    pub l2: i64,
    /// `L.K`
    pub lk: i64,
    /// The ampleness hypotheses of the curve-counting formulas are not checked;
    /// this flag only records that fact.
    #[serde(default)]
    pub very_ampleness_verified: bool,
}

impl EquivLineBundle {
    /// `chi(L) = (L^2 - L.K)/2 + 1` on a surface with `chi(O_S) = 1`.
    pub fn chi(&self) -> i64 {
        (self.l2 - self.lk) / 2 + 1
    }

    /// Arithmetic genus of curves in `|L|`: `(L^2 + L.K)/2 + 1`.
    pub fn genus(&self) -> i64 {
        (self.l2 + self.lk) / 2 + 1
    }
}

/// JSON layout of a custom model file.
///
/// ```json
/// {
///   "name": "P2(1)",
///   "charts": [{"v": [1, 0], "w": [0, 1]}, ...],
///   "chern_numbers": {"k2": 9, "c2": 3},
///   "bundle": {"characters": [[1, 0], ...], "l2": 1, "lk": -3}
/// }
/// ```
///
/// Intersection numbers are cross-checked against localization on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub name: String,
    pub charts: Vec<Chart>,
    pub chern_numbers: ChernNumbers,
    pub bundle: BundleFile,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChernNumbers {
    pub k2: i64,
    pub c2: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BundleFile {
    pub characters: Vec<Weight>,
    pub l2: i64,
    pub lk: i64,
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<(ToricSurfaceModel, EquivLineBundle), ToricError> {
        let text = std::fs::read_to_string(path)?;
        let file: ModelFile = serde_json::from_str(&text)?;
        file.into_model()
    }

    pub fn from_model(surface: &ToricSurfaceModel, bundle: &EquivLineBundle) -> Self {
        Self {
            name: surface.name.clone(),
            charts: surface.charts.clone(),
            chern_numbers: ChernNumbers { k2: surface.k2, c2: surface.c2 },
            bundle: BundleFile { characters: bundle.characters.clone(), l2: bundle.l2, lk: bundle.lk },
        }
    }

    pub fn into_model(self) -> Result<(ToricSurfaceModel, EquivLineBundle), ToricError> {
        let surface = ToricSurfaceModel {
            name: self.name,
            charts: self.charts,
            k2: self.chern_numbers.k2,
            c2: self.chern_numbers.c2,
        };
        let bundle = EquivLineBundle {
            divisor: Vec::new(),
            characters: self.bundle.characters,
            l2: self.bundle.l2,
            lk: self.bundle.lk,
            very_ampleness_verified: false,
        };
        surface.validate()?;
        surface.validate_bundle(&bundle)?;
        Ok((surface, bundle))
    }
}

fn det(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

impl ToricSurfaceModel {
    /// Builds the model and a line bundle from a complete smooth fan, rays in
    /// counterclockwise order, and the divisor `sum a_j D_j`.
    pub fn from_fan(
        name: &str,
        rays: &[(i64, i64)],
        divisor: &[i64],
    ) -> Result<(ToricSurfaceModel, EquivLineBundle), ToricError> {
        let k = rays.len();
        if k < 3 || divisor.len() != k {
            return Err(ToricError::InvalidModel(format!(
                "need >= 3 rays and one divisor coefficient per ray (got {} rays, {} coefficients)",
                k,
                divisor.len()
            )));
        }
        let mut charts = Vec::with_capacity(k);
        let mut characters = Vec::with_capacity(k);
        for i in 0..k {
            let (a, b) = (rays[i], rays[(i + 1) % k]);
            if det(a, b) != 1 {
                return Err(ToricError::InvalidModel(format!(
                    "cone {i} spanned by {a:?}, {b:?} is not smooth and counterclockwise"
                )));
            }
            // dual basis of the cone
            let m1 = Weight(b.1, -b.0);
            let m2 = Weight(-a.1, a.0);
            charts.push(Chart { v: m1, w: m2 });
            characters.push(m1.scale(divisor[i]) + m2.scale(divisor[(i + 1) % k]));
        }
        // self-intersections: v_{j-1} + v_{j+1} = b_j v_j, D_j^2 = -b_j
        let mut self_int = Vec::with_capacity(k);
        for j in 0..k {
            let (p, c, n) = (rays[(j + k - 1) % k], rays[j], rays[(j + 1) % k]);
            let s = (p.0 + n.0, p.1 + n.1);
            if det(s, c) != 0 {
                return Err(ToricError::InvalidModel(format!("ray {j} is not balanced by its neighbours")));
            }
            let b = if c.0 != 0 { s.0 / c.0 } else { s.1 / c.1 };
            self_int.push(-b);
        }
        let l_dot: Vec<i64> = (0..k)
            .map(|j| divisor[j] * self_int[j] + divisor[(j + k - 1) % k] + divisor[(j + 1) % k])
            .collect();
        let l2 = (0..k).map(|j| divisor[j] * l_dot[j]).sum();
        let lk = -l_dot.iter().sum::<i64>();
        let surface = ToricSurfaceModel { name: name.to_string(), charts, k2: 12 - k as i64, c2: k as i64 };
        let bundle = EquivLineBundle {
            divisor: divisor.to_vec(),
            characters,
            l2,
            lk,
            very_ampleness_verified: false,
        };
        surface.validate()?;
        surface.validate_bundle(&bundle)?;
        Ok((surface, bundle))
    }

    pub fn p2(d: i64) -> (ToricSurfaceModel, EquivLineBundle) {
        Self::from_fan(&format!("p2:{d}"), &[(1, 0), (0, 1), (-1, -1)], &[d, 0, 0]).expect("built-in fan")
    }

    pub fn p1xp1(a: i64, b: i64) -> (ToricSurfaceModel, EquivLineBundle) {
        Self::from_fan(&format!("p1xp1:{a},{b}"), &[(1, 0), (0, 1), (-1, 0), (0, -1)], &[a, b, 0, 0])
            .expect("built-in fan")
    }

    /// `F_a` with `L = c1 C_0 + c2 f`, `C_0^2 = -a`.
    pub fn hirzebruch(a: i64, c1: i64, c2: i64) -> (ToricSurfaceModel, EquivLineBundle) {
        Self::from_fan(
            &format!("hirzebruch:{a}:{c1},{c2}"),
            &[(1, 0), (0, 1), (-1, a), (0, -1)],
            &[c2, c1, 0, 0],
        )
        .expect("built-in fan")
    }

    pub fn euler(&self) -> usize {
        self.charts.len()
    }

    fn check_point() -> (Rat, Rat) {
        (Rat::new(BigInt::from(7), BigInt::from(3)), Rat::new(BigInt::from(-5), BigInt::from(11)))
    }

    /// Degree-2 localization `sum_p f(p) / (e(v_p) e(w_p))`.
    fn localize<F: Fn(&Chart, usize) -> Rat>(&self, alpha: &Rat, beta: &Rat, f: F) -> Result<Rat, ToricError> {
        let mut total = Rat::zero();
        for (i, chart) in self.charts.iter().enumerate() {
            let e = chart.v.form(alpha, beta) * chart.w.form(alpha, beta);
            if e.is_zero() {
                return Err(ToricError::InvalidModel(format!("chart {i} has a degenerate tangent weight")));
            }
            total += f(chart, i) / e;
        }
        Ok(total)
    }

    /// Checks chart count and Chern numbers by localization.
    pub fn validate(&self) -> Result<(), ToricError> {
        if self.charts.len() as i64 != self.c2 {
            return Err(ToricError::InvalidModel(format!(
                "{} charts but c2 = {}",
                self.charts.len(),
                self.c2
            )));
        }
        let (al, be) = Self::check_point();
        let c2 = self.localize(&al, &be, |c, _| c.v.form(&al, &be) * c.w.form(&al, &be))?;
        let k2 = self.localize(&al, &be, |c, _| {
            let s = (c.v + c.w).form(&al, &be);
            &s * &s
        })?;
        if c2 != Rat::from_integer(self.c2.into()) || k2 != Rat::from_integer(self.k2.into()) {
            return Err(ToricError::InvalidModel(format!(
                "localized (K^2, c2) = ({k2}, {c2}) disagrees with declared ({}, {})",
                self.k2, self.c2
            )));
        }
        for (i, c) in self.charts.iter().enumerate() {
            if det((c.v.0, c.v.1), (c.w.0, c.w.1)).abs() != 1 {
                return Err(ToricError::InvalidModel(format!("chart {i} weights are not a lattice basis")));
            }
        }
        Ok(())
    }

    /// Checks `L^2` and `L.K` by localization and that neighbouring
    /// characters differ by a multiple of a shared tangent direction.
    pub fn validate_bundle(&self, bundle: &EquivLineBundle) -> Result<(), ToricError> {
        let k = self.charts.len();
        if bundle.characters.len() != k {
            return Err(ToricError::InvalidModel(format!(
                "{} characters for {} charts",
                bundle.characters.len(),
                k
            )));
        }
        let (al, be) = Self::check_point();
        let mu = |i: usize| bundle.characters[i].form(&al, &be);
        let l2 = self.localize(&al, &be, |_, i| mu(i) * mu(i))?;
        let minus_lk = self.localize(&al, &be, |c, i| mu(i) * (c.v + c.w).form(&al, &be))?;
        if l2 != Rat::from_integer(bundle.l2.into()) || minus_lk != Rat::from_integer((-bundle.lk).into()) {
            return Err(ToricError::InvalidModel(format!(
                "localized (L^2, L.K) = ({l2}, {}) disagrees with declared ({}, {})",
                -minus_lk, bundle.l2, bundle.lk
            )));
        }
        for i in 0..k {
            let diff = bundle.characters[i] - bundle.characters[(i + 1) % k];
            let c = &self.charts[i];
            let along = |t: Weight| det((diff.0, diff.1), (t.0, t.1)) == 0;
            if !(along(c.v) || along(c.w)) {
                return Err(ToricError::InvalidModel(format!(
                    "characters at charts {i} and {} do not differ along a tangent direction",
                    (i + 1) % k
                )));
            }
        }
        Ok(())
    }
}

fn parse_ints(s: &str, sep: char) -> Option<Vec<i64>> {
    s.split(sep).map(|t| t.trim().parse().ok()).collect()
}

/// Parses `p2:d`, `p1xp1:a,b` or `hirzebruch:a:c1,c2`.
pub fn parse_preset(id: &str) -> Result<(ToricSurfaceModel, EquivLineBundle), ToricError> {
    let bad = || ToricError::UnknownPreset(id.to_string());
    let (family, rest) = id.split_once(':').ok_or_else(bad)?;
    match family {
        "p2" => {
            let d = parse_ints(rest, ',').filter(|v| v.len() == 1).ok_or_else(bad)?;
            Ok(ToricSurfaceModel::p2(d[0]))
        }
        "p1xp1" => {
            let ab = parse_ints(rest, ',').filter(|v| v.len() == 2).ok_or_else(bad)?;
            Ok(ToricSurfaceModel::p1xp1(ab[0], ab[1]))
        }
        "hirzebruch" => {
            let (a, c) = rest.split_once(':').ok_or_else(bad)?;
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let c = parse_ints(c, ',').filter(|v| v.len() == 2).ok_or_else(bad)?;
            if a < 0 {
                return Err(bad());
            }
            Ok(ToricSurfaceModel::hirzebruch(a, c[0], c[1]))
        }
        _ => Err(bad()),
    }
}

/// Name and rays of the fan behind a preset id, ignoring its bundle part:
/// `p2`, `p1xp1` or `hirzebruch:a`.
pub fn preset_fan(id: &str) -> Result<(String, Vec<(i64, i64)>), ToricError> {
    let bad = || ToricError::UnknownPreset(id.to_string());
    let (family, rest) = id.split_once(':').unwrap_or((id, ""));
    match family {
        "p2" => Ok(("p2".into(), vec![(1, 0), (0, 1), (-1, -1)])),
        "p1xp1" => Ok(("p1xp1".into(), vec![(1, 0), (0, 1), (-1, 0), (0, -1)])),
        "hirzebruch" => {
            let a: i64 = rest.split(':').next().and_then(|t| t.trim().parse().ok()).ok_or_else(bad)?;
            if a < 0 {
                return Err(bad());
            }
            Ok((format!("hirzebruch:{a}"), vec![(1, 0), (0, 1), (-1, a), (0, -1)]))
        }
        _ => Err(bad()),
    }
}

/// The fan of a preset with the line bundle `sum a_j D_j`, one coefficient
/// per ray.
pub fn preset_with_divisor(id: &str, divisor: &[i64]) -> Result<(ToricSurfaceModel, EquivLineBundle), ToricError> {
    let (name, rays) = preset_fan(id)?;
    ToricSurfaceModel::from_fan(&name, &rays, divisor)
}

/// A preset id, or else a path to a model file.
pub fn load_surface(id: &str) -> Result<(ToricSurfaceModel, EquivLineBundle), ToricError> {
    match parse_preset(id) {
        Ok(m) => Ok(m),
        Err(e) => {
            let path = Path::new(id);
            if path.is_file() {
                ModelFile::load(path)
            } else {
                Err(e)
            }
        }
    }
}
