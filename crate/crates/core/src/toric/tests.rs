use super::*;
use crate::series::rat;

fn std_chart() -> ToricSurfaceModel {
    // a one-chart "surface", only used for the local weight formulas
    ToricSurfaceModel {
        name: "chart".into(),
        charts: vec![Chart { v: Weight(1, 0), w: Weight(0, 1) }],
        k2: 0,
        c2: 1,
    }
}

fn sorted(mut v: Vec<Weight>) -> Vec<Weight> {
    v.sort();
    v
}

/// Coefficients of prod_{k>=1} (1 - q^k)^{-e} up to q^n, by repeated
/// multiplication with geometric series.
fn euler_product(e: usize, n: usize) -> Vec<u64> {
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

fn presets() -> Vec<(ToricSurfaceModel, EquivLineBundle)> {
    vec![
        ToricSurfaceModel::p2(1),
        ToricSurfaceModel::p2(3),
        ToricSurfaceModel::p1xp1(2, 3),
        ToricSurfaceModel::hirzebruch(1, 1, 2),
        ToricSurfaceModel::hirzebruch(2, 1, 3),
    ]
}

#[test]
fn fixed_point_census_matches_product() {
    for (s, _) in presets() {
        let oracle = euler_product(s.euler(), 6);
        for n in 0..=6 {
            let fps: Vec<_> = enumerate_fixed_points(&s, n).collect();
            assert_eq!(fps.len() as u64, oracle[n], "{} n={n}", s.name);
            let distinct: std::collections::HashSet<_> = fps.iter().collect();
            assert_eq!(distinct.len(), fps.len());
            assert!(fps.iter().all(|f| f.n == n && f.partitions.len() == s.euler()));
        }
    }
}

#[test]
fn census_examples() {
    let (p2, _) = ToricSurfaceModel::p2(1);
    let (p1p1, _) = ToricSurfaceModel::p1xp1(1, 1);
    assert_eq!(enumerate_fixed_points(&p2, 0).count(), 1);
    assert_eq!(enumerate_fixed_points(&p2, 2).count(), 9);
    assert_eq!(enumerate_fixed_points(&p1p1, 3).count(), 40);
    let empty = enumerate_fixed_points(&p2, 0).next().unwrap();
    assert!(empty.partitions.iter().all(|p| p.size() == 0));
}

#[test]
fn tangent_examples() {
    let s = std_chart();
    let one = HilbFixedPoint::new(vec![Partition::new(vec![1])]);
    assert_eq!(sorted(tangent_character(&s, &one)), sorted(vec![Weight(1, 0), Weight(0, 1)]));
    let two = HilbFixedPoint::new(vec![Partition::new(vec![2])]);
    assert_eq!(
        sorted(tangent_character(&s, &two)),
        sorted(vec![Weight(0, 2), Weight(1, -1), Weight(0, 1), Weight(1, 0)])
    );
    let none = HilbFixedPoint::new(vec![Partition::empty()]);
    assert!(tangent_character(&s, &none).is_empty());
}

#[test]
fn taut_examples() {
    let s = std_chart();
    let mu = Weight(3, -2);
    let bundle = EquivLineBundle { divisor: vec![], characters: vec![mu], l2: 0, lk: 0, very_ampleness_verified: false };
    let one = HilbFixedPoint::new(vec![Partition::new(vec![1])]);
    assert_eq!(taut_character(&s, &bundle, &one), vec![mu]);
    let zero = EquivLineBundle { characters: vec![Weight(0, 0)], ..bundle.clone() };
    let two = HilbFixedPoint::new(vec![Partition::new(vec![2])]);
    // basis {1, y} of C[x,y]/(x, y^2), y of weight -w
    assert_eq!(sorted(taut_character(&s, &zero, &two)), sorted(vec![Weight(0, 0), Weight(0, -1)]));
    let none = HilbFixedPoint::new(vec![Partition::empty()]);
    assert!(taut_character(&s, &zero, &none).is_empty());
}

#[test]
fn weight_counts() {
    for (s, l) in presets() {
        for n in 0..=4 {
            for fp in enumerate_fixed_points(&s, n) {
                let t = tangent_character(&s, &fp);
                assert_eq!(t.len(), 2 * n);
                assert!(t.iter().all(|w| !w.is_zero()));
                assert_eq!(taut_character(&s, &l, &fp).len(), n);
            }
        }
    }
}

#[test]
fn bb_examples() {
    let s = std_chart();
    let one = HilbFixedPoint::new(vec![Partition::new(vec![1])]);
    assert_eq!(bb_index(&s, &one, [1, 1]).unwrap(), 0);
    assert_eq!(bb_index(&s, &one, [-1, -1]).unwrap(), 2);
    assert!(matches!(bb_index(&s, &one, [0, 1]), Err(ToricError::DegenerateCovector(..))));

    let (p2, _) = ToricSurfaceModel::p2(1);
    let cov = generic_covector(&p2, 1);
    let mut idx: Vec<usize> = enumerate_fixed_points(&p2, 1).map(|fp| bb_index(&p2, &fp, cov).unwrap()).collect();
    idx.sort();
    assert_eq!(idx, vec![0, 1, 2]);
}

fn laurent(terms: &[(i64, i64)]) -> LaurentZ {
    LaurentZ::from_terms(terms.iter().map(|(k, c)| (*k, rat(*c, 1))))
}

#[test]
fn chi_y_examples() {
    let (p2, _) = ToricSurfaceModel::p2(1);
    let (p1p1, _) = ToricSurfaceModel::p1xp1(1, 1);
    assert_eq!(chi_y_bb(&p2, 1), laurent(&[(-2, 1), (0, 1), (2, 1)]));
    assert_eq!(chi_y_bb(&p1p1, 1), laurent(&[(-2, 1), (0, 2), (2, 1)]));
    assert_eq!(chi_y_bb(&p2, 0), LaurentZ::one());
    assert_eq!(chi_y_bb(&p1p1, 0), LaurentZ::one());
}

#[test]
fn chi_y_palindromic_and_covector_independent() {
    for (s, _) in presets() {
        for n in 1..=4 {
            let g = generic_covector(&s, n);
            let base = chi_y_bb(&s, n);
            assert!(base.is_palindromic(), "{} n={n}", s.name);
            assert_eq!(base.eval_at_one(), rat(euler_product(s.euler(), n)[n] as i64, 1));
            for cov in [[-g[0], -g[1]], [g[1], 1], [g[1] + 1, -1], [2, 2 * g[1] + 1]] {
                assert_eq!(chi_y_bb_with(&s, n, cov).unwrap(), base, "{} n={n} {cov:?}", s.name);
            }
        }
    }
}

#[test]
fn chi_y_hodge_at_n1() {
    for (s, _) in presets() {
        assert_eq!(chi_y_bb(&s, 1), chi_y_hodge(&s), "{}", s.name);
    }
}

#[test]
fn preset_chern_and_intersection_numbers() {
    for d in 1..=5 {
        let (s, l) = ToricSurfaceModel::p2(d);
        assert_eq!((s.euler(), s.k2, s.c2), (3, 9, 3));
        assert_eq!((l.l2, l.lk), (d * d, -3 * d));
        assert_eq!(l.chi(), (d + 1) * (d + 2) / 2);
        assert_eq!(l.genus(), (d - 1) * (d - 2) / 2);
    }
    for (a, b) in [(1, 1), (1, 2), (2, 3), (4, 1)] {
        let (s, l) = ToricSurfaceModel::p1xp1(a, b);
        assert_eq!((s.euler(), s.k2, s.c2), (4, 8, 4));
        assert_eq!((l.l2, l.lk), (2 * a * b, -2 * a - 2 * b));
        assert_eq!(l.chi(), (a + 1) * (b + 1));
    }
    for (a, c1, c2) in [(0, 1, 1), (1, 1, 2), (2, 1, 3), (3, 2, 7)] {
        let (s, l) = ToricSurfaceModel::hirzebruch(a, c1, c2);
        assert_eq!((s.euler(), s.k2, s.c2), (4, 8, 4));
        assert_eq!(l.l2, -a * c1 * c1 + 2 * c1 * c2);
        assert_eq!(-l.lk, c1 * (2 - a) + 2 * c2);
    }
}

#[test]
fn hirzebruch_zero_is_p1xp1() {
    let (_, h) = ToricSurfaceModel::hirzebruch(0, 2, 3);
    let (_, p) = ToricSurfaceModel::p1xp1(3, 2);
    assert_eq!((h.l2, h.lk), (p.l2, p.lk));
}

#[test]
fn preset_parsing() {
    assert_eq!(parse_preset("p2:3").unwrap(), ToricSurfaceModel::p2(3));
    assert_eq!(parse_preset("p1xp1:1,2").unwrap(), ToricSurfaceModel::p1xp1(1, 2));
    assert_eq!(parse_preset("hirzebruch:1:1,2").unwrap(), ToricSurfaceModel::hirzebruch(1, 1, 2));
    for bad in ["p3:1", "p2", "p2:x", "p1xp1:1", "hirzebruch:1:2", "hirzebruch:-1:1,1", ""] {
        assert!(matches!(parse_preset(bad), Err(ToricError::UnknownPreset(_))), "{bad}");
    }
    assert!(load_surface("no/such/model.json").is_err());
}

#[test]
fn divisor_override_on_preset_fans() {
    let (s, l) = preset_with_divisor("p2:1", &[1, 1, 0]).unwrap();
    assert_eq!(s.name, "p2");
    assert_eq!((l.l2, l.lk), (4, -6));
    let (_, l) = preset_with_divisor("hirzebruch:1", &[3, 2, 0, 0]).unwrap();
    let (_, h) = ToricSurfaceModel::hirzebruch(1, 2, 3);
    assert_eq!((l.l2, l.lk), (h.l2, h.lk));
    assert!(preset_with_divisor("p2", &[1, 0]).is_err());
    assert!(preset_fan("cubic:1").is_err());
}

#[test]
fn model_file_round_trip() {
    let (s, l) = ToricSurfaceModel::hirzebruch(1, 1, 2);
    let file = ModelFile::from_model(&s, &l);
    let text = serde_json::to_string_pretty(&file).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f1.json");
    std::fs::write(&path, &text).unwrap();
    let (s2, l2) = load_surface(path.to_str().unwrap()).unwrap();
    assert_eq!(s2.charts, s.charts);
    assert_eq!(l2.characters, l.characters);
    assert_eq!((s2.k2, s2.c2, l2.l2, l2.lk), (s.k2, s.c2, l.l2, l.lk));
}

#[test]
fn model_file_rejects_inconsistent_data() {
    let (s, l) = ToricSurfaceModel::p2(2);
    let mut f = ModelFile::from_model(&s, &l);
    f.bundle.l2 = 5;
    assert!(matches!(f.into_model(), Err(ToricError::InvalidModel(_))));
    let mut f = ModelFile::from_model(&s, &l);
    f.chern_numbers.k2 = 8;
    assert!(f.into_model().is_err());
    let mut f = ModelFile::from_model(&s, &l);
    f.bundle.characters[1] = Weight(5, 7);
    assert!(f.into_model().is_err());
    let mut f = ModelFile::from_model(&s, &l);
    f.charts.pop();
    assert!(f.into_model().is_err());
}

#[test]
fn fan_rejects_singular_cones() {
    assert!(ToricSurfaceModel::from_fan("bad", &[(1, 0), (1, 2), (-1, -1)], &[0, 0, 0]).is_err());
    assert!(ToricSurfaceModel::from_fan("bad", &[(1, 0), (0, 1)], &[0, 0]).is_err());
}

mod props {
    use proptest::prelude::*;

    use super::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn hirzebruch_intersections(a in 0i64..4, c1 in 0i64..4, c2 in 0i64..6) {
            // C0^2 = -a, f^2 = 0, C0.f = 1, K = -2 C0 - (a + 2) f
            let (s, l) = ToricSurfaceModel::hirzebruch(a, c1, c2);
            prop_assert_eq!(l.l2, 2 * c1 * c2 - a * c1 * c1);
            prop_assert_eq!(l.lk, c1 * (a - 2) - 2 * c2);
            prop_assert_eq!((s.k2, s.c2), (8, 4));
        }

        #[test]
        fn chi_y_is_palindromic_with_euler_value(a in 0i64..3, n in 0usize..4) {
            let (s, _) = ToricSurfaceModel::hirzebruch(a, 1, 1);
            let chi = chi_y_bb(&s, n);
            prop_assert!(chi.is_palindromic());
            let count = enumerate_fixed_points(&s, n).count() as i64;
            prop_assert_eq!(chi.eval_at_one(), rat(count, 1));
        }
    }
}
