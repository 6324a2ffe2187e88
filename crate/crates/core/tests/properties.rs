use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use wectkit::dataset::sample_intensities;
use wectkit::{
    compute_wecf, compute_wect_along, curve_distance, equally_spaced, generate_support, thresholds, vectorize,
    wect_distance, weighted_euler_characteristic, Aggregation, CurveMetric, Direction, Extension, Image,
    IntensityModel, Point, ShapeKind, ShapeSpec, SimplicialComplex, StepFunction, WeightedComplex,
};

fn odd_grid() -> impl Strategy<Value = usize> {
    prop_oneof![Just(1usize), Just(3), Just(5), Just(7)]
}

/// Odd-sized image with a random support and intensities in (0, 1].
fn image(max_n: usize) -> impl Strategy<Value = Image> {
    odd_grid().prop_filter("size", move |&n| n <= max_n).prop_flat_map(|n| {
        proptest::collection::vec(prop_oneof![Just(0.0), 0.001f64..=1.0], n * n)
            .prop_map(move |px| Image::new(n, px).unwrap())
    })
}

fn extension() -> impl Strategy<Value = Extension> {
    prop_oneof![Just(Extension::Max), Just(Extension::Min), Just(Extension::Avg)]
}

fn weighted(img: &Image, ext: Extension) -> WeightedComplex {
    wectkit::triangulate(img, 0.0).unwrap().extend(ext)
}

/// Step function with breakpoints on a quarter grid inside [-8, 8].
fn step_function() -> impl Strategy<Value = StepFunction> {
    proptest::collection::btree_map(-32i32..32, -8i32..8, 0..10).prop_map(|m| {
        StepFunction::new(m.into_iter().map(|(h, v)| (h as f64 / 4.0, v as f64 / 2.0)).collect()).unwrap()
    })
}

fn brute_force(k: &WeightedComplex, s: Direction, t: f64) -> f64 {
    let (c, sn) = (s.angle().cos(), s.angle().sin());
    let cx = k.complex();
    let w = k.weights().unwrap();
    cx.simplices()
        .enumerate()
        .filter(|(_, sx)| {
            sx.vertices()
                .iter()
                .map(|&v| {
                    let p = cx.vertices()[v as usize];
                    p.x as f64 * c + p.y as f64 * sn
                })
                .all(|h| h <= t + 1e-9)
        })
        .map(|(id, sx)| if sx.dim() % 2 == 0 { w[id] } else { -w[id] })
        .sum()
}

#[test]
fn full_grid_counts() {
    for n in 1..=20usize {
        let k = SimplicialComplex::rectangle(n, n);
        let [v, e, t] = k.counts();
        assert_eq!(v, n * n);
        assert_eq!(e, (n - 1) * (3 * n - 1));
        assert_eq!(t, 2 * (n - 1) * (n - 1));
        assert_eq!(k.euler_characteristic(), 1);
    }
}

#[test]
fn full_three_by_three_against_brute_force() {
    let px: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let img = Image::new(3, px).unwrap();
    for ext in Extension::ALL {
        let k = weighted(&img, ext);
        assert_eq!(k.complex().len(), 33);
        for s in equally_spaced(12, 0.1).unwrap() {
            let f = compute_wecf(&k, s).unwrap();
            let mut t = -2.0;
            while t <= 2.0 {
                assert!((f.eval(t) - brute_force(&k, s, t)).abs() < 1e-12);
                t += 0.01;
            }
        }
    }
}

#[test]
fn square_support_breaks_at_its_sides() {
    let m = generate_support(&ShapeSpec::study(ShapeKind::Square)).unwrap();
    let complex = Arc::new(SimplicialComplex::from_mask(m.n(), m.cells()).unwrap());
    let img = sample_intensities(&m, IntensityModel::Uniform, 11).unwrap();
    let k = WeightedComplex::from_image(complex, &img)
        .unwrap()
        .extend(Extension::Avg);
    let f = compute_wecf(&k, Direction::from_angle(0.0)).unwrap();
    let heights: Vec<f64> = f.heights().collect();
    assert_eq!(heights, (-17..=17).map(f64::from).collect::<Vec<_>>());
    assert_eq!(f.eval(-17.5), 0.0);
    assert_eq!(f.eval(45.0), weighted_euler_characteristic(&k).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn masks_give_closed_complexes(img in image(7)) {
        let k = wectkit::triangulate(&img, 0.0).unwrap();
        let cx = k.complex();
        let nv = cx.vertices().len() as u32;
        let edges: HashSet<[u32; 2]> = cx.edges().iter().map(|e| { let mut e = *e; e.sort(); e }).collect();
        prop_assert_eq!(edges.len(), cx.edges().len());
        for e in cx.edges() {
            prop_assert!(e[0] < nv && e[1] < nv && e[0] != e[1]);
        }
        for t in cx.triangles() {
            for f in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                let mut f = f;
                f.sort();
                prop_assert!(edges.contains(&f));
            }
        }
        // rebuilding through the validating constructor accepts it
        prop_assert!(SimplicialComplex::from_parts(cx.vertices().to_vec(), cx.edges().to_vec(), cx.triangles().to_vec()).is_ok());
        prop_assert_eq!(cx.vertices().len(), img.pixels().iter().filter(|&&p| p > 0.0).count());
    }

    #[test]
    fn extension_bounds_and_symmetry(ws in proptest::collection::vec(0.001f64..=1.0, 1..=3), perm in 0usize..6) {
        let lo = ws.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mn, avg, mx) = (Extension::Min.apply(&ws), Extension::Avg.apply(&ws), Extension::Max.apply(&ws));
        prop_assert!(lo == mn && mn <= avg + 1e-15 && avg <= mx + 1e-15 && mx == hi);
        let mut shuffled = ws.clone();
        shuffled.rotate_left(perm % ws.len());
        if perm >= 3 { shuffled.reverse(); }
        for ext in Extension::ALL {
            prop_assert_eq!(ext.apply(&ws), ext.apply(&shuffled));
            let c = ext.apply(&ws);
            prop_assert_eq!(ext.apply(&vec![c; ws.len()]), c);
        }
    }

    #[test]
    fn constant_weights_scale_the_euler_characteristic(img in image(7), c in 0.001f64..=1.0, ext in extension()) {
        let flat = Image::new(img.n(), img.pixels().iter().map(|&p| if p > 0.0 { c } else { 0.0 }).collect()).unwrap();
        let k = weighted(&flat, ext);
        let chi = k.complex().euler_characteristic() as f64;
        prop_assert!((weighted_euler_characteristic(&k).unwrap() - c * chi).abs() < 1e-12);
    }

    #[test]
    fn wecf_matches_brute_force(img in image(7), ext in extension(), first in 0.0f64..std::f64::consts::TAU) {
        let k = weighted(&img, ext);
        for s in equally_spaced(8, first).unwrap() {
            let f = compute_wecf(&k, s).unwrap();
            let mut probes: Vec<f64> = f.heights().collect();
            probes.extend(f.steps().windows(2).map(|w| 0.5 * (w[0].0 + w[1].0)));
            probes.extend([-10.0, 10.0]);
            for t in probes {
                prop_assert!((f.eval(t) - brute_force(&k, s, t)).abs() < 1e-12);
            }
            prop_assert!((f.terminal_value() - weighted_euler_characteristic(&k).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_weights_give_integer_curves(img in image(7), angle in 0.0f64..std::f64::consts::TAU) {
        let ones = Image::new(img.n(), img.pixels().iter().map(|&p| if p > 0.0 { 1.0 } else { 0.0 }).collect()).unwrap();
        for ext in Extension::ALL {
            let f = compute_wecf(&weighted(&ones, ext), Direction::from_angle(angle)).unwrap();
            for &(_, v) in f.steps() {
                prop_assert_eq!(v, v.round());
            }
        }
    }

    #[test]
    fn simplex_order_does_not_matter(img in image(5), ext in extension(), angle in 0.0f64..std::f64::consts::TAU, rot in 0usize..100) {
        let k = wectkit::triangulate(&img, 0.0).unwrap();
        let cx = k.complex();
        if cx.is_empty() {
            return Ok(());
        }
        // relabel vertices by a rotation and reverse the edge and triangle lists
        let nv = cx.vertices().len();
        let r = rot % nv;
        let map = |v: u32| ((v as usize + nv - r) % nv) as u32;
        let mut vertices = cx.vertices().to_vec();
        vertices.rotate_left(r);
        let mut weights = k.vertex_weights().to_vec();
        weights.rotate_left(r);
        let edges: Vec<[u32; 2]> = cx.edges().iter().rev().map(|e| [map(e[1]), map(e[0])]).collect();
        let triangles: Vec<[u32; 3]> = cx.triangles().iter().rev().map(|t| [map(t[2]), map(t[0]), map(t[1])]).collect();
        let shuffled = Arc::new(SimplicialComplex::from_parts(vertices, edges, triangles).unwrap());
        let a = compute_wecf(&k.clone().extend(ext), Direction::from_angle(angle)).unwrap();
        let b = compute_wecf(&WeightedComplex::new(shuffled, weights).unwrap().extend(ext), Direction::from_angle(angle)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn half_turn_reverses_the_direction(img in image(7), ext in extension(), angle in 0.0f64..std::f64::consts::PI) {
        // rotating the image by pi keeps the diagonal orientation
        let n = img.n();
        let rotated = Image::new(n, img.pixels().iter().rev().copied().collect()).unwrap();
        let f = compute_wecf(&weighted(&img, ext), Direction::from_angle(angle + std::f64::consts::PI)).unwrap();
        let g = compute_wecf(&weighted(&rotated, ext), Direction::from_angle(angle)).unwrap();
        let mut cuts: Vec<f64> = f.heights().chain(g.heights()).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        let mut probes: Vec<f64> = cuts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        probes.extend([-10.0, 10.0]);
        for t in probes {
            prop_assert!((f.eval(t) - g.eval(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_sampling_contains_the_coarse_one(img in image(7), ext in extension()) {
        let dirs = equally_spaced(5, 0.3).unwrap();
        let w = compute_wect_along(&weighted(&img, ext), &dirs).unwrap();
        let coarse = vectorize(&w, 9, -4.0, 4.0).unwrap();
        let fine = vectorize(&w, 17, -4.0, 4.0).unwrap();
        for d in 0..5 {
            let f = fine.row(d);
            let picked: Vec<f64> = (0..9).map(|j| f[2 * j]).collect();
            prop_assert_eq!(coarse.row(d), &picked[..]);
        }
        prop_assert_eq!(thresholds(9, -4.0, 4.0).unwrap()[8], 4.0);
    }

    #[test]
    fn metric_axioms(f in step_function(), g in step_function(), h in step_function()) {
        for m in [CurveMetric::L2, CurveMetric::Lp(1.0), CurveMetric::Lp(3.0), CurveMetric::Sup] {
            let d = |a: &StepFunction, b: &StepFunction| curve_distance(a, b, m, -10.0, 10.0).unwrap();
            prop_assert_eq!(d(&f, &f), 0.0);
            prop_assert!((d(&f, &g) - d(&g, &f)).abs() < 1e-12);
            prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-9);
            prop_assert!(d(&f, &g) >= 0.0);
        }
    }

    #[test]
    fn l2_distance_matches_a_riemann_sum(f in step_function(), g in step_function()) {
        // breakpoints lie on a 1/4 grid, so midpoint sums on a 1/64 grid are exact
        let (a, b) = (-9.0, 9.0);
        let steps = ((b - a) * 64.0) as usize;
        let sum: f64 = (0..steps)
            .map(|i| {
                let t = a + (i as f64 + 0.5) / 64.0;
                let d = f.eval(t) - g.eval(t);
                d * d / 64.0
            })
            .sum();
        let exact = curve_distance(&f, &g, CurveMetric::L2, a, b).unwrap();
        prop_assert!((exact - sum.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn wect_distance_is_a_metric(a in image(5), b in image(5), c in image(5)) {
        prop_assume!(a.n() == b.n() && b.n() == c.n());
        let dirs = equally_spaced(6, 0.2).unwrap();
        let w: Vec<_> = [a, b, c].iter().map(|i| compute_wect_along(&weighted(i, Extension::Max), &dirs).unwrap()).collect();
        for agg in [Aggregation::Integral, Aggregation::Max] {
            let d = |i: usize, j: usize| wect_distance(&w[i], &w[j], CurveMetric::L2, agg, -5.0, 5.0).unwrap();
            prop_assert_eq!(d(0, 0), 0.0);
            prop_assert!((d(0, 1) - d(1, 0)).abs() < 1e-12);
            prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        }
    }
}

#[test]
fn point_heights_are_exact_on_axes() {
    let east = Direction::from_angle(0.0);
    let north = Direction::from_angle(std::f64::consts::FRAC_PI_2);
    assert_eq!(north.height(Point::new(5, -3)), -3.0);
    assert_eq!(east.height(Point::new(5, -3)), 5.0);
}
