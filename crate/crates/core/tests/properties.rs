mod common;

use carnot_lab::carnot::{GroupSpec, HomHom};
use carnot_lab::config::parse_region;
use carnot_lab::energy::{ImageMeasurer, MapSpec};
use carnot_lab::measures::{packing_premeasure_est, PackingParams};
use carnot_lab::packing::{build_greedy_packing, verify_packing, RadiusFn};
use proptest::prelude::*;

fn heis(m: usize) -> GroupSpec {
    GroupSpec::heisenberg(m).unwrap()
}

fn point(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-3.0f64..3.0, n)
}

proptest! {
    #[test]
    fn gauge_is_homogeneous(g in point(3), r in 0.01f64..50.0) {
        let h = heis(1);
        let lhs: f64 = h.gauge(&h.dilate(r, &g));
        let rhs = r * h.gauge(&g);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn dilations_compose(g in point(5), r in 0.1f64..10.0, s in 0.1f64..10.0) {
        let h = heis(2);
        let a = h.dilate(r, &h.dilate(s, &g));
        let b = h.dilate(r * s, &g);
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn distance_is_left_invariant(k in point(3), a in point(3), b in point(3)) {
        let h = heis(1);
        let d: f64 = h.distance(&a, &b);
        let moved: f64 = h.distance(&h.product(&k, &a), &h.product(&k, &b));
        prop_assert!((d - moved).abs() <= 1e-9 * d.max(1.0));
    }

    #[test]
    fn quasi_triangle_holds(a in point(3), b in point(3), c in point(3)) {
        let h = heis(1);
        let k = h.quasi_triangle_constant();
        let (ab, ac, cb): (f64, f64, f64) = (h.distance(&a, &b), h.distance(&a, &c), h.distance(&c, &b));
        prop_assert!(ab <= k * (ac + cb) * (1.0 + 1e-12));
    }

    #[test]
    fn homomorphisms_respect_products_and_dilations(g in point(3), h2 in point(3), r in 0.1f64..5.0) {
        let h = heis(1);
        let u = HomHom::coordinate_projection(h, &[0, 1]).unwrap();
        let target = *u.target();
        let prod = u.apply(&h.product(&g, &h2));
        let split = target.product(&u.apply(&g), &u.apply(&h2));
        let dil = u.apply(&h.dilate(r, &g));
        let dil2 = target.dilate(r, &u.apply(&g));
        for i in 0..target.n() {
            prop_assert!((prod[i] - split[i]).abs() <= 1e-12 * prod[i].abs().max(1.0));
            prop_assert!((dil[i] - dil2[i]).abs() <= 1e-12 * dil[i].abs().max(1.0));
        }
    }

    #[test]
    fn sampled_points_lie_in_the_region(side in 0.1f64..1.0, len in 0.1f64..4.0, step in 0.05f64..0.3, seed in 0u64..100) {
        let h = heis(1);
        for text in [format!("box:sides={side}/{side}/{side}"), format!("horizontal-segment:L={len}"), format!("vertical-segment:h={len}")] {
            let region = parse_region(&h, &text).unwrap();
            let pts = region.sample(&h, step, seed).unwrap();
            prop_assert!(!pts.is_empty());
            prop_assert!(pts.iter().all(|p| region.contains(&h, p)));
            prop_assert_eq!(&pts, &region.sample(&h, step, seed).unwrap());
        }
    }

    #[test]
    fn greedy_packings_are_valid(k in 2i32..5, n in 1usize..4, ell in 1.0f64..3.0, height in 0.1f64..1.0) {
        let h = heis(1);
        let region = parse_region(&h, &format!("box:sides=0.5/0.5/{height}")).unwrap();
        let gp = build_greedy_packing(&h, &region, &RadiusFn, 2.0, 0.5f64.powi(k), n, ell, 0).unwrap();
        prop_assert!(!gp.family.is_empty());
        prop_assert!(verify_packing(&gp.family).valid);
        prop_assert!(gp.family.colors.iter().all(|&c| c < n));
    }

    #[test]
    fn real_valued_energy_is_monotone_in_the_radius(c in point(3), r in 0.01f64..1.0, grow in 1.0f64..4.0) {
        let h = heis(1);
        let m = ImageMeasurer::new(MapSpec::parse(h, "coord:x").unwrap(), 16).unwrap();
        let (small, large) = (m.raster(&c, r).unwrap(), m.raster(&c, r * grow).unwrap());
        prop_assert!(small <= large * (1.0 + 1e-12));
        // The x-extent of a gauge ball is exactly twice its radius; samples
        // see at most that much.
        prop_assert!(small <= 2.0 * r * (1.0 + 1e-12));
        prop_assert!((m.measure(&c, r).unwrap() - 2.0 * r).abs() <= 1e-12 * r);
    }
}

#[test]
fn quotient_energy_scales_with_degree_three() {
    let h = heis(1);
    let m = ImageMeasurer::new(MapSpec::parse(h, "quotient-yz").unwrap(), 32).unwrap().raster_only();
    let origin = [0.0; 3];
    let base = m.measure(&origin, 1.0).unwrap();
    for r in [0.25, 0.5, 2.0] {
        let v = m.measure(&origin, r).unwrap();
        assert!((v / (base * r.powi(3)) - 1.0).abs() < 1e-6, "r {r}: {v} vs {}", base * r.powi(3));
    }
}

#[test]
fn unit_square_packings_are_ahlfors_regular() {
    // sum radius^2 over greedy packings of a 2-regular set stays within
    // constant factors of the area as the mesh shrinks.
    let g = GroupSpec::euclidean(2).unwrap();
    let region = parse_region(&g, "box:sides=1/1").unwrap();
    let params = PackingParams { n_colors: 1, ell: 1.0, seed: 0 };
    let values: Vec<f64> =
        (2..=6).map(|k| packing_premeasure_est(&g, &region, &RadiusFn, 2.0, 0.5f64.powi(k), &params).unwrap().score).collect();
    let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(lo > 0.0 && hi / lo <= 2.0, "{values:?}");
}

#[test]
fn exhaustive_oracle_on_a_triangle() {
    let all = vec![vec![false, true, true], vec![true, false, true], vec![true, true, false]];
    assert_eq!(common::exhaustive_optimum(&all, 1), 1);
    assert_eq!(common::exhaustive_optimum(&all, 2), 2);
    assert_eq!(common::exhaustive_optimum(&all, 3), 3);
}

#[test]
fn exhaustive_oracle_matches_counting_on_a_line() {
    // Centers at spacing 1 on a line with conflict reach 2 ell r = 1.5:
    // only neighbors conflict, so one color keeps every other center.
    let g = GroupSpec::euclidean(1).unwrap();
    let centers: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64]).collect();
    let c = common::conflicts(&g, &centers, 0.75, 1.0);
    assert_eq!(common::exhaustive_optimum(&c, 1), 5);
    assert_eq!(common::exhaustive_optimum(&c, 2), 9);
}
