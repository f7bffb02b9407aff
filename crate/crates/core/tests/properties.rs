use lowcross::approx::{color_matching, d_nu, discrepancy};
use lowcross::counting::{build_structure, oracle_count, CountingConfig};
use lowcross::cutting::{build_cutting, dual_bbox, verify_cutting, WeightedLineSet};
use lowcross::geometry::{
    dual_line, dual_point, orientation, perturb_general_position, refine, side_of_rat, HullTester, Line, Point,
};
use lowcross::partition::{build_partition, PartitionConfig, PartitionMode};
use lowcross::rng::Rng;
use lowcross::tree::{build_baseline_tree, tree_to_matching};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = Point> {
    (-1000i64..1000, -1000i64..1000).prop_map(|(x, y)| Point::new(x, y))
}

fn point_set(lo: usize, hi: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), lo..hi).prop_map(|mut v| {
        v.sort_by_key(|p| (p.x, p.y));
        v.dedup();
        v
    })
}

/// Distinct points with no vertical pair and no collinear triple.
fn general_set(lo: usize, hi: usize) -> impl Strategy<Value = Vec<Point>> {
    (point_set(lo, hi), any::<u64>())
        .prop_map(|(v, seed)| perturb_general_position(&refine(&v, 12), &mut Rng::new(seed), 64).unwrap())
}

fn line() -> impl Strategy<Value = Line> {
    (-50i128..50, -50i128..50, -60000i128..60000)
        .prop_filter("degenerate", |(a, b, _)| *a != 0 || *b != 0)
        .prop_map(|(a, b, c)| Line::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orientation_is_antisymmetric(a in point(), b in point(), c in point()) {
        prop_assert_eq!(orientation(a, b, c), -orientation(b, a, c));
        prop_assert_eq!(orientation(a, b, c), orientation(b, c, a));
    }

    #[test]
    fn duality_preserves_sides(p in point(), h in line()) {
        prop_assume!(!h.is_vertical());
        let hs = dual_point(&h).unwrap();
        prop_assert_eq!(side_of_rat(&dual_line(p), &hs), h.upward().eval_sign(p));
    }

    #[test]
    fn d_nu_is_a_metric(r in 0.0f64..100.0, s in 0.0f64..100.0, t in 0.0f64..100.0, nu in 0.01f64..10.0) {
        let d = |x, y| d_nu(x, y, nu);
        prop_assert!(d(r, s) >= 0.0 && d(r, s) < 1.0);
        prop_assert!((d(r, s) - d(s, r)).abs() < 1e-15);
        prop_assert_eq!(d(r, r), 0.0);
        prop_assert!(d(r, t) <= d(r, s) + d(s, t) + 1e-12);
    }

    #[test]
    fn hull_extreme_is_the_maximum(pts in point_set(1, 60), a in -40i128..40, b in -40i128..40) {
        prop_assume!(a != 0 || b != 0);
        let t = HullTester::new(&pts);
        let v = |p: Point| a * p.x as i128 + b * p.y as i128;
        let best = pts.iter().map(|&p| v(p)).max().unwrap();
        prop_assert_eq!(v(t.hull[t.extreme(a, b).unwrap()]), best);
    }

    #[test]
    fn matching_coloring_is_balanced(pts in point_set(4, 40), seed in 0u64..1000) {
        let tree = build_baseline_tree(&pts, &mut Rng::new(seed));
        let col = color_matching(&tree_to_matching(&tree), &mut Rng::new(seed + 1));
        prop_assert!(col.validate().is_ok());
        let total: i64 = col.signs.iter().map(|&s| s as i64).sum();
        prop_assert!(discrepancy(&pts, &col.signs) >= total.abs());
    }

    #[test]
    fn counting_is_exact(pts in general_set(4, 160), hs in prop::collection::vec(line(), 1..20)) {
        prop_assume!(pts.len() >= 4);
        let s = build_structure(&pts, &CountingConfig::default()).unwrap();
        prop_assert!(s.validate().is_ok());
        for h in hs.iter().map(|h| Line::new(h.a, h.b, h.c << 12)) {
            let h = &h;
            prop_assert_eq!(s.query_count(h).0, oracle_count(&pts, h));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cuttings_are_valid(duals in point_set(8, 60), r in prop::sample::select(vec![2.0, 4.0]), seed in 0u64..1000) {
        let set = WeightedLineSet::unit(duals.iter().map(|&p| dual_line(p)).collect());
        let mut rng = Rng::new(seed);
        let cut = build_cutting(&set, r, dual_bbox(&duals), &mut rng).unwrap();
        let rep = verify_cutting(&cut, &set, 500, &mut rng);
        prop_assert!(rep.ok, "{:?}", rep.messages);
    }

    #[test]
    fn partitions_are_valid(pts in point_set(40, 120), k in 4usize..10, seed in 0u64..1000) {
        prop_assume!(pts.len() >= 2 * k);
        let cfg = PartitionConfig { seed, ..PartitionConfig::default() };
        let p = build_partition(&pts, k, PartitionMode::Standard, &cfg).unwrap();
        prop_assert!(p.validate(&pts).is_ok());
        prop_assert_eq!(p.replay_exponents(), p.exponents.clone());
    }
}
