use lowcross::counting::{
    build_layers, build_structure, compute_k_region, oracle_count, random_halfplanes, CountingConfig, LayerMode,
};
use lowcross::geometry::{convex_hull, Line, Point};
use lowcross::rng::Rng;
use lowcross::shallow::{depth_all, generate, GenKind, GenParams};

fn disk(n: usize, seed: u64) -> Vec<Point> {
    generate(GenKind::UniformDisk, &GenParams::n(n), &mut Rng::new(seed)).unwrap()
}

/// Counts by sorting the projections onto the query normal once per direction.
fn projection_count(pts: &[Point], h: &Line) -> usize {
    let mut proj: Vec<i128> = pts.iter().map(|p| h.a * p.x as i128 + h.b * p.y as i128).collect();
    proj.sort_unstable();
    proj.partition_point(|&v| v <= h.c)
}

#[test]
fn unit_square_half() {
    let s = 1 << 10;
    let pts = [Point::new(0, 0), Point::new(s, 0), Point::new(0, s), Point::new(s, s)];
    assert_eq!(oracle_count(&pts, &Line::new(0, 2, s as i128)), 2);
}

#[test]
fn boundary_point_is_counted() {
    let pts = [Point::new(3, 3), Point::new(10, 10)];
    assert_eq!(oracle_count(&pts, &Line::new(1, 1, 6)), 1);
}

#[test]
fn second_oracle_agrees_on_512() {
    let pts = disk(512, 5);
    for h in random_halfplanes(&pts, 300, &mut Rng::new(6)) {
        assert_eq!(oracle_count(&pts, &h), projection_count(&pts, &h));
    }
}

#[test]
fn eight_points_single_layer() {
    let pts = disk(8, 1);
    let s = build_structure(&pts, &CountingConfig::default()).unwrap();
    assert_eq!(s.layers.len(), 1);
    assert_eq!(s.layers[0].classes.len(), 1);
    s.validate().unwrap();
    for h in random_halfplanes(&pts, 50, &mut Rng::new(2)) {
        assert_eq!(s.query_count(&h).0, oracle_count(&pts, &h));
    }
}

#[test]
fn layers_partition_uniform_2048() {
    let pts = disk(2048, 1);
    let layers = build_layers(
        &pts,
        8,
        LayerMode::ExactDepth,
        &CountingConfig::default(),
        &mut Rng::new(1),
    )
    .unwrap();
    let mut seen = vec![false; pts.len()];
    for (i, l) in layers.iter().enumerate() {
        if i > 0 {
            assert_eq!(l.k, 2 * layers[i - 1].k);
        }
        for &p in &l.points {
            assert!(!seen[p]);
            seen[p] = true;
        }
    }
    assert!(seen.iter().all(|&b| b));
    assert!(layers.len() <= (2048f64 / 8.0).log2().ceil() as usize + 2);
}

#[test]
fn structure_storage_is_n_log_n() {
    let pts = disk(2048, 1);
    let s = build_structure(&pts, &CountingConfig::default()).unwrap();
    s.validate().unwrap();
    let n = pts.len() as f64;
    let ratio = s.storage() as f64 / (n * n.log2());
    assert!(ratio <= 4.0, "storage {} is {ratio:.2} n log n", s.storage());
}

#[test]
fn class_points_inside_simplex() {
    let pts = disk(1024, 3);
    let s = build_structure(&pts, &CountingConfig::default()).unwrap();
    for l in &s.layers {
        for c in &l.classes {
            for &i in &c.points {
                assert!(c.simplex.contains(pts[i]));
            }
        }
    }
}

#[test]
fn modes_agree_on_most_points() {
    let pts = disk(1024, 1);
    let cfg = CountingConfig::default();
    let exact = build_layers(&pts, 16, LayerMode::ExactDepth, &cfg, &mut Rng::new(1)).unwrap();
    let region = build_layers(&pts, 16, LayerMode::KRegion, &cfg, &mut Rng::new(1)).unwrap();
    let label = |ls: &[lowcross::counting::LayerSpec]| {
        let mut v = vec![0usize; pts.len()];
        for (i, l) in ls.iter().enumerate() {
            for &p in &l.points {
                v[p] = i;
            }
        }
        v
    };
    let (a, b) = (label(&exact), label(&region));
    let agree = a.iter().zip(&b).filter(|(x, y)| x == y).count();
    assert!(
        agree as f64 >= 0.9 * pts.len() as f64,
        "agreement {agree}/{}",
        pts.len()
    );
}

#[test]
fn outside_points_are_shallow() {
    let pts = disk(2048, 1);
    let k = 32;
    let kr = compute_k_region(&pts, k, 4.0, 4.0, &mut Rng::new(7)).unwrap();
    let depth = depth_all(&pts).unwrap();
    let worst = (0..pts.len())
        .filter(|&i| !kr.contains(pts[i]))
        .map(|i| depth[i])
        .max()
        .unwrap();
    assert!(worst as usize <= 8 * k, "depth {worst}");
    for v in convex_hull(&pts) {
        assert!(!kr.contains(v));
    }
}

#[test]
fn empty_and_full_queries() {
    let pts = disk(512, 4);
    let s = build_structure(&pts, &CountingConfig::default()).unwrap();
    let (c, st) = s.query_count(&Line::new(0, 1, -(1 << 40)));
    assert_eq!(c, 0);
    assert!(st.layers_scanned >= 1);
    let (c, st) = s.query_count(&Line::new(0, 1, 1 << 40));
    assert_eq!(c, pts.len());
    assert!(st.used_complement);
}
