//! Output-sensitive halfplane range counting over shallow layers.
//!
//! The point set is peeled into layers `P_1, P_2, ...` with doubling
//! shallowness parameters. Each layer carries a shallow simplicial partition
//! whose classes hold counting trees, and a convex hull answering emptiness
//! queries. A query scans the layers for the first one missed by the range or
//! by its complement, then counts the lighter side over the earlier layers.

use crate::bounds::{k1_threshold, BoundError};
use crate::geometry::{convex_hull_indices, dual_line, BBox, GeomError, HullTester, Line, Point, Simplex};
use crate::partition::{build_partition, PartitionConfig, PartitionError, PartitionMode};
use crate::rational::{cmp_left, line_f64, orient, side_vertex_with, Vertex};
use crate::rng::Rng;
use crate::shallow::{count_below_or_on, depth_all, ShallowError};
use crate::sweep::{pair_line_sweep, SweepVisitor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CountingError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Shallow(#[from] ShallowError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("invalid parameters: {0}")]
    Params(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerMode {
    ExactDepth,
    KRegion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CountingConfig {
    pub mode: LayerMode,
    /// Lower bound on the first shallowness parameter.
    pub k1_floor: usize,
    pub c1: f64,
    /// Sample-size constant of the K-region.
    pub c2: f64,
    /// Level-depth constant of the K-region.
    pub c3: f64,
    pub leaf_size: usize,
    /// Target number of children per counting-tree node.
    pub tree_fanout: usize,
    pub partition: PartitionConfig,
    pub tree_partition: PartitionConfig,
    pub seed: u64,
}

impl Default for CountingConfig {
    fn default() -> Self {
        CountingConfig {
            mode: LayerMode::ExactDepth,
            k1_floor: 8,
            c1: 1.0,
            c2: 4.0,
            c3: 4.0,
            leaf_size: 8,
            tree_fanout: 8,
            partition: PartitionConfig {
                b: 4.0,
                ..PartitionConfig::default()
            },
            tree_partition: PartitionConfig {
                b: 4.0,
                ..PartitionConfig::default()
            },
            seed: 0,
        }
    }
}

impl CountingConfig {
    pub fn validate(&self) -> Result<(), CountingError> {
        if self.k1_floor < 2 {
            return Err(CountingError::Params("k1_floor < 2".into()));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c3 > 0.0) {
            return Err(CountingError::Params("constants must be positive".into()));
        }
        if self.leaf_size < 1 {
            return Err(CountingError::Params("leaf_size < 1".into()));
        }
        if self.tree_fanout < 2 {
            return Err(CountingError::Params("tree_fanout < 2".into()));
        }
        self.partition.validate()?;
        self.tree_partition.validate()?;
        Ok(())
    }
}

/// `a x + b y <= c`, or `a x + b y < c` when `open`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range {
    pub h: Line,
    pub open: bool,
}

impl Range {
    pub fn below(h: Line) -> Range {
        Range { h, open: false }
    }

    pub fn complement(&self) -> Range {
        Range {
            h: self.h.flipped(),
            open: !self.open,
        }
    }

    fn holds(&self, s: i32) -> bool {
        if self.open {
            s < 0
        } else {
            s <= 0
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        self.holds(self.h.eval_sign(p))
    }

    pub fn count(&self, pts: &[Point]) -> usize {
        pts.iter().filter(|&&p| self.contains(p)).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Disjoint,
    Contained,
    Crossed,
}

/// Relation of a range to the convex hull held by `t`.
pub fn hull_relation(t: &HullTester, r: &Range) -> Relation {
    if t.hull.is_empty() {
        return Relation::Disjoint;
    }
    let (a, b) = (r.h.a, r.h.b);
    let hi = t.extreme(a, b).unwrap();
    if r.holds(r.h.eval_sign(t.hull[hi])) {
        return Relation::Contained;
    }
    let lo = t.extreme(-a, -b).unwrap();
    if !r.holds(r.h.eval_sign(t.hull[lo])) {
        return Relation::Disjoint;
    }
    Relation::Crossed
}

/// True iff no point of the hull lies in the range.
pub fn hull_misses(t: &HullTester, r: &Range) -> bool {
    match t.extreme(-r.h.a, -r.h.b) {
        None => true,
        Some(lo) => !r.holds(r.h.eval_sign(t.hull[lo])),
    }
}

/// Relation of a range to a closed simplex; bounding simplices always cross.
pub fn simplex_relation(s: &Simplex, r: &Range) -> Relation {
    if s.is_bounding() {
        return Relation::Crossed;
    }
    let sg = s.signs(&r.h);
    let inside = sg.iter().filter(|&&x| r.holds(x)).count();
    match inside {
        3 => Relation::Contained,
        0 => Relation::Disjoint,
        _ => Relation::Crossed,
    }
}

/// Brute-force closed-halfplane count, `a x + b y <= c`.
pub fn oracle_count(pts: &[Point], h: &Line) -> usize {
    count_below_or_on(pts, h)
}

#[derive(Clone, Debug)]
struct Node {
    hull: HullTester,
    size: usize,
    children: Vec<usize>,
    /// Leaf points; empty for inner nodes.
    points: Vec<Point>,
}

/// Counting tree: recursive standard partitions with convex-hull node
/// regions, down to leaves of at most `leaf_size` points.
#[derive(Clone, Debug)]
pub struct CountTree {
    nodes: Vec<Node>,
    pub height: usize,
}

impl CountTree {
    pub fn build(pts: &[Point], idx: &[usize], cfg: &CountingConfig) -> Result<Self, CountingError> {
        let mut t = CountTree {
            nodes: Vec::new(),
            height: 0,
        };
        let sub: Vec<Point> = idx.iter().map(|&i| pts[i]).collect();
        t.build_node(sub, 1, cfg)?;
        Ok(t)
    }

    fn build_node(&mut self, sub: Vec<Point>, level: usize, cfg: &CountingConfig) -> Result<usize, CountingError> {
        self.height = self.height.max(level);
        let id = self.nodes.len();
        self.nodes.push(Node {
            hull: HullTester::new(&sub),
            size: sub.len(),
            children: Vec::new(),
            points: Vec::new(),
        });
        let m = sub.len();
        if m <= cfg.leaf_size.max(3) {
            self.nodes[id].points = sub;
            return Ok(id);
        }
        let k = m.div_ceil(cfg.tree_fanout).max(2).min(m / 2);
        let pcfg = PartitionConfig {
            seed: cfg.tree_partition.seed.wrapping_add(id as u64),
            ..cfg.tree_partition.clone()
        };
        let part = build_partition(&sub, k, PartitionMode::Standard, &pcfg)?;
        let mut groups: Vec<Vec<Point>> = part
            .classes
            .iter()
            .map(|c| c.iter().map(|&i| sub[i]).collect())
            .collect();
        if groups.len() < 2 {
            let mut s = sub;
            s.sort_by_key(|p| (p.x, p.y));
            let right = s.split_off(m / 2);
            groups = vec![s, right];
        }
        let mut children = Vec::with_capacity(groups.len());
        for g in groups {
            children.push(self.build_node(g, level + 1, cfg)?);
        }
        self.nodes[id].children = children;
        Ok(id)
    }

    pub fn size(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.size)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Sum of node sizes over all nodes.
    pub fn storage(&self) -> usize {
        self.nodes.iter().map(|n| n.size).sum()
    }

    /// Exact count of the range, adding the nodes touched to `visited`.
    pub fn count(&self, r: &Range, visited: &mut usize) -> usize {
        if self.nodes.is_empty() {
            return 0;
        }
        self.count_node(0, r, visited)
    }

    /// [`CountTree::count`] without charging the root, whose visit the
    /// caller has already paid for.
    pub fn count_below_root(&self, r: &Range, visited: &mut usize) -> usize {
        if self.nodes.is_empty() {
            return 0;
        }
        let c = self.count_node(0, r, visited);
        *visited -= 1;
        c
    }

    fn count_node(&self, id: usize, r: &Range, visited: &mut usize) -> usize {
        *visited += 1;
        let node = &self.nodes[id];
        match hull_relation(&node.hull, r) {
            Relation::Contained => node.size,
            Relation::Disjoint => 0,
            Relation::Crossed if node.children.is_empty() => r.count(&node.points),
            Relation::Crossed => node.children.iter().map(|&c| self.count_node(c, r, visited)).sum(),
        }
    }

    /// Sizes add up at every node and leaves hold their points.
    pub fn validate(&self) -> Result<(), String> {
        for (i, n) in self.nodes.iter().enumerate() {
            if n.children.is_empty() {
                if n.points.len() != n.size {
                    return Err(format!("leaf {i} stores {} of {} points", n.points.len(), n.size));
                }
            } else {
                let s: usize = n.children.iter().map(|&c| self.nodes[c].size).sum();
                if s != n.size {
                    return Err(format!("node {i}: children hold {s} of {} points", n.size));
                }
            }
        }
        Ok(())
    }
}

/// Dual `(<= t)`-level vertices of a sample, with the hulls used for
/// membership tests.
#[derive(Clone, Debug)]
pub struct KRegion {
    pub v_minus: Vec<Vertex>,
    pub v_plus: Vec<Vertex>,
    pub hull_minus_upper: Vec<Vertex>,
    pub hull_plus_lower: Vec<Vertex>,
    pub t: usize,
    pub sample_size: usize,
    /// Times the sample was enlarged to satisfy the centerpoint condition.
    pub resamples: u32,
    /// The sample is all of the input.
    pub exact: bool,
}

impl KRegion {
    /// Membership via the hulls.
    pub fn contains(&self, p: Point) -> bool {
        let l = dual_line(p);
        let f = line_f64(&l);
        !self.hull_minus_upper.iter().any(|v| side_vertex_with(&l, &f, v) > 0)
            && !self.hull_plus_lower.iter().any(|v| side_vertex_with(&l, &f, v) < 0)
    }

    /// Membership against the full vertex sets.
    pub fn contains_brute(&self, p: Point) -> bool {
        let l = dual_line(p);
        let f = line_f64(&l);
        !self.v_minus.iter().any(|v| side_vertex_with(&l, &f, v) > 0)
            && !self.v_plus.iter().any(|v| side_vertex_with(&l, &f, v) < 0)
    }
}

struct LevelVisitor<'a> {
    pts: &'a [Point],
    left: i64,
    t: i64,
    minus: Vec<(usize, usize)>,
    plus: Vec<(usize, usize)>,
}

impl SweepVisitor for LevelVisitor<'_> {
    fn start(&mut self, _pivot: usize, left: &[bool]) {
        self.left = left.iter().filter(|&&b| b).count() as i64;
    }

    fn flip(&mut self, _j: usize, now_left: bool) {
        self.left += if now_left { 1 } else { -1 };
    }

    fn event(&mut self, pivot: usize, other: usize, _left: &[bool]) {
        if other < pivot {
            return;
        }
        let (p, q) = (self.pts[pivot], self.pts[other]);
        let (dx, dy) = (q.x - p.x, q.y - p.y);
        if dx == 0 {
            return;
        }
        // The sweep line is directed upward, so left is above iff it leans right.
        let dx = if dy < 0 || (dy == 0 && dx < 0) { -dx } else { dx };
        let m = self.pts.len() as i64;
        let right = m - 2 - self.left;
        // A dual vertex has as many dual lines below it as there are points
        // above the primal line.
        let (above, below) = if dx > 0 { (self.left, right) } else { (right, self.left) };
        if above < self.t {
            self.minus.push((pivot, other));
        }
        if below < self.t {
            self.plus.push((pivot, other));
        }
    }
}

fn chain(mut v: Vec<Vertex>, upper: bool) -> Vec<Vertex> {
    v.sort_by(cmp_left);
    v.dedup_by(|a, b| cmp_left(a, b).is_eq());
    let mut out: Vec<Vertex> = Vec::new();
    for p in v {
        while out.len() >= 2 {
            let o = orient(&out[out.len() - 2], &out[out.len() - 1], &p);
            if (upper && o >= 0) || (!upper && o <= 0) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// K-region of `pts` for shallowness parameter `k`.
pub fn compute_k_region(pts: &[Point], k: usize, c2: f64, c3: f64, rng: &mut Rng) -> Result<KRegion, CountingError> {
    let n = pts.len();
    if k < 2 || k >= n {
        return Err(CountingError::Params(format!("need 2 <= k < n, got k = {k}, n = {n}")));
    }
    let r = n as f64 / k as f64;
    let lr = r.log2().max(1.0);
    let mut c2 = c2;
    let mut resamples = 0;
    let (sample, t, exact) = loop {
        let want = (c2 * r * lr).ceil() as usize;
        let exact = want >= n;
        let sample = if exact {
            (0..n).collect()
        } else {
            rng.sample_indices(n, want)
        };
        // An exhaustive sample keeps the same level fraction as a partial one.
        let t = if exact {
            (c3 / c2 * k as f64).ceil()
        } else {
            (c3 * lr).ceil()
        } as usize;
        let t = t.max(1);
        if exact || (t as f64) < sample.len() as f64 / 3.0 {
            break (sample, t, exact);
        }
        c2 *= 2.0;
        resamples += 1;
    };
    let sp: Vec<Point> = sample.iter().map(|&i| pts[i]).collect();
    let mut vis = LevelVisitor {
        pts: &sp,
        left: 0,
        t: t as i64,
        minus: Vec::new(),
        plus: Vec::new(),
    };
    pair_line_sweep(&sp, None, &mut vis);
    let vertex = |&(i, j): &(usize, usize)| Vertex::meet(dual_line(sp[i]), dual_line(sp[j]));
    let v_minus: Vec<Vertex> = vis.minus.iter().filter_map(vertex).collect();
    let v_plus: Vec<Vertex> = vis.plus.iter().filter_map(vertex).collect();
    Ok(KRegion {
        hull_minus_upper: chain(v_minus.clone(), true),
        hull_plus_lower: chain(v_plus.clone(), false),
        v_minus,
        v_plus,
        t,
        sample_size: sp.len(),
        resamples,
        exact,
    })
}

/// One layer before its search structures are attached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    /// Indices into the input.
    pub points: Vec<usize>,
    pub k: usize,
    /// Largest depth of a layer point inside the not yet peeled remainder.
    pub max_depth: u32,
}

/// Peel `pts` into layers with `k_{i+1} = 2 k_i`.
///
/// Points of depth at most `k_i` in the remainder form layer `i` (exact
/// mode), or the points outside the K-region together with the remainder's
/// hull vertices (K-region mode). A remainder smaller than `2 k_{i+1}` becomes
/// the last layer.
pub fn build_layers(
    pts: &[Point],
    k1: usize,
    mode: LayerMode,
    cfg: &CountingConfig,
    rng: &mut Rng,
) -> Result<Vec<LayerSpec>, CountingError> {
    if k1 < 2 {
        return Err(CountingError::Params("k1 < 2".into()));
    }
    let mut rest: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::new();
    let mut k = k1;
    while !rest.is_empty() {
        let sub: Vec<Point> = rest.iter().map(|&i| pts[i]).collect();
        let depths = depth_all(&sub)?;
        let last = rest.len() < 2 * k;
        let take: Vec<bool> = if last {
            vec![true; sub.len()]
        } else {
            match mode {
                LayerMode::ExactDepth => depths.iter().map(|&d| d as usize <= k).collect(),
                LayerMode::KRegion => {
                    let kr = compute_k_region(&sub, k, cfg.c2, cfg.c3, rng)?;
                    let mut t: Vec<bool> = sub.iter().map(|&p| !kr.contains(p)).collect();
                    for i in convex_hull_indices(&sub) {
                        t[i] = true;
                    }
                    t
                }
            }
        };
        let mut layer = Vec::new();
        let mut keep = Vec::new();
        let mut max_depth = 0;
        for (j, &i) in rest.iter().enumerate() {
            if take[j] {
                layer.push(i);
                max_depth = max_depth.max(depths[j]);
            } else {
                keep.push(i);
            }
        }
        out.push(LayerSpec {
            points: layer,
            k,
            max_depth,
        });
        rest = keep;
        k *= 2;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct LayerClass {
    pub simplex: Simplex,
    pub points: Vec<usize>,
    pub tree: CountTree,
}

#[derive(Clone, Debug)]
pub struct Layer {
    pub points: Vec<usize>,
    pub k: usize,
    pub max_depth: u32,
    pub classes: Vec<LayerClass>,
    pub hull: HullTester,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub layers_scanned: usize,
    pub emptiness_tests: usize,
    pub classes_contained: usize,
    pub classes_crossed: usize,
    pub tree_nodes_visited: usize,
    pub used_complement: bool,
    /// First layer (1-based) missed by one side; layers + 1 if none.
    pub first_empty: usize,
    pub used_fallback: bool,
}

impl QueryStats {
    pub fn cost(&self) -> usize {
        self.classes_crossed + self.tree_nodes_visited
    }
}

#[derive(Clone, Debug)]
pub struct LayeredCounter {
    pub points: Vec<Point>,
    pub layers: Vec<Layer>,
    pub fallback: CountTree,
    pub k1: usize,
    /// Largest `max_depth / k_i` over the layers.
    pub shallowness: f64,
    pub config: CountingConfig,
}

/// First shallowness parameter: the threshold calculator, floored.
pub fn first_k(n: usize, cfg: &CountingConfig) -> Result<usize, CountingError> {
    let c = k1_threshold(2, n as f64, cfg.c1)?.ceil() as usize;
    Ok(cfg.k1_floor.max(c.max(2)))
}

/// Build the layered counting structure over `pts`.
pub fn build_structure(pts: &[Point], cfg: &CountingConfig) -> Result<LayeredCounter, CountingError> {
    cfg.validate()?;
    let n = pts.len();
    if n < 4 {
        return Err(CountingError::Params(format!("need at least 4 points, got {n}")));
    }
    let mut rng = Rng::new(cfg.seed);
    let k1 = first_k(n, cfg)?;
    let specs = build_layers(pts, k1, cfg.mode, cfg, &mut rng)?;
    let mut layers = Vec::with_capacity(specs.len());
    let mut shallowness: f64 = 0.0;
    for (li, spec) in specs.into_iter().enumerate() {
        let sub: Vec<Point> = spec.points.iter().map(|&i| pts[i]).collect();
        shallowness = shallowness.max(spec.max_depth as f64 / spec.k as f64);
        let mut classes = Vec::new();
        if sub.len() < 2 * spec.k {
            let tree = CountTree::build(pts, &spec.points, cfg)?;
            classes.push(LayerClass {
                simplex: Simplex::bounding(&sub),
                points: spec.points.clone(),
                tree,
            });
        } else {
            let pcfg = PartitionConfig {
                seed: cfg.partition.seed.wrapping_add(li as u64),
                ..cfg.partition.clone()
            };
            let part = build_partition(&sub, spec.k, PartitionMode::Shallow, &pcfg)?;
            for (c, s) in part.classes.iter().zip(&part.simplices) {
                let idx: Vec<usize> = c.iter().map(|&j| spec.points[j]).collect();
                let tree = CountTree::build(pts, &idx, cfg)?;
                classes.push(LayerClass {
                    simplex: *s,
                    points: idx,
                    tree,
                });
            }
        }
        layers.push(Layer {
            hull: HullTester::new(&sub),
            points: spec.points,
            k: spec.k,
            max_depth: spec.max_depth,
            classes,
        });
    }
    let all: Vec<usize> = (0..n).collect();
    let fallback = CountTree::build(pts, &all, cfg)?;
    Ok(LayeredCounter {
        points: pts.to_vec(),
        layers,
        fallback,
        k1,
        shallowness,
        config: cfg.clone(),
    })
}

impl LayeredCounter {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Exact `|P ∩ H|` for the closed halfplane `a x + b y <= c`.
    pub fn query_count(&self, h: &Line) -> (usize, QueryStats) {
        let mut st = QueryStats::default();
        let below = Range::below(*h);
        let above = below.complement();
        let mut side = below;
        st.first_empty = self.layers.len() + 1;
        for (i, layer) in self.layers.iter().enumerate() {
            st.layers_scanned += 1;
            st.emptiness_tests += 2;
            if hull_misses(&layer.hull, &below) {
                st.first_empty = i + 1;
                break;
            }
            if hull_misses(&layer.hull, &above) {
                st.first_empty = i + 1;
                side = above;
                st.used_complement = true;
                break;
            }
        }
        let count = if st.first_empty <= 2 {
            st.used_fallback = true;
            self.fallback.count(&side, &mut st.tree_nodes_visited)
        } else {
            let mut c = 0;
            for layer in &self.layers[..st.first_empty - 1] {
                for class in &layer.classes {
                    match simplex_relation(&class.simplex, &side) {
                        Relation::Contained => {
                            st.classes_contained += 1;
                            c += class.points.len();
                        }
                        Relation::Disjoint => {}
                        Relation::Crossed => {
                            st.classes_crossed += 1;
                            c += class.tree.count_below_root(&side, &mut st.tree_nodes_visited);
                        }
                    }
                }
            }
            c
        };
        let total = if st.used_complement { self.n() - count } else { count };
        (total, st)
    }

    /// Nodes the global fallback tree visits on the closed halfplane.
    pub fn fallback_cost(&self, h: &Line) -> usize {
        let mut v = 0;
        self.fallback.count(&Range::below(*h), &mut v);
        v
    }

    /// Indices `j` (0-based) of layers whose hull meets the lighter side of
    /// `h` although `k_{j-1} >= 2 w`.
    pub fn hull_miss_violations(&self, h: &Line) -> Vec<usize> {
        let below = Range::below(*h);
        let cb = below.count(&self.points);
        let (light, w) = if cb <= self.n() - cb {
            (below, cb)
        } else {
            (below.complement(), self.n() - cb)
        };
        (1..self.layers.len())
            .filter(|&j| self.layers[j - 1].k >= 2 * w && !hull_misses(&self.layers[j].hull, &light))
            .collect()
    }

    /// Sum of class sizes over every node of every class tree.
    pub fn storage(&self) -> usize {
        self.layers
            .iter()
            .flat_map(|l| &l.classes)
            .map(|c| c.tree.storage())
            .sum()
    }

    /// Structural audit of layers, classes and trees.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.n();
        let mut seen = vec![false; n];
        for (li, layer) in self.layers.iter().enumerate() {
            if li > 0 && layer.k != 2 * self.layers[li - 1].k {
                return Err(format!("layer {li}: k does not double"));
            }
            if self.config.mode == LayerMode::ExactDepth && layer.max_depth as usize > layer.k {
                return Err(format!("layer {li}: depth {} > k = {}", layer.max_depth, layer.k));
            }
            let mut inl = 0;
            for (ci, class) in layer.classes.iter().enumerate() {
                if class.tree.size() != class.points.len() {
                    return Err(format!("layer {li} class {ci}: tree size mismatch"));
                }
                class
                    .tree
                    .validate()
                    .map_err(|e| format!("layer {li} class {ci}: {e}"))?;
                for &p in &class.points {
                    if seen[p] {
                        return Err(format!("point {p} in two classes"));
                    }
                    seen[p] = true;
                    if !class.simplex.contains(self.points[p]) {
                        return Err(format!("point {p} outside its simplex"));
                    }
                }
                inl += class.points.len();
            }
            if inl != layer.points.len() {
                return Err(format!(
                    "layer {li}: classes hold {inl} of {} points",
                    layer.points.len()
                ));
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(format!("point {p} in no layer"));
        }
        let bound = (n as f64 / self.k1 as f64).log2().ceil().max(0.0) as usize + 2;
        if self.layers.len() > bound {
            return Err(format!("{} layers > {bound}", self.layers.len()));
        }
        self.fallback.validate()
    }

    pub fn dump_json(&self) -> serde_json::Value {
        let layers: Vec<serde_json::Value> = self
            .layers
            .iter()
            .map(|l| {
                serde_json::json!({
                    "size": l.points.len(),
                    "k": l.k,
                    "max_depth": l.max_depth,
                    "classes": l.classes.len(),
                    "hull": l.hull.hull.len(),
                })
            })
            .collect();
        serde_json::json!({
            "schema": 1,
            "n": self.n(),
            "k1": self.k1,
            "mode": self.config.mode,
            "shallowness": self.shallowness,
            "layers": layers,
            "storage": self.storage(),
            "fallback_nodes": self.fallback.node_count(),
        })
    }
}

/// Random closed halfplanes whose boundary passes through a uniform point of
/// the bounding box of `pts`, with a random direction and orientation.
pub fn random_halfplanes(pts: &[Point], count: usize, rng: &mut Rng) -> Vec<Line> {
    let bb = BBox::of_points(pts);
    const D: i64 = 1 << 16;
    (0..count)
        .map(|_| {
            let a = rng.range_i64(-D, D) as i128;
            let mut b = rng.range_i64(-D, D) as i128;
            if b == 0 {
                b = 1;
            }
            let x = rng.range_i64(bb.xmin as i64, bb.xmax as i64) as i128;
            let y = rng.range_i64(bb.ymin as i64, bb.ymax as i64) as i128;
            Line::new(a, b, a * x + b * y)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shallow::{depth, generate, GenKind, GenParams};

    fn uniform(n: usize, seed: u64) -> Vec<Point> {
        generate(GenKind::UniformDisk, &GenParams::n(n), &mut Rng::new(seed)).unwrap()
    }

    #[test]
    fn oracle_closed_convention() {
        let pts = [Point::new(0, 0), Point::new(2, 0), Point::new(0, 2), Point::new(2, 2)];
        assert_eq!(oracle_count(&pts, &Line::new(0, 2, 1)), 2);
        assert_eq!(oracle_count(&pts, &Line::new(1, 0, 0)), 2);
        assert_eq!(oracle_count(&pts, &Line::new(1, 1, 0)), 1);
    }

    #[test]
    fn hull_emptiness_matches_brute_force() {
        let pts = uniform(300, 3);
        let t = HullTester::new(&pts);
        let mut rng = Rng::new(4);
        for h in random_halfplanes(&pts, 500, &mut rng) {
            for r in [Range::below(h), Range::below(h).complement()] {
                assert_eq!(hull_misses(&t, &r), r.count(&pts) == 0);
                let want = match r.count(&pts) {
                    0 => Relation::Disjoint,
                    c if c == pts.len() => Relation::Contained,
                    _ => Relation::Crossed,
                };
                assert_eq!(hull_relation(&t, &r), want);
            }
        }
    }

    #[test]
    fn tiny_input_is_one_leaf() {
        let pts = uniform(8, 1);
        let s = build_structure(&pts, &CountingConfig::default()).unwrap();
        assert_eq!(s.layers.len(), 1);
        assert_eq!(s.layers[0].classes.len(), 1);
        assert_eq!(s.layers[0].classes[0].tree.node_count(), 1);
        s.validate().unwrap();
    }

    #[test]
    fn convex_position_is_one_layer() {
        let pts = generate(GenKind::ConvexPosition, &GenParams::n(64), &mut Rng::new(2)).unwrap();
        let l = build_layers(
            &pts,
            8,
            LayerMode::ExactDepth,
            &CountingConfig::default(),
            &mut Rng::new(0),
        )
        .unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l[0].points.len(), 64);
    }

    #[test]
    fn queries_are_exact() {
        let pts = uniform(400, 5);
        let s = build_structure(&pts, &CountingConfig::default()).unwrap();
        s.validate().unwrap();
        assert!(s.layers.len() > 1);
        let mut rng = Rng::new(6);
        let mut comp = 0;
        for h in random_halfplanes(&pts, 400, &mut rng) {
            let (c, st) = s.query_count(&h);
            assert_eq!(c, oracle_count(&pts, &h));
            comp += st.used_complement as usize;
            assert!(s.hull_miss_violations(&h).is_empty());
        }
        assert!(comp > 0);
    }

    #[test]
    fn empty_and_full_ranges() {
        let pts = uniform(200, 7);
        let s = build_structure(&pts, &CountingConfig::default()).unwrap();
        let (c, st) = s.query_count(&Line::new(0, 1, -(1 << 50)));
        assert_eq!(c, 0);
        assert!(st.layers_scanned >= 1);
        let (c, st) = s.query_count(&Line::new(0, 1, 1 << 50));
        assert_eq!(c, 200);
        assert!(st.used_complement);
    }

    #[test]
    fn vertical_queries_are_exact() {
        let pts = uniform(200, 8);
        let s = build_structure(&pts, &CountingConfig::default()).unwrap();
        for &p in pts.iter().step_by(17) {
            let h = Line::new(1, 0, p.x as i128);
            assert_eq!(s.query_count(&h).0, oracle_count(&pts, &h));
        }
    }

    #[test]
    fn k_region_excludes_hull_vertices() {
        let pts = uniform(600, 9);
        let kr = compute_k_region(&pts, 12, 1.0, 1.0, &mut Rng::new(1)).unwrap();
        for i in convex_hull_indices(&pts) {
            assert!(!kr.contains(pts[i]));
        }
        for &p in pts.iter().step_by(7) {
            assert_eq!(kr.contains(p), kr.contains_brute(p));
        }
    }

    #[test]
    fn k_region_holds_a_deep_point() {
        let pts = uniform(40, 10);
        let kr = compute_k_region(&pts, 20, 32.0, 16.0, &mut Rng::new(2)).unwrap();
        let deepest = (0..pts.len()).max_by_key(|&i| depth(&pts, i).unwrap()).unwrap();
        assert!(kr.exact);
        assert!(kr.contains(pts[deepest]));
    }
}
