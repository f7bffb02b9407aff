//! Straight-edge spanning trees with small crossing number.

use crate::bounds::inverse_ackermann;
use crate::geometry::{convex_hull_indices, Line, Point};
use crate::partition::{build_partition, matching_partition, PartitionConfig, PartitionError, PartitionMode};
use crate::rng::Rng;
use crate::shallow::{check_shallow, depth_all, ShallowError};
use crate::sweep::{pair_line_sweep, SweepVisitor};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Cap on the number of reweighted test lines of the baseline tree.
pub const BASELINE_TEST_LINES: usize = 10_000;
/// Candidate neighbours per point of the baseline tree.
pub const BASELINE_NEIGHBOURS: usize = 12;
/// Representative draws per bridge round before the best one is accepted.
pub const REPRESENTATIVE_DRAWS: u32 = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TreeError {
    #[error(transparent)]
    Shallow(#[from] ShallowError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("invalid parameters: {0}")]
    Params(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    ClassTree,
    Bridge,
    Connector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeRound {
    pub components: usize,
    pub hull_size: usize,
    pub draws: u32,
    pub bridges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeomTree {
    pub vertices: Vec<Point>,
    pub edges: Vec<(usize, usize)>,
    pub tags: Vec<EdgeTag>,
    /// Layer of each edge in a layered tree; `None` for connectors.
    pub edge_layer: Vec<Option<u32>>,
    pub bridge_log: Vec<BridgeRound>,
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
    pub(crate) sets: usize,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Dsu {
        Dsu {
            parent: (0..n).collect(),
            sets: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.parent[a] = b;
        self.sets -= 1;
        true
    }
}

impl GeomTree {
    fn empty(vertices: Vec<Point>) -> GeomTree {
        GeomTree {
            vertices,
            edges: Vec::new(),
            tags: Vec::new(),
            edge_layer: Vec::new(),
            bridge_log: Vec::new(),
        }
    }

    fn push(&mut self, u: usize, v: usize, tag: EdgeTag, layer: Option<u32>) {
        self.edges.push((u, v));
        self.tags.push(tag);
        self.edge_layer.push(layer);
    }

    /// Connected, `n - 1` edges, no loops or repeated edges.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.vertices.len();
        if self.edges.len() + 1 != n.max(1) {
            return Err(format!("{} edges for {n} vertices", self.edges.len()));
        }
        let mut dsu = Dsu::new(n);
        for &(u, v) in &self.edges {
            if u >= n || v >= n || u == v {
                return Err(format!("bad edge ({u}, {v})"));
            }
            if !dsu.union(u, v) {
                return Err(format!("edge ({u}, {v}) closes a cycle"));
            }
        }
        Ok(())
    }

    /// Edges whose closed segment meets `h`.
    pub fn crossings(&self, h: &Line) -> usize {
        edge_crossings(&self.vertices, &self.edges, h)
    }

    pub fn dump_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": 1,
            "vertices": self.vertices.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
            "edges": self.edges,
            "layer_tags": self.tags,
            "edge_layer": self.edge_layer,
            "bridge_log": self.bridge_log,
        })
    }
}

/// Segments `pq` that meet the closed line `h`.
pub fn edge_crossings(pts: &[Point], edges: &[(usize, usize)], h: &Line) -> usize {
    edges
        .iter()
        .filter(|&&(u, v)| {
            let (a, b) = (h.eval_sign(pts[u]), h.eval_sign(pts[v]));
            !(a > 0 && b > 0 || a < 0 && b < 0)
        })
        .count()
}

#[derive(Clone, Copy)]
struct Key(f64, usize, usize);

impl PartialEq for Key {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0)
            .then_with(|| o.1.cmp(&self.1))
            .then_with(|| o.2.cmp(&self.2))
    }
}

fn dist2(a: Point, b: Point) -> i128 {
    let dx = (a.x - b.x) as i128;
    let dy = (a.y - b.y) as i128;
    dx * dx + dy * dy
}

/// Classical tree by iterative reweighting: repeatedly add the candidate
/// segment between two components crossing the least total weight of test
/// lines, then double the weight of every line it crosses.
pub fn build_baseline_tree(pts: &[Point], rng: &mut Rng) -> GeomTree {
    let n = pts.len();
    let mut tree = GeomTree::empty(pts.to_vec());
    if n < 2 {
        return tree;
    }
    // Test lines through point pairs, each with a random side for its two
    // defining points; stored as per-point side bitsets.
    let total = n * (n - 1) / 2;
    let pairs: Vec<(usize, usize)> = if total <= BASELINE_TEST_LINES {
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
    } else {
        (0..BASELINE_TEST_LINES)
            .map(|_| {
                let i = rng.index(n);
                let mut j = rng.index(n - 1);
                if j >= i {
                    j += 1;
                }
                (i, j)
            })
            .collect()
    };
    let m = pairs.len();
    let words = m.div_ceil(64);
    let mut bits = vec![0u64; n * words];
    for (j, &(p, q)) in pairs.iter().enumerate() {
        let h = Line::through(pts[p], pts[q]);
        let (sp, sq) = (rng.coin(), rng.coin());
        for r in 0..n {
            let up = if r == p {
                sp
            } else if r == q {
                sq
            } else {
                h.eval_sign(pts[r]) > 0
            };
            if up {
                bits[r * words + j / 64] |= 1 << (j % 64);
            }
        }
    }
    let mut weights = vec![1.0f64; m];
    let cost = |u: usize, v: usize, w: &[f64]| -> f64 {
        let (a, b) = (&bits[u * words..(u + 1) * words], &bits[v * words..(v + 1) * words]);
        let mut s = 0.0;
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            let mut d = x ^ y;
            while d != 0 {
                let t = d.trailing_zeros() as usize;
                s += w[k * 64 + t];
                d &= d - 1;
            }
        }
        s
    };
    let mut cand: Vec<(usize, usize)> = Vec::new();
    let nb = BASELINE_NEIGHBOURS.min(n - 1);
    for u in 0..n {
        let mut d: Vec<(i128, usize)> = (0..n).filter(|&v| v != u).map(|v| (dist2(pts[u], pts[v]), v)).collect();
        d.select_nth_unstable(nb - 1);
        for &(_, v) in &d[..nb] {
            cand.push((u.min(v), u.max(v)));
        }
    }
    cand.sort_unstable();
    cand.dedup();
    let mut heap: BinaryHeap<Key> = cand.iter().map(|&(u, v)| Key(cost(u, v, &weights), u, v)).collect();
    let mut dsu = Dsu::new(n);
    while dsu.sets > 1 {
        let Some(Key(c, u, v)) = heap.pop() else {
            // Candidate graph disconnected: offer every pair across components.
            for u in 0..n {
                for v in (u + 1)..n {
                    if dsu.find(u) != dsu.find(v) {
                        heap.push(Key(cost(u, v, &weights), u, v));
                    }
                }
            }
            continue;
        };
        if dsu.find(u) == dsu.find(v) {
            continue;
        }
        let now = cost(u, v, &weights);
        if now > c {
            heap.push(Key(now, u, v));
            continue;
        }
        dsu.union(u, v);
        tree.push(u, v, EdgeTag::ClassTree, None);
        let mut big = false;
        for k in 0..words {
            let mut d = bits[u * words + k] ^ bits[v * words + k];
            while d != 0 {
                let t = d.trailing_zeros() as usize;
                weights[k * 64 + t] *= 2.0;
                big |= weights[k * 64 + t] > 1e300;
                d &= d - 1;
            }
        }
        if big {
            for w in weights.iter_mut() {
                *w *= 2f64.powi(-900);
            }
            let keys: Vec<Key> = heap.drain().collect();
            heap = keys
                .into_iter()
                .map(|Key(_, a, b)| Key(cost(a, b, &weights), a, b))
                .collect();
        }
    }
    tree
}

fn nearest_pair(pts: &[Point], a: &[usize], b: &[usize]) -> (usize, usize) {
    let mut best = (i128::MAX, a[0], b[0]);
    for &u in a {
        for &v in b {
            let d = dist2(pts[u], pts[v]);
            if d < best.0 {
                best = (d, u, v);
            }
        }
    }
    (best.1, best.2)
}

fn append(tree: &mut GeomTree, sub: &GeomTree, map: &[usize], layer: Option<u32>) {
    for (&(u, v), &tag) in sub.edges.iter().zip(&sub.tags) {
        tree.push(map[u], map[v], tag, layer);
    }
    tree.bridge_log.extend(sub.bridge_log.iter().cloned());
}

/// Tree on a `k`-shallow set: baseline trees per class of a partition with
/// parameter `2k`, joined by bridge rounds over hull-vertex representatives.
pub fn build_shallow_tree(
    pts: &[Point],
    k: usize,
    cfg: &PartitionConfig,
    rng: &mut Rng,
) -> Result<GeomTree, TreeError> {
    let n = pts.len();
    if k < 2 || 2 * k > n {
        return Err(TreeError::Params(format!("need 2 <= k <= n/2, got k = {k}, n = {n}")));
    }
    if !cfg.skip_shallow_check {
        check_shallow(pts, k as u32)?;
    }
    shallow_tree_unchecked(pts, k, cfg, rng)
}

fn shallow_tree_unchecked(
    pts: &[Point],
    k: usize,
    cfg: &PartitionConfig,
    rng: &mut Rng,
) -> Result<GeomTree, TreeError> {
    let n = pts.len();
    if n < 4 * k {
        return Ok(build_baseline_tree(pts, rng));
    }
    let pcfg = PartitionConfig {
        skip_shallow_check: true,
        seed: rng.next_u64(),
        ..cfg.clone()
    };
    let part = build_partition(pts, 2 * k, PartitionMode::Shallow, &pcfg)?;
    let mut tree = GeomTree::empty(pts.to_vec());
    let mut dsu = Dsu::new(n);
    let mut ordinary: Vec<usize> = Vec::new();
    let mut tails: Vec<usize> = Vec::new();
    for (ci, class) in part.classes.iter().enumerate() {
        let sub_pts: Vec<Point> = class.iter().map(|&i| pts[i]).collect();
        let sub = build_baseline_tree(&sub_pts, rng);
        for &(u, v) in &sub.edges {
            dsu.union(class[u], class[v]);
        }
        append(&mut tree, &sub, class, None);
        if part.rounds[ci].is_some() {
            ordinary.push(ci);
        } else {
            tails.push(ci);
        }
    }
    // Bridge rounds over the components of the ordinary classes.
    if ordinary.is_empty() {
        ordinary.push(tails.remove(0));
    }
    let mut comps: Vec<Vec<usize>> = ordinary.iter().map(|&c| part.classes[c].clone()).collect();
    while comps.len() > 1 {
        let mut best: Option<(Vec<usize>, Vec<usize>)> = None;
        let mut draws = 0;
        while draws < REPRESENTATIVE_DRAWS {
            draws += 1;
            let reps: Vec<usize> = comps.iter().map(|c| c[rng.index(c.len())]).collect();
            let rp: Vec<Point> = reps.iter().map(|&i| pts[i]).collect();
            let hull = convex_hull_indices(&rp);
            let ok = 2 * hull.len() >= reps.len();
            if best.as_ref().is_none_or(|(_, h)| hull.len() > h.len()) {
                best = Some((reps, hull));
            }
            if ok {
                break;
            }
        }
        let (reps, hull) = best.unwrap();
        let r0: Vec<Point> = hull.iter().map(|&i| pts[reps[i]]).collect();
        let m = matching_partition(&r0, rng.next_u64())?;
        let mut bridges = 0;
        for class in &m.classes {
            for w in class.windows(2) {
                let (a, b) = (reps[hull[w[0]]], reps[hull[w[1]]]);
                if dsu.union(a, b) {
                    tree.push(a, b, EdgeTag::Bridge, None);
                    bridges += 1;
                }
            }
        }
        tree.bridge_log.push(BridgeRound {
            components: comps.len(),
            hull_size: hull.len(),
            draws,
            bridges,
        });
        let mut merged: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for c in comps {
            let root = dsu.find(c[0]);
            merged.entry(root).or_default().extend(c);
        }
        comps = merged.into_values().collect();
    }
    let mut main = comps.pop().unwrap();
    for ci in tails {
        let class = &part.classes[ci];
        let (u, v) = nearest_pair(pts, &main, class);
        dsu.union(u, v);
        tree.push(u, v, EdgeTag::Connector, None);
        main.extend(class);
    }
    Ok(tree)
}

/// Layered tree: layer `i` holds the `2^i`-shallow points of what remains,
/// each layer gets a shallow tree with `k = 2^i`, and consecutive nonempty
/// layers are joined by their nearest pair.
pub fn build_relative_tree(pts: &[Point], cfg: &PartitionConfig, rng: &mut Rng) -> Result<GeomTree, TreeError> {
    let n = pts.len();
    if n < 2 {
        return Err(TreeError::Params("need at least 2 points".into()));
    }
    let layers = depth_layers(pts)?;
    let mut tree = GeomTree::empty(pts.to_vec());
    let mut prev: Option<&Vec<usize>> = None;
    for (li, layer) in layers.iter().enumerate() {
        if layer.is_empty() {
            continue;
        }
        let k = 1usize << (li + 1);
        let sub_pts: Vec<Point> = layer.iter().map(|&i| pts[i]).collect();
        let sub = if sub_pts.len() >= 2 * k {
            shallow_tree_unchecked(&sub_pts, k, cfg, rng)?
        } else {
            build_baseline_tree(&sub_pts, rng)
        };
        append(&mut tree, &sub, layer, Some(li as u32 + 1));
        if let Some(p) = prev {
            let (u, v) = nearest_pair(pts, p, layer);
            tree.push(u, v, EdgeTag::Connector, None);
        }
        prev = Some(layer);
    }
    Ok(tree)
}

/// `layers[i]` (layer `i + 1`) holds the points of depth at most `2^(i+1)`
/// among those not in earlier layers.
pub fn depth_layers(pts: &[Point]) -> Result<Vec<Vec<usize>>, ShallowError> {
    let mut rest: Vec<usize> = (0..pts.len()).collect();
    let mut layers = Vec::new();
    let mut i = 1u32;
    while !rest.is_empty() {
        let sub: Vec<Point> = rest.iter().map(|&j| pts[j]).collect();
        let d = depth_all(&sub)?;
        let k = 1u64 << i;
        let (mut take, mut keep) = (Vec::new(), Vec::new());
        for (m, &j) in rest.iter().enumerate() {
            if d[m] as u64 <= k {
                take.push(j);
            } else {
                keep.push(j);
            }
        }
        layers.push(take);
        rest = keep;
        i += 1;
    }
    Ok(layers)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub leftover: Option<usize>,
}

impl Matching {
    pub fn validate(&self, n: usize) -> Result<(), String> {
        let mut seen = vec![false; n];
        for i in self.pairs.iter().flat_map(|&(a, b)| [a, b]).chain(self.leftover) {
            if i >= n || seen[i] {
                return Err(format!("index {i} repeated or out of range"));
            }
            seen[i] = true;
        }
        if self.leftover.is_some() != (n % 2 == 1) {
            return Err("leftover present iff n is odd".into());
        }
        if seen.iter().any(|s| !s) {
            return Err("matching misses a vertex".into());
        }
        Ok(())
    }
}

/// Preorder of a depth-first tour from vertex 0, children by index.
pub fn preorder(tree: &GeomTree) -> Vec<usize> {
    let n = tree.vertices.len();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &tree.edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut stack = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        stack.push(s);
        while let Some(u) = stack.pop() {
            if seen[u] {
                continue;
            }
            seen[u] = true;
            order.push(u);
            for &v in adj[u].iter().rev() {
                if !seen[v] {
                    stack.push(v);
                }
            }
        }
    }
    order
}

/// Every other edge of the preorder shortcut path.
pub fn tree_to_matching(tree: &GeomTree) -> Matching {
    let path = preorder(tree);
    let pairs = path.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let leftover = (path.len() % 2 == 1).then(|| *path.last().unwrap());
    Matching { pairs, leftover }
}

/// One side variant of a line through two input points, as seen by
/// [`sweep_edge_crossings`].
#[derive(Clone, Copy, Debug)]
pub struct LineVariant<'a> {
    pub p: usize,
    pub q: usize,
    pub p_left: bool,
    pub q_left: bool,
    /// Points on the left side.
    pub left: usize,
    /// Smaller side count.
    pub weight: usize,
    pub crossings: usize,
    /// Crossings per edge group.
    pub group_crossings: &'a [usize],
}

struct EdgeSweep<'a, F: FnMut(&LineVariant)> {
    n: usize,
    adj: Vec<Vec<(usize, usize)>>,
    group: &'a [usize],
    left: Vec<bool>,
    count: usize,
    crossing: usize,
    groups: Vec<usize>,
    f: F,
}

impl<F: FnMut(&LineVariant)> EdgeSweep<'_, F> {
    fn set(&mut self, j: usize, now: bool) {
        if self.left[j] == now {
            return;
        }
        for &(u, e) in &self.adj[j] {
            let was = self.left[j] != self.left[u];
            let g = self.group[e];
            if was {
                self.crossing -= 1;
                self.groups[g] -= 1;
            } else {
                self.crossing += 1;
                self.groups[g] += 1;
            }
        }
        self.left[j] = now;
        if now {
            self.count += 1;
        } else {
            self.count -= 1;
        }
    }
}

impl<F: FnMut(&LineVariant)> SweepVisitor for EdgeSweep<'_, F> {
    fn start(&mut self, _: usize, left: &[bool]) {
        for j in 0..self.n {
            let now = left[j];
            self.set(j, now);
        }
    }
    fn flip(&mut self, j: usize, now_left: bool) {
        self.set(j, now_left);
    }
    fn event(&mut self, p: usize, q: usize, _: &[bool]) {
        for (pl, ql) in [(false, false), (true, false), (false, true), (true, true)] {
            self.set(p, pl);
            self.set(q, ql);
            let v = LineVariant {
                p,
                q,
                p_left: pl,
                q_left: ql,
                left: self.count,
                weight: self.count.min(self.n - self.count),
                crossings: self.crossing,
                group_crossings: &self.groups,
            };
            (self.f)(&v);
            self.set(p, false);
            self.set(q, false);
        }
    }
}

/// Exhaustive crossing profile of a straight-edge graph over every side
/// variant of every line through two points. `group[e] < groups` labels
/// edge `e` for per-group counts.
pub fn sweep_edge_crossings<F: FnMut(&LineVariant)>(
    pts: &[Point],
    edges: &[(usize, usize)],
    group: Option<(&[usize], usize)>,
    f: F,
) {
    let n = pts.len();
    let zeros = vec![0usize; edges.len()];
    let (group, groups) = group.unwrap_or((&zeros, 1));
    let mut adj = vec![Vec::new(); n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    let mut s = EdgeSweep {
        n,
        adj,
        group,
        left: vec![false; n],
        count: 0,
        crossing: 0,
        groups: vec![0; groups],
        f,
    };
    pair_line_sweep(pts, None, &mut s);
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RelativeProfile {
    pub lines: u64,
    pub max_crossings: usize,
    /// Maximum of crossings divided by the relative envelope.
    pub max_ratio: f64,
    pub worst_weight: usize,
    pub separation_checked: u64,
    pub separation_violations: u64,
}

/// `sqrt(w) a(n/w) log2^2(n/w) + a(n) log2^4 n`, with the first term
/// dropped at `w = 0`.
pub fn relative_envelope(n: usize, w: usize) -> f64 {
    let nf = n as f64;
    let second = inverse_ackermann(n as u64) as f64 * nf.log2().powi(4);
    if w == 0 {
        return second;
    }
    let x = nf / w as f64;
    let first = (w as f64).sqrt() * inverse_ackermann(x.floor().max(1.0) as u64) as f64 * x.log2().max(0.0).powi(2);
    first + second
}

/// Exhaustive relative-crossing audit of a layered tree, including the
/// layer-separation property: a line of weight `w` crosses no edge of a
/// layer `j` with `2^(j-1) > w`.
pub fn relative_profile(tree: &GeomTree) -> RelativeProfile {
    let pts = &tree.vertices;
    let n = pts.len();
    let layers = tree.edge_layer.iter().filter_map(|l| *l).max().unwrap_or(0) as usize;
    let group: Vec<usize> = tree.edge_layer.iter().map(|l| l.map_or(0, |j| j as usize)).collect();
    let mut prof = RelativeProfile::default();
    sweep_edge_crossings(pts, &tree.edges, Some((&group, layers + 1)), |v| {
        prof.lines += 1;
        prof.max_crossings = prof.max_crossings.max(v.crossings);
        let r = v.crossings as f64 / relative_envelope(n, v.weight);
        if r > prof.max_ratio {
            prof.max_ratio = r;
            prof.worst_weight = v.weight;
        }
        for j in 1..=layers {
            if (1u64 << (j - 1)) > v.weight as u64 {
                prof.separation_checked += 1;
                if v.group_crossings[j] > 0 {
                    prof.separation_violations += 1;
                }
            }
        }
    });
    prof
}

/// Maximum crossings of the edges over every variant of every line through
/// two points.
pub fn max_pair_line_crossing(pts: &[Point], edges: &[(usize, usize)]) -> usize {
    let mut m = 0;
    sweep_edge_crossings(pts, edges, None, |v| m = m.max(v.crossings));
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shallow::{generate, GenKind, GenParams};

    fn uniform(n: usize, seed: u64) -> Vec<Point> {
        generate(GenKind::UniformDisk, &GenParams::n(n), &mut Rng::new(seed)).unwrap()
    }

    #[test]
    fn tiny_baselines() {
        let mut rng = Rng::new(1);
        assert!(build_baseline_tree(&[Point::new(0, 0)], &mut rng).edges.is_empty());
        let t = build_baseline_tree(&[Point::new(0, 0), Point::new(3, 1)], &mut rng);
        assert_eq!(t.edges, vec![(0, 1)]);
    }

    #[test]
    fn baseline_valid() {
        let pts = uniform(300, 2);
        let t = build_baseline_tree(&pts, &mut Rng::new(3));
        t.validate().unwrap();
    }

    #[test]
    fn path_matching() {
        let pts: Vec<Point> = (0..5).map(|i| Point::new(i, i * i)).collect();
        let mut t = GeomTree::empty(pts);
        for i in 0..4 {
            t.push(i, i + 1, EdgeTag::ClassTree, None);
        }
        let m = tree_to_matching(&t);
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.leftover, Some(4));
        m.validate(5).unwrap();
    }

    #[test]
    fn matching_at_most_twice_tree() {
        let pts = uniform(512, 4);
        let t = build_baseline_tree(&pts, &mut Rng::new(5));
        let m = tree_to_matching(&t);
        let mut rng = Rng::new(6);
        for _ in 0..1000 {
            let (a, b) = (pts[rng.index(512)], pts[rng.index(512)]);
            if a == b {
                continue;
            }
            let h = Line::through(a, b);
            let h = Line::new(h.a, h.b, h.c + 1);
            assert!(edge_crossings(&pts, &m.pairs, &h) <= 2 * t.crossings(&h));
        }
    }

    #[test]
    fn sweep_matches_direct_count() {
        let pts = uniform(40, 7);
        let t = build_baseline_tree(&pts, &mut Rng::new(1));
        let mut checked = 0;
        sweep_edge_crossings(&pts, &t.edges, None, |v| {
            // Recount with the variant's explicit side choices.
            let h = Line::through(pts[v.p], pts[v.q]);
            let (pp, qq) = (pts[v.p], pts[v.q]);
            let dir_up = (qq.y - pp.y) > 0 || (qq.y == pp.y && qq.x > pp.x);
            let side = |i: usize| -> bool {
                if i == v.p {
                    v.p_left
                } else if i == v.q {
                    v.q_left
                } else {
                    let s = h.eval_sign(pts[i]);
                    if dir_up {
                        s > 0
                    } else {
                        s < 0
                    }
                }
            };
            let c = t.edges.iter().filter(|&&(a, b)| side(a) != side(b)).count();
            assert_eq!(c, v.crossings);
            let l = (0..pts.len()).filter(|&i| side(i)).count();
            assert_eq!(l, v.left);
            checked += 1;
        });
        assert_eq!(checked, 40 * 39 * 4);
    }

    #[test]
    fn shallow_tree_small_is_baseline() {
        let pts = generate(GenKind::ConvexPosition, &GenParams::n(32), &mut Rng::new(1)).unwrap();
        let t = build_shallow_tree(&pts, 16, &PartitionConfig::default(), &mut Rng::new(2)).unwrap();
        t.validate().unwrap();
        assert!(t.tags.iter().all(|&g| g == EdgeTag::ClassTree));
    }

    #[test]
    fn shallow_tree_bridges() {
        let pts = generate(GenKind::ConvexPosition, &GenParams::n(1024), &mut Rng::new(1)).unwrap();
        let t = build_shallow_tree(&pts, 16, &PartitionConfig::default(), &mut Rng::new(2)).unwrap();
        t.validate().unwrap();
        assert!(!t.bridge_log.is_empty());
        for r in &t.bridge_log {
            assert!(r.bridges + 1 >= r.components.div_ceil(4), "{r:?}");
        }
    }

    #[test]
    fn convex_relative_tree_single_layer() {
        let pts = generate(GenKind::ConvexPosition, &GenParams::n(64), &mut Rng::new(1)).unwrap();
        let t = build_relative_tree(&pts, &PartitionConfig::default(), &mut Rng::new(2)).unwrap();
        t.validate().unwrap();
        assert!(t.edge_layer.iter().all(|&l| l == Some(1)));
    }

    #[test]
    fn relative_tree_separation() {
        let pts = uniform(256, 3);
        let t = build_relative_tree(&pts, &PartitionConfig::default(), &mut Rng::new(2)).unwrap();
        t.validate().unwrap();
        let layers = t.edge_layer.iter().filter_map(|l| *l).max().unwrap();
        assert!(layers as f64 <= (256f64).log2().ceil() + 1.0);
        let p = relative_profile(&t);
        assert_eq!(p.separation_violations, 0);
        assert!(p.separation_checked > 0);
    }
}
