//! Weighted `(1/r)`-cuttings of planar line arrangements.
//!
//! A cutting is built by sampling lines with probability `min(1, r w / W)`,
//! computing the sampled arrangement inside a box by recursive convex-polygon
//! splitting, and fanning every face from its bottom vertex. Each polygon
//! carries the list of input lines crossing its interior, so a split only
//! partitions the parent's list. Faces whose triangles are still too heavy
//! are split again by a sub-sample of their own list, up to
//! [`REFINE_DEPTH`] levels, after which crossing lines are inserted one at a
//! time where still needed.
//!
//! All vertices are intersections of two input or box lines, so every
//! predicate stays exact.

use crate::geometry::{BBox, Line, Point, Simplex};
use crate::rational::{self, cmp_bottom, line_f64, side_vertex, side_vertex_with, Vertex};
use crate::rng::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const REFINE_DEPTH: u32 = 4;

/// Faces with smaller excess are refined by single targeted splits.
pub const SAMPLED_EXCESS: f64 = 4.0;

/// Candidate lines tried per split once the refinement depth is exhausted.
pub const SPLIT_CANDIDATES: usize = 4;

/// Expected sub-sample size of a face with excess `t` is this times `t`.
pub const REFINE_OVERSAMPLE: f64 = 1.0;

/// Longest list scored exactly when choosing a balanced split.
pub const SPLIT_PROBE: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CuttingError {
    #[error("total weight must be positive")]
    ZeroWeight,
    #[error("weights must be finite and nonnegative")]
    BadWeight,
    #[error("r must be at least 1, got {0}")]
    BadR(f64),
    #[error("zone polygon must be convex with at least 3 vertices inside the box")]
    BadZone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedLineSet {
    pub lines: Vec<Line>,
    pub weights: Vec<f64>,
    pub total_weight: f64,
}

impl WeightedLineSet {
    pub fn new(lines: Vec<Line>, weights: Vec<f64>) -> Result<Self, CuttingError> {
        assert_eq!(lines.len(), weights.len());
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(CuttingError::BadWeight);
        }
        let total_weight = weights.iter().sum();
        Ok(WeightedLineSet {
            lines,
            weights,
            total_weight,
        })
    }

    pub fn unit(lines: Vec<Line>) -> Self {
        let n = lines.len();
        WeightedLineSet::new(lines, vec![1.0; n]).unwrap()
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn weight_of(&self, idx: &[u32]) -> f64 {
        idx.iter().map(|&i| self.weights[i as usize]).sum()
    }
}

/// Three times the box of all pairwise intersections, computed in `f64`
/// and rounded outward; `O(n^2)`.
pub fn arrangement_bbox(lines: &[Line], data: &[Point]) -> BBox {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in data {
        x0 = x0.min(p.x as f64);
        x1 = x1.max(p.x as f64);
        y0 = y0.min(p.y as f64);
        y1 = y1.max(p.y as f64);
    }
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            if let Some(v) = Vertex::meet(lines[i], lines[j]) {
                x0 = x0.min(v.ax);
                x1 = x1.max(v.ax);
                y0 = y0.min(v.ay);
                y1 = y1.max(v.ay);
            }
        }
    }
    if x0 > x1 {
        return BBox {
            xmin: -1,
            ymin: -1,
            xmax: 1,
            ymax: 1,
        };
    }
    BBox {
        xmin: x0.floor() as i128 - 1,
        ymin: y0.floor() as i128 - 1,
        xmax: x1.ceil() as i128 + 1,
        ymax: y1.ceil() as i128 + 1,
    }
    .tripled()
}

/// Box containing every vertex of the arrangement of dual lines of `pts`.
///
/// Dual vertices sit at `x = slope(p, q)`; the largest slope magnitude is
/// attained by two points adjacent in `x` order, which bounds both axes.
pub fn dual_bbox(pts: &[Point]) -> BBox {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by_key(|&i| (pts[i].x, pts[i].y));
    let mut smax: i128 = 1;
    for w in idx.windows(2) {
        let (p, q) = (pts[w[0]], pts[w[1]]);
        let dx = (q.x - p.x) as i128;
        let dy = ((q.y - p.y) as i128).abs();
        if dx > 0 {
            smax = smax.max((dy + dx - 1) / dx);
        } else {
            smax = smax.max(dy.max(1));
        }
    }
    let mx = pts.iter().map(|p| (p.x as i128).abs()).max().unwrap_or(1).max(1);
    let my = pts.iter().map(|p| (p.y as i128).abs()).max().unwrap_or(1).max(1);
    let xr = 3 * smax;
    let yr = 3 * (mx * smax + my);
    BBox {
        xmin: -xr,
        ymin: -yr,
        xmax: xr,
        ymax: yr,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cell {
    pub simplex: Simplex,
    /// Indices of lines crossing the interior, sorted.
    pub crossing: Vec<u32>,
    pub weight: f64,
    /// Supplied points in the closed cell, see [`point_cutting`].
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CuttingStats {
    pub sampled: usize,
    pub faces: usize,
    pub refined_faces: usize,
    pub exhaustive_faces: usize,
    pub pruned_faces: usize,
    pub max_depth: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cutting {
    pub cells: Vec<Cell>,
    pub r: f64,
    pub bbox: BBox,
    pub total_weight: f64,
    /// Convex polygon of zone mode.
    pub zone: Option<Vec<Point>>,
    /// Faces holding fewer supplied points were dropped.
    pub min_points: usize,
    pub stats: CuttingStats,
}

impl Cutting {
    pub fn max_weight(&self) -> f64 {
        self.cells.iter().map(|c| c.weight).fold(0.0, f64::max)
    }

    /// JSON dump: cells as approximate vertex triples with crossing counts.
    pub fn dump_json(&self) -> serde_json::Value {
        let cells: Vec<serde_json::Value> = self
            .cells
            .iter()
            .map(|c| {
                let v: Vec<[f64; 2]> = c.simplex.vertices.iter().map(|v| [v.ax, v.ay]).collect();
                serde_json::json!({
                    "vertices": v,
                    "crossing_count": c.crossing.len(),
                    "crossing_weight": c.weight,
                })
            })
            .collect();
        serde_json::json!({
            "schema": 1,
            "r": self.r,
            "total_weight": self.total_weight,
            "zone": self.zone.is_some(),
            "stats": self.stats,
            "cells": cells,
        })
    }
}

#[derive(Clone, Debug)]
struct Poly {
    verts: Vec<Vertex>,
    /// `edges[i]` supports the edge from `verts[i]` to `verts[i + 1]`.
    edges: Vec<Line>,
    list: Vec<u32>,
    pts: Vec<u32>,
}

fn signs_at(h: &Line, f: &[f64; 3], vs: &[Vertex]) -> (bool, bool) {
    let (mut pos, mut neg) = (false, false);
    for v in vs {
        match side_vertex_with(h, f, v) {
            1 => pos = true,
            -1 => neg = true,
            _ => {}
        }
        if pos && neg {
            break;
        }
    }
    (pos, neg)
}

/// Input lines with their coefficients rounded once, and tracked points.
struct Lines<'a> {
    exact: &'a [Line],
    approx: Vec<[f64; 3]>,
    points: &'a [Point],
}

impl<'a> Lines<'a> {
    fn new(exact: &'a [Line], points: &'a [Point]) -> Self {
        Lines {
            exact,
            approx: exact.iter().map(line_f64).collect(),
            points,
        }
    }

    fn crosses(&self, h: u32, vs: &[Vertex]) -> bool {
        let (p, n) = signs_at(&self.exact[h as usize], &self.approx[h as usize], vs);
        p && n
    }
}

impl Poly {
    fn from_bbox(b: &BBox, lines: &Lines, pts: Vec<u32>) -> Poly {
        let verts = b.corners().to_vec();
        let edges = b.edges().to_vec();
        let list = (0..lines.exact.len() as u32)
            .filter(|&i| lines.crosses(i, &verts))
            .collect();
        Poly {
            verts,
            edges,
            list,
            pts,
        }
    }

    /// Split by `s`, which must cross the interior.
    fn split(&self, si: u32, lines: &Lines) -> (Poly, Poly) {
        let s = lines.exact[si as usize];
        let m = self.verts.len();
        let sg: Vec<i32> = self.verts.iter().map(|v| side_vertex(&s, v)).collect();
        let mut pos = (Vec::new(), Vec::new());
        let mut neg = (Vec::new(), Vec::new());
        for i in 0..m {
            let j = (i + 1) % m;
            let (a, b) = (sg[i], sg[j]);
            let e = self.edges[i];
            let v = self.verts[i];
            if a >= 0 {
                pos.0.push(v);
                pos.1.push(if a > 0 || b > 0 { e } else { s });
            }
            if a <= 0 {
                neg.0.push(v);
                neg.1.push(if a < 0 || b < 0 { e } else { s });
            }
            if a * b < 0 {
                let x = Vertex::meet(s, e).expect("crossing edge meets the line");
                if a > 0 {
                    pos.0.push(x);
                    pos.1.push(s);
                    neg.0.push(x);
                    neg.1.push(e);
                } else {
                    neg.0.push(x);
                    neg.1.push(s);
                    pos.0.push(x);
                    pos.1.push(e);
                }
            }
        }
        let (mut lp, mut ln) = (Vec::new(), Vec::new());
        for &h in &self.list {
            if h == si {
                continue;
            }
            if lines.crosses(h, &pos.0) {
                lp.push(h);
            }
            if lines.crosses(h, &neg.0) {
                ln.push(h);
            }
        }
        let (mut pp, mut pn) = (Vec::new(), Vec::new());
        for &i in &self.pts {
            let sg = s.eval_sign(lines.points[i as usize]);
            if sg >= 0 {
                pp.push(i);
            }
            if sg <= 0 {
                pn.push(i);
            }
        }
        (
            Poly {
                verts: pos.0,
                edges: pos.1,
                list: lp,
                pts: pp,
            },
            Poly {
                verts: neg.0,
                edges: neg.1,
                list: ln,
                pts: pn,
            },
        )
    }

    /// Fan from the bottom vertex; lists filtered from the face list.
    fn triangulate(&self, set: &WeightedLineSet, lines: &Lines) -> Vec<Cell> {
        let m = self.verts.len();
        let b = (0..m)
            .min_by(|&i, &j| cmp_bottom(&self.verts[i], &self.verts[j]))
            .unwrap();
        let mut out = Vec::with_capacity(m.saturating_sub(2));
        for i in 1..m.saturating_sub(1) {
            let (p, q, r) = (self.verts[b], self.verts[(b + i) % m], self.verts[(b + i + 1) % m]);
            if rational::orient(&p, &q, &r) == 0 {
                continue;
            }
            let tri = [p, q, r];
            let crossing: Vec<u32> = self.list.iter().copied().filter(|&h| lines.crosses(h, &tri)).collect();
            let weight = set.weight_of(&crossing);
            let simplex = Simplex::ordinary(p, q, r);
            let points = self
                .pts
                .iter()
                .copied()
                .filter(|&i| simplex.contains(lines.points[i as usize]))
                .collect();
            out.push(Cell {
                simplex,
                crossing,
                weight,
                points,
            });
        }
        out
    }
}

/// Convex integer polygon, counterclockwise.
struct Zone {
    verts: Vec<Point>,
    edges: Vec<Line>,
}

impl Zone {
    fn new(sigma: &[Point]) -> Result<Zone, CuttingError> {
        let verts = crate::geometry::convex_hull(sigma);
        if verts.len() < 3 || verts.len() != sigma.len() {
            return Err(CuttingError::BadZone);
        }
        let m = verts.len();
        let edges = (0..m).map(|i| Line::through(verts[i], verts[(i + 1) % m])).collect();
        Ok(Zone { verts, edges })
    }

    /// Exact test that the closed polygon and the closed zone are disjoint.
    fn disjoint(&self, poly: &Poly) -> bool {
        // Zone edges: inside is the positive side.
        for e in &self.edges {
            if poly.verts.iter().all(|v| side_vertex(e, v) < 0) {
                return true;
            }
        }
        let m = poly.verts.len();
        for i in 0..m {
            let e = &poly.edges[i];
            let inner = (0..m)
                .map(|k| side_vertex(e, &poly.verts[k]))
                .find(|&s| s != 0)
                .unwrap_or(0);
            if inner == 0 {
                continue;
            }
            if self.verts.iter().all(|&p| e.eval_sign(p) * inner < 0) {
                return true;
            }
        }
        false
    }
}

fn sample_mask(set: &WeightedLineSet, list: &[u32], r: f64, total: f64, rng: &mut Rng) -> Vec<u32> {
    list.iter()
        .copied()
        .filter(|&h| rng.bernoulli(r * set.weights[h as usize] / total))
        .collect()
}

/// Faces dropped before refinement.
struct Prune<'a> {
    zone: Option<&'a Zone>,
    min_points: usize,
}

impl Prune<'_> {
    const NONE: Prune<'static> = Prune {
        zone: None,
        min_points: 0,
    };

    fn drops(&self, p: &Poly) -> bool {
        p.pts.len() < self.min_points || self.zone.is_some_and(|z| z.disjoint(p))
    }
}

/// Faces of the arrangement of `insert` inside `root` that survive `prune`.
fn arrangement(root: Poly, insert: &[u32], lines: &Lines, prune: &Prune) -> Vec<Poly> {
    let mut chosen = vec![false; lines.exact.len()];
    for &h in insert {
        chosen[h as usize] = true;
    }
    let mut stack = vec![root];
    let mut faces = Vec::new();
    while let Some(p) = stack.pop() {
        if prune.drops(&p) {
            continue;
        }
        match p.list.iter().copied().find(|&h| chosen[h as usize]) {
            None => faces.push(p),
            Some(h) => {
                let (a, b) = p.split(h, lines);
                stack.push(b);
                stack.push(a);
            }
        }
    }
    faces
}

struct Builder<'a> {
    set: &'a WeightedLineSet,
    lines: &'a Lines<'a>,
    bound: f64,
    min_points: usize,
    stats: CuttingStats,
}

impl Builder<'_> {
    /// Split by the candidate line, drawn by weight from the lists of the
    /// heavy triangles, that leaves the least total excess weight.
    fn balanced_split(&self, face: &Poly, cells: &[Cell], rng: &mut Rng) -> (Poly, Poly) {
        let lines = &self.lines;
        let pool: Vec<u32> = cells
            .iter()
            .filter(|c| c.weight > self.bound)
            .flat_map(|c| c.crossing.iter().copied())
            .collect();
        let total: f64 = self.set.weight_of(&pool);
        // Candidates are scored on a uniform subsample of long lists.
        let list = if face.list.len() > SPLIT_PROBE {
            let mut l: Vec<u32> = (0..SPLIT_PROBE)
                .map(|_| face.list[rng.index(face.list.len())])
                .collect();
            l.sort_unstable();
            l.dedup();
            l
        } else {
            face.list.clone()
        };
        let probe = Poly {
            verts: face.verts.clone(),
            edges: face.edges.clone(),
            list,
            pts: Vec::new(),
        };
        let scale = self.set.weight_of(&face.list) / self.set.weight_of(&probe.list);
        let excess = |p: &Poly| -> f64 {
            p.triangulate(self.set, lines)
                .iter()
                .map(|c| (c.weight * scale - self.bound).max(0.0))
                .sum()
        };
        let mut best: Option<(f64, u32)> = None;
        for _ in 0..SPLIT_CANDIDATES {
            let mut x = rng.unit() * total;
            let mut h = *pool.last().unwrap();
            for &g in &pool {
                x -= self.set.weights[g as usize];
                if x < 0.0 {
                    h = g;
                    break;
                }
            }
            let (a, b) = probe.split(h, lines);
            let m = excess(&a) + excess(&b);
            if best.as_ref().is_none_or(|(bm, _)| m < *bm) {
                best = Some((m, h));
            }
        }
        let h = best.unwrap().1;
        face.split(h, lines)
    }

    /// Triangulate `face`, refining it while any of its triangles is heavy.
    fn emit(&mut self, face: Poly, rng: &mut Rng, out: &mut Vec<Cell>) {
        let lines = &self.lines;
        let mut stack = vec![(face, 0u32)];
        let prune = Prune {
            zone: None,
            min_points: self.min_points,
        };
        while let Some((face, depth)) = stack.pop() {
            if prune.drops(&face) {
                self.stats.pruned_faces += 1;
                continue;
            }
            self.stats.max_depth = self.stats.max_depth.max(depth);
            let w = self.set.weight_of(&face.list);
            if w <= self.bound {
                out.extend(face.triangulate(self.set, lines));
                continue;
            }
            let cells = face.triangulate(self.set, lines);
            if cells.iter().all(|c| c.weight <= self.bound) {
                out.extend(cells);
                continue;
            }
            let t = w / self.bound;
            if depth >= REFINE_DEPTH || t < SAMPLED_EXCESS {
                // Insert crossing lines one at a time, only where still needed,
                // choosing the most balanced of a few weighted candidates.
                self.stats.exhaustive_faces += 1;
                let (a, b) = self.balanced_split(&face, &cells, rng);
                stack.push((b, depth));
                stack.push((a, depth));
                continue;
            }
            self.stats.refined_faces += 1;
            let rate = REFINE_OVERSAMPLE * t;
            let insert = sample_mask(self.set, &face.list, rate, w, rng);
            if insert.is_empty() {
                let (a, b) = self.balanced_split(&face, &cells, rng);
                stack.push((b, depth + 1));
                stack.push((a, depth + 1));
                continue;
            }
            for sub in arrangement(face, &insert, lines, &prune) {
                stack.push((sub, depth + 1));
            }
        }
    }
}

/// Points tracked through a build, and the fewest a kept cell must hold.
struct Tracked<'a> {
    points: &'a [Point],
    subset: Vec<u32>,
    min_points: usize,
}

fn build(
    set: &WeightedLineSet,
    r: f64,
    bbox: BBox,
    zone: Option<&[Point]>,
    tracked: Option<Tracked>,
    rng: &mut Rng,
) -> Result<Cutting, CuttingError> {
    if !(r >= 1.0) {
        return Err(CuttingError::BadR(r));
    }
    if !(set.total_weight > 0.0) {
        return Err(CuttingError::ZeroWeight);
    }
    let z = match zone {
        Some(s) => {
            let z = Zone::new(s)?;
            if !z.verts.iter().all(|&p| bbox.contains(p)) {
                return Err(CuttingError::BadZone);
            }
            Some(z)
        }
        None => None,
    };
    let w = set.total_weight;
    let bound = w / r;
    let (points, subset, min_points) = match tracked {
        Some(t) => (t.points, t.subset, t.min_points),
        None => (&[][..], Vec::new(), 0),
    };
    let lines = Lines::new(&set.lines, points);
    let root = Poly::from_bbox(&bbox, &lines, subset);
    let sample = if r <= 1.0 {
        Vec::new()
    } else {
        sample_mask(set, &root.list, r, w, rng)
    };
    let mut stats = CuttingStats {
        sampled: sample.len(),
        ..Default::default()
    };
    let prune = Prune {
        zone: z.as_ref(),
        min_points,
    };
    let faces = arrangement(root, &sample, &lines, &prune);
    stats.faces = faces.len();
    let mut b = Builder {
        set,
        lines: &lines,
        bound,
        min_points,
        stats,
    };
    let mut cells = Vec::new();
    for f in faces {
        b.emit(f, rng, &mut cells);
    }
    if min_points > 0 {
        cells.retain(|c| c.points.len() >= min_points);
    }
    Ok(Cutting {
        cells,
        r,
        bbox,
        total_weight: w,
        zone: zone.map(|s| s.to_vec()),
        min_points,
        stats: b.stats,
    })
}

/// Weighted `(1/r)`-cutting covering `bbox`.
pub fn build_cutting(set: &WeightedLineSet, r: f64, bbox: BBox, rng: &mut Rng) -> Result<Cutting, CuttingError> {
    build(set, r, bbox, None, None, rng)
}

/// The cells holding at least `min_points` of `points[subset]` among the
/// cells of a weighted `(1/r)`-cutting of `bbox`. A face of the sampled
/// arrangement is dropped as soon as it holds fewer, so the result does not
/// cover the box. Each cell lists the points it holds.
pub fn point_cutting(
    set: &WeightedLineSet,
    r: f64,
    bbox: BBox,
    points: &[Point],
    subset: &[usize],
    min_points: usize,
    rng: &mut Rng,
) -> Result<Cutting, CuttingError> {
    let subset = subset
        .iter()
        .map(|&i| i as u32)
        .filter(|&i| bbox.contains(points[i as usize]))
        .collect();
    let tracked = Tracked {
        points,
        subset,
        min_points,
    };
    build(set, r, bbox, None, Some(tracked), rng)
}

/// Cutting restricted to the faces of the sampled arrangement whose closure
/// meets the convex polygon `sigma`.
pub fn zone_cutting(
    set: &WeightedLineSet,
    r: f64,
    sigma: &[Point],
    bbox: BBox,
    rng: &mut Rng,
) -> Result<Cutting, CuttingError> {
    build(set, r, bbox, Some(sigma), None, rng)
}

/// Faces of the full arrangement of `lines` clipped to `bbox`, each fanned
/// from its bottom vertex.
pub fn canonical_triangulation(lines: &[Line], bbox: BBox) -> Vec<Simplex> {
    let set = WeightedLineSet::unit(lines.to_vec());
    let lines = Lines::new(lines, &[]);
    let root = Poly::from_bbox(&bbox, &lines, Vec::new());
    let all: Vec<u32> = root.list.clone();
    arrangement(root, &all, &lines, &Prune::NONE)
        .into_iter()
        .flat_map(|f| f.triangulate(&set, &lines))
        .map(|c| c.simplex)
        .collect()
}

/// `h` meets the open interior of `s`.
pub fn crosses_interior(h: &Line, s: &Simplex) -> bool {
    crate::geometry::crosses_interior(h, s)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CuttingReport {
    pub ok: bool,
    pub cells: usize,
    pub disjoint: bool,
    pub overlapping_pairs: usize,
    pub coverage: bool,
    pub probes: usize,
    pub uncovered: usize,
    pub multiply_covered: usize,
    pub weight_bound: bool,
    pub max_weight: f64,
    pub bound: f64,
    pub lists_exact: bool,
    pub messages: Vec<String>,
}

fn tri_interiors_disjoint(s: &Simplex, t: &Simplex) -> bool {
    let sep = |a: &Simplex, b: &Simplex| {
        (0..3).any(|i| {
            let (p, q) = (&a.vertices[i], &a.vertices[(i + 1) % 3]);
            b.vertices.iter().all(|v| rational::orient(p, q, v) <= 0)
        })
    };
    sep(s, t) || sep(t, s)
}

fn approx_box(s: &Simplex) -> (f64, f64, f64, f64) {
    let xs = s.vertices.iter().map(|v| v.ax);
    let ys = s.vertices.iter().map(|v| v.ay);
    let (x0, x1) = xs.fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(x), b.max(x)));
    let (y0, y1) = ys.fold((f64::MAX, f64::MIN), |(a, b), y| (a.min(y), b.max(y)));
    let mx = 1e-9 * (x0.abs() + x1.abs() + 1.0);
    let my = 1e-9 * (y0.abs() + y1.abs() + 1.0);
    (x0 - mx, x1 + mx, y0 - my, y1 + my)
}

/// Uniform bucket grid over approximate cell boxes for point location.
struct Locator {
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    g: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    fn new(cells: &[Cell], b: &BBox) -> Locator {
        let g = ((cells.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let (x0, y0) = (b.xmin as f64, b.ymin as f64);
        let dx = ((b.xmax - b.xmin) as f64 / g as f64).max(1e-300);
        let dy = ((b.ymax - b.ymin) as f64 / g as f64).max(1e-300);
        let mut buckets = vec![Vec::new(); g * g];
        let clampi = |v: f64| (v.floor().max(0.0) as usize).min(g - 1);
        for (i, c) in cells.iter().enumerate() {
            let (a, bx, cy, d) = approx_box(&c.simplex);
            let (i0, i1) = (clampi((a - x0) / dx), clampi((bx - x0) / dx));
            let (j0, j1) = (clampi((cy - y0) / dy), clampi((d - y0) / dy));
            for ii in i0..=i1 {
                for jj in j0..=j1 {
                    buckets[jj * g + ii].push(i);
                }
            }
        }
        Locator {
            x0,
            y0,
            dx,
            dy,
            g,
            buckets,
        }
    }

    fn candidates(&self, x: f64, y: f64) -> &[usize] {
        let g = self.g;
        let i = (((x - self.x0) / self.dx).floor().max(0.0) as usize).min(g - 1);
        let j = (((y - self.y0) / self.dy).floor().max(0.0) as usize).min(g - 1);
        &self.buckets[j * g + i]
    }
}

fn vertex_in(s: &Simplex, v: &Vertex, strict: bool) -> bool {
    let t = &s.vertices;
    (0..3).all(|i| {
        let o = rational::orient(&t[i], &t[(i + 1) % 3], v);
        if strict {
            o > 0
        } else {
            o >= 0
        }
    })
}

/// Random exact points on the boundary of a convex integer polygon.
pub fn boundary_probes(sigma: &[Point], count: usize, rng: &mut Rng) -> Vec<Vertex> {
    let m = sigma.len();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let i = rng.index(m);
        let (a, b) = (sigma[i], sigma[(i + 1) % m]);
        let e = Line::through(a, b);
        let v = if a.x != b.x {
            let x = rng.range_i64(a.x.min(b.x), a.x.max(b.x));
            Vertex::meet(e, Line::vertical(x as i128))
        } else {
            let y = rng.range_i64(a.y.min(b.y), a.y.max(b.y));
            Vertex::meet(e, Line::horizontal(y as i128))
        };
        if let Some(v) = v {
            out.push(v);
        }
    }
    out
}

/// Exact audit of a cutting: disjoint interiors, coverage of random probes,
/// and crossing weight recomputed from scratch against `W / r`.
pub fn verify_cutting(cut: &Cutting, set: &WeightedLineSet, probes: usize, rng: &mut Rng) -> CuttingReport {
    let mut rep = CuttingReport {
        cells: cut.cells.len(),
        probes,
        bound: set.total_weight / cut.r,
        ..Default::default()
    };
    // Weight bound and list exactness.
    rep.lists_exact = true;
    rep.weight_bound = true;
    for (ci, c) in cut.cells.iter().enumerate() {
        let fresh: Vec<u32> = (0..set.len() as u32)
            .filter(|&h| crosses_interior(&set.lines[h as usize], &c.simplex))
            .collect();
        let w: f64 = set.weight_of(&fresh);
        rep.max_weight = rep.max_weight.max(w);
        if fresh != c.crossing {
            rep.lists_exact = false;
            rep.messages.push(format!("cell {ci}: stored crossing list differs"));
        }
        if w > rep.bound * (1.0 + 1e-12) {
            rep.weight_bound = false;
            rep.messages.push(format!("cell {ci}: weight {w} > {}", rep.bound));
        }
    }
    // Pairwise interior disjointness via an x-interval sweep.
    let boxes: Vec<_> = cut.cells.iter().map(|c| approx_box(&c.simplex)).collect();
    let mut order: Vec<usize> = (0..cut.cells.len()).collect();
    order.sort_by(|&a, &b| boxes[a].0.total_cmp(&boxes[b].0));
    for (oi, &i) in order.iter().enumerate() {
        for &j in &order[oi + 1..] {
            if boxes[j].0 > boxes[i].1 {
                break;
            }
            if boxes[j].2 > boxes[i].3 || boxes[i].2 > boxes[j].3 {
                continue;
            }
            if !tri_interiors_disjoint(&cut.cells[i].simplex, &cut.cells[j].simplex) {
                rep.overlapping_pairs += 1;
                if rep.overlapping_pairs <= 5 {
                    rep.messages.push(format!("cells {i} and {j} overlap"));
                }
            }
        }
    }
    rep.disjoint = rep.overlapping_pairs == 0;
    // Coverage.
    let pts: Vec<Vertex> = match &cut.zone {
        Some(sigma) => boundary_probes(sigma, probes, rng),
        None => {
            let b = &cut.bbox;
            (0..probes)
                .map(|_| {
                    let x = b.xmin + (rng.unit() * (b.xmax - b.xmin) as f64) as i128;
                    let y = b.ymin + (rng.unit() * (b.ymax - b.ymin) as f64) as i128;
                    Vertex::meet(Line::vertical(x), Line::horizontal(y)).unwrap()
                })
                .collect()
        }
    };
    let loc = Locator::new(&cut.cells, &cut.bbox);
    for v in &pts {
        let cand = loc.candidates(v.ax, v.ay);
        let closed = cand
            .iter()
            .filter(|&&c| vertex_in(&cut.cells[c].simplex, v, false))
            .count();
        let strict = cand
            .iter()
            .filter(|&&c| vertex_in(&cut.cells[c].simplex, v, true))
            .count();
        if closed == 0 {
            rep.uncovered += 1;
        }
        if strict > 1 {
            rep.multiply_covered += 1;
        }
    }
    rep.coverage = rep.uncovered == 0 && rep.multiply_covered == 0;
    if rep.uncovered > 0 {
        rep.messages.push(format!("{} probes uncovered", rep.uncovered));
    }
    rep.ok = rep.weight_bound && rep.disjoint && rep.coverage && rep.lists_exact;
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dual_line;

    fn square() -> BBox {
        BBox {
            xmin: -100,
            ymin: -100,
            xmax: 100,
            ymax: 100,
        }
    }

    #[test]
    fn empty_arrangement_two_triangles() {
        assert_eq!(canonical_triangulation(&[], square()).len(), 2);
    }

    #[test]
    fn one_line_four_triangles() {
        let l = Line::new(1, 3, 7);
        assert_eq!(canonical_triangulation(&[l], square()).len(), 4);
        let corner = Line::new(1, 1, 150);
        assert_eq!(canonical_triangulation(&[corner], square()).len(), 4);
    }

    #[test]
    fn triangles_avoid_all_lines() {
        let mut rng = Rng::new(1);
        let lines: Vec<Line> = (0..10)
            .map(|_| {
                Line::new(
                    rng.range_i64(-50, 50) as i128,
                    rng.range_i64(1, 50) as i128,
                    rng.range_i64(-500, 500) as i128,
                )
            })
            .collect();
        let tris = canonical_triangulation(&lines, square());
        for t in &tris {
            for l in &lines {
                assert!(!crosses_interior(l, t));
            }
        }
    }

    #[test]
    fn r_one_is_the_box() {
        let lines = vec![Line::new(1, 3, 7), Line::new(-2, 1, 5)];
        let set = WeightedLineSet::unit(lines);
        let mut rng = Rng::new(3);
        let c = build_cutting(&set, 1.0, square(), &mut rng).unwrap();
        assert_eq!(c.cells.len(), 2);
        assert!(verify_cutting(&c, &set, 500, &mut rng).ok);
    }

    #[test]
    fn single_heavy_line_bounds_cells() {
        let lines = vec![Line::new(1, 3, 7), Line::new(-2, 1, 5), Line::new(5, 1, -3)];
        let set = WeightedLineSet::new(lines, vec![1.0, 0.0, 0.0]).unwrap();
        let mut rng = Rng::new(3);
        let c = build_cutting(&set, 2.0, square(), &mut rng).unwrap();
        assert!(c.cells.iter().all(|c| !c.crossing.contains(&0)));
        assert!(verify_cutting(&c, &set, 500, &mut rng).ok);
    }

    #[test]
    fn zero_weight_is_error() {
        let set = WeightedLineSet::new(vec![Line::new(1, 1, 1)], vec![0.0]).unwrap();
        assert!(build_cutting(&set, 2.0, square(), &mut Rng::new(1)).is_err());
    }

    #[test]
    fn random_cutting_verifies() {
        let mut rng = Rng::new(9);
        let pts: Vec<Point> = (0..128)
            .map(|_| Point::new(rng.range_i64(-1 << 20, 1 << 20), rng.range_i64(-1 << 20, 1 << 20)))
            .collect();
        let lines: Vec<Line> = pts.iter().map(|&p| dual_line(p)).collect();
        let b = dual_bbox(&pts);
        let set = WeightedLineSet::unit(lines);
        let c = build_cutting(&set, 8.0, b, &mut rng).unwrap();
        let rep = verify_cutting(&c, &set, 2000, &mut rng);
        assert!(rep.ok, "{rep:?}");
    }

    #[test]
    fn point_cutting_keeps_rich_cells() {
        let mut rng = Rng::new(4);
        let pts: Vec<Point> = (0..96)
            .map(|_| Point::new(rng.range_i64(-1 << 20, 1 << 20), rng.range_i64(-1 << 20, 1 << 20)))
            .collect();
        let b = dual_bbox(&pts);
        let (xr, yr) = ((b.xmax / 2) as i64, (b.ymax / 2) as i64);
        let targets: Vec<Point> = (0..300)
            .map(|_| Point::new(rng.range_i64(-xr, xr), rng.range_i64(-yr, yr)))
            .collect();
        let set = WeightedLineSet::unit(pts.iter().map(|&p| dual_line(p)).collect());
        let subset: Vec<usize> = (0..targets.len()).step_by(2).collect();
        let c = point_cutting(&set, 6.0, b, &targets, &subset, 5, &mut rng).unwrap();
        assert!(!c.cells.is_empty());
        for cell in &c.cells {
            assert!(cell.weight <= set.total_weight / 6.0);
            let inside: Vec<u32> = subset
                .iter()
                .filter(|&&i| cell.simplex.contains(targets[i]))
                .map(|&i| i as u32)
                .collect();
            assert_eq!(cell.points, inside);
            assert!(inside.len() >= 5);
            let exact: Vec<u32> = (0..set.len() as u32)
                .filter(|&h| crosses_interior(&set.lines[h as usize], &cell.simplex))
                .collect();
            assert_eq!(cell.crossing, exact);
        }
        let full = build_cutting(&set, 6.0, b, &mut Rng::new(4)).unwrap();
        let best = full
            .cells
            .iter()
            .map(|c| subset.iter().filter(|&&i| c.simplex.contains(targets[i])).count())
            .max();
        assert!(best.unwrap() >= 5);
    }

    #[test]
    fn doubled_r_fails_weight_bound() {
        let mut rng = Rng::new(9);
        let pts: Vec<Point> = (0..64)
            .map(|_| Point::new(rng.range_i64(-1 << 20, 1 << 20), rng.range_i64(-1 << 20, 1 << 20)))
            .collect();
        let set = WeightedLineSet::unit(pts.iter().map(|&p| dual_line(p)).collect());
        let mut c = build_cutting(&set, 4.0, dual_bbox(&pts), &mut rng).unwrap();
        c.r *= 8.0;
        assert!(!verify_cutting(&c, &set, 100, &mut rng).weight_bound);
    }

    #[test]
    fn deleted_cell_fails_coverage() {
        let set = WeightedLineSet::unit(vec![Line::new(1, 3, 7)]);
        let mut rng = Rng::new(3);
        let mut c = build_cutting(&set, 1.0, square(), &mut rng).unwrap();
        c.cells.pop();
        assert!(!verify_cutting(&c, &set, 1000, &mut rng).coverage);
    }
}
