//! Simplicial partitions with small crossing number.
//!
//! The shallow mode runs a weight-doubling loop against a fixed test set `Q`
//! of lines dual to the vertices of a cutting of the dual arrangement. Each
//! round cuts the weighted arrangement of `Q`, picks a cell holding at least
//! `2k` remaining points, emits `k` of them as a class, and doubles the
//! weight of every test line crossing that cell.

use crate::bounds::inverse_ackermann;
use crate::cutting::{build_cutting, dual_bbox, point_cutting, CuttingError, WeightedLineSet};
use crate::geometry::{crosses, dual_line, BBox, GeomError, Line, Point, Simplex};
use crate::rational::{self, Vertex};
use crate::rng::Rng;
use crate::shallow::{check_shallow, ShallowError};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Denominator of the snapped test-line coefficients.
pub const SNAP: i128 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error(transparent)]
    Shallow(#[from] ShallowError),
    #[error(transparent)]
    Cutting(#[from] CuttingError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("invalid parameters: {0}")]
    Params(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionMode {
    Shallow,
    Standard,
    Matching,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    pub c4: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub retry_cap: u32,
    pub seed: u64,
    pub weight_renorm_threshold: f64,
    pub skip_shallow_check: bool,
    /// Upper bound on the test-set cutting parameter.
    pub test_set_t_max: usize,
    /// Upper bound on `t^2` times the number of rounds.
    pub test_set_budget: f64,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        PartitionConfig {
            c4: 0.5,
            b: 16.0,
            retry_cap: 8,
            seed: 0,
            weight_renorm_threshold: 512.0,
            skip_shallow_check: false,
            test_set_t_max: 64,
            test_set_budget: 262144.0,
        }
    }
}

impl PartitionConfig {
    pub fn validate(&self) -> Result<(), PartitionError> {
        if !(self.c4 > 0.0 && self.c4 <= 1.0) {
            return Err(PartitionError::Params(format!("c4 = {} not in (0, 1]", self.c4)));
        }
        if !(self.b >= 4.0) {
            return Err(PartitionError::Params(format!("B = {} < 4", self.b)));
        }
        if self.retry_cap < 1 {
            return Err(PartitionError::Params("retry_cap < 1".into()));
        }
        if !(self.weight_renorm_threshold >= 1.0) {
            return Err(PartitionError::Params("weight_renorm_threshold < 1".into()));
        }
        if self.test_set_t_max < 1 {
            return Err(PartitionError::Params("test_set_t_max < 1".into()));
        }
        if !(self.test_set_budget >= 1.0) {
            return Err(PartitionError::Params("test_set_budget < 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestSetSource {
    DualCuttingVertices,
    PointPairs,
    Random,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestSet {
    pub lines: Vec<Line>,
    pub provenance: TestSetSource,
    /// Cutting parameter of the dual cutting.
    pub t: usize,
    pub cutting_cells: usize,
}

/// Test set from the vertices of a `(1/t)`-cutting of the dual lines of
/// `pts`. Vertices are snapped to the grid of pitch `1 / SNAP` before
/// dualizing, which keeps coefficients small; duplicates are removed.
pub fn build_test_set(pts: &[Point], t: usize, rng: &mut Rng) -> Result<TestSet, PartitionError> {
    let n = pts.len();
    if n < 2 {
        return Err(PartitionError::Params("need at least 2 points".into()));
    }
    let set = WeightedLineSet::unit(pts.iter().map(|&p| dual_line(p)).collect());
    let r = (t.max(1) as f64).min(n as f64);
    let cut = build_cutting(&set, r, dual_bbox(pts), rng)?;
    let mut seen = HashSet::new();
    let mut lines = Vec::new();
    for c in &cut.cells {
        for v in &c.simplex.vertices {
            let m = (v.ax * SNAP as f64).round() as i128;
            let q = (v.ay * SNAP as f64).round() as i128;
            if seen.insert((m, q)) {
                // Dual of (m, q) / SNAP: SNAP y = m x - q.
                lines.push(Line::new(-m, SNAP, -q));
            }
        }
    }
    Ok(TestSet {
        lines,
        provenance: TestSetSource::DualCuttingVertices,
        t,
        cutting_cells: cut.cells.len(),
    })
}

/// Test-set parameter: `ceil(n / k)` for the shallow modes, `ceil(sqrt(n / k))`
/// for the standard mode.
pub fn test_set_t(n: usize, k: usize, mode: PartitionMode) -> usize {
    let x = n as f64 / k as f64;
    match mode {
        PartitionMode::Standard => x.sqrt().ceil() as usize,
        _ => x.ceil() as usize,
    }
}

/// Cutting rate of one round.
pub fn round_rate(n_i: usize, k: usize, mode: PartitionMode, c4: f64) -> f64 {
    let x = n_i as f64 / k as f64;
    let t = match mode {
        PartitionMode::Standard => c4 * x.sqrt(),
        _ => {
            let a = inverse_ackermann(x.max(1.0) as u64).max(1) as f64;
            let l = x.log2().max(1.0);
            c4 * x / (a * l)
        }
    };
    t.max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    None,
    LargestCell,
    Bounding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub round: usize,
    pub n_i: usize,
    pub t_i: f64,
    /// Cells of the round cutting holding enough points to be chosen.
    pub cells: usize,
    pub retries: u32,
    pub chosen_count: usize,
    pub class_size: usize,
    pub fallback: Fallback,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimplicialPartition {
    pub n: usize,
    pub classes: Vec<Vec<usize>>,
    pub simplices: Vec<Simplex>,
    /// Round that produced each class; `None` for tail classes.
    pub rounds: Vec<Option<usize>>,
    pub k: usize,
    pub mode: PartitionMode,
    pub build_log: Vec<RoundLog>,
    pub test_lines: Vec<Line>,
    /// Final weight exponents `log2 w(h)` of the test lines.
    pub exponents: Vec<u32>,
}

impl SimplicialPartition {
    /// Exact structural audit: disjoint cover, class sizes, containment.
    pub fn validate(&self, pts: &[Point]) -> Result<(), String> {
        if self.classes.len() != self.simplices.len() {
            return Err("classes and simplices differ in length".into());
        }
        let mut seen = vec![false; pts.len()];
        let mut threes = 0;
        for (i, (c, s)) in self.classes.iter().zip(&self.simplices).enumerate() {
            if self.mode == PartitionMode::Matching {
                match c.len() {
                    2 => {}
                    3 => threes += 1,
                    m => return Err(format!("class {i} has {m} points")),
                }
            } else if pts.len() >= self.k && (c.len() < self.k || c.len() > 2 * self.k) {
                return Err(format!("class {i} has {} points, k = {}", c.len(), self.k));
            }
            for &p in c {
                if p >= pts.len() || seen[p] {
                    return Err(format!("point {p} repeated or out of range"));
                }
                seen[p] = true;
                if !s.contains(pts[p]) {
                    return Err(format!("point {p} outside simplex {i}"));
                }
            }
        }
        if threes > 1 {
            return Err("more than one class of size 3".into());
        }
        if threes == 1 && pts.len().is_multiple_of(2) {
            return Err("class of size 3 with an even point count".into());
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(format!("point {p} in no class"));
        }
        Ok(())
    }

    pub fn crossing_number(&self, h: &Line) -> usize {
        self.simplices.iter().filter(|s| crosses(h, s)).count()
    }

    /// Recompute `log2 w(h)` from the chosen simplices alone.
    pub fn replay_exponents(&self) -> Vec<u32> {
        let chosen: Vec<&Simplex> = self
            .rounds
            .iter()
            .zip(&self.simplices)
            .filter(|(r, _)| r.is_some())
            .map(|(_, s)| s)
            .collect();
        self.test_lines
            .iter()
            .map(|h| chosen.iter().filter(|s| crosses(h, s)).count() as u32)
            .collect()
    }

    pub fn dump_json(&self) -> serde_json::Value {
        let simplices: Vec<serde_json::Value> = self
            .simplices
            .iter()
            .map(|s| {
                let v: Vec<[f64; 2]> = s.vertices.iter().map(|v| [v.ax, v.ay]).collect();
                serde_json::json!({ "vertices": v, "bounding": s.is_bounding() })
            })
            .collect();
        serde_json::json!({
            "schema": 1,
            "n": self.n,
            "k": self.k,
            "mode": self.mode,
            "classes": self.classes,
            "simplices": simplices,
            "build_log": self.build_log,
            "test_lines": self.test_lines.len(),
        })
    }
}

/// Split `rest`, sorted by coordinates, into `ceil(|rest| / 2k)` nearly equal tail classes, or into
/// pairs plus at most one triple in matching mode.
fn tail_classes(rest: &[usize], k: usize, mode: PartitionMode) -> Vec<Vec<usize>> {
    if rest.is_empty() {
        return Vec::new();
    }
    if mode == PartitionMode::Matching {
        let mut out: Vec<Vec<usize>> = rest.chunks(2).map(|c| c.to_vec()).collect();
        if out.len() > 1 && out.last().unwrap().len() == 1 {
            let x = out.pop().unwrap()[0];
            out.last_mut().unwrap().push(x);
        }
        return out;
    }
    let m = rest.len().div_ceil(2 * k).max(1);
    let (q, r) = (rest.len() / m, rest.len() % m);
    let mut out = Vec::with_capacity(m);
    let mut at = 0;
    for i in 0..m {
        let sz = q + usize::from(i < r);
        out.push(rest[at..at + sz].to_vec());
        at += sz;
    }
    out
}

fn lex_smallest(pts: &[Point], mut idx: Vec<usize>, m: usize) -> Vec<usize> {
    idx.sort_by_key(|&i| (pts[i].x, pts[i].y, i));
    idx.truncate(m);
    idx
}

/// Build a simplicial partition of `pts` with classes of size in `[k, 2k]`.
pub fn build_partition(
    pts: &[Point],
    k: usize,
    mode: PartitionMode,
    cfg: &PartitionConfig,
) -> Result<SimplicialPartition, PartitionError> {
    cfg.validate()?;
    let n = pts.len();
    let k = if mode == PartitionMode::Matching { 2 } else { k };
    if n < 2 || k < 2 || (2 * k > n && mode != PartitionMode::Matching) {
        return Err(PartitionError::Params(format!(
            "need 2 <= k <= n/2, got k = {k}, n = {n}"
        )));
    }
    if !cfg.skip_shallow_check {
        match mode {
            PartitionMode::Shallow => check_shallow(pts, k as u32)?,
            PartitionMode::Matching => check_shallow(pts, 1)?,
            PartitionMode::Standard => {}
        }
    }
    let mut rng = Rng::new(cfg.seed);
    let bounding = Simplex::bounding(pts);
    let mut part = SimplicialPartition {
        n,
        classes: Vec::new(),
        simplices: Vec::new(),
        rounds: Vec::new(),
        k,
        mode,
        build_log: Vec::new(),
        test_lines: Vec::new(),
        exponents: Vec::new(),
    };
    let mut rest: Vec<usize> = (0..n).collect();
    let stop = (cfg.b * k as f64).floor() as usize;
    let take = if mode == PartitionMode::Matching { 2 } else { k };
    if n > stop {
        let mut trng = rng.fork();
        let rounds = (n - stop).div_ceil(take) as f64;
        let t = test_set_t(n, k, mode)
            .min(cfg.test_set_t_max)
            .min(((cfg.test_set_budget / rounds).sqrt() as usize).max(1));
        let q = build_test_set(pts, t, &mut trng)?;
        part.test_lines = q.lines;
    }
    let m = part.test_lines.len();
    let mut kappa = vec![0u32; m];
    let mut offset = 0u32;
    let bbox = BBox::around(pts);
    let mut round = 0usize;
    while rest.len() > stop {
        let n_i = rest.len();
        let t_i = round_rate(n_i, k, mode, cfg.c4);
        let maxk = *kappa.iter().max().unwrap_or(&0);
        if (maxk - offset) as f64 > cfg.weight_renorm_threshold {
            offset = maxk;
        }
        let weights: Vec<f64> = kappa.iter().map(|&e| (2f64).powi(e as i32 - offset as i32)).collect();
        let set = WeightedLineSet::new(part.test_lines.clone(), weights)?;
        let mut best: Option<(Simplex, Vec<usize>, usize)> = None;
        let mut chosen = None;
        let mut retries = 0;
        for attempt in 0..cfg.retry_cap {
            retries = attempt;
            // Cells with fewer than `take` points can never be chosen.
            let cut = point_cutting(&set, t_i, bbox, pts, &rest, take, &mut rng)?;
            let cells = cut.cells.len();
            let Some(top) = cut.cells.iter().max_by_key(|c| c.points.len()) else {
                continue;
            };
            let inside: Vec<usize> = top.points.iter().map(|&p| p as usize).collect();
            if inside.len() >= 2 * take {
                chosen = Some((top.simplex, inside, cells));
                break;
            }
            if best.as_ref().is_none_or(|(_, v, _)| inside.len() > v.len()) {
                best = Some((top.simplex, inside, cells));
            }
        }
        let (simplex, class, cells, chosen_count, fallback) = match chosen {
            Some((s, inside, cells)) => {
                let c = inside.len();
                (s, lex_smallest(pts, inside, take), cells, c, Fallback::None)
            }
            None => match best {
                Some((s, inside, cells)) => {
                    let c = inside.len();
                    let sz = if mode == PartitionMode::Matching {
                        2
                    } else {
                        c.min(2 * k)
                    };
                    (s, lex_smallest(pts, inside, sz), cells, c, Fallback::LargestCell)
                }
                None => (
                    bounding,
                    lex_smallest(pts, rest.clone(), take),
                    0,
                    0,
                    Fallback::Bounding,
                ),
            },
        };
        for (h, e) in part.test_lines.iter().zip(kappa.iter_mut()) {
            if crosses(h, &simplex) {
                *e += 1;
            }
        }
        let taken: HashSet<usize> = class.iter().copied().collect();
        rest.retain(|p| !taken.contains(p));
        part.build_log.push(RoundLog {
            round,
            n_i,
            t_i,
            cells,
            retries,
            chosen_count,
            class_size: class.len(),
            fallback,
        });
        part.classes.push(class);
        part.simplices.push(simplex);
        part.rounds.push(Some(round));
        round += 1;
    }
    rest.sort_by_key(|&i| (pts[i].x, pts[i].y, i));
    for c in tail_classes(&rest, k, mode) {
        part.classes.push(c);
        part.simplices.push(bounding);
        part.rounds.push(None);
    }
    part.exponents = kappa;
    Ok(part)
}

/// Pairs (plus at most one triple) of a point set in convex position.
pub fn matching_partition(r0: &[Point], seed: u64) -> Result<SimplicialPartition, PartitionError> {
    let cfg = PartitionConfig {
        seed,
        ..Default::default()
    };
    if r0.len() < 2 {
        return Err(PartitionError::Params("need at least 2 points".into()));
    }
    build_partition(r0, 2, PartitionMode::Matching, &cfg)
}

/// A line of a crossing-number probe family.
#[derive(Clone, Debug)]
pub enum ProbeLine {
    Line(Line),
    /// The line through two rational points.
    Through(Vertex, Vertex),
}

impl ProbeLine {
    pub fn crosses(&self, s: &Simplex) -> bool {
        match self {
            ProbeLine::Line(h) => crosses(h, s),
            ProbeLine::Through(a, b) => {
                if s.is_bounding() {
                    return true;
                }
                let sg: Vec<i32> = s.vertices.iter().map(|v| rational::orient(a, b, v)).collect();
                !(sg.iter().all(|&x| x > 0) || sg.iter().all(|&x| x < 0))
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ProbeLine::Line(h) => format!("{} x + {} y = {}", h.a, h.b, h.c),
            ProbeLine::Through(a, b) => {
                format!("through ({:.6}, {:.6}) and ({:.6}, {:.6})", a.ax, a.ay, b.ax, b.ay)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum CrossingFamily<'a> {
    Lines(&'a [Line]),
    /// Lines through point pairs (all, or `cap` sampled ones) plus lines
    /// through pairs of simplex vertices.
    PointPairs {
        cap: usize,
        seed: u64,
    },
    /// `m` lines through two random grid points of the point box.
    Random {
        m: usize,
        seed: u64,
    },
}

/// Lines through pairs of points, sampled uniformly when there are more
/// than `cap` pairs.
pub fn point_pair_lines(pts: &[Point], cap: usize, rng: &mut Rng) -> Vec<Line> {
    let n = pts.len();
    let total = n * n.saturating_sub(1) / 2;
    if total <= cap {
        let mut out = Vec::with_capacity(total);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(Line::through(pts[i], pts[j]));
            }
        }
        return out;
    }
    (0..cap)
        .map(|_| {
            let i = rng.index(n);
            let mut j = rng.index(n - 1);
            if j >= i {
                j += 1;
            }
            Line::through(pts[i], pts[j])
        })
        .collect()
}

/// Lines through pairs of distinct vertices of the ordinary simplices.
pub fn simplex_vertex_lines(simplices: &[Simplex]) -> Vec<ProbeLine> {
    let mut vs: Vec<Vertex> = Vec::new();
    for s in simplices.iter().filter(|s| !s.is_bounding()) {
        for v in &s.vertices {
            if !vs.iter().any(|u| u.same_point(v)) {
                vs.push(*v);
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..vs.len() {
        for j in (i + 1)..vs.len() {
            out.push(ProbeLine::Through(vs[i], vs[j]));
        }
    }
    out
}

/// Maximum crossing number over a family, with the maximizing line.
pub fn max_crossing(
    part: &SimplicialPartition,
    pts: &[Point],
    family: CrossingFamily<'_>,
) -> (usize, Option<ProbeLine>) {
    let probes: Vec<ProbeLine> = match family {
        CrossingFamily::Lines(ls) => ls.iter().map(|&h| ProbeLine::Line(h)).collect(),
        CrossingFamily::PointPairs { cap, seed } => {
            let mut rng = Rng::new(seed);
            let mut v: Vec<ProbeLine> = point_pair_lines(pts, cap, &mut rng)
                .into_iter()
                .map(ProbeLine::Line)
                .collect();
            v.extend(simplex_vertex_lines(&part.simplices));
            v
        }
        CrossingFamily::Random { m, seed } => {
            let mut rng = Rng::new(seed);
            let b = BBox::of_points(pts);
            let mut gp = || {
                Point::new(
                    rng.range_i64(b.xmin as i64, b.xmax as i64),
                    rng.range_i64(b.ymin as i64, b.ymax as i64),
                )
            };
            (0..m)
                .filter_map(|_| {
                    let (p, q) = (gp(), gp());
                    (p != q).then(|| ProbeLine::Line(Line::through(p, q)))
                })
                .collect()
        }
    };
    let mut best = (0usize, None);
    for pl in probes {
        let c = part.simplices.iter().filter(|s| pl.crosses(s)).count();
        if best.1.is_none() || c > best.0 {
            best = (c, Some(pl));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shallow::{generate, GenKind, GenParams};

    fn convex(n: usize, seed: u64) -> Vec<Point> {
        generate(GenKind::ConvexPosition, &GenParams::n(n), &mut Rng::new(seed)).unwrap()
    }

    #[test]
    fn two_k_is_one_bounding_class() {
        let pts = convex(16, 1);
        let p = build_partition(&pts, 8, PartitionMode::Shallow, &PartitionConfig::default()).unwrap();
        assert_eq!(p.classes.len(), 1);
        assert!(p.simplices[0].is_bounding());
        p.validate(&pts).unwrap();
        assert_eq!(p.crossing_number(&Line::new(1, 1, 0)), 1);
    }

    #[test]
    fn matching_parity() {
        for (n, sizes) in [(2usize, vec![2usize]), (7, vec![2, 2, 3])] {
            let pts = convex(n, 3);
            let p = matching_partition(&pts, 0).unwrap();
            let s: Vec<usize> = p.classes.iter().map(|c| c.len()).collect();
            assert_eq!(s, sizes);
        }
    }

    #[test]
    fn test_set_small_regime() {
        let pts = convex(64, 2);
        let q = build_test_set(&pts, test_set_t(64, 32, PartitionMode::Shallow), &mut Rng::new(1)).unwrap();
        assert_eq!(q.t, 2);
        assert!(q.lines.len() <= 8 * 4 * 4);
        assert!(q.lines.iter().all(|h| !h.is_vertical()));
    }

    #[test]
    fn test_set_size_n1024_k32() {
        let pts = convex(1024, 4);
        let q = build_test_set(&pts, 32, &mut Rng::new(1)).unwrap();
        assert!(q.lines.len() <= 8 * 32 * 32, "{}", q.lines.len());
    }

    #[test]
    fn shallow_partition_valid_and_replays() {
        let pts = convex(1024, 5);
        let cfg = PartitionConfig::default();
        let p = build_partition(&pts, 16, PartitionMode::Shallow, &cfg).unwrap();
        p.validate(&pts).unwrap();
        assert_eq!(p.replay_exponents(), p.exponents);
        for (a, b) in p.build_log.iter().zip(p.build_log.iter().skip(1)) {
            if a.fallback == Fallback::None {
                assert_eq!(b.n_i, a.n_i - a.class_size);
                assert_eq!(a.class_size, 16);
            }
        }
        assert!(p.build_log.len() <= 1024 / 16);
    }

    #[test]
    fn tail_bounding_counts() {
        let pts = convex(64, 6);
        let cfg = PartitionConfig::default();
        let p = build_partition(&pts, 4, PartitionMode::Shallow, &cfg).unwrap();
        let tails = p.rounds.iter().filter(|r| r.is_none()).count();
        assert!(tails >= 1);
        // A line far from the points only meets bounding simplices.
        let far = Line::new(0, 1, 1 << 50);
        assert_eq!(p.crossing_number(&far), tails);
    }

    #[test]
    fn crossing_number_matches_brute() {
        let pts = convex(256, 7);
        let p = build_partition(&pts, 8, PartitionMode::Shallow, &PartitionConfig::default()).unwrap();
        let mut rng = Rng::new(2);
        for h in point_pair_lines(&pts, 200, &mut rng) {
            let mut c = 0;
            for s in &p.simplices {
                let sg = s.signs(&h);
                let one_side = sg.iter().all(|&x| x > 0) || sg.iter().all(|&x| x < 0);
                if s.is_bounding() || !one_side {
                    c += 1;
                }
            }
            assert_eq!(c, p.crossing_number(&h));
        }
    }

    #[test]
    fn max_crossing_single_line() {
        let pts = convex(128, 8);
        let p = build_partition(&pts, 8, PartitionMode::Shallow, &PartitionConfig::default()).unwrap();
        let h = [Line::new(1, 2, 3)];
        assert_eq!(
            max_crossing(&p, &pts, CrossingFamily::Lines(&h)).0,
            p.crossing_number(&h[0])
        );
    }

    #[test]
    fn standard_mode_valid() {
        let pts = generate(GenKind::UniformDisk, &GenParams::n(1024), &mut Rng::new(3)).unwrap();
        let p = build_partition(&pts, 32, PartitionMode::Standard, &PartitionConfig::default()).unwrap();
        p.validate(&pts).unwrap();
        assert_eq!(p.replay_exponents(), p.exponents);
    }

    #[test]
    fn deep_point_rejected() {
        let pts = generate(GenKind::UniformDisk, &GenParams::n(256), &mut Rng::new(3)).unwrap();
        let e = build_partition(&pts, 4, PartitionMode::Shallow, &PartitionConfig::default());
        assert!(matches!(e, Err(PartitionError::Shallow(ShallowError::TooDeep { .. }))));
    }
}
