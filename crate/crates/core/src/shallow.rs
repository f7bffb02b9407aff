//! Depth, shallow subsets, Bernoulli samples and their hull statistics,
//! dataset generators, and the relative-approximation checker.

use crate::geometry::{
    convex_hull_indices, degenerate_indices, perturb_general_position, GeomError, Line, Plane, Point, Point3, Side,
    PERTURB_BAND,
};
use crate::rng::Rng;
use crate::sweep::{pair_line_sweep, SweepVisitor};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShallowError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("point {index} {point:?} has depth {depth} > {k}")]
    TooDeep {
        index: usize,
        point: Point,
        depth: u32,
        k: u32,
    },
    #[error("invalid parameters: {0}")]
    Params(String),
}

fn cross(a: (i64, i64), b: (i64, i64)) -> i128 {
    a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128
}

/// Depth of `pts[i]`: the fewest points of `pts` in a closed halfplane whose
/// boundary passes through it, the point itself included.
pub fn depth(pts: &[Point], i: usize) -> Result<u32, GeomError> {
    let p = pts[i];
    let mut dirs: Vec<(i64, i64)> = Vec::with_capacity(pts.len());
    for (j, q) in pts.iter().enumerate() {
        if j == i {
            continue;
        }
        let (dx, dy) = (q.x - p.x, q.y - p.y);
        if dx == 0 && dy == 0 {
            return Err(GeomError::GeneralPosition(format!("duplicate of point {i}")));
        }
        dirs.push((dx, dy));
    }
    let m = dirs.len();
    if m <= 1 {
        return Ok(1);
    }
    let half = |v: &(i64, i64)| v.1 < 0 || (v.1 == 0 && v.0 < 0);
    dirs.sort_by(|a, b| half(a).cmp(&half(b)).then_with(|| 0.cmp(&cross(*a, *b))));
    // c = number of directions strictly inside the open half turn after d_i.
    let mut best = u32::MAX;
    let mut j = 1usize;
    for i in 0..m {
        if j < i + 1 {
            j = i + 1;
        }
        while j < i + m && cross(dirs[i], dirs[j % m]) > 0 {
            j += 1;
        }
        if j < i + m && cross(dirs[i], dirs[j % m]) == 0 {
            return Err(GeomError::GeneralPosition(format!(
                "point {i} is collinear with two others"
            )));
        }
        let c = (j - i - 1) as u32;
        let other = (m - 1) as u32 - c;
        best = best.min(c.min(other));
    }
    Ok(1 + best)
}

/// Depth of every point; hull vertices are depth 1 without a sweep.
pub fn depth_all(pts: &[Point]) -> Result<Vec<u32>, GeomError> {
    let mut out = vec![0u32; pts.len()];
    for i in convex_hull_indices(pts) {
        out[i] = 1;
    }
    for i in 0..pts.len() {
        if out[i] == 0 {
            out[i] = depth(pts, i)?;
        }
    }
    Ok(out)
}

/// Depth in three dimensions by brute force over planes through the point
/// and two others, `O(n^3)`.
pub fn depth3(pts: &[Point3], i: usize) -> Result<u32, GeomError> {
    let p = pts[i];
    let n = pts.len();
    if n <= 3 {
        return Ok(1);
    }
    let mut best = u32::MAX;
    for a in 0..n {
        if a == i {
            continue;
        }
        for b in (a + 1)..n {
            if b == i {
                continue;
            }
            let h = Plane::through(p, pts[a], pts[b]);
            if h.a == 0 && h.b == 0 && h.c == 0 {
                return Err(GeomError::GeneralPosition(format!(
                    "point {i} is collinear with {a} and {b}"
                )));
            }
            let (mut up, mut down) = (0u32, 0u32);
            for (m, &q) in pts.iter().enumerate() {
                if m == i || m == a || m == b {
                    continue;
                }
                match h.side_of(q) {
                    Side::Above => up += 1,
                    Side::Below => down += 1,
                    Side::On => {
                        return Err(GeomError::GeneralPosition(format!(
                            "four coplanar points including {i}"
                        )))
                    }
                }
            }
            best = best.min(up.min(down));
        }
    }
    Ok(1 + best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthProfile {
    pub depths: Vec<u32>,
    pub max_shallowness: u32,
}

impl DepthProfile {
    /// Profile of `pts`; `max_shallowness` is taken over points of depth at most `k`.
    pub fn compute(pts: &[Point], k: u32) -> Result<Self, GeomError> {
        let depths = depth_all(pts)?;
        let max_shallowness = depths.iter().copied().filter(|&d| d <= k).max().unwrap_or(0);
        Ok(DepthProfile {
            depths,
            max_shallowness,
        })
    }
}

/// Indices of the points of depth at most `k`.
pub fn shallow_subset(pts: &[Point], k: u32) -> Result<Vec<usize>, GeomError> {
    let d = depth_all(pts)?;
    Ok((0..pts.len()).filter(|&i| d[i] <= k).collect())
}

/// First point deeper than `k`, if any.
pub fn check_shallow(pts: &[Point], k: u32) -> Result<(), ShallowError> {
    let hull = convex_hull_indices(pts);
    let mut on_hull = vec![false; pts.len()];
    for i in hull {
        on_hull[i] = true;
    }
    for i in 0..pts.len() {
        if on_hull[i] || k as usize >= pts.len() {
            continue;
        }
        let d = depth(pts, i)?;
        if d > k {
            return Err(ShallowError::TooDeep {
                index: i,
                point: pts[i],
                depth: d,
                k,
            });
        }
    }
    Ok(())
}

/// Each index in `0..n` kept independently with probability `prob`.
pub fn bernoulli_sample(n: usize, prob: f64, rng: &mut Rng) -> Vec<usize> {
    (0..n).filter(|_| rng.bernoulli(prob)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleTrialReport {
    pub trials: u64,
    /// `None` when no trial was run.
    pub success_fraction: Option<f64>,
    #[serde(rename = "mean_Y")]
    pub mean_y: f64,
    #[serde(rename = "mean_Z")]
    pub mean_z: f64,
    pub seed: u64,
}

impl SampleTrialReport {
    pub fn is_empty(&self) -> bool {
        self.trials == 0
    }
}

fn hull_size_of(pts: &[Point], idx: &[usize]) -> usize {
    let sub: Vec<Point> = idx.iter().map(|&i| pts[i]).collect();
    convex_hull_indices(&sub).len()
}

/// Fraction of Bernoulli(1/k) samples with `|Y| >= n/8k` and
/// `n/2k <= |Z| <= 2n/k`, where `Y` is the hull vertex set of `Z`.
pub fn verify_hull_fraction(pts: &[Point], k: u32, trials: u64, seed: u64) -> Result<SampleTrialReport, ShallowError> {
    let n = pts.len();
    if k < 2 || (k as usize) * 256 > n {
        return Err(ShallowError::Params(format!(
            "need 2 <= k <= n/256, got k = {k}, n = {n}"
        )));
    }
    check_shallow(pts, k)?;
    Ok(hull_fraction_trials(pts, k, trials, seed))
}

/// [`verify_hull_fraction`] without the precondition checks.
pub fn hull_fraction_trials(pts: &[Point], k: u32, trials: u64, seed: u64) -> SampleTrialReport {
    let n = pts.len() as f64;
    let kf = k as f64;
    let (mut ok, mut sy, mut sz) = (0u64, 0f64, 0f64);
    for t in 0..trials {
        let mut rng = Rng::stream(seed, t);
        let z = bernoulli_sample(pts.len(), 1.0 / kf, &mut rng);
        let y = hull_size_of(pts, &z);
        let zs = z.len() as f64;
        sy += y as f64;
        sz += zs;
        if y as f64 >= n / (8.0 * kf) && zs >= n / (2.0 * kf) && zs <= 2.0 * n / kf {
            ok += 1;
        }
    }
    let tr = trials.max(1) as f64;
    SampleTrialReport {
        trials,
        success_fraction: (trials > 0).then(|| ok as f64 / trials as f64),
        mean_y: sy / tr,
        mean_z: sz / tr,
        seed,
    }
}

/// `(1 - (1-1/k)^(k-1)) (1 - (1-1/k)^(ck))^2`.
pub fn sheffer_probability(k: u32, c: u32) -> f64 {
    let q = 1.0 - 1.0 / k as f64;
    (1.0 - q.powi(k as i32 - 1)) * (1.0 - q.powi((c * k) as i32)).powi(2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub trials: u64,
    pub collapsed: u64,
    pub frequency: f64,
    pub predicted: f64,
    pub seed: u64,
}

/// Frequency of Bernoulli(1/k) samples whose hull has at most `2c + 1` vertices.
pub fn hull_collapse_frequency(pts: &[Point], k: u32, c: u32, trials: u64, seed: u64) -> CollapseReport {
    let mut collapsed = 0;
    for t in 0..trials {
        let mut rng = Rng::stream(seed, t);
        let z = bernoulli_sample(pts.len(), 1.0 / k as f64, &mut rng);
        if hull_size_of(pts, &z) <= (2 * c + 1) as usize {
            collapsed += 1;
        }
    }
    CollapseReport {
        trials,
        collapsed,
        frequency: collapsed as f64 / trials.max(1) as f64,
        predicted: sheffer_probability(k, c),
        seed,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    UniformDisk,
    ConvexPosition,
    Grid,
    Sheffer,
}

impl std::str::FromStr for GenKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" | "uniform_disk" | "disk" => Ok(GenKind::UniformDisk),
            "convex" | "convex_position" => Ok(GenKind::ConvexPosition),
            "grid" => Ok(GenKind::Grid),
            "sheffer" => Ok(GenKind::Sheffer),
            _ => Err(format!("unknown generator `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    /// Cluster size for `sheffer`.
    pub k: u32,
    /// Number of side rays per flank for `sheffer`.
    pub c: u32,
}

impl GenParams {
    pub fn n(n: usize) -> Self {
        GenParams { n, k: 2, c: 1 }
    }
}

/// Coordinate radius of generated data, in grid units.
pub const GEN_RADIUS: i64 = 1 << 30;

/// Above this size only duplicate and vertical-pair violations are scanned
/// for random data; exact collinear triples among random `2^30`-range
/// coordinates are left to the exact predicates downstream.
pub const FULL_SCAN_LIMIT: usize = 4096;

/// Perturbation band used for lattice input, in fine grid units.
pub const GRID_BAND: i64 = 1 << 8;

fn vertical_or_duplicate(pts: &[Point]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by_key(|&i| pts[i].x);
    let mut bad = Vec::new();
    for w in idx.windows(2) {
        if pts[w[0]].x == pts[w[1]].x {
            bad.push(w[1]);
        }
    }
    bad
}

fn clean_random(mut pts: Vec<Point>, rng: &mut Rng) -> Result<Vec<Point>, GeomError> {
    if pts.len() <= FULL_SCAN_LIMIT {
        return perturb_general_position(&pts, rng, PERTURB_BAND);
    }
    for _ in 0..64 {
        let bad = vertical_or_duplicate(&pts);
        if bad.is_empty() {
            return Ok(pts);
        }
        for i in bad {
            pts[i].x += rng.range_i64(-PERTURB_BAND, PERTURB_BAND);
            pts[i].y += rng.range_i64(-PERTURB_BAND, PERTURB_BAND);
        }
    }
    Err(GeomError::BandTooSmall(vertical_or_duplicate(&pts).len(), 64))
}

fn polar(r: f64, theta: f64) -> Point {
    Point::new((r * theta.cos()).round() as i64, (r * theta.sin()).round() as i64)
}

fn uniform_disk(n: usize, rng: &mut Rng) -> Vec<Point> {
    let r = GEN_RADIUS;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = rng.range_i64(-r, r);
        let y = rng.range_i64(-r, r);
        if (x as i128).pow(2) + (y as i128).pow(2) <= (r as i128).pow(2) {
            out.push(Point::new(x, y));
        }
    }
    out
}

fn convex_position(n: usize, rng: &mut Rng) -> Result<Vec<Point>, GeomError> {
    let r = GEN_RADIUS as f64;
    let step = std::f64::consts::TAU / n as f64;
    let phase = rng.unit() * step;
    let mut theta: Vec<f64> = (0..n)
        .map(|i| phase + step * (i as f64 + 0.5 * (rng.unit() - 0.5)))
        .collect();
    for _ in 0..64 {
        let pts: Vec<Point> = theta.iter().map(|&t| polar(r, t)).collect();
        let hull = convex_hull_indices(&pts);
        let mut bad = vertical_or_duplicate(&pts);
        if hull.len() < n {
            let mut on = vec![false; n];
            for i in hull {
                on[i] = true;
            }
            bad.extend((0..n).filter(|&i| !on[i]));
        }
        if bad.is_empty() {
            return Ok(pts);
        }
        for i in bad {
            theta[i] += step * 0.01 * (rng.unit() - 0.5);
        }
    }
    Err(GeomError::BandTooSmall(n, 64))
}

fn grid(n: usize, rng: &mut Rng) -> Result<Vec<Point>, GeomError> {
    let side = (n as f64).sqrt().ceil() as i64;
    let coarse: Vec<Point> = (0..n as i64)
        .map(|i| Point::new(i % side - side / 2, i / side - side / 2))
        .collect();
    let fine = crate::geometry::refine(&coarse, crate::geometry::REFINE_BITS);
    perturb_general_position(&fine, rng, GRID_BAND)
}

/// Lower-bound layout: a cap `A` of `n` points, an upward cluster `T` of
/// `k - 1` points and `2c` side clusters of `k` points each.
///
/// `A` is the integer parabola `(4n i, R - 4 i^2)`, centered, so it is in
/// strictly convex position with slopes in `[-1, 1]`. `T` lies on a nearly
/// vertical ray at radius `1.5 R`. The side rays leave the origin at angles
/// spread over `[185, 235]` degrees and their mirror images, with radii
/// `R (1 + i delta)`.
fn sheffer(n: usize, k: u32, c: u32, rng: &mut Rng) -> Result<Vec<Point>, ShallowError> {
    if k < 2 || c < 1 {
        return Err(ShallowError::Params("sheffer needs k >= 2 and c >= 1".into()));
    }
    let need = 20 * (2 * c as usize + 1) * k as usize;
    if n < need {
        return Err(ShallowError::Params(format!(
            "sheffer needs n >= 20 (2c + 1) k = {need}, got {n}"
        )));
    }
    let nn = n as i64;
    let mut radius = GEN_RADIUS;
    while radius < 32 * nn * nn {
        radius *= 2;
    }
    let rf = radius as f64;
    let mut pts = Vec::with_capacity(n + (2 * c as usize + 1) * k as usize);
    let s = 4 * nn;
    for i in 0..nn {
        let j = i - nn / 2;
        pts.push(Point::new(s * j, radius - 4 * j * j));
    }
    let delta = (1e-3f64).min(0.008 / k as f64);
    let tilt = 1e-3f64;
    for i in 1..k {
        pts.push(polar(
            1.5 * rf * (1.0 + i as f64 * delta),
            std::f64::consts::FRAC_PI_2 - tilt,
        ));
    }
    let deg = std::f64::consts::PI / 180.0;
    for j in 0..c {
        let a = if c == 1 {
            210.0
        } else {
            185.0 + 50.0 * j as f64 / (c - 1) as f64
        };
        for side in [a, 180.0 - a] {
            for i in 1..=k {
                pts.push(polar(rf * (1.0 + i as f64 * delta), side * deg));
            }
        }
    }
    let pts = perturb_general_position(&pts, rng, PERTURB_BAND)?;
    check_shallow(&pts, k)?;
    Ok(pts)
}

pub fn generate(kind: GenKind, params: &GenParams, rng: &mut Rng) -> Result<Vec<Point>, ShallowError> {
    let n = params.n;
    if n == 0 && kind != GenKind::Sheffer {
        return Ok(Vec::new());
    }
    Ok(match kind {
        GenKind::UniformDisk => clean_random(uniform_disk(n, rng), rng)?,
        GenKind::ConvexPosition => convex_position(n, rng)?,
        GenKind::Grid => grid(n, rng)?,
        GenKind::Sheffer => sheffer(n, params.k, params.c, rng)?,
    })
}

/// True iff the set has no duplicate, vertical pair or collinear triple.
pub fn in_general_position(pts: &[Point]) -> bool {
    degenerate_indices(pts).is_empty()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeFamily {
    Halfplanes,
    SampledTriangles { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    /// Boundary line of the range, its side (`true` for strict left or above)
    /// and which boundary points are included.
    pub description: String,
    pub x_measure: f64,
    pub n_measure: f64,
    /// `|N - X| / (eps * max(X, p))`; above 1 means a violation.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelApproxReport {
    pub ok: bool,
    pub ranges_checked: u64,
    pub violations: u64,
    pub worst: Option<Offender>,
    /// Largest `d_p(X, N) = |X - N| / (X + N + p)` over the family.
    pub max_dp: f64,
}

struct Judge {
    n: f64,
    m: f64,
    p: f64,
    eps: f64,
    checked: u64,
    violations: u64,
    worst_ratio: f64,
    worst: Option<(String, f64, f64)>,
    max_dp: f64,
}

impl Judge {
    fn new(n: usize, m: usize, p: f64, eps: f64) -> Self {
        Judge {
            n: n as f64,
            m: m as f64,
            p,
            eps,
            checked: 0,
            violations: 0,
            worst_ratio: -1.0,
            worst: None,
            max_dp: 0.0,
        }
    }

    fn judge(&mut self, x: i64, z: i64, what: impl FnOnce() -> String) {
        self.checked += 1;
        let (xf, zf) = (x as f64, z as f64);
        let xm = xf / self.n;
        let nm = if self.m > 0.0 { zf / self.m } else { 0.0 };
        // Integer-scaled comparison: |z n - x m| <= eps max(x m, p n m).
        let diff = (zf * self.n - xf * self.m).abs();
        let allowed = self.eps * (xf * self.m).max(self.p * self.n * self.m);
        let bad = if self.m > 0.0 {
            diff > allowed
        } else {
            // Empty sample: N is identically 0.
            xm > self.eps * xm.max(self.p)
        };
        if bad {
            self.violations += 1;
        }
        let ratio = if self.m > 0.0 {
            if allowed > 0.0 {
                diff / allowed
            } else if diff > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            xm / (self.eps * xm.max(self.p))
        };
        if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
            self.worst = Some((what(), xm, nm));
        }
        let dp = (xm - nm).abs() / (xm + nm + self.p);
        if dp > self.max_dp {
            self.max_dp = dp;
        }
    }

    fn report(self) -> RelApproxReport {
        RelApproxReport {
            ok: self.violations == 0,
            ranges_checked: self.checked,
            violations: self.violations,
            worst: self.worst.map(|(description, x_measure, n_measure)| Offender {
                description,
                x_measure,
                n_measure,
                ratio: self.worst_ratio,
            }),
            max_dp: self.max_dp,
        }
    }
}

struct HalfplaneVisitor<'a> {
    pts: &'a [Point],
    inz: &'a [bool],
    m: i64,
    x: i64,
    z: i64,
    judge: Judge,
}

impl SweepVisitor for HalfplaneVisitor<'_> {
    fn start(&mut self, _: usize, left: &[bool]) {
        self.x = left.iter().filter(|&&b| b).count() as i64;
        self.z = left.iter().zip(self.inz).filter(|(&l, &z)| l && z).count() as i64;
    }

    fn flip(&mut self, j: usize, now_left: bool) {
        let s = if now_left { 1 } else { -1 };
        self.x += s;
        if self.inz[j] {
            self.z += s;
        }
    }

    fn event(&mut self, i: usize, j: usize, _: &[bool]) {
        let n = self.pts.len() as i64;
        let m = self.m;
        let zi = self.inz[i] as i64;
        let zj = self.inz[j] as i64;
        for (ai, aj) in [(false, false), (true, false), (false, true), (true, true)] {
            let x = self.x + ai as i64 + aj as i64;
            let z = self.z + if ai { zi } else { 0 } + if aj { zj } else { 0 };
            let (p, q) = (self.pts[i], self.pts[j]);
            let desc =
                |side: &'static str| move || format!("line through {p:?} {q:?}, {side} side, include ({ai}, {aj})");
            self.judge.judge(x, z, desc("sweep-left"));
            self.judge.judge(n - x, m - z, desc("complement"));
        }
    }
}

/// Check the two clauses of a relative `(p, eps)`-approximation of `full`
/// by `sample` over a range family. Points of `sample` must occur in `full`.
pub fn check_relative_approx(
    sample: &[Point],
    full: &[Point],
    p: f64,
    eps: f64,
    family: RangeFamily,
) -> RelApproxReport {
    let mut pos: HashMap<Point, usize> = HashMap::with_capacity(full.len());
    for (i, &q) in full.iter().enumerate() {
        pos.insert(q, i);
    }
    let mut inz = vec![false; full.len()];
    for q in sample {
        if let Some(&i) = pos.get(q) {
            inz[i] = true;
        }
    }
    let m = inz.iter().filter(|&&b| b).count();
    let mut judge = Judge::new(full.len(), m, p, eps);
    judge.judge(0, 0, || "empty range".into());
    judge.judge(full.len() as i64, m as i64, || "whole plane".into());
    match family {
        RangeFamily::Halfplanes => {
            let mut v = HalfplaneVisitor {
                pts: full,
                inz: &inz,
                m: m as i64,
                x: 0,
                z: 0,
                judge,
            };
            pair_line_sweep(full, None, &mut v);
            v.judge.report()
        }
        RangeFamily::SampledTriangles { count, seed } => {
            let mut rng = Rng::new(seed);
            let n = full.len();
            if n >= 3 {
                for _ in 0..count {
                    let t = rng.sample_indices(n, 3);
                    let (a, b, c) = (full[t[0]], full[t[1]], full[t[2]]);
                    let o = crate::geometry::orientation(a, b, c);
                    if o == 0 {
                        continue;
                    }
                    let inside = |q: Point| {
                        crate::geometry::orientation(a, b, q) * o >= 0
                            && crate::geometry::orientation(b, c, q) * o >= 0
                            && crate::geometry::orientation(c, a, q) * o >= 0
                    };
                    let (mut x, mut z) = (0i64, 0i64);
                    for (i, &q) in full.iter().enumerate() {
                        if inside(q) {
                            x += 1;
                            z += inz[i] as i64;
                        }
                    }
                    judge.judge(x, z, || format!("triangle {a:?} {b:?} {c:?}"));
                }
            }
            judge.report()
        }
    }
}

/// Closed halfplane `a x + b y <= c` count by linear scan.
pub fn count_below_or_on(pts: &[Point], h: &Line) -> usize {
    pts.iter().filter(|&&q| h.eval_sign(q) <= 0).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_depth(pts: &[Point], i: usize) -> u32 {
        // Both closed sides of every line through the point and another one,
        // minus nothing: the closed side includes both points.
        let mut best = pts.len() as u32;
        for j in 0..pts.len() {
            if j == i {
                continue;
            }
            let h = Line::through(pts[i], pts[j]);
            let up = pts.iter().filter(|&&q| h.eval_sign(q) > 0).count() as u32;
            let down = pts.iter().filter(|&&q| h.eval_sign(q) < 0).count() as u32;
            // rotating slightly around pts[i] moves pts[j] to either side
            best = best.min(1 + up).min(1 + down);
        }
        best
    }

    #[test]
    fn hull_vertex_depth_one() {
        let pts = [
            Point::new(0, 0),
            Point::new(10, 1),
            Point::new(9, 11),
            Point::new(-1, 9),
            Point::new(4, 5),
        ];
        assert_eq!(depth(&pts, 0).unwrap(), 1);
        assert_eq!(depth(&pts, 4).unwrap(), 2);
    }

    #[test]
    fn heptagon_center() {
        // m = 3: regular 7-gon plus its center, n = 8 -> depth 4
        let mut pts: Vec<Point> = (0..7)
            .map(|i| polar(1e6, 0.3 + i as f64 * std::f64::consts::TAU / 7.0))
            .collect();
        pts.push(Point::new(0, 0));
        assert_eq!(depth(&pts, 7).unwrap(), 4);
    }

    #[test]
    fn depth_matches_brute_force() {
        let mut rng = Rng::new(11);
        let pts = generate(GenKind::UniformDisk, &GenParams::n(120), &mut rng).unwrap();
        for i in 0..pts.len() {
            assert_eq!(depth(&pts, i).unwrap(), brute_depth(&pts, i), "point {i}");
        }
    }

    #[test]
    fn collinear_is_an_error() {
        let pts = [Point::new(0, 0), Point::new(1, 1), Point::new(2, 2), Point::new(0, 5)];
        assert!(depth(&pts, 1).is_err());
    }

    #[test]
    fn depth3_tetrahedron_plus_center() {
        let pts = [
            Point3::new(0, 0, 0),
            Point3::new(100, 1, 3),
            Point3::new(2, 100, 7),
            Point3::new(5, 3, 100),
            Point3::new(25, 26, 27),
        ];
        assert_eq!(depth3(&pts, 0).unwrap(), 1);
        assert_eq!(depth3(&pts, 4).unwrap(), 2);
    }

    #[test]
    fn convex_all_depth_one() {
        let mut rng = Rng::new(2);
        let pts = generate(GenKind::ConvexPosition, &GenParams::n(512), &mut rng).unwrap();
        assert!(depth_all(&pts).unwrap().iter().all(|&d| d == 1));
    }

    #[test]
    fn grid_is_generic() {
        let mut rng = Rng::new(4);
        let pts = generate(GenKind::Grid, &GenParams::n(100), &mut rng).unwrap();
        assert!(in_general_position(&pts));
    }

    #[test]
    fn shallow_subset_extremes() {
        let mut rng = Rng::new(8);
        let pts = generate(GenKind::UniformDisk, &GenParams::n(60), &mut rng).unwrap();
        let hull: std::collections::BTreeSet<usize> = convex_hull_indices(&pts).into_iter().collect();
        let s1: std::collections::BTreeSet<usize> = shallow_subset(&pts, 1).unwrap().into_iter().collect();
        assert_eq!(s1, hull);
        assert_eq!(shallow_subset(&pts, 60).unwrap().len(), 60);
    }

    #[test]
    fn sheffer_formula_value() {
        let q = 7.0f64 / 8.0;
        let oracle = (1.0 - q.powi(7)) * (1.0 - q.powi(32)).powi(2);
        assert!((sheffer_probability(8, 4) - oracle).abs() < 1e-15);
    }

    #[test]
    fn empty_trials_flagged() {
        let pts: Vec<Point> = (0..512).map(|i| polar(1e8, i as f64 * 0.0122)).collect();
        let r = hull_fraction_trials(&pts, 2, 0, 1);
        assert!(r.is_empty());
        assert_eq!(r.success_fraction, None);
    }

    #[test]
    fn rel_approx_trivial_cases() {
        let mut rng = Rng::new(3);
        let pts = generate(GenKind::UniformDisk, &GenParams::n(50), &mut rng).unwrap();
        assert!(check_relative_approx(&pts, &pts, 0.1, 0.1, RangeFamily::Halfplanes).ok);
        assert!(!check_relative_approx(&[], &pts, 0.1, 0.5, RangeFamily::Halfplanes).ok);
    }
}
