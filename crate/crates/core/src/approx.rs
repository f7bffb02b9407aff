//! Relative `(p, eps)`-approximations by repeated matching-based halving.
//!
//! Each stage builds a relative-crossing tree on the surviving points,
//! shortcuts it to a matching, colors every pair `(-1, +1)` or `(+1, -1)` at
//! random and keeps the `+1` class together with the unmatched point.

use crate::bounds::{rel_approx_size, BoundError};
use crate::geometry::Point;
use crate::partition::PartitionConfig;
use crate::rng::Rng;
use crate::shallow::{check_relative_approx, RangeFamily, RelApproxReport};
use crate::sweep::{pair_line_sweep, SweepVisitor};
use crate::tree::{build_relative_tree, max_pair_line_crossing, tree_to_matching, Matching, TreeError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Stages up to this size get an exhaustive discrepancy audit.
pub const AUDIT_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("invalid parameters: {0}")]
    Params(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedColoring {
    pub signs: Vec<i8>,
    pub pair_source: Matching,
}

impl SignedColoring {
    pub fn validate(&self) -> Result<(), String> {
        let n = self.signs.len();
        self.pair_source.validate(n)?;
        if self.signs.iter().any(|&s| s != 1 && s != -1) {
            return Err("sign outside {-1, +1}".into());
        }
        for &(a, b) in &self.pair_source.pairs {
            if self.signs[a] == self.signs[b] {
                return Err(format!("pair ({a}, {b}) has equal signs"));
            }
        }
        let sum: i64 = self.signs.iter().map(|&s| s as i64).sum();
        if sum != (n % 2) as i64 {
            return Err(format!("sign sum {sum} for n = {n}"));
        }
        Ok(())
    }

    /// Indices colored `+1`, ascending.
    pub fn plus(&self) -> Vec<usize> {
        (0..self.signs.len()).filter(|&i| self.signs[i] == 1).collect()
    }
}

/// Fair independent coloring of every pair; the leftover point gets `+1`.
pub fn color_matching(m: &Matching, rng: &mut Rng) -> SignedColoring {
    let n = 2 * m.pairs.len() + usize::from(m.leftover.is_some());
    let mut signs = vec![0i8; n];
    for &(a, b) in &m.pairs {
        let s = if rng.coin() { 1 } else { -1 };
        signs[a] = s;
        signs[b] = -s;
    }
    if let Some(l) = m.leftover {
        signs[l] = 1;
    }
    SignedColoring {
        signs,
        pair_source: m.clone(),
    }
}

struct Discrepancy<'a> {
    signs: &'a [i8],
    total: i64,
    s: i64,
    max: i64,
}

impl SweepVisitor for Discrepancy<'_> {
    fn start(&mut self, _: usize, left: &[bool]) {
        self.s = left
            .iter()
            .zip(self.signs)
            .filter(|(&l, _)| l)
            .map(|(_, &c)| c as i64)
            .sum();
    }

    fn flip(&mut self, j: usize, now_left: bool) {
        let c = self.signs[j] as i64;
        self.s += if now_left { c } else { -c };
    }

    fn event(&mut self, i: usize, j: usize, _: &[bool]) {
        let (a, b) = (self.signs[i] as i64, self.signs[j] as i64);
        for v in [self.s, self.s + a, self.s + b, self.s + a + b] {
            self.max = self.max.max(v.abs()).max((self.total - v).abs());
        }
    }
}

/// Largest `|sum of signs|` over all closed and open halfplanes.
pub fn discrepancy(pts: &[Point], signs: &[i8]) -> i64 {
    let total: i64 = signs.iter().map(|&s| s as i64).sum();
    let mut v = Discrepancy {
        signs,
        total,
        s: 0,
        max: total.abs(),
    };
    pair_line_sweep(pts, None, &mut v);
    v.max
}

/// `|r - s| / (r + s + nu)`.
pub fn d_nu(r: f64, s: f64, nu: f64) -> f64 {
    (r - s).abs() / (r + s + nu)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApproxConfig {
    pub partition: PartitionConfig,
    /// Dimension of the target-size formula.
    pub d: u32,
    /// Constant of the target-size formula.
    pub c: f64,
    /// Verify the last stage against exhaustive halfplane enumeration.
    pub verify: bool,
    pub max_redraws: u32,
    pub seed: u64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            partition: PartitionConfig::default(),
            d: 2,
            c: 1.0,
            verify: true,
            max_redraws: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageAudit {
    pub size: usize,
    /// Max halfplane crossing of the matching the stage was colored from.
    pub matching_crossing: Option<usize>,
    pub discrepancy: Option<i64>,
}

/// Halving stage: survivors as indices into the input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub points: Vec<usize>,
    pub audit: StageAudit,
}

/// `stages[0]` is the whole input; each later stage halves the previous one.
/// Stages are built on demand and depend only on the seed and the stage
/// number.
#[derive(Clone, Debug)]
pub struct HalvingChain {
    pub input: Vec<Point>,
    pub stages: Vec<Stage>,
    matchings: Vec<Matching>,
    cfg: PartitionConfig,
    seed: u64,
}

fn stage_rng(seed: u64, stage: usize, draw: u32) -> Rng {
    Rng::stream(seed, ((stage as u64) << 8) | draw as u64)
}

impl HalvingChain {
    pub fn new(pts: &[Point], cfg: &PartitionConfig, seed: u64) -> Self {
        HalvingChain {
            input: pts.to_vec(),
            stages: vec![Stage {
                points: (0..pts.len()).collect(),
                audit: StageAudit {
                    size: pts.len(),
                    matching_crossing: None,
                    discrepancy: None,
                },
            }],
            matchings: Vec::new(),
            cfg: cfg.clone(),
            seed,
        }
    }

    fn stage_points(&self, i: usize) -> Vec<Point> {
        self.stages[i].points.iter().map(|&j| self.input[j]).collect()
    }

    /// Survivors of coloring stage `i - 1` with the given draw.
    fn recolor(&self, i: usize, draw: u32) -> (Vec<usize>, SignedColoring) {
        let prev = &self.stages[i - 1].points;
        let col = color_matching(&self.matchings[i - 1], &mut stage_rng(self.seed, i, draw));
        let keep = col.plus().into_iter().map(|j| prev[j]).collect();
        (keep, col)
    }

    /// Build stages until there are `count + 1`, or the last has one point.
    pub fn extend(&mut self, count: usize) -> Result<(), ApproxError> {
        while self.stages.len() <= count {
            let i = self.stages.len();
            if self.stages[i - 1].points.len() < 2 {
                break;
            }
            let sub = self.stage_points(i - 1);
            let mut trng = stage_rng(self.seed, i, 255);
            let tree = build_relative_tree(&sub, &self.cfg, &mut trng)?;
            let m = tree_to_matching(&tree);
            self.matchings.push(m);
            let (points, col) = self.recolor(i, 0);
            let audit = if sub.len() <= AUDIT_LIMIT {
                let pairs = &self.matchings[i - 1].pairs;
                StageAudit {
                    size: points.len(),
                    matching_crossing: Some(max_pair_line_crossing(&sub, pairs)),
                    discrepancy: Some(discrepancy(&sub, &col.signs)),
                }
            } else {
                StageAudit {
                    size: points.len(),
                    matching_crossing: None,
                    discrepancy: None,
                }
            };
            self.stages.push(Stage { points, audit });
        }
        Ok(())
    }

    /// Number of halvings whose result still has at least `target` points.
    pub fn stages_for(&self, target: f64) -> usize {
        let mut size = self.input.len();
        let mut s = 0;
        while size >= 2 && size.div_ceil(2) as f64 >= target {
            size = size.div_ceil(2);
            s += 1;
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelApprox {
    pub points: Vec<Point>,
    /// Indices into the input.
    pub indices: Vec<usize>,
    pub p: f64,
    pub eps: f64,
    pub target: f64,
    pub stages: usize,
    /// Colorings of the last stage tried beyond the first.
    pub redraws: u32,
    pub verification: Option<RelApproxReport>,
    pub note: Option<String>,
    pub warning: Option<String>,
}

impl RelApprox {
    pub fn dump_json(&self, input_size: usize, d: u32, c: f64) -> serde_json::Value {
        let v = self.verification.as_ref();
        serde_json::json!({
            "schema": 1,
            "input_size": input_size,
            "output_size": self.points.len(),
            "target": { "d": d, "p": self.p, "eps": self.eps, "c": c, "size": self.target },
            "stages": self.stages,
            "redraws": self.redraws,
            "worst_offender": v.and_then(|r| r.worst.clone()),
            "max_dp": v.map(|r| r.max_dp),
            "ok": v.map(|r| r.ok),
            "note": self.note,
            "warning": self.warning,
        })
    }
}

fn check_params(p: f64, eps: f64, n: usize) -> Result<(), ApproxError> {
    if !(p > 0.0 && p < 1.0 && eps > 0.0 && eps < 1.0) {
        return Err(ApproxError::Params(format!(
            "need 0 < p, eps < 1, got p = {p}, eps = {eps}"
        )));
    }
    if n < 2 {
        return Err(ApproxError::Params("need at least 2 points".into()));
    }
    Ok(())
}

/// Relative `(p, eps)`-approximation read off a shared halving chain.
pub fn relative_approx_from_chain(
    chain: &mut HalvingChain,
    p: f64,
    eps: f64,
    cfg: &ApproxConfig,
) -> Result<RelApprox, ApproxError> {
    let n = chain.input.len();
    check_params(p, eps, n)?;
    let target = rel_approx_size(cfg.d, p, eps, cfg.c)?;
    let s = chain.stages_for(target);
    if s == 0 {
        return Ok(RelApprox {
            points: chain.input.clone(),
            indices: (0..n).collect(),
            p,
            eps,
            target,
            stages: 0,
            redraws: 0,
            verification: None,
            note: Some(format!("target size {target:.1} leaves no room to halve {n} points")),
            warning: None,
        });
    }
    chain.extend(s)?;
    let s = s.min(chain.stages.len() - 1);
    let verify = |idx: &[usize]| {
        let z: Vec<Point> = idx.iter().map(|&i| chain.input[i]).collect();
        check_relative_approx(&z, &chain.input, p, eps, RangeFamily::Halfplanes)
    };
    let mut indices = chain.stages[s].points.clone();
    let mut verification = None;
    let mut redraws = 0;
    let mut warning = None;
    if cfg.verify {
        let mut rep = verify(&indices);
        let mut best = (rep.violations, indices.clone(), rep.clone());
        while !rep.ok && redraws < cfg.max_redraws {
            redraws += 1;
            let (cand, _) = chain.recolor(s, redraws);
            rep = verify(&cand);
            if rep.violations < best.0 {
                best = (rep.violations, cand, rep.clone());
            }
        }
        if !best.2.ok {
            warning = Some(format!(
                "last stage still has {} violating ranges after {redraws} redraws",
                best.2.violations
            ));
        }
        indices = best.1;
        verification = Some(best.2);
    }
    indices.sort_unstable();
    Ok(RelApprox {
        points: indices.iter().map(|&i| chain.input[i]).collect(),
        indices,
        p,
        eps,
        target,
        stages: s,
        redraws,
        verification,
        note: None,
        warning,
    })
}

/// Halve `pts` while the next stage keeps at least the target size.
pub fn build_relative_approx(pts: &[Point], p: f64, eps: f64, cfg: &ApproxConfig) -> Result<RelApprox, ApproxError> {
    let mut chain = HalvingChain::new(pts, &cfg.partition, cfg.seed);
    relative_approx_from_chain(&mut chain, p, eps, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shallow::{generate, GenKind, GenParams};

    fn uniform(n: usize, seed: u64) -> Vec<Point> {
        generate(GenKind::UniformDisk, &GenParams::n(n), &mut Rng::new(seed)).unwrap()
    }

    #[test]
    fn one_pair_colors_both_ways() {
        let m = Matching {
            pairs: vec![(0, 1)],
            leftover: None,
        };
        let mut seen = [false; 2];
        for s in 0..64 {
            let c = color_matching(&m, &mut Rng::new(s));
            c.validate().unwrap();
            seen[(c.signs[0] == 1) as usize] = true;
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn leftover_is_kept() {
        let m = Matching {
            pairs: vec![(0, 2), (3, 1)],
            leftover: Some(4),
        };
        let c = color_matching(&m, &mut Rng::new(3));
        c.validate().unwrap();
        assert_eq!(c.signs[4], 1);
        assert_eq!(c.plus().len(), 3);
    }

    #[test]
    fn discrepancy_matches_brute_force() {
        let pts = uniform(40, 2);
        let mut rng = Rng::new(5);
        let signs: Vec<i8> = (0..40).map(|_| if rng.coin() { 1 } else { -1 }).collect();
        let mut best = signs.iter().map(|&s| s as i64).sum::<i64>().abs();
        for i in 0..40 {
            for j in 0..40 {
                if i == j {
                    continue;
                }
                let h = crate::geometry::Line::through(pts[i], pts[j]);
                let mut s_open = 0;
                let mut s_on = 0;
                for (k, &q) in pts.iter().enumerate() {
                    match h.eval_sign(q) {
                        1 => s_open += signs[k] as i64,
                        0 => s_on += signs[k] as i64,
                        _ => {}
                    }
                }
                for v in [s_open, s_open + s_on] {
                    best = best.max(v.abs());
                }
            }
        }
        let d = discrepancy(&pts, &signs);
        assert!(d >= best, "{d} < {best}");
    }

    #[test]
    fn halving_sizes() {
        let pts = uniform(101, 4);
        let mut chain = HalvingChain::new(&pts, &PartitionConfig::default(), 1);
        chain.extend(3).unwrap();
        let sizes: Vec<usize> = chain.stages.iter().map(|s| s.points.len()).collect();
        assert_eq!(sizes, vec![101, 51, 26, 13]);
        for w in chain.stages.windows(2) {
            assert!(w[1].points.iter().all(|i| w[0].points.contains(i)));
        }
    }

    #[test]
    fn target_above_n_returns_input() {
        let pts = uniform(64, 1);
        let r = build_relative_approx(&pts, 0.1, 0.1, &ApproxConfig::default()).unwrap();
        assert_eq!(r.points.len(), 64);
        assert_eq!(r.stages, 0);
        assert!(r.note.is_some());
    }

    #[test]
    fn chain_length_is_log_ratio() {
        let pts = uniform(512, 6);
        let cfg = ApproxConfig::default();
        let r = build_relative_approx(&pts, 0.5, 0.5, &cfg).unwrap();
        let z = r.points.len();
        assert_eq!(r.stages, (512.0 / z as f64).log2().floor() as usize);
        assert!(z as f64 >= r.target);
        assert!(r.verification.unwrap().ok);
    }
}
