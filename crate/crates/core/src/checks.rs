//! Named acceptance checks shared by the acceptance suite and the CLI.
//!
//! Every check returns a [`CheckReport`] carrying trials, successes and the
//! threshold it was judged against, plus free-form metrics.

use crate::approx::{relative_approx_from_chain, ApproxConfig, HalvingChain};
use crate::bounds::{
    chernoff_tail, improvement_exponent, improvement_holds, inverse_ackermann, k1_exponent, rel_approx_exponents,
    tail_sum_bound, BinomialEstimate, BoundParams, Frac, TailKind,
};
use crate::counting::{build_structure, oracle_count, random_halfplanes, CountingConfig};
use crate::cutting::{build_cutting, dual_bbox, verify_cutting, zone_cutting, WeightedLineSet};
use crate::geometry::{convex_hull, dual_line, Point};
use crate::partition::{build_partition, max_crossing, CrossingFamily, PartitionConfig, PartitionMode};
use crate::rng::Rng;
use crate::shallow::{
    check_relative_approx, check_shallow, generate, hull_collapse_frequency, verify_hull_fraction, GenKind, GenParams,
    RangeFamily,
};
use crate::tree::{build_relative_tree, relative_profile};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Instant;

pub const CHECKS: [&str; 9] = [
    "sampling_fraction",
    "sheffer_collapse",
    "cutting_validity",
    "partition_envelope",
    "weight_ledger",
    "relative_tree",
    "relative_approx",
    "range_counting",
    "calculators",
];

/// Overrides for a check; `None` keeps the acceptance defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub criterion: usize,
    pub name: String,
    pub passed: bool,
    pub trials: u64,
    pub successes: u64,
    pub threshold: f64,
    pub summary: String,
    pub metrics: serde_json::Value,
    pub seconds: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error("unknown check `{0}`")]
    Unknown(String),
    #[error("{0}")]
    Failed(String),
}

fn fail<E: std::fmt::Display>(e: E) -> CheckError {
    CheckError::Failed(e.to_string())
}

struct Outcome {
    passed: bool,
    trials: u64,
    successes: u64,
    threshold: f64,
    summary: String,
    metrics: serde_json::Value,
}

/// Run the named check.
pub fn run_check(name: &str, p: &CheckParams) -> Result<CheckReport, CheckError> {
    let criterion = CHECKS
        .iter()
        .position(|&c| c == name)
        .ok_or_else(|| CheckError::Unknown(name.to_string()))?
        + 1;
    let t0 = Instant::now();
    let o = match criterion {
        1 => sampling_fraction(p)?,
        2 => sheffer_collapse(p)?,
        3 => cutting_validity(p)?,
        4 => partition_envelope(p)?,
        5 => weight_ledger(p)?,
        6 => relative_tree(p)?,
        7 => relative_approx(p)?,
        8 => range_counting(p)?,
        _ => calculators(p)?,
    };
    Ok(CheckReport {
        schema: 1,
        criterion,
        name: name.to_string(),
        passed: o.passed,
        trials: o.trials,
        successes: o.successes,
        threshold: o.threshold,
        summary: o.summary,
        metrics: o.metrics,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

fn points(kind: GenKind, n: usize, seed: u64) -> Result<Vec<Point>, CheckError> {
    generate(kind, &GenParams::n(n), &mut Rng::new(seed)).map_err(fail)
}

fn sampling_fraction(p: &CheckParams) -> Result<Outcome, CheckError> {
    let (n, k, seed, trials) = (
        p.n.unwrap_or(1024),
        p.k.unwrap_or(4),
        p.seed.unwrap_or(1),
        p.trials.unwrap_or(2000),
    );
    let pts = points(GenKind::ConvexPosition, n, seed)?;
    let rep = verify_hull_fraction(&pts, k as u32, trials, seed).map_err(fail)?;
    let f = rep.success_fraction.unwrap_or(0.0);
    let threshold = 0.20;
    Ok(Outcome {
        passed: f >= threshold,
        trials,
        successes: (f * trials as f64).round() as u64,
        threshold,
        summary: format!("n={n} k={k}: success fraction {f:.4} (threshold {threshold})"),
        metrics: serde_json::to_value(&rep).unwrap(),
    })
}

fn sheffer_collapse(p: &CheckParams) -> Result<Outcome, CheckError> {
    let (k, c, seed, trials) = (
        p.k.unwrap_or(8) as u32,
        4,
        p.seed.unwrap_or(1),
        p.trials.unwrap_or(10_000),
    );
    let n = p.n.unwrap_or(4096);
    let pts = generate(GenKind::Sheffer, &GenParams { n, k, c }, &mut Rng::new(seed)).map_err(fail)?;
    let shallow = check_shallow(&pts, k);
    let rep = hull_collapse_frequency(&pts, k, c, trials, seed);
    let gap = (rep.frequency - rep.predicted).abs();
    let threshold = 0.03;
    Ok(Outcome {
        passed: gap <= threshold && shallow.is_ok(),
        trials,
        successes: rep.collapsed,
        threshold,
        summary: format!(
            "k={k} c={c}: frequency {:.4}, formula {:.4}, gap {gap:.4}; depth <= k: {}",
            rep.frequency,
            rep.predicted,
            shallow.is_ok()
        ),
        metrics: json!({ "report": rep, "points": pts.len(), "shallow_error": shallow.err().map(|e| e.to_string()) }),
    })
}

/// Integer convex polygon with `m` vertices inscribed in the middle of `b`.
fn inscribed_polygon(b: &crate::geometry::BBox, m: usize) -> Vec<Point> {
    let (cx, cy) = ((b.xmin + b.xmax) as f64 / 2.0, (b.ymin + b.ymax) as f64 / 2.0);
    let r = ((b.xmax - b.xmin).min(b.ymax - b.ymin)) as f64 / 4.0;
    let pts: Vec<Point> = (0..m)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + 0.25) / m as f64;
            Point::new((cx + r * t.cos()).round() as i64, (cy + r * t.sin()).round() as i64)
        })
        .collect();
    convex_hull(&pts)
}

fn cutting_validity(p: &CheckParams) -> Result<Outcome, CheckError> {
    let (n, seed) = (p.n.unwrap_or(512), p.seed.unwrap_or(1));
    let probes = p.trials.unwrap_or(10_000) as usize;
    let mut rng = Rng::new(seed);
    let duals: Vec<Point> = (0..n)
        .map(|_| Point::new(rng.range_i64(-1 << 20, 1 << 20), rng.range_i64(-1 << 20, 1 << 20)))
        .collect();
    let set = WeightedLineSet::unit(duals.iter().map(|&q| dual_line(q)).collect());
    let bbox = dual_bbox(&duals);
    let sigma = inscribed_polygon(&bbox, 32);
    let mut rows = Vec::new();
    let mut passed = sigma.len() == 32;
    let mut ok_count = 0;
    for r in [4.0, 8.0, 16.0, 32.0] {
        let cut = build_cutting(&set, r, bbox, &mut rng).map_err(fail)?;
        let rep = verify_cutting(&cut, &set, probes, &mut rng);
        let zcut = zone_cutting(&set, r, &sigma, bbox, &mut rng).map_err(fail)?;
        let zrep = verify_cutting(&zcut, &set, probes / 10, &mut rng);
        passed &= rep.ok && zrep.ok;
        ok_count += rep.ok as u64 + zrep.ok as u64;
        rows.push(json!({
            "r": r, "cells": rep.cells, "max_weight": rep.max_weight, "bound": rep.bound, "ok": rep.ok,
            "zone_cells": zrep.cells, "zone_max_weight": zrep.max_weight, "zone_ok": zrep.ok,
            "messages": rep.messages.iter().chain(&zrep.messages).take(5).collect::<Vec<_>>(),
        }));
    }
    Ok(Outcome {
        passed,
        trials: 8,
        successes: ok_count,
        threshold: 8.0,
        summary: format!("n={n} lines, r in {{4,8,16,32}}: {ok_count}/8 full and zone cuttings verified"),
        metrics: json!({ "rows": rows, "polygon_vertices": sigma.len(), "probes": probes }),
    })
}

fn envelope_sizes(p: &CheckParams) -> Vec<(usize, usize)> {
    match (p.n, p.k) {
        (Some(n), Some(k)) => vec![(n, k)],
        (Some(n), None) => vec![(n, (n / 64).max(2))],
        _ => vec![(1024, 16), (4096, 64), (16384, 256)],
    }
}

fn partition_envelope(p: &CheckParams) -> Result<Outcome, CheckError> {
    let seed = p.seed.unwrap_or(1);
    let cap = p.trials.unwrap_or(10_000) as usize;
    let mut rows = Vec::new();
    let mut norms = Vec::new();
    let mut structural = true;
    for (n, k) in envelope_sizes(p) {
        let pts = points(GenKind::ConvexPosition, n, seed)?;
        let cfg = PartitionConfig {
            seed,
            ..PartitionConfig::default()
        };
        let part = build_partition(&pts, k, PartitionMode::Shallow, &cfg).map_err(fail)?;
        let valid = part.validate(&pts);
        let replay = part.replay_exponents() == part.exponents;
        structural &= valid.is_ok() && replay;
        let (mc, _) = max_crossing(&part, &pts, CrossingFamily::PointPairs { cap, seed });
        let x = (n / k) as f64;
        let norm = mc as f64 / (inverse_ackermann((n / k) as u64) as f64 * x.log2().powi(2));
        norms.push(norm);
        rows.push(json!({
            "n": n, "k": k, "classes": part.classes.len(), "test_lines": part.test_lines.len(),
            "max_crossing": mc, "normalized": norm, "valid": valid.err(), "replay_exact": replay,
        }));
    }
    let hi = norms.iter().cloned().fold(f64::MIN, f64::max);
    let lo = norms.iter().cloned().fold(f64::MAX, f64::min);
    let ratio = hi / lo;
    let threshold = 2.0;
    Ok(Outcome {
        passed: structural && ratio <= threshold,
        trials: rows.len() as u64,
        successes: rows.len() as u64 * structural as u64,
        threshold,
        summary: format!("normalized max crossing {norms:.3?}, max/min {ratio:.3} (threshold {threshold}); invariants exact: {structural}"),
        metrics: json!({ "rows": rows, "ratio": ratio }),
    })
}

fn weight_ledger(p: &CheckParams) -> Result<Outcome, CheckError> {
    let seed = p.seed.unwrap_or(1);
    let builds = [
        (GenKind::ConvexPosition, 1024, 16, PartitionMode::Shallow),
        (GenKind::UniformDisk, 2048, 32, PartitionMode::Standard),
        (GenKind::ConvexPosition, 512, 2, PartitionMode::Matching),
    ];
    let mut rows = Vec::new();
    let mut exact = 0;
    for (kind, n, k, mode) in builds {
        let pts = points(kind, p.n.unwrap_or(n), seed)?;
        let cfg = PartitionConfig {
            seed,
            ..PartitionConfig::default()
        };
        let part = build_partition(&pts, p.k.unwrap_or(k), mode, &cfg).map_err(fail)?;
        let replay = part.replay_exponents();
        let mism = replay.iter().zip(&part.exponents).filter(|(a, b)| a != b).count();
        exact += (mism == 0) as u64;
        rows.push(json!({ "kind": kind, "n": pts.len(), "mode": mode, "lines": replay.len(), "mismatches": mism }));
    }
    Ok(Outcome {
        passed: exact == builds.len() as u64,
        trials: builds.len() as u64,
        successes: exact,
        threshold: builds.len() as f64,
        summary: format!(
            "{exact}/{} build logs replay to the final weights exactly",
            builds.len()
        ),
        metrics: json!({ "rows": rows }),
    })
}

fn relative_tree(p: &CheckParams) -> Result<Outcome, CheckError> {
    let seed = p.seed.unwrap_or(1);
    let sizes = match p.n {
        Some(n) => vec![n],
        None => vec![256, 1024],
    };
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let (mut checked, mut viol) = (0u64, 0u64);
    for n in sizes {
        let pts = points(GenKind::UniformDisk, n, seed)?;
        let cfg = PartitionConfig {
            seed,
            ..PartitionConfig::default()
        };
        let tree = build_relative_tree(&pts, &cfg, &mut Rng::new(seed.wrapping_add(1))).map_err(fail)?;
        tree.validate().map_err(fail)?;
        let prof = relative_profile(&tree);
        checked += prof.separation_checked;
        viol += prof.separation_violations;
        fits.push(prof.max_ratio);
        rows.push(json!({ "n": n, "profile": prof }));
    }
    let hi = fits.iter().cloned().fold(f64::MIN, f64::max);
    let lo = fits.iter().cloned().fold(f64::MAX, f64::min);
    let ratio = hi / lo;
    let threshold = 2.0;
    Ok(Outcome {
        passed: ratio <= threshold && viol == 0,
        trials: checked,
        successes: checked - viol,
        threshold,
        summary: format!(
            "fitted constants {fits:.4?}, max/min {ratio:.3} (threshold {threshold}); separation {}/{checked}",
            checked - viol
        ),
        metrics: json!({ "rows": rows, "ratio": ratio }),
    })
}

fn relative_approx(p: &CheckParams) -> Result<Outcome, CheckError> {
    let n = p.n.unwrap_or(2048);
    let seeds: Vec<u64> = match p.seed {
        Some(s) => vec![s],
        None => (1..=4).collect(),
    };
    let cells = [
        (1.0 / 8.0, 0.25),
        (1.0 / 8.0, 0.5),
        (1.0 / 16.0, 0.25),
        (1.0 / 16.0, 0.5),
    ];
    let mut rows = Vec::new();
    let (mut trials, mut ok) = (0u64, 0u64);
    for kind in [GenKind::UniformDisk, GenKind::ConvexPosition] {
        for &seed in &seeds {
            let pts = points(kind, n, seed)?;
            let cfg = ApproxConfig {
                seed,
                ..ApproxConfig::default()
            };
            let mut chain = HalvingChain::new(&pts, &cfg.partition, seed);
            for &(pp, eps) in &cells {
                let out = relative_approx_from_chain(&mut chain, pp, eps, &cfg).map_err(fail)?;
                let rep = check_relative_approx(&out.points, &pts, pp, eps, RangeFamily::Halfplanes);
                let small = out.points.len() as f64 <= 4.0 * out.target;
                trials += 1;
                ok += (rep.ok && small) as u64;
                rows.push(json!({
                    "kind": kind, "seed": seed, "p": pp, "eps": eps, "size": out.points.len(),
                    "target": out.target, "stages": out.stages, "redraws": out.redraws,
                    "ok": rep.ok, "violations": rep.violations, "max_dp": rep.max_dp, "note": out.note,
                }));
            }
        }
    }
    Ok(Outcome {
        passed: ok == trials,
        trials,
        successes: ok,
        threshold: trials as f64,
        summary: format!("{ok}/{trials} (distribution, seed, p, eps) cells verified with size <= 4x the formula"),
        metrics: json!({ "rows": rows }),
    })
}

fn range_counting(p: &CheckParams) -> Result<Outcome, CheckError> {
    let (n, seed, q) = (
        p.n.unwrap_or(2048),
        p.seed.unwrap_or(1),
        p.trials.unwrap_or(10_000) as usize,
    );
    let pts = points(GenKind::UniformDisk, n, seed)?;
    let cfg = CountingConfig {
        seed,
        ..CountingConfig::default()
    };
    let s = build_structure(&pts, &cfg).map_err(fail)?;
    let valid = s.validate();
    let queries = random_halfplanes(&pts, q, &mut Rng::new(seed.wrapping_add(1)));
    let mut rows = Vec::with_capacity(q);
    let (mut exact, mut comp, mut miss_ok) = (0u64, 0u64, 0u64);
    for h in &queries {
        let (c, st) = s.query_count(h);
        let o = oracle_count(&pts, h);
        exact += (c == o) as u64;
        comp += st.used_complement as u64;
        miss_ok += s.hull_miss_violations(h).is_empty() as u64;
        rows.push((o.min(n - o), st.cost(), s.fallback_cost(h)));
    }
    rows.sort();
    let deciles: Vec<(usize, usize, f64, f64)> = (0..10)
        .map(|d| {
            let ch = &rows[d * q / 10..(d + 1) * q / 10];
            let m = ch.len().max(1) as f64;
            let cost = ch.iter().map(|r| r.1).sum::<usize>() as f64 / m;
            let fb = ch.iter().map(|r| r.2).sum::<usize>() as f64 / m;
            (ch.first().map_or(0, |r| r.0), ch.last().map_or(0, |r| r.0), cost, fb)
        })
        .collect();
    let monotone = deciles.windows(2).all(|w| w[1].2 >= w[0].2);
    let cheap = deciles[..2].iter().all(|d| d.2 <= d.3);
    let comp_frac = comp as f64 / q as f64;
    let qn = q as u64;
    let passed = valid.is_ok() && exact == qn && comp_frac >= 0.10 && miss_ok == qn && monotone && cheap;
    Ok(Outcome {
        passed,
        trials: qn,
        successes: exact,
        threshold: qn as f64,
        summary: format!(
            "exact {exact}/{q}, complement {comp_frac:.3}, hull-miss {miss_ok}/{q}, cost monotone {monotone}, low deciles <= fallback {cheap}"
        ),
        metrics: json!({
            "structure": s.dump_json(), "valid": valid.err(),
            "deciles": deciles.iter().map(|d| json!({ "w_min": d.0, "w_max": d.1, "cost": d.2, "fallback_cost": d.3 })).collect::<Vec<_>>(),
        }),
    })
}

fn calculators(p: &CheckParams) -> Result<Outcome, CheckError> {
    let seed = p.seed.unwrap_or(1);
    let trials = p.trials.unwrap_or(1_000_000);
    let mut checks: Vec<(String, bool)> = Vec::new();
    let b = |e| fail(e);
    checks.push((
        "d=3 k1 exponent 3/5".into(),
        k1_exponent(3).map_err(b)? == Frac::new(3, 5),
    ));
    checks.push((
        "d=4 k1 exponent 8/11".into(),
        k1_exponent(4).map_err(b)? == Frac::new(8, 11),
    ));
    let (g, m, e) = rel_approx_exponents(3).map_err(b)?;
    checks.push((
        "(gamma, mu, eta)(3) = (11/8, 3/2, 3/2)".into(),
        (g, m, e) == (Frac::new(11, 8), Frac::new(3, 2), Frac::new(3, 2)),
    ));
    checks.push((
        "d=3 improvement exponent 3/4".into(),
        improvement_exponent(3).map_err(b)? == Frac::new(3, 4),
    ));
    let mut agrees = true;
    for pp in [0.01, 0.05, 0.1, 0.3] {
        for eps in [0.01, 0.05, 0.1, 0.2, 0.4] {
            agrees &= improvement_holds(3, pp, eps).map_err(b)? == (eps < f64::powf(pp, 0.75));
        }
    }
    checks.push(("improvement iff eps < p^(3/4)".into(), agrees));
    let mut rng = Rng::new(seed);
    let mut tails = Vec::new();
    for (n, k) in [(1024u64, 4.0), (4096, 16.0)] {
        let mu = n as f64 / k;
        let est = BinomialEstimate::draw(n, 1.0 / k, trials, &mut rng);
        let base = BoundParams {
            mu,
            n: n as f64,
            k,
            ..BoundParams::default()
        };
        for delta in [0.05, 0.1, 0.2, 0.3, 0.5] {
            let up = chernoff_tail(&BoundParams { delta, ..base }, TailKind::UpperMult).map_err(b)?;
            let lo = chernoff_tail(&BoundParams { delta, ..base }, TailKind::Lower).map_err(b)?;
            let (eu, el) = (est.upper_tail((1.0 + delta) * mu), est.lower_tail((1.0 - delta) * mu));
            tails.push(json!({ "n": n, "k": k, "delta": delta, "upper": [eu, up], "lower": [el, lo] }));
            checks.push((format!("n={n} k={k} upper tail delta={delta}"), eu <= up));
            checks.push((format!("n={n} k={k} lower tail delta={delta}"), el <= lo));
        }
        for f in [1.05, 1.2, 1.5] {
            let t = f * mu;
            let up = chernoff_tail(&BoundParams { t, ..base }, TailKind::UpperT).map_err(b)?;
            let eu = est.upper_tail(t);
            tails.push(json!({ "n": n, "k": k, "t": t, "upper": [eu, up] }));
            checks.push((format!("n={n} k={k} upper tail t={t}"), eu <= up));
        }
        for beta in [1.1, 1.5, 2.0, 3.0] {
            let bound = tail_sum_bound(n as f64, k, beta).map_err(b)?;
            let emp = est.tail_sum(beta * mu);
            tails.push(json!({ "n": n, "k": k, "beta": beta, "tail_sum": [emp, bound] }));
            checks.push((format!("n={n} k={k} tail sum beta={beta}"), emp <= bound));
        }
    }
    let ok = checks.iter().filter(|c| c.1).count() as u64;
    let failed: Vec<&String> = checks.iter().filter(|c| !c.1).map(|c| &c.0).collect();
    Ok(Outcome {
        passed: ok == checks.len() as u64,
        trials: checks.len() as u64,
        successes: ok,
        threshold: checks.len() as f64,
        summary: format!(
            "{ok}/{} instantiations and tail dominations hold (Monte-Carlo {trials} draws)",
            checks.len()
        ),
        metrics: json!({ "failed": failed, "tails": tails }),
    })
}
