use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use lowcross::approx::{build_relative_approx, ApproxConfig};
use lowcross::bounds::inverse_ackermann;
use lowcross::checks::{run_check, CheckParams, CHECKS};
use lowcross::counting::{build_structure, oracle_count, random_halfplanes, CountingConfig};
use lowcross::geometry::{Point, Point3};
use lowcross::io::{parse_queries, queries_to_text, PointFile};
use lowcross::partition::{build_partition, max_crossing, CrossingFamily, PartitionConfig, PartitionMode};
use lowcross::rng::Rng;
use lowcross::shallow::{generate, GenKind, GenParams, GEN_RADIUS};
use lowcross::tree::{
    build_baseline_tree, build_relative_tree, build_shallow_tree, max_pair_line_crossing, relative_profile,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "lowcross",
    version,
    about = "Low-crossing partitions, relative approximations and range counting"
)]
struct Cli {
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// JSON file with `partition`, `counting` and `approx` sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Data {
    /// Point file to read instead of generating.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generator: uniform, convex, grid or sheffer.
    #[arg(long, default_value = "uniform")]
    kind: String,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    d: u32,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a point file.
    Gen {
        #[command(flatten)]
        data: Data,
        /// Cluster size (sheffer).
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Side rays per flank (sheffer).
        #[arg(long, default_value_t = 1)]
        c: u32,
        #[arg(long, default_value = "points.txt")]
        file: String,
    },
    /// Build and audit a simplicial partition.
    Partition {
        #[command(flatten)]
        data: Data,
        #[arg(long, default_value_t = 16)]
        k: usize,
        /// shallow, standard or matching.
        #[arg(long, default_value = "shallow")]
        mode: String,
        /// Point-pair lines in the crossing audit.
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Build a spanning tree and report its crossing profile.
    Tree {
        #[command(flatten)]
        data: Data,
        /// baseline, shallow or relative.
        #[arg(long, default_value = "relative")]
        variant: String,
        #[arg(long, default_value_t = 8)]
        k: usize,
    },
    /// Build a relative (p, eps)-approximation.
    Approx {
        #[command(flatten)]
        data: Data,
        #[arg(long, default_value_t = 0.125)]
        p: f64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
    },
    /// Build a range-counting structure and answer a query batch.
    Count {
        #[command(flatten)]
        data: Data,
        /// Query file, one `a b c` per line for `a x + b y <= c`.
        #[arg(long)]
        queries: Option<PathBuf>,
        /// Random queries when no file is given.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Run named acceptance checks (`all` runs every check).
    Verify {
        #[arg(long, default_value = "all")]
        check: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Sweep an experiment spec and write CSV tables.
    Bench {
        /// ExperimentSpec JSON; a small default sweep otherwise.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Random queries per counting cell.
        #[arg(long, default_value_t = 2000)]
        trials: usize,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
struct ExperimentSpec {
    name: String,
    kind: GenKind,
    mode: PartitionMode,
    sizes: Vec<(usize, usize)>,
    seeds: Vec<u64>,
    checks: Vec<String>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            name: "default".into(),
            kind: GenKind::ConvexPosition,
            mode: PartitionMode::Shallow,
            sizes: vec![(512, 8), (1024, 16)],
            seeds: vec![1],
            checks: Vec::new(),
        }
    }
}

impl ExperimentSpec {
    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            bail!("spec `{}`: sizes is empty", self.name);
        }
        if self.seeds.is_empty() {
            bail!("spec `{}`: seeds is empty", self.name);
        }
        if let Some(c) = self.checks.iter().find(|c| !CHECKS.contains(&c.as_str())) {
            bail!("spec `{}`: unknown check `{c}`", self.name);
        }
        Ok(())
    }
}

#[derive(Default)]
struct Configs {
    partition: PartitionConfig,
    counting: CountingConfig,
    approx: ApproxConfig,
}

fn load_configs(path: Option<&Path>) -> Result<Configs> {
    let mut c = Configs::default();
    let Some(path) = path else { return Ok(c) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(p) = v.get("partition") {
        c.partition = serde_json::from_value(p.clone()).context("partition section")?;
    }
    if let Some(p) = v.get("counting") {
        c.counting = serde_json::from_value(p.clone()).context("counting section")?;
    }
    if let Some(p) = v.get("approx") {
        c.approx = serde_json::from_value(p.clone()).context("approx section")?;
    }
    Ok(c)
}

/// Errors that end the run, with their exit code and failure kind.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    report: Option<Value>,
}

fn input_error(e: anyhow::Error) -> Failure {
    Failure {
        code: 3,
        kind: "input",
        message: format!("{e:#}"),
        report: None,
    }
}

fn points_2d(data: &Data) -> Result<Vec<Point>> {
    if data.d != 2 {
        bail!("d = {} is not supported by this command", data.d);
    }
    match &data.input {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(PointFile::parse(&text)?.points()?)
        }
        None => {
            let kind: GenKind = data.kind.parse().map_err(|e: String| anyhow!(e))?;
            Ok(generate(kind, &GenParams::n(data.n), &mut Rng::new(data.seed))?)
        }
    }
}

fn write(out: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).unwrap() + "\n"
}

fn parse_mode(s: &str) -> Result<PartitionMode> {
    serde_json::from_value(json!(s)).map_err(|_| anyhow!("unknown partition mode `{s}`"))
}

fn gen(out: &Path, data: &Data, k: u32, c: u32, file: &str) -> Result<Value> {
    let pf = if data.d == 3 {
        if data.input.is_some() || !matches!(data.kind.as_str(), "uniform" | "cube") {
            bail!("d = 3 supports only `--kind uniform`");
        }
        let mut rng = Rng::new(data.seed);
        let r = GEN_RADIUS;
        let pts: Vec<Point3> = (0..data.n)
            .map(|_| Point3::new(rng.range_i64(-r, r), rng.range_i64(-r, r), rng.range_i64(-r, r)))
            .collect();
        PointFile::from_points3(&pts, 0)
    } else if data.d == 2 {
        let kind: GenKind = data.kind.parse().map_err(|e: String| anyhow!(e))?;
        let pts = generate(kind, &GenParams { n: data.n, k, c }, &mut Rng::new(data.seed))?;
        PointFile::from_points(&pts, 0)
    } else {
        bail!("d must be 2 or 3");
    };
    let path = write(out, file, &pf.to_text())?;
    Ok(
        json!({ "schema": 1, "status": "ok", "file": path, "d": pf.d, "points": pf.rows.len(), "kind": data.kind, "seed": data.seed }),
    )
}

fn partition(out: &Path, cfg: &Configs, data: &Data, k: usize, mode: &str, cap: usize) -> Result<(Value, bool)> {
    let pts = points_2d(data)?;
    let mode = parse_mode(mode)?;
    let pcfg = PartitionConfig {
        seed: data.seed,
        ..cfg.partition.clone()
    };
    let part = build_partition(&pts, k, mode, &pcfg)?;
    let valid = part.validate(&pts);
    let replay = part.replay_exponents() == part.exponents;
    let (mc, _) = max_crossing(&part, &pts, CrossingFamily::PointPairs { cap, seed: data.seed });
    let path = write(out, "partition.json", &pretty(&part.dump_json()))?;
    let x = (pts.len() / k.max(1)).max(1) as u64;
    let norm = mc as f64 / (inverse_ackermann(x) as f64 * (x as f64).log2().max(1.0).powi(2));
    let ok = valid.is_ok() && replay;
    Ok((
        json!({
            "schema": 1, "status": if ok { "ok" } else { "failed" }, "file": path, "n": pts.len(), "k": k,
            "mode": mode, "seed": data.seed, "classes": part.classes.len(), "max_crossing": mc,
            "normalized_crossing": norm, "valid": valid.err(), "replay_exact": replay,
        }),
        ok,
    ))
}

fn tree(out: &Path, cfg: &Configs, data: &Data, variant: &str, k: usize) -> Result<(Value, bool)> {
    let pts = points_2d(data)?;
    let mut rng = Rng::new(data.seed);
    let pcfg = PartitionConfig {
        seed: data.seed,
        ..cfg.partition.clone()
    };
    let t = match variant {
        "baseline" => build_baseline_tree(&pts, &mut rng),
        "shallow" => build_shallow_tree(&pts, k, &pcfg, &mut rng)?,
        "relative" => build_relative_tree(&pts, &pcfg, &mut rng)?,
        _ => bail!("unknown tree variant `{variant}`"),
    };
    let valid = t.validate();
    let path = write(out, "tree.json", &pretty(&t.dump_json()))?;
    let mut report = json!({
        "schema": 1, "file": path, "variant": variant, "n": pts.len(), "seed": data.seed,
        "edges": t.edges.len(), "max_crossing": max_pair_line_crossing(&t.vertices, &t.edges), "valid": valid.clone().err(),
    });
    let mut ok = valid.is_ok();
    if variant == "relative" {
        let prof = relative_profile(&t);
        ok &= prof.separation_violations == 0;
        report["profile"] = serde_json::to_value(&prof)?;
    }
    report["status"] = json!(if ok { "ok" } else { "failed" });
    Ok((report, ok))
}

fn approx(out: &Path, cfg: &Configs, data: &Data, p: f64, eps: f64) -> Result<(Value, bool)> {
    let pts = points_2d(data)?;
    let acfg = ApproxConfig {
        seed: data.seed,
        ..cfg.approx.clone()
    };
    let a = build_relative_approx(&pts, p, eps, &acfg)?;
    let path = write(out, "approx.txt", &PointFile::from_points(&a.points, 0).to_text())?;
    let ok = a.verification.as_ref().is_none_or(|v| v.ok);
    Ok((
        json!({
            "schema": 1, "status": if ok { "ok" } else { "failed" }, "file": path, "n": pts.len(), "seed": data.seed,
            "p": p, "eps": eps, "size": a.points.len(), "target": a.target, "stages": a.stages, "redraws": a.redraws,
            "verification": a.verification, "note": a.note, "warning": a.warning,
        }),
        ok,
    ))
}

fn count(out: &Path, cfg: &Configs, data: &Data, queries: Option<&Path>, trials: usize) -> Result<(Value, bool)> {
    let pts = points_2d(data)?;
    let qs = match queries {
        Some(q) => {
            let text = std::fs::read_to_string(q).with_context(|| format!("reading {}", q.display()))?;
            parse_queries(&text)?
        }
        None => random_halfplanes(&pts, trials, &mut Rng::new(data.seed.wrapping_add(1))),
    };
    let ccfg = CountingConfig {
        seed: data.seed,
        ..cfg.counting.clone()
    };
    let s = build_structure(&pts, &ccfg)?;
    let valid = s.validate();
    std::fs::create_dir_all(out)?;
    let csv_path = out.join("count.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record([
        "query_id",
        "count",
        "w",
        "layers_scanned",
        "classes_crossed",
        "tree_nodes_visited",
        "used_complement",
        "oracle",
        "agrees",
    ])?;
    let mut agree = 0;
    for (i, h) in qs.iter().enumerate() {
        let (c, st) = s.query_count(h);
        let o = oracle_count(&pts, h);
        agree += (c == o) as usize;
        w.write_record([
            i.to_string(),
            c.to_string(),
            o.min(pts.len() - o).to_string(),
            st.layers_scanned.to_string(),
            st.classes_crossed.to_string(),
            st.tree_nodes_visited.to_string(),
            st.used_complement.to_string(),
            o.to_string(),
            (c == o).to_string(),
        ])?;
    }
    w.flush()?;
    let spath = write(out, "structure.json", &pretty(&s.dump_json()))?;
    write(out, "queries.txt", &queries_to_text(&qs))?;
    let ok = valid.is_ok() && agree == qs.len();
    Ok((
        json!({
            "schema": 1, "status": if ok { "ok" } else { "failed" }, "results": csv_path, "structure": spath,
            "n": pts.len(), "seed": data.seed, "queries": qs.len(), "agreement": agree as f64 / qs.len().max(1) as f64,
            "layers": s.layers.len(), "k1": s.k1, "valid": valid.err(),
        }),
        ok,
    ))
}

/// Report as JSON without the wall-clock field, so reruns are byte-identical.
fn stable(r: &lowcross::checks::CheckReport) -> Value {
    let mut v = serde_json::to_value(r).unwrap();
    v.as_object_mut().unwrap().remove("seconds");
    v
}

fn verify(out: &Path, check: &str, params: &CheckParams) -> Result<(Value, bool)> {
    let names: Vec<&str> = if check == "all" { CHECKS.to_vec() } else { vec![check] };
    let mut reports = Vec::new();
    let mut ok = true;
    for name in names {
        let r = run_check(name, params)?;
        eprintln!(
            "{} {name}: {} [{:.1}s]",
            if r.passed { "PASS" } else { "FAIL" },
            r.summary,
            r.seconds
        );
        ok &= r.passed;
        reports.push(stable(&r));
    }
    let v = json!({ "schema": 1, "status": if ok { "ok" } else { "failed" }, "reports": reports });
    write(out, &format!("verify_{check}.json"), &pretty(&v))?;
    Ok((v, ok))
}

fn bench(out: &Path, cfg: &Configs, spec: Option<&Path>, trials: usize) -> Result<(Value, bool)> {
    let spec: ExperimentSpec = match spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => ExperimentSpec::default(),
    };
    spec.validate()?;
    std::fs::create_dir_all(out)?;
    let mut cells: Vec<(u64, usize, usize)> = spec
        .seeds
        .iter()
        .flat_map(|&s| spec.sizes.iter().map(move |&(n, k)| (s, n, k)))
        .collect();
    cells.sort();

    let cross_path = out.join("crossing.csv");
    let mut cw = csv::Writer::from_path(&cross_path)?;
    cw.write_record([
        "experiment",
        "kind",
        "mode",
        "seed",
        "n",
        "k",
        "n_over_k",
        "B",
        "c4",
        "test_set_t_max",
        "classes",
        "max_crossing",
        "normalized",
    ])?;
    let cost_path = out.join("cost.csv");
    let mut qw = csv::Writer::from_path(&cost_path)?;
    qw.write_record([
        "experiment",
        "seed",
        "n",
        "queries",
        "k1_floor",
        "tree_fanout",
        "decile",
        "w_min",
        "w_max",
        "mean_cost",
        "fallback_cost",
    ])?;
    let kind_s = serde_json::to_value(spec.kind)?.as_str().unwrap().to_string();
    let mode_s = serde_json::to_value(spec.mode)?.as_str().unwrap().to_string();
    for &(seed, n, k) in &cells {
        let pts = generate(spec.kind, &GenParams::n(n), &mut Rng::new(seed))?;
        let pcfg = PartitionConfig {
            seed,
            ..cfg.partition.clone()
        };
        let part = build_partition(&pts, k, spec.mode, &pcfg)?;
        let (mc, _) = max_crossing(&part, &pts, CrossingFamily::PointPairs { cap: 10_000, seed });
        let x = (n / k).max(2) as u64;
        let norm = mc as f64 / (inverse_ackermann(x) as f64 * (x as f64).log2().powi(2));
        cw.write_record([
            spec.name.clone(),
            kind_s.clone(),
            mode_s.clone(),
            seed.to_string(),
            n.to_string(),
            k.to_string(),
            (n / k).to_string(),
            pcfg.b.to_string(),
            pcfg.c4.to_string(),
            pcfg.test_set_t_max.to_string(),
            part.classes.len().to_string(),
            mc.to_string(),
            format!("{norm:.6}"),
        ])?;
    }
    let mut count_cells: Vec<(u64, usize)> = cells.iter().map(|&(s, n, _)| (s, n)).collect();
    count_cells.dedup();
    for (seed, n) in count_cells {
        let pts = generate(GenKind::UniformDisk, &GenParams::n(n), &mut Rng::new(seed))?;
        let ccfg = CountingConfig {
            seed,
            ..cfg.counting.clone()
        };
        let s = build_structure(&pts, &ccfg)?;
        let mut rows: Vec<(usize, usize, usize)> = random_halfplanes(&pts, trials, &mut Rng::new(seed.wrapping_add(1)))
            .iter()
            .map(|h| {
                let o = oracle_count(&pts, h);
                (o.min(n - o), s.query_count(h).1.cost(), s.fallback_cost(h))
            })
            .collect();
        rows.sort();
        for d in 0..10 {
            let ch = &rows[d * rows.len() / 10..(d + 1) * rows.len() / 10];
            let m = ch.len().max(1) as f64;
            qw.write_record([
                spec.name.clone(),
                seed.to_string(),
                n.to_string(),
                rows.len().to_string(),
                ccfg.k1_floor.to_string(),
                ccfg.tree_fanout.to_string(),
                d.to_string(),
                ch.first().map_or(0, |r| r.0).to_string(),
                ch.last().map_or(0, |r| r.0).to_string(),
                format!("{:.3}", ch.iter().map(|r| r.1).sum::<usize>() as f64 / m),
                format!("{:.3}", ch.iter().map(|r| r.2).sum::<usize>() as f64 / m),
            ])?;
        }
    }
    cw.flush()?;
    qw.flush()?;
    let mut ok = true;
    let mut reports = Vec::new();
    for c in &spec.checks {
        for &seed in &spec.seeds {
            let r = run_check(
                c,
                &CheckParams {
                    seed: Some(seed),
                    ..CheckParams::default()
                },
            )?;
            ok &= r.passed;
            reports.push(stable(&r));
        }
    }
    if !reports.is_empty() {
        write(out, "checks.json", &pretty(&json!({ "schema": 1, "reports": reports })))?;
    }
    Ok((
        json!({
            "schema": 1, "status": if ok { "ok" } else { "failed" }, "experiment": spec.name,
            "tables": [cross_path, cost_path], "cells": cells.len(), "checks": reports.len(),
        }),
        ok,
    ))
}

fn run(cli: Cli) -> Result<Value, Failure> {
    let cfg = load_configs(cli.config.as_deref()).map_err(input_error)?;
    let out = cli.out.as_path();
    let res = match &cli.cmd {
        Cmd::Gen { data, k, c, file } => gen(out, data, *k, *c, file).map(|v| (v, true)),
        Cmd::Partition { data, k, mode, trials } => partition(out, &cfg, data, *k, mode, *trials),
        Cmd::Tree { data, variant, k } => tree(out, &cfg, data, variant, *k),
        Cmd::Approx { data, p, eps } => approx(out, &cfg, data, *p, *eps),
        Cmd::Count { data, queries, trials } => count(out, &cfg, data, queries.as_deref(), *trials),
        Cmd::Verify {
            check,
            n,
            k,
            seed,
            trials,
        } => verify(
            out,
            check,
            &CheckParams {
                n: *n,
                k: *k,
                seed: *seed,
                trials: *trials,
            },
        ),
        Cmd::Bench { spec, trials } => bench(out, &cfg, spec.as_deref(), *trials),
    };
    match res {
        Ok((v, true)) => Ok(v),
        Ok((v, false)) => Err(Failure {
            code: 1,
            kind: "check",
            message: "a requested check failed".into(),
            report: Some(v),
        }),
        Err(e) => Err(input_error(e)),
    }
}

fn failure_json(f: &Failure) -> String {
    serde_json::to_string(&json!({
        "schema": 1, "status": "error", "kind": f.kind, "message": f.message, "report": f.report,
    }))
    .unwrap()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure {
                code: 2,
                kind: "usage",
                message: e.to_string().trim().to_string(),
                report: None,
            };
            println!("{}", failure_json(&f));
            return ExitCode::from(f.code);
        }
    };
    match run(cli) {
        Ok(v) => {
            println!("{}", serde_json::to_string(&v).unwrap());
            ExitCode::SUCCESS
        }
        Err(f) => {
            println!("{}", failure_json(&f));
            ExitCode::from(f.code)
        }
    }
}
