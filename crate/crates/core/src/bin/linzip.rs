use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use linzip::pipeline::bench::Corpus;
use linzip::pipeline::io::to_json;
use linzip::pipeline::{bench, generate_synthetic, parse_instance, BenchGrid, InputFormat, Mode, PipelineConfig};
use linzip::render::RenderGeometry;
use linzip::{Bound, Style};

#[derive(Parser)]
#[command(name = "linzip", version, about = "Compact linear set diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lay out and render one instance.
    Render(RenderArgs),
    /// Compare exact and heuristic pipelines over a corpus.
    Bench(BenchArgs),
    /// Write a synthetic instance as JSON.
    Gen(GenArgs),
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<InputFormat>,
    /// TOML file with defaults for any option below plus `palette` and a
    /// `[geometry]` table.
    #[arg(long)]
    config: Option<PathBuf>,
    /// g0, g1, g2 or g3.
    #[arg(long)]
    variant: Option<Style>,
    /// Maximum sets per row, or `inf`.
    #[arg(long)]
    bound: Option<Bound>,
    #[arg(long)]
    mode: Option<Mode>,
    /// Per-stage limit for exact solvers, in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// Geometry sidecar for the SVG, as JSON.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Label element groups by their size.
    #[arg(long)]
    show_cardinality: bool,
    /// Record stage wall times in the metrics.
    #[arg(long)]
    timings: bool,
    /// Solve B = 2 by coloring instead of matching.
    #[arg(long)]
    no_matching: bool,
    #[arg(long)]
    column_width: Option<f64>,
    #[arg(long)]
    row_height: Option<f64>,
    #[arg(long)]
    canvas_width: Option<f64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory of .json/.csv instances. Without it a synthetic corpus is
    /// generated.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 20)]
    sets: usize,
    #[arg(long, default_value_t = 40)]
    elements: usize,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    /// `default` or a list such as `g1:inf,g3:3`.
    #[arg(long, default_value = "default")]
    grid: BenchGrid,
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the per-cell summary as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
    /// Record stage wall times in the report.
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    sets: usize,
    #[arg(long)]
    elements: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    variant: Option<Style>,
    bound: Option<Bound>,
    mode: Option<Mode>,
    timeout: Option<f64>,
    seed: Option<u64>,
    show_cardinality: Option<bool>,
    palette: Option<Vec<String>>,
    geometry: Option<RenderGeometry>,
}

fn timeout(secs: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(secs).with_context(|| format!("invalid timeout {secs}"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn render_cmd(args: RenderArgs) -> Result<()> {
    let file: FileConfig = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid config {}", p.display()))?
        }
        None => FileConfig::default(),
    };
    let mut cfg = PipelineConfig::default();
    cfg.style = args.variant.or(file.variant).unwrap_or(cfg.style);
    cfg.bound = args.bound.or(file.bound).unwrap_or(cfg.bound);
    cfg.mode = args.mode.or(file.mode).unwrap_or(cfg.mode);
    if let Some(t) = args.timeout.or(file.timeout) {
        cfg.timeout = timeout(t)?;
    }
    cfg.seed = args.seed.or(file.seed).unwrap_or(0);
    cfg.record_timings = args.timings;
    cfg.force_coloring_for_pairs = args.no_matching;
    cfg.render.show_cardinality = args.show_cardinality || file.show_cardinality.unwrap_or(false);
    if let Some(p) = file.palette {
        cfg.render.palette = p;
    }
    if let Some(g) = file.geometry {
        cfg.render.geometry = g;
    }
    let geo = &mut cfg.render.geometry;
    geo.column_width = args.column_width.unwrap_or(geo.column_width);
    geo.row_height = args.row_height.unwrap_or(geo.row_height);
    geo.canvas_width = args.canvas_width.or(geo.canvas_width);

    let sys = parse_instance(&args.input, args.format)?;
    let out = linzip::run(&cfg, &sys)?;
    write_file(&args.out, &out.document.svg)?;
    if let Some(p) = &args.metrics {
        write_file(p, &out.metrics.to_json())?;
    }
    if let Some(p) = &args.meta {
        write_file(p, &out.document.metadata_json())?;
    }
    log::info!(
        "{} sets in {} rows, {} blocks",
        out.metrics.set_count,
        out.metrics.row_count,
        out.metrics.total_blocks
    );
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Result<()> {
    if let Some(j) = args.jobs {
        if j == 0 {
            bail!("--jobs must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global()?;
    }
    let corpus = match &args.corpus {
        Some(dir) => Corpus::load_dir(dir).with_context(|| format!("cannot read corpus {}", dir.display()))?,
        None => Corpus::synthetic(args.instances, args.sets, args.elements, args.density, args.seed)?,
    };
    if corpus.instances.is_empty() {
        bail!("corpus has no readable instances");
    }
    let report = bench(&corpus, &args.grid, timeout(args.timeout)?, args.seed, args.timings);
    let file = fs::File::create(&args.out).with_context(|| format!("cannot write {}", args.out.display()))?;
    report.write_csv(std::io::BufWriter::new(file))?;
    if let Some(p) = &args.summary {
        let json = serde_json::json!({
            "blocks_eh": report.blocks_quantiles(),
            "cells": report.summary(),
            "failures": report.failures,
        });
        write_file(p, &(serde_json::to_string_pretty(&json)? + "\n"))?;
    }
    std::io::stdout().write_all(report.summary_table().as_bytes())?;
    Ok(())
}

fn gen_cmd(args: GenArgs) -> Result<()> {
    let sys = generate_synthetic(args.sets, args.elements, args.density, args.seed)?;
    write_file(&args.out, &to_json(&sys))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Render(a) => render_cmd(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Gen(a) => gen_cmd(a),
    }
}
