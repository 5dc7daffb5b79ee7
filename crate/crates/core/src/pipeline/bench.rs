//! Exact versus heuristic comparison over a corpus.
//!
//! For every instance and mode the column order is computed once and shared
//! by all grid cells. Each (instance, variant, bound) cell then yields an
//! exact and a heuristic run, and the EH-ratio of a metric is its exact
//! value divided by its heuristic value. The blocks ratio can only exceed 1
//! when the exact run fell back to the heuristic (`exact_complete = false`).
//! For rows the same holds under g1; under g2 and g3 the conflicts depend on
//! the column order, so the two modes color different graphs.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{compress_and_lay_out, generate_synthetic, order_columns, parse_instance, InputFormat, Metrics, Mode, PipelineConfig};
use crate::setmodel::SetSystem;
use crate::{Bound, SolveStatus, Style};

/// The (variant, bound) cells to evaluate; both modes always run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchGrid {
    pub cells: Vec<(Style, Bound)>,
}

impl Default for BenchGrid {
    fn default() -> Self {
        let cells = Style::COMPRESSED
            .into_iter()
            .flat_map(|s| [(s, Bound::Unbounded), (s, Bound::AtMost(3))])
            .collect();
        BenchGrid { cells }
    }
}

impl FromStr for BenchGrid {
    type Err = String;

    /// `default`, or a comma-separated list of `variant:bound` such as
    /// `g1:inf,g3:3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("default") {
            return Ok(BenchGrid::default());
        }
        let cells = s
            .split(',')
            .map(|cell| {
                let (v, b) = cell
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| format!("grid cell `{cell}` is not variant:bound"))?;
                Ok((v.parse::<Style>()?, b.parse::<Bound>()?))
            })
            .collect::<Result<Vec<_>, String>>()?;
        if cells.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(BenchGrid { cells })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchFailure {
    pub instance: String,
    pub message: String,
}

/// Named instances plus the ones that could not be loaded.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub instances: Vec<(String, SetSystem)>,
    pub failures: Vec<BenchFailure>,
}

impl Corpus {
    /// Every `.json` and `.csv` file in `dir`, sorted by file name.
    pub fn load_dir(dir: &Path) -> std::io::Result<Corpus> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && InputFormat::from_path(p).is_some())
            .collect();
        paths.sort();
        let mut corpus = Corpus::default();
        for p in paths {
            let name = p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            match parse_instance(&p, None) {
                Ok(sys) => corpus.instances.push((name, sys)),
                Err(e) => {
                    log::warn!("skipping {name}: {e}");
                    corpus.failures.push(BenchFailure {
                        instance: name,
                        message: e.to_string(),
                    })
                }
            }
        }
        Ok(corpus)
    }

    /// `count` generated instances; instance `i` uses seed `seed + i`.
    pub fn synthetic(count: usize, n_sets: usize, n_elements: usize, density: f64, seed: u64) -> Result<Corpus, super::PipelineError> {
        let instances = (0..count as u64)
            .map(|i| {
                let sys = generate_synthetic(n_sets, n_elements, density, seed.wrapping_add(i))?;
                Ok((format!("synthetic-{:04}", i + 1), sys))
            })
            .collect::<Result<_, super::PipelineError>>()?;
        Ok(Corpus {
            instances,
            failures: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhPair {
    pub instance: String,
    pub style: Style,
    pub bound: Bound,
    pub exact: Metrics,
    pub heuristic: Metrics,
    pub eh_blocks: f64,
    pub eh_rows: f64,
    /// Both exact stages were solved to optimality.
    pub exact_complete: bool,
}

/// One CSV line: the metrics of a single run plus the EH-ratios of its pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub variant: Style,
    pub bound: Bound,
    pub mode: Mode,
    pub set_count: usize,
    pub total_blocks: usize,
    pub row_count: usize,
    pub compression_ratio: f64,
    pub t_ord: Option<f64>,
    pub t_comp: Option<f64>,
    pub ord_status: SolveStatus,
    pub comp_status: SolveStatus,
    pub eh_blocks: f64,
    pub eh_rows: f64,
    pub exact_complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub max: f64,
}

impl Quantiles {
    /// Linear interpolation between order statistics. `None` if empty.
    pub fn of(values: &[f64]) -> Option<Quantiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
        };
        Some(Quantiles {
            min: v[0],
            p25: q(0.25),
            median: q(0.5),
            p75: q(0.75),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhSummary {
    pub style: Style,
    pub bound: Bound,
    pub instances: usize,
    pub exact_complete: usize,
    pub eh_rows: Option<Quantiles>,
    pub mean_compression_exact: f64,
    pub mean_compression_heuristic: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EhReport {
    pub pairs: Vec<EhPair>,
    pub failures: Vec<BenchFailure>,
}

impl EhReport {
    /// Two rows per pair, exact first.
    pub fn rows(&self) -> Vec<BenchRow> {
        let row = |p: &EhPair, mode: Mode, m: &Metrics| BenchRow {
            instance: p.instance.clone(),
            variant: p.style,
            bound: p.bound,
            mode,
            set_count: m.set_count,
            total_blocks: m.total_blocks,
            row_count: m.row_count,
            compression_ratio: m.compression_ratio,
            t_ord: m.t_ord,
            t_comp: m.t_comp,
            ord_status: m.ord_status,
            comp_status: m.comp_status,
            eh_blocks: p.eh_blocks,
            eh_rows: p.eh_rows,
            exact_complete: p.exact_complete,
        };
        self.pairs
            .iter()
            .flat_map(|p| [row(p, Mode::Exact, &p.exact), row(p, Mode::Heuristic, &p.heuristic)])
            .collect()
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in self.rows() {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Blocks EH-ratio per instance. The column order does not depend on the
    /// grid cell, so one value per instance is taken.
    pub fn blocks_eh(&self) -> Vec<f64> {
        let mut seen = std::collections::HashSet::new();
        self.pairs
            .iter()
            .filter(|p| seen.insert(p.instance.as_str()))
            .map(|p| p.eh_blocks)
            .collect()
    }

    pub fn blocks_quantiles(&self) -> Option<Quantiles> {
        Quantiles::of(&self.blocks_eh())
    }

    /// Per-cell aggregates in grid order.
    pub fn summary(&self) -> Vec<EhSummary> {
        let mut cells: Vec<(Style, Bound)> = Vec::new();
        for p in &self.pairs {
            if !cells.contains(&(p.style, p.bound)) {
                cells.push((p.style, p.bound));
            }
        }
        cells
            .into_iter()
            .map(|(style, bound)| {
                let ps: Vec<&EhPair> = self.pairs.iter().filter(|p| p.style == style && p.bound == bound).collect();
                let mean = |f: fn(&EhPair) -> f64| ps.iter().map(|p| f(p)).sum::<f64>() / ps.len() as f64;
                EhSummary {
                    style,
                    bound,
                    instances: ps.len(),
                    exact_complete: ps.iter().filter(|p| p.exact_complete).count(),
                    eh_rows: Quantiles::of(&ps.iter().map(|p| p.eh_rows).collect::<Vec<_>>()),
                    mean_compression_exact: mean(|p| p.exact.compression_ratio),
                    mean_compression_heuristic: mean(|p| p.heuristic.compression_ratio),
                }
            })
            .collect()
    }

    /// Plain-text table of [`EhReport::summary`] and the blocks ratio.
    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let fmt_q = |q: Option<Quantiles>| {
            q.map_or("-".to_string(), |q| {
                format!("{:.3} / {:.3} / {:.3} / {:.3} / {:.3}", q.min, q.p25, q.median, q.p75, q.max)
            })
        };
        let blocks = self.blocks_eh();
        let _ = writeln!(s, "instances: {}  failures: {}", blocks.len(), self.failures.len());
        let _ = writeln!(s, "blocks EH-ratio (min / p25 / median / p75 / max): {}", fmt_q(Quantiles::of(&blocks)));
        let inverse: Vec<f64> = blocks.iter().map(|r| 1.0 / r).collect();
        let _ = writeln!(s, "blocks heuristic/exact median: {}", Quantiles::of(&inverse).map_or("-".into(), |q| format!("{:.3}", q.median)));
        let _ = writeln!(s, "{:<8} {:>5} {:>9} {:>9} {:>9}  rows EH-ratio (min / p25 / median / p75 / max)", "variant", "bound", "complete", "cr exact", "cr heur");
        for c in self.summary() {
            let _ = writeln!(
                s,
                "{:<8} {:>5} {:>4}/{:<4} {:>9.3} {:>9.3}  {}",
                c.style.tag(),
                c.bound.to_string(),
                c.exact_complete,
                c.instances,
                c.mean_compression_exact,
                c.mean_compression_heuristic,
                fmt_q(c.eh_rows)
            );
        }
        for f in &self.failures {
            let _ = writeln!(s, "failed: {}: {}", f.instance, f.message);
        }
        s
    }
}

fn ratio(exact: usize, heuristic: usize) -> f64 {
    exact as f64 / heuristic as f64
}

/// Runs the grid over the corpus, instances in parallel. `timeout` applies
/// to each exact stage.
pub fn bench(corpus: &Corpus, grid: &BenchGrid, timeout: Duration, seed: u64, record_timings: bool) -> EhReport {
    let base = PipelineConfig {
        timeout,
        seed,
        record_timings,
        ..PipelineConfig::default()
    };
    let pairs: Vec<Vec<EhPair>> = corpus
        .instances
        .par_iter()
        .map(|(name, sys)| {
            let exact_cols = order_columns(sys, Mode::Exact, timeout, seed);
            let heur_cols = order_columns(sys, Mode::Heuristic, timeout, seed);
            grid.cells
                .iter()
                .map(|&(style, bound)| {
                    let cfg = |mode| PipelineConfig {
                        style,
                        bound,
                        mode,
                        ..base.clone()
                    };
                    let (_, exact) = compress_and_lay_out(&cfg(Mode::Exact), sys, &exact_cols);
                    let (_, heuristic) = compress_and_lay_out(&cfg(Mode::Heuristic), sys, &heur_cols);
                    EhPair {
                        instance: name.clone(),
                        style,
                        bound,
                        eh_blocks: ratio(exact.total_blocks, heuristic.total_blocks),
                        eh_rows: ratio(exact.row_count, heuristic.row_count),
                        exact_complete: exact.ord_status == SolveStatus::Optimal
                            && exact.comp_status == SolveStatus::Optimal,
                        exact,
                        heuristic,
                    }
                })
                .collect()
        })
        .collect();
    EhReport {
        pairs: pairs.into_iter().flatten().collect(),
        failures: corpus.failures.clone(),
    }
}
