//! The four stages end to end: column order, row compression, row order and
//! colors, rendering.
//!
//! In exact mode each optimizing stage gets its own timeout. When a stage
//! times out its heuristic result is used and every later stage runs its
//! heuristic too, with all of them flagged `TimeoutFallback`.
//!
//! Randomness comes from the single configured seed: each stage draws from
//! `derive_seed(seed, tag)`, an FNV-1a hash of the seed's little-endian
//! bytes followed by the stage tag (`"column-order"`, `"row-order"`).

pub mod bench;
pub mod generate;
pub mod io;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colorder::{build_tsp_instance, solve_tour_exact, solve_tour_heuristic};
use crate::compress::{
    build_conflict_graph, dsatur, exact_min_rows, greedy_clique, match_pairs_b2, RowAssignment,
};
use crate::layout::DiagramLayout;
use crate::render::{render, RenderError, RenderOptions, SvgDocument};
use crate::setmodel::{build_membership_matrix, count_blocks, ColumnOrder, SetSystem};
use crate::{Bound, SolveStatus, Style};

pub use bench::{bench, BenchGrid, BenchRow, EhReport, EhSummary};
pub use generate::generate_synthetic;
pub use io::{parse_instance, InputFormat, ParseError};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Heuristic,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Heuristic => "heuristic",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Mode::Exact),
            "heuristic" => Ok(Mode::Heuristic),
            other => Err(format!("unknown mode `{other}` (expected exact or heuristic)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub style: Style,
    /// Ignored for `Style::Linear`.
    pub bound: Bound,
    pub mode: Mode,
    /// Per-stage limit for the exact solvers.
    pub timeout: Duration,
    pub seed: u64,
    pub render: RenderOptions,
    /// Use bounded DSATUR/branch-and-bound for `B = 2` instead of matching.
    pub force_coloring_for_pairs: bool,
    /// Fill `t_ord`/`t_comp`; off by default so metrics are reproducible.
    pub record_timings: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            style: Style::Disjoint,
            bound: Bound::Unbounded,
            mode: Mode::Exact,
            timeout: DEFAULT_TIMEOUT,
            seed: 0,
            render: RenderOptions::default(),
            force_coloring_for_pairs: false,
            record_timings: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if let Bound::AtMost(b) = self.bound {
            if b < 2 {
                return Err(PipelineError::Config("bound must be at least 2".into()));
            }
        }
        self.render.geometry.validate()?;
        if self.render.palette.is_empty() {
            return Err(RenderError::EmptyPalette.into());
        }
        Ok(())
    }

    fn effective_bound(&self) -> Bound {
        if self.style == Style::Linear {
            Bound::Unbounded
        } else {
            self.bound
        }
    }
}

/// Quality and bookkeeping for one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub total_blocks: usize,
    pub row_count: usize,
    pub set_count: usize,
    /// `row_count / set_count`.
    pub compression_ratio: f64,
    /// Column ordering wall time in seconds, when recorded.
    pub t_ord: Option<f64>,
    /// Compression wall time in seconds, when recorded.
    pub t_comp: Option<f64>,
    pub ord_status: SolveStatus,
    pub comp_status: SolveStatus,
    pub colors_repeat_in_row: bool,
}

impl Metrics {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize") + "\n"
    }
}

pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    seed.to_le_bytes()
        .iter()
        .chain(tag.as_bytes())
        .fold(OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(PRIME))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnStage {
    pub order: ColumnOrder,
    pub status: SolveStatus,
    pub total_blocks: usize,
    pub elapsed: Duration,
}

/// Stage I.
pub fn order_columns(sys: &SetSystem, mode: Mode, timeout: Duration, seed: u64) -> ColumnStage {
    let started = Instant::now();
    let mat = build_membership_matrix(sys);
    let inst = build_tsp_instance(&mat);
    let stage_seed = derive_seed(seed, "column-order");
    let tour = match mode {
        Mode::Exact => solve_tour_exact(&inst, timeout, stage_seed),
        Mode::Heuristic => solve_tour_heuristic(&inst, stage_seed),
    };
    let total_blocks = count_blocks(&mat, &tour.order).1;
    ColumnStage {
        order: tour.order,
        status: tour.status,
        total_blocks,
        elapsed: started.elapsed(),
    }
}

/// Stage II. With `fell_back` set an earlier stage has timed out: the
/// heuristic is used whatever `mode` says, and the result is flagged
/// `TimeoutFallback` even where the method is exact anyway (plain linear
/// rows, pair matching).
#[allow(clippy::too_many_arguments)]
pub fn compress_rows(
    sys: &SetSystem,
    order: &ColumnOrder,
    style: Style,
    bound: Bound,
    mode: Mode,
    timeout: Duration,
    fell_back: bool,
    force_coloring_for_pairs: bool,
) -> (RowAssignment, Duration) {
    let started = Instant::now();
    let flag = |a: RowAssignment| {
        if fell_back {
            a.with_status(SolveStatus::TimeoutFallback)
        } else {
            a
        }
    };
    if style == Style::Linear {
        return (flag(RowAssignment::identity(sys.set_count())), started.elapsed());
    }
    let (g, tsets) = build_conflict_graph(sys, style, order);
    if bound == Bound::AtMost(2) && !force_coloring_for_pairs {
        return (flag(match_pairs_b2(&g)), started.elapsed());
    }
    let heuristic = dsatur(&g, bound, tsets.as_ref());
    let assignment = match (mode, fell_back) {
        (Mode::Heuristic, _) => heuristic,
        (Mode::Exact, true) => flag(heuristic),
        (Mode::Exact, false) => {
            let clique = greedy_clique(&g);
            exact_min_rows(&g, bound, tsets.as_ref(), &clique, &heuristic, timeout)
        }
    };
    (assignment, started.elapsed())
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub layout: DiagramLayout,
    pub document: SvgDocument,
    pub metrics: Metrics,
}

/// Runs all four stages and computes metrics.
pub fn run(config: &PipelineConfig, sys: &SetSystem) -> Result<RunOutput, PipelineError> {
    config.validate()?;
    let (layout, metrics) = plan(config, sys);
    let document = render(&layout, sys, &config.render)?;
    Ok(RunOutput {
        layout,
        document,
        metrics,
    })
}

/// Stages I to III and metrics, without rendering.
pub fn plan(config: &PipelineConfig, sys: &SetSystem) -> (DiagramLayout, Metrics) {
    let columns = order_columns(sys, config.mode, config.timeout, config.seed);
    compress_and_lay_out(config, sys, &columns)
}

pub(crate) fn compress_and_lay_out(
    config: &PipelineConfig,
    sys: &SetSystem,
    columns: &ColumnStage,
) -> (DiagramLayout, Metrics) {
    let fell_back = columns.status == SolveStatus::TimeoutFallback;
    let bound = config.effective_bound();
    let (assignment, t_comp) = compress_rows(
        sys,
        &columns.order,
        config.style,
        bound,
        config.mode,
        config.timeout,
        fell_back,
        config.force_coloring_for_pairs,
    );
    let layout = DiagramLayout::build(
        sys,
        columns.order.clone(),
        assignment,
        config.style,
        derive_seed(config.seed, "row-order"),
        config.render.palette.len(),
    );
    let row_count = layout.row_count();
    let set_count = sys.set_count();
    let metrics = Metrics {
        total_blocks: columns.total_blocks,
        row_count,
        set_count,
        compression_ratio: row_count as f64 / set_count as f64,
        t_ord: config.record_timings.then_some(columns.elapsed.as_secs_f64()),
        t_comp: config.record_timings.then_some(t_comp.as_secs_f64()),
        ord_status: columns.status,
        comp_status: layout.assignment.status,
        colors_repeat_in_row: layout.colors_repeat_in_row,
    };
    (layout, metrics)
}
