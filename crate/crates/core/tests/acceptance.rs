//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any gating criterion fails. The heuristic
//! quality envelope is report-only and never fails the run.
//!
//! Every oracle here is written from scratch against the set system, so
//! none of the crate's own validators are trusted.

use std::collections::HashSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use linzip::compress::{build_conflict_graph, dsatur, exact_min_rows, greedy_clique, match_pairs_b2, ConflictGraph};
use linzip::pipeline::bench::Corpus;
use linzip::pipeline::io::to_json;
use linzip::pipeline::{bench, generate_synthetic, order_columns, run, BenchGrid, Mode, PipelineConfig};
use linzip::{Bound, ColumnOrder, SetSystem, SolveStatus, Style};

const LONG: Duration = Duration::from_secs(120);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn system(rows: &[Vec<bool>]) -> SetSystem {
    let cols = rows[0].len();
    let elements: Vec<String> = (0..cols).map(|j| format!("e{j}")).collect();
    let sets = rows.iter().enumerate().map(|(i, r)| {
        let members: Vec<String> = (0..cols).filter(|&j| r[j]).map(|j| format!("e{j}")).collect();
        (format!("S{i}"), members)
    });
    SetSystem::new(elements, sets).expect("valid system").0
}

/// Random 0/1 rows with no empty row.
fn random_rows(rng: &mut ChaCha8Rng, n_rows: usize, n_cols: usize, p: f64) -> Vec<Vec<bool>> {
    (0..n_rows)
        .map(|_| {
            let mut r: Vec<bool> = (0..n_cols).map(|_| rng.gen_bool(p)).collect();
            if !r.contains(&true) {
                r[rng.gen_range(0..n_cols)] = true;
            }
            r
        })
        .collect()
}

fn member_sets(sys: &SetSystem) -> Vec<HashSet<usize>> {
    sys.sets().iter().map(|s| s.members.iter().copied().collect()).collect()
}

/// Blocks of every set under `perm` (perm[position] = column).
fn blocks_under(sys: &SetSystem, perm: &[usize]) -> Vec<usize> {
    member_sets(sys)
        .iter()
        .map(|m| {
            (0..perm.len())
                .filter(|&p| m.contains(&perm[p]) && (p == 0 || !m.contains(&perm[p - 1])))
                .count()
        })
        .collect()
}

/// 1-based first and last position of each set under `perm`.
fn spans(sys: &SetSystem, perm: &[usize]) -> Vec<(usize, usize)> {
    member_sets(sys)
        .iter()
        .map(|m| {
            let pos: Vec<usize> = (0..perm.len()).filter(|&p| m.contains(&perm[p])).map(|p| p + 1).collect();
            (pos[0], pos[pos.len() - 1])
        })
        .collect()
}

fn permutations(n: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(k: usize, a: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if k == a.len() {
            f(a);
            return;
        }
        for i in k..a.len() {
            a.swap(k, i);
            rec(k + 1, a, f);
            a.swap(k, i);
        }
    }
    rec(0, &mut (0..n).collect(), f);
}

fn column_order_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0);
    let mut bad = 0;
    for _ in 0..50 {
        let cols = rng.gen_range(2..=8);
        let rows = rng.gen_range(2..=8);
        let p = rng.gen_range(0.2..0.6);
        let sys = system(&random_rows(&mut rng, rows, cols, p));
        let n = sys.element_count();
        let mut best = usize::MAX;
        permutations(n, &mut |perm| best = best.min(blocks_under(&sys, perm).iter().sum()));
        let stage = order_columns(&sys, Mode::Exact, LONG, 1);
        let independent: usize = blocks_under(&sys, stage.order.as_slice()).iter().sum();
        if stage.status != SolveStatus::Optimal || stage.total_blocks != best || independent != best {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} of 50 instances match the exhaustive minimum", 50 - bad))
}

/// Fewest rows over all partitions satisfying the style's rules, checked
/// directly on elements and spans.
fn exhaustive_rows(sys: &SetSystem, style: Style, perm: &[usize], bound: Bound) -> usize {
    let members = member_sets(sys);
    let sp = spans(sys, perm);
    let n = sys.set_count();
    let row_ok = |row: &[usize]| -> bool {
        if bound.limit().is_some_and(|b| row.len() > b) {
            return false;
        }
        for (i, &a) in row.iter().enumerate() {
            for &b in &row[i + 1..] {
                if !members[a].is_disjoint(&members[b]) {
                    return false;
                }
                let overlap = sp[a].0 <= sp[b].1 && sp[b].0 <= sp[a].1;
                if style == Style::NonAlternating && overlap {
                    return false;
                }
            }
        }
        if style == Style::PairAlternating {
            for p in 1..=perm.len() {
                if row.iter().filter(|&&s| sp[s].0 <= p && p <= sp[s].1).count() > 2 {
                    return false;
                }
            }
        }
        true
    };
    fn rec(i: usize, rows: &mut Vec<Vec<usize>>, best: &mut usize, n: usize, ok: &dyn Fn(&[usize]) -> bool) {
        if rows.len() >= *best {
            return;
        }
        if i == n {
            *best = rows.len();
            return;
        }
        for r in 0..rows.len() {
            rows[r].push(i);
            if ok(&rows[r]) {
                rec(i + 1, rows, best, n, ok);
            }
            rows[r].pop();
        }
        rows.push(vec![i]);
        rec(i + 1, rows, best, n, ok);
        rows.pop();
    }
    let mut best = n + 1;
    rec(0, &mut Vec::new(), &mut best, n, &row_ok);
    best
}

fn coloring_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1);
    let mut checked = 0;
    let mut bad = 0;
    for _ in 0..50 {
        let rows = rng.gen_range(2..=8);
        let cols = rng.gen_range(3..=12);
        let p = rng.gen_range(0.1..0.4);
        let sys = system(&random_rows(&mut rng, rows, cols, p));
        let mut perm: Vec<usize> = (0..sys.element_count()).collect();
        perm.shuffle(&mut rng);
        let ord = ColumnOrder::new(perm.clone()).unwrap();
        for style in Style::COMPRESSED {
            for bound in [Bound::Unbounded, Bound::AtMost(3)] {
                let (g, t) = build_conflict_graph(&sys, style, &ord);
                let h = dsatur(&g, bound, t.as_ref());
                let a = exact_min_rows(&g, bound, t.as_ref(), &greedy_clique(&g), &h, LONG);
                checked += 1;
                if a.status != SolveStatus::Optimal || a.row_count != exhaustive_rows(&sys, style, &perm, bound) {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{} of {checked} (instance, variant, bound) cells match exhaustive search", checked - bad))
}

fn max_pairs(adj: &[Vec<bool>], used: &mut [bool]) -> usize {
    let Some(v) = used.iter().position(|&u| !u) else {
        return 0;
    };
    used[v] = true;
    let mut best = max_pairs(adj, used);
    for w in v + 1..used.len() {
        if !used[w] && !adj[v][w] {
            used[w] = true;
            best = best.max(1 + max_pairs(adj, used));
            used[w] = false;
        }
    }
    used[v] = false;
    best
}

fn pair_matching() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc2);
    let mut bad = 0;
    for _ in 0..30 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.9);
        let mut adj = vec![vec![false; n]; n];
        let mut edges = Vec::new();
        #[allow(clippy::needless_range_loop)]
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    adj[u][v] = true;
                    adj[v][u] = true;
                    edges.push((u, v));
                }
            }
        }
        let a = match_pairs_b2(&ConflictGraph::from_edges(n, edges));
        let rows_ok = a.rows().iter().all(|r| r.len() <= 2 && (r.len() < 2 || !adj[r[0]][r[1]]));
        if !rows_ok || a.row_count != n - max_pairs(&adj, &mut vec![false; n]) {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} of 30 graphs match exhaustive pairing", 30 - bad))
}

/// 100 instances of assorted sizes, every one within the desk-scale limits
/// of at most 60 sets and 120 elements.
fn synthetic_corpus() -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0ffee);
    let instances = (0..100)
        .map(|i| {
            let sets = rng.gen_range(6..=18);
            let elements = rng.gen_range(sets..=2 * sets);
            let density = rng.gen_range(0.05..0.45);
            let sys = generate_synthetic(sets, elements, density, rng.gen()).expect("valid parameters");
            (format!("synthetic-{:03}", i + 1), sys)
        })
        .collect();
    Corpus {
        instances,
        failures: Vec::new(),
    }
}

fn variant_ordering(report: &linzip::pipeline::EhReport) -> Outcome {
    let mut compared = 0;
    let mut violations = Vec::new();
    for bound in [Bound::Unbounded, Bound::AtMost(3)] {
        let mut names: Vec<&str> = report.pairs.iter().map(|p| p.instance.as_str()).collect();
        names.dedup();
        for name in names {
            let rows = |style| {
                report
                    .pairs
                    .iter()
                    .find(|p| p.instance == name && p.style == style && p.bound == bound)
                    .filter(|p| p.exact_complete)
                    .map(|p| p.exact.row_count)
            };
            if let (Some(g1), Some(g2), Some(g3)) = (rows(Style::Disjoint), rows(Style::NonAlternating), rows(Style::PairAlternating)) {
                compared += 1;
                if !(g1 <= g3 && g3 <= g2) {
                    violations.push(format!("{name} B={bound}: {g1} {g3} {g2}"));
                }
            }
        }
    }
    outcome(
        violations.is_empty() && compared > 0,
        format!("{compared} fully optimal (instance, bound) cases, {} violations {violations:?}", violations.len()),
    )
}

fn bounded_ceiling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc5);
    let mut bad = 0;
    for k in 1..=10 {
        let mut next = 0;
        let sets: Vec<(String, Vec<String>)> = (0..3 * k)
            .map(|i| {
                let size = rng.gen_range(1..=4);
                let m = (next..next + size).map(|e| format!("e{e}")).collect();
                next += size;
                (format!("S{i}"), m)
            })
            .collect();
        let mut elements: Vec<String> = (0..next).map(|e| format!("e{e}")).collect();
        elements.shuffle(&mut rng);
        let sys = SetSystem::new(elements, sets).unwrap().0;
        let cfg = PipelineConfig {
            style: Style::Disjoint,
            bound: Bound::AtMost(3),
            timeout: LONG,
            ..PipelineConfig::default()
        };
        let m = run(&cfg, &sys).expect("pipeline runs").metrics;
        if m.compression_ratio != 1.0 / 3.0 || m.comp_status != SolveStatus::Optimal {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{} of 10 instances with 3k disjoint sets reach exactly 1/3", 10 - bad))
}

fn heuristic_envelope(report: &linzip::pipeline::EhReport) -> Outcome {
    let q = report.blocks_quantiles().expect("non-empty report");
    let complete: HashSet<&str> = report
        .pairs
        .iter()
        .filter(|p| p.exact.ord_status == SolveStatus::Optimal)
        .map(|p| p.instance.as_str())
        .collect();
    outcome(
        q.median <= 1.15,
        format!(
            "median blocks EH-ratio {:.4} (min {:.4}, max {:.4}); exact ordering finished on {} of {} instances",
            q.median,
            q.min,
            q.max,
            complete.len(),
            report.blocks_eh().len()
        ),
    )
}

fn timeout_protocol() -> Outcome {
    let mut cases = 0;
    let mut bad = Vec::new();
    for seed in 0..8u64 {
        let sys = generate_synthetic(14, 26, 0.3, seed).unwrap();
        for style in Style::ALL {
            for bound in [Bound::Unbounded, Bound::AtMost(2), Bound::AtMost(3)] {
                let cfg = |mode, timeout| PipelineConfig {
                    style,
                    bound,
                    mode,
                    timeout,
                    seed,
                    ..PipelineConfig::default()
                };
                let fast = run(&cfg(Mode::Exact, Duration::ZERO), &sys).unwrap();
                let heur = run(&cfg(Mode::Heuristic, LONG), &sys).unwrap();
                cases += 1;
                let (mut fm, mut hm) = (fast.metrics.clone(), heur.metrics.clone());
                let flags = fm.ord_status == SolveStatus::TimeoutFallback && fm.comp_status == SolveStatus::TimeoutFallback;
                fm.ord_status = hm.ord_status;
                fm.comp_status = hm.comp_status;
                hm.t_ord = fm.t_ord;
                hm.t_comp = fm.t_comp;
                let same = fast.document.svg == heur.document.svg
                    && fast.document.metadata_json() == heur.document.metadata_json()
                    && fm == hm;
                if !(same && flags) {
                    bad.push(format!("seed {seed} {style} {bound}"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{} of {cases} runs identical with fallback flags {bad:?}", cases - bad.len()))
}

/// Checks one rendered document against the set system and returns the
/// problems found.
fn validate_render(sys: &SetSystem, cfg: &PipelineConfig) -> Vec<String> {
    let out = match run(cfg, sys) {
        Ok(o) => o,
        Err(e) => return vec![format!("render failed: {e}")],
    };
    let mut problems = Vec::new();
    let meta = &out.document.meta;
    let perm = out.layout.column_order.as_slice();

    let doc = match roxmltree::Document::parse(&out.document.svg) {
        Ok(d) => d,
        Err(e) => return vec![format!("malformed XML: {e}")],
    };
    let group = |class: &str, tag: &str| {
        doc.descendants()
            .find(|n| n.attribute("class") == Some(class))
            .map_or(0, |g| g.children().filter(|c| c.has_tag_name(tag)).count())
    };
    if group("blocks", "rect") != meta.rects.len() {
        problems.push("block rectangles in SVG differ from metadata".into());
    }
    if group("links", "line") != meta.links.len() {
        problems.push("link lines in SVG differ from metadata".into());
    }

    let expected = blocks_under(sys, perm);
    for (s, &want) in expected.iter().enumerate() {
        let got = meta.rects.iter().filter(|r| r.set == s).count();
        if got != want {
            problems.push(format!("set {s}: {got} rectangles for {want} blocks"));
        }
    }
    if out.metrics.total_blocks != expected.iter().sum::<usize>() {
        problems.push("total_blocks disagrees with a recount".into());
    }

    let rows = out.layout.row_count();
    for row in 0..rows {
        let mut rects: Vec<(f64, f64)> = meta.rects.iter().filter(|r| r.row == row).map(|r| (r.x, r.x + r.width)).collect();
        rects.sort_by(|a, b| a.0.total_cmp(&b.0));
        if rects.windows(2).any(|w| w[0].1 > w[1].0 + 1e-9) {
            problems.push(format!("row {row}: overlapping rectangles"));
        }
        let links: Vec<_> = meta.links.iter().filter(|l| l.row == row).collect();
        let cap = match cfg.style {
            Style::NonAlternating => 1,
            Style::PairAlternating => 2,
            _ => 0,
        };
        for p in 1..=perm.len() {
            let covering: Vec<_> = links.iter().filter(|l| l.start <= p && p <= l.end).collect();
            if covering.len() > cap {
                problems.push(format!("row {row}, position {p}: {} links", covering.len()));
            }
            if covering.len() == 2 && covering[0].y == covering[1].y {
                problems.push(format!("row {row}, position {p}: two links on one lane"));
            }
        }
    }
    // Sets with several blocks must be linked in the styles that draw links.
    if matches!(cfg.style, Style::NonAlternating | Style::PairAlternating) {
        let linked = expected.iter().filter(|&&b| b > 1).count();
        if linked != meta.links.len() {
            problems.push(format!("{} links for {linked} multi-block sets", meta.links.len()));
        }
    }
    problems
}

fn rendering_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc8);
    let mut renders = 0;
    let mut problems = Vec::new();
    for i in 0..25u64 {
        let sets = rng.gen_range(3..=20);
        let sys = generate_synthetic(sets, rng.gen_range(sets..=3 * sets), rng.gen_range(0.0..0.6), i).unwrap();
        for style in Style::ALL {
            let cfg = PipelineConfig {
                style,
                bound: [Bound::Unbounded, Bound::AtMost(2), Bound::AtMost(3)][(i % 3) as usize],
                mode: if i % 2 == 0 { Mode::Heuristic } else { Mode::Exact },
                timeout: Duration::from_secs(2),
                seed: i,
                ..PipelineConfig::default()
            };
            renders += 1;
            problems.extend(validate_render(&sys, &cfg).into_iter().map(|p| format!("#{i} {style}: {p}")));
        }
    }
    outcome(problems.is_empty(), format!("{renders} renders, {} problems {problems:?}", problems.len()))
}

fn cli(args: &[&str], dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_linzip"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let sys = generate_synthetic(16, 30, 0.3, 4).unwrap();
    std::fs::write(d.join("inst.json"), to_json(&sys)).unwrap();

    let invocations: Vec<(Vec<String>, Vec<&str>)> = vec![
        (
            "gen --sets 20 --elements 40 --density 0.3 --seed 1 --out gen.json".split(' ').map(String::from).collect(),
            vec!["gen.json"],
        ),
        (
            "render --input inst.json --variant g2 --bound 3 --mode exact --timeout 300 --seed 7 --out d.svg --metrics m.json --meta meta.json"
                .split(' ')
                .map(String::from)
                .collect(),
            vec!["d.svg", "m.json", "meta.json"],
        ),
        (
            "render --input inst.json --variant g3 --mode heuristic --seed 3 --out d.svg --metrics m.json --show-cardinality"
                .split(' ')
                .map(String::from)
                .collect(),
            vec!["d.svg", "m.json"],
        ),
        (
            "render --input inst.json --variant g0 --out d.svg --metrics m.json".split(' ').map(String::from).collect(),
            vec!["d.svg", "m.json"],
        ),
        (
            "bench --instances 3 --sets 8 --elements 14 --density 0.3 --timeout 300 --out report.csv"
                .split(' ')
                .map(String::from)
                .collect(),
            vec!["report.csv"],
        ),
    ];
    let mut bad = Vec::new();
    for (args, files) in &invocations {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let mut first: Option<Vec<Vec<u8>>> = None;
        for rep in 0..10 {
            if let Err(e) = cli(&argv, d) {
                bad.push(format!("`{}` failed: {e}", argv[0]));
                break;
            }
            let bytes: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(d.join(f)).unwrap()).collect();
            for f in files {
                std::fs::remove_file(d.join(f)).unwrap();
            }
            match &first {
                None => first = Some(bytes),
                Some(b) if *b != bytes => {
                    bad.push(format!("`{}` differs on repetition {rep}", args.join(" ")));
                    break;
                }
                _ => {}
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} invocations x 10 repetitions, {} differing {bad:?}", invocations.len(), bad.len()),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report_line = |name: &str, gating: bool, f: &dyn Fn() -> Outcome| {
        let started = Instant::now();
        let o = f();
        let verdict = match (o.pass, gating) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "FAIL (report-only)",
        };
        if !o.pass && gating {
            failed += 1;
        }
        println!("[{verdict}] {name}: {} ({:.1}s)", o.detail, started.elapsed().as_secs_f64());
    };

    report_line("column order optimality", true, &column_order_optimality);
    report_line("coloring optimality", true, &coloring_optimality);
    report_line("pair matching", true, &pair_matching);

    let corpus = synthetic_corpus();
    let started = Instant::now();
    let report = bench(&corpus, &BenchGrid::default(), Duration::from_secs(2), 42, false);
    println!("(benchmark over {} instances took {:.1}s)", corpus.instances.len(), started.elapsed().as_secs_f64());
    report_line("variant ordering", true, &|| variant_ordering(&report));
    report_line("bounded compression ceiling", true, &bounded_ceiling);
    report_line("heuristic quality envelope", false, &|| heuristic_envelope(&report));
    report_line("timeout protocol", true, &timeout_protocol);
    report_line("rendering validity", true, &rendering_validity);
    report_line("CLI determinism", true, &cli_determinism);

    if failed == 0 {
        println!("acceptance: all gating criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} gating criteria failed");
        ExitCode::FAILURE
    }
}
