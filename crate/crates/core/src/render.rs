//! SVG output for a [`DiagramLayout`].
//!
//! Every document comes with [`RenderMetadata`] describing what was drawn
//! (block rectangles, link lines, guide lines, labels) so callers can check
//! structure without parsing SVG.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compress::{validate_assignment, Violation};
use crate::layout::{DiagramLayout, DEFAULT_PALETTE};
use crate::setmodel::{active_ranges, blocks, build_membership_matrix, SetSystem};
use crate::Style;

const PAD: f64 = 8.0;
const CHAR_WIDTH: f64 = 0.6;
const MAX_SIDE_LABEL: usize = 24;
const MAX_COLUMN_LABEL: usize = 16;
const GUIDE_COLOR: &str = "#d0d0d0";

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("layout does not match style {style}: {violation}")]
    StyleMismatch { style: Style, violation: Violation },
    #[error("layout is inconsistent with the set system: {0}")]
    Inconsistent(String),
    #[error("palette is empty")]
    EmptyPalette,
}

/// Pixel dimensions. All values must be positive and the link thickness
/// smaller than the row height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderGeometry {
    pub column_width: f64,
    pub row_height: f64,
    pub block_margin: f64,
    pub row_margin: f64,
    pub link_thickness: f64,
    pub label_font_size: f64,
    /// If set, column width is derived from this total width.
    pub canvas_width: Option<f64>,
}

impl Default for RenderGeometry {
    fn default() -> Self {
        RenderGeometry {
            column_width: 18.0,
            row_height: 28.0,
            block_margin: 4.0,
            row_margin: 8.0,
            link_thickness: 2.0,
            label_font_size: 12.0,
            canvas_width: None,
        }
    }
}

impl RenderGeometry {
    pub fn validate(&self) -> Result<(), RenderError> {
        let fields = [
            ("column_width", self.column_width),
            ("row_height", self.row_height),
            ("block_margin", self.block_margin),
            ("row_margin", self.row_margin),
            ("link_thickness", self.link_thickness),
            ("label_font_size", self.label_font_size),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(RenderError::InvalidGeometry(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(w) = self.canvas_width {
            if !(w.is_finite() && w > 0.0) {
                return Err(RenderError::InvalidGeometry(format!("canvas_width must be positive, got {w}")));
            }
        }
        if self.link_thickness >= self.row_height {
            return Err(RenderError::InvalidGeometry(
                "link_thickness must be smaller than row_height".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    pub geometry: RenderGeometry,
    pub palette: Vec<String>,
    /// Label column groups with their size instead of naming each element.
    pub show_cardinality: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            geometry: RenderGeometry::default(),
            palette: DEFAULT_PALETTE.iter().map(|s| s.to_string()).collect(),
            show_cardinality: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkLane {
    Center,
    Top,
    Bottom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectMeta {
    pub set: usize,
    /// Display row (top to bottom).
    pub row: usize,
    /// First and last column position covered, 0-based.
    pub start: usize,
    pub end: usize,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    pub fill: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkMeta {
    pub set: usize,
    pub row: usize,
    /// Active range, 1-based positions.
    pub start: usize,
    pub end: usize,
    pub x1: f64,
    pub x2: f64,
    pub y: f64,
    pub lane: LinkLane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetLabelMeta {
    pub set: usize,
    pub text: String,
    pub truncated: bool,
    /// `true` when placed left of the matrix rather than inside a block.
    pub outside: bool,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnLabelMeta {
    /// Positions covered by this label, 0-based inclusive.
    pub start: usize,
    pub end: usize,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderMetadata {
    pub style: Style,
    pub width: f64,
    pub height: f64,
    pub rects: Vec<RectMeta>,
    pub links: Vec<LinkMeta>,
    pub guides: Vec<f64>,
    pub set_labels: Vec<SetLabelMeta>,
    pub column_labels: Vec<ColumnLabelMeta>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgDocument {
    pub svg: String,
    pub meta: RenderMetadata,
}

impl SvgDocument {
    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("metadata serializes")
    }
}

fn num(x: f64) -> String {
    let r = (x * 100.0).round() / 100.0 + 0.0;
    format!("{r}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Shortens `text` to at most `max_chars` characters, ending in an ellipsis
/// when cut.
fn truncate(text: &str, max_chars: usize) -> (String, bool) {
    let len = text.chars().count();
    if len <= max_chars {
        return (text.to_string(), false);
    }
    let keep = max_chars.saturating_sub(1).max(1);
    let mut out: String = text.chars().take(keep).collect();
    out.push('…');
    (out, true)
}

fn check_consistency(layout: &DiagramLayout, sys: &SetSystem) -> Result<(), RenderError> {
    let inconsistent = |m: String| Err(RenderError::Inconsistent(m));
    if layout.column_order.len() != sys.element_count() {
        return inconsistent(format!(
            "column order has {} entries for {} elements",
            layout.column_order.len(),
            sys.element_count()
        ));
    }
    if layout.assignment.row_of.len() != sys.set_count() || layout.color_of.len() != sys.set_count() {
        return inconsistent("row or color assignment does not cover every set".into());
    }
    let rows = layout.assignment.row_count;
    if layout.assignment.row_of.iter().any(|&r| r >= rows) {
        return inconsistent("set assigned to a row beyond row_count".into());
    }
    let mut seen = vec![false; rows];
    if layout.row_order.len() != rows
        || layout
            .row_order
            .iter()
            .any(|&r| r >= rows || std::mem::replace(&mut seen[r], true))
    {
        return inconsistent("row order is not a permutation of the rows".into());
    }
    if seen.iter().any(|&s| !s) || layout.assignment.rows().iter().any(Vec::is_empty) {
        return inconsistent("empty row in assignment".into());
    }
    validate_assignment(
        sys,
        layout.style,
        &layout.column_order,
        &layout.assignment.row_of,
        layout.assignment.bound,
    )
    .map_err(|violation| RenderError::StyleMismatch {
        style: layout.style,
        violation,
    })
}

/// Lane per link-bearing set of one row: the set whose range starts first
/// takes the top lane, and a lane is reused once its previous range has
/// ended.
fn assign_lanes(sets: &mut [(usize, usize, usize)]) -> Result<Vec<LinkLane>, RenderError> {
    sets.sort_by_key(|&(s, start, _)| (start, s));
    let mut top_end = 0usize;
    let mut bottom_end = 0usize;
    let mut lanes = Vec::with_capacity(sets.len());
    for &(_, start, end) in sets.iter() {
        if top_end < start {
            top_end = end;
            lanes.push(LinkLane::Top);
        } else if bottom_end < start {
            bottom_end = end;
            lanes.push(LinkLane::Bottom);
        } else {
            return Err(RenderError::Inconsistent(
                "three block links overlap in one row".into(),
            ));
        }
    }
    Ok(lanes)
}

pub fn render(layout: &DiagramLayout, sys: &SetSystem, opts: &RenderOptions) -> Result<SvgDocument, RenderError> {
    let geo = &opts.geometry;
    geo.validate()?;
    if opts.palette.is_empty() {
        return Err(RenderError::EmptyPalette);
    }
    check_consistency(layout, sys)?;

    let mat = build_membership_matrix(sys);
    let ord = &layout.column_order;
    let ranges = active_ranges(&mat, ord);
    let set_blocks: Vec<_> = (0..sys.set_count()).map(|s| blocks(&mat, s, ord)).collect();
    let ncols = ord.len();
    let font = geo.label_font_size;
    let char_w = CHAR_WIDTH * font;

    let left = if layout.style == Style::Linear {
        let longest = sys
            .sets()
            .iter()
            .map(|s| s.name.chars().count().min(MAX_SIDE_LABEL))
            .max()
            .unwrap_or(0);
        longest as f64 * char_w + 2.0 * PAD
    } else {
        PAD
    };
    let cw = match geo.canvas_width {
        Some(w) => (w - left - PAD) / ncols as f64,
        None => geo.column_width,
    };
    if cw <= geo.block_margin {
        return Err(RenderError::InvalidGeometry(format!(
            "column width {} leaves no room for block margin {}",
            num(cw),
            num(geo.block_margin)
        )));
    }

    let column_labels: Vec<ColumnLabelMeta> = if opts.show_cardinality {
        let mut groups: Vec<ColumnLabelMeta> = Vec::new();
        for p in 0..ncols {
            let col = mat.column(ord.column_at(p));
            match groups.last_mut() {
                Some(g) if mat.column(ord.column_at(g.start)) == col => g.end = p,
                _ => groups.push(ColumnLabelMeta {
                    start: p,
                    end: p,
                    text: String::new(),
                }),
            }
        }
        for g in &mut groups {
            g.text = (g.end - g.start + 1).to_string();
        }
        groups
    } else {
        (0..ncols)
            .map(|p| ColumnLabelMeta {
                start: p,
                end: p,
                text: truncate(&sys.elements()[ord.column_at(p)], MAX_COLUMN_LABEL).0,
            })
            .collect()
    };
    let header = if opts.show_cardinality {
        font + PAD
    } else {
        let longest = column_labels.iter().map(|l| l.text.chars().count()).max().unwrap_or(0);
        longest as f64 * char_w + PAD
    };
    let top = PAD + header;
    let nrows = layout.row_count();
    let pitch = geo.row_height + geo.row_margin;
    let matrix_bottom = top + nrows as f64 * pitch - geo.row_margin;
    let width = left + ncols as f64 * cw + PAD;
    let height = matrix_bottom + PAD;
    let col_x = |p: usize| left + p as f64 * cw;

    let mut display_row = vec![0; nrows];
    for (d, &r) in layout.row_order.iter().enumerate() {
        display_row[r] = d;
    }
    let rows = layout.assignment.rows();
    let fill_of = |s: usize| opts.palette[layout.color_of[s] % opts.palette.len()].clone();

    let mut rects = Vec::new();
    for (s, bl) in set_blocks.iter().enumerate() {
        let d = display_row[layout.assignment.row_of[s]];
        for b in bl {
            rects.push(RectMeta {
                set: s,
                row: d,
                start: b.start,
                end: b.end,
                x: col_x(b.start) + geo.block_margin / 2.0,
                y: top + d as f64 * pitch,
                width: b.width() as f64 * cw - geo.block_margin,
                height: geo.row_height,
                fill: fill_of(s),
            });
        }
    }
    rects.sort_by_key(|a| (a.row, a.start));

    let mut boundaries = BTreeSet::new();
    for bl in &set_blocks {
        for b in bl {
            boundaries.insert(b.start);
            boundaries.insert(b.end + 1);
        }
    }
    let guides: Vec<f64> = boundaries.into_iter().map(col_x).collect();

    let mut links = Vec::new();
    if matches!(layout.style, Style::NonAlternating | Style::PairAlternating) {
        for (r, sets) in rows.iter().enumerate() {
            let d = display_row[r];
            let row_top = top + d as f64 * pitch;
            let mut linked: Vec<(usize, usize, usize)> = sets
                .iter()
                .filter(|&&s| set_blocks[s].len() > 1)
                .map(|&s| (s, ranges[s].start, ranges[s].end))
                .collect();
            let lanes = if layout.style == Style::NonAlternating {
                linked.sort_by_key(|&(s, start, _)| (start, s));
                vec![LinkLane::Center; linked.len()]
            } else {
                assign_lanes(&mut linked)?
            };
            for (&(s, start, end), lane) in linked.iter().zip(lanes) {
                let half = geo.link_thickness / 2.0;
                let y = match lane {
                    LinkLane::Center => row_top + geo.row_height / 2.0,
                    LinkLane::Top => row_top + half,
                    LinkLane::Bottom => row_top + geo.row_height - half,
                };
                links.push(LinkMeta {
                    set: s,
                    row: d,
                    start,
                    end,
                    x1: col_x(start - 1) + geo.block_margin / 2.0,
                    x2: col_x(end) - geo.block_margin / 2.0,
                    y,
                    lane,
                });
            }
        }
        links.sort_by_key(|a| (a.row, a.start, a.set));
    }

    let mut set_labels = Vec::new();
    for (s, set) in sys.sets().iter().enumerate() {
        let d = display_row[layout.assignment.row_of[s]];
        let baseline = top + d as f64 * pitch + geo.row_height / 2.0 + font * 0.35;
        if layout.style == Style::Linear {
            let (text, truncated) = truncate(&set.name, MAX_SIDE_LABEL);
            set_labels.push(SetLabelMeta {
                set: s,
                text,
                truncated,
                outside: true,
                x: left - PAD / 2.0,
                y: baseline,
            });
        } else {
            // leftmost among the widest blocks
            let b = set_blocks[s]
                .iter()
                .copied()
                .max_by_key(|b| (b.width(), std::cmp::Reverse(b.start)))
                .expect("nonempty set");
            let avail = b.width() as f64 * cw - geo.block_margin - 4.0;
            let fit = (avail / char_w).floor().max(1.0) as usize;
            let (text, truncated) = truncate(&set.name, fit);
            set_labels.push(SetLabelMeta {
                set: s,
                text,
                truncated,
                outside: false,
                x: col_x(b.start) + b.width() as f64 * cw / 2.0,
                y: baseline,
            });
        }
    }

    let meta = RenderMetadata {
        style: layout.style,
        width,
        height,
        rects,
        links,
        guides,
        set_labels,
        column_labels,
    };
    let frame = Frame {
        geo,
        top,
        matrix_bottom,
        left,
        cw,
        palette: &opts.palette,
        color_of: &layout.color_of,
        rotated_column_labels: !opts.show_cardinality,
    };
    let svg = write_svg(&meta, sys, &frame);
    Ok(SvgDocument { svg, meta })
}

struct Frame<'a> {
    geo: &'a RenderGeometry,
    top: f64,
    matrix_bottom: f64,
    left: f64,
    cw: f64,
    palette: &'a [String],
    color_of: &'a [usize],
    rotated_column_labels: bool,
}

fn write_svg(meta: &RenderMetadata, sys: &SetSystem, frame: &Frame<'_>) -> String {
    let Frame {
        geo,
        top,
        matrix_bottom,
        left,
        cw,
        palette,
        color_of,
        rotated_column_labels,
    } = *frame;
    let font = geo.label_font_size;
    let char_w = CHAR_WIDTH * font;
    let mut s = String::new();
    let w = num(meta.width);
    let h = num(meta.height);
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"{}\">",
        num(font)
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#ffffff\"/>");

    let _ = writeln!(s, "<g class=\"guides\" stroke=\"{GUIDE_COLOR}\" stroke-width=\"0.5\">");
    for &x in &meta.guides {
        let _ = writeln!(
            s,
            "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\"/>",
            num(top),
            num(matrix_bottom),
            x = num(x)
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g class=\"column-labels\" fill=\"#333333\">\n");
    for l in &meta.column_labels {
        let cx = left + (l.start + l.end + 1) as f64 * cw / 2.0;
        if rotated_column_labels {
            let x = cx + font * 0.35;
            let y = top - 4.0;
            let _ = writeln!(
                s,
                "<text x=\"{x}\" y=\"{y}\" transform=\"rotate(-90 {x} {y})\">{}</text>",
                escape(&l.text),
                x = num(x),
                y = num(y)
            );
        } else {
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                num(cx),
                num(top - 4.0),
                escape(&l.text)
            );
        }
    }
    s.push_str("</g>\n");

    if !meta.links.is_empty() {
        let _ = writeln!(s, "<g class=\"links\" stroke-width=\"{}\">", num(geo.link_thickness));
        for l in &meta.links {
            let _ = writeln!(
                s,
                "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"{}\"/>",
                num(l.x1),
                num(l.x2),
                palette[color_of[l.set] % palette.len()],
                y = num(l.y)
            );
        }
        s.push_str("</g>\n");
    }

    s.push_str("<g class=\"blocks\">\n");
    for r in &meta.rects {
        let _ = writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{}</title></rect>",
            num(r.x),
            num(r.y),
            num(r.width),
            num(r.height),
            r.fill,
            escape(sys.set_name(r.set))
        );
    }
    s.push_str("</g>\n");

    s.push_str("<g class=\"set-labels\">\n");
    for l in &meta.set_labels {
        let name = escape(sys.set_name(l.set));
        if l.outside {
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" fill=\"#222222\"><title>{name}</title>{}</text>",
                num(l.x),
                num(l.y),
                escape(&l.text)
            );
        } else {
            let tw = l.text.chars().count() as f64 * char_w + 4.0;
            let bh = font + 2.0;
            let _ = writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
                num(l.x - tw / 2.0),
                num(l.y - font * 0.35 - bh / 2.0),
                num(tw),
                num(bh)
            );
            let _ = writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#222222\"><title>{name}</title>{}</text>",
                num(l.x),
                num(l.y),
                escape(&l.text)
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}
