//! Compact linear set diagrams.
//!
//! Sets are drawn as rows of a matrix whose columns are elements. The
//! pipeline orders columns to minimize the number of blocks
//! ([`colorder`]), packs compatible sets into shared rows ([`compress`]),
//! orders rows and assigns colors ([`layout`]) and writes SVG ([`render`]).
//! [`pipeline`] ties the stages together and hosts ingestion, the synthetic
//! generator and the benchmark harness.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub mod colorder;
pub mod compress;
pub mod layout;
pub mod pipeline;
pub mod render;
pub mod setmodel;

pub use pipeline::{run, Metrics, PipelineConfig, PipelineError, RunOutput};
pub use setmodel::{ColumnOrder, MembershipMatrix, SetSystem};

/// How a solver result was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Proven minimal.
    Optimal,
    /// Produced by a heuristic that was asked for directly.
    HeuristicOnly,
    /// The exact solver ran out of time; the heuristic result is used.
    TimeoutFallback,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::HeuristicOnly => "heuristic_only",
            SolveStatus::TimeoutFallback => "timeout_fallback",
        })
    }
}

/// Diagram style, which is also the row-compatibility model.
///
/// * `Linear` (g0): plain linear diagram, one set per row.
/// * `Disjoint` (g1): sets share a row iff they do not intersect.
/// * `NonAlternating` (g2): additionally their active ranges must not
///   overlap, so block links can run through the row center.
/// * `PairAlternating` (g3): disjoint, and at most two sets of a row may
///   cover any column with their active ranges (top/bottom link lanes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Style {
    #[serde(rename = "g0")]
    Linear,
    #[serde(rename = "g1")]
    Disjoint,
    #[serde(rename = "g2")]
    NonAlternating,
    #[serde(rename = "g3")]
    PairAlternating,
}

impl Style {
    pub const ALL: [Style; 4] = [
        Style::Linear,
        Style::Disjoint,
        Style::NonAlternating,
        Style::PairAlternating,
    ];
    pub const COMPRESSED: [Style; 3] = [Style::Disjoint, Style::NonAlternating, Style::PairAlternating];

    pub fn tag(self) -> &'static str {
        match self {
            Style::Linear => "g0",
            Style::Disjoint => "g1",
            Style::NonAlternating => "g2",
            Style::PairAlternating => "g3",
        }
    }
}

impl fmt::Display for Style {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Style {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "g0" | "linear" => Ok(Style::Linear),
            "g1" | "disjoint" => Ok(Style::Disjoint),
            "g2" | "non-alternating" => Ok(Style::NonAlternating),
            "g3" | "pair-alternating" => Ok(Style::PairAlternating),
            other => Err(format!("unknown variant `{other}` (expected g0, g1, g2 or g3)")),
        }
    }
}

/// Maximum number of sets per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Unbounded,
    AtMost(usize),
}

impl Bound {
    pub fn limit(self) -> Option<usize> {
        match self {
            Bound::Unbounded => None,
            Bound::AtMost(b) => Some(b),
        }
    }

    pub fn admits(self, size: usize) -> bool {
        self.limit().is_none_or(|b| size <= b)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Unbounded => f.write_str("inf"),
            Bound::AtMost(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Bound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "inf" | "none" | "unbounded" | "∞" => Ok(Bound::Unbounded),
            n => match n.parse::<usize>() {
                Ok(b) if b >= 2 => Ok(Bound::AtMost(b)),
                Ok(_) => Err("bound must be at least 2".to_string()),
                Err(_) => Err(format!("invalid bound `{s}` (expected an integer >= 2 or `inf`)")),
            },
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Bound::Unbounded => s.serialize_str("inf"),
            Bound::AtMost(b) => s.serialize_u64(*b as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => n.to_string().parse(),
            Raw::Text(t) => t.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}
