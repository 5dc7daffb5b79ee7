//! Reading and writing set systems.
//!
//! JSON is the canonical format:
//! `{"elements": ["a", "b"], "sets": {"S1": ["a"], "S2": ["b"]}}`. Set order
//! follows the file. `elements` may be omitted, in which case elements are
//! taken in order of first appearance.
//!
//! CSV is a 0/1 membership matrix: the header row names the elements after
//! one leading cell, and each following row is a set name and its cells.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::setmodel::{ModelError, SetSystem};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("{context}: {source}")]
    Invalid { context: String, source: ModelError },
    #[error("cannot infer input format of {0}; use json or csv")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Json,
    Csv,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(InputFormat::Json),
            "csv" => Some(InputFormat::Csv),
            _ => None,
        }
    }
}

impl FromStr for InputFormat {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(InputFormat::Json),
            "csv" => Ok(InputFormat::Csv),
            _ => Err(ParseError::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::Json => "json",
            InputFormat::Csv => "csv",
        })
    }
}

/// Reads and validates a set system. With `format = None` the format is
/// taken from the file extension. Elements that belong to no set are
/// dropped with a warning.
pub fn parse_instance(path: &Path, format: Option<InputFormat>) -> Result<SetSystem, ParseError> {
    let format = match format {
        Some(f) => f,
        None => InputFormat::from_path(path).ok_or_else(|| ParseError::UnknownFormat(path.display().to_string()))?,
    };
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (sys, dropped) = match format {
        InputFormat::Json => parse_json_str(&text)?,
        InputFormat::Csv => parse_csv_str(&text)?,
    };
    if !dropped.is_empty() {
        log::warn!(
            "{}: dropped {} element(s) that belong to no set: {}",
            path.display(),
            dropped.len(),
            dropped.join(", ")
        );
    }
    Ok(sys)
}

/// Sets in file order, duplicates kept so validation can report them.
struct OrderedSets(Vec<(String, Vec<String>)>);

impl<'de> Deserialize<'de> for OrderedSets {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SetsVisitor;

        impl<'de> Visitor<'de> for SetsVisitor {
            type Value = OrderedSets;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from set names to arrays of element names")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<OrderedSets, A::Error> {
                let mut sets = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some(entry) = map.next_entry::<String, Vec<String>>()? {
                    sets.push(entry);
                }
                Ok(OrderedSets(sets))
            }
        }

        d.deserialize_map(SetsVisitor)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    elements: Option<Vec<String>>,
    sets: OrderedSets,
}

/// Parses the JSON format, returning the system and the dropped elements.
pub fn parse_json_str(text: &str) -> Result<(SetSystem, Vec<String>), ParseError> {
    let raw: RawInstance = serde_json::from_str(text)?;
    let elements = raw.elements.unwrap_or_else(|| {
        let mut seen = std::collections::HashSet::new();
        raw.sets
            .0
            .iter()
            .flat_map(|(_, m)| m.iter())
            .filter(|e| seen.insert(e.as_str()))
            .cloned()
            .collect()
    });
    SetSystem::new(elements, raw.sets.0).map_err(|source| ParseError::Invalid {
        context: json_context(text, &source),
        source,
    })
}

/// Best-effort location of the offending entry: the line of the set's key
/// inside the `sets` object, or of the `elements` array.
fn json_context(text: &str, err: &ModelError) -> String {
    let (field, anchor) = match err {
        ModelError::DuplicateElement(_) => ("elements".to_string(), "\"elements\""),
        ModelError::DuplicateSet(s)
        | ModelError::EmptySet(s)
        | ModelError::UnknownMember { set: s, .. }
        | ModelError::RepeatedMember { set: s, .. } => (format!("sets.{s}"), "\"sets\""),
        ModelError::NoSets | ModelError::InvalidOrder(_) => return "field sets".into(),
    };
    let base = text.find(anchor).unwrap_or(0);
    let offset = match err {
        ModelError::DuplicateSet(s) => {
            // The second occurrence is the duplicate.
            let key = json_key(s);
            let first = text[base..].find(&key).map(|i| base + i + key.len());
            first.and_then(|f| text[f..].find(&key).map(|i| f + i))
        }
        ModelError::DuplicateElement(_) => Some(base),
        _ => field
            .strip_prefix("sets.")
            .and_then(|s| text[base..].find(&json_key(s)).map(|i| base + i)),
    };
    match offset {
        Some(o) => format!("line {}, field {field}", text[..o].matches('\n').count() + 1),
        None => format!("field {field}"),
    }
}

fn json_key(name: &str) -> String {
    serde_json::to_string(name).unwrap_or_else(|_| format!("\"{name}\""))
}

/// Parses the CSV format, returning the system and the dropped elements.
pub fn parse_csv_str(text: &str) -> Result<(SetSystem, Vec<String>), ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| ParseError::Csv {
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.len() < 2 {
        return Err(ParseError::Csv {
            line: 1,
            message: "header needs a leading cell and at least one element".into(),
        });
    }
    let elements: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut sets = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let name = record.get(0).unwrap_or_default().to_string();
        let mut members = Vec::new();
        for (j, cell) in record.iter().skip(1).enumerate() {
            match cell {
                "1" => members.push(elements[j].clone()),
                "0" | "" => {}
                other => {
                    return Err(ParseError::Csv {
                        line,
                        message: format!("set `{name}`, element `{}`: expected 0 or 1, got `{other}`", elements[j]),
                    })
                }
            }
        }
        if members.is_empty() {
            return Err(ParseError::Invalid {
                context: format!("line {line}"),
                source: ModelError::EmptySet(name),
            });
        }
        sets.push((name, members, line));
    }
    let lines: Vec<(String, u64)> = sets.iter().map(|(n, _, l)| (n.clone(), *l)).collect();
    SetSystem::new(elements, sets.into_iter().map(|(n, m, _)| (n, m))).map_err(|source| {
        let context = match &source {
            // Report the second occurrence.
            ModelError::DuplicateSet(s) => lines
                .iter()
                .filter(|(n, _)| n == s)
                .nth(1)
                .map_or("header".into(), |(_, l)| format!("line {l}")),
            _ => "line 1".into(),
        };
        ParseError::Invalid { context, source }
    })
}

/// Canonical JSON, keeping set order.
pub fn to_json(sys: &SetSystem) -> String {
    struct Sets<'a>(&'a SetSystem);

    impl Serialize for Sets<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let elements = self.0.elements();
            let mut map = s.serialize_map(Some(self.0.set_count()))?;
            for set in self.0.sets() {
                let names: Vec<&str> = set.members.iter().map(|&i| elements[i].as_str()).collect();
                map.serialize_entry(&set.name, &names)?;
            }
            map.end()
        }
    }

    #[derive(Serialize)]
    struct Instance<'a> {
        elements: &'a [String],
        sets: Sets<'a>,
    }

    let doc = Instance {
        elements: sys.elements(),
        sets: Sets(sys),
    };
    serde_json::to_string_pretty(&doc).expect("instance serializes") + "\n"
}
