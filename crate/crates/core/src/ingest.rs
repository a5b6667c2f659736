//! Readers and writers for the three input formats: class-facts documents,
//! ckjm metric lines and edge lists. Blank lines and `#` comments are
//! ignored everywhere.
//!
//! A class-facts document is JSON Lines, one class object per line:
//!
//! ```text
//! {"id":"a.A","kind":"class","superclass":"a.B","interfaces":[],
//!  "fields":[{"name":"x","type":"int","visibility":"private"}],
//!  "methods":[{"name":"m","params":["int"],"returns":"void","visibility":"public",
//!              "invokes":[{"owner":"a.C","method":"run()"}],
//!              "accesses":[{"owner":"a.A","field":"x"}],
//!              "references":["a.D"]}]}
//! ```
//!
//! (shown wrapped; each object must sit on a single line).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{validate_model, ClassFacts, ClassId, ClassModel, MetricVector, MetricsTable, TentativeLayer};

/// Lines that carry content, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

pub fn parse_class_facts(document: &str) -> Result<ClassModel> {
    let mut model = ClassModel::new();
    for (line, text) in content_lines(document) {
        let class: ClassFacts = serde_json::from_str(text).map_err(|e| {
            use serde_json::error::Category;
            match e.classify() {
                Category::Data => Error::Schema {
                    line,
                    message: e.to_string(),
                },
                _ => Error::Syntax {
                    line,
                    column: e.column(),
                    message: e.to_string(),
                },
            }
        })?;
        model.insert(class)?;
    }
    let violations = validate_model(&model);
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidModel(list.join("; ")));
    }
    Ok(model)
}

pub fn format_class_facts(model: &ClassModel) -> String {
    let mut out = String::new();
    for class in model.classes() {
        // Serializing plain data structures cannot fail.
        out.push_str(&serde_json::to_string(class).expect("class facts serialize"));
        out.push('\n');
    }
    out
}

/// Parses ckjm-style lines: `class WMC DIT NOC CBO RFC LCOM Ca NPM`.
pub fn parse_ckjm_metrics(text: &str) -> Result<MetricsTable> {
    let mut table = MetricsTable::new();
    for (line, content) in content_lines(text) {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 9 {
            return Err(Error::Schema {
                line,
                message: format!("expected 9 tokens (class + 8 metrics), found {}", tokens.len()),
            });
        }
        let id = ClassId::new(tokens[0]).map_err(|e| Error::Schema {
            line,
            message: e.to_string(),
        })?;
        let mut values = [0u64; 8];
        for (slot, token) in values.iter_mut().zip(&tokens[1..]) {
            *slot = token.parse().map_err(|_| Error::Schema {
                line,
                message: format!("metric value `{token}` is not a non-negative integer"),
            })?;
        }
        if table.contains_key(&id) {
            return Err(Error::DuplicateClass(id.to_string()));
        }
        table.insert(id, MetricVector::from_array(values));
    }
    Ok(table)
}

pub fn format_ckjm(table: &MetricsTable) -> String {
    let mut out = String::new();
    for (id, v) in table {
        let _ = write!(out, "{id}");
        for value in v.to_array() {
            let _ = write!(out, " {value}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRecord {
    pub from: ClassId,
    pub to: ClassId,
}

/// Deduplicated edges plus the number of dropped self-edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub edges: BTreeSet<EdgeRecord>,
    pub self_edges: usize,
}

/// Parses `FROM -> TO` or `FROM,TO` lines (syntax detected per line).
pub fn parse_edges(text: &str) -> Result<EdgeList> {
    let mut list = EdgeList::default();
    for (line, content) in content_lines(text) {
        let parts = content
            .split_once("->")
            .or_else(|| content.split_once(','))
            .ok_or_else(|| Error::Syntax {
                line,
                column: 1,
                message: "expected `FROM -> TO` or `FROM,TO`".into(),
            })?;
        let endpoint = |raw: &str| {
            ClassId::new(raw.trim()).map_err(|e| Error::Schema {
                line,
                message: e.to_string(),
            })
        };
        let (from, to) = (endpoint(parts.0)?, endpoint(parts.1)?);
        if from == to {
            list.self_edges += 1;
        } else {
            list.edges.insert(EdgeRecord { from, to });
        }
    }
    Ok(list)
}

pub fn format_edges<'a>(edges: impl IntoIterator<Item = (&'a ClassId, &'a ClassId)>) -> String {
    let mut out = String::new();
    for (from, to) in edges {
        let _ = writeln!(out, "{from} -> {to}");
    }
    out
}

/// Parses a `class,layer` CSV (header optional).
pub fn parse_layer_csv(text: &str) -> Result<BTreeMap<ClassId, TentativeLayer>> {
    let mut out = BTreeMap::new();
    for (line, content) in content_lines(text) {
        let fields: Vec<&str> = content.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(Error::Schema {
                line,
                message: "expected `class,layer`".into(),
            });
        }
        let layer_field = fields[fields.len() - 1];
        if fields[0] == "class" {
            continue;
        }
        let id = ClassId::new(fields[0]).map_err(|e| Error::Schema {
            line,
            message: e.to_string(),
        })?;
        let layer = layer_field
            .parse::<u8>()
            .ok()
            .and_then(TentativeLayer::from_index)
            .ok_or_else(|| Error::Schema {
                line,
                message: format!("layer `{layer_field}` is not in 1..=4"),
            })?;
        if out.insert(id.clone(), layer).is_some() {
            return Err(Error::DuplicateClass(id.to_string()));
        }
    }
    Ok(out)
}

pub fn format_layer_csv(layers: &BTreeMap<ClassId, TentativeLayer>) -> String {
    let mut out = String::from("class,layer\n");
    for (id, layer) in layers {
        let _ = writeln!(out, "{id},{layer}");
    }
    out
}
