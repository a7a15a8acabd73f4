//! CSV readers and writers for node features, edge lists and node lists.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::config::GroupConfig;
use crate::model::{Adjacency, FeatureGroup, FeatureTable, GroupSpec};

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::io(path, e))
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn expect_header(headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::Parse {
            line: 1,
            column: String::new(),
            message: format!("expected header {:?}, found {:?}", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

/// Reads `node_id,<columns...>` and groups the columns. Without a group
/// list every column becomes its own group with default similarity and
/// magnitude.
pub fn read_features<R: Read>(source: R, groups: Option<&[GroupConfig]>) -> Result<FeatureTable<f64>> {
    let mut rdr = reader(source);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("node_id") {
        return Err(Error::Parse {
            line: 1,
            column: headers.get(0).unwrap_or_default().to_string(),
            message: "first column must be node_id".into(),
        });
    }
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut position = HashMap::new();
    for (i, c) in columns.iter().enumerate() {
        if position.insert(c.as_str(), i).is_some() {
            return Err(Error::Config(format!("column {c:?} appears twice in the header")));
        }
    }

    let mut node_ids = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let id = record.get(0).unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(Error::Parse {
                line,
                column: "node_id".into(),
                message: "empty node id".into(),
            });
        }
        for (i, column) in columns.iter().enumerate() {
            let cell = record.get(i + 1).unwrap_or_default();
            if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
                return Err(Error::MissingValue {
                    node: id,
                    column: column.clone(),
                });
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                column: column.clone(),
                message: format!("{cell:?} is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: column.clone(),
                    message: format!("{cell:?} is not finite"),
                });
            }
            values[i].push(v);
        }
        node_ids.push(id);
    }

    let default_groups: Vec<GroupConfig>;
    let groups = match groups {
        Some(g) => g,
        None => {
            default_groups = columns.iter().map(|c| GroupConfig::single(c)).collect();
            &default_groups
        }
    };
    let mut used = HashSet::new();
    let mut table_groups = Vec::with_capacity(groups.len());
    for g in groups {
        if g.columns.is_empty() {
            return Err(Error::Config(format!("group {:?} lists no columns", g.name)));
        }
        let mut idx = Vec::with_capacity(g.columns.len());
        for c in &g.columns {
            let &i = position
                .get(c.as_str())
                .ok_or_else(|| Error::Config(format!("group {:?} refers to unknown column {c:?}", g.name)))?;
            if !used.insert(i) {
                return Err(Error::Config(format!("column {c:?} is assigned to more than one group")));
            }
            idx.push(i);
        }
        let flat = (0..node_ids.len())
            .flat_map(|row| idx.iter().map(|&i| values[i][row]).collect::<Vec<_>>())
            .collect();
        table_groups.push(FeatureGroup::new(
            g.name.clone(),
            GroupSpec::new(g.similarity, g.magnitude),
            idx.len(),
            flat,
        ));
    }
    if let Some(unused) = (0..columns.len()).find(|i| !used.contains(i)) {
        return Err(Error::Config(format!(
            "column {:?} is not assigned to any group",
            columns[unused]
        )));
    }
    FeatureTable::new(node_ids, table_groups)
}

pub fn load_features(path: &Path, groups: Option<&[GroupConfig]>) -> Result<FeatureTable<f64>> {
    read_features(open(path)?, groups)
}

/// Reads `source,target` rows into an adjacency over `node_ids`, which fixes
/// the node order.
pub fn read_edge_list<R: Read>(source: R, node_ids: &[String]) -> Result<Adjacency> {
    let index: HashMap<&str, usize> = node_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut rdr = reader(source);
    expect_header(rdr.headers()?, &["source", "target"])?;
    let mut x = Adjacency::zeros(node_ids.len());
    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        let (s, t) = (record.get(0).unwrap_or_default(), record.get(1).unwrap_or_default());
        let lookup = |id: &str| {
            index.get(id).copied().ok_or_else(|| Error::UnknownNode {
                line,
                id: id.to_string(),
            })
        };
        let (a, b) = (lookup(s)?, lookup(t)?);
        if a == b {
            return Err(Error::SelfLoop {
                line,
                id: s.to_string(),
            });
        }
        if x.get(a, b) {
            return Err(Error::DuplicateEdge {
                line,
                source_id: s.to_string(),
                target_id: t.to_string(),
            });
        }
        x.set(a, b, true);
    }
    Ok(x)
}

pub fn load_edge_list(path: &Path, node_ids: &[String]) -> Result<Adjacency> {
    read_edge_list(open(path)?, node_ids)
}

/// Writes edges in row-major order of the adjacency matrix.
pub fn write_edge_list<W: Write>(sink: W, x: &Adjacency, node_ids: &[String]) -> Result<()> {
    if x.n() != node_ids.len() {
        return Err(Error::Dimension(format!(
            "adjacency has {} nodes but {} ids were given",
            x.n(),
            node_ids.len()
        )));
    }
    let mut w = writer(sink);
    w.write_record(["source", "target"])?;
    for (a, b) in x.edges() {
        w.write_record([&node_ids[a], &node_ids[b]])?;
    }
    w.flush().map_err(|e| Error::io("<edge list>", e))?;
    Ok(())
}

pub fn save_edge_list(path: &Path, x: &Adjacency, node_ids: &[String]) -> Result<()> {
    write_edge_list(create(path)?, x, node_ids)
}

/// Reads a one-column `node_id` file.
pub fn read_node_list<R: Read>(source: R) -> Result<Vec<String>> {
    let mut rdr = reader(source);
    expect_header(rdr.headers()?, &["node_id"])?;
    let mut ids = Vec::new();
    let mut seen = HashSet::new();
    for record in rdr.records() {
        let record = record?;
        let id = record.get(0).unwrap_or_default().to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::Parse {
                line: line_of(&record),
                column: "node_id".into(),
                message: format!("node {id:?} listed twice"),
            });
        }
        ids.push(id);
    }
    Ok(ids)
}

pub fn load_node_list(path: &Path) -> Result<Vec<String>> {
    read_node_list(open(path)?)
}

/// Positions in `node_ids` of the allowed nodes, ascending, so the features
/// file keeps defining the order.
pub fn allowlist_indices(node_ids: &[String], allowed: &[String]) -> Result<Vec<usize>> {
    let index: HashMap<&str, usize> = node_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut keep = allowed
        .iter()
        .enumerate()
        .map(|(row, id)| {
            index.get(id.as_str()).copied().ok_or_else(|| Error::UnknownNode {
                line: row as u64 + 2,
                id: id.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    keep.sort_unstable();
    Ok(keep)
}

/// Subgraph induced by `keep`, relabelled `0..keep.len()`.
pub fn induced_subgraph(x: &Adjacency, keep: &[usize]) -> Adjacency {
    let mut sub = Adjacency::zeros(keep.len());
    for (i, &a) in keep.iter().enumerate() {
        for (j, &b) in keep.iter().enumerate() {
            if i != j && x.get(a, b) {
                sub.set(i, j, true);
            }
        }
    }
    sub
}
