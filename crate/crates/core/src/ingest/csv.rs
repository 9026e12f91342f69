//! CSV files with typed headers, in the style of common bulk-import tools.
//!
//! Node files: an optional `:ID` column, an optional `:LABEL` column holding
//! `;`-separated labels, and `name:Type` property columns. Relationship files:
//! mandatory `:START_ID`, `:END_ID` and `:TYPE` columns plus property columns.
//! An empty property cell means the property is absent.

use std::collections::HashMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use super::codec::decode_cell;
use super::IngestError;
use crate::graph::{Graph, GraphBuilder, NodeId, PropertyValue, ValueType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Id,
    Label,
    StartId,
    EndId,
    Type,
    Property(usize, ValueType),
}

struct Header {
    columns: Vec<Column>,
    names: Vec<String>,
}

impl Header {
    fn parse(path: &Path, record: &csv::StringRecord) -> Result<Self, IngestError> {
        let bad = |message: String| IngestError::BadHeader {
            path: path.to_path_buf(),
            message,
        };
        let mut columns = Vec::with_capacity(record.len());
        let mut names: Vec<String> = Vec::new();
        for raw in record.iter() {
            let raw = raw.trim();
            let (name, tag) = raw
                .rsplit_once(':')
                .ok_or_else(|| bad(format!("column `{raw}` has no `:Type` suffix")))?;
            let column = match tag {
                "ID" => Column::Id,
                "LABEL" => Column::Label,
                "START_ID" => Column::StartId,
                "END_ID" => Column::EndId,
                "TYPE" => Column::Type,
                _ => {
                    let ty: ValueType = tag
                        .parse()
                        .map_err(|_| bad(format!("column `{raw}` has unknown type `{tag}`")))?;
                    if name.is_empty() {
                        return Err(bad(format!("column `{raw}` has no property name")));
                    }
                    if names.iter().any(|n| n == name) {
                        return Err(bad(format!("property `{name}` appears twice")));
                    }
                    names.push(name.to_string());
                    Column::Property(names.len() - 1, ty)
                }
            };
            if !matches!(column, Column::Property(..)) && columns.contains(&column) {
                return Err(bad(format!("column `{raw}` appears twice")));
            }
            columns.push(column);
        }
        Ok(Header { columns, names })
    }

    fn position(&self, column: Column) -> Option<usize> {
        self.columns.iter().position(|c| *c == column)
    }

    fn require(
        &self,
        path: &Path,
        column: Column,
        label: &'static str,
    ) -> Result<usize, IngestError> {
        self.position(column)
            .ok_or_else(|| IngestError::MissingColumn {
                path: path.to_path_buf(),
                column: label,
            })
    }

    fn properties(
        &self,
        path: &Path,
        line: u64,
        record: &csv::StringRecord,
    ) -> Result<Vec<(String, PropertyValue)>, IngestError> {
        let mut out = Vec::new();
        for (cell, column) in record.iter().zip(&self.columns) {
            let Column::Property(i, ty) = *column else {
                continue;
            };
            if cell.is_empty() {
                continue;
            }
            let name = &self.names[i];
            let value = decode_cell(ty, cell).map_err(|e| e.at(path, line, name))?;
            out.push((name.clone(), value));
        }
        Ok(out)
    }
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .from_reader(source)
}

fn csv_error(path: &Path, e: csv::Error) -> IngestError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => IngestError::io(path, io),
        kind => IngestError::malformed(path, line, format!("{kind:?}")),
    }
}

/// Incremental CSV loader. All node files must be added before any
/// relationship file.
#[derive(Debug, Default)]
pub struct CsvLoader {
    builder: GraphBuilder,
    ids: HashMap<String, NodeId>,
}

impl CsvLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_nodes<R: Read>(&mut self, path: &Path, source: R) -> Result<(), IngestError> {
        let mut records = reader(source).into_records();
        let Some(first) = records.next() else {
            return Ok(());
        };
        let header = Header::parse(path, &first.map_err(|e| csv_error(path, e))?)?;
        for c in [Column::StartId, Column::EndId, Column::Type] {
            if header.position(c).is_some() {
                return Err(IngestError::BadHeader {
                    path: path.to_path_buf(),
                    message: "relationship column in a node file".into(),
                });
            }
        }
        let id_col = header.position(Column::Id);
        let label_col = header.position(Column::Label);

        for record in records {
            let record = record.map_err(|e| csv_error(path, e))?;
            let line = record.position().map_or(0, |p| p.line());
            let props = header.properties(path, line, &record)?;
            let labels: Vec<&str> = match label_col.map(|i| &record[i]) {
                Some(cell) if !cell.is_empty() => cell.split(';').collect(),
                _ => Vec::new(),
            };
            let external = id_col.map(|i| record[i].to_string());
            if let Some(ext) = &external {
                if ext.is_empty() {
                    return Err(IngestError::malformed(path, line, "empty node id"));
                }
                if self.ids.contains_key(ext) {
                    return Err(IngestError::DuplicateId {
                        path: path.to_path_buf(),
                        line,
                        id: ext.clone(),
                    });
                }
            }
            let id = self
                .builder
                .add_node(labels, props)
                .map_err(|source| IngestError::Graph {
                    path: path.to_path_buf(),
                    line,
                    source,
                })?;
            if let Some(ext) = external {
                self.ids.insert(ext, id);
            }
        }
        Ok(())
    }

    pub fn add_relationships<R: Read>(
        &mut self,
        path: &Path,
        source: R,
    ) -> Result<(), IngestError> {
        let mut records = reader(source).into_records();
        let Some(first) = records.next() else {
            return Err(IngestError::MissingColumn {
                path: path.to_path_buf(),
                column: ":START_ID",
            });
        };
        let header = Header::parse(path, &first.map_err(|e| csv_error(path, e))?)?;
        let start_col = header.require(path, Column::StartId, ":START_ID")?;
        let end_col = header.require(path, Column::EndId, ":END_ID")?;
        let type_col = header.require(path, Column::Type, ":TYPE")?;

        for record in records {
            let record = record.map_err(|e| csv_error(path, e))?;
            let line = record.position().map_or(0, |p| p.line());
            let props = header.properties(path, line, &record)?;
            let resolve = |col: usize| {
                let ext = &record[col];
                self.ids
                    .get(ext)
                    .copied()
                    .ok_or_else(|| IngestError::UnknownNode {
                        path: path.to_path_buf(),
                        line,
                        id: ext.to_string(),
                    })
            };
            let start = resolve(start_col)?;
            let end = resolve(end_col)?;
            self.builder
                .add_relationship(&record[type_col], start, end, props)
                .map_err(|source| IngestError::Graph {
                    path: path.to_path_buf(),
                    line,
                    source,
                })?;
        }
        Ok(())
    }

    pub fn finish(self) -> Graph {
        self.builder.freeze()
    }
}

/// Loads node files, then relationship files, into one graph.
pub fn load_csv(node_files: &[PathBuf], rel_files: &[PathBuf]) -> Result<Graph, IngestError> {
    let mut loader = CsvLoader::new();
    for path in node_files {
        let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        loader.add_nodes(path, file)?;
    }
    for path in rel_files {
        let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        loader.add_relationships(path, file)?;
    }
    Ok(loader.finish())
}
