//! Line-delimited JSON with explicitly typed property values.
//!
//! ```text
//! {"id": "n1", "labels": ["PERSON"], "props": {"name": {"t": "String", "v": "a"}}}
//! {"id": "r1", "type": "KNOWS", "start": "n1", "end": "n2", "props": {}}
//! ```

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use serde_json::{json, Map, Value};

use super::codec::{decode_json, encode_json};
use super::IngestError;
use crate::graph::{Graph, GraphBuilder, NodeId, PropertyValue};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TypedValue {
    t: String,
    v: Value,
}

/// Property object kept as an ordered list so repeated keys are detected
/// instead of silently overwritten.
#[derive(Default)]
struct PropList(Vec<(String, TypedValue)>);

impl<'de> Deserialize<'de> for PropList {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ListVisitor;

        impl<'de> Visitor<'de> for ListVisitor {
            type Value = PropList;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object of typed values")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<PropList, A::Error> {
                let mut out = Vec::with_capacity(map.size_hint().unwrap_or(0));
                while let Some(entry) = map.next_entry()? {
                    out.push(entry);
                }
                Ok(PropList(out))
            }
        }

        deserializer.deserialize_map(ListVisitor)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeLine {
    id: String,
    #[serde(default)]
    labels: Vec<String>,
    #[serde(default)]
    props: PropList,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelLine {
    #[allow(dead_code)]
    id: String,
    #[serde(rename = "type")]
    rel_type: String,
    start: String,
    end: String,
    #[serde(default)]
    props: PropList,
}

/// Incremental JSONL loader. Node files must be added before the relationship
/// files that reference them.
#[derive(Debug, Default)]
pub struct JsonlLoader {
    builder: GraphBuilder,
    ids: HashMap<String, NodeId>,
}

impl JsonlLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_nodes<R: BufRead>(&mut self, path: &Path, reader: R) -> Result<(), IngestError> {
        for (line_no, line) in numbered_lines(path, reader) {
            let line = line?;
            let parsed: NodeLine = serde_json::from_str(&line)
                .map_err(|e| IngestError::malformed(path, line_no, e.to_string()))?;
            let props = decode_props(path, line_no, parsed.props)?;
            if self.ids.contains_key(&parsed.id) {
                return Err(IngestError::DuplicateId {
                    path: path.to_path_buf(),
                    line: line_no,
                    id: parsed.id,
                });
            }
            let id = self
                .builder
                .add_node(&parsed.labels, props)
                .map_err(|source| IngestError::Graph {
                    path: path.to_path_buf(),
                    line: line_no,
                    source,
                })?;
            self.ids.insert(parsed.id, id);
        }
        Ok(())
    }

    pub fn add_relationships<R: BufRead>(
        &mut self,
        path: &Path,
        reader: R,
    ) -> Result<(), IngestError> {
        for (line_no, line) in numbered_lines(path, reader) {
            let line = line?;
            let parsed: RelLine = serde_json::from_str(&line)
                .map_err(|e| IngestError::malformed(path, line_no, e.to_string()))?;
            let props = decode_props(path, line_no, parsed.props)?;
            let resolve = |ext: &str| {
                self.ids
                    .get(ext)
                    .copied()
                    .ok_or_else(|| IngestError::UnknownNode {
                        path: path.to_path_buf(),
                        line: line_no,
                        id: ext.to_string(),
                    })
            };
            let start = resolve(&parsed.start)?;
            let end = resolve(&parsed.end)?;
            self.builder
                .add_relationship(&parsed.rel_type, start, end, props)
                .map_err(|source| IngestError::Graph {
                    path: path.to_path_buf(),
                    line: line_no,
                    source,
                })?;
        }
        Ok(())
    }

    pub fn finish(self) -> Graph {
        self.builder.freeze()
    }
}

/// Non-blank lines with 1-based line numbers.
fn numbered_lines<'a, R: BufRead + 'a>(
    path: &'a Path,
    reader: R,
) -> impl Iterator<Item = (u64, Result<String, IngestError>)> + 'a {
    reader
        .lines()
        .enumerate()
        .map(move |(i, line)| (i as u64 + 1, line.map_err(|e| IngestError::io(path, e))))
        .filter(|(_, line)| !matches!(line, Ok(l) if l.trim().is_empty()))
}

fn decode_props(
    path: &Path,
    line: u64,
    props: PropList,
) -> Result<Vec<(String, PropertyValue)>, IngestError> {
    props
        .0
        .into_iter()
        .map(|(name, tv)| {
            decode_json(&tv.t, &tv.v)
                .map(|v| (name.clone(), v))
                .map_err(|e| e.at(path, line, &name))
        })
        .collect()
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| IngestError::io(path, e))
}

/// Loads a graph from a nodes file and an optional relationships file.
/// Dense ids follow line order; external ids only resolve endpoints.
pub fn load_jsonl(nodes_path: &Path, rels_path: Option<&Path>) -> Result<Graph, IngestError> {
    let mut loader = JsonlLoader::new();
    loader.add_nodes(nodes_path, open(nodes_path)?)?;
    if let Some(rels) = rels_path {
        loader.add_relationships(rels, open(rels)?)?;
    }
    Ok(loader.finish())
}

/// Writes a graph in the JSONL encoding, using `n<ordinal>` / `r<ordinal>`
/// as external ids.
pub fn write_jsonl<W: Write, V: Write>(
    graph: &Graph,
    nodes: &mut W,
    rels: Option<&mut V>,
) -> io::Result<()> {
    for node in graph.nodes() {
        let props: Map<String, Value> = node
            .properties()
            .map(|(k, v)| (k.to_string(), encode_json(v)))
            .collect();
        let line = json!({
            "id": format!("n{}", node.id()),
            "labels": node.labels().collect::<Vec<_>>(),
            "props": props,
        });
        serde_json::to_writer(&mut *nodes, &line)?;
        nodes.write_all(b"\n")?;
    }
    if let Some(out) = rels {
        for rel in graph.relationships() {
            let props: Map<String, Value> = rel
                .properties()
                .map(|(k, v)| (k.to_string(), encode_json(v)))
                .collect();
            let line = json!({
                "id": format!("r{}", rel.id()),
                "type": rel.rel_type(),
                "start": format!("n{}", rel.start()),
                "end": format!("n{}", rel.end()),
                "props": props,
            });
            serde_json::to_writer(&mut *out, &line)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}
