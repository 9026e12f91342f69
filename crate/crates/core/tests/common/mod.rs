//! Test-only brute-force recount, independent of the batching inspector.
#![allow(dead_code)]

use std::collections::BTreeMap;

use graph_inspect::graph::{
    value_type_name, ElementKind, Graph, NodeId, PropertyValue, RelId, ValueType,
};
use graph_inspect::ingest::{LabelSchema, PropertySchema, RelSchema, SyntheticSpec};
use graph_inspect::report::TypeReport;

pub type Flat = BTreeMap<(String, String, String), u64>;

/// Recounts by walking element ids one at a time through the point-lookup
/// accessors, keyed by plain strings.
pub fn recount(graph: &Graph, kind: ElementKind, limit: usize) -> Flat {
    let mut out = Flat::new();
    match kind {
        ElementKind::Nodes => {
            let n = if limit == 0 {
                graph.node_count()
            } else {
                limit.min(graph.node_count())
            };
            for i in 0..n {
                let node = graph.node(NodeId::new(i as u32)).unwrap();
                let mut labels: Vec<String> = node.labels().map(str::to_string).collect();
                if labels.is_empty() {
                    labels.push("_NO_LABEL".to_string());
                }
                for (name, value) in node.properties() {
                    for label in &labels {
                        *out.entry((
                            label.clone(),
                            name.to_string(),
                            value_type_name(value).to_string(),
                        ))
                        .or_default() += 1;
                    }
                }
            }
        }
        ElementKind::Relationships => {
            let n = if limit == 0 {
                graph.relationship_count()
            } else {
                limit.min(graph.relationship_count())
            };
            for i in 0..n {
                let rel = graph.relationship(RelId::new(i as u32)).unwrap();
                for (name, value) in rel.properties() {
                    *out.entry((
                        rel.rel_type().to_string(),
                        name.to_string(),
                        value_type_name(value).to_string(),
                    ))
                    .or_default() += 1;
                }
            }
        }
    }
    out
}

pub fn flatten(report: &TypeReport) -> Flat {
    report
        .entries()
        .map(|(g, p, t, c)| ((g.to_string(), p.to_string(), t.name().to_string()), c))
        .collect()
}

/// Number of elements in each group carrying each property, counted directly.
pub fn carriers(graph: &Graph, kind: ElementKind) -> BTreeMap<(String, String), u64> {
    let mut out = BTreeMap::new();
    match kind {
        ElementKind::Nodes => {
            for node in graph.nodes() {
                let mut labels: Vec<&str> = node.labels().collect();
                if labels.is_empty() {
                    labels.push("_NO_LABEL");
                }
                for label in labels {
                    for (name, _) in node.properties() {
                        *out.entry((label.to_string(), name.to_string()))
                            .or_default() += 1;
                    }
                }
            }
        }
        ElementKind::Relationships => {
            for rel in graph.relationships() {
                for (name, _) in rel.properties() {
                    *out.entry((rel.rel_type().to_string(), name.to_string()))
                        .or_default() += 1;
                }
            }
        }
    }
    out
}

fn prop(name: &str, tag: ValueType, presence: f64) -> PropertySchema {
    PropertySchema::new(name, tag).with_presence(presence)
}

/// A knowledge-graph-like spec: people, projects and phones connected by
/// a few relationship types.
pub fn knowledge_graph_spec(nodes: usize, rels: usize, flip_rate: f64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        node_count: nodes,
        rel_count: rels,
        label_schemas: vec![
            LabelSchema {
                label: "PERSON".into(),
                properties: vec![
                    prop("name", ValueType::String, 1.0),
                    prop("person_id", ValueType::Long, 1.0),
                    prop("born", ValueType::LocalDate, 0.7),
                    prop("aliases", ValueType::StringArray, 0.1),
                ],
            },
            LabelSchema {
                label: "PROJECT".into(),
                properties: vec![
                    prop("project_num", ValueType::String, 1.0),
                    prop("total_cost", ValueType::Long, 0.9),
                    prop("project_start", ValueType::LocalDate, 0.95),
                    prop("budget_share", ValueType::Double, 0.5),
                ],
            },
            LabelSchema {
                label: "PHONE".into(),
                properties: vec![
                    PropertySchema::new("phone", ValueType::String).with_alternate(ValueType::Long)
                ],
            },
        ],
        rel_schemas: vec![
            RelSchema {
                rel_type: "WORKS_ON".into(),
                properties: vec![prop("hours", ValueType::Long, 0.6)],
            },
            RelSchema {
                rel_type: "KNOWS".into(),
                properties: vec![
                    prop("since", ValueType::LocalDate, 0.4),
                    prop("weight", ValueType::Double, 0.3),
                ],
            },
            RelSchema {
                rel_type: "CALLED".into(),
                properties: vec![
                    prop("at", ValueType::LocalDateTime, 0.5),
                    prop("flags", ValueType::BooleanArray, 0.05),
                ],
            },
        ],
        flip_rate,
        seed,
    }
}

/// A value of the given type with a payload derived from `seed`.
pub fn sample_value(ty: ValueType, seed: i64) -> PropertyValue {
    use chrono::NaiveDate;
    let date =
        NaiveDate::from_num_days_from_ce_opt(730_000 + (seed.rem_euclid(5000)) as i32).unwrap();
    match ty {
        ValueType::Boolean => PropertyValue::Boolean(seed % 2 == 0),
        ValueType::Long => PropertyValue::Long(seed),
        ValueType::Double => PropertyValue::Double(seed as f64 / 3.0),
        ValueType::String => PropertyValue::string(seed.to_string()),
        ValueType::LocalDate => PropertyValue::LocalDate(date),
        ValueType::LocalDateTime => {
            PropertyValue::LocalDateTime(date.and_hms_opt(1, 2, 3).unwrap())
        }
        ValueType::BooleanArray => PropertyValue::BooleanArray(vec![true, seed > 0].into()),
        ValueType::LongArray => PropertyValue::LongArray(vec![seed].into()),
        ValueType::DoubleArray => PropertyValue::DoubleArray(Vec::new().into()),
        ValueType::StringArray => PropertyValue::string_array([seed.to_string()]),
    }
}

pub mod arb {
    use super::*;
    use graph_inspect::graph::GraphBuilder;
    use proptest::prelude::*;
    use proptest::sample::subsequence;

    const LABELS: [&str; 3] = ["A", "B", "C"];
    const TYPES: [&str; 2] = ["X", "Y"];
    const KEYS: [&str; 3] = ["p", "q", "r"];

    fn props() -> impl Strategy<Value = Vec<(&'static str, PropertyValue)>> {
        (
            subsequence(KEYS.to_vec(), 0..=KEYS.len()),
            prop::collection::vec((0..ValueType::COUNT, any::<i64>()), 3),
        )
            .prop_map(|(keys, draws)| {
                keys.into_iter()
                    .zip(draws)
                    .map(|(k, (t, seed))| (k, sample_value(ValueType::ALL[t], seed)))
                    .collect()
            })
    }

    /// Small graphs mixing unlabeled, single- and multi-label nodes.
    pub fn graph(max_nodes: usize, max_rels: usize) -> impl Strategy<Value = Graph> {
        let nodes = prop::collection::vec(
            (subsequence(LABELS.to_vec(), 0..=LABELS.len()), props()),
            1..=max_nodes,
        );
        let rels = prop::collection::vec(
            (
                prop::sample::select(TYPES.to_vec()),
                any::<prop::sample::Index>(),
                any::<prop::sample::Index>(),
                props(),
            ),
            0..=max_rels,
        );
        (nodes, rels).prop_map(|(nodes, rels)| {
            let mut b = GraphBuilder::new();
            let n = nodes.len();
            for (labels, props) in nodes {
                b.add_node(labels, props).unwrap();
            }
            for (ty, s, e, props) in rels {
                b.add_relationship(
                    ty,
                    NodeId::new(s.index(n) as u32),
                    NodeId::new(e.index(n) as u32),
                    props,
                )
                .unwrap();
            }
            b.freeze()
        })
    }
}
