//! Exhaustive property type profiling for schemaless property graphs.
//!
//! Every property on every node (or relationship) is visited and counted into
//! a [`TypeReport`]: group (label or relationship type) → property name →
//! value type → count. Any `(group, property)` observed with more than one
//! value type is a data-type inconsistency, usually the trace of a bug in the
//! pipeline that loaded the data.
//!
//! ```
//! use graph_inspect::graph::{GraphBuilder, PropertyValue};
//! use graph_inspect::inspector::{inspect_nodes, InspectConfig};
//! use graph_inspect::report::find_inconsistencies;
//!
//! let mut b = GraphBuilder::new();
//! b.add_node(["PHONE"], [("phone", PropertyValue::string("555-0100"))]).unwrap();
//! b.add_node(["PHONE"], [("phone", PropertyValue::Long(5550101))]).unwrap();
//! let graph = b.freeze();
//!
//! let report = inspect_nodes(&graph, &InspectConfig::parallel(4));
//! let found = find_inconsistencies(&report);
//! assert_eq!(found.len(), 1);
//! assert_eq!(found[0].property, "phone");
//! ```

pub mod bench;
pub mod cli;
pub mod graph;
pub mod ingest;
pub mod inspector;
pub mod report;

pub use graph::{Graph, GraphBuilder, PropertyValue, ValueType};
pub use inspector::{inspect_nodes, inspect_relationships, InspectConfig};
pub use report::{find_inconsistencies, TypeReport};
