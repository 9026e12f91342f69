//! In-memory property graph: typed values and the element store.

mod store;
mod value;

pub use store::{
    Graph, GraphBuilder, GraphError, NodeId, NodeView, Property, RelId, RelationshipView, Symbol,
};
pub use value::{value_type_name, PropertyValue, UnknownTypeTag, ValueType};

/// Which element table an operation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    Nodes,
    Relationships,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Nodes => "nodes",
            ElementKind::Relationships => "relationships",
        }
    }
}

impl std::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nodes" => Ok(ElementKind::Nodes),
            "relationships" => Ok(ElementKind::Relationships),
            other => Err(format!("unknown element kind `{other}`")),
        }
    }
}
