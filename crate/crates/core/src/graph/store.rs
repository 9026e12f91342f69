//! Column-oriented, append-only property graph store.
//!
//! Elements get dense ordinal ids in insertion order. Labels, relationship
//! types and property keys are interned into one symbol table. Properties of
//! all elements of a kind live in one flat vector addressed by per-element
//! offsets, so any id range can be scanned as a pair of contiguous slices.
//!
//! Building happens through [`GraphBuilder`]; [`GraphBuilder::freeze`] turns it
//! into an immutable [`Graph`] that is `Sync` and can be scanned from any
//! number of threads.

use std::fmt;
use std::ops::Range;

use indexmap::IndexSet;

use super::value::PropertyValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelId(u32);

/// Interned string handle (label, relationship type, or property key).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u32);

macro_rules! ordinal {
    ($($ty:ident),*) => {
        $(impl $ty {
            pub fn new(index: u32) -> Self {
                $ty(index)
            }

            pub fn index(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        })*
    };
}

ordinal!(NodeId, RelId, Symbol);

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub key: Symbol,
    pub value: PropertyValue,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("duplicate property `{0}`")]
    DuplicateProperty(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("empty {0}")]
    EmptyName(&'static str),
    #[error("dangling endpoint: node {0} does not exist")]
    DanglingEndpoint(u64),
    #[error("range {start}..{end} out of bounds for {len} elements")]
    OutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("graph capacity of {} elements exceeded", u32::MAX)]
    CapacityExceeded,
}

#[derive(Debug, Default)]
struct Tables {
    symbols: IndexSet<Box<str>>,

    node_label_offsets: Vec<usize>,
    node_labels: Vec<Symbol>,
    node_prop_offsets: Vec<usize>,
    node_props: Vec<Property>,

    rel_types: Vec<Symbol>,
    rel_ends: Vec<(NodeId, NodeId)>,
    rel_prop_offsets: Vec<usize>,
    rel_props: Vec<Property>,
}

impl Tables {
    fn new() -> Self {
        Tables {
            node_label_offsets: vec![0],
            node_prop_offsets: vec![0],
            rel_prop_offsets: vec![0],
            ..Default::default()
        }
    }

    fn intern(&mut self, name: &str) -> Symbol {
        if let Some(i) = self.symbols.get_index_of(name) {
            return Symbol(i as u32);
        }
        let (i, _) = self.symbols.insert_full(name.into());
        Symbol(i as u32)
    }

    fn resolve(&self, symbol: Symbol) -> &str {
        &self.symbols[symbol.index()]
    }

    fn node_count(&self) -> usize {
        self.node_label_offsets.len() - 1
    }

    fn relationship_count(&self) -> usize {
        self.rel_types.len()
    }

    fn node(&self, index: usize) -> NodeView<'_> {
        let labels =
            &self.node_labels[self.node_label_offsets[index]..self.node_label_offsets[index + 1]];
        let props =
            &self.node_props[self.node_prop_offsets[index]..self.node_prop_offsets[index + 1]];
        NodeView {
            tables: self,
            id: NodeId(index as u32),
            labels,
            props,
        }
    }

    fn relationship(&self, index: usize) -> RelationshipView<'_> {
        let props = &self.rel_props[self.rel_prop_offsets[index]..self.rel_prop_offsets[index + 1]];
        let (start, end) = self.rel_ends[index];
        RelationshipView {
            tables: self,
            id: RelId(index as u32),
            rel_type: self.rel_types[index],
            start,
            end,
            props,
        }
    }

    /// Appends properties for one element, rolling back on a duplicate or empty key.
    fn push_props<K, P>(&mut self, props: P, target: PropTarget) -> Result<(), GraphError>
    where
        K: AsRef<str>,
        P: IntoIterator<Item = (K, PropertyValue)>,
    {
        let base = self.props_mut(target).len();
        for (name, value) in props {
            let name = name.as_ref();
            if name.is_empty() {
                self.props_mut(target).truncate(base);
                return Err(GraphError::EmptyName("property name"));
            }
            let key = self.intern(name);
            let out = self.props_mut(target);
            if out[base..].iter().any(|p| p.key == key) {
                out.truncate(base);
                return Err(GraphError::DuplicateProperty(name.to_string()));
            }
            out.push(Property { key, value });
        }
        Ok(())
    }

    fn props_mut(&mut self, target: PropTarget) -> &mut Vec<Property> {
        match target {
            PropTarget::Node => &mut self.node_props,
            PropTarget::Relationship => &mut self.rel_props,
        }
    }
}

#[derive(Clone, Copy)]
enum PropTarget {
    Node,
    Relationship,
}

/// Mutable, single-writer graph under construction.
#[derive(Debug)]
pub struct GraphBuilder {
    tables: Tables,
}

impl Default for GraphBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder {
            tables: Tables::new(),
        }
    }

    /// Appends a node and returns its dense id.
    ///
    /// Fails without modifying the graph if a label or property name repeats
    /// or is empty.
    pub fn add_node<L, S, P, K>(&mut self, labels: L, props: P) -> Result<NodeId, GraphError>
    where
        L: IntoIterator<Item = S>,
        S: AsRef<str>,
        P: IntoIterator<Item = (K, PropertyValue)>,
        K: AsRef<str>,
    {
        let index = self.tables.node_count();
        if index >= u32::MAX as usize {
            return Err(GraphError::CapacityExceeded);
        }
        let t = &mut self.tables;
        let label_base = t.node_labels.len();
        for label in labels {
            let label = label.as_ref();
            if label.is_empty() {
                t.node_labels.truncate(label_base);
                return Err(GraphError::EmptyName("label"));
            }
            let sym = t.intern(label);
            if t.node_labels[label_base..].contains(&sym) {
                t.node_labels.truncate(label_base);
                return Err(GraphError::DuplicateLabel(label.to_string()));
            }
            t.node_labels.push(sym);
        }
        if let Err(e) = t.push_props(props, PropTarget::Node) {
            t.node_labels.truncate(label_base);
            return Err(e);
        }
        t.node_label_offsets.push(t.node_labels.len());
        t.node_prop_offsets.push(t.node_props.len());
        Ok(NodeId(index as u32))
    }

    /// Appends a relationship between two existing nodes. Self-loops are allowed.
    pub fn add_relationship<P, K>(
        &mut self,
        rel_type: &str,
        start: NodeId,
        end: NodeId,
        props: P,
    ) -> Result<RelId, GraphError>
    where
        P: IntoIterator<Item = (K, PropertyValue)>,
        K: AsRef<str>,
    {
        let index = self.tables.relationship_count();
        if index >= u32::MAX as usize {
            return Err(GraphError::CapacityExceeded);
        }
        if rel_type.is_empty() {
            return Err(GraphError::EmptyName("relationship type"));
        }
        let nodes = self.tables.node_count();
        for endpoint in [start, end] {
            if endpoint.index() >= nodes {
                return Err(GraphError::DanglingEndpoint(endpoint.0 as u64));
            }
        }
        let t = &mut self.tables;
        let sym = t.intern(rel_type);
        t.push_props(props, PropTarget::Relationship)?;
        t.rel_types.push(sym);
        t.rel_ends.push((start, end));
        t.rel_prop_offsets.push(t.rel_props.len());
        Ok(RelId(index as u32))
    }

    pub fn node_count(&self) -> usize {
        self.tables.node_count()
    }

    pub fn relationship_count(&self) -> usize {
        self.tables.relationship_count()
    }

    pub fn node(&self, id: NodeId) -> Option<NodeView<'_>> {
        (id.index() < self.node_count()).then(|| self.tables.node(id.index()))
    }

    pub fn relationship(&self, id: RelId) -> Option<RelationshipView<'_>> {
        (id.index() < self.relationship_count()).then(|| self.tables.relationship(id.index()))
    }

    /// Ends the build phase. The returned graph can no longer be mutated.
    pub fn freeze(mut self) -> Graph {
        let t = &mut self.tables;
        t.node_labels.shrink_to_fit();
        t.node_props.shrink_to_fit();
        t.rel_props.shrink_to_fit();
        Graph {
            tables: self.tables,
        }
    }
}

/// Immutable graph, safe to scan concurrently.
#[derive(Debug)]
pub struct Graph {
    tables: Tables,
}

impl Graph {
    pub fn empty() -> Self {
        GraphBuilder::new().freeze()
    }

    pub fn node_count(&self) -> usize {
        self.tables.node_count()
    }

    pub fn relationship_count(&self) -> usize {
        self.tables.relationship_count()
    }

    pub fn node(&self, id: NodeId) -> Option<NodeView<'_>> {
        (id.index() < self.node_count()).then(|| self.tables.node(id.index()))
    }

    pub fn relationship(&self, id: RelId) -> Option<RelationshipView<'_>> {
        (id.index() < self.relationship_count()).then(|| self.tables.relationship(id.index()))
    }

    /// Nodes with ids in `range`, ascending.
    pub fn scan_nodes(
        &self,
        range: Range<usize>,
    ) -> Result<impl ExactSizeIterator<Item = NodeView<'_>> + '_, GraphError> {
        check_range(&range, self.node_count())?;
        Ok(range.map(move |i| self.tables.node(i)))
    }

    /// Relationships with ids in `range`, ascending.
    pub fn scan_relationships(
        &self,
        range: Range<usize>,
    ) -> Result<impl ExactSizeIterator<Item = RelationshipView<'_>> + '_, GraphError> {
        check_range(&range, self.relationship_count())?;
        Ok(range.map(move |i| self.tables.relationship(i)))
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeView<'_>> + '_ {
        (0..self.node_count()).map(move |i| self.tables.node(i))
    }

    pub fn relationships(&self) -> impl ExactSizeIterator<Item = RelationshipView<'_>> + '_ {
        (0..self.relationship_count()).map(move |i| self.tables.relationship(i))
    }

    pub fn resolve(&self, symbol: Symbol) -> &str {
        self.tables.resolve(symbol)
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.tables
            .symbols
            .get_index_of(name)
            .map(|i| Symbol(i as u32))
    }

    pub fn symbol_count(&self) -> usize {
        self.tables.symbols.len()
    }
}

fn check_range(range: &Range<usize>, len: usize) -> Result<(), GraphError> {
    if range.start > range.end || range.end > len {
        return Err(GraphError::OutOfBounds {
            start: range.start,
            end: range.end,
            len,
        });
    }
    Ok(())
}

/// Read-only view of one node.
#[derive(Clone, Copy)]
pub struct NodeView<'g> {
    tables: &'g Tables,
    id: NodeId,
    labels: &'g [Symbol],
    props: &'g [Property],
}

impl<'g> NodeView<'g> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn label_symbols(&self) -> &'g [Symbol] {
        self.labels
    }

    pub fn labels(&self) -> impl Iterator<Item = &'g str> + 'g {
        let tables = self.tables;
        self.labels.iter().map(move |&s| tables.resolve(s))
    }

    pub fn raw_properties(&self) -> &'g [Property] {
        self.props
    }

    pub fn properties(&self) -> impl Iterator<Item = (&'g str, &'g PropertyValue)> + 'g {
        let tables = self.tables;
        self.props
            .iter()
            .map(move |p| (tables.resolve(p.key), &p.value))
    }

    pub fn property(&self, name: &str) -> Option<&'g PropertyValue> {
        self.properties().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

impl fmt::Debug for NodeView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Node")
            .field("id", &self.id)
            .field("labels", &self.labels().collect::<Vec<_>>())
            .field("properties", &self.properties().collect::<Vec<_>>())
            .finish()
    }
}

/// Read-only view of one relationship.
#[derive(Clone, Copy)]
pub struct RelationshipView<'g> {
    tables: &'g Tables,
    id: RelId,
    rel_type: Symbol,
    start: NodeId,
    end: NodeId,
    props: &'g [Property],
}

impl<'g> RelationshipView<'g> {
    pub fn id(&self) -> RelId {
        self.id
    }

    pub fn type_symbol(&self) -> Symbol {
        self.rel_type
    }

    pub fn rel_type(&self) -> &'g str {
        self.tables.resolve(self.rel_type)
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn end(&self) -> NodeId {
        self.end
    }

    pub fn raw_properties(&self) -> &'g [Property] {
        self.props
    }

    pub fn properties(&self) -> impl Iterator<Item = (&'g str, &'g PropertyValue)> + 'g {
        let tables = self.tables;
        self.props
            .iter()
            .map(move |p| (tables.resolve(p.key), &p.value))
    }

    pub fn property(&self, name: &str) -> Option<&'g PropertyValue> {
        self.properties().find(|(k, _)| *k == name).map(|(_, v)| v)
    }
}

impl fmt::Debug for RelationshipView<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relationship")
            .field("id", &self.id)
            .field("type", &self.rel_type())
            .field("start", &self.start)
            .field("end", &self.end)
            .field("properties", &self.properties().collect::<Vec<_>>())
            .finish()
    }
}
