//! Type profile reports: the nested `group -> property -> type -> count` map,
//! its canonical JSON form, and inconsistency extraction.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph::ValueType;

/// Group key used for nodes that carry no label.
pub const NO_LABEL: &str = "_NO_LABEL";

pub type TypeCounts = BTreeMap<ValueType, u64>;
pub type PropertyCounts = BTreeMap<String, TypeCounts>;

/// Per-group, per-property count of observed value types.
///
/// Counts are always positive: a type that was never observed has no entry,
/// and neither does a property or group without observations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct TypeReport {
    groups: BTreeMap<String, PropertyCounts>,
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("invalid report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("zero count for {group}.{property}.{value_type}")]
    ZeroCount {
        group: String,
        property: String,
        value_type: ValueType,
    },
    #[error("empty object at {0}")]
    EmptyObject(String),
}

impl TypeReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` observations. A zero count leaves the report unchanged.
    pub fn add(&mut self, group: &str, property: &str, value_type: ValueType, count: u64) {
        if count == 0 {
            return;
        }
        let props = match self.groups.get_mut(group) {
            Some(p) => p,
            None => self.groups.entry(group.to_string()).or_default(),
        };
        let types = match props.get_mut(property) {
            Some(t) => t,
            None => props.entry(property.to_string()).or_default(),
        };
        *types.entry(value_type).or_insert(0) += count;
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &BTreeMap<String, PropertyCounts> {
        &self.groups
    }

    pub fn count(&self, group: &str, property: &str, value_type: ValueType) -> u64 {
        self.groups
            .get(group)
            .and_then(|p| p.get(property))
            .and_then(|t| t.get(&value_type))
            .copied()
            .unwrap_or(0)
    }

    /// Iterates `(group, property, type, count)` in canonical order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, ValueType, u64)> + '_ {
        self.groups.iter().flat_map(|(g, props)| {
            props.iter().flat_map(move |(p, types)| {
                types
                    .iter()
                    .map(move |(t, c)| (g.as_str(), p.as_str(), *t, *c))
            })
        })
    }

    /// Sum of all leaf counts.
    pub fn instances(&self) -> u64 {
        self.entries().map(|(_, _, _, c)| c).sum()
    }

    /// Adds every count of `other` into `self`.
    pub fn absorb(&mut self, other: &TypeReport) {
        for (g, p, t, c) in other.entries() {
            self.add(g, p, t, c);
        }
    }

    /// Canonical JSON: 2-space indentation, keys sorted by code point at every
    /// level, integer counts, trailing newline.
    pub fn to_json(&self) -> String {
        // BTreeMap<String, _> iterates in byte order, which for UTF-8 is code
        // point order; ValueType's Ord matches its name order.
        let mut out = serde_json::to_string_pretty(&self.groups)
            .expect("string-keyed maps of integers always serialize");
        out.push('\n');
        out
    }

    /// Parses a report, rejecting zero counts, empty objects and type names
    /// outside the closed vocabulary.
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let groups: BTreeMap<String, PropertyCounts> = serde_json::from_str(text)?;
        for (g, props) in &groups {
            if props.is_empty() {
                return Err(ReportError::EmptyObject(g.clone()));
            }
            for (p, types) in props {
                if types.is_empty() {
                    return Err(ReportError::EmptyObject(format!("{g}.{p}")));
                }
                if let Some((t, _)) = types.iter().find(|(_, c)| **c == 0) {
                    return Err(ReportError::ZeroCount {
                        group: g.clone(),
                        property: p.clone(),
                        value_type: *t,
                    });
                }
            }
        }
        Ok(TypeReport { groups })
    }
}

impl<'de> Deserialize<'de> for TypeReport {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        TypeReport::from_json(&value.to_string()).map_err(serde::de::Error::custom)
    }
}

/// Pointwise sum of any number of partial reports.
pub fn merge_partials<I>(partials: I) -> TypeReport
where
    I: IntoIterator<Item = TypeReport>,
{
    let mut iter = partials.into_iter();
    let Some(mut acc) = iter.next() else {
        return TypeReport::new();
    };
    for partial in iter {
        acc.absorb(&partial);
    }
    acc
}

/// A `(group, property)` pair observed with more than one value type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inconsistency {
    pub group: String,
    pub property: String,
    pub type_counts: TypeCounts,
    pub majority_type: ValueType,
    pub minority_total: u64,
}

impl fmt::Display for Inconsistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}:", self.group, self.property)?;
        for (t, c) in &self.type_counts {
            write!(f, " {t}={c}")?;
        }
        write!(
            f,
            " (majority {}, minority {})",
            self.majority_type, self.minority_total
        )
    }
}

/// Every `(group, property)` with two or more observed types, sorted by group
/// then property. An empty result means the profile is fully consistent.
pub fn find_inconsistencies(report: &TypeReport) -> Vec<Inconsistency> {
    let mut found = Vec::new();
    for (group, props) in &report.groups {
        for (property, types) in props {
            if types.len() < 2 {
                continue;
            }
            // Strictly-greater keeps the first (lexicographically smallest) type on ties.
            let mut majority = None::<(ValueType, u64)>;
            for (&t, &c) in types {
                if majority.is_none_or(|(_, best)| c > best) {
                    majority = Some((t, c));
                }
            }
            let (majority_type, majority_count) = majority.expect("at least two types");
            let total: u64 = types.values().sum();
            found.push(Inconsistency {
                group: group.clone(),
                property: property.clone(),
                type_counts: types.clone(),
                majority_type,
                minority_total: total - majority_count,
            });
        }
    }
    found
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub groups: usize,
    /// Distinct `(group, property)` pairs.
    pub properties: usize,
    pub instances: u64,
    pub inconsistent_pairs: usize,
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "groups={} properties={} instances={} inconsistent_pairs={}",
            self.groups, self.properties, self.instances, self.inconsistent_pairs
        )
    }
}

pub fn summarize(report: &TypeReport) -> Summary {
    Summary {
        groups: report.groups.len(),
        properties: report.groups.values().map(BTreeMap::len).sum(),
        instances: report.instances(),
        inconsistent_pairs: find_inconsistencies(report).len(),
    }
}
