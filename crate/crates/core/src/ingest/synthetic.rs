//! Seeded synthetic graphs with injected type faults.
//!
//! Every generated property is drawn under its schema type, except that with
//! probability `flip_rate` it is drawn under the schema entry's alternate type
//! instead. Each such flip is recorded in a [`FaultLedger`], which is the
//! ground truth a detector is checked against.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use chrono::{Duration, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::graph::{ElementKind, Graph, GraphBuilder, NodeId, PropertyValue, ValueType};

fn always() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertySchema {
    pub name: String,
    pub tag: ValueType,
    /// Type written when a value is flipped. Defaults to
    /// [`ValueType::default_alternate`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternate: Option<ValueType>,
    /// Probability that an element carries this property.
    #[serde(default = "always")]
    pub presence: f64,
}

impl PropertySchema {
    pub fn new(name: &str, tag: ValueType) -> Self {
        PropertySchema {
            name: name.to_string(),
            tag,
            alternate: None,
            presence: 1.0,
        }
    }

    pub fn with_alternate(mut self, alternate: ValueType) -> Self {
        self.alternate = Some(alternate);
        self
    }

    pub fn with_presence(mut self, presence: f64) -> Self {
        self.presence = presence;
        self
    }

    pub fn alternate_tag(&self) -> ValueType {
        self.alternate
            .unwrap_or_else(|| self.tag.default_alternate())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelSchema {
    pub label: String,
    pub properties: Vec<PropertySchema>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelSchema {
    #[serde(rename = "type")]
    pub rel_type: String,
    pub properties: Vec<PropertySchema>,
}

/// Parameters of a synthetic graph. Nodes pick a label schema uniformly at
/// random; relationships pick a relationship schema and two endpoints
/// uniformly at random.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub node_count: usize,
    #[serde(default)]
    pub rel_count: usize,
    #[serde(default)]
    pub label_schemas: Vec<LabelSchema>,
    #[serde(default)]
    pub rel_schemas: Vec<RelSchema>,
    #[serde(default)]
    pub flip_rate: f64,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), IngestError> {
        let err = |m: String| Err(IngestError::Spec(m));
        if !(0.0..=1.0).contains(&self.flip_rate) {
            return err(format!("flip_rate {} outside [0, 1]", self.flip_rate));
        }
        if self.node_count > u32::MAX as usize || self.rel_count > u32::MAX as usize {
            return err("element count exceeds graph capacity".into());
        }
        if self.rel_count > 0 && self.node_count == 0 {
            return err("relationships need at least one node".into());
        }
        if self.rel_count > 0 && self.rel_schemas.is_empty() {
            return err("relationships need at least one relationship schema".into());
        }
        let groups = self
            .label_schemas
            .iter()
            .map(|s| ("label", s.label.as_str(), &s.properties))
            .chain(
                self.rel_schemas
                    .iter()
                    .map(|s| ("relationship type", s.rel_type.as_str(), &s.properties)),
            );
        let mut seen = HashSet::new();
        for (what, name, props) in groups {
            if name.is_empty() {
                return err(format!("empty {what}"));
            }
            if !seen.insert((what, name)) {
                return err(format!("{what} `{name}` has two schemas"));
            }
            let mut names = HashSet::new();
            for p in props {
                if p.name.is_empty() {
                    return err(format!("empty property name under `{name}`"));
                }
                if !names.insert(p.name.as_str()) {
                    return err(format!("property `{name}.{}` declared twice", p.name));
                }
                if !(0.0..=1.0).contains(&p.presence) {
                    return err(format!(
                        "presence {} of `{name}.{}` outside [0, 1]",
                        p.presence, p.name
                    ));
                }
                if p.alternate_tag() == p.tag {
                    return err(format!("alternate of `{name}.{}` equals its tag", p.name));
                }
            }
        }
        Ok(())
    }
}

/// One injected type flip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub kind: ElementKind,
    /// Dense id of the element carrying the flipped value.
    pub element: usize,
    pub group: Arc<str>,
    pub property: Arc<str>,
    pub wrong_tag: ValueType,
}

/// Every flip performed during generation, in generation order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultLedger {
    faults: Vec<Fault>,
}

impl FaultLedger {
    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fault> {
        self.faults.iter()
    }

    /// Distinct `(group, property)` pairs that received at least one flip.
    pub fn distinct_pairs(&self, kind: ElementKind) -> BTreeSet<(String, String)> {
        self.faults
            .iter()
            .filter(|f| f.kind == kind)
            .map(|f| (f.group.to_string(), f.property.to_string()))
            .collect()
    }
}

struct CompiledSchema {
    group: Arc<str>,
    props: Vec<(Arc<str>, ValueType, ValueType, f64)>,
}

fn compile<'a>(
    schemas: impl Iterator<Item = (&'a str, &'a [PropertySchema])>,
) -> Vec<CompiledSchema> {
    schemas
        .map(|(group, props)| CompiledSchema {
            group: group.into(),
            props: props
                .iter()
                .map(|p| (p.name.as_str().into(), p.tag, p.alternate_tag(), p.presence))
                .collect(),
        })
        .collect()
}

/// Draws one schema's properties, recording flips.
fn draw_props(
    rng: &mut ChaCha8Rng,
    schema: &CompiledSchema,
    flip_rate: f64,
    kind: ElementKind,
    element: usize,
    ledger: &mut Vec<Fault>,
) -> Vec<(Arc<str>, PropertyValue)> {
    let mut out = Vec::with_capacity(schema.props.len());
    for (name, tag, alternate, presence) in &schema.props {
        if !rng.random_bool(*presence) {
            continue;
        }
        let tag = if rng.random_bool(flip_rate) {
            ledger.push(Fault {
                kind,
                element,
                group: schema.group.clone(),
                property: name.clone(),
                wrong_tag: *alternate,
            });
            *alternate
        } else {
            *tag
        };
        out.push((name.clone(), random_value(rng, tag)));
    }
    out
}

fn random_long(rng: &mut ChaCha8Rng) -> i64 {
    rng.random_range(0..10_000_000_000)
}

fn random_double(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..1_000_000.0)
}

fn random_string(rng: &mut ChaCha8Rng) -> Box<str> {
    format!("{:010}", rng.random_range(0..10_000_000_000u64)).into()
}

fn random_value(rng: &mut ChaCha8Rng, tag: ValueType) -> PropertyValue {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid date");
    let len = if tag.is_array() {
        rng.random_range(0..4)
    } else {
        0
    };
    match tag {
        ValueType::Boolean => PropertyValue::Boolean(rng.random()),
        ValueType::Long => PropertyValue::Long(random_long(rng)),
        ValueType::Double => PropertyValue::Double(random_double(rng)),
        ValueType::String => PropertyValue::String(random_string(rng)),
        ValueType::LocalDate => {
            PropertyValue::LocalDate(epoch + Duration::days(rng.random_range(0..36_525)))
        }
        ValueType::LocalDateTime => {
            let day = epoch + Duration::days(rng.random_range(0..36_525));
            let secs = Duration::seconds(rng.random_range(0..86_400));
            PropertyValue::LocalDateTime(day.and_hms_opt(0, 0, 0).expect("midnight") + secs)
        }
        ValueType::BooleanArray => {
            PropertyValue::BooleanArray((0..len).map(|_| rng.random()).collect())
        }
        ValueType::LongArray => {
            PropertyValue::LongArray((0..len).map(|_| random_long(rng)).collect())
        }
        ValueType::DoubleArray => {
            PropertyValue::DoubleArray((0..len).map(|_| random_double(rng)).collect())
        }
        ValueType::StringArray => {
            PropertyValue::StringArray((0..len).map(|_| random_string(rng)).collect())
        }
    }
}

/// Builds the graph described by `spec`. Deterministic in the spec, seed
/// included.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Graph, FaultLedger), IngestError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut builder = GraphBuilder::new();
    let mut faults = Vec::new();

    let labels = compile(
        spec.label_schemas
            .iter()
            .map(|s| (s.label.as_str(), s.properties.as_slice())),
    );
    let rel_types = compile(
        spec.rel_schemas
            .iter()
            .map(|s| (s.rel_type.as_str(), s.properties.as_slice())),
    );
    let no_labels: [&str; 0] = [];

    for i in 0..spec.node_count {
        let added = if labels.is_empty() {
            builder.add_node(no_labels, Vec::<(&str, PropertyValue)>::new())
        } else {
            let schema = &labels[rng.random_range(0..labels.len())];
            let props = draw_props(
                &mut rng,
                schema,
                spec.flip_rate,
                ElementKind::Nodes,
                i,
                &mut faults,
            );
            builder.add_node([&*schema.group], props)
        };
        added.expect("validated schema yields valid nodes");
    }

    let n = spec.node_count as u32;
    for i in 0..spec.rel_count {
        let schema = &rel_types[rng.random_range(0..rel_types.len())];
        let start = NodeId::new(rng.random_range(0..n));
        let end = NodeId::new(rng.random_range(0..n));
        let props = draw_props(
            &mut rng,
            schema,
            spec.flip_rate,
            ElementKind::Relationships,
            i,
            &mut faults,
        );
        builder
            .add_relationship(&schema.group, start, end, props)
            .expect("validated schema yields valid relationships");
    }

    Ok((builder.freeze(), FaultLedger { faults }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::write_jsonl;

    fn phone_spec(node_count: usize, flip_rate: f64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            node_count,
            rel_count: 0,
            label_schemas: vec![LabelSchema {
                label: "PHONE".into(),
                properties: vec![
                    PropertySchema::new("phone", ValueType::String).with_alternate(ValueType::Long)
                ],
            }],
            rel_schemas: vec![],
            flip_rate,
            seed,
        }
    }

    fn jsonl(g: &Graph) -> (Vec<u8>, Vec<u8>) {
        let (mut n, mut r) = (Vec::new(), Vec::new());
        write_jsonl(g, &mut n, Some(&mut r)).unwrap();
        (n, r)
    }

    #[test]
    fn empty_spec() {
        let (g, ledger) = generate_synthetic(&phone_spec(0, 0.5, 1)).unwrap();
        assert_eq!((g.node_count(), g.relationship_count()), (0, 0));
        assert!(ledger.is_empty());
    }

    #[test]
    fn zero_flip_rate_matches_schema() {
        let (g, ledger) = generate_synthetic(&phone_spec(2000, 0.0, 3)).unwrap();
        assert!(ledger.is_empty());
        assert!(g
            .nodes()
            .all(|n| n.property("phone").unwrap().value_type() == ValueType::String));
    }

    #[test]
    fn phone_ledger_matches_recount_and_is_reproducible() {
        let spec = phone_spec(10_000, 0.05, 1);
        let (g, ledger) = generate_synthetic(&spec).unwrap();
        // brute-force recount of flips in the emitted graph
        let flipped: Vec<usize> = g
            .nodes()
            .filter(|n| n.property("phone").map(|v| v.value_type()) == Some(ValueType::Long))
            .map(|n| n.id().index())
            .collect();
        let recorded: Vec<usize> = ledger.iter().map(|f| f.element).collect();
        assert_eq!(flipped, recorded);
        assert!(ledger.iter().all(|f| f.wrong_tag == ValueType::Long));
        // around 5% of 10k
        assert!((350..650).contains(&ledger.len()), "{}", ledger.len());

        let (g2, ledger2) = generate_synthetic(&spec).unwrap();
        assert_eq!(ledger, ledger2);
        assert_eq!(jsonl(&g), jsonl(&g2));

        let (g3, _) = generate_synthetic(&phone_spec(10_000, 0.05, 2)).unwrap();
        assert_ne!(jsonl(&g), jsonl(&g3));
    }

    #[test]
    fn validation() {
        let mut s = phone_spec(10, 1.5, 0);
        assert!(matches!(generate_synthetic(&s), Err(IngestError::Spec(_))));
        s.flip_rate = 0.0;
        s.label_schemas[0].properties[0].presence = -0.1;
        assert!(s.validate().is_err());
        s.label_schemas[0].properties[0].presence = 1.0;
        s.label_schemas[0].properties[0].alternate = Some(ValueType::String);
        assert!(s.validate().is_err());
        s.label_schemas[0].properties[0].alternate = None;
        assert!(s.validate().is_ok());
        s.rel_count = 1;
        assert!(s.validate().is_err());
        s.label_schemas.push(s.label_schemas[0].clone());
        s.rel_count = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn spec_json_field_names() {
        let text = r#"{
            "node_count": 5, "rel_count": 3, "flip_rate": 0.1, "seed": 9,
            "label_schemas": [{"label": "P", "properties": [{"name": "x", "tag": "Long", "presence": 0.5}]}],
            "rel_schemas": [{"type": "R", "properties": [{"name": "w", "tag": "Double", "alternate": "String"}]}]
        }"#;
        let spec: SyntheticSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.rel_schemas[0].rel_type, "R");
        assert_eq!(
            spec.label_schemas[0].properties[0].alternate_tag(),
            ValueType::String
        );
        let (g, _) = generate_synthetic(&spec).unwrap();
        assert_eq!((g.node_count(), g.relationship_count()), (5, 3));
        assert!(serde_json::from_str::<SyntheticSpec>(r#"{"node_count":1,"bogus":2}"#).is_err());
    }

    #[test]
    fn array_values_keep_their_tag() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for t in ValueType::ALL {
            for _ in 0..20 {
                assert_eq!(random_value(&mut rng, t).value_type(), t);
            }
        }
    }
}
