//! Typed property values and the closed type-name vocabulary.

use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

/// The closed set of value types a property may carry.
///
/// Variants are declared in ascending code-point order of their names so the
/// derived `Ord` matches the key order of the canonical report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ValueType {
    Boolean,
    BooleanArray,
    Double,
    DoubleArray,
    LocalDate,
    LocalDateTime,
    Long,
    LongArray,
    String,
    StringArray,
}

impl ValueType {
    pub const COUNT: usize = 10;

    pub const ALL: [ValueType; Self::COUNT] = [
        ValueType::Boolean,
        ValueType::BooleanArray,
        ValueType::Double,
        ValueType::DoubleArray,
        ValueType::LocalDate,
        ValueType::LocalDateTime,
        ValueType::Long,
        ValueType::LongArray,
        ValueType::String,
        ValueType::StringArray,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ValueType::Boolean => "Boolean",
            ValueType::BooleanArray => "BooleanArray",
            ValueType::Double => "Double",
            ValueType::DoubleArray => "DoubleArray",
            ValueType::LocalDate => "LocalDate",
            ValueType::LocalDateTime => "LocalDateTime",
            ValueType::Long => "Long",
            ValueType::LongArray => "LongArray",
            ValueType::String => "String",
            ValueType::StringArray => "StringArray",
        }
    }

    /// Dense position in [`ValueType::ALL`], usable as an array index.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_array(self) -> bool {
        matches!(
            self,
            ValueType::BooleanArray
                | ValueType::DoubleArray
                | ValueType::LongArray
                | ValueType::StringArray
        )
    }

    /// Element type of an array type; `None` for scalars.
    pub fn element(self) -> Option<ValueType> {
        match self {
            ValueType::BooleanArray => Some(ValueType::Boolean),
            ValueType::DoubleArray => Some(ValueType::Double),
            ValueType::LongArray => Some(ValueType::Long),
            ValueType::StringArray => Some(ValueType::String),
            _ => None,
        }
    }

    /// The type a buggy pipeline most plausibly writes in place of this one.
    ///
    /// Used by the synthetic generator when a schema entry does not name its
    /// own alternate. Never returns `self`.
    pub fn default_alternate(self) -> ValueType {
        match self {
            ValueType::String => ValueType::Long,
            ValueType::StringArray => ValueType::String,
            ValueType::BooleanArray | ValueType::DoubleArray | ValueType::LongArray => {
                ValueType::StringArray
            }
            _ => ValueType::String,
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown type tag `{0}`")]
pub struct UnknownTypeTag(pub String);

impl FromStr for ValueType {
    type Err = UnknownTypeTag;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ValueType::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or_else(|| UnknownTypeTag(s.to_string()))
    }
}

/// A single property value. Arrays are homogeneous by construction; an empty
/// array keeps its element type.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue {
    Boolean(bool),
    Long(i64),
    Double(f64),
    String(Box<str>),
    LocalDate(NaiveDate),
    LocalDateTime(NaiveDateTime),
    BooleanArray(Box<[bool]>),
    LongArray(Box<[i64]>),
    DoubleArray(Box<[f64]>),
    StringArray(Box<[Box<str>]>),
}

impl PropertyValue {
    pub fn value_type(&self) -> ValueType {
        match self {
            PropertyValue::Boolean(_) => ValueType::Boolean,
            PropertyValue::Long(_) => ValueType::Long,
            PropertyValue::Double(_) => ValueType::Double,
            PropertyValue::String(_) => ValueType::String,
            PropertyValue::LocalDate(_) => ValueType::LocalDate,
            PropertyValue::LocalDateTime(_) => ValueType::LocalDateTime,
            PropertyValue::BooleanArray(_) => ValueType::BooleanArray,
            PropertyValue::LongArray(_) => ValueType::LongArray,
            PropertyValue::DoubleArray(_) => ValueType::DoubleArray,
            PropertyValue::StringArray(_) => ValueType::StringArray,
        }
    }

    pub fn string(s: impl Into<Box<str>>) -> Self {
        PropertyValue::String(s.into())
    }

    pub fn string_array<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<Box<str>>,
    {
        PropertyValue::StringArray(items.into_iter().map(Into::into).collect())
    }
}

/// Canonical type name of a value, as it appears in a report.
pub fn value_type_name(value: &PropertyValue) -> &'static str {
    value.value_type().name()
}

macro_rules! impl_from {
    ($($ty:ty => $variant:ident),* $(,)?) => {
        $(impl From<$ty> for PropertyValue {
            fn from(v: $ty) -> Self {
                PropertyValue::$variant(v.into())
            }
        })*
    };
}

impl_from! {
    bool => Boolean,
    i64 => Long,
    f64 => Double,
    &str => String,
    String => String,
    NaiveDate => LocalDate,
    NaiveDateTime => LocalDateTime,
    Vec<bool> => BooleanArray,
    Vec<i64> => LongArray,
    Vec<f64> => DoubleArray,
}
