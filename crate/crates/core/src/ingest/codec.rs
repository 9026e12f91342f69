//! Text encodings of typed property values.
//!
//! JSON form is `{"t": <type name>, "v": <payload>}`. Long payloads are JSON
//! strings so generic tooling never rounds them through a double. Doubles are
//! JSON numbers, except the non-finite values, which are the strings `NaN`,
//! `Infinity` and `-Infinity`. Dates use ISO-8601 without a zone.
//!
//! CSV cells hold the bare payload; array elements are separated by `;`.

use chrono::{NaiveDate, NaiveDateTime};
use serde_json::{json, Number, Value};

use super::DecodeError;
use crate::graph::{PropertyValue, ValueType};

const DATETIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%S%.f";

fn invalid(tag: ValueType, got: impl std::fmt::Display) -> DecodeError {
    DecodeError::Invalid(format!("invalid {tag} value {got}"))
}

pub fn encode_json(value: &PropertyValue) -> Value {
    let v = match value {
        PropertyValue::Boolean(b) => Value::Bool(*b),
        PropertyValue::Long(n) => Value::String(n.to_string()),
        PropertyValue::Double(d) => encode_double(*d),
        PropertyValue::String(s) => Value::String(s.to_string()),
        PropertyValue::LocalDate(d) => Value::String(d.to_string()),
        PropertyValue::LocalDateTime(dt) => Value::String(dt.format(DATETIME_FORMAT).to_string()),
        PropertyValue::BooleanArray(a) => a.iter().map(|b| Value::Bool(*b)).collect(),
        PropertyValue::LongArray(a) => a.iter().map(|n| Value::String(n.to_string())).collect(),
        PropertyValue::DoubleArray(a) => a.iter().map(|d| encode_double(*d)).collect(),
        PropertyValue::StringArray(a) => a.iter().map(|s| Value::String(s.to_string())).collect(),
    };
    json!({ "t": value.value_type().name(), "v": v })
}

fn encode_double(d: f64) -> Value {
    match Number::from_f64(d) {
        Some(n) => Value::Number(n),
        None if d.is_nan() => Value::String("NaN".into()),
        None if d > 0.0 => Value::String("Infinity".into()),
        None => Value::String("-Infinity".into()),
    }
}

/// Decodes a JSON payload under the named tag.
pub fn decode_json(tag: &str, v: &Value) -> Result<PropertyValue, DecodeError> {
    let tag: ValueType = tag
        .parse()
        .map_err(|_| DecodeError::UnknownTag(tag.to_string()))?;
    if let Some(elem) = tag.element() {
        let items = v.as_array().ok_or_else(|| invalid(tag, v))?;
        let scalars = items
            .iter()
            .map(|item| decode_scalar_json(elem, item))
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(collect_array(tag, scalars));
    }
    decode_scalar_json(tag, v)
}

fn decode_scalar_json(tag: ValueType, v: &Value) -> Result<PropertyValue, DecodeError> {
    let bad = || invalid(tag, v);
    Ok(match tag {
        ValueType::Boolean => PropertyValue::Boolean(v.as_bool().ok_or_else(bad)?),
        ValueType::Long => match v {
            Value::String(s) => PropertyValue::Long(s.parse().map_err(|_| bad())?),
            Value::Number(n) => PropertyValue::Long(n.as_i64().ok_or_else(bad)?),
            _ => return Err(bad()),
        },
        ValueType::Double => match v {
            Value::Number(n) => PropertyValue::Double(n.as_f64().ok_or_else(bad)?),
            Value::String(s) => PropertyValue::Double(parse_non_finite(s).ok_or_else(bad)?),
            _ => return Err(bad()),
        },
        ValueType::String => PropertyValue::string(v.as_str().ok_or_else(bad)?),
        ValueType::LocalDate | ValueType::LocalDateTime => {
            return decode_scalar_text(tag, v.as_str().ok_or_else(bad)?)
        }
        _ => unreachable!("array tags are handled by the caller"),
    })
}

fn parse_non_finite(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "Infinity" => Some(f64::INFINITY),
        "-Infinity" => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

fn decode_scalar_text(tag: ValueType, s: &str) -> Result<PropertyValue, DecodeError> {
    let bad = || invalid(tag, format_args!("`{s}`"));
    Ok(match tag {
        ValueType::Boolean => match s {
            "true" => PropertyValue::Boolean(true),
            "false" => PropertyValue::Boolean(false),
            _ => return Err(bad()),
        },
        ValueType::Long => PropertyValue::Long(s.trim().parse().map_err(|_| bad())?),
        ValueType::Double => {
            let s = s.trim();
            let d = match parse_non_finite(s) {
                Some(d) => d,
                None => s.parse().map_err(|_| bad())?,
            };
            PropertyValue::Double(d)
        }
        ValueType::String => PropertyValue::string(s),
        ValueType::LocalDate => {
            PropertyValue::LocalDate(NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| bad())?)
        }
        ValueType::LocalDateTime => {
            PropertyValue::LocalDateTime(s.parse::<NaiveDateTime>().map_err(|_| bad())?)
        }
        _ => unreachable!("array tags are handled by the caller"),
    })
}

/// Decodes a CSV cell. Array elements are `;`-separated.
pub fn decode_cell(tag: ValueType, cell: &str) -> Result<PropertyValue, DecodeError> {
    match tag.element() {
        Some(elem) => {
            let scalars = cell
                .split(';')
                .map(|item| decode_scalar_text(elem, item))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(collect_array(tag, scalars))
        }
        None => decode_scalar_text(tag, cell),
    }
}

fn collect_array(tag: ValueType, scalars: Vec<PropertyValue>) -> PropertyValue {
    macro_rules! unwrap_all {
        ($variant:ident, $array:ident) => {
            PropertyValue::$array(
                scalars
                    .into_iter()
                    .map(|s| match s {
                        PropertyValue::$variant(x) => x,
                        _ => unreachable!("element decoded under its own tag"),
                    })
                    .collect(),
            )
        };
    }
    match tag {
        ValueType::BooleanArray => unwrap_all!(Boolean, BooleanArray),
        ValueType::LongArray => unwrap_all!(Long, LongArray),
        ValueType::DoubleArray => unwrap_all!(Double, DoubleArray),
        ValueType::StringArray => unwrap_all!(String, StringArray),
        _ => unreachable!("only array tags are collected"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip(v: &PropertyValue) -> PropertyValue {
        let enc = encode_json(v);
        decode_json(enc["t"].as_str().unwrap(), &enc["v"]).unwrap()
    }

    #[test]
    fn long_is_a_json_string() {
        let enc = encode_json(&PropertyValue::Long(i64::MAX));
        assert_eq!(enc, json!({"t": "Long", "v": "9223372036854775807"}));
        assert_eq!(
            roundtrip(&PropertyValue::Long(i64::MAX)),
            PropertyValue::Long(i64::MAX)
        );
    }

    #[test]
    fn long_accepts_integer_numbers_but_not_garbage() {
        assert_eq!(
            decode_json("Long", &json!(7)).unwrap(),
            PropertyValue::Long(7)
        );
        assert!(matches!(
            decode_json("Long", &json!("abc")),
            Err(DecodeError::Invalid(_))
        ));
        assert!(decode_json("Long", &json!(1.5)).is_err());
        assert!(decode_json("Long", &json!(true)).is_err());
    }

    #[test]
    fn unknown_tag() {
        assert_eq!(
            decode_json("Point", &json!("x")),
            Err(DecodeError::UnknownTag("Point".into()))
        );
    }

    #[test]
    fn dates() {
        let d = decode_json("LocalDate", &json!("2021-02-22")).unwrap();
        assert_eq!(
            d,
            PropertyValue::LocalDate(NaiveDate::from_ymd_opt(2021, 2, 22).unwrap())
        );
        assert_eq!(
            encode_json(&d),
            json!({"t": "LocalDate", "v": "2021-02-22"})
        );
        let dt = decode_json("LocalDateTime", &json!("2021-02-22T10:11:12")).unwrap();
        assert_eq!(encode_json(&dt)["v"], json!("2021-02-22T10:11:12"));
        let frac = decode_json("LocalDateTime", &json!("2021-02-22T10:11:12.250")).unwrap();
        assert_eq!(roundtrip(&frac), frac);
        assert!(decode_json("LocalDate", &json!("2021-02-30")).is_err());
        assert!(decode_json("LocalDate", &json!(20210222)).is_err());
    }

    #[test]
    fn arrays() {
        let a = decode_json("LongArray", &json!(["1", "2"])).unwrap();
        assert_eq!(a, PropertyValue::LongArray(vec![1, 2].into()));
        let empty = decode_json("StringArray", &json!([])).unwrap();
        assert_eq!(empty.value_type(), ValueType::StringArray);
        assert!(decode_json("LongArray", &json!(["1", true])).is_err());
        assert!(decode_json("LongArray", &json!("1")).is_err());
    }

    #[test]
    fn non_finite_doubles() {
        for d in [f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(
                roundtrip(&PropertyValue::Double(d)),
                PropertyValue::Double(d)
            );
        }
        match roundtrip(&PropertyValue::Double(f64::NAN)) {
            PropertyValue::Double(d) => assert!(d.is_nan()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_cells() {
        assert_eq!(
            decode_cell(ValueType::Long, "7").unwrap(),
            PropertyValue::Long(7)
        );
        assert!(decode_cell(ValueType::Long, "x").is_err());
        assert_eq!(
            decode_cell(ValueType::StringArray, "a;b").unwrap(),
            PropertyValue::string_array(["a", "b"])
        );
        assert_eq!(
            decode_cell(ValueType::Boolean, "true").unwrap(),
            PropertyValue::Boolean(true)
        );
        assert!(decode_cell(ValueType::Boolean, "yes").is_err());
        assert_eq!(
            decode_cell(ValueType::DoubleArray, "1.5;2").unwrap(),
            PropertyValue::DoubleArray(vec![1.5, 2.0].into())
        );
    }

    fn arb_value() -> impl Strategy<Value = PropertyValue> {
        let date = (-100_000i32..100_000)
            .prop_map(|d| NaiveDate::from_num_days_from_ce_opt(700_000 + d).unwrap());
        prop_oneof![
            any::<bool>().prop_map(PropertyValue::Boolean),
            any::<i64>().prop_map(PropertyValue::Long),
            any::<f64>()
                .prop_filter("nan compares unequal", |d| !d.is_nan())
                .prop_map(PropertyValue::Double),
            ".*".prop_map(PropertyValue::string),
            date.clone().prop_map(PropertyValue::LocalDate),
            (date, 0u32..86_400, 0u32..1_000_000_000).prop_map(|(d, s, n)| {
                PropertyValue::LocalDateTime(
                    d.and_time(
                        chrono::NaiveTime::from_num_seconds_from_midnight_opt(s, n).unwrap(),
                    ),
                )
            }),
            prop::collection::vec(any::<bool>(), 0..4)
                .prop_map(|v| PropertyValue::BooleanArray(v.into())),
            prop::collection::vec(any::<i64>(), 0..4)
                .prop_map(|v| PropertyValue::LongArray(v.into())),
            prop::collection::vec(-1e300f64..1e300, 0..4)
                .prop_map(|v| PropertyValue::DoubleArray(v.into())),
            prop::collection::vec(".*", 0..4).prop_map(PropertyValue::string_array),
        ]
    }

    proptest! {
        #[test]
        fn json_encoding_round_trips(v in arb_value()) {
            prop_assert_eq!(roundtrip(&v), v);
        }
    }
}
