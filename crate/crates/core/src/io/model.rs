//! Model documents: a truth table or one expression per coordinate.
//!
//! ```json
//! {"n": 1, "m": 0, "table": {"0": "1", "1": "0"}}
//! {"n": 2, "m": 0, "coords": ["1", "1"]}
//! ```
//!
//! Table keys are `n + m` bit strings (state bits, then input bits) and
//! values are `n` bit strings, coordinate 1 leftmost.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::field::{ParamVectorField, VectorField};
use crate::io::expr::parse_coordinate;
use crate::state::{State, TotalState, MAX_WIDTH};

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub n: usize,
    #[serde(default)]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<UniqueMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<String>>,
}

/// A string map that rejects repeated keys when read.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
#[serde(transparent)]
pub struct UniqueMap(pub BTreeMap<String, String>);

impl<'de> Deserialize<'de> for UniqueMap {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct UniqueVisitor;

        impl<'de> Visitor<'de> for UniqueVisitor {
            type Value = UniqueMap;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from bit strings to bit strings")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<UniqueMap, A::Error> {
                let mut map = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, String>()? {
                    if map.contains_key(&key) {
                        return Err(serde::de::Error::custom(format!("duplicate key {key:?}")));
                    }
                    map.insert(key, value);
                }
                Ok(UniqueMap(map))
            }
        }

        deserializer.deserialize_map(UniqueVisitor)
    }
}

impl ModelDocument {
    /// The table document of `f`, rows in ascending order.
    pub fn from_field(f: &ParamVectorField) -> Self {
        let (n, m) = (f.state_width(), f.input_width());
        let table = f
            .table()
            .iter()
            .enumerate()
            .map(|(z, &value)| {
                let key = State::new(z as u32, n + m).expect("row index within width");
                let value = State::new(value, n).expect("value within width");
                (key.to_string(), value.to_string())
            })
            .collect();
        Self {
            n,
            m,
            table: Some(UniqueMap(table)),
            coords: None,
        }
    }

    pub fn from_autonomous(g: &VectorField) -> Self {
        Self::from_field(&ParamVectorField::autonomous(g))
    }

    /// Elaborates the document into a total field.
    pub fn to_field(&self) -> Result<ParamVectorField> {
        let (n, m) = (self.n, self.m);
        if n == 0 || n > MAX_WIDTH {
            return Err(Error::Model(format!("n = {n} out of range 1..={MAX_WIDTH}")));
        }
        if n + m > MAX_WIDTH {
            return Err(Error::Model(format!("n + m = {} exceeds {MAX_WIDTH}", n + m)));
        }
        match (&self.table, &self.coords) {
            (Some(table), None) => table_field(n, m, &table.0),
            (None, Some(coords)) => expression_field(n, m, coords),
            (Some(_), Some(_)) => Err(Error::Model("give either \"table\" or \"coords\", not both".into())),
            (None, None) => Err(Error::Model("missing \"table\" or \"coords\"".into())),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

fn bits(text: &str, width: usize, role: &str) -> Result<State> {
    let s: State = text
        .parse()
        .map_err(|e| Error::Model(format!("{role} {text:?}: {e}")))?;
    if s.width() != width {
        return Err(Error::Model(format!(
            "{role} {text:?} has {} bits, expected {width}",
            s.width()
        )));
    }
    Ok(s)
}

fn table_field(n: usize, m: usize, rows: &BTreeMap<String, String>) -> Result<ParamVectorField> {
    let size = 1usize << (n + m);
    let mut table = vec![None; size];
    for (key, value) in rows {
        let z = bits(key, n + m, "key")?;
        let v = bits(value, n, &format!("value of row {key:?}"))?;
        table[z.value() as usize] = Some(v.value());
    }
    let mut out = Vec::with_capacity(size);
    for (z, row) in table.into_iter().enumerate() {
        match row {
            Some(v) => out.push(v),
            None => {
                let key = State::new(z as u32, n + m).expect("row index within width");
                return Err(Error::Model(format!("missing row {:?}", key.to_string())));
            }
        }
    }
    ParamVectorField::from_table(n, m, out)
}

fn expression_field(n: usize, m: usize, coords: &[String]) -> Result<ParamVectorField> {
    if coords.len() != n {
        return Err(Error::Model(format!("{} coordinate expressions for n = {n}", coords.len())));
    }
    let exprs = coords
        .iter()
        .map(|text| parse_coordinate(text, n, m))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Vec::with_capacity(1 << (n + m));
    for z in 0..(1u32 << (n + m)) {
        let total = TotalState::from_joined(State::new(z, n + m)?, n)?;
        let values = exprs
            .iter()
            .map(|e| e.eval(&total))
            .collect::<Result<Vec<bool>>>()?;
        table.push(State::from_bools(&values)?.value());
    }
    ParamVectorField::from_table(n, m, table)
}

/// Parses a model document.
pub fn parse_model(text: &str) -> Result<ParamVectorField> {
    let doc: ModelDocument =
        serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
    doc.to_field()
}

/// The table document of `f` as pretty JSON.
pub fn serialize_model(f: &ParamVectorField) -> String {
    ModelDocument::from_field(f).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::fixtures::*;
    use proptest::prelude::*;

    #[test]
    fn parse_examples() {
        let n = parse_model(r#"{"n":1,"m":0,"table":{"0":"1","1":"0"}}"#).unwrap();
        assert_eq!(n.as_autonomous().unwrap(), not());
        let c = parse_model(r#"{"n":2,"m":0,"coords":["1","1"]}"#).unwrap();
        assert_eq!(c.as_autonomous().unwrap(), const11());
        let b = parse_model(r#"{"n":1,"m":1,"coords":["v1"]}"#).unwrap();
        assert_eq!(b, buf());
        let defaulted = parse_model(r#"{"n":1,"table":{"0":"1","1":"0"}}"#).unwrap();
        assert_eq!(defaulted, n);
    }

    fn model_error(text: &str) -> String {
        match parse_model(text) {
            Err(Error::Model(msg)) => msg,
            Err(e @ Error::Expression { .. }) => e.to_string(),
            other => panic!("expected model error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_offence() {
        assert!(model_error(r#"{"n":1,"m":0,"table":{"0":"1"}}"#).contains(r#"missing row "1""#));
        assert!(model_error(r#"{"n":1,"table":{"0":"1","0":"0","1":"0"}}"#).contains("duplicate key"));
        assert!(model_error(r#"{"n":1,"table":{"0":"1","2":"0"}}"#).contains("bad bit"));
        assert!(model_error(r#"{"n":1,"table":{"0":"1","1":"00"}}"#).contains("expected 1"));
        assert!(model_error(r#"{"n":0,"table":{}}"#).contains("out of range"));
        assert!(model_error(r#"{"n":20,"m":5,"coords":[]}"#).contains("exceeds"));
        assert!(model_error(r#"{"n":1,"coords":["w2"]}"#).contains("w2"));
        assert!(model_error(r#"{"n":1,"coords":["w0"]}"#).contains("position 0"));
        assert!(model_error(r#"{"n":1,"coords":["1"],"extra":1}"#).contains("unknown field"));
        assert!(model_error(r#"{"n":1,"coords":["1"],"table":{"0":"1","1":"1"}}"#).contains("not both"));
    }

    #[test]
    fn serialization_is_sorted() {
        let text = serialize_model(&ParamVectorField::autonomous(&race()));
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = doc["table"].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["00", "01", "10", "11"]);
        assert_eq!(doc["table"]["00"], "11");
    }

    proptest! {
        #[test]
        fn round_trip(n in 1usize..4, m in 0usize..3, seed in any::<u64>()) {
            let mut x = seed | 1;
            let table: Vec<u32> = (0..1u32 << (n + m)).map(|_| {
                x ^= x << 13; x ^= x >> 7; x ^= x << 17;
                (x % (1 << n)) as u32
            }).collect();
            let f = ParamVectorField::from_table(n, m, table).unwrap();
            prop_assert_eq!(parse_model(&serialize_model(&f)).unwrap(), f);
        }
    }
}
