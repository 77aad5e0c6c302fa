//! Solver witness documents: the clasp `--outf=2` envelope and a plain
//! array-of-arrays shape.

use serde_json::Value;
use thiserror::Error;

use crate::asp::parse_asp;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessSet {
    /// Atom strings per witness, in emission order.
    pub witnesses: Vec<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unrecognized document shape: {0}")]
    Shape(String),
    #[error("witness {0} has no \"Value\" array")]
    MissingValue(usize),
    #[error("{0:?} is not a ground atom")]
    BadAtom(String),
}

fn atom_list(v: &Value, what: impl Fn() -> WitnessError) -> Result<Vec<String>, WitnessError> {
    let arr = v.as_array().ok_or_else(&what)?;
    arr.iter()
        .map(|a| {
            let s = a.as_str().ok_or_else(&what)?;
            let ok = parse_asp(&format!("{s}.")).ok().is_some_and(|p| {
                p.rules.len() == 1
                    && p.rules[0].head.len() == 1
                    && p.rules[0].head[0].is_ground()
                    && p.rules[0].pos.is_empty()
                    && p.rules[0].neg.is_empty()
            });
            if ok {
                Ok(s.to_owned())
            } else {
                Err(WitnessError::BadAtom(s.to_owned()))
            }
        })
        .collect()
}

pub fn parse_witness_json(text: &str) -> Result<WitnessSet, WitnessError> {
    let doc: Value = serde_json::from_str(text)?;
    let mut witnesses = Vec::new();
    match &doc {
        Value::Array(items) => {
            for (i, w) in items.iter().enumerate() {
                witnesses
                    .push(atom_list(w, || WitnessError::Shape(format!("element {i} is not an array of strings")))?);
            }
        }
        Value::Object(obj) => {
            let calls = obj
                .get("Call")
                .and_then(Value::as_array)
                .ok_or_else(|| WitnessError::Shape("missing \"Call\" array".into()))?;
            for call in calls {
                let Some(ws) = call.get("Witnesses") else { continue };
                let ws = ws.as_array().ok_or_else(|| WitnessError::Shape("\"Witnesses\" is not an array".into()))?;
                for w in ws {
                    let idx = witnesses.len();
                    let value = w.get("Value").ok_or(WitnessError::MissingValue(idx))?;
                    witnesses.push(atom_list(value, || WitnessError::MissingValue(idx))?);
                }
            }
        }
        _ => return Err(WitnessError::Shape("expected an object or an array".into())),
    }
    Ok(WitnessSet { witnesses })
}

/// Renders witnesses in the array-of-arrays shape.
pub fn render_witness_json(witnesses: &[Vec<String>]) -> String {
    serde_json::to_string(witnesses).expect("strings always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clasp_envelope() {
        let w = parse_witness_json(
            r#"{"Solver":"clasp","Call":[{"Witnesses":[{"Value":["g(q,1)","v_check1(p,1)"]}]}],"Time":{}}"#,
        )
        .unwrap();
        assert_eq!(w.witnesses, vec![vec!["g(q,1)".to_owned(), "v_check1(p,1)".to_owned()]]);
        assert!(parse_witness_json(r#"{"Call":[{}]}"#).unwrap().witnesses.is_empty());
    }

    #[test]
    fn array_shape_round_trip() {
        let w = parse_witness_json(r#"[["a"],["b","c"]]"#).unwrap();
        assert_eq!(w.witnesses.len(), 2);
        assert_eq!(parse_witness_json(&render_witness_json(&w.witnesses)).unwrap(), w);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_witness_json("{"), Err(WitnessError::Json(_))));
        assert!(matches!(parse_witness_json(r#"{"Call":[{"Witnesses":[{}]}]}"#), Err(WitnessError::MissingValue(0))));
        assert!(matches!(parse_witness_json(r#"[["X"]]"#), Err(WitnessError::BadAtom(_))));
    }
}
