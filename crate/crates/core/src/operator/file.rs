//! JSON operator files.
//!
//! ```json
//! {"block_dim": 1,
//!  "alpha": {"kind": "constant", "value": [1, 0]},
//!  "beta":  {"kind": "periodic", "values": [[-1.5, 0], [1, 0], [1, 0]], "period": 3},
//!  "gamma": {"kind": "window", "entries": [{"index": 2, "value": [0, 1]}], "default": [1, 0]},
//!  "alpha_max": 1.0}
//! ```
//!
//! Scalars are `[re, im]` (a bare number is read as real). Blocks are row-major nested arrays
//! of scalars. Sampled generators use `{"kind": "sampled", "start": k0, "values": [...]}`.
//! Missing `*_max` bounds are computed from the stored values.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::linalg::{CMatrix, C64};

use super::{DiagonalGen, OperatorError, OperatorSpec};

fn err(msg: impl Into<String>) -> OperatorError {
    OperatorError::Parse(msg.into())
}

pub fn parse_scalar(v: &Value) -> Result<C64, OperatorError> {
    match v {
        Value::Number(x) => Ok(C64::new(x.as_f64().ok_or_else(|| err("bad number"))?, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| err("complex real part is not a number"))?;
            let im = a[1]
                .as_f64()
                .ok_or_else(|| err("complex imaginary part is not a number"))?;
            Ok(C64::new(re, im))
        }
        other => Err(err(format!("expected [re, im], got {other}"))),
    }
}

pub fn scalar_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn parse_block(v: &Value, p: usize) -> Result<CMatrix, OperatorError> {
    if p == 1 {
        if let Value::Array(rows) = v {
            // Accept [[re, im]] as a 1x1 block too.
            if rows.len() == 1 && rows[0].is_array() {
                if let Value::Array(inner) = &rows[0] {
                    if inner.len() == 1 {
                        return Ok(CMatrix::scalar(parse_scalar(&inner[0])?));
                    }
                }
            }
        }
        return Ok(CMatrix::scalar(parse_scalar(v)?));
    }
    let rows = v.as_array().ok_or_else(|| err("block must be an array of rows"))?;
    if rows.len() != p {
        return Err(err(format!("block has {} rows, expected {p}", rows.len())));
    }
    let mut data = Vec::with_capacity(p * p);
    for row in rows {
        let row = row.as_array().ok_or_else(|| err("block row must be an array"))?;
        if row.len() != p {
            return Err(err(format!("block row has {} entries, expected {p}", row.len())));
        }
        for z in row {
            data.push(parse_scalar(z)?);
        }
    }
    CMatrix::from_vec(p, p, data).map_err(OperatorError::from)
}

fn block_json(m: &CMatrix) -> Value {
    if m.rows() == 1 && m.cols() == 1 {
        return scalar_json(m[(0, 0)]);
    }
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|&z| scalar_json(z)).collect()))
            .collect(),
    )
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value, OperatorError> {
    obj.get(key).ok_or_else(|| err(format!("missing field `{key}`")))
}

fn parse_values(v: &Value, p: usize) -> Result<Vec<CMatrix>, OperatorError> {
    v.as_array()
        .ok_or_else(|| err("`values` must be an array"))?
        .iter()
        .map(|b| parse_block(b, p))
        .collect()
}

fn parse_gen(v: &Value, p: usize) -> Result<DiagonalGen, OperatorError> {
    let obj = v.as_object().ok_or_else(|| err("diagonal must be an object"))?;
    let kind = field(obj, "kind")?
        .as_str()
        .ok_or_else(|| err("`kind` must be a string"))?;
    match kind {
        "constant" => Ok(DiagonalGen::Constant(parse_block(field(obj, "value")?, p)?)),
        "periodic" => {
            let values = parse_values(field(obj, "values")?, p)?;
            if values.is_empty() {
                return Err(OperatorError::EmptyGenerator);
            }
            if let Some(declared) = obj.get("period") {
                let declared = declared
                    .as_u64()
                    .ok_or_else(|| err("`period` must be a positive integer"))? as usize;
                if declared != values.len() {
                    return Err(OperatorError::PeriodMismatch {
                        declared,
                        len: values.len(),
                    });
                }
            }
            Ok(DiagonalGen::Periodic(values))
        }
        "window" => {
            let default = parse_block(field(obj, "default")?, p)?;
            let mut entries = BTreeMap::new();
            if let Some(list) = obj.get("entries") {
                for e in list.as_array().ok_or_else(|| err("`entries` must be an array"))? {
                    let e = e.as_object().ok_or_else(|| err("window entry must be an object"))?;
                    let k = field(e, "index")?
                        .as_i64()
                        .ok_or_else(|| err("`index` must be an integer"))?;
                    if entries.insert(k, parse_block(field(e, "value")?, p)?).is_some() {
                        return Err(err(format!("duplicate window index {k}")));
                    }
                }
            }
            Ok(DiagonalGen::Window { entries, default })
        }
        "sampled" => {
            let start = field(obj, "start")?
                .as_i64()
                .ok_or_else(|| err("`start` must be an integer"))?;
            let values = parse_values(field(obj, "values")?, p)?;
            if values.is_empty() {
                return Err(OperatorError::EmptyGenerator);
            }
            Ok(DiagonalGen::Sampled { start, values })
        }
        other => Err(err(format!("unknown diagonal kind `{other}`"))),
    }
}

fn gen_json(g: &DiagonalGen) -> Value {
    match g {
        DiagonalGen::Constant(v) => json!({"kind": "constant", "value": block_json(v)}),
        DiagonalGen::Periodic(vals) => json!({
            "kind": "periodic",
            "values": vals.iter().map(block_json).collect::<Vec<_>>(),
            "period": vals.len(),
        }),
        DiagonalGen::Window { entries, default } => json!({
            "kind": "window",
            "entries": entries
                .iter()
                .map(|(k, v)| json!({"index": k, "value": block_json(v)}))
                .collect::<Vec<_>>(),
            "default": block_json(default),
        }),
        DiagonalGen::Sampled { start, values } => json!({
            "kind": "sampled",
            "start": start,
            "values": values.iter().map(block_json).collect::<Vec<_>>(),
        }),
    }
}

fn optional_bound(obj: &Map<String, Value>, key: &str) -> Result<Option<f64>, OperatorError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| err(format!("`{key}` must be a number"))),
    }
}

pub fn parse(s: &str) -> Result<OperatorSpec, OperatorError> {
    let v: Value = serde_json::from_str(s).map_err(|e| err(e.to_string()))?;
    let obj = v
        .as_object()
        .ok_or_else(|| err("operator file must be a JSON object"))?;
    let p = match obj.get("block_dim") {
        None => 1,
        Some(v) => v
            .as_u64()
            .filter(|&p| p >= 1)
            .ok_or_else(|| err("`block_dim` must be >= 1"))? as usize,
    };
    OperatorSpec::with_bounds(
        parse_gen(field(obj, "alpha")?, p)?,
        parse_gen(field(obj, "beta")?, p)?,
        parse_gen(field(obj, "gamma")?, p)?,
        optional_bound(obj, "alpha_max")?,
        optional_bound(obj, "beta_max")?,
        optional_bound(obj, "gamma_max")?,
    )
}

pub fn serialize(op: &OperatorSpec) -> String {
    let v = json!({
        "block_dim": op.block_dim,
        "alpha": gen_json(&op.alpha),
        "beta": gen_json(&op.beta),
        "gamma": gen_json(&op.gamma),
        "alpha_max": op.alpha_max,
        "beta_max": op.beta_max,
        "gamma_max": op.gamma_max,
    });
    serde_json::to_string_pretty(&v).expect("JSON values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_example() {
        let src = r#"{"block_dim": 1,
            "alpha": {"kind": "constant", "value": [1, 0]},
            "beta":  {"kind": "periodic", "values": [[-1.5, 0], [1, 0], [1, 0]], "period": 3},
            "gamma": {"kind": "window", "entries": [{"index": 2, "value": [0, 1]}], "default": [1, 0]},
            "alpha_max": 1.0}"#;
        let op = OperatorSpec::from_json_str(src).unwrap();
        assert_eq!(op.beta_at(3).unwrap()[(0, 0)], C64::new(-1.5, 0.0));
        assert_eq!(op.gamma_at(2).unwrap()[(0, 0)], C64::new(0.0, 1.0));
        assert_eq!(op.beta_max, 1.5);
        let again = OperatorSpec::from_json_str(&op.to_json_string()).unwrap();
        assert_eq!(again, op);
    }

    #[test]
    fn block_operator_round_trip() {
        let m = CMatrix::from_rows(&[
            vec![C64::new(0.1, 0.2), C64::new(-3.0, 0.0)],
            vec![C64::new(0.0, 1.0 / 3.0), C64::new(1e-300, -7.5)],
        ])
        .unwrap();
        let op = OperatorSpec::new(
            DiagonalGen::Sampled {
                start: -2,
                values: vec![m.clone(), CMatrix::identity(2)],
            },
            DiagonalGen::Constant(m.conj_transpose()),
            DiagonalGen::Periodic(vec![CMatrix::zeros(2, 2), m]),
        )
        .unwrap();
        let text = op.to_json_string();
        assert_eq!(OperatorSpec::from_json_str(&text).unwrap(), op);
    }

    #[test]
    fn rejects_malformed_files() {
        let bad = [
            r#"{"alpha": {"kind": "constant", "value": [1, 0]}}"#,
            r#"{"alpha": {"kind": "cubic", "value": [1, 0]}, "beta": {"kind": "constant", "value": 0}, "gamma": {"kind": "constant", "value": 0}}"#,
            r#"{"alpha": {"kind": "periodic", "values": [1, 2], "period": 3}, "beta": {"kind": "constant", "value": 0}, "gamma": {"kind": "constant", "value": 0}}"#,
            r#"{"block_dim": 2, "alpha": {"kind": "constant", "value": [1, 0]}, "beta": {"kind": "constant", "value": 0}, "gamma": {"kind": "constant", "value": 0}}"#,
            r#"{"alpha": {"kind": "constant", "value": 2}, "beta": {"kind": "constant", "value": 0}, "gamma": {"kind": "constant", "value": 0}, "alpha_max": 1}"#,
            "not json",
        ];
        for src in bad {
            assert!(OperatorSpec::from_json_str(src).is_err(), "{src}");
        }
    }
}
