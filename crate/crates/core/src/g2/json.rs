//! JSON encoding of forms and affine maps.
//!
//! Forms are lists of `{indices: [i,j,k], value}` per nonzero coefficient
//! with 1-based sorted indices; rational values are written as `"p/q"`
//! strings. Affine maps are `{matrix: 7×7, translation: 7}`.

use super::form::Form;
use super::pullback::AffineMap;
use crate::error::{Error, Result};
use crate::scalar::{Exact, Scalar};
use serde_json::{json, Value};
use std::str::FromStr;

/// Scalars with a JSON representation.
pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        json!(self)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| Error::InvalidInput("non-finite number".into())),
            Value::String(s) => Exact::from_json(&Value::String(s.clone())).map(|q| q.to_f64_lossy()),
            _ => Err(Error::InvalidInput(format!("expected number, got {v}"))),
        }
    }
}

impl JsonScalar for Exact {
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => {
                Exact::from_str(s.trim()).map_err(|e| Error::InvalidInput(format!("bad rational {s:?}: {e}")))
            }
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Exact::from_int(i))
                } else {
                    Ok(crate::scalar::exact_from_f64(n.as_f64().unwrap_or(f64::NAN)))
                }
            }
            _ => Err(Error::InvalidInput(format!("expected rational, got {v}"))),
        }
    }
}

pub fn form_to_json<S: JsonScalar>(f: &Form<S>) -> Value {
    Value::Array(
        f.terms()
            .map(|(idx, c)| json!({"indices": idx.iter().map(|i| i + 1).collect::<Vec<_>>(), "value": c.to_json()}))
            .collect(),
    )
}

pub fn form_from_json<S: JsonScalar>(degree: usize, v: &Value) -> Result<Form<S>> {
    let items = v.as_array().ok_or_else(|| Error::InvalidInput("form must be a JSON array".into()))?;
    let mut f = Form::zero(degree);
    for item in items {
        let idx = item["indices"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("missing indices".into()))?
            .iter()
            .map(|x| match x.as_u64() {
                Some(i) if (1..=7).contains(&i) => Ok(i as usize - 1),
                _ => Err(Error::InvalidInput(format!("index {x} outside 1..7"))),
            })
            .collect::<Result<Vec<usize>>>()?;
        if idx.len() != degree {
            return Err(Error::InvalidInput(format!("expected {degree} indices, got {}", idx.len())));
        }
        f.add_term(&idx, S::from_json(&item["value"])?);
    }
    Ok(f)
}

pub fn affine_to_json<S: JsonScalar>(m: &AffineMap<S>) -> Value {
    json!({
        "matrix": m.matrix().iter().map(|r| r.iter().map(|c| c.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "translation": m.translation().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
    })
}

pub fn affine_from_json<S: JsonScalar>(v: &Value) -> Result<AffineMap<S>> {
    let rows = v["matrix"].as_array().filter(|r| r.len() == 7).ok_or_else(|| Error::InvalidInput("matrix must be 7×7".into()))?;
    let mut matrix: [[S; 7]; 7] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == 7).ok_or_else(|| Error::InvalidInput("matrix must be 7×7".into()))?;
        for (j, c) in r.iter().enumerate() {
            matrix[i][j] = S::from_json(c)?;
        }
    }
    let t = v["translation"].as_array().filter(|t| t.len() == 7).ok_or_else(|| Error::InvalidInput("translation must have 7 entries".into()))?;
    let mut translation: [S; 7] = std::array::from_fn(|_| S::zero());
    for (i, c) in t.iter().enumerate() {
        translation[i] = S::from_json(c)?;
    }
    AffineMap::new(matrix, translation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::structure::phi0;

    #[test]
    fn phi0_round_trips_in_both_backends() {
        let f: Form<f64> = phi0();
        let v = form_to_json(&f);
        assert_eq!(v.as_array().unwrap().len(), 7);
        assert_eq!(v[0]["indices"], json!([1, 2, 3]));
        assert_eq!(form_from_json::<f64>(3, &v).unwrap(), f);
        let q: Form<Exact> = phi0();
        assert_eq!(form_from_json::<Exact>(3, &form_to_json(&q)).unwrap(), q);
    }

    #[test]
    fn involutions_round_trip() {
        for (_, m, _) in crate::g2::pullback::joyce_involutions::<Exact>() {
            let back: AffineMap<Exact> = affine_from_json(&affine_to_json(&m)).unwrap();
            assert_eq!(back, m);
        }
    }
}
