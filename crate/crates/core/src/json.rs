//! JSON encoding of the exact scalar types, shared by on-disk caches and the
//! command-line reports.
//!
//! Conventions: rationals are `"p"` or `"p/q"` strings, Gaussian rationals are
//! `{"re": .., "im": ..}` objects, complex floats are `[re, im]` pairs.

use serde_json::{json, Value};

use crate::mat::Mat;
use crate::scalar::{rat_from_str, rat_to_str};
use crate::{C64, Error, GaussRat, Rat, Result};

fn err(msg: impl Into<String>) -> Error {
    Error::Serialization(msg.into())
}

pub fn rat_to_value(x: &Rat) -> Value {
    Value::String(rat_to_str(x))
}

pub fn rat_from_value(v: &Value) -> Result<Rat> {
    match v {
        Value::String(s) => rat_from_str(s),
        // Tolerate bare integers for hand-written configuration files.
        Value::Number(n) => n
            .as_i64()
            .map(|k| Rat::from_integer(k.into()))
            .ok_or_else(|| err(format!("not an integer: {n}"))),
        _ => Err(err(format!("expected rational, got {v}"))),
    }
}

pub fn rat_vec_to_value(xs: &[Rat]) -> Value {
    Value::Array(xs.iter().map(rat_to_value).collect())
}

pub fn rat_vec_from_value(v: &Value) -> Result<Vec<Rat>> {
    v.as_array()
        .ok_or_else(|| err("expected array of rationals"))?
        .iter()
        .map(rat_from_value)
        .collect()
}

pub fn gauss_to_value(x: &GaussRat) -> Value {
    json!({ "re": rat_to_str(&x.re), "im": rat_to_str(&x.im) })
}

pub fn gauss_from_value(v: &Value) -> Result<GaussRat> {
    let obj = v.as_object().ok_or_else(|| err("expected {re, im} object"))?;
    let re = rat_from_value(obj.get("re").ok_or_else(|| err("missing re"))?)?;
    let im = rat_from_value(obj.get("im").ok_or_else(|| err("missing im"))?)?;
    Ok(GaussRat::new(re, im))
}

pub fn c64_to_value(z: &C64) -> Value {
    json!([z.re, z.im])
}

pub fn c64_from_value(v: &Value) -> Result<C64> {
    let arr = v.as_array().ok_or_else(|| err("expected [re, im] pair"))?;
    if arr.len() != 2 {
        return Err(err("expected [re, im] pair"));
    }
    let re = arr[0].as_f64().ok_or_else(|| err("re must be a number"))?;
    let im = arr[1].as_f64().ok_or_else(|| err("im must be a number"))?;
    Ok(C64::new(re, im))
}

pub fn qmat_to_value(m: &Mat<Rat>) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(rat_to_value).collect()))
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "data": rows })
}

pub fn qmat_from_value(v: &Value) -> Result<Mat<Rat>> {
    let obj = v.as_object().ok_or_else(|| err("expected matrix object"))?;
    let rows = obj
        .get("rows")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("missing rows"))? as usize;
    let cols = obj
        .get("cols")
        .and_then(Value::as_u64)
        .ok_or_else(|| err("missing cols"))? as usize;
    let data = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing data"))?;
    if data.len() != rows {
        return Err(err("row count mismatch"));
    }
    let mut out = Mat::<Rat>::zeros(rows, cols);
    for (i, rv) in data.iter().enumerate() {
        let entries = rat_vec_from_value(rv)?;
        if entries.len() != cols {
            return Err(err("column count mismatch"));
        }
        for (j, x) in entries.into_iter().enumerate() {
            out[(i, j)] = x;
        }
    }
    Ok(out)
}

/// Fetch a required field from a JSON object.
pub fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| err(format!("missing field: {name}")))
}

pub fn usize_from_value(v: &Value) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| err("expected unsigned integer"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn rational_round_trip() {
        let x = Rat::new(22.into(), (-7i64).into());
        let v = rat_to_value(&x);
        assert_eq!(v, Value::String("-22/7".into()));
        assert_eq!(rat_from_value(&v).unwrap(), x);
        assert_eq!(rat_from_value(&json!(5)).unwrap(), Rat::from_integer(5.into()));
    }

    #[test]
    fn matrix_round_trip() {
        let m = Mat::<Rat>::from_fn(2, 3, |i, j| {
            Rat::new((i as i64).into(), (j as i64 + 1).into())
        });
        let v = qmat_to_value(&m);
        assert_eq!(qmat_from_value(&v).unwrap(), m);
        assert!(qmat_from_value(&json!({"rows": 2})).is_err());
    }

    #[test]
    fn complex_round_trip() {
        let g = GaussRat::new(Rat::one(), Rat::new(1.into(), 2.into()));
        assert_eq!(gauss_from_value(&gauss_to_value(&g)).unwrap(), g);
        let z = C64::new(0.5, -1.25);
        assert_eq!(c64_from_value(&c64_to_value(&z)).unwrap(), z);
    }
}
