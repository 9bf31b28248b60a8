//! JSON encoding of complex scalars, vectors and matrices.
//!
//! A complex number is written as a `[re, im]` pair. On input a bare number
//! is accepted as a real value.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let part = |x: &Value| {
                x.as_f64()
                    .ok_or_else(|| Error::InvalidArgument(format!("`{x}` is not a number")))
            };
            Ok(Complex64::new(part(&pair[0])?, part(&pair[1])?))
        }
        other => Err(Error::InvalidArgument(format!(
            "expected a complex number as [re, im], found `{other}`"
        ))),
    }
}

pub fn vector_to_json(values: &[Complex64]) -> Value {
    Value::Array(values.iter().map(|&z| complex_to_json(z)).collect())
}

pub fn vector_from_json(v: &Value) -> Result<Vec<Complex64>> {
    v.as_array()
        .ok_or_else(|| Error::InvalidArgument("expected a JSON array of complex numbers".into()))?
        .iter()
        .map(complex_from_json)
        .collect()
}

/// Row-major nested array: one JSON array per row.
pub fn matrix_to_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json(v: &Value) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::InvalidArgument("expected a JSON array of rows".into()))?
        .iter()
        .map(vector_from_json)
        .collect::<Result<Vec<_>>>()?;
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch("matrix rows have unequal lengths".into()));
    }
    Ok(CMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

/// Significant digits of every reported number.
pub const REPORT_DIGITS: usize = 12;

/// `x` rounded to [`REPORT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every floating-point number inside `v`. Integers are kept.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, x)| (k, round_json(x))).collect()),
        other => other,
    }
}

/// Text form with [`REPORT_DIGITS`] significant digits, plain notation for
/// moderate magnitudes and scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 || !r.is_finite() || (1e-4..1e12).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}
