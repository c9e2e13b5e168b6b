//! Tensors as `{"order": R, "dimension": N, "components": [...]}` with the
//! `N^R` components flattened row-major (last index fastest).

use gradhom_core::tensor::Dense;
use gradhom_core::Dim;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorJson {
    pub order: usize,
    pub dimension: usize,
    pub components: Vec<f64>,
}

impl<const R: usize> From<&Dense<R>> for TensorJson {
    fn from(t: &Dense<R>) -> Self {
        TensorJson {
            order: R,
            dimension: t.dim().n(),
            components: t.as_slice().to_vec(),
        }
    }
}

/// Row arrays of a small matrix given by an entry function.
pub fn rows(n: usize, entry: impl Fn(usize, usize) -> f64) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| entry(i, j)).collect()).collect()
}

pub fn parse_dense<const R: usize>(v: &Value) -> Result<Dense<R>, String> {
    let m = v.as_object().ok_or("expected a tensor object")?;
    if let Some(k) = m.keys().find(|k| !["order", "dimension", "components"].contains(&k.as_str())) {
        return Err(format!("unknown tensor key {k:?}"));
    }
    match m.get("order").and_then(Value::as_u64) {
        Some(o) if o as usize == R => {}
        Some(o) => return Err(format!("expected an order-{R} tensor, got order {o}")),
        None => return Err("missing integer \"order\"".into()),
    }
    let dim = m
        .get("dimension")
        .and_then(Value::as_u64)
        .ok_or("missing integer \"dimension\"")
        .and_then(|n| Dim::new(n as usize).map_err(|_| "dimension must be 2 or 3"))?;
    let comps = m
        .get("components")
        .and_then(Value::as_array)
        .ok_or("missing \"components\" array")?;
    let data: Vec<f64> = comps
        .iter()
        .map(|x| x.as_f64().filter(|x| x.is_finite()))
        .collect::<Option<_>>()
        .ok_or("components must be finite numbers")?;
    Dense::from_vec(dim, data).map_err(|e| e.to_string())
}
