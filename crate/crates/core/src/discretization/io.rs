//! JSON field files.
//!
//! ```json
//! {"version":1, "dimension":2,
//!  "domain":{"type":"star","center":[0,0],"rho":{"a0":1,"cos":[],"sin":[]}},
//!  "grid":{"nr":64,"nphi":128},
//!  "values":[...]}
//! ```
//! A ball domain is written as `{"type":"ball","center":[..],"radius":r}`.
//! Values are row-major with the radial index outer. Keys are emitted sorted and
//! floats in shortest round-trip form, so write → read is bit-exact.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::{BallDomain, DiscretizationError, Domain, Grid, ScalarField, StarDomain2D};

pub const FIELD_FORMAT_VERSION: u64 = 1;

pub fn write_field(field: &ScalarField, path: impl AsRef<Path>) -> Result<(), DiscretizationError> {
    fs::write(path, field_to_string(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField, DiscretizationError> {
    field_from_str(&fs::read_to_string(path)?)
}

pub fn field_to_string(field: &ScalarField) -> String {
    let mut doc = envelope(field.grid());
    doc.insert("values".into(), json!(field.values()));
    Value::Object(doc).to_string()
}

pub fn field_from_str(text: &str) -> Result<ScalarField, DiscretizationError> {
    let doc: Value = serde_json::from_str(text)?;
    let grid = Arc::new(grid_from_envelope(&doc)?);
    let values = number_array(member(&doc, "$", "values")?, "$.values")?;
    if values.len() != grid.len() {
        return Err(DiscretizationError::DimensionMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    ScalarField::new(grid, values)
}

/// Several named fields on one grid: `"fields": {"name": {"values": [...]}, ...}`.
pub fn fields_to_string(grid: &Grid, fields: &[(&str, Vec<f64>)]) -> String {
    let mut doc = envelope(grid);
    let mut named = Map::new();
    for (name, values) in fields {
        assert_eq!(values.len(), grid.len(), "field {name} does not match grid");
        named.insert((*name).to_string(), json!({ "values": values }));
    }
    doc.insert("fields".into(), Value::Object(named));
    Value::Object(doc).to_string()
}

fn envelope(grid: &Grid) -> Map<String, Value> {
    let domain = match grid.domain() {
        Domain::Star(d) => json!({
            "type": "star",
            "center": d.center(),
            "rho": {"a0": d.a0(), "cos": d.cos_coefficients(), "sin": d.sin_coefficients()},
        }),
        Domain::Ball(b) => json!({
            "type": "ball",
            "center": b.center(),
            "radius": b.radius(),
        }),
    };
    let mut doc = Map::new();
    doc.insert("version".into(), json!(FIELD_FORMAT_VERSION));
    doc.insert("dimension".into(), json!(2));
    doc.insert("domain".into(), domain);
    doc.insert("grid".into(), json!({"nr": grid.nr(), "nphi": grid.nphi()}));
    doc
}

/// Parses the `version`/`dimension`/`domain`/`grid` part of a field document.
pub fn grid_from_envelope(doc: &Value) -> Result<Grid, DiscretizationError> {
    if !doc.is_object() {
        return Err(schema("$", "expected an object"));
    }
    let version = member(doc, "$", "version")?
        .as_u64()
        .ok_or_else(|| schema("$.version", "expected an unsigned integer"))?;
    if version != FIELD_FORMAT_VERSION {
        return Err(schema("$.version", &format!("unsupported version {version}")));
    }
    let dim = member(doc, "$", "dimension")?
        .as_u64()
        .ok_or_else(|| schema("$.dimension", "expected an unsigned integer"))?;
    if dim != 2 {
        return Err(DiscretizationError::DimensionMismatch {
            expected: 2,
            found: dim as usize,
        });
    }
    let dom = member(doc, "$", "domain")?;
    let kind = member(dom, "$.domain", "type")?
        .as_str()
        .ok_or_else(|| schema("$.domain.type", "expected a string"))?;
    let center = number_array(member(dom, "$.domain", "center")?, "$.domain.center")?;
    let domain = match kind {
        "star" => {
            if center.len() != 2 {
                return Err(DiscretizationError::DimensionMismatch {
                    expected: 2,
                    found: center.len(),
                });
            }
            let rho = member(dom, "$.domain", "rho")?;
            let a0 = number(member(rho, "$.domain.rho", "a0")?, "$.domain.rho.a0")?;
            let cos = number_array(member(rho, "$.domain.rho", "cos")?, "$.domain.rho.cos")?;
            let sin = number_array(member(rho, "$.domain.rho", "sin")?, "$.domain.rho.sin")?;
            Domain::Star(StarDomain2D::new([center[0], center[1]], a0, cos, sin)?)
        }
        "ball" => {
            if center.len() != 2 {
                return Err(DiscretizationError::DimensionMismatch {
                    expected: 2,
                    found: center.len(),
                });
            }
            let radius = number(member(dom, "$.domain", "radius")?, "$.domain.radius")?;
            Domain::Ball(BallDomain::new(center, radius)?)
        }
        other => return Err(schema("$.domain.type", &format!("unknown domain type {other:?}"))),
    };
    let grid = member(doc, "$", "grid")?;
    let count = |key: &str| -> Result<usize, DiscretizationError> {
        member(grid, "$.grid", key)?
            .as_u64()
            .map(|v| v as usize)
            .ok_or_else(|| schema(&format!("$.grid.{key}"), "expected an unsigned integer"))
    };
    Grid::new(domain, count("nr")?, count("nphi")?)
}

fn schema(path: &str, message: &str) -> DiscretizationError {
    DiscretizationError::Schema {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn member<'a>(v: &'a Value, at: &str, key: &str) -> Result<&'a Value, DiscretizationError> {
    v.get(key).ok_or_else(|| schema(&format!("{at}.{key}"), "missing key"))
}

fn number(v: &Value, path: &str) -> Result<f64, DiscretizationError> {
    let x = v.as_f64().ok_or_else(|| schema(path, "expected a number"))?;
    if !x.is_finite() {
        return Err(schema(path, "non-finite number"));
    }
    Ok(x)
}

fn number_array(v: &Value, path: &str) -> Result<Vec<f64>, DiscretizationError> {
    let arr = v.as_array().ok_or_else(|| schema(path, "expected an array"))?;
    arr.iter()
        .enumerate()
        .map(|(k, x)| number(x, &format!("{path}[{k}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScalarField {
        let d = StarDomain2D::ellipse([0.1, 0.0], 1.0, 0.8, 8).unwrap();
        let g = Arc::new(Grid::new(Domain::Star(d), 4, 8).unwrap());
        ScalarField::from_fn(g, |x| (x[0] * 1.1).sin() / 3.0 + x[1].exp()).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = sample();
        let back = field_from_str(&field_to_string(&f)).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn missing_values_reports_path() {
        let text = field_to_string(&sample());
        let mut v: Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("values");
        match field_from_str(&v.to_string()) {
            Err(DiscretizationError::Schema { path, .. }) => assert_eq!(path, "$.values"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_length_is_dimension_mismatch() {
        let text = field_to_string(&sample());
        let mut v: Value = serde_json::from_str(&text).unwrap();
        v["values"].as_array_mut().unwrap().pop();
        assert!(matches!(
            field_from_str(&v.to_string()),
            Err(DiscretizationError::DimensionMismatch {
                expected: 32,
                found: 31
            })
        ));
    }

    #[test]
    fn steep_field_still_loads() {
        // spacelike checks live in the geometry layer
        let d = StarDomain2D::disk([0.0, 0.0], 1.0).unwrap();
        let g = Arc::new(Grid::new(Domain::Star(d), 4, 8).unwrap());
        let f = ScalarField::from_fn(g, |x| 5.0 * x[0]).unwrap();
        assert!(field_from_str(&field_to_string(&f)).is_ok());
    }
}
