//! JSON file formats: state specs, boxes, and the `catalog:` shorthand.
//!
//! State spec (one of):
//! ```json
//! {"kind":"matrix","dimA":2,"dimB":2,"re":[[...]],"im":[[...]]}
//! {"kind":"pauli","a":[x,y,z],"b":[x,y,z],"T":[[..],[..],[..]]}
//! {"kind":"catalog","name":"<catalog id>","params":{...}}
//! ```
//! Box: `{"nx":2,"ny":2,"na":2,"nb":2,"p":[[[[...]]]]}` indexed `p[x][y][a][b]`.

use crate::assemblage::NoSignalingBox;
use crate::catalog::{self, CatalogItem, Params};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};
use crate::state::{DensityMatrix, PauliRepresentation};
use nalgebra::{Matrix3, Vector3};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum StateSpec {
    Matrix {
        #[serde(rename = "dimA")]
        dim_a: usize,
        #[serde(rename = "dimB")]
        dim_b: usize,
        re: Vec<Vec<f64>>,
        im: Option<Vec<Vec<f64>>>,
    },
    Pauli {
        a: [f64; 3],
        b: [f64; 3],
        #[serde(rename = "T")]
        t: [[f64; 3]; 3],
    },
    Catalog {
        name: String,
        #[serde(default)]
        params: Params,
    },
}

/// Parse a state-spec JSON document into a validated state.
pub fn parse_state_spec(json: &str) -> Result<DensityMatrix> {
    let spec: StateSpec =
        serde_json::from_str(json).map_err(|e| Error::ParseError(format!("state spec: {e}")))?;
    match spec {
        StateSpec::Matrix { dim_a, dim_b, re, im } => {
            let d = dim_a * dim_b;
            let check = |m: &Vec<Vec<f64>>, name: &str| -> Result<()> {
                if m.len() != d || m.iter().any(|row| row.len() != d) {
                    return Err(Error::ParseError(format!(
                        "{name} must be a {d}x{d} matrix"
                    )));
                }
                Ok(())
            };
            check(&re, "re")?;
            if let Some(im) = &im {
                check(im, "im")?;
            }
            let entries = CMatrix::from_fn(d, d, |i, j| {
                c(re[i][j], im.as_ref().map_or(0.0, |m| m[i][j]))
            });
            DensityMatrix::from_matrix(entries, dim_a, dim_b)
        }
        StateSpec::Pauli { a, b, t } => PauliRepresentation {
            a: Vector3::from_row_slice(&a),
            b: Vector3::from_row_slice(&b),
            t: Matrix3::from_fn(|i, j| t[i][j]),
        }
        .compose(),
        StateSpec::Catalog { name, params } => catalog::get(&name, &params)?.into_state(),
    }
}

/// Parse a box JSON document and validate its invariants.
pub fn parse_box(json: &str) -> Result<NoSignalingBox> {
    let boxed: NoSignalingBox =
        serde_json::from_str(json).map_err(|e| Error::ParseError(format!("box: {e}")))?;
    boxed.validate()?;
    Ok(boxed)
}

/// Resolve a CLI state reference: either `catalog:<id>[?k=v,k=v]` or a path
/// to a state-spec JSON file.
pub fn resolve_state_ref(reference: &str) -> Result<DensityMatrix> {
    match parse_catalog_ref(reference)? {
        Some(CatalogItem::State(s)) => Ok(s),
        Some(CatalogItem::Box(_)) => Err(Error::BadParams(format!(
            "{reference} names a box where a state is required"
        ))),
        None => {
            let json = std::fs::read_to_string(reference)
                .map_err(|e| Error::ParseError(format!("{reference}: {e}")))?;
            parse_state_spec(&json)
        }
    }
}

/// Resolve a CLI box reference: `catalog:<id>[?k=v]` or a box JSON path.
pub fn resolve_box_ref(reference: &str) -> Result<NoSignalingBox> {
    match parse_catalog_ref(reference)? {
        Some(CatalogItem::Box(b)) => Ok(b),
        Some(CatalogItem::State(_)) => Err(Error::BadParams(format!(
            "{reference} names a state where a box is required"
        ))),
        None => {
            let json = std::fs::read_to_string(reference)
                .map_err(|e| Error::ParseError(format!("{reference}: {e}")))?;
            parse_box(&json)
        }
    }
}

fn parse_catalog_ref(reference: &str) -> Result<Option<CatalogItem>> {
    let Some(rest) = reference.strip_prefix("catalog:") else {
        return Ok(None);
    };
    let (id, params) = match rest.split_once('?') {
        None => (rest, Params::new()),
        Some((id, kv)) => {
            let mut params = Params::new();
            for pair in kv.split(',').filter(|s| !s.is_empty()) {
                let (k, v) = pair.split_once('=').ok_or_else(|| {
                    Error::ParseError(format!("catalog parameter `{pair}` is not k=v"))
                })?;
                let num: f64 = v
                    .parse()
                    .map_err(|_| Error::ParseError(format!("parameter {k}={v} is not numeric")))?;
                params.insert(k.to_string(), serde_json::json!(num));
            }
            (id, params)
        }
    };
    catalog::get(id, &params).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parses_matrix_spec() {
        let json = r#"{"kind":"matrix","dimA":2,"dimB":2,
            "re":[[0.25,0,0,0],[0,0.25,0,0],[0,0,0.25,0],[0,0,0,0.25]]}"#;
        let rho = parse_state_spec(json).unwrap();
        assert_relative_eq!(rho.purity(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn parses_pauli_spec() {
        let json = r#"{"kind":"pauli","a":[0,0,0],"b":[0,0,0],
            "T":[[1,0,0],[0,-1,0],[0,0,1]]}"#;
        let rho = parse_state_spec(json).unwrap();
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn parses_catalog_spec_and_shorthand() {
        let json = r#"{"kind":"catalog","name":"bell_diagonal",
            "params":{"c1":0.5,"c2":0.3,"c3":0.1}}"#;
        let rho = parse_state_spec(json).unwrap();
        let rep = rho.pauli_decompose().unwrap();
        assert_relative_eq!(rep.t[(0, 0)], 0.5, epsilon = 1e-12);

        let rho2 = resolve_state_ref("catalog:bell_diagonal?c1=0.5,c2=0.3,c3=0.1").unwrap();
        assert_relative_eq!(
            (rho.matrix() - rho2.matrix())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn rejects_invalid_matrix_spec() {
        let json = r#"{"kind":"matrix","dimA":2,"dimB":2,
            "re":[[0.5,0,0,0],[0,0.6,0,0],[0,0,0,0],[0,0,0,-0.1]]}"#;
        assert!(parse_state_spec(json).is_err());
    }

    #[test]
    fn box_round_trip() {
        let b = crate::catalog::bb84_box(0.4);
        let json = serde_json::to_string(&b).unwrap();
        let back = parse_box(&json).unwrap();
        assert!(b.max_deviation(&back) < 1e-15);
    }

    #[test]
    fn resolves_box_shorthand() {
        let b = resolve_box_ref("catalog:box_bb84?v=0.3").unwrap();
        assert_relative_eq!(b.correlator(0, 0), 0.3, epsilon = 1e-12);
    }
}
