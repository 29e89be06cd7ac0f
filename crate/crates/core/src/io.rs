//! JSON documents for algebra elements, states, tangent vectors and
//! geodesic specifications, and CSV tables of geodesic samples.
//!
//! ```json
//! { "schema_version": "1",
//!   "algebra": { "blocks": [2] },
//!   "state": [ [ [[0.5,0],[0,0]], [[0,0],[0.5,0]] ] ] }
//! ```
//!
//! Matrix payloads are a list of blocks, each a list of rows of `[re, im]`
//! pairs. A single full matrix (rows of pairs) is also accepted; it is split
//! along the declared blocks and must vanish off the diagonal blocks. Real
//! entries may be written as bare numbers. Numbers are emitted with 17
//! significant digits so that `parse(emit(x)) == x` exactly.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{AlgebraShape, Element};
use crate::error::Error;
use crate::geodesic::{GeodesicPoint, GeodesicSpec};
use crate::orbits::{PositiveFunctional, StateFunctional, TangentVector};

pub const SCHEMA_VERSION: &str = "1";

/// Parse failure, with the JSON path of the offending field.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("validation error at {path}: {source}")]
    Validation {
        path: String,
        #[source]
        source: Error,
    },
}

impl IoError {
    fn schema(path: &str, message: impl Into<String>) -> Self {
        IoError::Schema {
            path: path.to_string(),
            message: message.into(),
        }
    }

    fn validation(path: &str, source: Error) -> Self {
        IoError::Validation {
            path: path.to_string(),
            source,
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, IoError::Validation { .. })
    }
}

pub type IoResult<T> = std::result::Result<T, IoError>;

/// Typed payload of a document.
#[derive(Clone, Debug)]
pub enum Payload {
    Element(Element),
    State(StateFunctional),
    Positive(PositiveFunctional),
    Tangent(TangentVector),
    Geodesic(GeodesicSpec),
}

#[derive(Clone, Debug)]
pub struct Document {
    pub schema_version: String,
    pub shape: AlgebraShape,
    pub payload: Payload,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    blocks: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTangent {
    base: Value,
    value: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeodesic {
    start: Value,
    direction: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    schema_version: Option<String>,
    algebra: Option<RawAlgebra>,
    blocks: Option<Vec<usize>>,
    element: Option<Value>,
    state: Option<Value>,
    positive: Option<Value>,
    tangent: Option<RawTangent>,
    geodesic: Option<RawGeodesic>,
}

fn parse_entry(v: &Value, path: &str) -> IoResult<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let part = |i: usize| {
                pair[i]
                    .as_f64()
                    .ok_or_else(|| IoError::schema(&format!("{path}[{i}]"), "expected a number"))
            };
            Ok(Complex64::new(part(0)?, part(1)?))
        }
        _ => Err(IoError::schema(path, "expected [re, im] or a number")),
    }
}

fn parse_square(v: &Value, path: &str) -> IoResult<DMatrix<Complex64>> {
    let rows = v
        .as_array()
        .ok_or_else(|| IoError::schema(path, "expected a list of rows"))?;
    let n = rows.len();
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let entries = row
            .as_array()
            .ok_or_else(|| IoError::schema(&rpath, "expected a row of entries"))?;
        if entries.len() != n {
            return Err(IoError::schema(&rpath, format!("row has {} entries, expected {n}", entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = parse_entry(e, &format!("{rpath}[{j}]"))?;
        }
    }
    Ok(m)
}

/// True when `v` looks like rows of entries rather than a list of blocks.
/// Tells a full matrix (`v[0][0]` is an entry) from a block list (`v[0][0]`
/// is a row). A two-number array is either a complex entry or a real row of
/// length two; the declared shape decides.
fn is_bare_matrix(v: &Value, shape: &AlgebraShape) -> bool {
    match v.get(0).and_then(|row| row.get(0)) {
        Some(Value::Array(inner)) if inner.first().is_some_and(Value::is_array) => false,
        Some(Value::Array(inner)) if inner.len() == 2 => {
            let n = shape.diag_len();
            let rows = v.as_array().map_or(0, Vec::len);
            let cols = v.get(0).and_then(Value::as_array).map_or(0, Vec::len);
            rows == n && cols == n
        }
        Some(Value::Array(_)) => false,
        Some(_) => true,
        None => false,
    }
}

/// Parses a matrix payload against a declared shape.
pub fn parse_matrix(v: &Value, shape: &AlgebraShape, path: &str) -> IoResult<Element> {
    if is_bare_matrix(v, shape) {
        let full = parse_square(v, path)?;
        let n = shape.diag_len();
        if full.nrows() != n {
            return Err(IoError::schema(path, format!("matrix is {}x{0}, algebra needs {n}x{n}", full.nrows())));
        }
        let mut blocks = Vec::with_capacity(shape.num_blocks());
        let mut offset = 0;
        for &b in shape.blocks() {
            blocks.push(full.view((offset, offset), (b, b)).into_owned());
            offset += b;
        }
        let mut offset_i = 0;
        for (ki, &bi) in shape.blocks().iter().enumerate() {
            let mut offset_j = 0;
            for (kj, &bj) in shape.blocks().iter().enumerate() {
                if ki != kj {
                    for i in 0..bi {
                        for j in 0..bj {
                            if full[(offset_i + i, offset_j + j)].norm() != 0.0 {
                                return Err(IoError::validation(
                                    &format!("{path}[{}][{}]", offset_i + i, offset_j + j),
                                    Error::InvalidShape("nonzero entry outside the diagonal blocks".into()),
                                ));
                            }
                        }
                    }
                }
                offset_j += bj;
            }
            offset_i += bi;
        }
        return Element::from_blocks(shape, blocks).map_err(|e| IoError::validation(path, e));
    }
    let list = v
        .as_array()
        .ok_or_else(|| IoError::schema(path, "expected a list of blocks"))?;
    if list.len() != shape.num_blocks() {
        return Err(IoError::schema(
            path,
            format!("{} blocks given, algebra has {}", list.len(), shape.num_blocks()),
        ));
    }
    let blocks = list
        .iter()
        .enumerate()
        .map(|(k, b)| parse_square(b, &format!("{path}[{k}]")))
        .collect::<IoResult<Vec<_>>>()?;
    Element::from_blocks(shape, blocks).map_err(|e| IoError::validation(path, e))
}

fn parse_self_adjoint(v: &Value, shape: &AlgebraShape, path: &str) -> IoResult<Element> {
    let e = parse_matrix(v, shape, path)?;
    e.ensure_self_adjoint().map_err(|err| IoError::validation(path, err))?;
    Ok(e)
}

fn parse_state(v: &Value, shape: &AlgebraShape, path: &str) -> IoResult<StateFunctional> {
    StateFunctional::new(parse_matrix(v, shape, path)?).map_err(|e| IoError::validation(path, e))
}

/// Parses a document.
pub fn parse(text: &str) -> IoResult<Document> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| IoError::schema("$", e.to_string()))?;
    let schema_version = raw.schema_version.unwrap_or_else(|| SCHEMA_VERSION.to_string());
    if schema_version != SCHEMA_VERSION {
        return Err(IoError::schema("$.schema_version", format!("unsupported version {schema_version}")));
    }
    let blocks = match (raw.algebra, raw.blocks) {
        (Some(a), None) => a.blocks,
        (None, Some(b)) => b,
        (Some(_), Some(_)) => return Err(IoError::schema("$", "give either algebra.blocks or blocks, not both")),
        (None, None) => return Err(IoError::schema("$.algebra", "missing algebra.blocks")),
    };
    let shape = AlgebraShape::new(blocks).map_err(|e| IoError::validation("$.algebra.blocks", e))?;

    let given = [
        raw.element.is_some(),
        raw.state.is_some(),
        raw.positive.is_some(),
        raw.tangent.is_some(),
        raw.geodesic.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if given != 1 {
        return Err(IoError::schema(
            "$",
            "exactly one of element, state, positive, tangent, geodesic is required",
        ));
    }

    let payload = if let Some(v) = raw.element {
        Payload::Element(parse_matrix(&v, &shape, "$.element")?)
    } else if let Some(v) = raw.state {
        Payload::State(parse_state(&v, &shape, "$.state")?)
    } else if let Some(v) = raw.positive {
        let e = parse_matrix(&v, &shape, "$.positive")?;
        Payload::Positive(PositiveFunctional::new(e).map_err(|e| IoError::validation("$.positive", e))?)
    } else if let Some(t) = raw.tangent {
        let base = parse_state(&t.base, &shape, "$.tangent.base")?;
        let value = parse_matrix(&t.value, &shape, "$.tangent.value")?;
        Payload::Tangent(TangentVector::at_state(&base, value).map_err(|e| IoError::validation("$.tangent.value", e))?)
    } else if let Some(g) = raw.geodesic {
        let start = parse_state(&g.start, &shape, "$.geodesic.start")?;
        let direction = parse_self_adjoint(&g.direction, &shape, "$.geodesic.direction")?;
        Payload::Geodesic(
            GeodesicSpec::new(start, direction).map_err(|e| IoError::validation("$.geodesic.direction", e))?,
        )
    } else {
        unreachable!("exactly one payload is present")
    };
    Ok(Document {
        schema_version,
        shape,
        payload,
    })
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_matrix(out: &mut String, e: &Element, indent: &str) {
    out.push_str("[\n");
    let nb = e.blocks().len();
    for (k, b) in e.blocks().iter().enumerate() {
        let _ = writeln!(out, "{indent}  [");
        for i in 0..b.nrows() {
            let row: Vec<String> = (0..b.ncols())
                .map(|j| format!("[{}, {}]", fmt_num(b[(i, j)].re), fmt_num(b[(i, j)].im)))
                .collect();
            let comma = if i + 1 < b.nrows() { "," } else { "" };
            let _ = writeln!(out, "{indent}    [{}]{comma}", row.join(", "));
        }
        let comma = if k + 1 < nb { "," } else { "" };
        let _ = writeln!(out, "{indent}  ]{comma}");
    }
    let _ = write!(out, "{indent}]");
}

fn header(shape: &AlgebraShape) -> String {
    let blocks: Vec<String> = shape.blocks().iter().map(usize::to_string).collect();
    format!(
        "{{\n  \"schema_version\": \"{SCHEMA_VERSION}\",\n  \"algebra\": {{ \"blocks\": [{}] }},\n",
        blocks.join(", ")
    )
}

/// Emits one matrix payload under `key` (`element`, `state` or `positive`).
pub fn emit_matrix(key: &str, e: &Element) -> String {
    let mut out = header(e.shape());
    let _ = write!(out, "  \"{key}\": ");
    write_matrix(&mut out, e, "  ");
    out.push_str("\n}\n");
    out
}

fn emit_pair(key: &str, first: (&str, &Element), second: (&str, &Element)) -> String {
    let mut out = header(first.1.shape());
    let _ = write!(out, "  \"{key}\": {{\n    \"{}\": ", first.0);
    write_matrix(&mut out, first.1, "    ");
    let _ = write!(out, ",\n    \"{}\": ", second.0);
    write_matrix(&mut out, second.1, "    ");
    out.push_str("\n  }\n}\n");
    out
}

pub fn emit(payload: &Payload) -> String {
    use crate::orbits::Functional;
    match payload {
        Payload::Element(e) => emit_matrix("element", e),
        Payload::State(s) => emit_matrix("state", s.density()),
        Payload::Positive(p) => emit_matrix("positive", p.density()),
        Payload::Tangent(t) => emit_pair("tangent", ("base", t.base()), ("value", t.value())),
        Payload::Geodesic(g) => emit_pair("geodesic", ("start", g.start().density()), ("direction", g.direction())),
    }
}

/// Column names of the geodesic table for a shape.
pub fn csv_header(shape: &AlgebraShape) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "trace", "min_eigenvalue", "rank"].iter().map(|s| s.to_string()).collect();
    cols.extend((0..shape.diag_len()).map(|i| format!("eig{i}")));
    for (k, &n) in shape.blocks().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                cols.push(format!("b{k}_{i}_{j}_re"));
                cols.push(format!("b{k}_{i}_{j}_im"));
            }
        }
    }
    cols
}

/// One row per sample: time, trace, minimal eigenvalue, total rank,
/// ascending eigenvalues, then block entries row-major as re/im pairs.
pub fn emit_csv(shape: &AlgebraShape, points: &[GeodesicPoint]) -> String {
    let mut out = csv_header(shape).join(",");
    out.push('\n');
    for p in points {
        let mut row = vec![fmt_num(p.t), fmt_num(p.trace), fmt_num(p.min_eigenvalue), p.rank.total().to_string()];
        row.extend(p.eigenvalues.iter().map(|&l| fmt_num(l)));
        for b in p.density.blocks() {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    row.push(fmt_num(b[(i, j)].re));
                    row.push(fmt_num(b[(i, j)].im));
                }
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli;
    use crate::geodesic::{geodesic_point, sample as sample_geodesic};
    use crate::orbits::Functional;
    use crate::sample;

    #[test]
    fn minimal_state_document() {
        let doc = parse(r#"{"blocks":[2],"state":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#).unwrap();
        let Payload::State(s) = doc.payload else { panic!("expected a state") };
        assert_eq!(s.density(), &pauli::identity().scale(0.5));
    }

    #[test]
    fn non_unit_trace_is_a_validation_error() {
        let err = parse(r#"{"blocks":[2],"state":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#).unwrap_err();
        match err {
            IoError::Validation { path, source } => {
                assert_eq!(path, "$.state");
                assert!(matches!(source, Error::NotUnitTrace(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn abelian_document_from_diagonal_matrix() {
        let doc = parse(r#"{"algebra":{"blocks":[1,1]},"state":[[[0.25,0],[0,0]],[[0,0],[0.75,0]]]}"#).unwrap();
        let Payload::State(s) = doc.payload else { panic!() };
        assert!(s.shape().is_abelian());
        assert_eq!(s.density().block(1)[(0, 0)].re, 0.75);

        let block_form = parse(r#"{"algebra":{"blocks":[1,1]},"state":[[[[0.25,0]]],[[[0.75,0]]]]}"#).unwrap();
        let Payload::State(t) = block_form.payload else { panic!() };
        assert_eq!(s.density(), t.density());

        let err = parse(r#"{"blocks":[1,1],"element":[[1,2],[0,1]]}"#).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn real_block_lists_are_not_mistaken_for_complex_entries() {
        let doc = parse(r#"{"blocks":[1,1],"state":[[[0.5]],[[0.5]]]}"#).unwrap();
        let Payload::State(s) = doc.payload else { panic!() };
        assert_eq!(s.density().block(0)[(0, 0)].re, 0.5);

        let doc = parse(r#"{"blocks":[2],"state":[[[0.5,0],[0,0.5]]]}"#).unwrap();
        let Payload::State(s) = doc.payload else { panic!() };
        assert_eq!(s.density(), &pauli::identity().scale(0.5));

        let doc = parse(r#"{"blocks":[2,1],"state":[[[0.3,0],[0,0.3]],[[0.4]]]}"#).unwrap();
        let Payload::State(s) = doc.payload else { panic!() };
        assert_eq!(s.density().block(1)[(0, 0)].re, 0.4);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse(r#"{"blocks":[2],"state":[[[0.5,0],[0,0]],[[0,0]]]}"#).unwrap_err();
        assert!(matches!(err, IoError::Schema { ref path, .. } if path == "$.state[1]"), "{err}");
        let err = parse(r#"{"blocks":[2],"state":[[1,0],[0,0]],"extra":1}"#).unwrap_err();
        assert!(matches!(err, IoError::Schema { .. }));
        let err = parse(r#"{"blocks":[2]}"#).unwrap_err();
        assert!(matches!(err, IoError::Schema { .. }));
        let err = parse(r#"{"blocks":[2],"element":[["a",0],[0,0]]}"#).unwrap_err();
        assert!(matches!(err, IoError::Schema { ref path, .. } if path == "$.element[0][0]"), "{err}");
        let err = parse(r#"{"blocks":[0],"element":[]}"#).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn tangent_and_geodesic_documents() {
        let doc = parse(
            r#"{"blocks":[2],"tangent":{"base":[[0.5,0],[0,0.5]],"value":[[0.5,0],[0,-0.5]]}}"#,
        )
        .unwrap();
        let Payload::Tangent(t) = doc.payload else { panic!() };
        assert_eq!(t.value(), &pauli::z().scale(0.5));

        let err = parse(r#"{"blocks":[2],"tangent":{"base":[[0.5,0],[0,0.5]],"value":[[1,0],[0,0]]}}"#).unwrap_err();
        assert!(matches!(err, IoError::Validation { source: Error::NotTraceless(_), .. }));

        let err = parse(r#"{"blocks":[2],"geodesic":{"start":[[0.5,0],[0,0.5]],"direction":[[1,0],[0,1]]}}"#).unwrap_err();
        assert!(matches!(err, IoError::Validation { source: Error::ZeroDirection, .. }));
    }

    #[test]
    fn emit_parse_round_trip_is_exact() {
        let mut rng = sample::rng_from_seed(1);
        let s = AlgebraShape::new(vec![3, 1, 2]).unwrap();
        let rho = sample::random_state(&s, &mut rng);
        let a = sample::random_self_adjoint(&s, &mut rng);
        let z = sample::random_element(&s, &mut rng);
        let v = crate::orbits::gradient_vec(&rho, &a).unwrap();
        let g = GeodesicSpec::new(rho.clone(), a.clone()).unwrap();
        for payload in [
            Payload::Element(z),
            Payload::State(rho.clone()),
            Payload::Positive(rho.as_positive()),
            Payload::Tangent(v),
            Payload::Geodesic(g),
        ] {
            let text = emit(&payload);
            let back = parse(&text).unwrap().payload;
            let pairs: Vec<(Element, Element)> = match (&payload, &back) {
                (Payload::Element(x), Payload::Element(y)) => vec![(x.clone(), y.clone())],
                (Payload::State(x), Payload::State(y)) => vec![(x.density().clone(), y.density().clone())],
                (Payload::Positive(x), Payload::Positive(y)) => vec![(x.density().clone(), y.density().clone())],
                (Payload::Tangent(x), Payload::Tangent(y)) => {
                    vec![(x.base().clone(), y.base().clone()), (x.value().clone(), y.value().clone())]
                }
                (Payload::Geodesic(x), Payload::Geodesic(y)) => vec![
                    (x.start().density().clone(), y.start().density().clone()),
                    (x.direction().clone(), y.direction().clone()),
                ],
                _ => panic!("payload kind changed"),
            };
            for (x, y) in pairs {
                assert_eq!(x, y);
            }
            assert_eq!(emit(&back), text);
        }
    }

    #[test]
    fn csv_layout() {
        let mut rng = sample::rng_from_seed(2);
        let n = 3;
        let s = AlgebraShape::full(n);
        let rho = sample::random_state(&s, &mut rng);
        let g = GeodesicSpec::new(rho.clone(), sample::random_self_adjoint(&s, &mut rng)).unwrap();
        let csv = emit_csv(&s, &sample_geodesic(&g, 1.0, 5));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 6);
        for line in &lines {
            assert_eq!(line.split(',').count(), 3 + 1 + n + 2 * n * n);
        }
        // the t = 0 row carries the input entries
        let first: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
        let entries = &first[4 + n..];
        let b = rho.density().block(0);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(entries[2 * (i * n + j)], b[(i, j)].re);
                assert_eq!(entries[2 * (i * n + j) + 1], b[(i, j)].im);
            }
        }
        assert_eq!(first[0], 0.0);
        assert!((first[1] - 1.0).abs() < 1e-15);
        // deterministic text
        assert_eq!(csv, emit_csv(&s, &sample_geodesic(&g, 1.0, 5)));
        let single = emit_csv(&s, &[geodesic_point(&g, 0.0)]);
        assert_eq!(single.lines().count(), 2);
    }
}
