//! JSON files for triples and Standard Model parameters.
//!
//! Complex numbers are `[re, im]` pairs and matrices are lists of rows. The
//! writer puts one matrix row per line, and floats are printed in shortest
//! round-trip form, so `write(read(write(x)))` reproduces the same bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::AntilinearMap;
use crate::linalg::{c64, ComplexMatrix, Tolerance, C64};
use crate::sm::{SmDiracParams, DELTA_INDICES};
use crate::triple::{RealSpectralTriple, Sign, SignTriple};

pub const SCHEMA_VERSION: &str = "1";

/// Rows of `[re, im]` pairs.
pub type MatrixData = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error on {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// `[re, im]` with `-0.0` written as `0.0`.
fn pair(z: C64) -> [f64; 2] {
    [z.re + 0.0, z.im + 0.0]
}

pub fn matrix_to_data(m: &ComplexMatrix) -> MatrixData {
    m.row_iter()
        .map(|r| r.iter().map(|&z| pair(z)).collect())
        .collect()
}

/// Converts `data` to a `rows x cols` matrix; errors name `field`.
pub fn data_to_matrix(
    data: &MatrixData,
    rows: usize,
    cols: usize,
    field: &str,
) -> Result<ComplexMatrix, IoError> {
    if data.len() != rows {
        return Err(field_err(
            field,
            format!("has {} rows, expected {rows}", data.len()),
        ));
    }
    for (i, row) in data.iter().enumerate() {
        if row.len() != cols {
            return Err(field_err(
                field,
                format!("row {i} has {} entries, expected {cols}", row.len()),
            ));
        }
        if let Some(j) = row
            .iter()
            .position(|p| !p[0].is_finite() || !p[1].is_finite())
        {
            return Err(field_err(
                field,
                format!("non-finite entry at row {i}, column {j}"),
            ));
        }
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = data[i][j];
        c64(re, im)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignsData {
    pub epsilon: i64,
    pub epsilon_prime: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_double_prime: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleFile {
    pub schema_version: String,
    pub dim_h: usize,
    pub algebra_generators: Vec<MatrixData>,
    pub dirac: MatrixData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<MatrixData>,
    pub j_linear_part: MatrixData,
    pub signs: SignsData,
}

fn sign(v: i64, field: &str) -> Result<Sign, IoError> {
    Sign::try_from(v).map_err(|v| field_err(field, format!("must be 1 or -1, got {v}")))
}

fn check_version(v: &str) -> Result<(), IoError> {
    if v != SCHEMA_VERSION {
        return Err(field_err(
            "schema_version",
            format!("unsupported version {v:?}, expected {SCHEMA_VERSION:?}"),
        ));
    }
    Ok(())
}

impl TripleFile {
    pub fn from_triple(t: &RealSpectralTriple) -> Self {
        let s = t.signs();
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            dim_h: t.dim_h(),
            algebra_generators: t.generators().iter().map(matrix_to_data).collect(),
            dirac: matrix_to_data(t.dirac()),
            gamma: t.gamma().map(matrix_to_data),
            j_linear_part: matrix_to_data(t.j().linear_part()),
            signs: SignsData {
                epsilon: s.epsilon.as_i8().into(),
                epsilon_prime: s.epsilon_prime.as_i8().into(),
                epsilon_double_prime: s.epsilon_double_prime.map(|e| e.as_i8().into()),
            },
        }
    }

    /// Builds the triple. Only structural properties are checked here (plus
    /// unitarity of `J`); the axioms are left to validation.
    pub fn to_triple(&self, tol: &Tolerance) -> Result<RealSpectralTriple, IoError> {
        check_version(&self.schema_version)?;
        let n = self.dim_h;
        if n == 0 {
            return Err(field_err("dim_h", "must be positive"));
        }
        if self.algebra_generators.is_empty() {
            return Err(field_err(
                "algebra_generators",
                "at least one generator is required",
            ));
        }
        let generators = self
            .algebra_generators
            .iter()
            .enumerate()
            .map(|(k, g)| data_to_matrix(g, n, n, &format!("algebra_generators[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let dirac = data_to_matrix(&self.dirac, n, n, "dirac")?;
        let gamma = self
            .gamma
            .as_ref()
            .map(|g| data_to_matrix(g, n, n, "gamma"))
            .transpose()?;
        let c = data_to_matrix(&self.j_linear_part, n, n, "j_linear_part")?;
        let j =
            AntilinearMap::new(c, tol).map_err(|e| field_err("j_linear_part", e.to_string()))?;
        let signs = SignTriple {
            epsilon: sign(self.signs.epsilon, "signs.epsilon")?,
            epsilon_prime: sign(self.signs.epsilon_prime, "signs.epsilon_prime")?,
            epsilon_double_prime: self
                .signs
                .epsilon_double_prime
                .map(|v| sign(v, "signs.epsilon_double_prime"))
                .transpose()?,
        };
        if gamma.is_some() != signs.epsilon_double_prime.is_some() {
            return Err(field_err(
                "signs.epsilon_double_prime",
                "must be present exactly when gamma is",
            ));
        }
        RealSpectralTriple::new(generators, dirac, gamma, j, signs)
            .map_err(|e| field_err("dirac", e.to_string()))
    }
}

/// A parameter entry: a bare complex number (one generation only) or an
/// `n x n` matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryData {
    Scalar([f64; 2]),
    Matrix(MatrixData),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmParamsFile {
    pub schema_version: String,
    pub generations: usize,
    /// `[[alpha13, alpha14], [alpha23, alpha24]]`.
    pub alpha: [[EntryData; 2]; 2],
    pub beta: [[EntryData; 2]; 2],
    /// Keyed `"12"`, `"13"`, ..., `"24"`.
    pub delta: BTreeMap<String, EntryData>,
    pub upsilon_r: EntryData,
}

impl SmParamsFile {
    pub fn from_params(p: &SmDiracParams) -> Self {
        let n = p.generations();
        let entry = |m: &ComplexMatrix| {
            if n == 1 {
                EntryData::Scalar(pair(m[(0, 0)]))
            } else {
                EntryData::Matrix(matrix_to_data(m))
            }
        };
        let block =
            |f: &dyn Fn(usize, usize) -> EntryData| [[f(1, 3), f(1, 4)], [f(2, 3), f(2, 4)]];
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            generations: n,
            alpha: block(&|i, j| entry(p.alpha(i, j))),
            beta: block(&|i, j| entry(p.beta(i, j))),
            delta: DELTA_INDICES
                .iter()
                .map(|&(i, j)| (format!("{i}{j}"), entry(p.delta(i, j))))
                .collect(),
            upsilon_r: entry(p.upsilon_r()),
        }
    }

    pub fn to_params(&self) -> Result<SmDiracParams, IoError> {
        check_version(&self.schema_version)?;
        let n = self.generations;
        let mut p = SmDiracParams::zero(n).map_err(|e| field_err("generations", e.to_string()))?;
        let entry = |e: &EntryData, field: &str| -> Result<ComplexMatrix, IoError> {
            match e {
                EntryData::Scalar([re, im]) if n == 1 => {
                    if !re.is_finite() || !im.is_finite() {
                        return Err(field_err(field, "non-finite entry"));
                    }
                    Ok(ComplexMatrix::from_element(1, 1, c64(*re, *im)))
                }
                EntryData::Scalar(_) => Err(field_err(
                    field,
                    format!("expected a {n}x{n} matrix, got a scalar"),
                )),
                EntryData::Matrix(m) => data_to_matrix(m, n, n, field),
            }
        };
        for (r, i) in [1, 2].into_iter().enumerate() {
            for (c, j) in [3, 4].into_iter().enumerate() {
                let a = entry(&self.alpha[r][c], &format!("alpha[{r}][{c}]"))?;
                p.set_alpha(i, j, a).expect("shape checked");
                let b = entry(&self.beta[r][c], &format!("beta[{r}][{c}]"))?;
                p.set_beta(i, j, b).expect("shape checked");
            }
        }
        for key in self.delta.keys() {
            if !DELTA_INDICES
                .iter()
                .any(|&(i, j)| *key == format!("{i}{j}"))
            {
                return Err(field_err(format!("delta.{key}"), "unknown entry"));
            }
        }
        for &(i, j) in &DELTA_INDICES {
            let key = format!("{i}{j}");
            let field = format!("delta.{key}");
            let e = self
                .delta
                .get(&key)
                .ok_or_else(|| field_err(&field, "missing entry"))?;
            p.set_delta(i, j, entry(e, &field)?).expect("shape checked");
        }
        p.set_upsilon_r(entry(&self.upsilon_r, "upsilon_r")?)
            .expect("shape checked");
        Ok(p)
    }
}

/// Parses JSON text, reporting the path of the offending value.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        IoError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| IoError::Parse {
        path: ".".into(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(value)
}

/// Serializes with two-space indentation, keeping arrays of numbers and
/// arrays of number pairs on a single line. Ends with a newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("file types serialize to JSON");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn nesting(v: &Value) -> usize {
    match v {
        Value::Array(items) => 1 + items.iter().map(nesting).max().unwrap_or(0),
        Value::Object(_) => usize::MAX / 2,
        _ => 0,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, k: usize| out.extend(std::iter::repeat_n("  ", k));
    match v {
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if nesting(v) <= 2 => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(key).expect("string keys"));
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
        scalar => out.push_str(&serde_json::to_string(scalar).expect("scalars serialize")),
    }
}

pub fn read_file<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_json(&text)
}

pub fn write_file<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, to_json(value)).map_err(|source| IoError::Io {
        path: path.display().to_string(),
        source,
    })
}
