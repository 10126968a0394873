//! Channel file format.
//!
//! ```json
//! { "dim": 2, "representation": "kraus", "label": "depol",
//!   "data": [ [[ [1,0], [0,0] ], [ [0,0], [1,0] ]] ] }
//! ```
//!
//! `kraus`: array of d×d matrices; `superoperator` / `generator`: one d²×d²
//! matrix (column-stacking convention); entries are `[re, im]` pairs.
//! `stochastic`: d×d array of reals.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{GeneratorMap, SuperOperator};
use crate::error::{QmsError, Result};
use crate::foundation::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Kraus,
    Superoperator,
    Stochastic,
    Generator,
}

impl Representation {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "kraus" => Some(Representation::Kraus),
            "superoperator" => Some(Representation::Superoperator),
            "stochastic" => Some(Representation::Stochastic),
            "generator" => Some(Representation::Generator),
            _ => None,
        }
    }
}

/// On-disk form of a channel or generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim: usize,
    pub representation: Representation,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A parsed channel file.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    Channel {
        map: SuperOperator,
        label: Option<String>,
    },
    Generator {
        map: GeneratorMap,
        label: Option<String>,
    },
}

impl ChannelSpec {
    pub fn label(&self) -> Option<&str> {
        match self {
            ChannelSpec::Channel { label, .. } | ChannelSpec::Generator { label, .. } => {
                label.as_deref()
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ChannelSpec::Channel { map, .. } => map.dim(),
            ChannelSpec::Generator { map, .. } => map.dim(),
        }
    }
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err(&self, field: &str, detail: impl Into<String>) -> QmsError {
        QmsError::Parse {
            location: format!("{}: field `{field}`", self.source),
            detail: detail.into(),
        }
    }

    fn complex(&self, v: &Value, field: &str) -> Result<C64> {
        let pair = v
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| self.err(field, "expected a [re, im] pair"))?;
        let re = self.real(&pair[0], &format!("{field}[0]"))?;
        let im = self.real(&pair[1], &format!("{field}[1]"))?;
        Ok(C64::new(re, im))
    }

    fn real(&self, v: &Value, field: &str) -> Result<f64> {
        let x = v
            .as_f64()
            .ok_or_else(|| self.err(field, "expected a number"))?;
        if !x.is_finite() {
            return Err(self.err(field, "non-finite number"));
        }
        Ok(x)
    }

    fn rows<'v>(&self, v: &'v Value, n: usize, field: &str) -> Result<&'v Vec<Value>> {
        let rows = v
            .as_array()
            .ok_or_else(|| self.err(field, "expected an array of rows"))?;
        if rows.len() != n {
            return Err(self.err(field, format!("expected {n} rows, found {}", rows.len())));
        }
        Ok(rows)
    }

    fn complex_matrix(&self, v: &Value, n: usize, field: &str) -> Result<ComplexMatrix> {
        let rows = self.rows(v, n, field)?;
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row_field = format!("{field}[{i}]");
            let cols = self.rows(row, n, &row_field)?;
            for (j, entry) in cols.iter().enumerate() {
                m[(i, j)] = self.complex(entry, &format!("{row_field}[{j}]"))?;
            }
        }
        Ok(m)
    }

    fn real_matrix(&self, v: &Value, n: usize, field: &str) -> Result<DMatrix<f64>> {
        let rows = self.rows(v, n, field)?;
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            let row_field = format!("{field}[{i}]");
            let cols = self.rows(row, n, &row_field)?;
            for (j, entry) in cols.iter().enumerate() {
                m[(i, j)] = self.real(entry, &format!("{row_field}[{j}]"))?;
            }
        }
        Ok(m)
    }
}

fn relabel(source: &str, field: &str, e: QmsError) -> QmsError {
    match e {
        QmsError::Parse { .. } => e,
        other => QmsError::Parse {
            location: format!("{source}: field `{field}`"),
            detail: other.to_string(),
        },
    }
}

/// Parses channel JSON; `source` names the input in error messages.
pub fn parse_channel_str(text: &str, source: &str) -> Result<ChannelSpec> {
    let root: Value = serde_json::from_str(text).map_err(|e| QmsError::Parse {
        location: format!("{source}:{}:{}", e.line(), e.column()),
        detail: e.to_string(),
    })?;
    let ctx = Ctx { source };
    let obj = root
        .as_object()
        .ok_or_else(|| ctx.err("<root>", "expected a JSON object"))?;

    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .filter(|&d| d >= 1)
        .ok_or_else(|| ctx.err("dim", "expected a positive integer"))? as usize;
    let rep_str = obj
        .get("representation")
        .and_then(Value::as_str)
        .ok_or_else(|| ctx.err("representation", "expected a string"))?;
    let rep = Representation::parse(rep_str).ok_or_else(|| {
        ctx.err(
            "representation",
            format!(
                "unknown representation `{rep_str}` (kraus|superoperator|stochastic|generator)"
            ),
        )
    })?;
    let label = match obj.get("label") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(ctx.err("label", "expected a string")),
    };
    let data = obj.get("data").ok_or_else(|| ctx.err("data", "missing"))?;

    match rep {
        Representation::Kraus => {
            let ops = data
                .as_array()
                .filter(|a| !a.is_empty())
                .ok_or_else(|| ctx.err("data", "expected a nonempty array of Kraus matrices"))?;
            let mats = ops
                .iter()
                .enumerate()
                .map(|(k, m)| ctx.complex_matrix(m, dim, &format!("data[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            let map = SuperOperator::from_kraus(&mats).map_err(|e| relabel(source, "data", e))?;
            Ok(ChannelSpec::Channel { map, label })
        }
        Representation::Superoperator => {
            let m = ctx.complex_matrix(data, dim * dim, "data")?;
            let map = SuperOperator::from_matrix(dim, m).map_err(|e| relabel(source, "data", e))?;
            Ok(ChannelSpec::Channel { map, label })
        }
        Representation::Stochastic => {
            let s = ctx.real_matrix(data, dim, "data")?;
            let map = SuperOperator::from_stochastic(&s).map_err(|e| relabel(source, "data", e))?;
            Ok(ChannelSpec::Channel { map, label })
        }
        Representation::Generator => {
            let m = ctx.complex_matrix(data, dim * dim, "data")?;
            let map = GeneratorMap::from_matrix(dim, m).map_err(|e| relabel(source, "data", e))?;
            Ok(ChannelSpec::Generator { map, label })
        }
    }
}

pub fn parse_channel_file(path: &Path) -> Result<ChannelSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| QmsError::Parse {
        location: path.display().to_string(),
        detail: e.to_string(),
    })?;
    parse_channel_str(&text, &path.display().to_string())
}

/// Parses a density matrix written as a JSON array of rows whose entries are
/// `[re, im]` pairs or plain reals.
pub fn parse_state_str(text: &str, source: &str) -> Result<super::DensityMatrix> {
    let root: Value = serde_json::from_str(text).map_err(|e| QmsError::Parse {
        location: format!("{source}:{}:{}", e.line(), e.column()),
        detail: e.to_string(),
    })?;
    let ctx = Ctx { source };
    let n = root
        .as_array()
        .map(Vec::len)
        .filter(|&n| n > 0)
        .ok_or_else(|| ctx.err("<root>", "expected a nonempty array of rows"))?;
    let rows = ctx.rows(&root, n, "<root>")?;
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let field = format!("[{i}]");
        for (j, entry) in ctx.rows(row, n, &field)?.iter().enumerate() {
            let f = format!("[{i}][{j}]");
            m[(i, j)] = if entry.is_array() {
                ctx.complex(entry, &f)?
            } else {
                C64::new(ctx.real(entry, &f)?, 0.0)
            };
        }
    }
    super::DensityMatrix::new(m).map_err(|e| relabel(source, "<root>", e))
}

pub fn parse_state_file(path: &Path) -> Result<super::DensityMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| QmsError::Parse {
        location: path.display().to_string(),
        detail: e.to_string(),
    })?;
    parse_state_str(&text, &path.display().to_string())
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

impl ChannelFile {
    pub fn from_superoperator(map: &SuperOperator, label: Option<&str>) -> Self {
        ChannelFile {
            dim: map.dim(),
            representation: Representation::Superoperator,
            data: matrix_value(map.matrix()),
            label: label.map(str::to_owned),
        }
    }

    pub fn from_generator(map: &GeneratorMap, label: Option<&str>) -> Self {
        ChannelFile {
            dim: map.dim(),
            representation: Representation::Generator,
            data: matrix_value(map.matrix()),
            label: label.map(str::to_owned),
        }
    }

    pub fn from_kraus(ops: &[ComplexMatrix], label: Option<&str>) -> Self {
        ChannelFile {
            dim: ops.first().map_or(0, |m| m.nrows()),
            representation: Representation::Kraus,
            data: Value::Array(ops.iter().map(matrix_value).collect()),
            label: label.map(str::to_owned),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundation::max_abs;

    #[test]
    fn superoperator_round_trip() {
        let t = SuperOperator::amplitude_damping(0.25);
        let text = ChannelFile::from_superoperator(&t, Some("ad")).to_json();
        match parse_channel_str(&text, "mem").unwrap() {
            ChannelSpec::Channel { map, label } => {
                assert_eq!(label.as_deref(), Some("ad"));
                assert!(max_abs(&(map.matrix() - t.matrix())) == 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kraus_and_stochastic() {
        let text = r#"{"dim": 2, "representation": "kraus",
            "data": [[[[1,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let spec = parse_channel_str(text, "mem").unwrap();
        assert_eq!(
            spec,
            ChannelSpec::Channel {
                map: SuperOperator::from_kraus(&[crate::foundation::identity(2)]).unwrap(),
                label: None
            }
        );

        let text = r#"{"dim": 2, "representation": "stochastic", "data": [[0,1],[1,0]]}"#;
        assert!(parse_channel_str(text, "mem").is_ok());
    }

    #[test]
    fn generator_is_checked() {
        let l = GeneratorMap::depolarizing(2, 1.0);
        let text = ChannelFile::from_generator(&l, None).to_json();
        assert!(matches!(
            parse_channel_str(&text, "mem").unwrap(),
            ChannelSpec::Generator { .. }
        ));
        let bad = ChannelFile {
            representation: Representation::Generator,
            ..ChannelFile::from_superoperator(&SuperOperator::identity(2), None)
        };
        let err = parse_channel_str(&bad.to_json(), "mem").unwrap_err();
        assert!(err.to_string().contains("field `data`"), "{err}");
    }

    #[test]
    fn errors_name_the_field() {
        let text = r#"{"dim": 2, "representation": "stochastic", "data": [[0,1],[1,"x"]]}"#;
        let err = parse_channel_str(text, "f.json").unwrap_err().to_string();
        assert!(err.contains("data[1][1]"), "{err}");

        let text = r#"{"dim": 2, "representation": "kraus", "data": [[[[1,0],[0,0]]]]}"#;
        let err = parse_channel_str(text, "f.json").unwrap_err().to_string();
        assert!(
            err.contains("data[0]") && err.contains("expected 2 rows"),
            "{err}"
        );

        let text = r#"{"dim": 2, "representation": "bogus", "data": []}"#;
        let err = parse_channel_str(text, "f.json").unwrap_err().to_string();
        assert!(err.contains("representation"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_line() {
        let text = "{\n \"dim\": 2,\n \"data\": [NaN]\n}";
        let err = parse_channel_str(text, "f.json").unwrap_err().to_string();
        assert!(err.contains("f.json:3:"), "{err}");
        let text = r#"{"dim": 1, "representation": "stochastic", "data": [[1e999]]}"#;
        assert!(parse_channel_str(text, "f.json").is_err());
    }

    #[test]
    fn state_files() {
        let rho = parse_state_str("[[0.5, 0], [0, 0.5]]", "mem").unwrap();
        assert_eq!(rho, crate::channel::DensityMatrix::maximally_mixed(2));
        let rho = parse_state_str("[[[1,0],[0,0]],[[0,0],[0,0]]]", "mem").unwrap();
        assert_eq!(rho, crate::channel::DensityMatrix::basis(2, 0));
        let err = parse_state_str("[[1, 0], [0, 1]]", "s.json").unwrap_err();
        assert!(err.to_string().contains("s.json"), "{err}");
        let err = parse_state_str("[[1, 0], [0]]", "s.json").unwrap_err();
        assert!(err.to_string().contains("[1]"), "{err}");
    }
}
