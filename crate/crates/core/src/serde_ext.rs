//! Serde adapters for values JSON cannot carry natively.

/// Complex lists as `[[re, im], ...]`.
pub mod complex_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::foundation::C64;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

/// Complex matrix as row-major `[[[re, im], ...], ...]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct MatrixRows(pub Vec<Vec<[f64; 2]>>);

impl From<&crate::foundation::ComplexMatrix> for MatrixRows {
    fn from(m: &crate::foundation::ComplexMatrix) -> Self {
        MatrixRows(
            m.row_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        )
    }
}

impl TryFrom<MatrixRows> for crate::foundation::ComplexMatrix {
    type Error = String;

    fn try_from(rows: MatrixRows) -> Result<Self, String> {
        let n = rows.0.len();
        let m = rows.0.first().map_or(0, Vec::len);
        if let Some(i) = rows.0.iter().position(|r| r.len() != m) {
            return Err(format!(
                "row {i} has {} entries, expected {m}",
                rows.0[i].len()
            ));
        }
        Ok(crate::foundation::ComplexMatrix::from_fn(n, m, |i, j| {
            let [re, im] = rows.0[i][j];
            crate::foundation::C64::new(re, im)
        }))
    }
}

/// `Option<f64>` whose `Some` payload may be infinite.
pub mod extended_float_opt {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "super::extended_float")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(W).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

/// `f64` that may be infinite: non-finite values are written as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
pub mod extended_float {
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("invalid float `{other}`"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct W {
        #[serde(with = "super::extended_float")]
        x: f64,
    }

    #[test]
    fn infinity_round_trips() {
        let s = serde_json::to_string(&W { x: f64::INFINITY }).unwrap();
        assert_eq!(s, r#"{"x":"inf"}"#);
        assert_eq!(
            serde_json::from_str::<W>(&s).unwrap(),
            W { x: f64::INFINITY }
        );
        let s = serde_json::to_string(&W { x: 0.25 }).unwrap();
        assert_eq!(serde_json::from_str::<W>(&s).unwrap(), W { x: 0.25 });
    }
}
