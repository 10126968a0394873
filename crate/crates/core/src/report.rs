//! Row-oriented bound records shared by the trajectory checks, sweeps and CLI.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::finite_time::Recipe;
use crate::stability::KappaVariant;

pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "n_or_t",
    "exact",
    "bound",
    "slack",
    "regime",
    "K",
    "rate",
    "recipe",
    "kappa_variant",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    PreThreshold,
    PostThreshold,
    /// Fixed-point comparison (no time index).
    Stationary,
    Error,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::PreThreshold => "pre_threshold",
            Regime::PostThreshold => "post_threshold",
            Regime::Stationary => "stationary",
            Regime::Error => "error",
        }
    }
}

/// One comparison of an exact distance against a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub instance: u64,
    #[serde(with = "crate::serde_ext::extended_float")]
    pub n_or_t: f64,
    pub exact: f64,
    #[serde(with = "crate::serde_ext::extended_float")]
    pub bound: f64,
    #[serde(with = "crate::serde_ext::extended_float")]
    pub slack: f64,
    pub regime: Regime,
    #[serde(rename = "K")]
    pub k: Option<f64>,
    pub rate: Option<f64>,
    pub recipe: Option<Recipe>,
    pub kappa_variant: Option<KappaVariant>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl BoundReport {
    pub fn error_row(instance: u64, message: String) -> Self {
        BoundReport {
            instance,
            n_or_t: f64::NAN,
            exact: f64::NAN,
            bound: f64::NAN,
            slack: f64::NAN,
            regime: Regime::Error,
            k: None,
            rate: None,
            recipe: None,
            kappa_variant: None,
            error: Some(message),
        }
    }

    /// `exact ≤ bound + tol`; error rows never hold.
    pub fn holds(&self, tol: f64) -> bool {
        self.regime != Regime::Error && self.slack >= -tol
    }
}

/// Shortest round-trip form, with `inf`/`-inf`/`nan` spelled out.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:?}")
    }
}

/// `x` rounded to `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format_float(x);
    }
    if x == 0.0 {
        return "0".into();
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let parsed: f64 = s.parse().expect("formatted float parses");
    let exp = parsed.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{parsed:.decimals$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        match s.split_once('e') {
            Some((m, e)) if m.contains('.') => {
                format!("{}e{e}", m.trim_end_matches('0').trim_end_matches('.'))
            }
            _ => s,
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_csv<W: Write>(out: W, rows: &[BoundReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| std::io::Error::other(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.instance.to_string(),
            format_float(r.n_or_t),
            format_float(r.exact),
            format_float(r.bound),
            format_float(r.slack),
            r.regime.as_str().to_string(),
            opt(r.k),
            opt(r.rate),
            r.recipe.map(|x| x.as_str().to_string()).unwrap_or_default(),
            r.kappa_variant
                .map(|x| x.as_str().to_string())
                .unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(2.0, 12), "2");
        assert_eq!(format_sig(258.0614478226, 4), "258.1");
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(1.5e-9, 12), "1.5e-9");
        assert_eq!(format_sig(1e-6, 12), "1e-6");
        assert_eq!(format_sig(f64::INFINITY, 12), "inf");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut buf = Vec::new();
        let row = BoundReport {
            instance: 3,
            n_or_t: 1.0,
            exact: 0.1,
            bound: 0.1,
            slack: 0.0,
            regime: Regime::PostThreshold,
            k: Some(1.0),
            rate: Some(0.5),
            recipe: Some(Recipe::Chi2),
            kappa_variant: None,
            error: None,
        };
        write_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "3,1.0,0.1,0.1,0.0,post_threshold,1.0,0.5,chi2,"
        );
    }
}
