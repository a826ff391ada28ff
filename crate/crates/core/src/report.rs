//! Serialized invariant tables: JSON with a fixed key order, CSV, and a plain
//! text layout.

use serde::{Deserialize, Serialize};

use crate::bigcomplex::{BigComplex, BigReal};
use crate::error::{Error, Result};
use crate::rayclass::InvariantTable;
use crate::symplectic::SiegelPoint;

/// Significant digits of the short display form.
pub const SHORT_DIGITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: String,
    pub im: String,
}

impl ComplexJson {
    pub fn from_value(z: &BigComplex) -> Self {
        ComplexJson { re: z.re().to_decimal_string(), im: z.im().to_decimal_string() }
    }

    pub fn to_value(&self, prec: u32) -> Result<BigComplex> {
        let parse = |s: &str| BigReal::parse_decimal(s, prec).ok_or_else(|| Error::Parse(format!("bad decimal '{s}'")));
        Ok(BigComplex::new(parse(&self.re)?, parse(&self.im)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub label: String,
    pub r_vector: Vec<String>,
    pub theta: ComplexJson,
}

/// `{ ell, N, prec_bits, cm_point, classes }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub ell: u32,
    #[serde(rename = "N")]
    pub level: i64,
    pub prec_bits: u32,
    pub cm_point: Vec<Vec<ComplexJson>>,
    pub classes: Vec<ClassJson>,
}

pub fn point_json(z: &SiegelPoint) -> Vec<Vec<ComplexJson>> {
    z.matrix().to_rows().iter().map(|row| row.iter().map(ComplexJson::from_value).collect()).collect()
}

/// `k/N` strings, unreduced.
pub fn fraction_strings(r: &[i64], level: i64) -> Vec<String> {
    r.iter().map(|k| format!("{k}/{level}")).collect()
}

impl TableJson {
    pub fn from_table(t: &InvariantTable) -> Self {
        TableJson {
            ell: t.ell,
            level: t.level,
            prec_bits: t.prec,
            cm_point: point_json(&t.cm_point),
            classes: t
                .rows
                .iter()
                .map(|row| ClassJson {
                    label: format!("C_{}", row.label),
                    r_vector: fraction_strings(&row.r_vector, t.level),
                    theta: ComplexJson::from_value(&row.value),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Invariants parsed back at `prec_bits`.
    pub fn values(&self) -> Result<Vec<BigComplex>> {
        self.classes.iter().map(|c| c.theta.to_value(self.prec_bits)).collect()
    }
}

pub fn to_csv(t: &InvariantTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(["label", "r_vector", "re", "im"]).map_err(io)?;
    for row in &t.rows {
        w.write_record([
            format!("C_{}", row.label),
            fraction_strings(&row.r_vector, t.level).join(";"),
            row.value.re().to_sci(SHORT_DIGITS),
            row.value.im().to_sci(SHORT_DIGITS),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_text(t: &InvariantTable) -> String {
    let mut out = format!(
        "ell = {}, N = {}, prec = {} bits, Cl(f) orders {:?}\n",
        t.ell, t.level, t.prec, t.cyclic_orders
    );
    for row in &t.rows {
        let r = fraction_strings(&row.r_vector, t.level).join(", ");
        out.push_str(&format!("C_{:<3} [{r}]  {}\n", row.label, row.value.to_sci(SHORT_DIGITS)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TableJson {
        TableJson {
            ell: 5,
            level: 5,
            prec_bits: 128,
            cm_point: vec![vec![ComplexJson { re: "1.5e0".into(), im: "-2.25e-3".into() }]],
            classes: vec![ClassJson {
                label: "C_1".into(),
                r_vector: fraction_strings(&[1, 2, 0, 3], 5),
                theta: ComplexJson { re: "-2.13359e-69".into(), im: "4.17297e-70".into() },
            }],
        }
    }

    #[test]
    fn key_order_is_fixed() {
        let s = sample().to_json_string();
        let keys = ["\"ell\"", "\"N\"", "\"prec_bits\"", "\"cm_point\"", "\"classes\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(s.contains("\"0/5\""));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let s = sample().to_json_string();
        assert_eq!(TableJson::parse(&s).unwrap().to_json_string(), s);
    }

    #[test]
    fn decimals_parse_back() {
        let v = sample().values().unwrap();
        assert_eq!(v[0].re().to_sci(6), "-2.13359e-69");
    }
}
