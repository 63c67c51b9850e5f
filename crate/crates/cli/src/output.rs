//! Profile tables as CSV or JSON.
//!
//! Floats are written with 17 significant digits so that a table read back
//! from CSV is bit-identical to the one written; `inf` and `nan` are spelled
//! literally.

use std::io::{Read, Write};

use freewalk_core::{ExactCell, ProfileRow};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

pub const PROFILE_COLUMNS: [&str; 14] = [
    "k",
    "k0_flag",
    "dsh_upper",
    "closed_upper",
    "char_lower",
    "window_lower",
    "exact_tv",
    "exact_err",
    "l2_norm",
    "dsh_status",
    "closed_status",
    "char_status",
    "window_status",
    "exact_status",
];

/// One flattened profile row.
#[derive(Debug, Clone)]
pub struct ProfileRecord {
    pub k: u32,
    pub k0_flag: bool,
    pub dsh_upper: f64,
    pub closed_upper: f64,
    pub char_lower: f64,
    pub window_lower: f64,
    pub exact_tv: f64,
    pub exact_err: f64,
    pub l2_norm: f64,
    pub dsh_status: String,
    pub closed_status: String,
    pub char_status: String,
    pub window_status: String,
    pub exact_status: String,
}

impl ProfileRecord {
    fn floats(&self) -> [f64; 7] {
        [
            self.dsh_upper,
            self.closed_upper,
            self.char_lower,
            self.window_lower,
            self.exact_tv,
            self.exact_err,
            self.l2_norm,
        ]
    }

    fn statuses(&self) -> [&str; 5] {
        [&self.dsh_status, &self.closed_status, &self.char_status, &self.window_status, &self.exact_status]
    }

    /// Field-wise equality with floats compared bit for bit.
    pub fn same_as(&self, other: &ProfileRecord) -> bool {
        self.k == other.k
            && self.k0_flag == other.k0_flag
            && self.floats().iter().zip(other.floats()).all(|(a, b)| a.to_bits() == b.to_bits())
            && self.statuses() == other.statuses()
    }
}

impl From<&ProfileRow> for ProfileRecord {
    fn from(row: &ProfileRow) -> Self {
        let (exact_tv, exact_err, exact_status) = match &row.exact {
            ExactCell::Value { value, error_bar } => (*value, *error_bar, "valid"),
            ExactCell::Divergent => (f64::INFINITY, f64::NAN, "divergent"),
            ExactCell::Skipped => (f64::NAN, f64::NAN, "skipped"),
            ExactCell::Failed { .. } => (f64::NAN, f64::NAN, "failed"),
        };
        ProfileRecord {
            k: row.k,
            k0_flag: row.reaches_threshold,
            dsh_upper: row.dsh_upper.value,
            closed_upper: row.closed_upper.value,
            char_lower: row.char_lower.value,
            window_lower: row.window_lower.value,
            exact_tv,
            exact_err,
            l2_norm: row.l2_norm,
            dsh_status: row.dsh_upper.status.to_string(),
            closed_status: row.closed_upper.status.to_string(),
            char_status: row.char_lower.status.to_string(),
            window_status: row.window_lower.status.to_string(),
            exact_status: exact_status.to_string(),
        }
    }
}

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
        format!("{x:.16e}")
    }
}

fn parse_float(s: &str) -> CliResult<f64> {
    s.parse().map_err(|_| CliError::Output(format!("bad number `{s}`")))
}

pub fn write_profile_csv<W: Write>(records: &[ProfileRecord], out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROFILE_COLUMNS)?;
    for r in records {
        let mut fields = vec![r.k.to_string(), r.k0_flag.to_string()];
        fields.extend(r.floats().iter().map(|&x| format_float(x)));
        fields.extend(r.statuses().iter().map(|s| s.to_string()));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile_csv<R: Read>(input: R) -> CliResult<Vec<ProfileRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(PROFILE_COLUMNS.iter().copied()) {
        return Err(CliError::Output("unexpected profile header".into()));
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let r = record?;
        let f = |i: usize| parse_float(&r[i]);
        out.push(ProfileRecord {
            k: r[0].parse().map_err(|_| CliError::Output(format!("bad k `{}`", &r[0])))?,
            k0_flag: r[1].parse().map_err(|_| CliError::Output(format!("bad flag `{}`", &r[1])))?,
            dsh_upper: f(2)?,
            closed_upper: f(3)?,
            char_lower: f(4)?,
            window_lower: f(5)?,
            exact_tv: f(6)?,
            exact_err: f(7)?,
            l2_norm: f(8)?,
            dsh_status: r[9].to_string(),
            closed_status: r[10].to_string(),
            char_status: r[11].to_string(),
            window_status: r[12].to_string(),
            exact_status: r[13].to_string(),
        });
    }
    Ok(out)
}

/// Finite floats as JSON numbers, others as the strings `inf`, `-inf`, `nan`.
pub fn json_float(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(format_float(x)))
}

pub fn profile_json(records: &[ProfileRecord], header: Map<String, Value>) -> Value {
    let rows: Vec<Value> = records
        .iter()
        .map(|r| {
            json!({
                "k": r.k,
                "k0_flag": r.k0_flag,
                "dsh_upper": json_float(r.dsh_upper),
                "closed_upper": json_float(r.closed_upper),
                "char_lower": json_float(r.char_lower),
                "window_lower": json_float(r.window_lower),
                "exact_tv": json_float(r.exact_tv),
                "exact_err": json_float(r.exact_err),
                "l2_norm": json_float(r.l2_norm),
                "dsh_status": r.dsh_status,
                "closed_status": r.closed_status,
                "char_status": r.char_status,
                "window_status": r.window_status,
                "exact_status": r.exact_status,
            })
        })
        .collect();
    let mut obj = header;
    obj.insert("rows".into(), Value::Array(rows));
    Value::Object(obj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: u32) -> ProfileRecord {
        ProfileRecord {
            k,
            k0_flag: k > 2,
            dsh_upper: 0.1 + 1.0 / 3.0,
            closed_upper: f64::INFINITY,
            char_lower: 1e-300,
            window_lower: -26.071_234_5,
            exact_tv: f64::NAN,
            exact_err: 5e-324,
            l2_norm: 0.8f64.powi(k as i32),
            dsh_status: "valid".into(),
            closed_status: "divergent".into(),
            char_status: "valid".into(),
            window_status: "vacuous".into(),
            exact_status: "skipped".into(),
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let records: Vec<_> = (1..5).map(record).collect();
        let mut buf = Vec::new();
        write_profile_csv(&records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,k0_flag,dsh_upper"));
        assert!(text.contains(",inf,") && text.contains(",nan,"));
        let back = read_profile_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), records.len());
        assert!(records.iter().zip(&back).all(|(a, b)| a.same_as(b)));
    }

    #[test]
    fn json_spells_non_finite_values() {
        assert_eq!(json_float(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(json_float(f64::NAN), Value::String("nan".into()));
        assert_eq!(json_float(0.5), json!(0.5));
    }

    #[test]
    fn wrong_header_is_rejected() {
        assert!(read_profile_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
