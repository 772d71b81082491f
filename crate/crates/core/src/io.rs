//! Text formats shared by the command line tool and the bindings.

use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::cf::{parse_cf_list, PartialQuotientStream, RealHandle};
use crate::count::parse_rational;
use crate::error::{Error, Result};
use crate::lattice::{DivergenceReport, MinimumEvent, PlSample};
use crate::logs::fmt_g;

/// Significant digits of every float written to CSV or JSON.
pub const DIGITS: usize = 12;

pub fn num(x: f64) -> String {
    fmt_g(x, DIGITS)
}

/// A float rendered with [`DIGITS`] significant digits, as a JSON number.
pub fn json_num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(format!("{x}"));
    }
    num(x)
        .parse::<serde_json::Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// A real given as a named constant (`sqrt2`), an expansion (`1;2,2,...`),
/// a full `cf v1:` line, or a rational (`3/7`, `0.25`).
pub fn parse_real(text: &str) -> Result<RealHandle> {
    let text = text.trim();
    if text.starts_with("cf v1:") {
        return Ok(RealHandle::new(text.parse::<PartialQuotientStream>()?));
    }
    if text.contains(';') {
        return Ok(RealHandle::new(parse_cf_list(text)?));
    }
    if text.contains('/') || text.contains('.') || text.parse::<i64>().is_ok() {
        return Ok(RealHandle::rational(&parse_rational(text)?));
    }
    RealHandle::named(text)
}

/// CSV with a header line; rows must match the header width.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidInput(format!(
                "row has {} cells, header {}",
                row.len(),
                header.len()
            )));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn pl_csv(samples: &[PlSample]) -> Result<String> {
    csv(
        &["t", "w_lattice", "tent", "excess"],
        samples
            .iter()
            .map(|s| vec![num(s.t), num(s.w_lattice), num(s.tent), num(s.excess)]),
    )
}

fn heights(v: &[num_bigint::BigInt]) -> String {
    v.iter()
        .map(|h| h.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn events_csv(events: &[MinimumEvent]) -> Result<String> {
    csv(
        &["t", "value", "falling", "a", "rising", "b", "nearest"],
        events.iter().map(|e| {
            vec![
                num(e.t),
                num(e.value),
                e.falling.to_string(),
                e.a.to_string(),
                e.rising.to_string(),
                e.b.to_string(),
                heights(&e.nearest),
            ]
        }),
    )
}

pub fn event_json(e: &MinimumEvent) -> Value {
    json!({
        "t": json_num(e.t),
        "value": json_num(e.value),
        "falling": e.falling,
        "a": e.a.to_string(),
        "rising": e.rising,
        "b": e.b.to_string(),
        "nearest": e.nearest.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
    })
}

pub fn divergence_json(r: &DivergenceReport) -> Value {
    let verdict = match &r.verdict {
        crate::lattice::Verdict::CertifiedAboveThreshold { t0 } => {
            json!({"kind": "certified", "t0": json_num(*t0)})
        }
        crate::lattice::Verdict::ViolatedAt { t } => json!({"kind": "violated", "t": json_num(*t)}),
        crate::lattice::Verdict::Undecided => json!({"kind": "undecided"}),
    };
    json!({
        "horizon": json_num(r.horizon),
        "threshold": json_num(r.threshold),
        "verdict": verdict,
        "events": r.events.iter().map(event_json).collect::<Vec<_>>(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// Read back a CSV written by [`csv`]: header and rows as strings.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        if row.len() != header.len() {
            let mut msg = String::new();
            let _ = write!(
                msg,
                "line {}: {} cells, expected {}",
                k + 2,
                row.len(),
                header.len()
            );
            return Err(Error::Parse(msg));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_inputs() {
        assert!(!parse_real("sqrt2").unwrap().is_rational());
        assert!(parse_real("3/7").unwrap().is_rational());
        assert!(parse_real("0.25").unwrap().is_rational());
        assert!(parse_real("2").unwrap().is_rational());
        assert!(parse_real("1;2,2").unwrap().is_rational());
        assert!(!parse_real("1;2,2,...").unwrap().is_rational());
        assert!(parse_real("pi").is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let text = csv(&["a", "b"], vec![vec!["1".into(), num(0.1 + 0.2)]]).unwrap();
        assert_eq!(text, "a,b\n1,0.3\n");
        let (h, rows) = read_csv(&text).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.3);
        assert!(csv(&["a"], vec![vec![]]).is_err());
    }

    #[test]
    fn json_numbers() {
        assert_eq!(json_num(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(json_num(f64::INFINITY), Value::String("inf".into()));
    }
}
