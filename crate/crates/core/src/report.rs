//! Deterministic report emission: JSON with fixed 17-significant-digit
//! float formatting (byte-identical across runs and platforms) and CSV for
//! curves and bodies.

use std::io::Write as _;

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::filtration::QuotientTrace;

/// 17 significant digits pin down every f64 exactly.
pub fn format_float(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // integral values stay readable
        format!("{x:.1}")
    } else {
        format!("{x:.16e}")
    }
}

struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        writer.write_all(format_float(value as f64).as_bytes())
    }
}

/// Serializes any report to canonical JSON (fixed float formatting, one
/// trailing newline).
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(format!("serialize: {e}")))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Io(e.to_string()))
}

/// Vertices CSV, one row per vertex, sorted lexicographically.
pub fn body_vertices_csv(body: &ConvexBody) -> Result<String> {
    let mut rows = body.vertices_f64();
    if rows.is_empty() {
        return Err(Error::Precondition("no vertices to export".into()));
    }
    rows.sort_by(|a, b| a.partial_cmp(b).expect("finite vertices"));
    let dim = body.dimension();
    let mut out = String::new();
    let header: Vec<String> = (0..dim).map(|j| format!("x{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Trace CSV: `t,value` per sample.
pub fn trace_csv(trace: &QuotientTrace) -> Result<String> {
    if trace.samples.is_empty() {
        return Err(Error::Precondition("empty trace".into()));
    }
    let mut out = String::from("t,value\n");
    for (t, v) in &trace.samples {
        out.push_str(&format!("{},{}\n", format_float(*t), format_float(*v)));
    }
    Ok(out)
}

/// Writes a non-empty report to a file (or stdout for `-`).
pub fn emit(path: &str, content: &str) -> Result<()> {
    if content.trim().is_empty() {
        return Err(Error::Precondition("refusing to write an empty report".into()));
    }
    if path == "-" {
        std::io::stdout().write_all(content.as_bytes())?;
        Ok(())
    } else {
        std::fs::write(path, content)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::rat_from_int;

    #[test]
    fn floats_are_pinned_to_17_digits() {
        let s = format_float(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(format_float(2.0), "2.0");
        // round trip is exact
        let x = 0.1 + 0.2;
        let back: f64 = format_float(x).parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn json_output_is_deterministic() {
        #[derive(Serialize)]
        struct R {
            value: f64,
            name: &'static str,
        }
        let a = to_json(&R { value: 1.0 / 3.0, name: "x" }).unwrap();
        let b = to_json(&R { value: 1.0 / 3.0, name: "x" }).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("3.3333333333333331e-1"));
        assert!(a.ends_with('\n'));
    }

    #[test]
    fn vertices_csv_sorted() {
        let body = ConvexBody::hull(
            2,
            &[
                vec![rat_from_int(3), rat_from_int(0)],
                vec![rat_from_int(0), rat_from_int(0)],
                vec![rat_from_int(0), rat_from_int(3)],
            ],
        )
        .unwrap();
        let csv = body_vertices_csv(&body).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x0,x1");
        assert_eq!(lines[1], "0.0,0.0");
        assert_eq!(lines[2], "0.0,3.0");
        assert_eq!(lines[3], "3.0,0.0");
    }

    #[test]
    fn empty_reports_refused() {
        assert!(emit("/tmp/should_not_exist.json", "  \n").is_err());
    }
}
