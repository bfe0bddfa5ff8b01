//! Stable text output: numbers rounded to 12 significant digits, versioned
//! CSV headers and JSON envelopes.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::profile::ProfileCurve;

pub const SCHEMA_VERSION: u32 = 1;
pub const SIGNIFICANT_DIGITS: usize = 12;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest representation of `x` rounded to 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{}", round_sig(x))
    }
}

/// Rounds every float in a JSON tree; non-finite values become strings.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            serde_json::Number::from_f64(round_sig(x)).map_or(Value::String(fmt_num(x)), Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// `{"schema_version", "tool", "kind", ...meta, "result"}` with rounded
/// floats, pretty printed with a trailing newline.
pub fn json_document<T: Serialize>(kind: &str, meta: &[(&str, Value)], result: &T) -> Result<String> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("tool".into(), json!(format!("isoprofile {TOOL_VERSION}")));
    doc.insert("kind".into(), json!(kind));
    for (k, v) in meta {
        doc.insert((*k).into(), v.clone());
    }
    let value = serde_json::to_value(result).map_err(|e| Error::numerical(format!("serialization failed: {e}")))?;
    doc.insert("result".into(), value);
    let mut text = serde_json::to_string_pretty(&round_json(Value::Object(doc)))
        .map_err(|e| Error::numerical(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// `# isoprofile <version> schema=<n> key=value ...` comment line.
pub fn csv_comment(meta: &[(&str, String)]) -> String {
    let mut line = format!("# isoprofile {TOOL_VERSION} schema={SCHEMA_VERSION}");
    for (k, v) in meta {
        line.push(' ');
        line.push_str(k);
        line.push('=');
        line.push_str(v);
    }
    line.push('\n');
    line
}

pub const PROFILE_COLUMNS: [&str; 6] = ["v", "I", "kind", "r", "candidate", "candidate_param"];

/// Profile rows `v, I, kind, r, candidate, candidate_param`, where `r` is
/// the radius of the sublevel ball (empty for the disk profile).
pub fn profile_csv(curve: &ProfileCurve, meta: &[(&str, String)]) -> String {
    let mut all = vec![("surface", curve.surface.clone()), ("kind", curve.kind.name().to_string())];
    all.extend(meta.iter().cloned());
    let mut out = csv_comment(&all);
    out.push_str(&PROFILE_COLUMNS.join(","));
    out.push('\n');
    for p in &curve.points {
        let r = p.rho.map(fmt_num).unwrap_or_default();
        let param = p.candidate.param();
        let param = if param.is_nan() { String::new() } else { fmt_num(param) };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_num(p.v),
            fmt_num(p.value),
            curve.kind.name(),
            r,
            p.candidate.name(),
            param
        ));
    }
    out
}

/// CSV table with a comment header and numeric rows.
pub fn table_csv(meta: &[(&str, String)], columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = csv_comment(meta);
    out.push_str(&columns.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_num(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::disk_profile_curve;
    use crate::WarpedSurface;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn json_floats_are_rounded() {
        let text = json_document("demo", &[("seed", json!(7))], &json!({"x": 1.0 / 3.0, "n": [2.0, f64::NAN]})).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["seed"], 7);
        assert_eq!(v["result"]["x"].as_f64().unwrap(), 0.333333333333);
    }

    #[test]
    fn profile_csv_layout() {
        let w = WarpedSurface::plane();
        let c = disk_profile_curve(&w, &[1.0, 2.0]).unwrap();
        let text = profile_csv(&c, &[]);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# isoprofile"));
        assert_eq!(lines[1], "v,I,kind,r,candidate,candidate_param");
        assert_eq!(lines.len(), 4);
        assert!(lines[2].starts_with("1,3.54490770181,disk,,pole_disk,"));
    }
}
