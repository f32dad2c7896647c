//! Lenient parsing of planner text into [`PlannerResponse`].
//!
//! Accepts strict JSON as well as Python-style dictionaries (single quotes, `None`, raw
//! newlines inside strings) wrapped in arbitrary prose or code fences.

use serde_json::{Map, Value};

use super::types::{PlannerError, PlannerResponse, ResponseKind};

pub const MAX_MOVE: i32 = 6;

/// Rewrites a Python-ish dictionary literal into JSON.
fn to_json(src: &str) -> String {
    let mut out = String::with_capacity(src.len() + 16);
    let mut chars = src.chars().peekable();
    let mut quote: Option<char> = None;
    while let Some(c) = chars.next() {
        match quote {
            Some(q) => match c {
                '\\' => {
                    if let Some(n) = chars.next() {
                        if n == '\'' {
                            out.push('\'');
                        } else {
                            out.push('\\');
                            out.push(n);
                        }
                    }
                }
                '\n' => out.push_str("\\n"),
                '\r' => {}
                '\t' => out.push_str("\\t"),
                '"' if q == '\'' => out.push_str("\\\""),
                c if c == q => {
                    out.push('"');
                    quote = None;
                }
                c => out.push(c),
            },
            None => match c {
                '\'' | '"' => {
                    out.push('"');
                    quote = Some(c);
                }
                c if c.is_alphabetic() => {
                    let mut word = String::from(c);
                    while let Some(&n) = chars.peek() {
                        if n.is_alphanumeric() || n == '_' {
                            word.push(n);
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    out.push_str(match word.as_str() {
                        "None" => "null",
                        "True" => "true",
                        "False" => "false",
                        w => w,
                    });
                }
                c => out.push(c),
            },
        }
    }
    out
}

fn extract_object(text: &str) -> Option<Map<String, Value>> {
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    if end < start {
        return None;
    }
    let body = &text[start..=end];
    let parsed = serde_json::from_str::<Value>(body).ok().or_else(|| serde_json::from_str::<Value>(&to_json(body)).ok())?;
    match parsed {
        Value::Object(m) => Some(m),
        _ => None,
    }
}

fn magnitude(tok: &str) -> Option<i32> {
    let v: f64 = tok.parse().ok()?;
    v.is_finite().then(|| (v.round().clamp(0.0, MAX_MOVE as f64)) as i32)
}

/// Finds "forward/backward N" and "left/right N" phrases. Returns `None` when neither appears.
pub fn parse_action(s: &str) -> Option<(i32, i32)> {
    let lower = s.to_lowercase();
    let tokens: Vec<&str> = lower.split(|c: char| !(c.is_ascii_alphanumeric() || c == '.')).filter(|t| !t.is_empty()).collect();
    let (mut fwd, mut lat) = (None, None);
    for (i, t) in tokens.iter().enumerate() {
        let t = t.trim_end_matches('.');
        let sign = match t {
            "forward" | "forwards" | "backward" | "backwards" | "back" if fwd.is_none() => {
                if t.starts_with("back") { -1 } else { 1 }
            }
            "left" | "right" if lat.is_none() => {
                if t == "left" { 1 } else { -1 }
            }
            _ => continue,
        };
        let Some(m) = tokens.get(i + 1).and_then(|n| magnitude(n.trim_end_matches('.'))) else {
            continue;
        };
        if matches!(t, "left" | "right") {
            lat = Some(sign * m);
        } else {
            fwd = Some(sign * m);
        }
    }
    if fwd.is_none() && lat.is_none() {
        return None;
    }
    Some((fwd.unwrap_or(0), lat.unwrap_or(0)))
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn parse_response(text: &str) -> Result<PlannerResponse, PlannerError> {
    if let Some(obj) = extract_object(text) {
        if let Some(v) = obj.get("selected_centroid_index") {
            let reason = obj.get("reason").map(value_text).unwrap_or_default();
            return match v {
                Value::Null => Ok(PlannerResponse::none(reason)),
                Value::Number(n) => {
                    let idx = n.as_i64().or_else(|| n.as_f64().filter(|f| f.fract() == 0.0).map(|f| f as i64));
                    idx.map(|i| PlannerResponse::centroid(i, reason)).ok_or_else(|| PlannerError::Parse(format!("non-integer centroid index {n}")))
                }
                Value::String(s) if s.trim().eq_ignore_ascii_case("null") || s.trim().eq_ignore_ascii_case("none") => Ok(PlannerResponse::none(reason)),
                Value::String(s) => s.trim().parse::<i64>().map(|i| PlannerResponse::centroid(i, reason)).map_err(|_| PlannerError::Parse(format!("bad centroid index {s:?}"))),
                other => Err(PlannerError::Parse(format!("bad centroid index {other}"))),
            };
        }
        for (k, v) in &obj {
            if let Some((f, l)) = parse_action(k) {
                return Ok(PlannerResponse::relative(f, l, value_text(v)));
            }
        }
        for (k, v) in &obj {
            if let Value::String(s) = v {
                if k.to_lowercase().contains("waypoint") || k.to_lowercase().contains("action") {
                    if let Some((f, l)) = parse_action(s) {
                        return Ok(PlannerResponse::relative(f, l, String::new()));
                    }
                }
            }
        }
    }
    // prose without a dictionary: accept an explicit move phrase
    let lower = text.to_lowercase();
    if lower.contains("move ") {
        if let Some((f, l)) = parse_action(text) {
            return Ok(PlannerResponse::relative(f, l, String::new()));
        }
    }
    let preview: String = text.chars().take(80).collect();
    Err(PlannerError::Parse(preview))
}

/// Serializes a response in the shape the matching prompt asks for.
pub fn format_response(r: &PlannerResponse) -> String {
    match r.kind {
        ResponseKind::CentroidIndex | ResponseKind::None => {
            let mut m = Map::new();
            m.insert("selected_centroid_index".into(), r.index.filter(|_| r.kind == ResponseKind::CentroidIndex).map_or(Value::Null, Value::from));
            m.insert("reason".into(), Value::from(r.reason.clone()));
            Value::Object(m).to_string()
        }
        ResponseKind::RelativeMove => {
            let (f, l) = (r.d_fwd.unwrap_or(0), r.d_lat.unwrap_or(0));
            let unit = |d: i32| if d.abs() == 1 { "meter" } else { "meters" };
            let action = format!(
                "Move {} {} {}, move {} {} {}",
                if f < 0 { "backward" } else { "forward" },
                f.abs(),
                unit(f),
                if l < 0 { "right" } else { "left" },
                l.abs(),
                unit(l)
            );
            let mut m = Map::new();
            m.insert(action, Value::from(r.reason.clone()));
            Value::Object(m).to_string()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centroid_json() {
        let r = parse_response(r#"{"selected_centroid_index": 2, "reason": "..."}"#).unwrap();
        assert_eq!((r.kind, r.index), (ResponseKind::CentroidIndex, Some(2)));
        let n = parse_response(r#"{"selected_centroid_index": null, "reason": "No orange dots visible on the occupancy map."}"#).unwrap();
        assert_eq!(n.kind, ResponseKind::None);
    }

    #[test]
    fn action_key() {
        let r = parse_response(r#"{"Move forward 4 meters, move right 1 meter": "..."}"#).unwrap();
        assert_eq!((r.d_fwd, r.d_lat), (Some(4), Some(-1)));
    }

    #[test]
    fn python_dict_with_newlines() {
        let text = "Sure.\n```python\n{\n  'Move forward 3 meters, move left 2 meters':\n  '1. ...;\n   Finally, forward 3 m, left 2 m.'\n}\n```";
        let r = parse_response(text).unwrap();
        assert_eq!((r.d_fwd, r.d_lat), (Some(3), Some(2)));
        let n = parse_response("{'selected_centroid_index': None, 'reason': 'none'}").unwrap();
        assert_eq!(n.kind, ResponseKind::None);
    }

    #[test]
    fn clamps_and_rejects() {
        let r = parse_response(r#"{"Move forward 9 meters, move left 2.4 meters": ""}"#).unwrap();
        assert_eq!((r.d_fwd, r.d_lat), (Some(6), Some(2)));
        assert!(parse_response("I cannot decide.").is_err());
        assert!(parse_response(r#"{"selected_centroid_index": "two"}"#).is_err());
        assert!(parse_response(r#"{"selected_centroid_index": 1.5}"#).is_err());
    }

    #[test]
    fn format_round_trip() {
        for r in [
            PlannerResponse::centroid(0, "a"),
            PlannerResponse::centroid(7, "b \"quoted\"\nline"),
            PlannerResponse::none("nothing"),
            PlannerResponse::relative(4, -1, "r"),
            PlannerResponse::relative(-2, 0, ""),
            PlannerResponse::relative(0, 6, "x"),
        ] {
            let back = parse_response(&format_response(&r)).unwrap();
            assert_eq!((back.kind, back.index, back.d_fwd, back.d_lat), (r.kind, r.index, r.d_fwd, r.d_lat));
        }
    }
}
