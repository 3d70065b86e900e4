use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepairError {
    #[error("no JSON object could be recovered from the response")]
    Unrepairable,
}

/// Recover a JSON object from a model response.
///
/// Passes run in order, each on the output of the previous one, and the first
/// text that parses as an object wins:
/// 1. the raw text as-is
/// 2. code fences stripped
/// 3. prose before the first `{` and after the last `}` trimmed
/// 4. trailing commas (outside strings) removed
pub fn repair_json(raw: &str) -> Result<Value, RepairError> {
    let passes: [fn(&str) -> String; 3] = [strip_fences, trim_prose, remove_trailing_commas];
    if let Some(v) = parse_object(raw) {
        return Ok(v);
    }
    let mut current = raw.to_string();
    for pass in passes {
        current = pass(&current);
        if let Some(v) = parse_object(&current) {
            return Ok(v);
        }
    }
    Err(RepairError::Unrepairable)
}

fn parse_object(text: &str) -> Option<Value> {
    match serde_json::from_str::<Value>(text.trim()) {
        Ok(v @ Value::Object(_)) => Some(v),
        _ => None,
    }
}

fn strip_fences(text: &str) -> String {
    let Some(open) = text.find("```") else {
        return text.to_string();
    };
    let after_open = &text[open + 3..];
    // skip the info string (e.g. `json`) up to the end of the fence line
    let body_start = after_open.find('\n').map(|i| i + 1).unwrap_or(after_open.len());
    let body = &after_open[body_start..];
    match body.find("```") {
        Some(close) => body[..close].to_string(),
        None => body.to_string(),
    }
}

fn trim_prose(text: &str) -> String {
    match (text.find('{'), text.rfind('}')) {
        (Some(start), Some(end)) if start < end => text[start..=end].to_string(),
        _ => text.to_string(),
    }
}

fn remove_trailing_commas(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len());
    let mut in_string = false;
    let mut escaped = false;
    for (i, &c) in chars.iter().enumerate() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        match c {
            '"' => {
                in_string = true;
                out.push(c);
            }
            ',' => {
                let next = chars[i + 1..].iter().find(|c| !c.is_whitespace());
                if !matches!(next, Some('}') | Some(']')) {
                    out.push(c);
                }
            }
            _ => out.push(c),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    // Independent oracles: outermost brace pair, and a regex-free comma strip
    // that only handles the `,}` / `,]` forms with optional whitespace.
    fn oracle_outer_braces(s: &str) -> Value {
        let a = s.find('{').unwrap();
        let b = s.rfind('}').unwrap();
        serde_json::from_str(&s[a..=b]).unwrap()
    }

    #[test]
    fn fenced_object() {
        assert_eq!(repair_json("```json\n{\"a\":1}\n```").unwrap(), json!({"a": 1}));
    }

    #[test]
    fn prose_wrapped_object() {
        let raw = "Here is the note: {\"a\":1} Hope this helps.";
        assert_eq!(repair_json(raw).unwrap(), oracle_outer_braces(raw));
        assert_eq!(repair_json(raw).unwrap(), json!({"a": 1}));
    }

    #[test]
    fn trailing_comma() {
        assert_eq!(repair_json("{\"a\":1,}").unwrap(), json!({"a": 1}));
        assert_eq!(
            repair_json("{\"a\":[1,2, ] ,\"b\":\"x,}\"}").unwrap(),
            json!({"a": [1, 2], "b": "x,}"})
        );
    }

    #[test]
    fn commas_inside_strings_survive() {
        let v = repair_json("{\"a\":\"one,]\",}").unwrap();
        assert_eq!(v, json!({"a": "one,]"}));
    }

    #[test]
    fn refusal_is_unrepairable() {
        assert_eq!(repair_json("I cannot do that"), Err(RepairError::Unrepairable));
        assert_eq!(repair_json("[1, 2]"), Err(RepairError::Unrepairable));
    }

    #[test]
    fn raw_is_not_mutated() {
        let raw = String::from("```\n{\"a\":1,}\n```");
        let copy = raw.clone();
        repair_json(&raw).unwrap();
        assert_eq!(raw, copy);
    }
}
