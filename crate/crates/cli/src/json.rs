//! Minimal deterministic JSON writer.
//!
//! Keys keep their insertion order and every float is serialized with 17
//! significant digits, so identical inputs reproduce byte-identical
//! documents.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub enum JVal {
    Str(String),
    Num(f64),
    Int(i64),
    Bool(bool),
    Arr(Vec<JVal>),
    Obj(Vec<(String, JVal)>),
}

impl JVal {
    pub fn obj() -> Self {
        JVal::Obj(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: JVal) -> &mut Self {
        match self {
            JVal::Obj(entries) => entries.push((key.to_string(), value)),
            _ => panic!("push on non-object"),
        }
        self
    }
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

pub fn render(value: &JVal) -> String {
    let mut out = String::new();
    write_value(value, &mut out, 0);
    out.push('\n');
    out
}

fn write_value(value: &JVal, out: &mut String, depth: usize) {
    match value {
        JVal::Str(s) => {
            out.push('"');
            for ch in s.chars() {
                match ch {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    c if (c as u32) < 0x20 => {
                        let _ = write!(out, "\\u{:04x}", c as u32);
                    }
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        JVal::Num(x) => out.push_str(&format_float(*x)),
        JVal::Int(i) => {
            let _ = write!(out, "{i}");
        }
        JVal::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        JVal::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                indent(out, depth + 1);
                write_value(item, out, depth + 1);
            }
            out.push('\n');
            indent(out, depth);
            out.push(']');
        }
        JVal::Obj(entries) => {
            if entries.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (key, item)) in entries.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                indent(out, depth + 1);
                let _ = write!(out, "\"{key}\": ");
                write_value(item, out, depth + 1);
            }
            out.push('\n');
            indent(out, depth);
            out.push('}');
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}
