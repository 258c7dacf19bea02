//! Deterministic report formatting: floats at 12 significant digits, and a
//! minimal hand-rolled JSON writer (the output schema is small and flat).

/// 12 significant digits, scientific notation. Identical inputs always
/// format identically.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.11e}", x)
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

pub struct JsonObject {
    fields: Vec<String>,
}

impl JsonObject {
    pub fn new() -> Self {
        Self { fields: Vec::new() }
    }

    pub fn push_str(&mut self, key: &str, value: &str) {
        self.fields.push(format!("\"{}\":\"{}\"", escape(key), escape(value)));
    }

    pub fn push_num(&mut self, key: &str, value: f64) {
        self.fields.push(format!("\"{}\":{}", escape(key), fmt_f64(value)));
    }

    /// Raw JSON fragment (number, bool, null, array, nested object).
    pub fn push_raw(&mut self, key: &str, value: &str) {
        self.fields.push(format!("\"{}\":{}", escape(key), value));
    }

    pub fn finish(self) -> String {
        format!("{{{}}}", self.fields.join(","))
    }
}
