//! Verification reports and the deterministic text encodings used for them.
//!
//! Numbers are always written with 17 significant digits so that output is
//! byte-stable and round-trips exactly.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub claim_id: String,
    pub x0: f64,
    pub grid_size: usize,
    /// Signed; nonnegative means the checked inequality held everywhere.
    pub worst_margin: f64,
    pub worst_location: f64,
    pub passed: bool,
    pub notes: String,
}

impl VerificationReport {
    pub fn to_json(&self) -> String {
        let mut o = JsonObject::new();
        o.str("claim_id", &self.claim_id)
            .num("x0", self.x0)
            .int("grid_size", self.grid_size as i64)
            .num("worst_margin", self.worst_margin)
            .num("worst_location", self.worst_location)
            .bool("passed", self.passed)
            .str("notes", &self.notes);
        o.finish()
    }

    pub const CSV_HEADER: &'static str = "claim_id,x0,worst_margin,passed";

    pub fn to_csv_row(&self) -> String {
        format!("{},{},{},{}", self.claim_id, fmt_num(self.x0), fmt_num(self.worst_margin), self.passed)
    }
}

/// 17 significant digits, scientific notation; non-finite values become `null`
/// in JSON and `nan`/`inf` in CSV via [`fmt_csv`].
pub fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}

pub fn fmt_csv(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Insertion-ordered flat JSON object writer.
#[derive(Debug, Default, Clone)]
pub struct JsonObject {
    buf: String,
    n: usize,
}

impl JsonObject {
    pub fn new() -> Self {
        JsonObject { buf: String::from("{"), n: 0 }
    }

    fn key(&mut self, k: &str) {
        if self.n > 0 {
            self.buf.push(',');
        }
        self.n += 1;
        self.buf.push_str(&json_string(k));
        self.buf.push(':');
    }

    pub fn num(&mut self, k: &str, v: f64) -> &mut Self {
        self.key(k);
        self.buf.push_str(&fmt_num(v));
        self
    }

    pub fn opt(&mut self, k: &str, v: Option<f64>) -> &mut Self {
        match v {
            Some(v) => self.num(k, v),
            None => self.raw(k, "null"),
        }
    }

    pub fn int(&mut self, k: &str, v: i64) -> &mut Self {
        self.key(k);
        let _ = write!(self.buf, "{v}");
        self
    }

    pub fn bool(&mut self, k: &str, v: bool) -> &mut Self {
        self.key(k);
        self.buf.push_str(if v { "true" } else { "false" });
        self
    }

    pub fn str(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        self.buf.push_str(&json_string(v));
        self
    }

    /// Inserts pre-encoded JSON.
    pub fn raw(&mut self, k: &str, v: &str) -> &mut Self {
        self.key(k);
        self.buf.push_str(v);
        self
    }

    pub fn finish(mut self) -> String {
        self.buf.push('}');
        self.buf
    }
}

pub fn json_array(items: &[String]) -> String {
    format!("[{}]", items.join(","))
}
