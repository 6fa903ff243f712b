//! Line-oriented table file.
//!
//! ```text
//! negdb 1
//! <record_name>\t<ordinal>\t<fragment>*<key>
//! ```
//!
//! LF line endings, every line terminated, no trailing whitespace.

use crate::store::tuple::{validate_name, NegativeTuple};
use crate::store::StoreError;

pub const HEADER: &str = "negdb 1";

pub fn render_row(tuple: &NegativeTuple) -> String {
    format!("{tuple}\n")
}

pub fn render(rows: &[NegativeTuple]) -> String {
    let mut out = format!("{HEADER}\n");
    for row in rows {
        out.push_str(&render_row(row));
    }
    out
}

fn corrupt(line: usize, reason: impl Into<String>) -> StoreError {
    StoreError::CorruptTable {
        line,
        reason: reason.into(),
    }
}

/// Parses a whole table. Line numbers in errors are 1-based.
pub fn parse(bytes: &[u8]) -> Result<Vec<NegativeTuple>, StoreError> {
    let mut rows = Vec::new();
    let mut lines = bytes.split_inclusive(|&b| b == b'\n').enumerate();
    match lines.next() {
        None => return Err(corrupt(1, "missing header")),
        Some((_, header)) if header != format!("{HEADER}\n").as_bytes() => {
            return Err(corrupt(1, format!("expected header {HEADER:?}")));
        }
        Some(_) => {}
    }
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let Some(body) = raw.strip_suffix(b"\n") else {
            return Err(corrupt(line_no, "truncated line (no terminating newline)"));
        };
        let body = std::str::from_utf8(body).map_err(|_| corrupt(line_no, "not valid UTF-8"))?;
        rows.push(parse_row(body).map_err(|reason| corrupt(line_no, reason))?);
    }
    Ok(rows)
}

fn parse_row(body: &str) -> Result<NegativeTuple, String> {
    let fields: Vec<&str> = body.split('\t').collect();
    let [name, ordinal, stored] = fields[..] else {
        return Err(format!("expected 3 tab-separated fields, found {}", fields.len()));
    };
    validate_name(name).map_err(|e| e.to_string())?;
    if ordinal.is_empty() || !ordinal.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("bad ordinal {ordinal:?}"));
    }
    let ordinal: u32 = ordinal.parse().map_err(|_| format!("bad ordinal {ordinal:?}"))?;
    let (fragment, key) = NegativeTuple::parse_stored_value(stored)
        .ok_or_else(|| format!("bad stored value {stored:?}"))?;
    Ok(NegativeTuple {
        record_name: name.to_owned(),
        fragment,
        key,
        ordinal,
    })
}
