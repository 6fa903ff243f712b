use std::fmt;

use crate::codec::{TimestampKey, SEPARATOR};
use crate::store::StoreError;

/// Length of a stored value: fragment, separator, 15-digit key.
pub const STORED_VALUE_LEN: usize = 1 + 1 + TimestampKey::LEN;

/// One row of the negative table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NegativeTuple {
    pub record_name: String,
    pub fragment: char,
    pub key: TimestampKey,
    pub ordinal: u32,
}

impl NegativeTuple {
    /// `fragment*key`, the value a raw query sees.
    pub fn stored_value(&self) -> String {
        let mut out = String::with_capacity(STORED_VALUE_LEN);
        out.push(self.fragment);
        out.push(SEPARATOR);
        out.push_str(self.key.as_str());
        out
    }

    /// Splits a stored value back into fragment and key.
    pub fn parse_stored_value(value: &str) -> Option<(char, TimestampKey)> {
        let mut chars = value.chars();
        let fragment = chars.next()?;
        if !valid_fragment(fragment) || chars.next()? != SEPARATOR {
            return None;
        }
        let key = chars.as_str().parse().ok()?;
        Some((fragment, key))
    }
}

impl fmt::Display for NegativeTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.record_name, self.ordinal, self.stored_value())
    }
}

pub(crate) fn valid_fragment(c: char) -> bool {
    c.is_ascii_graphic() && c != SEPARATOR
}

pub(crate) fn validate_name(name: &str) -> Result<(), StoreError> {
    if name.is_empty() {
        return Err(StoreError::EmptyName);
    }
    if name.contains(['\t', '\n', '\r']) {
        return Err(StoreError::InvalidName(name.to_owned()));
    }
    Ok(())
}

/// Explodes `encoded` into one tuple per character, ordinal = position.
///
/// Fragments are normally the hex digits of an encoded secret but any
/// printable non-`*` character is accepted.
pub fn negative_convert(
    encoded: &str,
    key: &TimestampKey,
    record_name: &str,
) -> Result<Vec<NegativeTuple>, StoreError> {
    validate_name(record_name)?;
    if encoded.is_empty() {
        return Err(StoreError::InvalidFragment(encoded.to_owned()));
    }
    encoded
        .chars()
        .enumerate()
        .map(|(i, fragment)| {
            if !valid_fragment(fragment) {
                return Err(StoreError::InvalidFragment(encoded.to_owned()));
            }
            Ok(NegativeTuple {
                record_name: record_name.to_owned(),
                fragment,
                key: key.clone(),
                ordinal: i as u32,
            })
        })
        .collect()
}
