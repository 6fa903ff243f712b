//! ASCII-code encoding of secret text and the timestamp key attached to it.
//!
//! A secret enters the pipeline as printable ASCII. Each character is
//! replaced by its decimal code, the codes are joined with `*`, and the
//! insert-time [`TimestampKey`] is appended after one more `*`. The result is
//! what the crypto stage encrypts.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Local, NaiveDate, NaiveDateTime, Timelike};
use thiserror::Error;

/// Separator between ASCII codes, and between the payload and the key.
pub const SEPARATOR: char = '*';

/// Environment variable that pins the clock, formatted `YYYY-MM-DDThh:mm:ss`.
pub const CLOCK_ENV: &str = "NEGDB_CLOCK";

const CLOCK_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";
const FIRST_PRINTABLE: u8 = 32;
const LAST_PRINTABLE: u8 = 126;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("input is empty")]
    EmptyInput,
    #[error("character {ch:?} at position {position} is not printable ASCII")]
    NonAsciiInput { position: usize, ch: char },
    #[error("year {0} cannot be rendered in four digits")]
    YearOutOfRange(i32),
    #[error("malformed timestamp key {0:?}")]
    MalformedKey(String),
    #[error("malformed clock override {value:?}: expected YYYY-MM-DDThh:mm:ss")]
    MalformedClock { value: String },
}

/// Which of the two ASCII encodings feeds the crypto stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodecVariant {
    /// Decimal codes joined by `*`. Injective, so it is the default.
    #[default]
    Separator,
    /// Alphanumeric codes multiplied by ten, everything concatenated.
    Mul10,
}

impl CodecVariant {
    pub fn encode(self, text: &str) -> Result<String, CodecError> {
        match self {
            CodecVariant::Separator => ascii_encode(text).map(|e| e.encoded),
            CodecVariant::Mul10 => ascii_encode_mul10(text),
        }
    }
}

impl FromStr for CodecVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "separator" => Ok(CodecVariant::Separator),
            "mul10" => Ok(CodecVariant::Mul10),
            other => Err(format!("unknown codec variant {other:?} (expected separator or mul10)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsciiEncoding {
    pub text: String,
    pub encoded: String,
}

fn printable_bytes(text: &str) -> Result<&[u8], CodecError> {
    if text.is_empty() {
        return Err(CodecError::EmptyInput);
    }
    for (position, ch) in text.chars().enumerate() {
        let printable = ch.is_ascii() && (FIRST_PRINTABLE..=LAST_PRINTABLE).contains(&(ch as u8));
        if !printable {
            return Err(CodecError::NonAsciiInput { position, ch });
        }
    }
    Ok(text.as_bytes())
}

/// Decimal ASCII codes of `text`, joined by `*`.
pub fn ascii_encode(text: &str) -> Result<AsciiEncoding, CodecError> {
    let bytes = printable_bytes(text)?;
    let mut encoded = String::with_capacity(bytes.len() * 4);
    for (i, b) in bytes.iter().enumerate() {
        if i > 0 {
            encoded.push(SEPARATOR);
        }
        encoded.push_str(&b.to_string());
    }
    Ok(AsciiEncoding {
        text: text.to_owned(),
        encoded,
    })
}

/// Alternate encoding: alphanumeric codes times ten, others verbatim, no separator.
///
/// Not injective (`"A@"` and the code run `650`,`64` cannot be told apart from
/// other splits), which is why [`CodecVariant::Separator`] is the default.
pub fn ascii_encode_mul10(text: &str) -> Result<String, CodecError> {
    let bytes = printable_bytes(text)?;
    let mut out = String::with_capacity(bytes.len() * 4);
    for &b in bytes {
        let code = if b.is_ascii_alphanumeric() {
            u32::from(b) * 10
        } else {
            u32::from(b)
        };
        out.push_str(&code.to_string());
    }
    Ok(out)
}

/// `YYYYMMDDHHMMSSZ`, where `Z` is 0 before noon and 1 from noon on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimestampKey {
    rendered: String,
}

impl TimestampKey {
    pub const LEN: usize = 15;

    pub fn as_str(&self) -> &str {
        &self.rendered
    }

    fn digits(&self, range: std::ops::Range<usize>) -> u32 {
        self.rendered[range].parse().expect("validated on construction")
    }

    pub fn year(&self) -> u32 {
        self.digits(0..4)
    }

    pub fn month(&self) -> u32 {
        self.digits(4..6)
    }

    pub fn day(&self) -> u32 {
        self.digits(6..8)
    }

    /// 24-hour value.
    pub fn hour(&self) -> u32 {
        self.digits(8..10)
    }

    pub fn minute(&self) -> u32 {
        self.digits(10..12)
    }

    pub fn second(&self) -> u32 {
        self.digits(12..14)
    }

    /// Meridiem flag: 0 for AM, 1 for PM.
    pub fn meridiem(&self) -> u32 {
        self.digits(14..15)
    }

    pub fn to_datetime(&self) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(self.year() as i32, self.month(), self.day())
            .and_then(|d| d.and_hms_opt(self.hour(), self.minute(), self.second()))
            .expect("validated on construction")
    }
}

impl fmt::Display for TimestampKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendered)
    }
}

impl FromStr for TimestampKey {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || CodecError::MalformedKey(s.to_owned());
        if s.len() != Self::LEN || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let num = |r: std::ops::Range<usize>| s[r].parse::<u32>().expect("all digits");
        let instant = NaiveDate::from_ymd_opt(num(0..4) as i32, num(4..6), num(6..8))
            .and_then(|d| d.and_hms_opt(num(8..10), num(10..12), num(12..14)))
            .ok_or_else(malformed)?;
        let key = make_timestamp(instant).map_err(|_| malformed())?;
        if key.rendered != s {
            // meridiem digit disagrees with the hour
            return Err(malformed());
        }
        Ok(key)
    }
}

/// Builds the key for `instant`. Seconds precision; sub-second parts are dropped.
pub fn make_timestamp(instant: NaiveDateTime) -> Result<TimestampKey, CodecError> {
    let year = instant.year();
    if !(0..=9999).contains(&year) {
        return Err(CodecError::YearOutOfRange(year));
    }
    let hour = instant.hour();
    let meridiem = u32::from(hour >= 12);
    let rendered = format!(
        "{:04}{:02}{:02}{:02}{:02}{:02}{}",
        year,
        instant.month(),
        instant.day(),
        hour,
        instant.minute(),
        instant.second(),
        meridiem
    );
    debug_assert_eq!(rendered.len(), TimestampKey::LEN);
    Ok(TimestampKey { rendered })
}

/// Encoded payload, `*`, then the key.
pub fn virtual_encrypt(text: &str, key: &TimestampKey) -> Result<String, CodecError> {
    virtual_encrypt_with(CodecVariant::Separator, text, key)
}

pub fn virtual_encrypt_with(
    variant: CodecVariant,
    text: &str,
    key: &TimestampKey,
) -> Result<String, CodecError> {
    let mut out = variant.encode(text)?;
    out.push(SEPARATOR);
    out.push_str(key.as_str());
    Ok(out)
}

/// Source of "now" for key generation.
pub trait Clock: Send + Sync {
    fn now(&self) -> NaiveDateTime;
}

/// Local wall-clock time.
#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> NaiveDateTime {
        Local::now().naive_local()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub NaiveDateTime);

impl Clock for FixedClock {
    fn now(&self) -> NaiveDateTime {
        self.0
    }
}

pub fn parse_clock(value: &str) -> Result<NaiveDateTime, CodecError> {
    NaiveDateTime::parse_from_str(value, CLOCK_FORMAT).map_err(|_| CodecError::MalformedClock {
        value: value.to_owned(),
    })
}

/// [`FixedClock`] when `NEGDB_CLOCK` is set, otherwise [`SystemClock`].
pub fn clock_from_env() -> Result<Box<dyn Clock>, CodecError> {
    match std::env::var(CLOCK_ENV) {
        Ok(value) => Ok(Box::new(FixedClock(parse_clock(&value)?))),
        Err(_) => Ok(Box::new(SystemClock)),
    }
}
