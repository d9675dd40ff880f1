use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};

const MIN_YEAR: i32 = 1970;
const MAX_YEAR: i32 = 9999;
const MILLIS_PER_DAY: i64 = 86_400_000;

/// Milliseconds since the Unix epoch, UTC.
///
/// Text form is always `yyyy-mm-ddTHH:MM:ss.sss+0000` (28 characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const EPOCH: Timestamp = Timestamp(0);

    pub const fn from_millis(ms: i64) -> Self {
        Timestamp(ms)
    }

    pub const fn millis(self) -> i64 {
        self.0
    }

    pub fn from_ymd(year: i32, month: u32, day: u32) -> Timestamp {
        let date = NaiveDate::from_ymd_opt(year, month, day).expect("valid calendar date");
        let days = date.signed_duration_since(epoch_date()).num_days();
        Timestamp(days * MILLIS_PER_DAY)
    }

    pub fn format(self) -> Result<String> {
        let dt = chrono::DateTime::from_timestamp_millis(self.0)
            .ok_or(CoreError::OutOfRange(self.0))?
            .naive_utc();
        if !(MIN_YEAR..=MAX_YEAR).contains(&dt.year()) {
            return Err(CoreError::OutOfRange(self.0));
        }
        Ok(format!(
            "{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}+0000",
            dt.year(),
            dt.month(),
            dt.day(),
            dt.hour(),
            dt.minute(),
            dt.second(),
            dt.nanosecond() / 1_000_000
        ))
    }

    pub fn parse(s: &str) -> Result<Timestamp> {
        let err = |field: &'static str| CoreError::DateTimeField {
            field,
            input: s.to_owned(),
        };
        let b = s.as_bytes();
        if b.len() != 28 {
            return Err(err("length"));
        }
        let expect = |pos: usize, c: u8, field: &'static str| {
            if b[pos] == c {
                Ok(())
            } else {
                Err(err(field))
            }
        };
        expect(4, b'-', "separator")?;
        expect(7, b'-', "separator")?;
        expect(10, b'T', "separator")?;
        expect(13, b':', "separator")?;
        expect(16, b':', "separator")?;
        expect(19, b'.', "separator")?;
        if &s[23..] != "+0000" {
            return Err(err("zone"));
        }
        let year = digits(&b[0..4]).ok_or_else(|| err("year"))? as i32;
        let month = digits(&b[5..7]).ok_or_else(|| err("month"))?;
        let day = digits(&b[8..10]).ok_or_else(|| err("day"))?;
        let hour = digits(&b[11..13]).ok_or_else(|| err("hour"))?;
        let minute = digits(&b[14..16]).ok_or_else(|| err("minute"))?;
        let second = digits(&b[17..19]).ok_or_else(|| err("second"))?;
        let millis = digits(&b[20..23]).ok_or_else(|| err("millisecond"))?;
        if !(MIN_YEAR..=MAX_YEAR).contains(&year) {
            return Err(err("year"));
        }
        if !(1..=12).contains(&month) {
            return Err(err("month"));
        }
        let date = NaiveDate::from_ymd_opt(year, month, day).ok_or_else(|| err("day"))?;
        if hour > 23 {
            return Err(err("hour"));
        }
        if minute > 59 {
            return Err(err("minute"));
        }
        if second > 59 {
            return Err(err("second"));
        }
        let dt: NaiveDateTime = date
            .and_hms_milli_opt(hour, minute, second, millis)
            .ok_or_else(|| err("millisecond"))?;
        Ok(Timestamp(dt.and_utc().timestamp_millis()))
    }
}

fn epoch_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).unwrap()
}

fn digits(b: &[u8]) -> Option<u32> {
    b.iter().try_fold(0u32, |acc, c| {
        c.is_ascii_digit().then(|| acc * 10 + u32::from(c - b'0'))
    })
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.format() {
            Ok(s) => f.write_str(&s),
            Err(_) => write!(f, "@{}", self.0),
        }
    }
}

impl FromStr for Timestamp {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        Timestamp::parse(s)
    }
}

// Timestamps travel as raw millis in binary/JSON payloads; the text form is
// reserved for CSV and human output.
impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.0)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        i64::deserialize(d).map(Timestamp)
    }
}

/// Calendar day, stored as days since 1970-01-01. Text form `yyyy-mm-dd`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Date(pub i32);

impl Date {
    pub fn from_ymd(year: i32, month: u32, day: u32) -> Option<Date> {
        let d = NaiveDate::from_ymd_opt(year, month, day)?;
        Some(Date(d.signed_duration_since(epoch_date()).num_days() as i32))
    }

    pub fn parse(s: &str) -> Result<Date> {
        let err = |field: &'static str| CoreError::DateField {
            field,
            input: s.to_owned(),
        };
        let b = s.as_bytes();
        if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
            return Err(err("layout"));
        }
        let year = digits(&b[0..4]).ok_or_else(|| err("year"))? as i32;
        let month = digits(&b[5..7]).ok_or_else(|| err("month"))?;
        let day = digits(&b[8..10]).ok_or_else(|| err("day"))?;
        if !(1..=12).contains(&month) {
            return Err(err("month"));
        }
        Date::from_ymd(year, month, day).ok_or_else(|| err("day"))
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = epoch_date() + chrono::Duration::days(i64::from(self.0));
        write!(f, "{:04}-{:02}-{:02}", d.year(), d.month(), d.day())
    }
}

/// Open time interval `(start, end)`. Both bounds are exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl Window {
    pub const fn new(start: Timestamp, end: Timestamp) -> Self {
        Window { start, end }
    }

    pub const fn from_millis(start: i64, end: i64) -> Self {
        Window {
            start: Timestamp(start),
            end: Timestamp(end),
        }
    }

    /// The widest window; every representable timestamp except the extremes.
    pub const fn unbounded() -> Self {
        Window::from_millis(i64::MIN, i64::MAX)
    }

    #[inline]
    pub fn contains(&self, t: Timestamp) -> bool {
        self.start < t && t < self.end
    }
}
