//! Millisecond time values and half-open alignment intervals.

use alloc::string::String;
use core::fmt;

use serde::Serialize;
use thiserror::Error;

/// A non-negative time offset in milliseconds.
///
/// Corpus files carry seconds with (at most) three decimals, so integer
/// milliseconds represent every value exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Millis(pub u64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeParseError {
    #[error("empty time value")]
    Empty,
    #[error("time value {0:?} is not a non-negative decimal number of seconds")]
    Syntax(String),
    #[error("time value {0:?} is out of range")]
    Overflow(String),
}

impl Millis {
    pub const ZERO: Millis = Millis(0);

    /// Parses a decimal seconds value (`11.704`, `13.3`, `2`).
    ///
    /// Digits past the third decimal are rounded half-up to the nearest
    /// millisecond.
    pub fn parse_seconds(input: &str) -> Result<Millis, TimeParseError> {
        let s = input.trim();
        if s.is_empty() {
            return Err(TimeParseError::Empty);
        }
        let (whole, frac) = match s.split_once('.') {
            Some((w, f)) => (w, f),
            None => (s, ""),
        };
        let syntax = || TimeParseError::Syntax(String::from(input));
        if whole.is_empty() && frac.is_empty() {
            return Err(syntax());
        }
        if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(syntax());
        }
        let overflow = || TimeParseError::Overflow(String::from(input));
        let mut secs: u64 = 0;
        for b in whole.bytes() {
            secs = secs
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or_else(overflow)?;
        }
        let mut millis: u64 = 0;
        let fb = frac.as_bytes();
        for i in 0..3 {
            millis = millis * 10 + fb.get(i).map_or(0, |b| u64::from(b - b'0'));
        }
        if fb.len() > 3 && fb[3] >= b'5' {
            millis += 1;
        }
        secs.checked_mul(1000)
            .and_then(|v| v.checked_add(millis))
            .map(Millis)
            .ok_or_else(overflow)
    }

    /// Seconds with exactly three decimals, e.g. `1.088`.
    pub fn seconds_string(self) -> String {
        alloc::format!("{}.{:03}", self.0 / 1000, self.0 % 1000)
    }

    pub fn from_secs_f64(secs: f64) -> Millis {
        if secs.is_nan() || secs <= 0.0 {
            return Millis::ZERO;
        }
        Millis((secs * 1000.0 + 0.5) as u64)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn abs_diff(self, other: Millis) -> Millis {
        Millis(self.0.abs_diff(other.0))
    }
}

impl fmt::Display for Millis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

/// An alignment interval. `end` is strictly greater than `begin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TimeInterval {
    begin: Millis,
    end: Millis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("interval end {end} does not come after begin {begin}")]
pub struct EmptyInterval {
    pub begin: Millis,
    pub end: Millis,
}

impl TimeInterval {
    pub fn new(begin: Millis, end: Millis) -> Result<TimeInterval, EmptyInterval> {
        if end > begin {
            Ok(TimeInterval { begin, end })
        } else {
            Err(EmptyInterval { begin, end })
        }
    }

    pub fn from_millis(begin: u64, end: u64) -> Result<TimeInterval, EmptyInterval> {
        TimeInterval::new(Millis(begin), Millis(end))
    }

    pub fn begin(&self) -> Millis {
        self.begin
    }

    pub fn end(&self) -> Millis {
        self.end
    }

    pub fn length(&self) -> Millis {
        Millis(self.end.0 - self.begin.0)
    }

    /// The shared part of two intervals, if it has positive length.
    /// Intervals that only touch at an endpoint do not intersect.
    pub fn intersection(&self, other: &TimeInterval) -> Option<TimeInterval> {
        let begin = self.begin.max(other.begin);
        let end = self.end.min(other.end);
        TimeInterval::new(begin, end).ok()
    }

    pub fn intersects(&self, other: &TimeInterval) -> bool {
        self.begin < other.end && other.begin < self.end
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.begin, self.end)
    }
}
