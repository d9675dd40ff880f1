use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CoreError, Result};
use crate::money::Money;

/// A decimal with exactly three fractional digits, stored in thousandths.
///
/// Values are only produced by [`round3`] (or exact conversions such as
/// money, integers and the `-1` sentinel). Text form always carries three
/// digits: `2.500`, `-1.000`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rounded3(i64);

impl Rounded3 {
    pub const ZERO: Rounded3 = Rounded3(0);
    /// The `-1` "no data" result used by several queries.
    pub const SENTINEL: Rounded3 = Rounded3(-1000);

    pub const fn thousandths(self) -> i64 {
        self.0
    }

    pub const fn from_thousandths(v: i64) -> Self {
        Rounded3(v)
    }

    pub const fn from_int(v: i64) -> Self {
        Rounded3(v * 1000)
    }

    pub const fn from_money(m: Money) -> Self {
        Rounded3(m.cents() * 10)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn is_sentinel(self) -> bool {
        self == Self::SENTINEL
    }

    pub fn parse(s: &str) -> Result<Rounded3> {
        let err = || CoreError::Money(s.to_owned());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, t),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty()
            || frac.len() > 3
            || !int.bytes().all(|c| c.is_ascii_digit())
            || !frac.bytes().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let whole: i64 = int.parse().map_err(|_| err())?;
        let mut f: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| err())?
        };
        for _ in frac.len()..3 {
            f *= 10;
        }
        let v = whole * 1000 + f;
        Ok(Rounded3(if neg { -v } else { v }))
    }
}

/// Rounds `num / den` to three decimals, half away from zero.
///
/// Works on the exact integer ratio so the result never depends on binary
/// floating point digits.
///
/// # Panics
/// If `den` is zero.
pub fn round3(num: i128, den: i128) -> Rounded3 {
    assert!(den != 0, "round3: zero denominator");
    let neg = (num < 0) != (den < 0);
    let n = num.unsigned_abs() * 1000;
    let d = den.unsigned_abs();
    let mut q = n / d;
    let r = n % d;
    if r * 2 >= d {
        q += 1;
    }
    let q = q as i64;
    Rounded3(if neg { -q } else { q })
}

impl fmt::Display for Rounded3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:03}", a / 1000, a % 1000)
    }
}

impl FromStr for Rounded3 {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        Rounded3::parse(s)
    }
}

impl Serialize for Rounded3 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rounded3 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rounded3::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(round3(12345, 10000).to_string(), "1.235");
        assert_eq!(round3(-10005, 10000).to_string(), "-1.001");
        assert_eq!(round3(70, 30).to_string(), "2.333");
        assert_eq!(round3(5, 2).to_string(), "2.500");
        assert_eq!(round3(1, -3).to_string(), "-0.333");
        assert_eq!(Rounded3::SENTINEL.to_string(), "-1.000");
    }

    #[test]
    fn text_round_trip() {
        for s in ["2.500", "-1.000", "0.000", "1234.001", "-0.050"] {
            assert_eq!(Rounded3::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(Rounded3::parse("2.5").unwrap().to_string(), "2.500");
        let json = serde_json::to_string(&Rounded3::from_int(4)).unwrap();
        assert_eq!(json, "\"4.000\"");
        assert_eq!(
            serde_json::from_str::<Rounded3>(&json).unwrap(),
            Rounded3::from_int(4)
        );
    }

    proptest! {
        #[test]
        fn idempotent(num in -10_000_000_000i128..10_000_000_000, den in 1i128..1_000_000) {
            let r = round3(num, den);
            prop_assert_eq!(round3(i128::from(r.thousandths()), 1000), r);
        }

        #[test]
        fn money_is_exact(cents in -10_000_000_000i64..10_000_000_000) {
            let r = round3(i128::from(cents), 100);
            prop_assert_eq!(r.thousandths() % 10, 0);
            prop_assert_eq!(r, Rounded3::from_money(Money(cents)));
        }

        #[test]
        fn within_half_unit(num in -1_000_000_000i128..1_000_000_000, den in 1i128..100_000) {
            // |round3(x) - x| <= 0.0005
            let r = i128::from(round3(num, den).thousandths());
            prop_assert!((r * den - num * 1000).abs() * 2 <= den);
        }
    }
}
