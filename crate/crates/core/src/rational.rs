//! Exact rational scalars and their text form.
//!
//! Every quantity in the crate is a [`Rat`]. The text form accepted on input is
//! an integer (`"3"`), a fraction (`"-1/2"`), or a finite decimal (`"0.25"`);
//! the text form produced on output is the canonical reduced fraction, printed
//! as a bare integer when the denominator is one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

pub fn from_usize(value: usize) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

/// Parses an integer, `p/q` fraction, or finite decimal.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let err = || Error::ParseRational(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = parse_integer(p.trim()).ok_or_else(err)?;
        let q: BigInt = parse_integer(q.trim()).ok_or_else(err)?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(Rat::new(p, q));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.bytes().all(|c| c.is_ascii_digit()) || !frac.bytes().all(|c| c.is_ascii_digit())
    {
        return Err(err());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = digits.parse().map_err(|_| err())?;
    let denom = num_traits::pow(BigInt::from(10u8), frac.len());
    let value = Rat::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical output form: `p/q` in lowest terms, or `p` when `q = 1`.
pub fn format_rat(value: &Rat) -> String {
    value.to_string()
}

/// `⌊value⌋` for a nonnegative rational, saturating at `usize::MAX`.
pub fn floor_usize(value: &Rat) -> usize {
    debug_assert!(!value.is_negative());
    value.floor().to_integer().to_usize().unwrap_or(usize::MAX)
}

/// `max(1, ⌊k / c⌋)`: the clamped start index of the right-hand tail in the
/// orbit criterion.
pub fn clamped_start(k: usize, c: &Rat) -> usize {
    let q = from_usize(k) / c;
    floor_usize(&q).max(1)
}

/// serde adapters that carry a [`Rat`] as its canonical string.
pub mod serde_rat {
    use super::{format_rat, parse_rat, Rat};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let text = String::deserialize(d)?;
        parse_rat(&text).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(values: &[Rat], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&format_rat(v))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rat(t).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(value: &Option<Rat>, s: S) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.serialize_some(&format_rat(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rat>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            text.map(|t| parse_rat(&t).map_err(D::Error::custom))
                .transpose()
        }
    }
}
