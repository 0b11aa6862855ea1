//! Exponent pairs a|a' of the complex field and single-valued powers z^(a|a').
//!
//! A pair is stored as its first component `holo` together with the integer
//! difference `offset` = a - a', so membership in the lattice of admissible
//! pairs is structural and a' = holo - offset is reconstructed exactly.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldExponent {
    /// The component a.
    pub holo: Complex64,
    /// The integer k = a - a'.
    pub offset: i64,
}

impl FieldExponent {
    pub const fn new(holo: Complex64, offset: i64) -> Self {
        Self { holo, offset }
    }

    /// Pair x|x with zero offset.
    pub fn diagonal(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), 0)
    }

    /// The pair 1|1.
    pub fn one() -> Self {
        Self::diagonal(1.0)
    }

    /// The pair 2|2.
    pub fn two() -> Self {
        Self::diagonal(2.0)
    }

    /// The pair 1/2|1/2.
    pub fn half_one() -> Self {
        Self::diagonal(0.5)
    }

    pub fn zero() -> Self {
        Self::diagonal(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.offset == 0 && self.holo == Complex64::new(0.0, 0.0)
    }

    /// The second component a' = holo - offset.
    pub fn anti(&self) -> Complex64 {
        self.holo - self.offset as f64
    }

    /// floor(a|a') = Re(a + a')/2, computed from the stored fields only.
    pub fn floor(&self) -> f64 {
        self.holo.re - self.offset as f64 / 2.0
    }

    pub fn add(&self, other: &FieldExponent) -> FieldExponent {
        FieldExponent::new(self.holo + other.holo, self.offset + other.offset)
    }

    pub fn sub(&self, other: &FieldExponent) -> FieldExponent {
        FieldExponent::new(self.holo - other.holo, self.offset - other.offset)
    }

    pub fn negate(&self) -> FieldExponent {
        FieldExponent::new(-self.holo, -self.offset)
    }

    /// n * (a|a'), both components and the offset scaled by the integer n.
    pub fn scale_int(&self, n: i64) -> FieldExponent {
        FieldExponent::new(self.holo * n as f64, self.offset * n)
    }

    /// (a+c)|(a'+c); the offset is unchanged.
    pub fn shift_scalar(&self, c: Complex64) -> FieldExponent {
        FieldExponent::new(self.holo + c, self.offset)
    }

    /// (-1)^(a-a'), exact.
    pub fn neg_one_pow(&self) -> f64 {
        if self.offset.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// i^(a-a'), exact.
    pub fn i_pow(&self) -> Complex64 {
        match self.offset.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// z^(a|a') = z^a zbar^a', single-valued on all of C minus the origin.
///
/// Factorized as z^k * |z|^(2a') with k = a - a': the integer power carries
/// the whole phase, the positive-real power carries the complex exponent, so
/// no branch-cut policy enters.
pub fn complex_power(z: Complex64, e: &FieldExponent) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        if e.is_zero() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        return if e.floor() > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(Error::ZeroToNonpositivePower)
        };
    }
    let log_r = z.norm().ln();
    let int_part = z.powi(e.offset as i32);
    let rest = (e.anti() * 2.0 * log_r).exp();
    Ok(int_part * rest)
}

/// (log-magnitude, phase) of z^(a|a'), for overflow-free accumulation of
/// long products. Requires z != 0.
pub fn complex_power_log(z: Complex64, e: &FieldExponent) -> (f64, f64) {
    let log_r = z.norm().ln();
    let phi = z.arg();
    let anti = e.anti();
    let log_mag = (e.offset as f64 + 2.0 * anti.re) * log_r;
    let phase = e.offset as f64 * phi + 2.0 * anti.im * log_r;
    (log_mag, phase)
}

fn fmt_f64(x: f64) -> String {
    // shortest round-trip representation
    format!("{x}")
}

impl fmt::Display for FieldExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holo.im == 0.0 {
            write!(f, "{}", fmt_f64(self.holo.re))?;
        } else if self.holo.im >= 0.0 {
            write!(f, "{}+{}i", fmt_f64(self.holo.re), fmt_f64(self.holo.im))?;
        } else {
            write!(f, "{}-{}i", fmt_f64(self.holo.re), fmt_f64(-self.holo.im))?;
        }
        write!(f, "|{}", self.offset)
    }
}

/// Parse a complex number of the form "0.3", "0.3+0.1i", "-1.5-2i", "0.4i".
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let err = || Error::Parse(format!("invalid complex literal {s:?}"));
    // split at the last '+'/'-' that is not a leading sign or part of an exponent
    let bytes = s.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let c = bytes[i] as char;
        if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
            split = Some(i);
            break;
        }
    }
    if s.ends_with('i') {
        let (re_part, im_part) = match split {
            Some(i) => (&s[..i], &s[i..]),
            None => ("0", s.as_str()),
        };
        let im_str = &im_part[..im_part.len() - 1];
        let im = match im_str {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => t.parse::<f64>().map_err(|_| err())?,
        };
        let re = if re_part.is_empty() {
            0.0
        } else {
            re_part.parse::<f64>().map_err(|_| err())?
        };
        Ok(Complex64::new(re, im))
    } else {
        let re = s.parse::<f64>().map_err(|_| err())?;
        Ok(Complex64::new(re, 0.0))
    }
}

impl FromStr for FieldExponent {
    type Err = Error;

    /// Text form "a_re+a_im i|k"; when "|k" is omitted the offset is 0, so
    /// "0.3" parses as the diagonal pair 0.3|0.3.
    fn from_str(s: &str) -> Result<Self> {
        let (holo_str, off_str) = match s.find('|') {
            Some(i) => (&s[..i], Some(&s[i + 1..])),
            None => (s, None),
        };
        let holo = parse_complex(holo_str)?;
        let offset = match off_str {
            Some(t) => t
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("invalid offset in {s:?}")))?,
            None => 0,
        };
        Ok(FieldExponent::new(holo, offset))
    }
}

impl Serialize for FieldExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FieldExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
