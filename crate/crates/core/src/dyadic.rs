//! Exact non-negative dyadic rationals `m * 2^-k`.
//!
//! Every distance in this crate is built from values `2^-lcp` and finite sums of
//! them, so a mantissa/exponent pair is enough. Values are kept normalized (odd
//! mantissa, or zero with exponent zero), which makes the derived `Eq` exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{validation, Error};

const MAX_EXPONENT: u32 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DyadicValue {
    mantissa: u128,
    exponent: u32,
}

impl DyadicValue {
    pub const ZERO: DyadicValue = DyadicValue {
        mantissa: 0,
        exponent: 0,
    };
    pub const ONE: DyadicValue = DyadicValue {
        mantissa: 1,
        exponent: 0,
    };

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Self {
        assert!(k <= MAX_EXPONENT, "dyadic exponent {k} out of range");
        DyadicValue {
            mantissa: 1,
            exponent: k,
        }
    }

    /// `mantissa * 2^-exponent`, normalized.
    pub fn new(mantissa: u128, exponent: u32) -> Self {
        assert!(
            exponent <= MAX_EXPONENT,
            "dyadic exponent {exponent} out of range"
        );
        let mut v = DyadicValue { mantissa, exponent };
        v.normalize();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn mantissa(&self) -> u128 {
        self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    fn normalize(&mut self) {
        if self.mantissa == 0 {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().min(self.exponent);
        self.mantissa >>= tz;
        self.exponent -= tz;
    }

    /// Mantissa rescaled to the given (larger or equal) exponent.
    fn scaled(&self, exponent: u32) -> u128 {
        let shift = exponent - self.exponent;
        self.mantissa
            .checked_shl(shift)
            .filter(|m| m >> shift == self.mantissa)
            .expect("dyadic value overflow")
    }

    pub fn to_f64(&self) -> f64 {
        self.mantissa as f64 * (-(self.exponent as f64)).exp2()
    }
}

impl Default for DyadicValue {
    fn default() -> Self {
        DyadicValue::ZERO
    }
}

impl Add for DyadicValue {
    type Output = DyadicValue;

    fn add(self, rhs: DyadicValue) -> DyadicValue {
        let e = self.exponent.max(rhs.exponent);
        let m = self
            .scaled(e)
            .checked_add(rhs.scaled(e))
            .expect("dyadic value overflow");
        DyadicValue::new(m, e)
    }
}

impl Ord for DyadicValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        // floor(log2) first; equal magnitudes rescale without overflow.
        let mag = |v: &DyadicValue| (128 - v.mantissa.leading_zeros()) as i64 - v.exponent as i64;
        mag(self).cmp(&mag(other)).then_with(|| {
            let e = self.exponent.max(other.exponent);
            self.scaled(e).cmp(&other.scaled(e))
        })
    }
}

impl PartialOrd for DyadicValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `0`, `1`, `2^-k`, plain integers, or `m*2^-k` for odd `m > 1`.
impl fmt::Display for DyadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.mantissa, self.exponent) {
            (m, 0) => write!(f, "{m}"),
            (1, k) => write!(f, "2^-{k}"),
            (m, k) => write!(f, "{m}*2^-{k}"),
        }
    }
}

impl FromStr for DyadicValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || validation(format!("malformed dyadic value `{s}`"));
        let parse_exp = |t: &str| -> Result<u32, Error> {
            let k: u32 = t.parse().map_err(|_| bad())?;
            if k > MAX_EXPONENT {
                return Err(bad());
            }
            Ok(k)
        };
        if let Some((m, k)) = s.split_once("*2^-") {
            let m: u128 = m.parse().map_err(|_| bad())?;
            return Ok(DyadicValue::new(m, parse_exp(k)?));
        }
        if let Some(k) = s.strip_prefix("2^-") {
            return Ok(DyadicValue::pow2_neg(parse_exp(k)?));
        }
        let m: u128 = s.parse().map_err(|_| bad())?;
        Ok(DyadicValue::new(m, 0))
    }
}
