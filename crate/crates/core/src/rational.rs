//! Exact rationals and the integer tick arithmetic used for masses.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Parses `"num/den"` or a bare integer. Decimals are rejected.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Always `"num/den"`, integers included, so the wire format is uniform.
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn from_ticks(ticks: u128, denom: u128) -> Rational {
    Rational::new(BigInt::from(ticks), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `a < eps * b`, all exact.
pub fn lt_scaled(a: u128, eps: &Rational, b: u128) -> bool {
    BigInt::from(a) * eps.denom() < eps.numer() * BigInt::from(b)
}

/// `a <= eps * b`, all exact.
pub fn le_scaled(a: u128, eps: &Rational, b: u128) -> bool {
    BigInt::from(a) * eps.denom() <= eps.numer() * BigInt::from(b)
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `2^-n` as an exact rational.
pub fn pow2_inv(n: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << n as usize)
}

/// Serde adapters writing rationals as `"num/den"` strings.
pub mod serde_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> core::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(
            v: &[Rational],
            s: S,
        ) -> core::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> core::result::Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse(s).map_err(de::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> core::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&format(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> core::result::Result<Option<Rational>, D::Error> {
            let raw = Option::<String>::deserialize(d)?;
            raw.map(|s| parse(&s).map_err(de::Error::custom)).transpose()
        }
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Exact Sauer sum `Σ_{i≤d} C(n, i)`, saturating.
pub fn sauer_sum(n: u64, d: u64) -> u128 {
    (0..=d.min(n)).fold(0u128, |acc, i| acc.saturating_add(binomial(n, i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("3/10").unwrap(), frac(3, 10));
        assert_eq!(parse(" 2 ").unwrap(), int(2));
        assert_eq!(format(&frac(2, 4)), "1/2");
        assert_eq!(format(&int(1)), "1/1");
        assert!(parse("0.5").is_err());
        assert!(parse("1/0").is_err());
    }

    #[test]
    fn scaled_comparisons() {
        let eps = frac(1, 4);
        assert!(lt_scaled(1, &eps, 5));
        assert!(!lt_scaled(1, &eps, 4));
        assert!(le_scaled(1, &eps, 4));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(sauer_sum(3, 2), 7);
        assert_eq!(sauer_sum(3, 3), 8);
        assert_eq!(sauer_sum(4, 1), 5);
    }
}
