//! Exact-arithmetic helpers: dyadic rationals, canonical `p/q` strings,
//! fixed-precision decimal rendering and serde adapters that keep big
//! integers and rationals as decimal strings in JSON.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

/// `2^n` as a big integer.
pub fn pow2(n: u32) -> BigInt {
    BigInt::one() << n
}

/// The dyadic rational `2^{-k}`.
pub fn dyadic(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), pow2(k))
}

/// `2^e` for a possibly negative exponent.
pub fn pow2_signed(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(pow2(e as u32))
    } else {
        dyadic((-e) as u32)
    }
}

/// Canonical `numerator/denominator` rendering, also for integers (`3/1`).
pub fn format(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, a plain integer, or a finite decimal such as `-0.25`.
pub fn parse(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mag: BigInt = digits.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(mag, den);
        return Some(if negative { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Decimal rendering rounded half away from zero to `digits` places.
pub fn to_decimal(r: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = r.abs() * BigRational::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2;
    let q = if &twice >= scaled.denom() { q + 1 } else { q };
    let (int_part, frac_part) = q.div_rem(&scale);
    let sign = if r.is_negative() && !q.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{:0>width$}", frac_part.to_string(), width = digits)
}

pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigRational {
    values
        .into_iter()
        .map(|v| v.abs())
        .fold(BigRational::zero(), |a, b| if b > a { b } else { a })
}

/// Serde adapter: `BigInt` as a decimal string.
pub mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(|_| D::Error::custom(format!("bad integer {s:?}")))
    }
}

/// Serde adapter: `BigRational` as a `p/q` string.
pub mod serde_rational {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

/// Serde adapter: `Vec<BigRational>` as a list of `p/q` strings.
pub mod serde_rational_vec {
    use num_rational::BigRational;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| super::parse(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}

/// Serde adapter: `Option<BigRational>` as an optional `p/q` string.
pub mod serde_rational_opt {
    use num_rational::BigRational;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(r) => s.serialize_some(&super::format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|s| super::parse(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .transpose()
    }
}
