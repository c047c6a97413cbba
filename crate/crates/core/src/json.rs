//! Canonical JSON: sorted object keys, compact separators, and
//! arbitrary-precision numbers carried as decimal strings.

use serde::Serialize;

use crate::Result;

/// Serializes with object keys sorted at every level.
pub fn to_canonical_string<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's `Value` keeps objects in a BTreeMap unless the
    // preserve_order feature is on, which this crate never enables.
    let value = serde_json::to_value(value)?;
    Ok(serde_json::to_string(&value)?)
}

pub fn to_canonical_pretty<T: Serialize>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&value)?)
}

/// `BigRational` as `"n"` or `"n/d"`.
pub mod rational_string {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::One;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn format(q: &BigRational) -> String {
        if q.denom().is_one() {
            q.numer().to_string()
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    }

    pub fn parse(s: &str) -> Option<BigRational> {
        match s.split_once('/') {
            None => s.trim().parse::<BigInt>().ok().map(BigRational::from_integer),
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().ok()?;
                let d: BigInt = d.trim().parse().ok()?;
                if d == BigInt::from(0) {
                    return None;
                }
                Some(BigRational::new(n, d))
            }
        }
    }

    pub fn serialize_vec<S: Serializer>(values: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(format))
    }

    pub fn deserialize_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| parse(s).ok_or_else(|| de::Error::custom(format!("bad rational {s:?}")))).collect()
    }
}

/// Nonnegative big integers as decimal strings.
pub mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize_vec<S: Serializer>(values: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|v| v.to_string()))
    }

    pub fn deserialize_vec<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| s.parse::<BigUint>().map_err(|_| de::Error::custom(format!("bad integer {s:?}")))).collect()
    }

    pub fn serialize<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(|_| de::Error::custom(format!("bad integer {raw:?}")))
    }
}
