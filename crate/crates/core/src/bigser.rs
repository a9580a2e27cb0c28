//! Serde adapters writing big integers and rationals as decimal strings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub mod ints {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| BigInt::from_str(s).map_err(D::Error::custom))
            .collect()
    }
}

pub mod ratio {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        BigRational::from_str(&s).map_err(D::Error::custom)
    }
}
