//! Serde adapters. Integers serialize as decimal text, never binary.

pub mod bigint_dec {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(value: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(de)?;
        BigInt::from_str(&s).map_err(|e| de::Error::custom(format!("bad integer `{s}`: {e}")))
    }
}
