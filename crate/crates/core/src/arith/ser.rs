//! Serde adapters writing exact numbers as decimal strings.

pub mod rational {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::arith::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = StringOrInt::deserialize(d)?;
        parse_rational(&raw.0).map_err(D::Error::custom)
    }

    /// Accepts "p/q" strings and bare JSON integers.
    struct StringOrInt(String);

    impl<'de> Deserialize<'de> for StringOrInt {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let v = serde_json::Value::deserialize(d)?;
            match v {
                serde_json::Value::String(s) => Ok(StringOrInt(s)),
                serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => {
                    Ok(StringOrInt(n.to_string()))
                }
                other => Err(D::Error::custom(format!("expected rational, got {other}"))),
            }
        }
    }
}

pub mod integer {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.trim().parse().map_err(D::Error::custom)
    }
}
