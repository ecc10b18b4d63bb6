//! Serde glue for `BigInt` values: JSON integers when they fit in 64 bits,
//! decimal strings otherwise. Both forms are accepted on input.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

pub(crate) struct IntRef<'a>(pub &'a BigInt);

impl Serialize for IntRef<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

pub(crate) struct IntOwned(pub BigInt);

impl<'de> Deserialize<'de> for IntOwned {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = IntOwned;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a decimal integer string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<IntOwned, E> {
                Ok(IntOwned(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<IntOwned, E> {
                Ok(IntOwned(v.into()))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<IntOwned, E> {
                Err(E::custom(format!("expected an integer, found {v}")))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<IntOwned, E> {
                v.trim()
                    .parse::<BigInt>()
                    .map(IntOwned)
                    .map_err(|_| E::custom(format!("`{v}` is not an integer")))
            }
        }
        d.deserialize_any(V)
    }
}

pub mod scalar {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        IntRef(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        IntOwned::deserialize(d).map(|v| v.0)
    }
}

pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&IntRef(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<IntOwned>::deserialize(d)?;
        Ok(raw.into_iter().map(|v| v.0).collect())
    }
}

pub mod matrix {
    use super::*;
    use serde::ser::SerializeSeq;

    struct Row<'a>(&'a [BigInt]);

    impl Serialize for Row<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            super::vec::serialize(self.0, s)
        }
    }

    pub fn serialize<S: Serializer>(m: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.len()))?;
        for row in m {
            seq.serialize_element(&Row(row))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let raw = Vec::<Vec<IntOwned>>::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.0).collect())
            .collect())
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&IntRef(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Ok(Option::<IntOwned>::deserialize(d)?.map(|v| v.0))
    }
}
