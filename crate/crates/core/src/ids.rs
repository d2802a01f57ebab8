//! Serde helpers writing 0-based node indices as 1-based ids.

use serde::Serializer;

pub fn serialize<S: Serializer>(ids: &[usize], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(ids.iter().map(|&v| v + 1))
}

pub mod one {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(id: &usize, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(*id as u64 + 1)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<usize, D::Error> {
        let raw = usize::deserialize(d)?;
        raw.checked_sub(1)
            .ok_or_else(|| serde::de::Error::custom("node ids are 1-based"))
    }
}
