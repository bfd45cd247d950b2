//! Byte encodings for group elements and scalars.
//!
//! Layout (version 1):
//!
//! * group A (G1): 48-byte compressed point
//! * group B (G2): 96-byte compressed point
//! * scalar: 32-byte big-endian, canonical (< group order)
//!
//! Inside transaction payloads and state snapshots these byte strings are
//! carried as lowercase hex.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::{G1Affine, G1Projective, G2Affine, G2Projective, Scalar};

pub const G1_LEN: usize = 48;
pub const G2_LEN: usize = 96;
pub const SCALAR_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("expected {expected} bytes, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("bytes are not a valid {0} encoding")]
    Invalid(&'static str),
    #[error("invalid hex: {0}")]
    Hex(String),
}

pub fn scalar_to_bytes(s: &Scalar) -> [u8; SCALAR_LEN] {
    let mut out = s.to_bytes();
    out.reverse();
    out
}

pub fn scalar_from_bytes(bytes: &[u8]) -> Result<Scalar, CodecError> {
    let mut le: [u8; SCALAR_LEN] = bytes.try_into().map_err(|_| CodecError::Length {
        expected: SCALAR_LEN,
        actual: bytes.len(),
    })?;
    le.reverse();
    Option::from(Scalar::from_bytes(&le)).ok_or(CodecError::Invalid("scalar"))
}

pub fn g1_to_bytes(p: &G1Projective) -> [u8; G1_LEN] {
    G1Affine::from(p).to_compressed()
}

pub fn g1_from_bytes(bytes: &[u8]) -> Result<G1Projective, CodecError> {
    let arr: [u8; G1_LEN] = bytes.try_into().map_err(|_| CodecError::Length {
        expected: G1_LEN,
        actual: bytes.len(),
    })?;
    Option::<G1Affine>::from(G1Affine::from_compressed(&arr))
        .map(G1Projective::from)
        .ok_or(CodecError::Invalid("G1 point"))
}

pub fn g2_to_bytes(p: &G2Projective) -> [u8; G2_LEN] {
    G2Affine::from(p).to_compressed()
}

pub fn g2_from_bytes(bytes: &[u8]) -> Result<G2Projective, CodecError> {
    let arr: [u8; G2_LEN] = bytes.try_into().map_err(|_| CodecError::Length {
        expected: G2_LEN,
        actual: bytes.len(),
    })?;
    Option::<G2Affine>::from(G2Affine::from_compressed(&arr))
        .map(G2Projective::from)
        .ok_or(CodecError::Invalid("G2 point"))
}

fn decode_hex_array<const N: usize>(s: &str) -> Result<[u8; N], CodecError> {
    let bytes = hex::decode(s).map_err(|e| CodecError::Hex(e.to_string()))?;
    let actual = bytes.len();
    bytes
        .try_into()
        .map_err(|_| CodecError::Length { expected: N, actual })
}

macro_rules! hex_bytes_newtype {
    ($(#[$meta:meta])* $name:ident, $len:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub [u8; $len]);

        impl $name {
            pub fn as_bytes(&self) -> &[u8; $len] {
                &self.0
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }

            pub fn from_hex(s: &str) -> Result<Self, CodecError> {
                decode_hex_array::<$len>(s).map(Self)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({}..)", stringify!($name), &self.to_hex()[..12])
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                Self::from_hex(&s).map_err(D::Error::custom)
            }
        }
    };
}

hex_bytes_newtype!(
    /// Undecoded compressed G1 point. Ordering is canonical byte order.
    G1Bytes,
    G1_LEN
);
hex_bytes_newtype!(
    /// Undecoded compressed G2 point.
    G2Bytes,
    G2_LEN
);
hex_bytes_newtype!(
    /// SHA-256 digest; used for contract, auction and request identifiers.
    Digest32,
    32
);

impl G1Bytes {
    pub fn from_point(p: &G1Projective) -> Self {
        Self(g1_to_bytes(p))
    }

    pub fn decode(&self) -> Result<G1Projective, CodecError> {
        g1_from_bytes(&self.0)
    }
}

impl G2Bytes {
    pub fn from_point(p: &G2Projective) -> Self {
        Self(g2_to_bytes(p))
    }

    pub fn decode(&self) -> Result<G2Projective, CodecError> {
        g2_from_bytes(&self.0)
    }
}

impl Digest32 {
    pub fn of(parts: &[&[u8]]) -> Self {
        Self(super::sha256(parts))
    }
}

/// `#[serde(with = "hex_scalar")]`
pub mod hex_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(s: &Scalar, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(scalar_to_bytes(s)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = hex::decode(&s).map_err(D::Error::custom)?;
        scalar_from_bytes(&bytes).map_err(D::Error::custom)
    }
}

/// `#[serde(with = "hex_scalars")]`
pub mod hex_scalars {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Scalar], serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(v.len()))?;
        for s in v {
            seq.serialize_element(&hex::encode(scalar_to_bytes(s)))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Vec<Scalar>, D::Error> {
        let v = Vec::<String>::deserialize(deserializer)?;
        v.iter()
            .map(|s| {
                let bytes = hex::decode(s).map_err(D::Error::custom)?;
                scalar_from_bytes(&bytes).map_err(D::Error::custom)
            })
            .collect()
    }
}

/// `#[serde(with = "hex_g1")]` for decoded points; deserialization validates
/// the point (on curve, prime-order subgroup).
pub mod hex_g1 {
    use super::*;

    pub fn serialize<S: Serializer>(p: &G1Projective, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(g1_to_bytes(p)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<G1Projective, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = hex::decode(&s).map_err(D::Error::custom)?;
        g1_from_bytes(&bytes).map_err(D::Error::custom)
    }
}

/// `#[serde(with = "hex_g2")]`
pub mod hex_g2 {
    use super::*;

    pub fn serialize<S: Serializer>(p: &G2Projective, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(g2_to_bytes(p)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<G2Projective, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = hex::decode(&s).map_err(D::Error::custom)?;
        g2_from_bytes(&bytes).map_err(D::Error::custom)
    }
}

/// `#[serde(with = "hex_g1_opt")]`
pub mod hex_g1_opt {
    use super::*;

    pub fn serialize<S: Serializer>(
        p: &Option<G1Projective>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        match p {
            Some(p) => serializer.serialize_some(&hex::encode(g1_to_bytes(p))),
            None => serializer.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<Option<G1Projective>, D::Error> {
        match Option::<String>::deserialize(deserializer)? {
            Some(s) => {
                let bytes = hex::decode(&s).map_err(D::Error::custom)?;
                g1_from_bytes(&bytes).map(Some).map_err(D::Error::custom)
            }
            None => Ok(None),
        }
    }
}

/// `#[serde(with = "hex_vec")]` for opaque byte strings.
pub mod hex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[u8], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(deserializer)?;
        hex::decode(&s).map_err(D::Error::custom)
    }
}
