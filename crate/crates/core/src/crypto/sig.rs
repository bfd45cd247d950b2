//! Schnorr signatures over G1. An [`Address`] is the verification key.

use std::fmt;

use rand_core::{CryptoRng, RngCore};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::codec::{scalar_from_bytes, scalar_to_bytes, CodecError, G1Bytes};
use super::proof::{prove_representation, verify_representation, FiatShamirProof};
use super::{random_scalar, G1Projective, GroupContext, Scalar};

const SIGNATURE_LABEL: &str = "representation";

/// Owner-held signing key.
#[derive(Clone)]
pub struct SigningKey {
    secret: Scalar,
    address: Address,
}

impl fmt::Debug for SigningKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SigningKey").field("address", &self.address).finish()
    }
}

/// Public verification key; doubles as the account identifier on the ledger.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Address(pub G1Bytes);

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({}..)", &self.0.to_hex()[..12])
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Address {
    pub fn point(&self) -> Result<G1Projective, CodecError> {
        self.0.decode()
    }

    /// Short printable prefix for reports.
    pub fn short(&self) -> String {
        self.0.to_hex()[..16].to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub challenge: Scalar,
    pub response: Scalar,
}

impl Signature {
    pub fn to_bytes(&self) -> [u8; 64] {
        let mut out = [0u8; 64];
        out[..32].copy_from_slice(&scalar_to_bytes(&self.challenge));
        out[32..].copy_from_slice(&scalar_to_bytes(&self.response));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        if bytes.len() != 64 {
            return Err(CodecError::Length {
                expected: 64,
                actual: bytes.len(),
            });
        }
        Ok(Self {
            challenge: scalar_from_bytes(&bytes[..32])?,
            response: scalar_from_bytes(&bytes[32..])?,
        })
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&hex::encode(self.to_bytes()))
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = hex::decode(&s).map_err(D::Error::custom)?;
        Self::from_bytes(&bytes).map_err(D::Error::custom)
    }
}

fn signing_context(message: &[u8]) -> Vec<u8> {
    let mut ctx = b"signature/".to_vec();
    ctx.extend_from_slice(message);
    ctx
}

impl SigningKey {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let secret = random_scalar(rng);
        let address = Address(G1Bytes::from_point(&(GroupContext::get().g1 * secret)));
        Self { secret, address }
    }

    pub fn address(&self) -> Address {
        self.address
    }

    pub fn sign<R: RngCore + CryptoRng>(&self, message: &[u8], rng: &mut R) -> Signature {
        let ctx = GroupContext::get();
        let public = ctx.g1 * self.secret;
        let proof = prove_representation(
            &[ctx.g1],
            &[self.secret],
            &public,
            &signing_context(message),
            rng,
        );
        Signature {
            challenge: proof.challenge,
            response: proof.responses[0],
        }
    }
}

impl Address {
    pub fn verify(&self, message: &[u8], signature: &Signature) -> bool {
        let Ok(public) = self.point() else {
            return false;
        };
        let proof = FiatShamirProof {
            label: SIGNATURE_LABEL.to_string(),
            challenge: signature.challenge,
            responses: vec![signature.response],
        };
        verify_representation(
            &[GroupContext::get().g1],
            &public,
            &signing_context(message),
            &proof,
        )
    }
}
