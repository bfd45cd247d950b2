//! Pairing-group arithmetic, commitments, and Fiat–Shamir proofs.
//!
//! Group A is BLS12-381 G1, group B is G2. Every other module reaches the
//! curve through this one.

use std::sync::OnceLock;

use bls12_381::hash_to_curve::{ExpandMsgXmd, HashToCurve};
use ff::Field;
use rand_core::{CryptoRng, RngCore};

pub mod codec;
mod msm;
pub mod pedersen;
pub mod proof;
pub mod sig;

pub use bls12_381::{G1Affine, G1Projective, G2Affine, G2Projective, Gt, Scalar};

pub use codec::{CodecError, Digest32, G1Bytes, G2Bytes};
pub use msm::msm;
pub use pedersen::{pedersen_commit, verify_open, PedersenCommitment, PedersenOpening};
pub use proof::{
    prove_representation, verify_representation, FiatShamirProof, GroupElement, Relation,
    Statement, Transcript,
};
pub use sig::{Address, Signature, SigningKey};

/// Identifier of the pairing curve, recorded in serialized output.
pub const CURVE_ID: &str = "BLS12-381";

/// Version tag absorbed first by every transcript.
pub const PROTOCOL_VERSION: &[u8] = b"sealbid/v1";

const HASH_TO_GROUP_DST: &[u8] = b"SEALBID-V1-BLS12381G1_XMD:SHA-256_SSWU_RO_";

/// Fixed generators of the type-3 pairing setting.
#[derive(Debug, Clone)]
pub struct GroupContext {
    pub g1: G1Projective,
    pub g2: G2Projective,
    /// Pedersen base with no known discrete log relative to `g1`.
    pub h1: G1Projective,
}

impl GroupContext {
    pub fn get() -> &'static GroupContext {
        static CONTEXT: OnceLock<GroupContext> = OnceLock::new();
        CONTEXT.get_or_init(|| GroupContext {
            g1: G1Projective::generator(),
            g2: G2Projective::generator(),
            h1: hash_to_group(b"pedersen-h", CURVE_ID.as_bytes()),
        })
    }

    pub fn curve_id(&self) -> &'static str {
        CURVE_ID
    }
}

/// Hashes `(label, payload)` onto group A.
///
/// The label is framed into the message with its length so that distinct
/// (label, payload) splits of the same byte string never collide.
///
/// # Panics
///
/// Panics if `label` is empty.
pub fn hash_to_group(label: &[u8], payload: &[u8]) -> G1Projective {
    assert!(!label.is_empty(), "hash_to_group requires a domain label");
    let mut msg = Vec::with_capacity(8 + label.len() + payload.len());
    msg.extend_from_slice(&(label.len() as u64).to_be_bytes());
    msg.extend_from_slice(label);
    msg.extend_from_slice(payload);
    <G1Projective as HashToCurve<ExpandMsgXmd<sha2::Sha256>>>::hash_to_curve(
        &msg,
        HASH_TO_GROUP_DST,
    )
}

pub fn random_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> Scalar {
    Scalar::random(rng)
}

pub fn scalar_from_u64(value: u64) -> Scalar {
    Scalar::from(value)
}

pub(crate) fn sha256(parts: &[&[u8]]) -> [u8; 32] {
    use sha2::Digest;
    let mut hasher = sha2::Sha256::new();
    for part in parts {
        hasher.update(part);
    }
    hasher.finalize().into()
}
