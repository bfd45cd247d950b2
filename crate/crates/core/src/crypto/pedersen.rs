use serde::{Deserialize, Serialize};

use super::codec::{hex_g1, hex_scalar, G1Bytes};
use super::{G1Projective, GroupContext, Scalar};

/// `g1^value · h1^blinding`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PedersenCommitment {
    #[serde(with = "hex_g1")]
    pub point: G1Projective,
}

/// Kept by the committer until the commitment is opened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PedersenOpening {
    #[serde(with = "hex_scalar")]
    pub value: Scalar,
    #[serde(with = "hex_scalar")]
    pub blinding: Scalar,
}

impl PedersenCommitment {
    pub fn to_bytes(&self) -> G1Bytes {
        G1Bytes::from_point(&self.point)
    }
}

pub fn pedersen_commit(value: Scalar, blinding: Scalar) -> PedersenCommitment {
    let ctx = GroupContext::get();
    PedersenCommitment {
        point: ctx.g1 * value + ctx.h1 * blinding,
    }
}

pub fn verify_open(c: &PedersenCommitment, value: Scalar, blinding: Scalar) -> bool {
    pedersen_commit(value, blinding).point == c.point
}
