//! Transaction payloads, one struct per kind. Encoded as compact JSON with
//! group elements as hex of their compressed form.

use serde::{Deserialize, Serialize};

use super::FileCommitment;
use crate::credentials::{CredentialRequest, ShowProof, VerificationKeyBytes};
use crate::crypto::codec::hex_scalar;
use crate::crypto::{Address, Digest32, G1Bytes, Scalar, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuthorityPublic {
    pub index: u64,
    pub key: VerificationKeyBytes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupPayload {
    pub curve: String,
    pub n: u64,
    pub t: u64,
    pub denominations: Vec<u64>,
    pub authorities: Vec<AuthorityPublic>,
    pub vk: VerificationKeyBytes,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreatePayload {
    pub contract: Digest32,
    pub worker: Address,
    pub min_price: G1Bytes,
    pub t_commit: u64,
    pub t_reveal: u64,
    /// Verification key of the authorities the worker trusts; must match
    /// the instance's.
    pub trusted_vk: VerificationKeyBytes,
    pub policy: String,
    pub advertisement: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DepositPayload {
    pub contract: Digest32,
    pub value: u64,
    pub request: CredentialRequest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommitPayload {
    pub contract: Digest32,
    pub auction: Digest32,
    pub show: ShowProof,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevealPayload {
    pub contract: Digest32,
    pub auction: Digest32,
    pub show: ShowProof,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenMinPricePayload {
    pub contract: Digest32,
    pub auction: Digest32,
    pub value: u64,
    #[serde(with = "hex_scalar")]
    pub blinding: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WithdrawPayload {
    pub contract: Digest32,
    pub auction: Digest32,
    pub addr: Address,
    pub show: ShowProof,
    /// Signature under `addr` over [`withdraw_binding_message`].
    pub binding: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitWorkPayload {
    pub contract: Digest32,
    pub auction: Digest32,
    pub show: ShowProof,
    pub file: FileCommitment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimPaymentPayload {
    pub contract: Digest32,
    pub auction: Digest32,
}

fn framed(tag: &[u8], parts: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::with_capacity(256);
    out.extend_from_slice(tag);
    for p in parts {
        out.extend_from_slice(&(p.len() as u32).to_be_bytes());
        out.extend_from_slice(p);
    }
    out
}

/// Bytes folded into the show transcript of each kind of presentation.
pub fn show_binding(kind: &str, parts: &[&[u8]]) -> Vec<u8> {
    let mut tag = b"show-binding/".to_vec();
    tag.extend_from_slice(kind.as_bytes());
    framed(&tag, parts)
}

pub fn withdraw_show_binding(contract: &Digest32, auction: &Digest32, addr: &Address) -> Vec<u8> {
    show_binding("withdraw", &[&contract.0, &auction.0, addr.0.as_bytes()])
}

pub fn submit_work_show_binding(contract: &Digest32, file: &Digest32, signer: &Address) -> Vec<u8> {
    show_binding("submit-work", &[&contract.0, &file.0, signer.0.as_bytes()])
}

/// Message the payout key signs: the request is bound to this exact
/// contract, auction, address and tag.
pub fn withdraw_binding_message(
    contract: &Digest32,
    auction: &Digest32,
    addr: &Address,
    zeta: &G1Bytes,
) -> Vec<u8> {
    framed(
        b"withdraw-binding",
        &[&contract.0, &auction.0, addr.0.as_bytes(), zeta.as_bytes()],
    )
}

pub fn file_message(auction: &Digest32, digest: &Digest32) -> Vec<u8> {
    framed(b"file-commitment", &[&auction.0, &digest.0])
}
