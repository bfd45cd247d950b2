//! Blind issuance: the requester commits to `(v, s)`, encrypts `s` under an
//! ephemeral ElGamal key, and proves the two agree. Authorities sign the
//! ciphertext homomorphically; the requester decrypts each share and
//! interpolates.

use std::sync::OnceLock;

use bls12_381::{pairing, G1Affine, G2Affine};
use rand_core::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::keys::{lagrange_at_zero, AggregatedVerificationKey, AuthorityKeyShare, VerificationKey};
use super::CredentialError;
use crate::crypto::codec::{g1_to_bytes, hex_g1};
use crate::crypto::{
    hash_to_group, msm, random_scalar, Digest32, FiatShamirProof, G1Projective, GroupContext,
    GroupElement, Relation, Scalar, Statement,
};

pub(crate) struct AttributeBases {
    pub value: G1Projective,
    pub serial: G1Projective,
}

pub(crate) fn attribute_bases() -> &'static AttributeBases {
    static BASES: OnceLock<AttributeBases> = OnceLock::new();
    BASES.get_or_init(|| AttributeBases {
        value: hash_to_group(b"attribute-base", b"value"),
        serial: hash_to_group(b"attribute-base", b"serial"),
    })
}

/// Signature base for a request: a hash of its attribute commitment.
pub(crate) fn credential_base(commitment: &G1Projective) -> G1Projective {
    hash_to_group(b"credential-base", &g1_to_bytes(commitment))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ciphertext {
    #[serde(with = "hex_g1")]
    pub c1: G1Projective,
    #[serde(with = "hex_g1")]
    pub c2: G1Projective,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CredentialRequest {
    pub value: u64,
    #[serde(with = "hex_g1")]
    pub commitment: G1Projective,
    #[serde(with = "hex_g1")]
    pub encryption_key: G1Projective,
    pub ciphertext: Ciphertext,
    pub proof: FiatShamirProof,
}

/// Requester-side state needed to unblind partial credentials.
#[derive(Clone)]
pub struct RequestSecrets {
    pub(crate) decryption_key: Scalar,
    pub(crate) serial: Scalar,
    pub(crate) value: u64,
    pub(crate) base: G1Projective,
}

impl std::fmt::Debug for RequestSecrets {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RequestSecrets")
            .field("value", &self.value)
            .finish_non_exhaustive()
    }
}

const REQUEST_LABEL: &str = "credential-request";

fn request_statement(req: &CredentialRequest, base: G1Projective) -> Statement {
    let ctx = GroupContext::get();
    let bases = attribute_bases();
    // witnesses: 0 = commitment opening, 1 = encryption randomness, 2 = serial
    Statement::new(
        REQUEST_LABEL,
        3,
        vec![
            Relation::new(
                req.commitment - bases.value * Scalar::from(req.value),
                vec![(ctx.g1.into(), 0), (GroupElement::G1(bases.serial), 2)],
            ),
            Relation::new(req.ciphertext.c1, vec![(ctx.g1.into(), 1)]),
            Relation::new(
                req.ciphertext.c2,
                vec![
                    (GroupElement::G1(req.encryption_key), 1),
                    (GroupElement::G1(base), 2),
                ],
            ),
        ],
    )
}

fn request_context(req: &CredentialRequest) -> Vec<u8> {
    let mut ctx = req.value.to_be_bytes().to_vec();
    ctx.extend_from_slice(&g1_to_bytes(&req.commitment));
    ctx.extend_from_slice(&g1_to_bytes(&req.encryption_key));
    ctx
}

pub fn prepare_request<R: RngCore + CryptoRng>(
    value: u64,
    serial: Scalar,
    rng: &mut R,
) -> (CredentialRequest, RequestSecrets) {
    let ctx = GroupContext::get();
    let bases = attribute_bases();
    let opening = random_scalar(rng);
    let commitment = ctx.g1 * opening + bases.value * Scalar::from(value) + bases.serial * serial;
    let base = credential_base(&commitment);

    let decryption_key = random_scalar(rng);
    let encryption_key = ctx.g1 * decryption_key;
    let k = random_scalar(rng);
    let ciphertext = Ciphertext {
        c1: ctx.g1 * k,
        c2: encryption_key * k + base * serial,
    };

    let mut req = CredentialRequest {
        value,
        commitment,
        encryption_key,
        ciphertext,
        proof: FiatShamirProof {
            label: String::new(),
            challenge: Scalar::zero(),
            responses: Vec::new(),
        },
    };
    req.proof =
        request_statement(&req, base).prove(&[opening, k, serial], &request_context(&req), rng);
    let secrets = RequestSecrets {
        decryption_key,
        serial,
        value,
        base,
    };
    (req, secrets)
}

impl CredentialRequest {
    pub fn base(&self) -> G1Projective {
        credential_base(&self.commitment)
    }

    pub fn verify(&self) -> bool {
        request_statement(self, self.base()).verify(&self.proof, &request_context(self))
    }

    pub fn id(&self) -> Digest32 {
        let bytes = serde_json::to_vec(self).expect("request serializes");
        Digest32::of(&[b"request", &bytes])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialCredential {
    pub index: u64,
    #[serde(with = "hex_g1")]
    pub a: G1Projective,
    #[serde(with = "hex_g1")]
    pub b: G1Projective,
}

/// Issues a blinded share. Deterministic in `(share, req)`.
pub fn blind_sign(
    share: &AuthorityKeyShare,
    req: &CredentialRequest,
) -> Result<PartialCredential, CredentialError> {
    if !req.verify() {
        return Err(CredentialError::InvalidRequest);
    }
    let h = req.base();
    let sk = &share.secret;
    Ok(PartialCredential {
        index: share.index,
        a: req.ciphertext.c1 * sk.y_serial,
        b: h * (sk.x + sk.y_value * Scalar::from(req.value)) + req.ciphertext.c2 * sk.y_serial,
    })
}

/// Credential `(h, σ)` on `(v, s)` together with the owner's attributes.
#[derive(Clone)]
pub struct Credential {
    pub(crate) h: G1Projective,
    pub(crate) sigma: G1Projective,
    pub(crate) value: u64,
    pub(crate) serial: Scalar,
}

impl std::fmt::Debug for Credential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Credential")
            .field("value", &self.value)
            .finish_non_exhaustive()
    }
}

pub(crate) fn signature_verifies(
    vk: &VerificationKey,
    h: &G1Projective,
    sigma: &G1Projective,
    value: Scalar,
    serial: Scalar,
) -> bool {
    if bool::from(h.is_identity()) {
        return false;
    }
    let key = vk.alpha + vk.beta_value * value + vk.beta_serial * serial;
    pairing(&G1Affine::from(h), &G2Affine::from(key))
        == pairing(&G1Affine::from(sigma), &G2Affine::from(GroupContext::get().g2))
}

impl Credential {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn serial(&self) -> Scalar {
        self.serial
    }

    pub fn verify(&self, vk: &AggregatedVerificationKey) -> bool {
        signature_verifies(
            &vk.key,
            &self.h,
            &self.sigma,
            Scalar::from(self.value),
            self.serial,
        )
    }

    /// Same signature scaled by a random factor; still valid under the same key.
    pub fn rerandomize<R: RngCore + CryptoRng>(&self, rng: &mut R) -> Self {
        let r = random_scalar(rng);
        Self {
            h: msm(&[self.h], &[r]),
            sigma: msm(&[self.sigma], &[r]),
            ..self.clone()
        }
    }
}

/// Lagrange-combines unblinded signature shares without any threshold or
/// validity check. Exposed so callers can observe what a below-threshold
/// coalition actually produces.
pub fn combine_signature_shares(
    shares: &[(u64, G1Projective)],
) -> Result<G1Projective, CredentialError> {
    if shares.is_empty() {
        return Err(CredentialError::BelowThreshold { needed: 1, got: 0 });
    }
    let indices: Vec<u64> = shares.iter().map(|(i, _)| *i).collect();
    let lambdas = lagrange_at_zero(&indices)?;
    Ok(shares.iter().zip(&lambdas).map(|((_, s), l)| s * l).sum())
}

impl RequestSecrets {
    /// Attaches a combined signature without checking it.
    pub fn assemble(&self, sigma: G1Projective) -> Credential {
        Credential {
            h: self.base,
            sigma,
            value: self.value,
            serial: self.serial,
        }
    }
}

/// Removes the ElGamal blinding from one partial credential.
pub fn unblind(partial: &PartialCredential, secrets: &RequestSecrets) -> G1Projective {
    partial.b - partial.a * secrets.decryption_key
}

pub fn unblind_and_aggregate(
    partials: &[PartialCredential],
    secrets: &RequestSecrets,
    vk: &AggregatedVerificationKey,
) -> Result<Credential, CredentialError> {
    if let Some(p) = partials
        .iter()
        .find(|p| p.index == 0 || p.index > vk.authorities)
    {
        return Err(CredentialError::IndexOutOfRange(p.index));
    }
    for (k, p) in partials.iter().enumerate() {
        if partials[..k].iter().any(|q| q.index == p.index) {
            return Err(CredentialError::DuplicateIndex(p.index));
        }
    }
    if (partials.len() as u64) < vk.threshold {
        return Err(CredentialError::BelowThreshold {
            needed: vk.threshold,
            got: partials.len() as u64,
        });
    }
    let shares: Vec<(u64, G1Projective)> = partials
        .iter()
        .map(|p| (p.index, unblind(p, secrets)))
        .collect();
    let credential = secrets.assemble(combine_signature_shares(&shares)?);
    if !credential.verify(vk) {
        return Err(CredentialError::Integrity);
    }
    Ok(credential)
}
