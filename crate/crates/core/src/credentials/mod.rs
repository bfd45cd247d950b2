//! Threshold-issued, blindly-signed, re-randomizable credentials over a
//! public value `v` and a private serial number `s`.
//!
//! Signing keys come from a dealer ceremony ([`key_ceremony`]); any `t` of
//! the `n` authorities issue partial credentials that the holder unblinds
//! and interpolates at zero.

use thiserror::Error;

pub mod issuance;
pub mod keys;
pub mod show;

pub use issuance::{
    blind_sign, combine_signature_shares, prepare_request, unblind, unblind_and_aggregate,
    Ciphertext, Credential, CredentialRequest, PartialCredential, RequestSecrets,
};
pub use keys::{
    aggregate_verification_key, key_ceremony, lagrange_at_zero, AggregatedVerificationKey,
    AuthorityKeyShare, VerificationKey, VerificationKeyBytes,
};
pub use show::{
    serial_base, show, show_scoped, verify_show, verify_show_scoped, zeta_base, zeta_tag,
    Disclosed, ShowProof, ShowScope,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CredentialError {
    #[error("invalid ceremony parameters n={n}, t={t} (need 0 < t <= n)")]
    Parameters { n: u64, t: u64 },
    #[error("duplicate authority index {0}")]
    DuplicateIndex(u64),
    #[error("authority index {0} out of range")]
    IndexOutOfRange(u64),
    #[error("need at least {needed} partial credentials, got {got}")]
    BelowThreshold { needed: u64, got: u64 },
    #[error("credential request proof does not verify")]
    InvalidRequest,
    #[error("aggregated credential does not verify")]
    Integrity,
}
