//! The auction contract: per-instance state, transaction payloads, the
//! client-side procedures that build transactions, and the checkers that
//! validate them against chain state.
//!
//! Checking is pure ([`check`] returns an [`Effect`]); mutation happens
//! only in [`apply`], driven by the ledger's block application.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::credentials::{AggregatedVerificationKey, CredentialRequest, VerificationKeyBytes};
use crate::crypto::{Address, Digest32, G1Bytes, Signature};

mod checker;
pub mod payload;
pub mod policy;
pub mod procedures;

pub use checker::{apply, check, effective_outcome, resolve, resolve_due, Effect};
pub(crate) use checker::compute_outcome;
pub use payload::*;
pub use policy::{AcceptAll, Hooks, SettlementPolicy, VickreyRefund, WorkAcceptance};

/// Default denomination set in base units.
pub const DEFAULT_DENOMINATIONS: [u64; 7] = [1, 2, 5, 10, 20, 50, 100];

/// Stable rejection reason codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RejectCode {
    Deadline,
    BadProof,
    UnknownZeta,
    DoubleSpend,
    BadDenomination,
    InsufficientFunds,
    NotWorker,
    AlreadyResolved,
    Malformed,
    UnknownContract,
    UnknownAuction,
    BadParams,
    Duplicate,
    NotWinner,
    BadSignature,
    NotClaimable,
}

impl RejectCode {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectCode::Deadline => "DEADLINE",
            RejectCode::BadProof => "BAD_PROOF",
            RejectCode::UnknownZeta => "UNKNOWN_ZETA",
            RejectCode::DoubleSpend => "DOUBLE_SPEND",
            RejectCode::BadDenomination => "BAD_DENOMINATION",
            RejectCode::InsufficientFunds => "INSUFFICIENT_FUNDS",
            RejectCode::NotWorker => "NOT_WORKER",
            RejectCode::AlreadyResolved => "ALREADY_RESOLVED",
            RejectCode::Malformed => "MALFORMED",
            RejectCode::UnknownContract => "UNKNOWN_CONTRACT",
            RejectCode::UnknownAuction => "UNKNOWN_AUCTION",
            RejectCode::BadParams => "BAD_PARAMS",
            RejectCode::Duplicate => "DUPLICATE",
            RejectCode::NotWinner => "NOT_WINNER",
            RejectCode::BadSignature => "BAD_SIGNATURE",
            RejectCode::NotClaimable => "NOT_CLAIMABLE",
        }
    }
}

impl fmt::Display for RejectCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub code: RejectCode,
    pub detail: String,
}

impl Rejection {
    pub fn new(code: RejectCode, detail: impl Into<String>) -> Self {
        Self {
            code,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl std::error::Error for Rejection {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum AuctionOutcome {
    Pending,
    Failed,
    Won { tag: G1Bytes, price: u64, bid: u64 },
}

impl AuctionOutcome {
    pub fn is_pending(&self) -> bool {
        matches!(self, AuctionOutcome::Pending)
    }
}

/// Digest of the encrypted replica plus the winner's signature over
/// `(auction, digest)` under a key chosen for this submission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileCommitment {
    pub digest: Digest32,
    pub signer: Address,
    pub signature: Signature,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuctionState {
    pub id: Digest32,
    pub worker: Address,
    /// Pedersen commitment to the reserve, kept undecoded until opened.
    pub min_price: G1Bytes,
    pub t_commit: u64,
    pub t_reveal: u64,
    pub policy: String,
    pub advertisement: String,
    /// ζ → height of the block that recorded the commit.
    pub committed: BTreeMap<G1Bytes, u64>,
    /// ζ → revealed value.
    pub revealed: BTreeMap<G1Bytes, u64>,
    pub opened_min_price: Option<u64>,
    pub outcome: AuctionOutcome,
    pub work: Option<FileCommitment>,
    /// ζ → amount paid out by Withdraw.
    pub payouts: BTreeMap<G1Bytes, u64>,
    pub worker_paid: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PendingRequest {
    pub value: u64,
    pub depositor: Address,
    pub request: CredentialRequest,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContractInstance {
    pub id: Digest32,
    pub authorities: Vec<AuthorityPublic>,
    pub n: u64,
    pub t: u64,
    pub denominations: Vec<u64>,
    pub vk_bytes: VerificationKeyBytes,
    #[serde(skip)]
    pub vk: AggregatedVerificationKey,
    /// ζ values already withdrawn, across every auction of the instance.
    pub spent: BTreeSet<G1Bytes>,
    /// Credential tags already bound to a bid; one bid per credential.
    pub bound_serials: BTreeSet<G1Bytes>,
    pub auctions: BTreeMap<Digest32, AuctionState>,
    pub requests: BTreeMap<Digest32, PendingRequest>,
    pub deposited: u64,
    pub paid_out: u64,
}
