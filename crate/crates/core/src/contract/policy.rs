//! Pluggable settlement and work-acceptance rules.

use std::sync::Arc;

use super::{AuctionOutcome, AuctionState, FileCommitment};
use crate::crypto::G1Bytes;

/// How the buffer is split once an auction is resolved.
pub trait SettlementPolicy: Send + Sync {
    /// Name a Create transaction must quote to select this policy.
    fn name(&self) -> &str;

    /// Amount returned to the holder of `tag`, who revealed `value`.
    fn refund(&self, outcome: &AuctionOutcome, tag: &G1Bytes, value: u64) -> u64;

    /// Amount released to the worker once the work is accepted.
    fn worker_payment(&self, outcome: &AuctionOutcome) -> u64;
}

/// Losers and failed auctions refund in full; the winner gets `v - v'`
/// back and `v'` goes to the worker.
#[derive(Debug, Clone, Copy, Default)]
pub struct VickreyRefund;

impl SettlementPolicy for VickreyRefund {
    fn name(&self) -> &str {
        "vickrey"
    }

    fn refund(&self, outcome: &AuctionOutcome, tag: &G1Bytes, value: u64) -> u64 {
        match outcome {
            AuctionOutcome::Won { tag: w, price, .. } if w == tag => value - price,
            _ => value,
        }
    }

    fn worker_payment(&self, outcome: &AuctionOutcome) -> u64 {
        match outcome {
            AuctionOutcome::Won { price, .. } => *price,
            _ => 0,
        }
    }
}

/// Decides whether submitted work entitles the worker to payment. Real
/// storage proofs would plug in here.
pub trait WorkAcceptance: Send + Sync {
    fn accept(&self, auction: &AuctionState, work: &FileCommitment) -> bool;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptAll;

impl WorkAcceptance for AcceptAll {
    fn accept(&self, _: &AuctionState, _: &FileCommitment) -> bool {
        true
    }
}

#[derive(Clone)]
pub struct Hooks {
    pub settlement: Arc<dyn SettlementPolicy>,
    pub acceptance: Arc<dyn WorkAcceptance>,
}

impl Default for Hooks {
    fn default() -> Self {
        Self {
            settlement: Arc::new(VickreyRefund),
            acceptance: Arc::new(AcceptAll),
        }
    }
}

impl std::fmt::Debug for Hooks {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hooks")
            .field("settlement", &self.settlement.name())
            .finish_non_exhaustive()
    }
}
