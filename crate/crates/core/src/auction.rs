//! Second-price sealed-bid resolution with a reserve.
//!
//! The winner is the highest bid at or above the reserve. Ties go to the
//! earliest commit height, then to the smallest tag in byte order. The
//! clearing price is `max(reserve, second-highest bid)`.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::G1Bytes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bid {
    pub tag: G1Bytes,
    pub value: u64,
    pub commit_height: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RevealedBidSet {
    pub bids: Vec<Bid>,
    pub reserve: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    NoWinner,
    Winner { tag: G1Bytes, price: u64, bid: u64 },
}

impl Outcome {
    pub fn winner(&self) -> Option<(G1Bytes, u64, u64)> {
        match *self {
            Outcome::NoWinner => None,
            Outcome::Winner { tag, price, bid } => Some((tag, price, bid)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AuctionError {
    #[error("tag {0} appears twice")]
    DuplicateTag(G1Bytes),
    #[error("bid values must be positive")]
    ZeroValue,
}

/// True when `a` beats `b` for first place.
fn outranks(a: &Bid, b: &Bid) -> bool {
    a.value
        .cmp(&b.value)
        .then_with(|| b.commit_height.cmp(&a.commit_height))
        .then_with(|| b.tag.cmp(&a.tag))
        == Ordering::Greater
}

pub fn resolve_vickrey(set: &RevealedBidSet) -> Result<Outcome, AuctionError> {
    let mut seen = BTreeSet::new();
    let mut best: Option<&Bid> = None;
    let mut runner_up = 0u64;
    for bid in &set.bids {
        if bid.value == 0 {
            return Err(AuctionError::ZeroValue);
        }
        if !seen.insert(bid.tag) {
            return Err(AuctionError::DuplicateTag(bid.tag));
        }
        match best {
            Some(b) if !outranks(bid, b) => runner_up = runner_up.max(bid.value),
            Some(b) => {
                runner_up = runner_up.max(b.value);
                best = Some(bid);
            }
            None => best = Some(bid),
        }
    }
    Ok(match best {
        Some(b) if b.value >= set.reserve => Outcome::Winner {
            tag: b.tag,
            price: runner_up.max(set.reserve),
            bid: b.value,
        },
        _ => Outcome::NoWinner,
    })
}

/// Reference implementation: sort everything, then read the answer off the
/// sorted list case by case. Shares no code with [`resolve_vickrey`].
pub fn vickrey_oracle(set: &RevealedBidSet) -> Result<Outcome, AuctionError> {
    if set.bids.iter().any(|b| b.value == 0) {
        return Err(AuctionError::ZeroValue);
    }
    let mut tags: Vec<G1Bytes> = set.bids.iter().map(|b| b.tag).collect();
    tags.sort();
    if let Some(w) = tags.windows(2).find(|w| w[0] == w[1]) {
        return Err(AuctionError::DuplicateTag(w[0]));
    }

    let mut sorted = set.bids.clone();
    sorted.sort_by(|a, b| {
        b.value
            .cmp(&a.value)
            .then(a.commit_height.cmp(&b.commit_height))
            .then(a.tag.cmp(&b.tag))
    });

    match sorted.as_slice() {
        [] => Ok(Outcome::NoWinner),
        [top, ..] if top.value < set.reserve => Ok(Outcome::NoWinner),
        [top] => Ok(Outcome::Winner {
            tag: top.tag,
            price: set.reserve,
            bid: top.value,
        }),
        [top, second, ..] => Ok(Outcome::Winner {
            tag: top.tag,
            price: if second.value > set.reserve {
                second.value
            } else {
                set.reserve
            },
            bid: top.value,
        }),
    }
}
