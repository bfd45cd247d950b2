//! State and trace invariant sweep run after every block of a scenario and
//! again by `verify-trace`.

use std::collections::BTreeSet;
use std::fmt;

use serde::Deserialize;

use crate::contract::{compute_outcome, AuctionOutcome, Hooks};
use crate::crypto::{Digest32, G1Bytes};
use crate::ledger::{ChainState, TraceRecord, TxKind, TxStatus};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

fn violation(out: &mut Vec<Violation>, invariant: &'static str, detail: String) {
    out.push(Violation { invariant, detail });
}

/// Checks every structural invariant of `state`.
pub fn sweep_state(state: &ChainState, hooks: &Hooks) -> Vec<Violation> {
    let mut out = Vec::new();
    if state.circulating() != state.supply {
        violation(
            &mut out,
            "conservation",
            format!("accounts + buffer = {}, supply = {}", state.circulating(), state.supply),
        );
    }
    let held: u64 = state
        .contracts
        .values()
        .map(|c| c.deposited - c.paid_out)
        .sum();
    if held != state.buffer {
        violation(
            &mut out,
            "buffer",
            format!("buffer {} but contracts hold {held}", state.buffer),
        );
    }

    for (cid, c) in &state.contracts {
        let requested: u64 = c.requests.values().map(|r| r.value).sum();
        if requested != c.deposited {
            violation(
                &mut out,
                "deposits",
                format!("contract {cid}: requests total {requested}, deposited {}", c.deposited),
            );
        }
        let commits: usize = c.auctions.values().map(|a| a.committed.len()).sum();
        if commits != c.bound_serials.len() {
            violation(
                &mut out,
                "one-bid-per-credential",
                format!("contract {cid}: {commits} commits, {} bound credentials", c.bound_serials.len()),
            );
        }
        let mut paid_tags = BTreeSet::new();
        for (aid, a) in &c.auctions {
            if a.t_commit >= a.t_reveal {
                violation(&mut out, "timing", format!("auction {aid}: t_commit >= t_reveal"));
            }
            if let Some(z) = a.revealed.keys().find(|z| !a.committed.contains_key(z)) {
                violation(&mut out, "reveal-subset", format!("auction {aid}: {z} revealed uncommitted"));
            }
            if a.outcome.is_pending() {
                if state.height > a.t_reveal {
                    violation(&mut out, "resolution", format!("auction {aid} still pending"));
                }
            } else {
                if state.height <= a.t_reveal {
                    violation(&mut out, "resolution", format!("auction {aid} resolved early"));
                }
                let expected = compute_outcome(a);
                if expected != a.outcome {
                    violation(
                        &mut out,
                        "resolution",
                        format!("auction {aid}: recorded {:?}, recomputed {expected:?}", a.outcome),
                    );
                }
            }
            let mut total_out = 0u64;
            for (z, amount) in &a.payouts {
                let Some(&v) = a.revealed.get(z) else {
                    violation(&mut out, "spent-subset", format!("auction {aid}: paid unrevealed {z}"));
                    continue;
                };
                let due = hooks.settlement.refund(&a.outcome, z, v);
                if due != *amount {
                    violation(
                        &mut out,
                        "settlement",
                        format!("auction {aid}: {z} paid {amount}, policy says {due}"),
                    );
                }
                if !c.spent.contains(z) {
                    violation(&mut out, "spent-list", format!("auction {aid}: paid {z} not spent"));
                }
                total_out += amount;
                paid_tags.insert(*z);
            }
            if let Some(paid) = a.worker_paid {
                let due = hooks.settlement.worker_payment(&a.outcome);
                if paid != due || a.work.is_none() {
                    violation(
                        &mut out,
                        "settlement",
                        format!("auction {aid}: worker paid {paid}, due {due}"),
                    );
                }
                total_out += paid;
            }
            let revealed_total: u64 = a.revealed.values().sum();
            if total_out > revealed_total {
                violation(
                    &mut out,
                    "budget-balance",
                    format!("auction {aid}: paid {total_out} out of {revealed_total} revealed"),
                );
            }
            if let AuctionOutcome::Won { price, bid, .. } = a.outcome {
                if price > bid || Some(price) < a.opened_min_price {
                    violation(&mut out, "price-bound", format!("auction {aid}: price {price}"));
                }
            }
        }
        if let Some(z) = c.spent.iter().find(|z| !paid_tags.contains(*z)) {
            violation(&mut out, "spent-subset", format!("contract {cid}: {z} spent without payout"));
        }
    }
    out
}

#[derive(Deserialize)]
struct AuctionRef {
    contract: Digest32,
    auction: Digest32,
}

/// Checks that every applied auction transaction in the trace landed in its
/// window, using deadlines from `state`.
pub fn sweep_trace(records: &[TraceRecord], state: &ChainState) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut spent: BTreeSet<(Digest32, G1Bytes)> = BTreeSet::new();
    for record in records {
        let TraceRecord::Tx(r) = record else { continue };
        if r.result != TxStatus::Applied {
            continue;
        }
        if matches!(r.kind, TxKind::Setup | TxKind::Create | TxKind::Deposit) {
            continue;
        }
        let Ok(target) = r.tx.parse_payload::<AuctionRef>() else {
            violation(&mut out, "temporal", format!("unparseable applied {} at {}", r.kind, r.height));
            continue;
        };
        let Some(a) = state
            .contracts
            .get(&target.contract)
            .and_then(|c| c.auctions.get(&target.auction))
        else {
            violation(&mut out, "temporal", format!("applied {} for unknown auction", r.kind));
            continue;
        };
        let h = r.height;
        let ok = match r.kind {
            TxKind::Commit => h < a.t_commit,
            TxKind::Reveal | TxKind::OpenMinPrice => a.t_commit <= h && h < a.t_reveal,
            _ => h >= a.t_reveal,
        };
        if !ok {
            violation(
                &mut out,
                "temporal",
                format!("{} applied at height {h} (t_commit {}, t_reveal {})", r.kind, a.t_commit, a.t_reveal),
            );
        }
        if r.kind == TxKind::Withdraw {
            #[derive(Deserialize)]
            struct Show {
                zeta: G1Bytes,
            }
            #[derive(Deserialize)]
            struct W {
                contract: Digest32,
                show: Show,
            }
            if let Ok(w) = r.tx.parse_payload::<W>() {
                if !spent.insert((w.contract, w.show.zeta)) {
                    violation(&mut out, "double-spend", format!("{} paid twice", w.show.zeta));
                }
            }
        }
    }
    out
}
