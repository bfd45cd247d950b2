//! Replays a recorded trace on a fresh ledger and checks that every record,
//! including state digests, comes out identical.

use thiserror::Error;

use super::invariants::{sweep_state, sweep_trace, Violation};
use crate::contract::Hooks;
use crate::crypto::{Digest32, CURVE_ID};
use crate::ledger::{Ledger, TraceRecord};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("trace is empty")]
    Empty,
    #[error("record 1: trace must start with a genesis record")]
    NoGenesis,
    #[error("record 1: unsupported curve {0:?}")]
    Curve(String),
    #[error("record {line}: {reason}")]
    Mismatch { line: usize, reason: String },
    #[error("trace ends at height {height} without a final record")]
    Truncated { height: u64 },
    #[error("invariant violated: {0}")]
    Invariant(Violation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSummary {
    pub blocks: u64,
    pub applied: usize,
    pub rejected: usize,
    pub final_digest: Digest32,
}

fn brief(record: &TraceRecord) -> String {
    let line = record.to_line();
    if line.len() > 160 {
        format!("{}...", &line[..160])
    } else {
        line
    }
}

pub fn verify_trace(records: &[TraceRecord]) -> Result<TraceSummary, VerifyError> {
    verify_trace_with_hooks(records, Hooks::default())
}

pub fn verify_trace_with_hooks(
    records: &[TraceRecord],
    hooks: Hooks,
) -> Result<TraceSummary, VerifyError> {
    let genesis = match records.first() {
        None => return Err(VerifyError::Empty),
        Some(TraceRecord::Genesis(g)) => g,
        Some(_) => return Err(VerifyError::NoGenesis),
    };
    if genesis.curve != CURVE_ID {
        return Err(VerifyError::Curve(genesis.curve.clone()));
    }
    let mut ledger = Ledger::with_hooks(genesis.accounts.clone(), hooks.clone());
    let mut i = 1;
    let mut applied = 0;
    let mut rejected = 0;
    loop {
        let Some(record) = records.get(i) else {
            return Err(VerifyError::Truncated {
                height: ledger.current_height(),
            });
        };
        if let TraceRecord::Final(_) = record {
            ledger.finish();
            let replayed = ledger.trace().last().expect("final pushed");
            if replayed != record {
                return Err(VerifyError::Mismatch {
                    line: i + 1,
                    reason: format!("final record differs, replay gives {}", brief(replayed)),
                });
            }
            if i + 1 != records.len() {
                return Err(VerifyError::Mismatch {
                    line: i + 2,
                    reason: "records after the final record".into(),
                });
            }
            break;
        }
        let Some(end) = records[i..]
            .iter()
            .position(|r| matches!(r, TraceRecord::Block(_) | TraceRecord::Final(_) | TraceRecord::Genesis(_)))
            .map(|p| i + p)
            .filter(|&e| matches!(records[e], TraceRecord::Block(_)))
        else {
            return Err(VerifyError::Truncated {
                height: ledger.current_height(),
            });
        };
        for r in &records[i..end] {
            if let TraceRecord::Tx(t) = r {
                ledger.submit(t.tx.clone());
            }
        }
        let before = ledger.trace().len();
        ledger.advance_block();
        let produced = &ledger.trace()[before..];
        let recorded = &records[i..=end];
        if let Some(k) = (0..produced.len().max(recorded.len()))
            .find(|&k| produced.get(k) != recorded.get(k))
        {
            let reason = match produced.get(k) {
                Some(p) => format!("replay gives {}", brief(p)),
                None => "replay produced no record here".to_string(),
            };
            return Err(VerifyError::Mismatch { line: i + k + 1, reason });
        }
        for r in produced {
            if let TraceRecord::Tx(t) = r {
                if t.reason.is_none() {
                    applied += 1;
                } else {
                    rejected += 1;
                }
            }
        }
        if let Some(v) = sweep_state(ledger.state(), &hooks).into_iter().next() {
            return Err(VerifyError::Invariant(v));
        }
        i = end + 1;
    }
    if let Some(v) = sweep_trace(ledger.trace(), ledger.state()).into_iter().next() {
        return Err(VerifyError::Invariant(v));
    }
    Ok(TraceSummary {
        blocks: ledger.current_height(),
        applied,
        rejected,
        final_digest: ledger.state().digest(),
    })
}
