//! Line-delimited trace records. Field order is fixed by declaration order.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Transaction, TxKind};
use crate::contract::{AuctionOutcome, RejectCode, Rejection};
use crate::crypto::{Address, Digest32};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxStatus {
    Applied,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenesisRecord {
    pub curve: String,
    pub accounts: BTreeMap<Address, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TxRecord {
    pub height: u64,
    pub kind: TxKind,
    pub sender: Option<Address>,
    pub result: TxStatus,
    pub reason: Option<RejectCode>,
    pub detail: Option<String>,
    pub payload_digest: Digest32,
    pub size: usize,
    pub tx: Transaction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolveRecord {
    pub height: u64,
    pub contract: Digest32,
    pub auction: Digest32,
    pub outcome: AuctionOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub height: u64,
    pub txs: usize,
    pub state_digest: Digest32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalRecord {
    pub height: u64,
    pub state_digest: Digest32,
}

/// One trace line. Serialized with a leading `"type"` field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceRecord {
    Genesis(GenesisRecord),
    Tx(TxRecord),
    Resolve(ResolveRecord),
    Block(BlockRecord),
    Final(FinalRecord),
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum RecordType {
    Genesis,
    Tx,
    Resolve,
    Block,
    Final,
}

#[derive(Deserialize)]
struct Tag {
    #[serde(rename = "type")]
    kind: RecordType,
}

impl TraceRecord {
    pub(crate) fn tx(height: u64, tx: &Transaction, result: &Result<(), Rejection>) -> Self {
        let (status, reason, detail) = match result {
            Ok(()) => (TxStatus::Applied, None, None),
            Err(r) => (TxStatus::Rejected, Some(r.code), Some(r.detail.clone())),
        };
        TraceRecord::Tx(TxRecord {
            height,
            kind: tx.kind,
            sender: tx.sender,
            result: status,
            reason,
            detail,
            payload_digest: tx.payload_digest(),
            size: tx.size(),
            tx: tx.clone(),
        })
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("trace record serializes")
    }

    /// Parses one line. The tag is read first so that transaction payloads
    /// are deserialized straight from the input and keep their exact bytes.
    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        let tag: Tag = serde_json::from_str(line)?;
        Ok(match tag.kind {
            RecordType::Genesis => TraceRecord::Genesis(serde_json::from_str(line)?),
            RecordType::Tx => TraceRecord::Tx(serde_json::from_str(line)?),
            RecordType::Resolve => TraceRecord::Resolve(serde_json::from_str(line)?),
            RecordType::Block => TraceRecord::Block(serde_json::from_str(line)?),
            RecordType::Final => TraceRecord::Final(serde_json::from_str(line)?),
        })
    }
}

pub fn write_trace<W: Write>(records: &[TraceRecord], mut out: W) -> io::Result<()> {
    for r in records {
        out.write_all(r.to_line().as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum TraceReadError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn read_trace<R: BufRead>(input: R) -> Result<Vec<TraceRecord>, TraceReadError> {
    let mut records = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = TraceRecord::from_line(&line)
            .map_err(|source| TraceReadError::Parse { line: i + 1, source })?;
        records.push(record);
    }
    Ok(records)
}
