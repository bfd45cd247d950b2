//! Simulated append-only chain: a block-height clock, coin accounts, the
//! contract buffer, and an ordered mempool applied one block at a time.

use std::collections::BTreeMap;
use std::fmt;

use rand_core::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::contract::{self, ContractInstance, Hooks, Rejection};
use crate::crypto::{Address, Digest32, Signature, SigningKey, CURVE_ID};

pub mod trace;

pub use trace::{
    read_trace, write_trace, BlockRecord, FinalRecord, GenesisRecord, ResolveRecord, TraceRecord,
    TraceReadError, TxRecord, TxStatus,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxKind {
    Setup,
    Create,
    Deposit,
    Commit,
    Reveal,
    OpenMinPrice,
    Withdraw,
    SubmitWork,
    ClaimPayment,
}

impl TxKind {
    pub const ALL: [TxKind; 9] = [
        TxKind::Setup,
        TxKind::Create,
        TxKind::Deposit,
        TxKind::Commit,
        TxKind::Reveal,
        TxKind::OpenMinPrice,
        TxKind::Withdraw,
        TxKind::SubmitWork,
        TxKind::ClaimPayment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TxKind::Setup => "setup",
            TxKind::Create => "create",
            TxKind::Deposit => "deposit",
            TxKind::Commit => "commit",
            TxKind::Reveal => "reveal",
            TxKind::OpenMinPrice => "open_min_price",
            TxKind::Withdraw => "withdraw",
            TxKind::SubmitWork => "submit_work",
            TxKind::ClaimPayment => "claim_payment",
        }
    }

    /// Kinds whose sender must sign the transaction.
    pub fn requires_signature(self) -> bool {
        matches!(
            self,
            TxKind::Deposit | TxKind::OpenMinPrice | TxKind::ClaimPayment
        )
    }
}

impl fmt::Display for TxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A ledger transaction. The payload is canonical compact JSON embedded
/// verbatim, so the encoding of a parsed transaction is byte-identical to
/// the one that was signed and measured.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Transaction {
    pub kind: TxKind,
    pub sender: Option<Address>,
    pub payload: Box<RawValue>,
    pub signature: Option<Signature>,
}

impl PartialEq for Transaction {
    fn eq(&self, other: &Self) -> bool {
        self.encode() == other.encode()
    }
}

impl Eq for Transaction {}

fn signing_message(kind: TxKind, sender: &Address, payload: &str) -> Vec<u8> {
    Digest32::of(&[b"tx", kind.name().as_bytes(), sender.0.as_bytes(), payload.as_bytes()])
        .0
        .to_vec()
}

impl Transaction {
    /// Unsigned, senderless transaction.
    pub fn anonymous<P: Serialize>(kind: TxKind, payload: &P) -> Self {
        Self {
            kind,
            sender: None,
            payload: to_raw(payload),
            signature: None,
        }
    }

    pub fn signed<P: Serialize, R: RngCore + CryptoRng>(
        kind: TxKind,
        payload: &P,
        key: &SigningKey,
        rng: &mut R,
    ) -> Self {
        let payload = to_raw(payload);
        let sender = key.address();
        let signature = key.sign(&signing_message(kind, &sender, payload.get()), rng);
        Self {
            kind,
            sender: Some(sender),
            payload,
            signature: Some(signature),
        }
    }

    /// Checks the sender's signature over kind, sender and payload.
    pub fn signature_valid(&self) -> bool {
        match (&self.sender, &self.signature) {
            (Some(sender), Some(sig)) => {
                sender.verify(&signing_message(self.kind, sender, self.payload.get()), sig)
            }
            _ => false,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("transaction serializes")
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    /// Length of the canonical encoding in bytes.
    pub fn size(&self) -> usize {
        self.encode().len()
    }

    pub fn id(&self) -> Digest32 {
        Digest32::of(&[b"tx", &self.encode()])
    }

    pub fn payload_digest(&self) -> Digest32 {
        Digest32::of(&[b"payload", self.payload.get().as_bytes()])
    }

    pub fn parse_payload<'a, P: Deserialize<'a>>(&'a self) -> Result<P, serde_json::Error> {
        serde_json::from_str(self.payload.get())
    }
}

fn to_raw<P: Serialize>(payload: &P) -> Box<RawValue> {
    let json = serde_json::to_string(payload).expect("payload serializes");
    RawValue::from_string(json).expect("serializer emits valid JSON")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainState {
    pub height: u64,
    pub accounts: BTreeMap<Address, u64>,
    /// Coins held by the contract on behalf of depositors.
    pub buffer: u64,
    /// Total coins in existence, fixed at genesis.
    pub supply: u64,
    pub contracts: BTreeMap<Digest32, ContractInstance>,
    pub pending: Vec<Transaction>,
}

impl ChainState {
    pub fn genesis(accounts: BTreeMap<Address, u64>) -> Self {
        let supply = accounts.values().sum();
        Self {
            height: 0,
            accounts,
            buffer: 0,
            supply,
            contracts: BTreeMap::new(),
            pending: Vec::new(),
        }
    }

    pub fn balance_of(&self, addr: &Address) -> u64 {
        self.accounts.get(addr).copied().unwrap_or(0)
    }

    pub fn digest(&self) -> Digest32 {
        let bytes = serde_json::to_vec(self).expect("state serializes");
        Digest32::of(&[b"state", &bytes])
    }

    /// Sum of balances plus buffer; equals `supply` in every reachable state.
    pub fn circulating(&self) -> u64 {
        self.accounts.values().sum::<u64>() + self.buffer
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Receipt {
    pub tx_id: Digest32,
    pub kind: TxKind,
    pub height: u64,
    pub result: Result<(), Rejection>,
}

impl Receipt {
    pub fn applied(&self) -> bool {
        self.result.is_ok()
    }
}

/// Position of a submitted transaction in the mempool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Submitted {
    pub tx_id: Digest32,
    pub position: usize,
}

#[derive(Clone)]
pub struct Ledger {
    state: ChainState,
    hooks: Hooks,
    trace: Vec<TraceRecord>,
}

impl Ledger {
    pub fn new(accounts: BTreeMap<Address, u64>) -> Self {
        Self::with_hooks(accounts, Hooks::default())
    }

    pub fn with_hooks(accounts: BTreeMap<Address, u64>, hooks: Hooks) -> Self {
        let trace = vec![TraceRecord::Genesis(GenesisRecord {
            curve: CURVE_ID.to_string(),
            accounts: accounts.clone(),
        })];
        Self {
            state: ChainState::genesis(accounts),
            hooks,
            trace,
        }
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn hooks(&self) -> &Hooks {
        &self.hooks
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    pub fn current_height(&self) -> u64 {
        self.state.height
    }

    pub fn balance_of(&self, addr: &Address) -> u64 {
        self.state.balance_of(addr)
    }

    pub fn submit(&mut self, tx: Transaction) -> Submitted {
        let tx_id = tx.id();
        self.state.pending.push(tx);
        Submitted {
            tx_id,
            position: self.state.pending.len() - 1,
        }
    }

    /// Produces the block at the current height: resolves auctions whose
    /// reveal deadline has been reached, applies every pending transaction
    /// in submission order, then moves the clock forward by one.
    pub fn advance_block(&mut self) -> Vec<Receipt> {
        let height = self.state.height;
        for (contract, auction, outcome) in contract::resolve_due(&mut self.state, height) {
            self.trace.push(TraceRecord::Resolve(ResolveRecord {
                height,
                contract,
                auction,
                outcome,
            }));
        }

        let pending = std::mem::take(&mut self.state.pending);
        let mut receipts = Vec::with_capacity(pending.len());
        for tx in pending {
            let result = contract::check(&tx, &self.state, &self.hooks)
                .map(|effect| contract::apply(&mut self.state, effect));
            self.trace.push(TraceRecord::tx(height, &tx, &result));
            receipts.push(Receipt {
                tx_id: tx.id(),
                kind: tx.kind,
                height,
                result,
            });
        }

        self.state.height = height + 1;
        self.trace.push(TraceRecord::Block(BlockRecord {
            height,
            txs: receipts.len(),
            state_digest: self.state.digest(),
        }));
        receipts
    }

    /// Closes the trace with the digest of the current state.
    pub fn finish(&mut self) -> Digest32 {
        let digest = self.state.digest();
        self.trace.push(TraceRecord::Final(FinalRecord {
            height: self.state.height,
            state_digest: digest,
        }));
        digest
    }
}
