use serde::de::DeserializeOwned;

use super::payload::*;
use super::{
    AuctionOutcome, AuctionState, ContractInstance, FileCommitment, Hooks, PendingRequest,
    RejectCode, Rejection,
};
use crate::auction::{resolve_vickrey, Bid, Outcome, RevealedBidSet};
use crate::credentials::{aggregate_verification_key, verify_show_scoped, ShowProof, ShowScope};
use crate::crypto::{verify_open, Address, Digest32, G1Bytes, PedersenCommitment, Scalar, CURVE_ID};
use crate::ledger::{ChainState, Transaction, TxKind};

/// The state change a valid transaction produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Effect {
    Setup(Box<ContractInstance>),
    Create {
        contract: Digest32,
        auction: Box<AuctionState>,
    },
    Deposit {
        contract: Digest32,
        request_id: Digest32,
        request: Box<PendingRequest>,
    },
    Commit {
        contract: Digest32,
        auction: Digest32,
        zeta: G1Bytes,
        serial_tag: G1Bytes,
        height: u64,
    },
    Reveal {
        contract: Digest32,
        auction: Digest32,
        zeta: G1Bytes,
        value: u64,
    },
    OpenMinPrice {
        contract: Digest32,
        auction: Digest32,
        value: u64,
    },
    Withdraw {
        contract: Digest32,
        auction: Digest32,
        zeta: G1Bytes,
        to: Address,
        amount: u64,
        outcome: AuctionOutcome,
    },
    SubmitWork {
        contract: Digest32,
        auction: Digest32,
        work: FileCommitment,
        outcome: AuctionOutcome,
    },
    ClaimPayment {
        contract: Digest32,
        auction: Digest32,
        to: Address,
        amount: u64,
    },
}

fn reject<T>(code: RejectCode, detail: impl Into<String>) -> Result<T, Rejection> {
    Err(Rejection::new(code, detail))
}

fn parse<P: DeserializeOwned>(tx: &Transaction) -> Result<P, Rejection> {
    tx.parse_payload()
        .map_err(|e| Rejection::new(RejectCode::Malformed, format!("{} payload: {e}", tx.kind)))
}

fn instance<'s>(state: &'s ChainState, id: &Digest32) -> Result<&'s ContractInstance, Rejection> {
    state
        .contracts
        .get(id)
        .ok_or_else(|| Rejection::new(RejectCode::UnknownContract, format!("no contract {id}")))
}

fn auction_of<'s>(
    contract: &'s ContractInstance,
    id: &Digest32,
) -> Result<&'s AuctionState, Rejection> {
    contract
        .auctions
        .get(id)
        .ok_or_else(|| Rejection::new(RejectCode::UnknownAuction, format!("no auction {id}")))
}

fn show_scope_binding(kind: &str, contract: &Digest32) -> Vec<u8> {
    show_binding(kind, &[&contract.0])
}

fn verify_presentation(
    contract: &ContractInstance,
    auction: &Digest32,
    show: &ShowProof,
    serial_scope: Option<&[u8]>,
    binding: &[u8],
) -> Result<(), Rejection> {
    let scope = ShowScope {
        auction_id: &auction.0,
        serial_scope,
        binding,
    };
    match verify_show_scoped(&contract.vk, &scope, show) {
        Some(_) => Ok(()),
        None => reject(RejectCode::BadProof, "credential presentation does not verify"),
    }
}

/// Outcome computed from revealed bids and the opened reserve. A worker
/// who never opened fails the auction.
pub(crate) fn compute_outcome(auction: &AuctionState) -> AuctionOutcome {
    let Some(reserve) = auction.opened_min_price else {
        return AuctionOutcome::Failed;
    };
    let set = RevealedBidSet {
        bids: auction
            .revealed
            .iter()
            .map(|(tag, &value)| Bid {
                tag: *tag,
                value,
                commit_height: auction.committed[tag],
            })
            .collect(),
        reserve,
    };
    match resolve_vickrey(&set).expect("revealed bids are distinct and positive") {
        Outcome::NoWinner => AuctionOutcome::Failed,
        Outcome::Winner { tag, price, bid } => AuctionOutcome::Won { tag, price, bid },
    }
}

/// The outcome a transaction at `height` observes: the recorded one, or
/// the resolution it would trigger once the reveal deadline has passed.
pub fn effective_outcome(auction: &AuctionState, height: u64) -> AuctionOutcome {
    if auction.outcome.is_pending() && height >= auction.t_reveal {
        compute_outcome(auction)
    } else {
        auction.outcome
    }
}

/// Resolves one auction at the state's current height without mutating it.
pub fn resolve(
    state: &ChainState,
    contract: &Digest32,
    auction: &Digest32,
) -> Result<AuctionOutcome, Rejection> {
    let a = auction_of(instance(state, contract)?, auction)?;
    if state.height < a.t_reveal {
        return reject(
            RejectCode::Deadline,
            format!("resolution opens at height {}", a.t_reveal),
        );
    }
    if !a.outcome.is_pending() {
        return reject(RejectCode::AlreadyResolved, "outcome already recorded");
    }
    Ok(compute_outcome(a))
}

/// Records the outcome of every pending auction whose reveal deadline is
/// at or below `height`.
pub fn resolve_due(
    state: &mut ChainState,
    height: u64,
) -> Vec<(Digest32, Digest32, AuctionOutcome)> {
    let mut resolved = Vec::new();
    for (cid, contract) in state.contracts.iter_mut() {
        for (aid, auction) in contract.auctions.iter_mut() {
            if auction.outcome.is_pending() && height >= auction.t_reveal {
                auction.outcome = compute_outcome(auction);
                resolved.push((*cid, *aid, auction.outcome));
            }
        }
    }
    resolved
}

/// Validates `tx` against `state`. Pure: the returned effect is applied
/// separately by [`apply`].
pub fn check(tx: &Transaction, state: &ChainState, hooks: &Hooks) -> Result<Effect, Rejection> {
    if tx.kind.requires_signature() {
        if !tx.signature_valid() {
            return reject(RejectCode::BadSignature, "sender signature missing or invalid");
        }
    } else if tx.sender.is_some() || tx.signature.is_some() {
        return reject(RejectCode::Malformed, format!("{} carries no sender", tx.kind));
    }
    let height = state.height;
    match tx.kind {
        TxKind::Setup => check_setup(tx, state),
        TxKind::Create => check_create(tx, state, hooks),
        TxKind::Deposit => check_deposit(tx, state),
        TxKind::Commit => check_commit(tx, state),
        TxKind::Reveal => check_reveal(tx, state),
        TxKind::OpenMinPrice => check_open(tx, state),
        TxKind::Withdraw => check_withdraw(tx, state, hooks),
        TxKind::SubmitWork => check_submit_work(tx, state, height),
        TxKind::ClaimPayment => check_claim(tx, state, hooks),
    }
}

fn check_setup(tx: &Transaction, state: &ChainState) -> Result<Effect, Rejection> {
    let p: SetupPayload = parse(tx)?;
    if p.curve != CURVE_ID {
        return reject(RejectCode::BadParams, format!("unsupported curve {}", p.curve));
    }
    if p.t == 0 || p.t > p.n {
        return reject(RejectCode::BadParams, format!("need 0 < t <= n, got n={} t={}", p.n, p.t));
    }
    if p.authorities.len() as u64 != p.n
        || p.authorities.iter().enumerate().any(|(i, a)| a.index != i as u64 + 1)
    {
        return reject(RejectCode::BadParams, "authorities must be listed as indices 1..=n");
    }
    if p.denominations.is_empty()
        || p.denominations[0] == 0
        || p.denominations.windows(2).any(|w| w[0] >= w[1])
    {
        return reject(
            RejectCode::BadDenomination,
            "denominations must be non-empty, positive and strictly increasing",
        );
    }
    let decode_err = |e| Rejection::new(RejectCode::Malformed, format!("key encoding: {e}"));
    let vk = p.vk.decode().map_err(decode_err)?;
    let shares = p
        .authorities
        .iter()
        .take(p.t as usize)
        .map(|a| Ok((a.index, a.key.decode().map_err(decode_err)?)))
        .collect::<Result<Vec<_>, Rejection>>()?;
    let joint = aggregate_verification_key(&shares, p.n, p.t)
        .map_err(|e| Rejection::new(RejectCode::BadParams, e.to_string()))?;
    if joint.key != vk {
        return reject(RejectCode::BadParams, "verification key does not interpolate from shares");
    }
    let id = tx.id();
    if state.contracts.contains_key(&id) {
        return reject(RejectCode::Duplicate, "contract already exists");
    }
    if state.contracts.values().any(|c| c.vk_bytes == p.vk) {
        return reject(RejectCode::Duplicate, "verification key already backs another contract");
    }
    Ok(Effect::Setup(Box::new(ContractInstance {
        id,
        authorities: p.authorities,
        n: p.n,
        t: p.t,
        denominations: p.denominations,
        vk_bytes: p.vk,
        vk: joint,
        spent: Default::default(),
        bound_serials: Default::default(),
        auctions: Default::default(),
        requests: Default::default(),
        deposited: 0,
        paid_out: 0,
    })))
}

fn check_create(tx: &Transaction, state: &ChainState, hooks: &Hooks) -> Result<Effect, Rejection> {
    let p: CreatePayload = parse(tx)?;
    let contract = instance(state, &p.contract)?;
    if p.trusted_vk != contract.vk_bytes {
        return reject(RejectCode::BadParams, "trusted key differs from the contract's");
    }
    if p.policy != hooks.settlement.name() {
        return reject(RejectCode::BadParams, format!("unknown policy {:?}", p.policy));
    }
    if p.t_commit >= p.t_reveal {
        return reject(
            RejectCode::BadParams,
            format!("t_commit {} must precede t_reveal {}", p.t_commit, p.t_reveal),
        );
    }
    if p.t_commit <= state.height {
        return reject(
            RejectCode::Deadline,
            format!("t_commit {} is not after height {}", p.t_commit, state.height),
        );
    }
    let id = tx.id();
    if contract.auctions.contains_key(&id) {
        return reject(RejectCode::Duplicate, "auction already exists");
    }
    Ok(Effect::Create {
        contract: p.contract,
        auction: Box::new(AuctionState {
            id,
            worker: p.worker,
            min_price: p.min_price,
            t_commit: p.t_commit,
            t_reveal: p.t_reveal,
            policy: p.policy,
            advertisement: p.advertisement,
            committed: Default::default(),
            revealed: Default::default(),
            opened_min_price: None,
            outcome: AuctionOutcome::Pending,
            work: None,
            payouts: Default::default(),
            worker_paid: None,
        }),
    })
}

fn check_deposit(tx: &Transaction, state: &ChainState) -> Result<Effect, Rejection> {
    let p: DepositPayload = parse(tx)?;
    let sender = tx.sender.expect("signed transactions carry a sender");
    let contract = instance(state, &p.contract)?;
    if !contract.denominations.contains(&p.value) {
        return reject(
            RejectCode::BadDenomination,
            format!("{} is not a denomination", p.value),
        );
    }
    if p.request.value != p.value {
        return reject(RejectCode::BadProof, "request value differs from deposit");
    }
    let balance = state.balance_of(&sender);
    if balance < p.value {
        return reject(
            RejectCode::InsufficientFunds,
            format!("balance {balance} below deposit {}", p.value),
        );
    }
    let request_id = p.request.id();
    if contract.requests.contains_key(&request_id) {
        return reject(RejectCode::Duplicate, "request already recorded");
    }
    if !p.request.verify() {
        return reject(RejectCode::BadProof, "request proof does not verify");
    }
    Ok(Effect::Deposit {
        contract: p.contract,
        request_id,
        request: Box::new(PendingRequest {
            value: p.value,
            depositor: sender,
            request: p.request,
        }),
    })
}

fn check_commit(tx: &Transaction, state: &ChainState) -> Result<Effect, Rejection> {
    let p: CommitPayload = parse(tx)?;
    let contract = instance(state, &p.contract)?;
    let auction = auction_of(contract, &p.auction)?;
    if state.height >= auction.t_commit {
        return reject(
            RejectCode::Deadline,
            format!("commit window closed at {}", auction.t_commit),
        );
    }
    if p.show.value.is_some() {
        return reject(RejectCode::Malformed, "a commit must not disclose its value");
    }
    let Some(serial_tag) = p.show.serial_tag.as_ref().map(G1Bytes::from_point) else {
        return reject(RejectCode::Malformed, "commit lacks the credential tag");
    };
    let zeta = G1Bytes::from_point(&p.show.zeta);
    if auction.committed.contains_key(&zeta) {
        return reject(RejectCode::Duplicate, "tag already committed");
    }
    if contract.bound_serials.contains(&serial_tag) {
        return reject(RejectCode::DoubleSpend, "credential already backs a bid");
    }
    verify_presentation(
        contract,
        &p.auction,
        &p.show,
        Some(&p.contract.0),
        &show_scope_binding("commit", &p.contract),
    )?;
    Ok(Effect::Commit {
        contract: p.contract,
        auction: p.auction,
        zeta,
        serial_tag,
        height: state.height,
    })
}

fn check_reveal(tx: &Transaction, state: &ChainState) -> Result<Effect, Rejection> {
    let p: RevealPayload = parse(tx)?;
    let contract = instance(state, &p.contract)?;
    let auction = auction_of(contract, &p.auction)?;
    if state.height < auction.t_commit || state.height >= auction.t_reveal {
        return reject(
            RejectCode::Deadline,
            format!("reveal window is [{}, {})", auction.t_commit, auction.t_reveal),
        );
    }
    let Some(value) = p.show.value else {
        return reject(RejectCode::Malformed, "a reveal must disclose its value");
    };
    if p.show.serial_tag.is_some() {
        return reject(RejectCode::Malformed, "unexpected credential tag");
    }
    let zeta = G1Bytes::from_point(&p.show.zeta);
    if !auction.committed.contains_key(&zeta) {
        return reject(RejectCode::UnknownZeta, "tag was never committed");
    }
    if auction.revealed.contains_key(&zeta) {
        return reject(RejectCode::Duplicate, "tag already revealed");
    }
    verify_presentation(
        contract,
        &p.auction,
        &p.show,
        None,
        &show_scope_binding("reveal", &p.contract),
    )?;
    Ok(Effect::Reveal {
        contract: p.contract,
        auction: p.auction,
        zeta,
        value,
    })
}

fn check_open(tx: &Transaction, state: &ChainState) -> Result<Effect, Rejection> {
    let p: OpenMinPricePayload = parse(tx)?;
    let contract = instance(state, &p.contract)?;
    let auction = auction_of(contract, &p.auction)?;
    if tx.sender != Some(auction.worker) {
        return reject(RejectCode::NotWorker, "only the worker opens the reserve");
    }
    if state.height < auction.t_commit || state.height >= auction.t_reveal {
        return reject(
            RejectCode::Deadline,
            format!("opening window is [{}, {})", auction.t_commit, auction.t_reveal),
        );
    }
    if auction.opened_min_price.is_some() {
        return reject(RejectCode::Duplicate, "reserve already opened");
    }
    let point = auction
        .min_price
        .decode()
        .map_err(|e| Rejection::new(RejectCode::Malformed, format!("commitment: {e}")))?;
    if !verify_open(&PedersenCommitment { point }, Scalar::from(p.value), p.blinding) {
        return reject(RejectCode::BadProof, "opening does not match the commitment");
    }
    Ok(Effect::OpenMinPrice {
        contract: p.contract,
        auction: p.auction,
        value: p.value,
    })
}

fn check_withdraw(tx: &Transaction, state: &ChainState, hooks: &Hooks) -> Result<Effect, Rejection> {
    let p: WithdrawPayload = parse(tx)?;
    let contract = instance(state, &p.contract)?;
    let auction = auction_of(contract, &p.auction)?;
    if state.height < auction.t_reveal {
        return reject(
            RejectCode::Deadline,
            format!("withdrawals open at {}", auction.t_reveal),
        );
    }
    if p.show.serial_tag.is_some() {
        return reject(RejectCode::Malformed, "unexpected credential tag");
    }
    let Some(disclosed) = p.show.value else {
        return reject(RejectCode::Malformed, "a withdrawal must disclose its value");
    };
    let zeta = G1Bytes::from_point(&p.show.zeta);
    let Some(&value) = auction.revealed.get(&zeta) else {
        let detail = if auction.committed.contains_key(&zeta) {
            "tag was committed but never revealed; funds stay locked"
        } else {
            "tag is unknown to this auction"
        };
        return reject(RejectCode::UnknownZeta, detail);
    };
    if contract.spent.contains(&zeta) {
        return reject(RejectCode::DoubleSpend, "tag already withdrawn");
    }
    if disclosed != value {
        return reject(RejectCode::BadProof, "disclosed value differs from the reveal");
    }
    verify_presentation(
        contract,
        &p.auction,
        &p.show,
        None,
        &withdraw_show_binding(&p.contract, &p.auction, &p.addr),
    )?;
    if !p.addr.verify(
        &withdraw_binding_message(&p.contract, &p.auction, &p.addr, &zeta),
        &p.binding,
    ) {
        return reject(RejectCode::BadSignature, "payout address did not sign the request");
    }
    let outcome = effective_outcome(auction, state.height);
    let amount = hooks.settlement.refund(&outcome, &zeta, value);
    if amount > state.buffer {
        return reject(RejectCode::InsufficientFunds, "buffer cannot cover the payout");
    }
    Ok(Effect::Withdraw {
        contract: p.contract,
        auction: p.auction,
        zeta,
        to: p.addr,
        amount,
        outcome,
    })
}

fn check_submit_work(tx: &Transaction, state: &ChainState, height: u64) -> Result<Effect, Rejection> {
    let p: SubmitWorkPayload = parse(tx)?;
    let contract = instance(state, &p.contract)?;
    let auction = auction_of(contract, &p.auction)?;
    if height < auction.t_reveal {
        return reject(
            RejectCode::Deadline,
            format!("work submission opens at {}", auction.t_reveal),
        );
    }
    if p.show.serial_tag.is_some() {
        return reject(RejectCode::Malformed, "unexpected credential tag");
    }
    let outcome = effective_outcome(auction, height);
    let zeta = G1Bytes::from_point(&p.show.zeta);
    match outcome {
        AuctionOutcome::Won { tag, .. } if tag == zeta => {}
        AuctionOutcome::Won { .. } => return reject(RejectCode::NotWinner, "tag did not win"),
        _ => return reject(RejectCode::NotWinner, "auction has no winner"),
    }
    if auction.work.is_some() {
        return reject(RejectCode::Duplicate, "work already submitted");
    }
    verify_presentation(
        contract,
        &p.auction,
        &p.show,
        None,
        &submit_work_show_binding(&p.contract, &p.file.digest, &p.file.signer),
    )?;
    if !p
        .file
        .signer
        .verify(&file_message(&p.auction, &p.file.digest), &p.file.signature)
    {
        return reject(RejectCode::BadSignature, "file commitment signature invalid");
    }
    Ok(Effect::SubmitWork {
        contract: p.contract,
        auction: p.auction,
        work: p.file,
        outcome,
    })
}

fn check_claim(tx: &Transaction, state: &ChainState, hooks: &Hooks) -> Result<Effect, Rejection> {
    let p: ClaimPaymentPayload = parse(tx)?;
    let contract = instance(state, &p.contract)?;
    let auction = auction_of(contract, &p.auction)?;
    if tx.sender != Some(auction.worker) {
        return reject(RejectCode::NotWorker, "only the worker claims payment");
    }
    if state.height < auction.t_reveal {
        return reject(
            RejectCode::Deadline,
            format!("claims open at {}", auction.t_reveal),
        );
    }
    if auction.worker_paid.is_some() {
        return reject(RejectCode::AlreadyResolved, "payment already released");
    }
    let outcome = effective_outcome(auction, state.height);
    if !matches!(outcome, AuctionOutcome::Won { .. }) {
        return reject(RejectCode::NotClaimable, "auction has no winner");
    }
    let Some(work) = &auction.work else {
        return reject(RejectCode::NotClaimable, "winner has not submitted work");
    };
    if !hooks.acceptance.accept(auction, work) {
        return reject(RejectCode::NotClaimable, "work not accepted");
    }
    let amount = hooks.settlement.worker_payment(&outcome);
    if amount > state.buffer {
        return reject(RejectCode::InsufficientFunds, "buffer cannot cover the payment");
    }
    Ok(Effect::ClaimPayment {
        contract: p.contract,
        auction: p.auction,
        to: auction.worker,
        amount,
    })
}

fn contract_mut<'s>(state: &'s mut ChainState, id: &Digest32) -> &'s mut ContractInstance {
    state.contracts.get_mut(id).expect("checked contract exists")
}

fn auction_mut<'s>(state: &'s mut ChainState, c: &Digest32, a: &Digest32) -> &'s mut AuctionState {
    contract_mut(state, c)
        .auctions
        .get_mut(a)
        .expect("checked auction exists")
}

fn pay(state: &mut ChainState, contract: &Digest32, to: Address, amount: u64) {
    state.buffer -= amount;
    *state.accounts.entry(to).or_insert(0) += amount;
    contract_mut(state, contract).paid_out += amount;
}

/// Applies an effect produced by [`check`] against the same state.
pub fn apply(state: &mut ChainState, effect: Effect) {
    match effect {
        Effect::Setup(instance) => {
            state.contracts.insert(instance.id, *instance);
        }
        Effect::Create { contract, auction } => {
            contract_mut(state, &contract)
                .auctions
                .insert(auction.id, *auction);
        }
        Effect::Deposit {
            contract,
            request_id,
            request,
        } => {
            let value = request.value;
            *state
                .accounts
                .get_mut(&request.depositor)
                .expect("checked balance") -= value;
            state.buffer += value;
            let c = contract_mut(state, &contract);
            c.deposited += value;
            c.requests.insert(request_id, *request);
        }
        Effect::Commit {
            contract,
            auction,
            zeta,
            serial_tag,
            height,
        } => {
            contract_mut(state, &contract).bound_serials.insert(serial_tag);
            auction_mut(state, &contract, &auction)
                .committed
                .insert(zeta, height);
        }
        Effect::Reveal {
            contract,
            auction,
            zeta,
            value,
        } => {
            auction_mut(state, &contract, &auction)
                .revealed
                .insert(zeta, value);
        }
        Effect::OpenMinPrice {
            contract,
            auction,
            value,
        } => {
            auction_mut(state, &contract, &auction).opened_min_price = Some(value);
        }
        Effect::Withdraw {
            contract,
            auction,
            zeta,
            to,
            amount,
            outcome,
        } => {
            pay(state, &contract, to, amount);
            contract_mut(state, &contract).spent.insert(zeta);
            let a = auction_mut(state, &contract, &auction);
            if a.outcome.is_pending() {
                a.outcome = outcome;
            }
            a.payouts.insert(zeta, amount);
        }
        Effect::SubmitWork {
            contract,
            auction,
            work,
            outcome,
        } => {
            let a = auction_mut(state, &contract, &auction);
            if a.outcome.is_pending() {
                a.outcome = outcome;
            }
            a.work = Some(work);
        }
        Effect::ClaimPayment {
            contract,
            auction,
            to,
            amount,
        } => {
            pay(state, &contract, to, amount);
            auction_mut(state, &contract, &auction).worker_paid = Some(amount);
        }
    }
}
