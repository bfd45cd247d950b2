use std::collections::BTreeMap;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

use sealbid_core::contract::procedures::{self, AuctionTerms};
use sealbid_core::contract::{resolve, AuctionOutcome, RejectCode, DEFAULT_DENOMINATIONS};
use sealbid_core::crypto::codec::scalar_to_bytes;
use sealbid_core::crypto::{random_scalar, G1Bytes, SigningKey};
use sealbid_core::harness::{Committee, World};
use sealbid_core::ledger::{Ledger, Receipt, Transaction, TxKind};

const T_COMMIT: u64 = 4;
const T_REVEAL: u64 = 8;

fn codes(receipts: &[Receipt]) -> Vec<Option<RejectCode>> {
    receipts.iter().map(|r| r.result.as_ref().err().map(|e| e.code)).collect()
}

fn one(receipts: Vec<Receipt>) -> Option<RejectCode> {
    assert_eq!(receipts.len(), 1);
    codes(&receipts)[0]
}

fn payload(tx: &Transaction) -> Value {
    tx.parse_payload().unwrap()
}

/// Re-wraps an edited payload as an unsigned transaction of the same kind.
fn edited(tx: &Transaction, edit: impl FnOnce(&mut Value)) -> Transaction {
    let mut p = payload(tx);
    edit(&mut p);
    Transaction::anonymous(tx.kind, &p)
}

fn edited_signed(
    tx: &Transaction,
    key: &SigningKey,
    rng: &mut ChaCha20Rng,
    edit: impl FnOnce(&mut Value),
) -> Transaction {
    let mut p = payload(tx);
    edit(&mut p);
    Transaction::signed(tx.kind, &p, key, rng)
}

fn other_scalar_hex(seed: u64) -> Value {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Value::String(hex::encode(scalar_to_bytes(&random_scalar(&mut rng))))
}

/// Bids 5, 3, 2 against reserve 1, committed at height 1, revealed and
/// opened at `T_COMMIT`, returned at height `T_REVEAL`.
fn revealed_world() -> World {
    let mut w = World::new(1, &[5, 3, 2], 1, T_COMMIT, T_REVEAL);
    let commits: Vec<_> = (0..3).map(|i| w.commit_tx(i)).collect();
    assert!(w.block(commits).iter().all(Receipt::applied));
    w.advance_to(T_COMMIT);
    let mut txs: Vec<_> = (0..3).map(|i| w.reveal_tx(i)).collect();
    txs.push(w.open_tx());
    assert!(w.block(txs).iter().all(Receipt::applied));
    w.advance_to(T_REVEAL);
    w
}

fn zeta(w: &World, holder: usize) -> G1Bytes {
    w.holders[holder].zeta(&w.auction)
}

// setup

fn committee_ledger(seed: u64) -> (Committee, Ledger) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (Committee::new(3, 2, &mut rng).unwrap(), Ledger::new(BTreeMap::new()))
}

#[test]
fn setup_with_default_denominations() {
    let (c, mut ledger) = committee_ledger(1);
    let tx = procedures::setup(&c.shares, &c.vk, &DEFAULT_DENOMINATIONS);
    let id = tx.id();
    ledger.submit(tx);
    assert_eq!(one(ledger.advance_block()), None);
    let inst = &ledger.state().contracts[&id];
    assert_eq!((inst.n, inst.t), (3, 2));
    assert_eq!(inst.denominations, DEFAULT_DENOMINATIONS);
}

#[test]
fn setup_rejects_zero_threshold_and_bad_denominations() {
    let (c, mut ledger) = committee_ledger(2);
    let tx = procedures::setup(&c.shares, &c.vk, &DEFAULT_DENOMINATIONS);
    ledger.submit(edited(&tx, |p| p["t"] = 0.into()));
    ledger.submit(edited(&tx, |p| p["denominations"] = Value::Array(vec![])));
    ledger.submit(edited(&tx, |p| p["denominations"] = serde_json::json!([5, 2])));
    let got = codes(&ledger.advance_block());
    assert_eq!(got[0], Some(RejectCode::BadParams));
    assert_eq!(got[1], Some(RejectCode::BadDenomination));
    assert_eq!(got[2], Some(RejectCode::BadDenomination));
    assert!(ledger.state().contracts.is_empty());
}

#[test]
fn independent_instances_coexist() {
    let (a, mut ledger) = committee_ledger(3);
    let (b, _) = committee_ledger(4);
    let ta = procedures::setup(&a.shares, &a.vk, &DEFAULT_DENOMINATIONS);
    let tb = procedures::setup(&b.shares, &b.vk, &[1, 10]);
    ledger.submit(ta.clone());
    ledger.submit(tb.clone());
    assert_eq!(codes(&ledger.advance_block()), [None, None]);
    assert_ne!(ta.id(), tb.id());
    assert_eq!(ledger.state().contracts.len(), 2);
    // the same authorities cannot register their key twice
    ledger.submit(procedures::setup(&a.shares, &a.vk, &[1, 2]));
    assert_eq!(one(ledger.advance_block()), Some(RejectCode::Duplicate));
}

// create

fn create_at(height: u64, t_commit: u64, t_reveal: u64) -> Option<RejectCode> {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let c = Committee::new(3, 2, &mut rng).unwrap();
    let worker = SigningKey::generate(&mut rng);
    let mut ledger = Ledger::new(BTreeMap::new());
    let setup = procedures::setup(&c.shares, &c.vk, &DEFAULT_DENOMINATIONS);
    let contract = setup.id();
    ledger.submit(setup);
    while ledger.current_height() < height {
        ledger.advance_block();
    }
    let terms = AuctionTerms {
        reserve: 1,
        t_commit,
        t_reveal,
        advertisement: String::new(),
    };
    let (tx, _) = procedures::create(contract, worker.address(), &c.vk, &terms, &mut rng);
    ledger.submit(tx.clone());
    // at height 0 the setup shares the block
    let code = *codes(&ledger.advance_block()).last().unwrap();
    if code.is_none() {
        let a = &ledger.state().contracts[&contract].auctions[&tx.id()];
        assert_eq!(a.outcome, AuctionOutcome::Pending);
    }
    code
}

#[test]
fn create_windows() {
    assert_eq!(create_at(0, 10, 20), None);
    assert_eq!(create_at(0, 20, 10), Some(RejectCode::BadParams));
    assert_eq!(create_at(7, 5, 20), Some(RejectCode::Deadline));
}

#[test]
fn create_rejects_foreign_key_and_unknown_contract() {
    let mut w = World::new(6, &[5], 1, T_COMMIT, T_REVEAL);
    let mut rng = ChaCha20Rng::seed_from_u64(606);
    let stranger = Committee::new(3, 2, &mut rng).unwrap();
    let terms = AuctionTerms {
        reserve: 1,
        t_commit: T_COMMIT,
        t_reveal: T_REVEAL,
        advertisement: String::new(),
    };
    let (foreign, _) = procedures::create(w.contract, w.worker.address(), &stranger.vk, &terms, &mut rng);
    let (orphan, _) = procedures::create(
        sealbid_core::crypto::Digest32::of(&[b"nowhere"]),
        w.worker.address(),
        w.vk(),
        &terms,
        &mut rng,
    );
    let got = codes(&w.block([foreign, orphan]));
    assert_eq!(got, [Some(RejectCode::BadParams), Some(RejectCode::UnknownContract)]);
}

// deposit

#[test]
fn deposit_moves_coins_into_buffer() {
    let w = World::new(7, &[5], 1, T_COMMIT, T_REVEAL);
    // genesis gave the holder 10
    assert_eq!(w.ledger.balance_of(&w.holders[0].account.address()), 5);
    assert_eq!(w.ledger.state().buffer, 5);
    assert_eq!(w.instance().deposited, 5);
}

#[test]
fn deposit_rejections_move_nothing() {
    let mut w = World::new(8, &[5], 1, T_COMMIT, T_REVEAL);
    let key = w.holders[0].account.clone();
    let before = w.ledger.state().digest();
    let (not_denom, _) = procedures::deposit(w.contract, 3, &key, &mut w.rng);
    let (too_much, _) = procedures::deposit(w.contract, 10, &key, &mut w.rng);
    let (honest, _) = procedures::deposit(w.contract, 5, &key, &mut w.rng);
    let mut rng = w.rng.clone();
    let forged = edited_signed(&honest, &key, &mut rng, |p| {
        p["request"]["proof"]["responses"][0] = other_scalar_hex(1);
    });
    let relabelled = edited_signed(&honest, &key, &mut rng, |p| {
        p["value"] = 2.into();
        p["request"]["value"] = 2.into();
    });
    let unsigned = edited(&honest, |_| {});
    let got = codes(&w.block([not_denom, too_much, forged, relabelled, unsigned]));
    assert_eq!(
        got,
        [
            Some(RejectCode::BadDenomination),
            Some(RejectCode::InsufficientFunds),
            Some(RejectCode::BadProof),
            Some(RejectCode::BadProof),
            Some(RejectCode::BadSignature),
        ]
    );
    let after = w.ledger.state();
    assert_eq!(w.ledger.balance_of(&key.address()), 5);
    assert_eq!(after.buffer, 5);
    // only the height moved
    assert_eq!(after.contracts[&w.contract].requests.len(), 1);
    assert_ne!(after.digest(), before);
}

// commit

#[test]
fn commit_window_is_half_open() {
    let mut w = World::new(9, &[5, 3], 1, T_COMMIT, T_REVEAL);
    w.advance_to(T_COMMIT - 1);
    let tx = w.commit_tx(0);
    assert_eq!(one(w.block([tx])), None);
    assert_eq!(w.height(), T_COMMIT);
    let late = w.commit_tx(1);
    assert_eq!(one(w.block([late])), Some(RejectCode::Deadline));
}

#[test]
fn same_tag_commits_once() {
    let mut w = World::new(10, &[5], 1, T_COMMIT, T_REVEAL);
    let a = w.commit_tx(0);
    let b = w.commit_tx(0);
    assert_eq!(codes(&w.block([a.clone(), b])), [None, Some(RejectCode::Duplicate)]);
    assert_eq!(one(w.block([a])), Some(RejectCode::Duplicate));
    assert_eq!(w.auction_state().committed.len(), 1);
}

#[test]
fn commit_reveals_nothing_about_the_bid() {
    let mut w = World::new(11, &[2, 50], 1, T_COMMIT, T_REVEAL);
    let low = w.commit_tx(0);
    let high = w.commit_tx(1);
    assert_eq!(low.size(), high.size());
    fn leaves(v: &Value, out: &mut Vec<Value>) {
        match v {
            Value::Object(m) => m.values().for_each(|x| leaves(x, out)),
            Value::Array(a) => a.iter().for_each(|x| leaves(x, out)),
            leaf => out.push(leaf.clone()),
        }
    }
    for (tx, v) in [(&low, 2u64), (&high, 50u64)] {
        let mut all = Vec::new();
        leaves(&payload(tx), &mut all);
        let scalar = hex::encode(scalar_to_bytes(&v.into()));
        assert!(all.iter().all(|x| x != &Value::from(v) && x != &Value::from(v.to_string())));
        assert!(all.iter().all(|x| x.as_str() != Some(scalar.as_str())));
    }
    let committed = w.block([low, high]);
    assert!(committed.iter().all(Receipt::applied));
    assert!(w.auction_state().committed.values().all(|&h| h == 1));
}

#[test]
fn one_credential_backs_one_bid_per_contract() {
    let mut w = World::new(12, &[5], 1, T_COMMIT, T_REVEAL);
    let terms = AuctionTerms {
        reserve: 1,
        t_commit: T_COMMIT,
        t_reveal: T_REVEAL,
        advertisement: "second job".into(),
    };
    let (create, _) = procedures::create(w.contract, w.worker.address(), &w.committee.vk, &terms, &mut w.rng);
    let second = create.id();
    assert_eq!(one(w.block([create])), None);
    let first_bid = w.commit_tx(0);
    let cred = w.holders[0].credential.clone();
    let reuse = procedures::commit(w.contract, second, &cred, &w.committee.vk, &mut w.rng);
    assert_eq!(codes(&w.block([first_bid, reuse])), [None, Some(RejectCode::DoubleSpend)]);
}

// reveal

#[test]
fn reveal_rules() {
    let mut w = World::new(13, &[5, 3, 2], 1, T_COMMIT, T_REVEAL);
    let commits: Vec<_> = (0..2).map(|i| w.commit_tx(i)).collect();
    w.block(commits);
    let early = w.reveal_tx(0);
    assert_eq!(one(w.block([early])), Some(RejectCode::Deadline));
    w.advance_to(T_COMMIT);

    let honest = w.reveal_tx(0);
    let inflated = edited(&w.reveal_tx(1), |p| p["show"]["value"] = 5.into());
    let uncommitted = w.reveal_tx(2);
    let got = codes(&w.block([honest.clone(), inflated, uncommitted, honest]));
    assert_eq!(
        got,
        [
            None,
            Some(RejectCode::BadProof),
            Some(RejectCode::UnknownZeta),
            Some(RejectCode::Duplicate),
        ]
    );
    assert_eq!(w.auction_state().revealed.get(&zeta(&w, 0)), Some(&5));
    w.advance_to(T_REVEAL);
    let late = w.reveal_tx(1);
    assert_eq!(one(w.block([late])), Some(RejectCode::Deadline));
}

// open and resolve

#[test]
fn open_min_price_rules() {
    let mut w = World::new(14, &[5], 2, T_COMMIT, T_REVEAL);
    let early = w.open_tx();
    assert_eq!(one(w.block([early])), Some(RejectCode::Deadline));
    w.advance_to(T_COMMIT);
    let mut rng = w.rng.clone();
    let wrong_value = edited_signed(&w.open_tx(), &w.worker.clone(), &mut rng, |p| {
        p["value"] = 1.into();
    });
    let impostor = SigningKey::generate(&mut rng);
    let stolen = edited_signed(&w.open_tx(), &impostor, &mut rng, |_| {});
    let honest = w.open_tx();
    let got = codes(&w.block([wrong_value, stolen, honest.clone(), honest]));
    assert_eq!(
        got,
        [
            Some(RejectCode::BadProof),
            Some(RejectCode::NotWorker),
            None,
            Some(RejectCode::Duplicate),
        ]
    );
    assert_eq!(w.auction_state().opened_min_price, Some(2));
}

#[test]
fn resolution_follows_vickrey() {
    let mut w = revealed_world();
    let state = w.ledger.state();
    assert_eq!(
        resolve(state, &w.contract, &w.auction).unwrap(),
        AuctionOutcome::Won {
            tag: zeta(&w, 0),
            price: 3,
            bid: 5
        }
    );
    w.advance_to(T_REVEAL + 1);
    assert!(matches!(w.outcome(), AuctionOutcome::Won { price: 3, .. }));
    let again = resolve(w.ledger.state(), &w.contract, &w.auction).unwrap_err();
    assert_eq!(again.code, RejectCode::AlreadyResolved);
}

#[test]
fn early_resolution_is_a_deadline_error() {
    let w = World::new(15, &[5], 1, T_COMMIT, T_REVEAL);
    let err = resolve(w.ledger.state(), &w.contract, &w.auction).unwrap_err();
    assert_eq!(err.code, RejectCode::Deadline);
}

#[test]
fn bids_below_reserve_fail_the_auction() {
    let mut w = World::new(16, &[2, 1], 3, T_COMMIT, T_REVEAL);
    let commits: Vec<_> = (0..2).map(|i| w.commit_tx(i)).collect();
    w.block(commits);
    w.advance_to(T_COMMIT);
    let mut txs: Vec<_> = (0..2).map(|i| w.reveal_tx(i)).collect();
    txs.push(w.open_tx());
    w.block(txs);
    w.advance_to(T_REVEAL + 1);
    assert_eq!(w.outcome(), AuctionOutcome::Failed);
}

#[test]
fn silent_worker_fails_and_everyone_is_refunded() {
    let mut w = World::new(17, &[5, 3], 1, T_COMMIT, T_REVEAL);
    let commits: Vec<_> = (0..2).map(|i| w.commit_tx(i)).collect();
    w.block(commits);
    w.advance_to(T_COMMIT);
    let reveals: Vec<_> = (0..2).map(|i| w.reveal_tx(i)).collect();
    w.block(reveals);
    w.advance_to(T_REVEAL);
    let (a, ka) = w.withdraw_tx(0);
    let (b, kb) = w.withdraw_tx(1);
    assert_eq!(codes(&w.block([a, b])), [None, None]);
    assert_eq!(w.outcome(), AuctionOutcome::Failed);
    assert_eq!(w.ledger.balance_of(&ka.address()), 5);
    assert_eq!(w.ledger.balance_of(&kb.address()), 3);
    assert_eq!(w.ledger.state().buffer, 0);
}

// withdraw

#[test]
fn withdraw_pays_refunds_and_earmarks_price() {
    let mut w = revealed_world();
    let (loser, kl) = w.withdraw_tx(1);
    assert_eq!(one(w.block([loser])), None);
    assert_eq!(w.ledger.balance_of(&kl.address()), 3);
    assert_eq!(w.ledger.state().buffer, 7);
    let (winner, kw) = w.withdraw_tx(0);
    assert_eq!(one(w.block([winner])), None);
    assert_eq!(w.ledger.balance_of(&kw.address()), 2);
    // 3 earmarked for the worker, 2 still owed to the third bidder
    assert_eq!(w.ledger.state().buffer, 5);
}

#[test]
fn second_withdraw_is_a_double_spend() {
    let mut w = revealed_world();
    let (first, _) = w.withdraw_tx(2);
    assert_eq!(one(w.block([first])), None);
    let snapshot = serde_json::to_string(w.ledger.state()).unwrap();
    let (second, k2) = w.withdraw_tx(2);
    assert_eq!(w.ledger.state().height, T_REVEAL + 1);
    w.ledger.submit(second);
    let receipt = &w.ledger.advance_block()[0];
    assert_eq!(receipt.result.as_ref().unwrap_err().code, RejectCode::DoubleSpend);
    assert_eq!(w.ledger.balance_of(&k2.address()), 0);
    let mut after: Value = serde_json::to_value(w.ledger.state()).unwrap();
    after["height"] = (T_REVEAL + 1).into();
    assert_eq!(after, serde_json::from_str::<Value>(&snapshot).unwrap());
}

#[test]
fn withdraw_rules() {
    let mut w = World::new(18, &[5, 3], 1, T_COMMIT, T_REVEAL);
    let commits: Vec<_> = (0..2).map(|i| w.commit_tx(i)).collect();
    w.block(commits);
    w.advance_to(T_COMMIT);
    let mut txs = vec![w.reveal_tx(0), w.open_tx()];
    let (early, _) = w.withdraw_tx(0);
    txs.push(early);
    let got = codes(&w.block(txs));
    assert_eq!(got[2], Some(RejectCode::Deadline));
    w.advance_to(T_REVEAL);

    // holder 1 committed but never revealed
    let (dropout, kd) = w.withdraw_tx(1);
    let (honest, payout) = w.withdraw_tx(0);
    let mut rng = w.rng.clone();
    let thief = SigningKey::generate(&mut rng);
    let redirected = edited(&honest, |p| {
        p["addr"] = serde_json::to_value(thief.address()).unwrap();
    });
    let got = codes(&w.block([dropout, redirected, honest]));
    assert_eq!(
        got,
        [Some(RejectCode::UnknownZeta), Some(RejectCode::BadProof), None]
    );
    assert_eq!(w.ledger.balance_of(&kd.address()), 0);
    assert_eq!(w.ledger.balance_of(&thief.address()), 0);
    // sole bid pays the reserve
    assert_eq!(w.ledger.balance_of(&payout.address()), 4);
    // dropout's 3 plus the earmarked 1
    assert_eq!(w.ledger.state().buffer, 4);
}

// submit work and claim

#[test]
fn winner_submits_work_and_worker_claims() {
    let mut w = revealed_world();
    let claim_early = w.claim_tx();
    let loser_work = w.submit_work_tx(1);
    let work = w.submit_work_tx(0);
    let again = w.submit_work_tx(0);
    let got = codes(&w.block([claim_early, loser_work, work, again]));
    assert_eq!(
        got,
        [
            Some(RejectCode::NotClaimable),
            Some(RejectCode::NotWinner),
            None,
            Some(RejectCode::Duplicate),
        ]
    );
    assert!(w.auction_state().work.is_some());

    let mut rng = w.rng.clone();
    let impostor = SigningKey::generate(&mut rng);
    let stolen = edited_signed(&w.claim_tx(), &impostor, &mut rng, |_| {});
    let claim = w.claim_tx();
    let twice = w.claim_tx();
    let got = codes(&w.block([stolen, claim, twice]));
    assert_eq!(got, [Some(RejectCode::NotWorker), None, Some(RejectCode::AlreadyResolved)]);
    assert_eq!(w.ledger.balance_of(&w.worker.address()), 3);
}

#[test]
fn winner_withdraw_and_work_balance_the_budget() {
    let mut w = revealed_world();
    let supply = w.ledger.state().supply;
    let (a, ka) = w.withdraw_tx(0);
    let (b, kb) = w.withdraw_tx(1);
    let (c, kc) = w.withdraw_tx(2);
    let work = w.submit_work_tx(0);
    assert!(w.block([a, work, b, c]).iter().all(Receipt::applied));
    let claim = w.claim_tx();
    assert_eq!(one(w.block([claim])), None);
    let paid: Vec<u64> = [&ka, &kb, &kc, &w.worker]
        .iter()
        .map(|k| w.ledger.balance_of(&k.address()))
        .collect();
    assert_eq!(paid, [2, 3, 2, 3]);
    // deposits 10 = refunds 7 + worker 3
    assert_eq!(w.ledger.state().buffer, 0);
    assert_eq!(w.ledger.state().circulating(), supply);
}

#[test]
fn submit_work_before_deadline_is_rejected() {
    let mut w = World::new(19, &[5], 1, T_COMMIT, T_REVEAL);
    let c = w.commit_tx(0);
    w.block([c]);
    w.advance_to(T_COMMIT);
    let r = w.reveal_tx(0);
    let o = w.open_tx();
    w.block([r, o]);
    let work = w.submit_work_tx(0);
    assert_eq!(one(w.block([work])), Some(RejectCode::Deadline));
}

#[test]
fn kinds_outside_the_signed_set_reject_signatures() {
    let mut w = World::new(20, &[5], 1, T_COMMIT, T_REVEAL);
    let commit = w.commit_tx(0);
    let key = w.holders[0].account.clone();
    let mut rng = w.rng.clone();
    let signed = edited_signed(&commit, &key, &mut rng, |_| {});
    assert_eq!(signed.kind, TxKind::Commit);
    assert_eq!(one(w.block([signed])), Some(RejectCode::Malformed));
}
