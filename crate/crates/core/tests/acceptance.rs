//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs with a custom harness so every line is printed even when an
//! earlier criterion fails. A trailing argument filters criteria by number
//! or by a substring of the name.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::Value;

use sealbid_core::auction::{resolve_vickrey, vickrey_oracle, Bid, Outcome, RevealedBidSet};
use sealbid_core::contract::procedures::{self, AuctionTerms};
use sealbid_core::contract::{check, AuctionOutcome, Hooks, RejectCode};
use sealbid_core::credentials::{
    combine_signature_shares, prepare_request, show, unblind, unblind_and_aggregate, verify_show,
    CredentialError,
};
use sealbid_core::crypto::{random_scalar, G1Bytes, SigningKey};
use sealbid_core::harness::{
    run_benchmark, run_scenario, sweep_state, sweep_trace, verify_trace, BenchFixture, BenchOp,
    Committee, Role, Scenario, World,
};
use sealbid_core::ledger::{read_trace, write_trace, Receipt, Transaction, TxKind};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn code(r: &Receipt) -> Option<RejectCode> {
    r.result.as_ref().err().map(|e| e.code)
}

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

// 1. threshold issuance

fn subsets(n: u64, k: usize) -> Vec<Vec<u64>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (1..=n).filter(|i| m & (1 << (i - 1)) != 0).collect())
        .collect()
}

fn threshold() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let (mut full, mut short) = (0, 0);
    for n in 1..=5u64 {
        for t in 1..=n {
            let c = Committee::new(n, t, &mut rng).map_err(|e| e.to_string())?;
            let (req, secrets) = prepare_request(5, random_scalar(&mut rng), &mut rng);
            let all = c.partials(&req, &(1..=n).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
            let pick = |ids: &[u64]| -> Vec<_> {
                all.iter().filter(|p| ids.contains(&p.index)).copied().collect()
            };
            for ids in subsets(n, t as usize) {
                let cred = unblind_and_aggregate(&pick(&ids), &secrets, &c.vk)
                    .map_err(|e| format!("n={n} t={t} signers {ids:?}: {e}"))?;
                ensure(cred.verify(&c.vk), || format!("n={n} t={t} {ids:?}: bad signature"))?;
                let proof = show(&cred, b"threshold", &c.vk, true, &mut rng);
                ensure(verify_show(&c.vk, b"threshold", &proof).is_some(), || {
                    format!("n={n} t={t} {ids:?}: show rejected")
                })?;
                full += 1;
            }
            for ids in subsets(n, t as usize - 1) {
                let partials = pick(&ids);
                match unblind_and_aggregate(&partials, &secrets, &c.vk) {
                    Err(CredentialError::BelowThreshold { .. }) => {}
                    other => return Err(format!("n={n} t={t} {ids:?}: aggregated to {other:?}")),
                }
                let shares: Vec<_> = partials.iter().map(|p| (p.index, unblind(p, &secrets))).collect();
                if let Ok(sigma) = combine_signature_shares(&shares) {
                    let forged = secrets.assemble(sigma);
                    ensure(!forged.verify(&c.vk), || {
                        format!("n={n} t={t} {ids:?}: below-threshold signature verifies")
                    })?;
                    let proof = show(&forged, b"threshold", &c.vk, true, &mut rng);
                    ensure(verify_show(&c.vk, b"threshold", &proof).is_none(), || {
                        format!("n={n} t={t} {ids:?}: below-threshold show accepted")
                    })?;
                }
                short += 1;
            }
        }
    }
    Ok(format!("{full} quorum subsets verify, {short} short subsets fail"))
}

// 2. Vickrey resolution

/// Winner is the best bid at or above the reserve (value, then earlier
/// commit, then smaller tag); price is max(reserve, best other bid).
fn reference_outcome(set: &RevealedBidSet) -> Outcome {
    let key = |b: &Bid| (b.value, std::cmp::Reverse(b.commit_height), std::cmp::Reverse(b.tag));
    let Some(top) = set.bids.iter().filter(|b| b.value >= set.reserve).max_by_key(|b| key(b)) else {
        return Outcome::NoWinner;
    };
    let second = set.bids.iter().filter(|b| b.tag != top.tag).map(|b| b.value).max().unwrap_or(0);
    Outcome::Winner {
        tag: top.tag,
        price: second.max(set.reserve),
        bid: top.value,
    }
}

fn vickrey() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let (mut empty, mut reserve_only, mut won) = (0, 0, 0);
    for i in 0..10_000 {
        let n = if i % 10 == 0 { 0 } else { rng.gen_range(1..=20) };
        let mut tags = BTreeSet::new();
        while tags.len() < n {
            let mut b = [0u8; 48];
            rng.fill(&mut b[..]);
            tags.insert(G1Bytes(b));
        }
        let bids: Vec<Bid> = tags
            .into_iter()
            .map(|tag| Bid {
                tag,
                value: rng.gen_range(1..=100),
                commit_height: rng.gen_range(1..=4),
            })
            .collect();
        let top = bids.iter().map(|b| b.value).max().unwrap_or(0);
        let reserve = if i % 10 == 1 { rng.gen_range(top + 1..=101) } else { rng.gen_range(1..=100) };
        let mut set = RevealedBidSet { bids, reserve };
        set.bids.shuffle(&mut rng);
        let expected = reference_outcome(&set);
        let got = resolve_vickrey(&set).map_err(|e| e.to_string())?;
        let oracle = vickrey_oracle(&set).map_err(|e| e.to_string())?;
        ensure(got == expected && oracle == expected, || {
            format!("instance {i}: resolver {got:?}, oracle {oracle:?}, reference {expected:?} for {set:?}")
        })?;
        match (n, expected) {
            (0, _) => empty += 1,
            (_, Outcome::NoWinner) => reserve_only += 1,
            _ => won += 1,
        }
    }
    Ok(format!("10000 instances agree ({empty} empty, {reserve_only} without a bid at reserve, {won} won)"))
}

// 3. golden honest auction

fn golden_honest() -> Check {
    let run = run_scenario(&Scenario::demo()).map_err(|e| e.to_string())?;
    let r = &run.report;
    ensure(r.passed(), || format!("violations: {:?}", r.violations))?;
    ensure(matches!(r.outcome, AuctionOutcome::Won { price: 3, bid: 5, .. }), || {
        format!("outcome {:?}", r.outcome)
    })?;
    let payouts: Vec<(&str, u64, bool)> =
        r.bidders.iter().map(|b| (b.name.as_str(), b.payout, b.won)).collect();
    ensure(
        payouts == [("alice", 2, true), ("bob", 3, false), ("carol", 2, false)],
        || format!("payouts {payouts:?}"),
    )?;
    ensure(r.worker_paid == 3 && r.buffer == 0, || {
        format!("worker {} buffer {}", r.worker_paid, r.buffer)
    })?;
    let state = run.ledger.state();
    ensure(state.circulating() == state.supply, || "supply not conserved".into())?;
    ensure(r.rejections.is_empty(), || format!("rejections {:?}", r.rejections))?;
    Ok("winner bid 5 pays 3 and withdraws 2, losers refunded 3 and 2, worker paid 3".into())
}

// 4. no double withdrawal

fn double_spend() -> Check {
    const T_COMMIT: u64 = 3;
    const T_REVEAL: u64 = 5;
    let mut w = World::new(4, &[5, 3], 1, T_COMMIT, T_REVEAL);
    let commits: Vec<_> = (0..2).map(|i| w.commit_tx(i)).collect();
    ensure(w.block(commits).iter().all(Receipt::applied), || "commit failed".into())?;
    w.advance_to(T_COMMIT);
    let mut txs: Vec<_> = (0..2).map(|i| w.reveal_tx(i)).collect();
    txs.push(w.open_tx());
    ensure(w.block(txs).iter().all(Receipt::applied), || "reveal failed".into())?;
    w.advance_to(T_REVEAL);

    let expected = [2u64, 3];
    let zetas: Vec<G1Bytes> = (0..2).map(|i| w.holders[i].zeta(&w.auction)).collect();
    let mut pool: Vec<Transaction> = Vec::new();
    let mut owner: BTreeMap<_, usize> = BTreeMap::new();
    let mut payout_keys: Vec<Vec<SigningKey>> = vec![Vec::new(), Vec::new()];
    for holder in 0..2 {
        for _ in 0..3 {
            let (tx, key) = w.withdraw_tx(holder);
            owner.insert(tx.id(), holder);
            payout_keys[holder].push(key);
            pool.push(tx);
        }
    }
    pool.push(w.submit_work_tx(0));
    pool.push(w.claim_tx());
    pool.push(w.claim_tx());

    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut rejected = 0;
    for round in 0..1000 {
        let mut world = w.clone();
        let mut order = pool.clone();
        order.shuffle(&mut rng);
        let mut applied = [0usize; 2];
        let mut rest = order.as_slice();
        while !rest.is_empty() {
            let take = rng.gen_range(1..=rest.len());
            let (now, later) = rest.split_at(take);
            rest = later;
            for r in world.block(now.to_vec()) {
                match owner.get(&r.tx_id) {
                    Some(&h) if r.applied() => applied[h] += 1,
                    Some(_) => rejected += 1,
                    None => {}
                }
            }
            let v = sweep_state(world.ledger.state(), world.ledger.hooks());
            ensure(v.is_empty(), || format!("round {round}: {v:?}"))?;
        }
        ensure(applied == [1, 1], || format!("round {round}: applied withdrawals {applied:?}"))?;
        let a = world.auction_state();
        for h in 0..2 {
            ensure(a.payouts.get(&zetas[h]) == Some(&expected[h]), || {
                format!("round {round}: holder {h} recorded {:?}", a.payouts.get(&zetas[h]))
            })?;
            let received: u64 = payout_keys[h].iter().map(|k| world.ledger.balance_of(&k.address())).sum();
            ensure(received == expected[h], || format!("round {round}: holder {h} received {received}"))?;
        }
        let v = sweep_trace(world.ledger.trace(), world.ledger.state());
        ensure(v.is_empty(), || format!("round {round}: {v:?}"))?;
    }
    Ok(format!("1000 interleavings, each tag paid exactly once, {rejected} extra withdrawals rejected"))
}

// 5. deadlines

fn deadlines() -> Check {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut configs = Vec::new();
    for (seed, (tc, tr)) in [(3u64, 5u64), (4, 8), (6, 7)].into_iter().enumerate() {
        let mut w = World::new(50 + seed as u64, &[5, 3, 2], 1, tc, tr);
        let commits: Vec<_> = (0..3).map(|i| w.commit_tx(i)).collect();
        let reveals: Vec<_> = (0..3).map(|i| w.reveal_tx(i)).collect();
        configs.push((w, commits, reveals));
    }
    let (mut late_commits, mut stray_reveals, mut accepted) = (0, 0, 0);
    for round in 0..1000 {
        let (w, commits, reveals) = configs.choose(&mut rng).expect("configs");
        let (tc, tr) = (w.auction_state().t_commit, w.auction_state().t_reveal);
        let mut world = w.clone();
        let commit_at: Vec<u64> = (0..3).map(|_| rng.gen_range(1..=tr + 2)).collect();
        let reveal_at: Vec<u64> = (0..3).map(|_| rng.gen_range(1..=tr + 2)).collect();
        let mut committed = [false; 3];
        for h in world.height()..=tr + 2 {
            let mut txs = Vec::new();
            let mut expect = Vec::new();
            for i in 0..3 {
                if commit_at[i] == h {
                    txs.push(commits[i].clone());
                    expect.push((i, TxKind::Commit, h < tc));
                }
            }
            for i in 0..3 {
                if reveal_at[i] == h {
                    txs.push(reveals[i].clone());
                    expect.push((i, TxKind::Reveal, (tc..tr).contains(&h) && committed[i]));
                }
            }
            let receipts = world.block(txs);
            for ((i, kind, ok), r) in expect.into_iter().zip(&receipts) {
                let in_window = match kind {
                    TxKind::Commit => h < tc,
                    _ => (tc..tr).contains(&h),
                };
                ensure(r.applied() == ok, || {
                    format!("round {round}: {kind} of holder {i} at {h} (window {tc}..{tr}): {:?}", r.result)
                })?;
                if !in_window {
                    ensure(code(r) == Some(RejectCode::Deadline), || {
                        format!("round {round}: {kind} at {h} rejected with {:?}", code(r))
                    })?;
                    if kind == TxKind::Commit {
                        late_commits += 1;
                    } else {
                        stray_reveals += 1;
                    }
                }
                if ok {
                    accepted += 1;
                    if kind == TxKind::Commit {
                        committed[i] = true;
                    }
                }
            }
        }
        let v = sweep_trace(world.ledger.trace(), world.ledger.state());
        ensure(v.is_empty(), || format!("round {round}: {v:?}"))?;
    }
    Ok(format!(
        "1000 schedules: {late_commits} late commits and {stray_reveals} out-of-window reveals rejected, {accepted} in-window accepted"
    ))
}

// 6. golden dropout

fn golden_dropout() -> Check {
    let scenario = Scenario::load(&scenario_dir().join("dropout.scenario")).map_err(|e| e.to_string())?;
    let run = run_scenario(&scenario).map_err(|e| e.to_string())?;
    let r = &run.report;
    ensure(r.passed(), || format!("violations: {:?}", r.violations))?;
    let bob = r.bidder("bob").ok_or("no bob")?;
    ensure(!bob.revealed && bob.payout == 0 && bob.locked == 3, || format!("bob {bob:?}"))?;
    ensure(r.buffer == 3, || format!("buffer {}", r.buffer))?;
    ensure(
        r.rejections.iter().any(|x| x.actor == "bob" && x.kind == TxKind::Withdraw && x.code == RejectCode::UnknownZeta),
        || format!("rejections {:?}", r.rejections),
    )?;
    ensure(matches!(r.outcome, AuctionOutcome::Won { price: 2, bid: 5, .. }), || {
        format!("outcome {:?}", r.outcome)
    })?;

    // The locked deposit stays locked however long the bidder keeps trying.
    let mut w = World::new(6, &[5, 3], 1, 3, 5);
    let commits: Vec<_> = (0..2).map(|i| w.commit_tx(i)).collect();
    w.block(commits);
    w.advance_to(3);
    let reveal = w.reveal_tx(0);
    let open = w.open_tx();
    w.block([reveal, open]);
    let late = w.reveal_tx(1);
    w.advance_to(5);
    for h in 5..15 {
        let (tx, key) = w.withdraw_tx(1);
        let receipts = w.block([tx, late.clone()]);
        ensure(
            code(&receipts[0]) == Some(RejectCode::UnknownZeta) && code(&receipts[1]) == Some(RejectCode::Deadline),
            || format!("height {h}: {receipts:?}"),
        )?;
        ensure(w.ledger.balance_of(&key.address()) == 0, || format!("height {h}: payout"))?;
    }
    ensure(w.ledger.state().buffer == 3 + 5, || format!("buffer {}", w.ledger.state().buffer))?;
    Ok("unrevealed bid of 3 stays locked, its withdrawals rejected with UNKNOWN_ZETA".into())
}

// 7. forged reveals

fn show_of(tx: &Transaction) -> Value {
    let p: Value = tx.parse_payload().expect("payload");
    p["show"].clone()
}

fn string_leaves(v: &Value, path: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        Value::String(_) => out.push(path.clone()),
        Value::Object(m) => {
            for (k, x) in m {
                path.push(k.clone());
                string_leaves(x, path, out);
                path.pop();
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                path.push(i.to_string());
                string_leaves(x, path, out);
                path.pop();
            }
        }
        _ => {}
    }
}

fn at<'a>(v: &'a mut Value, path: &[String]) -> &'a mut Value {
    path.iter().fold(v, |v, k| match v {
        Value::Array(a) => &mut a[k.parse::<usize>().expect("index")],
        _ => &mut v[k.as_str()],
    })
}

fn forgeries() -> Check {
    const T_COMMIT: u64 = 3;
    let mut w = World::new(7, &[5, 3, 2], 1, T_COMMIT, 6);
    let terms = AuctionTerms {
        reserve: 1,
        t_commit: T_COMMIT,
        t_reveal: 6,
        advertisement: "second auction".into(),
    };
    let (create_b, _) = procedures::create(w.contract, w.worker.address(), &w.committee.vk, &terms, &mut w.rng);
    let auction_b = create_b.id();
    let mut txs: Vec<_> = (0..3).map(|i| w.commit_tx(i)).collect();
    txs.push(create_b);
    ensure(w.block(txs).iter().all(Receipt::applied), || "setup failed".into())?;
    w.advance_to(T_COMMIT);

    let honest: Vec<(usize, Transaction)> =
        (0..12).map(|k| (k % 3, w.reveal_tx(k % 3))).collect();
    let cross: Vec<Transaction> = (0..6)
        .map(|k| {
            let cred = w.holders[k % 3].credential.clone();
            procedures::reveal(w.contract, auction_b, &cred, &w.committee.vk, &mut w.rng)
        })
        .collect();
    let state = w.ledger.state().clone();
    let hooks = Hooks::default();
    for (_, tx) in &honest {
        check(tx, &state, &hooks).map_err(|e| format!("honest reveal rejected: {e}"))?;
    }
    let bids = [5u64, 3, 2];
    let a_hex = serde_json::to_value(w.auction).expect("digest");
    let b_hex = serde_json::to_value(auction_b).expect("digest");

    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut kinds = [0usize; 6];
    for round in 0..1000 {
        let (holder, base) = honest.choose(&mut rng).expect("pool");
        let (other_holder, other) = honest
            .iter()
            .filter(|(h, t)| t.id() != base.id() && (*h != *holder || rng.gen_bool(0.3)))
            .collect::<Vec<_>>()
            .choose(&mut rng)
            .copied()
            .expect("pool");
        let mut p: Value = base.parse_payload().expect("payload");
        let kind = rng.gen_range(0..6);
        match kind {
            0 => {
                let v = *[1u64, 2, 3, 5, 10, 20, 50, 100]
                    .iter()
                    .filter(|&&v| v != bids[*holder])
                    .collect::<Vec<_>>()
                    .choose(&mut rng)
                    .expect("values");
                p["show"]["value"] = (*v).into();
            }
            1 => {
                if other_holder == holder {
                    let third = (holder + 1) % 3;
                    p["show"]["zeta"] = show_of(&honest[third].1)["zeta"].clone();
                } else {
                    p["show"]["zeta"] = show_of(other)["zeta"].clone();
                }
            }
            2 => {
                let tx = cross.choose(&mut rng).expect("cross");
                p = tx.parse_payload().expect("payload");
                p["auction"] = a_hex.clone();
            }
            3 => p["auction"] = b_hex.clone(),
            4 => {
                let field = ["h", "sigma", "kappa", "nu", "proof"].choose(&mut rng).expect("field");
                p["show"][*field] = show_of(other)[*field].clone();
            }
            _ => {
                let mut leaves = Vec::new();
                string_leaves(&p["show"], &mut Vec::new(), &mut leaves);
                leaves.retain(|l| l.last().map_or(true, |k| k != "label"));
                let leaf = leaves.choose(&mut rng).expect("leaves");
                let slot = at(&mut p["show"], leaf);
                let mut chars: Vec<char> = slot.as_str().expect("string").chars().collect();
                let i = rng.gen_range(0..chars.len());
                let was = chars[i];
                chars[i] = *"0123456789abcdef"
                    .chars()
                    .filter(|&c| c != was)
                    .collect::<Vec<_>>()
                    .choose(&mut rng)
                    .expect("digits");
                *slot = Value::String(chars.into_iter().collect());
            }
        }
        let forged = Transaction::anonymous(TxKind::Reveal, &p);
        ensure(forged.id() != base.id(), || format!("round {round}: mutation {kind} was a no-op"))?;
        if let Ok(effect) = check(&forged, &state, &hooks) {
            return Err(format!("round {round}: mutation {kind} accepted: {effect:?}"));
        }
        kinds[kind] += 1;
    }
    Ok(format!(
        "1000 forged reveals rejected (value {}, tag swap {}, cross-auction {}+{}, component swap {}, bit flip {})",
        kinds[0], kinds[1], kinds[2], kinds[3], kinds[4], kinds[5]
    ))
}

// 8. benchmark shape

fn bench_shape() -> Check {
    let report = run_benchmark(&BenchOp::ALL, 100).map_err(|e| e.to_string())?;
    let mean = |op, role| report.row(op, role).map(|r| r.mean_ms).ok_or(format!("missing {op:?} {role:?}"));
    let create = mean(BenchOp::Create, Role::Checker)?;
    let commit = mean(BenchOp::Commit, Role::Checker)?;
    ensure(create * 100.0 < commit, || format!("create checker {create:.3} ms vs commit checker {commit:.3} ms"))?;
    let mut checkers = Vec::new();
    for op in [BenchOp::Commit, BenchOp::Reveal, BenchOp::Withdraw, BenchOp::SubmitWork] {
        let c = mean(op, Role::Checker)?;
        let p = mean(op, Role::Procedure)?;
        ensure(c > p, || format!("{op:?}: checker {c:.2} ms not above procedure {p:.2} ms"))?;
        checkers.push(c);
    }
    let (lo, hi) = checkers.iter().fold((f64::MAX, 0f64), |(lo, hi), &c| (lo.min(c), hi.max(c)));
    ensure(hi <= 3.0 * lo, || format!("checkers span {lo:.2}..{hi:.2} ms"))?;
    let summary: Vec<String> = report
        .rows
        .iter()
        .map(|r| format!("{} {} {:.2}", r.op, r.role, r.mean_ms))
        .collect();
    Ok(format!("100 iterations, ms: {}", summary.join(", ")))
}

// 9. transaction sizes

fn sizes() -> Check {
    let mut fixture = BenchFixture::new(9);
    let mut out = Vec::new();
    for op in BenchOp::ALL {
        let (lo, hi) = if op == BenchOp::Create { (512, 5 * 1024) } else { (1024, 10 * 1024) };
        let sizes: Vec<usize> = (0..20).map(|_| fixture.procedure(op).size()).collect();
        let (min, max) = (*sizes.iter().min().expect("sizes"), *sizes.iter().max().expect("sizes"));
        ensure(lo <= min && max <= hi, || format!("{op:?}: {min}..{max} bytes outside {lo}..{hi}"))?;
        out.push(format!("{} {max}", op.name()));
    }
    Ok(format!("bytes: {}", out.join(", ")))
}

// 10. trace replay

fn replay() -> Check {
    let mut scenarios = vec![("demo".to_string(), Scenario::demo())];
    let mut files: Vec<_> = std::fs::read_dir(scenario_dir())
        .map_err(|e| e.to_string())?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "scenario"))
        .collect();
    files.sort();
    for path in files {
        let s = Scenario::load(&path).map_err(|e| e.to_string())?;
        scenarios.push((path.file_stem().unwrap_or_default().to_string_lossy().into_owned(), s));
    }
    for (name, s) in &scenarios {
        let mut bytes = Vec::new();
        let mut again = Vec::new();
        let run = run_scenario(s).map_err(|e| e.to_string())?;
        let digest = run.ledger.state().digest();
        write_trace(run.trace(), &mut bytes).map_err(|e| e.to_string())?;
        let rerun = run_scenario(s).map_err(|e| e.to_string())?;
        write_trace(rerun.trace(), &mut again).map_err(|e| e.to_string())?;
        ensure(bytes == again, || format!("{name}: two runs wrote different traces"))?;
        let records = read_trace(bytes.as_slice()).map_err(|e| format!("{name}: {e}"))?;
        let summary = verify_trace(&records).map_err(|e| format!("{name}: {e}"))?;
        ensure(summary.final_digest == digest && digest == run.report.final_digest, || {
            format!("{name}: replay {} vs run {digest}", summary.final_digest)
        })?;
    }
    let names: Vec<&str> = scenarios.iter().map(|(n, _)| n.as_str()).collect();
    Ok(format!("replayed state digests match for {}", names.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("threshold issuance", threshold),
        ("second-price resolution", vickrey),
        ("honest auction", golden_honest),
        ("no double withdrawal", double_spend),
        ("commit and reveal deadlines", deadlines),
        ("unrevealed bid stays locked", golden_dropout),
        ("forged reveals rejected", forgeries),
        ("benchmark shape", bench_shape),
        ("transaction sizes", sizes),
        ("trace replay", replay),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let number = (i + 1).to_string();
        if !filters.is_empty() && !filters.iter().any(|f| *f == number || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {number:>2} {name}: {detail} [{secs:.1}s]"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {number:>2} {name}: {reason} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
