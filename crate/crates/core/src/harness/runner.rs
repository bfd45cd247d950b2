use std::collections::BTreeMap;
use std::fmt;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::fixture::Committee;
use super::invariants::{sweep_state, sweep_trace, Violation};
use super::scenario::{BidderPlan, Scenario, ScenarioError, WithdrawBehavior};
use crate::auction::{vickrey_oracle, Bid, Outcome, RevealedBidSet};
use crate::contract::procedures::{self, AuctionTerms};
use crate::contract::{effective_outcome, AuctionOutcome, DepositPayload, Hooks, RejectCode};
use crate::credentials::{zeta_tag, Credential, CredentialRequest, RequestSecrets};
use crate::crypto::{Digest32, G1Bytes, PedersenOpening, SigningKey};
use crate::ledger::{Ledger, TraceRecord, Transaction, TxKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Actor {
    Authorities,
    Worker,
    Bidder(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejected {
    pub height: u64,
    pub kind: TxKind,
    pub actor: String,
    pub code: RejectCode,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidderResult {
    pub name: String,
    pub bid: u64,
    pub deposited: bool,
    pub committed: bool,
    pub revealed: bool,
    pub won: bool,
    /// Coins received on payout addresses.
    pub payout: u64,
    /// Deposit neither refunded nor paid to the worker.
    pub locked: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub contract: Digest32,
    pub auction: Digest32,
    pub outcome: AuctionOutcome,
    pub bidders: Vec<BidderResult>,
    pub worker_paid: u64,
    pub buffer: u64,
    pub rejections: Vec<Rejected>,
    pub violations: Vec<Violation>,
    pub final_digest: Digest32,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn bidder(&self, name: &str) -> Option<&BidderResult> {
        self.bidders.iter().find(|b| b.name == name)
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.outcome {
            AuctionOutcome::Won { tag, price, bid } => {
                let winner = self.bidders.iter().find(|b| b.won).map_or("?", |b| &b.name);
                writeln!(f, "outcome: {winner} won with {bid}, pays {price} (tag {})", &tag.to_hex()[..16])?
            }
            AuctionOutcome::Failed => writeln!(f, "outcome: failed, no winner")?,
            AuctionOutcome::Pending => writeln!(f, "outcome: pending")?,
        }
        writeln!(
            f,
            "{:<12} {:>5} {:>9} {:>8} {:>7} {:>6}",
            "bidder", "bid", "committed", "revealed", "payout", "locked"
        )?;
        for b in &self.bidders {
            writeln!(
                f,
                "{:<12} {:>5} {:>9} {:>8} {:>7} {:>6}",
                b.name, b.bid, b.committed, b.revealed, b.payout, b.locked
            )?;
        }
        writeln!(f, "worker paid {}, buffer {}", self.worker_paid, self.buffer)?;
        for r in &self.rejections {
            writeln!(f, "rejected: {} by {} at height {}: {}", r.kind, r.actor, r.height, r.code)?;
        }
        for v in &self.violations {
            writeln!(f, "VIOLATION {v}")?;
        }
        write!(f, "final state digest {}", self.final_digest)
    }
}

pub struct ScenarioRun {
    pub ledger: Ledger,
    pub report: RunReport,
}

impl ScenarioRun {
    pub fn trace(&self) -> &[TraceRecord] {
        self.ledger.trace()
    }
}

struct Agent {
    plan: BidderPlan,
    account: SigningKey,
    request: Option<(Digest32, CredentialRequest, RequestSecrets)>,
    credential: Option<Credential>,
    payout_keys: Vec<SigningKey>,
    deposited: bool,
    committed: bool,
    revealed: Option<u64>,
}

fn pick_signers(online: &[u64], t: u64, rng: &mut ChaCha20Rng) -> Vec<u64> {
    let mut pool = online.to_vec();
    for i in (1..pool.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        pool.swap(i, j);
    }
    pool.truncate(t as usize);
    pool.sort_unstable();
    pool
}

pub fn run_scenario(scenario: &Scenario) -> Result<ScenarioRun, ScenarioError> {
    run_scenario_with_hooks(scenario, Hooks::default())
}

pub fn run_scenario_with_hooks(
    scenario: &Scenario,
    hooks: Hooks,
) -> Result<ScenarioRun, ScenarioError> {
    scenario.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(scenario.seed);
    let c = &scenario.ceremony;
    let committee = Committee::new(c.authorities, c.threshold, &mut rng)
        .map_err(|e| ScenarioError::Invalid {
            field: "ceremony".into(),
            reason: e.to_string(),
        })?;
    let online: Vec<u64> = (1..=c.authorities).filter(|i| !c.offline.contains(i)).collect();
    let worker = SigningKey::generate(&mut rng);
    let mut agents: Vec<Agent> = scenario
        .plans()
        .into_iter()
        .map(|plan| Agent {
            plan,
            account: SigningKey::generate(&mut rng),
            request: None,
            credential: None,
            payout_keys: Vec::new(),
            deposited: false,
            committed: false,
            revealed: None,
        })
        .collect();

    let mut genesis = BTreeMap::new();
    genesis.insert(worker.address(), scenario.worker.balance);
    for a in &agents {
        genesis.insert(a.account.address(), a.plan.balance);
    }
    let mut ledger = Ledger::with_hooks(genesis, hooks.clone());

    let setup = procedures::setup(&committee.shares, &committee.vk, &scenario.denominations);
    let contract = setup.id();
    let terms = AuctionTerms {
        reserve: scenario.worker.reserve,
        t_commit: scenario.t_commit,
        t_reveal: scenario.t_reveal,
        advertisement: scenario.worker.advertisement.clone(),
    };
    let (create, opening): (Transaction, PedersenOpening) =
        procedures::create(contract, worker.address(), &committee.vk, &terms, &mut rng);
    let auction = create.id();

    let mut violations = Vec::new();
    let mut rejections = Vec::new();
    let mut opened = false;

    for h in 0..=scenario.final_height() {
        let mut submitted: BTreeMap<Digest32, (Actor, TxKind)> = BTreeMap::new();
        let mut submit = |ledger: &mut Ledger, actor: Actor, tx: Transaction| {
            submitted.insert(tx.id(), (actor, tx.kind));
            ledger.submit(tx);
        };
        if h == 0 {
            submit(&mut ledger, Actor::Authorities, setup.clone());
            submit(&mut ledger, Actor::Worker, create.clone());
        }
        let observed = {
            let a = ledger.state().contracts.get(&contract).and_then(|c| c.auctions.get(&auction));
            a.map(|a| (effective_outcome(a, h), a.work.is_some()))
        };
        for (i, agent) in agents.iter_mut().enumerate() {
            let p = &agent.plan;
            if p.deposit_height == h {
                let (tx, secrets) = procedures::deposit(contract, p.bid, &agent.account, &mut rng);
                let request = tx.parse_payload::<DepositPayload>().expect("own payload").request;
                agent.request = Some((tx.id(), request, secrets));
                submit(&mut ledger, Actor::Bidder(i), tx);
            }
            let Some(cred) = agent.credential.clone() else { continue };
            if p.commit_height == h {
                let tx = procedures::commit(contract, auction, &cred, &committee.vk, &mut rng);
                submit(&mut ledger, Actor::Bidder(i), tx);
            }
            if p.reveal_height == Some(h) {
                let tx = procedures::reveal(contract, auction, &cred, &committee.vk, &mut rng);
                submit(&mut ledger, Actor::Bidder(i), tx);
            }
            if p.withdraw_height == h {
                let zeta = G1Bytes::from_point(&zeta_tag(&cred.serial(), &auction.0));
                let won = matches!(observed, Some((AuctionOutcome::Won { tag, .. }, _)) if tag == zeta);
                if won && p.submit_work {
                    let signer = SigningKey::generate(&mut rng);
                    let digest = Digest32::of(&[b"replica", p.name.as_bytes(), &auction.0]);
                    let tx = procedures::submit_work(
                        contract, auction, &cred, &committee.vk, digest, &signer, &mut rng,
                    );
                    submit(&mut ledger, Actor::Bidder(i), tx);
                }
                let attempts = match p.withdraw {
                    WithdrawBehavior::Never => 0,
                    WithdrawBehavior::Normal => 1,
                    WithdrawBehavior::DoubleSpend => 2,
                };
                for _ in 0..attempts {
                    let payout = SigningKey::generate(&mut rng);
                    let tx = procedures::withdraw(
                        contract, auction, &cred, &committee.vk, &payout, &mut rng,
                    );
                    agent.payout_keys.push(payout);
                    submit(&mut ledger, Actor::Bidder(i), tx);
                }
            }
        }
        if scenario.worker.opens && scenario.open_height() == h {
            let tx = procedures::open_min_price(
                contract,
                auction,
                scenario.worker.reserve,
                &opening,
                &worker,
                &mut rng,
            );
            submit(&mut ledger, Actor::Worker, tx);
        }
        if scenario.worker.claims && scenario.claim_height() == h {
            if let Some((AuctionOutcome::Won { .. }, true)) = observed {
                let tx = procedures::claim_payment(contract, auction, &worker, &mut rng);
                submit(&mut ledger, Actor::Worker, tx);
            }
        }

        for receipt in ledger.advance_block() {
            let (actor, kind) = submitted[&receipt.tx_id];
            match (&receipt.result, actor) {
                (Err(r), _) => rejections.push(Rejected {
                    height: h,
                    kind,
                    actor: match actor {
                        Actor::Authorities => "authorities".to_string(),
                        Actor::Worker => "worker".to_string(),
                        Actor::Bidder(i) => agents[i].plan.name.clone(),
                    },
                    code: r.code,
                }),
                (Ok(()), Actor::Bidder(i)) => {
                    let agent = &mut agents[i];
                    match kind {
                        TxKind::Deposit => agent.deposited = true,
                        TxKind::Commit => agent.committed = true,
                        TxKind::Reveal => agent.revealed = Some(h),
                        _ => {}
                    }
                }
                (Ok(()), Actor::Worker) if kind == TxKind::OpenMinPrice => opened = true,
                _ => {}
            }
        }

        // authorities answer requests recorded in this block
        for agent in agents.iter_mut().filter(|a| a.deposited && a.credential.is_none()) {
            let (_, request, secrets) = agent.request.as_ref().expect("deposit was built");
            let signers = pick_signers(&online, c.threshold, &mut rng);
            let credential = committee.issue(request, secrets, &signers).map_err(|e| {
                ScenarioError::Invalid {
                    field: format!("bidder {}", agent.plan.name),
                    reason: format!("issuance failed: {e}"),
                }
            })?;
            agent.credential = Some(credential);
        }

        for v in sweep_state(ledger.state(), &hooks) {
            violations.push(Violation {
                invariant: v.invariant,
                detail: format!("after block {h}: {}", v.detail),
            });
        }
    }

    let final_digest = ledger.finish();
    violations.extend(sweep_trace(ledger.trace(), ledger.state()));

    let state = ledger.state();
    let a = &state.contracts[&contract].auctions[&auction];
    let outcome = a.outcome;
    let worker_paid = a.worker_paid.unwrap_or(0);

    // Independent expectation: oracle over the reveals the runner saw land.
    let zetas: Vec<Option<G1Bytes>> = agents
        .iter()
        .map(|ag| {
            ag.credential
                .as_ref()
                .map(|c| G1Bytes::from_point(&zeta_tag(&c.serial(), &auction.0)))
        })
        .collect();
    let expected = if opened {
        let bids = agents
            .iter()
            .zip(&zetas)
            .filter(|(ag, _)| ag.revealed.is_some())
            .map(|(ag, z)| Bid {
                tag: z.expect("revealed bidders hold credentials"),
                value: ag.plan.bid,
                commit_height: a.committed[&z.unwrap()],
            })
            .collect();
        vickrey_oracle(&RevealedBidSet {
            bids,
            reserve: scenario.worker.reserve,
        })
        .expect("distinct tags")
    } else {
        Outcome::NoWinner
    };
    let expected_outcome = match expected {
        Outcome::NoWinner => AuctionOutcome::Failed,
        Outcome::Winner { tag, price, bid } => AuctionOutcome::Won { tag, price, bid },
    };
    if expected_outcome != outcome {
        violations.push(Violation {
            invariant: "expected-outcome",
            detail: format!("recorded {outcome:?}, oracle {expected_outcome:?}"),
        });
    }

    let mut bidders = Vec::new();
    for (ag, z) in agents.iter().zip(&zetas) {
        let payout: u64 = ag.payout_keys.iter().map(|k| state.balance_of(&k.address())).sum();
        let won = matches!(outcome, AuctionOutcome::Won { tag, .. } if Some(tag) == *z);
        let to_worker = match outcome {
            AuctionOutcome::Won { price, .. } if won && worker_paid > 0 => price,
            _ => 0,
        };
        let deposit = if ag.deposited { ag.plan.bid } else { 0 };
        let withdrew = ag.revealed.is_some() && ag.plan.withdraw != WithdrawBehavior::Never;
        let expected_payout = match (withdrew, outcome) {
            (false, _) => 0,
            (true, AuctionOutcome::Won { price, .. }) if won => ag.plan.bid - price,
            (true, _) => ag.plan.bid,
        };
        if payout != expected_payout {
            violations.push(Violation {
                invariant: "expected-outcome",
                detail: format!("{} received {payout}, expected {expected_payout}", ag.plan.name),
            });
        }
        bidders.push(BidderResult {
            name: ag.plan.name.clone(),
            bid: ag.plan.bid,
            deposited: ag.deposited,
            committed: ag.committed,
            revealed: ag.revealed.is_some(),
            won,
            payout,
            locked: deposit - payout - to_worker,
        });
    }
    let locked: u64 = bidders.iter().map(|b| b.locked).sum();
    let deposits: u64 = bidders.iter().filter(|b| b.deposited).map(|b| b.bid).sum();
    let refunds: u64 = bidders.iter().map(|b| b.payout).sum();
    if deposits != refunds + worker_paid + locked || locked != state.buffer {
        violations.push(Violation {
            invariant: "budget-balance",
            detail: format!(
                "deposits {deposits} vs refunds {refunds} + worker {worker_paid} + locked {locked} (buffer {})",
                state.buffer
            ),
        });
    }

    let report = RunReport {
        contract,
        auction,
        outcome,
        bidders,
        worker_paid,
        buffer: state.buffer,
        rejections,
        violations,
        final_digest,
    };
    Ok(ScenarioRun { ledger, report })
}
