//! Procedure and checker timings plus transaction sizes per operation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use super::fixture::World;
use crate::contract::procedures::{self, AuctionTerms};
use crate::contract::{check, Hooks};
use crate::ledger::Transaction;

pub const MIN_ITERATIONS: usize = 100;
pub const DEFAULT_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BenchOp {
    Create,
    Commit,
    Reveal,
    Withdraw,
    SubmitWork,
}

impl BenchOp {
    pub const ALL: [BenchOp; 5] = [
        BenchOp::Create,
        BenchOp::Commit,
        BenchOp::Reveal,
        BenchOp::Withdraw,
        BenchOp::SubmitWork,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchOp::Create => "create",
            BenchOp::Commit => "commit",
            BenchOp::Reveal => "reveal",
            BenchOp::Withdraw => "withdraw",
            BenchOp::SubmitWork => "submit_work",
        }
    }
}

impl fmt::Display for BenchOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("unknown operation {0:?} (expected one of create, commit, reveal, withdraw, submit_work)")]
pub struct UnknownOp(String);

impl FromStr for BenchOp {
    type Err = UnknownOp;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        BenchOp::ALL
            .into_iter()
            .find(|op| op.name().replace('_', "") == key)
            .ok_or_else(|| UnknownOp(s.to_string()))
    }
}

/// Parses a comma-separated list such as `commit,reveal`.
pub fn parse_ops(list: &str) -> Result<Vec<BenchOp>, UnknownOp> {
    let mut ops: Vec<BenchOp> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    ops.sort_unstable();
    ops.dedup();
    Ok(ops)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Procedure,
    Checker,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Procedure => "procedure",
            Role::Checker => "checker",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub op: BenchOp,
    pub role: Role,
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub samples: usize,
    pub size_bytes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub iterations: usize,
    pub rows: Vec<BenchRow>,
}

impl BenchmarkReport {
    pub fn row(&self, op: BenchOp, role: Role) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.op == op && r.role == role)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<12} {:<10} {:>12} {:>12} {:>8} {:>10}\n",
            "operation", "role", "mean [ms]", "stddev [ms]", "samples", "size [B]"
        );
        for r in &self.rows {
            out += &format!(
                "{:<12} {:<10} {:>12.4} {:>12.4} {:>8} {:>10}\n",
                r.op.name(),
                r.role.to_string(),
                r.mean_ms,
                r.stddev_ms,
                r.samples,
                r.size_bytes
            );
        }
        out += &format!("iterations per row: {}\n", self.iterations);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("operation,role,mean_ms,stddev_ms,samples,size_bytes\n");
        for r in &self.rows {
            out += &format!(
                "{},{},{:.6},{:.6},{},{}\n",
                r.op, r.role, r.mean_ms, r.stddev_ms, r.samples, r.size_bytes
            );
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("iterations: need at least {MIN_ITERATIONS}, got {0}")]
    TooFewIterations(usize),
}

/// Ledger snapshots at the point where each operation is valid.
#[derive(Clone)]
pub struct BenchFixture {
    before_commit: World,
    reveal_phase: World,
    after_reveal: World,
    hooks: Hooks,
}

const T_COMMIT: u64 = 3;
const T_REVEAL: u64 = 5;

impl BenchFixture {
    /// Three holders bidding 5, 3 and 2 against reserve 1; holder 0 wins.
    pub fn new(seed: u64) -> Self {
        let mut world = World::new(seed, &[5, 3, 2], 1, T_COMMIT, T_REVEAL);
        let before_commit = world.clone();
        let commits: Vec<_> = (0..3).map(|i| world.commit_tx(i)).collect();
        world.block(commits);
        world.advance_to(T_COMMIT);
        let reveal_phase = world.clone();
        let mut txs: Vec<_> = (0..3).map(|i| world.reveal_tx(i)).collect();
        txs.push(world.open_tx());
        world.block(txs);
        world.advance_to(T_REVEAL + 1);
        Self {
            before_commit,
            reveal_phase,
            after_reveal: world,
            hooks: Hooks::default(),
        }
    }

    fn world(&mut self, op: BenchOp) -> &mut World {
        match op {
            BenchOp::Create | BenchOp::Commit => &mut self.before_commit,
            BenchOp::Reveal => &mut self.reveal_phase,
            BenchOp::Withdraw | BenchOp::SubmitWork => &mut self.after_reveal,
        }
    }

    /// Runs the client-side procedure for `op` once.
    pub fn procedure(&mut self, op: BenchOp) -> Transaction {
        let w = self.world(op);
        match op {
            BenchOp::Create => {
                let terms = AuctionTerms {
                    reserve: 2,
                    t_commit: T_COMMIT,
                    t_reveal: T_REVEAL,
                    advertisement: "replicate 1 GiB for 30 days".to_string(),
                };
                procedures::create(w.contract, w.worker.address(), &w.committee.vk, &terms, &mut w.rng).0
            }
            BenchOp::Commit => w.commit_tx(0),
            BenchOp::Reveal => w.reveal_tx(0),
            BenchOp::Withdraw => w.withdraw_tx(0).0,
            BenchOp::SubmitWork => w.submit_work_tx(0),
        }
    }

    /// Runs the contract checker on `tx` against the snapshot for `op`.
    /// Returns whether the checker accepted.
    pub fn checker(&self, op: BenchOp, tx: &Transaction) -> bool {
        let state = match op {
            BenchOp::Create | BenchOp::Commit => self.before_commit.ledger.state(),
            BenchOp::Reveal => self.reveal_phase.ledger.state(),
            BenchOp::Withdraw | BenchOp::SubmitWork => self.after_reveal.ledger.state(),
        };
        check(tx, state, &self.hooks).is_ok()
    }
}

fn stats(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = if samples.len() > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Times `iterations` procedure calls and `iterations` checker calls per
/// operation. Every checker call must accept; a rejection panics since the
/// timing would be meaningless.
pub fn run_benchmark(ops: &[BenchOp], iterations: usize) -> Result<BenchmarkReport, BenchError> {
    if iterations < MIN_ITERATIONS {
        return Err(BenchError::TooFewIterations(iterations));
    }
    let mut fixture = BenchFixture::new(0x5ea1);
    let mut rows = Vec::new();
    for &op in ops {
        // interleaved so both roles see the same machine load
        let mut sizes = Vec::with_capacity(iterations);
        let mut proc_ms = Vec::with_capacity(iterations);
        let mut check_ms = Vec::with_capacity(iterations);
        for _ in 0..iterations {
            let start = Instant::now();
            let tx = fixture.procedure(op);
            proc_ms.push(ms_since(start));
            let start = Instant::now();
            let ok = fixture.checker(op, &tx);
            check_ms.push(ms_since(start));
            assert!(ok, "{op} checker rejected an honest transaction");
            sizes.push(tx.size());
        }
        let size_bytes = sizes.into_iter().max().unwrap_or(0);
        for (role, samples) in [(Role::Procedure, proc_ms), (Role::Checker, check_ms)] {
            let (mean_ms, stddev_ms) = stats(&samples);
            rows.push(BenchRow {
                op,
                role,
                mean_ms,
                stddev_ms,
                samples: samples.len(),
                size_bytes,
            });
        }
    }
    Ok(BenchmarkReport { iterations, rows })
}
