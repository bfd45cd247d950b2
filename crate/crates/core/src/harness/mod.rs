//! Scenario runner, invariant sweep, trace verification and benchmarks
//! over the ledger.

pub mod bench;
pub mod fixture;
pub mod invariants;
pub mod runner;
pub mod scenario;
pub mod verify;

pub use fixture::{Committee, Holder, World};
pub use invariants::{sweep_state, sweep_trace, Violation};
pub use runner::{run_scenario, run_scenario_with_hooks, BidderResult, Rejected, RunReport, ScenarioRun};
pub use scenario::{BidderPlan, BidderSpec, Ceremony, Scenario, ScenarioError, WithdrawBehavior, WorkerSpec};
pub use verify::{verify_trace, verify_trace_with_hooks, TraceSummary, VerifyError};
pub use bench::{parse_ops, run_benchmark, BenchError, BenchFixture, BenchOp, BenchRow, BenchmarkReport, Role};
