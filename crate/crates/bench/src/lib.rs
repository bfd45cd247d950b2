//! Shared setup for the criterion benches in `benches/`.
//!
//! The `sealbid bench` subcommand reports the same operations with plain
//! wall-clock statistics; these benches add criterion's outlier analysis.

use sealbid_core::harness::BenchFixture;

pub use sealbid_core::harness::BenchOp;

pub const FIXTURE_SEED: u64 = 0x5ea1;

pub fn fixture() -> BenchFixture {
    BenchFixture::new(FIXTURE_SEED)
}
