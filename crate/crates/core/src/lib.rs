pub mod auction;
pub mod contract;
pub mod credentials;
pub mod crypto;
pub mod harness;
pub mod ledger;
