//! Scenario files: a TOML description of one auction run.
//!
//! ```toml
//! seed = 7
//! t_commit = 6
//! t_reveal = 10
//!
//! [ceremony]
//! authorities = 3
//! threshold = 2
//!
//! [worker]
//! reserve = 1
//!
//! [[bidder]]
//! name = "alice"
//! bid = 5
//! ```
//!
//! Heights are absolute block heights. Setup and Create land in block 0.
//! Every bidder field except `name` and `bid` has a default:
//!
//! | field             | default              | meaning                                   |
//! |-------------------|----------------------|-------------------------------------------|
//! | `balance`         | `bid`                | genesis balance of the deposit account    |
//! | `deposit_height`  | 1                    | block carrying the Deposit                |
//! | `commit_height`   | `deposit_height + 1` | block carrying the Commit                 |
//! | `reveal`          | true                 | false: commit and never reveal            |
//! | `reveal_height`   | `t_commit`           | block carrying the Reveal                 |
//! | `withdraw`        | `"normal"`           | `"never"` or `"double_spend"`             |
//! | `withdraw_height` | `t_reveal`           | block carrying the Withdraw               |
//! | `submit_work`     | true                 | submit work if this bidder won            |
//!
//! Worker fields: `reserve` (required), `balance` (0), `opens` (true),
//! `open_height` (`t_commit`), `claims` (true), `claim_height`
//! (`t_reveal + 1`), `advertisement`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contract::DEFAULT_DENOMINATIONS;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ceremony {
    pub authorities: u64,
    pub threshold: u64,
    /// Authorities that never answer credential requests.
    #[serde(default)]
    pub offline: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkerSpec {
    pub reserve: u64,
    #[serde(default)]
    pub balance: u64,
    #[serde(default = "yes")]
    pub opens: bool,
    pub open_height: Option<u64>,
    #[serde(default = "yes")]
    pub claims: bool,
    pub claim_height: Option<u64>,
    #[serde(default = "default_advertisement")]
    pub advertisement: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WithdrawBehavior {
    #[default]
    Normal,
    Never,
    /// Submit two withdrawals for the same tag in one block.
    DoubleSpend,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BidderSpec {
    pub name: String,
    pub bid: u64,
    pub balance: Option<u64>,
    pub deposit_height: Option<u64>,
    pub commit_height: Option<u64>,
    #[serde(default = "yes")]
    pub reveal: bool,
    pub reveal_height: Option<u64>,
    #[serde(default)]
    pub withdraw: WithdrawBehavior,
    pub withdraw_height: Option<u64>,
    #[serde(default = "yes")]
    pub submit_work: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    #[serde(default = "default_denominations")]
    pub denominations: Vec<u64>,
    pub t_commit: u64,
    pub t_reveal: u64,
    pub ceremony: Ceremony,
    pub worker: WorkerSpec,
    #[serde(default, rename = "bidder")]
    pub bidders: Vec<BidderSpec>,
}

fn yes() -> bool {
    true
}

fn default_denominations() -> Vec<u64> {
    DEFAULT_DENOMINATIONS.to_vec()
}

fn default_advertisement() -> String {
    "store one encrypted replica".to_string()
}

/// A bidder with every default filled in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BidderPlan {
    pub name: String,
    pub bid: u64,
    pub balance: u64,
    pub deposit_height: u64,
    pub commit_height: u64,
    pub reveal_height: Option<u64>,
    pub withdraw: WithdrawBehavior,
    pub withdraw_height: u64,
    pub submit_work: bool,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = toml::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let c = &self.ceremony;
        if c.threshold == 0 || c.threshold > c.authorities {
            return Err(invalid(
                "ceremony.threshold",
                format!("need 0 < threshold <= authorities ({})", c.authorities),
            ));
        }
        if let Some(i) = c.offline.iter().find(|&&i| i == 0 || i > c.authorities) {
            return Err(invalid("ceremony.offline", format!("no authority {i}")));
        }
        let offline: BTreeSet<_> = c.offline.iter().collect();
        if c.authorities - (offline.len() as u64) < c.threshold {
            return Err(invalid(
                "ceremony.offline",
                "fewer than threshold authorities remain online",
            ));
        }
        if self.denominations.is_empty()
            || self.denominations[0] == 0
            || self.denominations.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(invalid(
                "denominations",
                "must be non-empty, positive and strictly increasing",
            ));
        }
        if self.t_commit == 0 {
            return Err(invalid("t_commit", "must be after the creation block 0"));
        }
        if self.t_commit >= self.t_reveal {
            return Err(invalid("t_reveal", "must be greater than t_commit"));
        }
        let mut names = BTreeSet::new();
        for (i, b) in self.bidders.iter().enumerate() {
            let field = |f: &str| format!("bidder[{i}].{f}");
            if b.name.is_empty() {
                return Err(invalid(field("name"), "must not be empty"));
            }
            if !names.insert(&b.name) {
                return Err(invalid(field("name"), format!("duplicate name {:?}", b.name)));
            }
            if !self.denominations.contains(&b.bid) {
                return Err(invalid(field("bid"), format!("{} is not a denomination", b.bid)));
            }
            let plan = self.plan_bidder(b);
            if plan.deposit_height == 0 {
                return Err(invalid(field("deposit_height"), "block 0 holds setup only"));
            }
            if plan.commit_height <= plan.deposit_height {
                return Err(invalid(
                    field("commit_height"),
                    "must come after the deposit block (credentials are issued in between)",
                ));
            }
            if let Some(r) = plan.reveal_height {
                if r <= plan.commit_height {
                    return Err(invalid(field("reveal_height"), "must come after commit_height"));
                }
            }
        }
        Ok(())
    }

    pub fn plan_bidder(&self, b: &BidderSpec) -> BidderPlan {
        let deposit_height = b.deposit_height.unwrap_or(1);
        BidderPlan {
            name: b.name.clone(),
            bid: b.bid,
            balance: b.balance.unwrap_or(b.bid),
            deposit_height,
            commit_height: b.commit_height.unwrap_or(deposit_height + 1),
            reveal_height: b.reveal.then(|| b.reveal_height.unwrap_or(self.t_commit)),
            withdraw: b.withdraw,
            withdraw_height: b.withdraw_height.unwrap_or(self.t_reveal),
            submit_work: b.submit_work,
        }
    }

    pub fn plans(&self) -> Vec<BidderPlan> {
        self.bidders.iter().map(|b| self.plan_bidder(b)).collect()
    }

    pub fn open_height(&self) -> u64 {
        self.worker.open_height.unwrap_or(self.t_commit)
    }

    pub fn claim_height(&self) -> u64 {
        self.worker.claim_height.unwrap_or(self.t_reveal + 1)
    }

    /// Last block the run produces.
    pub fn final_height(&self) -> u64 {
        self.plans()
            .iter()
            .flat_map(|p| [p.commit_height, p.reveal_height.unwrap_or(0), p.withdraw_height])
            .chain([self.open_height(), self.claim_height(), self.t_reveal])
            .max()
            .unwrap_or(self.t_reveal)
    }

    /// The honest three-bidder auction used by `demo`.
    pub fn demo() -> Self {
        Self::from_toml(DEMO).expect("built-in scenario is valid")
    }
}

pub const DEMO: &str = r#"
seed = 2024
denominations = [1, 2, 3, 5, 10, 20, 50, 100]
t_commit = 6
t_reveal = 10

[ceremony]
authorities = 3
threshold = 2

[worker]
reserve = 1
advertisement = "store 4 GiB for 90 days"

[[bidder]]
name = "alice"
bid = 5
balance = 10

[[bidder]]
name = "bob"
bid = 3
balance = 10
commit_height = 3

[[bidder]]
name = "carol"
bid = 2
balance = 10
commit_height = 4
"#;
