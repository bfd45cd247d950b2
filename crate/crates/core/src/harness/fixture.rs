//! Ready-made participants and a ledger driver for tests and benchmarks.

use std::collections::BTreeMap;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::contract::procedures::{self, AuctionTerms};
use crate::contract::{self, AuctionOutcome, AuctionState, ContractInstance, DEFAULT_DENOMINATIONS};
use crate::credentials::{
    blind_sign, key_ceremony, unblind_and_aggregate, zeta_tag, AggregatedVerificationKey,
    AuthorityKeyShare, Credential, CredentialError, CredentialRequest, PartialCredential,
    RequestSecrets,
};
use crate::crypto::{Digest32, G1Bytes, PedersenOpening, SigningKey};
use crate::ledger::{Ledger, Receipt, Transaction};

/// Authorities of one ceremony.
#[derive(Debug, Clone)]
pub struct Committee {
    pub shares: Vec<AuthorityKeyShare>,
    pub vk: AggregatedVerificationKey,
}

impl Committee {
    pub fn new(n: u64, t: u64, rng: &mut ChaCha20Rng) -> Result<Self, CredentialError> {
        let (shares, vk) = key_ceremony(n, t, rng)?;
        Ok(Self { shares, vk })
    }

    /// Partial credentials from the listed authorities (1-based indices).
    pub fn partials(
        &self,
        request: &CredentialRequest,
        signers: &[u64],
    ) -> Result<Vec<PartialCredential>, CredentialError> {
        signers
            .iter()
            .map(|&i| {
                let share = self
                    .shares
                    .iter()
                    .find(|s| s.index == i)
                    .ok_or(CredentialError::IndexOutOfRange(i))?;
                blind_sign(share, request)
            })
            .collect()
    }

    pub fn issue(
        &self,
        request: &CredentialRequest,
        secrets: &RequestSecrets,
        signers: &[u64],
    ) -> Result<Credential, CredentialError> {
        unblind_and_aggregate(&self.partials(request, signers)?, secrets, &self.vk)
    }

    /// The first `t` authorities.
    pub fn quorum(&self) -> Vec<u64> {
        (1..=self.vk.threshold).collect()
    }
}

/// A bidder holding an issued credential.
#[derive(Debug, Clone)]
pub struct Holder {
    pub account: SigningKey,
    pub credential: Credential,
}

impl Holder {
    pub fn zeta(&self, auction: &Digest32) -> G1Bytes {
        G1Bytes::from_point(&zeta_tag(&self.credential.serial(), &auction.0))
    }
}

/// One contract instance with one auction on a live ledger.
#[derive(Clone)]
pub struct World {
    pub ledger: Ledger,
    pub committee: Committee,
    pub contract: Digest32,
    pub auction: Digest32,
    pub worker: SigningKey,
    pub reserve: u64,
    pub opening: PedersenOpening,
    pub holders: Vec<Holder>,
    pub rng: ChaCha20Rng,
}

impl World {
    /// Sets up a 2-of-3 contract and an auction at height 0, deposits one
    /// credential per entry of `bids` in the same block (the denomination
    /// set is widened to cover them) and issues the
    /// credentials off-chain. Returns at height 1.
    pub fn new(seed: u64, bids: &[u64], reserve: u64, t_commit: u64, t_reveal: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let committee = Committee::new(3, 2, &mut rng).expect("valid ceremony");
        let worker = SigningKey::generate(&mut rng);
        let accounts: Vec<SigningKey> = bids.iter().map(|_| SigningKey::generate(&mut rng)).collect();
        let genesis: BTreeMap<_, _> = accounts
            .iter()
            .zip(bids)
            .map(|(k, &v)| (k.address(), v * 2))
            .chain([(worker.address(), 0)])
            .collect();
        let mut ledger = Ledger::new(genesis);

        let mut denominations: Vec<u64> = DEFAULT_DENOMINATIONS.iter().chain(bids).copied().collect();
        denominations.sort_unstable();
        denominations.dedup();
        let setup = procedures::setup(&committee.shares, &committee.vk, &denominations);
        let contract = setup.id();
        let terms = AuctionTerms {
            reserve,
            t_commit,
            t_reveal,
            advertisement: "replicate 1 GiB for 30 days".to_string(),
        };
        let (create, opening) =
            procedures::create(contract, worker.address(), &committee.vk, &terms, &mut rng);
        let auction = create.id();
        ledger.submit(setup);
        ledger.submit(create);
        let mut pending = Vec::new();
        for (key, &v) in accounts.iter().zip(bids) {
            let (tx, secrets) = procedures::deposit(contract, v, key, &mut rng);
            let request = tx
                .parse_payload::<contract::DepositPayload>()
                .expect("own payload")
                .request;
            ledger.submit(tx);
            pending.push((key.clone(), request, secrets));
        }
        let receipts = ledger.advance_block();
        assert!(receipts.iter().all(Receipt::applied), "fixture setup failed: {receipts:?}");

        let quorum = committee.quorum();
        let holders = pending
            .into_iter()
            .map(|(account, request, secrets)| Holder {
                credential: committee.issue(&request, &secrets, &quorum).expect("issuance"),
                account,
            })
            .collect();
        Self {
            ledger,
            committee,
            contract,
            auction,
            worker,
            reserve,
            opening,
            holders,
            rng,
        }
    }

    pub fn vk(&self) -> &AggregatedVerificationKey {
        &self.committee.vk
    }

    pub fn instance(&self) -> &ContractInstance {
        &self.ledger.state().contracts[&self.contract]
    }

    pub fn auction_state(&self) -> &AuctionState {
        &self.instance().auctions[&self.auction]
    }

    pub fn outcome(&self) -> AuctionOutcome {
        self.auction_state().outcome
    }

    pub fn commit_tx(&mut self, holder: usize) -> Transaction {
        let cred = self.holders[holder].credential.clone();
        procedures::commit(self.contract, self.auction, &cred, &self.committee.vk, &mut self.rng)
    }

    pub fn reveal_tx(&mut self, holder: usize) -> Transaction {
        let cred = self.holders[holder].credential.clone();
        procedures::reveal(self.contract, self.auction, &cred, &self.committee.vk, &mut self.rng)
    }

    pub fn open_tx(&mut self) -> Transaction {
        procedures::open_min_price(
            self.contract,
            self.auction,
            self.reserve,
            &self.opening,
            &self.worker,
            &mut self.rng,
        )
    }

    /// Withdraw to a fresh payout key, which is returned with the tx.
    pub fn withdraw_tx(&mut self, holder: usize) -> (Transaction, SigningKey) {
        let payout = SigningKey::generate(&mut self.rng);
        let cred = self.holders[holder].credential.clone();
        let tx = procedures::withdraw(
            self.contract,
            self.auction,
            &cred,
            &self.committee.vk,
            &payout,
            &mut self.rng,
        );
        (tx, payout)
    }

    pub fn submit_work_tx(&mut self, holder: usize) -> Transaction {
        let signer = SigningKey::generate(&mut self.rng);
        let cred = self.holders[holder].credential.clone();
        let digest = Digest32::of(&[b"encrypted replica", &self.auction.0]);
        procedures::submit_work(
            self.contract,
            self.auction,
            &cred,
            &self.committee.vk,
            digest,
            &signer,
            &mut self.rng,
        )
    }

    pub fn claim_tx(&mut self) -> Transaction {
        procedures::claim_payment(self.contract, self.auction, &self.worker, &mut self.rng)
    }

    /// Submits `txs` and produces one block.
    pub fn block(&mut self, txs: impl IntoIterator<Item = Transaction>) -> Vec<Receipt> {
        for tx in txs {
            self.ledger.submit(tx);
        }
        self.ledger.advance_block()
    }

    /// Produces empty blocks until the current height is `height`.
    pub fn advance_to(&mut self, height: u64) {
        while self.ledger.current_height() < height {
            self.ledger.advance_block();
        }
    }

    pub fn height(&self) -> u64 {
        self.ledger.current_height()
    }
}
