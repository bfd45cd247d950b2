//! Client-side transaction builders, one per contract function.

use rand_core::{CryptoRng, RngCore};

use super::payload::*;
use super::policy::VickreyRefund;
use super::{FileCommitment, SettlementPolicy};
use crate::credentials::{
    prepare_request, show_scoped, AggregatedVerificationKey, AuthorityKeyShare, Credential,
    RequestSecrets, ShowScope,
};
use crate::crypto::{
    pedersen_commit, random_scalar, Address, Digest32, PedersenOpening, Scalar, SigningKey,
    CURVE_ID,
};
use crate::ledger::{Transaction, TxKind};

pub fn setup(
    shares: &[AuthorityKeyShare],
    vk: &AggregatedVerificationKey,
    denominations: &[u64],
) -> Transaction {
    let payload = SetupPayload {
        curve: CURVE_ID.to_string(),
        n: vk.authorities,
        t: vk.threshold,
        denominations: denominations.to_vec(),
        authorities: shares
            .iter()
            .map(|s| AuthorityPublic {
                index: s.index,
                key: s.public.to_bytes(),
            })
            .collect(),
        vk: vk.key.to_bytes(),
    };
    Transaction::anonymous(TxKind::Setup, &payload)
}

/// Auction parameters chosen by the worker.
#[derive(Debug, Clone)]
pub struct AuctionTerms {
    pub reserve: u64,
    pub t_commit: u64,
    pub t_reveal: u64,
    pub advertisement: String,
}

/// Commits to the reserve and announces the auction. The opening stays
/// with the worker.
pub fn create<R: RngCore + CryptoRng>(
    contract: Digest32,
    worker: Address,
    vk: &AggregatedVerificationKey,
    terms: &AuctionTerms,
    rng: &mut R,
) -> (Transaction, PedersenOpening) {
    let opening = PedersenOpening {
        value: Scalar::from(terms.reserve),
        blinding: random_scalar(rng),
    };
    let commitment = pedersen_commit(opening.value, opening.blinding);
    let payload = CreatePayload {
        contract,
        worker,
        min_price: commitment.to_bytes(),
        t_commit: terms.t_commit,
        t_reveal: terms.t_reveal,
        trusted_vk: vk.key.to_bytes(),
        policy: VickreyRefund.name().to_string(),
        advertisement: terms.advertisement.clone(),
    };
    (Transaction::anonymous(TxKind::Create, &payload), opening)
}

/// Draws a fresh serial number and requests a credential on `value`.
pub fn deposit<R: RngCore + CryptoRng>(
    contract: Digest32,
    value: u64,
    key: &SigningKey,
    rng: &mut R,
) -> (Transaction, RequestSecrets) {
    let serial = random_scalar(rng);
    let (request, secrets) = prepare_request(value, serial, rng);
    let payload = DepositPayload {
        contract,
        value,
        request,
    };
    (Transaction::signed(TxKind::Deposit, &payload, key, rng), secrets)
}

pub fn commit<R: RngCore + CryptoRng>(
    contract: Digest32,
    auction: Digest32,
    credential: &Credential,
    vk: &AggregatedVerificationKey,
    rng: &mut R,
) -> Transaction {
    let binding = show_binding("commit", &[&contract.0]);
    let scope = ShowScope {
        auction_id: &auction.0,
        serial_scope: Some(&contract.0),
        binding: &binding,
    };
    let show = show_scoped(credential, vk, &scope, false, rng);
    Transaction::anonymous(
        TxKind::Commit,
        &CommitPayload {
            contract,
            auction,
            show,
        },
    )
}

pub fn reveal<R: RngCore + CryptoRng>(
    contract: Digest32,
    auction: Digest32,
    credential: &Credential,
    vk: &AggregatedVerificationKey,
    rng: &mut R,
) -> Transaction {
    let binding = show_binding("reveal", &[&contract.0]);
    let scope = ShowScope {
        auction_id: &auction.0,
        serial_scope: None,
        binding: &binding,
    };
    let show = show_scoped(credential, vk, &scope, true, rng);
    Transaction::anonymous(
        TxKind::Reveal,
        &RevealPayload {
            contract,
            auction,
            show,
        },
    )
}

pub fn open_min_price<R: RngCore + CryptoRng>(
    contract: Digest32,
    auction: Digest32,
    value: u64,
    opening: &PedersenOpening,
    worker: &SigningKey,
    rng: &mut R,
) -> Transaction {
    let payload = OpenMinPricePayload {
        contract,
        auction,
        value,
        blinding: opening.blinding,
    };
    Transaction::signed(TxKind::OpenMinPrice, &payload, worker, rng)
}

/// Presents the credential once more and binds the payout to `payout`,
/// whose key signs the request.
pub fn withdraw<R: RngCore + CryptoRng>(
    contract: Digest32,
    auction: Digest32,
    credential: &Credential,
    vk: &AggregatedVerificationKey,
    payout: &SigningKey,
    rng: &mut R,
) -> Transaction {
    let addr = payout.address();
    let binding = withdraw_show_binding(&contract, &auction, &addr);
    let scope = ShowScope {
        auction_id: &auction.0,
        serial_scope: None,
        binding: &binding,
    };
    let show = show_scoped(credential, vk, &scope, true, rng);
    let zeta = crate::crypto::G1Bytes::from_point(&show.zeta);
    let binding = payout.sign(&withdraw_binding_message(&contract, &auction, &addr, &zeta), rng);
    Transaction::anonymous(
        TxKind::Withdraw,
        &WithdrawPayload {
            contract,
            auction,
            addr,
            show,
            binding,
        },
    )
}

pub fn submit_work<R: RngCore + CryptoRng>(
    contract: Digest32,
    auction: Digest32,
    credential: &Credential,
    vk: &AggregatedVerificationKey,
    file_digest: Digest32,
    signer: &SigningKey,
    rng: &mut R,
) -> Transaction {
    let file = FileCommitment {
        digest: file_digest,
        signer: signer.address(),
        signature: signer.sign(&file_message(&auction, &file_digest), rng),
    };
    let binding = submit_work_show_binding(&contract, &file.digest, &file.signer);
    let scope = ShowScope {
        auction_id: &auction.0,
        serial_scope: None,
        binding: &binding,
    };
    let show = show_scoped(credential, vk, &scope, true, rng);
    Transaction::anonymous(
        TxKind::SubmitWork,
        &SubmitWorkPayload {
            contract,
            auction,
            show,
            file,
        },
    )
}

pub fn claim_payment<R: RngCore + CryptoRng>(
    contract: Digest32,
    auction: Digest32,
    worker: &SigningKey,
    rng: &mut R,
) -> Transaction {
    Transaction::signed(
        TxKind::ClaimPayment,
        &ClaimPaymentPayload { contract, auction },
        worker,
        rng,
    )
}
