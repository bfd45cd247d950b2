//! Re-randomized credential presentation with the per-auction tag ζ.

use bls12_381::{pairing, G1Affine, G2Affine};
use rand_core::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::issuance::Credential;
use super::keys::AggregatedVerificationKey;
use crate::crypto::codec::{g1_to_bytes, hex_g1, hex_g1_opt, hex_g2};
use crate::crypto::{
    hash_to_group, msm, random_scalar, FiatShamirProof, G1Bytes, G1Projective, G2Projective,
    GroupContext, GroupElement, Relation, Scalar, Statement,
};

/// What a presentation is bound to.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShowScope<'a> {
    /// Selects the ζ generator and is absorbed into the transcript.
    pub auction_id: &'a [u8],
    /// When set, the presentation also carries `hash("serial", scope)^s`,
    /// a tag that is stable across every auction sharing the scope.
    pub serial_scope: Option<&'a [u8]>,
    /// Extra bytes folded into the Fiat–Shamir context (payout address,
    /// file digest, ...).
    pub binding: &'a [u8],
}

impl<'a> ShowScope<'a> {
    pub fn auction(auction_id: &'a [u8]) -> Self {
        Self {
            auction_id,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShowProof {
    #[serde(with = "hex_g1")]
    pub h: G1Projective,
    #[serde(with = "hex_g1")]
    pub sigma: G1Projective,
    #[serde(with = "hex_g2")]
    pub kappa: G2Projective,
    #[serde(with = "hex_g1")]
    pub nu: G1Projective,
    #[serde(with = "hex_g1")]
    pub zeta: G1Projective,
    #[serde(with = "hex_g1_opt")]
    pub serial_tag: Option<G1Projective>,
    pub value: Option<u64>,
    pub proof: FiatShamirProof,
}

/// What a verifier learns from an accepted presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Disclosed {
    pub zeta: G1Bytes,
    pub serial_tag: Option<G1Bytes>,
    pub value: Option<u64>,
}

pub fn zeta_base(auction_id: &[u8]) -> G1Projective {
    hash_to_group(b"auction", auction_id)
}

/// ζ = hash("auction", auction_id)^s
pub fn zeta_tag(serial: &Scalar, auction_id: &[u8]) -> G1Projective {
    msm(&[zeta_base(auction_id)], &[*serial])
}

pub fn serial_base(scope: &[u8]) -> G1Projective {
    hash_to_group(b"serial", scope)
}

fn show_context(scope: &ShowScope<'_>, h: &G1Projective, sigma: &G1Projective, value: Option<u64>) -> Vec<u8> {
    let mut ctx = Vec::with_capacity(256);
    for part in [scope.auction_id, scope.serial_scope.unwrap_or(b""), scope.binding] {
        ctx.extend_from_slice(&(part.len() as u64).to_be_bytes());
        ctx.extend_from_slice(part);
    }
    ctx.push(scope.serial_scope.is_some() as u8);
    ctx.extend_from_slice(&g1_to_bytes(h));
    ctx.extend_from_slice(&g1_to_bytes(sigma));
    match value {
        Some(v) => {
            ctx.push(1);
            ctx.extend_from_slice(&v.to_be_bytes());
        }
        None => ctx.push(0),
    }
    ctx
}

// witnesses: 0 = serial, 1 = blinding t, 2 = value (only when hidden)
fn show_statement(
    vk: &AggregatedVerificationKey,
    proof: &ShowProof,
    zeta_base: G1Projective,
    serial_base: Option<G1Projective>,
) -> Option<Statement> {
    let ctx = GroupContext::get();
    let key = &vk.key;
    // κ carries β_value·v only when v stays hidden
    let key_public = proof.kappa - key.alpha;
    let mut key_terms = vec![
        (GroupElement::G2(key.beta_serial), 0),
        (GroupElement::G2(ctx.g2), 1),
    ];
    let (label, witnesses) = match proof.value {
        Some(_) => ("show/disclosed", 2),
        None => {
            key_terms.push((GroupElement::G2(key.beta_value), 2));
            ("show/hidden", 3)
        }
    };
    let mut relations = vec![
        Relation::new(key_public, key_terms),
        Relation::new(proof.nu, vec![(GroupElement::G1(proof.h), 1)]),
        Relation::new(
            proof.zeta,
            vec![(GroupElement::G1(zeta_base), 0)],
        ),
    ];
    match (serial_base, proof.serial_tag) {
        (Some(base), Some(tag)) => {
            relations.push(Relation::new(tag, vec![(GroupElement::G1(base), 0)]))
        }
        (None, None) => {}
        _ => return None,
    }
    Some(Statement::new(label, witnesses, relations))
}

pub fn show<R: RngCore + CryptoRng>(
    credential: &Credential,
    auction_id: &[u8],
    vk: &AggregatedVerificationKey,
    disclose_value: bool,
    rng: &mut R,
) -> ShowProof {
    show_scoped(credential, vk, &ShowScope::auction(auction_id), disclose_value, rng)
}

pub fn show_scoped<R: RngCore + CryptoRng>(
    credential: &Credential,
    vk: &AggregatedVerificationKey,
    scope: &ShowScope<'_>,
    disclose_value: bool,
    rng: &mut R,
) -> ShowProof {
    let ctx = GroupContext::get();
    let key = &vk.key;
    let randomized = credential.rerandomize(rng);
    let t = random_scalar(rng);
    let serial = credential.serial;
    let value = Scalar::from(credential.value);

    let kappa = if disclose_value {
        key.alpha + msm(&[key.beta_serial, ctx.g2], &[serial, t])
    } else {
        key.alpha + msm(&[key.beta_serial, ctx.g2, key.beta_value], &[serial, t, value])
    };
    let nu = msm(&[randomized.h], &[t]);
    let z_base = zeta_base(scope.auction_id);
    let s_base = scope.serial_scope.map(serial_base);
    let mut out = ShowProof {
        h: randomized.h,
        sigma: randomized.sigma + nu,
        kappa,
        nu,
        zeta: msm(&[z_base], &[serial]),
        serial_tag: s_base.map(|b| msm(&[b], &[serial])),
        value: disclose_value.then_some(credential.value),
        proof: FiatShamirProof {
            label: String::new(),
            challenge: Scalar::zero(),
            responses: Vec::new(),
        },
    };
    let statement = show_statement(vk, &out, z_base, s_base).expect("scope and tag agree");
    let witnesses: Vec<Scalar> = if disclose_value {
        vec![serial, t]
    } else {
        vec![serial, t, value]
    };
    out.proof = statement.prove(
        &witnesses,
        &show_context(scope, &out.h, &out.sigma, out.value),
        rng,
    );
    out
}

pub fn verify_show(
    vk: &AggregatedVerificationKey,
    auction_id: &[u8],
    proof: &ShowProof,
) -> Option<Disclosed> {
    verify_show_scoped(vk, &ShowScope::auction(auction_id), proof)
}

pub fn verify_show_scoped(
    vk: &AggregatedVerificationKey,
    scope: &ShowScope<'_>,
    proof: &ShowProof,
) -> Option<Disclosed> {
    if bool::from(proof.h.is_identity()) {
        return None;
    }
    let statement = show_statement(
        vk,
        proof,
        zeta_base(scope.auction_id),
        scope.serial_scope.map(serial_base),
    )?;
    let ctx_bytes = show_context(scope, &proof.h, &proof.sigma, proof.value);
    if !statement.verify(&proof.proof, &ctx_bytes) {
        return None;
    }
    let mut kappa = proof.kappa;
    if let Some(v) = proof.value {
        kappa += vk.key.beta_value * Scalar::from(v);
    }
    let g2 = GroupContext::get().g2;
    if pairing(&G1Affine::from(proof.h), &G2Affine::from(kappa))
        != pairing(&G1Affine::from(proof.sigma), &G2Affine::from(g2))
    {
        return None;
    }
    Some(Disclosed {
        zeta: G1Bytes::from_point(&proof.zeta),
        serial_tag: proof.serial_tag.as_ref().map(G1Bytes::from_point),
        value: proof.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credentials::issuance::{blind_sign, prepare_request, unblind_and_aggregate};
    use crate::credentials::keys::key_ceremony;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha20Rng;
    use std::collections::HashSet;

    fn issue(value: u64, seed: u64) -> (Credential, AggregatedVerificationKey, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (shares, vk) = key_ceremony(3, 2, &mut rng).unwrap();
        let (req, secrets) = prepare_request(value, random_scalar(&mut rng), &mut rng);
        let partials: Vec<_> = shares[..2].iter().map(|s| blind_sign(s, &req).unwrap()).collect();
        let cred = unblind_and_aggregate(&partials, &secrets, &vk).unwrap();
        (cred, vk, rng)
    }

    fn json_fields(p: &ShowProof) -> Vec<(String, String)> {
        let v = serde_json::to_value(p).unwrap();
        let mut out = Vec::new();
        for (k, val) in v.as_object().unwrap() {
            if k == "proof" {
                let pr = val.as_object().unwrap();
                out.push(("challenge".into(), pr["challenge"].to_string()));
                for (i, r) in pr["responses"].as_array().unwrap().iter().enumerate() {
                    out.push((format!("response{i}"), r.to_string()));
                }
            } else {
                out.push((k.clone(), val.to_string()));
            }
        }
        out
    }

    #[test]
    fn two_hidden_shows_share_only_zeta() {
        let (cred, vk, mut rng) = issue(5, 1);
        let a = show(&cred, b"A", &vk, false, &mut rng);
        let b = show(&cred, b"A", &vk, false, &mut rng);
        assert!(verify_show(&vk, b"A", &a).is_some());
        assert!(verify_show(&vk, b"A", &b).is_some());
        for ((k, x), (_, y)) in json_fields(&a).into_iter().zip(json_fields(&b)) {
            match k.as_str() {
                "zeta" | "serial_tag" | "value" => assert_eq!(x, y, "{k}"),
                _ => assert_ne!(x, y, "{k} should differ"),
            }
        }
        assert_eq!(a.zeta, zeta_tag(&cred.serial(), b"A"));
    }

    #[test]
    fn wrong_auction_rejected() {
        let (cred, vk, mut rng) = issue(5, 2);
        let p = show(&cred, b"A", &vk, false, &mut rng);
        assert!(verify_show(&vk, b"B", &p).is_none());
    }

    #[test]
    fn disclosure_exposes_value_only() {
        let (cred, vk, mut rng) = issue(20, 3);
        let p = show(&cred, b"A", &vk, true, &mut rng);
        let d = verify_show(&vk, b"A", &p).unwrap();
        assert_eq!(d.value, Some(20));
        let text = serde_json::to_string(&p).unwrap();
        let serial_hex = hex::encode(crate::crypto::codec::scalar_to_bytes(&cred.serial()));
        assert!(!text.contains(&serial_hex));
    }

    #[test]
    fn altered_disclosed_value_rejected() {
        let (cred, vk, mut rng) = issue(5, 4);
        let mut p = show(&cred, b"A", &vk, true, &mut rng);
        p.value = Some(50);
        assert!(verify_show(&vk, b"A", &p).is_none());
    }

    #[test]
    fn mutated_zeta_rejected() {
        let (cred, vk, mut rng) = issue(5, 5);
        let mut p = show(&cred, b"A", &vk, false, &mut rng);
        p.zeta += GroupContext::get().g1;
        assert!(verify_show(&vk, b"A", &p).is_none());
    }

    #[test]
    fn foreign_key_rejected() {
        let (cred, _, mut rng) = issue(5, 6);
        let (_, other_vk, _) = issue(5, 7);
        let p = show(&cred, b"A", &other_vk, false, &mut rng);
        assert!(verify_show(&other_vk, b"A", &p).is_none());
    }

    #[test]
    fn serial_scope_and_binding_enforced() {
        let (cred, vk, mut rng) = issue(5, 8);
        let scope = ShowScope {
            auction_id: b"A",
            serial_scope: Some(b"contract-1"),
            binding: b"addr-1",
        };
        let p = show_scoped(&cred, &vk, &scope, false, &mut rng);
        let d = verify_show_scoped(&vk, &scope, &p).unwrap();
        assert_eq!(d.serial_tag, Some(G1Bytes::from_point(&(serial_base(b"contract-1") * cred.serial()))));
        assert!(verify_show(&vk, b"A", &p).is_none());
        let rebound = ShowScope { binding: b"addr-2", ..scope };
        assert!(verify_show_scoped(&vk, &rebound, &p).is_none());
        // the serial tag is stable across auctions under one scope
        let other = ShowScope { auction_id: b"B", ..scope };
        let q = show_scoped(&cred, &vk, &other, false, &mut rng);
        assert_eq!(q.serial_tag, p.serial_tag);
        assert_ne!(q.zeta, p.zeta);
    }

    #[test]
    fn tags_are_pairwise_distinct() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let base = zeta_base(b"auction");
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            let s = random_scalar(&mut rng);
            assert!(seen.insert(g1_to_bytes(&(base * s))));
        }
    }
}
