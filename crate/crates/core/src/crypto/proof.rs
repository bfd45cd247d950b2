//! Non-interactive proofs of knowledge for linear relations over the pairing
//! source groups (generalised Schnorr), made non-interactive with a running
//! SHA-512 transcript.
//!
//! A [`Statement`] is a list of relations `public_j = Σ_i base_{j,i} · x_{w(j,i)}`,
//! each living entirely in G1 or entirely in G2. Witnesses are shared across
//! relations by index, which is how equality of a secret across groups is
//! proven.

use rand_core::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha512};

use super::codec::{g1_to_bytes, g2_to_bytes, hex_scalar, hex_scalars};
use super::{msm, random_scalar, G1Projective, G2Projective, Scalar, PROTOCOL_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupElement {
    G1(G1Projective),
    G2(G2Projective),
}

impl GroupElement {
    fn encode(&self) -> Vec<u8> {
        match self {
            GroupElement::G1(p) => {
                let mut v = vec![1u8];
                v.extend_from_slice(&g1_to_bytes(p));
                v
            }
            GroupElement::G2(p) => {
                let mut v = vec![2u8];
                v.extend_from_slice(&g2_to_bytes(p));
                v
            }
        }
    }
}

impl From<G1Projective> for GroupElement {
    fn from(p: G1Projective) -> Self {
        GroupElement::G1(p)
    }
}

impl From<G2Projective> for GroupElement {
    fn from(p: G2Projective) -> Self {
        GroupElement::G2(p)
    }
}

/// `public = Σ base · witness[index]`
#[derive(Debug, Clone)]
pub struct Relation {
    pub public: GroupElement,
    pub terms: Vec<(GroupElement, usize)>,
}

impl Relation {
    pub fn new(public: impl Into<GroupElement>, terms: Vec<(GroupElement, usize)>) -> Self {
        Self {
            public: public.into(),
            terms,
        }
    }

    /// `Σ base · scalars[index] − public · challenge`, or `None` when the
    /// relation mixes groups or references a missing witness.
    fn evaluate(&self, scalars: &[Scalar], challenge: Option<&Scalar>) -> Option<GroupElement> {
        let mut coeffs = Vec::with_capacity(self.terms.len() + 1);
        for (_, idx) in &self.terms {
            coeffs.push(*scalars.get(*idx)?);
        }
        if let Some(c) = challenge {
            coeffs.push(-c);
        }
        match self.public {
            GroupElement::G1(public) => {
                let mut bases = Vec::with_capacity(coeffs.len());
                for (base, _) in &self.terms {
                    let GroupElement::G1(b) = base else { return None };
                    bases.push(*b);
                }
                if challenge.is_some() {
                    bases.push(public);
                }
                Some(GroupElement::G1(msm(&bases, &coeffs)))
            }
            GroupElement::G2(public) => {
                let mut bases = Vec::with_capacity(coeffs.len());
                for (base, _) in &self.terms {
                    let GroupElement::G2(b) = base else { return None };
                    bases.push(*b);
                }
                if challenge.is_some() {
                    bases.push(public);
                }
                Some(GroupElement::G2(msm(&bases, &coeffs)))
            }
        }
    }
}

/// Running hash with length-framed absorption.
#[derive(Clone)]
pub struct Transcript {
    hasher: Sha512,
}

impl Transcript {
    pub fn new(label: &[u8]) -> Self {
        let mut t = Self {
            hasher: Sha512::new(),
        };
        t.append(b"version", PROTOCOL_VERSION);
        t.append(b"label", label);
        t
    }

    pub fn append(&mut self, tag: &[u8], data: &[u8]) {
        self.hasher.update((tag.len() as u32).to_be_bytes());
        self.hasher.update(tag);
        self.hasher.update((data.len() as u64).to_be_bytes());
        self.hasher.update(data);
    }

    pub fn challenge_scalar(self) -> Scalar {
        let out = self.hasher.finalize();
        let mut wide = [0u8; 64];
        wide.copy_from_slice(&out);
        Scalar::from_bytes_wide(&wide)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiatShamirProof {
    pub label: String,
    #[serde(with = "hex_scalar")]
    pub challenge: Scalar,
    #[serde(with = "hex_scalars")]
    pub responses: Vec<Scalar>,
}

#[derive(Debug, Clone)]
pub struct Statement {
    pub label: String,
    pub relations: Vec<Relation>,
    pub witness_count: usize,
}

impl Statement {
    pub fn new(label: impl Into<String>, witness_count: usize, relations: Vec<Relation>) -> Self {
        Self {
            label: label.into(),
            relations,
            witness_count,
        }
    }

    fn challenge(&self, context: &[u8], commitments: &[GroupElement]) -> Scalar {
        let mut t = Transcript::new(self.label.as_bytes());
        t.append(b"context", context);
        for rel in &self.relations {
            for (base, idx) in &rel.terms {
                t.append(b"base", &base.encode());
                t.append(b"index", &(*idx as u64).to_be_bytes());
            }
        }
        for rel in &self.relations {
            t.append(b"public", &rel.public.encode());
        }
        for c in commitments {
            t.append(b"commitment", &c.encode());
        }
        t.challenge_scalar()
    }

    /// # Panics
    ///
    /// Panics if `witnesses.len()` differs from the statement's witness count
    /// or a relation mixes groups. A false relation does not panic: the proof
    /// is produced and fails verification.
    pub fn prove<R: RngCore + CryptoRng>(
        &self,
        witnesses: &[Scalar],
        context: &[u8],
        rng: &mut R,
    ) -> FiatShamirProof {
        assert_eq!(witnesses.len(), self.witness_count, "witness count mismatch");
        let nonces: Vec<Scalar> = (0..self.witness_count).map(|_| random_scalar(rng)).collect();
        let commitments: Vec<GroupElement> = self
            .relations
            .iter()
            .map(|r| r.evaluate(&nonces, None).expect("malformed relation"))
            .collect();
        let challenge = self.challenge(context, &commitments);
        let responses = nonces
            .iter()
            .zip(witnesses)
            .map(|(k, x)| k + challenge * x)
            .collect();
        FiatShamirProof {
            label: self.label.clone(),
            challenge,
            responses,
        }
    }

    pub fn verify(&self, proof: &FiatShamirProof, context: &[u8]) -> bool {
        if proof.label != self.label || proof.responses.len() != self.witness_count {
            return false;
        }
        let mut commitments = Vec::with_capacity(self.relations.len());
        for rel in &self.relations {
            match rel.evaluate(&proof.responses, Some(&proof.challenge)) {
                Some(c) => commitments.push(c),
                None => return false,
            }
        }
        self.challenge(context, &commitments) == proof.challenge
    }
}

const REPRESENTATION_LABEL: &str = "representation";

fn representation_statement(bases: &[G1Projective], public: G1Projective) -> Statement {
    let terms = bases
        .iter()
        .enumerate()
        .map(|(i, b)| (GroupElement::G1(*b), i))
        .collect();
    Statement::new(
        REPRESENTATION_LABEL,
        bases.len(),
        vec![Relation::new(public, terms)],
    )
}

/// Proof of knowledge of `exponents` with `public = Π bases[i]^exponents[i]`.
pub fn prove_representation<R: RngCore + CryptoRng>(
    bases: &[G1Projective],
    exponents: &[Scalar],
    public: &G1Projective,
    context: &[u8],
    rng: &mut R,
) -> FiatShamirProof {
    assert_eq!(bases.len(), exponents.len(), "one exponent per base");
    representation_statement(bases, *public).prove(exponents, context, rng)
}

pub fn verify_representation(
    bases: &[G1Projective],
    public: &G1Projective,
    context: &[u8],
    proof: &FiatShamirProof,
) -> bool {
    representation_statement(bases, *public).verify(proof, context)
}
