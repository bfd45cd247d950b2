//! Dealer-based key ceremony and Lagrange interpolation at zero.

use rand_core::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};

use super::CredentialError;
use crate::crypto::codec::{hex_g2, G2Bytes};
use crate::crypto::{random_scalar, G2Projective, GroupContext, Scalar};

/// Signing exponents: one for the base, one per attribute (value, serial).
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey {
    pub(crate) x: Scalar,
    pub(crate) y_value: Scalar,
    pub(crate) y_serial: Scalar,
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationKey {
    #[serde(with = "hex_g2")]
    pub alpha: G2Projective,
    #[serde(with = "hex_g2")]
    pub beta_value: G2Projective,
    #[serde(with = "hex_g2")]
    pub beta_serial: G2Projective,
}

/// Undecoded form of a [`VerificationKey`], compared byte-wise by checkers
/// that must not pay for point decompression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationKeyBytes {
    pub alpha: G2Bytes,
    pub beta_value: G2Bytes,
    pub beta_serial: G2Bytes,
}

impl VerificationKey {
    fn from_secret(sk: &SecretKey) -> Self {
        let g2 = GroupContext::get().g2;
        Self {
            alpha: g2 * sk.x,
            beta_value: g2 * sk.y_value,
            beta_serial: g2 * sk.y_serial,
        }
    }

    pub fn to_bytes(&self) -> VerificationKeyBytes {
        VerificationKeyBytes {
            alpha: G2Bytes::from_point(&self.alpha),
            beta_value: G2Bytes::from_point(&self.beta_value),
            beta_serial: G2Bytes::from_point(&self.beta_serial),
        }
    }
}

impl VerificationKeyBytes {
    pub fn decode(&self) -> Result<VerificationKey, crate::crypto::CodecError> {
        Ok(VerificationKey {
            alpha: self.alpha.decode()?,
            beta_value: self.beta_value.decode()?,
            beta_serial: self.beta_serial.decode()?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct AuthorityKeyShare {
    pub index: u64,
    pub(crate) secret: SecretKey,
    pub public: VerificationKey,
}

impl AuthorityKeyShare {
    /// Signs a fixed test message with the secret share and checks it under
    /// the public share.
    pub fn is_consistent(&self) -> bool {
        use bls12_381::{pairing, G1Affine, G2Affine};
        let ctx = GroupContext::get();
        let h = crate::crypto::hash_to_group(b"share-check", &self.index.to_be_bytes());
        let (m1, m2) = (Scalar::from(3u64), Scalar::from(5u64));
        let sigma = h * (self.secret.x + self.secret.y_value * m1 + self.secret.y_serial * m2);
        let key = self.public.alpha + self.public.beta_value * m1 + self.public.beta_serial * m2;
        pairing(&G1Affine::from(h), &G2Affine::from(key))
            == pairing(&G1Affine::from(sigma), &G2Affine::from(ctx.g2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatedVerificationKey {
    pub key: VerificationKey,
    pub authorities: u64,
    pub threshold: u64,
}

fn check_params(n: u64, t: u64) -> Result<(), CredentialError> {
    if t == 0 || t > n {
        return Err(CredentialError::Parameters { n, t });
    }
    Ok(())
}

fn eval_poly(coeffs: &[Scalar], x: u64) -> Scalar {
    let x = Scalar::from(x);
    coeffs
        .iter()
        .rev()
        .fold(Scalar::zero(), |acc, c| acc * x + c)
}

/// Runs a trusted-dealer ceremony: random degree `t-1` polynomials for each
/// signing exponent, share `i` is the evaluation at `i`. The dealer's
/// polynomials are dropped on return.
pub fn key_ceremony<R: RngCore + CryptoRng>(
    n: u64,
    t: u64,
    rng: &mut R,
) -> Result<(Vec<AuthorityKeyShare>, AggregatedVerificationKey), CredentialError> {
    check_params(n, t)?;
    let mut poly = || -> Vec<Scalar> { (0..t).map(|_| random_scalar(rng)).collect() };
    let (px, pv, ps) = (poly(), poly(), poly());

    let shares = (1..=n)
        .map(|i| {
            let secret = SecretKey {
                x: eval_poly(&px, i),
                y_value: eval_poly(&pv, i),
                y_serial: eval_poly(&ps, i),
            };
            AuthorityKeyShare {
                index: i,
                public: VerificationKey::from_secret(&secret),
                secret,
            }
        })
        .collect();
    let master = SecretKey {
        x: px[0],
        y_value: pv[0],
        y_serial: ps[0],
    };
    let vk = AggregatedVerificationKey {
        key: VerificationKey::from_secret(&master),
        authorities: n,
        threshold: t,
    };
    Ok((shares, vk))
}

/// Lagrange basis coefficients at x = 0 for the given 1-based indices.
pub fn lagrange_at_zero(indices: &[u64]) -> Result<Vec<Scalar>, CredentialError> {
    for (k, i) in indices.iter().enumerate() {
        if *i == 0 {
            return Err(CredentialError::IndexOutOfRange(0));
        }
        if indices[..k].contains(i) {
            return Err(CredentialError::DuplicateIndex(*i));
        }
    }
    indices
        .iter()
        .map(|&i| {
            let xi = Scalar::from(i);
            let (num, den) = indices.iter().filter(|&&j| j != i).fold(
                (Scalar::one(), Scalar::one()),
                |(num, den), &j| {
                    let xj = Scalar::from(j);
                    (num * xj, den * (xj - xi))
                },
            );
            Ok(num * den.invert().unwrap())
        })
        .collect()
}

/// Interpolates the joint key from at least `t` public shares.
pub fn aggregate_verification_key(
    shares: &[(u64, VerificationKey)],
    n: u64,
    t: u64,
) -> Result<AggregatedVerificationKey, CredentialError> {
    check_params(n, t)?;
    if (shares.len() as u64) < t {
        return Err(CredentialError::BelowThreshold {
            needed: t,
            got: shares.len() as u64,
        });
    }
    if let Some((i, _)) = shares.iter().find(|(i, _)| *i > n) {
        return Err(CredentialError::IndexOutOfRange(*i));
    }
    let indices: Vec<u64> = shares.iter().map(|(i, _)| *i).collect();
    let lambdas = lagrange_at_zero(&indices)?;
    let mut key = VerificationKey {
        alpha: G2Projective::identity(),
        beta_value: G2Projective::identity(),
        beta_serial: G2Projective::identity(),
    };
    for ((_, share), l) in shares.iter().zip(&lambdas) {
        key.alpha += share.alpha * l;
        key.beta_value += share.beta_value * l;
        key.beta_serial += share.beta_serial * l;
    }
    Ok(AggregatedVerificationKey {
        key,
        authorities: n,
        threshold: t,
    })
}
