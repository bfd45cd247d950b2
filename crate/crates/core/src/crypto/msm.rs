//! Variable-time multi-scalar multiplication (Straus, width-5 wNAF).
//!
//! Only used where timing leaks are acceptable; constant-time hardening is
//! out of scope for this crate.

use std::ops::{AddAssign, Neg, SubAssign};

use group::Group;

use super::Scalar;

const WINDOW: u32 = 5;

/// Signed width-w NAF digits of `s`, least significant first.
fn wnaf_digits(s: &Scalar) -> Vec<i8> {
    let bytes = s.to_bytes();
    let mut limbs = [0u64; 5];
    for (i, chunk) in bytes.chunks(8).enumerate() {
        limbs[i] = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
    }
    let width = 1i64 << WINDOW;
    let half = width >> 1;
    let mut digits = Vec::with_capacity(257);
    while limbs.iter().any(|&l| l != 0) {
        let mut d = 0i64;
        if limbs[0] & 1 == 1 {
            d = (limbs[0] & (width as u64 - 1)) as i64;
            if d >= half {
                d -= width;
            }
            if d > 0 {
                sub_small(&mut limbs, d as u64);
            } else {
                add_small(&mut limbs, (-d) as u64);
            }
        }
        digits.push(d as i8);
        shr1(&mut limbs);
    }
    digits
}

fn sub_small(limbs: &mut [u64; 5], v: u64) {
    let mut borrow = v;
    for l in limbs.iter_mut() {
        let (r, b) = l.overflowing_sub(borrow);
        *l = r;
        borrow = b as u64;
        if borrow == 0 {
            break;
        }
    }
}

fn add_small(limbs: &mut [u64; 5], v: u64) {
    let mut carry = v;
    for l in limbs.iter_mut() {
        let (r, c) = l.overflowing_add(carry);
        *l = r;
        carry = c as u64;
        if carry == 0 {
            break;
        }
    }
}

fn shr1(limbs: &mut [u64; 5]) {
    for i in 0..5 {
        limbs[i] >>= 1;
        if i + 1 < 5 {
            limbs[i] |= limbs[i + 1] << 63;
        }
    }
}

/// `Σ bases[i] · scalars[i]`.
///
/// # Panics
///
/// Panics if the slices differ in length.
pub fn msm<G>(bases: &[G], scalars: &[Scalar]) -> G
where
    G: Group + for<'a> AddAssign<&'a G> + for<'a> SubAssign<&'a G> + Neg<Output = G>,
{
    assert_eq!(bases.len(), scalars.len(), "msm length mismatch");
    let table_len = 1usize << (WINDOW - 2);
    let tables: Vec<Vec<G>> = bases
        .iter()
        .map(|b| {
            let twice = b.double();
            let mut t = Vec::with_capacity(table_len);
            t.push(*b);
            for i in 1..table_len {
                t.push(t[i - 1] + twice);
            }
            t
        })
        .collect();
    let digits: Vec<Vec<i8>> = scalars.iter().map(wnaf_digits).collect();
    let len = digits.iter().map(Vec::len).max().unwrap_or(0);
    let mut acc = G::identity();
    for i in (0..len).rev() {
        acc = acc.double();
        for (table, ds) in tables.iter().zip(&digits) {
            match ds.get(i).copied().unwrap_or(0) {
                0 => {}
                d if d > 0 => acc += &table[(d as usize - 1) / 2],
                d => acc -= &table[((-d) as usize - 1) / 2],
            }
        }
    }
    acc
}
