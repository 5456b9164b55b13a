//! Brute-force references. Nothing here touches the tables, the planner or the
//! transform engine.

use num_bigint::BigUint;

use crate::error::{Error, Result};

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// `x̂_k = Σ_j x_j ω^(jk) mod P` by the double loop.
pub fn naive_dft(x: &[u64], omega: u64, p: u64) -> Vec<u64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    let mut wk = 1u64 % p;
    for _ in 0..n {
        let mut acc = 0u128;
        let mut w = 1u64 % p;
        for &v in x {
            acc = (acc + mulmod(v % p, w, p) as u128) % p as u128;
            w = mulmod(w, wk, p);
        }
        out.push(acc as u64);
        wk = mulmod(wk, omega, p);
    }
    out
}

/// `c_k = Σ_{i+j ≡ k mod n} a_i b_j mod P`.
pub fn cyclic_convolution(a: &[u64], b: &[u64], p: u64) -> Result<Vec<u64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let n = a.len();
    let mut out = vec![0u64; n];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let k = (i + j) % n;
            out[k] = ((out[k] as u128 + mulmod(x % p, y % p, p) as u128) % p as u128) as u64;
        }
    }
    Ok(out)
}

/// Digit-by-digit product over 64-bit limbs.
pub fn schoolbook_multiply(a: &BigUint, b: &BigUint) -> BigUint {
    let x = a.to_u64_digits();
    let y = b.to_u64_digits();
    if x.is_empty() || y.is_empty() {
        return BigUint::default();
    }
    let mut out = vec![0u64; x.len() + y.len()];
    for (i, &xi) in x.iter().enumerate() {
        let mut carry = 0u128;
        for (j, &yj) in y.iter().enumerate() {
            let t = xi as u128 * yj as u128 + out[i + j] as u128 + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        let mut k = i + y.len();
        while carry != 0 {
            let t = out[k] as u128 + carry;
            out[k] = t as u64;
            carry = t >> 64;
            k += 1;
        }
    }
    let limbs: Vec<u32> = out.iter().flat_map(|&w| [w as u32, (w >> 32) as u32]).collect();
    BigUint::new(limbs)
}
