//! Multiplication modulo `P` by digit-product table reads.
//!
//! Operands are split into `d` base-`R` digits. Table `ℓ` holds
//! `a * b * R^ℓ mod P` for every digit pair, so a product is `d^2` reads, the
//! additions between them, and one compare-subtract ladder.

use crate::counts::OpCounts;
use crate::error::{Error, Result};
use crate::planner::bits_for;

/// Digit-product tables are refused above this many entries.
pub const MAX_DIGIT_TABLE_ENTRIES: u64 = 1 << 26;

/// Most digits a field element may be split into.
pub const MAX_DIGITS: usize = 8;

/// Field primes must stay below this so `d^2 * P` fits a word.
pub const MAX_FIELD_BITS: u32 = 56;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitProductTables {
    p: u64,
    digit_bits: u32,
    digits: usize,
    /// `log2` of the ladder length for a sum of `d^2` terms.
    ladder_steps: u32,
    entries: Vec<u64>,
}

/// Smallest power of two `>= n`, as its exponent.
pub(crate) fn ladder_steps_for(terms: usize) -> u32 {
    terms.max(1).next_power_of_two().trailing_zeros()
}

impl DigitProductTables {
    pub fn build(p: u64, radix: u64) -> Result<Self> {
        if !radix.is_power_of_two() || radix < 2 {
            return Err(Error::invalid(format!("digit base {radix} is not a power of two >= 2")));
        }
        if p < 2 {
            return Err(Error::invalid("modulus must be >= 2"));
        }
        let field_bits = bits_for(p as u128);
        if field_bits > MAX_FIELD_BITS {
            return Err(Error::Capacity(format!(
                "field prime needs {field_bits} bits, limit is {MAX_FIELD_BITS}"
            )));
        }
        let digit_bits = radix.trailing_zeros();
        let digits = field_bits.div_ceil(digit_bits) as usize;
        if digits > MAX_DIGITS {
            return Err(Error::Capacity(format!(
                "{digits} digits of {digit_bits} bits per field element, limit is {MAX_DIGITS}"
            )));
        }
        let levels = 2 * digits as u64 - 1;
        let count = levels
            .checked_mul(radix * radix)
            .filter(|&c| c <= MAX_DIGIT_TABLE_ENTRIES)
            .ok_or(Error::Budget {
                needed: levels as u128 * (radix as u128).pow(2),
                cap: MAX_DIGIT_TABLE_ENTRIES as u128,
            })?;

        let mut entries = Vec::with_capacity(count as usize);
        let mut shift = 1 % p; // R^ℓ mod P
        for _ in 0..levels {
            for a in 0..radix {
                let row = (a as u128 * shift as u128 % p as u128) as u64;
                let mut acc = 0u64;
                for _ in 0..radix {
                    entries.push(acc);
                    acc = add_mod(acc, row, p);
                }
            }
            shift = (shift as u128 * radix as u128 % p as u128) as u64;
        }
        Self::from_entries(p, radix, entries)
    }

    pub(crate) fn from_entries(p: u64, radix: u64, entries: Vec<u64>) -> Result<Self> {
        let digit_bits = radix.trailing_zeros();
        let digits = bits_for(p as u128).div_ceil(digit_bits) as usize;
        if digits > MAX_DIGITS {
            return Err(Error::Capacity(format!("{digits} digits per field element")));
        }
        let expected = (2 * digits - 1) * (radix * radix) as usize;
        if entries.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: entries.len(),
            });
        }
        Ok(DigitProductTables {
            p,
            digit_bits,
            digits,
            ladder_steps: ladder_steps_for(digits * digits),
            entries,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn radix(&self) -> u64 {
        1 << self.digit_bits
    }

    pub fn digit_bits(&self) -> u32 {
        self.digit_bits
    }

    pub fn digits(&self) -> usize {
        self.digits
    }

    pub fn levels(&self) -> usize {
        2 * self.digits - 1
    }

    /// `a * b * R^level mod P` for digits `a, b < R`.
    pub fn entry(&self, level: usize, a: u64, b: u64) -> u64 {
        let r = self.radix() as usize;
        self.entries[(level * r + a as usize) * r + b as usize]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn table_bits(&self) -> u128 {
        self.entries.len() as u128 * bits_for(self.p as u128) as u128
    }

    /// Counters charged by one [`tabular_mulmod`]; identical for every operand pair.
    pub fn mulmod_cost(&self) -> OpCounts {
        let pairs = (self.digits * self.digits) as u64;
        OpCounts {
            mulmod: 1,
            addmod: pairs - 1,
            table_reads: pairs,
            compares: self.ladder_steps as u64 + 1,
        }
    }

    #[inline]
    pub(crate) fn mul(&self, a: u64, b: u64, counts: &mut OpCounts) -> u64 {
        let pairs = (self.digits * self.digits) as u64;
        counts.mulmod += 1;
        counts.table_reads += pairs;
        counts.addmod += pairs - 1;
        counts.compares += self.ladder_steps as u64 + 1;
        self.product(a, b)
    }

    #[inline(always)]
    fn product(&self, a: u64, b: u64) -> u64 {
        match self.digits {
            1 => self.product_n::<1>(a, b),
            2 => self.product_n::<2>(a, b),
            3 => self.product_n::<3>(a, b),
            4 => self.product_n::<4>(a, b),
            5 => self.product_n::<5>(a, b),
            6 => self.product_n::<6>(a, b),
            7 => self.product_n::<7>(a, b),
            _ => self.product_n::<MAX_DIGITS>(a, b),
        }
    }

    #[inline(always)]
    fn product_n<const D: usize>(&self, a: u64, b: u64) -> u64 {
        let r = self.digit_bits;
        let mask = (1u64 << r) - 1;
        let row = 1usize << r;
        let plane = row << r;
        let window_len = (D - 1) * plane + row;

        let b_offsets: [usize; D] = std::array::from_fn(|k| k * plane + ((b >> (r as usize * k)) & mask) as usize);
        let mut sum = 0u64;
        for j in 0..D {
            let base = j * plane + (((a >> (r as usize * j)) & mask) as usize) * row;
            // levels j..j+D cover the window
            let window = &self.entries[base..base + window_len];
            for off in b_offsets {
                sum += window[off];
            }
        }
        // same ladder as `ladder`, with the step count known at compile time
        let steps = (D * D).next_power_of_two().trailing_zeros();
        for i in (0..steps).rev() {
            sum = sub_if_ge(sum, self.p << i);
        }
        sub_if_ge(sum, self.p)
    }
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

/// `(a * b) mod P` using only digit extraction, table reads, additions and the
/// reduction ladder.
#[inline]
pub fn tabular_mulmod(a: u64, b: u64, tables: &DigitProductTables, counts: &mut OpCounts) -> u64 {
    debug_assert!(a < tables.p && b < tables.p);
    tables.mul(a, b, counts)
}

/// Halving compare-subtract ladder: thresholds `P*2^(steps-1), ..., P`, then a
/// final conditional subtract. Requires `v < P * 2^steps`.
#[inline]
pub(crate) fn ladder(mut v: u64, p: u64, steps: u32, counts: &mut OpCounts) -> u64 {
    for i in (0..steps).rev() {
        v = sub_if_ge(v, p << i);
    }
    counts.compares += steps as u64 + 1;
    sub_if_ge(v, p)
}

#[inline(always)]
fn sub_if_ge(v: u64, t: u64) -> u64 {
    let (d, borrow) = v.overflowing_sub(t);
    if borrow {
        v
    } else {
        d
    }
}

#[inline]
pub(crate) fn ladder_wide(mut v: u128, modulus: u128, steps: u32, counts: &mut OpCounts) -> u128 {
    for i in (0..steps).rev() {
        let t = modulus << i;
        if v >= t {
            v -= t;
        }
    }
    if v >= modulus {
        v -= modulus;
    }
    counts.compares += steps as u64 + 1;
    v
}

/// `v mod P` for `v < P * terms` with exactly `log2(terms) + 1` comparisons.
pub fn reduce_chain(v: u64, p: u64, terms: u64, counts: &mut OpCounts) -> Result<u64> {
    if p == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if !terms.is_power_of_two() {
        return Err(Error::invalid(format!("terms = {terms} is not a power of two")));
    }
    if (v as u128) >= (p as u128) * (terms as u128) {
        return Err(Error::invalid(format!("{v} is not below {p} * {terms}")));
    }
    if (p as u128) << (terms.trailing_zeros()) > u64::MAX as u128 {
        return Ok(ladder_wide(v as u128, p as u128, terms.trailing_zeros(), counts) as u64);
    }
    Ok(ladder(v, p, terms.trailing_zeros(), counts))
}
