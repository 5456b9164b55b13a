//! `NTTB` v1 table files.
//!
//! Layout, every integer a little-endian `u64` word unless noted:
//!
//! ```text
//! magic    b"NTTB"                       4 bytes
//! version  1                             u32
//! header   n, P, ω, R, L, m, Z, q_1..q_Z
//! section  digit-product   [ℓ][a][b]                     (2d-1)·R² words
//! section  forward         [k][j][x]                     d·Z·R words
//! section  leaf dft        count, then per leaf size s:
//!                          s, then per channel q^s·s outputs, tuple-major
//! section  combine         per channel, q values as (lo, hi) word pairs
//! section  fold            [i][x]                        D_M·R words
//! ```
//!
//! Each section is prefixed by its length in words. Tuples are packed
//! mixed-radix with position 0 most significant.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::planner::{leaf_table_entries, TransformPlan};
use crate::tables::digit::DigitProductTables;
use crate::tables::leaf::{LeafDftTables, LeafTables};
use crate::tables::TableSet;

pub const MAGIC: &[u8; 4] = b"NTTB";
pub const VERSION: u32 = 1;

const MAX_LEAF_PRIMES: u64 = 64;

pub fn to_bytes(plan: &TransformPlan, tables: &TableSet) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let mut words = vec![
        plan.length_n as u64,
        plan.field_prime,
        plan.root,
        plan.digit_base,
        plan.linnik_l as u64,
        plan.base_size as u64,
        plan.leaf_primes.len() as u64,
    ];
    words.extend(&plan.leaf_primes);
    push_words(&mut out, &words);

    push_section(&mut out, tables.digit.entries().iter().copied());
    push_section(&mut out, tables.leaf.forward().iter().map(|&v| v as u64));

    let mut dft = vec![tables.leaf.dft_tables().len() as u64];
    for t in tables.leaf.dft_tables() {
        dft.push(t.size as u64);
        for channel in &t.channels {
            dft.extend(channel.iter().map(|&v| v as u64));
        }
    }
    push_section(&mut out, dft.into_iter());

    push_section(
        &mut out,
        tables
            .leaf
            .combine()
            .iter()
            .flatten()
            .flat_map(|&v| [v as u64, (v >> 64) as u64]),
    );
    push_section(&mut out, tables.leaf.fold().iter().copied());
    out
}

fn push_words(out: &mut Vec<u8>, words: &[u64]) {
    for w in words {
        out.extend_from_slice(&w.to_le_bytes());
    }
}

fn push_section(out: &mut Vec<u8>, words: impl Iterator<Item = u64>) {
    let words: Vec<u64> = words.collect();
    push_words(out, &[words.len() as u64]);
    push_words(out, &words);
}

pub fn write_tables<W: Write>(mut w: W, plan: &TransformPlan, tables: &TableSet) -> Result<()> {
    w.write_all(&to_bytes(plan, tables)).map_err(FormatError::from)?;
    Ok(())
}

pub fn save(path: impl AsRef<Path>, plan: &TransformPlan, tables: &TableSet) -> Result<()> {
    fs::write(path, to_bytes(plan, tables)).map_err(FormatError::from)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<(TransformPlan, TableSet)> {
    let bytes = fs::read(path).map_err(FormatError::from)?;
    from_bytes(&bytes)
}

struct Words<'a> {
    bytes: &'a [u8],
}

impl Words<'_> {
    fn word(&mut self) -> Result<u64, FormatError> {
        if self.bytes.len() < 8 {
            return Err(FormatError::Truncated);
        }
        let (head, rest) = self.bytes.split_at(8);
        self.bytes = rest;
        Ok(u64::from_le_bytes(head.try_into().unwrap()))
    }

    fn section(&mut self, expected: u128, what: &str) -> Result<Vec<u64>, FormatError> {
        let len = self.word()?;
        if len as u128 != expected {
            return Err(FormatError::Malformed(format!(
                "{what} section holds {len} words, expected {expected}"
            )));
        }
        if (self.bytes.len() as u128) < expected * 8 {
            return Err(FormatError::Truncated);
        }
        (0..len).map(|_| self.word()).collect()
    }
}

fn malformed(e: Error) -> FormatError {
    match e {
        Error::Format(f) => f,
        other => FormatError::Malformed(other.to_string()),
    }
}

fn check_below(values: &[u64], bound: u64, what: &str) -> Result<(), FormatError> {
    match values.iter().find(|&&v| v >= bound) {
        Some(v) => Err(FormatError::Malformed(format!("{what} entry {v} is not below {bound}"))),
        None => Ok(()),
    }
}

pub fn from_bytes(bytes: &[u8]) -> Result<(TransformPlan, TableSet)> {
    Ok(parse(bytes)?)
}

fn parse(bytes: &[u8]) -> Result<(TransformPlan, TableSet), FormatError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(FormatError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let mut rd = Words { bytes: &bytes[8..] };
    let n = rd.word()?;
    let p = rd.word()?;
    let root = rd.word()?;
    let radix = rd.word()?;
    let linnik = rd.word()?;
    let m = rd.word()?;
    let z = rd.word()?;
    if z == 0 || z > MAX_LEAF_PRIMES {
        return Err(FormatError::Malformed(format!("{z} leaf primes")));
    }
    let primes: Vec<u64> = (0..z).map(|_| rd.word()).collect::<Result<_, _>>()?;
    if linnik > u32::MAX as u64 || m < 2 || m > n {
        return Err(FormatError::Malformed(format!("header L = {linnik}, m = {m}, n = {n}")));
    }
    let plan = TransformPlan::from_parts(n, p, root, radix, linnik as u32, m as usize, primes)
        .map_err(malformed)?;
    let layout = plan.layout();
    let d = layout.field_digits() as u128;
    let r = radix as u128;

    let digit = rd.section((2 * d - 1) * r * r, "digit-product")?;
    check_below(&digit, p, "digit-product")?;
    let digit = DigitProductTables::from_entries(p, radix, digit).map_err(malformed)?;

    let forward = rd.section(d * z as u128 * r, "forward")?;
    for (i, chunk) in forward.chunks(radix as usize).enumerate() {
        check_below(chunk, plan.leaf_primes[i % z as usize], "forward")?;
    }
    let forward: Vec<u32> = forward.into_iter().map(|v| v as u32).collect();

    let mut dft_len = 1u128;
    for &s in &layout.leaf_sizes {
        dft_len += 1;
        for &q in &plan.leaf_primes {
            dft_len += leaf_table_entries(q, s).map_err(malformed)? * s as u128;
        }
    }
    let dft_words = rd.section(dft_len, "leaf dft")?;
    let mut cursor = dft_words.into_iter();
    let count = cursor.next().unwrap_or(0);
    if count != layout.leaf_sizes.len() as u64 {
        return Err(FormatError::Malformed(format!("{count} leaf sizes")));
    }
    let mut dft = Vec::new();
    for &s in &layout.leaf_sizes {
        let stored = cursor.next().unwrap_or(0);
        if stored != s as u64 {
            return Err(FormatError::Malformed(format!("leaf size {stored}, expected {s}")));
        }
        let mut channels = Vec::new();
        for &q in &plan.leaf_primes {
            let len = (leaf_table_entries(q, s).map_err(malformed)? * s as u128) as usize;
            let channel: Vec<u64> = cursor.by_ref().take(len).collect();
            check_below(&channel, q, "leaf dft")?;
            channels.push(channel.into_iter().map(|v| v as u32).collect());
        }
        dft.push(LeafDftTables { size: s, channels });
    }

    let modulus = layout.crt_modulus();
    let total_q: u128 = plan.leaf_primes.iter().map(|&q| q as u128).sum();
    let combine_words = rd.section(2 * total_q, "combine")?;
    let mut pairs = combine_words
        .chunks(2)
        .map(|w| w[0] as u128 | (w[1] as u128) << 64);
    let mut combine = Vec::new();
    for &q in &plan.leaf_primes {
        let channel: Vec<u128> = pairs.by_ref().take(q as usize).collect();
        if let Some(v) = channel.iter().find(|&&v| v >= modulus) {
            return Err(FormatError::Malformed(format!("combine entry {v} is not below {modulus}")));
        }
        combine.push(channel);
    }

    let fold = rd.section(layout.crt_digits() as u128 * r, "fold")?;
    check_below(&fold, p, "fold")?;

    if !rd.bytes.is_empty() {
        return Err(FormatError::Malformed(format!("{} trailing bytes", rd.bytes.len())));
    }
    let leaf = LeafTables::from_parts(&plan, forward, dft, combine, fold);
    Ok((plan, TableSet { digit, leaf }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::make_plan;

    fn sample() -> (TransformPlan, TableSet) {
        let plan = make_plan(16, 1 << 20, 0).unwrap();
        let tables = TableSet::build(&plan).unwrap();
        (plan, tables)
    }

    #[test]
    fn roundtrip_preserves_tables() {
        let (plan, tables) = sample();
        let bytes = to_bytes(&plan, &tables);
        assert_eq!(&bytes[..4], b"NTTB");
        let (plan2, tables2) = from_bytes(&bytes).unwrap();
        assert_eq!(tables, tables2);
        assert_eq!(plan2.field_prime, plan.field_prime);
        assert_eq!(plan2.root, plan.root);
        assert_eq!(plan2.tree, plan.tree);
        assert_eq!(plan2.leaf_primes, plan.leaf_primes);
        assert_eq!(to_bytes(&plan2, &tables2), bytes);
    }

    #[test]
    fn header_words_are_little_endian() {
        let (plan, tables) = sample();
        let bytes = to_bytes(&plan, &tables);
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 16);
        assert_eq!(u64::from_le_bytes(bytes[16..24].try_into().unwrap()), 17);
    }

    #[test]
    fn rejects_corruption() {
        let (plan, tables) = sample();
        let bytes = to_bytes(&plan, &tables);

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::BadMagic))));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(matches!(
            from_bytes(&bad),
            Err(Error::Format(FormatError::UnsupportedVersion(2)))
        ));

        assert!(matches!(
            from_bytes(&bytes[..bytes.len() - 3]),
            Err(Error::Format(FormatError::Truncated))
        ));

        let mut bad = bytes.clone();
        bad.push(0);
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::Malformed(_)))));

        // root that is not of order n
        let mut bad = bytes.clone();
        bad[24..32].copy_from_slice(&1u64.to_le_bytes());
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::Malformed(_)))));

        // an out-of-range table entry in the last section
        let mut bad = bytes.clone();
        let len = bad.len();
        bad[len - 8..].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(from_bytes(&bad), Err(Error::Format(FormatError::Malformed(_)))));
    }
}
