//! Residue-channel tables for the leaves of the recursion.
//!
//! A coefficient `c < P` is moved into residues modulo the small leaf primes
//! `q_j` by summing `x_k * R^k mod q_j` over its base-`R` digits. Each channel
//! then answers a whole leaf transform with one read from a table indexed by
//! the packed residue tuple. Because every leaf output is an integer below
//! `m * P^2 < Π q_j`, the channel outputs recombine to the exact integer,
//! which is then folded back modulo `P`.

use crate::counts::OpCounts;
use crate::error::{Error, Result};
use crate::numtheory::{inv_mod, pow_mod};
use crate::planner::{bits_for, leaf_table_entries, TransformPlan};
use crate::tables::digit::{ladder, ladder_steps_for, ladder_wide};

/// One coefficient as residues aligned with the leaf primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueTuple {
    pub residues: Vec<u64>,
}

/// Leaf transform tables for one leaf size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafDftTables {
    pub size: usize,
    /// Per channel, `q^size` tuples of `size` outputs, tuple-major.
    pub channels: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafTables {
    field_prime: u64,
    digit_bits: u32,
    field_digits: usize,
    leaf_primes: Vec<u64>,
    /// `[k][j][x] = x * R^k mod q_j`
    forward: Vec<u32>,
    dft: Vec<LeafDftTables>,
    /// `[j][r] = r * M_j * (M_j^-1 mod q_j) mod M`
    combine: Vec<Vec<u128>>,
    crt_modulus: u128,
    crt_digits: usize,
    /// `[i][x] = x * R^i mod P` for the digits of a value below `M`
    fold: Vec<u64>,
}

/// Matrix entries `ω_s^(i*k) mod P` of a size-`s` leaf, as plain integers.
pub fn leaf_matrix(plan: &TransformPlan, size: usize) -> Vec<u64> {
    let n = plan.length_n as u64;
    let p = plan.field_prime;
    let root = pow_mod(plan.root, n / size as u64, p);
    let mut m = Vec::with_capacity(size * size);
    for i in 0..size {
        for k in 0..size {
            m.push(pow_mod(root, ((i * k) % size) as u64, p));
        }
    }
    m
}

/// Mixed-radix index of a residue tuple, position 0 most significant.
pub fn pack_tuple(residues: &[u64], q: u64) -> u64 {
    residues.iter().fold(0, |acc, &r| acc * q + r)
}

pub fn unpack_tuple(mut index: u64, q: u64, size: usize) -> Vec<u64> {
    let mut out = vec![0; size];
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    out
}

fn build_channel(q: u64, size: usize, matrix: &[u64]) -> Result<Vec<u32>> {
    let entries = leaf_table_entries(q, size)? as usize;
    let w: Vec<u64> = matrix.iter().map(|&v| v % q).collect();
    let mut out = vec![0u32; entries * size];
    let mut tuple = vec![0u64; size];
    for t in 0..entries {
        let row = &mut out[t * size..(t + 1) * size];
        for (k, slot) in row.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (i, &x) in tuple.iter().enumerate() {
                acc += x * w[i * size + k];
            }
            *slot = (acc % q) as u32;
        }
        // advance the odometer, last position fastest
        for slot in tuple.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

/// Scratch space reused across leaves.
#[derive(Debug, Default)]
pub struct LeafScratch {
    residues: Vec<u32>,
    outputs: Vec<u32>,
}

impl LeafTables {
    pub fn build(plan: &TransformPlan) -> Result<Self> {
        let layout = plan.layout();
        let p = plan.field_prime;
        let radix = layout.radix();
        let field_digits = layout.field_digits();
        let primes = plan.leaf_primes.clone();

        let mut forward = Vec::with_capacity(field_digits * primes.len() * radix as usize);
        for k in 0..field_digits {
            for &q in &primes {
                let shift = pow_mod(radix % q, k as u64, q);
                for x in 0..radix {
                    forward.push((x % q * shift % q) as u32);
                }
            }
        }

        let mut dft = Vec::new();
        for &size in &layout.leaf_sizes {
            let matrix = leaf_matrix(plan, size);
            let channels = primes
                .iter()
                .map(|&q| build_channel(q, size, &matrix))
                .collect::<Result<Vec<_>>>()?;
            dft.push(LeafDftTables { size, channels });
        }

        let modulus = layout.crt_modulus();
        let combine = primes
            .iter()
            .map(|&q| {
                let cofactor = modulus / q as u128;
                let inv = inv_mod((cofactor % q as u128) as u64, q).expect("leaf primes are distinct");
                (0..q).map(|r| cofactor * (r * inv % q) as u128).collect()
            })
            .collect();

        let crt_digits = layout.crt_digits();
        let mut fold = Vec::with_capacity(crt_digits * radix as usize);
        for i in 0..crt_digits {
            let shift = pow_mod(radix % p, i as u64, p);
            for x in 0..radix {
                fold.push((x as u128 * shift as u128 % p as u128) as u64);
            }
        }

        Ok(LeafTables {
            field_prime: p,
            digit_bits: plan.digit_bits,
            field_digits,
            leaf_primes: primes,
            forward,
            dft,
            combine,
            crt_modulus: modulus,
            crt_digits,
            fold,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        plan: &TransformPlan,
        forward: Vec<u32>,
        dft: Vec<LeafDftTables>,
        combine: Vec<Vec<u128>>,
        fold: Vec<u64>,
    ) -> Self {
        let layout = plan.layout();
        LeafTables {
            field_prime: plan.field_prime,
            digit_bits: plan.digit_bits,
            field_digits: layout.field_digits(),
            leaf_primes: plan.leaf_primes.clone(),
            forward,
            dft,
            combine,
            crt_modulus: layout.crt_modulus(),
            crt_digits: layout.crt_digits(),
            fold,
        }
    }

    pub fn leaf_primes(&self) -> &[u64] {
        &self.leaf_primes
    }

    pub fn crt_modulus(&self) -> u128 {
        self.crt_modulus
    }

    pub fn field_digits(&self) -> usize {
        self.field_digits
    }

    pub fn crt_digits(&self) -> usize {
        self.crt_digits
    }

    pub fn radix(&self) -> u64 {
        1 << self.digit_bits
    }

    pub fn forward_entry(&self, k: usize, j: usize, x: u64) -> u64 {
        let z = self.leaf_primes.len();
        self.forward[(k * z + j) * self.radix() as usize + x as usize] as u64
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn dft_tables(&self) -> &[LeafDftTables] {
        &self.dft
    }

    pub fn dft_for(&self, size: usize) -> Option<&LeafDftTables> {
        self.dft.iter().find(|t| t.size == size)
    }

    /// Outputs stored for `tuple` in channel `j` of the size-`tuple.len()` tables.
    pub fn dft_entry(&self, j: usize, tuple: &[u64]) -> Option<&[u32]> {
        let size = tuple.len();
        let table = self.dft_for(size)?;
        let idx = pack_tuple(tuple, self.leaf_primes[j]) as usize;
        Some(&table.channels[j][idx * size..(idx + 1) * size])
    }

    pub fn combine(&self) -> &[Vec<u128>] {
        &self.combine
    }

    pub fn fold(&self) -> &[u64] {
        &self.fold
    }

    /// Exact bit size of all four families.
    pub fn table_bits(&self) -> u128 {
        let field = bits_for(self.field_prime as u128) as u128;
        let radix = self.radix() as usize;
        let forward: u128 = self
            .forward
            .chunks(radix)
            .enumerate()
            .map(|(i, chunk)| {
                let q = self.leaf_primes[i % self.leaf_primes.len()];
                chunk.len() as u128 * bits_for(q as u128) as u128
            })
            .sum();
        let dft: u128 = self
            .dft
            .iter()
            .flat_map(|t| {
                t.channels
                    .iter()
                    .zip(&self.leaf_primes)
                    .map(|(c, &q)| c.len() as u128 * bits_for(q as u128) as u128)
            })
            .sum();
        let combine: u128 = self
            .combine
            .iter()
            .map(|c| c.len() as u128 * bits_for(self.crt_modulus) as u128)
            .sum();
        forward + dft + combine + self.fold.len() as u128 * field
    }

    fn decompose_into(&self, c: u64, out: &mut [u32], counts: &mut OpCounts) {
        let z = self.leaf_primes.len();
        let d = self.field_digits;
        let r = self.digit_bits;
        let radix = 1usize << r;
        let mask = (radix - 1) as u64;
        let steps = ladder_steps_for(d);
        for (j, slot) in out.iter_mut().enumerate().take(z) {
            let mut sum = 0u64;
            for k in 0..d {
                let x = ((c >> (r as usize * k)) & mask) as usize;
                sum += self.forward[(k * z + j) * radix + x] as u64;
            }
            *slot = ladder(sum, self.leaf_primes[j], steps, counts) as u32;
        }
        counts.table_reads += (z * d) as u64;
        counts.addmod += (z * (d - 1)) as u64;
    }

    fn combine_residues(&self, residues: impl Iterator<Item = u32>, counts: &mut OpCounts) -> u128 {
        let z = self.leaf_primes.len();
        let sum: u128 = residues
            .zip(&self.combine)
            .map(|(r, table)| table[r as usize])
            .sum();
        counts.table_reads += z as u64;
        counts.addmod += z as u64 - 1;
        ladder_wide(sum, self.crt_modulus, ladder_steps_for(z), counts)
    }

    /// Reduce a value below the CRT modulus to `[0, P)` via the fold tables.
    pub fn fold_to_field(&self, v: u128, counts: &mut OpCounts) -> u64 {
        let d = self.crt_digits;
        let r = self.digit_bits;
        let radix = 1usize << r;
        let mask = (radix - 1) as u128;
        let mut sum = 0u64;
        for i in 0..d {
            let x = ((v >> (r as usize * i)) & mask) as usize;
            sum += self.fold[i * radix + x];
        }
        counts.table_reads += d as u64;
        counts.addmod += d as u64 - 1;
        ladder(sum, self.field_prime, ladder_steps_for(d), counts)
    }

    /// Replace `values` (one leaf, entries mod `P`) by its transform via the
    /// channel tables.
    pub(crate) fn transform_leaf(
        &self,
        values: &mut [u64],
        scratch: &mut LeafScratch,
        counts: &mut OpCounts,
    ) -> Result<()> {
        let size = values.len();
        let table = self
            .dft_for(size)
            .ok_or_else(|| Error::invalid(format!("no leaf tables for size {size}")))?;
        let z = self.leaf_primes.len();
        scratch.residues.resize(size * z, 0);
        scratch.outputs.resize(size * z, 0);
        for (i, &c) in values.iter().enumerate() {
            self.decompose_into(c, &mut scratch.residues[i * z..(i + 1) * z], counts);
        }
        for (j, &q) in self.leaf_primes.iter().enumerate() {
            let mut idx = 0usize;
            for i in 0..size {
                idx = idx * q as usize + scratch.residues[i * z + j] as usize;
            }
            let row = &table.channels[j][idx * size..(idx + 1) * size];
            for (k, &v) in row.iter().enumerate() {
                scratch.outputs[k * z + j] = v;
            }
        }
        counts.addmod += (z * (size - 1)) as u64;
        counts.table_reads += z as u64;
        for (k, slot) in values.iter_mut().enumerate() {
            let exact = self.combine_residues(scratch.outputs[k * z..(k + 1) * z].iter().copied(), counts);
            *slot = self.fold_to_field(exact, counts);
        }
        Ok(())
    }

    /// Counters charged by one lookup leaf of the given size.
    pub fn leaf_cost(&self, size: usize) -> OpCounts {
        let z = self.leaf_primes.len() as u64;
        let d = self.field_digits as u64;
        let dm = self.crt_digits as u64;
        let s = size as u64;
        let chain = |terms: u64| ladder_steps_for(terms as usize) as u64 + 1;
        let decompose = OpCounts {
            mulmod: 0,
            addmod: z * (d - 1),
            table_reads: z * d,
            compares: z * chain(d),
        };
        let combine = OpCounts {
            mulmod: 0,
            addmod: (z - 1) + (dm - 1),
            table_reads: z + dm,
            compares: chain(z) + chain(dm),
        };
        let lookup = OpCounts {
            mulmod: 0,
            addmod: z * (s - 1),
            table_reads: z,
            compares: 0,
        };
        let mut total = lookup;
        for _ in 0..size {
            total += decompose;
            total += combine;
        }
        total
    }
}

/// Residues of `c` modulo every leaf prime, using only table reads, additions
/// and one ladder per channel.
pub fn crt_decompose(c: u64, tables: &LeafTables, counts: &mut OpCounts) -> ResidueTuple {
    debug_assert!(c < tables.field_prime);
    let mut out = vec![0u32; tables.leaf_primes.len()];
    tables.decompose_into(c, &mut out, counts);
    ResidueTuple {
        residues: out.into_iter().map(u64::from).collect(),
    }
}

/// The unique value below `Π q_j` with the given residues.
pub fn crt_combine(r: &ResidueTuple, tables: &LeafTables, counts: &mut OpCounts) -> Result<u128> {
    if r.residues.len() != tables.leaf_primes.len() {
        return Err(Error::LengthMismatch {
            expected: tables.leaf_primes.len(),
            actual: r.residues.len(),
        });
    }
    if let Some((&res, &q)) = r.residues.iter().zip(&tables.leaf_primes).find(|(&res, &q)| res >= q) {
        return Err(Error::invalid(format!("residue {res} is not below {q}")));
    }
    Ok(tables.combine_residues(r.residues.iter().map(|&v| v as u32), counts))
}

/// One table read per channel answers the whole size-`m` leaf transform.
pub fn leaf_dft_lookup(
    inputs: &[ResidueTuple],
    tables: &LeafTables,
    counts: &mut OpCounts,
) -> Result<Vec<ResidueTuple>> {
    let size = inputs.len();
    let table = tables
        .dft_for(size)
        .ok_or_else(|| Error::invalid(format!("no leaf tables for size {size}")))?;
    let z = tables.leaf_primes.len();
    let mut outputs = vec![
        ResidueTuple {
            residues: vec![0; z]
        };
        size
    ];
    for (j, &q) in tables.leaf_primes.iter().enumerate() {
        let mut idx = 0u64;
        for input in inputs {
            let r = *input.residues.get(j).ok_or(Error::LengthMismatch {
                expected: z,
                actual: input.residues.len(),
            })?;
            if r >= q {
                return Err(Error::invalid(format!("residue {r} is not below {q}")));
            }
            idx = idx * q + r;
        }
        let row = &table.channels[j][idx as usize * size..(idx as usize + 1) * size];
        for (out, &v) in outputs.iter_mut().zip(row) {
            out.residues[j] = v as u64;
        }
    }
    counts.addmod += (z * (size - 1)) as u64;
    counts.table_reads += z as u64;
    Ok(outputs)
}
