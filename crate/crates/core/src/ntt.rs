//! Recursive mixed-radix NTT over `Z/P` following the plan's split tree.
//!
//! A split node of size `n = n1 * n2` writes `j = j1*n1 + j0` and
//! `k = k2*n2 + k0`:
//!
//! ```text
//! x̂[k2*n2 + k0] = Σ_{j0<n1} ω^(n2*j0*k2) · ω^(j0*k0) · Σ_{j1<n2} x[j1*n1 + j0] ω^(n1*j1*k0)
//! ```
//!
//! i.e. `n1` inner transforms of size `n2`, a twiddle pass, and `n2` outer
//! transforms of size `n1`. Leaves are evaluated either literally or through
//! the residue-channel lookup tables. Every multiplication mod `P` goes through
//! the digit-product tables.

use crate::counts::OpCounts;
use crate::error::{Error, Result};
use crate::numtheory::{inv_mod, mul_mod, pow_mod};
use crate::planner::{SplitTree, TransformPlan};
use crate::tables::digit::add_mod;
use crate::tables::{tabular_mulmod, DigitProductTables, LeafScratch, TableSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeafMode {
    /// Residue-channel table lookup.
    Lookup,
    /// Literal `O(m^2)` evaluation with tabular multiplies.
    Direct,
}

impl LeafMode {
    pub fn name(self) -> &'static str {
        match self {
            LeafMode::Lookup => "lookup",
            LeafMode::Direct => "direct",
        }
    }
}

impl std::str::FromStr for LeafMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lookup" | "lookup_leaves" => Ok(LeafMode::Lookup),
            "direct" | "direct_leaves" => Ok(LeafMode::Direct),
            other => Err(Error::invalid(format!("unknown leaf mode {other:?}"))),
        }
    }
}

/// Coefficients in `[0, P)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldVector {
    values: Vec<u64>,
}

impl FieldVector {
    pub fn new(values: Vec<u64>, p: u64) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v >= p) {
            return Err(Error::invalid(format!("coefficient {v} is not below {p}")));
        }
        Ok(FieldVector { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// A plan with its tables and the power table of `ω`.
#[derive(Debug, Clone)]
pub struct NttEngine {
    plan: TransformPlan,
    tables: TableSet,
    powers: Vec<u64>,
    n_inv: u64,
}

impl NttEngine {
    pub fn new(plan: TransformPlan, tables: TableSet) -> Result<Self> {
        let n = plan.length_n;
        let p = plan.field_prime;
        if tables.digit.modulus() != p || tables.leaf.leaf_primes() != plan.leaf_primes.as_slice() {
            return Err(Error::invalid("tables were built for a different plan"));
        }
        let mut powers = Vec::with_capacity(n);
        let mut w = 1u64;
        for _ in 0..n {
            powers.push(w);
            w = mul_mod(w, plan.root, p);
        }
        let n_inv = inv_mod(n as u64 % p, p).ok_or_else(|| Error::invalid("n is not invertible mod P"))?;
        Ok(NttEngine {
            plan,
            tables,
            powers,
            n_inv,
        })
    }

    /// Plan and build tables in one step.
    pub fn build(plan: TransformPlan) -> Result<Self> {
        let tables = TableSet::build(&plan)?;
        Self::new(plan, tables)
    }

    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }

    pub fn tables(&self) -> &TableSet {
        &self.tables
    }

    pub fn len(&self) -> usize {
        self.plan.length_n
    }

    pub fn is_empty(&self) -> bool {
        self.plan.length_n == 0
    }

    pub fn modulus(&self) -> u64 {
        self.plan.field_prime
    }

    fn check_input(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                actual: x.len(),
            });
        }
        let p = self.modulus();
        if let Some(v) = x.iter().find(|&&v| v >= p) {
            return Err(Error::invalid(format!("coefficient {v} is not below {p}")));
        }
        Ok(())
    }

    /// `x̂_k = Σ_j x_j ω^(jk) mod P`, natural order in and out.
    pub fn forward(&self, x: &[u64], mode: LeafMode, counts: &mut OpCounts) -> Result<Vec<u64>> {
        self.check_input(x)?;
        let mut data = x.to_vec();
        let mut scratch = vec![0u64; data.len()];
        let mut leaf_scratch = LeafScratch::default();
        let mut ctx = Pass {
            engine: self,
            mode,
            counts,
            leaf_scratch: &mut leaf_scratch,
        };
        ctx.run(&self.plan.tree, &mut data, &mut scratch)?;
        Ok(data)
    }

    /// Inverse transform: forward with `ω^-1` (read off the forward output at
    /// negated indices), then scaling by `n^-1`.
    pub fn inverse(&self, y: &[u64], mode: LeafMode, counts: &mut OpCounts) -> Result<Vec<u64>> {
        let f = self.forward(y, mode, counts)?;
        let n = f.len();
        let digit = &self.tables.digit;
        Ok((0..n)
            .map(|k| tabular_mulmod(f[(n - k) % n], self.n_inv, digit, counts))
            .collect())
    }

    /// Cyclic convolution of two length-`n` vectors.
    pub fn convolve(&self, a: &[u64], b: &[u64], mode: LeafMode, counts: &mut OpCounts) -> Result<Vec<u64>> {
        let fa = self.forward(a, mode, counts)?;
        let fb = self.forward(b, mode, counts)?;
        let prod = pointwise_multiply(&fa, &fb, &self.tables.digit, counts)?;
        self.inverse(&prod, mode, counts)
    }

    /// Exact counters of one forward transform, derived from the tree shape.
    pub fn forward_cost(&self, mode: LeafMode) -> OpCounts {
        self.node_cost(&self.plan.tree, mode)
    }

    fn node_cost(&self, node: &SplitTree, mode: LeafMode) -> OpCounts {
        let mul = self.tables.digit.mulmod_cost();
        match node {
            SplitTree::Leaf(s) => match mode {
                LeafMode::Lookup => self.tables.leaf.leaf_cost(*s),
                LeafMode::Direct => {
                    let s = *s as u64;
                    let mut c = OpCounts {
                        mulmod: 0,
                        addmod: s * (s - 1),
                        table_reads: s * s,
                        compares: 0,
                    };
                    for _ in 0..s * s {
                        c += mul;
                    }
                    c
                }
            },
            SplitTree::Split { size, outer, inner } => {
                let mut c = OpCounts::default();
                let n1 = outer.size() as u64;
                let n2 = inner.size() as u64;
                let inner_cost = self.node_cost(inner, mode);
                let outer_cost = self.node_cost(outer, mode);
                for _ in 0..n1 {
                    c += inner_cost;
                }
                for _ in 0..n2 {
                    c += outer_cost;
                }
                for _ in 0..*size {
                    c += mul;
                }
                c.table_reads += *size as u64;
                c
            }
        }
    }
}

struct Pass<'a, 'c> {
    engine: &'a NttEngine,
    mode: LeafMode,
    counts: &'c mut OpCounts,
    leaf_scratch: &'a mut LeafScratch,
}

impl Pass<'_, '_> {
    fn run(&mut self, node: &SplitTree, data: &mut [u64], scratch: &mut [u64]) -> Result<()> {
        match node {
            SplitTree::Leaf(_) => self.leaf(data, scratch),
            SplitTree::Split { size, outer, inner } => {
                let n = self.engine.len();
                let size = *size;
                let n1 = outer.size();
                let n2 = inner.size();
                let stride = n / size;

                // columns: scratch[j0][j1] = x[j1*n1 + j0]
                for j0 in 0..n1 {
                    for j1 in 0..n2 {
                        scratch[j0 * n2 + j1] = data[j1 * n1 + j0];
                    }
                }
                for j0 in 0..n1 {
                    let seg = j0 * n2..(j0 + 1) * n2;
                    self.run(inner, &mut scratch[seg.clone()], &mut data[seg])?;
                }

                // twiddle ω_size^(j0*k0) and transpose to rows: data[k0][j0]
                let digit = &self.engine.tables.digit;
                let powers = &self.engine.powers;
                for j0 in 0..n1 {
                    // e = j0 * k0 mod size, stepped
                    let mut e = 0usize;
                    for k0 in 0..n2 {
                        data[k0 * n1 + j0] = tabular_mulmod(scratch[j0 * n2 + k0], powers[stride * e], digit, self.counts);
                        e += j0;
                        if e >= size {
                            e -= size;
                        }
                    }
                }
                self.counts.table_reads += size as u64;

                for k0 in 0..n2 {
                    let seg = k0 * n1..(k0 + 1) * n1;
                    self.run(outer, &mut data[seg.clone()], &mut scratch[seg])?;
                }

                // x̂[k2*n2 + k0] = rows[k0][k2]
                for k0 in 0..n2 {
                    for k2 in 0..n1 {
                        scratch[k2 * n2 + k0] = data[k0 * n1 + k2];
                    }
                }
                data.copy_from_slice(scratch);
                Ok(())
            }
        }
    }

    fn leaf(&mut self, data: &mut [u64], scratch: &mut [u64]) -> Result<()> {
        match self.mode {
            LeafMode::Lookup => self
                .engine
                .tables
                .leaf
                .transform_leaf(data, self.leaf_scratch, self.counts),
            LeafMode::Direct => {
                let s = data.len();
                let stride = self.engine.len() / s;
                direct_dft(
                    data,
                    &mut scratch[..s],
                    |e| self.engine.powers[stride * e],
                    &self.engine.tables.digit,
                    self.counts,
                );
                data.copy_from_slice(&scratch[..s]);
                Ok(())
            }
        }
    }
}

/// `out[k] = Σ_j x[j] · w^(jk mod s)` with `s^2` tabular multiplies and `s^2`
/// power-table reads.
fn direct_dft(
    x: &[u64],
    out: &mut [u64],
    power: impl Fn(usize) -> u64,
    digit: &DigitProductTables,
    counts: &mut OpCounts,
) {
    let s = x.len();
    let p = digit.modulus();
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0u64;
        let mut e = 0usize;
        for (j, &v) in x.iter().enumerate() {
            let term = tabular_mulmod(v, power(e), digit, counts);
            acc = if j == 0 { term } else { add_mod(acc, term, p) };
            e += k;
            if e >= s {
                e -= s;
            }
        }
        *slot = acc;
    }
    counts.table_reads += (s * s) as u64;
    counts.addmod += (s * (s - 1)) as u64;
}

/// Literal `m`-point DFT with root `root` (which must have order `m`).
pub fn base_case_direct(
    x: &[u64],
    root: u64,
    digit: &DigitProductTables,
    counts: &mut OpCounts,
) -> Result<Vec<u64>> {
    let s = x.len();
    let p = digit.modulus();
    if s == 0 {
        return Ok(Vec::new());
    }
    if pow_mod(root, s as u64, p) != 1 {
        return Err(Error::invalid(format!("{root}^{s} != 1 mod {p}")));
    }
    if let Some(v) = x.iter().find(|&&v| v >= p) {
        return Err(Error::invalid(format!("coefficient {v} is not below {p}")));
    }
    let powers: Vec<u64> = (0..s as u64).map(|e| pow_mod(root, e, p)).collect();
    let mut out = vec![0; s];
    direct_dft(x, &mut out, |e| powers[e], digit, counts);
    Ok(out)
}

/// Element-wise tabular product.
pub fn pointwise_multiply(
    a: &[u64],
    b: &[u64],
    digit: &DigitProductTables,
    counts: &mut OpCounts,
) -> Result<Vec<u64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| tabular_mulmod(x, y, digit, counts))
        .collect())
}

pub fn ntt_forward(engine: &NttEngine, x: &FieldVector, mode: LeafMode, counts: &mut OpCounts) -> Result<FieldVector> {
    Ok(FieldVector {
        values: engine.forward(x.values(), mode, counts)?,
    })
}

pub fn ntt_inverse(engine: &NttEngine, y: &FieldVector, mode: LeafMode, counts: &mut OpCounts) -> Result<FieldVector> {
    Ok(FieldVector {
        values: engine.inverse(y.values(), mode, counts)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::{make_plan, make_plan_with, PlanOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn engine_n4() -> NttEngine {
        let mut plan = make_plan(4, 1 << 30, 0).unwrap();
        // pin ω = 2 so the example values apply
        plan.root = 2;
        NttEngine::build(plan).unwrap()
    }

    // hand evaluation of Σ x_j 2^(jk) mod 5
    #[test]
    fn forward_example() {
        let e = engine_n4();
        for mode in [LeafMode::Lookup, LeafMode::Direct] {
            let mut c = OpCounts::new();
            assert_eq!(e.forward(&[1, 2, 3, 4], mode, &mut c).unwrap(), vec![0, 4, 3, 2]);
            assert_eq!(e.forward(&[0; 4], mode, &mut c).unwrap(), vec![0; 4]);
            assert_eq!(e.forward(&[1, 0, 0, 0], mode, &mut c).unwrap(), vec![1; 4]);
            assert_eq!(e.inverse(&[0, 4, 3, 2], mode, &mut c).unwrap(), vec![1, 2, 3, 4]);
            assert_eq!(e.inverse(&[0; 4], mode, &mut c).unwrap(), vec![0; 4]);
        }
    }

    #[test]
    fn length_and_range_errors() {
        let e = engine_n4();
        let mut c = OpCounts::new();
        assert!(matches!(
            e.forward(&[1, 2, 3], LeafMode::Direct, &mut c),
            Err(Error::LengthMismatch { expected: 4, actual: 3 })
        ));
        assert!(e.forward(&[5, 0, 0, 0], LeafMode::Direct, &mut c).is_err());
        assert!(e.inverse(&[0; 5], LeafMode::Lookup, &mut c).is_err());
    }

    #[test]
    fn base_case_examples() {
        let t = DigitProductTables::build(5, 2).unwrap();
        let mut c = OpCounts::new();
        assert_eq!(base_case_direct(&[1, 1], 4, &t, &mut c).unwrap(), vec![2, 0]);
        assert_eq!(base_case_direct(&[0, 0], 4, &t, &mut c).unwrap(), vec![0, 0]);
        assert_eq!(base_case_direct(&[3], 1, &t, &mut c).unwrap(), vec![3]);
        for a in 0..5 {
            for b in 0..5 {
                let out = base_case_direct(&[a, b], 4, &t, &mut c).unwrap();
                assert_eq!(out, vec![(a + b) % 5, (a + 4 * b) % 5]);
            }
        }
        assert!(base_case_direct(&[1, 1], 2, &t, &mut c).is_err());
    }

    #[test]
    fn base_case_counts_m_squared() {
        let t = DigitProductTables::build(17, 4).unwrap();
        let mut c = OpCounts::new();
        base_case_direct(&[1, 2, 3, 4], 4, &t, &mut c).unwrap();
        assert_eq!(c.mulmod, 16);
    }

    #[test]
    fn pointwise_examples() {
        let t = DigitProductTables::build(5, 2).unwrap();
        let mut c = OpCounts::new();
        assert_eq!(pointwise_multiply(&[1, 2], &[3, 4], &t, &mut c).unwrap(), vec![3, 3]);
        assert_eq!(pointwise_multiply(&[4, 2], &[1, 1], &t, &mut c).unwrap(), vec![4, 2]);
        assert_eq!(pointwise_multiply(&[4, 2], &[0, 0], &t, &mut c).unwrap(), vec![0, 0]);
        assert!(pointwise_multiply(&[1], &[1, 2], &t, &mut c).is_err());
    }

    #[test]
    fn counts_match_closed_form() {
        for target in [16u64, 100, 256, 1000] {
            let e = NttEngine::build(make_plan_with(target, &PlanOptions::default()).unwrap()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(target);
            let x: Vec<u64> = (0..e.len()).map(|_| rng.gen_range(0..e.modulus())).collect();
            for mode in [LeafMode::Lookup, LeafMode::Direct] {
                let mut c = OpCounts::new();
                e.forward(&x, mode, &mut c).unwrap();
                assert_eq!(c, e.forward_cost(mode), "target {target} {mode:?}");
            }
        }
    }

    // n = 16, m = 2: a 4 x 4 split of two 2 x 2 splits.
    // top: 16 twiddles; each of the 8 size-4 nodes: 4 twiddles + 4 leaves of 4
    // multiplies. 16 + 8 * (4 + 16) = 176.
    #[test]
    fn direct_mulmod_hand_count_n16() {
        let opts = PlanOptions {
            base_size: Some(2),
            ..PlanOptions::default()
        };
        let plan = make_plan_with(16, &opts).unwrap();
        assert_eq!(plan.tree_levels, vec![vec![16], vec![4, 4], vec![2, 2, 2, 2]]);
        let e = NttEngine::build(plan).unwrap();
        let mut c = OpCounts::new();
        e.forward(&[1; 16], LeafMode::Direct, &mut c).unwrap();
        assert_eq!(c.mulmod, 176);
        let mut c = OpCounts::new();
        e.forward(&[1; 16], LeafMode::Lookup, &mut c).unwrap();
        assert_eq!(c.mulmod, 48);
    }
}
