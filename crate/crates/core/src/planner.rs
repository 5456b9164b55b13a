//! Parameter selection for a preprocessed transform: base-case size, split
//! tree, field prime and root, digit base, and the leaf prime set, all checked
//! against an exact table-size budget.

use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};
use crate::numtheory::{
    find_field_prime_above, find_root_of_unity, first_primes, has_exact_order, ProgressionPrime,
    RootStrategy,
};

/// Linnik exponent used for the field-prime search.
pub const DEFAULT_LINNIK_L: u32 = 5;

/// Floor for the default table budget, in bits.
pub const MIN_DEFAULT_BUDGET_BITS: u64 = 1 << 20;

/// Leaf DFT tables larger than this many entries are refused outright.
pub const MAX_LEAF_TABLE_ENTRIES: u128 = 1 << 32;

/// Widest digit (in bits) used for the digit-product tables.
pub const MAX_DIGIT_BITS: u32 = 8;

const MAX_CRT_MODULUS_BITS: u32 = 120;

/// Number of bits needed to store any value in `[0, modulus)`.
pub fn bits_for(modulus: u128) -> u32 {
    if modulus <= 2 {
        return 1;
    }
    128 - (modulus - 1).leading_zeros()
}

/// Digit width for a field prime: a quarter of its bit length, clamped to
/// `1..=MAX_DIGIT_BITS`.
pub fn digit_bits_for_prime(p: u64) -> u32 {
    bits_for(p as u128).div_ceil(4).clamp(1, MAX_DIGIT_BITS)
}

/// Smallest prefix of the primes whose product strictly exceeds `bound`.
pub fn leaf_primes_exceeding(bound: u128) -> Vec<u64> {
    let mut count = 1;
    loop {
        let primes = first_primes(count);
        let product = primes
            .iter()
            .try_fold(1u128, |acc, &q| acc.checked_mul(q as u128));
        match product {
            Some(prod) if prod > bound => return primes,
            None => return primes,
            _ => count += 1,
        }
    }
}

/// Dimensions of every preprocessed table family for one plan.
///
/// Sizes are exact entry counts times the bit width of the stored residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableLayout {
    pub field_prime: u64,
    pub digit_bits: u32,
    pub leaf_sizes: Vec<usize>,
    pub leaf_primes: Vec<u64>,
}

impl TableLayout {
    pub fn new(field_prime: u64, digit_bits: u32, mut leaf_sizes: Vec<usize>, leaf_primes: Vec<u64>) -> Self {
        leaf_sizes.sort_unstable();
        leaf_sizes.dedup();
        TableLayout {
            field_prime,
            digit_bits,
            leaf_sizes,
            leaf_primes,
        }
    }

    pub fn radix(&self) -> u64 {
        1 << self.digit_bits
    }

    /// Base-R digits of a field element.
    pub fn field_digits(&self) -> usize {
        bits_for(self.field_prime as u128).div_ceil(self.digit_bits) as usize
    }

    pub fn crt_modulus(&self) -> u128 {
        self.leaf_primes.iter().map(|&q| q as u128).product()
    }

    /// Base-R digits of a value below the CRT modulus.
    pub fn crt_digits(&self) -> usize {
        bits_for(self.crt_modulus()).div_ceil(self.digit_bits) as usize
    }

    pub fn digit_product_bits(&self) -> u128 {
        let d = self.field_digits() as u128;
        let r = self.radix() as u128;
        (2 * d - 1) * r * r * bits_for(self.field_prime as u128) as u128
    }

    pub fn forward_bits(&self) -> u128 {
        let per_digit: u128 = self
            .leaf_primes
            .iter()
            .map(|&q| self.radix() as u128 * bits_for(q as u128) as u128)
            .sum();
        self.field_digits() as u128 * per_digit
    }

    pub fn leaf_dft_bits(&self) -> Result<u128> {
        let mut total = 0u128;
        for &s in &self.leaf_sizes {
            for &q in &self.leaf_primes {
                let entries = leaf_table_entries(q, s)?;
                total += entries * s as u128 * bits_for(q as u128) as u128;
            }
        }
        Ok(total)
    }

    pub fn combine_bits(&self) -> u128 {
        let width = bits_for(self.crt_modulus()) as u128;
        self.leaf_primes.iter().map(|&q| q as u128 * width).sum()
    }

    pub fn fold_bits(&self) -> u128 {
        self.crt_digits() as u128 * self.radix() as u128 * bits_for(self.field_prime as u128) as u128
    }

    pub fn total_bits(&self) -> Result<u128> {
        Ok(self.digit_product_bits()
            + self.forward_bits()
            + self.leaf_dft_bits()?
            + self.combine_bits()
            + self.fold_bits())
    }

    fn check_crt_headroom(&self) -> Result<()> {
        let p = self.field_prime as u128;
        let largest = *self.leaf_sizes.iter().max().unwrap_or(&1) as u128;
        let needed = p * p * largest;
        if self.crt_modulus() <= needed {
            return Err(Error::Capacity(format!(
                "leaf prime product {} does not exceed P^2 * s = {needed}",
                self.crt_modulus()
            )));
        }
        if bits_for(self.crt_modulus()) > MAX_CRT_MODULUS_BITS {
            return Err(Error::Capacity(format!(
                "CRT modulus needs {} bits, limit is {MAX_CRT_MODULUS_BITS}",
                bits_for(self.crt_modulus())
            )));
        }
        Ok(())
    }
}

/// `q^s`, the entry count of one leaf DFT table.
pub fn leaf_table_entries(q: u64, s: usize) -> Result<u128> {
    let entries = (q as u128)
        .checked_pow(s as u32)
        .filter(|&e| e <= MAX_LEAF_TABLE_ENTRIES)
        .ok_or(Error::TableOverflow {
            entries: (q as u128).saturating_pow(s as u32),
            limit: MAX_LEAF_TABLE_ENTRIES,
        })?;
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetReport {
    pub m_candidate: usize,
    pub z_count: usize,
    pub leaf_primes: Vec<u64>,
    pub total_table_bits: u128,
    pub budget_bits: u64,
    pub fits: bool,
}

/// Exact table budget for base size `m` over field prime `p`.
pub fn budget_check(m: usize, p: u64, budget_bits: u64) -> Result<BudgetReport> {
    if m < 2 {
        return Err(Error::invalid("base size must be >= 2"));
    }
    if p < 2 {
        return Err(Error::invalid("field prime must be >= 2"));
    }
    layout_report(&[m], p, digit_bits_for_prime(p), budget_bits)
}

fn layout_report(leaf_sizes: &[usize], p: u64, digit_bits: u32, budget_bits: u64) -> Result<BudgetReport> {
    let largest = *leaf_sizes.iter().max().expect("at least one leaf size");
    let bound = (p as u128) * (p as u128) * largest as u128;
    let leaf_primes = leaf_primes_exceeding(bound);
    let layout = TableLayout::new(p, digit_bits, leaf_sizes.to_vec(), leaf_primes);
    let total = layout.total_bits()?;
    Ok(BudgetReport {
        m_candidate: *leaf_sizes.iter().min().unwrap(),
        z_count: layout.leaf_primes.len(),
        leaf_primes: layout.leaf_primes,
        total_table_bits: total,
        budget_bits,
        fits: total <= budget_bits as u128,
    })
}

/// Recursive split of a transform length. Each split node of size `n1*n2`
/// runs `n1` inner transforms of size `n2`, twiddles, then `n2` outer
/// transforms of size `n1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitTree {
    Leaf(usize),
    Split {
        size: usize,
        outer: Box<SplitTree>,
        inner: Box<SplitTree>,
    },
}

impl SplitTree {
    pub fn size(&self) -> usize {
        match self {
            SplitTree::Leaf(s) => *s,
            SplitTree::Split { size, .. } => *size,
        }
    }

    /// Balanced-product bipartition of a factor multiset drawn from two sizes.
    pub fn balanced(factors: &[usize]) -> SplitTree {
        assert!(!factors.is_empty());
        if factors.len() == 1 {
            return SplitTree::Leaf(factors[0]);
        }
        let mut sizes: Vec<usize> = factors.to_vec();
        sizes.sort_unstable();
        sizes.dedup();
        let counts: Vec<usize> = sizes
            .iter()
            .map(|s| factors.iter().filter(|f| *f == s).count())
            .collect();

        // enumerate how many of each size go left; keep the split whose
        // larger half is smallest, then the most even factor counts
        let total: u128 = factors.iter().map(|&f| f as u128).product();
        let mut best: Option<(u128, usize, Vec<usize>)> = None;
        let mut pick = vec![0usize; sizes.len()];
        loop {
            let taken: usize = pick.iter().sum();
            if taken > 0 && taken < factors.len() {
                let left: u128 = sizes
                    .iter()
                    .zip(&pick)
                    .map(|(&s, &c)| (s as u128).pow(c as u32))
                    .product();
                let larger = left.max(total / left);
                let skew = taken.abs_diff(factors.len() - taken);
                let better = match &best {
                    None => true,
                    Some((b_larger, b_skew, _)) => (larger, skew) < (*b_larger, *b_skew),
                };
                if better {
                    best = Some((larger, skew, pick.clone()));
                }
            }
            // odometer over pick[i] in 0..=counts[i]
            let mut i = 0;
            while i < pick.len() {
                if pick[i] < counts[i] {
                    pick[i] += 1;
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
            if i == pick.len() {
                break;
            }
        }
        let (_, _, pick) = best.expect("two or more factors always split");
        let mut left = Vec::new();
        let mut right = Vec::new();
        for ((&s, &c), &all) in sizes.iter().zip(&pick).zip(&counts) {
            left.extend(std::iter::repeat_n(s, c));
            right.extend(std::iter::repeat_n(s, all - c));
        }
        // larger half on the outer side
        let (l, r): (u128, u128) = (
            left.iter().map(|&f| f as u128).product(),
            right.iter().map(|&f| f as u128).product(),
        );
        if l < r {
            std::mem::swap(&mut left, &mut right);
        }
        let outer = SplitTree::balanced(&left);
        let inner = SplitTree::balanced(&right);
        SplitTree::Split {
            size: outer.size() * inner.size(),
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    /// Leaf sizes in outer-to-inner order.
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            SplitTree::Leaf(s) => vec![*s],
            SplitTree::Split { outer, inner, .. } => {
                let mut v = outer.leaves();
                v.extend(inner.leaves());
                v
            }
        }
    }

    /// Node sizes level by level, root first, leaves last.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut levels = Vec::new();
        let mut queue = VecDeque::from([(self, 0usize)]);
        while let Some((node, depth)) = queue.pop_front() {
            if levels.len() <= depth {
                levels.push(Vec::new());
            }
            levels[depth].push(node.size());
            if let SplitTree::Split { outer, inner, .. } = node {
                queue.push_back((outer, depth + 1));
                queue.push_back((inner, depth + 1));
            }
        }
        levels
    }

    pub fn depth(&self) -> usize {
        match self {
            SplitTree::Leaf(_) => 0,
            SplitTree::Split { outer, inner, .. } => 1 + outer.depth().max(inner.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeChoice {
    pub realized_n: u64,
    /// Number of factors is `2^k`.
    pub k: u32,
    /// How many factors equal `m` (the rest are `m + 1`).
    pub z: u64,
    pub factors: Vec<usize>,
    pub tree: SplitTree,
}

impl TreeChoice {
    pub fn levels(&self) -> Vec<Vec<usize>> {
        self.tree.levels()
    }
}

fn mixed_product(m: u64, factor_count: u64, z: u64) -> u128 {
    let big = (m as u128 + 1).saturating_pow((factor_count - z) as u32);
    big.saturating_mul((m as u128).saturating_pow(z as u32))
}

/// Smallest length of the form `(m+1)^(2^k - z) * m^z` that is at least `target_n`.
pub fn choose_tree(target_n: u64, m: usize) -> Result<TreeChoice> {
    if m < 2 {
        return Err(Error::invalid("base size must be >= 2"));
    }
    let m64 = m as u64;
    if (target_n as u128) < (m64 as u128).pow(2) {
        return Err(Error::invalid(format!(
            "target length {target_n} is below m^2 = {}",
            m64 * m64
        )));
    }
    // largest k with m^(2^k) <= target
    let mut k = 1u32;
    while (m64 as u128).saturating_pow(1 << (k + 1)) <= target_n as u128 {
        k += 1;
    }
    let count = 1u64 << k;
    let target = target_n as u128;
    let (k, z, realized) = if mixed_product(m64, count, 0) >= target {
        // product is decreasing in z; find the largest z still >= target
        let (mut lo, mut hi) = (0u64, count);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if mixed_product(m64, count, mid) >= target {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        (k, lo, mixed_product(m64, count, lo))
    } else {
        // every product at the next level is >= m^(2^(k+1)) > target
        let count = count * 2;
        (k + 1, count, mixed_product(m64, count, count))
    };
    let realized_n = u64::try_from(realized)
        .ok()
        .filter(|&r| r < u64::MAX)
        .ok_or_else(|| Error::Capacity(format!("realized length for target {target_n} overflows")))?;
    let count = 1u64 << k;
    let mut factors = vec![m + 1; (count - z) as usize];
    factors.extend(std::iter::repeat_n(m, z as usize));
    let tree = SplitTree::balanced(&factors);
    debug_assert_eq!(tree.size() as u64, realized_n);
    Ok(TreeChoice {
        realized_n,
        k,
        z,
        factors,
        tree,
    })
}

/// Planning knobs beyond the target length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanOptions {
    /// Table budget in bits; defaults to `max(2^20, target_n)`.
    pub budget_bits: Option<u64>,
    pub seed: u64,
    /// Fix the base-case size instead of searching for it.
    pub base_size: Option<usize>,
    /// Require `P > ratio * n`. Zero means the smallest progression prime.
    pub min_prime_ratio: u64,
    pub linnik_l: u32,
    /// Defaults to a randomized search seeded with `seed`.
    pub root_strategy: Option<RootStrategy>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            budget_bits: None,
            seed: 0,
            base_size: None,
            min_prime_ratio: 0,
            linnik_l: DEFAULT_LINNIK_L,
            root_strategy: None,
        }
    }
}

impl PlanOptions {
    pub fn budget_for(&self, target_n: u64) -> u64 {
        self.budget_bits
            .unwrap_or_else(|| MIN_DEFAULT_BUDGET_BITS.max(target_n))
    }
}

/// Everything about one preprocessed transform instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformPlan {
    pub target_n: u64,
    pub length_n: usize,
    pub field_prime: u64,
    pub root: u64,
    pub digit_base: u64,
    pub digit_bits: u32,
    pub linnik_l: u32,
    pub within_linnik_bound: bool,
    pub base_size: usize,
    pub tree: SplitTree,
    pub tree_levels: Vec<Vec<usize>>,
    pub leaf_primes: Vec<u64>,
    pub budget_bits: u64,
    pub table_bits: u128,
    /// Largest power of two `b` with `b^2 * n < P`, if any.
    pub mult_digit_base: Option<u64>,
    /// `ln n / (ln ln n)^2`, the asymptotic base-size rule, for comparison.
    pub m_formula: f64,
    /// Digit width under the `R ~ P^(1/4)` reading.
    pub r_from_field: u32,
    /// Digit width under the `r ~ n^(1/4)` reading.
    pub r_from_length: u32,
    pub seed: u64,
}

struct Candidate {
    tree: TreeChoice,
    prime: ProgressionPrime,
    report: BudgetReport,
}

fn evaluate(target_n: u64, m: usize, opts: &PlanOptions, budget: u64) -> Result<Candidate> {
    let tree = choose_tree(target_n, m)?;
    let floor = opts.min_prime_ratio.saturating_mul(tree.realized_n);
    let prime = find_field_prime_above(tree.realized_n, opts.linnik_l, floor)?;
    let report = layout_report(
        &tree.factors,
        prime.prime,
        digit_bits_for_prime(prime.prime),
        budget,
    )?;
    Ok(Candidate { tree, prime, report })
}

fn search(target_n: u64, opts: &PlanOptions, budget: u64) -> Option<(usize, Candidate)> {
    let mut best = None;
    let mut m = 2usize;
    while (m as u128).pow(2) <= target_n as u128 {
        // a q = 2 table alone holds 2^m * m bits
        if 1u128.checked_shl(m as u32).is_none_or(|t| t * m as u128 > budget as u128) {
            break;
        }
        match evaluate(target_n, m, opts, budget) {
            Ok(c) if c.report.fits => best = Some((m, c)),
            Ok(_) => {}
            Err(Error::TableOverflow { .. }) => break,
            Err(_) => {}
        }
        m += 1;
    }
    best
}

/// Largest base size whose exact table total fits `budget_bits`; 2 if none does.
pub fn choose_base_size(target_n: u64, budget_bits: u64) -> usize {
    let opts = PlanOptions {
        budget_bits: Some(budget_bits),
        ..PlanOptions::default()
    };
    search(target_n, &opts, budget_bits).map_or(2, |(m, _)| m)
}

pub fn make_plan(target_n: u64, budget_bits: u64, seed: u64) -> Result<TransformPlan> {
    make_plan_with(
        target_n,
        &PlanOptions {
            budget_bits: Some(budget_bits),
            seed,
            ..PlanOptions::default()
        },
    )
}

pub fn make_plan_with(target_n: u64, opts: &PlanOptions) -> Result<TransformPlan> {
    if target_n < 4 {
        return Err(Error::invalid(format!("n too small: {target_n} < 4")));
    }
    let budget = opts.budget_for(target_n);
    let (m, candidate) = match opts.base_size {
        Some(m) => (m, evaluate(target_n, m, opts, budget)?),
        None => match search(target_n, opts, budget) {
            Some(found) => found,
            None => (2, evaluate(target_n, 2, opts, budget)?),
        },
    };
    let Candidate { tree, prime, report } = candidate;
    let p = prime.prime;
    let n = tree.realized_n;
    let strategy = opts
        .root_strategy
        .unwrap_or(RootStrategy::Randomized { seed: opts.seed });
    let root = find_root_of_unity(p, n, strategy)?;
    let digit_bits = digit_bits_for_prime(p);

    let layout = TableLayout::new(p, digit_bits, tree.factors.clone(), report.leaf_primes.clone());
    layout.check_crt_headroom()?;

    let plan = TransformPlan {
        target_n,
        length_n: usize::try_from(n).map_err(|_| Error::Capacity("length exceeds usize".into()))?,
        field_prime: p,
        root,
        digit_base: 1 << digit_bits,
        digit_bits,
        linnik_l: opts.linnik_l,
        within_linnik_bound: prime.within_linnik_bound,
        base_size: m,
        tree_levels: tree.levels(),
        tree: tree.tree,
        leaf_primes: report.leaf_primes,
        budget_bits: budget,
        table_bits: report.total_table_bits,
        mult_digit_base: mult_digit_base(n, p),
        m_formula: m_formula(n),
        r_from_field: bits_for(p as u128).div_ceil(4),
        r_from_length: (n as f64).powf(0.25).ceil() as u32,
        seed: opts.seed,
    };
    plan.validate()?;
    Ok(plan)
}

/// Largest power of two `b >= 2` with `b^2 * n < p`.
pub fn mult_digit_base(n: u64, p: u64) -> Option<u64> {
    let mut best = None;
    let mut b = 2u128;
    while b * b * (n as u128) < p as u128 {
        best = Some(b as u64);
        b *= 2;
    }
    best
}

fn m_formula(n: u64) -> f64 {
    let ln = (n as f64).ln();
    let lnln = ln.ln();
    if lnln <= 0.0 {
        0.0
    } else {
        ln / (lnln * lnln)
    }
}

impl TransformPlan {
    /// Rebuild a plan from the fields stored in a table file.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        length_n: u64,
        field_prime: u64,
        root: u64,
        digit_base: u64,
        linnik_l: u32,
        base_size: usize,
        leaf_primes: Vec<u64>,
    ) -> Result<TransformPlan> {
        if !digit_base.is_power_of_two() || digit_base < 2 {
            return Err(Error::invalid(format!("digit base {digit_base} is not a power of two")));
        }
        let tree = choose_tree(length_n, base_size)?;
        if tree.realized_n != length_n {
            return Err(Error::invalid(format!(
                "length {length_n} is not a realizable size for base {base_size}"
            )));
        }
        let digit_bits = digit_base.trailing_zeros();
        let layout = TableLayout::new(field_prime, digit_bits, tree.factors.clone(), leaf_primes.clone());
        let table_bits = layout.total_bits()?;
        let plan = TransformPlan {
            target_n: length_n,
            length_n: length_n as usize,
            field_prime,
            root,
            digit_base,
            digit_bits,
            linnik_l,
            within_linnik_bound: (field_prime as u128) <= (length_n as u128).saturating_pow(linnik_l),
            base_size,
            tree_levels: tree.levels(),
            tree: tree.tree,
            leaf_primes,
            budget_bits: u64::try_from(table_bits).unwrap_or(u64::MAX),
            table_bits,
            mult_digit_base: mult_digit_base(length_n, field_prime),
            m_formula: m_formula(length_n),
            r_from_field: bits_for(field_prime as u128).div_ceil(4),
            r_from_length: (length_n as f64).powf(0.25).ceil() as u32,
            seed: 0,
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn layout(&self) -> TableLayout {
        TableLayout::new(
            self.field_prime,
            self.digit_bits,
            self.leaf_sizes(),
            self.leaf_primes.clone(),
        )
    }

    /// Distinct leaf sizes present in the tree, ascending.
    pub fn leaf_sizes(&self) -> Vec<usize> {
        let mut sizes = self.tree.leaves();
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    }

    pub fn z_count(&self) -> usize {
        self.leaf_primes.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.length_n as u64;
        let p = self.field_prime;
        if self.tree.leaves().iter().map(|&f| f as u128).product::<u128>() != n as u128 {
            return Err(Error::invalid("leaf factors do not multiply to n"));
        }
        if !crate::numtheory::is_prime(p) || p % n != 1 {
            return Err(Error::invalid(format!("P = {p} is not a prime = 1 mod {n}")));
        }
        if !has_exact_order(self.root, n, p) {
            return Err(Error::invalid(format!("root {} does not have order {n} mod {p}", self.root)));
        }
        if self.tree_levels.iter().flatten().any(|&s| s < self.base_size) {
            return Err(Error::invalid("tree node smaller than the base size"));
        }
        let expected = first_primes(self.leaf_primes.len());
        if expected != self.leaf_primes {
            return Err(Error::invalid("leaf primes are not the leading primes"));
        }
        let product: u128 = self.leaf_primes.iter().map(|&q| q as u128).product();
        if product <= (p as u128) * (p as u128) * self.base_size as u128 {
            return Err(Error::invalid("leaf prime product does not exceed P^2 * m"));
        }
        self.layout().check_crt_headroom()?;
        Ok(())
    }
}

impl fmt::Display for TransformPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let levels: Vec<String> = self
            .tree_levels
            .iter()
            .map(|level| level.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x"))
            .collect();
        let primes: Vec<String> = self.leaf_primes.iter().map(|q| q.to_string()).collect();
        writeln!(f, "target_n={}", self.target_n)?;
        writeln!(f, "realized_n={}", self.length_n)?;
        writeln!(f, "P={}", self.field_prime)?;
        writeln!(f, "omega={}", self.root)?;
        writeln!(f, "R={}", self.digit_base)?;
        writeln!(f, "r={}", self.digit_bits)?;
        writeln!(f, "L={}", self.linnik_l)?;
        writeln!(f, "within_linnik_bound={}", self.within_linnik_bound)?;
        writeln!(f, "m={}", self.base_size)?;
        writeln!(f, "tree_levels={}", levels.join(","))?;
        writeln!(f, "Z={}", self.leaf_primes.len())?;
        writeln!(f, "leaf_primes={}", primes.join(","))?;
        writeln!(f, "budget_bits={}", self.budget_bits)?;
        writeln!(f, "table_bits={}", self.table_bits)?;
        match self.mult_digit_base {
            Some(b) => writeln!(f, "mult_digit_base={b}")?,
            None => writeln!(f, "mult_digit_base=none")?,
        }
        writeln!(f, "m_formula={:.4}", self.m_formula)?;
        writeln!(f, "r_from_field={}", self.r_from_field)?;
        writeln!(f, "r_from_length={}", self.r_from_length)?;
        write!(f, "seed={}", self.seed)
    }
}
