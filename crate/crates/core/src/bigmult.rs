//! Exact multiplication of natural numbers through the transform engine.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::counts::OpCounts;
use crate::error::{Error, Result};
use crate::ntt::{pointwise_multiply, LeafMode, NttEngine};
use crate::planner::{make_plan_with, PlanOptions, SplitTree, TransformPlan};

/// Little-endian digits in base `base`, without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitVector {
    pub base: u64,
    pub digits: Vec<u64>,
}

impl DigitVector {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn value(&self) -> BigUint {
        if self.base.is_power_of_two() {
            let w = self.base.trailing_zeros() as usize;
            let mut limbs = vec![0u32; (self.digits.len() * w).div_ceil(32) + 1];
            for (i, &d) in self.digits.iter().enumerate() {
                let mut bit = i * w;
                let mut v = d;
                let mut left = w;
                while left > 0 {
                    let take = left.min(32 - bit % 32);
                    limbs[bit / 32] |= ((v & ((1u64 << take) - 1)) as u32) << (bit % 32);
                    v >>= take;
                    bit += take;
                    left -= take;
                }
            }
            BigUint::new(limbs)
        } else {
            self.digits
                .iter()
                .rev()
                .fold(BigUint::zero(), |acc, &d| acc * self.base + d)
        }
    }
}

fn trim(mut digits: Vec<u64>) -> Vec<u64> {
    while digits.last() == Some(&0) {
        digits.pop();
    }
    digits
}

/// Canonical base-`base` digits of `value`. `base` must be a power of two
/// between 2 and 2^32.
pub fn digitize(value: &BigUint, base: u64) -> Result<DigitVector> {
    if base < 2 || !base.is_power_of_two() || base > 1 << 32 {
        return Err(Error::invalid(format!("digit base {base} is not a power of two in [2, 2^32]")));
    }
    let w = base.trailing_zeros() as u64;
    let limbs = value.to_u64_digits();
    let bits = value.bits();
    let count = bits.div_ceil(w);
    let mut digits = Vec::with_capacity(count as usize);
    for i in 0..count {
        let bit = i * w;
        let (limb, off) = ((bit / 64) as usize, bit % 64);
        let mut v = limbs[limb] >> off;
        if off + w > 64 && limb + 1 < limbs.len() {
            v |= limbs[limb + 1] << (64 - off);
        }
        digits.push(v & (base - 1));
    }
    Ok(DigitVector {
        base,
        digits: trim(digits),
    })
}

/// Canonical digits of `Σ raw[i] · base^i`, given `raw[i] < base^2 · raw.len()`.
pub fn carry_normalize(raw: &[u128], base: u64) -> Result<DigitVector> {
    if base < 2 {
        return Err(Error::invalid(format!("digit base {base} < 2")));
    }
    let bound = (base as u128)
        .checked_mul(base as u128)
        .and_then(|b2| b2.checked_mul(raw.len().max(1) as u128))
        .unwrap_or(u128::MAX);
    if let Some((index, &value)) = raw.iter().enumerate().find(|(_, &v)| v >= bound) {
        return Err(Error::CarryOverflow { index, value, bound });
    }
    let b = base as u128;
    let mut digits = Vec::with_capacity(raw.len() + 4);
    let mut carry = 0u128;
    for &v in raw {
        let t = v + carry;
        digits.push((t % b) as u64);
        carry = t / b;
    }
    while carry > 0 {
        digits.push((carry % b) as u64);
        carry /= b;
    }
    Ok(DigitVector {
        base,
        digits: trim(digits),
    })
}

/// An engine together with a digit base safe for exact convolution.
#[derive(Debug, Clone)]
pub struct Multiplier {
    engine: NttEngine,
    digit_base: u64,
}

impl Multiplier {
    /// Fails unless `digit_base^2 · n < P`.
    pub fn new(engine: NttEngine, digit_base: u64) -> Result<Self> {
        if digit_base < 2 || !digit_base.is_power_of_two() || digit_base > 1 << 32 {
            return Err(Error::invalid(format!("digit base {digit_base} is not a power of two in [2, 2^32]")));
        }
        let n = engine.len() as u128;
        let p = engine.modulus() as u128;
        let b = digit_base as u128;
        if b * b * n >= p {
            return Err(Error::Capacity(format!(
                "digit base {digit_base} too large: {digit_base}^2 * {n} >= P = {p}"
            )));
        }
        Ok(Multiplier { engine, digit_base })
    }

    /// Use the largest safe digit base of the engine's plan.
    pub fn from_engine(engine: NttEngine) -> Result<Self> {
        let base = engine.plan().mult_digit_base.ok_or_else(|| {
            Error::Capacity(format!(
                "P = {} leaves no room for a digit base at n = {}",
                engine.modulus(),
                engine.len()
            ))
        })?;
        Self::new(engine, base)
    }

    /// Plan an engine large enough for operands of the given bit lengths.
    /// With `digit_bits = None` every width in `1..=16` is planned and the one
    /// with the fewest predicted table reads per product wins.
    pub fn for_operands(a_bits: u64, b_bits: u64, digit_bits: Option<u32>, opts: &PlanOptions) -> Result<Self> {
        let w = match digit_bits {
            Some(w) => w,
            None => {
                let mut best: Option<((u128, u128), u32)> = None;
                for w in 1..=MAX_AUTO_DIGIT_BITS {
                    let Ok(plan) = plan_for_width(a_bits, b_bits, w, opts) else {
                        continue;
                    };
                    let d = plan.layout().field_digits() as u128;
                    let n = plan.length_n as u128;
                    let muls = 3 * direct_mulmods(&plan.tree) + 2 * n;
                    let key = (muls * d * d, plan.field_prime as u128);
                    if best.as_ref().is_none_or(|(k, _)| key < *k) {
                        best = Some((key, w));
                    }
                }
                best.map(|(_, w)| w)
                    .ok_or_else(|| Error::Capacity(format!("no digit width fits {a_bits} x {b_bits} bits")))?
            }
        };
        let engine = NttEngine::build(plan_for_width(a_bits, b_bits, w, opts)?)?;
        Self::new(engine, 1 << w)
    }

    pub fn engine(&self) -> &NttEngine {
        &self.engine
    }

    pub fn digit_base(&self) -> u64 {
        self.digit_base
    }

    /// Largest `la + lb - 1` the engine can hold.
    pub fn capacity_digits(&self) -> usize {
        self.engine.len()
    }

    pub fn multiply(&self, a: &BigUint, b: &BigUint, mode: LeafMode, counts: &mut OpCounts) -> Result<BigUint> {
        let da = digitize(a, self.digit_base)?;
        let db = digitize(b, self.digit_base)?;
        if da.is_empty() || db.is_empty() {
            return Ok(BigUint::zero());
        }
        let n = self.engine.len();
        let len = da.len() + db.len() - 1;
        if len > n {
            return Err(Error::Capacity(format!(
                "product needs {len} digits, transform length is {n}"
            )));
        }
        let mut xa = da.digits;
        let mut xb = db.digits;
        xa.resize(n, 0);
        xb.resize(n, 0);
        let fa = self.engine.forward(&xa, mode, counts)?;
        let fb = self.engine.forward(&xb, mode, counts)?;
        let prod = pointwise_multiply(&fa, &fb, &self.engine.tables().digit, counts)?;
        let conv = self.engine.inverse(&prod, mode, counts)?;
        let raw: Vec<u128> = conv[..len].iter().map(|&v| v as u128).collect();
        Ok(carry_normalize(&raw, self.digit_base)?.value())
    }
}

const MAX_AUTO_DIGIT_BITS: u32 = 16;

fn plan_for_width(a_bits: u64, b_bits: u64, w: u32, opts: &PlanOptions) -> Result<TransformPlan> {
    if w == 0 || w > 24 {
        return Err(Error::invalid(format!("digit width {w} outside 1..=24")));
    }
    let la = a_bits.max(1).div_ceil(w as u64);
    let lb = b_bits.max(1).div_ceil(w as u64);
    let opts = PlanOptions {
        min_prime_ratio: opts.min_prime_ratio.max(1 << (2 * w)),
        ..opts.clone()
    };
    make_plan_with((la + lb - 1).max(4), &opts)
}

/// Multiplies in one direct-mode forward transform.
fn direct_mulmods(tree: &SplitTree) -> u128 {
    match tree {
        SplitTree::Leaf(s) => (*s as u128).pow(2),
        SplitTree::Split { size, outer, inner } => {
            outer.size() as u128 * direct_mulmods(inner) + inner.size() as u128 * direct_mulmods(outer) + *size as u128
        }
    }
}

pub fn multiply(
    a: &BigUint,
    b: &BigUint,
    ctx: &Multiplier,
    mode: LeafMode,
    counts: &mut OpCounts,
) -> Result<BigUint> {
    ctx.multiply(a, b, mode, counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::schoolbook_multiply;
    use crate::planner::{make_plan, make_plan_with};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn digitize_examples() {
        assert_eq!(digitize(&big(13), 4).unwrap().digits, vec![1, 3]);
        assert!(digitize(&big(0), 16).unwrap().is_empty());
        assert_eq!(digitize(&big(16), 16).unwrap().digits, vec![0, 1]);
        assert!(digitize(&big(5), 10).is_err());
        let v = BigUint::parse_bytes(b"123456789abcdef0123456789abcdef", 16).unwrap();
        for w in [1u32, 3, 7, 8, 13, 32] {
            assert_eq!(digitize(&v, 1 << w).unwrap().value(), v, "w = {w}");
        }
    }

    #[test]
    fn carry_examples() {
        assert_eq!(carry_normalize(&[12, 0], 10).unwrap().digits, vec![2, 1]);
        assert!(carry_normalize(&[0], 16).unwrap().is_empty());
        assert_eq!(carry_normalize(&[3, 22, 1], 10).unwrap().digits, vec![3, 2, 3]);
        assert_eq!(carry_normalize(&[3, 22, 1], 10).unwrap().value(), big(323));
        assert!(matches!(
            carry_normalize(&[0, 200], 10),
            Err(Error::CarryOverflow { index: 1, value: 200, bound: 200 })
        ));
    }

    #[test]
    fn small_products() {
        let m = Multiplier::for_operands(16, 16, Some(8), &PlanOptions::default()).unwrap();
        let mut c = OpCounts::new();
        for mode in [LeafMode::Lookup, LeafMode::Direct] {
            assert_eq!(m.multiply(&big(3), &big(4), mode, &mut c).unwrap(), big(12));
            assert_eq!(m.multiply(&big(0), &big(77), mode, &mut c).unwrap(), big(0));
            assert_eq!(m.multiply(&big(65535), &big(65535), mode, &mut c).unwrap(), big(65535 * 65535));
        }
    }

    #[test]
    fn random_256_bit_against_schoolbook() {
        let m = Multiplier::for_operands(256, 256, None, &PlanOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(256);
        let mut c = OpCounts::new();
        for _ in 0..200 {
            let a = BigUint::from_bytes_le(&rng.gen::<[u8; 32]>());
            let b = BigUint::from_bytes_le(&rng.gen::<[u8; 32]>());
            let ab = m.multiply(&a, &b, LeafMode::Lookup, &mut c).unwrap();
            assert_eq!(ab, schoolbook_multiply(&a, &b));
            assert_eq!(ab, m.multiply(&b, &a, LeafMode::Direct, &mut c).unwrap());
        }
    }

    #[test]
    fn capacity_is_checked_before_transforms() {
        // n = 16, P = 17: even b = 2 gives 4 * 16 >= 17
        let engine = NttEngine::build(make_plan(16, 1 << 20, 0).unwrap()).unwrap();
        assert!(matches!(Multiplier::new(engine.clone(), 2), Err(Error::Capacity(_))));
        assert!(matches!(Multiplier::from_engine(engine), Err(Error::Capacity(_))));

        // P > 16 * 16 admits b = 2 and b = 4
        let opts = PlanOptions {
            min_prime_ratio: 16,
            ..PlanOptions::default()
        };
        let engine = NttEngine::build(make_plan_with(16, &opts).unwrap()).unwrap();
        assert!(matches!(Multiplier::new(engine.clone(), 1 << 20), Err(Error::Capacity(_))));
        let m = Multiplier::new(engine, 2).unwrap();
        let mut c = OpCounts::new();
        assert!(matches!(
            m.multiply(&big(1 << 12), &big(1 << 8), LeafMode::Direct, &mut c),
            Err(Error::Capacity(_))
        ));
        assert_eq!(c, OpCounts::default());
        assert_eq!(m.multiply(&big(255), &big(255), LeafMode::Direct, &mut c).unwrap(), big(255 * 255));
    }

    proptest! {
        #[test]
        fn carry_preserves_value(
            raw in (1usize..12).prop_flat_map(|len| proptest::collection::vec(0u128..100 * len as u128, len))
        ) {
            let d = carry_normalize(&raw, 10).unwrap();
            let expected = raw.iter().rev().fold(BigUint::zero(), |acc, &v| acc * 10u32 + v);
            prop_assert_eq!(d.value(), expected);
            prop_assert!(d.digits.iter().all(|&x| x < 10));
            prop_assert!(d.digits.last() != Some(&0));
        }
    }
}
